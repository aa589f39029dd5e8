#pragma once

#include <array>
#include <vector>

#include "jssr/grid.hpp"

namespace jssr {

// Symmetric 2x2 or 3x3 tensor in intensity-gradient-squared units. For
// order 2 the xz/yz/zz entries stay 0.
struct SymTensor {
    int order = 2;
    double xx = 0.0, xy = 0.0, yy = 0.0;
    double xz = 0.0, yz = 0.0, zz = 0.0;

    double trace() const { return order == 2 ? xx + yy : xx + yy + zz; }
    SymTensor operator-(const SymTensor& o) const {
        return {order, xx - o.xx, xy - o.xy, yy - o.yy, xz - o.xz, yz - o.yz, zz - o.zz};
    }
    SymTensor operator+(const SymTensor& o) const {
        return {order, xx + o.xx, xy + o.xy, yy + o.yy, xz + o.xz, yz + o.yz, zz + o.zz};
    }
};

// Eigen-decomposition of a SymTensor. values sorted descending, negatives
// clamped to 0; vectors orthonormal, sign fixed so the first nonzero
// component is positive. For order 2 the third pair is (0, +z axis).
struct EigenSystem {
    std::array<double, 3> values{0.0, 0.0, 0.0};
    std::array<Vec3, 3> vectors{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
};

EigenSystem eigen_decompose(const SymTensor& t);

struct SymTensorField {
    GridDims dims;
    std::vector<SymTensor> tensors;
    std::vector<EigenSystem> eigen; // filled by lst()
    bool has_eigen = false;

    SymTensorField() = default;
    explicit SymTensorField(const GridDims& d, int order)
        : dims(d), tensors(d.count(), SymTensor{order}) {}

    const SymTensor& at(int x, int y, int z = 0) const { return tensors[dims.index(x, y, z)]; }
    SymTensor& at(int x, int y, int z = 0) { return tensors[dims.index(x, y, z)]; }
};

// Central differences in the interior, one-sided at the borders.
// Requires every axis extent >= 3.
VectorField gradient(const ScalarImage& image);

// |grad|^2 per point.
ScalarImage gradient_magnitude_sq(const VectorField& grad);

// Gradient structure tensor: outer product of the gradient with itself.
SymTensorField gst(const ScalarImage& image);
SymTensorField gst(const VectorField& grad);

// Local structure tensor: entry-wise Gaussian smoothing of the GST field
// followed by eigen-decomposition. The default 3x3 window (radius 1) with
// sigma 1.5 matches the rest of the pipeline.
SymTensorField lst(const SymTensorField& gst_field, double sigma = 1.5, int window_radius = 1);

// Tensor dissimilarity, full version: accounts for both size and shape
// differences. sqrt((8*pi/15) * (||D||_C^2 + Tr(D)^2 / 2)).
double tensor_distance_L(const SymTensor& t1, const SymTensor& t2);

// Anisotropy-only variant used by the saliency operator:
// sqrt((8*pi/15) * (||D||_C^2 - Tr(D)^2 / 3)). Isotropic differences
// cancel (exactly so for order 3).
double tensor_distance_D(const SymTensor& t1, const SymTensor& t2);

} // namespace jssr
