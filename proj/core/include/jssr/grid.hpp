#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "jssr/errors.hpp"

namespace jssr {

// Extents of a regular 2-D or 3-D grid. For 2-D grids nz == 1 and the z
// coordinate of every position/vector is 0. Storage order is x-fastest:
// index = x + nx * (y + ny * z).
struct GridDims {
    int nx = 0, ny = 0, nz = 1;
    int ndim = 2;

    static GridDims d2(int nx, int ny) { return {nx, ny, 1, 2}; }
    static GridDims d3(int nx, int ny, int nz) { return {nx, ny, nz, 3}; }

    std::size_t count() const {
        return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
               static_cast<std::size_t>(nz);
    }
    int extent(int axis) const { return axis == 0 ? nx : axis == 1 ? ny : nz; }
    std::size_t index(int x, int y, int z = 0) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(nx) *
                   (static_cast<std::size_t>(y) + static_cast<std::size_t>(ny) * static_cast<std::size_t>(z));
    }
    bool operator==(const GridDims&) const = default;
};

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double& operator[](int i) { return i == 0 ? x : i == 1 ? y : z; }
    double operator[](int i) const { return i == 0 ? x : i == 1 ? y : z; }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x; y += o.y; z += o.z;
        return *this;
    }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Scalar grid of intensities. Registration inputs are normalized to [0,1]
// at load time; intermediate maps reuse the container.
struct ScalarImage {
    GridDims dims;
    std::vector<double> data;

    ScalarImage() = default;
    explicit ScalarImage(const GridDims& d, double fill = 0.0)
        : dims(d), data(d.count(), fill) {}

    double& at(int x, int y, int z = 0) { return data[dims.index(x, y, z)]; }
    double at(int x, int y, int z = 0) const { return data[dims.index(x, y, z)]; }
};

// Per-grid-point vectors. Used for displacement fields (units: pixels of the
// level the field lives on) and for image gradients.
struct VectorField {
    GridDims dims;
    std::vector<Vec3> vectors;

    VectorField() = default;
    explicit VectorField(const GridDims& d) : dims(d), vectors(d.count()) {}

    Vec3& at(int x, int y, int z = 0) { return vectors[dims.index(x, y, z)]; }
    const Vec3& at(int x, int y, int z = 0) const { return vectors[dims.index(x, y, z)]; }
};

using DisplacementField = VectorField;

struct PyramidLevel {
    int level_index = 0;  // 0 = coarsest
    int scale_factor = 1; // power of two relative to full resolution
    ScalarImage image;
};

// Separable Gaussian smoothing with replicate-edge boundaries. radius < 0
// selects ceil(3*sigma). The 1-D kernel is normalized to unit sum, so
// constants are preserved exactly.
ScalarImage gaussian_smooth(const ScalarImage& image, double sigma, int radius = -1);

// Coarse-to-fine pyramid; level L has extents ceil(full / 2^(levels-1-L)).
// Each coarser level is smoothed (sigma 0.8) and decimated by 2. Throws
// LevelsExceedResolution if the coarsest level would drop under 4 points
// on any axis.
std::vector<PyramidLevel> build_pyramid(const ScalarImage& image, int levels);

// Linear interpolation with coordinates clamped to the domain.
double sample(const ScalarImage& image, double x, double y, double z = 0.0);
inline double sample(const ScalarImage& image, const Vec3& p) {
    return sample(image, p.x, p.y, p.z);
}

// Component-wise linear interpolation of a vector field, clamped.
Vec3 sample_field(const VectorField& field, const Vec3& p);

// Backward warp: output(x) = sample(image, x + field(x)).
ScalarImage warp(const ScalarImage& image, const DisplacementField& field);

// result(x) = current(x) + initial(x + current(x)); the update that makes
// warp(moving, result) == warp(warp(moving, initial), current).
DisplacementField compose(const DisplacementField& initial, const DisplacementField& current);

// Resample a field onto a finer grid (per-axis integer factor, nominally 2)
// and rescale the vector components into target-grid units.
DisplacementField upsample_field(const DisplacementField& field, const GridDims& target);

// Min-max normalization to [0,1]; a constant input maps to all zeros.
ScalarImage normalize_minmax(const ScalarImage& image);

} // namespace jssr
