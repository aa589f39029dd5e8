#pragma once

#include "jssr/grid.hpp"
#include "jssr/tensor.hpp"

namespace jssr {

// A structure-adaptive Gaussian kernel anchored at one grid point. The axes
// come from the reference image's LST; the per-axis scales act as
// variance-like parameters (they divide d^2 directly, not squared).
struct KernelSpec {
    Vec3 center;
    std::array<Vec3, 3> axes{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
    std::array<double, 3> scales{1.5, 1.5, 1.5};
    int order = 2;
    double norm = 1.0;       // prefactor, cancels in regression quotients
    int support_radius = 4;  // window half-extent in grid units
};

// (lu - lv) / (lu + lv); 0 for near-zero tensors.
double anisotropy_2d(double lambda_u, double lambda_v);
double anisotropy_2d(const SymTensor& lst);

// Eccentricity split of the local scale: sigma_u = alpha/(alpha+A)*sigma_c,
// sigma_v = (alpha+A)/alpha*sigma_c, so sigma_u*sigma_v == sigma_c^2.
KernelSpec make_kernel_2d(const EigenSystem& eig, double alpha, double sigma_c,
                          const Vec3& center);

// 3-D scales from the partial anisotropies a_vw, a_uw and the corner
// strength C = (1 - a_vw - a_uw)*|grad|^2; each scale floored at 1e-3
// because strong corners drive the nominal value to or below zero.
KernelSpec make_kernel_3d(const EigenSystem& eig, double grad_mag_sq, double sigma_c,
                          const Vec3& center);

// Same scale on every axis; used when structure adaptivity is disabled.
KernelSpec make_kernel_isotropic(double sigma_c, const Vec3& center, int order);

// Evaluate the kernel at a query position.
double kernel_weight(const KernelSpec& spec, const Vec3& query);

// ceil(3 * sqrt(max scale)), capped at 15.
int support_radius_for(double max_scale);

// One-call forms mirroring the kernel construction per point.
double kernel_2d(const SymTensor& lst, double alpha, double sigma_c, const Vec3& center,
                 const Vec3& query);
double kernel_3d(const SymTensor& lst, double grad_mag_sq, double sigma_c, const Vec3& center,
                 const Vec3& query);

} // namespace jssr
