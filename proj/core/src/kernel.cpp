#include "jssr/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace jssr {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kScaleFloor = 1e-3;
constexpr double kEigenSumEps = 1e-12;
} // namespace

double anisotropy_2d(double lambda_u, double lambda_v) {
    const double sum = lambda_u + lambda_v;
    if (sum < kEigenSumEps) return 0.0;
    return (lambda_u - lambda_v) / sum;
}

double anisotropy_2d(const SymTensor& lst) {
    const EigenSystem es = eigen_decompose(lst);
    return anisotropy_2d(es.values[0], es.values[1]);
}

int support_radius_for(double max_scale) {
    const int r = static_cast<int>(std::ceil(3.0 * std::sqrt(max_scale)));
    return std::min(r, 15);
}

KernelSpec make_kernel_2d(const EigenSystem& eig, double alpha, double sigma_c,
                          const Vec3& center) {
    if (alpha <= 0.0) throw NonPositiveParam("kernel_2d: alpha must be > 0");
    if (sigma_c <= 0.0) throw NonPositiveParam("kernel_2d: sigma_c must be > 0");

    const double a = anisotropy_2d(eig.values[0], eig.values[1]);
    KernelSpec spec;
    spec.center = center;
    spec.order = 2;
    spec.axes = eig.vectors;
    spec.scales[0] = alpha / (alpha + a) * sigma_c;
    spec.scales[1] = (alpha + a) / alpha * sigma_c;
    spec.scales[2] = 1.0;
    spec.norm = 1.0 / (2.0 * kPi * spec.scales[0] * spec.scales[1]);
    spec.support_radius = support_radius_for(std::max(spec.scales[0], spec.scales[1]));
    return spec;
}

KernelSpec make_kernel_3d(const EigenSystem& eig, double grad_mag_sq, double sigma_c,
                          const Vec3& center) {
    if (sigma_c <= 0.0) throw NonPositiveParam("kernel_3d: sigma_c must be > 0");

    const double sum = eig.values[0] + eig.values[1] + eig.values[2];
    double a_vw = 0.0, a_uw = 0.0;
    if (sum >= kEigenSumEps) {
        a_vw = (eig.values[1] - eig.values[2]) / sum;
        a_uw = (eig.values[0] - eig.values[2]) / sum;
    }
    const double plane_term = 1.0 - a_vw - a_uw;
    const double corner_strength = plane_term * grad_mag_sq;
    const double inv = 1.0 / (1.0 + corner_strength);

    KernelSpec spec;
    spec.center = center;
    spec.order = 3;
    spec.axes = eig.vectors;
    spec.scales[0] = std::max(sigma_c * plane_term * inv, kScaleFloor);
    spec.scales[1] = std::max(sigma_c * (1.0 - 2.0 * a_vw) * inv, kScaleFloor);
    spec.scales[2] = std::max(sigma_c * inv, kScaleFloor);
    spec.norm = 1.0 / (std::sqrt(8.0 * kPi * kPi * kPi) * spec.scales[0] * spec.scales[1] *
                       spec.scales[2]);
    spec.support_radius =
        support_radius_for(std::max({spec.scales[0], spec.scales[1], spec.scales[2]}));
    return spec;
}

KernelSpec make_kernel_isotropic(double sigma_c, const Vec3& center, int order) {
    if (sigma_c <= 0.0) throw NonPositiveParam("kernel: sigma_c must be > 0");

    KernelSpec spec;
    spec.center = center;
    spec.order = order;
    spec.scales = {sigma_c, sigma_c, sigma_c};
    spec.norm = order == 2 ? 1.0 / (2.0 * kPi * sigma_c * sigma_c)
                           : 1.0 / (std::sqrt(8.0 * kPi * kPi * kPi) * sigma_c * sigma_c * sigma_c);
    spec.support_radius = support_radius_for(sigma_c);
    return spec;
}

double kernel_weight(const KernelSpec& spec, const Vec3& query) {
    const Vec3 d = query - spec.center;
    double expo = 0.0;
    for (int i = 0; i < spec.order; ++i) {
        const double proj = d.dot(spec.axes[static_cast<std::size_t>(i)]);
        expo += proj * proj / (2.0 * spec.scales[static_cast<std::size_t>(i)]);
    }
    return spec.norm * std::exp(-expo);
}

double kernel_2d(const SymTensor& lst, double alpha, double sigma_c, const Vec3& center,
                 const Vec3& query) {
    return kernel_weight(make_kernel_2d(eigen_decompose(lst), alpha, sigma_c, center), query);
}

double kernel_3d(const SymTensor& lst, double grad_mag_sq, double sigma_c, const Vec3& center,
                 const Vec3& query) {
    return kernel_weight(make_kernel_3d(eigen_decompose(lst), grad_mag_sq, sigma_c, center),
                         query);
}

} // namespace jssr
