#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "jssr/errors.hpp"
#include "jssr/kernel.hpp"
#include "jssr/tensor.hpp"

using namespace jssr;

namespace {

constexpr double kPi = 3.14159265358979323846;

EigenSystem eig2(double lu, double lv, const Vec3& u = {1, 0, 0}, const Vec3& v = {0, 1, 0}) {
    EigenSystem e;
    e.values = {lu, lv, 0.0};
    e.vectors = {u, v, Vec3{0, 0, 1}};
    return e;
}

EigenSystem eig3(double lu, double lv, double lw) {
    EigenSystem e;
    e.values = {lu, lv, lw};
    return e;
}

} // namespace

TEST_CASE("anisotropy from the eigenvalue spread") {
    CHECK(anisotropy_2d(1.0, 1.0) == doctest::Approx(0.0));
    CHECK(anisotropy_2d(0.7, 0.0) == doctest::Approx(1.0));
    CHECK(anisotropy_2d(3.0, 1.0) == doctest::Approx(0.5));
    CHECK(anisotropy_2d(0.0, 0.0) == 0.0); // homogeneous guard
    CHECK(anisotropy_2d(1e-13, 0.0) == 0.0);
}

TEST_CASE("isotropic 2-D kernel: equal scales and hand-evaluated center weight") {
    const KernelSpec spec = make_kernel_2d(eig2(1.0, 1.0), 0.5, 1.5, Vec3{0, 0, 0});
    CHECK(spec.scales[0] == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(spec.scales[1] == doctest::Approx(1.5).epsilon(1e-12));

    const double w0 = kernel_weight(spec, Vec3{0, 0, 0});
    CHECK(w0 == doctest::Approx(1.0 / (2.0 * kPi * 2.25)).epsilon(1e-12));
    CHECK(w0 == doctest::Approx(0.0707).epsilon(1e-3));

    // the exponent divides by sigma, not sigma^2
    const double w1 = kernel_weight(spec, Vec3{1, 0, 0});
    CHECK(w1 == doctest::Approx(w0 * std::exp(-1.0 / (2.0 * 1.5))).epsilon(1e-12));
}

TEST_CASE("full anisotropy splits the scales as alpha/(alpha+A) and its inverse") {
    const KernelSpec spec = make_kernel_2d(eig2(1.0, 0.0), 0.5, 1.5, Vec3{0, 0, 0});
    CHECK(spec.scales[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(spec.scales[1] == doctest::Approx(4.5).epsilon(1e-12));
}

TEST_CASE("scale product stays sigma_c squared across the anisotropy range") {
    for (int i = 0; i <= 100; ++i) {
        const double a = i / 100.0;
        // eigenvalues with spread a: lu = 1+a, lv = 1-a
        const KernelSpec spec = make_kernel_2d(eig2(1.0 + a, 1.0 - a), 0.5, 1.5, Vec3{0, 0, 0});
        CHECK(spec.scales[0] * spec.scales[1] == doctest::Approx(2.25).epsilon(1e-12));
    }
}

TEST_CASE("isotropic kernel weight depends only on the distance") {
    const KernelSpec spec = make_kernel_2d(eig2(0.5, 0.5), 0.5, 1.5, Vec3{0, 0, 0});
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
    for (int i = 0; i < 100; ++i) {
        const double r = 0.1 + 3.0 * (i / 100.0);
        const double t0 = ang(rng), t1 = ang(rng);
        const double w0 = kernel_weight(spec, Vec3{r * std::cos(t0), r * std::sin(t0), 0});
        const double w1 = kernel_weight(spec, Vec3{r * std::cos(t1), r * std::sin(t1), 0});
        CHECK(w0 == doctest::Approx(w1).epsilon(1e-12));
    }
}

TEST_CASE("anisotropic kernel decays slower along the structure direction") {
    std::mt19937 rng(32);
    std::uniform_real_distribution<double> spread(0.05, 1.0);
    for (int i = 0; i < 50; ++i) {
        const double a = spread(rng);
        const KernelSpec spec = make_kernel_2d(eig2(1.0 + a, 1.0 - a), 0.5, 1.5, Vec3{0, 0, 0});
        for (double t : {0.5, 1.0, 2.0, 4.0}) {
            const double along_u = kernel_weight(spec, Vec3{t, 0, 0});
            const double along_v = kernel_weight(spec, Vec3{0, t, 0});
            CHECK(along_v >= along_u);
        }
    }
}

TEST_CASE("kernel weight is maximal at the center, finite and nonnegative") {
    std::mt19937 rng(33);
    std::uniform_real_distribution<double> uni(0.0, 2.0);
    for (int i = 0; i < 50; ++i) {
        const double lu = uni(rng);
        const double lv = uni(rng) * 0.5;
        const KernelSpec spec =
            make_kernel_2d(eig2(std::max(lu, lv), std::min(lu, lv)), 0.5, 1.5, Vec3{3, 4, 0});
        const double w0 = kernel_weight(spec, Vec3{3, 4, 0});
        CHECK(w0 > 0.0);
        for (int q = 0; q < 20; ++q) {
            const double wq = kernel_weight(spec, Vec3{uni(rng) * 8 - 8, uni(rng) * 8 - 8, 0});
            CHECK(std::isfinite(wq));
            CHECK(wq >= 0.0);
            CHECK(w0 >= wq);
        }
    }
}

TEST_CASE("kernel construction rejects nonpositive parameters") {
    CHECK_THROWS_AS(make_kernel_2d(eig2(1, 0), 0.0, 1.5, Vec3{}), NonPositiveParam);
    CHECK_THROWS_AS(make_kernel_2d(eig2(1, 0), -0.5, 1.5, Vec3{}), NonPositiveParam);
    CHECK_THROWS_AS(make_kernel_2d(eig2(1, 0), 0.5, 0.0, Vec3{}), NonPositiveParam);
    CHECK_THROWS_AS(make_kernel_3d(eig3(1, 1, 1), 1.0, -1.0, Vec3{}), NonPositiveParam);
}

TEST_CASE("homogeneous 3-D region gives an isotropic kernel at sigma_c") {
    const KernelSpec spec = make_kernel_3d(eig3(0, 0, 0), 0.0, 1.5, Vec3{0, 0, 0});
    CHECK(spec.scales[0] == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(spec.scales[1] == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(spec.scales[2] == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("3-D partial anisotropies and corner strength") {
    // lambda = (2,1,0): a_vw = 1/3, a_uw = 2/3, plane factor 0 -> floored sigma_u.
    const double grad_sq = 4.0;
    const KernelSpec spec = make_kernel_3d(eig3(2, 1, 0), grad_sq, 1.5, Vec3{0, 0, 0});
    CHECK(spec.scales[0] == doctest::Approx(1e-3).epsilon(1e-9));

    // oracle for the other scales: C = (1 - 1/3 - 2/3) * grad_sq = 0
    CHECK(spec.scales[1] == doctest::Approx(1.5 * (1.0 - 2.0 / 3.0)).epsilon(1e-12));
    CHECK(spec.scales[2] == doctest::Approx(1.5).epsilon(1e-12));

    const double w = kernel_weight(spec, Vec3{0.5, 0.5, 0.5});
    CHECK(std::isfinite(w));
    CHECK(w >= 0.0);
}

TEST_CASE("3-D corner strength shrinks all scales") {
    // isotropic eigenvalues -> a's = 0 -> C = grad_sq
    const double grad_sq = 3.0;
    const KernelSpec spec = make_kernel_3d(eig3(1, 1, 1), grad_sq, 1.5, Vec3{0, 0, 0});
    const double expect = 1.5 / (1.0 + grad_sq);
    CHECK(spec.scales[0] == doctest::Approx(expect).epsilon(1e-12));
    CHECK(spec.scales[1] == doctest::Approx(expect).epsilon(1e-12));
    CHECK(spec.scales[2] == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("support radius follows ceil(3 sqrt(scale)) with a cap") {
    CHECK(support_radius_for(1.5) == 4);
    CHECK(support_radius_for(0.25) == 2);
    CHECK(support_radius_for(100.0) == 15);
    CHECK(support_radius_for(4.5) == 7);
}

TEST_CASE("one-call kernel forms agree with spec construction") {
    SymTensor t;
    t.order = 2;
    t.xx = 2.0;
    t.xy = 0.3;
    t.yy = 0.5;
    const EigenSystem e = eigen_decompose(t);
    const KernelSpec spec = make_kernel_2d(e, 0.5, 1.5, Vec3{1, 1, 0});
    const Vec3 q{2.5, 0.0, 0.0};
    CHECK(kernel_2d(t, 0.5, 1.5, Vec3{1, 1, 0}, q) ==
          doctest::Approx(kernel_weight(spec, q)).epsilon(1e-12));
}
