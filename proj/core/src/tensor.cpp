#include "jssr/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "jssr/parallel.hpp"

namespace jssr {

namespace {

constexpr double kPi = 3.14159265358979323846;

void fix_sign(Vec3& v) {
    for (int i = 0; i < 3; ++i) {
        if (std::abs(v[i]) > 1e-12) {
            if (v[i] < 0.0) v = v * -1.0;
            return;
        }
    }
}

Vec3 normalized(const Vec3& v) {
    const double n = v.norm();
    return n > 0.0 ? v * (1.0 / n) : v;
}

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

EigenSystem eigen2(const SymTensor& t) {
    EigenSystem es;
    const double mean = 0.5 * (t.xx + t.yy);
    const double half_diff = 0.5 * (t.xx - t.yy);
    const double disc = std::sqrt(half_diff * half_diff + t.xy * t.xy);
    double lu = mean + disc;
    double lv = mean - disc;

    Vec3 u;
    if (disc < 1e-300) {
        // isotropic or zero tensor: coordinate axes
        u = {1, 0, 0};
    } else {
        // rows of (T - lv*I) span the lu eigendirection
        const Vec3 c1{t.xx - lv, t.xy, 0.0};
        const Vec3 c2{t.xy, t.yy - lv, 0.0};
        u = c1.norm() >= c2.norm() ? c1 : c2;
        if (u.norm() < 1e-300) u = {1, 0, 0};
        u = normalized(u);
    }
    Vec3 v{-u.y, u.x, 0.0};
    fix_sign(u);
    fix_sign(v);

    es.values = {std::max(lu, 0.0), std::max(lv, 0.0), 0.0};
    es.vectors = {u, v, Vec3{0, 0, 1}};
    return es;
}

// Cyclic Jacobi sweeps for a symmetric 3x3. Deterministic and accurate for
// near-degenerate spectra where the analytic route loses orthogonality.
void jacobi3(double a[3][3], double lambda[3], Vec3 vec[3]) {
    double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = std::abs(a[0][1]) + std::abs(a[0][2]) + std::abs(a[1][2]);
        if (off == 0.0) break;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                if (std::abs(a[p][q]) == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double sign = theta >= 0.0 ? 1.0 : -1.0;
                const double tval = sign / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(tval * tval + 1.0);
                const double s = tval * c;
                for (int k = 0; k < 3; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for (int k = 0; k < 3; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    for (int i = 0; i < 3; ++i) {
        lambda[i] = a[i][i];
        vec[i] = {v[0][i], v[1][i], v[2][i]};
    }
}

EigenSystem eigen3(const SymTensor& t) {
    const double a[3][3] = {{t.xx, t.xy, t.xz}, {t.xy, t.yy, t.yz}, {t.xz, t.yz, t.zz}};

    double lambda[3];
    Vec3 vec[3];
    bool need_jacobi = false;

    const double p1 = t.xy * t.xy + t.xz * t.xz + t.yz * t.yz;
    const double scale = std::abs(t.xx) + std::abs(t.yy) + std::abs(t.zz) + 2.0 * std::sqrt(p1);

    if (p1 == 0.0) {
        lambda[0] = t.xx;
        lambda[1] = t.yy;
        lambda[2] = t.zz;
        vec[0] = {1, 0, 0};
        vec[1] = {0, 1, 0};
        vec[2] = {0, 0, 1};
    } else {
        // analytic trigonometric eigenvalues
        const double q = t.trace() / 3.0;
        const double p2 = (t.xx - q) * (t.xx - q) + (t.yy - q) * (t.yy - q) +
                          (t.zz - q) * (t.zz - q) + 2.0 * p1;
        const double p = std::sqrt(p2 / 6.0);
        const double inv_p = 1.0 / p;
        const double b00 = (t.xx - q) * inv_p, b11 = (t.yy - q) * inv_p, b22 = (t.zz - q) * inv_p;
        const double b01 = t.xy * inv_p, b02 = t.xz * inv_p, b12 = t.yz * inv_p;
        double detb = b00 * (b11 * b22 - b12 * b12) - b01 * (b01 * b22 - b12 * b02) +
                      b02 * (b01 * b12 - b11 * b02);
        double r = detb / 2.0;
        r = std::clamp(r, -1.0, 1.0);
        const double phi = std::acos(r) / 3.0;

        lambda[0] = q + 2.0 * p * std::cos(phi);
        lambda[2] = q + 2.0 * p * std::cos(phi + 2.0 * kPi / 3.0);
        lambda[1] = 3.0 * q - lambda[0] - lambda[2];

        // near-degenerate spectrum: cross products below turn unstable
        const double tol = 1e-8 * std::max(scale, 1e-300);
        if (lambda[0] - lambda[1] < tol || lambda[1] - lambda[2] < tol) {
            need_jacobi = true;
        } else {
            for (int i = 0; i < 3 && !need_jacobi; ++i) {
                const double l = lambda[i];
                const Vec3 r0{a[0][0] - l, a[0][1], a[0][2]};
                const Vec3 r1{a[1][0], a[1][1] - l, a[1][2]};
                const Vec3 r2{a[2][0], a[2][1], a[2][2] - l};
                const Vec3 c01 = cross(r0, r1);
                const Vec3 c02 = cross(r0, r2);
                const Vec3 c12 = cross(r1, r2);
                Vec3 best = c01;
                if (c02.norm() > best.norm()) best = c02;
                if (c12.norm() > best.norm()) best = c12;
                if (best.norm() < 1e-14 * scale * scale) {
                    need_jacobi = true;
                } else {
                    vec[i] = normalized(best);
                }
            }
        }
    }

    if (need_jacobi) {
        double m[3][3] = {{a[0][0], a[0][1], a[0][2]},
                          {a[1][0], a[1][1], a[1][2]},
                          {a[2][0], a[2][1], a[2][2]}};
        jacobi3(m, lambda, vec);
    }

    // sort descending
    int order[3] = {0, 1, 2};
    std::sort(order, order + 3, [&](int i, int j) { return lambda[i] > lambda[j]; });

    EigenSystem es;
    for (int i = 0; i < 3; ++i) {
        es.values[static_cast<std::size_t>(i)] = std::max(lambda[order[i]], 0.0);
        es.vectors[static_cast<std::size_t>(i)] = vec[order[i]];
    }

    // enforce exact orthonormality
    Vec3& u = es.vectors[0];
    Vec3& v = es.vectors[1];
    Vec3& w = es.vectors[2];
    u = normalized(u);
    v = normalized(v - u * v.dot(u));
    if (v.norm() < 0.5) v = normalized(cross(u, std::abs(u.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0}));
    w = cross(u, v);
    fix_sign(u);
    fix_sign(v);
    fix_sign(w);
    return es;
}

} // namespace

EigenSystem eigen_decompose(const SymTensor& t) {
    return t.order == 2 ? eigen2(t) : eigen3(t);
}

VectorField gradient(const ScalarImage& image) {
    const GridDims& d = image.dims;
    for (int axis = 0; axis < d.ndim; ++axis)
        if (d.extent(axis) < 3) throw TooSmall("gradient: every axis extent must be >= 3");

    VectorField grad(d);
    parallel_for(0, static_cast<std::int64_t>(d.count()), [&](std::int64_t idx) {
        const int x = static_cast<int>(idx % d.nx);
        const int y = static_cast<int>((idx / d.nx) % d.ny);
        const int z = static_cast<int>(idx / (static_cast<std::int64_t>(d.nx) * d.ny));

        const auto diff = [&](int axis, int px, int py, int pz) {
            const int n = d.extent(axis);
            int c[3] = {px, py, pz};
            if (c[axis] == 0) {
                int hi[3] = {px, py, pz};
                hi[axis] = 1;
                return image.at(hi[0], hi[1], hi[2]) - image.at(px, py, pz);
            }
            if (c[axis] == n - 1) {
                int lo[3] = {px, py, pz};
                lo[axis] = n - 2;
                return image.at(px, py, pz) - image.at(lo[0], lo[1], lo[2]);
            }
            int hi[3] = {px, py, pz};
            int lo[3] = {px, py, pz};
            hi[axis] += 1;
            lo[axis] -= 1;
            return 0.5 * (image.at(hi[0], hi[1], hi[2]) - image.at(lo[0], lo[1], lo[2]));
        };

        Vec3 g{diff(0, x, y, z), diff(1, x, y, z), 0.0};
        if (d.ndim == 3) g.z = diff(2, x, y, z);
        grad.vectors[static_cast<std::size_t>(idx)] = g;
    });
    return grad;
}

ScalarImage gradient_magnitude_sq(const VectorField& grad) {
    ScalarImage out(grad.dims);
    for (std::size_t i = 0; i < grad.vectors.size(); ++i)
        out.data[i] = grad.vectors[i].dot(grad.vectors[i]);
    return out;
}

SymTensorField gst(const VectorField& grad) {
    const int order = grad.dims.ndim;
    SymTensorField field(grad.dims, order);
    for (std::size_t i = 0; i < grad.vectors.size(); ++i) {
        const Vec3& g = grad.vectors[i];
        SymTensor& t = field.tensors[i];
        t.order = order;
        t.xx = g.x * g.x;
        t.xy = g.x * g.y;
        t.yy = g.y * g.y;
        if (order == 3) {
            t.xz = g.x * g.z;
            t.yz = g.y * g.z;
            t.zz = g.z * g.z;
        }
    }
    return field;
}

SymTensorField gst(const ScalarImage& image) { return gst(gradient(image)); }

SymTensorField lst(const SymTensorField& gst_field, double sigma, int window_radius) {
    if (sigma <= 0.0) throw NonPositiveParam("lst: sigma must be > 0");
    if (window_radius < 1) throw NonPositiveParam("lst: window radius must be >= 1");

    const GridDims& d = gst_field.dims;
    const int order = d.ndim;
    const int n_entries = order == 2 ? 3 : 6;

    // smooth each tensor entry as its own scalar image
    std::array<ScalarImage, 6> entry;
    for (int e = 0; e < n_entries; ++e) entry[static_cast<std::size_t>(e)] = ScalarImage(d);
    for (std::size_t i = 0; i < gst_field.tensors.size(); ++i) {
        const SymTensor& t = gst_field.tensors[i];
        entry[0].data[i] = t.xx;
        entry[1].data[i] = t.xy;
        entry[2].data[i] = t.yy;
        if (order == 3) {
            entry[3].data[i] = t.xz;
            entry[4].data[i] = t.yz;
            entry[5].data[i] = t.zz;
        }
    }
    for (int e = 0; e < n_entries; ++e)
        entry[static_cast<std::size_t>(e)] =
            gaussian_smooth(entry[static_cast<std::size_t>(e)], sigma, window_radius);

    SymTensorField out(d, order);
    out.eigen.resize(d.count());
    out.has_eigen = true;
    parallel_for(0, static_cast<std::int64_t>(d.count()), [&](std::int64_t idx) {
        const std::size_t i = static_cast<std::size_t>(idx);
        SymTensor& t = out.tensors[i];
        t.order = order;
        t.xx = entry[0].data[i];
        t.xy = entry[1].data[i];
        t.yy = entry[2].data[i];
        if (order == 3) {
            t.xz = entry[3].data[i];
            t.yz = entry[4].data[i];
            t.zz = entry[5].data[i];
        }
        out.eigen[i] = eigen_decompose(t);
    });
    return out;
}

namespace {

inline double frobenius_sq(const SymTensor& t) {
    double s = t.xx * t.xx + t.yy * t.yy + 2.0 * t.xy * t.xy;
    if (t.order == 3) s += t.zz * t.zz + 2.0 * (t.xz * t.xz + t.yz * t.yz);
    return s;
}

} // namespace

double tensor_distance_L(const SymTensor& t1, const SymTensor& t2) {
    const SymTensor delta = t1 - t2;
    const double tr = delta.trace();
    const double radicand = (8.0 * kPi / 15.0) * (frobenius_sq(delta) + 0.5 * tr * tr);
    return std::sqrt(std::max(radicand, 0.0));
}

double tensor_distance_D(const SymTensor& t1, const SymTensor& t2) {
    const SymTensor delta = t1 - t2;
    const double tr = delta.trace();
    // |delta|^2 - tr^2/3 rewritten as a sum of squares: the deviatoric norm
    // (plus tr^2/6 for order 2), so isotropic differences cancel exactly
    // instead of leaving sqrt-amplified roundoff.
    double inner;
    if (delta.order == 3) {
        const double m = tr / 3.0;
        inner = (delta.xx - m) * (delta.xx - m) + (delta.yy - m) * (delta.yy - m) +
                (delta.zz - m) * (delta.zz - m) +
                2.0 * (delta.xy * delta.xy + delta.xz * delta.xz + delta.yz * delta.yz);
    } else {
        const double m = tr / 2.0;
        inner = (delta.xx - m) * (delta.xx - m) + (delta.yy - m) * (delta.yy - m) +
                2.0 * delta.xy * delta.xy + tr * tr / 6.0;
    }
    return std::sqrt((8.0 * kPi / 15.0) * inner);
}

} // namespace jssr
