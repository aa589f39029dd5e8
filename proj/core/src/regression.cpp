#include "jssr/regression.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "jssr/errors.hpp"
#include "jssr/parallel.hpp"

namespace jssr {

namespace {

constexpr int kMaxBasis = 10; // 3-D order 2: 1 + 3 + 6

int basis_size(int ndim, int order) {
    if (order == 0) return 1;
    if (order == 1) return 1 + ndim;
    return 1 + ndim + ndim * (ndim + 1) / 2;
}

int fill_basis(const Vec3& d, int ndim, int order, std::array<double, kMaxBasis>& phi) {
    int m = 0;
    phi[m++] = 1.0;
    if (order >= 1) {
        phi[m++] = d.x;
        phi[m++] = d.y;
        if (ndim == 3) phi[m++] = d.z;
    }
    if (order >= 2) {
        phi[m++] = d.x * d.x;
        phi[m++] = d.x * d.y;
        phi[m++] = d.y * d.y;
        if (ndim == 3) {
            phi[m++] = d.x * d.z;
            phi[m++] = d.y * d.z;
            phi[m++] = d.z * d.z;
        }
    }
    return m;
}

// Householder QR solve of the sqrt(w)-weighted design (column-major, n rows,
// m basis columns) against ncomp right-hand sides. QR keeps the full working
// precision that normal equations lose by squaring the condition number,
// which matters when eccentric kernels spread the weights over many decades.
// Returns false when a pivot collapses relative to its column norm
// (rank-deficient sample geometry).
bool qr_solve(std::vector<double>& a, std::array<std::vector<double>, 3>& rhs, int n, int m,
              int ncomp) {
    std::array<double, kMaxBasis> col_norm{};
    std::array<double, kMaxBasis> rdiag{};
    for (int j = 0; j < m; ++j) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += a[static_cast<std::size_t>(j) * n + i] *
                                         a[static_cast<std::size_t>(j) * n + i];
        col_norm[static_cast<std::size_t>(j)] = std::sqrt(s);
    }

    for (int j = 0; j < m; ++j) {
        double* cj = &a[static_cast<std::size_t>(j) * n];
        double s = 0.0;
        for (int i = j; i < n; ++i) s += cj[i] * cj[i];
        const double norm = std::sqrt(s);
        if (norm <= 1e-12 * col_norm[static_cast<std::size_t>(j)]) return false;

        const double alpha = cj[j] >= 0.0 ? -norm : norm;
        rdiag[static_cast<std::size_t>(j)] = alpha;
        cj[j] -= alpha; // reflector v stored in rows j..n of column j
        const double vtv = 2.0 * (s - alpha * (cj[j] + alpha));
        if (!(vtv > 0.0)) return false;

        auto reflect = [&](double* col) {
            double dot = 0.0;
            for (int i = j; i < n; ++i) dot += cj[i] * col[i];
            const double f = 2.0 * dot / vtv;
            for (int i = j; i < n; ++i) col[i] -= f * cj[i];
        };
        for (int k = j + 1; k < m; ++k) reflect(&a[static_cast<std::size_t>(k) * n]);
        for (int c = 0; c < ncomp; ++c) reflect(rhs[static_cast<std::size_t>(c)].data());
    }

    // Back-substitute R b = Q^T y; R's off-diagonals live in the transformed
    // columns (row j of column k), the diagonal in rdiag.
    for (int c = 0; c < ncomp; ++c) {
        auto& b = rhs[static_cast<std::size_t>(c)];
        for (int j = m - 1; j >= 0; --j) {
            double sum = b[static_cast<std::size_t>(j)];
            for (int k = j + 1; k < m; ++k)
                sum -= a[static_cast<std::size_t>(k) * n + j] * b[static_cast<std::size_t>(k)];
            b[static_cast<std::size_t>(j)] = sum / rdiag[static_cast<std::size_t>(j)];
        }
    }
    return true;
}

Vec3 weighted_average(std::span<const SparseSample> samples, std::span<const double> w) {
    Vec3 num{0, 0, 0};
    double den = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        num = num + samples[i].displacement * w[i];
        den += w[i];
    }
    return num * (1.0 / den);
}

// Weighted polynomial fit; the constant term is the estimate at the kernel
// center. Falls back to the plain weighted average when the system is
// singular or there are fewer samples than basis functions.
Vec3 weighted_fit(std::span<const SparseSample> samples, std::span<const double> w,
                  const Vec3& x, int ndim, int order) {
    if (order == 0) return weighted_average(samples, w);
    const int m = basis_size(ndim, order);
    const int ncomp = ndim;

    int n = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) n += w[i] > 0.0;
    if (n < m) return weighted_average(samples, w);

    std::vector<double> design(static_cast<std::size_t>(n) * m);
    std::array<std::vector<double>, 3> rhs;
    for (int c = 0; c < ncomp; ++c) rhs[static_cast<std::size_t>(c)].resize(static_cast<std::size_t>(n));

    std::array<double, kMaxBasis> phi;
    int row = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!(w[i] > 0.0)) continue;
        const double sw = std::sqrt(w[i]);
        fill_basis(samples[i].position - x, ndim, order, phi);
        for (int c = 0; c < m; ++c)
            design[static_cast<std::size_t>(c) * n + row] = sw * phi[static_cast<std::size_t>(c)];
        rhs[0][static_cast<std::size_t>(row)] = sw * samples[i].displacement.x;
        rhs[1][static_cast<std::size_t>(row)] = sw * samples[i].displacement.y;
        if (ncomp == 3) rhs[2][static_cast<std::size_t>(row)] = sw * samples[i].displacement.z;
        ++row;
    }

    if (!qr_solve(design, rhs, n, m, ncomp)) return weighted_average(samples, w);
    return Vec3{rhs[0][0], rhs[1][0], ncomp == 3 ? rhs[2][0] : 0.0};
}

} // namespace

LocalFit fit_local(std::span<const SparseSample> samples, const KernelSpec& kernel,
                   const RegressionConfig& config, const Vec3& x) {
    if (config.order < 0 || config.order > 2)
        throw ValidationError("fit order must be 0, 1, or 2");
    if (samples.empty()) return LocalFit{Vec3{0, 0, 0}, true};

    std::vector<double> w(samples.size());
    double total = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        w[i] = kernel_weight(kernel, samples[i].position) * samples[i].certainty;
        total += w[i];
    }
    if (total < config.min_total_weight) {
        total = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            w[i] = kernel_weight(kernel, samples[i].position);
            total += w[i];
        }
        if (total < config.min_total_weight) return LocalFit{Vec3{0, 0, 0}, true};
    }
    return LocalFit{weighted_fit(samples, w, x, kernel.order, config.order), false};
}

namespace {

// Uniform bucket grid for window gathers; cells enumerate samples in
// insertion order so gathers are reproducible regardless of threading.
struct BucketGrid {
    static constexpr int kCell = 16;
    int cx, cy, cz;
    std::vector<std::vector<int>> cells;

    BucketGrid(const GridDims& dims, const std::vector<SparseSample>& samples)
        : cx((dims.nx + kCell - 1) / kCell),
          cy((dims.ny + kCell - 1) / kCell),
          cz((dims.nz + kCell - 1) / kCell),
          cells(static_cast<std::size_t>(cx) * cy * cz) {
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto& p = samples[i].position;
            const int bx = std::clamp(static_cast<int>(p.x) / kCell, 0, cx - 1);
            const int by = std::clamp(static_cast<int>(p.y) / kCell, 0, cy - 1);
            const int bz = std::clamp(static_cast<int>(p.z) / kCell, 0, cz - 1);
            cells[static_cast<std::size_t>(bx) + static_cast<std::size_t>(cx) * (by + static_cast<std::size_t>(cy) * bz)]
                .push_back(static_cast<int>(i));
        }
    }

    template <typename Fn>
    void for_window(const Vec3& x, double radius, Fn&& fn) const {
        const int x0 = std::clamp(static_cast<int>(std::floor((x.x - radius) / kCell)), 0, cx - 1);
        const int x1 = std::clamp(static_cast<int>(std::floor((x.x + radius) / kCell)), 0, cx - 1);
        const int y0 = std::clamp(static_cast<int>(std::floor((x.y - radius) / kCell)), 0, cy - 1);
        const int y1 = std::clamp(static_cast<int>(std::floor((x.y + radius) / kCell)), 0, cy - 1);
        const int z0 = std::clamp(static_cast<int>(std::floor((x.z - radius) / kCell)), 0, cz - 1);
        const int z1 = std::clamp(static_cast<int>(std::floor((x.z + radius) / kCell)), 0, cz - 1);
        for (int bz = z0; bz <= z1; ++bz)
            for (int by = y0; by <= y1; ++by)
                for (int bx = x0; bx <= x1; ++bx)
                    for (int i : cells[static_cast<std::size_t>(bx) +
                                       static_cast<std::size_t>(cx) * (by + static_cast<std::size_t>(cy) * bz)])
                        fn(i);
    }
};

// Round-based fill: every low-confidence point takes the mean of its
// face neighbors resolved in earlier rounds, so the result is independent
// of traversal order. Points unreachable from any confident region stay
// at zero displacement.
void fill_low_confidence(DisplacementField& field, std::vector<char>& flagged) {
    const auto& d = field.dims;
    std::size_t remaining = 0;
    for (char f : flagged) remaining += f != 0;
    while (remaining > 0) {
        std::vector<std::pair<std::size_t, Vec3>> fills;
        for (int z = 0; z < d.nz; ++z) {
            for (int y = 0; y < d.ny; ++y) {
                for (int x = 0; x < d.nx; ++x) {
                    const std::size_t idx = d.index(x, y, z);
                    if (!flagged[idx]) continue;
                    Vec3 sum{0, 0, 0};
                    int n = 0;
                    auto take = [&](int xx, int yy, int zz) {
                        const std::size_t j = d.index(xx, yy, zz);
                        if (!flagged[j]) {
                            sum = sum + field.vectors[j];
                            ++n;
                        }
                    };
                    if (x > 0) take(x - 1, y, z);
                    if (x + 1 < d.nx) take(x + 1, y, z);
                    if (y > 0) take(x, y - 1, z);
                    if (y + 1 < d.ny) take(x, y + 1, z);
                    if (d.ndim == 3) {
                        if (z > 0) take(x, y, z - 1);
                        if (z + 1 < d.nz) take(x, y, z + 1);
                    }
                    if (n > 0) fills.emplace_back(idx, sum * (1.0 / n));
                }
            }
        }
        if (fills.empty()) break;
        for (const auto& [idx, v] : fills) {
            field.vectors[idx] = v;
            flagged[idx] = 0;
        }
        remaining -= fills.size();
    }
}

} // namespace

DisplacementField densify(const SparseDisplacements& sparse, const SymTensorField& ref_lst,
                          const RegressionConfig& config, const ScalarImage* grad_mag_sq,
                          bool force_isotropic) {
    const GridDims& dims = sparse.level_dims;
    if (sparse.samples.empty()) throw EmptySamples("densify: no sparse samples");
    if (!(ref_lst.dims == dims)) throw DimMismatch("densify: LST grid does not match level grid");
    if (dims.ndim == 3 && !force_isotropic && grad_mag_sq == nullptr)
        throw ValidationError("densify: 3-D kernels need gradient magnitudes");
    if (grad_mag_sq != nullptr && !(grad_mag_sq->dims == dims))
        throw DimMismatch("densify: gradient grid does not match level grid");
    if (config.order < 0 || config.order > 2)
        throw ValidationError("fit order must be 0, 1, or 2");
    if (!(config.sigma_c > 0.0) || !(config.alpha > 0.0))
        throw NonPositiveParam("densify: alpha and sigma_c must be positive");

    DisplacementField out(dims);
    std::vector<char> flagged(dims.count(), 0);
    const BucketGrid buckets(dims, sparse.samples);

    parallel_for_chunked(std::size_t{0}, dims.count(), [&](std::size_t begin, std::size_t end) {
        std::vector<SparseSample> window;
        for (std::size_t idx = begin; idx < end; ++idx) {
            const int x = static_cast<int>(idx % static_cast<std::size_t>(dims.nx));
            const std::size_t rest = idx / static_cast<std::size_t>(dims.nx);
            const int y = static_cast<int>(rest % static_cast<std::size_t>(dims.ny));
            const int z = static_cast<int>(rest / static_cast<std::size_t>(dims.ny));
            const Vec3 pos{static_cast<double>(x), static_cast<double>(y), static_cast<double>(z)};

            KernelSpec kernel;
            if (force_isotropic) {
                kernel = make_kernel_isotropic(config.sigma_c, pos, dims.ndim);
            } else {
                const EigenSystem eig =
                    ref_lst.has_eigen ? ref_lst.eigen[idx] : eigen_decompose(ref_lst.tensors[idx]);
                kernel = dims.ndim == 2
                             ? make_kernel_2d(eig, config.alpha, config.sigma_c, pos)
                             : make_kernel_3d(eig, grad_mag_sq->data[idx], config.sigma_c, pos);
            }

            window.clear();
            const double r = kernel.support_radius;
            buckets.for_window(pos, r, [&](int i) {
                const auto& s = sparse.samples[i];
                if (std::abs(s.position.x - pos.x) <= r && std::abs(s.position.y - pos.y) <= r &&
                    std::abs(s.position.z - pos.z) <= r)
                    window.push_back(s);
            });

            const LocalFit fit = fit_local(window, kernel, config, pos);
            out.vectors[idx] = fit.value;
            flagged[idx] = fit.low_confidence ? 1 : 0;
        }
    });

    fill_low_confidence(out, flagged);
    return out;
}

} // namespace jssr
