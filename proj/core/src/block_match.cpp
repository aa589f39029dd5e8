#include "jssr/block_match.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <tuple>
#include <vector>

#include "jssr/errors.hpp"
#include "jssr/parallel.hpp"

namespace jssr {

namespace {

inline int bin_of(double v, int bins) {
    const int b = static_cast<int>(v * bins);
    return std::clamp(b, 0, bins - 1);
}

// MI accumulated cell-by-cell as n_ab * ln(N*n_ab / (n_a*n_b)); integer
// counts make the log argument exactly 1 (hence a contribution of exactly 0)
// whenever a cell carries no association, so flat similarity landscapes tie
// bitwise and the tie-break below stays deterministic.
struct MiScratch {
    int bins = 0;
    int n = 0;
    std::vector<int> joint, ha, hb, touched;
    std::vector<double> log_int; // ln(k) for k <= n*n when affordable

    void reset(int bins_, int n_) {
        bins = bins_;
        n = n_;
        joint.assign(static_cast<std::size_t>(bins) * bins, 0);
        ha.assign(bins, 0);
        hb.assign(bins, 0);
        touched.clear();
        touched.reserve(static_cast<std::size_t>(std::min(n, bins * bins)));
        const long long table = static_cast<long long>(n) * n;
        if (table <= (1 << 22)) {
            log_int.resize(static_cast<std::size_t>(table) + 1);
            log_int[0] = 0.0;
            for (long long k = 1; k <= table; ++k)
                log_int[static_cast<std::size_t>(k)] = std::log(static_cast<double>(k));
        } else {
            log_int.clear();
        }
    }

    double ln_ratio(long long num, long long den) const {
        if (!log_int.empty())
            return log_int[static_cast<std::size_t>(num)] - log_int[static_cast<std::size_t>(den)];
        return std::log(static_cast<double>(num) / static_cast<double>(den));
    }

    double mi(const int* a, const int* b) {
        std::fill(ha.begin(), ha.end(), 0);
        std::fill(hb.begin(), hb.end(), 0);
        for (int i : touched) joint[i] = 0;
        touched.clear();
        for (int i = 0; i < n; ++i) {
            const int cell = a[i] * bins + b[i];
            if (joint[cell]++ == 0) touched.push_back(cell);
            ++ha[a[i]];
            ++hb[b[i]];
        }
        double sum = 0.0;
        for (int cell : touched) {
            const long long nab = joint[cell];
            const long long na = ha[cell / bins];
            const long long nb = hb[cell % bins];
            sum += static_cast<double>(nab) * ln_ratio(nab * n, na * nb);
        }
        return std::max(0.0, sum / n);
    }
};

} // namespace

double mutual_information(std::span<const double> block_a, std::span<const double> block_b,
                          int bins) {
    if (bins < 2) throw ValidationError("mutual_information: need at least 2 bins");
    if (block_a.size() != block_b.size())
        throw TooFewSamples("mutual_information: blocks differ in sample count");
    if (block_a.size() < static_cast<std::size_t>(bins))
        throw TooFewSamples("mutual_information: fewer samples than bins");

    const int n = static_cast<int>(block_a.size());
    std::vector<int> a(n), b(n);
    for (int i = 0; i < n; ++i) {
        a[i] = bin_of(block_a[i], bins);
        b[i] = bin_of(block_b[i], bins);
    }
    MiScratch scratch;
    scratch.reset(bins, n);
    return scratch.mi(a.data(), b.data());
}

SparseDisplacements match_blocks(const ScalarImage& reference, const ScalarImage& moving_warped,
                                 const ScalarImage& jsm, int spacing, int block_radius,
                                 int search_radius, int mi_bins) {
    const GridDims& dims = reference.dims;
    if (!(moving_warped.dims == dims)) throw DimMismatch("match_blocks: image extents differ");
    if (!(jsm.dims == dims)) throw DimMismatch("match_blocks: joint saliency extents differ");
    if (spacing < 1) throw NonPositiveParam("match_blocks: spacing must be >= 1");
    if (block_radius < 1 || search_radius < 1)
        throw NonPositiveParam("match_blocks: block and search radii must be >= 1");
    if (mi_bins < 2) throw ValidationError("match_blocks: need at least 2 bins");

    const int side = 2 * block_radius + 1;
    const int block_n = dims.ndim == 3 ? side * side * side : side * side;
    if (block_n < mi_bins) throw TooFewSamples("match_blocks: block smaller than histogram");

    // Quantize both images once; block gathers then read bin indices with
    // replicate-clamped coordinates.
    std::vector<int> ref_bins(dims.count()), mov_bins(dims.count());
    parallel_for(std::size_t{0}, dims.count(), [&](std::size_t i) {
        ref_bins[i] = bin_of(reference.data[i], mi_bins);
        mov_bins[i] = bin_of(moving_warped.data[i], mi_bins);
    });

    // Only score positions whose reference block fits inside the level;
    // clamp-padded blocks near borders produce junk matches that isolated
    // corners cannot recover from once densified.
    std::vector<int> lat_x, lat_y, lat_z;
    auto lattice_axis = [&](int n, std::vector<int>& out) {
        const int lo = block_radius;
        const int hi = n - 1 - block_radius;
        if (lo > hi) {
            out.push_back((n - 1) / 2); // level smaller than one block
            return;
        }
        for (int p = lo; p <= hi; p += spacing) out.push_back(p);
    };
    lattice_axis(dims.nx, lat_x);
    lattice_axis(dims.ny, lat_y);
    if (dims.ndim == 3)
        lattice_axis(dims.nz, lat_z);
    else
        lat_z.push_back(0);

    SparseDisplacements result;
    result.level_dims = dims;
    result.samples.resize(lat_x.size() * lat_y.size() * lat_z.size());

    const int zr = dims.ndim == 3 ? search_radius : 0;
    const int zb = dims.ndim == 3 ? block_radius : 0;

    auto gather = [&](const std::vector<int>& bins_img, int cx, int cy, int cz, int* out) {
        int k = 0;
        for (int dz = -zb; dz <= zb; ++dz) {
            const int z = std::clamp(cz + dz, 0, dims.nz - 1);
            for (int dy = -block_radius; dy <= block_radius; ++dy) {
                const int y = std::clamp(cy + dy, 0, dims.ny - 1);
                for (int dx = -block_radius; dx <= block_radius; ++dx) {
                    const int x = std::clamp(cx + dx, 0, dims.nx - 1);
                    out[k++] = bins_img[dims.index(x, y, z)];
                }
            }
        }
    };

    parallel_for_chunked(std::size_t{0}, result.samples.size(), [&](std::size_t begin, std::size_t end) {
        MiScratch scratch;
        scratch.reset(mi_bins, block_n);
        std::vector<int> block_a(block_n), block_b(block_n);
        for (std::size_t li = begin; li < end; ++li) {
            const int ix = static_cast<int>(li % lat_x.size());
            const std::size_t rest = li / lat_x.size();
            const int iy = static_cast<int>(rest % lat_y.size());
            const int iz = static_cast<int>(rest / lat_y.size());
            const int cx = lat_x[ix];
            const int cy = lat_y[iy];
            const int cz = lat_z[iz];

            gather(ref_bins, cx, cy, cz, block_a.data());

            double best_mi = -1.0;
            int best_dx = 0, best_dy = 0, best_dz = 0;
            long long best_q = 0;
            for (int dz = -zr; dz <= zr; ++dz) {
                for (int dy = -search_radius; dy <= search_radius; ++dy) {
                    for (int dx = -search_radius; dx <= search_radius; ++dx) {
                        gather(mov_bins, cx + dx, cy + dy, cz + dz, block_b.data());
                        const double mi = scratch.mi(block_a.data(), block_b.data());
                        const long long q =
                            static_cast<long long>(dx) * dx + static_cast<long long>(dy) * dy +
                            static_cast<long long>(dz) * dz;
                        bool take = mi > best_mi;
                        if (!take && mi == best_mi)
                            take = q < best_q ||
                                   (q == best_q && std::tie(dx, dy, dz) <
                                                       std::tie(best_dx, best_dy, best_dz));
                        if (take) {
                            best_mi = mi;
                            best_dx = dx;
                            best_dy = dy;
                            best_dz = dz;
                            best_q = q;
                        }
                    }
                }
            }

            const std::size_t idx = dims.index(cx, cy, cz);
            result.samples[li] = SparseSample{
                Vec3{static_cast<double>(cx), static_cast<double>(cy), static_cast<double>(cz)},
                Vec3{static_cast<double>(best_dx), static_cast<double>(best_dy),
                     static_cast<double>(best_dz)},
                std::clamp(jsm.data[idx], 0.0, 1.0)};
        }
    });

    return result;
}

} // namespace jssr
