#include "jssr/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "jssr/parallel.hpp"

namespace jssr {

SaliencyMap saliency(const SymTensorField& lst_field, int neighborhood_radius) {
    if (neighborhood_radius < 1) throw NonPositiveParam("saliency: radius must be >= 1");

    const GridDims& d = lst_field.dims;
    const int r = neighborhood_radius;
    ScalarImage raw(d);

    const auto clampi = [](int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); };

    parallel_for(0, static_cast<std::int64_t>(d.count()), [&](std::int64_t idx) {
        const int x = static_cast<int>(idx % d.nx);
        const int y = static_cast<int>((idx / d.nx) % d.ny);
        const int z = static_cast<int>(idx / (static_cast<std::int64_t>(d.nx) * d.ny));
        const SymTensor& center = lst_field.tensors[static_cast<std::size_t>(idx)];

        const int zr = d.ndim == 3 ? r : 0;
        double acc = 0.0;
        int count = 0;
        for (int dz = -zr; dz <= zr; ++dz) {
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    if (dx == 0 && dy == 0 && dz == 0) continue;
                    const int qx = clampi(x + dx, d.nx - 1);
                    const int qy = clampi(y + dy, d.ny - 1);
                    const int qz = clampi(z + dz, d.nz - 1);
                    acc += tensor_distance_D(lst_field.at(qx, qy, qz), center);
                    ++count;
                }
            }
        }
        raw.data[static_cast<std::size_t>(idx)] = acc / count;
    });

    return normalize_minmax(raw);
}

JointSaliencyMap jsm(const SaliencyMap& ref_saliency, const SaliencyMap& mov_saliency,
                     const SymTensorField& ref_lst, const SymTensorField& mov_lst,
                     double amplitude) {
    const GridDims& d = ref_saliency.dims;
    if (!(d == mov_saliency.dims) || !(d == ref_lst.dims) || !(d == mov_lst.dims))
        throw DimMismatch("jsm: input dims differ");

    const std::size_t n = d.count();
    std::vector<double> dist(n);
    parallel_for(0, static_cast<std::int64_t>(n), [&](std::int64_t i) {
        dist[static_cast<std::size_t>(i)] =
            tensor_distance_D(ref_lst.tensors[static_cast<std::size_t>(i)],
                              mov_lst.tensors[static_cast<std::size_t>(i)]);
    });

    double max_dist = 0.0;
    for (double v : dist) max_dist = std::max(max_dist, v);
    const double b = 0.5 * max_dist;

    JointSaliencyMap out(d);
    parallel_for(0, static_cast<std::int64_t>(n), [&](std::int64_t idx) {
        const std::size_t i = static_cast<std::size_t>(idx);
        const double s = std::min(ref_saliency.data[i], mov_saliency.data[i]);
        // b == 0 means identical tensor fields everywhere: the damping
        // factor degenerates to the plain amplitude
        const double factor = b > 0.0 ? amplitude * b / (b + dist[i]) : amplitude;
        out.data[i] = s * factor;
    });

    double max_raw = 0.0;
    for (double v : out.data) max_raw = std::max(max_raw, v);
    if (max_raw > 0.0) {
        const double inv = 1.0 / max_raw;
        for (double& v : out.data) v *= inv;
    }
    return out;
}

} // namespace jssr
