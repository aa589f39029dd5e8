#include "jssr/eval.hpp"

#include <cmath>

#include "jssr/errors.hpp"
#include "jssr/parallel.hpp"

namespace jssr {

LandmarkErrors landmark_error(const LandmarkSet& landmarks, const DisplacementField& field) {
    if (landmarks.pairs.empty()) throw EmptyLandmarks("landmark_error: no landmark pairs");

    LandmarkErrors out;
    out.per_pair.reserve(landmarks.pairs.size());
    double sum = 0.0;
    for (const LandmarkPair& p : landmarks.pairs) {
        const Vec3 predicted = p.reference + sample_field(field, p.reference);
        const double err = (p.moving - predicted).norm();
        out.per_pair.push_back(err);
        sum += err;
    }
    const double n = static_cast<double>(out.per_pair.size());
    out.mre = sum / n;
    double var = 0.0;
    for (double e : out.per_pair) var += (e - out.mre) * (e - out.mre);
    out.sd = std::sqrt(var / n);
    return out;
}

ScalarImage difference_image(const ScalarImage& reference, const ScalarImage& warped) {
    if (!(reference.dims == warped.dims)) throw DimMismatch("difference_image: extents differ");
    ScalarImage out(reference.dims);
    parallel_for(std::size_t{0}, out.data.size(), [&](std::size_t i) {
        out.data[i] = std::abs(reference.data[i] - warped.data[i]);
    });
    return out;
}

LandmarkSet grid_landmarks(const GridDims& dims, int spacing, int margin) {
    LandmarkSet set;
    const int step = spacing < 1 ? 1 : spacing;
    const int z0 = dims.ndim == 3 ? margin : 0;
    const int z1 = dims.ndim == 3 ? dims.nz - margin : 1;
    for (int z = z0; z < z1; z += dims.ndim == 3 ? step : 1)
        for (int y = margin; y < dims.ny - margin; y += step)
            for (int x = margin; x < dims.nx - margin; x += step) {
                const Vec3 p{static_cast<double>(x), static_cast<double>(y),
                             static_cast<double>(z)};
                set.pairs.push_back(LandmarkPair{p, p});
            }
    if (set.pairs.empty()) {
        const Vec3 center{(dims.nx - 1) / 2.0, (dims.ny - 1) / 2.0,
                          dims.ndim == 3 ? (dims.nz - 1) / 2.0 : 0.0};
        set.pairs.push_back(LandmarkPair{center, center});
    }
    return set;
}

} // namespace jssr
