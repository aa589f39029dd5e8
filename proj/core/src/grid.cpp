#include "jssr/grid.hpp"

#include <algorithm>
#include <cmath>

#include "jssr/parallel.hpp"

namespace jssr {

namespace {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

std::vector<double> gaussian_taps(double sigma, int radius) {
    std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double w = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        taps[static_cast<std::size_t>(i + radius)] = w;
        sum += w;
    }
    for (double& w : taps) w /= sum;
    return taps;
}

// Smooth along one axis with replicate-edge boundaries.
ScalarImage smooth_axis(const ScalarImage& in, const std::vector<double>& taps, int axis) {
    const GridDims& d = in.dims;
    ScalarImage out(d);
    const int radius = (static_cast<int>(taps.size()) - 1) / 2;
    const int n = d.extent(axis);

    parallel_for(0, static_cast<std::int64_t>(d.count()), [&](std::int64_t idx) {
        const int x = static_cast<int>(idx % d.nx);
        const int y = static_cast<int>((idx / d.nx) % d.ny);
        const int z = static_cast<int>(idx / (static_cast<std::int64_t>(d.nx) * d.ny));
        int pos[3] = {x, y, z};
        double acc = 0.0;
        for (int t = -radius; t <= radius; ++t) {
            int q[3] = {pos[0], pos[1], pos[2]};
            q[axis] = clampi(pos[axis] + t, 0, n - 1);
            acc += taps[static_cast<std::size_t>(t + radius)] * in.at(q[0], q[1], q[2]);
        }
        out.data[static_cast<std::size_t>(idx)] = acc;
    });
    return out;
}

} // namespace

ScalarImage gaussian_smooth(const ScalarImage& image, double sigma, int radius) {
    if (sigma <= 0.0) throw NonPositiveParam("gaussian_smooth: sigma must be > 0");
    if (radius < 0) radius = static_cast<int>(std::ceil(3.0 * sigma));
    if (radius == 0) return image;

    const auto taps = gaussian_taps(sigma, radius);
    ScalarImage out = smooth_axis(image, taps, 0);
    out = smooth_axis(out, taps, 1);
    if (image.dims.ndim == 3) out = smooth_axis(out, taps, 2);
    return out;
}

namespace {

ScalarImage decimate2(const ScalarImage& in) {
    const GridDims& d = in.dims;
    GridDims out_dims = d;
    out_dims.nx = (d.nx + 1) / 2;
    out_dims.ny = (d.ny + 1) / 2;
    out_dims.nz = d.ndim == 3 ? (d.nz + 1) / 2 : 1;

    ScalarImage out(out_dims);
    for (int z = 0; z < out_dims.nz; ++z)
        for (int y = 0; y < out_dims.ny; ++y)
            for (int x = 0; x < out_dims.nx; ++x)
                out.at(x, y, z) = in.at(2 * x, 2 * y, d.ndim == 3 ? 2 * z : 0);
    return out;
}

} // namespace

std::vector<PyramidLevel> build_pyramid(const ScalarImage& image, int levels) {
    if (levels < 1) throw ValidationError("build_pyramid: levels must be >= 1");

    const GridDims& d = image.dims;
    for (int axis = 0; axis < d.ndim; ++axis) {
        int coarse = d.extent(axis);
        for (int l = 1; l < levels; ++l) coarse = (coarse + 1) / 2;
        if (coarse < 4)
            throw LevelsExceedResolution("build_pyramid: axis " + std::to_string(axis) +
                                         " falls below 4 grid points at the coarsest level");
    }

    std::vector<PyramidLevel> pyramid(static_cast<std::size_t>(levels));
    pyramid[static_cast<std::size_t>(levels - 1)] = {levels - 1, 1, image};
    for (int l = levels - 2; l >= 0; --l) {
        const ScalarImage& finer = pyramid[static_cast<std::size_t>(l + 1)].image;
        ScalarImage smoothed = gaussian_smooth(finer, 0.8);
        pyramid[static_cast<std::size_t>(l)] = {
            l, pyramid[static_cast<std::size_t>(l + 1)].scale_factor * 2, decimate2(smoothed)};
    }
    return pyramid;
}

double sample(const ScalarImage& image, double x, double y, double z) {
    const GridDims& d = image.dims;
    const auto clampd = [](double v, double hi) { return v < 0.0 ? 0.0 : (v > hi ? hi : v); };

    x = clampd(x, static_cast<double>(d.nx - 1));
    y = clampd(y, static_cast<double>(d.ny - 1));

    const int x0 = static_cast<int>(x);
    const int y0 = static_cast<int>(y);
    const int x1 = std::min(x0 + 1, d.nx - 1);
    const int y1 = std::min(y0 + 1, d.ny - 1);
    const double fx = x - x0;
    const double fy = y - y0;

    if (d.ndim == 2) {
        const double v00 = image.at(x0, y0), v10 = image.at(x1, y0);
        const double v01 = image.at(x0, y1), v11 = image.at(x1, y1);
        const double a = v00 + fx * (v10 - v00);
        const double b = v01 + fx * (v11 - v01);
        return a + fy * (b - a);
    }

    z = clampd(z, static_cast<double>(d.nz - 1));
    const int z0 = static_cast<int>(z);
    const int z1 = std::min(z0 + 1, d.nz - 1);
    const double fz = z - z0;

    double plane[2];
    for (int k = 0; k < 2; ++k) {
        const int zz = k == 0 ? z0 : z1;
        const double v00 = image.at(x0, y0, zz), v10 = image.at(x1, y0, zz);
        const double v01 = image.at(x0, y1, zz), v11 = image.at(x1, y1, zz);
        const double a = v00 + fx * (v10 - v00);
        const double b = v01 + fx * (v11 - v01);
        plane[k] = a + fy * (b - a);
    }
    return plane[0] + fz * (plane[1] - plane[0]);
}

Vec3 sample_field(const VectorField& field, const Vec3& p) {
    const GridDims& d = field.dims;
    const auto clampd = [](double v, double hi) { return v < 0.0 ? 0.0 : (v > hi ? hi : v); };

    const double x = clampd(p.x, static_cast<double>(d.nx - 1));
    const double y = clampd(p.y, static_cast<double>(d.ny - 1));
    const int x0 = static_cast<int>(x);
    const int y0 = static_cast<int>(y);
    const int x1 = std::min(x0 + 1, d.nx - 1);
    const int y1 = std::min(y0 + 1, d.ny - 1);
    const double fx = x - x0;
    const double fy = y - y0;

    if (d.ndim == 2) {
        const Vec3 a = field.at(x0, y0) + fx * (field.at(x1, y0) - field.at(x0, y0));
        const Vec3 b = field.at(x0, y1) + fx * (field.at(x1, y1) - field.at(x0, y1));
        return a + fy * (b - a);
    }

    const double z = clampd(p.z, static_cast<double>(d.nz - 1));
    const int z0 = static_cast<int>(z);
    const int z1 = std::min(z0 + 1, d.nz - 1);
    const double fz = z - z0;

    Vec3 plane[2];
    for (int k = 0; k < 2; ++k) {
        const int zz = k == 0 ? z0 : z1;
        const Vec3 a = field.at(x0, y0, zz) + fx * (field.at(x1, y0, zz) - field.at(x0, y0, zz));
        const Vec3 b = field.at(x0, y1, zz) + fx * (field.at(x1, y1, zz) - field.at(x0, y1, zz));
        plane[k] = a + fy * (b - a);
    }
    return plane[0] + fz * (plane[1] - plane[0]);
}

ScalarImage warp(const ScalarImage& image, const DisplacementField& field) {
    if (!(image.dims == field.dims)) throw DimMismatch("warp: image and field dims differ");

    const GridDims& d = image.dims;
    ScalarImage out(d);
    parallel_for(0, static_cast<std::int64_t>(d.count()), [&](std::int64_t idx) {
        const std::size_t i = static_cast<std::size_t>(idx);
        const int x = static_cast<int>(idx % d.nx);
        const int y = static_cast<int>((idx / d.nx) % d.ny);
        const int z = static_cast<int>(idx / (static_cast<std::int64_t>(d.nx) * d.ny));
        const Vec3& v = field.vectors[i];
        if (v.x == 0.0 && v.y == 0.0 && v.z == 0.0) {
            out.data[i] = image.data[i]; // identity is bit-exact
        } else {
            out.data[i] = sample(image, x + v.x, y + v.y, z + v.z);
        }
    });
    return out;
}

DisplacementField compose(const DisplacementField& initial, const DisplacementField& current) {
    if (!(initial.dims == current.dims)) throw DimMismatch("compose: field dims differ");

    const GridDims& d = initial.dims;
    DisplacementField out(d);
    parallel_for(0, static_cast<std::int64_t>(d.count()), [&](std::int64_t idx) {
        const std::size_t i = static_cast<std::size_t>(idx);
        const int x = static_cast<int>(idx % d.nx);
        const int y = static_cast<int>((idx / d.nx) % d.ny);
        const int z = static_cast<int>(idx / (static_cast<std::int64_t>(d.nx) * d.ny));
        const Vec3& c = current.vectors[i];
        const Vec3 pulled = sample_field(initial, Vec3{x + c.x, y + c.y, z + c.z});
        out.vectors[i] = c + pulled;
    });
    return out;
}

DisplacementField upsample_field(const DisplacementField& field, const GridDims& target) {
    const GridDims& src = field.dims;
    if (target.ndim != src.ndim) throw DimMismatch("upsample_field: dimensionality differs");

    double factor[3] = {1.0, 1.0, 1.0};
    for (int axis = 0; axis < src.ndim; ++axis) {
        const int s = src.extent(axis);
        const int t = target.extent(axis);
        if (s <= 0 || t < s) throw DimMismatch("upsample_field: target must not shrink the grid");
        factor[axis] = static_cast<double>(std::lround(static_cast<double>(t) / s));
        if (factor[axis] < 1.0) factor[axis] = 1.0;
    }

    DisplacementField out(target);
    parallel_for(0, static_cast<std::int64_t>(target.count()), [&](std::int64_t idx) {
        const std::size_t i = static_cast<std::size_t>(idx);
        const int x = static_cast<int>(idx % target.nx);
        const int y = static_cast<int>((idx / target.nx) % target.ny);
        const int z = static_cast<int>(idx / (static_cast<std::int64_t>(target.nx) * target.ny));
        const Vec3 v = sample_field(field, Vec3{x / factor[0], y / factor[1], z / factor[2]});
        out.vectors[i] = Vec3{v.x * factor[0], v.y * factor[1], v.z * factor[2]};
    });
    return out;
}

ScalarImage normalize_minmax(const ScalarImage& image) {
    double lo = image.data.empty() ? 0.0 : image.data[0];
    double hi = lo;
    for (double v : image.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }

    ScalarImage out(image.dims);
    if (hi - lo <= 0.0) return out; // constant input -> zeros
    const double inv = 1.0 / (hi - lo);
    for (std::size_t i = 0; i < image.data.size(); ++i) out.data[i] = (image.data[i] - lo) * inv;
    return out;
}

} // namespace jssr
