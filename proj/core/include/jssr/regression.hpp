#pragma once

#include <span>

#include "jssr/block_match.hpp"
#include "jssr/grid.hpp"
#include "jssr/kernel.hpp"
#include "jssr/tensor.hpp"

namespace jssr {

struct RegressionConfig {
    int order = 0;           // local polynomial order, 0..2
    double alpha = 0.5;      // kernel eccentricity
    double sigma_c = 1.5;    // kernel local scale
    double min_total_weight = 1e-8;
};

struct LocalFit {
    Vec3 value;
    bool low_confidence = false;
};

// Certainty-weighted local polynomial fit at x. Order 0 is the weighted
// average sum(K*c*y)/sum(K*c); orders 1-2 solve the weighted least squares
// and return the constant term, falling back to order 0 when the design
// matrix is deficient. When the certainty-weighted total weight falls under
// min_total_weight the fit retries with unit certainties, and failing that
// reports a zero vector with low_confidence set.
LocalFit fit_local(std::span<const SparseSample> samples, const KernelSpec& kernel,
                   const RegressionConfig& config, const Vec3& x);

// Densify sparse displacements over the whole grid. Kernels are built per
// point from the reference LST (grad_mag_sq required for 3-D grids, may be
// null in 2-D). Low-confidence points are filled afterwards from their
// nearest confident neighbors. force_isotropic drops the structure
// adaptation and uses round kernels of scale sigma_c.
DisplacementField densify(const SparseDisplacements& sparse, const SymTensorField& ref_lst,
                          const RegressionConfig& config,
                          const ScalarImage* grad_mag_sq = nullptr,
                          bool force_isotropic = false);

} // namespace jssr
