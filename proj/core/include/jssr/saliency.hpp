#pragma once

#include "jssr/grid.hpp"
#include "jssr/tensor.hpp"

namespace jssr {

// Both maps hold per-point values in [0,1].
using SaliencyMap = ScalarImage;
using JointSaliencyMap = ScalarImage;

// Structure saliency from LST contrast: per point, the mean anisotropic
// tensor distance to the neighbors in a (2r+1)^d window (center excluded,
// replicate-edge neighbors), min-max normalized. Constant fields map to 0.
SaliencyMap saliency(const SymTensorField& lst_field, int neighborhood_radius = 1);

// Joint saliency: min of the two saliencies damped by the LST mismatch
// between the images, raw = min(S_R, S_M) * A*B / (B + dist), with
// B = max(dist)/2 over the grid; rescaled by the map maximum so values land
// in [0,1]. Identical tensor fields (B == 0) use the factor A directly.
JointSaliencyMap jsm(const SaliencyMap& ref_saliency, const SaliencyMap& mov_saliency,
                     const SymTensorField& ref_lst, const SymTensorField& mov_lst,
                     double amplitude = 10.0);

} // namespace jssr
