#pragma once

#include <span>
#include <vector>

#include "jssr/grid.hpp"

namespace jssr {

// One block-matching sample: displacement observed at a grid position with
// a certainty in [0,1].
struct SparseSample {
    Vec3 position;
    Vec3 displacement;
    double certainty = 1.0;
};

struct SparseDisplacements {
    GridDims level_dims;
    std::vector<SparseSample> samples;
};

// Histogram-estimated mutual information H(a) + H(b) - H(a,b) in nats over
// equal-width bins on [0,1]. Requires equally many samples in both blocks
// and at least `bins` of them.
double mutual_information(std::span<const double> block_a, std::span<const double> block_b,
                          int bins);

// Exhaustive integer block search on the spacing lattice: for each lattice
// position keep the displacement with |d|inf <= search_radius maximizing the
// block MI; ties prefer the smallest |d|^2, then lexicographic (dx, dy, dz).
// Certainty is the joint saliency at the lattice position.
//
// The lattice keeps a margin of block_radius from every border so every
// scored reference block lies fully inside the level; a block hanging off
// the image matches clamp-replicated rows against real texture and emits
// junk votes that downstream regression cannot outvote near corners. On a
// level too small to fit one block the central position is used alone.
SparseDisplacements match_blocks(const ScalarImage& reference, const ScalarImage& moving_warped,
                                 const ScalarImage& jsm, int spacing, int block_radius,
                                 int search_radius, int mi_bins = 16);

} // namespace jssr
