#pragma once

#include <vector>

#include "jssr/grid.hpp"

namespace jssr {

// A landmark correspondence in full-resolution pixel coordinates.
struct LandmarkPair {
    Vec3 reference;
    Vec3 moving;
};

struct LandmarkSet {
    std::vector<LandmarkPair> pairs;
};

struct LandmarkErrors {
    double mre = 0.0; // mean registration error, pixels
    double sd = 0.0;  // population standard deviation, pixels
    std::vector<double> per_pair;
};

// Per pair, the error is the distance between the moving landmark and the
// field-predicted correspondence r + T(r) of its reference partner.
LandmarkErrors landmark_error(const LandmarkSet& landmarks, const DisplacementField& field);

// Per-pixel absolute intensity difference.
ScalarImage difference_image(const ScalarImage& reference, const ScalarImage& warped);

// Identity landmark pairs on a regular lattice, `margin` pixels away from
// every border; falls back to the single center point on tiny images.
LandmarkSet grid_landmarks(const GridDims& dims, int spacing, int margin);

} // namespace jssr
