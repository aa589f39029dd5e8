#pragma once

#include <string>

#include "jssr/block_match.hpp"
#include "jssr/eval.hpp"
#include "jssr/grid.hpp"

namespace jssr {

// Loads a grayscale image and min-max normalizes it to [0,1]. The format is
// chosen by extension: .png / .pgm for 2-D, .json for the volume format (a
// JSON header naming a raw little-endian file in x-fastest order).
ScalarImage load_image(const std::string& path);

// Saves by extension: .png / .pgm write 8-bit grayscale with values clamped
// to [0,1] (2-D only); .json writes the volume header plus f32 raw data.
void save_image(const std::string& path, const ScalarImage& image);

// Blue-to-red false-color rendering of a scalar map (min-max normalized for
// display), written as an RGB PNG. 2-D only.
void save_heatmap_png(const std::string& path, const ScalarImage& map);

// Displacement field files: JSON header {dims, components, dtype:"f32",
// byte_order:"little", data:<raw file>} plus raw f32 data, x-fastest,
// component-interleaved. The raw file sits next to the header by default.
void save_field(const std::string& path, const DisplacementField& field);
DisplacementField load_field(const std::string& path);

// Landmark CSV: header rx,ry[,rz],mx,my[,mz], one pair per row.
LandmarkSet load_landmarks_csv(const std::string& path);
void save_landmarks_csv(const std::string& path, const LandmarkSet& set);

// Sparse sample dump: header x,y[,z],dx,dy[,dz],certainty.
void save_sparse_csv(const std::string& path, const SparseDisplacements& sparse);

} // namespace jssr
