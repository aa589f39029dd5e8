#pragma once

#include <string>
#include <vector>

#include "jssr/block_match.hpp"
#include "jssr/grid.hpp"
#include "jssr/regression.hpp"

namespace jssr {

// Full pipeline configuration; every field has a usable default and every
// JSON key is optional.
struct RegistrationConfig {
    int levels = 5;
    int iterations_per_level = 2;

    // sparse matching
    int spacing = 4;
    int block_radius = 5;
    int search_radius = 5;
    int mi_bins = 16;

    // densification
    int order = 0;
    double alpha = 0.5;
    double sigma_c = 1.5;
    double min_total_weight = 1e-8;

    // saliency / joint saliency
    double jsm_amplitude = 10.0;
    int saliency_radius = 1;
    double lst_sigma = 1.5;
    int lst_window_radius = 1;

    // ablation switches
    bool uniform_certainty = false; // ignore JSM, use c_i = 1
    bool isotropic_kernels = false; // drop structure adaptation

    // diagnostics
    bool record_level_fields = false; // snapshot the global field at each level entry

    void validate() const; // throws ConfigError on out-of-range values

    RegressionConfig regression() const {
        return RegressionConfig{order, alpha, sigma_c, min_total_weight};
    }
};

// Parse a JSON object with keys mirroring RegistrationConfig fields;
// unknown keys or wrong types raise ConfigError.
RegistrationConfig config_from_json_text(const std::string& text);
RegistrationConfig load_config(const std::string& path);

struct LevelDiagnostics {
    int level = 0;
    int iteration = 0;
    double mean_displacement = 0.0; // mean |global field| after composing
    double mean_jsm = 0.0;
};

struct StageSeconds {
    double pyramid = 0.0;
    double tensors = 0.0;
    double saliency = 0.0;
    double matching = 0.0;
    double regression = 0.0;
    double warping = 0.0;
    double total = 0.0;
};

struct RegistrationResult {
    DisplacementField field; // full resolution, reference grid
    ScalarImage warped;      // moving image resampled through the field
    std::vector<LevelDiagnostics> diagnostics;
    StageSeconds seconds;
    SparseDisplacements last_sparse; // finest-level final matching pass

    // Global field as each level begins (after upsampling, before any
    // iteration), in level-local pixels; filled only when
    // config.record_level_fields is set.
    std::vector<DisplacementField> level_entry_fields;
};

// Coarse-to-fine loop: per level, upsample the running field, then repeat
// (warp moving -> structure tensors -> saliencies -> joint saliency ->
// block match -> certainty-weighted densify -> compose) for the configured
// iteration count. The moving image is always resampled from the original
// through the composed global field.
RegistrationResult register_images(const ScalarImage& reference, const ScalarImage& moving,
                                   const RegistrationConfig& config = {});

} // namespace jssr
