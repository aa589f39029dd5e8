#include "jssr/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "jssr/errors.hpp"
#include "jssr/saliency.hpp"
#include "jssr/tensor.hpp"

namespace jssr {

void RegistrationConfig::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError("config: " + what); };
    if (levels < 1) fail("levels must be >= 1");
    if (iterations_per_level < 1) fail("iterations_per_level must be >= 1");
    if (spacing < 1) fail("spacing must be >= 1");
    if (block_radius < 1) fail("block_radius must be >= 1");
    if (search_radius < 1) fail("search_radius must be >= 1");
    if (mi_bins < 2) fail("mi_bins must be >= 2");
    if (order < 0 || order > 2) fail("order must be 0, 1, or 2");
    if (!(alpha > 0.0)) fail("alpha must be positive");
    if (!(sigma_c > 0.0)) fail("sigma_c must be positive");
    if (!(min_total_weight > 0.0)) fail("min_total_weight must be positive");
    if (!(jsm_amplitude > 0.0)) fail("jsm_amplitude must be positive");
    if (saliency_radius < 1) fail("saliency_radius must be >= 1");
    if (!(lst_sigma > 0.0)) fail("lst_sigma must be positive");
    if (lst_window_radius < 1) fail("lst_window_radius must be >= 1");
}

RegistrationConfig config_from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");

    RegistrationConfig c;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "levels") c.levels = value.get<int>();
            else if (key == "iterations_per_level") c.iterations_per_level = value.get<int>();
            else if (key == "spacing") c.spacing = value.get<int>();
            else if (key == "block_radius") c.block_radius = value.get<int>();
            else if (key == "search_radius") c.search_radius = value.get<int>();
            else if (key == "mi_bins") c.mi_bins = value.get<int>();
            else if (key == "order") c.order = value.get<int>();
            else if (key == "alpha") c.alpha = value.get<double>();
            else if (key == "sigma_c") c.sigma_c = value.get<double>();
            else if (key == "min_total_weight") c.min_total_weight = value.get<double>();
            else if (key == "jsm_amplitude") c.jsm_amplitude = value.get<double>();
            else if (key == "saliency_radius") c.saliency_radius = value.get<int>();
            else if (key == "lst_sigma") c.lst_sigma = value.get<double>();
            else if (key == "lst_window_radius") c.lst_window_radius = value.get<int>();
            else if (key == "uniform_certainty") c.uniform_certainty = value.get<bool>();
            else if (key == "isotropic_kernels") c.isotropic_kernels = value.get<bool>();
            else if (key == "record_level_fields") c.record_level_fields = value.get<bool>();
            else throw ConfigError("config: unknown key \"" + key + "\"");
        }
    } catch (const nlohmann::json::type_error& e) {
        throw ConfigError(std::string("config: wrong value type: ") + e.what());
    }
    c.validate();
    return c;
}

RegistrationConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json_text(buf.str());
}

namespace {

class StageTimer {
  public:
    explicit StageTimer(double& slot)
        : slot_(slot), start_(std::chrono::steady_clock::now()) {}
    ~StageTimer() {
        slot_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    double& slot_;
    std::chrono::steady_clock::time_point start_;
};

double mean_magnitude(const DisplacementField& f) {
    double sum = 0.0;
    for (const Vec3& v : f.vectors) sum += v.norm();
    return f.vectors.empty() ? 0.0 : sum / static_cast<double>(f.vectors.size());
}

double mean_value(const ScalarImage& img) {
    double sum = 0.0;
    for (double v : img.data) sum += v;
    return img.data.empty() ? 0.0 : sum / static_cast<double>(img.data.size());
}

} // namespace

RegistrationResult register_images(const ScalarImage& reference, const ScalarImage& moving,
                                   const RegistrationConfig& config) {
    config.validate();
    if (!(reference.dims == moving.dims))
        throw DimMismatch("register: reference and moving extents differ");

    const auto t_start = std::chrono::steady_clock::now();
    RegistrationResult result;

    std::vector<PyramidLevel> ref_pyr, mov_pyr;
    {
        StageTimer t(result.seconds.pyramid);
        ref_pyr = build_pyramid(reference, config.levels);
        mov_pyr = build_pyramid(moving, config.levels);
    }

    DisplacementField global(ref_pyr.front().image.dims);
    const RegressionConfig reg_cfg = config.regression();

    for (int level = 0; level < config.levels; ++level) {
        const ScalarImage& ref_level = ref_pyr[static_cast<std::size_t>(level)].image;
        const ScalarImage& mov_level = mov_pyr[static_cast<std::size_t>(level)].image;

        if (level > 0) {
            StageTimer t(result.seconds.warping);
            global = upsample_field(global, ref_level.dims);
        }
        if (config.record_level_fields) result.level_entry_fields.push_back(global);

        // Reference-side structures do not change across iterations.
        SymTensorField ref_lst;
        ScalarImage ref_grad_sq;
        SaliencyMap ref_sal;
        {
            StageTimer t(result.seconds.tensors);
            const VectorField ref_grad = gradient(ref_level);
            ref_grad_sq = gradient_magnitude_sq(ref_grad);
            ref_lst = lst(gst(ref_grad), config.lst_sigma, config.lst_window_radius);
        }
        {
            StageTimer t(result.seconds.saliency);
            ref_sal = saliency(ref_lst, config.saliency_radius);
        }

        for (int iter = 0; iter < config.iterations_per_level; ++iter) {
            ScalarImage warped_level;
            {
                StageTimer t(result.seconds.warping);
                warped_level = warp(mov_level, global);
            }

            SymTensorField mov_lst;
            {
                StageTimer t(result.seconds.tensors);
                mov_lst = lst(gst(warped_level), config.lst_sigma, config.lst_window_radius);
            }

            JointSaliencyMap joint;
            {
                StageTimer t(result.seconds.saliency);
                const SaliencyMap mov_sal = saliency(mov_lst, config.saliency_radius);
                joint = jsm(ref_sal, mov_sal, ref_lst, mov_lst, config.jsm_amplitude);
            }

            SparseDisplacements sparse;
            {
                StageTimer t(result.seconds.matching);
                sparse = match_blocks(ref_level, warped_level, joint, config.spacing,
                                      config.block_radius, config.search_radius, config.mi_bins);
                if (config.uniform_certainty)
                    for (SparseSample& s : sparse.samples) s.certainty = 1.0;
            }

            DisplacementField current;
            {
                StageTimer t(result.seconds.regression);
                current = densify(sparse, ref_lst, reg_cfg,
                                  ref_level.dims.ndim == 3 ? &ref_grad_sq : nullptr,
                                  config.isotropic_kernels);
            }

            {
                StageTimer t(result.seconds.warping);
                global = compose(global, current);
            }

            result.diagnostics.push_back(LevelDiagnostics{level, iter, mean_magnitude(global),
                                                          mean_value(joint)});
            if (level == config.levels - 1 && iter == config.iterations_per_level - 1)
                result.last_sparse = std::move(sparse);
        }
    }

    {
        StageTimer t(result.seconds.warping);
        result.warped = warp(moving, global);
    }
    result.field = std::move(global);
    result.seconds.total =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return result;
}

} // namespace jssr
