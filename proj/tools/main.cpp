// Command-line front end: registration, evaluation, and diagnostic dumps.

#include <algorithm>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jssr/block_match.hpp"
#include "jssr/errors.hpp"
#include "jssr/eval.hpp"
#include "jssr/image_io.hpp"
#include "jssr/kernel.hpp"
#include "jssr/parallel.hpp"
#include "jssr/pipeline.hpp"
#include "jssr/saliency.hpp"
#include "jssr/tensor.hpp"

namespace {

using nlohmann::json;

constexpr int kExitIo = 3;
constexpr int kExitValidation = 4;
constexpr int kExitInternal = 5;

// Writes a scalar map either as a false-color PNG or, for any other
// extension, through the regular grayscale/volume writer.
void save_map(const std::string& path, const jssr::ScalarImage& map) {
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".png")
        jssr::save_heatmap_png(path, map);
    else
        jssr::save_image(path, map);
}

jssr::SymTensorField lst_of(const jssr::ScalarImage& image, const jssr::RegistrationConfig& cfg) {
    return jssr::lst(jssr::gst(image), cfg.lst_sigma, cfg.lst_window_radius);
}

jssr::LandmarkSet default_landmarks(const jssr::GridDims& dims) {
    int min_extent = std::min(dims.nx, dims.ny);
    if (dims.ndim == 3) min_extent = std::min(min_extent, dims.nz);
    const int spacing = std::max(4, min_extent / 8);
    const int margin = std::min(8, std::max(1, min_extent / 4));
    return jssr::grid_landmarks(dims, spacing, margin);
}

json diagnostics_json(const jssr::RegistrationResult& result) {
    json levels = json::array();
    for (const auto& d : result.diagnostics)
        levels.push_back({{"level", d.level},
                          {"iteration", d.iteration},
                          {"mean_displacement", d.mean_displacement},
                          {"mean_jsm", d.mean_jsm}});
    return levels;
}

json seconds_json(const jssr::StageSeconds& s) {
    return {{"pyramid", s.pyramid},   {"tensors", s.tensors},       {"saliency", s.saliency},
            {"matching", s.matching}, {"regression", s.regression}, {"warping", s.warping},
            {"total", s.total}};
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw jssr::IoError("cannot write report: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw jssr::IoError("failed writing report: " + path);
}

std::vector<double> parse_point(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            out.push_back(std::stod(part));
        } catch (const std::exception&) {
            throw jssr::ValidationError("--at expects numbers like X,Y or X,Y,Z");
        }
    }
    if (out.size() != 2 && out.size() != 3)
        throw jssr::ValidationError("--at expects two or three coordinates");
    return out;
}

struct RegisterArgs {
    std::string reference, moving, config_path, out_field, out_warped, out_diff, out_sparse,
        report, landmarks;
};

int run_register(const RegisterArgs& a) {
    jssr::RegistrationConfig config;
    if (!a.config_path.empty()) config = jssr::load_config(a.config_path);

    const jssr::ScalarImage reference = jssr::load_image(a.reference);
    const jssr::ScalarImage moving = jssr::load_image(a.moving);
    const jssr::RegistrationResult result = jssr::register_images(reference, moving, config);

    if (!a.out_field.empty()) jssr::save_field(a.out_field, result.field);
    if (!a.out_warped.empty()) jssr::save_image(a.out_warped, result.warped);
    if (!a.out_diff.empty())
        jssr::save_image(a.out_diff, jssr::difference_image(reference, result.warped));
    if (!a.out_sparse.empty()) jssr::save_sparse_csv(a.out_sparse, result.last_sparse);

    const jssr::LandmarkSet landmarks =
        a.landmarks.empty() ? default_landmarks(reference.dims)
                            : jssr::load_landmarks_csv(a.landmarks);
    const jssr::LandmarkErrors errors = jssr::landmark_error(landmarks, result.field);

    std::cout << "MRE: " << errors.mre << "\n"
              << "SD: " << errors.sd << "\n"
              << "pairs: " << errors.per_pair.size() << "\n"
              << "seconds: " << result.seconds.total << "\n";

    if (!a.report.empty()) {
        json report = {{"mre", errors.mre},
                       {"sd", errors.sd},
                       {"pairs", errors.per_pair.size()},
                       {"levels", diagnostics_json(result)},
                       {"seconds", seconds_json(result.seconds)},
                       {"threads", jssr::thread_count()}};
        write_json(a.report, report);
    }
    return 0;
}

int run_eval(const std::string& field_path, const std::string& landmarks_path,
             const std::string& report_path) {
    const jssr::DisplacementField field = jssr::load_field(field_path);
    const jssr::LandmarkSet landmarks = jssr::load_landmarks_csv(landmarks_path);
    const jssr::LandmarkErrors errors = jssr::landmark_error(landmarks, field);
    std::cout << "MRE: " << errors.mre << "\n"
              << "SD: " << errors.sd << "\n"
              << "pairs: " << errors.per_pair.size() << "\n";
    if (!report_path.empty())
        write_json(report_path,
                   json{{"mre", errors.mre}, {"sd", errors.sd}, {"pairs", errors.per_pair.size()}});
    return 0;
}

int run_saliency(const std::string& image_path, const std::string& out,
                 const std::string& anisotropy_out, const std::string& eigen_out) {
    const jssr::ScalarImage image = jssr::load_image(image_path);
    jssr::RegistrationConfig cfg;
    const jssr::SymTensorField tensors = lst_of(image, cfg);
    save_map(out, jssr::saliency(tensors, cfg.saliency_radius));
    std::cout << "saliency map written to " << out << "\n";

    if (!anisotropy_out.empty()) {
        jssr::ScalarImage a(image.dims);
        for (std::size_t i = 0; i < a.data.size(); ++i) {
            const auto& eig = tensors.eigen[i];
            a.data[i] = jssr::anisotropy_2d(eig.values[0], eig.values[1]);
        }
        save_map(anisotropy_out, a);
        std::cout << "anisotropy map written to " << anisotropy_out << "\n";
    }
    if (!eigen_out.empty()) {
        jssr::ScalarImage e(image.dims);
        for (std::size_t i = 0; i < e.data.size(); ++i) e.data[i] = tensors.eigen[i].values[0];
        save_map(eigen_out, jssr::normalize_minmax(e));
        std::cout << "largest-eigenvalue map written to " << eigen_out << "\n";
    }
    return 0;
}

int run_jsm(const std::string& ref_path, const std::string& mov_path,
            const std::string& field_path, const std::string& out) {
    const jssr::ScalarImage reference = jssr::load_image(ref_path);
    jssr::ScalarImage moving = jssr::load_image(mov_path);
    if (!field_path.empty()) moving = jssr::warp(moving, jssr::load_field(field_path));

    jssr::RegistrationConfig cfg;
    const jssr::SymTensorField ref_lst = lst_of(reference, cfg);
    const jssr::SymTensorField mov_lst = lst_of(moving, cfg);
    const jssr::SaliencyMap ref_sal = jssr::saliency(ref_lst, cfg.saliency_radius);
    const jssr::SaliencyMap mov_sal = jssr::saliency(mov_lst, cfg.saliency_radius);
    save_map(out, jssr::jsm(ref_sal, mov_sal, ref_lst, mov_lst, cfg.jsm_amplitude));
    std::cout << "joint saliency map written to " << out << "\n";
    return 0;
}

int run_warp(const std::string& image_path, const std::string& field_path,
             const std::string& out) {
    const jssr::ScalarImage image = jssr::load_image(image_path);
    jssr::save_image(out, jssr::warp(image, jssr::load_field(field_path)));
    std::cout << "warped image written to " << out << "\n";
    return 0;
}

int run_diff(const std::string& a_path, const std::string& b_path, const std::string& out) {
    const jssr::ScalarImage a = jssr::load_image(a_path);
    const jssr::ScalarImage b = jssr::load_image(b_path);
    jssr::save_image(out, jssr::difference_image(a, b));
    std::cout << "difference image written to " << out << "\n";
    return 0;
}

int run_kernel_debug(const std::string& image_path, const std::string& at,
                     const std::string& out, double alpha, double sigma_c) {
    const jssr::ScalarImage image = jssr::load_image(image_path);
    const std::vector<double> p = parse_point(at);
    if (image.dims.ndim == 3 && p.size() != 3)
        throw jssr::ValidationError("--at needs X,Y,Z for a volume");
    const jssr::Vec3 center{p[0], p[1], p.size() == 3 ? p[2] : 0.0};
    const int cx = static_cast<int>(center.x), cy = static_cast<int>(center.y),
              cz = static_cast<int>(center.z);
    if (cx < 0 || cx >= image.dims.nx || cy < 0 || cy >= image.dims.ny ||
        (image.dims.ndim == 3 && (cz < 0 || cz >= image.dims.nz)))
        throw jssr::ValidationError("--at position is outside the image");

    jssr::RegistrationConfig cfg;
    cfg.alpha = alpha;
    cfg.sigma_c = sigma_c;
    const jssr::VectorField grad = jssr::gradient(image);
    const jssr::SymTensorField tensors =
        jssr::lst(jssr::gst(grad), cfg.lst_sigma, cfg.lst_window_radius);
    const std::size_t idx = image.dims.index(cx, cy, cz);
    const jssr::EigenSystem& eig = tensors.eigen[idx];

    jssr::KernelSpec spec;
    if (image.dims.ndim == 2) {
        spec = jssr::make_kernel_2d(eig, cfg.alpha, cfg.sigma_c, center);
        std::cout << "anisotropy: " << jssr::anisotropy_2d(eig.values[0], eig.values[1]) << "\n";
    } else {
        const jssr::ScalarImage grad_sq = jssr::gradient_magnitude_sq(grad);
        spec = jssr::make_kernel_3d(eig, grad_sq.data[idx], cfg.sigma_c, center);
    }
    std::cout << "eigenvalues: " << eig.values[0] << " " << eig.values[1] << " " << eig.values[2]
              << "\n"
              << "scales: " << spec.scales[0] << " " << spec.scales[1] << " " << spec.scales[2]
              << "\n"
              << "support_radius: " << spec.support_radius << "\n";

    // Rasterize the kernel footprint around its center (middle slice in 3-D).
    const int r = spec.support_radius;
    jssr::ScalarImage patch(jssr::GridDims{2 * r + 1, 2 * r + 1});
    for (int y = -r; y <= r; ++y)
        for (int x = -r; x <= r; ++x)
            patch.data[patch.dims.index(x + r, y + r, 0)] = jssr::kernel_weight(
                spec, jssr::Vec3{center.x + x, center.y + y, center.z});
    save_map(out, jssr::normalize_minmax(patch));
    std::cout << "kernel footprint written to " << out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonrigid registration by joint-saliency block matching and "
                 "structure-adaptive kernel regression"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (0 = hardware default)");

    RegisterArgs reg;
    CLI::App* reg_cmd = app.add_subcommand("register", "Align a moving image to a reference");
    reg_cmd->add_option("reference", reg.reference, "Reference image")->required();
    reg_cmd->add_option("moving", reg.moving, "Moving image")->required();
    reg_cmd->add_option("--config", reg.config_path, "JSON configuration file");
    reg_cmd->add_option("--out-field", reg.out_field, "Write the displacement field (JSON+raw)");
    reg_cmd->add_option("--out-warped", reg.out_warped, "Write the warped moving image");
    reg_cmd->add_option("--out-diff", reg.out_diff, "Write |reference - warped|");
    reg_cmd->add_option("--out-sparse", reg.out_sparse, "Write final sparse matches as CSV");
    reg_cmd->add_option("--report", reg.report, "Write a JSON report");
    reg_cmd->add_option("--landmarks", reg.landmarks, "Landmark CSV for error reporting");

    std::string eval_field, eval_landmarks, eval_report;
    CLI::App* eval_cmd = app.add_subcommand("eval", "Landmark error of a displacement field");
    eval_cmd->add_option("--field", eval_field, "Displacement field header")->required();
    eval_cmd->add_option("--landmarks", eval_landmarks, "Landmark CSV")->required();
    eval_cmd->add_option("--report", eval_report, "Write a JSON report");

    std::string sal_image, sal_out = "saliency.png", sal_aniso, sal_eigen;
    CLI::App* sal_cmd = app.add_subcommand("saliency", "Structure saliency map of an image");
    sal_cmd->add_option("image", sal_image, "Input image")->required();
    sal_cmd->add_option("--out", sal_out, "Output map (PNG heatmap)");
    sal_cmd->add_option("--anisotropy", sal_aniso, "Also write the anisotropy map");
    sal_cmd->add_option("--eigen-max", sal_eigen, "Also write the largest-eigenvalue map");

    std::string jsm_ref, jsm_mov, jsm_field, jsm_out = "jsm.png";
    CLI::App* jsm_cmd = app.add_subcommand("jsm", "Joint saliency map of an image pair");
    jsm_cmd->add_option("reference", jsm_ref, "Reference image")->required();
    jsm_cmd->add_option("moving", jsm_mov, "Moving image")->required();
    jsm_cmd->add_option("--field", jsm_field, "Warp the moving image first");
    jsm_cmd->add_option("--out", jsm_out, "Output map (PNG heatmap)");

    std::string warp_image, warp_field, warp_out = "warped.png";
    CLI::App* warp_cmd = app.add_subcommand("warp", "Resample an image through a field");
    warp_cmd->add_option("image", warp_image, "Input image")->required();
    warp_cmd->add_option("--field", warp_field, "Displacement field header")->required();
    warp_cmd->add_option("--out", warp_out, "Output image");

    std::string diff_a, diff_b, diff_out = "diff.png";
    CLI::App* diff_cmd = app.add_subcommand("diff", "Absolute difference of two images");
    diff_cmd->add_option("a", diff_a, "First image")->required();
    diff_cmd->add_option("b", diff_b, "Second image")->required();
    diff_cmd->add_option("--out", diff_out, "Output image");

    std::string kd_image, kd_at, kd_out = "kernel.png";
    double kd_alpha = 0.5, kd_sigma_c = 1.5;
    CLI::App* kd_cmd = app.add_subcommand("kernel-debug", "Rasterize the kernel at a pixel");
    kd_cmd->add_option("image", kd_image, "Input image")->required();
    kd_cmd->add_option("--at", kd_at, "Pixel position X,Y or X,Y,Z")->required();
    kd_cmd->add_option("--out", kd_out, "Output footprint (PNG heatmap)");
    kd_cmd->add_option("--alpha", kd_alpha, "Kernel eccentricity");
    kd_cmd->add_option("--sigma-c", kd_sigma_c, "Kernel local scale");

    CLI11_PARSE(app, argc, argv);

    try {
        jssr::set_thread_count(threads);
        if (*reg_cmd) return run_register(reg);
        if (*eval_cmd) return run_eval(eval_field, eval_landmarks, eval_report);
        if (*sal_cmd) return run_saliency(sal_image, sal_out, sal_aniso, sal_eigen);
        if (*jsm_cmd) return run_jsm(jsm_ref, jsm_mov, jsm_field, jsm_out);
        if (*warp_cmd) return run_warp(warp_image, warp_field, warp_out);
        if (*diff_cmd) return run_diff(diff_a, diff_b, diff_out);
        if (*kd_cmd) return run_kernel_debug(kd_image, kd_at, kd_out, kd_alpha, kd_sigma_c);
    } catch (const jssr::IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const jssr::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return 0;
}
