#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "irforge/config.hpp"
#include "irforge/io.hpp"
#include "irforge/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

std::uint64_t resolve_seed(std::uint64_t config_seed) {
    if (const char* env = std::getenv("IRFORGE_SEED"))
        return std::stoull(env);
    return config_seed;
}

json metric_report(const irforge::MetricSet& m) {
    return {{"rss", m.rss}, {"qd", m.qd}, {"scr", m.scr},
            {"rx", m.rx},   {"k", m.k},  {"delta_mu", m.delta_mu}};
}

int run_generate(const std::string& config_path, const std::string& out_override,
                 int jobs, bool dry_run, bool keep_intermediate) {
    irforge::RunConfig cfg;
    try {
        cfg = irforge::parse_config_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    cfg.master_seed = resolve_seed(cfg.master_seed);
    std::cout << "master seed: " << cfg.master_seed << "\n";

    const fs::path base_dir = fs::path(config_path).parent_path();
    std::vector<irforge::SceneRecipe> recipes;
    try {
        recipes = irforge::expand_sweep(cfg);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    auto loader = [&](const irforge::SceneRecipe& r) {
        return irforge::load_scene_assets(r, base_dir);
    };

    if (dry_run) {
        int infeasible = 0;
        for (const auto& recipe : recipes) {
            try {
                const auto report = irforge::scene_feasibility(recipe,
                                                               loader(recipe));
                if (report.ok()) {
                    std::cout << recipe.scene_id << ": feasible\n";
                } else {
                    ++infeasible;
                    std::cout << recipe.scene_id << ": ";
                    for (const auto& issue : report.issues)
                        std::cout << issue << "; ";
                    std::cout << "\n";
                }
            } catch (const std::exception& e) {
                std::cerr << recipe.scene_id << ": asset error: " << e.what()
                          << "\n";
                return kExitConfig;
            }
        }
        return infeasible == 0 ? kExitOk : kExitRuntime;
    }

    irforge::BatchOptions options;
    options.out_dir = out_override.empty() ? fs::path(cfg.output_dir)
                                           : fs::path(out_override);
    options.jobs = jobs;
    options.keep_intermediate = keep_intermediate;

    irforge::BatchResult batch;
    try {
        batch = irforge::batch_generate(recipes, loader, options);
    } catch (const std::exception& e) {
        std::cerr << "batch error: " << e.what() << "\n";
        return kExitRuntime;
    }

    std::cout << "scene            status  RSS*     RSS      SCR*     SCR     "
                 " K*       K        Rx*      Rx\n";
    for (const auto& entry : batch.entries) {
        const auto& rec = entry.record;
        if (!entry.ok) {
            std::cout << rec.scene_id << "  FAILED  " << entry.diagnostic
                      << "\n";
            continue;
        }
        char line[256];
        std::snprintf(line, sizeof(line),
                      "%-16s ok      %-8.4g %-8.6g %-8.4g %-8.6g %-8.4g "
                      "%-8.6g %-8.4g %-8.6g",
                      rec.scene_id.c_str(), rec.requested.rss,
                      rec.achieved_pre.rss, rec.requested.scr,
                      rec.achieved_pre.scr, rec.requested.k,
                      rec.achieved_pre.k, rec.requested.rx,
                      rec.achieved_pre.rx);
        std::cout << line << "\n";
    }
    std::cout << batch.entries.size() - batch.failures << "/"
              << batch.entries.size() << " scenes succeeded, manifest: "
              << (options.out_dir / "manifest.json").string() << "\n";
    return batch.failures == 0 ? kExitOk : kExitRuntime;
}

int run_metrics(const std::string& image_path, const std::string& visible_path,
                const std::string& full_path, const std::string& occ_path,
                double nu_k, int f1_radius) {
    irforge::ImageBuffer img;
    irforge::RegionMask visible, full, occ;
    try {
        const fs::path p(image_path);
        img = p.extension() == ".irf"
                  ? irforge::io::read_irf(p)
                  : irforge::io::to_image(irforge::io::read_gray(p));
        visible = irforge::io::to_mask(irforge::io::read_gray(visible_path));
        full = full_path.empty()
                   ? visible
                   : irforge::io::to_mask(irforge::io::read_gray(full_path));
        occ = occ_path.empty()
                  ? irforge::RegionMask(img.width(), img.height())
                  : irforge::io::to_mask(irforge::io::read_gray(occ_path));
        if (!visible.same_shape(img.width(), img.height()) ||
            !full.same_shape(img.width(), img.height()) ||
            !occ.same_shape(img.width(), img.height()))
            throw irforge::DimensionMismatch("mask/image dimensions differ");
    } catch (const std::exception& e) {
        std::cerr << "asset error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        irforge::SceneLayout layout;
        layout.frame_width = img.width();
        layout.frame_height = img.height();
        layout.target_full = full;
        layout.occultant = occ;
        layout.target_visible =
            irforge::mask_ops(visible, occ, irforge::MaskOp::AndNot);
        irforge::RegionMask ring =
            irforge::dilation_ring(layout.target_visible, f1_radius);
        ring = irforge::mask_ops(ring, full, irforge::MaskOp::AndNot);
        layout.local_background =
            irforge::mask_ops(ring, occ, irforge::MaskOp::AndNot);
        irforge::RegionMask used =
            irforge::mask_ops(full, occ, irforge::MaskOp::Or);
        used = irforge::mask_ops(used, layout.local_background,
                                 irforge::MaskOp::Or);
        irforge::RegionMask all(img.width(), img.height(), true);
        layout.remaining_background =
            irforge::mask_ops(all, used, irforge::MaskOp::AndNot);

        const irforge::MetricSet m =
            irforge::measure_scene(img, layout, {nu_k});
        std::cout << metric_report(m).dump(2) << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "metrics error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int run_expand(const std::string& bundle_path, const std::string& out_dir,
               int count, const std::string& thermal_spec, std::uint64_t seed,
               double lambda_override, bool has_override) {
    irforge::ViewBundle bundle;
    std::map<std::string, irforge::ThermalMode> mode_names;
    try {
        bundle = irforge::io::load_bundle(bundle_path);
        for (const auto& cfg :
             irforge::parse_config_text("schema = 1\nbackground = x\n"
                                        "bundle = x\nthermal = " +
                                        thermal_spec + "\n")
                 .thermal_configs)
            mode_names = cfg;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        irforge::OperationalModes modes;
        for (std::uint8_t label : bundle.regions.present_labels()) {
            const auto name = bundle.region_names.at(label);
            if (mode_names.count(name)) {
                modes[label] = mode_names.at(name);
            } else if (mode_names.count("rest")) {
                modes[label] = mode_names.at("rest");
            } else {
                throw irforge::MissingRegionLambda("no mode for region " +
                                                   name);
            }
        }

        seed = resolve_seed(seed);
        std::cout << "master seed: " << seed << "\n";
        fs::create_directories(out_dir);
        json manifest = json::array();
        for (int i = 0; i < count; ++i) {
            irforge::Rng rng(irforge::derive_seed(seed, i));
            irforge::ThermalState state;
            if (has_override) {
                for (std::uint8_t label : bundle.regions.present_labels())
                    state[label] = lambda_override;
            } else {
                state = irforge::draw_state(modes, rng);
            }
            const irforge::ImageBuffer mixed = irforge::mix(bundle, state);
            char name[32];
            std::snprintf(name, sizeof(name), "signature_%04d.png", i);
            irforge::io::GrayImage g;
            g.width = mixed.width();
            g.height = mixed.height();
            g.depth = 16;
            g.values.resize(mixed.size());
            for (std::size_t p = 0; p < mixed.size(); ++p) {
                const double v = std::clamp(mixed[p], 0.0, 65535.0);
                g.values[p] = static_cast<std::uint16_t>(v + 0.5);
            }
            irforge::io::write_gray(fs::path(out_dir) / name, g);
            json lam = json::object();
            for (const auto& [label, value] : state)
                lam[bundle.region_names.at(label)] = value;
            manifest.push_back({{"file", name}, {"lambda", lam}});
        }
        std::ofstream out(fs::path(out_dir) / "expansion.json");
        out << json{{"schema_version", 1},
                    {"bundle", bundle_path},
                    {"seed", seed},
                    {"signatures", manifest}}
                   .dump(2)
            << "\n";
        return kExitOk;
    } catch (const irforge::MissingRegionLambda& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int run_check(const std::string& config_path) {
    return run_generate(config_path, "", 1, /*dry_run=*/true, false);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"irforge: constraint-driven hybrid IR scene generator"};
    app.require_subcommand(1);

    std::string config_path, out_dir, image_path, visible_path, full_path,
        occ_path, bundle_path, thermal_spec = "rest:ambient";
    int jobs = 1, f1_radius = irforge::kDefaultF1Radius, count = 1;
    bool dry_run = false, keep_intermediate = false;
    double nu_k = 1.0, lambda_override = 0.0;
    std::uint64_t seed = 0;

    auto* gen = app.add_subcommand("generate", "build scenes from a config");
    gen->add_option("config", config_path)->required();
    gen->add_option("--out", out_dir, "override the config output directory");
    gen->add_option("--jobs", jobs, "parallel scene workers");
    gen->add_flag("--dry-run", dry_run, "feasibility report only, no files");
    gen->add_flag("--keep-intermediate", keep_intermediate,
                  "archive the pre-sensor intermediate (.irf)");

    auto* met = app.add_subcommand("metrics", "audit metrics of an image");
    met->add_option("image", image_path)->required();
    met->add_option("--visible", visible_path, "visible target mask")
        ->required();
    met->add_option("--full", full_path, "full silhouette mask");
    met->add_option("--occultant", occ_path, "occultant mask");
    met->add_option("--nu-k", nu_k, "gray levels per Kelvin");
    met->add_option("--f1-radius", f1_radius, "local background band width");

    auto* exp = app.add_subcommand("expand", "expand a bundle's signatures");
    exp->add_option("bundle", bundle_path)->required();
    exp->add_option("--out", out_dir)->required();
    exp->add_option("-n,--count", count, "signatures to draw");
    exp->add_option("--thermal", thermal_spec, "region:mode+... configuration");
    exp->add_option("--seed", seed);
    auto* override_opt =
        exp->add_option("--lambda-override", lambda_override,
                        "force every region's lambda (debugging)");

    auto* chk = app.add_subcommand("check", "feasibility check a config");
    chk->add_option("config", config_path)->required();

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed())
        return run_generate(config_path, out_dir, jobs, dry_run,
                            keep_intermediate);
    if (met->parsed())
        return run_metrics(image_path, visible_path, full_path, occ_path, nu_k,
                           f1_radius);
    if (exp->parsed())
        return run_expand(bundle_path, out_dir, count, thermal_spec, seed,
                          lambda_override, override_opt->count() > 0);
    if (chk->parsed()) return run_check(config_path);
    return kExitConfig;
}
