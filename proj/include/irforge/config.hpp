#ifndef IRFORGE_CONFIG_HPP
#define IRFORGE_CONFIG_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "irforge/pipeline.hpp"

namespace irforge {

/// Parsed scenario configuration. Every listed axis sweeps; single values are
/// one-element axes. See README for the key schema.
struct RunConfig {
    int schema = 1;
    std::uint64_t master_seed = 0;
    std::string output_dir = "out/dataset";

    std::vector<std::string> backgrounds;
    std::vector<std::string> bundles;
    std::string occultant; // optional, shared by all scenes

    std::vector<double> rss{1.0};
    std::vector<double> scr{1.0};
    std::vector<double> k{0.0};
    std::vector<double> rx{0.0};
    Calibration cal;
    MeanPolicy mean_policy = MeanPolicy::Preserve;
    double mean_target = 0.0;

    std::vector<std::map<std::string, ThermalMode>> thermal_configs;

    PlacementPolicy placement = PlacementPolicy::UniformRandom;
    int fixed_dx = 0;
    int fixed_dy = 0;
    int f1_radius = kDefaultF1Radius;
    int repeat = 1; // seed-variant axis

    SensorModel sensor;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::filesystem::path& path);

/// Cartesian-product expansion; scene i gets seed derive_seed(master, i) and
/// a zero-padded id.
std::vector<SceneRecipe> expand_sweep(const RunConfig& config);

} // namespace irforge

#endif
