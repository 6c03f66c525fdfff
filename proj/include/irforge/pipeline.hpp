#ifndef IRFORGE_PIPELINE_HPP
#define IRFORGE_PIPELINE_HPP

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "irforge/metrics.hpp"
#include "irforge/sensor.hpp"
#include "irforge/solver.hpp"
#include "irforge/thermal.hpp"

namespace irforge {

inline constexpr int kManifestSchemaVersion = 1;
inline constexpr int kDefaultF1Radius = 5;

enum class PlacementPolicy { Fixed, UniformRandom };

/// Everything needed to build one scene; the seed fully determines every
/// stochastic choice downstream.
struct SceneRecipe {
    std::string scene_id;
    std::string background_ref;
    std::string bundle_ref;
    std::string occultant_ref; // empty = no occultant
    SceneConstraints constraints;
    OperationalModes modes; // keyed by label code; may be empty
    // name-keyed modes, resolved against the bundle's region table; the
    // "rest" entry covers every region not named explicitly
    std::map<std::string, ThermalMode> mode_names;
    SensorModel sensor;
    std::uint64_t seed = 0;
    PlacementPolicy placement = PlacementPolicy::UniformRandom;
    int fixed_dx = 0;
    int fixed_dy = 0;
    int f1_radius = kDefaultF1Radius;
    std::optional<double> lambda_override; // debugging hook: forces every
                                           // region's lambda to this value
};

/// Resolved assets for one scene.
struct SceneAssets {
    ImageBuffer background;
    ViewBundle bundle;
    std::optional<ImageBuffer> occultant_image;
    std::optional<RegionMask> occultant_silhouette;
};

struct SceneRecord {
    std::string scene_id;
    std::uint64_t seed = 0;
    std::string background_ref, bundle_ref, occultant_ref;
    SceneConstraints requested;
    MetricSet achieved_pre;
    std::optional<MetricSet> achieved_post;
    ThermalState lambdas;
    std::map<std::string, double> lambda_by_name;
    AffineTransform background_transform;
    AffineTransform target_transform;
    Placement placement;
    int quant_depth = 16;
    double quant_min = 0.0, quant_max = 0.0;
    std::size_t saturated_low = 0, saturated_high = 0;
    std::string image_path, mask_visible_path, mask_full_path, mask_occ_path,
        intermediate_path;
};

struct SceneResult {
    ImageBuffer pre_sensor;  // step-C intermediate, metrics of record
    ImageBuffer post_sensor; // blurred + noised, before quantization
    QuantizedImage exported;
    SceneLayout layout;
    SceneRecord record;
};

/// Area decomposition around a placed (and possibly occluded) target.
SceneLayout make_layout(int frame_w, int frame_h, const RegionMask& target_sil,
                        int target_dx, int target_dy,
                        const RegionMask* occ_sil, int occ_dx, int occ_dy,
                        int f1_radius);

std::pair<int, int> target_placement(int frame_w, int frame_h,
                                     const RegionMask& silhouette,
                                     PlacementPolicy policy, int fixed_dx,
                                     int fixed_dy, Rng& rng);

FeasibilityReport scene_feasibility(const SceneRecipe& recipe,
                                    const SceneAssets& assets);

/// Runs the full chain: thermal mix, occultant and target positioning,
/// background/target gain-offset solve, sensor effect, quantization.
SceneResult build_scene(const SceneRecipe& recipe, const SceneAssets& assets);

nlohmann::json record_to_json(const SceneRecord& rec);

using AssetLoader = std::function<SceneAssets(const SceneRecipe&)>;

struct BatchOptions {
    std::filesystem::path out_dir;
    int jobs = 1;
    bool keep_intermediate = false;
    bool write_files = true;
};

struct BatchEntry {
    std::size_t index = 0;
    bool ok = false;
    std::string diagnostic;
    SceneRecord record;
};

struct BatchResult {
    std::vector<BatchEntry> entries; // ordered by scene index
    std::size_t failures = 0;
};

/// Runs every recipe, isolating failures; writes images, masks and
/// manifest.json under out_dir when write_files is set.
BatchResult batch_generate(const std::vector<SceneRecipe>& recipes,
                           const AssetLoader& loader,
                           const BatchOptions& options);

nlohmann::json manifest_json(const BatchResult& batch);

/// Loads background/bundle/occultant referenced by paths in the recipe.
SceneAssets load_scene_assets(const SceneRecipe& recipe,
                              const std::filesystem::path& base_dir);

} // namespace irforge

#endif
