#include "irforge/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "irforge/io.hpp"

namespace irforge {

namespace {

// independent per-scene sub-streams
enum StreamTag : std::uint64_t { kThermal = 1, kPlacement = 2, kNoise = 3 };

Rng substream(std::uint64_t scene_seed, StreamTag tag) {
    return Rng(derive_seed(scene_seed, tag));
}

OperationalModes resolve_modes(const SceneRecipe& recipe,
                               const ViewBundle& bundle) {
    OperationalModes modes = recipe.modes;
    for (std::uint8_t label : bundle.regions.present_labels()) {
        if (modes.count(label)) continue;
        const auto name_it = bundle.region_names.find(label);
        if (name_it != bundle.region_names.end()) {
            const auto mode_it = recipe.mode_names.find(name_it->second);
            if (mode_it != recipe.mode_names.end()) {
                modes[label] = mode_it->second;
                continue;
            }
        }
        const auto rest = recipe.mode_names.find("rest");
        if (rest != recipe.mode_names.end()) {
            modes[label] = rest->second;
            continue;
        }
        throw MissingRegionLambda(
            "no thermal mode for region label " + std::to_string(label) +
            (name_it != bundle.region_names.end() ? " (" + name_it->second + ")"
                                                  : ""));
    }
    return modes;
}

} // namespace

SceneLayout make_layout(int frame_w, int frame_h, const RegionMask& target_sil,
                        int target_dx, int target_dy,
                        const RegionMask* occ_sil, int occ_dx, int occ_dy,
                        int f1_radius) {
    SceneLayout layout;
    layout.frame_width = frame_w;
    layout.frame_height = frame_h;
    layout.target_full =
        translate_mask(target_sil, target_dx, target_dy, frame_w, frame_h);
    layout.occultant = occ_sil ? translate_mask(*occ_sil, occ_dx, occ_dy,
                                                frame_w, frame_h)
                               : RegionMask(frame_w, frame_h);
    layout.target_visible =
        mask_ops(layout.target_full, layout.occultant, MaskOp::AndNot);

    // F1 band follows the visible silhouette, never target or occultant
    RegionMask ring = layout.target_visible.popcount() > 0
                          ? dilation_ring(layout.target_visible, f1_radius)
                          : RegionMask(frame_w, frame_h);
    ring = mask_ops(ring, layout.target_full, MaskOp::AndNot);
    layout.local_background = mask_ops(ring, layout.occultant, MaskOp::AndNot);

    RegionMask used = mask_ops(layout.target_full, layout.occultant, MaskOp::Or);
    used = mask_ops(used, layout.local_background, MaskOp::Or);
    RegionMask all(frame_w, frame_h, true);
    layout.remaining_background = mask_ops(all, used, MaskOp::AndNot);
    return layout;
}

std::pair<int, int> target_placement(int frame_w, int frame_h,
                                     const RegionMask& silhouette,
                                     PlacementPolicy policy, int fixed_dx,
                                     int fixed_dy, Rng& rng) {
    const int max_dx = frame_w - silhouette.width();
    const int max_dy = frame_h - silhouette.height();
    if (max_dx < 0 || max_dy < 0)
        throw TargetTooLarge("target_placement: silhouette exceeds frame");
    if (policy == PlacementPolicy::Fixed) {
        if (fixed_dx < 0 || fixed_dx > max_dx || fixed_dy < 0 ||
            fixed_dy > max_dy)
            throw OutOfFrame("target_placement: fixed offset out of frame");
        return {fixed_dx, fixed_dy};
    }
    const int dx = static_cast<int>(rng.uniform_int(max_dx + 1));
    const int dy = static_cast<int>(rng.uniform_int(max_dy + 1));
    return {dx, dy};
}

FeasibilityReport scene_feasibility(const SceneRecipe& recipe,
                                    const SceneAssets& assets) {
    FeasibilityInputs in;
    in.frame_w = assets.background.width();
    in.frame_h = assets.background.height();
    in.target_w = assets.bundle.regions.width();
    in.target_h = assets.bundle.regions.height();
    in.has_occultant = assets.occultant_silhouette.has_value();
    RegionMask all(in.frame_w, in.frame_h, true);
    if (all.popcount() > 0)
        in.stats_f = region_stats(assets.background, all);
    if (!recipe.sensor.auto_range) {
        in.export_min = recipe.sensor.range_min;
        in.export_max = recipe.sensor.range_max;
    }
    return check_feasibility(recipe.constraints, in);
}

SceneResult build_scene(const SceneRecipe& recipe, const SceneAssets& assets) {
    const FeasibilityReport feas = scene_feasibility(recipe, assets);
    if (!feas.ok()) {
        std::string msg = "infeasible recipe:";
        for (const auto& s : feas.issues) msg += " " + s;
        throw Error(msg);
    }

    const int frame_w = assets.background.width();
    const int frame_h = assets.background.height();
    const SceneConstraints& c = recipe.constraints;

    // thermal state and mixed signature
    Rng rng_thermal = substream(recipe.seed, kThermal);
    ThermalState state;
    if (recipe.lambda_override) {
        for (std::uint8_t label : assets.bundle.regions.present_labels())
            state[label] = *recipe.lambda_override;
    } else {
        state = draw_state(resolve_modes(recipe, assets.bundle), rng_thermal);
    }
    const ImageBuffer signature = mix(assets.bundle, state);
    const RegionMask silhouette = assets.bundle.regions.silhouette();
    if (silhouette.popcount() == 0)
        throw EmptyTarget("build_scene: bundle has an empty silhouette");

    // step B target positioning (step A's occultant is solved against it)
    Rng rng_place = substream(recipe.seed, kPlacement);
    auto [dx, dy] = target_placement(frame_w, frame_h, silhouette,
                                     recipe.placement, recipe.fixed_dx,
                                     recipe.fixed_dy, rng_place);

    // step A occultant positioning under the R_x constraint
    Placement placement{dx, dy, 0, 0, 0.0, false};
    const RegionMask* occ_sil = nullptr;
    if (assets.occultant_silhouette) {
        occ_sil = &*assets.occultant_silhouette;
        placement = place_occultant(silhouette, dx, dy, *occ_sil, frame_w,
                                    frame_h, c);
    } else if (c.rx > kRxTolerance) {
        throw Unachievable("build_scene: R_x* > 0 without an occultant");
    }

    SceneLayout layout =
        make_layout(frame_w, frame_h, silhouette, dx, dy, occ_sil,
                    placement.occ_dx, placement.occ_dy, recipe.f1_radius);
    if (layout.target_visible.popcount() == 0)
        throw EmptyTarget("build_scene: target fully occluded");

    // step C: background first, then target against the transformed F1 mean
    const RegionMask f_mask = mask_ops(layout.local_background,
                                       layout.remaining_background, MaskOp::Or);
    const RegionStats stats_f = region_stats(assets.background, f_mask);
    const AffineTransform bg_t = solve_background(stats_f, c);

    ImageBuffer scene = assets.background;
    RegionMask whole(frame_w, frame_h, true);
    apply_affine(scene, whole, bg_t.gain, bg_t.offset);
    const double mu_f1_after =
        region_stats(scene, layout.local_background).mean;

    // signature statistics over the pixels that stay visible
    RegionMask visible_src(silhouette.width(), silhouette.height());
    for (int y = 0; y < silhouette.height(); ++y)
        for (int x = 0; x < silhouette.width(); ++x)
            if (silhouette.get(x, y) &&
                layout.target_visible.get(x + dx, y + dy))
                visible_src.set(x, y, true);
    const RegionStats stats_c = region_stats(signature, visible_src);
    const AffineTransform tgt_t = solve_target(stats_c, mu_f1_after, c);

    ImageBuffer sig_t = signature;
    apply_affine(sig_t, visible_src, tgt_t.gain, tgt_t.offset);
    blit(scene, sig_t, visible_src, dx, dy);

    // occultant is scene background thermally: same affine as the background
    if (occ_sil && assets.occultant_image) {
        ImageBuffer occ = *assets.occultant_image;
        RegionMask occ_all(occ.width(), occ.height(), true);
        apply_affine(occ, occ_all, bg_t.gain, bg_t.offset);
        blit(scene, occ, *occ_sil, placement.occ_dx, placement.occ_dy);
    }

    SceneResult result;
    result.layout = layout;
    result.pre_sensor = scene;
    result.record.achieved_pre = measure_scene(scene, layout, c.cal);

    // step D sensor effect
    ImageBuffer blurred = apply_mtf(scene, recipe.sensor);
    Rng rng_noise = substream(recipe.seed, kNoise);
    result.post_sensor = apply_noise(blurred, recipe.sensor, rng_noise);
    try {
        result.record.achieved_post =
            measure_scene(result.post_sensor, layout, c.cal);
    } catch (const Error&) {
        result.record.achieved_post.reset();
    }
    result.exported = quantize(result.post_sensor, recipe.sensor);

    SceneRecord& rec = result.record;
    rec.scene_id = recipe.scene_id;
    rec.seed = recipe.seed;
    rec.background_ref = recipe.background_ref;
    rec.bundle_ref = recipe.bundle_ref;
    rec.occultant_ref = recipe.occultant_ref;
    rec.requested = c;
    rec.lambdas = state;
    for (const auto& [label, lam] : state) {
        auto it = assets.bundle.region_names.find(label);
        rec.lambda_by_name[it != assets.bundle.region_names.end()
                               ? it->second
                               : "label_" + std::to_string(label)] = lam;
    }
    rec.background_transform = bg_t;
    rec.target_transform = tgt_t;
    rec.placement = placement;
    rec.quant_depth = result.exported.depth;
    rec.quant_min = result.exported.range_min;
    rec.quant_max = result.exported.range_max;
    rec.saturated_low = result.exported.saturated_low;
    rec.saturated_high = result.exported.saturated_high;
    return result;
}

static nlohmann::json metric_json(const MetricSet& m) {
    return {{"rss", m.rss}, {"qd", m.qd},          {"scr", m.scr},
            {"rx", m.rx},   {"k", m.k},            {"delta_mu", m.delta_mu}};
}

nlohmann::json record_to_json(const SceneRecord& rec) {
    nlohmann::json j;
    j["scene_id"] = rec.scene_id;
    j["seed"] = rec.seed;
    j["background"] = rec.background_ref;
    j["bundle"] = rec.bundle_ref;
    j["occultant"] = rec.occultant_ref;
    j["requested"] = {{"rss", rec.requested.rss},
                      {"scr", rec.requested.scr},
                      {"k", rec.requested.k},
                      {"rx", rec.requested.rx},
                      {"nu_k", rec.requested.cal.nu_k}};
    j["achieved_pre_sensor"] = metric_json(rec.achieved_pre);
    if (rec.achieved_post)
        j["achieved_post_sensor"] = metric_json(*rec.achieved_post);
    j["lambda"] = rec.lambda_by_name;
    j["transforms"] = {
        {"background",
         {{"gain", rec.background_transform.gain},
          {"offset", rec.background_transform.offset}}},
        {"target",
         {{"gain", rec.target_transform.gain},
          {"offset", rec.target_transform.offset}}}};
    j["placement"] = {{"target", {rec.placement.target_dx,
                                  rec.placement.target_dy}},
                      {"occultant", {rec.placement.occ_dx,
                                     rec.placement.occ_dy}},
                      {"achieved_rx", rec.placement.achieved_rx},
                      {"has_occultant", rec.placement.has_occultant}};
    j["quantization"] = {{"depth", rec.quant_depth},
                         {"range_min", rec.quant_min},
                         {"range_max", rec.quant_max},
                         {"saturated_low", rec.saturated_low},
                         {"saturated_high", rec.saturated_high}};
    nlohmann::json files = nlohmann::json::object();
    files["image"] = rec.image_path;
    files["mask_visible"] = rec.mask_visible_path;
    files["mask_full"] = rec.mask_full_path;
    if (!rec.mask_occ_path.empty()) files["mask_occultant"] = rec.mask_occ_path;
    if (!rec.intermediate_path.empty())
        files["intermediate"] = rec.intermediate_path;
    j["files"] = files;
    return j;
}

BatchResult batch_generate(const std::vector<SceneRecipe>& recipes,
                           const AssetLoader& loader,
                           const BatchOptions& options) {
    if (recipes.empty()) throw EmptySweep("batch_generate: no recipes");
    const std::filesystem::path images_dir = options.out_dir / "images";
    const std::filesystem::path masks_dir = options.out_dir / "masks";
    if (options.write_files) {
        std::filesystem::create_directories(images_dir);
        std::filesystem::create_directories(masks_dir);
    }

    BatchResult batch;
    batch.entries.resize(recipes.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= recipes.size()) return;
            BatchEntry& entry = batch.entries[i];
            entry.index = i;
            const SceneRecipe& recipe = recipes[i];
            try {
                SceneAssets assets = loader(recipe);
                SceneResult res = build_scene(recipe, assets);
                SceneRecord& rec = res.record;
                if (options.write_files) {
                    const std::string id = recipe.scene_id;
                    rec.image_path = "images/" + id + ".png";
                    rec.mask_visible_path = "masks/" + id + "_visible.png";
                    rec.mask_full_path = "masks/" + id + "_full.png";
                    io::write_quantized(options.out_dir / rec.image_path,
                                        res.exported);
                    io::write_mask(options.out_dir / rec.mask_visible_path,
                                   res.layout.target_visible);
                    io::write_mask(options.out_dir / rec.mask_full_path,
                                   res.layout.target_full);
                    if (rec.placement.has_occultant) {
                        rec.mask_occ_path = "masks/" + id + "_occultant.png";
                        io::write_mask(options.out_dir / rec.mask_occ_path,
                                       res.layout.occultant);
                    }
                    if (options.keep_intermediate) {
                        rec.intermediate_path = "images/" + id + "_pre.irf";
                        io::write_irf(options.out_dir / rec.intermediate_path,
                                      res.pre_sensor);
                    }
                }
                entry.record = std::move(res.record);
                entry.ok = true;
            } catch (const std::exception& e) {
                entry.ok = false;
                entry.diagnostic = e.what();
                entry.record.scene_id = recipe.scene_id;
                entry.record.seed = recipe.seed;
            }
        }
    };

    const int jobs = std::max(1, options.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (const BatchEntry& e : batch.entries)
        if (!e.ok) ++batch.failures;

    if (options.write_files) {
        std::ofstream out(options.out_dir / "manifest.json");
        out << manifest_json(batch).dump(2) << "\n";
    }
    return batch;
}

nlohmann::json manifest_json(const BatchResult& batch) {
    nlohmann::json scenes = nlohmann::json::array();
    for (const BatchEntry& e : batch.entries) {
        nlohmann::json s;
        s["index"] = e.index;
        s["status"] = e.ok ? "ok" : "failed";
        if (e.ok) {
            s["record"] = record_to_json(e.record);
        } else {
            s["scene_id"] = e.record.scene_id;
            s["diagnostic"] = e.diagnostic;
        }
        scenes.push_back(std::move(s));
    }
    return {{"schema_version", kManifestSchemaVersion},
            {"scene_count", batch.entries.size()},
            {"failures", batch.failures},
            {"scenes", scenes}};
}

SceneAssets load_scene_assets(const SceneRecipe& recipe,
                              const std::filesystem::path& base_dir) {
    SceneAssets assets;
    auto resolve = [&](const std::string& ref) {
        std::filesystem::path p(ref);
        return p.is_absolute() ? p : base_dir / p;
    };
    if (recipe.background_ref.empty())
        throw AssetError("recipe has no background reference");
    if (recipe.bundle_ref.empty())
        throw AssetError("recipe has no bundle reference");
    assets.background = io::to_image(io::read_gray(resolve(recipe.background_ref)));
    assets.bundle = io::load_bundle(resolve(recipe.bundle_ref));
    if (!recipe.occultant_ref.empty()) {
        io::GrayImage g = io::read_gray(resolve(recipe.occultant_ref));
        assets.occultant_image = io::to_image(g);
        assets.occultant_silhouette = io::to_mask(g);
    }
    return assets;
}

} // namespace irforge
