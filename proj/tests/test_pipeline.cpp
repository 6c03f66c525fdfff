#include <doctest.h>

#include <nlohmann/json.hpp>

#include "irforge/pipeline.hpp"
#include "testutil.hpp"

using namespace irforge;
namespace tu = irforge::testutil;

TEST_CASE("make_layout partitions the frame") {
    Rng rng(19);
    RegionMask sil = tu::random_blob(12, 10, rng);
    RegionMask occ = tu::rect_mask(6, 6, 0, 0, 6, 6);
    SceneLayout layout = make_layout(48, 48, sil, 10, 10, &occ, 14, 12, 4);
    validate_layout(layout);

    // the pieces are pairwise disjoint and tile the frame
    const RegionMask* pieces[] = {&layout.target_visible,
                                  &layout.local_background, &layout.occultant,
                                  &layout.remaining_background};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            CHECK(mask_ops(*pieces[i], *pieces[j], MaskOp::And).popcount() ==
                  0);
    RegionMask all = layout.target_visible;
    for (int i = 1; i < 4; ++i) all = mask_ops(all, *pieces[i], MaskOp::Or);
    CHECK(all.popcount() == 48u * 48u);
}

TEST_CASE("target_placement") {
    RegionMask sil(8, 8, true);
    Rng rng(3);
    SUBCASE("fixed") {
        auto [dx, dy] = target_placement(32, 32, sil, PlacementPolicy::Fixed,
                                         0, 0, rng);
        CHECK(dx == 0);
        CHECK(dy == 0);
    }
    SUBCASE("frame exactly silhouette-sized forces (0,0)") {
        auto [dx, dy] = target_placement(8, 8, sil,
                                         PlacementPolicy::UniformRandom, 0, 0,
                                         rng);
        CHECK(dx == 0);
        CHECK(dy == 0);
    }
    SUBCASE("too large") {
        CHECK_THROWS_AS(target_placement(6, 8, sil, PlacementPolicy::Fixed, 0,
                                         0, rng),
                        TargetTooLarge);
    }
    SUBCASE("uniform over the 11x11 valid offsets") {
        // frame 18, silhouette 8 -> offsets 0..10 per axis
        const int n = 10000;
        std::vector<int> counts(121, 0);
        for (int i = 0; i < n; ++i) {
            auto [dx, dy] = target_placement(18, 18, sil,
                                             PlacementPolicy::UniformRandom, 0,
                                             0, rng);
            ++counts[dy * 11 + dx];
        }
        const double expected = n / 121.0;
        double chi2 = 0.0;
        for (int c : counts) {
            CHECK(c > 0);
            chi2 += (c - expected) * (c - expected) / expected;
        }
        // chi-square critical value, 120 dof, significance 0.001
        CHECK(chi2 < 173.62);
    }
}

TEST_CASE("build_scene achieves the requested constraints pre-sensor") {
    SceneRecipe recipe = tu::basic_recipe(42);
    recipe.sensor.blur_sigma = 1.0;
    recipe.sensor.noise_sigma = 1.5;
    SceneAssets assets = tu::basic_assets(21);
    const SceneResult res = build_scene(recipe, assets);

    CHECK(tu::rel_err(res.record.achieved_pre.rss, 2.0) < 1e-6);
    CHECK(tu::rel_err(res.record.achieved_pre.scr, 4.0) < 1e-6);
    CHECK(std::fabs(res.record.achieved_pre.k - (-0.3)) < 1e-6);
    CHECK(res.record.achieved_pre.rx == doctest::Approx(0.0));
    CHECK(res.record.achieved_post.has_value());

    // every lambda recorded and in range
    CHECK(res.record.lambdas.size() == 5);
    for (const auto& [label, lam] : res.record.lambdas) {
        CHECK(lam >= 0.0);
        CHECK(lam <= 1.0);
    }
}

TEST_CASE("build_scene with an occultant meets R_x and excludes it from F") {
    SceneRecipe recipe = tu::basic_recipe(8);
    recipe.constraints.rx = 0.25;
    SceneAssets assets = tu::basic_assets(31, 128);
    Rng rng(99);
    assets.occultant_image = tu::random_image(20, 20, rng, 50.0, 90.0);
    assets.occultant_silhouette = tu::rect_mask(20, 20, 0, 0, 20, 20);

    const SceneResult res = build_scene(recipe, assets);
    CHECK(std::fabs(res.record.achieved_pre.rx - 0.25) <= kRxTolerance);
    CHECK(res.record.placement.has_occultant);
    validate_layout(res.layout);
}

TEST_CASE("build_scene same seed is bit-identical, different seed differs") {
    SceneRecipe recipe = tu::basic_recipe(1234);
    SceneAssets assets = tu::basic_assets(5);
    const SceneResult a = build_scene(recipe, assets);
    const SceneResult b = build_scene(recipe, assets);
    CHECK(a.pre_sensor.data() == b.pre_sensor.data());
    CHECK(a.exported.values == b.exported.values);
    CHECK(a.record.lambdas == b.record.lambdas);

    recipe.seed = 1235;
    const SceneResult c = build_scene(recipe, assets);
    CHECK(a.record.lambdas != c.record.lambdas);
}

TEST_CASE("build_scene lambda override pins the thermal state") {
    SceneRecipe recipe = tu::basic_recipe(4);
    recipe.lambda_override = 0.0;
    SceneAssets assets = tu::basic_assets(6);
    const SceneResult res = build_scene(recipe, assets);
    for (const auto& [label, lam] : res.record.lambdas) CHECK(lam == 0.0);
}

TEST_CASE("build_scene rejects infeasible recipes up front") {
    SceneRecipe recipe = tu::basic_recipe(4);
    recipe.constraints.rx = 0.5; // no occultant asset
    SceneAssets assets = tu::basic_assets(6);
    CHECK_THROWS(build_scene(recipe, assets));
}

namespace {

AssetLoader memory_loader() {
    return [](const SceneRecipe& recipe) {
        // background ref encodes a seed, bundle ref is fixed
        const std::uint64_t bg_seed = std::stoull(recipe.background_ref);
        Rng rng(bg_seed);
        SceneAssets a;
        a.background = tu::random_image(96, 96, rng, 200.0, 400.0);
        a.bundle = tu::synthetic_bundle(24, 16, rng);
        return a;
    };
}

} // namespace

TEST_CASE("batch_generate expands, isolates failures, orders by index") {
    std::vector<SceneRecipe> recipes;
    for (int i = 0; i < 5; ++i) {
        SceneRecipe r = tu::basic_recipe(derive_seed(9, i));
        r.scene_id = "s" + std::to_string(i);
        r.background_ref = "77";
        if (i == 2) r.constraints.k = 1.5; // infeasible on purpose
        recipes.push_back(r);
    }
    BatchOptions opts;
    opts.write_files = false;
    const BatchResult batch = batch_generate(recipes, memory_loader(), opts);
    CHECK(batch.entries.size() == 5);
    CHECK(batch.failures == 1);
    CHECK_FALSE(batch.entries[2].ok);
    CHECK(batch.entries[2].diagnostic.find("InfeasibleK") != std::string::npos);
    for (std::size_t i = 0; i < 5; ++i) CHECK(batch.entries[i].index == i);

    const nlohmann::json m = manifest_json(batch);
    CHECK(m["schema_version"] == kManifestSchemaVersion);
    CHECK(m["scene_count"] == 5);
    CHECK(m["failures"] == 1);
    CHECK(m["scenes"].size() == 5);
}

TEST_CASE("batch_generate is deterministic across worker counts") {
    std::vector<SceneRecipe> recipes;
    for (int i = 0; i < 12; ++i) {
        SceneRecipe r = tu::basic_recipe(derive_seed(31, i));
        r.scene_id = "s" + std::to_string(i);
        r.background_ref = std::to_string(100 + i % 3);
        recipes.push_back(r);
    }
    BatchOptions serial;
    serial.write_files = false;
    serial.jobs = 1;
    BatchOptions parallel = serial;
    parallel.jobs = 8;
    const BatchResult a = batch_generate(recipes, memory_loader(), serial);
    const BatchResult b = batch_generate(recipes, memory_loader(), parallel);
    CHECK(manifest_json(a) == manifest_json(b));
}

TEST_CASE("empty sweep is rejected") {
    BatchOptions opts;
    opts.write_files = false;
    CHECK_THROWS_AS(batch_generate({}, memory_loader(), opts), EmptySweep);
}

TEST_CASE("record JSON carries the full ground truth") {
    SceneRecipe recipe = tu::basic_recipe(77);
    SceneAssets assets = tu::basic_assets(7);
    const SceneResult res = build_scene(recipe, assets);
    const nlohmann::json j = record_to_json(res.record);
    CHECK(j["seed"] == 77);
    CHECK(j["requested"]["rss"] == doctest::Approx(2.0));
    CHECK(j["achieved_pre_sensor"]["rss"] == doctest::Approx(2.0));
    CHECK(j["lambda"].size() == 5);
    CHECK(j["transforms"]["background"].contains("gain"));
    CHECK(j["placement"].contains("target"));
    CHECK(j["quantization"]["depth"] == 16);

    // replay: the record's seed alone reproduces the image bit-exactly
    SceneRecipe replay = recipe;
    replay.seed = j["seed"].get<std::uint64_t>();
    const SceneResult again = build_scene(replay, assets);
    CHECK(again.exported.values == res.exported.values);
}
