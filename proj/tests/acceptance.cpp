// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "irforge/config.hpp"
#include "irforge/io.hpp"
#include "irforge/pipeline.hpp"
#include "testutil.hpp"

using namespace irforge;
namespace tu = irforge::testutil;
namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

struct Criterion {
    std::string name;
    std::function<bool(std::string&)> run;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool check(bool cond, std::string& msg, const std::string& detail) {
    if (!cond && msg.empty()) msg = detail;
    return cond;
}

// ---------------------------------------------------------------- 1
bool constraint_round_trip(std::string& msg) {
    const auto t0 = Clock::now();
    Rng rng(20260824);
    bool ok = true;
    for (int i = 0; i < 200 && ok; ++i) {
        SceneRecipe recipe = tu::basic_recipe(derive_seed(1, i));
        recipe.constraints.rss = 0.5 + 4.5 * rng.uniform();
        recipe.constraints.scr = 0.5 + 9.5 * rng.uniform();
        recipe.constraints.k = -1.0 + 2.0 * rng.uniform();
        recipe.constraints.cal.nu_k = 0.5 + 2.0 * rng.uniform();

        Rng arng(derive_seed(2, i));
        SceneAssets assets;
        assets.background = tu::random_image(256, 256, arng, 150.0, 450.0);
        assets.bundle = tu::synthetic_bundle(28, 18, arng);

        const SceneResult res = build_scene(recipe, assets);
        const MetricSet& m = res.record.achieved_pre;
        ok &= check(tu::rel_err(m.rss, recipe.constraints.rss) <= 1e-6, msg,
                    "RSS off at scene " + std::to_string(i));
        ok &= check(tu::rel_err(m.scr, recipe.constraints.scr) <= 1e-6, msg,
                    "SCR off at scene " + std::to_string(i));
        ok &= check(tu::rel_err(m.k, recipe.constraints.k) <= 1e-6, msg,
                    "K off at scene " + std::to_string(i));
    }
    const double dt = seconds_since(t0);
    ok &= check(dt <= 60.0, msg,
                "runtime " + std::to_string(dt) + "s exceeds 60s");
    return ok;
}

// ---------------------------------------------------------------- 2
bool metric_identity(std::string& msg) {
    Rng rng(7);
    bool ok = true;
    for (int i = 0; i < 1000 && ok; ++i) {
        const ImageBuffer img = tu::random_image(64, 64, rng);
        Rng srng(derive_seed(3, i));
        RegionMask sil = tu::random_blob(12, 10, srng);
        if (sil.popcount() < 2) continue;
        const int dx = 10 + static_cast<int>(srng.uniform_int(30));
        const int dy = 10 + static_cast<int>(srng.uniform_int(30));
        const SceneLayout layout =
            make_layout(64, 64, sil, dx, dy, nullptr, 0, 0, 4);
        const MetricSet m = measure_scene(img, layout, {1.3});
        const RegionStats cs = region_stats(img, layout.target_visible);
        const double lhs = (1.3 * m.rss) * (1.3 * m.rss);
        const double rhs = m.delta_mu * m.delta_mu + cs.stddev * cs.stddev;
        ok &= check(tu::rel_err(lhs, rhs) <= 1e-9, msg,
                    "identity violated at scene " + std::to_string(i));
        ok &= check(std::fabs(m.k) <= 1.0 + 1e-12, msg,
                    "|K| > 1 at scene " + std::to_string(i));
    }
    return ok;
}

// ---------------------------------------------------------------- 3
bool occultation(std::string& msg) {
    const double targets[] = {0.1, 0.25, 0.5, 0.75};
    Rng rng(55);
    int verified = 0;
    bool ok = true;
    int attempts = 0;
    while (verified < 100 && ok && attempts < 2000) {
        ++attempts;
        const int frame = 48;
        RegionMask tsil = tu::random_blob(14, 12, rng);
        RegionMask osil = tu::random_blob(12, 12, rng);
        if (tsil.popcount() < 8 || osil.popcount() < 8) continue;
        const double rx_star = targets[rng.uniform_int(4)];
        const int tdx = 16, tdy = 16;

        // exhaustive reachability + reference candidate set
        const RegionMask tframe = translate_mask(tsil, tdx, tdy, frame, frame);
        const double s_target = static_cast<double>(tframe.popcount());
        bool reachable = false;
        for (int oy = 0; oy <= frame - osil.height() && !reachable; ++oy)
            for (int ox = 0; ox <= frame - osil.width(); ++ox) {
                std::size_t n = 0;
                for (int y = 0; y < osil.height(); ++y)
                    for (int x = 0; x < osil.width(); ++x)
                        if (osil.get(x, y) && tframe.get(x + ox, y + oy)) ++n;
                if (std::fabs(n / s_target - rx_star) <= kRxTolerance) {
                    reachable = true;
                    break;
                }
            }
        if (!reachable) continue;

        SceneConstraints c;
        c.rx = rx_star;
        const Placement p =
            place_occultant(tsil, tdx, tdy, osil, frame, frame, c);
        ok &= check(std::fabs(p.achieved_rx - rx_star) <= kRxTolerance, msg,
                    "achieved R_x out of tolerance");

        // brute-force recount of the returned placement
        std::size_t n = 0;
        for (int y = 0; y < osil.height(); ++y)
            for (int x = 0; x < osil.width(); ++x)
                if (osil.get(x, y) && tframe.get(x + p.occ_dx, y + p.occ_dy))
                    ++n;
        ok &= check(std::fabs(p.achieved_rx - n / s_target) < 1e-12, msg,
                    "achieved R_x disagrees with brute-force recount");
        ++verified;
    }
    ok &= check(verified == 100, msg,
                "only " + std::to_string(verified) + " reachable pairs");
    return ok;
}

// ---------------------------------------------------------------- 4
bool thermal_mixing(std::string& msg) {
    Rng rng(77);
    ViewBundle b = tu::synthetic_bundle(30, 20, rng);
    const auto labels = b.regions.present_labels();
    bool ok = check(labels.size() == 5, msg, "expected 5 thermal regions");

    auto state_of = [&](double lam) {
        ThermalState s;
        for (std::uint8_t l : labels) s[l] = lam;
        return s;
    };
    const ImageBuffer at0 = mix(b, state_of(0.0));
    const ImageBuffer at1 = mix(b, state_of(1.0));
    const ImageBuffer mid = mix(b, state_of(0.5));
    for (std::size_t i = 0; i < at0.size() && ok; ++i) {
        if (b.regions.label(i) == 0) continue;
        ok &= check(at0[i] == b.ta[i], msg, "lambda=0 is not TA");
        ok &= check(at1[i] == b.tf[i], msg, "lambda=1 is not TF");
        ok &= check(std::fabs(mid[i] - (b.ta[i] + b.tf[i]) / 2.0) <= 1e-12,
                    msg, "lambda=0.5 is not the midpoint");
    }

    // per-region isolation across all 5 regions
    const ImageBuffer ref = mix(b, state_of(0.2));
    for (std::uint8_t changed : labels) {
        ThermalState s = state_of(0.2);
        s[changed] = 0.8;
        const ImageBuffer out = mix(b, s);
        for (std::size_t i = 0; i < out.size() && ok; ++i)
            if (b.regions.label(i) != changed)
                ok &= check(out[i] == ref[i], msg,
                            "lambda change leaked outside region " +
                                std::to_string(changed));
    }
    return ok;
}

// ---------------------------------------------------------------- 5
bool lambda_sampling(std::string& msg) {
    const auto t0 = Clock::now();
    const int n = 100000;
    bool ok = true;
    for (ThermalMode mode : {ThermalMode::Ambient, ThermalMode::Intermediate,
                             ThermalMode::Operating}) {
        Rng rng(300 + static_cast<int>(mode));
        int inside = 0;
        double sum = 0.0, ss = 0.0;
        for (int i = 0; i < n; ++i) {
            const double v = sample_lambda(mode, rng);
            ok &= check(v >= 0.0 && v <= 1.0, msg, "draw outside [0,1]");
            if (in_nominal_interval(mode, v)) ++inside;
            sum += v;
            ss += v * v;
        }
        const double frac = double(inside) / n;
        ok &= check(frac >= 0.985 && frac <= 0.995, msg,
                    to_string(mode) + " containment " + std::to_string(frac));
        if (mode == ThermalMode::Intermediate) {
            const double mean = sum / n;
            const double sd = std::sqrt(ss / n - mean * mean);
            ok &= check(std::fabs(mean - 0.5) <= 0.002, msg,
                        "intermediate mean " + std::to_string(mean));
            ok &= check(std::fabs(sd - 0.1333) <= 0.002, msg,
                        "intermediate sd " + std::to_string(sd));
        }
    }
    ok &= check(seconds_since(t0) <= 5.0, msg, "sampling exceeded 5s");
    return ok;
}

// ---------------------------------------------------------------- 6
bool sensor_model(std::string& msg) {
    bool ok = true;
    // impulse response vs analytic kernel
    SensorModel m;
    m.blur_sigma = 1.5;
    const int n = 33, c = 16;
    ImageBuffer impulse(n, n, 0.0);
    impulse.at(c, c) = 1.0;
    const ImageBuffer resp = apply_mtf(impulse, m);
    const std::vector<double> k = gaussian_kernel(1.5);
    const int radius = static_cast<int>(k.size() / 2);
    for (int y = 0; y < n && ok; ++y)
        for (int x = 0; x < n; ++x) {
            double expected = 0.0;
            if (std::abs(x - c) <= radius && std::abs(y - c) <= radius)
                expected = k[x - c + radius] * k[y - c + radius];
            ok &= check(std::fabs(resp.at(x, y) - expected) <= 1e-6, msg,
                        "impulse response tap off");
            if (!ok) break;
        }

    // flat-field noise std within 1%
    m.noise_sigma = 2.0;
    ImageBuffer flat(512, 512, 0.0);
    Rng nrng(901);
    const ImageBuffer noisy = apply_noise(flat, m, nrng);
    RegionMask all(512, 512, true);
    const RegionStats ns = region_stats(noisy, all);
    ok &= check(std::fabs(ns.stddev - 2.0) <= 0.02, msg,
                "noise std " + std::to_string(ns.stddev));

    // blur preserves the mean
    Rng irng(902);
    const ImageBuffer img = tu::random_image(128, 128, irng);
    RegionMask all2(128, 128, true);
    const double mean_before = region_stats(img, all2).mean;
    const double mean_after = region_stats(apply_mtf(img, m), all2).mean;
    ok &= check(tu::rel_err(mean_after, mean_before) <= 1e-9, msg,
                "blur changed the mean");
    return ok;
}

// ---------------------------------------------------------------- helpers 7/8

std::vector<char> slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

struct FileWorkspace {
    fs::path root;
    explicit FileWorkspace(const std::string& name) {
        root = fs::temp_directory_path() / name;
        fs::remove_all(root);
        fs::create_directories(root);
        Rng rng(1212);
        io::GrayImage bg;
        bg.width = bg.height = 128;
        bg.depth = 16;
        bg.values.resize(128 * 128);
        for (auto& v : bg.values)
            v = static_cast<std::uint16_t>(200 + rng.uniform_int(300));
        io::write_gray(root / "bg.png", bg);
        ViewBundle bundle = tu::synthetic_bundle(24, 16, rng);
        for (auto& v : bundle.ta.data()) v = std::floor(v);
        for (auto& v : bundle.tf.data()) v = std::floor(v);
        io::save_bundle(root / "bundle", bundle);
    }
};

bool dirs_identical(const fs::path& a, const fs::path& b, std::string& msg) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(a))
        if (e.is_regular_file()) files.push_back(fs::relative(e.path(), a));
    for (const auto& rel : files) {
        if (!fs::exists(b / rel)) {
            msg = "missing " + rel.string();
            return false;
        }
        if (slurp(a / rel) != slurp(b / rel)) {
            msg = "byte difference in " + rel.string();
            return false;
        }
    }
    return true;
}

std::string base_config(int repeat) {
    return "schema = 1\n"
           "seed = 2024\n"
           "background = bg.png\n"
           "bundle = bundle\n"
           "rss = 1.0, 2.5\n"
           "scr = 2.0\n"
           "k = -0.5, 0.5\n"
           "nu_k = 2.0\n"
           "sensor.blur = 1.0\n"
           "sensor.noise = 1.0\n"
           "thermal = engine:operating+rest:ambient, rest:intermediate, "
           "rest:operating\n"
           "repeat = " + std::to_string(repeat) + "\n";
}

// ---------------------------------------------------------------- 7
bool determinism(std::string& msg) {
    FileWorkspace ws("irforge_acc7");
    const RunConfig cfg = parse_config_text(base_config(1)); // 12 scenes
    const auto recipes = expand_sweep(cfg);
    if (recipes.size() != 12) {
        msg = "expected a 12-scene batch";
        return false;
    }
    auto loader = [&](const SceneRecipe& r) {
        return load_scene_assets(r, ws.root);
    };
    auto run = [&](const char* sub, int jobs) {
        BatchOptions o;
        o.out_dir = ws.root / sub;
        o.jobs = jobs;
        return batch_generate(recipes, loader, o);
    };
    const BatchResult r1 = run("j1", 1);
    const BatchResult r1b = run("j1b", 1);
    const BatchResult r8 = run("j8", 8);
    bool ok = check(r1.failures == 0, msg, "scene failures in the batch");
    ok &= dirs_identical(ws.root / "j1", ws.root / "j1b", msg);
    ok &= dirs_identical(ws.root / "j1", ws.root / "j8", msg);
    ok &= check(manifest_json(r1) == manifest_json(r8), msg,
                "manifests differ between 1 and 8 workers");
    return ok;
}

// ---------------------------------------------------------------- 8
bool database_build(std::string& msg) {
    const auto t0 = Clock::now();
    FileWorkspace ws("irforge_acc8");
    // 2 rss x 2 k x 3 thermal x repeat 9 = 108 scenes
    const RunConfig cfg = parse_config_text(base_config(9));
    const auto recipes = expand_sweep(cfg);
    bool ok = check(recipes.size() >= 100, msg, "sweep smaller than 100");
    BatchOptions o;
    o.out_dir = ws.root / "dataset";
    o.jobs = 4;
    const BatchResult batch = batch_generate(
        recipes,
        [&](const SceneRecipe& r) { return load_scene_assets(r, ws.root); }, o);
    ok &= check(batch.failures == 0, msg,
                std::to_string(batch.failures) + " unexplained failures");

    const json manifest =
        json::parse(std::ifstream(o.out_dir / "manifest.json"));
    ok &= check(manifest["schema_version"] == kManifestSchemaVersion, msg,
                "bad manifest schema version");
    ok &= check(manifest["scene_count"] == recipes.size(), msg,
                "manifest scene count mismatch");
    for (const auto& s : manifest["scenes"]) {
        if (!ok) break;
        ok &= check(s.contains("status"), msg, "scene entry missing status");
        if (s["status"] == "ok") {
            const json& rec = s["record"];
            for (const char* key : {"scene_id", "seed", "requested",
                                    "achieved_pre_sensor", "lambda",
                                    "transforms", "placement", "quantization",
                                    "files"})
                ok &= check(rec.contains(key), msg,
                            std::string("record missing ") + key);
            ok &= check(
                fs::exists(o.out_dir /
                           rec["files"]["image"].get<std::string>()),
                msg, "image file missing");
        }
    }
    const double dt = seconds_since(t0);
    ok &= check(dt <= 120.0, msg,
                "build took " + std::to_string(dt) + "s (limit 120)");
    return ok;
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"1 constraint round-trip (200 scenes, <=1e-6 rel, <=60s)",
         constraint_round_trip},
        {"2 metric identity (1000 scenes, <=1e-9 rel, |K|<=1)",
         metric_identity},
        {"3 occultation (100 pairs, +/-0.02, exhaustive check)", occultation},
        {"4 thermal mixing (endpoints byte-exact, midpoint 1e-12, isolation)",
         thermal_mixing},
        {"5 lambda sampling (99% containment, moments, <=5s)",
         lambda_sampling},
        {"6 sensor (impulse 1e-6, noise std 1%, mean 1e-9)", sensor_model},
        {"7 determinism (same seed bytes, jobs 1 vs 8)", determinism},
        {"8 desk-scale database (100+ scenes, <=120s, valid manifest)",
         database_build},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        std::string msg;
        bool ok = false;
        try {
            ok = c.run(msg);
        } catch (const std::exception& e) {
            msg = std::string("exception: ") + e.what();
        }
        std::printf("%s criterion %s%s%s\n", ok ? "PASS" : "FAIL",
                    c.name.c_str(), msg.empty() ? "" : " -- ", msg.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
