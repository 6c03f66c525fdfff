#include "irforge/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace irforge {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': not a number: '" + v + "'");
    }
}

std::vector<double> parse_doubles(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const std::string& tok : split(v, ','))
        out.push_back(parse_double(key, tok));
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long n = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': not an integer: '" + v + "'");
    }
}

std::map<std::string, ThermalMode> parse_thermal(const std::string& v) {
    // engine:operating+muffler:operating+rest:ambient
    std::map<std::string, ThermalMode> cfg;
    for (const std::string& pair : split(v, '+')) {
        const auto colon = pair.find(':');
        if (colon == std::string::npos)
            throw ConfigError("thermal entry '" + pair +
                              "' must look like region:mode");
        const std::string region = trim(pair.substr(0, colon));
        cfg[region] = thermal_mode_from_string(trim(pair.substr(colon + 1)));
    }
    if (cfg.empty()) throw ConfigError("empty thermal configuration");
    return cfg;
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::set<std::string> seen;
    bool schema_seen = false;

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw
                                                          : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) +
                              ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("line " + std::to_string(lineno) +
                              ": empty key or value");
        if (key != "thermal" && !seen.insert(key).second)
            throw ConfigError("duplicate key '" + key + "'");

        if (key == "schema") {
            cfg.schema = static_cast<int>(parse_int(key, val));
            if (cfg.schema != 1)
                throw ConfigError("unsupported config schema " + val);
            schema_seen = true;
        } else if (key == "seed") {
            cfg.master_seed = static_cast<std::uint64_t>(
                std::stoull(val));
        } else if (key == "output") {
            cfg.output_dir = val;
        } else if (key == "background") {
            cfg.backgrounds = split(val, ',');
        } else if (key == "bundle") {
            cfg.bundles = split(val, ',');
        } else if (key == "occultant") {
            cfg.occultant = val;
        } else if (key == "rss") {
            cfg.rss = parse_doubles(key, val);
        } else if (key == "scr") {
            cfg.scr = parse_doubles(key, val);
        } else if (key == "k") {
            cfg.k = parse_doubles(key, val);
        } else if (key == "rx") {
            cfg.rx = parse_doubles(key, val);
        } else if (key == "nu_k") {
            cfg.cal.nu_k = parse_double(key, val);
        } else if (key == "mean_policy") {
            if (val == "preserve") {
                cfg.mean_policy = MeanPolicy::Preserve;
            } else if (val.rfind("set:", 0) == 0) {
                cfg.mean_policy = MeanPolicy::SetTo;
                cfg.mean_target = parse_double(key, val.substr(4));
            } else {
                throw ConfigError("mean_policy must be preserve or set:<value>");
            }
        } else if (key == "placement") {
            if (val == "random") {
                cfg.placement = PlacementPolicy::UniformRandom;
            } else if (val.rfind("fixed:", 0) == 0) {
                const auto parts = split(val.substr(6), ',');
                if (parts.size() != 2)
                    throw ConfigError("placement fixed needs fixed:dx,dy");
                cfg.placement = PlacementPolicy::Fixed;
                cfg.fixed_dx = static_cast<int>(parse_int(key, parts[0]));
                cfg.fixed_dy = static_cast<int>(parse_int(key, parts[1]));
            } else {
                throw ConfigError("placement must be random or fixed:dx,dy");
            }
        } else if (key == "f1_radius") {
            cfg.f1_radius = static_cast<int>(parse_int(key, val));
        } else if (key == "repeat") {
            cfg.repeat = static_cast<int>(parse_int(key, val));
        } else if (key == "thermal") {
            for (const std::string& one : split(val, ','))
                cfg.thermal_configs.push_back(parse_thermal(one));
        } else if (key == "sensor.blur") {
            cfg.sensor.blur_sigma = parse_double(key, val);
        } else if (key == "sensor.noise") {
            cfg.sensor.noise_sigma = parse_double(key, val);
        } else if (key == "sensor.depth") {
            cfg.sensor.export_depth = static_cast<int>(parse_int(key, val));
        } else if (key == "sensor.range") {
            if (val == "auto") {
                cfg.sensor.auto_range = true;
            } else {
                const auto parts = split(val, ',');
                if (parts.size() != 2)
                    throw ConfigError("sensor.range must be auto or min,max");
                cfg.sensor.auto_range = false;
                cfg.sensor.range_min = parse_double(key, parts[0]);
                cfg.sensor.range_max = parse_double(key, parts[1]);
            }
        } else {
            throw ConfigError("unknown key '" + key + "'");
        }
    }

    if (!schema_seen) throw ConfigError("missing 'schema = 1'");
    if (cfg.backgrounds.empty()) throw ConfigError("missing 'background'");
    if (cfg.bundles.empty()) throw ConfigError("missing 'bundle'");
    if (cfg.thermal_configs.empty())
        cfg.thermal_configs.push_back({{"rest", ThermalMode::Ambient}});

    for (double v : cfg.rss)
        if (v <= 0.0) throw ConfigError("rss values must be > 0");
    for (double v : cfg.scr)
        if (v <= 0.0) throw ConfigError("scr values must be > 0");
    for (double v : cfg.k)
        if (std::fabs(v) > 1.0)
            throw ConfigError("InfeasibleK: k values must lie in [-1, 1]");
    for (double v : cfg.rx)
        if (v < 0.0 || v > 1.0)
            throw ConfigError("rx values must lie in [0, 1]");
    if (cfg.cal.nu_k <= 0.0) throw ConfigError("nu_k must be > 0");
    if (cfg.f1_radius < 1) throw ConfigError("f1_radius must be >= 1");
    if (cfg.repeat < 1) throw ConfigError("repeat must be >= 1");
    if (cfg.sensor.export_depth != 8 && cfg.sensor.export_depth != 16)
        throw ConfigError("sensor.depth must be 8 or 16");
    if (cfg.sensor.blur_sigma < 0.0 || cfg.sensor.noise_sigma < 0.0)
        throw ConfigError("sensor.blur and sensor.noise must be >= 0");
    if (!cfg.sensor.auto_range && cfg.sensor.range_max <= cfg.sensor.range_min)
        throw ConfigError("sensor.range max must exceed min");
    const bool any_rx = std::any_of(cfg.rx.begin(), cfg.rx.end(),
                                    [](double v) { return v > kRxTolerance; });
    if (any_rx && cfg.occultant.empty())
        throw ConfigError("rx > 0 requires an occultant");
    return cfg;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::vector<SceneRecipe> expand_sweep(const RunConfig& cfg) {
    std::vector<SceneRecipe> recipes;
    std::size_t index = 0;
    for (const std::string& bg : cfg.backgrounds)
        for (const std::string& bundle : cfg.bundles)
            for (const auto& thermal : cfg.thermal_configs)
                for (double rss : cfg.rss)
                    for (double scr : cfg.scr)
                        for (double k : cfg.k)
                            for (double rx : cfg.rx)
                                for (int rep = 0; rep < cfg.repeat; ++rep) {
                                    SceneRecipe r;
                                    char id[16];
                                    std::snprintf(id, sizeof(id), "%06zu",
                                                  index);
                                    r.scene_id = std::string("scene_") + id;
                                    r.background_ref = bg;
                                    r.bundle_ref = bundle;
                                    r.occultant_ref =
                                        rx > 0.0 ? cfg.occultant : std::string();
                                    r.constraints.rss = rss;
                                    r.constraints.scr = scr;
                                    r.constraints.k = k;
                                    r.constraints.rx = rx;
                                    r.constraints.cal = cfg.cal;
                                    r.constraints.mean_policy = cfg.mean_policy;
                                    r.constraints.mean_target = cfg.mean_target;
                                    r.mode_names = thermal;
                                    r.sensor = cfg.sensor;
                                    r.placement = cfg.placement;
                                    r.fixed_dx = cfg.fixed_dx;
                                    r.fixed_dy = cfg.fixed_dy;
                                    r.f1_radius = cfg.f1_radius;
                                    r.seed = derive_seed(cfg.master_seed, index);
                                    recipes.push_back(std::move(r));
                                    ++index;
                                }
    if (recipes.empty()) throw EmptySweep("sweep expands to zero recipes");
    return recipes;
}

} // namespace irforge
