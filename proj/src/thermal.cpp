#include "irforge/thermal.hpp"

#include <cmath>

namespace irforge {

namespace {
// endpoint sigma puts 99% of the half-gaussian mass inside the 0.1-wide
// nominal interval (0.1 / Phi^-1(0.995)); note 0.1/3 would give 99.73%
constexpr double kEndpointSigma = 0.1 / 2.5758293035489008;
constexpr double kIntermediateSigma = 0.4 / 3.0;
constexpr int kMaxRejections = 1000;
} // namespace

void ViewBundle::validate() const {
    if (!ta.same_shape(regions.width(), regions.height()) ||
        !tf.same_shape(regions.width(), regions.height()))
        throw DimensionMismatch("bundle: ta/tf/regions dimensions differ");
    for (std::uint8_t l : regions.present_labels())
        if (!region_names.count(l))
            throw AssetError("bundle: label " + std::to_string(l) +
                             " missing from region table");
}

LambdaLaw lambda_law(ThermalMode mode) {
    switch (mode) {
        case ThermalMode::Ambient: return {mode, 0.0, kEndpointSigma};
        case ThermalMode::Operating: return {mode, 1.0, kEndpointSigma};
        case ThermalMode::Intermediate:
        default: return {mode, 0.5, kIntermediateSigma};
    }
}

bool in_nominal_interval(ThermalMode mode, double lambda) {
    switch (mode) {
        case ThermalMode::Ambient: return lambda >= 0.0 && lambda <= 0.1;
        case ThermalMode::Operating: return lambda >= 0.9 && lambda <= 1.0;
        case ThermalMode::Intermediate:
        default: return lambda > 0.1 && lambda < 0.9;
    }
}

double sample_lambda(ThermalMode mode, Rng& rng) {
    for (int i = 0; i < kMaxRejections; ++i) {
        double v;
        switch (mode) {
            case ThermalMode::Ambient:
                v = std::fabs(rng.normal(0.0, kEndpointSigma));
                break;
            case ThermalMode::Operating:
                v = 1.0 - std::fabs(rng.normal(0.0, kEndpointSigma));
                break;
            case ThermalMode::Intermediate:
            default:
                v = rng.normal(0.5, kIntermediateSigma);
                break;
        }
        if (v >= 0.0 && v <= 1.0) return v;
    }
    throw SamplerStuck("sample_lambda: rejection cap exceeded");
}

ThermalState draw_state(const OperationalModes& modes, Rng& rng) {
    ThermalState state;
    for (const auto& [label, mode] : modes)
        state[label] = sample_lambda(mode, rng);
    return state;
}

ImageBuffer mix(const ViewBundle& bundle, const ThermalState& state) {
    bundle.validate();
    for (std::uint8_t l : bundle.regions.present_labels())
        if (!state.count(l))
            throw MissingRegionLambda("mix: no lambda for region label " +
                                      std::to_string(l));
    ImageBuffer out(bundle.ta.width(), bundle.ta.height(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::uint8_t l = bundle.regions.label(i);
        if (l == 0) continue;
        const double lam = state.at(l);
        out[i] = (1.0 - lam) * bundle.ta[i] + lam * bundle.tf[i];
    }
    return out;
}

std::vector<ExpandedSignature> expand_database(
    const ViewBundle& bundle, const std::vector<OperationalModes>& configs,
    std::size_t n_per_config, std::uint64_t master_seed) {
    if (n_per_config < 1)
        throw Error("expand_database: n_per_config must be >= 1");
    std::vector<ExpandedSignature> out;
    out.reserve(configs.size() * n_per_config);
    std::size_t item = 0;
    for (std::size_t c = 0; c < configs.size(); ++c) {
        for (std::size_t n = 0; n < n_per_config; ++n, ++item) {
            Rng rng(derive_seed(master_seed, item));
            ThermalState state = draw_state(configs[c], rng);
            out.push_back({mix(bundle, state), std::move(state), c});
        }
    }
    return out;
}

ThermalMode thermal_mode_from_string(const std::string& s) {
    if (s == "ambient") return ThermalMode::Ambient;
    if (s == "intermediate") return ThermalMode::Intermediate;
    if (s == "operating") return ThermalMode::Operating;
    throw ConfigError("unknown thermal mode: " + s);
}

std::string to_string(ThermalMode mode) {
    switch (mode) {
        case ThermalMode::Ambient: return "ambient";
        case ThermalMode::Operating: return "operating";
        case ThermalMode::Intermediate:
        default: return "intermediate";
    }
}

} // namespace irforge
