#ifndef IRFORGE_THERMAL_HPP
#define IRFORGE_THERMAL_HPP

#include <map>
#include <string>
#include <vector>

#include "irforge/image.hpp"
#include "irforge/rng.hpp"

namespace irforge {

/// Per-view target data: ambient (TA) and operational (TF) signatures plus
/// the map of homogeneous thermal behavior regions.
struct ViewBundle {
    ImageBuffer ta;
    ImageBuffer tf;
    LabelMap regions;
    std::string view_id;
    // label code -> region name (engine, main_body, muffler, ...)
    std::map<std::uint8_t, std::string> region_names;

    void validate() const;
};

enum class ThermalMode { Ambient, Intermediate, Operating };

/// Per-region operating mode selection.
using OperationalModes = std::map<std::uint8_t, ThermalMode>;

/// Per-region variability rate lambda in [0, 1].
using ThermalState = std::map<std::uint8_t, double>;

/// Gaussian (or endpoint half-Gaussian) law for one mode. 3 sigma covers the
/// half-width of the mode's nominal lambda interval.
struct LambdaLaw {
    ThermalMode mode;
    double center;
    double sigma;
};

LambdaLaw lambda_law(ThermalMode mode);

/// Nominal lambda interval of a mode: [0,0.1], ]0.1,0.9[ or [0.9,1].
bool in_nominal_interval(ThermalMode mode, double lambda);

/// One lambda draw: half-Gaussian at the endpoints for ambient/operating,
/// Gaussian around 0.5 for intermediate; rejection-resampled into [0,1].
double sample_lambda(ThermalMode mode, Rng& rng);

/// Independent sample_lambda per region.
ThermalState draw_state(const OperationalModes& modes, Rng& rng);

/// TI(p) = (1 - lambda_R) * TA(p) + lambda_R * TF(p) for target pixels in
/// region R; non-target pixels are 0 (validity carried by the silhouette).
ImageBuffer mix(const ViewBundle& bundle, const ThermalState& state);

struct ExpandedSignature {
    ImageBuffer image;
    ThermalState state;
    std::size_t config_index = 0;
};

/// n_per_config mixed signatures per config; item i uses an independent
/// generator seeded with derive_seed(master_seed, i).
std::vector<ExpandedSignature> expand_database(
    const ViewBundle& bundle, const std::vector<OperationalModes>& configs,
    std::size_t n_per_config, std::uint64_t master_seed);

ThermalMode thermal_mode_from_string(const std::string& s);
std::string to_string(ThermalMode mode);

} // namespace irforge

#endif
