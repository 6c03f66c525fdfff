#ifndef IRFORGE_SOLVER_HPP
#define IRFORGE_SOLVER_HPP

#include <optional>
#include <string>
#include <vector>

#include "irforge/metrics.hpp"

namespace irforge {

enum class MeanPolicy { Preserve, SetTo };

/// Requested image-quality constraints for one scene.
struct SceneConstraints {
    double rss = 1.0; // Kelvin, > 0
    double scr = 1.0; // > 0
    double k = 0.0;   // [-1, 1]
    double rx = 0.0;  // [0, 1]
    Calibration cal;
    MeanPolicy mean_policy = MeanPolicy::Preserve;
    double mean_target = 0.0; // used when mean_policy == SetTo
};

struct AffineTransform {
    double gain = 1.0;
    double offset = 0.0;
    double apply(double v) const { return gain * v + offset; }
};

struct Placement {
    int target_dx = 0;
    int target_dy = 0;
    int occ_dx = 0;
    int occ_dy = 0;
    double achieved_rx = 0.0;
    bool has_occultant = false;
};

inline constexpr double kRxTolerance = 0.02;

/// Gain/offset making the background clutter sigma_F equal nu_k*RSS*/SCR*.
AffineTransform solve_background(const RegionStats& stats_f,
                                 const SceneConstraints& c);

/// Gain/offset placing the target's mean and stddev so that the measured
/// RSS and K equal the request, given the transformed F1 mean.
AffineTransform solve_target(const RegionStats& stats_c, double mu_f1_after,
                             const SceneConstraints& c);

/// Scans occultant offsets around an already placed target silhouette for an
/// overlap fraction within kRxTolerance of the requested R_x. Deterministic:
/// candidates tie-break lexicographically by (ox, oy).
Placement place_occultant(const RegionMask& target_sil, int target_dx,
                          int target_dy, const RegionMask& occ_sil,
                          int frame_w, int frame_h, const SceneConstraints& c);

struct FeasibilityReport {
    std::vector<std::string> issues;
    bool ok() const { return issues.empty(); }
};

struct FeasibilityInputs {
    std::optional<RegionStats> stats_f;
    std::optional<RegionStats> stats_c;
    int frame_w = 0;
    int frame_h = 0;
    int target_w = 0;
    int target_h = 0;
    bool has_occultant = false;
    // predicted export range check
    std::optional<double> export_min;
    std::optional<double> export_max;
};

FeasibilityReport check_feasibility(const SceneConstraints& c,
                                    const FeasibilityInputs& in);

} // namespace irforge

#endif
