#ifndef IRFORGE_METRICS_HPP
#define IRFORGE_METRICS_HPP

#include "irforge/image.hpp"

namespace irforge {

/// Gray levels per Kelvin.
struct Calibration {
    double nu_k = 1.0;
};

/// Scene area decomposition: visible target C, full target silhouette,
/// local background band F1, remaining background F2, occultant.
struct SceneLayout {
    RegionMask target_visible;
    RegionMask target_full;
    RegionMask local_background;     // F1
    RegionMask remaining_background; // F2
    RegionMask occultant;
    int frame_width = 0;
    int frame_height = 0;
};

struct MetricSet {
    double rss = 0.0;      // Kelvin
    double qd = 0.0;       // Kelvin * pixels
    double scr = 0.0;      // dimensionless
    double rx = 0.0;       // dimensionless, [0, 1]
    double k = 0.0;        // dimensionless, [-1, 1]
    double delta_mu = 0.0; // mu_F1 - mu_C, gray levels (diagnostic)
};

/// RSS = (1/nu_k) * sqrt((mu_C - mu_F1)^2 + sigma_C^2).
double compute_rss(const RegionStats& stats_c, const RegionStats& stats_f1,
                   const Calibration& cal);

/// Q_D = RSS * S_C.
double compute_qd(double rss, std::size_t surface_c);

/// SCR = nu_k * RSS / sigma_F.
double compute_scr(double rss, const RegionStats& stats_f,
                   const Calibration& cal);

/// R_x = 1 - S_visible / S_full.
double compute_rx(const RegionMask& full_silhouette, const RegionMask& visible);

/// K = (mu_F1 - mu_C) / (nu_k * RSS).
double compute_k(const RegionStats& stats_c, const RegionStats& stats_f1,
                 double rss, const Calibration& cal);

/// All five metrics over the layout areas; statistics use the visible target.
MetricSet measure_scene(const ImageBuffer& img, const SceneLayout& layout,
                        const Calibration& cal);

void validate_layout(const SceneLayout& layout);

} // namespace irforge

#endif
