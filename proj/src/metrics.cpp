#include "irforge/metrics.hpp"

#include <cmath>

namespace irforge {

double compute_rss(const RegionStats& stats_c, const RegionStats& stats_f1,
                   const Calibration& cal) {
    if (cal.nu_k <= 0.0)
        throw InvalidCalibration("compute_rss: nu_k must be > 0");
    const double dmu = stats_c.mean - stats_f1.mean;
    return std::sqrt(dmu * dmu + stats_c.stddev * stats_c.stddev) / cal.nu_k;
}

double compute_qd(double rss, std::size_t surface_c) {
    return rss * static_cast<double>(surface_c);
}

double compute_scr(double rss, const RegionStats& stats_f,
                   const Calibration& cal) {
    if (cal.nu_k <= 0.0)
        throw InvalidCalibration("compute_scr: nu_k must be > 0");
    if (stats_f.stddev == 0.0)
        throw ZeroClutter("compute_scr: flat background, SCR undefined");
    return cal.nu_k * rss / stats_f.stddev;
}

double compute_rx(const RegionMask& full_silhouette, const RegionMask& visible) {
    if (!full_silhouette.same_shape(visible.width(), visible.height()))
        throw DimensionMismatch("compute_rx: mask dimensions differ");
    const std::size_t s_full = full_silhouette.popcount();
    if (s_full == 0) throw EmptyTarget("compute_rx: empty full silhouette");
    std::size_t s_vis = 0;
    for (std::size_t i = 0; i < visible.size(); ++i) {
        if (visible.test(i)) {
            if (!full_silhouette.test(i))
                throw VisibilityNotSubset(
                    "compute_rx: visible pixel outside full silhouette");
            ++s_vis;
        }
    }
    return 1.0 - static_cast<double>(s_vis) / static_cast<double>(s_full);
}

double compute_k(const RegionStats& stats_c, const RegionStats& stats_f1,
                 double rss, const Calibration& cal) {
    if (cal.nu_k <= 0.0)
        throw InvalidCalibration("compute_k: nu_k must be > 0");
    if (rss <= 0.0) throw ZeroContrast("compute_k: RSS is zero");
    return (stats_f1.mean - stats_c.mean) / (cal.nu_k * rss);
}

void validate_layout(const SceneLayout& layout) {
    const int w = layout.frame_width;
    const int h = layout.frame_height;
    const RegionMask* masks[] = {&layout.target_visible, &layout.target_full,
                                 &layout.local_background,
                                 &layout.remaining_background,
                                 &layout.occultant};
    for (const RegionMask* m : masks)
        if (!m->same_shape(w, h))
            throw LayoutInconsistent("layout: mask does not match frame");
    for (std::size_t i = 0; i < layout.target_visible.size(); ++i) {
        if (layout.target_visible.test(i) && !layout.target_full.test(i))
            throw LayoutInconsistent("layout: visible target not inside full");
        if (layout.target_visible.test(i) && layout.occultant.test(i))
            throw LayoutInconsistent("layout: visible target under occultant");
        if (layout.local_background.test(i) &&
            (layout.target_full.test(i) || layout.occultant.test(i)))
            throw LayoutInconsistent("layout: F1 overlaps target or occultant");
        if (layout.remaining_background.test(i) &&
            (layout.target_full.test(i) || layout.occultant.test(i) ||
             layout.local_background.test(i)))
            throw LayoutInconsistent("layout: F2 overlaps another area");
    }
}

MetricSet measure_scene(const ImageBuffer& img, const SceneLayout& layout,
                        const Calibration& cal) {
    validate_layout(layout);
    if (layout.target_visible.popcount() == 0)
        throw EmptyTarget("measure_scene: target fully occluded");

    const RegionStats stats_c = region_stats(img, layout.target_visible);
    const RegionStats stats_f1 = region_stats(img, layout.local_background);
    const RegionMask f = mask_ops(layout.local_background,
                                  layout.remaining_background, MaskOp::Or);
    const RegionStats stats_f = region_stats(img, f);

    MetricSet m;
    m.rss = compute_rss(stats_c, stats_f1, cal);
    m.qd = compute_qd(m.rss, stats_c.surface);
    m.scr = compute_scr(m.rss, stats_f, cal);
    m.rx = compute_rx(layout.target_full, layout.target_visible);
    m.k = m.rss > 0.0 ? compute_k(stats_c, stats_f1, m.rss, cal) : 0.0;
    m.delta_mu = stats_f1.mean - stats_c.mean;
    return m;
}

} // namespace irforge
