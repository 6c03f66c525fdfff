#include "irforge/solver.hpp"

#include <algorithm>
#include <cmath>

namespace irforge {

AffineTransform solve_background(const RegionStats& stats_f,
                                 const SceneConstraints& c) {
    if (c.cal.nu_k <= 0.0)
        throw InvalidCalibration("solve_background: nu_k must be > 0");
    if (c.rss <= 0.0 || c.scr <= 0.0)
        throw Error("solve_background: RSS* and SCR* must be > 0");
    if (stats_f.stddev == 0.0)
        throw ZeroClutter("solve_background: flat background cannot reach a "
                          "finite SCR");
    const double sigma_goal = c.cal.nu_k * c.rss / c.scr;
    const double gain = sigma_goal / stats_f.stddev;
    double offset;
    if (c.mean_policy == MeanPolicy::Preserve)
        offset = stats_f.mean * (1.0 - gain);
    else
        offset = c.mean_target - gain * stats_f.mean;
    return {gain, offset};
}

AffineTransform solve_target(const RegionStats& stats_c, double mu_f1_after,
                             const SceneConstraints& c) {
    if (std::fabs(c.k) > 1.0)
        throw InfeasibleK("solve_target: |K*| > 1 has no real solution");
    const double nu_rss = c.cal.nu_k * c.rss;
    const double sigma_goal = nu_rss * std::sqrt(1.0 - c.k * c.k);
    const double mu_goal = mu_f1_after - c.k * nu_rss;
    double gain;
    if (sigma_goal == 0.0) {
        gain = 0.0; // target flattened to a constant
    } else {
        if (stats_c.stddev == 0.0)
            throw DegenerateTarget(
                "solve_target: flat signature cannot carry internal contrast");
        gain = sigma_goal / stats_c.stddev;
    }
    return {gain, mu_goal - gain * stats_c.mean};
}

namespace {

struct PixelList {
    std::vector<std::pair<int, int>> px;
    int w = 0;
    int h = 0;
};

PixelList pixel_list(const RegionMask& m) {
    PixelList out;
    out.w = m.width();
    out.h = m.height();
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x)
            if (m.get(x, y)) out.px.emplace_back(x, y);
    return out;
}

} // namespace

Placement place_occultant(const RegionMask& target_sil, int target_dx,
                          int target_dy, const RegionMask& occ_sil,
                          int frame_w, int frame_h, const SceneConstraints& c) {
    const RegionMask target_frame =
        translate_mask(target_sil, target_dx, target_dy, frame_w, frame_h);
    const std::size_t s_target = target_frame.popcount();
    if (s_target == 0) throw EmptyTarget("place_occultant: empty target");

    const PixelList occ = pixel_list(occ_sil);
    if (occ.px.empty()) throw Error("place_occultant: empty occultant");

    const int max_ox = frame_w - occ.w;
    const int max_oy = frame_h - occ.h;
    if (max_ox < 0 || max_oy < 0)
        throw Unachievable("place_occultant: occultant larger than frame");

    auto overlap_frac = [&](int ox, int oy) {
        std::size_t n = 0;
        for (auto [x, y] : occ.px)
            if (target_frame.get(x + ox, y + oy)) ++n;
        return static_cast<double>(n) / static_cast<double>(s_target);
    };

    bool found = false;
    int best_ox = 0, best_oy = 0;
    double best_rx = 0.0;
    auto consider = [&](int ox, int oy) {
        const double rx = overlap_frac(ox, oy);
        if (std::fabs(rx - c.rx) > kRxTolerance) return;
        if (!found || ox < best_ox || (ox == best_ox && oy < best_oy)) {
            found = true;
            best_ox = ox;
            best_oy = oy;
            best_rx = rx;
        }
    };

    // Coarse grid, then exhaustive refinement around each in-tolerance cell.
    const int stride = std::max(1, occ.w / 32);
    if (stride > 1) {
        for (int oy = 0; oy <= max_oy; oy += stride)
            for (int ox = 0; ox <= max_ox; ox += stride) consider(ox, oy);
        if (found) {
            const int cx = best_ox, cy = best_oy;
            found = false;
            for (int oy = std::max(0, cy - stride);
                 oy <= std::min(max_oy, cy + stride); ++oy)
                for (int ox = std::max(0, cx - stride);
                     ox <= std::min(max_ox, cx + stride); ++ox)
                    consider(ox, oy);
        }
    }
    if (!found) {
        // full scan; overlap is not monotone for concave silhouettes
        for (int oy = 0; oy <= max_oy; ++oy)
            for (int ox = 0; ox <= max_ox; ++ox) consider(ox, oy);
    }
    if (!found)
        throw Unachievable("place_occultant: no in-frame placement reaches "
                           "the requested occultation ratio");
    return {target_dx, target_dy, best_ox, best_oy, best_rx, true};
}

FeasibilityReport check_feasibility(const SceneConstraints& c,
                                    const FeasibilityInputs& in) {
    FeasibilityReport r;
    if (c.cal.nu_k <= 0.0)
        r.issues.push_back("InvalidCalibration: nu_k must be > 0");
    if (c.rss <= 0.0) r.issues.push_back("InvalidConstraint: RSS* must be > 0");
    if (c.scr <= 0.0) r.issues.push_back("InvalidConstraint: SCR* must be > 0");
    if (std::fabs(c.k) > 1.0)
        r.issues.push_back("InfeasibleK: |K*| > 1 makes the target stddev "
                           "goal imaginary");
    if (c.rx < 0.0 || c.rx > 1.0)
        r.issues.push_back("InvalidConstraint: R_x* must lie in [0, 1]");
    if (c.rx > kRxTolerance && !in.has_occultant)
        r.issues.push_back("Unachievable: R_x* > 0 requested without an "
                           "occultant");
    if (in.stats_f && in.stats_f->stddev == 0.0)
        r.issues.push_back("ZeroClutter: flat background, SCR unattainable");
    if (in.stats_c && in.stats_c->stddev == 0.0 && std::fabs(c.k) < 1.0 &&
        c.rss > 0.0)
        r.issues.push_back("DegenerateTarget: flat signature cannot carry "
                           "internal contrast (|K*| < 1)");
    if (in.frame_w > 0 &&
        (in.target_w > in.frame_w || in.target_h > in.frame_h))
        r.issues.push_back("TargetTooLarge: silhouette exceeds frame");
    if (in.export_min && in.export_max && c.cal.nu_k > 0.0 &&
        std::fabs(c.k) <= 1.0 && in.stats_f && in.stats_f->stddev > 0.0) {
        // predicted extremes: background mean +/- 4 sigma' and target mean
        const double sigma_f = c.cal.nu_k * c.rss / c.scr;
        double mu_f = c.mean_policy == MeanPolicy::Preserve ? in.stats_f->mean
                                                            : c.mean_target;
        const double nu_rss = c.cal.nu_k * c.rss;
        const double lo = std::min(mu_f - 4.0 * sigma_f, mu_f - nu_rss);
        const double hi = std::max(mu_f + 4.0 * sigma_f, mu_f + nu_rss);
        if (lo < *in.export_min || hi > *in.export_max)
            r.issues.push_back("ExportRange: predicted gray levels fall "
                               "outside the export range");
    }
    return r;
}

} // namespace irforge
