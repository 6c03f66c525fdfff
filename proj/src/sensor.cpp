#include "irforge/sensor.hpp"

#include <algorithm>
#include <cmath>

namespace irforge {

std::vector<double> gaussian_kernel(double sigma) {
    if (sigma <= 0.0) return {1.0};
    const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += k[i + radius];
    }
    for (double& v : k) v /= sum;
    return k;
}

namespace {

// half-sample symmetric reflection: ..., x1, x0 | x0, x1, ...
// This boundary keeps symmetric unit-sum kernels exactly sum-preserving.
int reflect(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * n;
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - 1 - i;
}

} // namespace

ImageBuffer apply_mtf(const ImageBuffer& img, const SensorModel& model) {
    if (model.blur_sigma <= 0.0) return img;
    const std::vector<double> k = gaussian_kernel(model.blur_sigma);
    const int radius = static_cast<int>(k.size() / 2);
    const int w = img.width();
    const int h = img.height();

    ImageBuffer tmp(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t)
                acc += k[t + radius] * img.at(reflect(x + t, w), y);
            tmp.at(x, y) = acc;
        }
    }
    ImageBuffer out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t)
                acc += k[t + radius] * tmp.at(x, reflect(y + t, h));
            out.at(x, y) = acc;
        }
    }
    return out;
}

ImageBuffer apply_noise(const ImageBuffer& img, const SensorModel& model,
                        Rng& rng) {
    if (model.noise_sigma == 0.0) return img;
    ImageBuffer out = img;
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] += rng.normal(0.0, model.noise_sigma);
    return out;
}

QuantizedImage quantize(const ImageBuffer& img, const SensorModel& model) {
    if (model.export_depth != 8 && model.export_depth != 16)
        throw Error("quantize: export depth must be 8 or 16");
    QuantizedImage q;
    q.width = img.width();
    q.height = img.height();
    q.depth = model.export_depth;
    if (model.auto_range) {
        double lo = img.size() ? img[0] : 0.0;
        double hi = lo;
        for (std::size_t i = 0; i < img.size(); ++i) {
            lo = std::min(lo, img[i]);
            hi = std::max(hi, img[i]);
        }
        if (hi <= lo) hi = lo + 1.0;
        q.range_min = lo;
        q.range_max = hi;
    } else {
        if (model.range_max <= model.range_min)
            throw Error("quantize: export range max must exceed min");
        q.range_min = model.range_min;
        q.range_max = model.range_max;
    }
    const double top = static_cast<double>((1u << q.depth) - 1u);
    const double scale = top / (q.range_max - q.range_min);
    q.values.resize(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double v = img[i];
        if (v < q.range_min) {
            q.values[i] = 0;
            ++q.saturated_low;
            continue;
        }
        if (v > q.range_max) {
            q.values[i] = static_cast<std::uint16_t>(top);
            ++q.saturated_high;
            continue;
        }
        // round half to even
        const double scaled = (v - q.range_min) * scale;
        double r = std::nearbyint(scaled);
        if (std::fabs(scaled - std::floor(scaled) - 0.5) == 0.0) {
            const double fl = std::floor(scaled);
            r = (static_cast<long long>(fl) % 2 == 0) ? fl : fl + 1.0;
        }
        q.values[i] = static_cast<std::uint16_t>(std::min(r, top));
    }
    return q;
}

} // namespace irforge
