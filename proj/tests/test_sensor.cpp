#include <doctest.h>

#include "irforge/sensor.hpp"
#include "testutil.hpp"

using namespace irforge;
namespace tu = irforge::testutil;

TEST_CASE("apply_mtf identity and DC preservation") {
    Rng rng(1);
    ImageBuffer img = tu::random_image(32, 32, rng);
    SensorModel m;
    m.blur_sigma = 0.0;
    CHECK(apply_mtf(img, m).data() == img.data());

    m.blur_sigma = 2.0;
    ImageBuffer flat(32, 32, 42.0);
    const ImageBuffer out = apply_mtf(flat, m);
    for (std::size_t i = 0; i < out.size(); ++i)
        CHECK(out[i] == doctest::Approx(42.0).epsilon(1e-12));
}

TEST_CASE("impulse response equals the analytic separable kernel") {
    const double sigma = 1.5;
    SensorModel m;
    m.blur_sigma = sigma;
    const int n = 33, c = 16;
    ImageBuffer impulse(n, n, 0.0);
    impulse.at(c, c) = 1.0;
    const ImageBuffer out = apply_mtf(impulse, m);
    const std::vector<double> k = gaussian_kernel(sigma);
    const int radius = static_cast<int>(k.size() / 2);
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            double expected = 0.0;
            if (std::abs(x - c) <= radius && std::abs(y - c) <= radius)
                expected = k[x - c + radius] * k[y - c + radius];
            CHECK(std::fabs(out.at(x, y) - expected) < 1e-6);
        }
    }
}

TEST_CASE("blur preserves the mean and shrinks the range") {
    Rng rng(11);
    ImageBuffer img = tu::random_image(64, 64, rng);
    SensorModel m;
    m.blur_sigma = 1.3;
    const ImageBuffer out = apply_mtf(img, m);

    RegionMask all(64, 64, true);
    const RegionStats before = region_stats(img, all);
    const RegionStats after = region_stats(out, all);
    CHECK(tu::rel_err(after.mean, before.mean) < 1e-9);

    double in_min = img[0], in_max = img[0], out_min = out[0], out_max = out[0];
    for (std::size_t i = 0; i < img.size(); ++i) {
        in_min = std::min(in_min, img[i]);
        in_max = std::max(in_max, img[i]);
        out_min = std::min(out_min, out[i]);
        out_max = std::max(out_max, out[i]);
    }
    CHECK(out_min >= in_min - 1e-12);
    CHECK(out_max <= in_max + 1e-12);
}

TEST_CASE("apply_noise statistics and determinism") {
    SensorModel m;
    SUBCASE("sigma 0 is identity") {
        Rng rng(5);
        ImageBuffer img = tu::random_image(16, 16, rng);
        m.noise_sigma = 0.0;
        Rng nrng(1);
        CHECK(apply_noise(img, m, nrng).data() == img.data());
    }
    SUBCASE("flat-field std concentrates at sigma_n") {
        m.noise_sigma = 2.0;
        ImageBuffer flat(512, 512, 100.0);
        Rng nrng(77);
        const ImageBuffer out = apply_noise(flat, m, nrng);
        RegionMask all(512, 512, true);
        const RegionStats s = region_stats(out, all);
        CHECK(s.stddev > 1.98);
        CHECK(s.stddev < 2.02);
        // mean-zero: shift bounded by 4 sigma / sqrt(N)
        CHECK(std::fabs(s.mean - 100.0) <= 4.0 * 2.0 / std::sqrt(512.0 * 512.0));
    }
    SUBCASE("same seed, same field") {
        m.noise_sigma = 1.0;
        ImageBuffer flat(32, 32, 0.0);
        Rng r1(9), r2(9);
        CHECK(apply_noise(flat, m, r1).data() ==
              apply_noise(flat, m, r2).data());
    }
}

TEST_CASE("quantize endpoints, clipping and round-trip") {
    SensorModel m;
    m.export_depth = 8;
    m.auto_range = false;
    m.range_min = 10.0;
    m.range_max = 20.0;

    ImageBuffer img(4, 1, 0.0);
    img[0] = 10.0;
    img[1] = 20.0;
    img[2] = 5.0;   // below range
    img[3] = 15.0;  // mid
    const QuantizedImage q = quantize(img, m);
    CHECK(q.values[0] == 0);
    CHECK(q.values[1] == 255);
    CHECK(q.values[2] == 0);
    CHECK(q.saturated_low == 1);
    CHECK(q.saturated_high == 0);
    // mid-range: (15-10)/10*255 = 127.5 -> round half even = 128
    CHECK(q.values[3] == 128);

    SUBCASE("dequantized values within half a step of clipped input") {
        Rng rng(13);
        ImageBuffer r = tu::random_image(32, 32, rng, 0.0, 30.0);
        SensorModel m16 = m;
        m16.export_depth = 16;
        const QuantizedImage q16 = quantize(r, m16);
        const double step = (m.range_max - m.range_min) / 65535.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double clipped = std::clamp(r[i], m.range_min, m.range_max);
            const double deq =
                m.range_min + q16.values[i] * step;
            CHECK(std::fabs(deq - clipped) <= step / 2.0 + 1e-12);
        }
    }
}

TEST_CASE("quantize auto range uses the image extremes") {
    ImageBuffer img(2, 1, 0.0);
    img[0] = -5.0;
    img[1] = 3.0;
    SensorModel m;
    m.export_depth = 16;
    const QuantizedImage q = quantize(img, m);
    CHECK(q.range_min == doctest::Approx(-5.0));
    CHECK(q.range_max == doctest::Approx(3.0));
    CHECK(q.values[0] == 0);
    CHECK(q.values[1] == 65535);
}
