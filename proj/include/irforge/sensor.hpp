#ifndef IRFORGE_SENSOR_HPP
#define IRFORGE_SENSOR_HPP

#include <cstdint>
#include <vector>

#include "irforge/image.hpp"
#include "irforge/rng.hpp"

namespace irforge {

struct SensorModel {
    double blur_sigma = 0.0;  // pixels, Gaussian PSF realizing the MTF
    double noise_sigma = 0.0; // gray levels, additive white Gaussian
    int export_depth = 16;    // 8 or 16
    bool auto_range = true;   // export range from image extremes
    double range_min = 0.0;
    double range_max = 0.0;
};

/// Separable Gaussian blur, kernel truncated at +/-4 sigma and renormalized,
/// mirror boundaries. sigma 0 is the identity.
ImageBuffer apply_mtf(const ImageBuffer& img, const SensorModel& model);

/// Adds i.i.d. N(0, noise_sigma^2) per pixel.
ImageBuffer apply_noise(const ImageBuffer& img, const SensorModel& model,
                        Rng& rng);

struct QuantizedImage {
    int width = 0;
    int height = 0;
    int depth = 16;
    double range_min = 0.0;
    double range_max = 0.0;
    std::vector<std::uint16_t> values;
    std::size_t saturated_low = 0;
    std::size_t saturated_high = 0;
};

/// Linear map of the export range onto [0, 2^depth - 1], round-half-even,
/// clip outside; clip counts are reported.
QuantizedImage quantize(const ImageBuffer& img, const SensorModel& model);

/// Normalized 1D Gaussian tap weights as used by apply_mtf (for auditing).
std::vector<double> gaussian_kernel(double sigma);

} // namespace irforge

#endif
