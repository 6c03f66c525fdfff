#ifndef IRFORGE_IO_HPP
#define IRFORGE_IO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "irforge/image.hpp"
#include "irforge/sensor.hpp"
#include "irforge/thermal.hpp"

namespace irforge::io {

/// Integer grayscale raster as stored on disk (PNG/PGM, 8 or 16 bit).
struct GrayImage {
    int width = 0;
    int height = 0;
    int depth = 8; // bits per sample
    std::vector<std::uint16_t> values;
};

GrayImage read_gray(const std::filesystem::path& path);
void write_gray(const std::filesystem::path& path, const GrayImage& img);

void write_quantized(const std::filesystem::path& path,
                     const QuantizedImage& q);

/// Gray levels map linearly (identity) onto the double-precision buffer.
ImageBuffer to_image(const GrayImage& g);

/// Nonzero samples are true.
RegionMask to_mask(const GrayImage& g);
LabelMap to_labels(const GrayImage& g);

void write_mask(const std::filesystem::path& path, const RegionMask& mask);
void write_labels(const std::filesystem::path& path, const LabelMap& labels);

/// Raw float format: 16-byte header (magic "IRF1", u32 width, u32 height,
/// u32 reserved, little-endian), then row-major little-endian f64.
ImageBuffer read_irf(const std::filesystem::path& path);
void write_irf(const std::filesystem::path& path, const ImageBuffer& img);

/// Bundle directory: ta.png, tf.png (16-bit), regions.png (8-bit codes),
/// regions.json mapping codes to region names.
ViewBundle load_bundle(const std::filesystem::path& dir);
void save_bundle(const std::filesystem::path& dir, const ViewBundle& bundle);

} // namespace irforge::io

#endif
