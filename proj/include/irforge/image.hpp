#ifndef IRFORGE_IMAGE_HPP
#define IRFORGE_IMAGE_HPP

#include <cstdint>
#include <vector>

#include "irforge/errors.hpp"

namespace irforge {

/// Single-channel radiometric raster, row-major doubles (gray levels).
class ImageBuffer {
public:
    ImageBuffer() = default;
    ImageBuffer(int width, int height, double fill = 0.0)
        : width_(width), height_(height),
          data_(static_cast<std::size_t>(width) * height, fill) {}

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }

    double& at(int x, int y) { return data_[idx(x, y)]; }
    double at(int x, int y) const { return data_[idx(x, y)]; }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool same_shape(int w, int h) const { return width_ == w && height_ == h; }

private:
    std::size_t idx(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

/// Binary per-pixel mask, same geometry conventions as ImageBuffer.
class RegionMask {
public:
    RegionMask() = default;
    RegionMask(int width, int height, bool fill = false)
        : width_(width), height_(height),
          bits_(static_cast<std::size_t>(width) * height, fill ? 1 : 0) {}

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return bits_.size(); }

    bool get(int x, int y) const { return bits_[idx(x, y)] != 0; }
    void set(int x, int y, bool v) { bits_[idx(x, y)] = v ? 1 : 0; }
    bool test(std::size_t i) const { return bits_[i] != 0; }
    void set_index(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }

    std::size_t popcount() const;
    bool empty() const { return popcount() == 0; }

    const std::vector<std::uint8_t>& bits() const { return bits_; }
    std::vector<std::uint8_t>& bits() { return bits_; }

    bool same_shape(int w, int h) const { return width_ == w && height_ == h; }

    bool operator==(const RegionMask& o) const {
        return width_ == o.width_ && height_ == o.height_ && bits_ == o.bits_;
    }

private:
    std::size_t idx(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// Small-integer label raster; 0 means non-target, 1..R are thermal regions.
class LabelMap {
public:
    LabelMap() = default;
    LabelMap(int width, int height, std::uint8_t fill = 0)
        : width_(width), height_(height),
          labels_(static_cast<std::size_t>(width) * height, fill) {}

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return labels_.size(); }

    std::uint8_t get(int x, int y) const { return labels_[idx(x, y)]; }
    void set(int x, int y, std::uint8_t v) { labels_[idx(x, y)] = v; }
    std::uint8_t label(std::size_t i) const { return labels_[i]; }

    const std::vector<std::uint8_t>& labels() const { return labels_; }
    std::vector<std::uint8_t>& labels() { return labels_; }

    /// Pixels with label > 0.
    RegionMask silhouette() const;
    /// Pixels carrying exactly this label.
    RegionMask region(std::uint8_t label) const;
    /// Sorted distinct nonzero labels present.
    std::vector<std::uint8_t> present_labels() const;

private:
    std::size_t idx(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> labels_;
};

/// Surface, mean and population standard deviation of a masked area.
struct RegionStats {
    std::size_t surface = 0;
    double mean = 0.0;
    double stddev = 0.0;
};

RegionStats region_stats(const ImageBuffer& img, const RegionMask& mask);

enum class MaskOp { And, Or, AndNot };

RegionMask mask_ops(const RegionMask& a, const RegionMask& b, MaskOp op);

/// Euclidean-disc dilation of the silhouette minus the silhouette itself.
RegionMask dilation_ring(const RegionMask& silhouette, int radius);

/// Copies src pixels under src_mask into dst at (dx, dy); every masked pixel
/// must land inside dst.
void blit(ImageBuffer& dst, const ImageBuffer& src, const RegionMask& src_mask,
          int dx, int dy);

/// Translates a mask into a frame-sized mask; all true pixels must stay in frame.
RegionMask translate_mask(const RegionMask& mask, int dx, int dy,
                          int frame_w, int frame_h);

/// img(p) <- gain * img(p) + offset for every pixel under the mask.
void apply_affine(ImageBuffer& img, const RegionMask& mask, double gain,
                  double offset);

} // namespace irforge

#endif
