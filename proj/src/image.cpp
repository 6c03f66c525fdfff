#include "irforge/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace irforge {

std::size_t RegionMask::popcount() const {
    return static_cast<std::size_t>(
        std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

RegionMask LabelMap::silhouette() const {
    RegionMask m(width_, height_);
    for (std::size_t i = 0; i < labels_.size(); ++i)
        m.set_index(i, labels_[i] > 0);
    return m;
}

RegionMask LabelMap::region(std::uint8_t label) const {
    RegionMask m(width_, height_);
    for (std::size_t i = 0; i < labels_.size(); ++i)
        m.set_index(i, labels_[i] == label);
    return m;
}

std::vector<std::uint8_t> LabelMap::present_labels() const {
    bool seen[256] = {};
    for (std::uint8_t l : labels_) seen[l] = true;
    std::vector<std::uint8_t> out;
    for (int l = 1; l < 256; ++l)
        if (seen[l]) out.push_back(static_cast<std::uint8_t>(l));
    return out;
}

RegionStats region_stats(const ImageBuffer& img, const RegionMask& mask) {
    if (!mask.same_shape(img.width(), img.height()))
        throw DimensionMismatch("region_stats: mask/image dimensions differ");
    std::size_t n = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i) {
        if (mask.test(i)) {
            sum += img[i];
            ++n;
        }
    }
    if (n == 0) throw EmptyMask("region_stats: empty mask");
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i) {
        if (mask.test(i)) {
            const double d = img[i] - mean;
            ss += d * d;
        }
    }
    return {n, mean, std::sqrt(ss / static_cast<double>(n))};
}

RegionMask mask_ops(const RegionMask& a, const RegionMask& b, MaskOp op) {
    if (!a.same_shape(b.width(), b.height()))
        throw DimensionMismatch("mask_ops: dimensions differ");
    RegionMask out(a.width(), a.height());
    for (std::size_t i = 0; i < a.size(); ++i) {
        bool v = false;
        switch (op) {
            case MaskOp::And: v = a.test(i) && b.test(i); break;
            case MaskOp::Or: v = a.test(i) || b.test(i); break;
            case MaskOp::AndNot: v = a.test(i) && !b.test(i); break;
        }
        out.set_index(i, v);
    }
    return out;
}

RegionMask dilation_ring(const RegionMask& silhouette, int radius) {
    if (radius < 1) throw Error("dilation_ring: radius must be >= 1");
    const int w = silhouette.width();
    const int h = silhouette.height();

    // Disc offsets, Euclidean distance <= radius.
    std::vector<std::pair<int, int>> disc;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius) disc.emplace_back(dx, dy);

    RegionMask dil(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!silhouette.get(x, y)) continue;
            for (auto [dx, dy] : disc) {
                const int nx = x + dx;
                const int ny = y + dy;
                if (nx >= 0 && nx < w && ny >= 0 && ny < h) dil.set(nx, ny, true);
            }
        }
    }
    return mask_ops(dil, silhouette, MaskOp::AndNot);
}

void blit(ImageBuffer& dst, const ImageBuffer& src, const RegionMask& src_mask,
          int dx, int dy) {
    if (!src_mask.same_shape(src.width(), src.height()))
        throw DimensionMismatch("blit: mask/src dimensions differ");
    for (int y = 0; y < src.height(); ++y) {
        for (int x = 0; x < src.width(); ++x) {
            if (!src_mask.get(x, y)) continue;
            const int tx = x + dx;
            const int ty = y + dy;
            if (tx < 0 || tx >= dst.width() || ty < 0 || ty >= dst.height())
                throw OutOfFrame("blit: masked pixel lands outside destination");
        }
    }
    for (int y = 0; y < src.height(); ++y)
        for (int x = 0; x < src.width(); ++x)
            if (src_mask.get(x, y)) dst.at(x + dx, y + dy) = src.at(x, y);
}

RegionMask translate_mask(const RegionMask& mask, int dx, int dy,
                          int frame_w, int frame_h) {
    RegionMask out(frame_w, frame_h);
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.get(x, y)) continue;
            const int tx = x + dx;
            const int ty = y + dy;
            if (tx < 0 || tx >= frame_w || ty < 0 || ty >= frame_h)
                throw OutOfFrame("translate_mask: pixel outside frame");
            out.set(tx, ty, true);
        }
    }
    return out;
}

void apply_affine(ImageBuffer& img, const RegionMask& mask, double gain,
                  double offset) {
    if (!mask.same_shape(img.width(), img.height()))
        throw DimensionMismatch("apply_affine: mask/image dimensions differ");
    for (std::size_t i = 0; i < img.size(); ++i)
        if (mask.test(i)) img[i] = gain * img[i] + offset;
}

} // namespace irforge
