#include "irforge/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <png.h>

#include <nlohmann/json.hpp>

namespace irforge::io {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

GrayImage read_png(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) throw AssetError("cannot open " + path.string());
    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw AssetError("PNG decode failed: " + path.string());
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    const int depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color & PNG_COLOR_MASK_COLOR) png_set_rgb_to_gray(png, 1, -1, -1);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (depth == 16) png_set_swap(png); // stored big-endian
    png_read_update_info(png, info);

    GrayImage g;
    g.width = static_cast<int>(png_get_image_width(png, info));
    g.height = static_cast<int>(png_get_image_height(png, info));
    g.depth = png_get_bit_depth(png, info);
    g.values.resize(static_cast<std::size_t>(g.width) * g.height);

    std::vector<std::uint8_t> row(png_get_rowbytes(png, info));
    for (int y = 0; y < g.height; ++y) {
        png_read_row(png, row.data(), nullptr);
        if (g.depth == 16) {
            std::uint16_t* src = reinterpret_cast<std::uint16_t*>(row.data());
            for (int x = 0; x < g.width; ++x)
                g.values[static_cast<std::size_t>(y) * g.width + x] = src[x];
        } else {
            for (int x = 0; x < g.width; ++x)
                g.values[static_cast<std::size_t>(y) * g.width + x] = row[x];
        }
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return g;
}

void write_png(const std::filesystem::path& path, const GrayImage& g) {
    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) throw AssetError("cannot create " + path.string());
    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw AssetError("PNG encode failed: " + path.string());
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, g.width, g.height, g.depth, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (g.depth == 16) png_set_swap(png);

    if (g.depth == 16) {
        std::vector<std::uint16_t> row(g.width);
        for (int y = 0; y < g.height; ++y) {
            std::copy_n(g.values.begin() + static_cast<std::size_t>(y) * g.width,
                        g.width, row.begin());
            png_write_row(png, reinterpret_cast<png_bytep>(row.data()));
        }
    } else {
        std::vector<std::uint8_t> row(g.width);
        for (int y = 0; y < g.height; ++y) {
            for (int x = 0; x < g.width; ++x)
                row[x] = static_cast<std::uint8_t>(
                    g.values[static_cast<std::size_t>(y) * g.width + x]);
            png_write_row(png, row.data());
        }
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

GrayImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw AssetError("cannot open " + path.string());
    std::string magic;
    in >> magic;
    if (magic != "P5") throw AssetError("not a binary PGM: " + path.string());
    auto next_token = [&]() {
        std::string tok;
        while (in >> tok) {
            if (tok[0] == '#') {
                std::string rest;
                std::getline(in, rest);
                continue;
            }
            return tok;
        }
        throw AssetError("truncated PGM header: " + path.string());
    };
    GrayImage g;
    g.width = std::stoi(next_token());
    g.height = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    g.depth = maxval > 255 ? 16 : 8;
    in.get(); // single whitespace after maxval
    const std::size_t n = static_cast<std::size_t>(g.width) * g.height;
    g.values.resize(n);
    if (g.depth == 16) {
        std::vector<std::uint8_t> raw(n * 2);
        in.read(reinterpret_cast<char*>(raw.data()), raw.size());
        for (std::size_t i = 0; i < n; ++i)
            g.values[i] = static_cast<std::uint16_t>((raw[2 * i] << 8) |
                                                     raw[2 * i + 1]);
    } else {
        std::vector<std::uint8_t> raw(n);
        in.read(reinterpret_cast<char*>(raw.data()), raw.size());
        for (std::size_t i = 0; i < n; ++i) g.values[i] = raw[i];
    }
    if (!in) throw AssetError("truncated PGM data: " + path.string());
    return g;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& g) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw AssetError("cannot create " + path.string());
    const int maxval = g.depth == 16 ? 65535 : 255;
    out << "P5\n" << g.width << " " << g.height << "\n" << maxval << "\n";
    const std::size_t n = static_cast<std::size_t>(g.width) * g.height;
    if (g.depth == 16) {
        std::vector<std::uint8_t> raw(n * 2);
        for (std::size_t i = 0; i < n; ++i) {
            raw[2 * i] = static_cast<std::uint8_t>(g.values[i] >> 8);
            raw[2 * i + 1] = static_cast<std::uint8_t>(g.values[i] & 0xff);
        }
        out.write(reinterpret_cast<const char*>(raw.data()), raw.size());
    } else {
        std::vector<std::uint8_t> raw(n);
        for (std::size_t i = 0; i < n; ++i)
            raw[i] = static_cast<std::uint8_t>(g.values[i]);
        out.write(reinterpret_cast<const char*>(raw.data()), raw.size());
    }
}

bool has_ext(const std::filesystem::path& p, const char* ext) {
    std::string e = p.extension().string();
    std::transform(e.begin(), e.end(), e.begin(), ::tolower);
    return e == ext;
}

} // namespace

GrayImage read_gray(const std::filesystem::path& path) {
    if (has_ext(path, ".png")) return read_png(path);
    if (has_ext(path, ".pgm")) return read_pgm(path);
    throw AssetError("unsupported image format: " + path.string());
}

void write_gray(const std::filesystem::path& path, const GrayImage& img) {
    if (has_ext(path, ".png")) return write_png(path, img);
    if (has_ext(path, ".pgm")) return write_pgm(path, img);
    throw AssetError("unsupported image format: " + path.string());
}

void write_quantized(const std::filesystem::path& path,
                     const QuantizedImage& q) {
    GrayImage g;
    g.width = q.width;
    g.height = q.height;
    g.depth = q.depth;
    g.values = q.values;
    write_gray(path, g);
}

ImageBuffer to_image(const GrayImage& g) {
    ImageBuffer img(g.width, g.height);
    for (std::size_t i = 0; i < g.values.size(); ++i)
        img[i] = static_cast<double>(g.values[i]);
    return img;
}

RegionMask to_mask(const GrayImage& g) {
    RegionMask m(g.width, g.height);
    for (std::size_t i = 0; i < g.values.size(); ++i)
        m.set_index(i, g.values[i] != 0);
    return m;
}

LabelMap to_labels(const GrayImage& g) {
    LabelMap l(g.width, g.height);
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        if (g.values[i] > 255)
            throw AssetError("label map sample exceeds 8-bit code range");
        l.labels()[i] = static_cast<std::uint8_t>(g.values[i]);
    }
    return l;
}

void write_mask(const std::filesystem::path& path, const RegionMask& mask) {
    GrayImage g;
    g.width = mask.width();
    g.height = mask.height();
    g.depth = 8;
    g.values.resize(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i)
        g.values[i] = mask.test(i) ? 255 : 0;
    write_gray(path, g);
}

void write_labels(const std::filesystem::path& path, const LabelMap& labels) {
    GrayImage g;
    g.width = labels.width();
    g.height = labels.height();
    g.depth = 8;
    g.values.assign(labels.labels().begin(), labels.labels().end());
    write_gray(path, g);
}

ImageBuffer read_irf(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw AssetError("cannot open " + path.string());
    char magic[4];
    std::uint32_t w = 0, h = 0, reserved = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&w), 4);
    in.read(reinterpret_cast<char*>(&h), 4);
    in.read(reinterpret_cast<char*>(&reserved), 4);
    if (!in || std::memcmp(magic, "IRF1", 4) != 0)
        throw AssetError("bad IRF1 header: " + path.string());
    ImageBuffer img(static_cast<int>(w), static_cast<int>(h));
    in.read(reinterpret_cast<char*>(img.data().data()),
            static_cast<std::streamsize>(img.size() * sizeof(double)));
    if (!in) throw AssetError("truncated IRF1 data: " + path.string());
    return img;
}

void write_irf(const std::filesystem::path& path, const ImageBuffer& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw AssetError("cannot create " + path.string());
    const std::uint32_t w = static_cast<std::uint32_t>(img.width());
    const std::uint32_t h = static_cast<std::uint32_t>(img.height());
    const std::uint32_t reserved = 0;
    out.write("IRF1", 4);
    out.write(reinterpret_cast<const char*>(&w), 4);
    out.write(reinterpret_cast<const char*>(&h), 4);
    out.write(reinterpret_cast<const char*>(&reserved), 4);
    out.write(reinterpret_cast<const char*>(img.data().data()),
              static_cast<std::streamsize>(img.size() * sizeof(double)));
}

ViewBundle load_bundle(const std::filesystem::path& dir) {
    const auto ta_path = dir / "ta.png";
    const auto tf_path = dir / "tf.png";
    const auto regions_path = dir / "regions.png";
    const auto table_path = dir / "regions.json";
    for (const auto& p : {ta_path, tf_path, regions_path, table_path})
        if (!std::filesystem::exists(p))
            throw AssetError("bundle missing " + p.string());

    ViewBundle b;
    b.ta = to_image(read_gray(ta_path));
    b.tf = to_image(read_gray(tf_path));
    b.regions = to_labels(read_gray(regions_path));

    std::ifstream in(table_path);
    nlohmann::json j;
    in >> j;
    if (j.contains("view_id")) b.view_id = j["view_id"].get<std::string>();
    for (auto& [key, val] : j.at("labels").items())
        b.region_names[static_cast<std::uint8_t>(std::stoi(key))] =
            val.get<std::string>();
    b.validate();
    return b;
}

void save_bundle(const std::filesystem::path& dir, const ViewBundle& bundle) {
    std::filesystem::create_directories(dir);
    auto to_gray16 = [](const ImageBuffer& img) {
        GrayImage g;
        g.width = img.width();
        g.height = img.height();
        g.depth = 16;
        g.values.resize(img.size());
        for (std::size_t i = 0; i < img.size(); ++i) {
            const double v = std::clamp(img[i], 0.0, 65535.0);
            g.values[i] = static_cast<std::uint16_t>(v + 0.5);
        }
        return g;
    };
    write_gray(dir / "ta.png", to_gray16(bundle.ta));
    write_gray(dir / "tf.png", to_gray16(bundle.tf));
    write_labels(dir / "regions.png", bundle.regions);
    nlohmann::json labels = nlohmann::json::object();
    for (const auto& [code, name] : bundle.region_names)
        labels[std::to_string(code)] = name;
    nlohmann::json j{{"schema", 1}, {"view_id", bundle.view_id},
                     {"labels", labels}};
    std::ofstream out(dir / "regions.json");
    out << j.dump(2) << "\n";
}

} // namespace irforge::io
