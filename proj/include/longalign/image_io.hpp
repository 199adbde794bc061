#pragma once

#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include <png.h>

#include "longalign/field.hpp"

namespace longalign {

// ---------------------------------------------------------------------------
// DF2D deformation-field format: magic "DF2D", u32 LE height, u32 LE width,
// H*W float32 u (row-major), then H*W float32 v.
// ---------------------------------------------------------------------------

namespace detail {

inline void write_u32le(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t read_u32le(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw io_error("truncated u32");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline void write_f32le(std::ostream& os, float f) {
    std::uint32_t v;
    std::memcpy(&v, &f, 4);
    write_u32le(os, v);
}

inline float read_f32le(std::istream& is) {
    std::uint32_t v = read_u32le(is);
    float f;
    std::memcpy(&f, &v, 4);
    return f;
}

} // namespace detail

inline void save_field(const DeformationField2D& field, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open for writing: " + path);
    os.write("DF2D", 4);
    detail::write_u32le(os, static_cast<std::uint32_t>(field.height));
    detail::write_u32le(os, static_cast<std::uint32_t>(field.width));
    for (double u : field.u) detail::write_f32le(os, static_cast<float>(u));
    for (double v : field.v) detail::write_f32le(os, static_cast<float>(v));
    if (!os) throw io_error("write failed: " + path);
}

inline DeformationField2D load_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "DF2D", 4) != 0)
        throw io_error("not a DF2D file: " + path);
    const std::uint32_t h = detail::read_u32le(is);
    const std::uint32_t w = detail::read_u32le(is);
    if (h < 2 || w < 2 || h > (1u << 20) || w > (1u << 20))
        throw io_error("implausible DF2D dimensions in " + path);
    DeformationField2D field(static_cast<int>(h), static_cast<int>(w));
    for (auto& u : field.u) u = detail::read_f32le(is);
    for (auto& v : field.v) v = detail::read_f32le(is);
    field.validate();
    return field;
}

// ---------------------------------------------------------------------------
// Grayscale PNG (8- or 16-bit) via libpng, and binary PGM (P5).
// 16-bit samples are divided by 65535 on load; 8-bit by 255.
// ---------------------------------------------------------------------------

inline void save_png(const Image2D& img, const std::string& path, int bit_depth = 16) {
    if (bit_depth != 8 && bit_depth != 16) throw io_error("png bit depth must be 8 or 16");
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw io_error("cannot open for writing: " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw io_error("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw io_error("libpng write failed: " + path);
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, img.width, img.height, bit_depth, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const double scale = bit_depth == 16 ? 65535.0 : 255.0;
    std::vector<unsigned char> row(static_cast<std::size_t>(img.width) * (bit_depth / 8));
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double v = std::clamp(img.at(y, x), 0.0, 1.0);
            const unsigned q = static_cast<unsigned>(v * scale + 0.5);
            if (bit_depth == 16) {
                row[2 * x] = static_cast<unsigned char>(q >> 8);
                row[2 * x + 1] = static_cast<unsigned char>(q & 0xff);
            } else {
                row[x] = static_cast<unsigned char>(q);
            }
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

inline Image2D load_png(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw io_error("cannot open: " + path);
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, fp) != 8 || png_sig_cmp(sig, 0, 8)) {
        std::fclose(fp);
        throw io_error("not a PNG file: " + path);
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw io_error("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw io_error("libpng read failed: " + path);
    }
    png_init_io(png, fp);
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    // Normalize everything to single-channel gray, preserving bit depth.
    png_set_strip_alpha(png);
    if (png_get_color_type(png, info) == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (png_get_color_type(png, info) & PNG_COLOR_MASK_COLOR)
        png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    if (png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
    png_read_update_info(png, info);
    const int h = static_cast<int>(png_get_image_height(png, info));
    const int w = static_cast<int>(png_get_image_width(png, info));
    const int depth = png_get_bit_depth(png, info);
    Image2D img(h, w);
    std::vector<unsigned char> row(png_get_rowbytes(png, info));
    const double scale = depth == 16 ? 65535.0 : 255.0;
    for (int y = 0; y < h; ++y) {
        png_read_row(png, row.data(), nullptr);
        for (int x = 0; x < w; ++x) {
            const unsigned q = depth == 16
                                   ? (static_cast<unsigned>(row[2 * x]) << 8) | row[2 * x + 1]
                                   : row[x];
            img.at(y, x) = q / scale;
        }
    }
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    return img;
}

inline void save_pgm(const Image2D& img, const std::string& path, int bit_depth = 16) {
    if (bit_depth != 8 && bit_depth != 16) throw io_error("pgm bit depth must be 8 or 16");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open for writing: " + path);
    const unsigned maxval = bit_depth == 16 ? 65535 : 255;
    os << "P5\n" << img.width << " " << img.height << "\n" << maxval << "\n";
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const double v = std::clamp(img.at(y, x), 0.0, 1.0);
            const unsigned q = static_cast<unsigned>(v * maxval + 0.5);
            if (bit_depth == 16) {
                // PGM stores 16-bit samples big-endian.
                os.put(static_cast<char>(q >> 8));
                os.put(static_cast<char>(q & 0xff));
            } else {
                os.put(static_cast<char>(q));
            }
        }
    if (!os) throw io_error("write failed: " + path);
}

inline Image2D load_pgm(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open: " + path);
    std::string magic;
    is >> magic;
    if (magic != "P5") throw io_error("not a binary PGM (P5): " + path);
    auto next_token = [&is, &path]() {
        std::string tok;
        // Skip whitespace and '#' comment lines.
        for (;;) {
            int c = is.peek();
            if (c == '#') {
                std::string line;
                std::getline(is, line);
            } else if (std::isspace(c)) {
                is.get();
            } else {
                break;
            }
        }
        is >> tok;
        if (!is) throw io_error("truncated PGM header: " + path);
        return tok;
    };
    const int w = std::stoi(next_token());
    const int h = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    if (maxval != 255 && maxval != 65535)
        throw io_error("unsupported PGM maxval (need 255 or 65535): " + path);
    is.get(); // single whitespace after maxval
    Image2D img(h, w);
    if (maxval == 255) {
        std::vector<unsigned char> buf(static_cast<std::size_t>(h) * w);
        is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (!is) throw io_error("truncated PGM data: " + path);
        for (std::size_t i = 0; i < buf.size(); ++i) img.data[i] = buf[i] / 255.0;
    } else {
        std::vector<unsigned char> buf(static_cast<std::size_t>(h) * w * 2);
        is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (!is) throw io_error("truncated PGM data: " + path);
        for (std::size_t i = 0; i < static_cast<std::size_t>(h) * w; ++i)
            img.data[i] = ((static_cast<unsigned>(buf[2 * i]) << 8) | buf[2 * i + 1]) / 65535.0;
    }
    return img;
}

// Dispatch on extension.
inline Image2D load_image(const std::string& path) {
    auto dot = path.find_last_of('.');
    const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    if (ext == "pgm" || ext == "PGM") return load_pgm(path);
    return load_png(path);
}

inline void save_image(const Image2D& img, const std::string& path, int bit_depth = 16) {
    auto dot = path.find_last_of('.');
    const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    if (ext == "pgm" || ext == "PGM")
        save_pgm(img, path, bit_depth);
    else
        save_png(img, path, bit_depth);
}

} // namespace longalign
