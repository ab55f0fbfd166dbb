#include "pssf/core/image_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <vector>

namespace pssf {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

void write_png16(const std::string& path, const RasterU16& image) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw Error::runtime("cannot open for writing: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error::runtime("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error::runtime("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error::runtime("png write failure: " + path);
    }
    png_init_io(png, fp.get());
    png_set_compression_level(png, 6);
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.cols()),
                 static_cast<png_uint_32>(image.rows()), 16, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    const int w = static_cast<int>(image.cols());
    std::vector<png_byte> row(static_cast<std::size_t>(w) * 2);
    for (int r = 0; r < image.rows(); ++r) {
        for (int c = 0; c < w; ++c) {
            const std::uint16_t v = image(r, c);
            row[2 * c] = static_cast<png_byte>(v >> 8);  // PNG is big-endian
            row[2 * c + 1] = static_cast<png_byte>(v & 0xff);
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, info);
    png_destroy_write_struct(&png, &info);
    if (std::fflush(fp.get()) != 0) throw Error::runtime("flush failed: " + path);
}

RasterU16 read_png16(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw Error::runtime("cannot open for reading: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error::runtime("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error::runtime("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error::runtime("png read failure: " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);
    if (depth != 16 || color != PNG_COLOR_TYPE_GRAY) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error::runtime("expected 16-bit grayscale png: " + path);
    }

    RasterU16 image(h, w);
    std::vector<png_byte> row(static_cast<std::size_t>(w) * 2);
    for (png_uint_32 r = 0; r < h; ++r) {
        png_read_row(png, row.data(), nullptr);
        for (png_uint_32 c = 0; c < w; ++c) {
            image(static_cast<int>(r), static_cast<int>(c)) =
                static_cast<std::uint16_t>((row[2 * c] << 8) | row[2 * c + 1]);
        }
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return image;
}

void write_u16_raw(const std::string& path, const RasterU16& image) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw Error::runtime("cannot open for writing: " + path);
    std::vector<unsigned char> buf;
    buf.reserve(static_cast<std::size_t>(image.size()) * 2);
    for (int r = 0; r < image.rows(); ++r) {
        for (int c = 0; c < image.cols(); ++c) {
            const std::uint16_t v = image(r, c);
            buf.push_back(static_cast<unsigned char>(v & 0xff));
            buf.push_back(static_cast<unsigned char>(v >> 8));
        }
    }
    if (std::fwrite(buf.data(), 1, buf.size(), fp.get()) != buf.size()) {
        throw Error::runtime("short write: " + path);
    }
}

}  // namespace pssf
