#include <png.h>

#include <cstdio>
#include <cstring>

#include "storyframes/image.hpp"

namespace storyframes {

namespace {

struct MemReader {
    const uint8_t* data;
    size_t size;
    size_t pos;
};

void mem_read(png_structp png, png_bytep out, png_size_t len) {
    auto* r = static_cast<MemReader*>(png_get_io_ptr(png));
    if (r->pos + len > r->size) {
        png_error(png, "unexpected end of PNG data");
    }
    std::memcpy(out, r->data + r->pos, len);
    r->pos += len;
}

void mem_write(png_structp png, png_bytep data, png_size_t len) {
    auto* out = static_cast<std::vector<uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + len);
}

void mem_flush(png_structp) {}

RasterImage read_png_struct(png_structp png, png_infop info) {
    png_read_info(png, info);
    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    int color_type = png_get_color_type(png, info);
    int bit_depth = png_get_bit_depth(png, info);

    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
        png_set_gray_to_rgb(png);
    }
    if (color_type == PNG_COLOR_TYPE_RGB || color_type == PNG_COLOR_TYPE_GRAY ||
        color_type == PNG_COLOR_TYPE_PALETTE) {
        png_set_filler(png, 0xff, PNG_FILLER_AFTER);
    }
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    RasterImage img(static_cast<int>(w), static_cast<int>(h));
    std::vector<png_bytep> rows(h);
    for (png_uint_32 r = 0; r < h; ++r) rows[r] = img.pixel(static_cast<int>(r), 0);
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    return img;
}

}  // namespace

RasterImage decode_png(const std::vector<uint8_t>& bytes) {
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
        raise(Errc::io_error, "not a PNG stream");
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    MemReader reader{bytes.data(), bytes.size(), 0};
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        raise(Errc::io_error, "failed to decode PNG");
    }
    png_set_read_fn(png, &reader, mem_read);
    RasterImage img = read_png_struct(png, info);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

RasterImage load_png(const std::string& path) {
    FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) raise(Errc::file_unreadable, "cannot open " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        raise(Errc::io_error, "failed to read PNG " + path);
    }
    png_init_io(png, fp);
    RasterImage img = read_png_struct(png, info);
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    return img;
}

std::vector<uint8_t> encode_png(const RasterImage& img) {
    if (img.empty()) raise(Errc::invalid_args, "cannot encode empty image");
    std::vector<uint8_t> out;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        raise(Errc::io_error, "failed to encode PNG");
    }
    png_set_write_fn(png, &out, mem_write, mem_flush);
    png_set_IHDR(png, info, img.width(), img.height(), 8, PNG_COLOR_TYPE_RGBA,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> rows(img.height());
    for (int r = 0; r < img.height(); ++r) {
        rows[r] = const_cast<png_bytep>(img.pixel(r, 0));
    }
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

void save_png(const RasterImage& img, const std::string& path) {
    std::vector<uint8_t> bytes = encode_png(img);
    FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) raise(Errc::io_error, "cannot open " + path + " for writing");
    size_t written = std::fwrite(bytes.data(), 1, bytes.size(), fp);
    std::fclose(fp);
    if (written != bytes.size()) raise(Errc::io_error, "short write to " + path);
}

void save_png_gray(const std::vector<uint8_t>& gray, int width, int height,
                   const std::string& path) {
    if (width <= 0 || height <= 0 ||
        gray.size() != static_cast<size_t>(width) * static_cast<size_t>(height)) {
        raise(Errc::invalid_args, "gray buffer does not match dimensions");
    }
    FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) raise(Errc::io_error, "cannot open " + path + " for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        raise(Errc::io_error, "failed to write PNG " + path);
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> rows(height);
    for (int r = 0; r < height; ++r) {
        rows[r] = const_cast<png_bytep>(gray.data() + static_cast<size_t>(r) * width);
    }
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

}  // namespace storyframes
