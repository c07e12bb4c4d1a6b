#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "storyframes/error.hpp"

namespace storyframes {

// Hexcone HSV. h in [0,360), s and v in [0,1].
struct Hsv {
    double h;
    double s;
    double v;
};

struct Rgb8 {
    uint8_t r;
    uint8_t g;
    uint8_t b;
};

Hsv rgb_to_hsv(uint8_t r, uint8_t g, uint8_t b);
Rgb8 hsv_to_rgb(double h, double s, double v);

// Row-major RGBA, 8 bits per channel.
class RasterImage {
  public:
    RasterImage() = default;
    RasterImage(int width, int height);  // opaque black
    static RasterImage filled(int width, int height, uint8_t r, uint8_t g, uint8_t b,
                              uint8_t a = 255);

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return width_ == 0 || height_ == 0; }

    uint8_t* pixel(int row, int col) {
        return data_.data() + (static_cast<size_t>(row) * width_ + col) * 4;
    }
    const uint8_t* pixel(int row, int col) const {
        return data_.data() + (static_cast<size_t>(row) * width_ + col) * 4;
    }

    std::vector<uint8_t>& data() { return data_; }
    const std::vector<uint8_t>& data() const { return data_; }

    bool operator==(const RasterImage&) const = default;

  private:
    int width_ = 0;
    int height_ = 0;
    std::vector<uint8_t> data_;
};

// Pixel mask plus tight bounding box of the dominant object.
struct ObjectRegion {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> pixel_mask;  // 1 = object pixel
    int min_row = 0, min_col = 0, max_row = 0, max_col = 0;  // inclusive

    bool contains(int row, int col) const {
        return pixel_mask[static_cast<size_t>(row) * width + col] != 0;
    }
    size_t pixel_count() const;
    int bbox_height() const { return max_row - min_row + 1; }
    int bbox_width() const { return max_col - min_col + 1; }
};

// Axis-aligned rectangle in pixel coordinates, inclusive bounds.
struct TextBox {
    int min_row = 0, min_col = 0, max_row = 0, max_col = 0;
};

double mean_saturation(const RasterImage& img);

// Rescales every pixel's saturation so the frame's mean S matches the
// reference's; hue and value pass through. A zero-saturation frame is
// returned unchanged. applied_scale (optional) receives the multiplier.
RasterImage match_saturation(const RasterImage& frame, const RasterImage& reference,
                             double* applied_scale = nullptr);

// Object = pixels with min(R,G,B) below the white threshold.
ObjectRegion extract_object(const RasterImage& image, int white_threshold);

// Bilinear downscale placed on a white canvas of the source's size,
// top-left corner at the anchor.
RasterImage resize_reposition(const RasterImage& object_img, double scale, int anchor_row,
                              int anchor_col);

RasterImage composite_over(const RasterImage& object_img, const ObjectRegion& region,
                           const RasterImage& background, int offset_row, int offset_col);

// Fills box interiors by iterative 4-neighbour diffusion from the
// surrounding pixels; everything outside the boxes is untouched.
RasterImage inpaint(const RasterImage& image, const std::vector<TextBox>& boxes);

// PNG I/O: 8-bit RGBA, no interlacing. Loading converts any PNG layout
// to RGBA.
RasterImage load_png(const std::string& path);
void save_png(const RasterImage& img, const std::string& path);
RasterImage decode_png(const std::vector<uint8_t>& bytes);
std::vector<uint8_t> encode_png(const RasterImage& img);
void save_png_gray(const std::vector<uint8_t>& gray, int width, int height,
                   const std::string& path);

}  // namespace storyframes
