#include "storyframes/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace storyframes {

namespace {
uint8_t to_byte(double x) {
    long v = std::lround(x * 255.0);
    if (v < 0) v = 0;
    if (v > 255) v = 255;
    return static_cast<uint8_t>(v);
}
}  // namespace

Hsv rgb_to_hsv(uint8_t r8, uint8_t g8, uint8_t b8) {
    double r = r8 / 255.0, g = g8 / 255.0, b = b8 / 255.0;
    double mx = std::max({r, g, b});
    double mn = std::min({r, g, b});
    double c = mx - mn;
    Hsv out{0.0, 0.0, mx};
    if (mx > 0.0) out.s = c / mx;
    if (c > 0.0) {
        double h;
        if (mx == r) {
            h = std::fmod((g - b) / c, 6.0);
        } else if (mx == g) {
            h = (b - r) / c + 2.0;
        } else {
            h = (r - g) / c + 4.0;
        }
        h *= 60.0;
        if (h < 0.0) h += 360.0;
        out.h = h;
    }
    return out;
}

Rgb8 hsv_to_rgb(double h, double s, double v) {
    double c = v * s;
    double hp = std::fmod(h, 360.0) / 60.0;
    if (hp < 0.0) hp += 6.0;
    double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1) {
        r = c; g = x;
    } else if (hp < 2) {
        r = x; g = c;
    } else if (hp < 3) {
        g = c; b = x;
    } else if (hp < 4) {
        g = x; b = c;
    } else if (hp < 5) {
        r = x; b = c;
    } else {
        r = c; b = x;
    }
    double m = v - c;
    return Rgb8{to_byte(r + m), to_byte(g + m), to_byte(b + m)};
}

RasterImage::RasterImage(int width, int height) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) raise(Errc::bad_dims, "image dimensions must be positive");
    data_.assign(static_cast<size_t>(width) * height * 4, 0);
    for (size_t i = 3; i < data_.size(); i += 4) data_[i] = 255;
}

RasterImage RasterImage::filled(int width, int height, uint8_t r, uint8_t g, uint8_t b,
                                uint8_t a) {
    RasterImage img(width, height);
    auto& d = img.data();
    for (size_t i = 0; i < d.size(); i += 4) {
        d[i] = r;
        d[i + 1] = g;
        d[i + 2] = b;
        d[i + 3] = a;
    }
    return img;
}

size_t ObjectRegion::pixel_count() const {
    return static_cast<size_t>(std::count(pixel_mask.begin(), pixel_mask.end(), uint8_t(1)));
}

double mean_saturation(const RasterImage& img) {
    const auto& d = img.data();
    double sum = 0.0;
    for (size_t i = 0; i < d.size(); i += 4) {
        sum += rgb_to_hsv(d[i], d[i + 1], d[i + 2]).s;
    }
    size_t n = d.size() / 4;
    return n ? sum / static_cast<double>(n) : 0.0;
}

RasterImage match_saturation(const RasterImage& frame, const RasterImage& reference,
                             double* applied_scale) {
    if (frame.width() != reference.width() || frame.height() != reference.height()) {
        raise(Errc::dim_mismatch, "match_saturation: frame and reference dimensions differ");
    }
    double mu_f = mean_saturation(frame);
    double mu_r = mean_saturation(reference);
    if (mu_f == 0.0) {
        if (applied_scale) *applied_scale = 1.0;
        return frame;
    }
    double scale = mu_r / mu_f;
    if (applied_scale) *applied_scale = scale;
    RasterImage out = frame;
    auto& d = out.data();
    for (size_t i = 0; i < d.size(); i += 4) {
        Hsv hsv = rgb_to_hsv(d[i], d[i + 1], d[i + 2]);
        double s = std::clamp(hsv.s * scale, 0.0, 1.0);
        Rgb8 rgb = hsv_to_rgb(hsv.h, s, hsv.v);
        d[i] = rgb.r;
        d[i + 1] = rgb.g;
        d[i + 2] = rgb.b;
    }
    return out;
}

ObjectRegion extract_object(const RasterImage& image, int white_threshold) {
    ObjectRegion region;
    region.width = image.width();
    region.height = image.height();
    region.pixel_mask.assign(static_cast<size_t>(region.width) * region.height, 0);
    int min_r = region.height, min_c = region.width, max_r = -1, max_c = -1;
    for (int r = 0; r < region.height; ++r) {
        for (int c = 0; c < region.width; ++c) {
            const uint8_t* p = image.pixel(r, c);
            int mn = std::min({p[0], p[1], p[2]});
            if (mn < white_threshold) {
                region.pixel_mask[static_cast<size_t>(r) * region.width + c] = 1;
                min_r = std::min(min_r, r);
                min_c = std::min(min_c, c);
                max_r = std::max(max_r, r);
                max_c = std::max(max_c, c);
            }
        }
    }
    if (max_r < 0) raise(Errc::no_object, "no non-white pixels found");
    region.min_row = min_r;
    region.min_col = min_c;
    region.max_row = max_r;
    region.max_col = max_c;
    return region;
}

RasterImage resize_reposition(const RasterImage& object_img, double scale, int anchor_row,
                              int anchor_col) {
    if (!(scale > 0.0) || scale > 1.0) {
        raise(Errc::invalid_args, "resize_reposition: scale must be in (0,1]");
    }
    int w = object_img.width(), h = object_img.height();
    int sw = std::max(1, static_cast<int>(std::lround(scale * w)));
    int sh = std::max(1, static_cast<int>(std::lround(scale * h)));
    if (anchor_row < 0 || anchor_col < 0 || anchor_row + sh > h || anchor_col + sw > w) {
        raise(Errc::out_of_bounds, "resize_reposition: scaled image does not fit at anchor");
    }
    RasterImage canvas = RasterImage::filled(w, h, 255, 255, 255, 255);
    double sy = static_cast<double>(h) / sh;
    double sx = static_cast<double>(w) / sw;
    for (int r = 0; r < sh; ++r) {
        double src_y = (r + 0.5) * sy - 0.5;
        int y0 = static_cast<int>(std::floor(src_y));
        double fy = src_y - y0;
        int y1 = std::min(y0 + 1, h - 1);
        y0 = std::clamp(y0, 0, h - 1);
        for (int c = 0; c < sw; ++c) {
            double src_x = (c + 0.5) * sx - 0.5;
            int x0 = static_cast<int>(std::floor(src_x));
            double fx = src_x - x0;
            int x1 = std::min(x0 + 1, w - 1);
            x0 = std::clamp(x0, 0, w - 1);
            const uint8_t* p00 = object_img.pixel(y0, x0);
            const uint8_t* p01 = object_img.pixel(y0, x1);
            const uint8_t* p10 = object_img.pixel(y1, x0);
            const uint8_t* p11 = object_img.pixel(y1, x1);
            uint8_t* dst = canvas.pixel(anchor_row + r, anchor_col + c);
            for (int ch = 0; ch < 4; ++ch) {
                double top = p00[ch] * (1.0 - fx) + p01[ch] * fx;
                double bot = p10[ch] * (1.0 - fx) + p11[ch] * fx;
                double val = top * (1.0 - fy) + bot * fy;
                dst[ch] = static_cast<uint8_t>(std::clamp<long>(std::lround(val), 0, 255));
            }
        }
    }
    return canvas;
}

RasterImage composite_over(const RasterImage& object_img, const ObjectRegion& region,
                           const RasterImage& background, int offset_row, int offset_col) {
    if (region.width != object_img.width() || region.height != object_img.height()) {
        raise(Errc::dim_mismatch, "composite_over: region does not match object image");
    }
    if (region.min_row + offset_row < 0 || region.min_col + offset_col < 0 ||
        region.max_row + offset_row >= background.height() ||
        region.max_col + offset_col >= background.width()) {
        raise(Errc::out_of_bounds, "composite_over: translated object exceeds background");
    }
    RasterImage out = background;
    for (int r = region.min_row; r <= region.max_row; ++r) {
        for (int c = region.min_col; c <= region.max_col; ++c) {
            if (!region.contains(r, c)) continue;
            const uint8_t* src = object_img.pixel(r, c);
            uint8_t* dst = out.pixel(r + offset_row, c + offset_col);
            std::memcpy(dst, src, 4);
        }
    }
    return out;
}

RasterImage inpaint(const RasterImage& image, const std::vector<TextBox>& boxes) {
    if (boxes.empty()) return image;
    int w = image.width(), h = image.height();
    for (const auto& b : boxes) {
        if (b.min_row < 0 || b.min_col < 0 || b.max_row >= h || b.max_col >= w ||
            b.min_row > b.max_row || b.min_col > b.max_col) {
            raise(Errc::out_of_bounds, "inpaint: box outside image bounds");
        }
    }
    std::vector<uint8_t> inside(static_cast<size_t>(w) * h, 0);
    std::vector<std::pair<int, int>> fill_px;
    for (const auto& b : boxes) {
        for (int r = b.min_row; r <= b.max_row; ++r) {
            for (int c = b.min_col; c <= b.max_col; ++c) {
                size_t idx = static_cast<size_t>(r) * w + c;
                if (!inside[idx]) {
                    inside[idx] = 1;
                    fill_px.emplace_back(r, c);
                }
            }
        }
    }

    std::vector<double> cur(static_cast<size_t>(w) * h * 4);
    for (size_t i = 0; i < cur.size(); ++i) cur[i] = image.data()[i];
    std::vector<double> next = cur;

    const int dr[4] = {-1, 1, 0, 0};
    const int dc[4] = {0, 0, -1, 1};
    for (int iter = 0; iter < 500; ++iter) {
        double max_delta = 0.0;
        for (auto [r, c] : fill_px) {
            double acc[4] = {0, 0, 0, 0};
            int n = 0;
            for (int k = 0; k < 4; ++k) {
                int rr = r + dr[k], cc = c + dc[k];
                if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
                size_t pi = (static_cast<size_t>(rr) * w + cc) * 4;
                for (int ch = 0; ch < 4; ++ch) acc[ch] += cur[pi + ch];
                ++n;
            }
            if (n == 0) continue;
            size_t pi = (static_cast<size_t>(r) * w + c) * 4;
            for (int ch = 0; ch < 4; ++ch) {
                double v = acc[ch] / n;
                max_delta = std::max(max_delta, std::fabs(v - cur[pi + ch]));
                next[pi + ch] = v;
            }
        }
        for (auto [r, c] : fill_px) {
            size_t pi = (static_cast<size_t>(r) * w + c) * 4;
            for (int ch = 0; ch < 4; ++ch) cur[pi + ch] = next[pi + ch];
        }
        if (max_delta < 1.0) break;
    }

    RasterImage out = image;
    for (auto [r, c] : fill_px) {
        size_t pi = (static_cast<size_t>(r) * w + c) * 4;
        uint8_t* dst = out.pixel(r, c);
        for (int ch = 0; ch < 4; ++ch) {
            dst[ch] = static_cast<uint8_t>(std::clamp<long>(std::lround(cur[pi + ch]), 0, 255));
        }
    }
    return out;
}

}  // namespace storyframes
