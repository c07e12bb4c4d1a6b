#include "storyframes/mask.hpp"

#include <algorithm>
#include <cmath>

#include "storyframes/util.hpp"

namespace storyframes {

Mask::Mask(int width, int height, bool editable) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) raise(Errc::bad_dims, "mask dimensions must be positive");
    grid_.assign(static_cast<size_t>(width) * height, editable ? 1 : 0);
}

size_t Mask::editable_count() const {
    return static_cast<size_t>(std::count(grid_.begin(), grid_.end(), uint8_t(1)));
}

namespace {
void check_edge(int w, int h, int edge_width_y) {
    if (w <= 0 || h <= 0) raise(Errc::bad_dims, "mask dimensions must be positive");
    if (edge_width_y < 0) raise(Errc::bad_dims, "edge width must be non-negative");
    if (2 * edge_width_y >= std::min(w, h)) {
        raise(Errc::bad_dims, "edge width leaves no interior");
    }
}

void check_same_dims(const Mask& a, const Mask& b) {
    if (a.width() != b.width() || a.height() != b.height()) {
        raise(Errc::dim_mismatch, "mask dimensions differ");
    }
}
}  // namespace

Mask edge_mask(int w, int h, int edge_width_y) {
    check_edge(w, h, edge_width_y);
    Mask m(w, h, false);
    for (int r = edge_width_y; r < h - edge_width_y; ++r) {
        for (int c = edge_width_y; c < w - edge_width_y; ++c) {
            m.set(r, c, true);
        }
    }
    return m;
}

Mask dotted_mask(int w, int h, int spacing, int edge_width_y, DotPolarity polarity) {
    check_edge(w, h, edge_width_y);
    if (spacing < 1) raise(Errc::bad_dims, "dot spacing must be >= 1");
    Mask m(w, h, false);
    const int y = edge_width_y;
    for (int r = y; r < h - y; ++r) {
        for (int c = y; c < w - y; ++c) {
            // lattice anchored at the interior corner (y, y)
            bool dot = ((r - y) % spacing == 0) && ((c - y) % spacing == 0);
            bool editable = polarity == DotPolarity::DotsEditable ? dot : !dot;
            m.set(r, c, editable);
        }
    }
    return m;
}

Mask center_shape_mask(int w, int h, CenterShape shape, double extent) {
    if (w <= 0 || h <= 0) raise(Errc::bad_dims, "mask dimensions must be positive");
    if (!(extent > 0.0) || extent > 1.0) {
        raise(Errc::invalid_args, "extent must be in (0,1]");
    }
    Mask m(w, h, false);
    double cy = (h - 1) / 2.0;
    double cx = (w - 1) / 2.0;
    double ry = extent * h / 2.0;
    double rx = extent * w / 2.0;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            bool in;
            if (shape == CenterShape::Rect) {
                in = std::fabs(r - cy) <= ry && std::fabs(c - cx) <= rx;
            } else {
                double dy = (r - cy) / ry;
                double dx = (c - cx) / rx;
                in = dy * dy + dx * dx <= 1.0;
            }
            if (in) m.set(r, c, true);
        }
    }
    return m;
}

Mask random_ellipse_mask(int w, int h, uint64_t seed) {
    if (w <= 0 || h <= 0) raise(Errc::bad_dims, "mask dimensions must be positive");
    SplitRng rng(seed);
    double cy = rng.uniform(0.0, h - 1.0);
    double cx = rng.uniform(0.0, w - 1.0);
    double lim = std::min(w, h);
    double ry = rng.uniform(0.1 * lim, 0.3 * lim);
    double rx = rng.uniform(0.1 * lim, 0.3 * lim);
    Mask m(w, h, false);
    int r0 = std::max(0, static_cast<int>(std::floor(cy - ry)));
    int r1 = std::min(h - 1, static_cast<int>(std::ceil(cy + ry)));
    int c0 = std::max(0, static_cast<int>(std::floor(cx - rx)));
    int c1 = std::min(w - 1, static_cast<int>(std::ceil(cx + rx)));
    for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
            double dy = (r - cy) / ry;
            double dx = (c - cx) / rx;
            if (dy * dy + dx * dx <= 1.0) m.set(r, c, true);
        }
    }
    return m;
}

Mask object_mutation_mask(const ObjectRegion& object, const MaskParams& params,
                          const std::vector<ProtectedRegion>& protected_regions, uint64_t seed) {
    if (object.pixel_mask.empty() || object.pixel_count() == 0) {
        raise(Errc::empty_object, "object region has no pixels");
    }
    if (params.mutation_fraction < 0.0 || params.mutation_fraction > 1.0) {
        raise(Errc::invalid_args, "mutation_fraction must be in [0,1]");
    }
    const int w = object.width, h = object.height;
    const int bh = object.bbox_height();
    const int bw = object.bbox_width();
    Mask m(w, h, false);

    // random rectangle covering mutation_fraction of the bounding box area;
    // floor keeps the area at or below fraction * bbox area
    SplitRng rng(seed);
    int rect_h = static_cast<int>(std::floor(bh * std::sqrt(params.mutation_fraction)));
    int rect_w = static_cast<int>(std::floor(bw * std::sqrt(params.mutation_fraction)));
    if (rect_h > 0 && rect_w > 0) {
        int top = object.min_row + rng.uniform_int(0, bh - rect_h);
        int left = object.min_col + rng.uniform_int(0, bw - rect_w);
        for (int r = top; r < top + rect_h; ++r) {
            for (int c = left; c < left + rect_w; ++c) {
                if (object.contains(r, c)) m.set(r, c, true);
            }
        }
    }

    // low-frequency lattice inside the object, anchored at the bbox corner
    if (params.object_dot_spacing > 0) {
        int sp = params.object_dot_spacing;
        for (int r = object.min_row; r <= object.max_row; ++r) {
            if ((r - object.min_row) % sp != 0) continue;
            for (int c = object.min_col; c <= object.max_col; ++c) {
                if ((c - object.min_col) % sp != 0) continue;
                if (object.contains(r, c)) m.set(r, c, true);
            }
        }
    }

    // protected regions always win; bounds rounded outward to cover the
    // full fractional band
    for (const auto& p : protected_regions) {
        double t = std::clamp(p.top, 0.0, 1.0);
        double l = std::clamp(p.left, 0.0, 1.0);
        double b = std::clamp(p.bottom, 0.0, 1.0);
        double rr = std::clamp(p.right, 0.0, 1.0);
        int r0 = object.min_row + static_cast<int>(std::floor(t * bh));
        int r1 = object.min_row + static_cast<int>(std::ceil(b * bh)) - 1;
        int c0 = object.min_col + static_cast<int>(std::floor(l * bw));
        int c1 = object.min_col + static_cast<int>(std::ceil(rr * bw)) - 1;
        r0 = std::max(r0, object.min_row);
        c0 = std::max(c0, object.min_col);
        r1 = std::min(r1, object.max_row);
        c1 = std::min(c1, object.max_col);
        for (int r = r0; r <= r1; ++r) {
            for (int c = c0; c <= c1; ++c) {
                m.set(r, c, false);
            }
        }
    }
    return m;
}

Mask mask_union(const Mask& a, const Mask& b) {
    check_same_dims(a, b);
    Mask out = a;
    for (int r = 0; r < a.height(); ++r) {
        for (int c = 0; c < a.width(); ++c) {
            if (b.editable(r, c)) out.set(r, c, true);
        }
    }
    return out;
}

Mask mask_intersect(const Mask& a, const Mask& b) {
    check_same_dims(a, b);
    Mask out = a;
    for (int r = 0; r < a.height(); ++r) {
        for (int c = 0; c < a.width(); ++c) {
            if (!b.editable(r, c)) out.set(r, c, false);
        }
    }
    return out;
}

Mask mask_subtract(const Mask& a, const Mask& b) {
    check_same_dims(a, b);
    Mask out = a;
    for (int r = 0; r < a.height(); ++r) {
        for (int c = 0; c < a.width(); ++c) {
            if (b.editable(r, c)) out.set(r, c, false);
        }
    }
    return out;
}

Mask mask_invert(const Mask& a) {
    Mask out = a;
    for (int r = 0; r < a.height(); ++r) {
        for (int c = 0; c < a.width(); ++c) {
            out.set(r, c, !a.editable(r, c));
        }
    }
    return out;
}

Mask mask_from_region(const ObjectRegion& region) {
    Mask m(region.width, region.height, false);
    for (int r = 0; r < region.height; ++r) {
        for (int c = 0; c < region.width; ++c) {
            if (region.contains(r, c)) m.set(r, c, true);
        }
    }
    return m;
}

RasterImage to_edit_alpha(const Mask& mask, const RasterImage& image) {
    if (mask.width() != image.width() || mask.height() != image.height()) {
        raise(Errc::dim_mismatch, "mask does not match image dimensions");
    }
    RasterImage out = image;
    for (int r = 0; r < mask.height(); ++r) {
        for (int c = 0; c < mask.width(); ++c) {
            out.pixel(r, c)[3] = mask.editable(r, c) ? 0 : 255;
        }
    }
    return out;
}

void save_mask_png(const Mask& mask, const std::string& path) {
    std::vector<uint8_t> gray(mask.grid().size());
    for (size_t i = 0; i < gray.size(); ++i) gray[i] = mask.grid()[i] ? 255 : 0;
    save_png_gray(gray, mask.width(), mask.height(), path);
}

const char* dot_polarity_name(DotPolarity polarity) {
    return polarity == DotPolarity::DotsFixed ? "dots-fixed" : "dots-editable";
}

std::optional<DotPolarity> dot_polarity_from_name(std::string_view name) {
    if (name == "dots-editable") return DotPolarity::DotsEditable;
    if (name == "dots-fixed") return DotPolarity::DotsFixed;
    return std::nullopt;
}

}  // namespace storyframes
