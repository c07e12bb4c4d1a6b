#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "storyframes/image.hpp"

namespace storyframes {

// Per-pixel editable/fixed grid aligned to an image. Editable pixels are
// the ones a generation edit call is allowed to regenerate (transparent
// in the edit request).
class Mask {
  public:
    Mask() = default;
    Mask(int width, int height, bool editable = false);

    int width() const { return width_; }
    int height() const { return height_; }
    bool editable(int row, int col) const {
        return grid_[static_cast<size_t>(row) * width_ + col] != 0;
    }
    void set(int row, int col, bool editable) {
        grid_[static_cast<size_t>(row) * width_ + col] = editable ? 1 : 0;
    }
    size_t editable_count() const;
    const std::vector<uint8_t>& grid() const { return grid_; }

    bool operator==(const Mask&) const = default;

  private:
    int width_ = 0;
    int height_ = 0;
    std::vector<uint8_t> grid_;
};

// Whether the lattice dots mark the editable pixels or the fixed anchors.
enum class DotPolarity { DotsEditable, DotsFixed };

struct MaskParams {
    int dot_spacing_x = 4;        // background lattice pitch, typically 2..5
    int edge_width_y = 16;        // fixed border width, typically 10..40 at 256x256
    int object_dot_spacing = 12;  // in-object lattice pitch; 0 disables the lattice
    double mutation_fraction = 0.3;
    DotPolarity dot_polarity = DotPolarity::DotsEditable;
    uint64_t seed = 0;
};

// Rectangle in object-bounding-box fractional coordinates; intersected
// with the object's pixel mask at use time.
struct ProtectedRegion {
    double top = 0.0;
    double left = 0.0;
    double bottom = 1.0;
    double right = 1.0;
};

Mask edge_mask(int w, int h, int edge_width_y);
Mask dotted_mask(int w, int h, int spacing, int edge_width_y, DotPolarity polarity);

enum class CenterShape { Rect, Ellipse };
Mask center_shape_mask(int w, int h, CenterShape shape, double extent);

Mask random_ellipse_mask(int w, int h, uint64_t seed);

Mask object_mutation_mask(const ObjectRegion& object, const MaskParams& params,
                          const std::vector<ProtectedRegion>& protected_regions, uint64_t seed);

Mask mask_union(const Mask& a, const Mask& b);
Mask mask_intersect(const Mask& a, const Mask& b);
Mask mask_subtract(const Mask& a, const Mask& b);
Mask mask_invert(const Mask& a);

// Mask whose editable set is exactly the object's pixels.
Mask mask_from_region(const ObjectRegion& region);

// Copy of the image with alpha 0 on editable pixels and 255 elsewhere.
RasterImage to_edit_alpha(const Mask& mask, const RasterImage& image);

void save_mask_png(const Mask& mask, const std::string& path);  // 255 = editable

const char* dot_polarity_name(DotPolarity polarity);
std::optional<DotPolarity> dot_polarity_from_name(std::string_view name);

}  // namespace storyframes
