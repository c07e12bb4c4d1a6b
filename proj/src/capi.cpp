#include "storyframes.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "storyframes/image.hpp"
#include "storyframes/mask.hpp"
#include "storyframes/pipeline.hpp"
#include "storyframes/text.hpp"

namespace {

thread_local std::string g_last_error;
thread_local std::string g_last_error_name;

sf_status fail(storyframes::Errc code, const std::string& message) {
    g_last_error = message;
    g_last_error_name = storyframes::errc_name(code);
    return static_cast<sf_status>(storyframes::stage_of(code));
}

sf_status ok() {
    g_last_error.clear();
    g_last_error_name = "Ok";
    return SF_OK;
}

template <typename Fn>
sf_status guarded(Fn&& fn) {
    try {
        fn();
        return ok();
    } catch (const storyframes::Error& e) {
        return fail(e.code(), e.what());
    } catch (const std::exception& e) {
        return fail(storyframes::Errc::io_error, e.what());
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

struct sf_image {
    storyframes::RasterImage img;
};

struct sf_mask {
    storyframes::Mask mask;
};

struct sf_chunks {
    std::vector<std::string> texts;
};

extern "C" {

const char* sf_version(void) { return "0.1.0"; }

const char* sf_last_error(void) { return g_last_error.c_str(); }

const char* sf_last_error_name(void) { return g_last_error_name.c_str(); }

sf_status sf_clean_text(const char* raw, char** out_text) {
    if (!raw || !out_text) return fail(storyframes::Errc::invalid_args, "null argument");
    return guarded([&] {
        std::string cleaned = storyframes::clean(raw);
        *out_text = dup_string(cleaned);
        if (!*out_text) storyframes::raise(storyframes::Errc::io_error, "out of memory");
    });
}

void sf_string_free(char* s) { std::free(s); }

sf_status sf_chunk_text(const char* cleaned, const char* method, int window, int stride,
                        sf_chunks** out) {
    if (!cleaned || !method || !out) {
        return fail(storyframes::Errc::invalid_args, "null argument");
    }
    return guarded([&] {
        auto m = storyframes::chunk_method_from_name(method);
        if (!m) {
            storyframes::raise(storyframes::Errc::invalid_args,
                               std::string("unknown chunking method \"") + method + "\"");
        }
        storyframes::ChunkingSpec spec;
        spec.method = *m;
        spec.window = window;
        spec.stride = stride;
        auto units = storyframes::split_units(cleaned, storyframes::unit_kind_for(*m));
        if (units.empty()) {
            storyframes::raise(storyframes::Errc::empty_after_cleaning, "no text units to chunk");
        }
        auto chunks = storyframes::chunk_units(units, spec);
        auto* result = new sf_chunks;
        for (const auto& chunk : chunks) result->texts.push_back(chunk.text);
        *out = result;
    });
}

size_t sf_chunks_count(const sf_chunks* chunks) { return chunks ? chunks->texts.size() : 0; }

const char* sf_chunks_get(const sf_chunks* chunks, size_t index) {
    if (!chunks || index >= chunks->texts.size()) return nullptr;
    return chunks->texts[index].c_str();
}

void sf_chunks_free(sf_chunks* chunks) { delete chunks; }

sf_status sf_mask_edge(int width, int height, int edge_width, sf_mask** out) {
    if (!out) return fail(storyframes::Errc::invalid_args, "null argument");
    return guarded([&] { *out = new sf_mask{storyframes::edge_mask(width, height, edge_width)}; });
}

sf_status sf_mask_dotted(int width, int height, int spacing, int edge_width, int dots_fixed,
                         sf_mask** out) {
    if (!out) return fail(storyframes::Errc::invalid_args, "null argument");
    return guarded([&] {
        auto polarity = dots_fixed ? storyframes::DotPolarity::DotsFixed
                                   : storyframes::DotPolarity::DotsEditable;
        *out = new sf_mask{storyframes::dotted_mask(width, height, spacing, edge_width, polarity)};
    });
}

sf_status sf_mask_center(int width, int height, const char* shape, double extent, sf_mask** out) {
    if (!shape || !out) return fail(storyframes::Errc::invalid_args, "null argument");
    return guarded([&] {
        storyframes::CenterShape s;
        if (std::strcmp(shape, "rect") == 0) {
            s = storyframes::CenterShape::Rect;
        } else if (std::strcmp(shape, "ellipse") == 0) {
            s = storyframes::CenterShape::Ellipse;
        } else {
            storyframes::raise(storyframes::Errc::invalid_args,
                               std::string("unknown shape \"") + shape + "\"");
        }
        *out = new sf_mask{storyframes::center_shape_mask(width, height, s, extent)};
    });
}

sf_status sf_mask_random_ellipse(int width, int height, uint64_t seed, sf_mask** out) {
    if (!out) return fail(storyframes::Errc::invalid_args, "null argument");
    return guarded(
        [&] { *out = new sf_mask{storyframes::random_ellipse_mask(width, height, seed)}; });
}

size_t sf_mask_editable_count(const sf_mask* mask) {
    return mask ? mask->mask.editable_count() : 0;
}

int sf_mask_editable_at(const sf_mask* mask, int row, int col) {
    if (!mask || row < 0 || col < 0 || row >= mask->mask.height() || col >= mask->mask.width()) {
        return 0;
    }
    return mask->mask.editable(row, col) ? 1 : 0;
}

sf_status sf_mask_save_png(const sf_mask* mask, const char* path) {
    if (!mask || !path) return fail(storyframes::Errc::invalid_args, "null argument");
    return guarded([&] { storyframes::save_mask_png(mask->mask, path); });
}

void sf_mask_free(sf_mask* mask) { delete mask; }

sf_status sf_image_load_png(const char* path, sf_image** out) {
    if (!path || !out) return fail(storyframes::Errc::invalid_args, "null argument");
    return guarded([&] { *out = new sf_image{storyframes::load_png(path)}; });
}

sf_status sf_image_save_png(const sf_image* image, const char* path) {
    if (!image || !path) return fail(storyframes::Errc::invalid_args, "null argument");
    return guarded([&] { storyframes::save_png(image->img, path); });
}

int sf_image_width(const sf_image* image) { return image ? image->img.width() : 0; }

int sf_image_height(const sf_image* image) { return image ? image->img.height() : 0; }

const uint8_t* sf_image_pixels(const sf_image* image) {
    return image ? image->img.data().data() : nullptr;
}

void sf_image_free(sf_image* image) { delete image; }

sf_status sf_image_match_saturation(const sf_image* frame, const sf_image* reference,
                                    sf_image** out) {
    if (!frame || !reference || !out) {
        return fail(storyframes::Errc::invalid_args, "null argument");
    }
    return guarded([&] {
        *out = new sf_image{storyframes::match_saturation(frame->img, reference->img)};
    });
}

sf_status sf_image_inpaint(const sf_image* image, const int* boxes, size_t n_boxes,
                           sf_image** out) {
    if (!image || !out || (n_boxes > 0 && !boxes)) {
        return fail(storyframes::Errc::invalid_args, "null argument");
    }
    return guarded([&] {
        std::vector<storyframes::TextBox> list;
        for (size_t i = 0; i < n_boxes; ++i) {
            list.push_back({boxes[i * 4 + 0], boxes[i * 4 + 1], boxes[i * 4 + 2],
                            boxes[i * 4 + 3]});
        }
        *out = new sf_image{storyframes::inpaint(image->img, list)};
    });
}

sf_status sf_story_run_json(const char* options_json, char** manifest_json_out) {
    if (!options_json || !manifest_json_out) {
        return fail(storyframes::Errc::invalid_args, "null argument");
    }
    return guarded([&] {
        storyframes::RunOptions options = storyframes::options_from_json(options_json);
        storyframes::run_pipeline(options);
        std::ifstream in(options.out_dir + "/manifest.json", std::ios::binary);
        if (!in) {
            storyframes::raise(storyframes::Errc::io_error, "manifest was not written");
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        *manifest_json_out = dup_string(ss.str());
        if (!*manifest_json_out) {
            storyframes::raise(storyframes::Errc::io_error, "out of memory");
        }
    });
}

}  // extern "C"
