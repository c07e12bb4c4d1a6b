#include "storyframes/story.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "storyframes/util.hpp"

namespace storyframes {

bool mode_uses_object(StoryMode mode) {
    return mode == StoryMode::FreeObject || mode == StoryMode::DefinedSettingAndObject;
}

bool mode_uses_setting(StoryMode mode) {
    return mode == StoryMode::DefinedSetting || mode == StoryMode::DefinedSettingAndObject;
}

const char* mode_name(StoryMode mode) {
    switch (mode) {
        case StoryMode::Plain: return "plain";
        case StoryMode::FreeObject: return "free-object";
        case StoryMode::DefinedSetting: return "defined-setting";
        case StoryMode::DefinedSettingAndObject: return "defined-setting-and-object";
    }
    return "plain";
}

std::optional<StoryMode> mode_from_name(std::string_view name) {
    if (name == "plain") return StoryMode::Plain;
    if (name == "free-object") return StoryMode::FreeObject;
    if (name == "defined-setting") return StoryMode::DefinedSetting;
    if (name == "defined-setting-and-object") return StoryMode::DefinedSettingAndObject;
    return std::nullopt;
}

void StoryConfig::validate() const {
    if (width <= 0 || height <= 0) raise(Errc::bad_dims, "story size must be positive");
    if (mode_uses_setting(mode)) {
        if (!setting_image) {
            raise(Errc::invalid_spec, "defined-setting modes need a setting image");
        }
        if (setting_image->width() != width || setting_image->height() != height) {
            raise(Errc::invalid_spec, "setting image dimensions must match the story size");
        }
    }
    if (mode_uses_object(mode) && title.empty()) {
        raise(Errc::invalid_spec, "object modes need a title");
    }
    chunking.validate();
    if (mask_params.dot_spacing_x < 1) {
        raise(Errc::invalid_spec, "dot spacing must be at least 1");
    }
    if (mask_params.edge_width_y < 0 || 2 * mask_params.edge_width_y >= std::min(width, height)) {
        raise(Errc::invalid_spec, "edge width must leave an interior");
    }
    if (mask_params.object_dot_spacing < 0) {
        raise(Errc::invalid_spec, "object dot spacing must be non-negative");
    }
    if (mask_params.mutation_fraction < 0.0 || mask_params.mutation_fraction > 1.0) {
        raise(Errc::invalid_spec, "mutation fraction must lie in [0,1]");
    }
    if (white_threshold < 0 || white_threshold > 255) {
        raise(Errc::invalid_spec, "white threshold must lie in [0,255]");
    }
    if (placement.scale <= 0.0 || placement.scale > 1.0) {
        raise(Errc::invalid_spec, "object scale must lie in (0,1]");
    }
    if (placement.anchor_row < 0.0 || placement.anchor_row > 1.0 || placement.anchor_col < 0.0 ||
        placement.anchor_col > 1.0) {
        raise(Errc::invalid_spec, "object anchor must lie in [0,1]");
    }
    for (const ProtectedRegion& p : protected_regions) {
        if (p.top < 0.0 || p.left < 0.0 || p.bottom > 1.0 || p.right > 1.0 || p.top > p.bottom ||
            p.left > p.right) {
            raise(Errc::invalid_spec, "protected region fractions must lie in [0,1]");
        }
    }
    if (!is_valid_language_hint(source_lang)) {
        raise(Errc::invalid_spec, "invalid source language: " + source_lang);
    }
    if (target_lang == "auto" || !is_valid_language_hint(target_lang)) {
        raise(Errc::invalid_spec, "invalid target language: " + target_lang);
    }
}

uint64_t frame_seed(uint64_t run_seed, int frame_index) {
    return hash_combine(run_seed, static_cast<uint64_t>(frame_index));
}

namespace {

constexpr std::string_view kWhiteBackground = "on white background";

bool is_white_pixel(const uint8_t* p, int threshold) {
    return std::min({p[0], p[1], p[2]}) >= threshold;
}

int scaled_extent(double scale, int extent) {
    return std::max(1, static_cast<int>(std::lround(scale * extent)));
}

std::string frame_file_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frame_%04d.png", index);
    return buf;
}

}  // namespace

std::pair<RasterImage, ObjectRegion> init_object(const StoryConfig& config,
                                                 Translator& translator, GenBackend& backend) {
    if (!mode_uses_object(config.mode)) {
        raise(Errc::invalid_args, "init_object requires an object mode");
    }
    std::string title = translator.translate(
        {config.title, config.source_lang, config.target_lang});
    if (title.empty()) raise(Errc::client_error, "title translated to empty text");
    std::string prompt = build_prompt(title, std::nullopt, std::string(kWhiteBackground));

    BackendResult created = backend.create(prompt, config.width, config.height,
                                           hash_combine(config.run_seed, fnv1a64("object.create")));

    // steer the scaled bbox center toward the configured anchor; clamp so
    // the scaled canvas still fits
    ObjectRegion rough = extract_object(created.image, config.white_threshold);
    double center_row = (rough.min_row + rough.max_row + 1) / 2.0;
    double center_col = (rough.min_col + rough.max_col + 1) / 2.0;
    int sw = scaled_extent(config.placement.scale, config.width);
    int sh = scaled_extent(config.placement.scale, config.height);
    int anchor_row = static_cast<int>(
        std::lround(config.placement.anchor_row * config.height - config.placement.scale * center_row));
    int anchor_col = static_cast<int>(
        std::lround(config.placement.anchor_col * config.width - config.placement.scale * center_col));
    anchor_row = std::clamp(anchor_row, 0, config.height - sh);
    anchor_col = std::clamp(anchor_col, 0, config.width - sw);

    RasterImage resized = resize_reposition(created.image, config.placement.scale, anchor_row,
                                            anchor_col);

    // gap fill: fixed border, editable wherever the canvas stayed white
    Mask gap(config.width, config.height, false);
    const int y = config.mask_params.edge_width_y;
    for (int r = y; r < config.height - y; ++r) {
        for (int c = y; c < config.width - y; ++c) {
            if (is_white_pixel(resized.pixel(r, c), config.white_threshold)) {
                gap.set(r, c, true);
            }
        }
    }
    RasterImage filled = resized;
    if (gap.editable_count() > 0) {
        filled = backend
                     .edit(resized, gap, prompt,
                           hash_combine(config.run_seed, fnv1a64("object.fill")))
                     .image;
    }
    ObjectRegion region = extract_object(filled, config.white_threshold);
    return {std::move(filled), std::move(region)};
}

RasterImage init_background(const StoryConfig& config, const std::string& first_chunk_translated,
                            GenBackend& backend, std::string* provider_id) {
    if (provider_id) provider_id->clear();
    if (mode_uses_setting(config.mode)) {
        return *config.setting_image;
    }
    if (first_chunk_translated.empty()) {
        raise(Errc::client_error, "background prompt is empty");
    }
    std::string prompt = build_prompt(first_chunk_translated, config.context_suffix);
    BackendResult created =
        backend.create(prompt, config.width, config.height,
                       hash_combine(config.run_seed, fnv1a64("background.create")));
    if (provider_id) *provider_id = created.provider_id;
    return created.image;
}

Mask frame_mask(const StoryConfig& config, int frame_index,
                const std::optional<ObjectRegion>& region) {
    if (mode_uses_object(config.mode) != region.has_value()) {
        raise(Errc::invalid_args, "object region must be present exactly in object modes");
    }
    uint64_t seed = frame_seed(config.run_seed, frame_index);
    Mask background = dotted_mask(config.width, config.height, config.mask_params.dot_spacing_x,
                                  config.mask_params.edge_width_y, config.mask_params.dot_polarity);
    Mask result = background;
    if (region) {
        Mask object_pixels = mask_from_region(*region);
        Mask mutation =
            object_mutation_mask(*region, config.mask_params, config.protected_regions, seed);
        result = mask_union(mask_subtract(background, object_pixels), mutation);
    }
    if (result.editable_count() == 0) {
        raise(Errc::nothing_editable, "frame mask has no editable pixels");
    }
    return result;
}

namespace {

nlohmann::json frame_to_json(const FrameRecord& rec) {
    nlohmann::json j;
    j["index"] = rec.index;
    j["chunk"] = rec.chunk_text;
    j["translated"] = rec.translated_text;
    j["prompt"] = rec.prompt;
    j["mask"] = {{"recipe", rec.mask.recipe},
                 {"frame_seed", rec.mask.frame_seed},
                 {"editable_count", rec.mask.editable_count}};
    j["file"] = rec.file_name;
    j["provider_id"] = rec.provider_id;
    j["post"] = rec.post_flags;
    j["saturation_scale"] = rec.saturation_scale;
    j["text_boxes"] = rec.text_boxes;
    return j;
}

void write_manifest(const StoryConfig& config, const StoryResult& result,
                    const std::filesystem::path& path) {
    nlohmann::json j;
    j["run_id"] = result.run_id;
    j["created_at"] = iso8601_utc(run_timestamp());
    j["config"] = nlohmann::json::parse(config_echo_json(config));
    j["seed"] = config.run_seed;
    j["status"] = result.status;
    if (result.failed_index >= 0) {
        j["failure"] = {{"frame_index", result.failed_index}, {"message", result.failure}};
    }
    if (!result.warnings.empty()) j["warnings"] = result.warnings;
    j["frames"] = nlohmann::json::array();
    for (const FrameRecord& rec : result.frames) j["frames"].push_back(frame_to_json(rec));

    std::string text = j.dump(2);
    text += '\n';
    FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) raise(Errc::io_error, "cannot write " + path.string());
    size_t written = std::fwrite(text.data(), 1, text.size(), f);
    std::fclose(f);
    if (written != text.size()) raise(Errc::io_error, "short write to " + path.string());
}

}  // namespace

std::string config_echo_json(const StoryConfig& config) {
    nlohmann::json j;
    j["mode"] = mode_name(config.mode);
    if (!config.title.empty()) j["title"] = config.title;
    if (config.context_suffix) j["context-suffix"] = *config.context_suffix;
    if (!config.setting_image_path.empty()) j["setting-image"] = config.setting_image_path;
    j["chunking"] = chunk_method_name(config.chunking.method);
    if (config.chunking.method == ChunkMethod::SentenceWindow) {
        j["window"] = config.chunking.window;
        j["stride"] = config.chunking.stride;
    }
    j["dot-spacing-x"] = config.mask_params.dot_spacing_x;
    j["edge-width-y"] = config.mask_params.edge_width_y;
    j["object-dot-spacing"] = config.mask_params.object_dot_spacing;
    j["mutation-fraction"] = config.mask_params.mutation_fraction;
    j["dot-polarity"] = dot_polarity_name(config.mask_params.dot_polarity);
    if (!config.protected_regions.empty()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const ProtectedRegion& p : config.protected_regions) {
            arr.push_back({{"top", p.top}, {"left", p.left}, {"bottom", p.bottom},
                           {"right", p.right}});
        }
        j["protected"] = arr;
    }
    j["white-threshold"] = config.white_threshold;
    j["object-scale"] = config.placement.scale;
    j["anchor-row"] = config.placement.anchor_row;
    j["anchor-col"] = config.placement.anchor_col;
    j["width"] = config.width;
    j["height"] = config.height;
    j["lang"] = config.source_lang;
    j["target-lang"] = config.target_lang;
    j["seed"] = config.run_seed;
    return j.dump(2);
}

StoryResult run_story(const StoryConfig& config, const std::vector<Chunk>& chunks,
                      Translator& translator, GenBackend& backend, TextDetector& detector,
                      const RunPaths& paths) {
    config.validate();
    if (chunks.empty()) raise(Errc::invalid_args, "need at least one chunk");

    std::error_code ec;
    std::filesystem::create_directories(paths.out_dir, ec);
    if (ec) {
        raise(Errc::io_error, "cannot create " + paths.out_dir.string() + ": " + ec.message());
    }
    std::filesystem::path intermediate_dir = paths.out_dir / "intermediate";
    if (paths.keep_intermediate) {
        std::filesystem::create_directories(intermediate_dir, ec);
        if (ec) {
            raise(Errc::io_error,
                  "cannot create " + intermediate_dir.string() + ": " + ec.message());
        }
    }

    StoryResult result;
    uint64_t rid = fnv1a64(config_echo_json(config));
    rid = hash_combine(rid, config.run_seed);
    for (const Chunk& chunk : chunks) rid = hash_combine(rid, fnv1a64(chunk.text));
    result.run_id = to_hex(rid);
    result.status = "failed";

    int current_index = 0;
    try {
        std::vector<std::string> translated(chunks.size());
        for (size_t i = 0; i < chunks.size(); ++i) {
            current_index = static_cast<int>(i);
            translated[i] = translator.translate(
                {chunks[i].text, config.source_lang, config.target_lang});
        }
        current_index = 0;

        std::optional<ObjectRegion> region;
        RasterImage object_canvas;
        if (mode_uses_object(config.mode)) {
            auto [canvas, object] = init_object(config, translator, backend);
            object_canvas = std::move(canvas);
            region = std::move(object);
            if (paths.keep_intermediate) {
                save_png(object_canvas, (intermediate_dir / "object_canvas.png").string());
            }
        }

        if (translated[0].empty()) {
            raise(Errc::client_error, "chunk 0 translated to empty text");
        }
        std::string provider0;
        RasterImage background = init_background(config, translated[0], backend, &provider0);
        if (paths.keep_intermediate) {
            save_png(background, (intermediate_dir / "background.png").string());
        }

        RasterImage frame0 = region ? composite_over(object_canvas, *region, background, 0, 0)
                                    : background;
        std::vector<TextBox> boxes0 = detector.detect(frame0);
        RasterImage reference = inpaint(frame0, boxes0);

        FrameRecord rec0;
        rec0.index = 0;
        rec0.chunk_text = chunks[0].text;
        rec0.translated_text = translated[0];
        rec0.prompt = build_prompt(translated[0], config.context_suffix);
        rec0.mask = {"none", frame_seed(config.run_seed, 0), 0};
        rec0.file_name = frame_file_name(0);
        rec0.provider_id = provider0;
        rec0.post_flags = {"text_removal"};
        rec0.saturation_scale = 1.0;
        rec0.text_boxes = static_cast<int>(boxes0.size());
        save_png(reference, (paths.out_dir / rec0.file_name).string());
        result.frames.push_back(std::move(rec0));

        RasterImage previous = reference;
        for (size_t i = 1; i < chunks.size(); ++i) {
            current_index = static_cast<int>(i);
            FrameRecord rec;
            rec.index = static_cast<int>(i);
            rec.chunk_text = chunks[i].text;
            rec.translated_text = translated[i];
            rec.file_name = frame_file_name(static_cast<int>(i));
            uint64_t seed = frame_seed(config.run_seed, static_cast<int>(i));

            if (translated[i].empty()) {
                result.warnings.push_back("chunk " + std::to_string(i) +
                                          " translated to empty text; frame repeats frame " +
                                          std::to_string(i - 1));
                rec.mask = {"skipped", seed, 0};
                rec.post_flags = {"skipped"};
                save_png(previous, (paths.out_dir / rec.file_name).string());
                result.frames.push_back(std::move(rec));
                continue;
            }

            rec.prompt = build_prompt(translated[i], config.context_suffix);
            Mask mask = frame_mask(config, static_cast<int>(i), region);
            rec.mask = {region ? "object-union" : "dotted", seed, mask.editable_count()};

            BackendResult edited = backend.edit(previous, mask, rec.prompt, seed);
            rec.provider_id = edited.provider_id;

            std::vector<TextBox> boxes = detector.detect(edited.image);
            rec.text_boxes = static_cast<int>(boxes.size());
            RasterImage inpainted = inpaint(edited.image, boxes);

            double scale = 1.0;
            RasterImage matched = match_saturation(inpainted, reference, &scale);
            rec.saturation_scale = scale;
            rec.post_flags = {"text_removal", "saturation_match"};

            save_png(matched, (paths.out_dir / rec.file_name).string());
            result.frames.push_back(std::move(rec));
            previous = std::move(matched);
        }
    } catch (const Error& e) {
        result.failed_index = current_index;
        result.failure = e.what();
        write_manifest(config, result, paths.out_dir / "manifest.json");
        throw;
    }

    result.status = "completed";
    write_manifest(config, result, paths.out_dir / "manifest.json");
    return result;
}

}  // namespace storyframes
