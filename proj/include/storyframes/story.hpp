#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "storyframes/backend.hpp"
#include "storyframes/detector.hpp"
#include "storyframes/image.hpp"
#include "storyframes/mask.hpp"
#include "storyframes/text.hpp"
#include "storyframes/translate.hpp"

namespace storyframes {

enum class StoryMode { Plain, FreeObject, DefinedSetting, DefinedSettingAndObject };

bool mode_uses_object(StoryMode mode);
bool mode_uses_setting(StoryMode mode);
const char* mode_name(StoryMode mode);
std::optional<StoryMode> mode_from_name(std::string_view name);

// Where the dominant object lands: the scaled object's bbox center is
// steered toward (anchor_row·H, anchor_col·W), clamped so the scaled
// canvas stays inside the frame.
struct ObjectPlacement {
    double scale = 0.6;
    double anchor_row = 0.62;
    double anchor_col = 0.5;
};

struct StoryConfig {
    StoryMode mode = StoryMode::Plain;
    std::string title;
    std::optional<std::string> context_suffix;
    std::optional<RasterImage> setting_image;
    std::string setting_image_path;  // echoed in the manifest instead of bytes
    ChunkingSpec chunking;
    MaskParams mask_params;
    std::vector<ProtectedRegion> protected_regions;
    int white_threshold = 245;
    ObjectPlacement placement;
    uint64_t run_seed = 0;
    int width = 256;
    int height = 256;
    std::string source_lang = "auto";
    std::string target_lang = "en";

    void validate() const;
};

struct MaskDescriptor {
    std::string recipe;  // "none", "dotted", "object-union", "skipped"
    uint64_t frame_seed = 0;
    std::size_t editable_count = 0;
};

struct FrameRecord {
    int index = 0;
    std::string chunk_text;
    std::string translated_text;
    std::string prompt;
    MaskDescriptor mask;
    std::string file_name;
    std::string provider_id;
    std::vector<std::string> post_flags;
    double saturation_scale = 1.0;
    int text_boxes = 0;
};

struct StoryResult {
    std::string run_id;
    std::string status;  // "completed" or "failed"
    std::vector<FrameRecord> frames;
    std::vector<std::string> warnings;
    int failed_index = -1;
    std::string failure;
};

struct RunPaths {
    std::filesystem::path out_dir;
    bool keep_intermediate = false;
};

uint64_t frame_seed(uint64_t run_seed, int frame_index);

// Object pipeline: title prompt on a white background, scaled and
// repositioned, gap-filled against the fixed border, then extracted.
std::pair<RasterImage, ObjectRegion> init_object(const StoryConfig& config,
                                                 Translator& translator, GenBackend& backend);

// Setting modes return the provided setting image; everything else
// generates a background from the first chunk's prompt plus the context
// suffix. provider_id (optional) receives the backend id of that call.
RasterImage init_background(const StoryConfig& config, const std::string& first_chunk_translated,
                            GenBackend& backend, std::string* provider_id = nullptr);

Mask frame_mask(const StoryConfig& config, int frame_index,
                const std::optional<ObjectRegion>& region);

// Runs the whole frame loop, writing frame_NNNN.png files and
// manifest.json under paths.out_dir as it goes. A translator or backend
// failure still writes the manifest (status "failed", with the failing
// frame index) before the error propagates.
StoryResult run_story(const StoryConfig& config, const std::vector<Chunk>& chunks,
                      Translator& translator, GenBackend& backend, TextDetector& detector,
                      const RunPaths& paths);

// Manifest config echo, reusable as a run config file.
std::string config_echo_json(const StoryConfig& config);

}  // namespace storyframes
