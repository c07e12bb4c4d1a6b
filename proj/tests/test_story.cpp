#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "storyframes/pipeline.hpp"
#include "storyframes/story.hpp"
#include "storyframes/util.hpp"
#include "test_support.hpp"

using namespace storyframes;
namespace fs = std::filesystem;

namespace {

// Delegates to the mock backend while keeping a log of every request.
class RecordingBackend : public GenBackend {
public:
    struct Call {
        GenKind kind;
        std::string prompt;
        uint64_t seed;
    };
    std::vector<Call> calls;

    int creates() const {
        int n = 0;
        for (const auto& c : calls) n += c.kind == GenKind::Create;
        return n;
    }
    int edits() const { return static_cast<int>(calls.size()) - creates(); }

protected:
    BackendResult dispatch(const GenRequest& req) override {
        calls.push_back({req.kind, req.prompt, req.request_seed});
        return mock_.run(req);
    }

private:
    MockBackend mock_;
};

class FailingBackend : public GenBackend {
public:
    explicit FailingBackend(int fail_after) : fail_after_(fail_after) {}

protected:
    BackendResult dispatch(const GenRequest& req) override {
        if (count_++ >= fail_after_) raise(Errc::provider_error, "scripted backend failure");
        return mock_.run(req);
    }

private:
    int fail_after_;
    int count_ = 0;
    MockBackend mock_;
};

Translator passthrough_translator() {
    return Translator(std::make_shared<MockTranslationClient>(
        std::unordered_map<std::string, std::string>{}, true));
}

std::vector<Chunk> make_chunks(const std::vector<std::string>& texts) {
    std::vector<Chunk> chunks;
    for (size_t i = 0; i < texts.size(); ++i) {
        chunks.push_back({static_cast<int>(i), texts[i], static_cast<int>(i),
                          static_cast<int>(i)});
    }
    return chunks;
}

StoryConfig base_config() {
    StoryConfig config;
    config.run_seed = 11;
    config.source_lang = "he";
    config.target_lang = "en";
    return config;
}

ObjectRegion rect_region(int w, int h, int top, int left, int bottom, int right) {
    ObjectRegion region;
    region.width = w;
    region.height = h;
    region.pixel_mask.assign(static_cast<size_t>(w) * h, 0);
    for (int r = top; r <= bottom; ++r) {
        for (int c = left; c <= right; ++c) {
            region.pixel_mask[static_cast<size_t>(r) * w + c] = 1;
        }
    }
    region.min_row = top;
    region.min_col = left;
    region.max_row = bottom;
    region.max_col = right;
    return region;
}

nlohmann::json read_manifest(const fs::path& dir) {
    auto doc = nlohmann::json::parse(testsupport::slurp(dir / "manifest.json"), nullptr, false);
    REQUIRE_FALSE(doc.is_discarded());
    return doc;
}

}  // namespace

TEST_CASE("frame_seed derives distinct reproducible seeds") {
    CHECK(frame_seed(1, 0) == frame_seed(1, 0));
    CHECK(frame_seed(1, 0) != frame_seed(1, 1));
    CHECK(frame_seed(1, 0) != frame_seed(2, 0));
}

TEST_CASE("mode helpers") {
    CHECK(mode_uses_object(StoryMode::FreeObject));
    CHECK(mode_uses_object(StoryMode::DefinedSettingAndObject));
    CHECK_FALSE(mode_uses_object(StoryMode::Plain));
    CHECK(mode_uses_setting(StoryMode::DefinedSetting));
    CHECK_FALSE(mode_uses_setting(StoryMode::FreeObject));
    CHECK(mode_from_name("free-object") == StoryMode::FreeObject);
    CHECK(mode_from_name(mode_name(StoryMode::DefinedSettingAndObject)) ==
          StoryMode::DefinedSettingAndObject);
    CHECK_FALSE(mode_from_name("fancy").has_value());
}

TEST_CASE("config validation rejects inconsistent setups") {
    auto expect_invalid = [](StoryConfig config) {
        try {
            config.validate();
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::invalid_spec);
        }
    };

    StoryConfig object_no_title = base_config();
    object_no_title.mode = StoryMode::FreeObject;
    expect_invalid(object_no_title);

    StoryConfig setting_no_image = base_config();
    setting_no_image.mode = StoryMode::DefinedSetting;
    expect_invalid(setting_no_image);

    StoryConfig wrong_size = base_config();
    wrong_size.mode = StoryMode::DefinedSetting;
    wrong_size.setting_image = RasterImage::filled(100, 100, 9, 9, 9);
    expect_invalid(wrong_size);

    StoryConfig bad_fraction = base_config();
    bad_fraction.mask_params.mutation_fraction = 1.5;
    expect_invalid(bad_fraction);

    StoryConfig fat_edge = base_config();
    fat_edge.mask_params.edge_width_y = 128;
    expect_invalid(fat_edge);

    StoryConfig bad_scale = base_config();
    bad_scale.placement.scale = 0.0;
    expect_invalid(bad_scale);

    StoryConfig bad_target = base_config();
    bad_target.target_lang = "auto";
    expect_invalid(bad_target);

    base_config().validate();  // the baseline itself is fine
}

TEST_CASE("frame_mask without an object is the dotted background") {
    StoryConfig config = base_config();
    Mask expected = dotted_mask(256, 256, 4, 16, DotPolarity::DotsEditable);
    CHECK(frame_mask(config, 3, std::nullopt) == expected);
    CHECK(frame_mask(config, 4, std::nullopt) == expected);  // frame-invariant

    config.mask_params.dot_polarity = DotPolarity::DotsFixed;
    CHECK(frame_mask(config, 1, std::nullopt) ==
          dotted_mask(256, 256, 4, 16, DotPolarity::DotsFixed));
}

TEST_CASE("frame_mask in object mode follows the union formula") {
    StoryConfig config = base_config();
    config.mode = StoryMode::FreeObject;
    config.title = "עכביש";
    config.protected_regions = {{0.0, 0.0, 0.25, 1.0}};
    ObjectRegion region = rect_region(256, 256, 120, 90, 210, 180);

    for (int i : {1, 2, 5}) {
        Mask got = frame_mask(config, i, region);
        Mask background = dotted_mask(256, 256, config.mask_params.dot_spacing_x,
                                      config.mask_params.edge_width_y,
                                      config.mask_params.dot_polarity);
        Mask mutation = object_mutation_mask(region, config.mask_params,
                                             config.protected_regions,
                                             frame_seed(config.run_seed, i));
        Mask expected = mask_union(mask_subtract(background, mask_from_region(region)), mutation);
        CHECK(got == expected);

        // structure: in-object editables come only from the mutation mask
        for (int r = 0; r < 256; ++r) {
            for (int c = 0; c < 256; ++c) {
                if (!got.editable(r, c)) continue;
                if (region.contains(r, c)) {
                    REQUIRE(mutation.editable(r, c));
                } else {
                    REQUIRE(background.editable(r, c));
                }
            }
        }
    }
    // different frames draw different mutation rectangles
    CHECK_FALSE(frame_mask(config, 1, region) == frame_mask(config, 2, region));
}

TEST_CASE("frame_mask demands consistency between mode and region") {
    StoryConfig plain = base_config();
    ObjectRegion region = rect_region(256, 256, 10, 10, 20, 20);
    try {
        frame_mask(plain, 1, region);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::invalid_args);
    }
    StoryConfig object_mode = base_config();
    object_mode.mode = StoryMode::FreeObject;
    object_mode.title = "t";
    CHECK_THROWS_AS(frame_mask(object_mode, 1, std::nullopt), Error);
}

TEST_CASE("frame_mask raises when nothing is editable") {
    StoryConfig config = base_config();
    config.mode = StoryMode::FreeObject;
    config.title = "t";
    config.mask_params.dot_polarity = DotPolarity::DotsFixed;
    config.mask_params.dot_spacing_x = 1;  // every interior pixel is a fixed dot
    config.mask_params.mutation_fraction = 0.0;
    config.mask_params.object_dot_spacing = 0;
    ObjectRegion region = rect_region(256, 256, 50, 50, 80, 80);
    try {
        frame_mask(config, 1, region);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::nothing_editable);
    }
}

TEST_CASE("init_object builds a deterministic non-empty object") {
    StoryConfig config = base_config();
    config.mode = StoryMode::FreeObject;
    config.title = "עכביש";

    auto client = std::make_shared<MockTranslationClient>();
    client->add("עכביש", "spider");
    Translator translator(client);
    MockBackend backend;

    auto [canvas, region] = init_object(config, translator, backend);
    CHECK(canvas.width() == 256);
    CHECK(canvas.height() == 256);
    CHECK(region.pixel_count() > 0);
    CHECK(region.min_row >= 0);
    CHECK(region.max_row < 256);

    Translator translator2(client);
    auto [canvas2, region2] = init_object(config, translator2, backend);
    CHECK(canvas == canvas2);
    CHECK(region.pixel_mask == region2.pixel_mask);

    StoryConfig plain = base_config();
    Translator translator3(client);
    CHECK_THROWS_AS(init_object(plain, translator3, backend), Error);
}

TEST_CASE("init_background returns the setting image untouched") {
    StoryConfig config = base_config();
    config.mode = StoryMode::DefinedSetting;
    config.setting_image = RasterImage::filled(256, 256, 12, 34, 56);
    RecordingBackend backend;
    std::string provider = "stale";
    RasterImage bg = init_background(config, "anything", backend, &provider);
    CHECK(bg == *config.setting_image);
    CHECK(backend.calls.empty());
    CHECK(provider.empty());
}

TEST_CASE("init_background generates from the first chunk prompt plus suffix") {
    StoryConfig config = base_config();
    config.context_suffix = "soft watercolor";
    RecordingBackend backend;
    std::string provider;
    RasterImage bg = init_background(config, "A spider climbs.", backend, &provider);
    CHECK(bg.width() == 256);
    REQUIRE(backend.calls.size() == 1);
    CHECK(backend.calls[0].kind == GenKind::Create);
    CHECK(backend.calls[0].prompt == "A spider climbs., soft watercolor");
    CHECK_FALSE(provider.empty());

    try {
        init_background(config, "", backend, nullptr);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::client_error);
    }
}

TEST_CASE("run_story with one chunk makes one frame and no edit calls") {
    auto dir = testsupport::fresh_dir("story_one");
    StoryConfig config = base_config();
    Translator translator = passthrough_translator();
    RecordingBackend backend;
    NullDetector detector;

    StoryResult result =
        run_story(config, make_chunks({"שלום עולם"}), translator, backend, detector, {dir});
    CHECK(result.status == "completed");
    REQUIRE(result.frames.size() == 1);
    CHECK(result.frames[0].post_flags == std::vector<std::string>{"text_removal"});
    CHECK(result.frames[0].saturation_scale == doctest::Approx(1.0));
    CHECK(backend.creates() == 1);
    CHECK(backend.edits() == 0);
    CHECK(fs::exists(dir / "frame_0000.png"));
    CHECK(fs::exists(dir / "manifest.json"));

    auto manifest = read_manifest(dir);
    CHECK(manifest["status"] == "completed");
    CHECK(manifest["frames"].size() == 1);
    CHECK(manifest["seed"] == 11);
    CHECK(manifest["run_id"] == result.run_id);
}

TEST_CASE("run_story chains edits and reruns byte-identically") {
    setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
    auto dir_a = testsupport::fresh_dir("story_a");
    auto dir_b = testsupport::fresh_dir("story_b");
    StoryConfig config = base_config();
    auto chunks = make_chunks({"אחת", "שתיים", "שלוש"});
    NullDetector detector;

    for (const auto& dir : {dir_a, dir_b}) {
        Translator translator = passthrough_translator();
        MockBackend backend;
        StoryResult result = run_story(config, chunks, translator, backend, detector, {dir});
        CHECK(result.status == "completed");
        CHECK(result.frames.size() == 3);
        for (int i = 1; i < 3; ++i) {
            CHECK(result.frames[i].mask.recipe == "dotted");
            CHECK(result.frames[i].mask.editable_count == 3136);
            CHECK(result.frames[i].post_flags ==
                  std::vector<std::string>{"text_removal", "saturation_match"});
        }
    }
    for (const char* name : {"frame_0000.png", "frame_0001.png", "frame_0002.png",
                             "manifest.json"}) {
        CHECK(testsupport::slurp(dir_a / name) == testsupport::slurp(dir_b / name));
    }
    unsetenv("SOURCE_DATE_EPOCH");
}

TEST_CASE("run_story repeats the previous frame when a translation is empty") {
    auto dir = testsupport::fresh_dir("story_skip");
    StoryConfig config = base_config();
    auto client = std::make_shared<MockTranslationClient>();
    client->add("אחת", "one");
    client->add("שתיים", "");
    client->add("שלוש", "three");
    Translator translator(client);
    MockBackend backend;
    NullDetector detector;

    StoryResult result = run_story(config, make_chunks({"אחת", "שתיים", "שלוש"}), translator,
                                   backend, detector, {dir});
    CHECK(result.status == "completed");
    REQUIRE(result.frames.size() == 3);
    CHECK(result.frames[1].mask.recipe == "skipped");
    CHECK(result.frames[1].post_flags == std::vector<std::string>{"skipped"});
    CHECK(result.frames[1].prompt.empty());
    REQUIRE(result.warnings.size() == 1);
    CHECK(result.warnings[0].find("chunk 1") != std::string::npos);
    CHECK(testsupport::slurp(dir / "frame_0001.png") ==
          testsupport::slurp(dir / "frame_0000.png"));
    CHECK_FALSE(testsupport::slurp(dir / "frame_0002.png") ==
                testsupport::slurp(dir / "frame_0001.png"));

    auto manifest = read_manifest(dir);
    REQUIRE(manifest.contains("warnings"));
    CHECK(manifest["warnings"].size() == 1);
}

TEST_CASE("run_story fails frame 0 when the first translation is empty") {
    auto dir = testsupport::fresh_dir("story_empty0");
    StoryConfig config = base_config();
    auto client = std::make_shared<MockTranslationClient>();
    client->add("ריק", "");
    Translator translator(client);
    MockBackend backend;
    NullDetector detector;

    CHECK_THROWS_AS(
        run_story(config, make_chunks({"ריק"}), translator, backend, detector, {dir}), Error);
    auto manifest = read_manifest(dir);
    CHECK(manifest["status"] == "failed");
    CHECK(manifest["failure"]["frame_index"] == 0);
}

TEST_CASE("run_story writes a failed manifest when the backend dies mid-run") {
    auto dir = testsupport::fresh_dir("story_fail");
    StoryConfig config = base_config();
    Translator translator = passthrough_translator();
    FailingBackend backend(2);  // background + one edit succeed
    NullDetector detector;

    try {
        run_story(config, make_chunks({"a", "b", "c", "d"}), translator, backend, detector,
                  {dir});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::provider_error);
        CHECK(e.stage() == ErrStage::backend);
    }
    CHECK(fs::exists(dir / "frame_0000.png"));
    CHECK(fs::exists(dir / "frame_0001.png"));
    CHECK_FALSE(fs::exists(dir / "frame_0002.png"));

    auto manifest = read_manifest(dir);
    CHECK(manifest["status"] == "failed");
    CHECK(manifest["failure"]["frame_index"] == 2);
    CHECK(manifest["frames"].size() == 2);
}

TEST_CASE("run_story fails before any backend call on an untranslatable chunk") {
    auto dir = testsupport::fresh_dir("story_unknown");
    StoryConfig config = base_config();
    auto client = std::make_shared<MockTranslationClient>();
    client->add("ידוע", "known");
    Translator translator(client);
    RecordingBackend backend;
    NullDetector detector;

    try {
        run_story(config, make_chunks({"ידוע", "לא ידוע"}), translator, backend, detector,
                  {dir});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::unknown_text);
    }
    CHECK(backend.calls.empty());
    auto manifest = read_manifest(dir);
    CHECK(manifest["status"] == "failed");
    CHECK(manifest["failure"]["frame_index"] == 1);
    CHECK(manifest["frames"].empty());
}

TEST_CASE("every mode produces one frame per chunk") {
    MockBackend image_source;
    RasterImage setting = image_source.create("a quiet porch", 256, 256, 99).image;
    auto chunks = make_chunks({"אחת", "שתיים", "שלוש"});
    NullDetector detector;

    for (StoryMode mode : {StoryMode::Plain, StoryMode::FreeObject, StoryMode::DefinedSetting,
                           StoryMode::DefinedSettingAndObject}) {
        auto dir = testsupport::fresh_dir(std::string("story_mode_") + mode_name(mode));
        StoryConfig config = base_config();
        config.mode = mode;
        if (mode_uses_object(mode)) config.title = "עכביש";
        if (mode_uses_setting(mode)) config.setting_image = setting;
        Translator translator = passthrough_translator();
        MockBackend backend;

        StoryResult result = run_story(config, chunks, translator, backend, detector, {dir});
        CHECK(result.status == "completed");
        CHECK(result.frames.size() == chunks.size());
        for (size_t i = 0; i < chunks.size(); ++i) {
            CHECK(result.frames[i].index == static_cast<int>(i));
            CHECK(fs::exists(dir / result.frames[i].file_name));
            if (i > 0) {
                CHECK(result.frames[i].mask.recipe ==
                      (mode_uses_object(mode) ? "object-union" : "dotted"));
                CHECK(result.frames[i].mask.editable_count > 0);
            }
        }
    }
}

TEST_CASE("keep_intermediate saves the construction images") {
    auto dir = testsupport::fresh_dir("story_keep");
    StoryConfig config = base_config();
    config.mode = StoryMode::FreeObject;
    config.title = "עכביש";
    Translator translator = passthrough_translator();
    MockBackend backend;
    NullDetector detector;

    RunPaths paths;
    paths.out_dir = dir;
    paths.keep_intermediate = true;
    run_story(config, make_chunks({"אחת", "שתיים"}), translator, backend, detector, paths);
    CHECK(fs::exists(dir / "intermediate" / "object_canvas.png"));
    CHECK(fs::exists(dir / "intermediate" / "background.png"));
}

TEST_CASE("fixture detector boxes show up in the records") {
    auto dir = testsupport::fresh_dir("story_boxes");
    StoryConfig config = base_config();
    Translator translator = passthrough_translator();
    MockBackend backend;
    FixtureDetector detector({{5, 5, 20, 60}, {200, 10, 220, 100}});

    StoryResult result = run_story(config, make_chunks({"אחת", "שתיים"}), translator, backend,
                                   detector, {dir});
    CHECK(result.frames[0].text_boxes == 2);
    CHECK(result.frames[1].text_boxes == 2);
    CHECK(result.frames[1].post_flags ==
          std::vector<std::string>{"text_removal", "saturation_match"});
}

TEST_CASE("manifest config echo can seed a new run") {
    StoryConfig config = base_config();
    config.mode = StoryMode::FreeObject;
    config.title = "עכביש";
    config.context_suffix = "ink drawing";
    config.protected_regions = {{0.1, 0.1, 0.9, 0.9}};
    std::string echo = config_echo_json(config);

    auto doc = nlohmann::json::parse(echo);
    CHECK(doc["mode"] == "free-object");
    CHECK(doc["title"] == "עכביש");
    CHECK(doc["chunking"] == "by-line");
    CHECK(doc["dot-spacing-x"] == 4);
    CHECK(doc["seed"] == 11);

    // the echo plus an input selector and out dir is a valid options object
    doc["text"] = "שורה אחת";
    doc["out"] = "somewhere";
    RunOptions opts = options_from_json(doc.dump());
    CHECK(opts.story.mode == StoryMode::FreeObject);
    CHECK(opts.story.title == config.title);
    CHECK(opts.story.run_seed == 11);
    CHECK(opts.story.protected_regions.size() == 1);
    CHECK(opts.story.protected_regions[0].top == doctest::Approx(0.1));
}

TEST_CASE("options_from_json validates the schema") {
    CHECK_THROWS_AS(options_from_json("not json"), Error);
    CHECK_THROWS_AS(options_from_json("[]"), Error);
    // unknown key
    CHECK_THROWS_AS(options_from_json(R"({"text":"x","out":"d","bogus":1})"), Error);
    // zero and two input selectors
    CHECK_THROWS_AS(options_from_json(R"({"out":"d"})"), Error);
    CHECK_THROWS_AS(options_from_json(R"({"text":"x","file":"y","out":"d"})"), Error);
    // missing out
    CHECK_THROWS_AS(options_from_json(R"({"text":"x"})"), Error);
    // bad enum values
    CHECK_THROWS_AS(options_from_json(R"({"text":"x","out":"d","mode":"feathered"})"), Error);
    CHECK_THROWS_AS(options_from_json(R"({"text":"x","out":"d","backend":"dalle"})"), Error);
    CHECK_THROWS_AS(options_from_json(R"({"text":"x","out":"d","chunking":"by-word"})"), Error);
    CHECK_THROWS_AS(options_from_json(R"({"text":"x","out":"d","seed":-4})"), Error);
    CHECK_THROWS_AS(
        options_from_json(R"({"text":"x","out":"d","detector":"fixture"})"), Error);

    RunOptions opts = options_from_json(
        R"({"text":"x","out":"d","seed":7,"mode":"plain","dot-polarity":"dots-fixed",
            "protected":[[0,0,0.5,1],{"top":0.2}],"keep-intermediate":true})");
    CHECK(opts.story.run_seed == 7);
    CHECK(opts.story.mask_params.dot_polarity == DotPolarity::DotsFixed);
    REQUIRE(opts.story.protected_regions.size() == 2);
    CHECK(opts.story.protected_regions[1].top == doctest::Approx(0.2));
    CHECK(opts.story.protected_regions[1].bottom == doctest::Approx(1.0));
    CHECK(opts.keep_intermediate);
}

TEST_CASE("run_pipeline drives ingest through run_story") {
    auto dir = testsupport::fresh_dir("pipeline");
    nlohmann::json options = {
        {"text", "שלום עולם.\nבית קטן."},
        {"out", (dir / "run").string()},
        {"seed", 5},
    };
    StoryResult result = run_pipeline(options_from_json(options.dump()));
    CHECK(result.status == "completed");
    CHECK(result.frames.size() == 2);
    CHECK(fs::exists(dir / "run" / "frame_0001.png"));
    CHECK(result.frames[0].chunk_text == "שלום עולם.");
}
