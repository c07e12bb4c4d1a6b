#include "storyframes/pipeline.hpp"

#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include <json.hpp>

namespace storyframes {

namespace {

using nlohmann::json;

std::string slurp(const std::string& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::invalid_args, std::string(what) + " file is unreadable: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string want_string(const json& v, const std::string& key) {
    if (!v.is_string()) raise(Errc::invalid_args, "option \"" + key + "\" must be a string");
    return v.get<std::string>();
}

int want_int(const json& v, const std::string& key) {
    if (!v.is_number_integer()) raise(Errc::invalid_args, "option \"" + key + "\" must be an integer");
    return v.get<int>();
}

double want_number(const json& v, const std::string& key) {
    if (!v.is_number()) raise(Errc::invalid_args, "option \"" + key + "\" must be a number");
    return v.get<double>();
}

bool want_bool(const json& v, const std::string& key) {
    if (!v.is_boolean()) raise(Errc::invalid_args, "option \"" + key + "\" must be a boolean");
    return v.get<bool>();
}

uint64_t want_seed(const json& v, const std::string& key) {
    if (v.is_number_unsigned()) return v.get<uint64_t>();
    if (v.is_number_integer() && v.get<int64_t>() >= 0) {
        return static_cast<uint64_t>(v.get<int64_t>());
    }
    raise(Errc::invalid_args, "option \"" + key + "\" must be a non-negative integer");
}

ProtectedRegion parse_protected(const json& item) {
    ProtectedRegion p;
    if (item.is_array() && item.size() == 4) {
        p.top = want_number(item[0], "protected");
        p.left = want_number(item[1], "protected");
        p.bottom = want_number(item[2], "protected");
        p.right = want_number(item[3], "protected");
        return p;
    }
    if (item.is_object()) {
        p.top = item.contains("top") ? want_number(item["top"], "protected.top") : 0.0;
        p.left = item.contains("left") ? want_number(item["left"], "protected.left") : 0.0;
        p.bottom = item.contains("bottom") ? want_number(item["bottom"], "protected.bottom") : 1.0;
        p.right = item.contains("right") ? want_number(item["right"], "protected.right") : 1.0;
        return p;
    }
    raise(Errc::invalid_args,
          "each protected region must be {top,left,bottom,right} or a 4-number array");
}

const std::set<std::string>& known_option_keys() {
    static const std::set<std::string> keys = {
        "text", "file", "url", "lang", "target-lang",
        "backend", "backend-endpoint", "model", "max-in-flight",
        "translator", "translator-endpoint",
        "detector", "detector-endpoint",
        "out", "keep-intermediate", "seed",
        "mode", "title", "context-suffix", "setting-image",
        "chunking", "window", "stride",
        "dot-spacing-x", "edge-width-y", "object-dot-spacing",
        "mutation-fraction", "dot-polarity", "protected",
        "white-threshold", "object-scale", "anchor-row", "anchor-col",
        "width", "height",
    };
    return keys;
}

// "mock:table.json" -> ("mock", "table.json")
std::pair<std::string, std::string> split_kind(const std::string& value) {
    size_t colon = value.find(':');
    if (colon == std::string::npos) return {value, ""};
    return {value.substr(0, colon), value.substr(colon + 1)};
}

}  // namespace

RunOptions options_from_json(const std::string& json_text) {
    json doc = json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        raise(Errc::invalid_args, "options must be a JSON object");
    }
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (!known_option_keys().count(key)) {
            raise(Errc::invalid_args, "unknown option \"" + key + "\"");
        }
    }

    RunOptions opt;

    int selectors = static_cast<int>(doc.contains("text")) + static_cast<int>(doc.contains("file")) +
                    static_cast<int>(doc.contains("url"));
    if (selectors != 1) {
        raise(Errc::invalid_args, "exactly one of \"text\", \"file\", \"url\" must be given");
    }
    if (doc.contains("text")) {
        opt.source.origin = SourceOrigin::InlineString;
        opt.source.value = want_string(doc["text"], "text");
    } else if (doc.contains("file")) {
        opt.source.origin = SourceOrigin::TextFile;
        opt.source.value = want_string(doc["file"], "file");
    } else {
        opt.source.origin = SourceOrigin::Url;
        opt.source.value = want_string(doc["url"], "url");
    }

    if (doc.contains("lang")) {
        std::string lang = want_string(doc["lang"], "lang");
        if (!is_valid_language_hint(lang)) {
            raise(Errc::invalid_args, "invalid language hint: " + lang);
        }
        opt.source.language_hint = lang;
        opt.story.source_lang = lang;
    }
    if (doc.contains("target-lang")) {
        opt.story.target_lang = want_string(doc["target-lang"], "target-lang");
    }

    if (!doc.contains("out")) raise(Errc::invalid_args, "option \"out\" is required");
    opt.out_dir = want_string(doc["out"], "out");
    if (opt.out_dir.empty()) raise(Errc::invalid_args, "option \"out\" must not be empty");
    if (doc.contains("keep-intermediate")) {
        opt.keep_intermediate = want_bool(doc["keep-intermediate"], "keep-intermediate");
    }
    if (doc.contains("seed")) opt.story.run_seed = want_seed(doc["seed"], "seed");

    if (doc.contains("backend")) {
        opt.backend_kind = want_string(doc["backend"], "backend");
        if (opt.backend_kind != "mock" && opt.backend_kind != "remote") {
            raise(Errc::invalid_args, "backend must be \"mock\" or \"remote\"");
        }
    }
    if (doc.contains("backend-endpoint")) {
        opt.backend_endpoint = want_string(doc["backend-endpoint"], "backend-endpoint");
    }
    if (doc.contains("model")) opt.backend_model = want_string(doc["model"], "model");
    if (doc.contains("max-in-flight")) {
        opt.max_in_flight = want_int(doc["max-in-flight"], "max-in-flight");
        if (opt.max_in_flight < 1) raise(Errc::invalid_args, "max-in-flight must be at least 1");
    }

    if (doc.contains("translator")) {
        auto [kind, arg] = split_kind(want_string(doc["translator"], "translator"));
        if (kind != "mock" && kind != "remote") {
            raise(Errc::invalid_args, "translator must be \"mock[:table.json]\" or \"remote\"");
        }
        opt.translator_kind = kind;
        opt.translator_table = arg;
    }
    if (doc.contains("translator-endpoint")) {
        opt.translator_endpoint = want_string(doc["translator-endpoint"], "translator-endpoint");
    }

    if (doc.contains("detector")) {
        auto [kind, arg] = split_kind(want_string(doc["detector"], "detector"));
        if (kind != "null" && kind != "fixture" && kind != "remote") {
            raise(Errc::invalid_args,
                  "detector must be \"null\", \"fixture:boxes.json\" or \"remote\"");
        }
        if (kind == "fixture" && arg.empty()) {
            raise(Errc::invalid_args, "fixture detector needs a boxes file");
        }
        opt.detector_kind = kind;
        opt.detector_fixture = arg;
    }
    if (doc.contains("detector-endpoint")) {
        opt.detector_endpoint = want_string(doc["detector-endpoint"], "detector-endpoint");
    }

    if (doc.contains("mode")) {
        std::string name = want_string(doc["mode"], "mode");
        auto mode = mode_from_name(name);
        if (!mode) raise(Errc::invalid_args, "unknown mode \"" + name + "\"");
        opt.story.mode = *mode;
    }
    if (doc.contains("title")) opt.story.title = want_string(doc["title"], "title");
    if (doc.contains("context-suffix")) {
        opt.story.context_suffix = want_string(doc["context-suffix"], "context-suffix");
    }
    if (doc.contains("setting-image")) {
        opt.story.setting_image_path = want_string(doc["setting-image"], "setting-image");
    }

    if (doc.contains("chunking")) {
        std::string name = want_string(doc["chunking"], "chunking");
        auto method = chunk_method_from_name(name);
        if (!method) raise(Errc::invalid_args, "unknown chunking method \"" + name + "\"");
        opt.story.chunking.method = *method;
    }
    if (doc.contains("window")) opt.story.chunking.window = want_int(doc["window"], "window");
    if (doc.contains("stride")) opt.story.chunking.stride = want_int(doc["stride"], "stride");

    if (doc.contains("dot-spacing-x")) {
        opt.story.mask_params.dot_spacing_x = want_int(doc["dot-spacing-x"], "dot-spacing-x");
    }
    if (doc.contains("edge-width-y")) {
        opt.story.mask_params.edge_width_y = want_int(doc["edge-width-y"], "edge-width-y");
    }
    if (doc.contains("object-dot-spacing")) {
        opt.story.mask_params.object_dot_spacing =
            want_int(doc["object-dot-spacing"], "object-dot-spacing");
    }
    if (doc.contains("mutation-fraction")) {
        opt.story.mask_params.mutation_fraction =
            want_number(doc["mutation-fraction"], "mutation-fraction");
    }
    if (doc.contains("dot-polarity")) {
        std::string name = want_string(doc["dot-polarity"], "dot-polarity");
        auto polarity = dot_polarity_from_name(name);
        if (!polarity) raise(Errc::invalid_args, "unknown dot polarity \"" + name + "\"");
        opt.story.mask_params.dot_polarity = *polarity;
    }
    if (doc.contains("protected")) {
        if (!doc["protected"].is_array()) {
            raise(Errc::invalid_args, "option \"protected\" must be an array");
        }
        for (const auto& item : doc["protected"]) {
            opt.story.protected_regions.push_back(parse_protected(item));
        }
    }
    if (doc.contains("white-threshold")) {
        opt.story.white_threshold = want_int(doc["white-threshold"], "white-threshold");
    }
    if (doc.contains("object-scale")) {
        opt.story.placement.scale = want_number(doc["object-scale"], "object-scale");
    }
    if (doc.contains("anchor-row")) {
        opt.story.placement.anchor_row = want_number(doc["anchor-row"], "anchor-row");
    }
    if (doc.contains("anchor-col")) {
        opt.story.placement.anchor_col = want_number(doc["anchor-col"], "anchor-col");
    }
    if (doc.contains("width")) opt.story.width = want_int(doc["width"], "width");
    if (doc.contains("height")) opt.story.height = want_int(doc["height"], "height");

    return opt;
}

namespace {

std::shared_ptr<TranslationClient> make_translator_client(const RunOptions& opt) {
    if (opt.translator_kind == "remote") {
        RemoteTranslatorConfig config;
        config.endpoint = opt.translator_endpoint;
        return std::make_shared<RemoteTranslationClient>(config);
    }
    if (opt.translator_table.empty()) {
        return std::make_shared<MockTranslationClient>(
            std::unordered_map<std::string, std::string>{}, true);
    }
    json doc = json::parse(slurp(opt.translator_table, "translation table"), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        raise(Errc::invalid_args, "translation table must be a JSON object");
    }
    bool passthrough = false;
    const json* entries = &doc;
    if (doc.contains("entries")) {
        if (!doc["entries"].is_object()) {
            raise(Errc::invalid_args, "translation table \"entries\" must be an object");
        }
        entries = &doc["entries"];
        if (doc.contains("passthrough")) {
            passthrough = want_bool(doc["passthrough"], "passthrough");
        }
    }
    std::unordered_map<std::string, std::string> table;
    for (const auto& [key, value] : entries->items()) {
        table[key] = want_string(value, key);
    }
    return std::make_shared<MockTranslationClient>(std::move(table), passthrough);
}

std::unique_ptr<GenBackend> make_backend(const RunOptions& opt) {
    if (opt.backend_kind == "remote") {
        RemoteBackendConfig config;
        config.endpoint = opt.backend_endpoint;
        config.model = opt.backend_model;
        config.max_in_flight = opt.max_in_flight;
        return std::make_unique<RemoteBackend>(config);
    }
    return std::make_unique<MockBackend>();
}

std::unique_ptr<TextDetector> make_detector(const RunOptions& opt) {
    if (opt.detector_kind == "remote") {
        if (opt.detector_endpoint.empty()) {
            raise(Errc::invalid_args, "remote detector needs \"detector-endpoint\"");
        }
        RemoteOcrConfig config;
        config.endpoint = opt.detector_endpoint;
        return std::make_unique<RemoteOcrDetector>(config);
    }
    if (opt.detector_kind == "fixture") {
        json doc = json::parse(slurp(opt.detector_fixture, "detector fixture"), nullptr, false);
        if (doc.is_discarded() || !doc.is_object() || !doc.contains("boxes") ||
            !doc["boxes"].is_array()) {
            raise(Errc::invalid_args, "detector fixture must be {\"boxes\": [...]}");
        }
        std::vector<TextBox> boxes;
        for (const auto& item : doc["boxes"]) {
            if (item.is_array() && item.size() == 4) {
                boxes.push_back({want_int(item[0], "boxes"), want_int(item[1], "boxes"),
                                 want_int(item[2], "boxes"), want_int(item[3], "boxes")});
            } else if (item.is_object()) {
                boxes.push_back({want_int(item.value("min_row", json(0)), "boxes.min_row"),
                                 want_int(item.value("min_col", json(0)), "boxes.min_col"),
                                 want_int(item.value("max_row", json(0)), "boxes.max_row"),
                                 want_int(item.value("max_col", json(0)), "boxes.max_col")});
            } else {
                raise(Errc::invalid_args, "each box must be an object or a 4-number array");
            }
        }
        return std::make_unique<FixtureDetector>(std::move(boxes));
    }
    return std::make_unique<NullDetector>();
}

}  // namespace

StoryResult run_pipeline(const RunOptions& options) {
    RunOptions opt = options;
    if (!opt.story.setting_image_path.empty() && !opt.story.setting_image) {
        opt.story.setting_image = load_png(opt.story.setting_image_path);
    }
    opt.story.validate();

    SourceText source = ingest(opt.source);
    std::string cleaned = clean(source.raw);
    std::vector<std::string> units =
        split_units(cleaned, unit_kind_for(opt.story.chunking.method));
    if (units.empty()) raise(Errc::empty_after_cleaning, "no usable text units after cleaning");
    std::vector<Chunk> chunks = chunk_units(units, opt.story.chunking);

    Translator translator(make_translator_client(opt));
    std::unique_ptr<GenBackend> backend = make_backend(opt);
    std::unique_ptr<TextDetector> detector = make_detector(opt);

    RunPaths paths;
    paths.out_dir = opt.out_dir;
    paths.keep_intermediate = opt.keep_intermediate;
    return run_story(opt.story, chunks, translator, *backend, *detector, paths);
}

}  // namespace storyframes
