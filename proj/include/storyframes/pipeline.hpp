#pragma once

#include <string>

#include "storyframes/story.hpp"

namespace storyframes {

// Everything a run needs, bound from the JSON option schema (the config
// file format; the CLI maps flags onto the same keys).
struct RunOptions {
    SourceSpec source;
    StoryConfig story;
    std::string out_dir;
    bool keep_intermediate = false;

    std::string backend_kind = "mock";  // "mock" or "remote"
    std::string backend_endpoint = "https://api.openai.com/v1";
    std::string backend_model = "dall-e-2";
    int max_in_flight = 2;

    std::string translator_kind = "mock";  // "mock" or "remote"
    std::string translator_table;          // mock lookup table path; empty = passthrough
    std::string translator_endpoint = "https://translation.googleapis.com/language/translate/v2";

    std::string detector_kind = "null";  // "null", "fixture" or "remote"
    std::string detector_fixture;        // fixture boxes path
    std::string detector_endpoint;
};

// Parses and validates the JSON option object. Unknown keys, a missing
// or ambiguous input selector, and type errors all fail here.
RunOptions options_from_json(const std::string& json_text);

// ingest -> clean -> chunk -> run_story with the configured clients.
StoryResult run_pipeline(const RunOptions& options);

}  // namespace storyframes
