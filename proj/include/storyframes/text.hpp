#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "storyframes/error.hpp"

namespace storyframes {

enum class SourceOrigin { InlineString, TextFile, Url };

struct SourceSpec {
    SourceOrigin origin = SourceOrigin::InlineString;
    std::string value;  // the text itself, a file path, or a URL
    std::optional<std::string> language_hint;
};

struct SourceText {
    SourceOrigin origin = SourceOrigin::InlineString;
    std::string detail;  // path or URL; empty for inline input
    std::string raw;
    std::optional<std::string> language_hint;
};

// One unit of story text driving one frame. Spans are inclusive indices
// into the unit list the chunk was built from.
struct Chunk {
    int index = 0;
    std::string text;
    int start_unit = 0;
    int end_unit = 0;
};

enum class ChunkMethod { ByLine, BySentence, SentenceWindow, LinePairStack };

struct ChunkingSpec {
    ChunkMethod method = ChunkMethod::ByLine;
    int window = 2;  // SentenceWindow only
    int stride = 1;  // SentenceWindow only
    void validate() const;
};

// "auto", an ISO-639-1 code, an ISO-639-2/3 shaped code, optionally with
// a region subtag (e.g. "zh-CN").
bool is_valid_language_hint(std::string_view code);

SourceText ingest(const SourceSpec& spec);

// Strips HTML tags and entities, removes URLs and control characters,
// collapses runs of spaces. Newlines survive; they carry the line
// structure for line-based chunking. Idempotent.
std::string clean(const std::string& raw);

enum class SplitUnit { Line, Sentence };
std::vector<std::string> split_units(const std::string& text, SplitUnit by);

std::vector<Chunk> chunk_units(const std::vector<std::string>& units, const ChunkingSpec& spec);

// Visible text of an HTML page: markup, script, style, title and
// comments removed, entities decoded, block-level tags turned into
// newlines.
std::string extract_visible_text(const std::string& html);

SplitUnit unit_kind_for(ChunkMethod method);

const char* chunk_method_name(ChunkMethod method);
std::optional<ChunkMethod> chunk_method_from_name(std::string_view name);

}  // namespace storyframes
