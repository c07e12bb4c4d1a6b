#include "storyframes/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "storyframes/net.hpp"
#include "storyframes/util.hpp"

namespace storyframes {

void ChunkingSpec::validate() const {
    if (method == ChunkMethod::SentenceWindow) {
        if (window < 1 || stride < 1) {
            raise(Errc::invalid_spec, "window and stride must be positive");
        }
        if (stride > window) {
            raise(Errc::invalid_spec, "stride must not exceed window");
        }
    }
}

namespace {

const std::set<std::string>& iso639_1_codes() {
    static const std::set<std::string> codes = {
        "aa", "ab", "ae", "af", "ak", "am", "an", "ar", "as", "av", "ay", "az", "ba", "be",
        "bg", "bh", "bi", "bm", "bn", "bo", "br", "bs", "ca", "ce", "ch", "co", "cr", "cs",
        "cu", "cv", "cy", "da", "de", "dv", "dz", "ee", "el", "en", "eo", "es", "et", "eu",
        "fa", "ff", "fi", "fj", "fo", "fr", "fy", "ga", "gd", "gl", "gn", "gu", "gv", "ha",
        "he", "hi", "ho", "hr", "ht", "hu", "hy", "hz", "ia", "id", "ie", "ig", "ii", "ik",
        "io", "is", "it", "iu", "ja", "jv", "ka", "kg", "ki", "kj", "kk", "kl", "km", "kn",
        "ko", "kr", "ks", "ku", "kv", "kw", "ky", "la", "lb", "lg", "li", "ln", "lo", "lt",
        "lu", "lv", "mg", "mh", "mi", "mk", "ml", "mn", "mr", "ms", "mt", "my", "na", "nb",
        "nd", "ne", "ng", "nl", "nn", "no", "nr", "nv", "ny", "oc", "oj", "om", "or", "os",
        "pa", "pi", "pl", "ps", "pt", "qu", "rm", "rn", "ro", "ru", "rw", "sa", "sc", "sd",
        "se", "sg", "si", "sk", "sl", "sm", "sn", "so", "sq", "sr", "ss", "st", "su", "sv",
        "sw", "ta", "te", "tg", "th", "ti", "tk", "tl", "tn", "to", "tr", "ts", "tt", "tw",
        "ty", "ug", "uk", "ur", "uz", "ve", "vi", "vo", "wa", "wo", "xh", "yi", "yo", "za",
        "zh", "zu"};
    return codes;
}

bool all_alpha_lower(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

}  // namespace

bool is_valid_language_hint(std::string_view code) {
    if (code.empty()) return false;
    std::string lower(code);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "auto") return true;
    std::string base = lower;
    size_t dash = lower.find('-');
    if (dash != std::string::npos) {
        base = lower.substr(0, dash);
        std::string region = lower.substr(dash + 1);
        if (region.size() != 2 || !all_alpha_lower(region)) return false;
    }
    if (base.size() == 2) return iso639_1_codes().count(base) > 0;
    if (base.size() == 3) return all_alpha_lower(base);  // ISO-639-2/3 shaped
    return false;
}

namespace {

bool is_tag_start(std::string_view s, size_t i) {
    if (s[i] != '<' || i + 1 >= s.size()) return false;
    char c = s[i + 1];
    return std::isalpha(static_cast<unsigned char>(c)) || c == '/' || c == '!';
}

// Returns the index just past the matching '>' or npos when unterminated.
size_t tag_end(std::string_view s, size_t i) {
    if (i + 1 < s.size() && s.compare(i, 4, "<!--") == 0) {
        size_t close = s.find("-->", i + 4);
        return close == std::string::npos ? std::string::npos : close + 3;
    }
    size_t close = s.find('>', i);
    return close == std::string::npos ? std::string::npos : close + 1;
}

// &name; &#123; &#x1f; forms, length-bounded.
size_t entity_end(std::string_view s, size_t i) {
    if (s[i] != '&') return std::string::npos;
    size_t j = i + 1;
    size_t limit = std::min(s.size(), i + 34);
    if (j < s.size() && s[j] == '#') {
        ++j;
        bool hex = j < s.size() && (s[j] == 'x' || s[j] == 'X');
        if (hex) ++j;
        size_t digits = 0;
        while (j < limit && (hex ? std::isxdigit(static_cast<unsigned char>(s[j]))
                                 : std::isdigit(static_cast<unsigned char>(s[j])))) {
            ++j;
            ++digits;
        }
        if (digits == 0 || j >= s.size() || s[j] != ';') return std::string::npos;
        return j + 1;
    }
    size_t letters = 0;
    while (j < limit && std::isalnum(static_cast<unsigned char>(s[j]))) {
        ++j;
        ++letters;
    }
    if (letters == 0 || j >= s.size() || s[j] != ';') return std::string::npos;
    return j + 1;
}

bool starts_url(std::string_view s, size_t i, size_t& len) {
    static const std::array<std::string_view, 3> schemes = {"http://", "https://", "ftp://"};
    for (auto scheme : schemes) {
        if (s.compare(i, scheme.size(), scheme) == 0) {
            size_t j = i + scheme.size();
            while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
            len = j - i;
            return true;
        }
    }
    if (s.compare(i, 4, "www.") == 0) {
        size_t j = i + 4;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        len = j - i;
        return true;
    }
    return false;
}

std::string clean_pass(const std::string& in) {
    std::string out;
    out.reserve(in.size());
    std::string_view s(in);
    size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (c == '<' && is_tag_start(s, i)) {
            size_t end = tag_end(s, i);
            if (end != std::string::npos) {
                out += ' ';
                i = end;
                continue;
            }
        }
        if (c == '&') {
            size_t end = entity_end(s, i);
            if (end != std::string::npos) {
                out += ' ';
                i = end;
                continue;
            }
        }
        size_t url_len = 0;
        if (starts_url(s, i, url_len)) {
            i += url_len;
            continue;
        }
        if (c == '\r') {
            if (i + 1 < s.size() && s[i + 1] == '\n') ++i;
            out += '\n';
            ++i;
            continue;
        }
        if (c == '\t') {
            out += ' ';
            ++i;
            continue;
        }
        unsigned char uc = static_cast<unsigned char>(c);
        if (uc < 0x20 && c != '\n') {
            ++i;
            continue;
        }
        if (uc == 0x7f) {
            ++i;
            continue;
        }
        out += c;
        ++i;
    }

    // collapse space runs and trim spaces at line boundaries
    std::string collapsed;
    collapsed.reserve(out.size());
    bool pending_space = false;
    bool line_start = true;
    for (char c : out) {
        if (c == ' ') {
            pending_space = true;
            continue;
        }
        if (c == '\n') {
            pending_space = false;
            line_start = true;
            collapsed += '\n';
            continue;
        }
        if (pending_space && !line_start) collapsed += ' ';
        pending_space = false;
        line_start = false;
        collapsed += c;
    }
    return collapsed;
}

bool whitespace_only(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) {
        return c == ' ' || c == '\n' || c == '\t' || c == '\r';
    });
}

}  // namespace

std::string clean(const std::string& raw) {
    // iterate to a fixed point so the operation is idempotent even for
    // nested constructs (entity-encoded tags and the like); every
    // changing pass strictly shrinks the text, so this terminates
    std::string cur = raw;
    while (true) {
        std::string next = clean_pass(cur);
        if (next == cur) break;
        cur = std::move(next);
    }
    if (whitespace_only(cur)) {
        raise(Errc::empty_after_cleaning, "no text left after cleaning");
    }
    return cur;
}

namespace {
std::string trim_spaces(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

constexpr char32_t kSofPasuq = 0x05c3;  // Hebrew sentence terminator

bool is_terminator(char32_t cp) {
    return cp == '.' || cp == '!' || cp == '?' || cp == kSofPasuq;
}
}  // namespace

std::vector<std::string> split_units(const std::string& text, SplitUnit by) {
    std::vector<std::string> units;
    if (by == SplitUnit::Line) {
        size_t start = 0;
        while (start <= text.size()) {
            size_t nl = text.find('\n', start);
            std::string_view line(text.data() + start,
                                  (nl == std::string::npos ? text.size() : nl) - start);
            std::string trimmed = trim_spaces(line);
            if (!trimmed.empty()) units.push_back(std::move(trimmed));
            if (nl == std::string::npos) break;
            start = nl + 1;
        }
        return units;
    }

    // Sentence: terminal punctuation runs close a unit, as does a newline.
    std::string current;
    size_t i = 0;
    std::string_view s(text);
    while (i < s.size()) {
        size_t before = i;
        char32_t cp = utf8_next(s, i);
        if (cp == '\n') {
            std::string trimmed = trim_spaces(current);
            if (!trimmed.empty()) units.push_back(std::move(trimmed));
            current.clear();
            continue;
        }
        current.append(s.substr(before, i - before));
        if (is_terminator(cp)) {
            // fold a run of terminators into the same sentence
            while (i < s.size()) {
                size_t peek = i;
                char32_t nxt = utf8_next(s, peek);
                if (!is_terminator(nxt)) break;
                current.append(s.substr(i, peek - i));
                i = peek;
            }
            std::string trimmed = trim_spaces(current);
            if (!trimmed.empty()) units.push_back(std::move(trimmed));
            current.clear();
        }
    }
    std::string trimmed = trim_spaces(current);
    if (!trimmed.empty()) units.push_back(std::move(trimmed));
    return units;
}

namespace {
std::string join_units(const std::vector<std::string>& units, int from, int to) {
    std::string out;
    for (int i = from; i <= to; ++i) {
        if (i > from) out += ' ';
        out += units[i];
    }
    return out;
}
}  // namespace

std::vector<Chunk> chunk_units(const std::vector<std::string>& units, const ChunkingSpec& spec) {
    spec.validate();
    if (units.empty()) raise(Errc::invalid_args, "cannot chunk an empty unit list");
    const int n = static_cast<int>(units.size());
    std::vector<Chunk> chunks;

    switch (spec.method) {
        case ChunkMethod::ByLine:
        case ChunkMethod::BySentence: {
            for (int i = 0; i < n; ++i) {
                chunks.push_back({i, units[i], i, i});
            }
            break;
        }
        case ChunkMethod::SentenceWindow: {
            const int w = spec.window, s = spec.stride;
            int o = 0;
            int last_end = -1;
            while (o + w <= n) {
                chunks.push_back({static_cast<int>(chunks.size()), join_units(units, o, o + w - 1),
                                  o, o + w - 1});
                last_end = o + w - 1;
                o += s;
            }
            if (chunks.empty()) {
                chunks.push_back({0, join_units(units, 0, n - 1), 0, n - 1});
            } else if (last_end < n - 1) {
                // trailing partial window at the next stride offset keeps
                // the window - stride overlap with its predecessor
                chunks.push_back(
                    {static_cast<int>(chunks.size()), join_units(units, o, n - 1), o, n - 1});
            }
            break;
        }
        case ChunkMethod::LinePairStack: {
            if (n == 1) {
                chunks.push_back({0, units[0], 0, 0});
            } else {
                for (int i = 0; i + 1 < n; ++i) {
                    chunks.push_back({i, join_units(units, i, i + 1), i, i + 1});
                }
            }
            break;
        }
    }
    return chunks;
}

namespace {

bool ieq(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i]))) {
            return false;
        }
    }
    return true;
}

bool is_block_tag(std::string_view name) {
    static const std::array<std::string_view, 22> kBlocks = {
        "p",  "br", "div", "li", "ul",  "ol",  "tr",      "table",   "h1",      "h2",     "h3",
        "h4", "h5", "h6",  "hr", "img", "form", "section", "article", "header", "footer", "blockquote"};
    for (auto b : kBlocks) {
        if (ieq(name, b)) return true;
    }
    return false;
}

void decode_entity(std::string_view ent, std::string& out) {
    // ent excludes '&' and ';'
    if (ent.empty()) return;
    if (ent[0] == '#') {
        char32_t cp = 0;
        bool ok = false;
        if (ent.size() > 2 && (ent[1] == 'x' || ent[1] == 'X')) {
            for (size_t k = 2; k < ent.size(); ++k) {
                char c = ent[k];
                int v = c >= '0' && c <= '9'   ? c - '0'
                        : c >= 'a' && c <= 'f' ? c - 'a' + 10
                        : c >= 'A' && c <= 'F' ? c - 'A' + 10
                                               : -1;
                if (v < 0) return;
                cp = cp * 16 + static_cast<char32_t>(v);
                ok = true;
            }
        } else {
            for (size_t k = 1; k < ent.size(); ++k) {
                if (!std::isdigit(static_cast<unsigned char>(ent[k]))) return;
                cp = cp * 10 + static_cast<char32_t>(ent[k] - '0');
                ok = true;
            }
        }
        if (ok && cp > 0 && cp <= 0x10ffff && !(cp >= 0xd800 && cp <= 0xdfff)) {
            utf8_append(out, cp);
        }
        return;
    }
    struct Named {
        std::string_view name;
        std::string_view value;
    };
    static const std::array<Named, 8> kNamed = {{{"amp", "&"},
                                                 {"lt", "<"},
                                                 {"gt", ">"},
                                                 {"quot", "\""},
                                                 {"apos", "'"},
                                                 {"nbsp", " "},
                                                 {"ndash", "-"},
                                                 {"mdash", "-"}}};
    for (const auto& e : kNamed) {
        if (ent == e.name) {
            out += e.value;
            return;
        }
    }
    // unknown entity: drop it
}

}  // namespace

std::string extract_visible_text(const std::string& html) {
    std::string out;
    out.reserve(html.size() / 2);
    std::string_view s(html);
    size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (c == '<' && is_tag_start(s, i)) {
            if (s.compare(i, 4, "<!--") == 0) {
                size_t close = s.find("-->", i + 4);
                i = close == std::string::npos ? s.size() : close + 3;
                continue;
            }
            size_t name_start = i + 1;
            bool closing = name_start < s.size() && s[name_start] == '/';
            if (closing) ++name_start;
            size_t name_end = name_start;
            while (name_end < s.size() && std::isalnum(static_cast<unsigned char>(s[name_end]))) {
                ++name_end;
            }
            std::string_view name = s.substr(name_start, name_end - name_start);
            size_t close = s.find('>', i);
            if (close == std::string::npos) break;  // junk tail
            i = close + 1;
            if (!closing && (ieq(name, "script") || ieq(name, "style") || ieq(name, "title"))) {
                // skip everything up to the matching close tag
                std::string closer = "</" + std::string(name);
                size_t k = i;
                size_t found = std::string::npos;
                while (k < s.size()) {
                    size_t pos = s.find('<', k);
                    if (pos == std::string::npos || pos + closer.size() > s.size()) break;
                    if (ieq(s.substr(pos, closer.size()), closer)) {
                        found = s.find('>', pos);
                        break;
                    }
                    k = pos + 1;
                }
                i = found == std::string::npos ? s.size() : found + 1;
                continue;
            }
            out += is_block_tag(name) ? '\n' : ' ';
            continue;
        }
        if (c == '&') {
            size_t end = entity_end(s, i);
            if (end != std::string::npos) {
                decode_entity(s.substr(i + 1, end - i - 2), out);
                i = end;
                continue;
            }
        }
        out += c;
        ++i;
    }
    size_t b = out.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return std::string();
    size_t e = out.find_last_not_of(" \t\r\n");
    return out.substr(b, e - b + 1);
}

namespace {
bool looks_like_html(std::string_view content_type, std::string_view body) {
    if (content_type.find("html") != std::string_view::npos) return true;
    if (content_type.find("text/plain") != std::string_view::npos) return false;
    size_t i = 0;
    while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
    return i < body.size() && body[i] == '<';
}
}  // namespace

SourceText ingest(const SourceSpec& spec) {
    if (spec.language_hint && !is_valid_language_hint(*spec.language_hint)) {
        raise(Errc::invalid_args, "invalid language hint: " + *spec.language_hint);
    }
    SourceText out;
    out.origin = spec.origin;
    out.language_hint = spec.language_hint;
    switch (spec.origin) {
        case SourceOrigin::InlineString: {
            out.raw = spec.value;
            break;
        }
        case SourceOrigin::TextFile: {
            out.detail = spec.value;
            std::ifstream in(spec.value, std::ios::binary);
            if (!in) raise(Errc::file_unreadable, "cannot open " + spec.value);
            std::ostringstream ss;
            ss << in.rdbuf();
            out.raw = ss.str();
            if (!utf8_valid(out.raw)) {
                raise(Errc::file_unreadable, spec.value + " is not valid UTF-8");
            }
            break;
        }
        case SourceOrigin::Url: {
            out.detail = spec.value;
            if (spec.value.rfind("http://", 0) != 0 && spec.value.rfind("https://", 0) != 0) {
                raise(Errc::invalid_args, "URL scheme must be http or https");
            }
            HttpResponse resp = http_get(spec.value);
            out.raw = looks_like_html(resp.content_type, resp.body)
                          ? extract_visible_text(resp.body)
                          : resp.body;
            break;
        }
    }
    if (whitespace_only(out.raw)) {
        raise(Errc::empty_source, "no extractable text in source");
    }
    return out;
}

SplitUnit unit_kind_for(ChunkMethod method) {
    return method == ChunkMethod::BySentence || method == ChunkMethod::SentenceWindow
               ? SplitUnit::Sentence
               : SplitUnit::Line;
}

const char* chunk_method_name(ChunkMethod method) {
    switch (method) {
        case ChunkMethod::ByLine: return "by-line";
        case ChunkMethod::BySentence: return "by-sentence";
        case ChunkMethod::SentenceWindow: return "sentence-window";
        case ChunkMethod::LinePairStack: return "line-pair-stack";
    }
    return "by-line";
}

std::optional<ChunkMethod> chunk_method_from_name(std::string_view name) {
    if (name == "by-line") return ChunkMethod::ByLine;
    if (name == "by-sentence") return ChunkMethod::BySentence;
    if (name == "sentence-window") return ChunkMethod::SentenceWindow;
    if (name == "line-pair-stack") return ChunkMethod::LinePairStack;
    return std::nullopt;
}

}  // namespace storyframes
