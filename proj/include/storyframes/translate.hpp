#pragma once

#include <atomic>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "storyframes/net.hpp"

namespace storyframes {

struct TranslationRequest {
    std::string text;
    std::string source_lang = "auto";
    std::string target_lang = "en";
};

class TranslationClient {
public:
    virtual ~TranslationClient() = default;
    virtual std::string translate(const TranslationRequest& req) = 0;
};

// Table-driven client for offline runs and tests. Lookup is by source
// text; passthrough echoes unknown text instead of failing.
class MockTranslationClient : public TranslationClient {
public:
    MockTranslationClient() = default;
    explicit MockTranslationClient(std::unordered_map<std::string, std::string> table,
                                   bool passthrough = false);

    std::string translate(const TranslationRequest& req) override;

    void add(const std::string& source, const std::string& translated);
    void set_passthrough(bool on) { passthrough_ = on; }
    int call_count() const { return calls_.load(); }

private:
    std::unordered_map<std::string, std::string> table_;
    bool passthrough_ = false;
    std::atomic<int> calls_{0};
};

struct RemoteTranslatorConfig {
    std::string endpoint;  // Google-Translate-compatible POST endpoint
    RetryPolicy retry;
};

// Credential comes from the TRANSLATE_API_KEY environment variable and is
// sent as the "key" query parameter.
class RemoteTranslationClient : public TranslationClient {
public:
    explicit RemoteTranslationClient(RemoteTranslatorConfig config);
    std::string translate(const TranslationRequest& req) override;

private:
    RemoteTranslatorConfig config_;
    std::string api_key_;
};

// Caching front over a client. The cache is keyed on
// (source_lang, target_lang, text); a hit never reaches the client and
// concurrent misses on one key collapse into a single client call.
class Translator {
public:
    explicit Translator(std::shared_ptr<TranslationClient> client);

    std::string translate(const TranslationRequest& req);
    std::size_t cache_size() const;

private:
    std::shared_ptr<TranslationClient> client_;
    mutable std::mutex mu_;
    std::map<std::string, std::shared_future<std::string>> cache_;
};

// Joins optional suffixes with ", ", skipping any suffix the prompt
// already contains verbatim.
std::string build_prompt(const std::string& translated,
                         const std::optional<std::string>& context_suffix,
                         const std::optional<std::string>& extra = std::nullopt);

}  // namespace storyframes
