#include "storyframes/translate.hpp"

#include <algorithm>
#include <cstdlib>

#include <json.hpp>

#include "storyframes/error.hpp"
#include "storyframes/text.hpp"

namespace storyframes {

namespace {

std::string ascii_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

void validate_request(const TranslationRequest& req) {
    if (req.text.empty()) {
        raise(Errc::invalid_args, "translation request text must be non-empty");
    }
    if (!is_valid_language_hint(req.source_lang)) {
        raise(Errc::invalid_args, "invalid source language: " + req.source_lang);
    }
    if (ascii_lower(req.target_lang) == "auto" || !is_valid_language_hint(req.target_lang)) {
        raise(Errc::invalid_args, "invalid target language: " + req.target_lang);
    }
}

}  // namespace

MockTranslationClient::MockTranslationClient(std::unordered_map<std::string, std::string> table,
                                             bool passthrough)
    : table_(std::move(table)), passthrough_(passthrough) {}

void MockTranslationClient::add(const std::string& source, const std::string& translated) {
    table_[source] = translated;
}

std::string MockTranslationClient::translate(const TranslationRequest& req) {
    calls_.fetch_add(1);
    auto it = table_.find(req.text);
    if (it != table_.end()) return it->second;
    if (passthrough_) return req.text;
    raise(Errc::unknown_text, "no translation table entry for: " + req.text);
}

RemoteTranslationClient::RemoteTranslationClient(RemoteTranslatorConfig config)
    : config_(std::move(config)) {
    if (config_.endpoint.empty()) {
        raise(Errc::invalid_args, "remote translator needs an endpoint");
    }
    if (const char* key = std::getenv("TRANSLATE_API_KEY")) api_key_ = key;
}

std::string RemoteTranslationClient::translate(const TranslationRequest& req) {
    nlohmann::json body = {{"q", req.text}, {"target", ascii_lower(req.target_lang)},
                           {"format", "text"}};
    std::string source = ascii_lower(req.source_lang);
    if (source != "auto") body["source"] = source;

    std::string url = config_.endpoint;
    if (!api_key_.empty()) {
        url += (url.find('?') == std::string::npos ? "?key=" : "&key=") + api_key_;
    }

    HttpResponse resp;
    try {
        resp = http_post_json(url, body.dump(), {}, config_.retry);
    } catch (const Error& e) {
        raise(Errc::client_error, std::string("translation request failed: ") + e.what());
    }
    if (resp.status < 200 || resp.status >= 300) {
        raise(Errc::client_error,
              "translation service returned status " + std::to_string(resp.status));
    }

    nlohmann::json doc = nlohmann::json::parse(resp.body, nullptr, false);
    if (!doc.is_discarded()) {
        if (doc.contains("data") && doc["data"].contains("translations") &&
            doc["data"]["translations"].is_array() && !doc["data"]["translations"].empty()) {
            const auto& first = doc["data"]["translations"][0];
            if (first.contains("translatedText") && first["translatedText"].is_string()) {
                return first["translatedText"].get<std::string>();
            }
        }
        if (doc.contains("translatedText") && doc["translatedText"].is_string()) {
            return doc["translatedText"].get<std::string>();
        }
    }
    raise(Errc::client_error, "translation service returned an unrecognized response");
}

Translator::Translator(std::shared_ptr<TranslationClient> client) : client_(std::move(client)) {
    if (!client_) raise(Errc::invalid_args, "translator needs a client");
}

std::string Translator::translate(const TranslationRequest& req) {
    validate_request(req);
    std::string source = ascii_lower(req.source_lang);
    std::string target = ascii_lower(req.target_lang);
    if (source != "auto" && source == target) return req.text;

    std::string key = source + '\x1f' + target + '\x1f' + req.text;
    std::shared_future<std::string> fut;
    std::promise<std::string> prom;
    bool owner = false;
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) {
            fut = it->second;
        } else {
            fut = prom.get_future().share();
            cache_.emplace(key, fut);
            owner = true;
        }
    }
    if (owner) {
        try {
            prom.set_value(client_->translate(req));
        } catch (...) {
            prom.set_exception(std::current_exception());
            // evict so a later request can retry; in-flight waiters still
            // observe this failure through their shared_future
            std::lock_guard<std::mutex> lock(mu_);
            cache_.erase(key);
        }
    }
    return fut.get();
}

std::size_t Translator::cache_size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.size();
}

std::string build_prompt(const std::string& translated,
                         const std::optional<std::string>& context_suffix,
                         const std::optional<std::string>& extra) {
    if (translated.empty()) {
        raise(Errc::invalid_args, "prompt text must be non-empty");
    }
    std::string out = translated;
    auto append = [&out](const std::string& part) {
        if (part.empty() || out.find(part) != std::string::npos) return;
        out += ", ";
        out += part;
    };
    if (context_suffix) append(*context_suffix);
    if (extra) append(*extra);
    return out;
}

}  // namespace storyframes
