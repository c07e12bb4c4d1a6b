#include <doctest.h>

#include <atomic>
#include <chrono>
#include <memory>
#include <thread>
#include <vector>

#include "storyframes/error.hpp"
#include "storyframes/translate.hpp"

using namespace storyframes;

namespace {

// Client that counts calls and can be told to fail once, for exercising
// the cache's single-flight and failure-eviction behavior.
class ScriptedClient : public TranslationClient {
public:
    std::string translate(const TranslationRequest& req) override {
        calls.fetch_add(1);
        if (delay_ms > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
        }
        if (fail_next.exchange(false)) {
            raise(Errc::client_error, "scripted failure");
        }
        return "<" + req.text + ">";
    }

    std::atomic<int> calls{0};
    std::atomic<bool> fail_next{false};
    int delay_ms = 0;
};

}  // namespace

TEST_CASE("identity translation never reaches the client") {
    auto client = std::make_shared<MockTranslationClient>();
    Translator translator(client);
    CHECK(translator.translate({"hello", "en", "en"}) == "hello");
    CHECK(translator.translate({"שלום", "he", "HE"}) == "שלום");
    CHECK(client->call_count() == 0);
    CHECK(translator.cache_size() == 0);
}

TEST_CASE("table lookup and caching") {
    auto client = std::make_shared<MockTranslationClient>();
    client->add("אני אוהב לאכול פיצה", "I love eating pizza");
    Translator translator(client);

    TranslationRequest req{"אני אוהב לאכול פיצה", "auto", "en"};
    CHECK(translator.translate(req) == "I love eating pizza");
    CHECK(translator.translate(req) == "I love eating pizza");
    CHECK(client->call_count() == 1);
    CHECK(translator.cache_size() == 1);

    // a different language pair is a different cache key
    CHECK(translator.translate({"אני אוהב לאכול פיצה", "he", "en"}) == "I love eating pizza");
    CHECK(client->call_count() == 2);
    CHECK(translator.cache_size() == 2);
}

TEST_CASE("unknown text fails without passthrough and echoes with it") {
    auto strict = std::make_shared<MockTranslationClient>();
    Translator translator(strict);
    try {
        translator.translate({"לא ידוע", "auto", "en"});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::unknown_text);
        CHECK(e.stage() == ErrStage::translate);
    }

    auto loose = std::make_shared<MockTranslationClient>(
        std::unordered_map<std::string, std::string>{}, true);
    Translator echo(loose);
    CHECK(echo.translate({"לא ידוע", "auto", "en"}) == "לא ידוע");
}

TEST_CASE("request validation") {
    auto client = std::make_shared<MockTranslationClient>(
        std::unordered_map<std::string, std::string>{}, true);
    Translator translator(client);
    for (TranslationRequest bad : {TranslationRequest{"", "auto", "en"},
                                   TranslationRequest{"x", "klingon", "en"},
                                   TranslationRequest{"x", "auto", "auto"},
                                   TranslationRequest{"x", "auto", ""}}) {
        try {
            translator.translate(bad);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::invalid_args);
        }
    }
    CHECK(client->call_count() == 0);
}

TEST_CASE("distinct texts fill the cache once each") {
    auto client = std::make_shared<ScriptedClient>();
    Translator translator(client);
    for (int round = 0; round < 3; ++round) {
        for (int i = 0; i < 10; ++i) {
            std::string text = "line " + std::to_string(i);
            CHECK(translator.translate({text, "auto", "en"}) == "<" + text + ">");
        }
    }
    CHECK(client->calls.load() == 10);
    CHECK(translator.cache_size() == 10);
}

TEST_CASE("concurrent misses on one key collapse into a single client call") {
    auto client = std::make_shared<ScriptedClient>();
    client->delay_ms = 50;
    Translator translator(client);

    std::vector<std::thread> threads;
    std::vector<std::string> results(8);
    for (int i = 0; i < 8; ++i) {
        threads.emplace_back([&translator, &results, i] {
            results[i] = translator.translate({"once", "auto", "en"});
        });
    }
    for (auto& t : threads) t.join();
    for (const auto& r : results) CHECK(r == "<once>");
    CHECK(client->calls.load() == 1);
}

TEST_CASE("a failed lookup is evicted so the next call retries") {
    auto client = std::make_shared<ScriptedClient>();
    client->fail_next = true;
    Translator translator(client);

    TranslationRequest req{"flaky", "auto", "en"};
    CHECK_THROWS_AS(translator.translate(req), Error);
    CHECK(client->calls.load() == 1);
    // the failure must not be cached
    CHECK(translator.translate(req) == "<flaky>");
    CHECK(client->calls.load() == 2);
    CHECK(translator.cache_size() == 1);
}

TEST_CASE("case-insensitive language codes share a cache entry") {
    auto client = std::make_shared<ScriptedClient>();
    Translator translator(client);
    CHECK(translator.translate({"text", "HE", "EN"}) == "<text>");
    CHECK(translator.translate({"text", "he", "en"}) == "<text>");
    CHECK(client->calls.load() == 1);
}

TEST_CASE("build_prompt joins suffixes and skips duplicates") {
    CHECK(build_prompt("a dog", std::nullopt) == "a dog");
    CHECK(build_prompt("a dog", std::string("watercolor")) == "a dog, watercolor");
    CHECK(build_prompt("a dog", std::string("watercolor"), std::string("on white background")) ==
          "a dog, watercolor, on white background");
    // a suffix already present verbatim is not appended again
    CHECK(build_prompt("a dog, watercolor", std::string("watercolor")) == "a dog, watercolor");
    std::string once = build_prompt("scene", std::string("oil painting"));
    CHECK(build_prompt(once, std::string("oil painting")) == once);
}
