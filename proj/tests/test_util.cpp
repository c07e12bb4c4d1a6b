#include <doctest.h>

#include <cstdlib>
#include <set>
#include <string>
#include <vector>

#include "storyframes/util.hpp"

using namespace storyframes;

TEST_CASE("mix64 and hash_combine are deterministic and mixing") {
    CHECK(mix64(1) == mix64(1));
    CHECK(mix64(1) != mix64(2));
    CHECK(hash_combine(1, 2) == hash_combine(1, 2));
    CHECK(hash_combine(1, 2) != hash_combine(2, 1));
    // nearby inputs land far apart
    std::set<uint64_t> seen;
    for (uint64_t i = 0; i < 1000; ++i) seen.insert(mix64(i));
    CHECK(seen.size() == 1000);
}

TEST_CASE("fnv1a64 matches the published test vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("SplitRng streams are reproducible and seed-sensitive") {
    SplitRng a(42), b(42), c(43);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 100; ++i) {
        uint64_t va = a.next_u64();
        if (va != b.next_u64()) all_equal = false;
        if (va != c.next_u64()) any_diff = true;
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("SplitRng uniform ranges") {
    SplitRng rng(7);
    for (int i = 0; i < 1000; ++i) {
        double v = rng.uniform(2.0, 5.0);
        CHECK(v >= 2.0);
        CHECK(v < 5.0);
    }
    std::set<int> values;
    for (int i = 0; i < 1000; ++i) {
        int v = rng.uniform_int(0, 3);
        CHECK(v >= 0);
        CHECK(v <= 3);
        values.insert(v);
    }
    CHECK(values.size() == 4);  // inclusive bounds are both reachable
}

TEST_CASE("base64 known vectors") {
    auto enc = [](const std::string& s) {
        return base64_encode(reinterpret_cast<const uint8_t*>(s.data()), s.size());
    };
    CHECK(enc("") == "");
    CHECK(enc("M") == "TQ==");
    CHECK(enc("Ma") == "TWE=");
    CHECK(enc("Man") == "TWFu");
    CHECK(enc("hello world") == "aGVsbG8gd29ybGQ=");
}

TEST_CASE("base64 round trip over all padding lengths") {
    std::mt19937_64 gen(1);
    for (int len = 0; len < 64; ++len) {
        std::vector<uint8_t> bytes(len);
        for (auto& b : bytes) b = static_cast<uint8_t>(gen());
        auto back = base64_decode(base64_encode(bytes));
        CHECK(back == bytes);
    }
}

TEST_CASE("utf8_next decodes all sequence lengths") {
    std::string s = "aש€😀";
    size_t i = 0;
    CHECK(utf8_next(s, i) == U'a');
    CHECK(i == 1);
    CHECK(utf8_next(s, i) == char32_t(0x05e9));
    CHECK(i == 3);
    CHECK(utf8_next(s, i) == char32_t(0x20ac));
    CHECK(i == 6);
    CHECK(utf8_next(s, i) == char32_t(0x1f600));
    CHECK(i == 10);
}

TEST_CASE("utf8_next flags malformed bytes and advances one byte") {
    std::string bad = "\xff\x61";
    size_t i = 0;
    CHECK(utf8_next(bad, i) == char32_t(0xfffd));
    CHECK(i == 1);
    CHECK(utf8_next(bad, i) == U'a');

    std::string overlong = "\xc0\x80";  // overlong NUL
    i = 0;
    CHECK(utf8_next(overlong, i) == char32_t(0xfffd));
    CHECK(i == 1);

    std::string truncated = "\xe2\x82";  // missing final byte
    i = 0;
    CHECK(utf8_next(truncated, i) == char32_t(0xfffd));
    CHECK(i == 1);
}

TEST_CASE("utf8_append round trips code points") {
    for (char32_t cp : {char32_t(0x41), char32_t(0x5d0), char32_t(0x20ac), char32_t(0x1f600)}) {
        std::string s;
        utf8_append(s, cp);
        size_t i = 0;
        CHECK(utf8_next(s, i) == cp);
        CHECK(i == s.size());
    }
}

TEST_CASE("utf8_valid accepts real text and rejects junk") {
    CHECK(utf8_valid("hello"));
    CHECK(utf8_valid("שלום עולם"));
    CHECK(utf8_valid("мир 😀"));
    CHECK(utf8_valid(""));
    CHECK_FALSE(utf8_valid("\xff"));
    CHECK_FALSE(utf8_valid("ok\xc0\x80"));
    CHECK_FALSE(utf8_valid("\x80"));
    // a literal replacement character is valid input
    CHECK(utf8_valid("\xef\xbf\xbd"));
}

TEST_CASE("iso8601_utc formats epoch seconds") {
    CHECK(iso8601_utc(0) == "1970-01-01T00:00:00Z");
    CHECK(iso8601_utc(1700000000) == "2023-11-14T22:13:20Z");
}

TEST_CASE("run_timestamp honors SOURCE_DATE_EPOCH") {
    setenv("SOURCE_DATE_EPOCH", "12345", 1);
    CHECK(run_timestamp() == 12345);
    unsetenv("SOURCE_DATE_EPOCH");
    int64_t now = static_cast<int64_t>(time(nullptr));
    int64_t got = run_timestamp();
    CHECK(got >= now - 5);
    CHECK(got <= now + 5);
}

TEST_CASE("to_hex pads to sixteen digits") {
    CHECK(to_hex(0) == "0000000000000000");
    CHECK(to_hex(0xffULL) == "00000000000000ff");
    CHECK(to_hex(0xdeadbeefcafef00dULL) == "deadbeefcafef00d");
}
