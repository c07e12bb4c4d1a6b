#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace storyframes {

// splitmix64 finalizer; the single mixing primitive used for seed
// derivation and the procedural mock backend, stable across platforms.
uint64_t mix64(uint64_t x);
uint64_t hash_combine(uint64_t seed, uint64_t value);
uint64_t fnv1a64(std::string_view s);

// Deterministic random stream. std::mt19937_64 has a fully specified
// output sequence; the distribution mappings below are defined here
// because the std distributions are not portable across libraries.
class SplitRng {
  public:
    explicit SplitRng(uint64_t seed) : gen_(seed) {}
    uint64_t next_u64() { return gen_(); }
    double next_double();  // [0,1)
    double uniform(double lo, double hi);
    int uniform_int(int lo, int hi);  // inclusive range

  private:
    std::mt19937_64 gen_;
};

std::string base64_encode(const uint8_t* data, size_t len);
std::string base64_encode(const std::vector<uint8_t>& data);
std::vector<uint8_t> base64_decode(std::string_view s);

// Decodes the code point starting at byte i and advances i past it.
// Malformed sequences yield U+FFFD and advance one byte.
char32_t utf8_next(std::string_view s, size_t& i);
void utf8_append(std::string& out, char32_t cp);
bool utf8_valid(std::string_view s);

std::string iso8601_utc(int64_t epoch_seconds);
// Run timestamp; SOURCE_DATE_EPOCH overrides the wall clock so that
// reruns can produce byte-identical manifests.
int64_t run_timestamp();

std::string to_hex(uint64_t v);

}  // namespace storyframes
