#include "storyframes/backend.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <mutex>

#include <json.hpp>

#include "storyframes/error.hpp"
#include "storyframes/util.hpp"

namespace storyframes {

namespace {

void validate(const GenRequest& req) {
    if (req.prompt.empty()) raise(Errc::invalid_args, "prompt must be non-empty");
    if (req.width <= 0 || req.height <= 0) raise(Errc::bad_dims, "request size must be positive");
    if (req.kind == GenKind::Edit) {
        if (!req.base || !req.mask) {
            raise(Errc::invalid_args, "edit requests need a base image and a mask");
        }
        if (req.base->width() != req.mask->width() || req.base->height() != req.mask->height()) {
            raise(Errc::dim_mismatch, "mask dimensions must match the base image");
        }
        if (req.base->width() != req.width || req.base->height() != req.height) {
            raise(Errc::dim_mismatch, "request size must match the base image");
        }
        if (req.mask->editable_count() == 0) {
            raise(Errc::nothing_editable, "edit mask has no editable pixels");
        }
    }
}

}  // namespace

BackendResult GenBackend::run(const GenRequest& req) {
    validate(req);
    return dispatch(req);
}

BackendResult GenBackend::create(const std::string& prompt, int width, int height,
                                 uint64_t request_seed) {
    GenRequest req;
    req.kind = GenKind::Create;
    req.prompt = prompt;
    req.width = width;
    req.height = height;
    req.request_seed = request_seed;
    return run(req);
}

BackendResult GenBackend::edit(const RasterImage& base, const Mask& mask,
                               const std::string& prompt, uint64_t request_seed) {
    GenRequest req;
    req.kind = GenKind::Edit;
    req.prompt = prompt;
    req.width = base.width();
    req.height = base.height();
    req.base = base;
    req.mask = mask;
    req.request_seed = request_seed;
    return run(req);
}

namespace {
Rgb8 mock_pixel(uint64_t prompt_hash, uint64_t seed, int r, int c) {
    uint64_t h = hash_combine(prompt_hash, seed);
    h = hash_combine(h, static_cast<uint64_t>(r / 8));
    h = hash_combine(h, static_cast<uint64_t>(c / 8));
    return {static_cast<uint8_t>(h & 0xff), static_cast<uint8_t>((h >> 8) & 0xff),
            static_cast<uint8_t>((h >> 16) & 0xff)};
}
}  // namespace

BackendResult MockBackend::dispatch(const GenRequest& req) {
    const uint64_t prompt_hash = fnv1a64(req.prompt);
    BackendResult out;
    if (req.kind == GenKind::Create) {
        out.image = RasterImage(req.width, req.height);
        for (int r = 0; r < req.height; ++r) {
            for (int c = 0; c < req.width; ++c) {
                Rgb8 px = mock_pixel(prompt_hash, req.request_seed, r, c);
                uint8_t* p = out.image.pixel(r, c);
                p[0] = px.r;
                p[1] = px.g;
                p[2] = px.b;
                p[3] = 255;
            }
        }
    } else {
        out.image = *req.base;
        for (int r = 0; r < req.height; ++r) {
            for (int c = 0; c < req.width; ++c) {
                if (!req.mask->editable(r, c)) continue;
                Rgb8 px = mock_pixel(prompt_hash, req.request_seed, r, c);
                uint8_t* p = out.image.pixel(r, c);
                p[0] = px.r;
                p[1] = px.g;
                p[2] = px.b;
                p[3] = 255;
            }
        }
    }
    out.provider_id = "mock-" + to_hex(hash_combine(prompt_hash, req.request_seed));
    out.latency_ms = 0;
    return out;
}

namespace {

// bounds the number of concurrent remote calls program-wide
class InFlightGuard {
public:
    explicit InFlightGuard(int limit) {
        std::unique_lock<std::mutex> lock(mu());
        cv().wait(lock, [&] { return active() < limit; });
        ++active();
    }
    ~InFlightGuard() {
        {
            std::lock_guard<std::mutex> lock(mu());
            --active();
        }
        cv().notify_one();
    }

private:
    static std::mutex& mu() {
        static std::mutex m;
        return m;
    }
    static std::condition_variable& cv() {
        static std::condition_variable c;
        return c;
    }
    static int& active() {
        static int n = 0;
        return n;
    }
};

std::string size_string(int w, int h) { return std::to_string(w) + "x" + std::to_string(h); }

}  // namespace

RemoteBackend::RemoteBackend(RemoteBackendConfig config) : config_(std::move(config)) {
    const char* key = std::getenv("OPENAI_API_KEY");
    if (!key || !*key) {
        raise(Errc::auth_error, "OPENAI_API_KEY is not set");
    }
    api_key_ = key;
    if (config_.max_in_flight < 1) config_.max_in_flight = 1;
}

RasterImage RemoteBackend::parse_image_response(const HttpResponse& resp, int width, int height,
                                                std::string& provider_id) {
    if (resp.status == 401 || resp.status == 403) {
        raise(Errc::auth_error, "image service rejected the credential (status " +
                                    std::to_string(resp.status) + ")");
    }
    if (resp.status == 429) {
        raise(Errc::rate_limited, "image service rate limit persisted after retries");
    }
    if (resp.status < 200 || resp.status >= 300) {
        raise(Errc::provider_error,
              "image service returned status " + std::to_string(resp.status));
    }
    nlohmann::json doc = nlohmann::json::parse(resp.body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("data") || !doc["data"].is_array() ||
        doc["data"].empty() || !doc["data"][0].contains("b64_json")) {
        raise(Errc::provider_error, "image service returned an unrecognized response");
    }
    auto it = resp.headers.find("x-request-id");
    if (it != resp.headers.end()) {
        provider_id = it->second;
    } else if (doc.contains("created")) {
        provider_id = "created-" + std::to_string(doc["created"].get<long long>());
    } else {
        provider_id = "remote";
    }
    std::vector<uint8_t> png = base64_decode(doc["data"][0]["b64_json"].get<std::string>());
    RasterImage img = decode_png(png);
    if (img.width() != width || img.height() != height) {
        raise(Errc::provider_error, "image service returned " +
                                        size_string(img.width(), img.height()) + ", expected " +
                                        size_string(width, height));
    }
    return img;
}

BackendResult RemoteBackend::dispatch(const GenRequest& req) {
    InFlightGuard guard(config_.max_in_flight);
    const auto started = std::chrono::steady_clock::now();
    std::map<std::string, std::string> headers = {{"Authorization", "Bearer " + api_key_}};

    HttpResponse resp;
    try {
        if (req.kind == GenKind::Create) {
            nlohmann::json body = {{"model", config_.model},
                                   {"prompt", req.prompt},
                                   {"n", 1},
                                   {"size", size_string(req.width, req.height)},
                                   {"response_format", "b64_json"}};
            resp = http_post_json(config_.endpoint + "/images/generations", body.dump(), headers,
                                  config_.retry);
        } else {
            RasterImage alpha_base = to_edit_alpha(*req.mask, *req.base);
            std::vector<uint8_t> png = encode_png(alpha_base);
            std::vector<MultipartField> fields = {
                {"image", std::string(png.begin(), png.end()), "base.png", "image/png"},
                {"prompt", req.prompt, "", ""},
                {"model", config_.model, "", ""},
                {"n", "1", "", ""},
                {"size", size_string(req.width, req.height), "", ""},
                {"response_format", "b64_json", "", ""},
            };
            resp = http_post_multipart(config_.endpoint + "/images/edits", fields, headers,
                                       config_.retry);
        }
    } catch (const Error& e) {
        if (e.code() == Errc::network_error) throw;
        raise(Errc::network_error, std::string("image service request failed: ") + e.what());
    }

    BackendResult out;
    out.image = parse_image_response(resp, req.width, req.height, out.provider_id);
    if (req.kind == GenKind::Edit) {
        // providers do not promise bit-exact preservation; restore fixed
        // pixels from the base so the edit contract holds downstream
        for (int r = 0; r < req.height; ++r) {
            for (int c = 0; c < req.width; ++c) {
                if (req.mask->editable(r, c)) continue;
                const uint8_t* src = req.base->pixel(r, c);
                uint8_t* dst = out.image.pixel(r, c);
                dst[0] = src[0];
                dst[1] = src[1];
                dst[2] = src[2];
                dst[3] = src[3];
            }
        }
    }
    out.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - started)
                         .count();
    return out;
}

}  // namespace storyframes
