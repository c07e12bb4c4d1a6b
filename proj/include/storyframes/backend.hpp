#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "storyframes/image.hpp"
#include "storyframes/mask.hpp"
#include "storyframes/net.hpp"

namespace storyframes {

enum class GenKind { Create, Edit };

struct GenRequest {
    GenKind kind = GenKind::Create;
    std::string prompt;
    int width = 256;
    int height = 256;
    std::optional<RasterImage> base;  // Edit only
    std::optional<Mask> mask;         // Edit only
    uint64_t request_seed = 0;        // consumed by the mock backend
};

struct BackendResult {
    RasterImage image;
    std::string provider_id;
    std::int64_t latency_ms = 0;
};

class GenBackend {
public:
    virtual ~GenBackend() = default;

    // Validates the request, then dispatches. Edit results keep every
    // fixed pixel byte-identical to the base image.
    BackendResult run(const GenRequest& req);

    BackendResult create(const std::string& prompt, int width = 256, int height = 256,
                         uint64_t request_seed = 0);
    BackendResult edit(const RasterImage& base, const Mask& mask, const std::string& prompt,
                       uint64_t request_seed = 0);

protected:
    virtual BackendResult dispatch(const GenRequest& req) = 0;
};

// Offline procedural backend. Output pixels are a pure function of
// (prompt, request_seed, position), so identical requests give
// byte-identical images and distinct prompts give distinct ones.
class MockBackend : public GenBackend {
protected:
    BackendResult dispatch(const GenRequest& req) override;
};

struct RemoteBackendConfig {
    std::string endpoint = "https://api.openai.com/v1";  // API base URL
    std::string model = "dall-e-2";
    int max_in_flight = 2;
    RetryPolicy retry{
        .max_attempts = 3,
        .initial_backoff = std::chrono::milliseconds(500),
        .backoff_multiplier = 2.0,
        .request_timeout = std::chrono::seconds(60),
        .honor_retry_after = true,
    };
};

// HTTPS client for a DALL-E-shaped API. Credential comes from the
// OPENAI_API_KEY environment variable. Because providers do not promise
// bit-exact preservation, edit responses get fixed pixels copied back
// from the base image before they are returned.
class RemoteBackend : public GenBackend {
public:
    explicit RemoteBackend(RemoteBackendConfig config);

protected:
    BackendResult dispatch(const GenRequest& req) override;

private:
    RasterImage parse_image_response(const HttpResponse& resp, int width, int height,
                                     std::string& provider_id);
    RemoteBackendConfig config_;
    std::string api_key_;
};

}  // namespace storyframes
