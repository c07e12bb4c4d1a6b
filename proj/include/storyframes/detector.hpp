#pragma once

#include <string>
#include <vector>

#include "storyframes/image.hpp"
#include "storyframes/net.hpp"

namespace storyframes {

class TextDetector {
public:
    virtual ~TextDetector() = default;
    // Returned boxes always lie within the image bounds.
    virtual std::vector<TextBox> detect(const RasterImage& image) = 0;
};

class NullDetector : public TextDetector {
public:
    std::vector<TextBox> detect(const RasterImage& image) override;
};

// Returns the configured boxes for every image, clipped to its bounds.
class FixtureDetector : public TextDetector {
public:
    explicit FixtureDetector(std::vector<TextBox> boxes);
    std::vector<TextBox> detect(const RasterImage& image) override;

private:
    std::vector<TextBox> boxes_;
};

struct RemoteOcrConfig {
    std::string endpoint;
    RetryPolicy retry;
};

// POSTs the PNG-encoded frame and expects JSON {"boxes": [{min_row,
// min_col,max_row,max_col}, ...]}. Credential (optional) comes from
// OCR_API_KEY.
class RemoteOcrDetector : public TextDetector {
public:
    explicit RemoteOcrDetector(RemoteOcrConfig config);
    std::vector<TextBox> detect(const RasterImage& image) override;

private:
    RemoteOcrConfig config_;
    std::string api_key_;
};

}  // namespace storyframes
