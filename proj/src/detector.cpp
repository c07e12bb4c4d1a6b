#include "storyframes/detector.hpp"

#include <algorithm>
#include <cstdlib>

#include <json.hpp>

#include "storyframes/error.hpp"
#include "storyframes/util.hpp"

namespace storyframes {

namespace {
std::vector<TextBox> clip_boxes(const std::vector<TextBox>& boxes, int width, int height) {
    std::vector<TextBox> out;
    for (const TextBox& b : boxes) {
        TextBox c{std::max(b.min_row, 0), std::max(b.min_col, 0), std::min(b.max_row, height - 1),
                  std::min(b.max_col, width - 1)};
        if (c.min_row <= c.max_row && c.min_col <= c.max_col) out.push_back(c);
    }
    return out;
}
}  // namespace

std::vector<TextBox> NullDetector::detect(const RasterImage&) { return {}; }

FixtureDetector::FixtureDetector(std::vector<TextBox> boxes) : boxes_(std::move(boxes)) {}

std::vector<TextBox> FixtureDetector::detect(const RasterImage& image) {
    return clip_boxes(boxes_, image.width(), image.height());
}

RemoteOcrDetector::RemoteOcrDetector(RemoteOcrConfig config) : config_(std::move(config)) {
    if (config_.endpoint.empty()) {
        raise(Errc::invalid_args, "remote OCR needs an endpoint");
    }
    if (const char* key = std::getenv("OCR_API_KEY")) api_key_ = key;
}

std::vector<TextBox> RemoteOcrDetector::detect(const RasterImage& image) {
    nlohmann::json body = {{"image_png_b64", base64_encode(encode_png(image))}};
    std::map<std::string, std::string> headers;
    if (!api_key_.empty()) headers["Authorization"] = "Bearer " + api_key_;
    HttpResponse resp = http_post_json(config_.endpoint, body.dump(), headers, config_.retry);
    if (resp.status < 200 || resp.status >= 300) {
        raise(Errc::provider_error, "OCR service returned status " + std::to_string(resp.status));
    }
    nlohmann::json doc = nlohmann::json::parse(resp.body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("boxes") || !doc["boxes"].is_array()) {
        raise(Errc::provider_error, "OCR service returned an unrecognized response");
    }
    std::vector<TextBox> boxes;
    for (const auto& item : doc["boxes"]) {
        boxes.push_back({item.value("min_row", 0), item.value("min_col", 0),
                         item.value("max_row", 0), item.value("max_col", 0)});
    }
    return clip_boxes(boxes, image.width(), image.height());
}

}  // namespace storyframes
