#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace storyframes {

struct HttpResponse {
    int status = 0;
    std::string body;
    std::string content_type;
    std::map<std::string, std::string> headers;
};

struct MultipartField {
    std::string name;
    std::string content;
    std::string filename;      // empty for plain text fields
    std::string content_type;  // empty for plain text fields
};

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{500};
    double backoff_multiplier = 2.0;
    std::chrono::seconds request_timeout{30};
    bool honor_retry_after = true;
};

// Fetches a URL following up to max_redirects redirects. Non-2xx
// terminal status raises FetchFailed.
HttpResponse http_get(const std::string& url, int max_redirects = 5,
                      std::chrono::seconds timeout = std::chrono::seconds(30));

// POSTs a JSON body, retrying on 429 and 5xx per the policy. Returns the
// final response, which may still be an error status once attempts are
// exhausted; callers decide how to surface it.
HttpResponse http_post_json(const std::string& url, const std::string& body,
                            const std::map<std::string, std::string>& headers,
                            const RetryPolicy& policy);

// POSTs multipart/form-data with the same retry behavior.
HttpResponse http_post_multipart(const std::string& url,
                                 const std::vector<MultipartField>& fields,
                                 const std::map<std::string, std::string>& headers,
                                 const RetryPolicy& policy);

bool retryable_status(int status);

}  // namespace storyframes
