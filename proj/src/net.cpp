#include "storyframes/net.hpp"

#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "storyframes/error.hpp"

namespace storyframes {

namespace {

struct UrlParts {
    std::string scheme_host;  // e.g. https://example.com:8443
    std::string path;         // path + query, never empty
};

UrlParts split_url(const std::string& url) {
    size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        raise(Errc::invalid_args, "malformed URL: " + url);
    }
    size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, path_start), url.substr(path_start)};
}

HttpResponse to_response(const httplib::Response& r) {
    HttpResponse out;
    out.status = r.status;
    out.body = r.body;
    out.content_type = r.get_header_value("Content-Type");
    for (const auto& [k, v] : r.headers) out.headers[k] = v;
    return out;
}

httplib::Client make_client(const std::string& scheme_host, std::chrono::seconds timeout) {
    httplib::Client cli(scheme_host);
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);
    cli.set_follow_location(false);
    cli.enable_server_certificate_verification(false);
    return cli;
}

std::chrono::milliseconds retry_after_delay(const HttpResponse& resp) {
    auto it = resp.headers.find("Retry-After");
    if (it == resp.headers.end()) return std::chrono::milliseconds(0);
    try {
        return std::chrono::seconds(std::stol(it->second));
    } catch (...) {
        return std::chrono::milliseconds(0);
    }
}

using RequestFn = std::function<httplib::Result(httplib::Client&, const std::string& path)>;

HttpResponse post_with_retries(const std::string& url,
                               const std::map<std::string, std::string>& headers,
                               const RetryPolicy& policy, const RequestFn& send) {
    UrlParts parts = split_url(url);
    auto backoff = std::chrono::duration_cast<std::chrono::milliseconds>(policy.initial_backoff);
    std::string last_error;
    for (int attempt = 1; attempt <= policy.max_attempts; ++attempt) {
        httplib::Client cli = make_client(parts.scheme_host, policy.request_timeout);
        httplib::Headers hl;
        for (const auto& [k, v] : headers) hl.emplace(k, v);
        cli.set_default_headers(hl);
        httplib::Result res = send(cli, parts.path);
        if (res) {
            HttpResponse resp = to_response(*res);
            if (!retryable_status(resp.status) || attempt == policy.max_attempts) {
                return resp;
            }
            auto delay = backoff;
            if (policy.honor_retry_after) {
                auto ra = retry_after_delay(resp);
                if (ra.count() > 0) delay = ra;
            }
            std::this_thread::sleep_for(delay);
        } else {
            last_error = httplib::to_string(res.error());
            if (attempt == policy.max_attempts) {
                raise(Errc::network_error, "request to " + url + " failed: " + last_error);
            }
            std::this_thread::sleep_for(backoff);
        }
        backoff = std::chrono::milliseconds(
            static_cast<long long>(static_cast<double>(backoff.count()) * policy.backoff_multiplier));
    }
    raise(Errc::network_error, "request to " + url + " failed: " + last_error);
}

}  // namespace

bool retryable_status(int status) { return status == 429 || (status >= 500 && status < 600); }

HttpResponse http_get(const std::string& url, int max_redirects, std::chrono::seconds timeout) {
    std::string current = url;
    for (int hop = 0; hop <= max_redirects; ++hop) {
        UrlParts parts = split_url(current);
        httplib::Client cli = make_client(parts.scheme_host, timeout);
        httplib::Result res = cli.Get(parts.path);
        if (!res) {
            raise(Errc::fetch_failed,
                  "fetch of " + current + " failed: " + httplib::to_string(res.error()));
        }
        if (res->status >= 300 && res->status < 400) {
            std::string loc = res->get_header_value("Location");
            if (loc.empty()) raise(Errc::fetch_failed, "redirect without Location from " + current);
            if (loc.find("://") == std::string::npos) {
                loc = loc[0] == '/' ? parts.scheme_host + loc
                                    : parts.scheme_host + "/" + loc;
            }
            current = loc;
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            raise(Errc::fetch_failed,
                  "fetch of " + current + " returned status " + std::to_string(res->status));
        }
        return to_response(*res);
    }
    raise(Errc::fetch_failed, "too many redirects fetching " + url);
}

HttpResponse http_post_json(const std::string& url, const std::string& body,
                            const std::map<std::string, std::string>& headers,
                            const RetryPolicy& policy) {
    return post_with_retries(url, headers, policy, [&](httplib::Client& cli, const std::string& path) {
        return cli.Post(path, body, "application/json");
    });
}

HttpResponse http_post_multipart(const std::string& url, const std::vector<MultipartField>& fields,
                                 const std::map<std::string, std::string>& headers,
                                 const RetryPolicy& policy) {
    httplib::MultipartFormDataItems items;
    for (const auto& f : fields) {
        items.push_back({f.name, f.content, f.filename, f.content_type});
    }
    return post_with_retries(url, headers, policy, [&](httplib::Client& cli, const std::string& path) {
        return cli.Post(path, items);
    });
}

}  // namespace storyframes
