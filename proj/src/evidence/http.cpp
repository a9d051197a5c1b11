#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cstdlib>
#include <thread>

#include "mwv/error.hpp"
#include "mwv/evidence/http.hpp"
#include "mwv/util.hpp"

namespace mwv::evidence {

namespace {

struct UrlParts {
    std::string origin;  // scheme://host[:port]
    std::string path;    // path + query, at least "/"
};

UrlParts split_url(const std::string& url) {
    const auto scheme = url.find("://");
    if (scheme == std::string::npos) throw Error(ErrorCode::ProviderUnavailable, "not an absolute URL: " + url);
    const auto slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

struct Proxy {
    std::string host;
    int port = 0;
};

std::optional<Proxy> proxy_from_env(bool https) {
    const char* names_https[] = {"HTTPS_PROXY", "https_proxy", "HTTP_PROXY", "http_proxy"};
    const char* names_http[] = {"HTTP_PROXY", "http_proxy"};
    const auto& names = https ? std::vector<const char*>(std::begin(names_https), std::end(names_https))
                              : std::vector<const char*>(std::begin(names_http), std::end(names_http));
    for (const char* name : names) {
        const char* v = std::getenv(name);
        if (!v || !*v) continue;
        std::string s = v;
        if (auto p = s.find("://"); p != std::string::npos) s = s.substr(p + 3);
        if (auto at = s.rfind('@'); at != std::string::npos) s = s.substr(at + 1);
        if (auto slash = s.find('/'); slash != std::string::npos) s.resize(slash);
        const auto colon = s.rfind(':');
        if (colon == std::string::npos) return Proxy{s, 80};
        if (auto port = parse_int(s.substr(colon + 1))) return Proxy{s.substr(0, colon), static_cast<int>(*port)};
    }
    return std::nullopt;
}

class NetworkClient final : public HttpClient {
public:
    explicit NetworkClient(HttpOptions options) : options_(std::move(options)) {}

    HttpResponse get(const std::string& url) override {
        const auto parts = split_url(url);
        httplib::Client client(parts.origin);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
        const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
        client.set_connection_timeout(secs.count(), static_cast<time_t>(usecs.count()));
        client.set_read_timeout(secs.count(), static_cast<time_t>(usecs.count()));
        client.set_follow_location(true);
        if (auto proxy = proxy_from_env(parts.origin.rfind("https", 0) == 0)) {
            client.set_proxy(proxy->host, proxy->port);
        }
        httplib::Headers headers{{"User-Agent", options_.user_agent}, {"Accept-Language", "en"}};
        auto res = client.Get(parts.path, headers);
        if (!res) {
            throw Error(ErrorCode::ProviderUnavailable, url + ": " + httplib::to_string(res.error()));
        }
        return {res->status, res->body};
    }

private:
    HttpOptions options_;
};

}  // namespace

std::unique_ptr<HttpClient> make_network_client(const HttpOptions& options) {
    return std::make_unique<NetworkClient>(options);
}

HttpResponse get_with_retry(HttpClient& client, const std::string& url, const HttpOptions& options) {
    std::string last_error;
    for (int attempt = 0; attempt <= options.retries; ++attempt) {
        try {
            auto res = client.get(url);
            if (res.status < 500) return res;
            last_error = "HTTP " + std::to_string(res.status);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ProviderUnavailable) throw;
            last_error = e.what();
        }
        if (attempt < options.retries && options.polite_delay.count() > 0) {
            std::this_thread::sleep_for(options.polite_delay);
        }
    }
    throw Error(ErrorCode::ProviderUnavailable,
                url + " failed after " + std::to_string(options.retries + 1) + " attempts: " + last_error);
}

std::string url_encode(std::string_view s) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
            c == '.' || c == '~') {
            out += static_cast<char>(c);
        } else if (c == ' ') {
            out += '+';
        } else {
            out += '%';
            out += kHex[c >> 4];
            out += kHex[c & 0xF];
        }
    }
    return out;
}

}  // namespace mwv::evidence
