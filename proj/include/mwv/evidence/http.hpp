#pragma once

#include <chrono>
#include <memory>
#include <string>

namespace mwv::evidence {

struct HttpResponse {
    int status = 0;
    std::string body;
};

struct HttpOptions {
    std::chrono::milliseconds timeout{10000};
    int retries = 2;
    std::string user_agent = "mwv-evidence-collector/1.0 (research; +https://example.invalid/mwv)";
    // Pause before each outgoing request to the same provider.
    std::chrono::milliseconds polite_delay{2000};
};

// Fetches a URL. Implementations throw mwv::Error(ProviderUnavailable) on transport failure.
class HttpClient {
public:
    virtual ~HttpClient() = default;
    virtual HttpResponse get(const std::string& url) = 0;
};

// Plain HTTP(S) client; honours HTTPS_PROXY / HTTP_PROXY (and lowercase variants).
std::unique_ptr<HttpClient> make_network_client(const HttpOptions& options);

// Retries transport failures and 5xx answers up to options.retries extra times.
HttpResponse get_with_retry(HttpClient& client, const std::string& url, const HttpOptions& options);

std::string url_encode(std::string_view s);

}  // namespace mwv::evidence
