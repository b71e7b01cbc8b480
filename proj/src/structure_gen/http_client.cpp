#include <cstdlib>

#include "wheelhouse/error.hpp"
#include "wheelhouse/structure_gen.hpp"

// Last: httplib pulls in <resolv.h>, whose _res macro breaks Eigen headers.
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

namespace wheelhouse {

HttpLlmClient::HttpLlmClient(std::string base_url, std::string path)
    : base_url_(std::move(base_url)), path_(std::move(path)) {
    const char* key = std::getenv("WHEELHOUSE_LLM_KEY");
    if (!key || !*key) throw ConfigError("WHEELHOUSE_LLM_KEY is not set; refusing to use the live LLM client");
    key_ = key;
}

std::string HttpLlmClient::complete(const std::string& prompt, const GenerationConfig& config) {
    httplib::Client client(base_url_);
    client.set_connection_timeout(10);
    client.set_read_timeout(120);
    client.set_bearer_token_auth(key_);
    const auto res = client.Post(path_, completion_request_body(prompt, config), "application/json");
    if (!res) throw LlmError("LLM request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw LlmError("LLM endpoint returned HTTP " + std::to_string(res->status));
    return completion_response_text(res->body);
}

}  // namespace wheelhouse
