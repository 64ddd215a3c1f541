// HTTP transport for the text-completion endpoint. Kept out of synth.hpp so
// only the binaries that actually talk to a model pull in the socket layer.

#pragma once

#include <string>

#include <httplib.h>
#include <json.hpp>

#include "precond/synth.hpp"

namespace precond {

/// POST <endpoint> with {prompt, max_tokens, temperature, stop:["\n"]},
/// expecting {"text": ...}. Transient failures are retried twice before the
/// error surfaces. The bearer token, when set, rides in the Authorization
/// header (from config or the PRECOND_MODEL_TOKEN environment variable).
class HttpCompletionClient : public CompletionClient {
public:
    explicit HttpCompletionClient(std::string endpoint, std::string token = {})
        : token_(std::move(token)) {
        std::string rest = endpoint;
        if (rest.rfind("http://", 0) == 0) rest = rest.substr(7);
        const auto slash = rest.find('/');
        host_ = slash == std::string::npos ? rest : rest.substr(0, slash);
        path_ = slash == std::string::npos ? "/" : rest.substr(slash);
    }

    std::string complete(const std::string& prompt, int max_tokens,
                         double temperature) override {
        nlohmann::json body;
        body["prompt"] = prompt;
        body["max_tokens"] = max_tokens;
        body["temperature"] = temperature;
        body["stop"] = {"\n"};
        const std::string payload = body.dump();

        std::string last_error;
        for (int attempt = 0; attempt <= retries_; ++attempt) {
            httplib::Client client(host_);
            client.set_connection_timeout(5);
            client.set_read_timeout(30);
            httplib::Headers headers;
            if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
            auto res = client.Post(path_, headers, payload, "application/json");
            if (!res) {
                last_error = "connection to " + host_ + " failed";
                continue;
            }
            if (res->status != 200) {
                last_error = "endpoint returned status " + std::to_string(res->status);
                continue;
            }
            try {
                auto j = nlohmann::json::parse(res->body);
                return j.at("text").get<std::string>();
            } catch (const nlohmann::json::exception& ex) {
                last_error = std::string("malformed completion response: ") + ex.what();
            }
        }
        throw ModelError("completion request failed: " + last_error);
    }

private:
    std::string host_;
    std::string path_;
    std::string token_;
    int retries_ = 2;
};

}  // namespace precond
