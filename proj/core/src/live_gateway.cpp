#include <chrono>
#include <cstdlib>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <nlohmann/json.hpp>

#include "graphtune/errors.hpp"
#include "graphtune/gateway.hpp"

namespace graphtune {

namespace {

std::string env_or(const char* name, const char* fallback) {
    const char* v = std::getenv(name);
    return v ? v : fallback;
}

// Splits "https://api.example.com/v1" into origin + path prefix.
std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
    std::size_t scheme = base_url.find("://");
    std::size_t path_start =
        scheme == std::string::npos ? base_url.find('/') : base_url.find('/', scheme + 3);
    if (path_start == std::string::npos) return {base_url, ""};
    std::string prefix = base_url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {base_url.substr(0, path_start), prefix};
}

class LiveGateway final : public Gateway {
public:
    LiveGateway(TemplateRegistry registry, LiveConfig config)
        : Gateway(std::move(registry)), config_(std::move(config)) {
        if (offline_mode())
            throw OfflineViolationError("live gateway requested");
        if (config_.base_url.empty())
            throw GatewayError(GatewayFault::Fatal, "GT_LLM_BASE_URL is not set");
        std::tie(origin_, path_prefix_) = split_base_url(config_.base_url);
    }

    std::string backend_name() const override { return "live"; }

protected:
    std::string do_complete(const PromptTemplate& /*tmpl*/, const CompletionRequest& request,
                            const std::string& rendered) override {
        nlohmann::json body;
        body["model"] = config_.model;
        body["messages"] = nlohmann::json::array({
            {{"role", "user"}, {"content", rendered}},
        });
        body["temperature"] = request.decoding.temperature;
        body["max_tokens"] = request.decoding.max_output_tokens;

        nlohmann::json response = post_json("/chat/completions", body);
        try {
            return response.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw GatewayError(GatewayFault::ParseFailure,
                               std::string("unexpected chat completion shape: ") + e.what());
        }
    }

    std::vector<double> do_embed(const std::string& text) override {
        nlohmann::json body;
        body["model"] = config_.embed_model;
        body["input"] = text;
        nlohmann::json response = post_json("/embeddings", body);
        try {
            return response.at("data").at(0).at("embedding").get<std::vector<double>>();
        } catch (const nlohmann::json::exception& e) {
            throw GatewayError(GatewayFault::ParseFailure,
                               std::string("unexpected embedding shape: ") + e.what());
        }
    }

private:
    nlohmann::json post_json(const std::string& endpoint, const nlohmann::json& body) {
        if (offline_mode()) throw OfflineViolationError("live request to " + endpoint);
        const std::string path = path_prefix_ + endpoint;
        const std::string payload = body.dump();

        httplib::Headers headers;
        if (!config_.api_key.empty())
            headers.emplace("Authorization", "Bearer " + config_.api_key);

        std::string last_error;
        for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
            if (attempt > 0) {
                std::this_thread::sleep_for(std::chrono::milliseconds(250 << (attempt - 1)));
            }
            httplib::Client client(origin_);
            client.set_read_timeout(120, 0);
            client.set_connection_timeout(10, 0);
            auto result = client.Post(path, headers, payload, "application/json");
            if (!result) {
                last_error = "connection failure: " + httplib::to_string(result.error());
                continue; // transient
            }
            if (result->status >= 500 || result->status == 429) {
                last_error = "upstream status " + std::to_string(result->status);
                continue; // transient
            }
            if (result->status != 200) {
                throw GatewayError(GatewayFault::Fatal, "upstream status " +
                                                            std::to_string(result->status) + ": " +
                                                            result->body);
            }
            try {
                return nlohmann::json::parse(result->body);
            } catch (const nlohmann::json::exception& e) {
                throw GatewayError(GatewayFault::ParseFailure,
                                   std::string("invalid JSON from upstream: ") + e.what());
            }
        }
        throw GatewayError(GatewayFault::Transient,
                           "retries exhausted for " + endpoint + " (" + last_error + ")");
    }

    LiveConfig config_;
    std::string origin_;
    std::string path_prefix_;
};

} // namespace

LiveConfig LiveConfig::from_env() {
    LiveConfig config;
    config.base_url = env_or("GT_LLM_BASE_URL", "");
    config.model = env_or("GT_LLM_MODEL", "default-model");
    config.api_key = env_or("GT_LLM_API_KEY", "");
    config.embed_model = env_or("GT_EMBED_MODEL", "default-embedding");
    return config;
}

std::unique_ptr<Gateway> make_live_gateway(TemplateRegistry registry, LiveConfig config) {
    return std::make_unique<LiveGateway>(std::move(registry), std::move(config));
}

} // namespace graphtune
