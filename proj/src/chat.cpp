#include "faithcheck/chat.hpp"

#include <cstdlib>

#include <json.hpp>

#include "faithcheck/errors.hpp"

namespace faithcheck::chat {

using nlohmann::json;

Dialect dialect_from_name(const std::string& name) {
    if (name == "openai-style") return Dialect::OpenAiStyle;
    if (name == "anthropic-style") return Dialect::AnthropicStyle;
    if (name == "raw") return Dialect::Raw;
    throw ConfigError("unknown dialect \"" + name +
                      "\" (expected openai-style, anthropic-style, or raw)");
}

const char* dialect_name(Dialect d) {
    switch (d) {
        case Dialect::OpenAiStyle: return "openai-style";
        case Dialect::AnthropicStyle: return "anthropic-style";
        case Dialect::Raw: return "raw";
    }
    return "raw";
}

ChatClient::ChatClient(net::TransportPtr transport, ProviderConfig provider,
                       net::RetryPolicy retry)
    : transport_(std::move(transport)),
      provider_(std::move(provider)),
      retry_(std::move(retry)) {}

std::string ChatClient::request_body(const ChatRequest& request) const {
    json body;
    switch (provider_.dialect) {
        case Dialect::OpenAiStyle:
        case Dialect::Raw:
            body = {{"model", provider_.model},
                    {"temperature", request.temperature},
                    {"messages",
                     json::array({{{"role", "system"}, {"content", request.system}},
                                  {{"role", "user"}, {"content", request.user}}})}};
            break;
        case Dialect::AnthropicStyle:
            body = {{"model", provider_.model},
                    {"temperature", request.temperature},
                    {"max_tokens", 2048},
                    {"system", request.system},
                    {"messages",
                     json::array({{{"role", "user"}, {"content", request.user}}})}};
            break;
    }
    return body.dump();
}

net::Headers ChatClient::auth_headers() const {
    net::Headers headers;
    std::string key;
    if (!provider_.api_key_env.empty()) {
        if (const char* v = std::getenv(provider_.api_key_env.c_str())) key = v;
    }
    switch (provider_.dialect) {
        case Dialect::OpenAiStyle:
        case Dialect::Raw:
            if (!key.empty()) headers.emplace_back("Authorization", "Bearer " + key);
            break;
        case Dialect::AnthropicStyle:
            if (!key.empty()) headers.emplace_back("x-api-key", key);
            headers.emplace_back("anthropic-version", "2023-06-01");
            break;
    }
    return headers;
}

ChatResult ChatClient::complete(const ChatRequest& request) const {
    const std::string body = request_body(request);
    const net::HttpResponse response = net::post_with_retries(
        *transport_, provider_.base_url, body, auth_headers(), retry_);

    json j;
    try {
        j = json::parse(response.body);
    } catch (const json::exception& e) {
        throw ProtocolError("chat endpoint returned non-JSON body: " +
                            std::string(e.what()));
    }

    ChatResult result;
    result.latency_seconds = response.latency_seconds;
    try {
        switch (provider_.dialect) {
            case Dialect::OpenAiStyle:
                result.content = j.at("choices").at(0).at("message").at("content")
                                     .get<std::string>();
                if (j.contains("usage")) {
                    result.prompt_tokens =
                        j["usage"].value("prompt_tokens", -1L);
                    result.completion_tokens =
                        j["usage"].value("completion_tokens", -1L);
                }
                break;
            case Dialect::AnthropicStyle: {
                const auto& content = j.at("content");
                std::string text;
                for (const auto& block : content)
                    if (block.value("type", "") == "text")
                        text += block.at("text").get<std::string>();
                result.content = text;
                if (j.contains("usage")) {
                    result.prompt_tokens = j["usage"].value("input_tokens", -1L);
                    result.completion_tokens =
                        j["usage"].value("output_tokens", -1L);
                }
                break;
            }
            case Dialect::Raw:
                result.content = j.at("content").get<std::string>();
                if (j.contains("usage")) {
                    result.prompt_tokens =
                        j["usage"].value("prompt_tokens", -1L);
                    result.completion_tokens =
                        j["usage"].value("completion_tokens", -1L);
                }
                break;
        }
    } catch (const json::exception& e) {
        throw ProtocolError(std::string("chat response missing fields for ") +
                            dialect_name(provider_.dialect) + " dialect: " +
                            e.what());
    }
    if (result.prompt_tokens && *result.prompt_tokens < 0)
        result.prompt_tokens.reset();
    if (result.completion_tokens && *result.completion_tokens < 0)
        result.completion_tokens.reset();
    return result;
}

}  // namespace faithcheck::chat
