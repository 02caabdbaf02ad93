#pragma once

#include <optional>
#include <string>

#include "faithcheck/transport.hpp"

namespace faithcheck::chat {

enum class Dialect { OpenAiStyle, AnthropicStyle, Raw };

Dialect dialect_from_name(const std::string& name);  // ConfigError on unknown
const char* dialect_name(Dialect d);

struct ProviderConfig {
    std::string name;         // registry key, also the model label in reports
    Dialect dialect = Dialect::Raw;
    std::string base_url;     // full POST url
    std::string api_key_env;  // environment variable holding the key
    std::string model;        // model id sent on the wire
};

struct ChatRequest {
    std::string system;
    std::string user;
    double temperature = 0.0;
};

// Normalized response shape shared by all dialects.
struct ChatResult {
    std::string content;
    std::optional<long> prompt_tokens;
    std::optional<long> completion_tokens;
    double latency_seconds = 0.0;
};

class ChatClient {
public:
    ChatClient(net::TransportPtr transport, ProviderConfig provider,
               net::RetryPolicy retry = {});

    ChatResult complete(const ChatRequest& request) const;

    // Wire-format request body for the provider's dialect. Exposed so
    // fixture generation and cassette tooling share the exact bytes.
    std::string request_body(const ChatRequest& request) const;

    const ProviderConfig& provider() const { return provider_; }

private:
    net::Headers auth_headers() const;

    net::TransportPtr transport_;
    ProviderConfig provider_;
    net::RetryPolicy retry_;
};

}  // namespace faithcheck::chat
