#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace faithcheck::net {

using Headers = std::vector<std::pair<std::string, std::string>>;

struct HttpResponse {
    int status = 0;
    std::string body;
    double latency_seconds = 0.0;
};

class Transport {
public:
    virtual ~Transport() = default;
    // Throws TransportError on connection failure or non-2xx status.
    virtual HttpResponse post(const std::string& url, const std::string& body,
                              const Headers& headers) = 0;
};

using TransportPtr = std::shared_ptr<Transport>;

// url + '\n' + JSON body with sorted keys and no insignificant whitespace.
// Headers stay out of the hash so credentials never key a cassette.
std::string canonical_request(const std::string& url, const std::string& body);
std::string request_hash(const std::string& url, const std::string& body);
std::string sha256_hex(const std::string& data);

struct CassetteEntry {
    std::string request_hash;
    std::string url;
    std::string request_body;
    std::string response_body;
    int status = 200;
    double latency_ms = 0.0;
};

// Append-only JSONL store of recorded exchanges, keyed by request hash.
class Cassette {
public:
    explicit Cassette(std::filesystem::path path);

    // Reads existing entries; CassetteCorrupt on duplicate hash with a
    // different body. Missing file is an empty cassette.
    void load();

    std::optional<CassetteEntry> find(const std::string& hash) const;
    void append(const CassetteEntry& entry);  // serialized; idempotent per hash
    std::size_t size() const { return entries_.size(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::map<std::string, CassetteEntry> entries_;
    mutable std::mutex mutex_;
};

using CassettePtr = std::shared_ptr<Cassette>;

class LiveTransport : public Transport {
public:
    explicit LiveTransport(double timeout_seconds = 60.0)
        : timeout_seconds_(timeout_seconds) {}
    HttpResponse post(const std::string& url, const std::string& body,
                      const Headers& headers) override;

private:
    double timeout_seconds_;
};

// Replays recorded responses; never touches the network. Reported latency
// is the recorded latency. Throws CassetteMiss on unknown requests.
class ReplayTransport : public Transport {
public:
    explicit ReplayTransport(CassettePtr cassette);
    HttpResponse post(const std::string& url, const std::string& body,
                      const Headers& headers) override;

private:
    CassettePtr cassette_;
};

// Forwards to an inner transport and appends the exchange to a cassette.
class RecordTransport : public Transport {
public:
    RecordTransport(TransportPtr inner, CassettePtr cassette);
    HttpResponse post(const std::string& url, const std::string& body,
                      const Headers& headers) override;

private:
    TransportPtr inner_;
    CassettePtr cassette_;
};

struct RetryPolicy {
    std::vector<double> backoff_seconds = {0.5, 1.0, 2.0};  // one retry per entry
};

// Retries on TransportError only; protocol errors and cassette misses
// propagate immediately.
HttpResponse post_with_retries(Transport& transport, const std::string& url,
                               const std::string& body, const Headers& headers,
                               const RetryPolicy& policy = {});

}  // namespace faithcheck::net
