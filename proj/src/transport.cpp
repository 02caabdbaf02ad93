#include "faithcheck/transport.hpp"

#include <chrono>
#include <fstream>
#include <thread>

#include <json.hpp>
#include <openssl/evp.h>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "faithcheck/errors.hpp"

namespace faithcheck::net {

using nlohmann::json;

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

std::string canonical_request(const std::string& url, const std::string& body) {
    std::string canonical_body = body;
    try {
        // nlohmann::json keeps object keys sorted; dump() re-serializes
        // without insignificant whitespace.
        canonical_body = json::parse(body).dump();
    } catch (const json::exception&) {
        // non-JSON bodies hash verbatim
    }
    return url + "\n" + canonical_body;
}

std::string request_hash(const std::string& url, const std::string& body) {
    return sha256_hex(canonical_request(url, body));
}

Cassette::Cassette(std::filesystem::path path) : path_(std::move(path)) {}

void Cassette::load() {
    std::lock_guard<std::mutex> lock(mutex_);
    entries_.clear();
    std::ifstream in(path_, std::ios::binary);
    if (!in) return;  // empty cassette
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw CassetteCorrupt(path_.string() + " line " +
                                  std::to_string(line_no) + ": " + e.what());
        }
        CassetteEntry e;
        try {
            e.request_hash = j.at("request_hash").get<std::string>();
            e.url = j.at("url").get<std::string>();
            e.request_body = j.at("request_body").get<std::string>();
            e.response_body = j.at("response_body").get<std::string>();
            e.status = j.at("status").get<int>();
            e.latency_ms = j.at("latency_ms").get<double>();
        } catch (const json::exception& ex) {
            throw CassetteCorrupt(path_.string() + " line " +
                                  std::to_string(line_no) + ": " + ex.what());
        }
        const auto it = entries_.find(e.request_hash);
        if (it != entries_.end()) {
            if (it->second.request_body != e.request_body ||
                it->second.url != e.url)
                throw CassetteCorrupt(path_.string() + " line " +
                                      std::to_string(line_no) +
                                      ": duplicate hash with different body");
            continue;  // harmless re-recording of the same exchange
        }
        entries_.emplace(e.request_hash, std::move(e));
    }
}

std::optional<CassetteEntry> Cassette::find(const std::string& hash) const {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto it = entries_.find(hash);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void Cassette::append(const CassetteEntry& entry) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto it = entries_.find(entry.request_hash);
    if (it != entries_.end()) {
        if (it->second.request_body != entry.request_body)
            throw CassetteCorrupt("appending duplicate hash with different body");
        return;
    }
    std::filesystem::create_directories(path_.parent_path().empty()
                                            ? "."
                                            : path_.parent_path());
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot append to cassette: " + path_.string());
    const json j{{"request_hash", entry.request_hash},
                 {"url", entry.url},
                 {"request_body", entry.request_body},
                 {"response_body", entry.response_body},
                 {"status", entry.status},
                 {"latency_ms", entry.latency_ms}};
    out << j.dump() << '\n';
    entries_.emplace(entry.request_hash, entry);
}

HttpResponse LiveTransport::post(const std::string& url, const std::string& body,
                                 const Headers& headers) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw TransportError("malformed url: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    const std::string origin =
        path_start == std::string::npos ? url : url.substr(0, path_start);
    const std::string path =
        path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    client.set_connection_timeout(static_cast<time_t>(timeout_seconds_));
    client.set_read_timeout(static_cast<time_t>(timeout_seconds_));

    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);

    const auto start = std::chrono::steady_clock::now();
    auto result = client.Post(path, h, body, "application/json");
    const auto elapsed = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();

    if (!result)
        throw TransportError("POST " + url + " failed: " +
                             httplib::to_string(result.error()));
    if (result->status < 200 || result->status >= 300)
        throw TransportError("POST " + url + " returned status " +
                             std::to_string(result->status) + ": " +
                             result->body.substr(0, 200));
    return HttpResponse{result->status, result->body, elapsed};
}

ReplayTransport::ReplayTransport(CassettePtr cassette)
    : cassette_(std::move(cassette)) {}

HttpResponse ReplayTransport::post(const std::string& url, const std::string& body,
                                   const Headers& /*headers*/) {
    const auto entry = cassette_->find(request_hash(url, body));
    if (!entry)
        throw CassetteMiss("no recorded response for POST " + url + " in " +
                           cassette_->path().string());
    return HttpResponse{entry->status, entry->response_body,
                        entry->latency_ms / 1000.0};
}

RecordTransport::RecordTransport(TransportPtr inner, CassettePtr cassette)
    : inner_(std::move(inner)), cassette_(std::move(cassette)) {}

HttpResponse RecordTransport::post(const std::string& url, const std::string& body,
                                   const Headers& headers) {
    const HttpResponse response = inner_->post(url, body, headers);
    cassette_->append(CassetteEntry{request_hash(url, body), url, body,
                                    response.body, response.status,
                                    response.latency_seconds * 1000.0});
    return response;
}

HttpResponse post_with_retries(Transport& transport, const std::string& url,
                               const std::string& body, const Headers& headers,
                               const RetryPolicy& policy) {
    std::size_t attempt = 0;
    for (;;) {
        try {
            return transport.post(url, body, headers);
        } catch (const TransportError&) {
            if (attempt >= policy.backoff_seconds.size()) throw;
            const double delay = policy.backoff_seconds[attempt++];
            if (delay > 0)
                std::this_thread::sleep_for(
                    std::chrono::duration<double>(delay));
        }
    }
}

}  // namespace faithcheck::net
