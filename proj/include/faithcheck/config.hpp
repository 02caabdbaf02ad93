#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "faithcheck/chat.hpp"
#include "faithcheck/segmenter.hpp"

namespace faithcheck::cfg {

enum class TransportMode { Live, Record, Replay };

TransportMode transport_mode_from_name(const std::string& name);
const char* transport_mode_name(TransportMode mode);

struct Prices {
    double in_per_1k = 0.0;
    double out_per_1k = 0.0;
};

class PriceTable {
public:
    PriceTable() = default;
    static PriceTable load(const std::filesystem::path& path);

    // Unlisted models cost 0.
    double cost_usd(const std::string& model, long prompt_tokens,
                    long completion_tokens) const;

private:
    std::map<std::string, Prices> prices_;
};

struct AppConfig {
    std::map<std::string, chat::ProviderConfig> providers;
    std::string nli_endpoint;
    std::optional<std::string> embed_endpoint;
    segment::BudgetConfig budget;
    std::filesystem::path rank_file;
    std::filesystem::path price_table;
    std::filesystem::path templates_dir;
    std::optional<std::filesystem::path> abbreviations;
    int parallelism = 4;
    std::optional<std::filesystem::path> cassette_dir;
    TransportMode transport_mode = TransportMode::Replay;

    static AppConfig load(const std::filesystem::path& path);
    void validate() const;  // ConfigError

    const chat::ProviderConfig& provider(const std::string& name) const;
};

}  // namespace faithcheck::cfg
