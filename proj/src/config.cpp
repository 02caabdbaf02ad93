#include "faithcheck/config.hpp"

#include <fstream>

#include <json.hpp>

#include "faithcheck/errors.hpp"

namespace faithcheck::cfg {

using nlohmann::json;

TransportMode transport_mode_from_name(const std::string& name) {
    if (name == "live") return TransportMode::Live;
    if (name == "record") return TransportMode::Record;
    if (name == "replay") return TransportMode::Replay;
    throw ConfigError("unknown transport mode \"" + name +
                      "\" (expected live, record, or replay)");
}

const char* transport_mode_name(TransportMode mode) {
    switch (mode) {
        case TransportMode::Live: return "live";
        case TransportMode::Record: return "record";
        case TransportMode::Replay: return "replay";
    }
    return "replay";
}

PriceTable PriceTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open price table: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("price table is not valid JSON: " +
                          std::string(e.what()));
    }
    PriceTable table;
    for (const auto& [model, prices] : j.items()) {
        try {
            table.prices_[model] = Prices{prices.at("in_per_1k").get<double>(),
                                          prices.at("out_per_1k").get<double>()};
        } catch (const json::exception& e) {
            throw ConfigError("price table entry \"" + model + "\": " + e.what());
        }
    }
    return table;
}

double PriceTable::cost_usd(const std::string& model, long prompt_tokens,
                            long completion_tokens) const {
    const auto it = prices_.find(model);
    if (it == prices_.end()) return 0.0;
    return static_cast<double>(prompt_tokens) / 1000.0 * it->second.in_per_1k +
           static_cast<double>(completion_tokens) / 1000.0 * it->second.out_per_1k;
}

AppConfig AppConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }

    AppConfig config;
    try {
        if (j.contains("providers")) {
            for (const auto& [name, p] : j["providers"].items()) {
                chat::ProviderConfig provider;
                provider.name = name;
                provider.dialect =
                    chat::dialect_from_name(p.value("dialect", "raw"));
                provider.base_url = p.at("base_url").get<std::string>();
                provider.api_key_env = p.value("api_key_env", "");
                provider.model = p.value("model", name);
                config.providers.emplace(name, std::move(provider));
            }
        }
        config.nli_endpoint = j.value("nli_endpoint", "");
        if (j.contains("embed_endpoint"))
            config.embed_endpoint = j["embed_endpoint"].get<std::string>();
        if (j.contains("budget")) {
            const auto& b = j["budget"];
            config.budget.max_tokens = b.value("max_tokens", 512);
            config.budget.overlap_tokens = b.value("overlap_tokens", 32);
            config.budget.special_token_count = b.value("special_token_count", 3);
            config.budget.safety_margin = b.value("safety_margin", 8);
        }
        const auto base = path.parent_path();
        auto resolve = [&base](const std::string& p) {
            const std::filesystem::path fp(p);
            return fp.is_absolute() ? fp : base / fp;
        };
        if (j.contains("rank_file"))
            config.rank_file = resolve(j["rank_file"].get<std::string>());
        if (j.contains("price_table"))
            config.price_table = resolve(j["price_table"].get<std::string>());
        if (j.contains("templates_dir"))
            config.templates_dir = resolve(j["templates_dir"].get<std::string>());
        if (j.contains("abbreviations"))
            config.abbreviations = resolve(j["abbreviations"].get<std::string>());
        config.parallelism = j.value("parallelism", 4);
        if (j.contains("cassette_dir"))
            config.cassette_dir = resolve(j["cassette_dir"].get<std::string>());
        config.transport_mode =
            transport_mode_from_name(j.value("transport_mode", "replay"));
    } catch (const json::exception& e) {
        throw ConfigError("bad config field: " + std::string(e.what()));
    }
    config.validate();
    return config;
}

void AppConfig::validate() const {
    if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
    if (transport_mode != TransportMode::Live && !cassette_dir)
        throw ConfigError(std::string(transport_mode_name(transport_mode)) +
                          " mode requires cassette_dir");
    budget.validate();
}

const chat::ProviderConfig& AppConfig::provider(const std::string& name) const {
    const auto it = providers.find(name);
    if (it == providers.end())
        throw ConfigError("no provider named \"" + name + "\" in config");
    return it->second;
}

}  // namespace faithcheck::cfg
