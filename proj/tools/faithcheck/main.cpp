#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "faithcheck/analysis.hpp"
#include "faithcheck/baseline.hpp"
#include "faithcheck/config.hpp"
#include "faithcheck/corpus.hpp"
#include "faithcheck/errors.hpp"
#include "faithcheck/judge.hpp"
#include "faithcheck/nli.hpp"
#include "faithcheck/runner.hpp"
#include "faithcheck/synthesis.hpp"
#include "faithcheck/transport.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace faithcheck;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPartial = 2;

struct GlobalArgs {
    std::string config_path = "faithcheck.json";
    std::string transport_override;
    std::uint64_t seed = 0;
    int parallelism_override = 0;
};

struct Wiring {
    cfg::AppConfig config;
    text::Tokenizer tokenizer;
    text::Sentencizer sentencizer;
    cfg::PriceTable prices;
    std::map<std::string, net::CassettePtr> cassettes;

    Wiring(cfg::AppConfig app_config, text::Tokenizer tok)
        : config(std::move(app_config)), tokenizer(std::move(tok)) {}

    net::CassettePtr cassette(const std::string& name) {
        auto& slot = cassettes[name];
        if (!slot) {
            slot = std::make_shared<net::Cassette>(*config.cassette_dir /
                                                   (name + ".jsonl"));
            slot->load();
        }
        return slot;
    }

    net::TransportPtr transport_for(const std::string& cassette_name) {
        switch (config.transport_mode) {
            case cfg::TransportMode::Live:
                return std::make_shared<net::LiveTransport>();
            case cfg::TransportMode::Record:
                return std::make_shared<net::RecordTransport>(
                    std::make_shared<net::LiveTransport>(),
                    cassette(cassette_name));
            case cfg::TransportMode::Replay:
                return std::make_shared<net::ReplayTransport>(
                    cassette(cassette_name));
        }
        return nullptr;
    }
};

std::unique_ptr<Wiring> load_wiring(const GlobalArgs& args) {
    auto config = cfg::AppConfig::load(args.config_path);
    if (!args.transport_override.empty())
        config.transport_mode =
            cfg::transport_mode_from_name(args.transport_override);
    if (args.parallelism_override > 0)
        config.parallelism = args.parallelism_override;
    config.validate();
    if (config.rank_file.empty())
        throw ConfigError("config is missing rank_file");

    auto tokenizer = text::Tokenizer::from_rank_file(config.rank_file);
    auto w = std::make_unique<Wiring>(std::move(config), std::move(tokenizer));
    if (w->config.abbreviations)
        w->sentencizer = text::Sentencizer::from_file(*w->config.abbreviations);
    if (!w->config.price_table.empty())
        w->prices = cfg::PriceTable::load(w->config.price_table);
    return w;
}

int count_failures(const std::vector<analysis::RunRecord>& records) {
    int failures = 0;
    for (const auto& r : records)
        if (r.failure) ++failures;
    return failures;
}

void write_score_outputs(const std::vector<analysis::RunRecord>& records,
                         const fs::path& out_dir) {
    fs::create_directories(out_dir);
    analysis::save_records(records, out_dir / "runrecords.jsonl");

    json summary;
    summary["records"] = records.size();
    summary["failures"] = count_failures(records);
    std::map<std::string, std::size_t> by_tag;
    for (const auto& r : records)
        if (r.failure) ++by_tag[*r.failure];
    summary["failures_by_tag"] = by_tag;
    std::ofstream out(out_dir / "summary.json", std::ios::binary);
    out << summary.dump(1) << '\n';
}

int cmd_score(const GlobalArgs& args, const std::string& data_path,
              const std::string& backend_name, const std::string& model,
              const std::string& out_dir) {
    auto w = load_wiring(args);
    const auto pairs = corpus::load_pairs(data_path);
    const run::Backend backend = run::backend_from_name(backend_name);

    run::ScoringContext context;
    context.backend = backend;
    context.tokenizer = &w->tokenizer;
    context.budget = w->config.budget;
    context.prices = w->prices;

    std::unique_ptr<chat::ChatClient> chat_client;
    std::unique_ptr<judge::RubricPrompt> prompt;
    std::unique_ptr<nli::NliClient> nli_client;
    std::unique_ptr<baseline::EmbedClient> embedder;

    switch (backend) {
        case run::Backend::Judge:
        case run::Backend::JudgeScoreOnly: {
            if (model.empty())
                throw ConfigError("--model is required for judge backends");
            const auto& provider = w->config.provider(model);
            const bool score_only = backend == run::Backend::JudgeScoreOnly;
            context.model = score_only ? model + "-so" : model;
            chat_client = std::make_unique<chat::ChatClient>(
                w->transport_for(model + "." + backend_name), provider);
            prompt = std::make_unique<judge::RubricPrompt>(judge::RubricPrompt::load(
                w->config.templates_dir / "grading.json",
                score_only ? judge::Mode::ScoreOnly : judge::Mode::WithReasoning));
            context.chat_client = chat_client.get();
            context.prompt = prompt.get();
            break;
        }
        case run::Backend::Nli: {
            if (w->config.nli_endpoint.empty())
                throw ConfigError("config is missing nli_endpoint");
            context.model = model.empty() ? "nli" : model;
            nli_client = std::make_unique<nli::NliClient>(w->transport_for("nli"),
                                                          w->config.nli_endpoint);
            context.nli_client = nli_client.get();
            break;
        }
        case run::Backend::Baseline: {
            context.model = model.empty() ? "baseline" : model;
            if (w->config.embed_endpoint) {
                context.baseline.enable_bertscore = true;
                embedder = std::make_unique<baseline::EmbedClient>(
                    w->transport_for("embed"), *w->config.embed_endpoint);
                context.embedder = embedder.get();
            }
            break;
        }
    }

    const auto records = run::score_corpus(pairs, context, w->config.parallelism);
    write_score_outputs(records, out_dir);

    const int failures = count_failures(records);
    if (failures > 0) {
        std::cerr << failures << " of " << records.size()
                  << " pairs failed; see runrecords.jsonl\n";
        return kExitPartial;
    }
    std::cout << "scored " << records.size() << " pairs -> " << out_dir << "\n";
    return kExitOk;
}

int cmd_explode(const GlobalArgs& args, const std::string& data_path,
                const std::string& out_file) {
    auto w = load_wiring(args);
    const auto pairs = corpus::load_pairs(data_path);
    std::vector<corpus::EvalPair> children;
    for (const auto& pair : pairs) {
        auto exploded = corpus::explode_to_sentences(pair, w->sentencizer);
        children.insert(children.end(),
                        std::make_move_iterator(exploded.begin()),
                        std::make_move_iterator(exploded.end()));
    }
    if (!fs::path(out_file).parent_path().empty())
        fs::create_directories(fs::path(out_file).parent_path());
    corpus::save_pairs(children, out_file);
    std::cout << "exploded " << pairs.size() << " pairs into "
              << children.size() << " sentence-level pairs -> " << out_file
              << "\n";
    return kExitOk;
}

int cmd_stats(const GlobalArgs& args, const std::string& data_path,
              const std::string& out_file) {
    auto w = load_wiring(args);
    const auto pairs = corpus::load_pairs(data_path);
    std::map<std::string, std::vector<corpus::EvalPair>> by_dataset;
    for (const auto& p : pairs) by_dataset[p.dataset].push_back(p);

    json out = json::array();
    for (const auto& [name, subset] : by_dataset)
        out.push_back(corpus::stats_to_json(
            corpus::compute_stats(subset, w->tokenizer, w->sentencizer)));
    const std::string text = out.dump(1) + "\n";
    if (!out_file.empty()) {
        std::ofstream f(out_file, std::ios::binary);
        if (!f) throw IoError("cannot write " + out_file);
        f << text;
    } else {
        std::cout << text;
    }
    return kExitOk;
}

int cmd_synthesize(const GlobalArgs& args, const std::string& data_path,
                   const std::string& kind_arg, const std::string& template_name,
                   const std::string& model, const std::string& out_dir,
                   bool explode, double temperature) {
    auto w = load_wiring(args);
    auto pairs = corpus::load_pairs(data_path);
    if (explode) {
        std::vector<corpus::EvalPair> children;
        for (const auto& pair : pairs) {
            auto exploded = corpus::explode_to_sentences(pair, w->sentencizer);
            children.insert(children.end(), exploded.begin(), exploded.end());
        }
        pairs = std::move(children);
    }
    for (const auto& p : pairs)
        if (p.variant != corpus::Variant::GoldSentence)
            throw SchemaError("synthesize needs gold_sent pairs (use --explode "
                              "for gold_full corpora); got " +
                              std::string(corpus::variant_name(p.variant)) +
                              " pair " + p.id);

    std::vector<synth::Kind> kinds;
    if (kind_arg == "both")
        kinds = {synth::Kind::Intrinsic, synth::Kind::Extrinsic};
    else
        kinds = {synth::kind_from_name(kind_arg)};

    const auto& provider = w->config.provider(model);
    chat::ChatClient client(w->transport_for(model + ".synth"), provider);

    struct Outcome {
        std::optional<synth::SynthRecord> record;
        std::string error;
    };

    std::vector<synth::SynthRecord> records;
    std::size_t failures = 0;
    for (const synth::Kind kind : kinds) {
        const auto tmpl =
            synth::SynthTemplate::load(w->config.templates_dir, template_name, kind);
        const auto outcomes = run::parallel_map<Outcome>(
            pairs.size(), w->config.parallelism, [&](std::size_t i) {
                Outcome o;
                try {
                    o.record = synth::synthesize(pairs[i], tmpl, client, temperature);
                } catch (const Error& e) {
                    o.error = e.tag() + std::string(": ") + e.what();
                }
                return o;
            });
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
            if (!outcomes[i].record) {
                std::cerr << "pair " << pairs[i].id << ": " << outcomes[i].error
                          << "\n";
                ++failures;
                continue;
            }
            auto it = std::find_if(records.begin(), records.end(),
                                   [&](const synth::SynthRecord& r) {
                                       return r.pair_id == outcomes[i].record->pair_id &&
                                              r.sentence_index ==
                                                  outcomes[i].record->sentence_index;
                                   });
            if (it == records.end()) {
                records.push_back(*outcomes[i].record);
            } else if (outcomes[i].record->intrinsic) {
                it->intrinsic = outcomes[i].record->intrinsic;
            } else {
                it->extrinsic = outcomes[i].record->extrinsic;
            }
        }
    }

    fs::create_directories(out_dir);
    synth::save_records(records, fs::path(out_dir) / "synth_records.jsonl");

    // derived sentence-level hallucination pairs
    std::vector<corpus::EvalPair> derived;
    for (const auto& r : records) {
        const auto parent = std::find_if(pairs.begin(), pairs.end(),
                                         [&](const corpus::EvalPair& p) {
                                             return p.id == r.pair_id;
                                         });
        if (parent == pairs.end()) continue;
        auto derive = [&](const std::optional<std::string>& rewrite,
                          corpus::Variant variant, const char* suffix) {
            if (!rewrite) return;
            corpus::EvalPair child = *parent;
            child.id = r.pair_id + suffix;
            child.variant = variant;
            child.hypothesis = *rewrite;
            child.expected_score = 1;
            child.validate();
            derived.push_back(std::move(child));
        };
        derive(r.intrinsic, corpus::Variant::IntrinsicSentence, "#intr");
        derive(r.extrinsic, corpus::Variant::ExtrinsicSentence, "#extr");
    }
    corpus::save_pairs(derived, fs::path(out_dir) / "halluc_pairs.jsonl");

    std::cout << "synthesized " << records.size() << " records, "
              << derived.size() << " derived pairs -> " << out_dir << "\n";
    if (failures > 0) {
        std::cerr << failures << " synthesis calls failed\n";
        return kExitPartial;
    }
    return kExitOk;
}

int cmd_mix(const GlobalArgs& args, const std::string& data_path,
            const std::string& records_path, const std::string& kind_arg,
            const std::string& out_file) {
    auto w = load_wiring(args);
    const auto pairs = corpus::load_pairs(data_path);
    const auto records = synth::load_records(records_path);
    const auto mixed = synth::build_progression_set(
        pairs, records, synth::kind_from_name(kind_arg), args.seed,
        w->sentencizer);
    if (!fs::path(out_file).parent_path().empty())
        fs::create_directories(fs::path(out_file).parent_path());
    corpus::save_pairs(mixed, out_file);
    std::cout << "mixed " << pairs.size() << " pairs into " << mixed.size()
              << " progression pairs -> " << out_file << "\n";
    return kExitOk;
}

int cmd_analyze(const std::vector<std::string>& record_files,
                const std::string& out_dir) {
    std::vector<analysis::RunRecord> records;
    for (const auto& file : record_files) {
        auto loaded = analysis::load_records(file);
        records.insert(records.end(), std::make_move_iterator(loaded.begin()),
                       std::make_move_iterator(loaded.end()));
    }
    if (records.empty()) throw EmptyAfterFiltering("no run records loaded");

    const analysis::RunReport report = analysis::build_report(records);
    auto written = analysis::emit_report(report, records, out_dir);

    std::vector<analysis::RunRecord> reasoning, score_only;
    for (const auto& r : records) {
        if (r.backend == "judge") reasoning.push_back(r);
        if (r.backend == "judge-so") score_only.push_back(r);
    }
    if (!reasoning.empty() && !score_only.empty()) {
        try {
            const auto gaps = analysis::sensitivity_gap(reasoning, score_only);
            written.push_back(analysis::emit_sensitivity(gaps, out_dir));
        } catch (const PairSetMismatch& e) {
            std::cerr << "skipping sensitivity.csv: " << e.what() << "\n";
        }
    }
    for (const auto& path : written) std::cout << path.string() << "\n";
    return kExitOk;
}

int cmd_export_training(const std::string& records_path,
                        const std::string& out_file) {
    const auto records = synth::load_records(records_path);
    if (!fs::path(out_file).parent_path().empty())
        fs::create_directories(fs::path(out_file).parent_path());
    const std::size_t rows = nli::export_training_triples(records, out_file);
    std::cout << "wrote " << rows << " training rows -> " << out_file << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"faithcheck: faithfulness scoring for (reference, hypothesis) pairs"};
    app.require_subcommand(1);

    GlobalArgs globals;
    app.add_option("--config", globals.config_path, "config file (JSON)");
    app.add_option("--transport", globals.transport_override,
                   "override transport mode: live|record|replay");
    app.add_option("--seed", globals.seed, "seed for sentence mixing");
    app.add_option("--parallelism", globals.parallelism_override,
                   "override the in-flight request bound");

    auto* score = app.add_subcommand("score", "score every pair in a corpus");
    std::string score_data, score_backend = "judge", score_model, score_out;
    score->add_option("--data", score_data, "corpus JSONL")->required();
    score->add_option("--backend", score_backend, "judge|judge-so|nli|baseline");
    score->add_option("--model", score_model, "provider name from config");
    score->add_option("--out", score_out, "output directory")->required();

    auto* synthesize =
        app.add_subcommand("synthesize", "fabricate hallucination counterparts");
    std::string synth_data, synth_kind = "both", synth_template, synth_model,
                synth_out;
    bool synth_explode = false;
    double synth_temperature = 0.0;
    synthesize->add_option("--data", synth_data, "gold corpus JSONL")->required();
    synthesize->add_option("--kind", synth_kind, "intrinsic|extrinsic|both");
    synthesize->add_option("--template", synth_template, "template name")
        ->required();
    synthesize->add_option("--model", synth_model, "provider name")->required();
    synthesize->add_option("--out", synth_out, "output directory")->required();
    synthesize->add_flag("--explode", synth_explode,
                         "sentence-split gold_full pairs first");
    synthesize->add_option("--temperature", synth_temperature,
                           "generation temperature (default 0)");

    auto* mix = app.add_subcommand("mix", "build percentage-mixed hypotheses");
    std::string mix_data, mix_records, mix_kind = "intrinsic", mix_out;
    mix->add_option("--data", mix_data, "gold_full corpus JSONL")->required();
    mix->add_option("--records", mix_records, "synth records JSONL")->required();
    mix->add_option("--kind", mix_kind, "intrinsic|extrinsic");
    mix->add_option("--out", mix_out, "output JSONL")->required();

    auto* explode =
        app.add_subcommand("explode", "split gold_full pairs into sentences");
    std::string explode_data, explode_out;
    explode->add_option("--data", explode_data, "corpus JSONL")->required();
    explode->add_option("--out", explode_out, "output JSONL")->required();

    auto* stats = app.add_subcommand("stats", "per-dataset corpus statistics");
    std::string stats_data, stats_out;
    stats->add_option("--data", stats_data, "corpus JSONL")->required();
    stats->add_option("--out", stats_out, "output JSON (default stdout)");

    auto* analyze = app.add_subcommand("analyze", "reports from run records");
    std::vector<std::string> analyze_records;
    std::string analyze_out;
    analyze->add_option("--records", analyze_records, "runrecords JSONL files")
        ->required();
    analyze->add_option("--out", analyze_out, "output directory")->required();

    auto* exportt =
        app.add_subcommand("export-nli-training", "entailment tuning triples");
    std::string export_records, export_out;
    exportt->add_option("--records", export_records, "synth records JSONL")
        ->required();
    exportt->add_option("--out", export_out, "output JSONL")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (score->parsed())
            return cmd_score(globals, score_data, score_backend, score_model,
                             score_out);
        if (synthesize->parsed())
            return cmd_synthesize(globals, synth_data, synth_kind, synth_template,
                                  synth_model, synth_out, synth_explode,
                                  synth_temperature);
        if (mix->parsed())
            return cmd_mix(globals, mix_data, mix_records, mix_kind, mix_out);
        if (explode->parsed())
            return cmd_explode(globals, explode_data, explode_out);
        if (stats->parsed()) return cmd_stats(globals, stats_data, stats_out);
        if (analyze->parsed()) return cmd_analyze(analyze_records, analyze_out);
        if (exportt->parsed())
            return cmd_export_training(export_records, export_out);
    } catch (const Error& e) {
        std::cerr << "error [" << e.tag() << "]: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
