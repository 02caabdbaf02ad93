#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "faithcheck/textproc.hpp"

namespace faithcheck::corpus {

enum class Variant {
    GoldFull,
    GoldSentence,
    IntrinsicSentence,
    ExtrinsicSentence,
    MixedIntrinsic,
    MixedExtrinsic,
};

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);  // SchemaError on unknown
bool is_mixed(Variant v);
bool is_sentence_level(Variant v);

// Exact fraction, kept un-normalized: k swapped sentences out of n.
struct Fraction {
    std::int64_t k = 0;
    std::int64_t n = 1;

    double value() const { return static_cast<double>(k) / static_cast<double>(n); }
    Fraction normalized() const;

    friend bool operator==(const Fraction& a, const Fraction& b) {
        return a.k * b.n == b.k * a.n;
    }
    friend bool operator<(const Fraction& a, const Fraction& b) {
        return a.k * b.n < b.k * a.n;
    }
};

// One (reference, hypothesis) record; the unit of all scoring.
struct EvalPair {
    std::string id;
    std::string dataset;
    std::string reference;
    std::string hypothesis;
    Variant variant = Variant::GoldFull;
    int expected_score = 5;
    std::optional<int> sentence_index;
    std::optional<Fraction> hallucination_pct;
    std::optional<std::set<int>> swapped_indices;

    // Throws SchemaError on any invariant violation.
    void validate() const;
};

nlohmann::json pair_to_json(const EvalPair& pair);
EvalPair pair_from_json(const nlohmann::json& j);

std::vector<EvalPair> load_pairs(const std::filesystem::path& path);
void save_pairs(const std::vector<EvalPair>& pairs,
                const std::filesystem::path& path);

// One GoldSentence child per hypothesis sentence; ids become "{id}#s{index}".
std::vector<EvalPair> explode_to_sentences(const EvalPair& pair,
                                           const text::Sentencizer& sentencizer);

struct DatasetStats {
    std::string name;
    std::size_t pair_count = 0;
    double ref_avg_tokens = 0;
    double ref_avg_sents = 0;
    double hyp_avg_tokens = 0;
    double hyp_avg_sents = 0;
};

DatasetStats compute_stats(const std::vector<EvalPair>& pairs,
                           const text::Tokenizer& tokenizer,
                           const text::Sentencizer& sentencizer);

nlohmann::json stats_to_json(const DatasetStats& stats);

}  // namespace faithcheck::corpus
