#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "faithcheck/chat.hpp"
#include "faithcheck/corpus.hpp"
#include "faithcheck/textproc.hpp"

namespace faithcheck::synth {

enum class Kind { Intrinsic, Extrinsic };

const char* kind_name(Kind k);
Kind kind_from_name(const std::string& name);

// A gold sentence plus its fabricated hallucination counterparts.
struct SynthRecord {
    std::string pair_id;
    int sentence_index = 0;
    std::string gold_sentence;
    std::optional<std::string> intrinsic;
    std::optional<std::string> extrinsic;
    std::string generator_model;

    void validate() const;
};

std::vector<SynthRecord> load_records(const std::filesystem::path& path);
void save_records(const std::vector<SynthRecord>& records,
                  const std::filesystem::path& path);

// Per-dataset instruction wrapped in the fixed envelope:
//   instruction \n ===== \n SENTENCE: \n {{sentencized}} \n ===== \n REWRITE:
struct SynthTemplate {
    std::string name;
    Kind kind = Kind::Intrinsic;
    std::string instruction;

    // Loads <templates_dir>/synthesis/<name>.<kind>.txt
    static SynthTemplate load(const std::filesystem::path& templates_dir,
                              const std::string& name, Kind kind);
};

std::string render_envelope(const SynthTemplate& tmpl, std::string_view sentence);

// Soft check: extrinsic rewrites keep the gold sentence's leading content.
bool extrinsic_prefix_preserved(const std::string& gold, const std::string& rewrite);

// One chat call; the trimmed completion becomes the rewrite for the
// template's kind. DegenerateRewrite when empty or identical to gold.
SynthRecord synthesize(const corpus::EvalPair& pair, const SynthTemplate& tmpl,
                       const chat::ChatClient& client, double temperature = 0.0);

// SplitMix64: tiny, fully specified 64-bit generator, reproducible across
// platforms and implementations.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    // Unbiased draw in [0, bound) by rejection.
    std::uint64_t below(std::uint64_t bound);

private:
    std::uint64_t state_;
};

// FNV-1a over the pair id, mixed with the global seed.
std::uint64_t derive_pair_seed(std::uint64_t global_seed, std::string_view pair_id);

// k distinct indices in [0, n) via a partial Fisher-Yates shuffle.
std::set<int> sample_indices(int n, int k, std::uint64_t seed);

// Swaps k seeded-random gold sentences for their counterparts; sentences
// joined by single spaces.
std::pair<std::string, std::set<int>> mix_hypothesis(
    const std::vector<std::string>& gold_sentences,
    const std::vector<std::string>& counterparts, int k, std::uint64_t seed);

// For each gold_full pair and each k in 0..n, one Mixed pair with
// hallucination_pct = k/n. Per-pair seeds derive from (seed, pair id); the
// draw for each k is independent (no containment between k and k+1).
std::vector<corpus::EvalPair> build_progression_set(
    const std::vector<corpus::EvalPair>& pairs,
    const std::vector<SynthRecord>& records, Kind kind, std::uint64_t seed,
    const text::Sentencizer& sentencizer);

}  // namespace faithcheck::synth
