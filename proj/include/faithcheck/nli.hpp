#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "faithcheck/corpus.hpp"
#include "faithcheck/judge.hpp"
#include "faithcheck/segmenter.hpp"
#include "faithcheck/synthesis.hpp"
#include "faithcheck/transport.hpp"

namespace faithcheck::nli {

struct NliScore {
    std::vector<double> segment_probs;  // one entailment probability per window
    double aggregate_prob = 0.0;        // max over segments
    double scaled_score = 0.0;          // 1 + 4 * aggregate
    judge::Usage usage;
};

// Affine map [0,1] -> [1,5]; RangeError outside [0,1].
double scale_prob(double p);

class NliClient {
public:
    NliClient(net::TransportPtr transport, std::string endpoint,
              net::RetryPolicy retry = {});

    // Plans windows, issues one batched request for all of them, and
    // max-aggregates. Out-of-range probabilities are protocol errors,
    // never clamped.
    NliScore score_pair(const corpus::EvalPair& pair,
                        const segment::BudgetConfig& cfg,
                        const text::Tokenizer& tokenizer) const;

    // Raw entailment scores for explicit (premise, hypothesis) pairs.
    std::vector<double> score_batch(
        const std::vector<std::pair<std::string, std::string>>& pairs,
        double* latency_seconds = nullptr) const;

    // Token counts from the serving model's tokenizer (the /count route).
    std::vector<std::size_t> remote_count(
        const std::vector<std::string>& texts) const;

    const std::string& endpoint() const { return endpoint_; }

private:
    net::TransportPtr transport_;
    std::string endpoint_;
    net::RetryPolicy retry_;
};

// Entailment tuning rows: label 1 for the gold sentence, 0 for each
// rewrite. Returns rows written. The fine-tune itself happens elsewhere.
std::size_t export_training_triples(const std::vector<synth::SynthRecord>& records,
                                    const std::filesystem::path& path);

}  // namespace faithcheck::nli
