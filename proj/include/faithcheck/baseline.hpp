#pragma once

#include <optional>
#include <string>
#include <vector>

#include "faithcheck/corpus.hpp"
#include "faithcheck/transport.hpp"

namespace faithcheck::baseline {

// lowercase, punctuation stripped, whitespace split
std::vector<std::string> lexical_tokens(std::string_view text);

struct RougeScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// LCS-based: P = LCS/|hyp|, R = LCS/|ref|.
RougeScore rouge_l(const std::vector<std::string>& reference,
                   const std::vector<std::string>& hypothesis);

// Sentence-level BLEU-4, add-one smoothing for zero counts at n >= 2,
// brevity penalty exp(1 - |ref|/|hyp|) when the hypothesis is shorter.
// Hypotheses under 4 tokens cap the order at |hyp|.
double bleu(const std::vector<std::string>& reference,
            const std::vector<std::string>& hypothesis);

// Greedy-matching F over per-token embeddings; cosine similarities are
// rescaled from [-1,1] to [0,1] before averaging.
double bertscore_f(const std::vector<std::vector<double>>& reference_vectors,
                   const std::vector<std::vector<double>>& hypothesis_vectors);

// POST {"texts": [...]} -> {"vectors": [[[...]...]...], "tokens": [[...]...]}
class EmbedClient {
public:
    EmbedClient(net::TransportPtr transport, std::string endpoint,
                net::RetryPolicy retry = {});

    std::vector<std::vector<std::vector<double>>> embed(
        const std::vector<std::string>& texts,
        double* latency_seconds = nullptr) const;

private:
    net::TransportPtr transport_;
    std::string endpoint_;
    net::RetryPolicy retry_;
};

struct BaselineConfig {
    bool enable_rouge = true;
    bool enable_bleu = true;
    bool enable_bertscore = false;  // needs an embedding endpoint
};

struct BaselineScore {
    std::optional<double> rouge_l_f;
    std::optional<double> bleu;
    std::optional<double> bertscore_f;
    double composite = 0.0;  // unweighted mean of the enabled components
    double scaled = 0.0;     // 1 + 4 * composite
    double embed_latency_seconds = 0.0;
};

BaselineScore composite(const corpus::EvalPair& pair, const BaselineConfig& cfg,
                        const EmbedClient* embedder = nullptr);

}  // namespace faithcheck::baseline
