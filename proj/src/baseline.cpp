#include "faithcheck/baseline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include <json.hpp>

#include "faithcheck/errors.hpp"

namespace faithcheck::baseline {

using nlohmann::json;

std::vector<std::string> lexical_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (const char c : text) {
        const auto u = static_cast<unsigned char>(c);
        if (std::isalnum(u) || u >= 0x80) {
            current.push_back(static_cast<char>(std::tolower(u)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

RougeScore rouge_l(const std::vector<std::string>& reference,
                   const std::vector<std::string>& hypothesis) {
    if (reference.empty() || hypothesis.empty()) return {};

    const std::size_t m = reference.size(), n = hypothesis.size();
    // single-row LCS table
    std::vector<std::size_t> prev(n + 1, 0), curr(n + 1, 0);
    for (std::size_t i = 1; i <= m; ++i) {
        for (std::size_t j = 1; j <= n; ++j) {
            curr[j] = reference[i - 1] == hypothesis[j - 1]
                          ? prev[j - 1] + 1
                          : std::max(prev[j], curr[j - 1]);
        }
        std::swap(prev, curr);
    }
    const auto lcs = static_cast<double>(prev[n]);

    RougeScore s;
    s.precision = lcs / static_cast<double>(n);
    s.recall = lcs / static_cast<double>(m);
    s.f1 = (s.precision + s.recall) > 0
               ? 2 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    return s;
}

double bleu(const std::vector<std::string>& reference,
            const std::vector<std::string>& hypothesis) {
    if (hypothesis.empty() || reference.empty()) return 0.0;

    const std::size_t max_order = std::min<std::size_t>(4, hypothesis.size());
    double log_sum = 0.0;
    for (std::size_t order = 1; order <= max_order; ++order) {
        std::map<std::vector<std::string>, std::size_t> ref_grams;
        for (std::size_t i = 0; i + order <= reference.size(); ++i)
            ++ref_grams[{reference.begin() + static_cast<std::ptrdiff_t>(i),
                         reference.begin() + static_cast<std::ptrdiff_t>(i + order)}];

        std::map<std::vector<std::string>, std::size_t> hyp_grams;
        for (std::size_t i = 0; i + order <= hypothesis.size(); ++i)
            ++hyp_grams[{hypothesis.begin() + static_cast<std::ptrdiff_t>(i),
                         hypothesis.begin() + static_cast<std::ptrdiff_t>(i + order)}];

        std::size_t matches = 0, total = 0;
        for (const auto& [gram, count] : hyp_grams) {
            total += count;
            const auto it = ref_grams.find(gram);
            if (it != ref_grams.end()) matches += std::min(count, it->second);
        }
        if (total == 0) return 0.0;  // hypothesis shorter than the order

        double p;
        if (matches == 0) {
            if (order == 1) return 0.0;  // no smoothing at order 1
            p = 1.0 / (static_cast<double>(total) + 1.0);
        } else {
            p = static_cast<double>(matches) / static_cast<double>(total);
        }
        log_sum += std::log(p);
    }

    const double geo_mean = std::exp(log_sum / static_cast<double>(max_order));
    double brevity = 1.0;
    if (hypothesis.size() < reference.size())
        brevity = std::exp(1.0 - static_cast<double>(reference.size()) /
                                     static_cast<double>(hypothesis.size()));
    return brevity * geo_mean;
}

namespace {

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw DimensionMismatch("embedding dimensions differ: " +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0 || nb == 0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

double greedy_side(const std::vector<std::vector<double>>& from,
                   const std::vector<std::vector<double>>& to) {
    double sum = 0;
    for (const auto& v : from) {
        double best = -1.0;
        for (const auto& w : to) best = std::max(best, cosine(v, w));
        sum += (best + 1.0) / 2.0;  // rescale [-1,1] -> [0,1]
    }
    return sum / static_cast<double>(from.size());
}

}  // namespace

double bertscore_f(const std::vector<std::vector<double>>& reference_vectors,
                   const std::vector<std::vector<double>>& hypothesis_vectors) {
    if (reference_vectors.empty() || hypothesis_vectors.empty()) return 0.0;
    const double recall = greedy_side(reference_vectors, hypothesis_vectors);
    const double precision = greedy_side(hypothesis_vectors, reference_vectors);
    if (precision + recall == 0) return 0.0;
    return 2 * precision * recall / (precision + recall);
}

EmbedClient::EmbedClient(net::TransportPtr transport, std::string endpoint,
                         net::RetryPolicy retry)
    : transport_(std::move(transport)),
      endpoint_(std::move(endpoint)),
      retry_(std::move(retry)) {}

std::vector<std::vector<std::vector<double>>> EmbedClient::embed(
    const std::vector<std::string>& texts, double* latency_seconds) const {
    json body;
    body["texts"] = texts;
    const net::HttpResponse response = net::post_with_retries(
        *transport_, endpoint_, body.dump(), {}, retry_);
    if (latency_seconds) *latency_seconds = response.latency_seconds;

    json j;
    try {
        j = json::parse(response.body);
    } catch (const json::exception& e) {
        throw ProtocolError("embedding endpoint returned non-JSON body: " +
                            std::string(e.what()));
    }
    if (!j.contains("vectors") || !j["vectors"].is_array() ||
        j["vectors"].size() != texts.size())
        throw ProtocolError("embedding endpoint returned wrong vector count");

    std::vector<std::vector<std::vector<double>>> out;
    std::size_t dim = 0;
    for (const auto& per_text : j["vectors"]) {
        std::vector<std::vector<double>> vectors;
        for (const auto& vec : per_text) {
            auto v = vec.get<std::vector<double>>();
            if (dim == 0) dim = v.size();
            if (v.size() != dim || dim == 0)
                throw DimensionMismatch(
                    "embedding endpoint returned inconsistent dimensions");
            vectors.push_back(std::move(v));
        }
        out.push_back(std::move(vectors));
    }
    return out;
}

BaselineScore composite(const corpus::EvalPair& pair, const BaselineConfig& cfg,
                        const EmbedClient* embedder) {
    const bool bert_on = cfg.enable_bertscore && embedder != nullptr;
    if (!cfg.enable_rouge && !cfg.enable_bleu && !bert_on)
        throw NoComponentsEnabled("all baseline components are disabled");

    const auto ref = lexical_tokens(pair.reference);
    const auto hyp = lexical_tokens(pair.hypothesis);

    BaselineScore score;
    double sum = 0.0;
    int components = 0;
    if (cfg.enable_rouge) {
        score.rouge_l_f = rouge_l(ref, hyp).f1;
        sum += *score.rouge_l_f;
        ++components;
    }
    if (cfg.enable_bleu) {
        score.bleu = bleu(ref, hyp);
        sum += *score.bleu;
        ++components;
    }
    if (bert_on) {
        const auto vectors =
            embedder->embed({pair.reference, pair.hypothesis},
                            &score.embed_latency_seconds);
        score.bertscore_f = bertscore_f(vectors[0], vectors[1]);
        sum += *score.bertscore_f;
        ++components;
    }
    score.composite = sum / components;
    score.scaled = 1.0 + 4.0 * score.composite;
    return score;
}

}  // namespace faithcheck::baseline
