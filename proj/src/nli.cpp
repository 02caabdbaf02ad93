#include "faithcheck/nli.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "faithcheck/errors.hpp"

namespace faithcheck::nli {

using nlohmann::json;

double scale_prob(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw RangeError("entailment probability " + std::to_string(p) +
                         " outside [0, 1]");
    return 1.0 + 4.0 * p;
}

NliClient::NliClient(net::TransportPtr transport, std::string endpoint,
                     net::RetryPolicy retry)
    : transport_(std::move(transport)),
      endpoint_(std::move(endpoint)),
      retry_(std::move(retry)) {}

std::vector<double> NliClient::score_batch(
    const std::vector<std::pair<std::string, std::string>>& pairs,
    double* latency_seconds) const {
    json body;
    body["pairs"] = json::array();
    for (const auto& [premise, hypothesis] : pairs)
        body["pairs"].push_back(json::array({premise, hypothesis}));

    const net::HttpResponse response = net::post_with_retries(
        *transport_, endpoint_, body.dump(), {}, retry_);
    if (latency_seconds) *latency_seconds = response.latency_seconds;

    json j;
    try {
        j = json::parse(response.body);
    } catch (const json::exception& e) {
        throw ProtocolError("NLI endpoint returned non-JSON body: " +
                            std::string(e.what()));
    }
    if (!j.contains("scores") || !j["scores"].is_array())
        throw ProtocolError("NLI response is missing the scores array");
    const auto& scores = j["scores"];
    if (scores.size() != pairs.size())
        throw ProtocolError("NLI returned " + std::to_string(scores.size()) +
                            " scores for " + std::to_string(pairs.size()) +
                            " pairs");
    std::vector<double> out;
    out.reserve(scores.size());
    for (const auto& s : scores) {
        if (!s.is_number())
            throw ProtocolError("non-numeric entailment score in NLI response");
        const double p = s.get<double>();
        if (!(p >= 0.0 && p <= 1.0))
            throw ProtocolError("entailment score " + std::to_string(p) +
                                " outside [0, 1]");
        out.push_back(p);
    }
    return out;
}

NliScore NliClient::score_pair(const corpus::EvalPair& pair,
                               const segment::BudgetConfig& cfg,
                               const text::Tokenizer& tokenizer) const {
    const segment::SegmentPlan plan =
        segment::plan_segments(pair.reference, pair.hypothesis, cfg, tokenizer);
    const auto window_pairs = segment::window_pairs(plan, pair.hypothesis);

    NliScore score;
    score.segment_probs =
        score_batch(window_pairs, &score.usage.latency_seconds);
    score.aggregate_prob =
        *std::max_element(score.segment_probs.begin(), score.segment_probs.end());
    score.scaled_score = scale_prob(score.aggregate_prob);
    return score;
}

std::vector<std::size_t> NliClient::remote_count(
    const std::vector<std::string>& texts) const {
    if (texts.empty()) return {};
    json body;
    body["texts"] = texts;
    const net::HttpResponse response = net::post_with_retries(
        *transport_, endpoint_ + "/count", body.dump(), {}, retry_);
    json j;
    try {
        j = json::parse(response.body);
    } catch (const json::exception& e) {
        throw ProtocolError("count endpoint returned non-JSON body: " +
                            std::string(e.what()));
    }
    if (!j.contains("counts") || !j["counts"].is_array() ||
        j["counts"].size() != texts.size())
        throw ProtocolError("count endpoint returned " +
                            std::to_string(j.value("counts", json::array()).size()) +
                            " counts for " + std::to_string(texts.size()) +
                            " texts");
    std::vector<std::size_t> out;
    for (const auto& c : j["counts"]) {
        if (!c.is_number_unsigned() && !c.is_number_integer())
            throw ProtocolError("non-integer token count in response");
        out.push_back(c.get<std::size_t>());
    }
    return out;
}

std::size_t export_training_triples(const std::vector<synth::SynthRecord>& records,
                                    const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write training triples: " + path.string());
    std::size_t rows = 0;
    for (const auto& r : records) {
        r.validate();
        auto emit = [&](const std::string& hypothesis, int label) {
            const json j{{"premise", r.gold_sentence},
                         {"hypothesis", hypothesis},
                         {"label", label}};
            out << j.dump() << '\n';
            ++rows;
        };
        emit(r.gold_sentence, 1);
        if (r.intrinsic) emit(*r.intrinsic, 0);
        if (r.extrinsic) emit(*r.extrinsic, 0);
    }
    return rows;
}

}  // namespace faithcheck::nli
