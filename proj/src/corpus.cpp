#include "faithcheck/corpus.hpp"

#include <fstream>
#include <numeric>
#include <unordered_set>

#include "faithcheck/errors.hpp"

namespace faithcheck::corpus {

using nlohmann::json;

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::GoldFull: return "gold_full";
        case Variant::GoldSentence: return "gold_sent";
        case Variant::IntrinsicSentence: return "intrinsic_sent";
        case Variant::ExtrinsicSentence: return "extrinsic_sent";
        case Variant::MixedIntrinsic: return "mixed_intrinsic";
        case Variant::MixedExtrinsic: return "mixed_extrinsic";
    }
    return "unknown";
}

Variant variant_from_name(const std::string& name) {
    if (name == "gold_full") return Variant::GoldFull;
    if (name == "gold_sent") return Variant::GoldSentence;
    if (name == "intrinsic_sent") return Variant::IntrinsicSentence;
    if (name == "extrinsic_sent") return Variant::ExtrinsicSentence;
    if (name == "mixed_intrinsic") return Variant::MixedIntrinsic;
    if (name == "mixed_extrinsic") return Variant::MixedExtrinsic;
    throw SchemaError("unknown variant \"" + name + "\"");
}

bool is_mixed(Variant v) {
    return v == Variant::MixedIntrinsic || v == Variant::MixedExtrinsic;
}

bool is_sentence_level(Variant v) {
    return v == Variant::GoldSentence || v == Variant::IntrinsicSentence ||
           v == Variant::ExtrinsicSentence;
}

Fraction Fraction::normalized() const {
    const std::int64_t g = std::gcd(k, n);
    return g == 0 ? Fraction{0, 1} : Fraction{k / g, n / g};
}

namespace {

bool blank(const std::string& s) {
    for (const char c : s)
        if (c != ' ' && c != '\t' && c != '\n' && c != '\r' && c != '\v' &&
            c != '\f')
            return false;
    return true;
}

}  // namespace

void EvalPair::validate() const {
    if (id.empty()) throw SchemaError("pair id must be non-empty");
    if (dataset.empty()) throw SchemaError("pair " + id + ": dataset must be non-empty");
    if (reference.empty() || blank(reference))
        throw SchemaError("pair " + id + ": reference is empty");
    if (hypothesis.empty() || blank(hypothesis))
        throw SchemaError("pair " + id + ": hypothesis is empty");
    if (expected_score < 1 || expected_score > 5)
        throw SchemaError("pair " + id + ": expected_score " +
                          std::to_string(expected_score) + " outside 1..5");

    const bool mixed = is_mixed(variant);
    const bool gold =
        variant == Variant::GoldFull || variant == Variant::GoldSentence;
    const bool halluc = variant == Variant::IntrinsicSentence ||
                        variant == Variant::ExtrinsicSentence;
    if (gold && expected_score != 5)
        throw SchemaError("pair " + id + ": gold variants carry expected_score 5");
    if (halluc && expected_score != 1)
        throw SchemaError("pair " + id +
                          ": hallucination variants carry expected_score 1");

    if (mixed != hallucination_pct.has_value())
        throw SchemaError("pair " + id +
                          ": hallucination_pct present iff variant is mixed");
    if (mixed != swapped_indices.has_value())
        throw SchemaError("pair " + id +
                          ": swapped_indices present iff variant is mixed");
    if (is_sentence_level(variant)) {
        if (!sentence_index || *sentence_index < 0)
            throw SchemaError("pair " + id +
                              ": sentence-level variants need sentence_index >= 0");
    } else if (sentence_index) {
        throw SchemaError("pair " + id +
                          ": sentence_index only valid on sentence-level variants");
    }
    if (mixed) {
        const Fraction f = *hallucination_pct;
        if (f.n < 1 || f.k < 0 || f.k > f.n)
            throw SchemaError("pair " + id + ": hallucination_pct needs 0 <= k <= n, n >= 1");
        if (static_cast<std::int64_t>(swapped_indices->size()) != f.k)
            throw SchemaError("pair " + id +
                              ": |swapped_indices| must equal hallucination_pct.k");
        for (const int s : *swapped_indices)
            if (s < 0 || s >= f.n)
                throw SchemaError("pair " + id + ": swapped index " +
                                  std::to_string(s) + " outside [0, n)");
        const int exp = f.k == 0 ? 5 : 1;
        if (expected_score != exp)
            throw SchemaError("pair " + id + ": mixed pair with k=" +
                              std::to_string(f.k) + " carries expected_score " +
                              std::to_string(exp));
    }
}

json pair_to_json(const EvalPair& p) {
    json j;
    j["id"] = p.id;
    j["dataset"] = p.dataset;
    j["reference"] = p.reference;
    j["hypothesis"] = p.hypothesis;
    j["variant"] = variant_name(p.variant);
    j["expected_score"] = p.expected_score;
    if (p.sentence_index) j["sentence_index"] = *p.sentence_index;
    if (p.hallucination_pct)
        j["hallucination_pct"] = {{"k", p.hallucination_pct->k},
                                  {"n", p.hallucination_pct->n}};
    if (p.swapped_indices)
        j["swapped_indices"] = *p.swapped_indices;
    return j;
}

EvalPair pair_from_json(const json& j) {
    EvalPair p;
    try {
        p.id = j.at("id").get<std::string>();
        p.dataset = j.at("dataset").get<std::string>();
        p.reference = j.at("reference").get<std::string>();
        p.hypothesis = j.at("hypothesis").get<std::string>();
        p.variant = variant_from_name(j.at("variant").get<std::string>());
        p.expected_score = j.at("expected_score").get<int>();
        if (j.contains("sentence_index"))
            p.sentence_index = j.at("sentence_index").get<int>();
        if (j.contains("hallucination_pct")) {
            const auto& f = j.at("hallucination_pct");
            p.hallucination_pct =
                Fraction{f.at("k").get<std::int64_t>(), f.at("n").get<std::int64_t>()};
        }
        if (j.contains("swapped_indices"))
            p.swapped_indices = j.at("swapped_indices").get<std::set<int>>();
    } catch (const json::exception& e) {
        throw SchemaError(std::string("bad pair record: ") + e.what());
    }
    p.validate();
    return p;
}

std::vector<EvalPair> load_pairs(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open corpus file: " + path.string());

    std::vector<EvalPair> pairs;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw SchemaError(path.filename().string() + " line " +
                              std::to_string(line_no) + ": " + e.what());
        }
        EvalPair p;
        try {
            p = pair_from_json(j);
        } catch (const SchemaError& e) {
            throw SchemaError(path.filename().string() + " line " +
                              std::to_string(line_no) + ": " + e.what());
        }
        if (!seen_ids.insert(p.id).second)
            throw SchemaError(path.filename().string() + " line " +
                              std::to_string(line_no) + ": duplicate id \"" +
                              p.id + "\"");
        pairs.push_back(std::move(p));
    }
    return pairs;
}

void save_pairs(const std::vector<EvalPair>& pairs,
                const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write corpus file: " + path.string());
    for (const auto& p : pairs) out << pair_to_json(p).dump() << '\n';
}

std::vector<EvalPair> explode_to_sentences(const EvalPair& pair,
                                           const text::Sentencizer& sentencizer) {
    if (pair.variant != Variant::GoldFull)
        throw SchemaError("explode_to_sentences requires a gold_full pair, got " +
                          std::string(variant_name(pair.variant)));
    const auto spans = sentencizer.sentencize(pair.hypothesis);
    if (spans.empty())
        throw EmptyHypothesis("pair " + pair.id + ": hypothesis has no sentences");

    std::vector<EvalPair> out;
    out.reserve(spans.size());
    for (std::size_t i = 0; i < spans.size(); ++i) {
        EvalPair child = pair;
        child.id = pair.id + "#s" + std::to_string(i);
        child.variant = Variant::GoldSentence;
        child.hypothesis = spans[i].text;
        child.sentence_index = static_cast<int>(i);
        child.validate();
        out.push_back(std::move(child));
    }
    return out;
}

DatasetStats compute_stats(const std::vector<EvalPair>& pairs,
                           const text::Tokenizer& tokenizer,
                           const text::Sentencizer& sentencizer) {
    if (pairs.empty()) throw EmptyDataset("compute_stats over zero pairs");
    const std::string& name = pairs.front().dataset;
    for (const auto& p : pairs)
        if (p.dataset != name)
            throw SchemaError("compute_stats: mixed datasets \"" + name +
                              "\" and \"" + p.dataset + "\"");

    DatasetStats s;
    s.name = name;
    s.pair_count = pairs.size();
    for (const auto& p : pairs) {
        s.ref_avg_tokens += static_cast<double>(tokenizer.count(p.reference));
        s.ref_avg_sents += static_cast<double>(sentencizer.count(p.reference));
        s.hyp_avg_tokens += static_cast<double>(tokenizer.count(p.hypothesis));
        s.hyp_avg_sents += static_cast<double>(sentencizer.count(p.hypothesis));
    }
    const double n = static_cast<double>(pairs.size());
    s.ref_avg_tokens /= n;
    s.ref_avg_sents /= n;
    s.hyp_avg_tokens /= n;
    s.hyp_avg_sents /= n;
    return s;
}

json stats_to_json(const DatasetStats& s) {
    return json{{"name", s.name},
                {"pair_count", s.pair_count},
                {"ref_avg_tokens", s.ref_avg_tokens},
                {"ref_avg_sents", s.ref_avg_sents},
                {"hyp_avg_tokens", s.hyp_avg_tokens},
                {"hyp_avg_sents", s.hyp_avg_sents}};
}

}  // namespace faithcheck::corpus
