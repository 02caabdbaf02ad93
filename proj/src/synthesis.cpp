#include "faithcheck/synthesis.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>

#include <json.hpp>

#include "faithcheck/errors.hpp"

namespace faithcheck::synth {

using nlohmann::json;

const char* kind_name(Kind k) {
    return k == Kind::Intrinsic ? "intrinsic" : "extrinsic";
}

Kind kind_from_name(const std::string& name) {
    if (name == "intrinsic") return Kind::Intrinsic;
    if (name == "extrinsic") return Kind::Extrinsic;
    throw ConfigError("unknown hallucination kind \"" + name + "\"");
}

void SynthRecord::validate() const {
    if (pair_id.empty()) throw SchemaError("synth record has empty pair_id");
    if (sentence_index < 0)
        throw SchemaError("synth record " + pair_id + ": negative sentence_index");
    if (gold_sentence.empty())
        throw SchemaError("synth record " + pair_id + ": empty gold sentence");
    if (!intrinsic && !extrinsic)
        throw SchemaError("synth record " + pair_id + ": no rewrite present");
    for (const auto* rewrite : {&intrinsic, &extrinsic}) {
        if (!*rewrite) continue;
        if ((*rewrite)->empty())
            throw SchemaError("synth record " + pair_id + ": empty rewrite");
        if (**rewrite == gold_sentence)
            throw SchemaError("synth record " + pair_id +
                              ": rewrite identical to gold sentence");
    }
}

std::vector<SynthRecord> load_records(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open synth records: " + path.string());
    std::vector<SynthRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            SynthRecord r;
            r.pair_id = j.at("pair_id").get<std::string>();
            r.sentence_index = j.at("sentence_index").get<int>();
            r.gold_sentence = j.at("gold_sentence").get<std::string>();
            if (j.contains("intrinsic") && !j["intrinsic"].is_null())
                r.intrinsic = j["intrinsic"].get<std::string>();
            if (j.contains("extrinsic") && !j["extrinsic"].is_null())
                r.extrinsic = j["extrinsic"].get<std::string>();
            r.generator_model = j.value("generator_model", "");
            r.validate();
            records.push_back(std::move(r));
        } catch (const json::exception& e) {
            throw SchemaError(path.filename().string() + " line " +
                              std::to_string(line_no) + ": " + e.what());
        } catch (const SchemaError& e) {
            throw SchemaError(path.filename().string() + " line " +
                              std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

void save_records(const std::vector<SynthRecord>& records,
                  const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write synth records: " + path.string());
    for (const auto& r : records) {
        json j;
        j["pair_id"] = r.pair_id;
        j["sentence_index"] = r.sentence_index;
        j["gold_sentence"] = r.gold_sentence;
        if (r.intrinsic) j["intrinsic"] = *r.intrinsic;
        if (r.extrinsic) j["extrinsic"] = *r.extrinsic;
        j["generator_model"] = r.generator_model;
        out << j.dump() << '\n';
    }
}

SynthTemplate SynthTemplate::load(const std::filesystem::path& templates_dir,
                                  const std::string& name, Kind kind) {
    const auto path =
        templates_dir / "synthesis" / (name + "." + kind_name(kind) + ".txt");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open synthesis template: " + path.string());
    std::string instruction((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    while (!instruction.empty() &&
           (instruction.back() == '\n' || instruction.back() == '\r'))
        instruction.pop_back();
    if (instruction.empty())
        throw TemplateError("synthesis template " + path.string() + " is empty");
    return SynthTemplate{name, kind, instruction};
}

std::string render_envelope(const SynthTemplate& tmpl, std::string_view sentence) {
    return tmpl.instruction + "\n=====\nSENTENCE:\n" + std::string(sentence) +
           "\n=====\nREWRITE:";
}

bool extrinsic_prefix_preserved(const std::string& gold, const std::string& rewrite) {
    const std::size_t probe = std::min<std::size_t>(20, gold.size());
    return rewrite.find(gold.substr(0, probe)) != std::string::npos;
}

namespace {

std::string trim_copy(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

}  // namespace

SynthRecord synthesize(const corpus::EvalPair& pair, const SynthTemplate& tmpl,
                       const chat::ChatClient& client, double temperature) {
    if (pair.variant != corpus::Variant::GoldSentence)
        throw SchemaError("synthesize requires gold_sent pairs, got " +
                          std::string(corpus::variant_name(pair.variant)));
    chat::ChatRequest request;
    request.system = "You rewrite sentences exactly as instructed. Respond with "
                     "the rewritten sentence only.";
    request.user = render_envelope(tmpl, pair.hypothesis);
    request.temperature = temperature;

    const chat::ChatResult result = client.complete(request);
    const std::string rewrite = trim_copy(result.content);
    if (rewrite.empty())
        throw DegenerateRewrite("pair " + pair.id + ": empty completion");
    if (rewrite == pair.hypothesis)
        throw DegenerateRewrite("pair " + pair.id +
                                ": completion identical to the gold sentence");

    SynthRecord record;
    record.pair_id = pair.id;
    record.sentence_index = pair.sentence_index.value_or(0);
    record.gold_sentence = pair.hypothesis;
    record.generator_model = client.provider().name;
    if (tmpl.kind == Kind::Intrinsic)
        record.intrinsic = rewrite;
    else
        record.extrinsic = rewrite;
    return record;
}

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
    // rejection sampling over the largest multiple of bound
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
        v = next();
    } while (v >= limit);
    return v % bound;
}

std::uint64_t derive_pair_seed(std::uint64_t global_seed, std::string_view pair_id) {
    // FNV-1a over the little-endian seed bytes, then the id bytes
    std::uint64_t h = 0xCBF29CE484222325ULL;
    auto mix = [&h](unsigned char b) {
        h ^= b;
        h *= 0x100000001B3ULL;
    };
    for (int i = 0; i < 8; ++i)
        mix(static_cast<unsigned char>(global_seed >> (8 * i)));
    for (const char c : pair_id) mix(static_cast<unsigned char>(c));
    return h;
}

std::set<int> sample_indices(int n, int k, std::uint64_t seed) {
    if (n < 1) throw RangeError("sample_indices needs n >= 1");
    if (k < 0 || k > n)
        throw RangeError("sample_indices needs 0 <= k <= n, got k=" +
                         std::to_string(k) + " n=" + std::to_string(n));
    std::vector<int> indices(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) indices[static_cast<std::size_t>(i)] = i;

    SplitMix64 rng(seed);
    std::set<int> chosen;
    for (int i = 0; i < k; ++i) {
        const auto j = static_cast<std::size_t>(i) +
                       rng.below(static_cast<std::uint64_t>(n - i));
        std::swap(indices[static_cast<std::size_t>(i)], indices[j]);
        chosen.insert(indices[static_cast<std::size_t>(i)]);
    }
    return chosen;
}

std::pair<std::string, std::set<int>> mix_hypothesis(
    const std::vector<std::string>& gold_sentences,
    const std::vector<std::string>& counterparts, int k, std::uint64_t seed) {
    if (gold_sentences.size() != counterparts.size())
        throw LengthMismatch("mix_hypothesis: " +
                             std::to_string(gold_sentences.size()) + " gold vs " +
                             std::to_string(counterparts.size()) + " counterparts");
    if (gold_sentences.empty())
        throw LengthMismatch("mix_hypothesis over zero sentences");
    const int n = static_cast<int>(gold_sentences.size());
    if (k < 0 || k > n)
        throw RangeError("mix_hypothesis needs 0 <= k <= n, got k=" +
                         std::to_string(k));

    const std::set<int> swapped = sample_indices(n, k, seed);
    std::string hypothesis;
    for (int i = 0; i < n; ++i) {
        if (i > 0) hypothesis += ' ';
        hypothesis += swapped.count(i) ? counterparts[static_cast<std::size_t>(i)]
                                       : gold_sentences[static_cast<std::size_t>(i)];
    }
    return {hypothesis, swapped};
}

std::vector<corpus::EvalPair> build_progression_set(
    const std::vector<corpus::EvalPair>& pairs,
    const std::vector<SynthRecord>& records, Kind kind, std::uint64_t seed,
    const text::Sentencizer& sentencizer) {
    // (pair_id, sentence_index) -> counterpart of the requested kind
    std::unordered_map<std::string, const SynthRecord*> by_key;
    for (const auto& r : records)
        by_key[r.pair_id + "#s" + std::to_string(r.sentence_index)] = &r;

    std::vector<corpus::EvalPair> out;
    for (const auto& pair : pairs) {
        const auto spans = sentencizer.sentencize(pair.hypothesis);
        if (spans.empty())
            throw EmptyHypothesis("pair " + pair.id + ": no sentences");
        const int n = static_cast<int>(spans.size());

        std::vector<std::string> gold, counterparts;
        for (int i = 0; i < n; ++i) {
            gold.push_back(spans[static_cast<std::size_t>(i)].text);
            const auto it = by_key.find(pair.id + "#s" + std::to_string(i));
            const std::optional<std::string>* rewrite = nullptr;
            if (it != by_key.end())
                rewrite = kind == Kind::Intrinsic ? &it->second->intrinsic
                                                  : &it->second->extrinsic;
            if (!rewrite || !rewrite->has_value())
                throw MissingCounterpart("pair " + pair.id + " sentence " +
                                         std::to_string(i) + " has no " +
                                         kind_name(kind) + " rewrite");
            counterparts.push_back(**rewrite);
        }

        const std::uint64_t pair_seed = derive_pair_seed(seed, pair.id);
        for (int k = 0; k <= n; ++k) {
            auto [hypothesis, swapped] =
                mix_hypothesis(gold, counterparts, k,
                               pair_seed + static_cast<std::uint64_t>(k));
            corpus::EvalPair mixed;
            mixed.id = pair.id + "#mix_" + kind_name(kind) + "_" + std::to_string(k);
            mixed.dataset = pair.dataset;
            mixed.reference = pair.reference;
            mixed.hypothesis = std::move(hypothesis);
            mixed.variant = kind == Kind::Intrinsic
                                ? corpus::Variant::MixedIntrinsic
                                : corpus::Variant::MixedExtrinsic;
            mixed.expected_score = k == 0 ? 5 : 1;
            mixed.hallucination_pct = corpus::Fraction{k, n};
            mixed.swapped_indices = std::move(swapped);
            mixed.validate();
            out.push_back(std::move(mixed));
        }
    }
    return out;
}

}  // namespace faithcheck::synth
