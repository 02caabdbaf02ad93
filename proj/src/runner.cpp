#include "faithcheck/runner.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include "faithcheck/errors.hpp"

namespace faithcheck::run {

Backend backend_from_name(const std::string& name) {
    if (name == "judge") return Backend::Judge;
    if (name == "judge-so") return Backend::JudgeScoreOnly;
    if (name == "nli") return Backend::Nli;
    if (name == "baseline") return Backend::Baseline;
    throw ConfigError("unknown backend \"" + name +
                      "\" (expected judge, judge-so, nli, or baseline)");
}

const char* backend_name(Backend backend) {
    switch (backend) {
        case Backend::Judge: return "judge";
        case Backend::JudgeScoreOnly: return "judge-so";
        case Backend::Nli: return "nli";
        case Backend::Baseline: return "baseline";
    }
    return "judge";
}

analysis::RunRecord score_one(const corpus::EvalPair& pair,
                              const ScoringContext& context) {
    analysis::RunRecord record;
    record.pair_id = pair.id;
    record.model = context.model;
    record.backend = backend_name(context.backend);
    record.expected_score = pair.expected_score;
    record.variant = pair.variant;
    record.hallucination_pct = pair.hallucination_pct;

    try {
        switch (context.backend) {
            case Backend::Judge:
            case Backend::JudgeScoreOnly: {
                const judge::Verdict verdict = judge::judge_pair(
                    pair, *context.prompt, *context.chat_client, context.tokenizer);
                record.predicted_score = static_cast<double>(verdict.score);
                record.usage = verdict.usage;
                record.usage.cost_usd = context.prices.cost_usd(
                    context.chat_client->provider().model,
                    verdict.usage.prompt_tokens, verdict.usage.completion_tokens);
                break;
            }
            case Backend::Nli: {
                const nli::NliScore score = context.nli_client->score_pair(
                    pair, context.budget, *context.tokenizer);
                record.predicted_score = score.scaled_score;
                record.usage = score.usage;
                break;
            }
            case Backend::Baseline: {
                const baseline::BaselineScore score =
                    baseline::composite(pair, context.baseline, context.embedder);
                record.predicted_score = score.scaled;
                record.usage.latency_seconds = score.embed_latency_seconds;
                break;
            }
        }
    } catch (const Error& e) {
        record.predicted_score.reset();
        record.failure = e.tag();
    }
    return record;
}

std::vector<analysis::RunRecord> score_corpus_serial(
    const std::vector<corpus::EvalPair>& pairs, const ScoringContext& context) {
    std::vector<analysis::RunRecord> records(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i)
        records[i] = score_one(pairs[i], context);
    return records;
}

std::vector<analysis::RunRecord> score_corpus(
    const std::vector<corpus::EvalPair>& pairs, const ScoringContext& context,
    int parallelism) {
    if (parallelism <= 1) return score_corpus_serial(pairs, context);

    std::vector<analysis::RunRecord> records(pairs.size());
    const auto n = static_cast<std::ptrdiff_t>(pairs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(parallelism)
#endif
    for (std::ptrdiff_t i = 0; i < n; ++i)
        records[static_cast<std::size_t>(i)] =
            score_one(pairs[static_cast<std::size_t>(i)], context);
    return records;
}

}  // namespace faithcheck::run
