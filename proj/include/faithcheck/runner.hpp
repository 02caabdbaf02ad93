#pragma once

#include <functional>
#include <string>
#include <vector>

#include "faithcheck/analysis.hpp"
#include "faithcheck/baseline.hpp"
#include "faithcheck/config.hpp"
#include "faithcheck/corpus.hpp"
#include "faithcheck/judge.hpp"
#include "faithcheck/nli.hpp"

namespace faithcheck::run {

enum class Backend { Judge, JudgeScoreOnly, Nli, Baseline };

Backend backend_from_name(const std::string& name);
const char* backend_name(Backend backend);

// Everything one scoring pass needs; transports already wired for the
// configured mode.
struct ScoringContext {
    Backend backend = Backend::Judge;
    std::string model;  // provider name for judge backends
    const text::Tokenizer* tokenizer = nullptr;
    segment::BudgetConfig budget;
    cfg::PriceTable prices;
    const chat::ChatClient* chat_client = nullptr;   // judge backends
    const judge::RubricPrompt* prompt = nullptr;     // judge backends
    const nli::NliClient* nli_client = nullptr;      // nli backend
    baseline::BaselineConfig baseline;               // baseline backend
    const baseline::EmbedClient* embedder = nullptr;
};

analysis::RunRecord score_one(const corpus::EvalPair& pair,
                              const ScoringContext& context);

// Serial reference runner: one pair after another, input order.
std::vector<analysis::RunRecord> score_corpus_serial(
    const std::vector<corpus::EvalPair>& pairs, const ScoringContext& context);

// OpenMP fan-out with at most `parallelism` in-flight pairs. Results land
// at their input index, so output order (and bytes) match the serial
// runner for any thread count.
std::vector<analysis::RunRecord> score_corpus(
    const std::vector<corpus::EvalPair>& pairs, const ScoringContext& context,
    int parallelism);

// Index-ordered fan-out for other per-item workloads (synthesis calls,
// metric batches). fn(i) must be safe to run concurrently.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t count, int parallelism, Fn&& fn) {
    std::vector<T> out(count);
    if (parallelism <= 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }
    const auto n = static_cast<std::ptrdiff_t>(count);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(parallelism)
#endif
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    return out;
}

}  // namespace faithcheck::run
