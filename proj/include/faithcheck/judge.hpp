#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>

#include "faithcheck/chat.hpp"
#include "faithcheck/corpus.hpp"
#include "faithcheck/textproc.hpp"

namespace faithcheck::judge {

enum class Mode { WithReasoning, ScoreOnly };

// Grading rubric plus the user message template. Loaded from a versioned
// template file so rubrics can be adapted per use case without rebuilds.
struct RubricPrompt {
    std::string system_text;
    std::string user_template;  // carries {{text}} and {{source}} exactly once
    Mode mode = Mode::WithReasoning;

    static RubricPrompt load(const std::filesystem::path& grading_json, Mode mode);
    void validate() const;  // TemplateError on malformed templates
};

struct Usage {
    double latency_seconds = 0.0;
    long prompt_tokens = 0;
    long completion_tokens = 0;
    double cost_usd = 0.0;
    bool token_counts_estimated = false;
};

struct Verdict {
    int score = 0;  // 1..5
    std::optional<std::string> reasoning;
    std::string raw_response;
    Usage usage;
    std::string model;
    int extraction_rung = 0;  // which ladder rung recovered the score
};

struct Extraction {
    int score = 0;
    std::optional<std::string> reasoning;
    int rung = 0;
};

// Extraction ladder, first success wins:
//   1. the whole string parses as a JSON object with an integer "score"
//   2. left-to-right scan of balanced {...} regions, first parse with a
//      score in 1..5
//   3. per-region repair: escape unescaped quotes inside the "reasoning"
//      value, then re-parse
//   4. pattern fallback: "score" then separators then an integer
// A recovered score outside 1..5 is a ProtocolViolation, never clamped;
// no recoverable score at all is an ExtractionError.
Extraction extract_verdict(const std::string& raw, Mode mode);

// ({{text}} <- hypothesis, {{source}} <- reference); no other mutation.
std::pair<std::string, std::string> render_prompt(const corpus::EvalPair& pair,
                                                  const RubricPrompt& prompt);

// One chat call at temperature 0 plus exactly one re-request when
// extraction fails. `estimator` fills token usage when the endpoint does
// not report it (flagged as estimated); pass nullptr to skip estimates.
Verdict judge_pair(const corpus::EvalPair& pair, const RubricPrompt& prompt,
                   const chat::ChatClient& client,
                   const text::Tokenizer* estimator = nullptr);

}  // namespace faithcheck::judge
