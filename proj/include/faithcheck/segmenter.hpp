#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "faithcheck/textproc.hpp"

namespace faithcheck::segment {

// Token budget for one NLI input:
//   [CLS] overlap + current segment [SEP] hypothesis [SEP]
struct BudgetConfig {
    int max_tokens = 512;
    int overlap_tokens = 32;
    int special_token_count = 3;  // [CLS] and two [SEP]
    // Headroom against tokenizer drift between the local approximation and
    // the serving model. Use 0 when counts come from the remote tokenizer.
    int safety_margin = 8;

    void validate() const;  // RangeError when the budget cannot hold content
};

struct TokenRange {
    std::size_t begin = 0;
    std::size_t end = 0;  // exclusive

    std::size_t size() const { return end - begin; }
    bool empty() const { return begin == end; }
};

struct Window {
    TokenRange content;
    TokenRange overlap;  // empty for the first window
    std::string text;    // decode(overlap ++ content): the NLI premise
};

struct SegmentPlan {
    std::vector<Window> windows;
    std::size_t hypothesis_tokens = 0;
    std::size_t segment_budget = 0;
};

// Content tokens available per window once specials, overlap, hypothesis
// and the safety margin are spoken for. Throws HypothesisTooLong when no
// content token fits.
std::size_t segment_budget(std::size_t hypothesis_tokens, const BudgetConfig& cfg);

// Pure window arithmetic over token counts: (content, overlap) ranges.
std::vector<std::pair<TokenRange, TokenRange>> plan_token_windows(
    std::size_t reference_tokens, std::size_t hypothesis_tokens,
    const BudgetConfig& cfg);

// Full plan over texts. `hypothesis_tokens_override` substitutes a count
// from the serving model's tokenizer (remote_count); window slicing always
// uses the local tokenizer.
SegmentPlan plan_segments(std::string_view reference, std::string_view hypothesis,
                          const BudgetConfig& cfg, const text::Tokenizer& tokenizer,
                          std::optional<std::size_t> hypothesis_tokens_override = {});

// One (premise, hypothesis) pair per window, in window order.
std::vector<std::pair<std::string, std::string>> window_pairs(
    const SegmentPlan& plan, std::string_view hypothesis);

}  // namespace faithcheck::segment
