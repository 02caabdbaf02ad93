#include "faithcheck/segmenter.hpp"

#include <algorithm>

#include "faithcheck/errors.hpp"

namespace faithcheck::segment {

void BudgetConfig::validate() const {
    if (overlap_tokens < 0) throw RangeError("overlap_tokens must be >= 0");
    if (safety_margin < 0) throw RangeError("safety_margin must be >= 0");
    if (special_token_count < 0) throw RangeError("special_token_count must be >= 0");
    if (max_tokens <= special_token_count + overlap_tokens + 1)
        throw RangeError("max_tokens leaves no room for content: need > specials + overlap + 1");
}

std::size_t segment_budget(std::size_t hypothesis_tokens, const BudgetConfig& cfg) {
    cfg.validate();
    const long budget = static_cast<long>(cfg.max_tokens) - cfg.special_token_count -
                        cfg.overlap_tokens - static_cast<long>(hypothesis_tokens) -
                        cfg.safety_margin;
    if (budget < 1)
        throw HypothesisTooLong(
            "hypothesis of " + std::to_string(hypothesis_tokens) +
            " tokens leaves no content budget (max " + std::to_string(cfg.max_tokens) +
            ", specials " + std::to_string(cfg.special_token_count) + ", overlap " +
            std::to_string(cfg.overlap_tokens) + ", margin " +
            std::to_string(cfg.safety_margin) + "); split it into sentences first");
    return static_cast<std::size_t>(budget);
}

std::vector<std::pair<TokenRange, TokenRange>> plan_token_windows(
    std::size_t reference_tokens, std::size_t hypothesis_tokens,
    const BudgetConfig& cfg) {
    const std::size_t budget = segment_budget(hypothesis_tokens, cfg);
    if (reference_tokens == 0) throw EmptyReference("reference has no tokens");

    std::vector<std::pair<TokenRange, TokenRange>> windows;
    std::size_t pos = 0;
    while (pos < reference_tokens) {
        const std::size_t len = std::min(budget, reference_tokens - pos);
        TokenRange content{pos, pos + len};
        TokenRange overlap{pos, pos};  // empty for the first window
        if (pos > 0) {
            const std::size_t back =
                std::min<std::size_t>(static_cast<std::size_t>(cfg.overlap_tokens), pos);
            overlap = {pos - back, pos};
        }
        windows.emplace_back(content, overlap);
        pos += len;
    }
    return windows;
}

SegmentPlan plan_segments(std::string_view reference, std::string_view hypothesis,
                          const BudgetConfig& cfg, const text::Tokenizer& tokenizer,
                          std::optional<std::size_t> hypothesis_tokens_override) {
    const std::vector<int> ref_tokens = tokenizer.encode(reference);
    if (ref_tokens.empty()) throw EmptyReference("reference has no tokens");
    const std::size_t hyp_tokens =
        hypothesis_tokens_override.value_or(tokenizer.count(hypothesis));

    SegmentPlan plan;
    plan.hypothesis_tokens = hyp_tokens;
    plan.segment_budget = segment_budget(hyp_tokens, cfg);

    for (const auto& [content, overlap] :
         plan_token_windows(ref_tokens.size(), hyp_tokens, cfg)) {
        Window w;
        w.content = content;
        w.overlap = overlap;
        const std::vector<int> slice(
            ref_tokens.begin() + static_cast<std::ptrdiff_t>(overlap.empty()
                                                                 ? content.begin
                                                                 : overlap.begin),
            ref_tokens.begin() + static_cast<std::ptrdiff_t>(content.end));
        w.text = tokenizer.decode(slice);
        plan.windows.push_back(std::move(w));
    }
    return plan;
}

std::vector<std::pair<std::string, std::string>> window_pairs(
    const SegmentPlan& plan, std::string_view hypothesis) {
    std::vector<std::pair<std::string, std::string>> pairs;
    pairs.reserve(plan.windows.size());
    for (const auto& w : plan.windows)
        pairs.emplace_back(w.text, std::string(hypothesis));
    return pairs;
}

}  // namespace faithcheck::segment
