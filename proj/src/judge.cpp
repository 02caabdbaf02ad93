#include "faithcheck/judge.hpp"

#include <cctype>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "faithcheck/errors.hpp"

namespace faithcheck::judge {

using nlohmann::json;

namespace {

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
    std::size_t count = 0, pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

bool rubric_level_present(const std::string& text, int level) {
    return text.find("- " + std::to_string(level) + ":") != std::string::npos ||
           text.find(std::to_string(level) + ":") != std::string::npos;
}

std::string replace_once(std::string text, const std::string& placeholder,
                         const std::string& value) {
    const auto pos = text.find(placeholder);
    text.replace(pos, placeholder.size(), value);
    return text;
}

}  // namespace

RubricPrompt RubricPrompt::load(const std::filesystem::path& grading_json,
                                Mode mode) {
    std::ifstream in(grading_json);
    if (!in) throw IoError("cannot open grading template: " + grading_json.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw TemplateError("grading template is not valid JSON: " +
                            std::string(e.what()));
    }
    RubricPrompt p;
    p.mode = mode;
    try {
        p.system_text = j.at("system").get<std::string>();
        p.user_template = mode == Mode::WithReasoning
                              ? j.at("user").get<std::string>()
                              : j.at("user_score_only").get<std::string>();
    } catch (const json::exception& e) {
        throw TemplateError("grading template missing fields: " +
                            std::string(e.what()));
    }
    p.validate();
    return p;
}

void RubricPrompt::validate() const {
    for (int level = 1; level <= 5; ++level)
        if (!rubric_level_present(system_text, level))
            throw TemplateError("system text is missing rubric level " +
                                std::to_string(level));
    if (count_occurrences(user_template, "{{text}}") != 1)
        throw TemplateError("user template must contain {{text}} exactly once");
    if (count_occurrences(user_template, "{{source}}") != 1)
        throw TemplateError("user template must contain {{source}} exactly once");
    if (mode == Mode::ScoreOnly &&
        user_template.find("\"reasoning\"") != std::string::npos)
        throw TemplateError("score-only template must not ask for a reasoning key");
}

std::pair<std::string, std::string> render_prompt(const corpus::EvalPair& pair,
                                                  const RubricPrompt& prompt) {
    prompt.validate();
    if (pair.hypothesis.empty() || pair.reference.empty())
        throw TemplateInputError("pair " + pair.id +
                                 ": refusing to render empty snippets");
    std::string user = replace_once(prompt.user_template, "{{text}}", pair.hypothesis);
    user = replace_once(user, "{{source}}", pair.reference);
    return {prompt.system_text, user};
}

// --- extraction ladder ------------------------------------------------------

namespace {

// Integer "score" from a parsed JSON object, if present.
std::optional<int> score_of(const json& j) {
    if (!j.is_object() || !j.contains("score")) return std::nullopt;
    const auto& s = j["score"];
    if (s.is_number_integer()) return s.get<int>();
    return std::nullopt;
}

std::optional<std::string> reasoning_of(const json& j) {
    if (j.is_object() && j.contains("reasoning") && j["reasoning"].is_string())
        return j["reasoning"].get<std::string>();
    return std::nullopt;
}

// Balanced {...} candidate regions, left to right, by raw brace depth.
// Quote-corrupted payloads defeat string-aware scanning, so braces inside
// string values are counted too; the parse attempt filters false hits.
std::vector<std::string> balanced_regions(const std::string& raw) {
    std::vector<std::string> regions;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] != '{') continue;
        int depth = 0;
        for (std::size_t j = i; j < raw.size(); ++j) {
            if (raw[j] == '{') ++depth;
            else if (raw[j] == '}' && --depth == 0) {
                regions.push_back(raw.substr(i, j - i + 1));
                break;
            }
        }
    }
    return regions;
}

// Escapes unescaped interior quotes inside the "reasoning" string value.
// A quote counts as closing only when followed by optional whitespace and
// one of , } :
std::optional<std::string> repair_reasoning_quotes(const std::string& region) {
    const auto key = region.find("\"reasoning\"");
    if (key == std::string::npos) return std::nullopt;
    auto pos = region.find(':', key + 11);
    if (pos == std::string::npos) return std::nullopt;
    ++pos;
    while (pos < region.size() && std::isspace(static_cast<unsigned char>(region[pos])))
        ++pos;
    if (pos >= region.size() || region[pos] != '"') return std::nullopt;

    std::string fixed = region.substr(0, pos + 1);
    bool changed = false;
    std::size_t i = pos + 1;
    while (i < region.size()) {
        const char c = region[i];
        if (c == '\\' && i + 1 < region.size()) {
            fixed += region.substr(i, 2);
            i += 2;
            continue;
        }
        if (c == '"') {
            std::size_t k = i + 1;
            while (k < region.size() &&
                   std::isspace(static_cast<unsigned char>(region[k])))
                ++k;
            const bool closes = k < region.size() &&
                                (region[k] == ',' || region[k] == '}' ||
                                 region[k] == ':');
            if (closes) {
                fixed += region.substr(i);  // closing quote and the rest
                return changed ? std::optional<std::string>(fixed) : std::nullopt;
            }
            fixed += "\\\"";
            changed = true;
            ++i;
            continue;
        }
        fixed.push_back(c);
        ++i;
    }
    return std::nullopt;  // never found a closing quote
}

std::optional<long> pattern_score(const std::string& raw) {
    std::size_t pos = raw.find("score");
    while (pos != std::string::npos) {
        std::size_t i = pos + 5;
        while (i < raw.size() &&
               (std::isspace(static_cast<unsigned char>(raw[i])) || raw[i] == '"' ||
                raw[i] == '\'' || raw[i] == ':' || raw[i] == '=' || raw[i] == '-'))
            ++i;
        if (i < raw.size() && std::isdigit(static_cast<unsigned char>(raw[i]))) {
            long value = 0;
            while (i < raw.size() && std::isdigit(static_cast<unsigned char>(raw[i]))) {
                value = value * 10 + (raw[i] - '0');
                ++i;
            }
            return value;
        }
        pos = raw.find("score", pos + 5);
    }
    return std::nullopt;
}

std::optional<std::string> pattern_reasoning(const std::string& raw) {
    const auto key = raw.find("\"reasoning\"");
    if (key == std::string::npos) return std::nullopt;
    auto open = raw.find('"', raw.find(':', key + 11) + 1);
    if (open == std::string::npos) return std::nullopt;
    const auto close = raw.find('"', open + 1);
    if (close == std::string::npos) return std::nullopt;
    return raw.substr(open + 1, close - open - 1);
}

}  // namespace

Extraction extract_verdict(const std::string& raw, Mode mode) {
    std::optional<int> out_of_range;

    auto accept = [&](const json& j, int rung) -> std::optional<Extraction> {
        const auto score = score_of(j);
        if (!score) return std::nullopt;
        if (*score < 1 || *score > 5) {
            out_of_range = *score;
            return std::nullopt;
        }
        Extraction e;
        e.score = *score;
        if (mode == Mode::WithReasoning) e.reasoning = reasoning_of(j);
        e.rung = rung;
        return e;
    };

    // rung 1: the whole payload is the object
    {
        std::string trimmed = raw;
        const auto first = trimmed.find_first_not_of(" \t\r\n");
        const auto last = trimmed.find_last_not_of(" \t\r\n");
        if (first != std::string::npos)
            trimmed = trimmed.substr(first, last - first + 1);
        json j = json::parse(trimmed, nullptr, false);
        if (!j.is_discarded()) {
            if (auto e = accept(j, 1)) return *e;
            if (out_of_range)
                throw ProtocolViolation("score " + std::to_string(*out_of_range) +
                                        " outside the 1..5 rubric");
        }
    }

    const auto regions = balanced_regions(raw);

    // rung 2: embedded balanced objects
    for (const auto& region : regions) {
        json j = json::parse(region, nullptr, false);
        if (j.is_discarded()) continue;
        if (auto e = accept(j, 2)) return *e;
    }

    // rung 3: quote-repair pass
    for (const auto& region : regions) {
        const auto repaired = repair_reasoning_quotes(region);
        if (!repaired) continue;
        json j = json::parse(*repaired, nullptr, false);
        if (j.is_discarded()) continue;
        if (auto e = accept(j, 3)) return *e;
    }

    // rung 4: bare pattern
    if (const auto value = pattern_score(raw)) {
        if (*value >= 1 && *value <= 5) {
            Extraction e;
            e.score = static_cast<int>(*value);
            if (mode == Mode::WithReasoning) e.reasoning = pattern_reasoning(raw);
            e.rung = 4;
            return e;
        }
        out_of_range = static_cast<int>(*value);
    }

    if (out_of_range)
        throw ProtocolViolation("score " + std::to_string(*out_of_range) +
                                " outside the 1..5 rubric");
    throw ExtractionError("no recoverable score in model output", raw);
}

Verdict judge_pair(const corpus::EvalPair& pair, const RubricPrompt& prompt,
                   const chat::ChatClient& client,
                   const text::Tokenizer* estimator) {
    const auto [system, user] = render_prompt(pair, prompt);
    chat::ChatRequest request{system, user, 0.0};

    auto attempt = [&]() -> Verdict {
        const chat::ChatResult result = client.complete(request);
        const Extraction extraction = extract_verdict(result.content, prompt.mode);
        Verdict v;
        v.score = extraction.score;
        v.reasoning = extraction.reasoning;
        v.raw_response = result.content;
        v.model = client.provider().name;
        v.extraction_rung = extraction.rung;
        v.usage.latency_seconds = result.latency_seconds;
        if (result.prompt_tokens && result.completion_tokens) {
            v.usage.prompt_tokens = *result.prompt_tokens;
            v.usage.completion_tokens = *result.completion_tokens;
        } else if (estimator) {
            v.usage.prompt_tokens = static_cast<long>(
                estimator->count(system) + estimator->count(user));
            v.usage.completion_tokens =
                static_cast<long>(estimator->count(result.content));
            v.usage.token_counts_estimated = true;
        }
        return v;
    };

    try {
        return attempt();
    } catch (const ExtractionError&) {
        // temperature-0 responses are near-deterministic; one retry only
        return attempt();
    }
}

}  // namespace faithcheck::judge
