#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace faithcheck::text {

// Byte-pair-encoding tokenizer over a rank table in the cl100k_base text
// format (one "base64(token) rank" per line). Encoding pre-splits the byte
// stream into pieces (a single leading space attaches to the following
// word or number) and then greedily merges the adjacent pair with the
// lowest rank inside each piece. Tokens never cross piece boundaries.
class Tokenizer {
public:
    static Tokenizer from_rank_file(const std::filesystem::path& path);

    std::vector<int> encode(std::string_view text) const;
    std::string decode(const std::vector<int>& tokens) const;
    std::size_t count(std::string_view text) const;

    std::size_t vocab_size() const { return ranks_.size(); }

private:
    Tokenizer() = default;

    void encode_piece(std::string_view piece, std::vector<int>& out) const;

    std::unordered_map<std::string, int> ranks_;
    std::unordered_map<int, std::string> bytes_by_id_;
};

// Splits a byte string into BPE pieces. Exposed for tests; the rule must
// match the rank-file training script.
std::vector<std::string_view> split_pieces(std::string_view text);

struct SentenceSpan {
    std::size_t start = 0;  // byte offset, inclusive
    std::size_t end = 0;    // byte offset, exclusive
    std::string text;       // source[start..end), never whitespace-only
};

// Deterministic rule-based sentencizer. Splits after '.', '!' or '?' when
// followed by whitespace and an ASCII uppercase letter or an opening quote,
// or at end of text; a blank line always splits. An abbreviation list
// suppresses splits after e.g. "Dr." or "U.S.".
class Sentencizer {
public:
    Sentencizer();  // built-in abbreviation defaults
    static Sentencizer from_file(const std::filesystem::path& abbrev_file);

    std::vector<SentenceSpan> sentencize(std::string_view text) const;
    std::size_t count(std::string_view text) const {
        return sentencize(text).size();
    }

private:
    std::unordered_set<std::string> abbreviations_;
};

}  // namespace faithcheck::text
