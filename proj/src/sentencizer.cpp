#include "faithcheck/textproc.hpp"

#include <array>
#include <fstream>

#include "faithcheck/errors.hpp"

namespace faithcheck::text {

namespace {

constexpr std::array<const char*, 50> kDefaultAbbreviations = {
    "Mr.",  "Mrs.",  "Ms.",  "Dr.",   "Prof.", "Sr.",   "Jr.",  "St.",
    "Mt.",  "Ft.",   "Rd.",  "Ave.",  "Blvd.", "Apt.",  "No.",  "Nos.",
    "vs.",  "etc.",  "e.g.", "i.e.",  "cf.",   "al.",   "Inc.", "Ltd.",
    "Co.",  "Corp.", "U.S.", "U.K.",  "U.N.",  "E.U.",  "a.m.", "p.m.",
    "Jan.", "Feb.",  "Mar.", "Apr.",  "Jun.",  "Jul.",  "Aug.", "Sep.",
    "Sept.", "Oct.", "Nov.", "Dec.",  "Fig.",  "approx.", "dept.", "est.",
    "min.", "max.",
};

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
           c == '\f';
}

bool is_open_quote(std::string_view text, std::size_t i) {
    const char c = text[i];
    if (c == '"' || c == '\'') return true;
    // UTF-8 left double/single quotation marks U+201C, U+2018
    if (i + 2 < text.size() && static_cast<unsigned char>(c) == 0xE2 &&
        static_cast<unsigned char>(text[i + 1]) == 0x80) {
        const unsigned char b = static_cast<unsigned char>(text[i + 2]);
        return b == 0x9C || b == 0x98;
    }
    return false;
}

std::string word_ending_at(std::string_view text, std::size_t period) {
    std::size_t j = period;
    while (j > 0 && !is_space(text[j - 1])) --j;
    return std::string(text.substr(j, period - j + 1));
}

}  // namespace

Sentencizer::Sentencizer() {
    for (const char* a : kDefaultAbbreviations) abbreviations_.insert(a);
}

Sentencizer Sentencizer::from_file(const std::filesystem::path& abbrev_file) {
    std::ifstream in(abbrev_file);
    if (!in) throw IoError("cannot open abbreviation file: " + abbrev_file.string());
    Sentencizer s;
    s.abbreviations_.clear();
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line[0] != '#') s.abbreviations_.insert(line);
    }
    return s;
}

std::vector<SentenceSpan> Sentencizer::sentencize(std::string_view text) const {
    const std::size_t n = text.size();
    std::vector<std::size_t> boundaries;  // index just past each sentence end
    std::size_t i = 0;
    while (i < n) {
        const char c = text[i];
        if (c == '.' || c == '!' || c == '?') {
            std::size_t j = i + 1;
            while (j < n && is_space(text[j])) ++j;
            const bool follows_ws = j > i + 1;
            if (j >= n) {
                boundaries.push_back(i + 1);
            } else if (follows_ws &&
                       ((text[j] >= 'A' && text[j] <= 'Z') ||
                        is_open_quote(text, j))) {
                const bool suppressed =
                    c == '.' &&
                    abbreviations_.count(word_ending_at(text, i)) > 0;
                if (!suppressed) boundaries.push_back(i + 1);
            }
        } else if (c == '\n') {
            // blank line: always a boundary
            std::size_t j = i + 1;
            while (j < n && is_space(text[j]) && text[j] != '\n') ++j;
            if (j < n && text[j] == '\n') {
                boundaries.push_back(i);
                while (j < n && is_space(text[j])) ++j;
                i = j - 1;
            }
        }
        ++i;
    }
    if (boundaries.empty() || boundaries.back() < n) boundaries.push_back(n);

    std::vector<SentenceSpan> spans;
    std::size_t start = 0;
    for (const std::size_t b : boundaries) {
        std::size_t s = start, e = b;
        while (s < e && is_space(text[s])) ++s;
        while (e > s && is_space(text[e - 1])) --e;
        if (s < e)
            spans.push_back({s, e, std::string(text.substr(s, e - s))});
        start = b;
    }
    return spans;
}

}  // namespace faithcheck::text
