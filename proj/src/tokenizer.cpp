#include "faithcheck/textproc.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include "faithcheck/errors.hpp"

namespace faithcheck::text {

namespace {

enum class ByteClass { Whitespace, Letter, Digit, Other };

ByteClass classify(unsigned char b) {
    switch (b) {
        case 0x20: case 0x09: case 0x0A: case 0x0D: case 0x0B: case 0x0C:
            return ByteClass::Whitespace;
        default:
            break;
    }
    if ((b >= 'A' && b <= 'Z') || (b >= 'a' && b <= 'z') || b >= 0x80)
        return ByteClass::Letter;
    if (b >= '0' && b <= '9') return ByteClass::Digit;
    return ByteClass::Other;
}

bool wordish(ByteClass c) {
    return c == ByteClass::Letter || c == ByteClass::Digit;
}

std::string decode_base64(std::string_view in) {
    static constexpr char alphabet[] =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    static int lut[256];
    static bool init = [] {
        std::fill(std::begin(lut), std::end(lut), -1);
        for (int i = 0; i < 64; ++i) lut[(unsigned char)alphabet[i]] = i;
        return true;
    }();
    (void)init;

    std::string out;
    int acc = 0, bits = 0;
    for (char ch : in) {
        if (ch == '=') break;
        int v = lut[(unsigned char)ch];
        if (v < 0) throw VocabError("invalid base64 in rank file");
        acc = (acc << 6) | v;
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<char>((acc >> bits) & 0xFF));
        }
    }
    return out;
}

}  // namespace

std::vector<std::string_view> split_pieces(std::string_view text) {
    std::vector<std::string_view> pieces;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        if (c == ' ' && i + 1 < n &&
            wordish(classify(static_cast<unsigned char>(text[i + 1])))) {
            const ByteClass k = classify(static_cast<unsigned char>(text[i + 1]));
            std::size_t j = i + 1;
            while (j < n && classify(static_cast<unsigned char>(text[j])) == k) ++j;
            pieces.push_back(text.substr(i, j - i));
            i = j;
        } else if (classify(c) == ByteClass::Whitespace) {
            std::size_t j = i;
            while (j < n &&
                   classify(static_cast<unsigned char>(text[j])) == ByteClass::Whitespace)
                ++j;
            // last space of a run attaches to a following word or number
            if (j < n && j - i >= 2 && text[j - 1] == ' ' &&
                wordish(classify(static_cast<unsigned char>(text[j]))))
                --j;
            pieces.push_back(text.substr(i, j - i));
            i = j;
        } else {
            const ByteClass k = classify(c);
            std::size_t j = i;
            while (j < n && classify(static_cast<unsigned char>(text[j])) == k) ++j;
            pieces.push_back(text.substr(i, j - i));
            i = j;
        }
    }
    return pieces;
}

Tokenizer Tokenizer::from_rank_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw VocabError("cannot open rank file: " + path.string());

    Tokenizer tok;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto space = line.find(' ');
        if (space == std::string::npos || space == 0 || space + 1 >= line.size())
            throw VocabError("rank file line " + std::to_string(line_no) +
                             ": expected \"<base64> <rank>\"");
        const std::string bytes = decode_base64(line.substr(0, space));
        int rank = 0;
        try {
            std::size_t used = 0;
            rank = std::stoi(line.substr(space + 1), &used);
            if (used != line.size() - space - 1 || rank < 0)
                throw std::invalid_argument("rank");
        } catch (const std::exception&) {
            throw VocabError("rank file line " + std::to_string(line_no) +
                             ": bad rank value");
        }
        if (bytes.empty())
            throw VocabError("rank file line " + std::to_string(line_no) +
                             ": empty token");
        if (!tok.ranks_.emplace(bytes, rank).second)
            throw VocabError("rank file line " + std::to_string(line_no) +
                             ": duplicate token");
        if (!tok.bytes_by_id_.emplace(rank, bytes).second)
            throw VocabError("rank file line " + std::to_string(line_no) +
                             ": duplicate rank " + std::to_string(rank));
    }
    for (int b = 0; b < 256; ++b) {
        if (tok.ranks_.find(std::string(1, static_cast<char>(b))) == tok.ranks_.end())
            throw VocabError("rank file is missing single-byte token " +
                             std::to_string(b));
    }
    return tok;
}

void Tokenizer::encode_piece(std::string_view piece, std::vector<int>& out) const {
    // parts[i] = [offsets[i], offsets[i+1]) over the piece bytes
    std::vector<std::size_t> offsets(piece.size() + 1);
    for (std::size_t i = 0; i <= piece.size(); ++i) offsets[i] = i;

    auto pair_rank = [&](std::size_t i) -> long {
        const std::string key(piece.substr(offsets[i], offsets[i + 2] - offsets[i]));
        const auto it = ranks_.find(key);
        return it == ranks_.end() ? -1 : it->second;
    };

    while (offsets.size() > 2) {
        long best = std::numeric_limits<long>::max();
        std::size_t best_i = offsets.size();
        for (std::size_t i = 0; i + 2 < offsets.size(); ++i) {
            const long r = pair_rank(i);
            if (r >= 0 && r < best) {
                best = r;
                best_i = i;
            }
        }
        if (best_i == offsets.size()) break;
        offsets.erase(offsets.begin() + static_cast<std::ptrdiff_t>(best_i) + 1);
    }

    for (std::size_t i = 0; i + 1 < offsets.size(); ++i) {
        const std::string key(piece.substr(offsets[i], offsets[i + 1] - offsets[i]));
        out.push_back(ranks_.at(key));
    }
}

std::vector<int> Tokenizer::encode(std::string_view text) const {
    std::vector<int> out;
    for (const auto piece : split_pieces(text)) encode_piece(piece, out);
    return out;
}

std::string Tokenizer::decode(const std::vector<int>& tokens) const {
    std::string out;
    for (const int id : tokens) {
        const auto it = bytes_by_id_.find(id);
        if (it == bytes_by_id_.end())
            throw VocabError("unknown token id " + std::to_string(id));
        out += it->second;
    }
    return out;
}

std::size_t Tokenizer::count(std::string_view text) const {
    return encode(text).size();
}

}  // namespace faithcheck::text
