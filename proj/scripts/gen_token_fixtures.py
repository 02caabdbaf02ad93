#!/usr/bin/env python3
"""Reference BPE oracle: freezes expected token counts for the fixture strings.

This is an independent implementation of the tokenizer (pre-split + greedy
lowest-rank merge over the rank table). It is intentionally written naively
(O(n^2) merge scan) and kept separate from the C++ code path it checks.

Outputs:
  data/fixtures/token_counts.json   25 strings with frozen counts
  data/fixtures/toy_stats.json      dataset stats for the bundled toy corpus
                                    (token counts via this oracle, sentence
                                    counts via the reference sentencizer)
"""

import base64
import json
import os
import sys

HERE = os.path.dirname(os.path.abspath(__file__))
ROOT = os.path.normpath(os.path.join(HERE, ".."))

WS, LETTER, DIGIT, OTHER = 0, 1, 2, 3


def byte_class(b):
    if b in (0x20, 0x09, 0x0A, 0x0D, 0x0B, 0x0C):
        return WS
    if (0x41 <= b <= 0x5A) or (0x61 <= b <= 0x7A) or b >= 0x80:
        return LETTER
    if 0x30 <= b <= 0x39:
        return DIGIT
    return OTHER


def split_pieces(data):
    pieces = []
    i, n = 0, len(data)
    while i < n:
        c = data[i]
        if c == 0x20 and i + 1 < n and byte_class(data[i + 1]) in (LETTER, DIGIT):
            k = byte_class(data[i + 1])
            j = i + 1
            while j < n and byte_class(data[j]) == k:
                j += 1
            pieces.append(data[i:j])
            i = j
        elif byte_class(c) == WS:
            j = i
            while j < n and byte_class(data[j]) == WS:
                j += 1
            if (j < n and j - i >= 2 and data[j - 1] == 0x20
                    and byte_class(data[j]) in (LETTER, DIGIT)):
                j -= 1
            pieces.append(data[i:j])
            i = j
        else:
            k = byte_class(c)
            j = i
            while j < n and byte_class(data[j]) == k:
                j += 1
            pieces.append(data[i:j])
            i = j
    return pieces


def load_ranks(path):
    ranks = {}
    with open(path, "rb") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            tok_b64, rank = line.split(b" ")
            ranks[base64.b64decode(tok_b64)] = int(rank)
    return ranks


def bpe_piece(piece, ranks):
    """Greedy merge: repeatedly merge the adjacent pair with the lowest rank."""
    parts = [bytes([b]) for b in piece]
    while len(parts) > 1:
        best_rank = None
        best_i = -1
        for i in range(len(parts) - 1):
            r = ranks.get(parts[i] + parts[i + 1])
            if r is not None and (best_rank is None or r < best_rank):
                best_rank = r
                best_i = i
        if best_i < 0:
            break
        parts[best_i:best_i + 2] = [parts[best_i] + parts[best_i + 1]]
    return parts


def count_tokens(text, ranks):
    data = text.encode("utf-8")
    return sum(len(bpe_piece(p, ranks)) for p in split_pieces(data))


# --- reference sentencizer -------------------------------------------------

ABBREVIATIONS = [
    "Mr.", "Mrs.", "Ms.", "Dr.", "Prof.", "Sr.", "Jr.", "St.", "Mt.", "Ft.",
    "Rd.", "Ave.", "Blvd.", "Apt.", "No.", "Nos.", "vs.", "etc.", "e.g.",
    "i.e.", "cf.", "al.", "Inc.", "Ltd.", "Co.", "Corp.", "U.S.", "U.K.",
    "U.N.", "E.U.", "a.m.", "p.m.", "Jan.", "Feb.", "Mar.", "Apr.", "Jun.",
    "Jul.", "Aug.", "Sep.", "Sept.", "Oct.", "Nov.", "Dec.", "Fig.",
    "approx.", "dept.", "est.", "min.", "max.",
]

OPEN_QUOTES = ('"', "'", "“", "‘")


def is_space(c):
    return c in " \t\n\r\v\f"


def word_before(text, i):
    j = i
    while j > 0 and not is_space(text[j - 1]):
        j -= 1
    return text[j:i + 1]


def sentencize(text):
    """Returns sentence strings (trimmed spans), mirroring the spec'd rules."""
    n = len(text)
    boundaries = []  # index just past the last char of each sentence
    i = 0
    while i < n:
        c = text[i]
        if c in ".!?":
            j = i + 1
            while j < n and is_space(text[j]):
                j += 1
            follows_ws = j > i + 1
            if j >= n:
                boundaries.append(i + 1)
            elif follows_ws and (text[j].isupper() and text[j].isalpha()
                                 and ord(text[j]) < 128
                                 or text[j] in OPEN_QUOTES):
                if not (c == "." and word_before(text, i) in ABBREVIATIONS):
                    boundaries.append(i + 1)
        elif c == "\n":
            j = i + 1
            while j < n and is_space(text[j]) and text[j] != "\n":
                j += 1
            if j < n and text[j] == "\n":
                boundaries.append(i)  # paragraph break always splits
                while j < n and is_space(text[j]):
                    j += 1
                i = j - 1
        i += 1
    if not boundaries or boundaries[-1] < n:
        boundaries.append(n)
    spans = []
    start = 0
    for b in boundaries:
        seg = text[start:b]
        trimmed = seg.strip()
        if trimmed:
            spans.append(trimmed)
        start = b
    return spans


FIXTURE_STRINGS = [
    "The total charge for the booking is 1,078.84 CAD.",
    "Walking distance to the beach.",
    "The agent confirmed the refund will be processed within 7 business days.",
    "Cozy 2-bedroom vacation home steps away from the old town square.",
    "Check-in starts at 3:00 PM and check-out is at 11:00 AM.",
    "hello world",
    "Hello, World!",
    "a",
    "  leading and trailing spaces  ",
    "multiple   internal    spaces",
    "line one\nline two\n\nparagraph break",
    "tabs\tand\tmore\ttabs",
    "The traveler requested an early check-in at the Vancouver property.",
    '{"city": "Toronto", "rating": 5, "price": 1284.50}',
    "UPPERCASE LETTERS AND lowercase letters",
    "1234567890",
    "3.14159265358979",
    "naive cafe resume",
    "café naïve résumé",
    "日本語のテキスト",
    "emoji \U0001f600 test \U0001f680 rocket",
    "supercalifragilisticexpialidocious",
    "e.g. the U.S. dollar vs. the euro, i.e. EUR.",
    "Dr. Smith met Mrs. Jones at 5 p.m. on March 14.",
    "The quick brown fox jumps over the lazy dog.",
]


def main():
    ranks = load_ranks(os.path.join(ROOT, "data", "ranks", "en_travel_8k.ranks"))
    entries = [{"text": s, "tokens": count_tokens(s, ranks)}
               for s in FIXTURE_STRINGS]
    out = os.path.join(ROOT, "data", "fixtures", "token_counts.json")
    with open(out, "w") as f:
        json.dump(entries, f, indent=1, ensure_ascii=False)
        f.write("\n")
    print(f"wrote {out} ({len(entries)} strings)")

    toy = os.path.join(ROOT, "data", "toy", "gold_full.jsonl")
    if os.path.exists(toy):
        by_dataset = {}
        with open(toy) as f:
            for line in f:
                if not line.strip():
                    continue
                rec = json.loads(line)
                by_dataset.setdefault(rec["dataset"], []).append(rec)
        stats = {}
        for name, recs in sorted(by_dataset.items()):
            n = len(recs)
            stats[name] = {
                "pair_count": n,
                "ref_avg_tokens": sum(count_tokens(r["reference"], ranks) for r in recs) / n,
                "ref_avg_sents": sum(len(sentencize(r["reference"])) for r in recs) / n,
                "hyp_avg_tokens": sum(count_tokens(r["hypothesis"], ranks) for r in recs) / n,
                "hyp_avg_sents": sum(len(sentencize(r["hypothesis"])) for r in recs) / n,
            }
        out2 = os.path.join(ROOT, "data", "fixtures", "toy_stats.json")
        with open(out2, "w") as f:
            json.dump(stats, f, indent=1)
            f.write("\n")
        print(f"wrote {out2}")
    else:
        print("toy corpus not present yet; skipped stats")


if __name__ == "__main__":
    main()
