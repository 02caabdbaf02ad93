#!/usr/bin/env python3
"""Train the bundled byte-pair-encoding rank table.

Produces data/ranks/en_travel_8k.ranks in the cl100k_base text format:
one `base64(token_bytes) <space> rank` per line, ranks 0..255 reserved for
the single bytes, merge tokens appended in training order.

The pre-split rule here must stay in sync with gen_token_fixtures.py and
src/tokenizer.cpp: tokens never cross piece boundaries.
"""

import base64
import os
import sys
from collections import Counter

TARGET_MERGES = 8000
MIN_PAIR_COUNT = 2

WS = 0
LETTER = 1
DIGIT = 2
OTHER = 3


def byte_class(b: int) -> int:
    if b in (0x20, 0x09, 0x0A, 0x0D, 0x0B, 0x0C):
        return WS
    if (0x41 <= b <= 0x5A) or (0x61 <= b <= 0x7A) or b >= 0x80:
        return LETTER
    if 0x30 <= b <= 0x39:
        return DIGIT
    return OTHER


def split_pieces(data: bytes):
    """Split into pieces; a single leading space attaches to a word/number."""
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


def training_corpus() -> str:
    """A deterministic English corpus skewed toward travel-support text."""
    base = """
The traveler contacted the support agent to change the booking dates for a
hotel reservation in the city center. The agent confirmed that the new total
charge for the stay is 1,284.50 CAD including all taxes and resort fees.
A full refund will be issued to the original payment card within 7 to 10
business days after the cancellation is processed. The customer asked whether
the room includes free breakfast and the agent explained that breakfast is
included for the first two guests only. The property offers an outdoor pool,
a fitness center, free parking, and complimentary wireless internet in all
rooms. Check-in starts at 3:00 PM and check-out is at 11:00 AM on the day of
departure. The traveler requested an early check-in and the agent noted the
request on the reservation but could not guarantee it. The insurance policy
covers trip cancellation, medical emergencies, and lost baggage up to a
stated limit. If the original card charge is still pending, it will be
released automatically by the bank within a few days. The summary should only
include information that can be verified from the source conversation.
The review mentions that the saltwater pool was clean, heated, and open
until midnight during the summer season. Guests loved the walking distance
to the beach and the quiet neighborhood around the property. The kitchen was
fully equipped with a stove, an oven, a dishwasher, and a large refrigerator.
The host was responsive and answered every question within a few minutes.
Cozy 2-bedroom vacation home steps away from the old town square with a
private balcony overlooking the harbor. Spacious apartment with stunning
mountain views, a wood fireplace, and plenty to do right on site. The
description must stay factually consistent with the grounding data provided
in the request payload. Numeric values, proper nouns, dates, and prices in
the generated text need to be traceable back to the source document. The
model was instructed to provide detailed reasoning along with the numeric
score for every evaluated pair. Scores range from one for highly inaccurate
content to five for highly accurate content that can be fully verified.
The flight from Toronto to Vancouver departs on March 14 and returns on
March 21, seat selection is free of charge for this fare class. An agent
processed the seat upgrade and sent a confirmation email to the address on
file. The itinerary includes a connecting flight with a layover of 2 hours
and 45 minutes in Calgary. Luggage allowance is one carry-on bag and one
checked bag up to 23 kg per passenger. The traveler was satisfied with the
explanation and did not have any further requests at this time.
"""
    filler = """
a an the and or but if then else when while for to of in on at by with from
into over under between through during before after above below up down out
off again further once here there all any both each few more most other some
such only own same so than too very just because about against this that
these those it its they them their what which who whom is are was were be
been being have has had having do does did doing will would can could shall
should may might must not no nor yes you your he she we our us me my him her
summary source document hotel room booking reservation refund charge card
payment agent traveler customer guest property review rating score faithful
unfaithful accurate inaccurate verify verified information content generated
sentence reference hypothesis evaluation entailment segment window token
"""
    import random
    rng = random.Random(20240811)
    parts = [base, filler]
    cities = ["Toronto", "Vancouver", "Calgary", "Montreal", "Seattle",
              "Denver", "Austin", "Boston", "Chicago", "Portland", "Dallas",
              "Orlando", "Phoenix", "Atlanta", "Nashville", "London", "Paris"]
    amenities = ["pool", "sauna", "gym", "spa", "terrace", "garden",
                 "kitchen", "fireplace", "balcony", "parking", "hot tub",
                 "game room", "rooftop bar", "beach access", "ski storage"]
    adjectives = ["cozy", "spacious", "modern", "charming", "quiet", "bright",
                  "comfortable", "stylish", "rustic", "elegant", "affordable"]
    nouns = ["apartment", "villa", "cottage", "suite", "loft", "cabin",
             "townhouse", "bungalow", "studio", "penthouse", "guesthouse"]
    verbs = ["confirmed", "explained", "mentioned", "requested", "updated",
             "cancelled", "booked", "reviewed", "refunded", "processed",
             "verified", "summarized", "described", "reported", "noted"]
    objects = ["the reservation", "the booking", "the refund", "the charge",
               "the itinerary", "the policy", "the upgrade", "the summary",
               "the invoice", "the deposit", "the voucher", "the receipt"]
    templates = [
        "The {adj} {noun} near {city} features a {am} and a {am2}.",
        "The agent {verb} {obj} for the stay in {city} on {month} {day}.",
        "The traveler {verb} {obj} and the total came to {price} USD.",
        "Guests said the {am} was {adj} and the {noun} was close to {city}.",
        "A {adj} {noun} in {city} with {num} bedrooms costs {price} CAD per night.",
        "The {noun} review mentions the {am}, the {am2}, and the {adj} view.",
        "Support {verb} {obj}, then {verb2} the payment of {price} USD.",
        "Check-in at the {city} {noun} is at {hour}:00 PM and check-out at {hour2}:00 AM.",
        '{{"city": "{city}", "type": "{noun}", "rating": {num}, "price": {price}}}',
        "The refund of {price} CAD for {obj} in {city} posts within {num} days.",
    ]
    months = ["January", "February", "March", "April", "May", "June", "July",
              "August", "September", "October", "November", "December"]
    for _ in range(6000):
        t = rng.choice(templates)
        parts.append(t.format(
            adj=rng.choice(adjectives), noun=rng.choice(nouns),
            city=rng.choice(cities), am=rng.choice(amenities),
            am2=rng.choice(amenities), verb=rng.choice(verbs),
            verb2=rng.choice(verbs), obj=rng.choice(objects),
            month=rng.choice(months), day=rng.randint(1, 28),
            price=f"{rng.randint(80, 4999)}.{rng.randint(0, 99):02d}",
            num=rng.randint(1, 9), hour=rng.randint(1, 9),
            hour2=rng.randint(8, 11)))
    return "\n".join(parts)


def train(corpus: bytes):
    piece_counts = Counter(split_pieces(corpus))
    # each piece as a tuple of current tokens (bytes objects)
    words = {p: [bytes([b]) for b in p] for p in piece_counts}

    def pair_counts():
        pc = Counter()
        for p, cnt in piece_counts.items():
            toks = words[p]
            for a, b in zip(toks, toks[1:]):
                pc[(a, b)] += cnt
        return pc

    pc = pair_counts()
    merges = []
    while len(merges) < TARGET_MERGES and pc:
        (a, b), best = max(pc.items(), key=lambda kv: (kv[1], kv[0][0] + kv[0][1]))
        # deterministic tie-break: highest count, then lexicographically
        # largest concatenation (stable under dict iteration order)
        if best < MIN_PAIR_COUNT:
            break
        merged = a + b
        merges.append(merged)
        for p, cnt in piece_counts.items():
            toks = words[p]
            i = 0
            changed = False
            while i < len(toks) - 1:
                if toks[i] == a and toks[i + 1] == b:
                    if i > 0:
                        pc[(toks[i - 1], a)] -= cnt
                        pc[(toks[i - 1], merged)] += cnt
                    if i + 2 < len(toks):
                        pc[(b, toks[i + 2])] -= cnt
                        pc[(merged, toks[i + 2])] += cnt
                    toks[i:i + 2] = [merged]
                    changed = True
                else:
                    i += 1
            if changed:
                pass
        del pc[(a, b)]
        pc = Counter({k: v for k, v in pc.items() if v > 0})
    return merges


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
        os.path.dirname(__file__), "..", "data", "ranks", "en_travel_8k.ranks")
    corpus = training_corpus().encode("utf-8")
    merges = train(corpus)
    lines = []
    for rank in range(256):
        lines.append(f"{base64.b64encode(bytes([rank])).decode()} {rank}")
    for i, tok in enumerate(merges):
        lines.append(f"{base64.b64encode(tok).decode()} {256 + i}")
    with open(out, "w") as f:
        f.write("\n".join(lines) + "\n")
    print(f"wrote {out}: 256 byte tokens + {len(merges)} merges")


if __name__ == "__main__":
    main()
