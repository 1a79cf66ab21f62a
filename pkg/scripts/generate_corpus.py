"""Generate the bundled demonstration corpus (deterministic, seeded).

The real study corpus is licensed scrape data and cannot ship with the
toolkit, so the repository bundles a synthetic public-domain-style corpus
with the same record schema and the qualitative properties the analyses
expect: multiple forms with >=50 poems each, comma-dominant line-final
punctuation, birth years spanning several centuries, and a tag vocabulary
large enough for the N>=100 tag analyses.

Run from the repository root:

    python3 scripts/generate_corpus.py [out_path]
"""

import json
import random
import sys

SEED = 90210

VOCAB = (
    "river stone morning shadow window winter salt light sparrow door "
    "ember harbor lantern thistle meadow copper thunder willow sleep dust "
    "mirror hunger orchard violet petal granite sorrow kindle marrow fern "
    "August pearl hollow cedar smoke clover iron velvet ash wing"
).split()

# comma leads every form's line-final punctuation distribution
PUNCT_WEIGHTS = [
    (",", 30), ("", 38), (".", 14), (";", 8), ("!", 3), ("?", 3), ("—", 2), (":", 2),
]

FORMS = [
    ("free-verse", 200),
    ("sonnet", 120),
    ("ballad", 100),
    ("haiku", 90),
    ("ode", 90),
]

TAGS = ["nature", "love", "death", "city", "war", "myth", "childhood", "sea"]
SOURCES = ["published", "published", "published", "unpublished", "generated"]


def pick_punct(rng):
    total = sum(w for _, w in PUNCT_WEIGHTS)
    roll = rng.randrange(total)
    for tok, w in PUNCT_WEIGHTS:
        roll -= w
        if roll < 0:
            return tok
    return ""


def make_line(rng, form):
    n = {"haiku": rng.randint(3, 5)}.get(form, rng.randint(4, 8))
    words = [rng.choice(VOCAB) for _ in range(n)]
    line = " ".join(words)
    if form == "free-verse":
        if rng.random() < 0.18:
            line = " " * rng.choice([2, 4, 6, 8]) + line
        if rng.random() < 0.12:
            cut = rng.randint(1, len(words) - 1)
            line = " ".join(words[:cut]) + " " * rng.randint(2, 6) + " ".join(words[cut:])
    return line + pick_punct(rng)


def make_body(rng, form):
    if form == "haiku":
        return "\n".join(make_line(rng, form) for _ in range(3))
    if form == "sonnet":
        return "\n".join(make_line(rng, form) for _ in range(14))
    if form == "ballad":
        stanzas = ["\n".join(make_line(rng, form) for _ in range(4))
                   for _ in range(rng.randint(2, 4))]
        return "\n\n".join(stanzas)
    # free verse and odes: irregular stanzas, occasional long gaps
    stanzas = []
    for _ in range(rng.randint(1, 4)):
        stanzas.append("\n".join(make_line(rng, form) for _ in range(rng.randint(2, 7))))
    gap = "\n\n\n" if (form == "free-verse" and rng.random() < 0.1) else "\n\n"
    return gap.join(stanzas)


def main(out_path):
    rng = random.Random(SEED)
    records = []
    n = 0
    for form, count in FORMS:
        for _ in range(count):
            n += 1
            poet_no = rng.randint(1, 160)
            rec = {
                "id": f"pd-{n:04d}",
                "title": " ".join(rng.choice(VOCAB) for _ in range(rng.randint(1, 3))).title(),
                "poet": f"Poet {poet_no}",
                "body": make_body(rng, form),
                "form": form,
                "tags": sorted(rng.sample(TAGS, rng.randint(1, 3))),
                "source": rng.choice(SOURCES),
            }
            if rng.random() < 0.85:
                rec["poet_birth_year"] = 1550 + (poet_no * 17) % 400
            records.append(rec)
    rng.shuffle(records)
    with open(out_path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
    print(f"wrote {len(records)} poems to {out_path}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/public_domain_corpus.jsonl")
