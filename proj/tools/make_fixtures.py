#!/usr/bin/env python3
# Copyright 2026 The kgadapt Authors
# SPDX-License-Identifier: Apache-2.0
"""Regenerates the bundled fixtures under fixtures/.

Everything is derived from a fixed seed, so rerunning the script reproduces
the committed files byte for byte.
"""

import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "fixtures"

RELATIONS = [
    "Antonym", "DerivedFrom", "EtymologicallyDerivedFrom", "EtymologicallyRelatedTo",
    "FormOf", "HasContext", "IsA", "RelatedTo", "SimilarTo", "Synonym", "SymbolOf",
    "DistinctFrom",
]


def dump_jsonl(path, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def dump_json(path, obj):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(obj, f, ensure_ascii=False, indent=1)
        f.write("\n")


def edge(rel, s, s_lang, o, o_lang, weight=1.0):
    return {
        "@id": f"/a/[/r/{rel}/,/c/{s_lang}/{s}/,/c/{o_lang}/{o}/]",
        "rel": {"@id": f"/r/{rel}", "label": rel},
        "start": {"@id": f"/c/{s_lang}/{s}", "label": s, "language": s_lang},
        "end": {"@id": f"/c/{o_lang}/{o}", "label": o, "language": o_lang},
        "weight": weight,
    }


def write_pages(directory, lang, edges, page_size):
    pages = [edges[i:i + page_size] for i in range(0, len(edges), page_size)] or [[]]
    for n, chunk in enumerate(pages):
        view = {"@id": f"/query?node=/c/{lang}&offset={n * page_size}&limit={page_size}"}
        if n + 1 < len(pages):
            view["nextPage"] = f"/query?node=/c/{lang}&offset={(n + 1) * page_size}&limit={page_size}"
        dump_json(directory / f"page_{n + 1:03d}.json", {"@id": f"/query?node=/c/{lang}", "edges": chunk, "view": view})


# A handful of Maltese words with English glosses for the small "mt" sample.
MT_PAIRS = [
    ("kiel", "eat"), ("iswed", "black"), ("abjad", "white"), ("sħun", "hot"), ("kiesaħ", "cold"),
    ("kbir", "big"), ("żgħir", "small"), ("dar", "house"), ("kelb", "dog"), ("qattus", "cat"),
    ("ilma", "water"), ("ħobż", "bread"), ("tajjeb", "good"), ("ħażin", "bad"), ("ġdid", "new"),
    ("qadim", "old"), ("xemx", "sun"), ("qamar", "moon"), ("triq", "road"), ("baħar", "sea"),
]


def mt_fixtures(rng):
    edges = []
    for i in range(40):
        mt, en = MT_PAIRS[i % len(MT_PAIRS)]
        rel = RELATIONS[i % len(RELATIONS)]
        other_mt, other_en = MT_PAIRS[(i * 7 + 3) % len(MT_PAIRS)]
        if i % 3 == 0:
            edges.append(edge(rel, mt, "mt", en, "en", 1.0 + (i % 4) * 0.5))
        elif i % 3 == 1:
            edges.append(edge(rel, mt, "mt", other_mt, "mt", 1.0))
        else:
            edges.append(edge(rel, other_en, "en", mt, "mt", 2.0))
    # Records the extractor must skip.
    edges[5] = edge("ExternalURL", "kelb", "mt", "http://example.org/kelb", "en")
    edges[5]["end"].pop("language")
    edges[17]["end"]["label"] = "  "
    write_pages(ROOT / "conceptnet" / "mt", "mt", edges, 20)
    write_pages(ROOT / "conceptnet" / "xx", "xx", [], 20)

    triples = []
    for i in range(40):
        mt, en = MT_PAIRS[i % len(MT_PAIRS)]
        other_mt, _ = MT_PAIRS[(i * 11 + 5) % len(MT_PAIRS)]
        rel = RELATIONS[(i * 5) % len(RELATIONS)]
        obj, obj_lang = (en, "en") if i % 2 == 0 else (other_mt, "mt")
        triples.append({"subject": mt, "relation": rel, "object": obj, "subject_lang": "mt",
                        "object_lang": obj_lang, "weight": 1.0})
    dump_jsonl(ROOT / "mt.jsonl", triples)


SA_TRAIN, SA_HELD = 800, 100
SA_TOTAL = SA_TRAIN + 2 * SA_HELD

SYLLABLES = [c + v for c in "bdfgklmnprstvz" for v in "aeiou"]


def nonce_words(rng, count, taken):
    out = []
    while len(out) < count:
        w = "".join(rng.choice(SYLLABLES) for _ in range(rng.choice([2, 2, 3])))
        if w not in taken:
            taken.add(w)
            out.append(w)
    return out


def toy_fixtures(rng):
    taken = set()
    positive = nonce_words(rng, 10, taken)
    negative = nonce_words(rng, 10, taken)
    nouns = nonce_words(rng, 30, taken)
    fillers = nonce_words(rng, 6, taken)
    lang = "tx"

    edges = []
    for group, anchor, other in ((positive, "good", negative), (negative, "bad", positive)):
        for w in group:
            edges.append(edge("IsA", w, lang, anchor, "en"))
            edges.append(edge("SymbolOf", w, lang, anchor, "en"))
            for peer in rng.sample([g for g in group if g != w], 2):
                edges.append(edge(rng.choice(["SimilarTo", "Synonym"]), w, lang, peer, lang))
            edges.append(edge("Antonym", w, lang, rng.choice(other), lang))
            for n in rng.sample(nouns, 2):
                edges.append(edge("RelatedTo", n, lang, w, lang))
    for n in nouns:
        edges.append(edge("RelatedTo", n, lang, rng.choice([m for m in nouns if m != n]), lang))
        edges.append(edge(rng.choice(["HasContext", "DistinctFrom", "FormOf"]), n, lang, rng.choice(nouns), lang))
    rng.shuffle(edges)
    write_pages(ROOT / "conceptnet" / lang, lang, edges, 50)

    def filler_run(k):
        return [rng.choice(nouns + fillers) for _ in range(k)]

    wiki = []
    for _ in range(300):
        words = filler_run(rng.randint(4, 8))
        if rng.random() < 0.5:
            words.insert(rng.randrange(len(words) + 1), rng.choice(positive + negative))
        wiki.append(" ".join(words))
    (ROOT / "toy").mkdir(parents=True, exist_ok=True)
    with open(ROOT / "toy" / "wiki.txt", "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(wiki) + "\n")

    sa = []
    for i in range(SA_TOTAL):
        label = "positive" if i % 2 == 0 else "negative"
        words = filler_run(rng.randint(3, 6))
        words.insert(rng.randrange(len(words) + 1), rng.choice(positive if label == "positive" else negative))
        split = "train" if i < SA_TRAIN else ("val" if i < SA_TRAIN + SA_HELD else "test")
        sa.append({"text": " ".join(words), "label": label, "split": split})
    dump_jsonl(ROOT / "toy" / "sa.jsonl", sa)

    dump_jsonl(ROOT / "sa10.jsonl", [{k: r[k] for k in ("text", "label")} for r in sa[:10]])
    dump_jsonl(ROOT / "plain.jsonl", [{"text": s, "spans": None, "lang": lang} for s in wiki[:20]])

    with open(ROOT / "lines100.txt", "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(wiki[:100]) + "\n")
    vocab_lines = []
    for _ in range(1000):
        vocab_lines.append(" ".join(rng.choice(nouns + fillers + positive + negative)
                                    for _ in range(rng.randint(3, 9))))
    with open(ROOT / "vocab1000.txt", "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(vocab_lines) + "\n")

    # Small NER set: a PER name or LOC name among nouns.
    people = nonce_words(rng, 8, taken)
    places = nonce_words(rng, 8, taken)

    def ner_sentence():
        toks, tags = [], []
        for _ in range(rng.randint(3, 6)):
            r = rng.random()
            if r < 0.2:
                name = [rng.choice(people).capitalize() for _ in range(rng.choice([1, 2]))]
                toks += name
                tags += ["B-PER"] + ["I-PER"] * (len(name) - 1)
            elif r < 0.35:
                toks.append(rng.choice(places).capitalize())
                tags.append("B-LOC")
            else:
                toks.append(rng.choice(nouns + fillers))
                tags.append("O")
        return toks, tags

    for split, n in (("train", 120), ("val", 20), ("test", 20)):
        path = ROOT / "ner" / f"{split}.conll"
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write("-DOCSTART-\tO\n\n")
            for _ in range(n):
                toks, tags = ner_sentence()
                for t, g in zip(toks, tags):
                    f.write(f"{t}\t{g}\n")
                f.write("\n")


def main():
    rng = random.Random(20260417)
    mt_fixtures(rng)
    toy_fixtures(rng)


if __name__ == "__main__":
    main()
