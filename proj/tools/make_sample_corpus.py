#!/usr/bin/env python3
"""Generates the bundled 4-class news-style sample corpus and synonym lexicon.

Four classes with the AG's News label set (world, sports, business, sci/tech).
Each class draws topical words from its own synonym clusters. A cluster has one
dominant surface form and rarer alternatives; rare forms also appear in other
classes as background noise.

Usage: make_sample_corpus.py OUT_DIR [--seed N]
Writes OUT_DIR/synonyms.tsv, OUT_DIR/ag_sample_train.csv, OUT_DIR/ag_sample_test.csv.
"""

import argparse
import os
import random

CLASS_NAMES = ["world", "sports", "business", "scitech"]

CLASS_CLUSTERS = {
    "world": [
        ["government", "administration", "regime", "authorities"],
        ["president", "leader", "premier", "chief"],
        ["minister", "official", "envoy", "diplomat"],
        ["war", "conflict", "hostilities", "warfare"],
        ["troops", "soldiers", "forces", "militia"],
        ["election", "vote", "ballot", "poll"],
        ["talks", "negotiations", "discussions", "dialogue"],
        ["attack", "assault", "raid", "strike"],
        ["killed", "slain", "dead", "murdered"],
        ["capital", "city", "metropolis", "town"],
        ["nation", "country", "state", "republic"],
        ["rebels", "insurgents", "guerrillas", "militants"],
        ["peace", "truce", "ceasefire", "armistice"],
        ["border", "frontier", "boundary", "perimeter"],
        ["protest", "demonstration", "rally", "march"],
        ["embassy", "consulate", "mission", "legation"],
        ["parliament", "legislature", "congress", "assembly"],
        ["refugees", "exiles", "evacuees", "emigrants"],
        ["bomb", "explosive", "device", "blast"],
        ["treaty", "accord", "pact", "agreement"],
    ],
    "sports": [
        ["game", "match", "contest", "fixture"],
        ["team", "squad", "side", "club"],
        ["coach", "manager", "trainer", "mentor"],
        ["win", "victory", "triumph", "success"],
        ["season", "campaign", "term", "year"],
        ["championship", "title", "crown", "trophy"],
        ["player", "athlete", "sportsman", "competitor"],
        ["scored", "netted", "tallied", "notched"],
        ["goal", "score", "point", "basket"],
        ["league", "division", "conference", "circuit"],
        ["defeat", "loss", "beating", "setback"],
        ["stadium", "arena", "ground", "venue"],
        ["tournament", "cup", "event", "competition"],
        ["injury", "injured", "hurt", "wounded"],
        ["fans", "supporters", "spectators", "crowd"],
        ["olympic", "olympics", "games", "olympiad"],
        ["quarterback", "passer", "signalcaller", "qb"],
        ["rookie", "newcomer", "novice", "debutant"],
        ["playoff", "postseason", "knockout", "eliminator"],
        ["medal", "gold", "award", "prize"],
    ],
    "business": [
        ["company", "firm", "corporation", "business"],
        ["profit", "earnings", "income", "gain"],
        ["shares", "stocks", "equities", "securities"],
        ["market", "exchange", "bourse", "trading"],
        ["sales", "revenue", "turnover", "proceeds"],
        ["prices", "costs", "rates", "charges"],
        ["oil", "crude", "petroleum", "fuel"],
        ["investors", "shareholders", "stockholders", "backers"],
        ["deal", "merger", "takeover", "acquisition"],
        ["quarterly", "quarter", "threemonth", "periodic"],
        ["bank", "lender", "creditor", "financier"],
        ["economy", "economic", "growth", "output"],
        ["jobs", "employment", "hiring", "workforce"],
        ["billion", "billions", "bn", "milliard"],
        ["dollar", "currency", "greenback", "buck"],
        ["retailer", "store", "chain", "merchant"],
        ["executive", "ceo", "boss", "director"],
        ["debt", "liability", "borrowing", "loan"],
        ["fell", "dropped", "declined", "slipped"],
        ["rose", "climbed", "rallied", "advanced"],
    ],
    "scitech": [
        ["software", "program", "application", "app"],
        ["computer", "pc", "machine", "computing"],
        ["internet", "web", "online", "net"],
        ["scientists", "researchers", "experts", "investigators"],
        ["space", "orbit", "cosmos", "outerspace"],
        ["technology", "tech", "innovation", "engineering"],
        ["users", "customers", "subscribers", "consumers"],
        ["wireless", "mobile", "cellular", "cordless"],
        ["launch", "unveil", "release", "introduce"],
        ["study", "research", "experiment", "survey"],
        ["chip", "processor", "semiconductor", "microchip"],
        ["search", "lookup", "query", "browse"],
        ["virus", "worm", "malware", "trojan"],
        ["network", "grid", "system", "infrastructure"],
        ["planet", "world", "globe", "earth"],
        ["version", "edition", "update", "upgrade"],
        ["digital", "electronic", "virtual", "cyber"],
        ["data", "information", "records", "files"],
        ["device", "gadget", "handset", "instrument"],
        ["nasa", "spaceagency", "aerospace", "astronautics"],
    ],
}

SHARED_CLUSTERS = [
    ["said", "stated", "announced", "declared"],
    ["new", "fresh", "novel", "recent"],
    ["big", "large", "major", "huge"],
    ["small", "little", "minor", "modest"],
    ["plan", "proposal", "scheme", "strategy"],
    ["report", "statement", "account", "bulletin"],
    ["week", "weekend", "days", "fortnight"],
    ["today", "tuesday", "monday", "friday"],
    ["first", "initial", "opening", "earliest"],
    ["last", "final", "previous", "latest"],
    ["top", "leading", "best", "premier"],
    ["help", "aid", "assist", "support"],
    ["set", "ready", "poised", "prepared"],
    ["expected", "anticipated", "predicted", "projected"],
    ["make", "produce", "create", "build"],
    ["get", "obtain", "receive", "gain"],
    ["start", "begin", "commence", "open"],
    ["end", "finish", "close", "conclude"],
    ["high", "elevated", "lofty", "tall"],
    ["low", "reduced", "weak", "minimal"],
    ["key", "crucial", "vital", "central"],
    ["move", "step", "action", "measure"],
    ["people", "persons", "individuals", "citizens"],
    ["group", "body", "organization", "association"],
    ["early", "premature", "initial", "soon"],
    ["strong", "powerful", "robust", "solid"],
    ["make", "fashion", "form", "shape"],
    ["news", "tidings", "word", "headlines"],
    ["say", "tell", "claim", "assert"],
    ["show", "reveal", "display", "demonstrate"],
    ["look", "seek", "aim", "try"],
    ["change", "shift", "alteration", "revision"],
    ["fast", "quick", "rapid", "swift"],
    ["hard", "difficult", "tough", "tricky"],
    ["home", "house", "residence", "domestic"],
    ["long", "lengthy", "extended", "prolonged"],
]

FUNCTION_WORDS = [
    "the", "a", "an", "of", "in", "on", "to", "and", "for", "with", "at", "by",
    "from", "as", "its", "after", "over", "into", "has", "is", "was", "will",
    "that", "this", "it", "be", "are", "were", "up", "out", "than", "but",
]

# Headwords whose thesaurus entry includes a sense from another cluster. They
# are listed one-way; symmetric closure at load time completes them.
POLYSEMY_LINKS = [
    ("strike", "walkout"),
    ("field", "ground"),
    ("court", "tribunal"),
    ("court", "arena"),
    ("title", "headline"),
    ("record", "records"),
    ("power", "forces"),
    ("cup", "trophy"),
    ("net", "profit"),
    ("charges", "accusations"),
]

SURFACE_WEIGHTS = [0.72, 0.16, 0.08, 0.04]


def build_lexicon():
    entries = {}

    def link(a, b):
        if a == b:
            return
        entries.setdefault(a, [])
        if b not in entries[a]:
            entries[a].append(b)

    clusters = [c for cs in CLASS_CLUSTERS.values() for c in cs] + SHARED_CLUSTERS
    for cluster in clusters:
        for w in cluster:
            for s in cluster:
                link(w, s)
    for a, b in POLYSEMY_LINKS:
        link(a, b)
    return entries


def pick_surface(rng, cluster):
    return rng.choices(cluster, weights=SURFACE_WEIGHTS[: len(cluster)])[0]


def make_document(rng, label):
    own = CLASS_CLUSTERS[CLASS_NAMES[label]]
    others = [c for i, n in enumerate(CLASS_NAMES) if i != label for c in CLASS_CLUSTERS[n]]
    length = rng.randint(16, 34)
    tokens = []
    for _ in range(length):
        u = rng.random()
        if u < 0.26:
            tokens.append(pick_surface(rng, rng.choice(own)))
        elif u < 0.48:
            tokens.append(pick_surface(rng, rng.choice(SHARED_CLUSTERS)))
        elif u < 0.51:
            # Background topic overlap: a dominant word from another class.
            tokens.append(rng.choice(others)[0])
        elif u < 0.56:
            # Rare surface forms of other classes' words leak in as noise.
            cluster = rng.choice(others)
            tokens.append(rng.choice(cluster[1:]))
        else:
            tokens.append(rng.choice(FUNCTION_WORDS))
    if rng.random() < 0.5:
        tokens.append(".")
    text = " ".join(tokens)
    return text[0].upper() + text[1:]


def write_split(path, rng, per_class):
    rows = []
    for label in range(len(CLASS_NAMES)):
        for _ in range(per_class):
            rows.append((label, make_document(rng, label)))
    rng.shuffle(rows)
    with open(path, "w", encoding="utf-8") as f:
        f.write("label,text\n")
        for label, text in rows:
            f.write('%d,"%s"\n' % (label, text.replace('"', '""')))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("out_dir")
    parser.add_argument("--seed", type=int, default=20191010)
    parser.add_argument("--train-per-class", type=int, default=750)
    parser.add_argument("--test-per-class", type=int, default=150)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    os.makedirs(args.out_dir, exist_ok=True)

    entries = build_lexicon()
    with open(os.path.join(args.out_dir, "synonyms.tsv"), "w", encoding="utf-8") as f:
        f.write("# Bundled sample lexicon: word<TAB>comma-separated synonyms.\n")
        for word in sorted(entries):
            f.write("%s\t%s\n" % (word, ",".join(entries[word])))

    write_split(os.path.join(args.out_dir, "ag_sample_train.csv"), rng, args.train_per_class)
    write_split(os.path.join(args.out_dir, "ag_sample_test.csv"), rng, args.test_per_class)


if __name__ == "__main__":
    main()
