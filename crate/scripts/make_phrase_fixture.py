#!/usr/bin/env python3
"""Generate the 100-entry phrase-table fixture and its expected filter output.

Every English phrase below carries a hand-assigned NP label, worked out from
the toy grammar's noun-phrase shapes:

    NP  := Det CN | CN | PN | Pron | "X"
    CN  := N | AP CN | N CN | CN "of" NP
    AP  := A | "very" AP

The expected filter output is computed from those labels alone, so the
fixture checks the Rust filter against an independent reading of the
grammar rather than against itself.

Usage: python3 scripts/make_phrase_fixture.py [out_dir]
"""

import random
import sys
from pathlib import Path

NP_PHRASES = [
    "the apple juice", "apple juice", "a car key", "the car key", "water",
    "the red car", "John", "a glass of water", "the old house", "this book",
    "the train station", "a cup of coffee", "the very big dog", "she",
    "the city map", "a red apple", "the house door", "beer", "the ticket",
    "a small room", "the birth day", "work", "the cold tea", "Mary",
    "a bottle of beer", "the little cat", "the door key", "coffee",
]

NOT_NP_PHRASES = [
    "is warm", "see the dog", "very", "of the", "the the", "the kitchen door",
    "apple red", "the", "go", "is the car", "red", "juice apple the",
    "John sleep", "the dog is big", "of water", "a", "can come",
    "the banana", "where is", "in the house",
]

ONE_WORD = [
    "Apfelsaft", "Autoschlüssel", "Wasser", "Haus", "Bahnhof", "Stadtplan",
    "Kaffeetasse", "Bierflasche", "Geburtstag", "Fahrkarte", "Haustür",
    "Zimmer", "Hund", "Katze", "Buch",
]

TWO_WORD = ["der Apfelsaft", "das Auto", "ein Glas", "die Tür", "Tasse Kaffee"]

PROBS = [0.0, 0.05, 0.1, 0.1, 0.2, 0.3, 0.5, 0.5, 0.7, 0.9, 1.0]
LABELS = ["NP", "NP", "NP-SBJ", "VP", "PP", "-"]
THRESHOLDS = [0.0, 0.1, 0.5, 1.0]


def main() -> None:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("data")
    rng = random.Random(20140601)
    rows = []
    for _ in range(100):
        np_side = rng.random() < 0.6
        src = rng.choice(NP_PHRASES if np_side else NOT_NP_PHRASES)
        single = rng.random() < 0.75
        tgt = rng.choice(ONE_WORD if single else TWO_WORD)
        p = rng.choice(PROBS)
        label = rng.choice(LABELS)
        rows.append((src, tgt, p, label, np_side, single))

    table = ["\t".join([s, t, repr(p), l]) for s, t, p, l, _, _ in rows]
    (out / "phrases_100.tsv").write_text("\n".join(table) + "\n", encoding="utf-8")

    lines = ["# threshold<TAB>require_constituent<TAB>kept line numbers (1-based)"]
    for require in (False, True):
        for th in THRESHOLDS:
            kept = [
                str(i + 1)
                for i, (_, _, p, label, np_side, single) in enumerate(rows)
                if p > th
                and np_side
                and single
                and (not require or label == "NP" or label.startswith("NP-"))
            ]
            lines.append(f"{th}\t{str(require).lower()}\t{','.join(kept)}")
    (out / "phrases_100.expected.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
