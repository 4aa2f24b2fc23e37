"""Builds data/german_nouns.tsv.

Nouns come from the Wiktionary-derived `german-nouns` package (CC-BY-SA 4.0),
ranked by `wordfreq` Zipf frequency. Requires: pip install german-nouns wordfreq
"""
import csv
import re
import sys
from importlib import resources

import wordfreq

SIZE = 2000
WORD = re.compile(r"^[A-ZÄÖÜ][a-zäöüß]{2,13}$")
# Lemmas the fixtures rely on; always included.
REQUIRED = [
    "Leben", "Mittel", "Wagen", "Apfel", "Saft", "Bahn", "Hof", "Haus", "Tür",
    "Auto", "Schlüssel", "Wasser", "Flasche", "Bier", "Glas", "Kaffee", "Tasse",
    "Geburt", "Tag", "Arbeit", "Hund", "Hütte", "Stadt", "Plan", "Zug",
    "Karte", "Frau", "Kind", "Garten", "Zimmer", "Schule", "Buch",
]
# Adjective stem used with the -en- linker ("Krankenwagen"); not a noun.
STEMS = ["Krank"]


def main(out_path):
    path = resources.files("german_nouns") / "nouns.csv"
    seen = set()
    ranked = []
    with path.open(encoding="utf-8") as f:
        for row in csv.DictReader(f):
            lemma = row["lemma"]
            if row["pos"] != "Substantiv" or not WORD.match(lemma) or lemma in seen:
                continue
            seen.add(lemma)
            ranked.append((-wordfreq.zipf_frequency(lemma, "de"), lemma))
    ranked.sort()
    chosen = {lemma for _, lemma in ranked[:SIZE]}
    chosen.update(REQUIRED)
    with open(out_path, "w", encoding="utf-8") as out:
        out.write("# German noun lemmas (Wiktionary via the german-nouns package, CC-BY-SA 4.0)\n")
        out.write("# generated by scripts/build_lexicon.py; columns: lemma<TAB>category\n")
        for lemma in sorted(chosen):
            out.write(f"{lemma}\tN\n")
        out.write("# adjective stems that occur as compound modifiers\n")
        for stem in STEMS:
            out.write(f"{stem}\tN\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/german_nouns.tsv")
