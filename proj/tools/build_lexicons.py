#!/usr/bin/env python3
"""Derive the bundled lexicon files from a WordNet 3.0 database directory.

Usage: build_lexicons.py <wordnet-dict-dir> <out-dir>

Writes:
  synonyms.tsv          word<TAB>pos<TAB>cand1,cand2,...
  pos_lexicon.tsv       word<TAB>Tag1,Tag2,...   (open-class tags, most frequent first)
  verb_exceptions.tsv   inflected<TAB>base
  noun_exceptions.tsv   inflected<TAB>base

The hand-written closed-class list (closed_class.tsv) is kept separately and
is not touched by this script.
"""
import os
import re
import sys

POS_FILES = {"n": "noun", "v": "verb", "a": "adj", "r": "adv"}
TAG_NAMES = {"n": "Noun", "v": "Verb", "a": "Adjective", "r": "Adverb"}
MAX_CANDIDATES = 16
WORD_RE = re.compile(r"^[a-z]+$")


def read_index(path):
    entries = {}
    with open(path, encoding="latin-1") as f:
        for line in f:
            if line.startswith(" "):
                continue
            parts = line.split()
            lemma = parts[0]
            synset_cnt = int(parts[2])
            p_cnt = int(parts[3])
            tagsense_cnt = int(parts[5 + p_cnt])
            offsets = parts[6 + p_cnt:6 + p_cnt + synset_cnt]
            entries[lemma] = (tagsense_cnt, synset_cnt, offsets)
    return entries


def read_data(path):
    synsets = {}
    with open(path, encoding="latin-1") as f:
        for line in f:
            if line.startswith(" "):
                continue
            parts = line.split()
            offset = parts[0]
            w_cnt = int(parts[3], 16)
            words = []
            for i in range(w_cnt):
                w = parts[4 + 2 * i].lower()
                w = re.sub(r"\([a-z]+\)$", "", w)
                words.append(w)
            synsets[offset] = words
    return synsets


def read_sense_counts(path):
    """Summed SemCor tag counts per (lemma, pos code) from index.sense."""
    kind = {"1": "n", "2": "v", "3": "a", "4": "r", "5": "a"}
    counts = {}
    with open(path, encoding="latin-1") as f:
        for line in f:
            key, _, _, cnt = line.split()
            lemma, rest = key.split("%")
            k = (lemma, kind[rest[0]])
            counts[k] = counts.get(k, 0) + int(cnt)
    return counts


def main():
    src, out = sys.argv[1], sys.argv[2]
    os.makedirs(out, exist_ok=True)
    index = {}
    data = {}
    for code, name in POS_FILES.items():
        index[code] = read_index(os.path.join(src, "index." + name))
        data[code] = read_data(os.path.join(src, "data." + name))

    with open(os.path.join(out, "synonyms.tsv"), "w") as f:
        for code in "nvar":
            for lemma in sorted(index[code]):
                if not WORD_RE.match(lemma):
                    continue
                tagsense_cnt, _, offsets = index[code][lemma]
                if tagsense_cnt == 0:
                    continue
                seen = []
                for off in offsets:
                    for w in data[code].get(off, []):
                        if w != lemma and WORD_RE.match(w) and w not in seen:
                            seen.append(w)
                if seen:
                    f.write("%s\t%s\t%s\n" % (lemma, TAG_NAMES[code],
                                              ",".join(seen[:MAX_CANDIDATES])))

    sense_counts = read_sense_counts(os.path.join(src, "index.sense"))
    words = set()
    for code in "nvar":
        words.update(w for w in index[code] if WORD_RE.match(w))
    with open(os.path.join(out, "pos_lexicon.tsv"), "w") as f:
        for w in sorted(words):
            ranked = []
            for order, code in enumerate("nvar"):
                if w in index[code]:
                    tagsense_cnt, synset_cnt, _ = index[code][w]
                    freq = sense_counts.get((w, code), 0)
                    ranked.append((-freq, order, -tagsense_cnt, -synset_cnt, code))
            ranked.sort()
            f.write("%s\t%s\n" % (w, ",".join(TAG_NAMES[r[-1]] for r in ranked)))

    for name in ("verb", "noun"):
        with open(os.path.join(src, name + ".exc"), encoding="latin-1") as fin, \
                open(os.path.join(out, name + "_exceptions.tsv"), "w") as fout:
            for line in fin:
                parts = line.split()
                if len(parts) >= 2 and WORD_RE.match(parts[0]) and WORD_RE.match(parts[1]):
                    fout.write("%s\t%s\n" % (parts[0], parts[1]))


if __name__ == "__main__":
    main()
