#!/usr/bin/env python3
"""Regenerates tests/data/pep440_corpus.json from the packaging library.

The corpus freezes the reference behavior for version parsing and ordering:
a list of version strings with their canonical forms (or an invalid flag)
and a list of ordered pairs with the reference comparison result. The file
is committed; rerun this script only to extend the corpus.
"""

import itertools
import json
import random
import sys
from pathlib import Path

from packaging.version import Version, InvalidVersion

HAND_PICKED = [
    # The equivalence this project's normalization is anchored on.
    "1.0", "1.0.0", "1", "1.0.0.0",
    # Canonical forms and spelling variants.
    "0", "00", "0.9", "1!1.0", "2!1.0.post1", "v1.0", " 1.0 ", "V1.2.3",
    "1.0a1", "1.0A1", "1.0alpha2", "1.0-beta.3", "1.0b0", "1.0c1", "1.0rc2",
    "1.0.pre5", "1.0preview7", "1.0.post1", "1.0-post2", "1.0post3", "1.0.r4",
    "1.0.rev5", "1.0-6", "1.0.post.", "1.0.post", "1.0.dev0", "1.0-dev",
    "1.0dev", "1.0.dev-5", "1.0.DEV8",
    "1.0b2.post345.dev456", "1.0b2-346", "1!1.0.post1.dev3",
    "v1!2.3rc4.post5.dev6+u-7",
    "1.0+abc", "1.0+abc.5", "1.0+5", "1.0+ubuntu-1", "1.0+UBUNTU.01",
    "1.0+a_b", "1.26.17", "2.0.6", "2.0.1", "1.25.9", "1.26.4", "2.2.2",
    "01.02.03", "1.2.3.4.5.6.7", "10.0", "1.10", "1.2", "3.10", "3.9",
    "2012.10", "2013.4",
    # Invalid shapes.
    "", "  ", "abc", "1..0", "1.", ".1", "1.0.*", "*", "1.0+", "1.0+_",
    "-1", "1.0foo", "1.0 2.0", "french toast", "1.0+a!b", "5+", "1.0._post1",
    "not-a-version", "1.0.post5+",
]


def random_versions(rng, count):
    out = []
    phases = ["a", "b", "rc", "alpha", "beta", "c", "pre", "preview"]
    for _ in range(count):
        parts = [str(rng.randint(0, 50)) for _ in range(rng.randint(1, 4))]
        text = ".".join(parts)
        if rng.random() < 0.2:
            text = f"{rng.randint(1, 3)}!{text}"
        roll = rng.random()
        if roll < 0.25:
            text += rng.choice(phases) + (str(rng.randint(0, 20)) if rng.random() < 0.8 else "")
        elif roll < 0.45:
            text += rng.choice([".post", "-", ".rev", ".r"])
            text += str(rng.randint(0, 20))
        elif roll < 0.6:
            text += ".dev" + (str(rng.randint(0, 20)) if rng.random() < 0.8 else "")
        if rng.random() < 0.2:
            segs = [rng.choice(["ubuntu", "local", "el9", str(rng.randint(0, 99))])
                    for _ in range(rng.randint(1, 2))]
            text += "+" + rng.choice([".", "-", "_"]).join(segs)
        if rng.random() < 0.1:
            text = "v" + text
        if rng.random() < 0.1:
            text = text.upper()
        out.append(text)
    return out


def main():
    rng = random.Random(20250810)
    strings = HAND_PICKED + random_versions(rng, 320)

    versions = []
    parseable = []
    for text in strings:
        try:
            v = Version(text)
            versions.append({"input": text, "canonical": str(v)})
            parseable.append((text, v))
        except InvalidVersion:
            versions.append({"input": text, "invalid": True})

    pairs = []
    # The anchor case plus deterministic pseudo-random pairs.
    anchors = [("1.0", "1.0.0"), ("1.0", "1"), ("1.26.17", "2.0.6"),
               ("1.0.dev1", "1.0a1"), ("1.0a1", "1.0rc1"), ("1.0rc1", "1.0"),
               ("1.0", "1.0.post1"), ("1.0.post1", "1.1"), ("1.0", "1.0+local"),
               ("1.0+abc", "1.0+5"), ("1.2", "1.10"), ("1!0.5", "2.0")]
    seen = set()
    for a, b in anchors:
        va, vb = Version(a), Version(b)
        cmp = -1 if va < vb else (1 if va > vb else 0)
        pairs.append({"a": a, "b": b, "cmp": cmp})
        seen.add((a, b))
    while len(pairs) < 260:
        (ta, va), (tb, vb) = rng.sample(parseable, 2)
        if (ta, tb) in seen:
            continue
        seen.add((ta, tb))
        cmp = -1 if va < vb else (1 if va > vb else 0)
        pairs.append({"a": ta, "b": tb, "cmp": cmp})

    corpus = {
        "source": "packaging reference implementation",
        "versions": versions,
        "pairs": pairs,
    }
    out = Path(__file__).resolve().parent.parent / "tests" / "data" / "pep440_corpus.json"
    out.write_text(json.dumps(corpus, indent=1) + "\n")
    valid = sum(1 for v in versions if "canonical" in v)
    print(f"wrote {out}: {len(versions)} strings ({valid} valid), {len(pairs)} pairs",
          file=sys.stderr)


if __name__ == "__main__":
    main()
