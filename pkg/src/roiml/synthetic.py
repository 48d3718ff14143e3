"""Synthetic pair corpora with known structure.

Two generators: a marker-word corpus whose positives are detectable
only through a limited marker vocabulary (so small training fractions
miss rare markers and recover as coverage grows), and a trivially
separable two-cluster corpus for smoke tests and permutation baselines.
Both are deterministic in their seed and emit standard PairCorpus
objects, so they plug into the same split/schedule/curve machinery as
mined tracker data.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .corpus import (
    DependencyKind,
    DependencyLabel,
    PAIR_TEXT_SEPARATOR,
    PairCorpus,
    RequirementPair,
    write_corpus_csv,
)
from .errors import ParameterError

DEFAULT_MARKERS = 30
DEFAULT_FILLERS = 40


def _word(prefix: str, i: int) -> str:
    letters = ""
    i += 1
    while i > 0:
        i, r = divmod(i - 1, 26)
        letters = chr(97 + r) + letters
    return prefix + letters


def _side(rng: np.random.Generator, fillers: list[str], marker: str) -> str:
    words = [fillers[int(k)] for k in rng.integers(0, len(fillers), size=3)]
    words.insert(int(rng.integers(0, len(words) + 1)), marker)
    return " ".join(words)


def make_synthetic_corpus(
    n_pairs: int = 2000,
    seed: int = 0,
    markers: int = DEFAULT_MARKERS,
    fillers: int = DEFAULT_FILLERS,
) -> PairCorpus:
    """Balanced marker-word corpus of n_pairs labeled pairs.

    Each side carries one marker word among common fillers; positives
    and negatives draw their markers from disjoint vocabularies of the
    given size, so the two classes have identical shape and a learner
    can only recognize pairs whose markers it met (at least twice) in
    training. Small training fractions therefore miss rare markers and
    the curve recovers as coverage grows.
    """
    if n_pairs < 2 or n_pairs % 2:
        raise ParameterError(f"n_pairs must be a positive even number, got {n_pairs}")
    if markers < 1 or fillers < 1:
        raise ParameterError("markers and fillers must both be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    dep_words = [_word("dep", i) for i in range(markers)]
    ind_words = [_word("iso", i) for i in range(markers)]
    filler_words = [_word("gen", i) for i in range(fillers)]

    half = n_pairs // 2
    pairs: list[RequirementPair] = []
    for i in range(n_pairs):
        dependent = i < half
        vocab = dep_words if dependent else ind_words
        m_left = vocab[int(rng.integers(0, markers))]
        m_right = vocab[int(rng.integers(0, markers))]
        text = (
            f"{_side(rng, filler_words, m_left)} {PAIR_TEXT_SEPARATOR} "
            f"{_side(rng, filler_words, m_right)}"
        )
        label = (
            DependencyLabel.dependent(DependencyKind.REQUIRES)
            if dependent
            else DependencyLabel.independent()
        )
        pairs.append(RequirementPair(f"s{i:05d}a", f"s{i:05d}b", label, text))
    return PairCorpus(pairs)


def make_separable_corpus(n_pairs: int = 200, seed: int = 0) -> PairCorpus:
    """Two disjoint word clusters; any reasonable learner separates them."""
    if n_pairs < 2 or n_pairs % 2:
        raise ParameterError(f"n_pairs must be a positive even number, got {n_pairs}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    pos_words = [_word("dep", i) for i in range(20)]
    neg_words = [_word("gen", i) for i in range(20)]

    def side(vocab: list[str]) -> str:
        return " ".join(vocab[int(k)] for k in rng.integers(0, len(vocab), size=4))

    pairs: list[RequirementPair] = []
    half = n_pairs // 2
    for i in range(half):
        text = f"{side(pos_words)} {PAIR_TEXT_SEPARATOR} {side(pos_words)}"
        pairs.append(
            RequirementPair(
                f"s{i:05d}a",
                f"s{i:05d}b",
                DependencyLabel.dependent(DependencyKind.REQUIRES),
                text,
            )
        )
    for i in range(half, n_pairs):
        text = f"{side(neg_words)} {PAIR_TEXT_SEPARATOR} {side(neg_words)}"
        pairs.append(
            RequirementPair(
                f"s{i:05d}a",
                f"s{i:05d}b",
                DependencyLabel.independent(),
                text,
            )
        )
    return PairCorpus(pairs)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="python -m roiml.synthetic",
        description="Write a synthetic labeled pair corpus as CSV.",
    )
    parser.add_argument("--pairs", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--separable", action="store_true",
                        help="use the trivially separable generator")
    parser.add_argument("--out", required=True, help="output corpus CSV path")
    args = parser.parse_args(argv)
    if args.separable:
        corpus = make_separable_corpus(args.pairs, args.seed)
    else:
        corpus = make_synthetic_corpus(args.pairs, args.seed)
    with open(args.out, "wb") as fh:
        fh.write(write_corpus_csv(corpus))
    print(f"wrote {args.out} ({len(corpus)} pairs)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
