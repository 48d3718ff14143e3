"""Build labeled sentence-pair corpora from issue-tracker exports.

The pipeline: parse a tracker CSV export into requirement records, clean
the text, turn explicit links into positive (dependent) pairs, sample
unlinked pairs as negatives, balance the two classes, then produce a
seeded train/test split and nested training subsets for learning curves.
"""

from __future__ import annotations

import csv
import io
import itertools
import logging
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    CapacityError,
    CorpusError,
    ImbalanceError,
    ParameterError,
    ParseError,
    RangeError,
    SchemaError,
    SizeError,
)

logger = logging.getLogger(__name__)

# Joins the two sides of a pair into one classifier input. Contains
# characters clean_text can never emit, so the sides stay recoverable.
PAIR_TEXT_SEPARATOR = "[SEP]"

LINK_KINDS = ("depends_on", "blocks", "relates_to", "other")

DEFAULT_MIN_WORDS = 3
DEFAULT_TEST_FRACTION = 0.2
DEFAULT_FRACTIONS = (
    0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40,
    0.45, 0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80,
)

_CLEANED_RE = re.compile(r"^$|^[a-z]+( [a-z]+)*$")
_NON_LETTER_RE = re.compile(r"[^a-z]+")


def round_half_up(x: float) -> int:
    """Round to the nearest integer, halves away from zero-point-five up."""
    return int(math.floor(x + 0.5))


class DependencyKind(str, Enum):
    """Why a pair counts as dependent, or NONE for sampled negatives."""

    REQUIRES = "REQUIRES"
    RELATES_TO = "RELATES_TO"
    NONE = "NONE"


@dataclass(frozen=True)
class DependencyLabel:
    """Binary pair label plus the dependency kind that justified it."""

    value: int  # 1 = dependent, 0 = independent
    kind: DependencyKind

    def __post_init__(self) -> None:
        if self.value not in (0, 1):
            raise ParameterError(f"label value must be 0 or 1, got {self.value!r}")
        if (self.value == 1) != (self.kind is not DependencyKind.NONE):
            raise CorpusError(
                f"label value {self.value} is inconsistent with kind {self.kind.value}"
            )

    @classmethod
    def dependent(cls, kind: DependencyKind) -> "DependencyLabel":
        return cls(1, kind)

    @classmethod
    def independent(cls) -> "DependencyLabel":
        return cls(0, DependencyKind.NONE)


@dataclass(frozen=True)
class RequirementRecord:
    """One tracker issue: id, cleaned text, outgoing typed links."""

    id: str
    text: str
    links: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        if not self.id:
            raise CorpusError("requirement id must be nonempty")
        if not _CLEANED_RE.match(self.text):
            raise CorpusError(
                f"record {self.id!r}: text is not in cleaned form (lowercase "
                "letters and single spaces)"
            )
        for kind, target in self.links:
            if kind not in LINK_KINDS:
                raise CorpusError(f"record {self.id!r}: unknown link kind {kind!r}")
            if not target:
                raise CorpusError(f"record {self.id!r}: empty link target")


class RequirementSet:
    """Ordered collection of records with unique ids."""

    def __init__(self, records: Iterable[RequirementRecord], source_label: str = ""):
        self.records: tuple[RequirementRecord, ...] = tuple(records)
        self.source_label = source_label
        self._by_id: dict[str, RequirementRecord] = {}
        for rec in self.records:
            if rec.id in self._by_id:
                raise CorpusError(f"duplicate requirement id {rec.id!r}")
            self._by_id[rec.id] = rec

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[RequirementRecord]:
        return iter(self.records)

    def __contains__(self, rid: str) -> bool:
        return rid in self._by_id

    def get(self, rid: str) -> RequirementRecord:
        return self._by_id[rid]

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(rec.id for rec in self.records)


@dataclass(frozen=True)
class RequirementPair:
    """A pair of requirement texts with its dependency label."""

    left_id: str
    right_id: str
    label: DependencyLabel
    combined_text: str

    def __post_init__(self) -> None:
        if self.left_id == self.right_id:
            raise CorpusError(f"pair of {self.left_id!r} with itself")
        if self.label.kind is DependencyKind.RELATES_TO and not (
            self.left_id < self.right_id
        ):
            raise CorpusError(
                f"symmetric pair ({self.left_id!r}, {self.right_id!r}) is not "
                "in canonical (smaller id first) order"
            )


def make_pair(
    left: RequirementRecord, right: RequirementRecord, label: DependencyLabel
) -> RequirementPair:
    text = f"{left.text} {PAIR_TEXT_SEPARATOR} {right.text}"
    return RequirementPair(left.id, right.id, label, text)


class PairCorpus:
    """A balanced labeled pair corpus: equal dependent and independent counts."""

    def __init__(self, pairs: Iterable[RequirementPair]):
        self.pairs: tuple[RequirementPair, ...] = tuple(pairs)
        pos = sum(1 for p in self.pairs if p.label.value == 1)
        neg = len(self.pairs) - pos
        if pos != neg:
            raise ImbalanceError(
                f"corpus must be balanced, got {pos} dependent vs {neg} independent"
            )
        self.positives_count = pos
        self.negatives_count = neg

    def __len__(self) -> int:
        return len(self.pairs)

    def labels(self) -> np.ndarray:
        return np.array([p.label.value for p in self.pairs], dtype=np.int64)

    def texts(self) -> list[str]:
        return [p.combined_text for p in self.pairs]

    def class_indices(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Indices of dependent pairs and independent pairs, in corpus order."""
        pos = tuple(i for i, p in enumerate(self.pairs) if p.label.value == 1)
        neg = tuple(i for i, p in enumerate(self.pairs) if p.label.value == 0)
        return pos, neg


@dataclass(frozen=True)
class SplitPlan:
    """Deterministic train-pool/test partition of a corpus by pair index.

    The train pool is stored per class so nested training subsets can be
    drawn stratified without re-reading the corpus.
    """

    train_pool_positives: tuple[int, ...]
    train_pool_negatives: tuple[int, ...]
    test_set: tuple[int, ...]
    seed: int
    test_fraction: float

    @property
    def train_pool(self) -> tuple[int, ...]:
        return tuple(sorted(self.train_pool_positives + self.train_pool_negatives))

    @property
    def corpus_size(self) -> int:
        return (
            len(self.train_pool_positives)
            + len(self.train_pool_negatives)
            + len(self.test_set)
        )

    def __post_init__(self) -> None:
        pool = set(self.train_pool_positives) | set(self.train_pool_negatives)
        test = set(self.test_set)
        if len(self.train_pool_positives) + len(self.train_pool_negatives) != len(pool):
            raise CorpusError("split plan: train pool contains duplicate indices")
        if len(test) != len(self.test_set):
            raise CorpusError("split plan: test set contains duplicate indices")
        if pool & test:
            raise CorpusError("split plan: train pool and test set overlap")


@dataclass(frozen=True)
class ParseStats:
    """Bookkeeping from one export parse."""

    rows: int
    skipped_empty_description: int


def clean_text(raw: str) -> str:
    """Normalize free text: lowercase, letters only, single spaces.

    Idempotent; anything that is not an ASCII letter becomes a space and
    runs of spaces collapse.
    """
    return _NON_LETTER_RE.sub(" ", raw.lower()).strip()


def _as_text_stream(raw_csv: bytes | str | IO) -> IO[str]:
    if isinstance(raw_csv, bytes):
        return io.StringIO(raw_csv.decode("utf-8"))
    if isinstance(raw_csv, str):
        return io.StringIO(raw_csv)
    data = raw_csv.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return io.StringIO(data)


# schema keys -> link kind stored on the record
_LINK_SCHEMA_KEYS = (
    ("depends_on", "depends_on"),
    ("blocks", "blocks"),
    ("relates", "relates_to"),
    ("other", "other"),
)

_LINK_SPLIT_RE = re.compile(r"[,;]")


def parse_issue_export_with_stats(
    raw_csv: bytes | str | IO,
    schema: Mapping[str, str],
    source_label: str = "",
) -> tuple[RequirementSet, ParseStats]:
    """parse_issue_export, plus row counts for manifests and logs."""
    for required in ("id", "description"):
        if required not in schema:
            raise SchemaError(f"schema is missing the {required!r} column mapping")

    reader = csv.reader(_as_text_stream(raw_csv), strict=True)
    try:
        header = next(reader, None)
    except csv.Error as exc:
        raise ParseError(f"malformed CSV at line {reader.line_num}: {exc}") from exc
    if header is None:
        raise SchemaError("export has no header row")

    col_index: dict[str, int] = {}
    for key, column in schema.items():
        if column not in header:
            raise SchemaError(
                f"mapped column {column!r} (for {key!r}) not found in header"
            )
        col_index[key] = header.index(column)

    records: list[RequirementRecord] = []
    seen: set[str] = set()
    rows = 0
    skipped = 0
    try:
        for row in reader:
            rows += 1
            if len(row) != len(header):
                raise ParseError(
                    f"line {reader.line_num}: expected {len(header)} fields, "
                    f"got {len(row)}"
                )
            rid = row[col_index["id"]].strip()
            if not rid:
                raise CorpusError(f"line {reader.line_num}: empty requirement id")
            if rid in seen:
                raise CorpusError(f"duplicate requirement id {rid!r}")
            seen.add(rid)
            description = row[col_index["description"]]
            text = clean_text(description)
            if not text:
                skipped += 1
                continue
            links: list[tuple[str, str]] = []
            for key, kind in _LINK_SCHEMA_KEYS:
                if key not in col_index:
                    continue
                cell = row[col_index[key]]
                for target in _LINK_SPLIT_RE.split(cell):
                    target = target.strip()
                    if target:
                        links.append((kind, target))
            records.append(RequirementRecord(rid, text, tuple(links)))
    except csv.Error as exc:
        raise ParseError(f"malformed CSV at line {reader.line_num}: {exc}") from exc

    if skipped:
        logger.warning(
            "%s: skipped %d of %d rows with empty descriptions",
            source_label or "export",
            skipped,
            rows,
        )
    return RequirementSet(records, source_label), ParseStats(rows, skipped)


def parse_issue_export(
    raw_csv: bytes | str | IO,
    schema: Mapping[str, str],
    source_label: str = "",
) -> RequirementSet:
    """Parse a tracker CSV export into cleaned requirement records.

    `schema` maps logical keys to column names: 'id' and 'description'
    are required; 'depends_on', 'blocks', 'relates' and 'other' are
    optional link columns whose cells hold comma or semicolon separated
    target ids.
    """
    rset, _ = parse_issue_export_with_stats(raw_csv, schema, source_label)
    return rset


def filter_short(rset: RequirementSet, min_words: int = DEFAULT_MIN_WORDS) -> RequirementSet:
    """Drop records whose cleaned text has fewer than min_words words."""
    if min_words < 0:
        raise ParameterError(f"min_words must be >= 0, got {min_words}")
    kept = [rec for rec in rset if len(rec.text.split()) >= min_words]
    removed = len(rset) - len(kept)
    if removed:
        logger.info(
            "%s: removed %d records shorter than %d words",
            rset.source_label or "corpus",
            removed,
            min_words,
        )
    return RequirementSet(kept, rset.source_label)


def extract_positive_pairs(
    rset: RequirementSet, kind: DependencyKind
) -> list[RequirementPair]:
    """Turn explicit links into labeled dependent pairs.

    REQUIRES pairs come from depends_on links, ordered (dependent,
    prerequisite). RELATES_TO pairs come from relates_to links,
    canonicalized smaller-id-first and deduplicated. Links to ids not in
    the set, and self links, are dropped.
    """
    if kind is DependencyKind.NONE:
        raise ParameterError("positive pairs need a dependency kind, not NONE")
    pairs: list[RequirementPair] = []
    seen: set[tuple[str, str]] = set()
    dangling = 0
    selfref = 0
    link_kind = "depends_on" if kind is DependencyKind.REQUIRES else "relates_to"
    for rec in rset:
        for lk, target in rec.links:
            if lk != link_kind:
                continue
            if target == rec.id:
                selfref += 1
                continue
            if target not in rset:
                dangling += 1
                continue
            other = rset.get(target)
            if kind is DependencyKind.REQUIRES:
                key = (rec.id, target)
                left, right = rec, other
            else:
                if rec.id < target:
                    left, right = rec, other
                else:
                    left, right = other, rec
                key = (left.id, right.id)
            if key in seen:
                continue
            seen.add(key)
            pairs.append(make_pair(left, right, DependencyLabel.dependent(kind)))
    if dangling or selfref:
        logger.info(
            "%s: dropped %d dangling and %d self links while extracting %s pairs",
            rset.source_label or "corpus",
            dangling,
            selfref,
            kind.value,
        )
    return pairs


def _linked_index_pairs(
    rset: RequirementSet,
    positives: Sequence[RequirementPair],
    index_of: Mapping[str, int],
) -> set[tuple[int, int]]:
    """Unordered index pairs that must never appear as negatives."""
    excluded: set[tuple[int, int]] = set()

    def add(a: str, b: str) -> None:
        ia = index_of.get(a)
        ib = index_of.get(b)
        if ia is None or ib is None or ia == ib:
            return
        excluded.add((ia, ib) if ia < ib else (ib, ia))

    for rec in rset:
        for _, target in rec.links:
            add(rec.id, target)
    for pair in positives:
        add(pair.left_id, pair.right_id)
    return excluded


def generate_negative_pairs(
    rset: RequirementSet,
    positives: Sequence[RequirementPair],
    count: int,
    seed: int,
) -> list[RequirementPair]:
    """Sample `count` unlinked requirement pairs uniformly, without replacement.

    A pair is eligible when no link of any kind connects its two ids in
    either direction and it is not already a positive. Raises
    CapacityError (reporting the eligible pool size) when count exceeds
    the pool.
    """
    if count < 0:
        raise ParameterError(f"count must be >= 0, got {count}")
    ids = rset.ids
    n = len(ids)
    index_of = {rid: i for i, rid in enumerate(ids)}
    excluded = _linked_index_pairs(rset, positives, index_of)
    total = n * (n - 1) // 2
    pool = total - len(excluded)
    if count > pool:
        raise CapacityError(
            f"requested {count} negative pairs but only {pool} unlinked "
            f"pairs exist among {n} requirements"
        )

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    chosen: list[tuple[int, int]]
    if total <= 2_000_000:
        eligible = [
            (i, j)
            for i, j in itertools.combinations(range(n), 2)
            if (i, j) not in excluded
        ]
        picks = rng.choice(len(eligible), size=count, replace=False)
        chosen = [eligible[k] for k in picks]
    else:
        # Population too large to enumerate: rejection-sample canonical pairs.
        taken: set[tuple[int, int]] = set()
        chosen = []
        while len(chosen) < count:
            i, j = rng.integers(0, n, size=2)
            if i == j:
                continue
            key = (int(i), int(j)) if i < j else (int(j), int(i))
            if key in excluded or key in taken:
                continue
            taken.add(key)
            chosen.append(key)

    label = DependencyLabel.independent()
    out: list[RequirementPair] = []
    for i, j in chosen:
        out.append(make_pair(rset.get(ids[i]), rset.get(ids[j]), label))
    return out


def build_corpus(
    positives: Sequence[RequirementPair],
    negatives: Sequence[RequirementPair],
    seed: int = 0,
) -> PairCorpus:
    """Assemble a balanced corpus: all positives plus as many negatives.

    Surplus negatives are discarded in seeded-shuffle order; too few
    negatives is an ImbalanceError.
    """
    if not positives or not negatives:
        raise CorpusError("both positive and negative pair lists must be nonempty")
    p = len(positives)
    if len(negatives) < p:
        raise ImbalanceError(
            f"need at least {p} negatives to balance {p} positives, "
            f"got {len(negatives)}"
        )
    if len(negatives) > p:
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        order = rng.permutation(len(negatives))[:p]
        selected = [negatives[int(k)] for k in order]
    else:
        selected = list(negatives)
    return PairCorpus(tuple(positives) + tuple(selected))


def split(corpus: PairCorpus, seed: int, test_fraction: float = DEFAULT_TEST_FRACTION) -> SplitPlan:
    """Stratified train-pool/test partition, deterministic in the seed.

    The test set holds round-half-up(N * test_fraction) pairs, as close
    to class-balanced as parity allows (counts differ by at most 1).
    """
    if not (0.0 < test_fraction < 1.0):
        raise ParameterError(
            f"test_fraction must be strictly between 0 and 1, got {test_fraction}"
        )
    pos_idx, neg_idx = corpus.class_indices()
    if len(pos_idx) < 2 or len(neg_idx) < 2:
        raise SizeError(
            "each class needs at least 2 pairs to split, got "
            f"{len(pos_idx)} dependent and {len(neg_idx)} independent"
        )
    n = len(corpus)
    n_test = round_half_up(n * test_fraction)
    test_pos = round_half_up(n_test / 2)
    test_neg = n_test - test_pos
    for label, want, have in (
        ("dependent", test_pos, len(pos_idx)),
        ("independent", test_neg, len(neg_idx)),
    ):
        if want < 1 or have - want < 1:
            raise SizeError(
                f"test_fraction {test_fraction} leaves no usable {label} "
                f"pairs on one side of the split ({want} of {have})"
            )

    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0,)))
    pos_order = rng.permutation(len(pos_idx))
    neg_order = rng.permutation(len(neg_idx))
    pos_test = {pos_idx[int(k)] for k in pos_order[:test_pos]}
    neg_test = {neg_idx[int(k)] for k in neg_order[:test_neg]}
    test = tuple(sorted(pos_test | neg_test))
    pool_pos = tuple(sorted(set(pos_idx) - pos_test))
    pool_neg = tuple(sorted(set(neg_idx) - neg_test))
    return SplitPlan(pool_pos, pool_neg, test, seed, test_fraction)


def fraction_schedule(
    plan: SplitPlan, fractions: Sequence[float] = DEFAULT_FRACTIONS
) -> list[list[int]]:
    """Nested, stratified training subsets for a list of corpus fractions.

    Each fraction f yields round-half-up(N * f) training indices where N
    is the whole corpus size; subsets are prefixes of one seeded per-class
    shuffle, so every subset contains the previous one.
    """
    if not fractions:
        raise RangeError("fraction list must be nonempty")
    fs = [float(f) for f in fractions]
    limit = 1.0 - plan.test_fraction + 1e-9
    for a, b in zip(fs, fs[1:]):
        if not a < b:
            raise RangeError(f"fractions must be strictly increasing, got {a} before {b}")
    for f in fs:
        if not (0.0 < f <= limit):
            raise RangeError(
                f"fraction {f:g} is outside (0, 1 - test_fraction = "
                f"{1.0 - plan.test_fraction:g}]"
            )

    n = plan.corpus_size
    rng = np.random.default_rng(np.random.SeedSequence(plan.seed, spawn_key=(1,)))
    pos_pool = list(plan.train_pool_positives)
    neg_pool = list(plan.train_pool_negatives)
    pos_order = [pos_pool[int(k)] for k in rng.permutation(len(pos_pool))]
    neg_order = [neg_pool[int(k)] for k in rng.permutation(len(neg_pool))]

    subsets: list[list[int]] = []
    for f in fs:
        size = round_half_up(n * f)
        if size < 1:
            raise RangeError(f"fraction {f:g} yields an empty training subset")
        take_pos = round_half_up(size / 2)
        take_neg = size - take_pos
        if take_pos > len(pos_order) or take_neg > len(neg_order):
            raise RangeError(
                f"fraction {f:g} needs {take_pos} dependent and {take_neg} "
                f"independent training pairs but the pool has "
                f"{len(pos_order)} and {len(neg_order)}"
            )
        subsets.append(sorted(pos_order[:take_pos] + neg_order[:take_neg]))
    return subsets


# --- pair CSV serialization ------------------------------------------------
#
# Schema: pair_id,left_id,right_id,label,kind,combined_text
# label is 0 or 1; kind is the DependencyKind name. UTF-8, LF line ends.

PAIR_CSV_HEADER = ("pair_id", "left_id", "right_id", "label", "kind", "combined_text")


def default_pair_ids(count: int) -> list[str]:
    return [f"p{i:05d}" for i in range(count)]


def write_pairs_csv(
    pairs: Sequence[RequirementPair], pair_ids: Sequence[str] | None = None
) -> bytes:
    """Serialize pairs to the corpus CSV schema. Deterministic bytes."""
    if pair_ids is None:
        pair_ids = default_pair_ids(len(pairs))
    if len(pair_ids) != len(pairs):
        raise ParameterError(
            f"{len(pair_ids)} pair ids for {len(pairs)} pairs"
        )
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PAIR_CSV_HEADER)
    for pid, pair in zip(pair_ids, pairs):
        writer.writerow(
            [
                pid,
                pair.left_id,
                pair.right_id,
                str(pair.label.value),
                pair.label.kind.value,
                pair.combined_text,
            ]
        )
    return buf.getvalue().encode("utf-8")


def read_pairs_csv(data: bytes | str | IO) -> tuple[list[str], list[RequirementPair]]:
    """Parse a pair CSV back into ids and pairs. Inverse of write_pairs_csv."""
    reader = csv.reader(_as_text_stream(data), strict=True)
    try:
        header = next(reader, None)
        if header is None:
            raise SchemaError("pair CSV has no header row")
        if tuple(header) != PAIR_CSV_HEADER:
            raise SchemaError(
                f"pair CSV header must be {','.join(PAIR_CSV_HEADER)}, "
                f"got {','.join(header)}"
            )
        ids: list[str] = []
        pairs: list[RequirementPair] = []
        seen: set[str] = set()
        for row in reader:
            if len(row) != len(PAIR_CSV_HEADER):
                raise ParseError(
                    f"line {reader.line_num}: expected {len(PAIR_CSV_HEADER)} "
                    f"fields, got {len(row)}"
                )
            pid, left, right, label_s, kind_s, text = row
            if not pid:
                raise ParseError(f"line {reader.line_num}: empty pair_id")
            if pid in seen:
                raise ParseError(f"line {reader.line_num}: duplicate pair_id {pid!r}")
            seen.add(pid)
            if label_s not in ("0", "1"):
                raise ParseError(
                    f"line {reader.line_num}: label must be 0 or 1, got {label_s!r}"
                )
            try:
                kind = DependencyKind(kind_s)
            except ValueError as exc:
                raise ParseError(
                    f"line {reader.line_num}: unknown kind {kind_s!r}"
                ) from exc
            label = DependencyLabel(int(label_s), kind)
            ids.append(pid)
            pairs.append(RequirementPair(left, right, label, text))
    except csv.Error as exc:
        raise ParseError(f"malformed CSV at line {reader.line_num}: {exc}") from exc
    return ids, pairs


def write_corpus_csv(corpus: PairCorpus, pair_ids: Sequence[str] | None = None) -> bytes:
    return write_pairs_csv(corpus.pairs, pair_ids)


def read_corpus_csv(data: bytes | str | IO) -> tuple[list[str], PairCorpus]:
    """Load a full corpus CSV; enforces class balance."""
    ids, pairs = read_pairs_csv(data)
    return ids, PairCorpus(pairs)
