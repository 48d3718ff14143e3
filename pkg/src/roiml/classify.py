"""Text-pair classifiers and prediction handling.

Everything here is deliberately self-contained: the vectorizer and both
learners are built on numpy so that vote tie-breaking, idf smoothing and
per-node feature subsampling behave exactly as documented, and so that
seeded runs are reproducible bit for bit.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field, replace
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

from .corpus import _as_text_stream  # shared stream coercion
from .errors import (
    DegenerateDataError,
    ParameterError,
    ParseError,
    PredictionError,
    SchemaError,
    SizeError,
)

logger = logging.getLogger(__name__)

# Distinct seed streams so one user seed can drive several consumers
# without them reading the same underlying sequence.
_FOREST_STREAM = 101
_TUNING_STREAM = 102

TUNING_TREE_GRID = (50, 100, 200)
TUNING_DEPTH_GRID = (16, None)
TUNING_FOLDS = 10


# --- vectorizer -------------------------------------------------------------


@dataclass(frozen=True)
class VectorizerConfig:
    min_df: int = 2
    max_vocab: int = 5000

    def __post_init__(self) -> None:
        if self.min_df < 1:
            raise ParameterError(f"min_df must be >= 1, got {self.min_df}")
        if self.max_vocab < 1:
            raise ParameterError(f"max_vocab must be >= 1, got {self.max_vocab}")


def _tokenize(text: str) -> list[str]:
    return text.split()


@dataclass(frozen=True)
class FeatureVectorizer:
    """Bag-of-words vocabulary with smoothed idf weights, fit on training text."""

    vocabulary: Mapping[str, int]  # token -> column
    idf: np.ndarray  # (d,)
    document_frequency: np.ndarray  # (d,) raw df counts
    n_documents: int
    config: VectorizerConfig

    @property
    def width(self) -> int:
        return len(self.vocabulary)

    def transform_counts(self, texts: Sequence[str]) -> np.ndarray:
        """Raw term-count matrix; unknown tokens are dropped."""
        X = np.zeros((len(texts), self.width), dtype=np.float64)
        vocab = self.vocabulary
        for i, text in enumerate(texts):
            for tok in _tokenize(text):
                j = vocab.get(tok)
                if j is not None:
                    X[i, j] += 1.0
        return X

    def transform(self, texts: Sequence[str]) -> np.ndarray:
        """Tf-idf matrix with L2-normalized rows; all-zero rows stay zero."""
        X = self.transform_counts(texts) * self.idf
        norms = np.sqrt((X * X).sum(axis=1))
        nonzero = norms > 0.0
        X[nonzero] /= norms[nonzero, None]
        return X


def fit_vectorizer(
    train_texts: Sequence[str], config: VectorizerConfig = VectorizerConfig()
) -> FeatureVectorizer:
    """Build the vocabulary and idf weights from training text only.

    Tokens must appear in at least min_df documents; if more than
    max_vocab survive, the most document-frequent win (ties by token).
    idf = ln((1 + D) / (1 + df)) + 1 with D the training document count.
    """
    if not train_texts:
        raise SizeError("cannot fit a vectorizer on zero documents")
    df: dict[str, int] = {}
    for text in train_texts:
        for tok in set(_tokenize(text)):
            df[tok] = df.get(tok, 0) + 1
    kept = [tok for tok, count in df.items() if count >= config.min_df]
    if len(kept) > config.max_vocab:
        kept.sort(key=lambda tok: (-df[tok], tok))
        kept = kept[: config.max_vocab]
    kept.sort()
    if not kept:
        logger.warning(
            "vocabulary is empty after min_df=%d filtering of %d documents",
            config.min_df,
            len(train_texts),
        )
    vocabulary = {tok: j for j, tok in enumerate(kept)}
    d = len(train_texts)
    df_arr = np.array([df[tok] for tok in kept], dtype=np.float64)
    idf = np.log((1.0 + d) / (1.0 + df_arr)) + 1.0
    return FeatureVectorizer(vocabulary, idf, df_arr, d, config)


# --- random forest ----------------------------------------------------------


@dataclass(frozen=True)
class ForestConfig:
    trees: int = 100
    max_depth: int | None = None
    min_leaf: int = 1
    tuning: bool = False

    def __post_init__(self) -> None:
        if self.trees < 1:
            raise ParameterError(f"trees must be >= 1, got {self.trees}")
        if self.max_depth is not None and self.max_depth < 1:
            raise ParameterError(f"max_depth must be >= 1 or None, got {self.max_depth}")
        if self.min_leaf < 1:
            raise ParameterError(f"min_leaf must be >= 1, got {self.min_leaf}")


@dataclass(frozen=True)
class _Tree:
    # Parallel node arrays; feature == -1 marks a leaf storing `value`.
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def predict(self, X: np.ndarray) -> np.ndarray:
        out = np.zeros(X.shape[0], dtype=np.int64)
        stack: list[tuple[int, np.ndarray]] = [(0, np.arange(X.shape[0]))]
        while stack:
            node, rows = stack.pop()
            f = int(self.feature[node])
            if f < 0:
                out[rows] = self.value[node]
                continue
            go_left = X[rows, f] <= self.threshold[node]
            left_rows = rows[go_left]
            right_rows = rows[~go_left]
            if left_rows.size:
                stack.append((int(self.left[node]), left_rows))
            if right_rows.size:
                stack.append((int(self.right[node]), right_rows))
        return out


def _majority(y: np.ndarray) -> int:
    pos = int(y.sum())
    neg = y.size - pos
    return 1 if pos > neg else 0  # ties go to 0


def _grow_tree(
    X: np.ndarray, y: np.ndarray, config: ForestConfig, rng: np.random.Generator
) -> _Tree:
    n_features = X.shape[1]
    k = max(1, math.ceil(math.sqrt(n_features))) if n_features else 0
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[int] = []

    def new_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0)
        return len(feature) - 1

    root = new_node()
    stack: list[tuple[int, np.ndarray, int]] = [(root, np.arange(X.shape[0]), 0)]
    min_leaf = config.min_leaf
    while stack:
        node, idx, depth = stack.pop()
        y_node = y[idx]
        n = idx.size
        pos = int(y_node.sum())
        at_depth_limit = config.max_depth is not None and depth >= config.max_depth
        if pos == 0 or pos == n or n < 2 * min_leaf or at_depth_limit or k == 0:
            value[node] = _majority(y_node)
            continue

        cand_features = np.sort(rng.choice(n_features, size=k, replace=False))
        parent_gini = 1.0 - (pos / n) ** 2 - ((n - pos) / n) ** 2
        best_score = parent_gini - 1e-12
        best: tuple[int, float] | None = None
        for f in cand_features:
            col = X[idx, f]
            order = np.argsort(col, kind="stable")
            col_sorted = col[order]
            y_sorted = y_node[order]
            cuts = np.nonzero(col_sorted[1:] > col_sorted[:-1])[0] + 1
            if min_leaf > 1:
                cuts = cuts[(cuts >= min_leaf) & (cuts <= n - min_leaf)]
            if cuts.size == 0:
                continue
            pos_prefix = np.cumsum(y_sorted)
            nl = cuts.astype(np.float64)
            nr = n - nl
            pl = pos_prefix[cuts - 1].astype(np.float64)
            pr = pos - pl
            gini_l = 1.0 - (pl / nl) ** 2 - ((nl - pl) / nl) ** 2
            gini_r = 1.0 - (pr / nr) ** 2 - ((nr - pr) / nr) ** 2
            weighted = (nl * gini_l + nr * gini_r) / n
            j = int(np.argmin(weighted))
            if weighted[j] < best_score:
                best_score = float(weighted[j])
                cut = cuts[j]
                thr = (col_sorted[cut - 1] + col_sorted[cut]) / 2.0
                best = (int(f), float(thr))
        if best is None:
            value[node] = _majority(y_node)
            continue

        f, thr = best
        mask = X[idx, f] <= thr
        left_idx = idx[mask]
        right_idx = idx[~mask]
        if left_idx.size == 0 or right_idx.size == 0:
            value[node] = _majority(y_node)
            continue
        l_node = new_node()
        r_node = new_node()
        feature[node] = f
        threshold[node] = thr
        left[node] = l_node
        right[node] = r_node
        stack.append((l_node, left_idx, depth + 1))
        stack.append((r_node, right_idx, depth + 1))

    return _Tree(
        np.array(feature, dtype=np.int64),
        np.array(threshold, dtype=np.float64),
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(value, dtype=np.int64),
    )


@dataclass(frozen=True)
class ForestModel:
    trees: tuple[_Tree, ...]
    config: ForestConfig
    n_features: int

    def vote_scores(self, X: np.ndarray) -> np.ndarray:
        """Fraction of trees voting dependent, per row."""
        votes = np.zeros(X.shape[0], dtype=np.float64)
        for tree in self.trees:
            votes += tree.predict(X)
        return votes / len(self.trees)


def _check_training_data(X: np.ndarray, y: np.ndarray) -> None:
    if X.ndim != 2:
        raise ParameterError(f"feature matrix must be 2-D, got shape {X.shape}")
    if y.shape[0] != X.shape[0]:
        raise ParameterError(
            f"{X.shape[0]} feature rows but {y.shape[0]} labels"
        )
    if X.shape[0] == 0:
        raise SizeError("cannot train on zero examples")
    classes = set(np.unique(y).tolist())
    if not classes <= {0, 1}:
        raise ParameterError(f"labels must be 0 or 1, got {sorted(classes)}")
    if classes != {0, 1}:
        raise DegenerateDataError(
            "training data must contain both classes, got only "
            f"{sorted(classes)}"
        )


def train_random_forest(
    X: np.ndarray, y: np.ndarray, config: ForestConfig = ForestConfig(), seed: int = 0
) -> "TrainedModel":
    """Bagged Gini decision trees over tf-idf features.

    Each tree sees a bootstrap resample and ceil(sqrt(d)) candidate
    features per node; the forest predicts by majority vote with ties
    going to independent. With config.tuning, trees and depth are first
    chosen by cross-validated grid search on (X, y).
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    _check_training_data(X, y)
    tuned_from = None
    if config.tuning:
        config, cv_scores = tune_random_forest(X, y, config, seed)
        tuned_from = cv_scores
    children = np.random.SeedSequence([seed, _FOREST_STREAM]).spawn(config.trees)
    trees = []
    n = X.shape[0]
    for child in children:
        rng = np.random.default_rng(child)
        boot = rng.integers(0, n, size=n)
        trees.append(_grow_tree(X[boot], y[boot], config, rng))
    model = ForestModel(tuple(trees), config, X.shape[1])
    meta = {
        "kind": "random_forest",
        "seed": seed,
        "n_train": int(n),
        "n_features": int(X.shape[1]),
        "trees": config.trees,
        "max_depth": config.max_depth,
        "min_leaf": config.min_leaf,
    }
    if tuned_from is not None:
        meta["cv_f1"] = {
            f"trees={t},max_depth={d}": score for (t, d), score in tuned_from.items()
        }
    return TrainedModel("random_forest", None, model, None, meta)


def _stratified_folds(
    y: np.ndarray, folds: int, rng: np.random.Generator
) -> list[np.ndarray]:
    """Shuffled round-robin fold assignment, per class."""
    assignments: list[list[int]] = [[] for _ in range(folds)]
    for cls in (0, 1):
        members = np.nonzero(y == cls)[0]
        members = members[rng.permutation(members.size)]
        for pos, idx in enumerate(members):
            assignments[pos % folds].append(int(idx))
    return [np.array(sorted(fold), dtype=np.int64) for fold in assignments]


def _fold_f1(tp: int, fp: int, fn: int) -> float:
    denom = 2 * tp + fp + fn
    return (2 * tp / denom) if denom else 0.0


def tune_random_forest(
    X: np.ndarray,
    y: np.ndarray,
    base: ForestConfig = ForestConfig(),
    seed: int = 0,
    folds: int = TUNING_FOLDS,
) -> tuple[ForestConfig, dict[tuple[int, int | None], float]]:
    """Grid-search trees x depth by mean F1 under stratified k-fold CV.

    Ties prefer fewer trees, then the bounded depth. Returns the winning
    config (tuning cleared) and the full score table.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    _check_training_data(X, y)
    counts = [int((y == cls).sum()) for cls in (0, 1)]
    if min(counts) < folds:
        raise SizeError(
            f"{folds}-fold tuning needs at least {folds} examples per class, "
            f"got {counts[1]} dependent and {counts[0]} independent"
        )
    fold_rng = np.random.default_rng(np.random.SeedSequence([seed, _TUNING_STREAM]))
    fold_sets = _stratified_folds(y, folds, fold_rng)
    all_idx = np.arange(y.size)

    scores: dict[tuple[int, int | None], float] = {}
    for trees in TUNING_TREE_GRID:
        for depth in TUNING_DEPTH_GRID:
            cand = replace(base, trees=trees, max_depth=depth, tuning=False)
            f1s = []
            for fi, test_idx in enumerate(fold_sets):
                train_mask = np.ones(y.size, dtype=bool)
                train_mask[test_idx] = False
                train_idx = all_idx[train_mask]
                cand_seed = int(
                    np.random.SeedSequence(
                        [seed, _TUNING_STREAM, trees, 0 if depth is None else depth, fi]
                    ).generate_state(1)[0]
                )
                model = train_random_forest(X[train_idx], y[train_idx], cand, cand_seed)
                pred = (model.forest.vote_scores(X[test_idx]) > 0.5).astype(np.int64)
                truth = y[test_idx]
                tp = int(((pred == 1) & (truth == 1)).sum())
                fp = int(((pred == 1) & (truth == 0)).sum())
                fn = int(((pred == 0) & (truth == 1)).sum())
                f1s.append(_fold_f1(tp, fp, fn))
            scores[(trees, depth)] = float(np.mean(f1s))

    def rank(key: tuple[int, int | None]) -> tuple[float, int, int]:
        trees, depth = key
        # higher score first; then fewer trees; then bounded depth
        return (-scores[key], trees, 1 if depth is None else 0)

    best_trees, best_depth = min(scores, key=rank)
    return replace(base, trees=best_trees, max_depth=best_depth, tuning=False), scores


# --- multinomial naive Bayes ------------------------------------------------


@dataclass(frozen=True)
class NaiveBayesConfig:
    alpha: float = 1.0

    def __post_init__(self) -> None:
        if not self.alpha > 0.0:
            raise ParameterError(f"alpha must be > 0, got {self.alpha}")


@dataclass(frozen=True)
class NaiveBayesModel:
    class_log_prior: np.ndarray  # (2,)
    feature_log_prob: np.ndarray  # (2, d)
    config: NaiveBayesConfig

    def joint_log_likelihood(self, X: np.ndarray) -> np.ndarray:
        return self.class_log_prior + X @ self.feature_log_prob.T

    def posterior_scores(self, X: np.ndarray) -> np.ndarray:
        """P(dependent | x) per row, computed stably in log space."""
        joint = self.joint_log_likelihood(X)
        m = joint.max(axis=1, keepdims=True)
        p = np.exp(joint - m)
        return p[:, 1] / p.sum(axis=1)


def train_naive_bayes(
    X: np.ndarray, y: np.ndarray, config: NaiveBayesConfig = NaiveBayesConfig()
) -> "TrainedModel":
    """Multinomial naive Bayes on raw term counts with additive smoothing."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    _check_training_data(X, y)
    if np.any(X < 0):
        raise ParameterError("count features must be nonnegative")
    n, d = X.shape
    alpha = config.alpha
    priors = np.zeros(2)
    flp = np.zeros((2, d))
    for cls in (0, 1):
        mask = y == cls
        priors[cls] = math.log(mask.sum() / n)
        if d:
            counts = X[mask].sum(axis=0)
            flp[cls] = np.log(counts + alpha) - math.log(counts.sum() + alpha * d)
    model = NaiveBayesModel(priors, flp, config)
    meta = {
        "kind": "naive_bayes",
        "n_train": int(n),
        "n_features": int(d),
        "alpha": alpha,
    }
    return TrainedModel("naive_bayes", None, None, model, meta)


# --- trained model facade ---------------------------------------------------


@dataclass(frozen=True)
class TrainedModel:
    """A fitted classifier, optionally bundled with its vectorizer."""

    kind: str  # "random_forest" | "naive_bayes"
    vectorizer: FeatureVectorizer | None
    forest: ForestModel | None
    nb: NaiveBayesModel | None
    metadata: dict

    def with_vectorizer(self, vectorizer: FeatureVectorizer) -> "TrainedModel":
        meta = dict(self.metadata)
        meta["vocabulary_size"] = vectorizer.width
        return TrainedModel(self.kind, vectorizer, self.forest, self.nb, meta)

    def _features(self, texts: Sequence[str]) -> np.ndarray:
        if self.vectorizer is None:
            raise ParameterError(
                "model has no vectorizer attached; cannot predict from raw text"
            )
        if self.kind == "naive_bayes":
            return self.vectorizer.transform_counts(texts)
        return self.vectorizer.transform(texts)

    def scores(self, X: np.ndarray) -> np.ndarray:
        if self.kind == "random_forest":
            assert self.forest is not None
            return self.forest.vote_scores(X)
        assert self.nb is not None
        return self.nb.posterior_scores(X)

    def labels_from_scores(self, scores: np.ndarray) -> np.ndarray:
        # > 0.5 so an exact tie (score 0.5) goes to independent
        return (scores > 0.5).astype(np.int64)


def predict(
    model: TrainedModel,
    texts: Sequence[str],
    pair_ids: Sequence[str] | None = None,
) -> "PredictionSet":
    """Score texts and return per-pair predictions (no true labels yet)."""
    if pair_ids is None:
        pair_ids = [f"p{i:05d}" for i in range(len(texts))]
    if len(pair_ids) != len(texts):
        raise ParameterError(f"{len(pair_ids)} pair ids for {len(texts)} texts")
    X = model._features(texts)
    scores = model.scores(X)
    labels = model.labels_from_scores(scores)
    rows = tuple(
        PredictionRow(pid, None, int(lab), float(score))
        for pid, lab, score in zip(pair_ids, labels, scores)
    )
    return PredictionSet(rows)


# --- predictions ------------------------------------------------------------


@dataclass(frozen=True)
class PredictionRow:
    pair_id: str
    true_label: int | None
    predicted_label: int
    score: float | None = None

    def __post_init__(self) -> None:
        if not self.pair_id:
            raise PredictionError("pair_id must be nonempty")
        if self.true_label is not None and self.true_label not in (0, 1):
            raise PredictionError(
                f"{self.pair_id}: true_label must be 0 or 1, got {self.true_label!r}"
            )
        if self.predicted_label not in (0, 1):
            raise PredictionError(
                f"{self.pair_id}: predicted_label must be 0 or 1, "
                f"got {self.predicted_label!r}"
            )
        if self.score is not None and not math.isfinite(self.score):
            raise PredictionError(f"{self.pair_id}: score must be finite")


class PredictionSet:
    """Predictions keyed by unique pair id."""

    def __init__(self, rows: Iterable[PredictionRow]):
        self.rows: tuple[PredictionRow, ...] = tuple(rows)
        seen: set[str] = set()
        for row in self.rows:
            if row.pair_id in seen:
                raise PredictionError(f"duplicate pair_id {row.pair_id!r}")
            seen.add(row.pair_id)

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def pair_ids(self) -> tuple[str, ...]:
        return tuple(row.pair_id for row in self.rows)

    def has_true_labels(self) -> bool:
        return all(row.true_label is not None for row in self.rows)

    def with_true_labels(self, labels: Sequence[int]) -> "PredictionSet":
        """Attach true labels positionally."""
        if len(labels) != len(self.rows):
            raise PredictionError(
                f"{len(labels)} labels for {len(self.rows)} prediction rows"
            )
        return PredictionSet(
            PredictionRow(r.pair_id, int(lab), r.predicted_label, r.score)
            for r, lab in zip(self.rows, labels)
        )


PREDICTION_CSV_HEADER = ("pair_id", "true_label", "predicted_label", "score")


def load_external_predictions(data: bytes | str | IO) -> PredictionSet:
    """Parse a prediction interchange CSV.

    Header must be pair_id,true_label,predicted_label[,score]; labels are
    0 or 1; the score cell may be empty. Problems are reported with their
    line number.
    """
    reader = csv.reader(_as_text_stream(data), strict=True)
    try:
        header = next(reader, None)
    except csv.Error as exc:
        raise ParseError(f"malformed CSV at line {reader.line_num}: {exc}") from exc
    if header is None:
        raise SchemaError("prediction CSV has no header row")
    with_score = tuple(header) == PREDICTION_CSV_HEADER
    if not with_score and tuple(header) != PREDICTION_CSV_HEADER[:3]:
        raise SchemaError(
            "prediction CSV header must be pair_id,true_label,predicted_label"
            f"[,score], got {','.join(header)}"
        )
    rows: list[PredictionRow] = []
    try:
        for row in reader:
            line = reader.line_num
            if len(row) != len(header):
                raise PredictionError(
                    f"line {line}: expected {len(header)} fields, got {len(row)}"
                )
            pid = row[0]
            labels: list[int] = []
            for cell, name in ((row[1], "true_label"), (row[2], "predicted_label")):
                if cell not in ("0", "1"):
                    raise PredictionError(
                        f"line {line}: {name} must be 0 or 1, got {cell!r}"
                    )
                labels.append(int(cell))
            score: float | None = None
            if with_score and row[3] != "":
                try:
                    score = float(row[3])
                except ValueError as exc:
                    raise ParseError(
                        f"line {line}: score is not a number: {row[3]!r}"
                    ) from exc
            try:
                rows.append(PredictionRow(pid, labels[0], labels[1], score))
            except PredictionError as exc:
                raise PredictionError(f"line {line}: {exc}") from exc
    except csv.Error as exc:
        raise ParseError(f"malformed CSV at line {reader.line_num}: {exc}") from exc
    return PredictionSet(rows)


def write_predictions_csv(preds: PredictionSet) -> bytes:
    """Serialize predictions to the interchange schema (deterministic bytes)."""
    any_score = any(row.score is not None for row in preds.rows)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PREDICTION_CSV_HEADER if any_score else PREDICTION_CSV_HEADER[:3])
    for row in preds.rows:
        if row.true_label is None:
            raise PredictionError(
                f"{row.pair_id}: cannot serialize a row without its true label"
            )
        out = [row.pair_id, str(row.true_label), str(row.predicted_label)]
        if any_score:
            out.append("" if row.score is None else f"{row.score:.6f}")
        writer.writerow(out)
    return buf.getvalue().encode("utf-8")


# --- evaluation -------------------------------------------------------------


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self) -> None:
        for name in ("tp", "fp", "fn", "tn"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise ParameterError(f"{name} must be a nonnegative integer, got {v!r}")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def precision(self) -> float:
        denom = self.tp + self.fp
        return self.tp / denom if denom else 0.0

    def recall(self) -> float:
        denom = self.tp + self.fn
        return self.tp / denom if denom else 0.0


def evaluate(preds: PredictionSet) -> ConfusionMatrix:
    """Count the confusion matrix; every row must carry its true label."""
    tp = fp = fn = tn = 0
    for row in preds.rows:
        if row.true_label is None:
            raise PredictionError(
                f"{row.pair_id}: cannot evaluate a prediction without its true label"
            )
        if row.predicted_label == 1:
            if row.true_label == 1:
                tp += 1
            else:
                fp += 1
        else:
            if row.true_label == 1:
                fn += 1
            else:
                tn += 1
    return ConfusionMatrix(tp, fp, fn, tn)


def confusion_from_labels(
    y_true: Sequence[int] | np.ndarray, y_pred: Sequence[int] | np.ndarray
) -> ConfusionMatrix:
    yt = np.asarray(y_true, dtype=np.int64)
    yp = np.asarray(y_pred, dtype=np.int64)
    if yt.shape != yp.shape:
        raise ParameterError(f"label shapes differ: {yt.shape} vs {yp.shape}")
    tp = int(((yp == 1) & (yt == 1)).sum())
    fp = int(((yp == 1) & (yt == 0)).sum())
    fn = int(((yp == 0) & (yt == 1)).sum())
    tn = int(((yp == 0) & (yt == 0)).sum())
    return ConfusionMatrix(tp, fp, fn, tn)
