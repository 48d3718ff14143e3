"""Learning-curve runs and the decision rules computed from them.

A curve run walks a nested fraction schedule, training (or replaying)
one classifier per fraction against a fixed held-out test set, and
prices each operating point with the economics model. Decision helpers
then answer the questions that matter to a buyer: where is ROI highest,
when does the investment break even, where do two techniques cross, and
when does more labeling stop paying.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from . import classify, roi as roi_mod
from .classify import (
    ConfusionMatrix,
    ForestConfig,
    NaiveBayesConfig,
    PredictionSet,
    VectorizerConfig,
)
from .corpus import PairCorpus, SplitPlan, default_pair_ids, fraction_schedule
from .errors import (
    ComparabilityError,
    HarnessError,
    ParameterError,
    RoimlError,
)
from .roi import APPLICABLE_COST_FIELDS, CostParameters, EconomicOutcome

logger = logging.getLogger(__name__)

BUILTIN_KINDS = ("random_forest", "naive_bayes")
TUNE_MODES = ("once", "per_fraction")
N_MODES = ("per_iteration", "cumulative")

DEFAULT_F1_EPSILON = 0.01
DEFAULT_ROI_EPSILON = 1.0
_METRICS = ("f1", "roi")
_GRID_TOLERANCE = 1e-12


@dataclass(frozen=True)
class BuiltinTrainer:
    """Recipe for training one of the built-in classifiers per fraction."""

    kind: str
    label: str = ""
    vectorizer: VectorizerConfig = field(default_factory=VectorizerConfig)
    forest: ForestConfig = field(default_factory=ForestConfig)
    nb: NaiveBayesConfig = field(default_factory=NaiveBayesConfig)
    tune_mode: str = "once"

    def __post_init__(self) -> None:
        if self.kind not in BUILTIN_KINDS:
            raise ParameterError(
                f"classifier kind must be one of {BUILTIN_KINDS}, got {self.kind!r}"
            )
        if self.tune_mode not in TUNE_MODES:
            raise ParameterError(
                f"tune_mode must be one of {TUNE_MODES}, got {self.tune_mode!r}"
            )

    @property
    def display_label(self) -> str:
        return self.label or self.kind


@dataclass(frozen=True)
class ExternalPredictions:
    """Pre-computed predictions for some fractions, e.g. from another tool."""

    label: str
    by_fraction: Mapping[float, PredictionSet]

    def __post_init__(self) -> None:
        if not self.label:
            raise ParameterError("external predictions need a technique label")

    def lookup(self, fraction: float) -> PredictionSet | None:
        for f, preds in self.by_fraction.items():
            if abs(f - fraction) <= 1e-9:
                return preds
        return None


@dataclass(frozen=True)
class CurvePoint:
    fraction: float
    n_train: int
    n_test: int
    cm: ConfusionMatrix
    f1: float
    econ: EconomicOutcome


@dataclass(frozen=True)
class LearningCurve:
    technique_label: str
    points: tuple[CurvePoint, ...]
    seed: int
    parameters: CostParameters
    metadata: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        fs = [p.fraction for p in self.points]
        for a, b in zip(fs, fs[1:]):
            if not a < b:
                raise HarnessError(
                    f"curve fractions must be strictly ascending, got {a} before {b}"
                )

    @property
    def fractions(self) -> tuple[float, ...]:
        return tuple(p.fraction for p in self.points)

    def metric_series(self, metric: str) -> tuple[float, ...]:
        if metric == "f1":
            return tuple(p.f1 for p in self.points)
        if metric == "roi":
            return tuple(p.econ.roi for p in self.points)
        raise ParameterError(f"metric must be one of {_METRICS}, got {metric!r}")


def _model_seeds(plan_seed: int, count: int) -> list[int]:
    base = np.random.SeedSequence(plan_seed, spawn_key=(2,))
    return [int(child.generate_state(1)[0]) for child in base.spawn(count)]


def _train_for_subset(
    trainer: BuiltinTrainer,
    texts: list[str],
    labels: np.ndarray,
    seed: int,
    forest_config: ForestConfig,
) -> classify.TrainedModel:
    vec = classify.fit_vectorizer(texts, trainer.vectorizer)
    if trainer.kind == "random_forest":
        X = vec.transform(texts)
        model = classify.train_random_forest(X, labels, forest_config, seed)
    else:
        X = vec.transform_counts(texts)
        model = classify.train_naive_bayes(X, labels, trainer.nb)
    return model.with_vectorizer(vec)


def run_curve(
    corpus: PairCorpus,
    plan: SplitPlan,
    fractions: Sequence[float],
    trainer: BuiltinTrainer | ExternalPredictions,
    params: CostParameters,
    *,
    pair_ids: Sequence[str] | None = None,
    n_mode: str = "per_iteration",
    applicable: tuple[str, ...] = APPLICABLE_COST_FIELDS,
) -> LearningCurve:
    """Evaluate one technique across the nested fraction schedule.

    Every point trains on round-half-up(N * fraction) pairs and is
    scored on the plan's fixed test set, then priced: by default the
    sample volume n is that iteration's train + test count; in
    "cumulative" n_mode the volumes of all iterations so far are summed.
    """
    if n_mode not in N_MODES:
        raise ParameterError(f"n_mode must be one of {N_MODES}, got {n_mode!r}")
    if pair_ids is None:
        pair_ids = default_pair_ids(len(corpus))
    elif len(pair_ids) != len(corpus):
        raise ParameterError(
            f"{len(pair_ids)} pair ids for a corpus of {len(corpus)} pairs"
        )
    schedule = fraction_schedule(plan, fractions)
    labels = corpus.labels()
    texts = corpus.texts()
    test_idx = list(plan.test_set)
    test_texts = [texts[i] for i in test_idx]
    test_labels = labels[test_idx]
    test_ids = [pair_ids[i] for i in test_idx]
    n_test = len(test_idx)

    metadata: dict[str, object] = {
        "n_mode": n_mode,
        "applicable_cost_fields": tuple(applicable),
        "test_fraction": plan.test_fraction,
        "corpus_size": plan.corpus_size,
    }

    resolved_forest: ForestConfig | None = None
    if isinstance(trainer, BuiltinTrainer):
        metadata["classifier"] = trainer.kind
        resolved_forest = trainer.forest
        if trainer.kind == "random_forest" and trainer.forest.tuning:
            metadata["tune_mode"] = trainer.tune_mode
            if trainer.tune_mode == "once":
                # Resolve hyperparameters on the largest scheduled subset.
                big = schedule[-1]
                big_texts = [texts[i] for i in big]
                big_labels = labels[big]
                vec = classify.fit_vectorizer(big_texts, trainer.vectorizer)
                tune_seed = int(
                    np.random.SeedSequence(plan.seed, spawn_key=(2,)).generate_state(1)[0]
                )
                resolved_forest, _ = classify.tune_random_forest(
                    vec.transform(big_texts), big_labels, trainer.forest, tune_seed
                )
                metadata["tuned_trees"] = resolved_forest.trees
                metadata["tuned_max_depth"] = resolved_forest.max_depth

    points: list[CurvePoint] = []
    seeds = _model_seeds(plan.seed, len(fractions))
    cumulative_n = 0
    for i, (frac, subset) in enumerate(zip(fractions, schedule)):
        frac = float(frac)
        if isinstance(trainer, BuiltinTrainer):
            train_texts = [texts[j] for j in subset]
            train_labels = labels[subset]
            try:
                model = _train_for_subset(
                    trainer, train_texts, train_labels, seeds[i],
                    resolved_forest if resolved_forest is not None else trainer.forest,
                )
                preds = classify.predict(model, test_texts, test_ids)
            except RoimlError as exc:
                raise HarnessError(
                    f"training failed at fraction {frac:g}: {exc}"
                ) from exc
            preds = preds.with_true_labels([int(v) for v in test_labels])
        else:
            preds = trainer.lookup(frac)
            if preds is None:
                continue
            _check_external(preds, test_ids, test_labels, frac)

        cm = classify.evaluate(preds)
        f1 = roi_mod.f1_score(cm)
        n_iter = len(subset) + n_test
        cumulative_n += n_iter
        n = cumulative_n if n_mode == "cumulative" else n_iter
        try:
            econ = roi_mod.economic_outcome(n, cm, params, applicable)
        except RoimlError as exc:
            raise HarnessError(
                f"economics failed at fraction {frac:g}: {exc}"
            ) from exc
        points.append(CurvePoint(frac, len(subset), n_test, cm, f1, econ))

    if isinstance(trainer, ExternalPredictions):
        missing = [
            f"{float(f):g}" for f in fractions
            if trainer.lookup(float(f)) is None
        ]
        if missing:
            logger.warning(
                "%s: no prediction file for fractions %s; curve has %d of %d points",
                trainer.label,
                ", ".join(missing),
                len(points),
                len(fractions),
            )
    if not points:
        raise HarnessError("curve run produced no points")
    label = trainer.display_label if isinstance(trainer, BuiltinTrainer) else trainer.label
    return LearningCurve(label, tuple(points), plan.seed, params, metadata)


def _check_external(
    preds: PredictionSet,
    test_ids: Sequence[str],
    test_labels: np.ndarray,
    fraction: float,
) -> None:
    got = set(preds.pair_ids)
    want = set(test_ids)
    if got != want:
        extra = sorted(got - want)[:3]
        absent = sorted(want - got)[:3]
        raise HarnessError(
            f"fraction {fraction:g}: prediction pair ids do not match the "
            f"test set (unexpected: {extra}, missing: {absent})"
        )
    truth = {pid: int(lab) for pid, lab in zip(test_ids, test_labels)}
    for row in preds.rows:
        if row.true_label is None:
            raise HarnessError(
                f"fraction {fraction:g}: prediction {row.pair_id} has no true label"
            )
        if row.true_label != truth[row.pair_id]:
            raise HarnessError(
                f"fraction {fraction:g}: prediction {row.pair_id} disagrees "
                f"with the corpus label ({row.true_label} vs {truth[row.pair_id]})"
            )


# --- decision rules ---------------------------------------------------------


def max_roi_point(curve: LearningCurve) -> CurvePoint:
    """The point with the highest ROI; ties go to the smallest fraction."""
    if not curve.points:
        raise HarnessError("cannot take the ROI maximum of an empty curve")
    best = curve.points[0]
    for point in curve.points[1:]:
        if point.econ.roi > best.econ.roi:
            best = point
    return best


@dataclass(frozen=True)
class BreakEven:
    """First fraction where ROI is nonnegative, on the grid and interpolated."""

    grid_fraction: float
    interpolated_fraction: float


def break_even(curve: LearningCurve) -> BreakEven | None:
    """Where ROI first reaches zero; None if it never does.

    The interpolated fraction linearly locates the zero crossing between
    the first nonnegative grid point and its predecessor.
    """
    if not curve.points:
        raise HarnessError("cannot find break-even on an empty curve")
    for i, point in enumerate(curve.points):
        if point.econ.roi >= 0:
            if i == 0:
                return BreakEven(point.fraction, point.fraction)
            prev = curve.points[i - 1]
            r0, r1 = prev.econ.roi, point.econ.roi
            f0, f1 = prev.fraction, point.fraction
            interp = f0 + (f1 - f0) * (0.0 - r0) / (r1 - r0)
            return BreakEven(point.fraction, interp)
    return None


def crossover(
    a: LearningCurve, b: LearningCurve, metric: str = "roi"
) -> list[float]:
    """Fractions where technique a overtakes b or vice versa.

    A crossover is a grid point where sign(a - b) is nonzero and differs
    from the last nonzero sign before it; points where the curves are
    exactly equal neither report nor reset the ordering.
    """
    fa, fb = a.fractions, b.fractions
    if len(fa) != len(fb) or any(
        abs(x - y) > _GRID_TOLERANCE for x, y in zip(fa, fb)
    ):
        raise ComparabilityError(
            f"curves {a.technique_label!r} and {b.technique_label!r} were "
            "evaluated on different fraction grids"
        )
    sa = a.metric_series(metric)
    sb = b.metric_series(metric)
    out: list[float] = []
    last_sign = 0
    for f, va, vb in zip(fa, sa, sb):
        diff = va - vb
        sign = (diff > 0) - (diff < 0)
        if sign == 0:
            continue
        if last_sign != 0 and sign != last_sign:
            out.append(f)
        last_sign = sign
    return out


def diminishing_returns(
    curve: LearningCurve, metric: str = "f1", epsilon: float | None = None
) -> float | None:
    """Smallest fraction after which no later point improves by epsilon.

    Scans every point but the last; returns None when late gains keep
    exceeding epsilon.
    """
    if epsilon is None:
        epsilon = DEFAULT_F1_EPSILON if metric == "f1" else DEFAULT_ROI_EPSILON
    if not epsilon > 0:
        raise ParameterError(f"epsilon must be > 0, got {epsilon}")
    if not curve.points:
        raise HarnessError("cannot assess diminishing returns on an empty curve")
    values = curve.metric_series(metric)
    for i in range(len(values) - 1):
        if max(values[i + 1 :]) - values[i] < epsilon:
            return curve.points[i].fraction
    return None


@dataclass(frozen=True)
class DecisionSummary:
    """The decision-relevant readout of one curve (optionally vs a rival)."""

    technique_label: str
    max_roi_fraction: float
    max_roi: float
    f1_at_max_roi: float
    break_even: BreakEven | None
    diminishing_returns_f1: float | None
    diminishing_returns_roi: float | None
    rival_label: str | None = None
    crossovers_f1: tuple[float, ...] | None = None
    crossovers_roi: tuple[float, ...] | None = None

    def to_dict(self) -> dict:
        return {
            "technique": self.technique_label,
            "max_roi": {
                "fraction": self.max_roi_fraction,
                "roi": self.max_roi,
                "f1": self.f1_at_max_roi,
            },
            "break_even": (
                None
                if self.break_even is None
                else {
                    "grid_fraction": self.break_even.grid_fraction,
                    "interpolated_fraction": self.break_even.interpolated_fraction,
                }
            ),
            "diminishing_returns": {
                "f1": self.diminishing_returns_f1,
                "roi": self.diminishing_returns_roi,
            },
            "rival": self.rival_label,
            "crossovers": (
                None
                if self.rival_label is None
                else {
                    "f1": list(self.crossovers_f1 or ()),
                    "roi": list(self.crossovers_roi or ()),
                }
            ),
        }


def summarize(
    curve: LearningCurve,
    rival: LearningCurve | None = None,
    f1_epsilon: float = DEFAULT_F1_EPSILON,
    roi_epsilon: float = DEFAULT_ROI_EPSILON,
) -> DecisionSummary:
    """Run every decision rule on a curve."""
    best = max_roi_point(curve)
    kwargs: dict = {}
    if rival is not None:
        kwargs = {
            "rival_label": rival.technique_label,
            "crossovers_f1": tuple(crossover(curve, rival, "f1")),
            "crossovers_roi": tuple(crossover(curve, rival, "roi")),
        }
    return DecisionSummary(
        technique_label=curve.technique_label,
        max_roi_fraction=best.fraction,
        max_roi=best.econ.roi,
        f1_at_max_roi=best.f1,
        break_even=break_even(curve),
        diminishing_returns_f1=diminishing_returns(curve, "f1", f1_epsilon),
        diminishing_returns_roi=diminishing_returns(curve, "roi", roi_epsilon),
        **kwargs,
    )


# --- scenario analysis -------------------------------------------------------


def recompute_economics(
    curve: LearningCurve, params: CostParameters
) -> LearningCurve:
    """Re-price a curve under different cost parameters.

    Confusion matrices, F1 and sample volumes are reused unchanged; only
    the money columns move.
    """
    applicable = tuple(
        curve.metadata.get("applicable_cost_fields", APPLICABLE_COST_FIELDS)
    )  # type: ignore[arg-type]
    points = []
    for p in curve.points:
        econ = roi_mod.economic_outcome(p.econ.n_processed, p.cm, params, applicable)
        points.append(CurvePoint(p.fraction, p.n_train, p.n_test, p.cm, p.f1, econ))
    return LearningCurve(
        curve.technique_label, tuple(points), curve.seed, params, curve.metadata
    )


def scenario_analysis(
    curve: LearningCurve,
    scenarios: Mapping[str, CostParameters],
    rival: LearningCurve | None = None,
    f1_epsilon: float = DEFAULT_F1_EPSILON,
    roi_epsilon: float = DEFAULT_ROI_EPSILON,
) -> dict[str, DecisionSummary]:
    """Decision summaries for the same run under alternative economics.

    Pure recomputation: nothing is retrained and the input curves are
    not modified.
    """
    if not scenarios:
        raise ParameterError("scenario analysis needs at least one scenario")
    out: dict[str, DecisionSummary] = {}
    for name, params in scenarios.items():
        try:
            scen_curve = recompute_economics(curve, params)
            scen_rival = None if rival is None else recompute_economics(rival, params)
            out[name] = summarize(scen_curve, scen_rival, f1_epsilon, roi_epsilon)
        except ParameterError as exc:
            raise ParameterError(f"scenario {name!r}: {exc}") from exc
    return out
