"""Cost, benefit and return-on-investment for classifier-assisted triage.

The model: processing n candidate pairs costs staff time priced per
sample and per hour; classifier mistakes carry per-error penalties that
eat into the value of a correctly dependency-managed product; ROI is the
usual net-gain-over-cost ratio. All money is USD, all effort minutes
per sample unless a field name says otherwise.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, fields, replace

from .classify import ConfusionMatrix
from .errors import ParameterError, UndefinedRoiError

logger = logging.getLogger(__name__)

# Per-sample minute fields that count toward processing cost by default:
# data gathering, preprocessing, labeling, and training/testing effort.
# Planning, transfer-learning and model-evaluation minutes exist in the
# parameter set but default to zero and are excluded unless requested.
APPLICABLE_COST_FIELDS = ("c_dg", "c_pp", "c_l", "c_train_test")

_MINUTE_FIELDS = ("c_pl", "c_dg", "c_pp", "c_l", "c_t", "c_train_test", "c_e")

# Advisory split of per-sample effort between data preparation (gather,
# preprocess, label) and model work (transfer, train/test): preparation
# is expected to dominate at about four to one.
_PREP_SHARE_TARGET = 0.80
_PREP_SHARE_TOLERANCE = 0.05


@dataclass(frozen=True)
class CostParameters:
    """Effort and value assumptions for one evaluation scenario.

    Defaults reflect an industrial setting: three person-tenths of an
    hour of preparation per sample split evenly across gathering,
    preprocessing and labeling, a thin slice of train/test time, a
    ten-person team at a blended hourly rate, five-figure error
    penalties, and a seven-figure product value.
    """

    c_pl: float = 0.0  # planning minutes per sample
    c_dg: float = 0.5  # data gathering
    c_pp: float = 0.5  # preprocessing
    c_l: float = 0.5  # labeling
    c_t: float = 0.0  # transfer-learning adaptation
    c_train_test: float = 0.30  # training and testing
    c_e: float = 0.0  # model evaluation
    cost_fp: float = 10_000.0  # USD per false positive
    cost_fn: float = 25_000.0  # USD per false negative
    n_hr: int = 10  # people working the pipeline
    c_hr: float = 70.0  # USD per person-hour
    value_prod: float = 4_000_000.0  # USD value of the correctly managed product

    def __post_init__(self) -> None:
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "n_hr":
                if not isinstance(v, int) or v < 1:
                    raise ParameterError(f"n_hr must be an integer >= 1, got {v!r}")
                continue
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise ParameterError(f"{f.name} must be a number, got {v!r}")
            if v < 0:
                raise ParameterError(f"{f.name} must be >= 0, got {v!r}")
        if not self.c_hr > 0:
            raise ParameterError(f"c_hr must be > 0, got {self.c_hr!r}")
        self._check_phase_share()

    def _check_phase_share(self) -> None:
        prep = self.c_dg + self.c_pp + self.c_l
        model_work = self.c_t + self.c_train_test
        total = prep + model_work
        if total == 0:
            return
        share = prep / total
        lo = _PREP_SHARE_TARGET - _PREP_SHARE_TOLERANCE
        hi = _PREP_SHARE_TARGET + _PREP_SHARE_TOLERANCE
        if not (lo <= share <= hi):
            logger.warning(
                "data-preparation share of per-sample effort is %.3f, "
                "outside the expected %.2f +/- %.2f band",
                share,
                _PREP_SHARE_TARGET,
                _PREP_SHARE_TOLERANCE,
            )

    def minutes_per_sample(self, applicable: tuple[str, ...] = APPLICABLE_COST_FIELDS) -> float:
        for name in applicable:
            if name not in _MINUTE_FIELDS:
                raise ParameterError(f"unknown per-sample minute field {name!r}")
        return sum(getattr(self, name) for name in applicable)


def table5_default() -> CostParameters:
    """The industrial-scale default parameter set."""
    return CostParameters()


def desk_scale() -> CostParameters:
    """Same effort assumptions, small-project product value."""
    return replace(CostParameters(), value_prod=50_000.0)


ECONOMICS_PROFILES = {
    "table5-default": table5_default,
    "desk-scale": desk_scale,
}


def f1_score(cm: ConfusionMatrix) -> float:
    """Harmonic precision/recall mean; 0 when there are no positives anywhere."""
    denom = 2 * cm.tp + cm.fp + cm.fn
    return (2 * cm.tp) / denom if denom else 0.0


def processing_cost(
    n: int,
    params: CostParameters,
    applicable: tuple[str, ...] = APPLICABLE_COST_FIELDS,
) -> float:
    """USD cost of pushing n samples through the pipeline.

    n samples x applicable minutes per sample x team size x hourly rate,
    converted from minutes to hours last so round dollar figures stay
    exact.
    """
    if n < 0:
        raise ParameterError(f"sample count must be >= 0, got {n}")
    minutes = params.minutes_per_sample(applicable)
    return n * minutes * params.n_hr * params.c_hr / 60.0


def total_penalty(cm: ConfusionMatrix, params: CostParameters) -> float:
    """USD penalty for the classifier's mistakes."""
    return cm.fp * params.cost_fp + cm.fn * params.cost_fn


def benefit(cm: ConfusionMatrix, params: CostParameters) -> float:
    """Product value left after subtracting mistake penalties. May be negative."""
    return params.value_prod - total_penalty(cm, params)


def roi(benefit_usd: float, cost_usd: float) -> float:
    """(benefit - cost) / cost. Nonpositive cost has no defined ROI."""
    if cost_usd <= 0:
        raise UndefinedRoiError(
            f"ROI is undefined for nonpositive cost {cost_usd!r}"
        )
    return (benefit_usd - cost_usd) / cost_usd


@dataclass(frozen=True)
class EconomicOutcome:
    """One evaluated operating point: sample volume, money in, money out."""

    n_processed: int
    cost_usd: float
    penalty_usd: float
    benefit_usd: float
    roi: float

    def __post_init__(self) -> None:
        if self.n_processed < 0:
            raise ParameterError(
                f"n_processed must be >= 0, got {self.n_processed}"
            )
        if self.cost_usd > 0 and self.roi != (self.benefit_usd - self.cost_usd) / self.cost_usd:
            raise ParameterError(
                "inconsistent outcome: roi does not match (benefit - cost) / cost"
            )


def economic_outcome(
    n: int,
    cm: ConfusionMatrix,
    params: CostParameters,
    applicable: tuple[str, ...] = APPLICABLE_COST_FIELDS,
) -> EconomicOutcome:
    """Evaluate the full cost/benefit/ROI chain at one operating point."""
    cost = processing_cost(n, params, applicable)
    penalty = total_penalty(cm, params)
    gain = params.value_prod - penalty
    return EconomicOutcome(n, cost, penalty, gain, roi(gain, cost))
