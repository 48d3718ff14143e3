"""Tests for the economic model: costs, penalties, benefit, and ROI."""

import logging
import math
from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roiml import roi
from roiml.classify import ConfusionMatrix
from roiml.errors import ParameterError, UndefinedRoiError

# Hand-checked reference case: 1,000 pairs processed, 10 false positives,
# 5 false negatives under the default cost profile.
ORACLE_CM = ConfusionMatrix(tp=400, fp=10, fn=5, tn=585)


def test_default_profile_values():
    p = roi.table5_default()
    assert p.c_dg == 0.5
    assert p.c_pp == 0.5
    assert p.c_l == 0.5
    assert p.c_pl == 0.0
    assert p.c_t == 0.0
    assert p.c_e == 0.0
    assert p.c_train_test == 0.30
    assert p.n_hr == 10
    assert p.c_hr == 70.0
    assert p.cost_fp == 10_000.0
    assert p.cost_fn == 25_000.0
    assert p.value_prod == 4_000_000.0


def test_desk_scale_profile_differs_only_in_value():
    base = roi.table5_default()
    desk = roi.desk_scale()
    assert desk.value_prod == 50_000.0
    assert replace(desk, value_prod=base.value_prod) == base


def test_profile_registry_returns_fresh_instances():
    assert set(roi.ECONOMICS_PROFILES) == {"table5-default", "desk-scale"}
    a = roi.ECONOMICS_PROFILES["table5-default"]()
    b = roi.ECONOMICS_PROFILES["table5-default"]()
    assert a == b
    assert a is not b


def test_minutes_per_sample_default_applicable_fields():
    p = roi.table5_default()
    # 3 x 0.5 preparation minutes plus 0.30 train/test minutes.
    assert math.isclose(p.minutes_per_sample(roi.APPLICABLE_COST_FIELDS), 1.8)


def test_minutes_per_sample_rejects_unknown_field():
    p = roi.table5_default()
    with pytest.raises(ParameterError):
        p.minutes_per_sample(("c_dg", "c_bogus"))


def test_processing_cost_oracle():
    p = roi.table5_default()
    cost = roi.processing_cost(1000, p, roi.APPLICABLE_COST_FIELDS)
    # 1000 samples * 1.8 min * 10 people * 70 USD/h / 60 min/h = 21,000 USD.
    assert cost == pytest.approx(21_000.0, abs=1e-6)


def test_processing_cost_zero_samples_is_zero():
    p = roi.table5_default()
    assert roi.processing_cost(0, p, roi.APPLICABLE_COST_FIELDS) == 0.0


def test_processing_cost_rejects_negative_count():
    p = roi.table5_default()
    with pytest.raises(ParameterError):
        roi.processing_cost(-1, p, roi.APPLICABLE_COST_FIELDS)


def test_penalty_and_benefit_oracle():
    p = roi.table5_default()
    penalty = roi.total_penalty(ORACLE_CM, p)
    assert penalty == pytest.approx(225_000.0, abs=1e-6)
    assert roi.benefit(ORACLE_CM, p) == pytest.approx(3_775_000.0, abs=1e-6)


def test_roi_oracle():
    p = roi.table5_default()
    out = roi.economic_outcome(1000, ORACLE_CM, p)
    assert out.cost_usd == pytest.approx(21_000.0, abs=1e-6)
    assert out.penalty_usd == pytest.approx(225_000.0, abs=1e-6)
    assert out.benefit_usd == pytest.approx(3_775_000.0, abs=1e-6)
    # (3,775,000 - 21,000) / 21,000
    assert out.roi == pytest.approx(178.76190476190476, abs=1e-6)


def test_roi_against_rational_arithmetic():
    p = roi.table5_default()
    out = roi.economic_outcome(1000, ORACLE_CM, p)
    cost = Fraction(1000) * Fraction(9, 5) * 10 * 70 / 60
    expected = (Fraction(3_775_000) - cost) / cost
    assert math.isclose(out.roi, float(expected), rel_tol=1e-12)


def test_roi_identities():
    assert roi.roi(100.0, 100.0) == 0.0
    assert roi.roi(200.0, 100.0) == 1.0
    assert roi.roi(0.0, 100.0) == -1.0


def test_roi_rejects_nonpositive_cost():
    with pytest.raises(UndefinedRoiError):
        roi.roi(100.0, 0.0)
    with pytest.raises(UndefinedRoiError):
        roi.roi(100.0, -5.0)


def test_economic_outcome_rejects_zero_cost():
    p = roi.table5_default()
    with pytest.raises(UndefinedRoiError):
        roi.economic_outcome(0, ORACLE_CM, p, applicable=())


def test_outcome_consistency_check():
    with pytest.raises(ParameterError):
        roi.EconomicOutcome(
            n_processed=10,
            cost_usd=100.0,
            penalty_usd=0.0,
            benefit_usd=300.0,
            roi=5.0,
        )


def test_f1_oracle():
    assert roi.f1_score(ORACLE_CM) == pytest.approx(0.9815950920245399, rel=1e-12)
    assert roi.f1_score(ConfusionMatrix(tp=0, fp=0, fn=0, tn=50)) == 0.0
    assert roi.f1_score(ConfusionMatrix(tp=7, fp=0, fn=0, tn=3)) == 1.0


def test_f1_ignores_true_negatives():
    a = ConfusionMatrix(tp=12, fp=3, fn=4, tn=0)
    b = ConfusionMatrix(tp=12, fp=3, fn=4, tn=9999)
    assert roi.f1_score(a) == roi.f1_score(b)


def test_parameter_validation():
    with pytest.raises(ParameterError):
        roi.CostParameters(c_dg=-0.1)
    with pytest.raises(ParameterError):
        roi.CostParameters(n_hr=0)
    with pytest.raises(ParameterError):
        roi.CostParameters(c_hr=0.0)
    with pytest.raises(ParameterError):
        roi.CostParameters(cost_fp=-1.0)


def test_phase_share_advisory_logged(caplog):
    with caplog.at_level(logging.WARNING, logger="roiml.roi"):
        roi.CostParameters(c_train_test=2.0)
    assert any("share" in rec.message for rec in caplog.records)


def test_phase_share_quiet_for_defaults(caplog):
    with caplog.at_level(logging.WARNING, logger="roiml.roi"):
        roi.table5_default()
        roi.desk_scale()
    assert not caplog.records


# ---------------------------------------------------------------------------
# Property tests.
# ---------------------------------------------------------------------------

_counts = st.integers(min_value=0, max_value=5000)


@given(tp=_counts, fp=_counts, fn=_counts, tn=_counts, extra=st.integers(1, 500))
@settings(max_examples=300, deadline=None)
def test_penalty_monotone_in_errors(tp, fp, fn, tn, extra):
    p = roi.table5_default()
    base = roi.total_penalty(ConfusionMatrix(tp, fp, fn, tn), p)
    more_fp = roi.total_penalty(ConfusionMatrix(tp, fp + extra, fn, tn), p)
    more_fn = roi.total_penalty(ConfusionMatrix(tp, fp, fn + extra, tn), p)
    assert more_fp >= base
    assert more_fn >= base


@given(n1=st.integers(0, 10**6), n2=st.integers(0, 10**6))
@settings(max_examples=300, deadline=None)
def test_cost_additive_in_sample_count(n1, n2):
    p = roi.table5_default()
    fields = roi.APPLICABLE_COST_FIELDS
    lhs = roi.processing_cost(n1 + n2, p, fields)
    rhs = roi.processing_cost(n1, p, fields) + roi.processing_cost(n2, p, fields)
    assert math.isclose(lhs, rhs, rel_tol=1e-9, abs_tol=1e-9)


@given(
    cost=st.floats(1e-3, 1e9, allow_nan=False, allow_infinity=False),
    ratio=st.floats(-0.999, 1e4, allow_nan=False, allow_infinity=False),
    scale=st.floats(1e-6, 1e6, allow_nan=False, allow_infinity=False),
)
@settings(max_examples=500, deadline=None)
def test_roi_scale_invariance(cost, ratio, scale):
    ben = cost * (1.0 + ratio)
    assert math.isclose(
        roi.roi(ben * scale, cost * scale),
        roi.roi(ben, cost),
        rel_tol=1e-12,
        abs_tol=1e-12,
    )


@given(tp=_counts, fp=_counts, fn=_counts, tn=_counts)
@settings(max_examples=300, deadline=None)
def test_f1_bounded(tp, fp, fn, tn):
    value = roi.f1_score(ConfusionMatrix(tp, fp, fn, tn))
    assert 0.0 <= value <= 1.0
