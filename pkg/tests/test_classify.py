"""Tests for feature extraction, the two classifiers, and prediction handling."""

import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roiml import classify
from roiml.classify import (
    ConfusionMatrix,
    ForestConfig,
    NaiveBayesConfig,
    PredictionRow,
    PredictionSet,
    VectorizerConfig,
)
from roiml.errors import (
    DegenerateDataError,
    ParameterError,
    ParseError,
    PredictionError,
    SchemaError,
    SizeError,
)


# ---------------------------------------------------------------------------
# Vectorizer.
# ---------------------------------------------------------------------------

DOCS = ["cat sat", "cat ran", "dog ran", "cat cat mat"]


def test_vocabulary_respects_min_df():
    vec = classify.fit_vectorizer(DOCS, VectorizerConfig(min_df=2))
    # df: cat=3, ran=2, sat=1, dog=1, mat=1 -> only cat and ran survive.
    assert list(vec.vocabulary) == ["cat", "ran"]
    assert vec.vocabulary == {"cat": 0, "ran": 1}
    assert vec.document_frequency.tolist() == [3, 2]
    assert vec.n_documents == 4


def test_idf_formula():
    vec = classify.fit_vectorizer(DOCS, VectorizerConfig(min_df=2))
    assert vec.idf[0] == pytest.approx(math.log(5 / 4) + 1.0, rel=1e-12)
    assert vec.idf[1] == pytest.approx(math.log(5 / 3) + 1.0, rel=1e-12)


def test_transform_weights_hand_computed():
    vec = classify.fit_vectorizer(DOCS, VectorizerConfig(min_df=2))
    row = vec.transform(["cat cat ran"])[0]
    raw = np.array([2 * (math.log(5 / 4) + 1.0), math.log(5 / 3) + 1.0])
    expected = raw / math.sqrt(float(raw @ raw))
    assert row == pytest.approx(expected, rel=1e-12)
    assert math.isclose(float(row @ row), 1.0, rel_tol=1e-12)


def test_transform_drops_unknown_tokens():
    vec = classify.fit_vectorizer(DOCS, VectorizerConfig(min_df=2))
    a = vec.transform(["cat ran zebra quokka"])[0]
    b = vec.transform(["cat ran"])[0]
    assert a == pytest.approx(b)


def test_transform_empty_doc_stays_zero():
    vec = classify.fit_vectorizer(DOCS, VectorizerConfig(min_df=2))
    row = vec.transform(["zebra"])[0]
    assert not row.any()


def test_max_vocab_prefers_frequent_then_alphabetical():
    vec = classify.fit_vectorizer(DOCS, VectorizerConfig(min_df=1, max_vocab=3))
    # cat(3) first, ran(2) second, then the df=1 tie breaks alphabetically.
    assert list(vec.vocabulary) == ["cat", "dog", "ran"]


def test_vocabulary_is_sorted():
    vec = classify.fit_vectorizer(DOCS, VectorizerConfig(min_df=1))
    assert list(vec.vocabulary) == sorted(vec.vocabulary)


def test_empty_vocabulary_yields_zero_width():
    vec = classify.fit_vectorizer(["one off words"], VectorizerConfig(min_df=2))
    assert vec.width == 0
    assert vec.transform(["anything"]).shape == (1, 0)


def test_vectorizer_config_validation():
    with pytest.raises(ParameterError):
        VectorizerConfig(min_df=0)
    with pytest.raises(ParameterError):
        VectorizerConfig(max_vocab=0)


# ---------------------------------------------------------------------------
# Naive Bayes.
# ---------------------------------------------------------------------------


def _nb_fixture():
    texts = ["x", "y"]
    labels = np.array([1, 0])
    vec = classify.fit_vectorizer(texts, VectorizerConfig(min_df=1))
    model = classify.train_naive_bayes(vec.transform_counts(texts), labels)
    return model.with_vectorizer(vec)


def test_nb_posterior_hand_computed():
    model = _nb_fixture()
    # Vocabulary {x, y}, alpha=1. Class 1 saw one x: theta_1 = (2/3, 1/3).
    # Class 0 mirrors it. For the document "x x" the joint odds are
    # (2/3)^2 : (1/3)^2, so the class-1 posterior is 4/5.
    score = model.scores(model.vectorizer.transform_counts(["x x"]))[0]
    assert score == pytest.approx(0.8, rel=1e-12)


def test_nb_tie_predicts_negative():
    model = _nb_fixture()
    counts = model.vectorizer.transform_counts(["x y"])
    scores = model.scores(counts)
    assert scores[0] == pytest.approx(0.5, rel=1e-12)
    assert model.labels_from_scores(scores)[0] == 0


def test_nb_prior_shifts_posterior():
    texts = ["x", "x", "y"]
    labels = np.array([1, 1, 0])
    vec = classify.fit_vectorizer(texts, VectorizerConfig(min_df=1))
    model = classify.train_naive_bayes(vec.transform_counts(texts), labels)
    # Prior 2/3 for class 1; likelihoods for the empty document are equal,
    # so an all-unknown text falls back to the prior.
    score = model.scores(vec.transform_counts(["zz"]))[0]
    assert score == pytest.approx(2 / 3, rel=1e-12)


def test_nb_rejects_single_class():
    X = np.array([[1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(DegenerateDataError):
        classify.train_naive_bayes(X, np.array([1, 1]))


def test_nb_rejects_negative_counts():
    X = np.array([[1.0, -2.0], [0.0, 1.0]])
    with pytest.raises(ParameterError):
        classify.train_naive_bayes(X, np.array([1, 0]))


def test_nb_alpha_must_be_positive():
    with pytest.raises(ParameterError):
        NaiveBayesConfig(alpha=0.0)


def test_nb_scores_stay_finite_on_long_docs():
    model = _nb_fixture()
    counts = model.vectorizer.transform_counts(["x " * 500])
    score = model.scores(counts)[0]
    assert 0.0 <= score <= 1.0
    assert math.isfinite(score)


# ---------------------------------------------------------------------------
# Random forest.
# ---------------------------------------------------------------------------


def _separable_xy(n_per_class=20, seed=3):
    rng = np.random.default_rng(seed)
    pos = rng.normal(loc=2.0, scale=0.3, size=(n_per_class, 3))
    neg = rng.normal(loc=-2.0, scale=0.3, size=(n_per_class, 3))
    X = np.vstack([pos, neg])
    y = np.array([1] * n_per_class + [0] * n_per_class)
    return X, y


def test_forest_fits_separable_data():
    X, y = _separable_xy()
    model = classify.train_random_forest(X, y, ForestConfig(trees=20), seed=7)
    preds = model.labels_from_scores(model.scores(X))
    assert (preds == y).all()


def test_forest_deterministic_for_seed():
    X, y = _separable_xy()
    rng = np.random.default_rng(11)
    probe = rng.normal(scale=2.5, size=(40, 3))
    a = classify.train_random_forest(X, y, ForestConfig(trees=15), seed=5)
    b = classify.train_random_forest(X, y, ForestConfig(trees=15), seed=5)
    assert a.scores(probe) == pytest.approx(b.scores(probe), abs=0)


def test_forest_scores_are_vote_fractions():
    X, y = _separable_xy()
    model = classify.train_random_forest(X, y, ForestConfig(trees=8), seed=1)
    scores = model.scores(X)
    assert ((scores >= 0.0) & (scores <= 1.0)).all()
    # With 8 trees every score is a multiple of 1/8.
    assert np.allclose(scores * 8, np.round(scores * 8))


def test_score_tie_maps_to_negative():
    model = classify.train_random_forest(*_separable_xy(), ForestConfig(trees=4))
    labels = model.labels_from_scores(np.array([0.5, 0.5 + 1e-9, 0.49]))
    assert labels.tolist() == [0, 1, 0]


def test_forest_max_depth_one_builds_stumps():
    X, y = _separable_xy()
    model = classify.train_random_forest(
        X, y, ForestConfig(trees=10, max_depth=1), seed=2
    )
    preds = model.labels_from_scores(model.scores(X))
    # A single split suffices for linearly separable clusters.
    assert (preds == y).all()


def test_forest_rejects_single_class():
    X = np.ones((6, 2))
    with pytest.raises(DegenerateDataError):
        classify.train_random_forest(X, np.zeros(6, dtype=int))


def test_forest_rejects_empty_training_set():
    with pytest.raises(SizeError):
        classify.train_random_forest(np.empty((0, 3)), np.empty(0, dtype=int))


def test_forest_rejects_shape_mismatch():
    X, y = _separable_xy()
    with pytest.raises(ParameterError):
        classify.train_random_forest(X, y[:-1])


def test_forest_config_validation():
    with pytest.raises(ParameterError):
        ForestConfig(trees=0)
    with pytest.raises(ParameterError):
        ForestConfig(max_depth=0)
    with pytest.raises(ParameterError):
        ForestConfig(min_leaf=0)


def test_zero_width_features_fall_back_to_majority():
    X = np.empty((6, 0))
    y = np.array([0, 0, 0, 0, 1, 1])
    model = classify.train_random_forest(X, y, ForestConfig(trees=5), seed=0)
    preds = model.labels_from_scores(model.scores(np.empty((2, 0))))
    assert preds.tolist() == [0, 0]


def test_tuning_grid_and_tie_break():
    # Trivially separable data makes every candidate score a perfect 1.0,
    # forcing the tie-break: fewest trees first, bounded depth before None.
    X, y = _separable_xy(n_per_class=24, seed=9)
    best, scores = classify.tune_random_forest(X, y, seed=13)
    assert set(scores) == {
        (t, d)
        for t in classify.TUNING_TREE_GRID
        for d in classify.TUNING_DEPTH_GRID
    }
    assert all(v == pytest.approx(1.0) for v in scores.values())
    assert (best.trees, best.max_depth) == (50, 16)
    assert best.tuning is False


def test_tuning_needs_enough_samples_per_class():
    X, y = _separable_xy(n_per_class=4)
    with pytest.raises(SizeError):
        classify.tune_random_forest(X, y, folds=10)


def test_train_with_tuning_flag_records_choice():
    X, y = _separable_xy(n_per_class=12, seed=4)
    model = classify.train_random_forest(
        X, y, ForestConfig(trees=100, tuning=True), seed=21
    )
    assert model.metadata["trees"] == 50
    assert model.metadata["max_depth"] == 16
    assert "cv_f1" in model.metadata


# ---------------------------------------------------------------------------
# Predictions and evaluation.
# ---------------------------------------------------------------------------


def test_predict_produces_rows_without_truth():
    texts = ["x", "y", "x x", "y y"]
    labels = np.array([1, 0, 1, 0])
    vec = classify.fit_vectorizer(texts, VectorizerConfig(min_df=1))
    model = classify.train_naive_bayes(vec.transform_counts(texts), labels)
    model = model.with_vectorizer(vec)
    preds = classify.predict(model, ["x", "y"], pair_ids=["a", "b"])
    assert preds.pair_ids == ("a", "b")
    assert not preds.has_true_labels()
    assert all(r.score is not None for r in preds.rows)


def test_prediction_row_validation():
    with pytest.raises(PredictionError):
        PredictionRow("p1", true_label=2, predicted_label=0)
    with pytest.raises(PredictionError):
        PredictionRow("p1", true_label=0, predicted_label=3)
    with pytest.raises(PredictionError):
        PredictionRow("", true_label=0, predicted_label=0)
    with pytest.raises(PredictionError):
        PredictionRow("p1", true_label=0, predicted_label=0, score=float("nan"))


def test_prediction_set_rejects_duplicate_ids():
    rows = [PredictionRow("p1", 1, 1), PredictionRow("p1", 0, 0)]
    with pytest.raises(PredictionError):
        PredictionSet(rows)


def test_with_true_labels_preserves_order():
    preds = PredictionSet([PredictionRow("a", None, 1), PredictionRow("b", None, 0)])
    tagged = preds.with_true_labels([0, 1])
    assert [r.true_label for r in tagged.rows] == [0, 1]
    assert tagged.pair_ids == ("a", "b")


def test_evaluate_oracle():
    rows = [
        PredictionRow("p1", 1, 1),
        PredictionRow("p2", 1, 0),
        PredictionRow("p3", 0, 1),
        PredictionRow("p4", 0, 0),
        PredictionRow("p5", 1, 1),
    ]
    cm = classify.evaluate(PredictionSet(rows))
    assert (cm.tp, cm.fp, cm.fn, cm.tn) == (2, 1, 1, 1)


def test_evaluate_requires_truth():
    preds = PredictionSet([PredictionRow("a", None, 1)])
    with pytest.raises(PredictionError):
        classify.evaluate(preds)


def test_confusion_matrix_validation_and_rates():
    with pytest.raises(ParameterError):
        ConfusionMatrix(tp=-1, fp=0, fn=0, tn=0)
    cm = ConfusionMatrix(tp=0, fp=0, fn=0, tn=4)
    assert cm.precision() == 0.0
    assert cm.recall() == 0.0
    assert cm.total == 4
    cm2 = ConfusionMatrix(tp=3, fp=1, fn=2, tn=0)
    assert cm2.precision() == pytest.approx(0.75)
    assert cm2.recall() == pytest.approx(0.6)


@given(
    labels=st.lists(
        st.tuples(st.integers(0, 1), st.integers(0, 1)), min_size=1, max_size=60
    )
)
@settings(max_examples=200, deadline=None)
def test_confusion_from_labels_matches_counting(labels):
    y_true = [a for a, _ in labels]
    y_pred = [b for _, b in labels]
    cm = classify.confusion_from_labels(y_true, y_pred)
    assert cm.tp == sum(1 for t, p in labels if t == 1 and p == 1)
    assert cm.fp == sum(1 for t, p in labels if t == 0 and p == 1)
    assert cm.fn == sum(1 for t, p in labels if t == 1 and p == 0)
    assert cm.tn == sum(1 for t, p in labels if t == 0 and p == 0)


# ---------------------------------------------------------------------------
# Prediction CSV interchange.
# ---------------------------------------------------------------------------


def test_prediction_csv_round_trip_with_scores():
    rows = [
        PredictionRow("p1", 1, 1, score=0.875),
        PredictionRow("p2", 0, 1, score=0.625),
    ]
    data = classify.write_predictions_csv(PredictionSet(rows))
    loaded = classify.load_external_predictions(data)
    assert loaded.pair_ids == ("p1", "p2")
    assert [r.predicted_label for r in loaded.rows] == [1, 1]
    assert loaded.rows[0].score == pytest.approx(0.875)


def test_prediction_csv_without_scores_has_three_columns():
    rows = [PredictionRow("p1", 1, 0), PredictionRow("p2", 0, 0)]
    data = classify.write_predictions_csv(PredictionSet(rows))
    header = data.decode().splitlines()[0]
    assert header == "pair_id,true_label,predicted_label"
    loaded = classify.load_external_predictions(data)
    assert all(r.score is None for r in loaded.rows)


def test_write_requires_true_labels():
    preds = PredictionSet([PredictionRow("a", None, 1)])
    with pytest.raises(PredictionError):
        classify.write_predictions_csv(preds)


def test_load_accepts_blank_score_cells():
    text = "pair_id,true_label,predicted_label,score\np1,1,1,0.75\np2,0,0,\n"
    loaded = classify.load_external_predictions(text)
    assert loaded.rows[0].score == pytest.approx(0.75)
    assert loaded.rows[1].score is None


def test_load_rejects_wrong_header():
    with pytest.raises(SchemaError):
        classify.load_external_predictions("id,truth,guess\na,1,1\n")


def test_load_rejects_bad_label_with_line_number():
    text = "pair_id,true_label,predicted_label\np1,1,1\np2,7,0\n"
    with pytest.raises(PredictionError) as err:
        classify.load_external_predictions(text)
    assert "3" in str(err.value)


def test_load_rejects_non_numeric_score():
    text = "pair_id,true_label,predicted_label,score\np1,1,1,high\n"
    with pytest.raises(ParseError):
        classify.load_external_predictions(text)


def test_load_accepts_file_objects():
    text = "pair_id,true_label,predicted_label\np1,1,1\n"
    loaded = classify.load_external_predictions(io.StringIO(text))
    assert loaded.pair_ids == ("p1",)
