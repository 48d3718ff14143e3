import json
import math
from pathlib import Path

import pytest
import transformers

from bert_adapter import cli
from bert_adapter.adapter import (
    ConfigError,
    CorpusFormatError,
    FineTuneConfig,
    ResourceError,
    finetune_and_predict,
    read_pair_examples,
)

from roiml import corpus, harness, report, roi
from roiml.classify import load_external_predictions


def _quick(tiny_checkpoint, **overrides) -> FineTuneConfig:
    settings = {
        "epochs": 1,
        "batch_size": 16,
        "max_length": 32,
        "base_model": tiny_checkpoint,
        "seed": 7,
    }
    settings.update(overrides)
    return FineTuneConfig(**settings)


# --- configuration ----------------------------------------------------------


def test_defaults_match_published_recipe():
    config = FineTuneConfig()
    assert config.epochs == 3
    assert config.batch_size == 32
    assert config.learning_rate == 2e-5
    assert config.validation_fraction == 0.1
    assert config.base_model == "bert-base-uncased"


def test_config_rejects_bad_values():
    bad = [
        {"batch_size": 0},
        {"batch_size": -4},
        {"epochs": -1},
        {"epochs": 1.5},
        {"learning_rate": 0.0},
        {"learning_rate": float("inf")},
        {"validation_fraction": 1.0},
        {"validation_fraction": -0.1},
        {"max_length": 4},
        {"base_model": ""},
        {"seed": "0"},
    ]
    for overrides in bad:
        with pytest.raises(ConfigError):
            FineTuneConfig(**overrides)


# --- corpus reading ---------------------------------------------------------

CORPUS_HEADER = "pair_id,left_id,right_id,label,kind,combined_text"


def test_read_pair_examples_splits_segments(tmp_path):
    path = tmp_path / "pairs.csv"
    path.write_text(
        f"{CORPUS_HEADER}\n"
        "p1,a,b,1,REQUIRES,left words [SEP] right words\n"
        "p2,c,d,0,REQUIRES,no separator here\n"
    )
    examples = read_pair_examples(path)
    assert [(e.pair_id, e.label) for e in examples] == [("p1", 1), ("p2", 0)]
    assert (examples[0].left, examples[0].right) == ("left words", "right words")
    assert (examples[1].left, examples[1].right) == ("no separator here", "")


def test_read_pair_examples_row_diagnostics(tmp_path):
    cases = [
        ("", "no header"),
        ("pair_id,label\np1,1\n", "expected header"),
        (f"{CORPUS_HEADER}\np1,a,b,2,REQUIRES,x [SEP] y\n", "line 2"),
        (
            f"{CORPUS_HEADER}\np1,a,b,1,REQUIRES,x [SEP] y\n"
            "p1,c,d,0,REQUIRES,z [SEP] w\n",
            "line 3",
        ),
        (f"{CORPUS_HEADER}\np1,a,b,1\n", "line 2"),
        (f"{CORPUS_HEADER}\n,a,b,1,REQUIRES,x [SEP] y\n", "empty pair_id"),
        (f"{CORPUS_HEADER}\n", "no data rows"),
    ]
    for text, needle in cases:
        path = tmp_path / "bad.csv"
        path.write_text(text)
        with pytest.raises(CorpusFormatError) as err:
            read_pair_examples(path)
        assert needle in str(err.value)


# --- the published-recipe contract ------------------------------------------


def test_default_recipe_end_to_end(tmp_path, toy_data, tiny_checkpoint):
    out_csv = tmp_path / "preds_f0.8.csv"
    config = FineTuneConfig(base_model=tiny_checkpoint, max_length=32, seed=7)
    result = finetune_and_predict(
        toy_data.train_csv, toy_data.test_csv, out_csv, config
    )

    assert result.n_test == 40
    assert result.n_train == 144 and result.n_validation == 16
    assert len(result.epoch_losses) == 3
    for record in result.epoch_losses:
        assert math.isfinite(record["train_loss"])
        assert math.isfinite(record["validation_loss"])

    # The toolkit's own loader is the schema oracle.
    pset = load_external_predictions(out_csv.read_bytes())
    assert len(pset.rows) == 40
    assert sorted(pset.pair_ids) == sorted(toy_data.test_ids)
    for row in pset.rows:
        assert row.predicted_label in (0, 1)
        assert 0.0 <= row.score <= 1.0
        assert row.predicted_label == int(row.score > 0.5)

    metadata = json.loads(result.metadata_json.read_text())
    assert metadata["config"]["epochs"] == 3
    assert metadata["config"]["base_model"] == tiny_checkpoint
    assert metadata["retrained_from_base"] is True
    assert metadata["n_test"] == 40

    # And the file replays through the evaluation pipeline unmodified.
    ext = harness.ExternalPredictions("tinybert", {0.8: pset})
    curve = harness.run_curve(
        toy_data.built, toy_data.plan, [0.8], ext, roi.desk_scale(),
        pair_ids=toy_data.ids,
    )
    assert curve.points[0].n_test == 40
    assert curve.points[0].cm.total == 40
    summary_md = report.emit_summary([curve], [harness.summarize(curve)])
    assert "tinybert" in summary_md
    assert report.emit_curve_csv(curve).startswith(b"fraction,")


def test_epochs_zero_scores_with_unadapted_base(tmp_path, toy_data, tiny_checkpoint):
    out_csv = tmp_path / "preds.csv"
    result = finetune_and_predict(
        toy_data.train_csv,
        toy_data.test_csv,
        out_csv,
        _quick(tiny_checkpoint, epochs=0),
    )
    assert result.epoch_losses == ()
    pset = load_external_predictions(out_csv.read_bytes())
    assert len(pset.rows) == 40
    metadata = json.loads(result.metadata_json.read_text())
    assert metadata["epoch_losses"] == []


def test_seeded_reruns_reproduce_labels(tmp_path, toy_data, tiny_checkpoint):
    outputs = []
    for name in ("first.csv", "second.csv"):
        out_csv = tmp_path / name
        finetune_and_predict(
            toy_data.train_csv, toy_data.test_csv, out_csv,
            _quick(tiny_checkpoint, seed=11),
        )
        outputs.append(load_external_predictions(out_csv.read_bytes()))
    first, second = outputs
    assert [r.predicted_label for r in first.rows] == [
        r.predicted_label for r in second.rows
    ]
    for a, b in zip(first.rows, second.rows):
        assert a.score == pytest.approx(b.score, abs=1e-6)


def test_validation_fraction_zero_trains_on_everything(
    tmp_path, toy_data, tiny_checkpoint
):
    result = finetune_and_predict(
        toy_data.train_csv,
        toy_data.test_csv,
        tmp_path / "preds.csv",
        _quick(tiny_checkpoint, validation_fraction=0.0),
    )
    assert result.n_train == 160 and result.n_validation == 0
    assert result.epoch_losses[0]["validation_loss"] is None


def test_out_of_memory_advises_smaller_batch(
    tmp_path, toy_data, tiny_checkpoint, monkeypatch
):
    def explode(self, *args, **kwargs):
        raise RuntimeError("DefaultCPUAllocator: not enough memory")

    monkeypatch.setattr(
        transformers.BertForNextSentencePrediction, "forward", explode
    )
    with pytest.raises(ResourceError) as err:
        finetune_and_predict(
            toy_data.train_csv,
            toy_data.test_csv,
            tmp_path / "preds.csv",
            _quick(tiny_checkpoint, epochs=0, batch_size=8),
        )
    message = str(err.value)
    assert "batch_size 8" in message
    assert "--batch 4" in message
    assert not (tmp_path / "preds.csv").exists()


# --- command line -----------------------------------------------------------


def test_cli_end_to_end(tmp_path, toy_data, tiny_checkpoint, capsys):
    out_csv = tmp_path / "preds.csv"
    code = cli.main(
        [
            "--train", str(toy_data.train_csv),
            "--test", str(toy_data.test_csv),
            "--out", str(out_csv),
            "--epochs", "1",
            "--batch", "16",
            "--seed", "4",
            "--base-model", tiny_checkpoint,
            "--max-length", "32",
        ]
    )
    captured = capsys.readouterr()
    assert code == 0
    assert "40 rows" in captured.out
    assert load_external_predictions(out_csv.read_bytes()).has_true_labels()
    assert (tmp_path / "preds.meta.json").exists()


def test_cli_maps_errors_to_exit_codes(tmp_path, toy_data, tiny_checkpoint, capsys):
    base = [
        "--test", str(toy_data.test_csv),
        "--out", str(tmp_path / "p.csv"),
        "--base-model", tiny_checkpoint,
    ]
    code = cli.main(["--train", str(tmp_path / "missing.csv")] + base)
    captured = capsys.readouterr()
    assert code == 2
    assert "missing.csv" in captured.err

    code = cli.main(
        ["--train", str(toy_data.train_csv)] + base + ["--batch", "0"]
    )
    captured = capsys.readouterr()
    assert code == 1
    assert "batch_size" in captured.err

    bad = tmp_path / "bad.csv"
    bad.write_text("pair_id,label\np1,1\n")
    code = cli.main(["--train", str(bad)] + base)
    captured = capsys.readouterr()
    assert code == 1
    assert "expected header" in captured.err
