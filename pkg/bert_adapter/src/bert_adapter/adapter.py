"""Fine-tune a sentence-pair encoder and emit interchange predictions.

The entry point is :func:`finetune_and_predict`. It consumes two labeled
pair corpora in the evaluation toolkit's CSV schema (train and test),
adapts a pre-trained BERT next-sentence-prediction head to the dependency
labels, and writes one prediction row per test pair in the interchange
schema, plus a run-metadata JSON next to it.

Conventions fixed here:

- class index 1 of the pair-classification head means "dependent", and the
  emitted score is the softmax probability of that class;
- a pair's two text segments are recovered by splitting the corpus column
  ``combined_text`` on the literal ``" [SEP] "`` marker;
- every training run starts from the base checkpoint, never from a
  previously adapted model, so points of a learning curve stay independent.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

DEFAULT_BASE_MODEL = "bert-base-uncased"

CORPUS_HEADER = ("pair_id", "left_id", "right_id", "label", "kind", "combined_text")
INTERCHANGE_HEADER = ("pair_id", "true_label", "predicted_label", "score")
SEGMENT_SEPARATOR = " [SEP] "


class AdapterError(Exception):
    """Base for everything this package raises on purpose."""


class ConfigError(AdapterError):
    pass


class CorpusFormatError(AdapterError):
    pass


class ModelError(AdapterError):
    pass


class ResourceError(AdapterError):
    pass


@dataclass(frozen=True)
class FineTuneConfig:
    """Training recipe. Defaults are the published fine-tuning settings."""

    epochs: int = 3
    batch_size: int = 32
    learning_rate: float = 2e-5
    validation_fraction: float = 0.1
    base_model: str = DEFAULT_BASE_MODEL
    seed: int = 0
    max_length: int = 128

    def __post_init__(self) -> None:
        if not isinstance(self.epochs, int) or self.epochs < 0:
            raise ConfigError(f"epochs must be an integer >= 0, got {self.epochs!r}")
        if not isinstance(self.batch_size, int) or self.batch_size < 1:
            raise ConfigError(
                f"batch_size must be an integer >= 1, got {self.batch_size!r}"
            )
        if not (math.isfinite(self.learning_rate) and self.learning_rate > 0):
            raise ConfigError(
                f"learning_rate must be finite and positive, got {self.learning_rate!r}"
            )
        if not 0 <= self.validation_fraction < 1:
            raise ConfigError(
                "validation_fraction must be in [0, 1), got "
                f"{self.validation_fraction!r}"
            )
        if not isinstance(self.seed, int):
            raise ConfigError(f"seed must be an integer, got {self.seed!r}")
        if not isinstance(self.max_length, int) or self.max_length < 8:
            raise ConfigError(
                f"max_length must be an integer >= 8, got {self.max_length!r}"
            )
        if not self.base_model:
            raise ConfigError("base_model must name a checkpoint or local directory")

    def to_dict(self) -> dict:
        return {
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "learning_rate": self.learning_rate,
            "validation_fraction": self.validation_fraction,
            "base_model": self.base_model,
            "seed": self.seed,
            "max_length": self.max_length,
        }


@dataclass(frozen=True)
class PairExample:
    pair_id: str
    label: int
    left: str
    right: str


@dataclass(frozen=True)
class RunResult:
    predictions_csv: Path
    metadata_json: Path
    n_train: int
    n_validation: int
    n_test: int
    epoch_losses: tuple[dict, ...]


def read_pair_examples(path: str | Path) -> list[PairExample]:
    """Read a labeled pair corpus CSV into examples.

    The header must match the corpus schema exactly. Labels outside {0, 1},
    duplicate pair ids, and short rows are reported with their line number,
    because silently dropping rows would skew the economics downstream.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CorpusFormatError(f"{path}: corpus CSV has no header row") from None
        if tuple(header) != CORPUS_HEADER:
            raise CorpusFormatError(
                f"{path}: expected header {','.join(CORPUS_HEADER)!r}, "
                f"got {','.join(header)!r}"
            )
        examples: list[PairExample] = []
        seen: set[str] = set()
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(CORPUS_HEADER):
                raise CorpusFormatError(
                    f"{path}: line {line_no}: expected {len(CORPUS_HEADER)} "
                    f"columns, got {len(row)}"
                )
            pair_id, _, _, label_text, _, combined = row
            if not pair_id:
                raise CorpusFormatError(f"{path}: line {line_no}: empty pair_id")
            if pair_id in seen:
                raise CorpusFormatError(
                    f"{path}: line {line_no}: duplicate pair_id {pair_id!r}"
                )
            seen.add(pair_id)
            if label_text not in ("0", "1"):
                raise CorpusFormatError(
                    f"{path}: line {line_no}: label must be 0 or 1, "
                    f"got {label_text!r}"
                )
            left, sep, right = combined.partition(SEGMENT_SEPARATOR)
            if not sep:
                right = ""
            examples.append(PairExample(pair_id, int(label_text), left, right))
    if not examples:
        raise CorpusFormatError(f"{path}: corpus CSV has no data rows")
    return examples


def _quiet_transformers() -> None:
    # Progress bars and info logs would interleave with CLI output.
    from transformers.utils import logging as hf_logging

    hf_logging.set_verbosity_error()
    hf_logging.disable_progress_bar()


def _load(config: FineTuneConfig):
    from transformers import AutoTokenizer, BertForNextSentencePrediction

    try:
        tokenizer = AutoTokenizer.from_pretrained(config.base_model)
        model = BertForNextSentencePrediction.from_pretrained(config.base_model)
    except (OSError, ValueError) as exc:
        raise ModelError(
            f"cannot load base checkpoint {config.base_model!r}: {exc}. "
            "Pass a local checkpoint directory when the model hub is unreachable."
        ) from exc
    return tokenizer, model


def _encode(tokenizer, batch: Sequence[PairExample], max_length: int):
    return tokenizer(
        [ex.left for ex in batch],
        [ex.right for ex in batch],
        padding=True,
        truncation=True,
        max_length=max_length,
        return_tensors="pt",
    )


def _batches(examples: Sequence[PairExample], size: int):
    for start in range(0, len(examples), size):
        yield examples[start : start + size]


def _mean_loss(model, tokenizer, examples, config, torch) -> float:
    total = 0.0
    for batch in _batches(examples, config.batch_size):
        enc = _encode(tokenizer, batch, config.max_length)
        labels = torch.tensor([ex.label for ex in batch])
        out = model(**enc, labels=labels)
        total += float(out.loss.detach()) * len(batch)
    return total / len(examples)


def finetune_and_predict(
    train_csv: str | Path,
    test_csv: str | Path,
    out_csv: str | Path,
    config: FineTuneConfig = FineTuneConfig(),
) -> RunResult:
    """Adapt the base checkpoint on the train corpus and score the test one.

    Writes the interchange prediction CSV to ``out_csv`` and a metadata JSON
    (config echo, split sizes, per-epoch losses) alongside it, both
    atomically. With ``epochs=0`` the unadapted base model predicts, which
    is only useful as a baseline or a smoke test.

    Seeded runs reproduce identical predicted labels on CPU. Scores may
    drift within about 1e-6 across hardware, so downstream comparisons
    should key on labels.
    """
    import torch

    _quiet_transformers()
    train_examples = read_pair_examples(train_csv)
    test_examples = read_pair_examples(test_csv)
    out_path = Path(out_csv)
    meta_path = out_path.with_name(out_path.stem + ".meta.json")

    torch.manual_seed(config.seed)
    tokenizer, model = _load(config)
    device = torch.device("cuda" if torch.cuda.is_available() else "cpu")
    model.to(device)

    # Hold out a validation share for loss reporting. The recipe trains a
    # fixed number of epochs, so validation never steers training.
    order = np.random.default_rng(config.seed).permutation(len(train_examples))
    n_val = int(round(len(train_examples) * config.validation_fraction))
    val_examples = [train_examples[i] for i in order[:n_val]]
    fit_examples = [train_examples[i] for i in order[n_val:]]
    if not fit_examples:
        raise ConfigError(
            f"validation_fraction {config.validation_fraction} leaves no "
            f"training examples out of {len(train_examples)}"
        )

    epoch_losses: list[dict] = []
    shuffler = np.random.default_rng(config.seed + 1)
    try:
        if config.epochs > 0:
            optimizer = torch.optim.AdamW(
                model.parameters(), lr=config.learning_rate
            )
            for epoch in range(1, config.epochs + 1):
                model.train()
                epoch_order = shuffler.permutation(len(fit_examples))
                shuffled = [fit_examples[i] for i in epoch_order]
                total = 0.0
                for batch in _batches(shuffled, config.batch_size):
                    enc = _encode(tokenizer, batch, config.max_length).to(device)
                    labels = torch.tensor(
                        [ex.label for ex in batch], device=device
                    )
                    out = model(**enc, labels=labels)
                    out.loss.backward()
                    optimizer.step()
                    optimizer.zero_grad()
                    total += float(out.loss.detach()) * len(batch)
                model.eval()
                record = {
                    "epoch": epoch,
                    "train_loss": total / len(fit_examples),
                    "validation_loss": None,
                }
                if val_examples:
                    with torch.no_grad():
                        record["validation_loss"] = _mean_loss(
                            model, tokenizer, val_examples, config, torch
                        )
                epoch_losses.append(record)

        model.eval()
        rows: list[tuple[str, int, int, float]] = []
        with torch.no_grad():
            for batch in _batches(test_examples, config.batch_size):
                enc = _encode(tokenizer, batch, config.max_length).to(device)
                logits = model(**enc).logits
                scores = torch.softmax(logits, dim=-1)[:, 1]
                for ex, score in zip(batch, scores):
                    value = float(score)
                    rows.append((ex.pair_id, ex.label, int(value > 0.5), value))
    except (RuntimeError, MemoryError) as exc:
        if isinstance(exc, MemoryError) or "memory" in str(exc).lower():
            raise ResourceError(
                f"out of memory with batch_size {config.batch_size}; retry "
                f"with a smaller batch, for example "
                f"--batch {max(1, config.batch_size // 2)}"
            ) from exc
        raise

    _write_text(
        out_path,
        _render_predictions(rows),
    )
    import transformers

    metadata = {
        "tool": "bert-adapter",
        "config": config.to_dict(),
        "device": device.type,
        "n_train": len(fit_examples),
        "n_validation": len(val_examples),
        "n_test": len(test_examples),
        "epoch_losses": epoch_losses,
        "retrained_from_base": True,
        "torch_version": torch.__version__,
        "transformers_version": transformers.__version__,
    }
    _write_text(meta_path, json.dumps(metadata, indent=2, sort_keys=True) + "\n")
    return RunResult(
        predictions_csv=out_path,
        metadata_json=meta_path,
        n_train=len(fit_examples),
        n_validation=len(val_examples),
        n_test=len(test_examples),
        epoch_losses=tuple(epoch_losses),
    )


def _render_predictions(rows: Sequence[tuple[str, int, int, float]]) -> str:
    lines = [",".join(INTERCHANGE_HEADER)]
    for pair_id, true_label, predicted, score in rows:
        lines.append(f"{pair_id},{true_label},{predicted},{score:.6f}")
    return "\n".join(lines) + "\n"


def _write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)
