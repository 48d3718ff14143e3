"""Command-line front end: corpus CSVs in, interchange predictions out."""

from __future__ import annotations

import argparse
import sys

from .adapter import AdapterError, FineTuneConfig, finetune_and_predict

_DEFAULTS = FineTuneConfig()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m bert_adapter.cli",
        description=(
            "Fine-tune a pre-trained sentence-pair encoder on a labeled "
            "pair corpus and write interchange predictions for a test corpus."
        ),
    )
    parser.add_argument("--train", required=True, help="training corpus CSV")
    parser.add_argument("--test", required=True, help="test corpus CSV")
    parser.add_argument("--out", required=True, help="prediction CSV to write")
    parser.add_argument("--epochs", type=int, default=_DEFAULTS.epochs)
    parser.add_argument("--batch", type=int, default=_DEFAULTS.batch_size)
    parser.add_argument("--lr", type=float, default=_DEFAULTS.learning_rate)
    parser.add_argument("--seed", type=int, default=_DEFAULTS.seed)
    parser.add_argument(
        "--base-model",
        default=_DEFAULTS.base_model,
        help="checkpoint id or local checkpoint directory",
    )
    parser.add_argument(
        "--val-fraction", type=float, default=_DEFAULTS.validation_fraction
    )
    parser.add_argument("--max-length", type=int, default=_DEFAULTS.max_length)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = FineTuneConfig(
            epochs=args.epochs,
            batch_size=args.batch,
            learning_rate=args.lr,
            validation_fraction=args.val_fraction,
            base_model=args.base_model,
            seed=args.seed,
            max_length=args.max_length,
        )
        result = finetune_and_predict(args.train, args.test, args.out, config)
    except AdapterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {result.predictions_csv} ({result.n_test} rows)")
    print(f"wrote {result.metadata_json}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
