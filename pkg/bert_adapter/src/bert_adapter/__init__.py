"""Transformer fine-tuning adapter for the roiml interchange formats.

The adapter reads labeled pair corpora from CSV, fine-tunes a pre-trained
sentence-pair encoder, and writes predictions in the interchange schema the
evaluation toolkit replays. It talks to that toolkit only through files, so
either side can be installed, upgraded, or removed independently.
"""

from .adapter import (
    AdapterError,
    ConfigError,
    CorpusFormatError,
    DEFAULT_BASE_MODEL,
    FineTuneConfig,
    ModelError,
    PairExample,
    ResourceError,
    RunResult,
    finetune_and_predict,
    read_pair_examples,
)

__all__ = [
    "AdapterError",
    "ConfigError",
    "CorpusFormatError",
    "DEFAULT_BASE_MODEL",
    "FineTuneConfig",
    "ModelError",
    "PairExample",
    "ResourceError",
    "RunResult",
    "finetune_and_predict",
    "read_pair_examples",
]
