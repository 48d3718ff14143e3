"""Shared fixtures: a 200-pair toy corpus and a tiny local base checkpoint.

The checkpoint is a real saved model directory, just a very small one, so
tests exercise the same loading path as a full-size published checkpoint
without touching the network.
"""

from pathlib import Path

import pytest
import torch
from transformers import BertConfig, BertForNextSentencePrediction, BertTokenizer

from roiml import corpus, synthetic

TOY_SEED = 3
TOY_PAIRS = 200


class ToyData:
    def __init__(self, root: Path):
        self.root = root
        self.built = synthetic.make_separable_corpus(TOY_PAIRS, seed=TOY_SEED)
        self.plan = corpus.split(self.built, seed=TOY_SEED, test_fraction=0.2)
        self.ids = corpus.default_pair_ids(len(self.built))
        train_idx = sorted(
            self.plan.train_pool_positives + self.plan.train_pool_negatives
        )
        test_idx = list(self.plan.test_set)
        self.test_ids = [self.ids[i] for i in test_idx]
        self.train_csv = root / "train.csv"
        self.test_csv = root / "test.csv"
        self._write(train_idx, self.train_csv)
        self._write(test_idx, self.test_csv)

    def _write(self, indices, path: Path) -> None:
        subset = corpus.PairCorpus([self.built.pairs[i] for i in indices])
        path.write_bytes(
            corpus.write_corpus_csv(subset, [self.ids[i] for i in indices])
        )


@pytest.fixture(scope="session")
def toy_data(tmp_path_factory) -> ToyData:
    return ToyData(tmp_path_factory.mktemp("toy"))


@pytest.fixture(scope="session")
def tiny_checkpoint(tmp_path_factory, toy_data) -> str:
    words: set[str] = set()
    for pair in toy_data.built.pairs:
        for segment in pair.combined_text.split(" [SEP] "):
            words.update(segment.split())
    vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"] + sorted(words)

    ckpt = tmp_path_factory.mktemp("ckpt")
    (ckpt / "vocab.txt").write_text("\n".join(vocab) + "\n")
    tokenizer = BertTokenizer.from_pretrained(str(ckpt))
    config = BertConfig(
        vocab_size=len(vocab),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=64,
        type_vocab_size=2,
    )
    torch.manual_seed(0)
    BertForNextSentencePrediction(config).save_pretrained(str(ckpt))
    tokenizer.save_pretrained(str(ckpt))
    return str(ckpt)
