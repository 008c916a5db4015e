"""Dataset loading and encoding for the builder's JSON-lines files.

The trainer consumes nspp.{split}.jsonl and nsp.{split}.jsonl exactly as
emitted. Joint mode joins the two streams on the source triple so every
(S1, X) pair carries both an is-next label and the polarity of the true next
sentence.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

PAD, CLS, SEP, UNK = 0, 1, 2, 3
SPECIALS = ("[PAD]", "[CLS]", "[SEP]", "[UNK]")

MODES = ("nspp", "nsp", "joint")


class DataError(ValueError):
    pass


def tokenize(text):
    return text.lower().split()


@dataclass(frozen=True)
class Example:
    tokens: tuple          # surface tokens incl. [CLS]/[SEP]
    labels: dict           # task name -> 0/1


class Vocab:
    def __init__(self, tokens=()):
        self.index = {tok: i for i, tok in enumerate(SPECIALS)}
        for tok in tokens:
            if tok not in self.index:
                self.index[tok] = len(self.index)

    def __len__(self):
        return len(self.index)

    def encode(self, tokens):
        return [self.index.get(tok, UNK) for tok in tokens]

    @classmethod
    def from_examples(cls, examples):
        seen = []
        known = set(SPECIALS)
        for example in examples:
            for tok in example.tokens:
                if tok not in known:
                    known.add(tok)
                    seen.append(tok)
        return cls(seen)


def _read_jsonl(path):
    if not os.path.exists(path):
        raise DataError(f"missing dataset file: {path}")
    with open(path, encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]


def _source_key(record):
    try:
        src = record["source"]
        return (src["doc_id"], src["section_index"], src["sent_index"])
    except KeyError as exc:
        raise DataError(f"record missing source field: {exc}") from exc


def encode_example(record, mode):
    """Token sequence for one builder record.

    nspp mode reads only the first sentence; nsp and joint modes join both
    sentences with the separator token.
    """
    if mode not in MODES:
        raise DataError(f"unknown mode: {mode}")
    s1 = record.get("s1")
    if not s1 or not s1.strip():
        raise DataError("record has no first sentence")
    tokens = ["[CLS]"] + tokenize(s1)
    if mode in ("nsp", "joint"):
        s2 = record.get("s2")
        if not s2 or not s2.strip():
            raise DataError("record has no second sentence")
        tokens += ["[SEP]"] + tokenize(s2)
    return tuple(tokens)


def _nspp_examples(rows):
    return [Example(encode_example(row, "nspp"), {"nspp": int(row["label"])})
            for row in rows]


def _nsp_examples(rows, mode, nspp_labels=None):
    examples = []
    for row in rows:
        labels = {"nsp": int(row["is_next"])}
        if nspp_labels is not None:
            labels["nspp"] = nspp_labels[_source_key(row)]
        examples.append(Example(encode_example(row, mode), labels))
    return examples


def load_split(data_dir, split, mode):
    """Examples for one split in the given mode."""
    if mode == "nspp":
        return _nspp_examples(_read_jsonl(
            os.path.join(data_dir, f"nspp.{split}.jsonl")))
    nsp_rows = _read_jsonl(os.path.join(data_dir, f"nsp.{split}.jsonl"))
    if mode == "nsp":
        return _nsp_examples(nsp_rows, mode)
    nspp_rows = _read_jsonl(os.path.join(data_dir, f"nspp.{split}.jsonl"))
    labels = {_source_key(row): int(row["label"]) for row in nspp_rows}
    missing = [row for row in nsp_rows if _source_key(row) not in labels]
    if missing:
        raise DataError("joint mode: nsp sources missing from the nspp file")
    return _nsp_examples(nsp_rows, mode, nspp_labels=labels)


def load_datasets(data_dir, mode):
    """(train_examples, val_examples, vocab); the vocabulary is built from
    the training split only."""
    train = load_split(data_dir, "train", mode)
    val = load_split(data_dir, "val", mode)
    if not train or not val:
        raise DataError("empty split")
    return train, val, Vocab.from_examples(train)


def cue_presence_heuristic_accuracy(data_dir):
    """NSPP accuracy of the cue-presence shortcut on the NSP stream.

    Predicts "next sentence is negated" whenever the paired second sentence
    contains a reversible cue. The stream pairs every S2 with its reversed
    twin, so this shortcut cannot beat chance.
    """
    def has_cue(text):
        for raw in text.lower().replace("’", "'").split():
            tok = raw.strip(".,;:!?\"()")
            if tok in ("not", "never") or tok.endswith("n't"):
                return True
        return False

    total = correct = 0
    for split in ("train", "val"):
        nspp_rows = _read_jsonl(os.path.join(data_dir, f"nspp.{split}.jsonl"))
        labels = {_source_key(r): int(r["label"]) for r in nspp_rows}
        for row in _read_jsonl(os.path.join(data_dir, f"nsp.{split}.jsonl")):
            predicted = 1 if has_cue(row["s2"]) else 0
            correct += predicted == labels[_source_key(row)]
            total += 1
    if not total:
        raise DataError("no nsp examples found")
    return correct / total
