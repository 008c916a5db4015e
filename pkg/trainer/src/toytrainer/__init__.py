"""Toy reference trainer for NSPP/NSP datasets emitted by the negata builder."""

__version__ = "0.1.0"

from .data import (DataError, Example, Vocab, cue_presence_heuristic_accuracy,
                   encode_example, load_datasets, load_split)
from .model import ToyModel, batch_tensor
from .train import EarlyStopper, History, TrainConfig, task_losses, train
