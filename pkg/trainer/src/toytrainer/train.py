"""Training loop: per-task cross-entropy, summed in joint mode, with early
stopping on validation loss."""

from __future__ import annotations

import csv
import json
import random
from dataclasses import dataclass, field

import torch
from torch import nn

from .data import DataError, load_datasets
from .model import ToyModel, batch_tensor


@dataclass(frozen=True)
class TrainConfig:
    mode: str = "joint"            # nspp | nsp | joint
    learning_rate: float = 1e-3    # 1e-6 matches the full-scale recipe
    patience: int = 3
    max_epochs: int = 20
    batch_size: int = 32
    seed: int = 0
    hidden: int = 48
    layers: int = 1

    def tasks(self):
        return ("nspp", "nsp") if self.mode == "joint" else (self.mode,)

    def validate(self):
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        if self.mode not in ("nspp", "nsp", "joint"):
            raise ValueError(f"unknown mode: {self.mode}")


class EarlyStopper:
    """Stop after ``patience`` consecutive epochs without improvement."""

    def __init__(self, patience):
        self.patience = patience
        self.best = float("inf")
        self.best_epoch = 0
        self.stale = 0

    def step(self, epoch, loss):
        """Record one epoch's validation loss; True means stop now."""
        if loss < self.best:
            self.best = loss
            self.best_epoch = epoch
            self.stale = 0
            return False
        self.stale += 1
        return self.stale >= self.patience


@dataclass
class History:
    rows: list = field(default_factory=list)  # (epoch, split, task, loss, acc)

    def add(self, epoch, split, task, loss, accuracy):
        self.rows.append((epoch, split, task, float(loss), float(accuracy)))

    def write_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["epoch", "split", "task", "loss", "accuracy"])
            writer.writerows(self.rows)

    def last(self, split, task):
        for epoch, s, t, loss, acc in reversed(self.rows):
            if s == split and t == task:
                return {"epoch": epoch, "loss": loss, "accuracy": acc}
        return None


def task_losses(model, tokens, labels, tasks):
    """Per-task cross-entropy and their sum (the joint objective)."""
    logits = model(tokens)
    criterion = nn.CrossEntropyLoss()
    losses = {task: criterion(logits[task], labels[task]) for task in tasks}
    total = sum(losses.values())
    return losses, total, logits


def _batches(examples, batch_size, rng=None):
    order = list(range(len(examples)))
    if rng is not None:
        rng.shuffle(order)
    for start in range(0, len(order), batch_size):
        yield [examples[i] for i in order[start:start + batch_size]]


def _evaluate(model, examples, vocab, config):
    model.eval()
    tasks = config.tasks()
    totals = {task: 0.0 for task in tasks}
    hits = {task: 0 for task in tasks}
    count = 0
    with torch.no_grad():
        for chunk in _batches(examples, config.batch_size):
            tokens, labels = batch_tensor(chunk, vocab)
            losses, _, logits = task_losses(model, tokens, labels, tasks)
            for task in tasks:
                totals[task] += losses[task].item() * len(chunk)
                hits[task] += (logits[task].argmax(dim=1)
                               == labels[task]).sum().item()
            count += len(chunk)
    return ({task: totals[task] / count for task in tasks},
            {task: hits[task] / count for task in tasks})


def train(config, data_dir):
    """Train per the config on a builder output directory.

    Returns (model, history, summary). Refuses to train when any active
    task's training labels are constant.
    """
    config.validate()
    torch.manual_seed(config.seed)
    rng = random.Random(config.seed)
    train_examples, val_examples, vocab = load_datasets(data_dir, config.mode)

    for task in config.tasks():
        values = {ex.labels[task] for ex in train_examples}
        if len(values) < 2:
            raise DataError(f"degenerate task {task}: training labels are "
                            f"constant ({values})")

    model = ToyModel(len(vocab), hidden=config.hidden, layers=config.layers)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    stopper = EarlyStopper(config.patience)
    history = History()

    epochs_run = 0
    for epoch in range(1, config.max_epochs + 1):
        epochs_run = epoch
        model.train()
        for chunk in _batches(train_examples, config.batch_size, rng):
            tokens, labels = batch_tensor(chunk, vocab)
            _, total, _ = task_losses(model, tokens, labels, config.tasks())
            optimizer.zero_grad()
            total.backward()
            optimizer.step()

        for split, examples in (("train", train_examples),
                                ("val", val_examples)):
            losses, accs = _evaluate(model, examples, vocab, config)
            for task in config.tasks():
                history.add(epoch, split, task, losses[task], accs[task])

        val_losses, _ = _evaluate(model, val_examples, vocab, config)
        if stopper.step(epoch, sum(val_losses.values())):
            break

    summary = {
        "mode": config.mode,
        "epochs_run": epochs_run,
        "best_epoch": stopper.best_epoch,
        "best_val_loss": stopper.best,
        "val": {task: history.last("val", task) for task in config.tasks()},
        "config": {
            "learning_rate": config.learning_rate,
            "patience": config.patience,
            "max_epochs": config.max_epochs,
            "batch_size": config.batch_size,
            "seed": config.seed,
        },
    }
    return model, history, summary


def write_summary(summary, path):
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(summary, handle, indent=2, sort_keys=True)
        handle.write("\n")
