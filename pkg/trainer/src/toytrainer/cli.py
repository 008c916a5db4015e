"""Command line: train the toy model on a builder output directory."""

from __future__ import annotations

import argparse
import os
import sys

from .data import DataError
from .train import TrainConfig, train, write_summary


def main(argv=None):
    parser = argparse.ArgumentParser(prog="negata-train")
    parser.add_argument("--data", required=True,
                        help="directory produced by `negata build`")
    parser.add_argument("--mode", choices=["nspp", "nsp", "joint"],
                        default="joint")
    parser.add_argument("--lr", type=float, default=1e-3)
    parser.add_argument("--patience", type=int, default=3)
    parser.add_argument("--epochs", type=int, default=20)
    parser.add_argument("--batch-size", type=int, default=32)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", required=True, help="output directory")
    args = parser.parse_args(argv)

    config = TrainConfig(mode=args.mode, learning_rate=args.lr,
                         patience=args.patience, max_epochs=args.epochs,
                         batch_size=args.batch_size, seed=args.seed)
    try:
        _, history, summary = train(config, args.data)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    os.makedirs(args.out, exist_ok=True)
    history.write_csv(os.path.join(args.out, "history.csv"))
    write_summary(summary, os.path.join(args.out, "summary.json"))
    for task, stats in summary["val"].items():
        print(f"{task}: val accuracy {stats['accuracy']:.3f} "
              f"(epoch {stats['epoch']})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
