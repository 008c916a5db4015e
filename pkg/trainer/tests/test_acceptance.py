"""Secondary acceptance: joint-loss identity, learnability on the separable
corpus, and the cue-presence heuristic scoring chance on the NSP stream."""

import torch

from toytrainer.data import cue_presence_heuristic_accuracy, load_datasets
from toytrainer.model import ToyModel, batch_tensor
from toytrainer.train import TrainConfig, task_losses, train


def report(name, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert ok, line


def test_joint_loss_identity(dataset_dir):
    train_examples, _, vocab = load_datasets(dataset_dir, "joint")
    torch.manual_seed(0)
    model = ToyModel(len(vocab))
    worst = 0.0
    for start in range(0, 96, 32):
        tokens, labels = batch_tensor(train_examples[start:start + 32], vocab)
        losses, total, _ = task_losses(model, tokens, labels, ("nspp", "nsp"))
        explicit = losses["nspp"].item() + losses["nsp"].item()
        rel = abs(total.item() - explicit) / max(abs(explicit), 1e-12)
        worst = max(worst, rel)
    report("joint loss equals sum of task losses", worst <= 1e-6,
           f"max relative difference {worst:.2e}")


def test_learnability_and_heuristic_baseline(dataset_dir):
    config = TrainConfig(mode="joint", max_epochs=20, seed=4, layers=2,
                         learning_rate=1e-3)
    _, history, summary = train(config, dataset_dir)
    nspp_acc = summary["val"]["nspp"]["accuracy"]
    nsp_acc = summary["val"]["nsp"]["accuracy"]
    epochs = summary["epochs_run"]
    report("NSPP validation accuracy >= 0.95 within 20 epochs",
           nspp_acc >= 0.95 and epochs <= 20,
           f"accuracy {nspp_acc:.3f}, {epochs} epochs")
    report("NSP validation accuracy >= 0.90 within 20 epochs",
           nsp_acc >= 0.90 and epochs <= 20,
           f"accuracy {nsp_acc:.3f}, {epochs} epochs")

    heuristic = cue_presence_heuristic_accuracy(dataset_dir)
    report("cue-presence heuristic scores 0.50 +/- 0.02 on the NSP stream",
           abs(heuristic - 0.5) <= 0.02, f"accuracy {heuristic:.3f}")
