"""Tiny sequence encoder with two independent classification heads."""

from __future__ import annotations

import torch
from torch import nn

from .data import PAD


class ToyModel(nn.Module):
    """Learned embeddings + a small transformer encoder; the pooled [CLS]
    state feeds two separate linear heads, one per task."""

    def __init__(self, vocab_size, hidden=48, layers=1, heads=4,
                 max_len=128, dropout=0.0):
        super().__init__()
        self.embed = nn.Embedding(vocab_size, hidden, padding_idx=PAD)
        self.position = nn.Embedding(max_len, hidden)
        layer = nn.TransformerEncoderLayer(
            d_model=hidden, nhead=heads, dim_feedforward=hidden * 2,
            dropout=dropout, batch_first=True)
        self.encoder = nn.TransformerEncoder(layer, num_layers=layers)
        self.head_nspp = nn.Linear(hidden, 2)
        self.head_nsp = nn.Linear(hidden, 2)
        self.max_len = max_len

    def forward(self, token_ids):
        """token_ids: (batch, seq) padded with PAD. Returns logits per task."""
        seq = token_ids[:, : self.max_len]
        positions = torch.arange(seq.size(1), device=seq.device)
        states = self.embed(seq) + self.position(positions)[None, :, :]
        mask = seq.eq(PAD)
        encoded = self.encoder(states, src_key_padding_mask=mask)
        pooled = encoded[:, 0, :]
        return {"nspp": self.head_nspp(pooled), "nsp": self.head_nsp(pooled)}


def batch_tensor(examples, vocab, device="cpu"):
    """Pad encoded examples into a (batch, seq) LongTensor plus label maps."""
    ids = [vocab.encode(ex.tokens) for ex in examples]
    width = max(len(row) for row in ids)
    padded = [row + [PAD] * (width - len(row)) for row in ids]
    tokens = torch.tensor(padded, dtype=torch.long, device=device)
    labels = {}
    for task in ("nspp", "nsp"):
        if all(task in ex.labels for ex in examples):
            labels[task] = torch.tensor([ex.labels[task] for ex in examples],
                                        dtype=torch.long, device=device)
    return tokens, labels
