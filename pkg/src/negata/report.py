"""Build-report rendering: figures and a delimited summary for a dataset
directory produced by the builder."""

from __future__ import annotations

import json
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

CUE_KEYS = ("not", "nt", "never")


def _load_manifest(build_dir):
    path = os.path.join(build_dir, "manifest.json")
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


def _cue_distribution_figure(manifest, path):
    hists = manifest.get("cue_histograms", {})
    totals = {"negated": [0, 0, 0], "requested": [0, 0, 0], "realized": [0, 0, 0]}
    for hist in hists.values():
        for series in totals:
            for i, key in enumerate(CUE_KEYS):
                totals[series][i] += hist.get(series, {}).get(key, 0)
    fig, ax = plt.subplots(figsize=(5, 3.2))
    width = 0.25
    offsets = (-width, 0.0, width)
    for (series, values), offset in zip(totals.items(), offsets):
        ax.bar([i + offset for i in range(len(CUE_KEYS))], values, width,
               label=series)
    ax.set_xticks(range(len(CUE_KEYS)))
    ax.set_xticklabels(CUE_KEYS)
    ax.set_ylabel("sentences")
    ax.set_title("Cue distribution (all articles)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _rejections_figure(manifest, path):
    rejections = manifest.get("rejections", {})
    fig, ax = plt.subplots(figsize=(6, 3.2))
    reasons = sorted(rejections)
    ax.barh(range(len(reasons)), [rejections[r] for r in reasons])
    ax.set_yticks(range(len(reasons)))
    ax.set_yticklabels(reasons, fontsize=8)
    ax.set_xlabel("sentences")
    ax.set_title("Skipped sentences by reason")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _split_sizes_figure(manifest, path):
    counts = manifest.get("counts", {})
    tasks = [t for t in ("nspp", "nsp") if t in counts]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    width = 0.35
    for offset, split in ((-width / 2, "train"), (width / 2, "val")):
        values = [counts[t].get(split, {}).get("total", 0) for t in tasks]
        ax.bar([i + offset for i in range(len(tasks))], values, width,
               label=split)
    ax.set_xticks(range(len(tasks)))
    ax.set_xticklabels(tasks)
    ax.set_ylabel("examples")
    ax.set_title("Split sizes")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _summary_tsv(manifest, path):
    rows = []
    counts = manifest.get("counts", {})
    for task in sorted(k for k in counts if k != "records"):
        for split, stats in sorted(counts[task].items()):
            for label, n in sorted(stats.get("labels", {}).items()):
                rows.append((task, split, label, n))
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("task\tsplit\tlabel\texamples\n")
        for row in rows:
            handle.write("\t".join(str(v) for v in row) + "\n")


def render_report(build_dir, out_dir=None):
    """Render figures and a TSV summary next to the dataset; returns the
    written paths."""
    out_dir = out_dir or build_dir
    os.makedirs(out_dir, exist_ok=True)
    manifest = _load_manifest(build_dir)
    written = []
    for name, renderer in (("cue_distribution.png", _cue_distribution_figure),
                           ("rejections.png", _rejections_figure),
                           ("split_sizes.png", _split_sizes_figure)):
        path = os.path.join(out_dir, name)
        renderer(manifest, path)
        written.append(path)
    summary = os.path.join(out_dir, "report.tsv")
    _summary_tsv(manifest, summary)
    written.append(summary)
    return written
