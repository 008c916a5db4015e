"""Evaluation arithmetic: group consistency over passage-edit groups,
top-1 error rate / precision on cloze probes, and macro-averaged F1."""

from __future__ import annotations

VARIANTS = ("original", "paraphrase", "scope", "affirmation")


class MetricError(ValueError):
    pass


def _normalize_variant(name):
    return str(name).strip().lower()


def group_consistency(groups, subset="all"):
    """Fraction of groups answered entirely correctly.

    ``subset="all"`` requires every item in the group; a variant name requires
    the original item and that variant, both correct. Groups missing a
    required variant raise MetricError naming the group.
    """
    if not groups:
        raise MetricError("no groups given")
    subset = _normalize_variant(subset)
    if subset != "all" and subset not in VARIANTS:
        raise MetricError(f"unknown subset: {subset}")
    hits = 0
    for group in groups:
        group_id = group.get("group_id")
        items = group.get("items", [])
        if not items:
            raise MetricError(f"group {group_id!r} has no items")
        if subset == "all":
            hits += all(bool(item["correct"]) for item in items)
            continue
        wanted = {}
        for item in items:
            wanted.setdefault(_normalize_variant(item["variant"]), []).append(
                bool(item["correct"]))
        for required in ("original", subset):
            if required not in wanted:
                raise MetricError(
                    f"group {group_id!r} is missing variant {required!r}")
        hits += all(wanted["original"]) and all(wanted[subset])
    return hits / len(groups)


def mean_top1_error(rankings):
    """Fraction of queries whose top prediction is the reference token.

    On negated probes the reference token is the one a robust model must
    avoid, so matching it counts as an error.
    """
    if not rankings:
        raise MetricError("no rankings given")
    matches = sum(1 for r in rankings if r["predicted_top1"] == r["gold_token"])
    return matches / len(rankings)


def precision_at_1(rankings):
    """Fraction of queries whose top prediction avoids the reference token;
    the exact complement of mean_top1_error on the same input."""
    if not rankings:
        raise MetricError("no rankings given")
    return 1.0 - mean_top1_error(rankings)


def macro_f1(labels, classes):
    """Unweighted mean of per-class F1. A class with no gold and no predicted
    positives scores 0 (the strict convention)."""
    if not classes:
        raise MetricError("no classes given")
    scores = []
    for cls in classes:
        tp = sum(1 for l in labels if l["gold"] == cls and l["predicted"] == cls)
        fp = sum(1 for l in labels if l["gold"] != cls and l["predicted"] == cls)
        fn = sum(1 for l in labels if l["gold"] == cls and l["predicted"] != cls)
        denom = 2 * tp + fp + fn
        scores.append(2 * tp / denom if denom else 0.0)
    return sum(scores) / len(scores)
