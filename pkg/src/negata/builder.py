"""Balanced NSPP/NSP dataset construction.

The pipeline walks parsed documents in order, pools reversible negated
sentences and clean affirmative sentences (each with its preceding sentence),
balances the affirmative side against the negated side article by article,
matches the added-cue distribution to each article's negated cues, reverses
every second sentence, and emits deterministic JSON-lines splits plus a
manifest that accounts for every input sentence.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import __version__
from .conllu import detokenize
from .cues import CueKind, CueLexicon, RejectReason, eligibility
from .reversal import ReversalRejected, add_negation, remove_negation

NEGATED = "negated"
AFFIRMATIVE = "affirmative"

SUBSET_MODES = ("both", "add-only", "remove-only")

REJECT_NO_PRECEDING = "NoPrecedingSentence"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class BuildConfig:
    seed: int = 0
    val_pairs: int = 25000
    subset_mode: str = "both"
    tasks: tuple = ("nspp", "nsp")
    match_cue_distribution: bool = True
    lexicon_path: str | None = None
    jobs: int = 1
    emit_tsv: bool = False

    def validate(self):
        if self.val_pairs < 0 or self.val_pairs % 2:
            raise ConfigError("val_pairs must be a non-negative even number")
        if self.subset_mode not in SUBSET_MODES:
            raise ConfigError(f"subset_mode must be one of {SUBSET_MODES}")
        if not self.tasks:
            raise ConfigError("at least one task required")
        for task in self.tasks:
            if task not in ("nspp", "nsp"):
                raise ConfigError(f"unknown task: {task}")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")


@dataclass(frozen=True)
class CandidateEntry:
    """One (S1, S2) pair surviving the filters, with its dry-run reversal."""

    source: tuple
    doc_id: str
    polarity: str
    s1_text: str
    s2_text: str
    cue_kind: CueKind | None = None
    s2_prime_text: str | None = None
    sentence: object = None  # parse kept for affirmatives, re-reversed later


@dataclass(frozen=True)
class PairRecord:
    s1_text: str
    s2_text: str
    s2_prime_text: str | None
    s2_polarity: str
    source: tuple
    cue_kind: CueKind | None
    requested_cue: CueKind | None = None


@dataclass
class ExtractionResult:
    negated: list = field(default_factory=list)
    affirmative: list = field(default_factory=list)
    rejections: Counter = field(default_factory=Counter)

    def merge(self, other):
        self.negated.extend(other.negated)
        self.affirmative.extend(other.affirmative)
        self.rejections.update(other.rejections)
        return self


def _stable_int(seed, *parts):
    payload = ":".join([str(seed)] + [str(p) for p in parts]).encode("utf-8")
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big")


def _classify(sentence, prev, lexicon, result):
    if prev is None:
        result.rejections[REJECT_NO_PRECEDING] += 1
        return
    verdict = eligibility(sentence, lexicon)
    source = sentence.source
    s1_text = prev.raw_text or detokenize(prev)
    s2_text = sentence.raw_text or detokenize(sentence)
    if verdict.eligible:
        try:
            outcome = remove_negation(sentence, lexicon)
        except ReversalRejected as exc:
            result.rejections[exc.reason.value] += 1
            return
        result.negated.append(CandidateEntry(
            source=source, doc_id=sentence.doc_id, polarity=NEGATED,
            s1_text=s1_text, s2_text=s2_text, cue_kind=outcome.cue_used,
            s2_prime_text=outcome.text))
    elif verdict.reason is RejectReason.NO_CUE:
        try:
            add_negation(sentence, CueKind.NOT, lexicon)
        except ReversalRejected as exc:
            result.rejections[exc.reason.value] += 1
            return
        result.affirmative.append(CandidateEntry(
            source=source, doc_id=sentence.doc_id, polarity=AFFIRMATIVE,
            s1_text=s1_text, s2_text=s2_text, sentence=sentence))
    else:
        result.rejections[verdict.reason.value] += 1


def _process_document(args):
    sentences, lexicon = args
    result = ExtractionResult()
    prev = None
    prev_key = None
    for sentence in sentences:
        key = (sentence.doc_id, sentence.section_index)
        if key != prev_key:
            prev = None
            prev_key = key
        _classify(sentence, prev, lexicon, result)
        prev = sentence
    return result


def _group_documents(sentences):
    doc = []
    doc_id = None
    for sentence in sentences:
        if doc and sentence.doc_id != doc_id:
            yield doc
            doc = []
        doc_id = sentence.doc_id
        doc.append(sentence)
    if doc:
        yield doc


def extract_candidates(sentences, lexicon, jobs=1):
    """Scan ordered sentences into negated / affirmative pools.

    A sentence qualifies only with a preceding sentence in its own section
    and a successful dry-run reversal; everything else lands in the rejection
    tally so the manifest can account for the whole input.
    """
    result = ExtractionResult()
    if jobs <= 1:
        for doc in _group_documents(sentences):
            result.merge(_process_document((doc, lexicon)))
        return result
    docs = [(doc, lexicon) for doc in _group_documents(sentences)]
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        for part in executor.map(_process_document, docs, chunksize=8):
            result.merge(part)
    return result


@dataclass
class BalanceResult:
    groups: dict            # article id -> affirmative entries balancing it
    foreign_fill: int
    shortfall: int


def balance_affirmatives(extraction, seed):
    """Per article, pick as many affirmatives as that article has negated
    sentences; any shortfall is drawn uniformly from other articles'
    surplus."""
    neg_by_doc = {}
    for entry in extraction.negated:
        neg_by_doc.setdefault(entry.doc_id, []).append(entry)
    aff_by_doc = {}
    for entry in extraction.affirmative:
        aff_by_doc.setdefault(entry.doc_id, []).append(entry)

    groups = {}
    leftovers = []
    deficits = {}
    for doc_id, negated in neg_by_doc.items():
        available = sorted(aff_by_doc.get(doc_id, []), key=lambda e: e.source)
        take = min(len(negated), len(available))
        rng = random.Random(_stable_int(seed, "balance", doc_id))
        chosen = rng.sample(available, take) if take < len(available) else list(available)
        chosen_ids = {id(e) for e in chosen}
        groups[doc_id] = sorted(chosen, key=lambda e: e.source)
        leftovers.extend(e for e in available if id(e) not in chosen_ids)
        deficits[doc_id] = len(negated) - take
    for doc_id, entries in aff_by_doc.items():
        if doc_id not in neg_by_doc:
            leftovers.extend(entries)

    total_deficit = sum(deficits.values())
    foreign_fill = 0
    if total_deficit and leftovers:
        pool = sorted(leftovers, key=lambda e: e.source)
        rng = random.Random(_stable_int(seed, "fill"))
        rng.shuffle(pool)
        for doc_id in deficits:
            while deficits[doc_id] > 0 and pool:
                groups[doc_id].append(pool.pop())
                deficits[doc_id] -= 1
                foreign_fill += 1
        for doc_id in groups:
            groups[doc_id].sort(key=lambda e: e.source)
    return BalanceResult(groups=groups, foreign_fill=foreign_fill,
                         shortfall=sum(deficits.values()))


CUE_ORDER = (CueKind.NOT, CueKind.NT, CueKind.NEVER)


def largest_remainder(histogram, total):
    """Integer apportionment of ``total`` slots proportional to the
    histogram, ties broken in fixed cue order."""
    weight = sum(histogram.values())
    if total == 0 or weight == 0:
        return {kind: 0 for kind in CUE_ORDER}
    raw = {kind: histogram.get(kind, 0) * total / weight for kind in CUE_ORDER}
    quotas = {kind: int(raw[kind]) for kind in CUE_ORDER}
    remaining = total - sum(quotas.values())
    by_remainder = sorted(CUE_ORDER, key=lambda k: (-(raw[k] - quotas[k]),
                                                    CUE_ORDER.index(k)))
    for kind in by_remainder:
        if remaining <= 0:
            break
        quotas[kind] += 1
        remaining -= 1
    return quotas


def assign_cues(balance, extraction, seed, match_cue_distribution=True):
    """Map each selected affirmative entry to the cue it will receive."""
    neg_hist_by_doc = {}
    for entry in extraction.negated:
        hist = neg_hist_by_doc.setdefault(entry.doc_id, Counter())
        hist[entry.cue_kind] += 1

    assignment = {}
    for doc_id, entries in balance.groups.items():
        if not match_cue_distribution:
            for entry in entries:
                assignment[entry.source] = CueKind.NOT
            continue
        quotas = largest_remainder(neg_hist_by_doc.get(doc_id, Counter()),
                                   len(entries))
        cue_list = [kind for kind in CUE_ORDER for _ in range(quotas[kind])]
        rng = random.Random(_stable_int(seed, "cues", doc_id))
        rng.shuffle(cue_list)
        for entry, kind in zip(sorted(entries, key=lambda e: e.source), cue_list):
            assignment[entry.source] = kind
    return assignment


def build_records(extraction, balance, assignment, lexicon, subset_mode="both"):
    """Materialize PairRecords, reversing every selected S2."""
    records = []
    degradations = Counter()
    dropped = Counter()
    if subset_mode != "add-only":
        for entry in extraction.negated:
            records.append(PairRecord(
                s1_text=entry.s1_text, s2_text=entry.s2_text,
                s2_prime_text=entry.s2_prime_text, s2_polarity=NEGATED,
                source=entry.source, cue_kind=entry.cue_kind,
                requested_cue=entry.cue_kind))
    if subset_mode != "remove-only":
        for entries in balance.groups.values():
            for entry in entries:
                requested = assignment[entry.source]
                try:
                    outcome = add_negation(entry.sentence, requested, lexicon)
                except ReversalRejected as exc:
                    dropped[exc.reason.value] += 1
                    continue
                if outcome.cue_used is not requested:
                    degradations[(requested.value, outcome.cue_used.value)] += 1
                records.append(PairRecord(
                    s1_text=entry.s1_text, s2_text=entry.s2_text,
                    s2_prime_text=outcome.text, s2_polarity=AFFIRMATIVE,
                    source=entry.source, cue_kind=outcome.cue_used,
                    requested_cue=requested))
    records.sort(key=lambda r: r.source)
    return records, degradations, dropped


def split_records(records, config):
    """Seeded validation sample, stratified half negated / half affirmative."""
    if config.val_pairs == 0:
        return [], list(records)
    negated = [r for r in records if r.s2_polarity == NEGATED]
    affirmative = [r for r in records if r.s2_polarity == AFFIRMATIVE]
    if config.subset_mode == "both":
        half = config.val_pairs // 2
        if half > len(negated) or half > len(affirmative):
            raise ConfigError(
                f"val_pairs={config.val_pairs} needs {half} records of each "
                f"polarity; have {len(negated)} negated / "
                f"{len(affirmative)} affirmative")
        rng = random.Random(_stable_int(config.seed, "val"))
        val = rng.sample(negated, half) + rng.sample(affirmative, half)
    else:
        if config.val_pairs > len(records):
            raise ConfigError(
                f"val_pairs={config.val_pairs} exceeds {len(records)} records")
        rng = random.Random(_stable_int(config.seed, "val"))
        val = rng.sample(records, config.val_pairs)
    val_sources = {r.source for r in val}
    val = sorted(val, key=lambda r: r.source)
    train = [r for r in records if r.source not in val_sources]
    return val, train


def _source_obj(source):
    doc_id, section_index, sent_index = source
    return {"doc_id": doc_id, "section_index": section_index,
            "sent_index": sent_index}


def _json_line(obj):
    return json.dumps(obj, ensure_ascii=False, sort_keys=True) + "\n"


def nspp_rows(records):
    for record in records:
        yield {"s1": record.s1_text,
               "label": 1 if record.s2_polarity == NEGATED else 0,
               "source": _source_obj(record.source)}


def nsp_rows(records):
    for record in records:
        base = {"s1": record.s1_text, "source": _source_obj(record.source)}
        yield dict(base, s2=record.s2_text, is_next=1, origin="original")
        yield dict(base, s2=record.s2_prime_text, is_next=0, origin="reversed")


def _flatten_for_tsv(row):
    flat = {}
    for key, value in row.items():
        if key == "source":
            flat.update({"doc_id": value["doc_id"],
                         "section_index": value["section_index"],
                         "sent_index": value["sent_index"]})
        else:
            flat[key] = value
    return flat


def _write_rows(path, rows, emit_tsv):
    rows = list(rows)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for row in rows:
            handle.write(_json_line(row))
    if emit_tsv:
        tsv_path = str(path)[: -len(".jsonl")] + ".tsv"
        flat_rows = [_flatten_for_tsv(r) for r in rows]
        columns = sorted({k for r in flat_rows for k in r})
        with open(tsv_path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write("\t".join(columns) + "\n")
            for row in flat_rows:
                handle.write("\t".join(str(row.get(c, "")) for c in columns) + "\n")
    return rows


def _label_counts(rows, key):
    counts = Counter(str(row[key]) for row in rows)
    return {value: counts[value] for value in sorted(counts)}


def emit_datasets(records, config, out_dir, input_digest="", extra=None):
    """Write {task}.{split}.jsonl files plus manifest.json; returns the
    manifest dict. Output is a pure function of (records, config)."""
    os.makedirs(out_dir, exist_ok=True)
    val, train = split_records(records, config)
    splits = {"train": train, "val": val}
    counts = {"records": {
        "total": len(records),
        NEGATED: sum(1 for r in records if r.s2_polarity == NEGATED),
        AFFIRMATIVE: sum(1 for r in records if r.s2_polarity == AFFIRMATIVE),
    }}
    for task in sorted(config.tasks):
        counts[task] = {}
        for split_name, split_records_ in splits.items():
            maker = nspp_rows if task == "nspp" else nsp_rows
            path = os.path.join(out_dir, f"{task}.{split_name}.jsonl")
            rows = _write_rows(path, maker(split_records_), config.emit_tsv)
            label_key = "label" if task == "nspp" else "is_next"
            counts[task][split_name] = {
                "total": len(rows),
                "labels": _label_counts(rows, label_key),
            }

    manifest = {
        "tool": {"name": "negata", "version": __version__},
        "seed": config.seed,
        "input_digest": input_digest,
        "config": {
            "val_pairs": config.val_pairs,
            "subset_mode": config.subset_mode,
            "tasks": sorted(config.tasks),
            "match_cue_distribution": config.match_cue_distribution,
        },
        "counts": counts,
    }
    if extra:
        manifest.update(extra)
    with open(os.path.join(out_dir, "manifest.json"), "w",
              encoding="utf-8", newline="\n") as handle:
        json.dump(manifest, handle, ensure_ascii=False, sort_keys=True, indent=2)
        handle.write("\n")
    return manifest


def _cue_hist_obj(counter):
    return {kind.value: counter.get(kind, 0) for kind in CUE_ORDER}


def build_corpus(sentences, config, out_dir, lexicon=None, input_digest=""):
    """Full pipeline: extract, balance, assign, reverse, emit.
    Returns (records, manifest)."""
    config.validate()
    lexicon = lexicon or (CueLexicon.load(config.lexicon_path)
                          if config.lexicon_path else CueLexicon.default())
    extraction = extract_candidates(sentences, lexicon, jobs=config.jobs)
    balance = balance_affirmatives(extraction, config.seed)
    assignment = assign_cues(balance, extraction, config.seed,
                             config.match_cue_distribution)
    records, degradations, dropped = build_records(
        extraction, balance, assignment, lexicon, config.subset_mode)

    neg_hist = {}
    for entry in extraction.negated:
        hist = neg_hist.setdefault(entry.doc_id, Counter())
        hist[entry.cue_kind] += 1
    requested_hist = {}
    realized_hist = {}
    for record in records:
        if record.s2_polarity != AFFIRMATIVE:
            continue
        doc_id = record.source[0]
        requested_hist.setdefault(doc_id, Counter())[record.requested_cue] += 1
        realized_hist.setdefault(doc_id, Counter())[record.cue_kind] += 1

    extra = {
        "rejections": dict(sorted(extraction.rejections.items())),
        "balance": {
            "negated_total": len(extraction.negated),
            "affirmative_available": len(extraction.affirmative),
            "affirmative_selected": sum(len(v) for v in balance.groups.values()),
            "foreign_fill": balance.foreign_fill,
            "shortfall": balance.shortfall,
        },
        "cue_histograms": {
            doc_id: {
                "negated": _cue_hist_obj(neg_hist.get(doc_id, Counter())),
                "requested": _cue_hist_obj(requested_hist.get(doc_id, Counter())),
                "realized": _cue_hist_obj(realized_hist.get(doc_id, Counter())),
            }
            for doc_id in sorted(set(neg_hist) | set(requested_hist))
        },
        "degradations": {f"{a}->{b}": n for (a, b), n in sorted(degradations.items())},
        "dropped": dict(sorted(dropped.items())),
    }
    manifest = emit_datasets(records, config, out_dir,
                             input_digest=input_digest, extra=extra)
    return records, manifest


def digest_files(paths):
    sha = hashlib.sha256()
    for path in paths:
        with open(path, "rb") as handle:
            for chunk in iter(lambda: handle.read(1 << 20), b""):
                sha.update(chunk)
    return "sha256:" + sha.hexdigest()


def _text_has_reversible_cue(text):
    for raw in text.lower().replace("’", "'").split():
        token = raw.strip(".,;:!?\"()[]")
        if token in ("not", "never") or token.endswith("n't"):
            return True
    return False


def validate_output(out_dir):
    """Re-check manifest invariants against the emitted files.

    Returns a list of human-readable failures (empty when the tree is
    consistent)."""
    failures = []
    manifest_path = os.path.join(out_dir, "manifest.json")
    if not os.path.exists(manifest_path):
        return [f"missing manifest: {manifest_path}"]
    with open(manifest_path, encoding="utf-8") as handle:
        manifest = json.load(handle)
    counts = manifest.get("counts", {})
    tasks = manifest.get("config", {}).get("tasks", [])
    val_pairs = manifest.get("config", {}).get("val_pairs", 0)

    record_total = counts.get("records", {}).get("total")
    per_record = {"nspp": 1, "nsp": 2}
    for task in tasks:
        split_sum = sum(counts.get(task, {}).get(s, {}).get("total", 0)
                        for s in ("train", "val"))
        if record_total is not None and split_sum != per_record[task] * record_total:
            failures.append(f"manifest: {task} split totals sum to {split_sum}, "
                            f"expected {per_record[task] * record_total}")
        for split in ("train", "val"):
            stats = counts.get(task, {}).get(split, {})
            label_sum = sum(stats.get("labels", {}).values())
            if label_sum != stats.get("total", 0):
                failures.append(f"manifest: {task}.{split} labels sum to "
                                f"{label_sum}, expected {stats.get('total')}")

    rows_by_task_split = {}
    for task in tasks:
        for split in ("train", "val"):
            path = os.path.join(out_dir, f"{task}.{split}.jsonl")
            if not os.path.exists(path):
                failures.append(f"missing file: {path}")
                continue
            with open(path, encoding="utf-8") as handle:
                try:
                    rows = [json.loads(line) for line in handle if line.strip()]
                except json.JSONDecodeError as exc:
                    failures.append(f"{path}: invalid json ({exc})")
                    continue
            rows_by_task_split[(task, split)] = rows
            stated = counts.get(task, {}).get(split, {})
            if stated.get("total") != len(rows):
                failures.append(f"{path}: {len(rows)} rows but manifest says "
                                f"{stated.get('total')}")
            label_key = "label" if task == "nspp" else "is_next"
            observed = _label_counts(rows, label_key)
            if stated.get("labels") != observed:
                failures.append(f"{path}: label counts {observed} differ from "
                                f"manifest {stated.get('labels')}")

    def source_key(row):
        src = row["source"]
        return (src["doc_id"], src["section_index"], src["sent_index"])

    for task in tasks:
        train = rows_by_task_split.get((task, "train"), [])
        val = rows_by_task_split.get((task, "val"), [])
        overlap = {source_key(r) for r in train} & {source_key(r) for r in val}
        if overlap:
            failures.append(f"{task}: {len(overlap)} sources appear in both splits")

    if "nspp" in tasks and val_pairs:
        val = rows_by_task_split.get(("nspp", "val"), [])
        if len(val) != val_pairs:
            failures.append(f"nspp.val: {len(val)} examples, expected {val_pairs}")
    if "nsp" in tasks and val_pairs:
        val = rows_by_task_split.get(("nsp", "val"), [])
        if len(val) != 2 * val_pairs:
            failures.append(f"nsp.val: {len(val)} examples, expected {2 * val_pairs}")

    if "nsp" in tasks:
        for split in ("train", "val"):
            rows = rows_by_task_split.get(("nsp", split), [])
            true_rows = {source_key(r): r for r in rows if r["is_next"] == 1}
            false_rows = {source_key(r): r for r in rows if r["is_next"] == 0}
            if len(true_rows) * 2 != len(rows) or set(true_rows) != set(false_rows):
                failures.append(f"nsp.{split}: is_next examples are not paired 1:1")
                continue
            for key, row in true_rows.items():
                other = false_rows[key]
                if _text_has_reversible_cue(row["s2"]) == \
                        _text_has_reversible_cue(other["s2"]):
                    failures.append(
                        f"nsp.{split}: pair {key} has same surface polarity")
                    break
    return failures
