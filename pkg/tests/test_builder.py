import json
import os
from collections import Counter

import pytest

import corpusgen
import oracle_builder
from conftest import fixture_path
from negata.builder import (AFFIRMATIVE, NEGATED, BuildConfig, ConfigError,
                            CandidateEntry, assign_cues, balance_affirmatives,
                            build_corpus, extract_candidates,
                            largest_remainder, split_records, validate_output)
from negata.cues import CueKind


def run_build(sentences, out_dir, **overrides):
    config = BuildConfig(**{"seed": 7, "val_pairs": 2, **overrides})
    return build_corpus(iter(sentences), config, str(out_dir))


def test_extract_pools_match_hand_counts(build20_sentences, lexicon):
    result = extract_candidates(iter(build20_sentences), lexicon)
    assert len(result.negated) == 4
    assert len(result.affirmative) == 9
    assert result.rejections == Counter({
        "NoPrecedingSentence": 4, "IsQuestion": 1, "UnsupportedCue": 1,
        "MultipleCues": 1})
    kinds = Counter(e.cue_kind for e in result.negated)
    assert kinds == Counter({CueKind.NT: 2, CueKind.NOT: 1, CueKind.NEVER: 1})


def test_candidates_carry_preceding_sentence(build20_sentences, lexicon):
    result = extract_candidates(iter(build20_sentences), lexicon)
    first_negated = result.negated[0]
    assert first_negated.s1_text == "The museum opened in 1950."
    assert first_negated.s2_text == "It didn't charge any fees."


def test_first_in_section_excluded(build20_sentences, lexicon):
    result = extract_candidates(iter(build20_sentences), lexicon)
    sources = {e.source for e in result.negated} | \
              {e.source for e in result.affirmative}
    assert all(source[2] >= 1 for source in sources)


def _mini_entries(doc_counts):
    """Synthetic pools: doc_counts maps doc -> (negated kinds, n affirmative)."""
    from negata.builder import ExtractionResult
    result = ExtractionResult()
    for doc, (kinds, n_aff) in doc_counts.items():
        for i, kind in enumerate(kinds):
            result.negated.append(CandidateEntry(
                source=(doc, 0, i * 2 + 1), doc_id=doc, polarity=NEGATED,
                s1_text="s1", s2_text=f"{doc}-neg-{i}", cue_kind=kind,
                s2_prime_text="x"))
        for i in range(n_aff):
            result.affirmative.append(CandidateEntry(
                source=(doc, 1, i + 1), doc_id=doc, polarity=AFFIRMATIVE,
                s1_text="s1", s2_text=f"{doc}-aff-{i}"))
    return result


def test_balance_prefers_same_article():
    result = _mini_entries({"a": ([CueKind.NOT] * 3, 5)})
    balance = balance_affirmatives(result, seed=1)
    assert len(balance.groups["a"]) == 3
    assert balance.foreign_fill == 0 and balance.shortfall == 0


def test_balance_fills_from_other_articles():
    result = _mini_entries({"a": ([CueKind.NOT] * 3, 1),
                            "b": ([], 10)})
    balance = balance_affirmatives(result, seed=1)
    assert len(balance.groups["a"]) == 3
    assert balance.foreign_fill == 2
    foreign = [e for e in balance.groups["a"] if e.doc_id != "a"]
    assert len(foreign) == 2


def test_balance_records_global_shortfall():
    result = _mini_entries({"a": ([CueKind.NOT] * 4, 1), "b": ([], 1)})
    balance = balance_affirmatives(result, seed=1)
    assert len(balance.groups["a"]) == 2
    assert balance.shortfall == 2


def test_balance_deterministic_per_seed():
    result = _mini_entries({"a": ([CueKind.NOT] * 2, 6)})
    first = balance_affirmatives(result, seed=9)
    second = balance_affirmatives(result, seed=9)
    assert [e.source for e in first.groups["a"]] == \
        [e.source for e in second.groups["a"]]


def test_largest_remainder_exact_and_rounded():
    exact = largest_remainder(Counter({CueKind.NT: 2, CueKind.NOT: 1}), 3)
    assert exact == {CueKind.NOT: 1, CueKind.NT: 2, CueKind.NEVER: 0}
    rounded = largest_remainder(Counter({CueKind.NT: 1}), 2)
    assert rounded == {CueKind.NOT: 0, CueKind.NT: 2, CueKind.NEVER: 0}
    split = largest_remainder(Counter({CueKind.NOT: 1, CueKind.NT: 1}), 1)
    assert sum(split.values()) == 1


def test_assign_cues_matches_article_histogram():
    result = _mini_entries({"a": ([CueKind.NT, CueKind.NT, CueKind.NOT], 3)})
    balance = balance_affirmatives(result, seed=1)
    assignment = assign_cues(balance, result, seed=1)
    assert Counter(assignment.values()) == Counter(
        {CueKind.NT: 2, CueKind.NOT: 1})


def test_assign_cues_override_all_not():
    result = _mini_entries({"a": ([CueKind.NEVER, CueKind.NT], 2)})
    balance = balance_affirmatives(result, seed=1)
    assignment = assign_cues(balance, result, seed=1,
                             match_cue_distribution=False)
    assert set(assignment.values()) == {CueKind.NOT}


def test_subset_modes(build20_sentences, lexicon, tmp_path):
    records, _ = run_build(build20_sentences, tmp_path / "add",
                           subset_mode="add-only", val_pairs=0)
    assert records and all(r.s2_polarity == AFFIRMATIVE for r in records)
    records, _ = run_build(build20_sentences, tmp_path / "rm",
                           subset_mode="remove-only", val_pairs=0)
    assert records and all(r.s2_polarity == NEGATED for r in records)


def test_split_arithmetic_8_records(build20_sentences, tmp_path):
    records, manifest = run_build(build20_sentences, tmp_path / "out")
    assert len(records) == 8
    counts = manifest["counts"]
    assert counts["nspp"]["val"]["total"] == 2
    assert counts["nspp"]["val"]["labels"] == {"0": 1, "1": 1}
    assert counts["nspp"]["train"]["total"] == 6
    assert counts["nsp"]["val"]["total"] == 4
    assert counts["nsp"]["train"]["total"] == 12
    labels = counts["nsp"]["train"]["labels"]
    assert labels["0"] == labels["1"] == 6


def test_val_pairs_validation(build20_sentences, tmp_path):
    with pytest.raises(ConfigError):
        run_build(build20_sentences, tmp_path / "odd", val_pairs=3)
    with pytest.raises(ConfigError):
        run_build(build20_sentences, tmp_path / "big", val_pairs=12)


def test_records_sorted_and_disjoint_splits(build20_sentences, tmp_path):
    records, _ = run_build(build20_sentences, tmp_path / "out")
    assert [r.source for r in records] == sorted(r.source for r in records)
    config = BuildConfig(seed=7, val_pairs=2)
    val, train = split_records(records, config)
    assert {r.source for r in val}.isdisjoint({r.source for r in train})
    assert len(val) == 2 and len(train) == 6


def test_build_deterministic_across_runs(build20_sentences, tmp_path):
    run_build(build20_sentences, tmp_path / "one")
    run_build(build20_sentences, tmp_path / "two")
    for name in sorted(os.listdir(tmp_path / "one")):
        a = (tmp_path / "one" / name).read_bytes()
        b = (tmp_path / "two" / name).read_bytes()
        assert a == b, name


def test_oracle_equivalence(build20_sentences, tmp_path):
    out = tmp_path / "out"
    run_build(build20_sentences, out)
    problems = oracle_builder.compare_with_output(
        fixture_path("build20.conllu"), str(out), val_pairs=2)
    assert problems == []


def test_validate_accepts_build_output(build20_sentences, tmp_path):
    out = tmp_path / "out"
    run_build(build20_sentences, out)
    assert validate_output(str(out)) == []


def test_validate_catches_deleted_line(build20_sentences, tmp_path):
    out = tmp_path / "out"
    run_build(build20_sentences, out)
    path = out / "nsp.train.jsonl"
    lines = path.read_text(encoding="utf-8").splitlines(keepends=True)
    path.write_text("".join(lines[1:]), encoding="utf-8")
    failures = validate_output(str(out))
    assert failures


def test_validate_catches_polarity_corruption(build20_sentences, tmp_path):
    out = tmp_path / "out"
    run_build(build20_sentences, out)
    path = out / "nsp.val.jsonl"
    rows = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]
    # copy each true sentence over its reversed twin: same surface polarity
    true_by_src = {json.dumps(r["source"], sort_keys=True): r["s2"]
                   for r in rows if r["is_next"] == 1}
    for row in rows:
        if row["is_next"] == 0:
            row["s2"] = true_by_src[json.dumps(row["source"], sort_keys=True)]
    path.write_text("".join(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n"
                            for r in rows), encoding="utf-8")
    failures = validate_output(str(out))
    assert any("polarity" in f for f in failures)


def test_nsp_pairs_differ_in_polarity(build20_sentences, tmp_path):
    out = tmp_path / "out"
    _, manifest = run_build(build20_sentences, out)
    from negata.builder import _text_has_reversible_cue
    for split in ("train", "val"):
        rows = [json.loads(line) for line in
                (out / f"nsp.{split}.jsonl").read_text(encoding="utf-8").splitlines()]
        by_source = {}
        for row in rows:
            key = json.dumps(row["source"], sort_keys=True)
            by_source.setdefault(key, {})[row["is_next"]] = row["s2"]
        for pair in by_source.values():
            assert _text_has_reversible_cue(pair[1]) != \
                _text_has_reversible_cue(pair[0])


def test_parallel_jobs_identical(build20_sentences, lexicon):
    serial = extract_candidates(iter(build20_sentences), lexicon, jobs=1)
    parallel = extract_candidates(iter(build20_sentences), lexicon, jobs=4)
    assert [e.source for e in serial.negated] == \
        [e.source for e in parallel.negated]
    assert [e.source for e in serial.affirmative] == \
        [e.source for e in parallel.affirmative]
    assert serial.rejections == parallel.rejections


def test_emit_tsv_mirrors_rows(build20_sentences, tmp_path):
    out = tmp_path / "out"
    run_build(build20_sentences, out, emit_tsv=True)
    lines = (out / "nspp.val.tsv").read_text(encoding="utf-8").splitlines()
    assert lines[0].split("\t") == sorted(
        ["s1", "label", "doc_id", "section_index", "sent_index"])
    assert len(lines) == 1 + 2


def test_synthetic_balanced_corpus_round_numbers(tmp_path):
    sentences = corpusgen.builder_documents(20, 3, 3, seed=5)
    config = BuildConfig(seed=1, val_pairs=20)
    records, manifest = build_corpus(iter(sentences), config,
                                     str(tmp_path / "out"))
    counts = manifest["counts"]
    assert counts["records"][NEGATED] == counts["records"][AFFIRMATIVE]
    assert counts["nspp"]["val"]["total"] == 20
    assert counts["nsp"]["val"]["total"] == 40
    assert validate_output(str(tmp_path / "out")) == []


def test_shortfall_bounds_label_imbalance(tmp_path):
    # three negated per section but only one affirmative: global shortfall
    sentences = corpusgen.builder_documents(6, 3, 1, seed=4)
    config = BuildConfig(seed=1, val_pairs=0)
    _, manifest = build_corpus(iter(sentences), config, str(tmp_path / "out"))
    shortfall = manifest["balance"]["shortfall"]
    assert shortfall > 0
    labels = manifest["counts"]["nspp"]["train"]["labels"]
    assert abs(labels.get("1", 0) - labels.get("0", 0)) <= shortfall
    assert validate_output(str(tmp_path / "out")) == []


def test_cue_histograms_within_apportionment_bound(tmp_path):
    sentences = corpusgen.builder_documents(30, 4, 4, seed=8)
    config = BuildConfig(seed=2, val_pairs=0)
    _, manifest = build_corpus(iter(sentences), config, str(tmp_path / "out"))
    assert manifest["balance"]["shortfall"] == 0
    for doc_id, hists in manifest["cue_histograms"].items():
        negated, requested, realized = (hists["negated"], hists["requested"],
                                        hists["realized"])
        for kind in ("not", "nt", "never"):
            # largest-remainder apportionment never strays more than 1
            assert abs(requested[kind] - negated[kind]) <= 1, doc_id
        # the only requested/realized deviation is recorded nt degradation
        assert realized["never"] == requested["never"], doc_id
        assert realized["nt"] <= requested["nt"], doc_id
        degraded = requested["nt"] - realized["nt"]
        assert realized["not"] == requested["not"] + degraded, doc_id
