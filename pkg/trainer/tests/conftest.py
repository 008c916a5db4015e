"""Shared fixtures: a separable synthetic corpus pushed through the real
`negata build` CLI. The trainer only ever sees the emitted JSON-lines files.
"""

import random
import subprocess

import pytest

VERBS = [("move", "moved"), ("lift", "lifted"), ("paint", "painted"),
         ("wash", "washed"), ("stack", "stacked")]
OBJECTS = ["crate", "ladder", "panel", "wagon", "bench"]
SUBJECTS = ["crew", "team", "staff"]


def _s1(marker, noun):
    return f"""# text = The {marker} {noun} arrived.
1\tThe\tthe\tDET\t_\t_\t3\tdet\t_\t_
2\t{marker}\t{marker}\tADJ\t_\tDegree=Pos\t3\tamod\t_\t_
3\t{noun}\t{noun}\tNOUN\t_\tNumber=Sing\t4\tnsubj\t_\t_
4\tarrived\tarrive\tVERB\t_\tMood=Ind|Tense=Past|VerbForm=Fin\t0\troot\t_\tSpaceAfter=No
5\t.\t.\tPUNCT\t_\t_\t4\tpunct\t_\t_
"""


def _s2_negated(subject, verb_base, obj):
    return f"""# text = The {subject} did not {verb_base} the {obj}.
1\tThe\tthe\tDET\t_\t_\t2\tdet\t_\t_
2\t{subject}\t{subject}\tNOUN\t_\tNumber=Sing|Person=3\t5\tnsubj\t_\t_
3\tdid\tdo\tAUX\t_\tMood=Ind|Tense=Past|VerbForm=Fin\t5\taux\t_\t_
4\tnot\tnot\tPART\t_\tPolarity=Neg\t3\tadvmod\t_\t_
5\t{verb_base}\t{verb_base}\tVERB\t_\tVerbForm=Inf\t0\troot\t_\t_
6\tthe\tthe\tDET\t_\t_\t7\tdet\t_\t_
7\t{obj}\t{obj}\tNOUN\t_\tNumber=Sing\t5\tobj\t_\tSpaceAfter=No
8\t.\t.\tPUNCT\t_\t_\t5\tpunct\t_\t_
"""


def _s2_affirmative(subject, verb_past, verb_base, obj):
    return f"""# text = The {subject} {verb_past} the {obj}.
1\tThe\tthe\tDET\t_\t_\t2\tdet\t_\t_
2\t{subject}\t{subject}\tNOUN\t_\tNumber=Sing|Person=3\t3\tnsubj\t_\t_
3\t{verb_past}\t{verb_base}\tVERB\t_\tMood=Ind|Tense=Past|VerbForm=Fin\t0\troot\t_\t_
4\tthe\tthe\tDET\t_\t_\t5\tdet\t_\t_
5\t{obj}\t{obj}\tNOUN\t_\tNumber=Sing\t3\tobj\t_\tSpaceAfter=No
6\t.\t.\tPUNCT\t_\t_\t3\tpunct\t_\t_
"""


def write_separable_corpus(path, n_docs=10, sections_per_doc=40, seed=5):
    """Marker token in S1 perfectly signals the polarity of S2: "alpha"
    precedes negated sentences, "beta" affirmative ones."""
    rng = random.Random(seed)
    with open(path, "w", encoding="utf-8") as handle:
        for doc in range(n_docs):
            handle.write(f"# newdoc id = doc-{doc:03d}\n")
            plan = ["neg"] * (sections_per_doc // 2) + \
                   ["aff"] * (sections_per_doc // 2)
            rng.shuffle(plan)
            for section, step in enumerate(plan):
                if section:
                    handle.write("# newpar\n")
                subject = rng.choice(SUBJECTS)
                verb_base, verb_past = rng.choice(VERBS)
                obj = rng.choice(OBJECTS)
                noun = rng.choice(["signal", "message", "report"])
                if step == "neg":
                    handle.write(_s1("alpha", noun) + "\n")
                    handle.write(_s2_negated(subject, verb_base, obj) + "\n")
                else:
                    handle.write(_s1("beta", noun) + "\n")
                    handle.write(_s2_affirmative(subject, verb_past,
                                                 verb_base, obj) + "\n")


@pytest.fixture(scope="session")
def dataset_dir(tmp_path_factory):
    """Separable corpus built end-to-end through the negata CLI."""
    root = tmp_path_factory.mktemp("separable")
    corpus = root / "corpus.conllu"
    out = root / "data"
    write_separable_corpus(corpus)
    result = subprocess.run(
        ["negata", "build", "--input", str(corpus), "--out", str(out),
         "--seed", "3", "--val-pairs", "100"],
        capture_output=True, text=True)
    assert result.returncode == 0, result.stderr
    return str(out)
