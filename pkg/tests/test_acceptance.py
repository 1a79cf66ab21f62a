"""Acceptance gate: every primary criterion, one pass/fail line each.

Run with -s to see the per-criterion lines; any failed criterion fails its
test. Tolerances are pinned here and must not be loosened to force green.
"""

import json
import math
import os
import random
import signal
import socket
import subprocess
import sys
import time
from fractions import Fraction

import httpx
import pytest

from wisp.annotate import annotate
from wisp.bench import (
    ALL_TESTS,
    FAIL,
    NA,
    PASS,
    AnnotationSet,
    UnitTestId,
    VerdictRecord,
    auto_check,
    composite_score,
    macro_score,
    prefix_magnitudes,
    pure_score,
    reliability,
    weighted_score,
)
from wisp.linearize import linearize
from wisp.model import Poem, load_corpus
from wisp.stats import (
    high_usage_tags,
    nearest_rank_percentile,
    punctuation_line_end_table,
)
from wisp.syntax import parse_conllu, spanning_triples

from conftest import fixture_path
from test_bench import brute_force_scores, synthetic_records
from test_linearize import FIXTURE_STYLES, random_poem_html, read_golden, read_html
from test_syntax import CONLLU_DIR, MANIFEST, oracle_triples

T = {t.value: t for t in UnitTestId}


def report(name, ok):
    print(f"\n[PRIMARY] {name}: {'PASS' if ok else 'FAIL'}")
    assert ok, name


def load_gold():
    with open(fixture_path("gold", "gold.jsonl"), encoding="utf-8") as fh:
        return [json.loads(line) for line in fh]


def test_scoring_identity_suite():
    """>=1000 random AnnotationSets: Composite == Macro x R exactly and all
    five scores match an independent brute-force recomputation; < 10 s."""
    rng = random.Random(313)
    start = time.monotonic()
    ok = True
    for _ in range(1000):
        aset = AnnotationSet(synthetic_records(rng, n=rng.randint(3, 25)))
        if composite_score(aset) != macro_score(aset) * reliability(aset):
            ok = False
            break
        oracle = brute_force_scores(aset.records)
        got = {
            "macro": float(macro_score(aset)),
            "weighted": float(weighted_score(aset)),
            "composite": float(composite_score(aset)),
            "pure": float(pure_score(aset)),
            "reliability": float(reliability(aset)),
        }
        if any(abs(got[k] - oracle[k]) > 1e-9 for k in oracle):
            ok = False
            break
    elapsed = time.monotonic() - start
    report(f"scoring identity suite (1000 sets, {elapsed:.2f}s)", ok and elapsed < 10)


def test_reliability_worked_example():
    """|A|=8, |C|=2, |M|=2 -> R = 0.625; boundary cases R=1 and R=0."""
    def rec(pid, ocr, answers):
        return VerdictRecord(pid, "m", "a", {T[k]: v for k, v in answers.items()}, ocr)

    eight = (
        [rec(f"c{i}", True, {"1": FAIL}) for i in range(2)]
        + [rec(f"m{i}", True, {"1": PASS, "2a": FAIL}) for i in range(2)]
        + [rec(f"p{i}", False, {"1": PASS}) for i in range(4)]
    )
    ok = reliability(AnnotationSet(eight)) == Fraction(5, 8)
    ok &= reliability(AnnotationSet([rec("x", False, {"1": FAIL})])) == 1
    ok &= reliability(AnnotationSet([rec("x", True, {"1": FAIL})])) == 0
    report("reliability worked example (0.625, 1, 0)", ok)


# external reference (Macro, Composite) pairs for seven linearization methods
REFERENCE_ROWS = {
    "resiliparse": (51.66, 49.28),
    "wispify": (50.44, 43.80),
    "justext": (3.35, 2.86),
    "trafilatura": (3.11, 2.95),
    "claude-sonnet-4": (45.48, 35.41),
    "gemini-2.5-pro": (45.08, 41.47),
    "o3": (42.80, 33.79),
}


def test_reference_row_consistency():
    """Composite recomputed from Macro and back-derived R within +-0.02."""
    ok = True
    for method, (macro, composite) in REFERENCE_ROWS.items():
        r = round(composite / macro, 4)
        if not (0 <= r <= 1) or abs(macro * r - composite) > 0.02:
            ok = False
    report("reference-row consistency (7 rows, +-0.02)", ok)


def fixture_texts():
    texts = [(r["id"], r["body"] + "\n") for r in load_gold()]
    texts += [(name, read_golden(name)) for name in FIXTURE_STYLES]
    return texts


def test_auto_bench_identity_and_degraded():
    """candidate == truth never fails any test; a candidate with all leading
    spaces stripped fails PREFIX_PRESENCE on every prefix-bearing fixture."""
    ok = True
    prefix_bearing = 0
    for name, truth in fixture_texts():
        for t in ALL_TESTS:
            if auto_check(t, truth, truth) == FAIL:
                ok = False
        if prefix_magnitudes(truth):
            prefix_bearing += 1
            stripped = "\n".join(ln.lstrip(" ") for ln in truth.split("\n"))
            if auto_check(T["2a"], truth, stripped) != FAIL:
                ok = False
    report(f"auto-bench identity + degraded candidate ({prefix_bearing} prefix fixtures)",
           ok and prefix_bearing >= 5)


def test_annotator_gold_suite():
    """25 hand-labeled poems -> exact event match, 100% required."""
    gold = load_gold()
    matched = 0
    for rec in gold:
        poem = Poem(id=rec["id"], body=rec["body"])
        syntax = None
        if "conllu" in rec:
            syntax = parse_conllu(fixture_path("gold", rec["conllu"]), rec["id"])
        got = []
        for e in annotate(poem, syntax).events:
            d = {"category": e.category.category.value,
                 "subcategory": e.category.subcategory,
                 "line_index": e.line_index}
            if e.char_span is not None:
                d["char_span"] = list(e.char_span)
            if e.length is not None:
                d["length"] = e.length
            got.append(d)
        if got == rec["events"]:
            matched += 1
    report(f"annotator gold suite ({matched}/25 exact)", len(gold) == 25 and matched == 25)


def test_linearizer_golden_files_and_preservation():
    """12 golden fixtures byte-exact; visible characters preserved on 100
    randomized HTML fixtures."""
    ok = all(linearize(read_html(n)).text == read_golden(n) for n in FIXTURE_STYLES)
    rng = random.Random(20240817)
    preserved = 0
    for _ in range(100):
        html, visible = random_poem_html(rng)
        got = "".join(ch for ch in linearize(html).text if ch not in (" ", "\n"))
        preserved += got == visible
    report(f"linearizer golden files (12) + preservation ({preserved}/100)",
           ok and len(FIXTURE_STYLES) == 12 and preserved == 100)


def test_punctuation_direction():
    """On the bundled corpus (>=500 poems), ',' is the top line-final
    punctuation for every form with >=50 poems; < 30 s."""
    start = time.monotonic()
    poems = load_corpus("data/public_domain_corpus.jsonl")
    table = punctuation_line_end_table(poems)
    checked = 0
    ok = len(poems) >= 500
    for form, entry in table.items():
        if entry["n_poems"] >= 50:
            checked += 1
            if entry["per_total_lines"][0][0] != ",":
                ok = False
    elapsed = time.monotonic() - start
    report(f"punctuation direction ({checked} forms, {elapsed:.2f}s)",
           ok and checked >= 1 and elapsed < 30)


def test_spanning_triples_oracle():
    """20 CoNLL-U fixtures match exhaustive arc enumeration; the modeled
    fixture yields VERB->PUNCT as the modal triple."""
    ok = len(MANIFEST) == 20
    for rec in MANIFEST:
        path = os.path.join(CONLLU_DIR, rec["conllu"])
        poem = Poem(id=rec["id"], body=rec["body"])
        got = {(t.head_pos, t.dep_pos, t.relation): t.count
               for t in spanning_triples(poem, parse_conllu(path, rec["id"]))}
        if got != oracle_triples(path, rec["body"]):
            ok = False
    modeled = next(r for r in MANIFEST if r["id"] == "t20")
    triples = spanning_triples(
        Poem(id="t20", body=modeled["body"]),
        parse_conllu(os.path.join(CONLLU_DIR, modeled["conllu"]), "t20"),
    )
    ok &= bool(triples) and (triples[0].head_pos, triples[0].dep_pos) == ("VERB", "PUNCT")
    report("spanning-triples oracle (20 fixtures, VERB->PUNCT modal)", ok)


def test_percentile_tag_suite():
    """high_usage_tags on a 6-tag synthetic corpus equals the nearest-rank
    brute-force oracle exactly."""
    rng = random.Random(55)
    tags = [f"tag{i}" for i in range(6)]
    poems, anns = [], []
    for i in range(72):
        tag = tags[i % 6]
        indents = [rng.choice([0, 2, 3, 4]) for _ in range(6)]
        if tag in ("tag0", "tag1") and (i // 6) % 2 == 0:
            indents[2] = 25 + i % 3
        body = "\n".join(" " * n + f"line {j} words here" for j, n in enumerate(indents))
        poems.append(Poem(id=f"p{i}", body=body, tags=frozenset({tag})))
        anns.append(annotate(poems[-1]))
    result = high_usage_tags(anns, poems, "PREFIX", tag_min=1)

    all_lengths, per_poem = [], {}
    for poem, ann in zip(poems, anns):
        lengths = [e.length for e in ann.events if e.category.category.value == "PREFIX"]
        all_lengths += lengths
        per_poem[poem.id] = max(lengths) if lengths else 0
    ordered = sorted(all_lengths)
    threshold = ordered[max(math.ceil(0.75 * len(ordered)), 1) - 1]
    ok = result["threshold"] == threshold == nearest_rank_percentile(all_lengths, 75)
    for row in result["descending"]:
        members = [p for p in poems if row["tag"] in p.tags]
        high = sum(1 for p in members if per_poem[p.id] > threshold)
        if row["n"] != len(members) or abs(row["proportion"] - high / len(members)) > 1e-12:
            ok = False
    ok &= len(result["descending"]) == 6
    report("percentile/tag suite (6 tags vs nearest-rank oracle)", ok)


# ---------------------------------------------------------------------------
# Service replay (subprocess kill/restart)

RUNNER = """
import sys
from wisp.service import ReviewState, create_app, load_tasks
import uvicorn
tasks_path, log_path, port = sys.argv[1], sys.argv[2], int(sys.argv[3])
state = ReviewState.create(load_tasks(tasks_path), log_path)
uvicorn.run(create_app(state), host="127.0.0.1", port=port, log_level="error")
"""


def free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def start_service(tasks_path, log_path, port):
    env = dict(os.environ)
    src = os.path.join(os.path.dirname(__file__), "..", "src")
    env["PYTHONPATH"] = os.path.abspath(src) + os.pathsep + env.get("PYTHONPATH", "")
    proc = subprocess.Popen(
        [sys.executable, "-c", RUNNER, str(tasks_path), str(log_path), str(port)],
        env=env, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL,
    )
    base = f"http://127.0.0.1:{port}"
    for _ in range(100):
        try:
            httpx.get(base + "/progress", timeout=1)
            return proc, base
        except httpx.TransportError:
            if proc.poll() is not None:
                raise RuntimeError("service process exited early")
            time.sleep(0.1)
    proc.kill()
    raise RuntimeError("service did not come up")


def annotate_once(base, annotator, limit):
    for _ in range(limit):
        task = httpx.get(base + "/tasks/next", params={"annotator": annotator}).json()["task"]
        if task is None:
            return
        answers = {t: ("fail" if task["method_id"] == "bad" else "pass")
                   for t in task["applicable_tests"]}
        r = httpx.post(base + "/verdicts", json={
            "task_id": task["task_id"], "annotator_id": annotator, "answers": answers,
        })
        assert r.status_code == 200


def test_service_replay(tmp_path):
    """Kill and restart the service mid-session; scoring the exported log
    offline equals the pre-restart live scores exactly."""
    tasks_path = tmp_path / "tasks.jsonl"
    log_path = tmp_path / "verdicts.jsonl"
    truth = "  indented line\nplain line two\n\nplain line last."
    with open(tasks_path, "w", encoding="utf-8") as fh:
        for i in range(4):
            for method in ("good", "bad"):
                fh.write(json.dumps({
                    "poem_id": f"p{i}", "method_id": method,
                    "candidate_text": f"cand {i} {method}", "truth": truth,
                }) + "\n")

    port = free_port()
    proc, base = start_service(tasks_path, log_path, port)
    ok = True
    try:
        annotate_once(base, "ann1", limit=8)
        annotate_once(base, "ann2", limit=5)  # mid-session: ann2 unfinished
        before = httpx.get(base + "/progress").json()
    finally:
        proc.send_signal(signal.SIGKILL)
        proc.wait()

    proc, base = start_service(tasks_path, log_path, port)
    try:
        after = httpx.get(base + "/progress").json()
        ok &= after == before
        export = httpx.get(base + "/export").text
        from wisp import bench
        records = [bench.record_from_dict(json.loads(l)) for l in export.splitlines()]
        by_method = {}
        for r in records:
            by_method.setdefault(r.method_id, []).append(r)
        for method, recs in by_method.items():
            offline = bench.score_method(
                method, AnnotationSet(bench.adjudicate_all(recs))
            ).to_dict()
            ok &= before[method]["scores"] == offline
    finally:
        proc.send_signal(signal.SIGKILL)
        proc.wait()
    report("service replay (kill/restart, export == live scores)", ok)
