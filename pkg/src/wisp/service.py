"""HTTP review service for human whitespace-fidelity verdicts.

Serves review tasks (ground-truth poem image + one method's candidate
text), records verdict submissions in an append-only JSON Lines log with
replace-by-key semantics, and exposes live progress and adjudicated
scores.  Replaying the log reconstructs identical state, so the service
can be killed and restarted at any point.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import FileResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import bench
from .bench import (
    AnnotationSet,
    UnitTestId,
    VerdictRecord,
    record_from_dict,
    record_to_dict,
)


@dataclass(frozen=True)
class ReviewTask:
    task_id: str
    poem_id: str
    method_id: str
    candidate_text: str
    applicable_tests: tuple[UnitTestId, ...]
    image_ref: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "poem_id": self.poem_id,
            "method_id": self.method_id,
            "candidate_text": self.candidate_text,
            "applicable_tests": [t.value for t in self.applicable_tests],
            "image_ref": self.image_ref,
        }


def load_tasks(path) -> list[ReviewTask]:
    """Read a task manifest (JSON Lines).

    Records carry either an explicit applicable_tests list or a "truth"
    text from which applicability is derived.
    """
    tasks = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            if not line.strip():
                continue
            d = json.loads(line)
            if "applicable_tests" in d:
                applicable = tuple(UnitTestId(t) for t in d["applicable_tests"])
            elif "truth" in d:
                applicable = tuple(bench.applicable_tests(d["truth"]))
            else:
                raise ValueError(f"task record {i}: needs applicable_tests or truth")
            task_id = d.get("task_id") or f"{d['poem_id']}::{d['method_id']}"
            if task_id in seen:
                raise ValueError(f"task record {i}: duplicate task id {task_id!r}")
            seen.add(task_id)
            tasks.append(
                ReviewTask(
                    task_id=task_id,
                    poem_id=d["poem_id"],
                    method_id=d["method_id"],
                    candidate_text=d["candidate_text"],
                    applicable_tests=applicable,
                    image_ref=d.get("image_ref"),
                )
            )
    return tasks


@dataclass
class ReviewState:
    tasks: dict[str, ReviewTask]
    log_path: str
    #: (poem_id, method_id, annotator_id) -> VerdictRecord
    verdicts: dict[tuple[str, str, str], VerdictRecord] = field(default_factory=dict)
    #: annotator -> currently assigned, not yet judged task
    assignments: dict[str, str] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)

    @classmethod
    def create(cls, tasks: list[ReviewTask], log_path: str) -> "ReviewState":
        state = cls(tasks={t.task_id: t for t in tasks}, log_path=log_path)
        state.replay()
        return state

    def replay(self) -> None:
        self.verdicts.clear()
        if not os.path.exists(self.log_path):
            return
        with open(self.log_path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                r = record_from_dict(json.loads(line))
                self.verdicts[(r.poem_id, r.method_id, r.annotator_id)] = r

    def compact(self) -> None:
        """Rewrite the log with one line per live key."""
        with self.lock:
            tmp = self.log_path + ".tmp"
            with open(tmp, "w", encoding="utf-8") as fh:
                for key in sorted(self.verdicts):
                    fh.write(json.dumps(record_to_dict(self.verdicts[key])) + "\n")
            os.replace(tmp, self.log_path)

    # -- task assignment ---------------------------------------------------

    def pair_counts(self) -> dict[tuple[str, str], int]:
        counts: dict[tuple[str, str], int] = {}
        for t in self.tasks.values():
            counts[(t.poem_id, t.method_id)] = 0
        for poem_id, method_id, _ in self.verdicts:
            if (poem_id, method_id) in counts:
                counts[(poem_id, method_id)] += 1
        return counts

    def next_task(
        self,
        annotator_id: str,
        method: Optional[str] = None,
        poem: Optional[str] = None,
    ) -> Optional[ReviewTask]:
        """Unjudged task for this annotator, pairs with fewest verdicts first."""
        with self.lock:
            assigned = self.assignments.get(annotator_id)
            if assigned is not None:
                task = self.tasks.get(assigned)
                if task is not None and (task.poem_id, task.method_id, annotator_id) not in self.verdicts:
                    return task
                del self.assignments[annotator_id]

            counts = self.pair_counts()
            candidates = []
            for task in self.tasks.values():
                if method and task.method_id != method:
                    continue
                if poem and task.poem_id != poem:
                    continue
                if (task.poem_id, task.method_id, annotator_id) in self.verdicts:
                    continue
                candidates.append(task)
            if not candidates:
                return None
            candidates.sort(key=lambda t: (counts[(t.poem_id, t.method_id)], t.task_id))
            chosen = candidates[0]
            self.assignments[annotator_id] = chosen.task_id
            return chosen

    # -- verdict ingestion -------------------------------------------------

    def validate_submission(self, task: ReviewTask, answers: dict[str, str]) -> list[str]:
        problems = []
        applicable = {t.value for t in task.applicable_tests}
        for test_id, answer in answers.items():
            try:
                UnitTestId(test_id)
            except ValueError:
                problems.append(f"unknown test {test_id!r}")
                continue
            if test_id not in applicable:
                problems.append(f"test {test_id} is not applicable to this task")
            elif answer not in (bench.PASS, bench.FAIL):
                problems.append(f"test {test_id}: answer must be pass or fail, got {answer!r}")
        for test_id in sorted(applicable - set(answers)):
            problems.append(f"test {test_id}: missing answer")
        return problems

    def submit(self, task_id: str, annotator_id: str, answers: dict[str, str], ocr_error: bool) -> dict:
        task = self.tasks.get(task_id)
        if task is None:
            raise KeyError(task_id)
        problems = self.validate_submission(task, answers)
        if problems:
            raise ValueError("; ".join(problems))
        record = VerdictRecord(
            poem_id=task.poem_id,
            method_id=task.method_id,
            annotator_id=annotator_id,
            answers={UnitTestId(k): v for k, v in answers.items()},
            ocr_error=ocr_error,
        )
        with self.lock:
            key = (record.poem_id, record.method_id, record.annotator_id)
            self.verdicts[key] = record
            with open(self.log_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record_to_dict(record)) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            if self.assignments.get(annotator_id) == task_id:
                del self.assignments[annotator_id]
            count = sum(1 for (p, m, _) in self.verdicts if (p, m) == (record.poem_id, record.method_id))
        return {"status": "ok", "verdict_count": count}

    # -- reporting ---------------------------------------------------------

    def progress(self, method: Optional[str] = None) -> dict:
        counts = self.pair_counts()
        methods = sorted({t.method_id for t in self.tasks.values()})
        if method:
            methods = [m for m in methods if m == method]
        out = {}
        for m in methods:
            pair_counts = [c for (p, mm), c in counts.items() if mm == m]
            coverage = {
                "pairs": len(pair_counts),
                "with_0": sum(1 for c in pair_counts if c == 0),
                "with_1": sum(1 for c in pair_counts if c == 1),
                "with_2_plus": sum(1 for c in pair_counts if c >= 2),
            }
            records = [r for (p, mm, a), r in self.verdicts.items() if mm == m]
            scores = None
            if records:
                adjudicated = bench.adjudicate_all(records)
                try:
                    scores = bench.score_method(m, AnnotationSet(adjudicated)).to_dict()
                except bench.ScoringError:
                    scores = None
            out[m] = {
                "coverage": coverage,
                "provisional": coverage["with_0"] > 0 or coverage["with_1"] > 0,
                "scores": scores,
            }
        return out

    def export(self) -> list[dict]:
        return [record_to_dict(self.verdicts[k]) for k in sorted(self.verdicts)]


class VerdictSubmission(BaseModel):
    task_id: str
    annotator_id: str
    answers: dict[str, str]
    ocr_error: bool = False


def create_app(state: ReviewState, image_dir: Optional[str] = None, ui_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="wisp review service")
    app.state.review = state

    @app.get("/tasks/next")
    def tasks_next(annotator: str, method: Optional[str] = None, poem: Optional[str] = None):
        task = state.next_task(annotator, method, poem)
        if task is None:
            return {"task": None}
        return {"task": task.to_dict()}

    @app.get("/tasks/{task_id}")
    def get_task(task_id: str):
        task = state.tasks.get(task_id)
        if task is None:
            raise HTTPException(status_code=404, detail=f"unknown task {task_id!r}")
        return task.to_dict()

    @app.get("/poems/{poem_id}/image")
    def poem_image(poem_id: str):
        refs = {t.poem_id: t.image_ref for t in state.tasks.values() if t.image_ref}
        ref = refs.get(poem_id)
        if ref is None:
            raise HTTPException(status_code=404, detail=f"no image for poem {poem_id!r}")
        path = ref if os.path.isabs(ref) or image_dir is None else os.path.join(image_dir, ref)
        if not os.path.exists(path):
            raise HTTPException(status_code=404, detail=f"image file missing: {ref}")
        return FileResponse(path)

    @app.post("/verdicts")
    def post_verdict(submission: VerdictSubmission):
        try:
            return state.submit(
                submission.task_id,
                submission.annotator_id,
                submission.answers,
                submission.ocr_error,
            )
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown task {submission.task_id!r}")
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.get("/progress")
    def progress(method: Optional[str] = None):
        return state.progress(method)

    @app.get("/export")
    def export():
        body = "\n".join(json.dumps(d) for d in state.export())
        return PlainTextResponse(body + ("\n" if body else ""), media_type="application/jsonl")

    if ui_dir and os.path.isdir(ui_dir):
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
