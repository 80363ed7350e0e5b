"""25-task microcontroller design benchmark with offline-replayable runs.

Each task carries a full natural-language description plus automatic checks
(rule-checker cleanliness, required parts, required nets, code substrings).
Verdicts are conservative: a side only auto-passes when its checks are both
present and all green; anything the checks cannot decide is needs_review and
waits for a manual verdict file.  Schematic and code are judged separately,
Pass@1 style, and aggregated only over decided (pass/fail) entries.
"""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .devicespec import DeviceSpec, PinRef, build_nets
from .llmgateway import GenerationParams, Provider
from .partsdb import KnowledgeBase, bundled_kb, lookup, normalize_name
from .pipeline import (
    DEFAULT_MAX_REFLECTIONS,
    GenerationRun,
    ParseFailure,
    PromptTemplate,
    generate_device,
)

CATEGORIES = ("input", "protocols", "output", "sensors", "logic")
CHECK_KINDS = ("erc_clean", "requires_part", "requires_net", "code_contains")

SCHEMATIC_CHECKS = ("erc_clean", "requires_part", "requires_net")
CODE_CHECKS = ("code_contains",)


class SchemaError(ValueError):
    pass


class DuplicateId(ValueError):
    pass


class UnknownTaskId(KeyError):
    pass


class EmptyInput(ValueError):
    pass


@dataclass(frozen=True)
class AutoCheck:
    kind: str
    args: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in CHECK_KINDS:
            raise SchemaError(f"unknown auto check kind {self.kind!r}")


@dataclass(frozen=True)
class BenchTask:
    id: str
    category: str
    description: str
    auto_checks: tuple[AutoCheck, ...]

    def __post_init__(self) -> None:
        if self.category not in CATEGORIES:
            raise SchemaError(f"task {self.id!r} has unknown category {self.category!r}")


def load_tasks(path: str | Path) -> list[BenchTask]:
    """Read a tasks document: a JSON array of task rows with unique ids."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read tasks file {path}: {exc}") from exc
    if not isinstance(data, list):
        raise SchemaError("tasks document must be a JSON array")
    tasks = []
    seen: set[str] = set()
    for row in data:
        try:
            task = BenchTask(
                id=row["id"],
                category=row["category"],
                description=row["description"],
                auto_checks=tuple(
                    AutoCheck(kind=c["kind"], args=tuple(c.get("args", ())))
                    for c in row.get("auto_checks", ())
                ),
            )
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"bad task row: {exc!r}") from exc
        if task.id in seen:
            raise DuplicateId(task.id)
        seen.add(task.id)
        tasks.append(task)
    return tasks


def bundled_tasks_path() -> Path:
    return Path(resources.files("circuitsmith").joinpath("data/micro25.tasks.json"))  # type: ignore[arg-type]


@lru_cache(maxsize=1)
def bundled_tasks() -> tuple[BenchTask, ...]:
    return tuple(load_tasks(bundled_tasks_path()))


@dataclass(frozen=True)
class TaskResult:
    category: str
    schematic: str  # "pass" | "fail" | "needs_review"
    code: str
    source: str  # "auto" | "manual"
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class BenchReport:
    per_task: dict[str, TaskResult]

    def aggregates(self) -> dict[str, Any]:
        def rate(pairs: Iterable[str]) -> float | None:
            decided = [v for v in pairs if v in ("pass", "fail")]
            if not decided:
                return None
            return sum(1 for v in decided if v == "pass") / len(decided)

        by_category: dict[str, Any] = {}
        for category in CATEGORIES:
            rows = [r for r in self.per_task.values() if r.category == category]
            if not rows:
                continue
            by_category[category] = {
                "n": len(rows),
                "schematic_rate": rate(r.schematic for r in rows),
                "code_rate": rate(r.code for r in rows),
            }
        rows = list(self.per_task.values())
        return {
            "n": len(rows),
            "schematic_rate": rate(r.schematic for r in rows),
            "code_rate": rate(r.code for r in rows),
            "needs_review": {
                "schematic": sum(1 for r in rows if r.schematic == "needs_review"),
                "code": sum(1 for r in rows if r.code == "needs_review"),
            },
            "by_category": by_category,
        }

    def to_json(self) -> dict[str, Any]:
        return {
            "per_task": {
                task_id: {
                    "category": r.category,
                    "schematic": r.schematic,
                    "code": r.code,
                    "source": r.source,
                    "notes": list(r.notes),
                }
                for task_id, r in self.per_task.items()
            },
            "aggregates": self.aggregates(),
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "BenchReport":
        per_task = {
            task_id: TaskResult(
                category=row["category"],
                schematic=row["schematic"],
                code=row["code"],
                source=row["source"],
                notes=tuple(row.get("notes", ())),
            )
            for task_id, row in data["per_task"].items()
        }
        return cls(per_task=per_task)


def _part_matches(kb: KnowledgeBase, part_type: str, wanted: str) -> bool:
    record = lookup(kb, part_type)
    wanted_record = lookup(kb, wanted)
    if record is not None and wanted_record is not None:
        return record.canonical_name == wanted_record.canonical_name
    return normalize_name(part_type) == normalize_name(wanted)


def _check_passes(check: AutoCheck, run: GenerationRun, kb: KnowledgeBase) -> tuple[bool, str]:
    spec = run.spec
    assert spec is not None
    if check.kind == "erc_clean":
        report = run.erc_history[-1] if run.erc_history else None
        ok = report is not None and report.clean
        return ok, "final rule check clean" if ok else "final rule check has errors"
    if check.kind == "requires_part":
        (wanted,) = check.args
        ok = any(_part_matches(kb, item.part_type, wanted) for item in spec.bom)
        return ok, f"part {wanted!r} {'present' if ok else 'missing'}"
    if check.kind == "requires_net":
        a, b = check.args
        pa, pb = PinRef.from_string(a), PinRef.from_string(b)
        ok = any(pa in net.members and pb in net.members for net in build_nets(spec.connections))
        return ok, f"net {a} <-> {b} {'present' if ok else 'missing'}"
    if check.kind == "code_contains":
        (token,) = check.args
        ok = spec.code is not None and token in spec.code.source
        return ok, f"code token {token!r} {'found' if ok else 'missing'}"
    raise SchemaError(check.kind)


def evaluate_auto(task: BenchTask, run: GenerationRun | None, kb: KnowledgeBase) -> TaskResult:
    """Conservative automatic verdicts for one task's run."""
    if run is None or run.spec is None:
        return TaskResult(
            category=task.category, schematic="fail", code="fail", source="auto",
            notes=("generation produced no parsable device",),
        )
    notes: list[str] = []

    def side_verdict(kinds: tuple[str, ...], decisive_kind: str) -> str:
        checks = [c for c in task.auto_checks if c.kind in kinds]
        failed = False
        for check in checks:
            ok, note = _check_passes(check, run, kb)
            if not ok:
                notes.append(f"{check.kind}: {note}")
                failed = True
        if failed:
            return "fail"
        # passing side checks alone are not decisive without the anchor check
        if not any(c.kind == decisive_kind for c in checks):
            return "needs_review"
        return "pass"

    schematic = side_verdict(SCHEMATIC_CHECKS, decisive_kind="erc_clean")
    code = side_verdict(CODE_CHECKS, decisive_kind="code_contains")
    return TaskResult(
        category=task.category, schematic=schematic, code=code, source="auto",
        notes=tuple(notes),
    )


def run_benchmark(
    tasks: Sequence[BenchTask],
    provider: Provider,
    template: PromptTemplate | None = None,
    kb: KnowledgeBase | None = None,
    params: GenerationParams | None = None,
    max_reflections: int = DEFAULT_MAX_REFLECTIONS,
    jobs: int = 1,
    artifacts_dir: str | Path | None = None,
) -> BenchReport:
    """One greedy generation run per task, evaluated with the task's checks."""
    if not tasks:
        raise EmptyInput("benchmark needs at least one task")
    kb = kb or bundled_kb()

    def run_one(task: BenchTask) -> TaskResult:
        task_dir = Path(artifacts_dir) / task.id if artifacts_dir else None
        try:
            run = generate_device(
                task.description,
                provider,
                template,
                kb=kb,
                params=params,
                max_reflections=max_reflections,
                artifacts_dir=task_dir,
            )
        except ParseFailure:
            run = None
        return evaluate_auto(task, run, kb)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_one, tasks))
    else:
        results = [run_one(task) for task in tasks]
    return BenchReport(per_task={task.id: result for task, result in zip(tasks, results)})


def ingest_manual_verdicts(
    report: BenchReport, verdicts: Iterable[Mapping[str, Any]]
) -> BenchReport:
    """Fold expert verdicts into a report; manual wins, contradictions are noted."""
    per_task = dict(report.per_task)
    for row in verdicts:
        task_id = row["id"]
        if task_id not in per_task:
            raise UnknownTaskId(task_id)
        current = per_task[task_id]
        notes = list(current.notes)
        updates: dict[str, str] = {}
        for side in ("schematic", "code"):
            if side not in row:
                continue
            verdict = row[side]
            if verdict not in ("pass", "fail"):
                raise SchemaError(f"manual verdict for {task_id}/{side} must be pass or fail")
            auto = getattr(current, side)
            if auto in ("pass", "fail") and auto != verdict:
                notes.append(f"manual {side} verdict {verdict!r} contradicts auto {auto!r}")
            updates[side] = verdict
        if row.get("notes"):
            notes.append(str(row["notes"]))
        per_task[task_id] = replace(
            current, source="manual", notes=tuple(notes), **updates
        )
    return BenchReport(per_task=per_task)


_MARKS = {"pass": "✓", "fail": "✗", "needs_review": "?"}


def render_report(report: BenchReport) -> str:
    """Category-grouped text table with an overall percentage row."""
    lines = [
        f"{'category':<10} {'task':<22} {'schematic':>9} {'code':>5}",
        "-" * 49,
    ]
    for category in CATEGORIES:
        for task_id, row in report.per_task.items():
            if row.category != category:
                continue
            lines.append(
                f"{category:<10} {task_id:<22} {_MARKS[row.schematic]:>9} {_MARKS[row.code]:>5}"
            )
    aggregates = report.aggregates()

    def fmt(rate: float | None) -> str:
        return "n/a" if rate is None else f"{rate * 100:.0f}%"

    review = aggregates["needs_review"]["schematic"] + aggregates["needs_review"]["code"]
    lines.append("-" * 49)
    lines.append(
        f"overall: {fmt(aggregates['schematic_rate'])} / {fmt(aggregates['code_rate'])}"
        f"  (needs review: {review})"
    )
    return "\n".join(lines) + "\n"
