"""Device generation orchestration: prompt assembly and the reflect loop.

A run starts from one generation prompt (preamble, format instructions, a
fully worked example device, a few positive/negative pattern snippets, then
the task).  The first completion is parsed into a DeviceSpec; up to
``max_reflections`` follow-up prompts then show the model its own current
specification plus the rule checker's findings and ask it either to emit a
corrected document or, when it sees no further errors, a stop token.

Runs are deterministic under a replay provider: provenance timestamps come
from the transcript, so the same transcript always produces byte-identical
run artifacts.
"""
from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any

from .devicespec import DeviceSpec, Provenance, canonical_serialize, render_document, validate
from .erc import ErcReport, PrereqFailed, explain, run_erc
from .llmgateway import GenerationParams, Provider, prompt_digest
from .partsdb import KnowledgeBase, bundled_kb
from .specparser import NoParsableContent, parse_device_spec

DEFAULT_STOP_TOKEN = "ALL-CHECKS-PASSED"
DEFAULT_MAX_REFLECTIONS = 3

_NEGATIVE_MARKER = "### Incorrect pattern (do not do this)"


class ParseFailure(RuntimeError):
    """No round of the run produced a parsable device specification."""

    def __init__(self, message: str, diagnostics: list | None = None):
        super().__init__(message)
        self.diagnostics = list(diagnostics or [])


class NoBaseSpec(RuntimeError):
    """Refinement requested on a session with no generated device yet."""


@dataclass(frozen=True)
class Snippet:
    kind: str  # "positive" | "negative"
    text: str

    def __post_init__(self) -> None:
        if self.kind not in ("positive", "negative"):
            raise ValueError(f"snippet kind must be positive or negative, got {self.kind!r}")


@dataclass(frozen=True)
class PromptTemplate:
    preamble: str
    format_instructions: str
    one_shot_example: str
    snippets: tuple[Snippet, ...]
    reflection_checklist: tuple[str, ...]
    stop_token: str = DEFAULT_STOP_TOKEN

    def __post_init__(self) -> None:
        positives = sum(1 for s in self.snippets if s.kind == "positive")
        negatives = sum(1 for s in self.snippets if s.kind == "negative")
        if positives < 2 or negatives < 1:
            raise ValueError(
                f"template needs >=2 positive and >=1 negative snippets, "
                f"got {positives} positive / {negatives} negative"
            )
        if not self.reflection_checklist:
            raise ValueError("reflection checklist must not be empty")
        if not self.stop_token.strip():
            raise ValueError("stop token must be non-empty")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "PromptTemplate":
        return cls(
            preamble=data["preamble"],
            format_instructions=data["format_instructions"],
            one_shot_example=data["one_shot_example"],
            snippets=tuple(Snippet(s["kind"], s["text"]) for s in data["snippets"]),
            reflection_checklist=tuple(data["reflection_checklist"]),
            stop_token=data.get("stop_token", DEFAULT_STOP_TOKEN),
        )

    @classmethod
    def load(cls, path: str | Path) -> "PromptTemplate":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def bundled_template_path() -> Path:
    return Path(resources.files("circuitsmith").joinpath("data/template.prompt.json"))  # type: ignore[arg-type]


@lru_cache(maxsize=1)
def bundled_template() -> PromptTemplate:
    return PromptTemplate.load(bundled_template_path())


def assemble_generation_prompt(template: PromptTemplate, description: str) -> str:
    """Deterministic concatenation: preamble, format, example, snippets, task."""
    parts = [
        template.preamble.rstrip(),
        "## Output format",
        template.format_instructions.rstrip(),
        "## Worked example",
        template.one_shot_example.rstrip(),
    ]
    positive_index = 0
    for snippet in template.snippets:
        if snippet.kind == "positive":
            positive_index += 1
            parts.append(f"### Correct pattern {positive_index}")
        else:
            parts.append(_NEGATIVE_MARKER)
        parts.append(snippet.text.rstrip())
    parts.append("## Task")
    parts.append(description.rstrip())
    return "\n\n".join(parts) + "\n"


def _render_spec_for_prompt(spec: DeviceSpec | None) -> str:
    if spec is None:
        return (
            "(no parsable device specification was produced yet; "
            "emit the complete specification document)"
        )
    return render_document(spec).rstrip()


def assemble_reflection_prompt(
    template: PromptTemplate,
    spec: DeviceSpec | None,
    last_erc: ErcReport | None,
) -> str:
    """Checklist + current spec + rendered findings + stop-token instruction."""
    checklist = "\n".join(
        f"{i}. {item}" for i, item in enumerate(template.reflection_checklist, start=1)
    )
    if last_erc is None or not last_erc.findings:
        findings_text = "none"
    else:
        findings_text = "\n".join(f"- {explain(f)}" for f in last_erc.findings)
    parts = [
        "Review the device specification below against every checklist item.",
        "## Checklist",
        checklist,
        "## Current device specification",
        _render_spec_for_prompt(spec),
        "## Automated check findings",
        findings_text,
        "If any problem remains, emit the corrected complete device specification "
        "document.\nIf you find no further errors, reply with exactly this stop "
        f"token and nothing else: {template.stop_token}",
    ]
    return "\n\n".join(parts) + "\n"


def assemble_refine_prompt(template: PromptTemplate, spec: DeviceSpec, user_text: str) -> str:
    """Full prior device plus the user's clarification, asking for a re-emit."""
    parts = [
        template.preamble.rstrip(),
        "## Output format",
        template.format_instructions.rstrip(),
        "## Current device specification",
        render_document(spec).rstrip(),
        "## Requested change",
        user_text.rstrip(),
        "Emit the complete updated device specification document.",
    ]
    return "\n\n".join(parts) + "\n"


def erc_or_structural(spec: DeviceSpec, kb: KnowledgeBase) -> ErcReport:
    """Run the rule checker; a structural gate failure still yields its report."""
    try:
        return run_erc(spec, kb)
    except PrereqFailed as exc:
        return exc.report


@dataclass(frozen=True)
class GenerationRun:
    description: str
    spec: DeviceSpec | None
    iterations: int
    termination: str  # "stop_token" | "max_iterations" | "parse_failure"
    transcript_ref: str
    erc_history: tuple[ErcReport, ...]
    spec_history: tuple[DeviceSpec, ...] = ()  # spec as of each recorded ERC round
    responses: tuple[str, ...] = ()
    prompt_digests: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()


def _loop(
    initial_prompt: str,
    request_text: str,
    spec_description: str,
    provider: Provider,
    template: PromptTemplate,
    kb: KnowledgeBase,
    params: GenerationParams,
    max_reflections: int,
) -> GenerationRun:
    responses: list[str] = []
    digests: list[str] = []
    warnings: list[str] = []
    erc_history: list[ErcReport] = []
    spec_history: list[DeviceSpec] = []
    spec: DeviceSpec | None = None

    def complete(prompt: str) -> str:
        digests.append(prompt_digest(prompt, params))
        text = provider.complete(prompt, params)
        responses.append(text)
        return text

    last_diagnostics: list = []

    def try_adopt(response: str, round_label: str, quiet_on_failure: bool) -> None:
        nonlocal spec, last_diagnostics
        try:
            parsed, _diags = parse_device_spec(response)
        except NoParsableContent as exc:
            last_diagnostics = exc.diagnostics
            if not quiet_on_failure:
                warnings.append(f"{round_label}: response had no parsable spec; keeping previous")
            return
        spec = replace(parsed, description=spec_description)

    response = complete(initial_prompt)
    termination = None
    if template.stop_token in response:
        termination = "stop_token"
    try_adopt(response, "initial round", quiet_on_failure=spec is not None)
    if spec is not None:
        erc_history.append(erc_or_structural(spec, kb))
        spec_history.append(spec)

    rounds = 0
    while termination is None and rounds < max_reflections:
        rounds += 1
        reflection = assemble_reflection_prompt(
            template, spec, erc_history[-1] if erc_history else None
        )
        response = complete(reflection)
        has_stop = template.stop_token in response
        try_adopt(response, f"reflection round {rounds}", quiet_on_failure=has_stop)
        if spec is not None:
            erc_history.append(erc_or_structural(spec, kb))
            spec_history.append(spec)
        if has_stop:
            termination = "stop_token"

    if spec is None:
        raise ParseFailure(
            f"no round of {len(responses)} produced a parsable device specification",
            last_diagnostics,
        )
    if termination is None:
        termination = "max_iterations"

    provenance = Provenance(
        model_id=params.model_id,
        prompt_digest=digests[0],
        reflection_iterations=len(responses) - 1,
        created_at=provider.timestamp_for(digests[0]) or _utc_now(),
    )
    spec = replace(spec, provenance=provenance)

    return GenerationRun(
        description=request_text,
        spec=spec,
        iterations=len(responses),
        termination=termination,
        transcript_ref=str(provider.transcript_path or provider.name),
        erc_history=tuple(erc_history),
        spec_history=tuple(spec_history),
        responses=tuple(responses),
        prompt_digests=tuple(digests),
        warnings=tuple(warnings),
    )


def _utc_now() -> str:
    from datetime import datetime, timezone

    return datetime.now(timezone.utc).isoformat()


def generate_device(
    description: str,
    provider: Provider,
    template: PromptTemplate | None = None,
    kb: KnowledgeBase | None = None,
    params: GenerationParams | None = None,
    max_reflections: int = DEFAULT_MAX_REFLECTIONS,
    artifacts_dir: str | Path | None = None,
) -> GenerationRun:
    """Generate a device from a description, reflecting until the stop token.

    Raises ParseFailure when no round yields a parsable specification;
    provider errors pass through untouched.
    """
    if max_reflections < 0:
        raise ValueError("max_reflections must be >= 0")
    template = template or bundled_template()
    kb = kb or bundled_kb()
    params = params or GenerationParams()
    prompt = assemble_generation_prompt(template, description)
    run = _loop(prompt, description, description, provider, template, kb, params, max_reflections)
    if artifacts_dir is not None:
        write_run_artifacts(run, artifacts_dir)
    return run


def run_to_json(run: GenerationRun) -> dict[str, Any]:
    """Plain-data artifact form of a run; stable across replays."""
    from .devicespec import spec_to_document

    return {
        "description": run.description,
        "iterations": run.iterations,
        "termination": run.termination,
        "transcript_ref": run.transcript_ref,
        "spec": spec_to_document(run.spec) if run.spec is not None else None,
        "erc_history": [report.to_json() for report in run.erc_history],
        "responses": list(run.responses),
        "prompt_digests": list(run.prompt_digests),
        "warnings": list(run.warnings),
    }


def write_run_artifacts(run: GenerationRun, directory: str | Path) -> Path:
    """Write run.json, per-round ERC reports and specs, and the final device file."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "run.json").write_text(
        json.dumps(run_to_json(run), indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    for i, report in enumerate(run.erc_history):
        (directory / f"erc-round-{i:02d}.json").write_text(
            json.dumps(report.to_json(), indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )
    for i, spec in enumerate(run.spec_history):
        (directory / f"spec-round-{i:02d}.device.json").write_text(
            render_document(spec), encoding="utf-8"
        )
    if run.spec is not None:
        findings = validate(run.spec)
        text = render_document(run.spec) if findings else canonical_serialize(run.spec)
        (directory / "final.device.json").write_text(text, encoding="utf-8")
    return directory


@dataclass
class Turn:
    user_text: str
    run: GenerationRun


@dataclass
class Session:
    """An ordered conversation of generation and refinement turns."""

    id: str
    turns: list[Turn] = field(default_factory=list)

    @property
    def current(self) -> DeviceSpec | None:
        return self.turns[-1].run.spec if self.turns else None


def new_session(session_id: str | None = None) -> Session:
    return Session(id=session_id or uuid.uuid4().hex)


def generate_in_session(
    session: Session,
    description: str,
    provider: Provider,
    template: PromptTemplate | None = None,
    **kwargs: Any,
) -> Turn:
    run = generate_device(description, provider, template, **kwargs)
    turn = Turn(user_text=description, run=run)
    session.turns.append(turn)
    return turn


def refine(
    session: Session,
    user_text: str,
    provider: Provider,
    template: PromptTemplate | None = None,
    kb: KnowledgeBase | None = None,
    params: GenerationParams | None = None,
    max_reflections: int = DEFAULT_MAX_REFLECTIONS,
) -> Session:
    """Append a refinement turn built from the full prior spec plus the request."""
    if not session.turns or session.current is None:
        raise NoBaseSpec("refine requires a session with a generated device")
    template = template or bundled_template()
    kb = kb or bundled_kb()
    params = params or GenerationParams()
    base = session.current
    prompt = assemble_refine_prompt(template, base, user_text)
    run = _loop(
        prompt, user_text, base.description, provider, template, kb, params, max_reflections
    )
    session.turns.append(Turn(user_text=user_text, run=run))
    return session
