"""Command-line entry point.

Machine-readable results go to stdout, human diagnostics to stderr.  Exit
codes: 0 success, 1 findings or failed checks (validate/erc/bench/generate
failures), 2 usage or configuration errors.  File arguments accept ``-``
for stdin.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench as bench_mod
from . import devicespec, erc, export, pinscore
from .llmgateway import (
    Provider,
    ProviderError,
    ReplayMiss,
    TransportError,
    load_providers,
)
from .partsdb import DuplicateAlias, SchemaError, bundled_kb, load_kb, lookup
from .pipeline import (
    ParseFailure,
    PromptTemplate,
    bundled_template,
    generate_device,
    run_to_json,
)

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2


class ConfigError(Exception):
    pass


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


def _read_json(path: str):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")


def _load_kb(path: str | None):
    if path is None:
        return bundled_kb()
    try:
        return load_kb(path)
    except (SchemaError, DuplicateAlias) as exc:
        raise ConfigError(str(exc)) from exc


def _load_template(path: str | None) -> PromptTemplate:
    if path is None:
        return bundled_template()
    try:
        return PromptTemplate.load(path)
    except (OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
        raise ConfigError(f"bad template {path}: {exc}") from exc


def _load_spec(path: str):
    try:
        return devicespec.parse_canonical(_read_text(path))
    except devicespec.MalformedDocument as exc:
        raise ConfigError(f"bad device document {path}: {exc}") from exc


def _resolve_provider(spec_text: str, config_path: str | None) -> Provider:
    """Resolve ``replay:<path>`` shorthand or a named provider from the config."""
    if spec_text.startswith("replay:"):
        return Provider.replay(spec_text.split(":", 1)[1])
    if config_path is None:
        raise ConfigError(
            f"provider {spec_text!r} needs --providers CONFIG, or use replay:<transcript>"
        )
    providers = load_providers(config_path)
    if spec_text not in providers:
        raise ConfigError(f"provider {spec_text!r} not in {config_path}")
    return providers[spec_text]


def _print_json(payload) -> None:
    print(json.dumps(payload, indent=2, ensure_ascii=False))


# --- command handlers ---------------------------------------------------------


def cmd_validate(args) -> int:
    spec = _load_spec(args.spec)
    findings = devicespec.validate(spec)
    _print_json(
        [
            {
                "kind": f.kind,
                "message": f.message,
                "endpoint": str(f.endpoint),
                "connection_index": f.connection_index,
            }
            for f in findings
        ]
    )
    return EXIT_FINDINGS if findings else EXIT_OK


def cmd_erc(args) -> int:
    spec = _load_spec(args.spec)
    kb = _load_kb(args.kb)
    rules = args.rules.split(",") if args.rules else None
    try:
        report = erc.run_erc(spec, kb, rules=rules)
    except erc.UnknownRule as exc:
        raise ConfigError(f"unknown rule {exc}") from exc
    except erc.PrereqFailed as exc:
        _print_json(exc.report.to_json())
        print("structural validation failed; fix these before electrical checks", file=sys.stderr)
        return EXIT_FINDINGS
    _print_json(report.to_json())
    return EXIT_OK if report.clean else EXIT_FINDINGS


def cmd_generate(args) -> int:
    description = _read_text(args.description_file)
    provider = _resolve_provider(args.provider, args.providers)
    template = _load_template(args.template)
    kb = _load_kb(args.kb)
    try:
        run = generate_device(
            description.strip(),
            provider,
            template,
            kb=kb,
            max_reflections=args.max_reflections,
            artifacts_dir=args.out,
        )
    except ParseFailure as exc:
        print(f"generation failed: {exc}", file=sys.stderr)
        return EXIT_FINDINGS
    except (TransportError, ProviderError, ReplayMiss) as exc:
        print(f"provider failure: {exc}", file=sys.stderr)
        return EXIT_FINDINGS
    _print_json(run_to_json(run))
    print(f"run artifacts written to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_score_pinouts(args) -> int:
    kb = _load_kb(args.kb)
    generated = _read_json(args.generated)
    if not isinstance(generated, dict):
        raise ConfigError("--generated must be a JSON object of {component: [pin, ...]}")
    scores = []
    for name, pins in generated.items():
        record = lookup(kb, name)
        if record is None:
            raise ConfigError(f"component {name!r} is not in the knowledge base")
        scores.append(pinscore.score_pinout(record, list(pins)))
    overrides = {}
    if args.overrides:
        overrides = pinscore.load_overrides(_read_json(args.overrides))
    try:
        report = pinscore.build_report(scores, overrides)
    except (KeyError, pinscore.EmptyInput) as exc:
        raise ConfigError(str(exc)) from exc
    _write_text(args.report, json.dumps(report, indent=2, ensure_ascii=False) + "\n")
    _print_json(report["aggregate"])
    return EXIT_OK


def cmd_bench_run(args) -> int:
    tasks = _load_tasks(args.tasks)
    provider = _resolve_provider(args.provider, args.providers)
    template = _load_template(args.template)
    kb = _load_kb(args.kb)
    try:
        report = bench_mod.run_benchmark(
            tasks, provider, template, kb=kb, jobs=args.jobs,
            artifacts_dir=args.artifacts,
        )
    except bench_mod.EmptyInput as exc:
        raise ConfigError(str(exc)) from exc
    except (TransportError, ProviderError, ReplayMiss) as exc:
        print(f"provider failure: {exc}", file=sys.stderr)
        return EXIT_FINDINGS
    payload = report.to_json()
    _write_text(args.out, json.dumps(payload, indent=2, ensure_ascii=False) + "\n")
    _print_json(payload["aggregates"])
    failed = any(
        row.schematic == "fail" or row.code == "fail" for row in report.per_task.values()
    )
    return EXIT_FINDINGS if failed else EXIT_OK


def _load_tasks(path: str):
    try:
        return bench_mod.load_tasks(path)
    except (bench_mod.SchemaError, bench_mod.DuplicateId) as exc:
        raise ConfigError(str(exc)) from exc


def cmd_bench_verdicts(args) -> int:
    report = bench_mod.BenchReport.from_json(_read_json(args.infile))
    verdicts = _read_json(args.verdicts)
    try:
        updated = bench_mod.ingest_manual_verdicts(report, verdicts)
    except (bench_mod.UnknownTaskId, bench_mod.SchemaError) as exc:
        raise ConfigError(str(exc)) from exc
    out = args.out or args.infile
    payload = updated.to_json()
    _write_text(out, json.dumps(payload, indent=2, ensure_ascii=False) + "\n")
    _print_json(payload["aggregates"])
    return EXIT_OK


def cmd_bench_render(args) -> int:
    report = bench_mod.BenchReport.from_json(_read_json(args.infile))
    sys.stdout.write(bench_mod.render_report(report))
    return EXIT_OK


def cmd_export(args) -> int:
    spec = _load_spec(args.spec)
    kb = _load_kb(args.kb) if args.kb else None
    try:
        if args.format == "flat":
            text = export.to_flat_netlist(spec, kb=kb)
        else:
            text = export.to_graph_doc(spec, kb=kb)
    except devicespec.InvalidSpec as exc:
        print(f"spec is not exportable: {exc}", file=sys.stderr)
        return EXIT_FINDINGS
    _write_text(args.out, text)
    return EXIT_OK


def cmd_parts_show(args) -> int:
    kb = _load_kb(args.kb)
    record = lookup(kb, args.name)
    if record is None:
        print(f"no component matches {args.name!r}", file=sys.stderr)
        return EXIT_FINDINGS
    _print_json(
        {
            "canonical_name": record.canonical_name,
            "category": record.category,
            "name_aliases": list(record.name_aliases),
            "requires": list(record.requires),
            "pins": [
                {
                    "canonical": p.canonical,
                    "aliases": list(p.aliases),
                    "critical": p.critical,
                    "role": p.role,
                }
                for p in record.pins
            ],
        }
    )
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    if args.providers:
        providers = load_providers(args.providers)
    else:
        from .partsdb import bundled_kb_path

        transcript = bundled_kb_path().parent / "transcripts" / "session_refine.jsonl"
        providers = {"replay": Provider.replay(transcript)}
        print("no --providers given; serving the bundled replay provider", file=sys.stderr)
    ui_dir = None
    if args.with_ui:
        ui_dir = Path(args.ui_dir)
        if not (ui_dir / "index.html").is_file():
            raise ConfigError(f"--with-ui: no index.html under {ui_dir}")
    app = create_app(
        providers,
        kb=_load_kb(args.kb),
        template=_load_template(args.template),
        artifacts_dir=args.artifacts,
        ui_dir=ui_dir,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="circuitsmith",
        description="Generate, check, score, benchmark and serve microcontroller device designs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a device from a description")
    p.add_argument("--description-file", required=True, help="task text file, or - for stdin")
    p.add_argument("--provider", required=True, help="provider name, or replay:<transcript>")
    p.add_argument("--providers", help="providers config file")
    p.add_argument("--template", help="prompt template JSON (default: bundled)")
    p.add_argument("--kb", help="knowledge base file (default: bundled)")
    p.add_argument("--out", required=True, help="run artifacts directory")
    p.add_argument("--max-reflections", type=int, default=3)
    p.set_defaults(handler=cmd_generate)

    p = sub.add_parser("validate", help="structural validation of a device document")
    p.add_argument("--spec", required=True)
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("erc", help="run electrical rule checks")
    p.add_argument("--spec", required=True)
    p.add_argument("--kb")
    p.add_argument("--rules", help="comma-separated rule ids (default: all)")
    p.set_defaults(handler=cmd_erc)

    p = sub.add_parser("score", help="scoring commands")
    score_sub = p.add_subparsers(dest="score_command", required=True)
    sp = score_sub.add_parser("pinouts", help="strict/permissive pinout scoring")
    sp.add_argument("--kb")
    sp.add_argument("--generated", required=True, help="JSON {component: [pins]}")
    sp.add_argument("--report", required=True, help="output report path, or -")
    sp.add_argument("--overrides", help="expert override file")
    sp.set_defaults(handler=cmd_score_pinouts)

    p = sub.add_parser("bench", help="benchmark commands")
    bench_sub = p.add_subparsers(dest="bench_command", required=True)
    bp = bench_sub.add_parser("run", help="run the benchmark")
    bp.add_argument("--tasks", required=True)
    bp.add_argument("--provider", required=True)
    bp.add_argument("--providers")
    bp.add_argument("--template")
    bp.add_argument("--kb")
    bp.add_argument("--out", required=True, help="report output path, or -")
    bp.add_argument("--jobs", type=int, default=1)
    bp.add_argument("--artifacts", help="optional per-task artifacts directory")
    bp.set_defaults(handler=cmd_bench_run)
    bp = bench_sub.add_parser("verdicts", help="fold in manual verdicts")
    bp.add_argument("--in", dest="infile", required=True)
    bp.add_argument("--verdicts", required=True)
    bp.add_argument("--out", help="output path (default: overwrite --in)")
    bp.set_defaults(handler=cmd_bench_verdicts)
    bp = bench_sub.add_parser("render", help="render a report as a text table")
    bp.add_argument("--in", dest="infile", required=True)
    bp.set_defaults(handler=cmd_bench_render)

    p = sub.add_parser("export", help="export netlist or graph document")
    p.add_argument("--spec", required=True)
    p.add_argument("--format", choices=["flat", "graph"], required=True)
    p.add_argument("--out", required=True, help="output path, or -")
    p.add_argument("--kb", help="knowledge base for net labels (optional)")
    p.set_defaults(handler=cmd_export)

    p = sub.add_parser("parts", help="knowledge base commands")
    parts_sub = p.add_subparsers(dest="parts_command", required=True)
    pp = parts_sub.add_parser("show", help="show one component record")
    pp.add_argument("name")
    pp.add_argument("--kb")
    pp.set_defaults(handler=cmd_parts_show)

    p = sub.add_parser("serve", help="run the HTTP design service")
    p.add_argument("--port", type=int, default=8787)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--providers", help="providers config file")
    p.add_argument("--kb")
    p.add_argument("--template")
    p.add_argument("--artifacts", default="artifacts")
    p.add_argument("--with-ui", action="store_true", help="serve the studio UI")
    p.add_argument("--ui-dir", default="frontend", help="UI directory with index.html and dist/")
    p.set_defaults(handler=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help; keep its codes
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TransportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
