"""Command-line front end: validate, classify, match, scaffold, serve.

Exit codes: 0 success, 1 validation findings of severity error (or a failed
match precondition), 2 usage or document parse errors, 3 I/O errors. Output
formats are stable so CI pipelines can diff them.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .aas import parse_environment, validate_environment
from .capability import extract_capabilities, spec_to_document
from .manifest import link_skills, parse_manifest, scaffold_capability_submodel
from .matching import explain, match_capability, parse_requirement, render_match_report
from .ontology import (
    StateOfMatter,
    builtin_process_ontology,
    load_ontology,
    merge_stack,
    validate_stack,
)
from .reasoner import MaterialSet, classify
from .repository import Repository
from .validation import (
    DocumentError,
    Finding,
    UnknownClassError,
    has_errors,
    sort_findings,
)

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2
EXIT_IO = 3


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliIoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


class _CliIoError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="capmatch", description="Capability matching for process modules")
    sub = parser.add_subparsers(dest="command", required=True)

    validate = sub.add_parser("validate", help="validate documents and their cross-links")
    validate.add_argument("--env", help="environment document")
    validate.add_argument("--ontology", action="append", default=[], help="ontology document (repeatable)")
    validate.add_argument("--manifest", action="append", default=[], help="service manifest (repeatable)")
    validate.add_argument("--format", choices=["tsv", "json"], default="tsv")
    validate.set_defaults(func=cmd_validate)

    classify_p = sub.add_parser("classify", help="classify a material set into process operations")
    classify_p.add_argument("--educts", type=_states, default=(), help="comma-separated states (solid,liquid,gas)")
    classify_p.add_argument("--products", type=_states, default=(), help="comma-separated states")
    classify_p.add_argument("--ontology", action="append", default=[], help="ontology document (default: bundled)")
    classify_p.set_defaults(func=cmd_classify)

    match_p = sub.add_parser("match", help="match a requirement against an environment")
    match_p.add_argument("--requirement", required=True)
    match_p.add_argument("--env", required=True)
    match_p.add_argument("--ontology", action="append", default=[], help="ontology document (default: bundled)")
    match_p.add_argument("--explain", action="store_true", help="append rendered explanations")
    match_p.set_defaults(func=cmd_match)

    scaffold = sub.add_parser("scaffold", help="derive a capability submodel spec from a manifest")
    scaffold.add_argument("--manifest", required=True)
    scaffold.add_argument("--out", required=True)
    scaffold.set_defaults(func=cmd_scaffold)

    serve = sub.add_parser("serve", help="run the repository HTTP service")
    serve.add_argument("--port", type=int, default=8084)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--store", help="snapshot file loaded on start, saved on shutdown")
    serve.add_argument("--env", help="environment fixture to preload")
    serve.add_argument("--ontology", action="append", default=[], help="ontology fixture to preload (repeatable)")
    serve.add_argument("--manifest", action="append", default=[], help="manifest fixture to preload (repeatable)")
    serve.set_defaults(func=cmd_serve)

    return parser


def _states(token: str) -> tuple[StateOfMatter, ...]:
    if not token:
        return ()
    states = []
    for part in token.split(","):
        part = part.strip()
        try:
            states.append(StateOfMatter(part))
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"unknown state of matter: {part!r} (expected solid, liquid, or gas)"
            ) from None
    return tuple(states)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _CliIoError(f"cannot read {path}: {exc}") from exc


def _read_json(path: str) -> dict:
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}: syntax error: {exc}") from exc


def _load_stack(paths: list[str]):
    if paths:
        ontologies = [load_ontology(_read(p)) for p in paths]
    else:
        ontologies = builtin_process_ontology()
    return merge_stack(ontologies)


def _print_findings(findings: list[Finding], fmt: str):
    findings = sort_findings(findings)
    if fmt == "json":
        print(json.dumps([f.as_document() for f in findings], indent=2, ensure_ascii=False))
    else:
        for finding in findings:
            print(finding.as_tsv())


def cmd_validate(args) -> int:
    findings: list[Finding] = []
    stack = None
    try:
        stack = _load_stack(args.ontology)
    except DocumentError as exc:
        if not exc.findings:
            raise
        findings.extend(exc.findings)
    if stack is not None:
        findings.extend(validate_stack(stack))

    manifests = [parse_manifest(_read(p)) for p in args.manifest]

    env = None
    if args.env:
        try:
            env = parse_environment(_read(args.env))
        except DocumentError as exc:
            if not exc.findings:
                raise  # structural/syntax problem, not a finding
            findings.extend(exc.findings)
    if env is not None:
        findings.extend(validate_environment(env))
        descriptors = []
        for submodel in env.submodels:
            extracted, extraction_findings = extract_capabilities(submodel, stack)
            descriptors.extend(extracted)
            findings.extend(extraction_findings)
        if manifests:
            findings.extend(link_skills(manifests, descriptors))

    _print_findings(findings, args.format)
    return EXIT_FINDINGS if has_errors(findings) else EXIT_OK


def cmd_classify(args) -> int:
    stack = _load_stack(args.ontology)
    materials = MaterialSet(educts=args.educts, products=args.products)
    for iri in classify(stack, materials):
        print(iri)
    return EXIT_OK


def cmd_match(args) -> int:
    stack = _load_stack(args.ontology)
    env = parse_environment(_read(args.env))
    requirement = parse_requirement(_read(args.requirement))
    try:
        candidates = match_capability(requirement, env, stack)
    except UnknownClassError as exc:
        print(f"error: required capability does not resolve: {exc.iri}", file=sys.stderr)
        return EXIT_FINDINGS
    sys.stdout.write(render_match_report(requirement, candidates))
    if args.explain:
        for i, candidate in enumerate(candidates):
            print(f"-- candidate {i}: {candidate.shell_id} ({candidate.degree.value})")
            print(explain(candidate))
    return EXIT_OK


def cmd_scaffold(args) -> int:
    manifest = parse_manifest(_read(args.manifest))
    spec = scaffold_capability_submodel(manifest)
    document = json.dumps(spec_to_document(spec), indent=2, ensure_ascii=False) + "\n"
    try:
        Path(args.out).write_text(document, encoding="utf-8")
    except OSError as exc:
        raise _CliIoError(f"cannot write {args.out}: {exc}") from exc
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    repository = Repository()
    store = Path(args.store) if args.store else None
    if store is not None and store.exists():
        repository.load(store)
    _preload(repository, args)

    app = create_app(repository)
    config = uvicorn.Config(app, host=args.host, port=args.port, log_level="warning")
    server = uvicorn.Server(config)
    try:
        server.run()
        clean = server.started
    except KeyboardInterrupt:
        # uvicorn re-raises the captured SIGINT after a graceful shutdown
        clean = True
    except SystemExit:
        clean = False  # uvicorn startup failure (e.g. port already bound)
    if not clean:
        print(f"error: could not start server on {args.host}:{args.port}", file=sys.stderr)
        return EXIT_IO
    if store is not None:
        repository.save(store)
    return EXIT_OK


def _preload(repository: Repository, args):
    for path in args.ontology or []:
        repository.put_ontology(_read_json(path))
    for path in args.manifest or []:
        repository.put_manifest(_read_json(path))
    if args.env:
        env_doc = _read_json(args.env)
        for submodel in env_doc.get("submodels", []):
            repository.put_submodel(submodel)
        for shell in env_doc.get("shells", []):
            repository.put_shell(shell)


if __name__ == "__main__":
    sys.exit(main())
