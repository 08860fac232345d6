"""Command-line front door.

Exit codes: 0 success, 1 fuzz or assertion failure, 2 I/O or parse error,
3 invalid assignment. The VDCONF_ENUM_CAP environment variable overrides the
enumeration cap of the brute-force oracles.
"""

from __future__ import annotations

import argparse
import os
import sys

from .bdd import BddStore, export_dot
from .cvd import DomainEngine
from .encode import CompiledSpace, compile_model, read_artifact, restrict_value, write_artifact
from .fuzz import run_fuzz
from .model import DEFAULT_ENUM_CAP, ModelError, parse_model
from .session import Session, SessionError

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_IO = 2
EXIT_INVALID_ASSIGNMENT = 3


def _enum_cap() -> int:
    raw = os.environ.get("VDCONF_ENUM_CAP")
    if raw is None:
        return DEFAULT_ENUM_CAP
    try:
        return int(raw)
    except ValueError:
        print(f"warning: ignoring bad VDCONF_ENUM_CAP={raw!r}", file=sys.stderr)
        return DEFAULT_ENUM_CAP


def _read_file(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise SystemExit(_fail(f"cannot read {path}: {exc}", EXIT_IO))


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load_space(path: str) -> CompiledSpace:
    try:
        return read_artifact(_read_file(path))
    except Exception as exc:
        raise SystemExit(_fail(f"cannot load artifact {path}: {exc}", EXIT_IO))


def _parse_literal(space: CompiledSpace, literal: str) -> tuple[int, int]:
    name, sep, label = literal.partition("=")
    if not sep or not name or not label:
        raise ModelError(f"assignment {literal!r} is not of the form name=value")
    var = space.model.var_index(name)
    return var, space.model.value_index(var, label)


def _domain_lines(space: CompiledSpace, domains: list[set[int]]) -> list[str]:
    lines = []
    for v in space.model.variables:
        labels = " ".join(v.domain.label_of(j) for j in sorted(domains[v.index]))
        lines.append(f"{v.name}: {labels}")
    return lines


def cmd_compile(args: argparse.Namespace) -> int:
    try:
        model = parse_model(_read_file(args.model))
        space = compile_model(model)
    except ModelError as exc:
        return _fail(str(exc), EXIT_IO)
    try:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(write_artifact(space))
    except OSError as exc:
        return _fail(f"cannot write {args.output}: {exc}", EXIT_IO)
    print(f"nodes: {len(space.store) - 2}")
    print(f"solutions: {space.solution_count()}")
    return EXIT_OK


def cmd_domains(args: argparse.Namespace) -> int:
    space = _load_space(args.artifact)
    overlay = BddStore(space.layout.num_bool_vars, base=space.store)
    engine = DomainEngine(overlay, space.layout, space.model.domain_sizes())
    root = space.root
    domains = engine.valid_domains(root)
    assigned: set[int] = set()
    for literal in args.assignments:
        try:
            var, value = _parse_literal(space, literal)
        except ModelError as exc:
            return _fail(f"invalid assignment {literal!r}: {exc}", EXIT_INVALID_ASSIGNMENT)
        if var in assigned:
            return _fail(
                f"invalid assignment {literal!r}: variable already assigned",
                EXIT_INVALID_ASSIGNMENT,
            )
        if value not in domains[var]:
            return _fail(
                f"invalid assignment {literal!r}: value not in current valid domain",
                EXIT_INVALID_ASSIGNMENT,
            )
        assigned.add(var)
        root = restrict_value(
            overlay, space.layout, root, var, value,
            space.model.variables[var].domain.size,
        )
        domains = engine.valid_domains(root)
    for line in _domain_lines(space, domains):
        print(line)
    return EXIT_OK


def cmd_interact(args: argparse.Namespace) -> int:
    space = _load_space(args.artifact)
    try:
        session = Session(space)
    except SessionError as exc:
        return _fail(str(exc), EXIT_IO)
    model = space.model
    while True:
        status = session.status()
        print(f"solutions: {status.solution_count}")
        for line in _domain_lines(space, [set(d) for d in status.domains]):
            print(line)
        if status.complete:
            values = dict(status.assignments)
            values.update(dict(status.forced))
            labels = ", ".join(
                model.variables[i].domain.label_of(values[i]) for i in range(model.n)
            )
            print(f"complete: ({labels})")
            return EXIT_OK
        try:
            line = input("> ").strip()
        except EOFError:
            return EXIT_OK
        if not line:
            continue
        if line == "quit":
            return EXIT_OK
        if line == "undo":
            try:
                session.undo()
            except SessionError as exc:
                print(f"cannot undo: {exc}")
            continue
        try:
            var, value = _parse_literal(space, line)
            session.assign(var, value)
        except (ModelError, SessionError) as exc:
            print(f"rejected: {exc}")


def cmd_stats(args: argparse.Namespace) -> int:
    space = _load_space(args.artifact)
    engine = DomainEngine(space.store, space.layout, space.model.domain_sizes())
    engine.valid_domains(space.root)
    layers = engine.build_layers(space.root)
    visits = engine.visit_report()
    bounds = engine.visit_bounds(layers)
    print(f"bool_vars: {space.layout.num_bool_vars}")
    print(f"nodes: {len(space.store) - 2}")
    print(f"solutions: {space.solution_count()}")
    for v in space.model.variables:
        i = v.index
        print(
            f"{v.name}: layer={len(layers.nodes_by_var[i])} "
            f"entries={len(layers.entries[i])} visits={visits[i]} bound={bounds[i]}"
        )
    return EXIT_OK


def cmd_export_dot(args: argparse.Namespace) -> int:
    space = _load_space(args.artifact)
    labels = [
        f"{space.model.variables[space.layout.var1(b)].name}^{space.layout.var2(b)}"
        for b in range(space.layout.num_bool_vars)
    ]
    text = export_dot(space.store, [("solutions", space.root)], labels)
    try:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    except OSError as exc:
        return _fail(f"cannot write {args.output}: {exc}", EXIT_IO)
    return EXIT_OK


def cmd_fuzz(args: argparse.Namespace) -> int:
    report = run_fuzz(
        seed=args.seed,
        trials=args.trials,
        max_vars=args.max_vars,
        max_domain=args.max_domain,
        max_rules=args.max_rules,
        cap=_enum_cap(),
    )
    print(f"{report.trials} trials, {len(report.mismatches)} mismatches")
    if report.mismatches:
        print(report.mismatches[0].reproducer())
        return EXIT_FAILURE
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import create_app

    space = _load_space(args.artifact)
    app = create_app(space)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vdconf",
        description="Compile configuration models to decision diagrams and "
        "compute backtrack-free valid domains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="compile a model file to an artifact")
    p.add_argument("model")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("domains", help="print valid domains under assignments")
    p.add_argument("artifact")
    p.add_argument("assignments", nargs="*", metavar="name=value")
    p.set_defaults(func=cmd_domains)

    p = sub.add_parser("interact", help="interactive terminal session")
    p.add_argument("artifact")
    p.set_defaults(func=cmd_interact)

    p = sub.add_parser("stats", help="print size and traversal cost counters")
    p.add_argument("artifact")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("export-dot", help="write the solution graph as DOT")
    p.add_argument("artifact")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_export_dot)

    p = sub.add_parser("fuzz", help="differential testing against the oracles")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--max-vars", type=int, default=5)
    p.add_argument("--max-domain", type=int, default=5)
    p.add_argument("--max-rules", type=int, default=4)
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("serve", help="serve the HTTP session API")
    p.add_argument("artifact")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_IO
    except KeyboardInterrupt:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
