"""Command-line interface.

Exit codes: 0 on success, 1 on a domain error (bad diagram, unknown
parameter, ...), 2 on usage errors (argparse's convention).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import codec
from .diagram import canonicalize, validate
from .errors import DomainError
from .oracle import solve_oracle
from .sensitivity import evpi, parse_param_label, sweep, thresholds
from .solver import describe_step, solve
from .store import DATA_DIR_ENV, resolve_data_dir


def _load(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DomainError("PARSE_ERROR", f"cannot read '{path}': {exc}") from None
    return codec.decode(text)


def _print_result(diagram, result, output: str) -> None:
    if output == "machine":
        document = {
            "expected_utility": result.expected_utility,
            "policy": {
                name: {
                    codec.row_key_to_str(state): diagram.node(name).alternatives[idx]
                    for state, idx in sorted(table.items())
                }
                for name, table in sorted(result.policy.items())
            },
            "trace": [describe_step(step) for step in result.trace],
        }
        print(json.dumps(document, indent=2))
        return
    print(f"expected utility: {result.expected_utility:.6f}")
    for name, table in sorted(result.policy.items()):
        node = diagram.node(name)
        for state, idx in sorted(table.items()):
            state_text = codec.row_key_to_str(state) or "-"
            print(f"  {name} [{state_text}] -> {node.alternatives[idx]}")
    for step in result.trace:
        print(f"  trace: {describe_step(step)}")


def cmd_validate(args) -> int:
    try:
        text = Path(args.file).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error PARSE_ERROR: cannot read '{args.file}': {exc}", file=sys.stderr)
        return 1
    try:
        document = json.loads(text)
        diagram = codec.document_to_diagram(document)
    except json.JSONDecodeError as exc:
        print(f"error PARSE_ERROR: not valid JSON: {exc}", file=sys.stderr)
        return 1
    except DomainError as err:
        print(f"error {err.code}: {err.message}", file=sys.stderr)
        return 1
    report = validate(diagram)
    if report.ok:
        print(f"'{diagram.name}' is valid")
        return 0
    for violation in report.violations:
        print(f"{violation.code} at {violation.where}: {violation.message}")
    return 1


def cmd_solve(args) -> int:
    diagram = _load(args.file)
    result = solve(canonicalize(diagram))
    _print_result(diagram, result, args.output)
    return 0


def cmd_oracle(args) -> int:
    diagram = _load(args.file)
    result = solve_oracle(canonicalize(diagram))
    _print_result(diagram, result, args.output)
    return 0


def cmd_sweep(args) -> int:
    diagram = _load(args.file)
    ref = parse_param_label(args.param)
    steps = args.steps
    if steps < 1:
        raise DomainError("BAD_GRID", "--steps must be at least 1")
    if steps == 1:
        grid = [args.start]
    else:
        span = args.stop - args.start
        grid = [args.start + span * k / (steps - 1) for k in range(steps)]
    result = sweep(diagram, ref, grid)
    print(json.dumps(codec.sweep_to_document(result), indent=2))
    return 0


def cmd_thresholds(args) -> int:
    diagram = _load(args.file)
    ref = parse_param_label(args.param)
    values = thresholds(diagram, ref)
    print(json.dumps({"param": codec.param_ref_to_document(ref), "thresholds": values}))
    return 0


def cmd_evpi(args) -> int:
    diagram = _load(args.file)
    value = evpi(diagram, args.chance, args.decision)
    print(json.dumps({"chance": args.chance, "decision": args.decision, "evpi": value}))
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    serve(args.port, resolve_data_dir(args.data_dir))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dw", description="Exact decision analysis over influence diagrams."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a diagram document against every invariant")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="optimal policy and expected utility")
    p.add_argument("file")
    p.add_argument("--output", choices=["text", "machine"], default="text")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="brute-force solve (reference implementation)")
    p.add_argument("file")
    p.add_argument("--output", choices=["text", "machine"], default="text")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("sweep", help="one-way sensitivity sweep over a parameter")
    p.add_argument("file")
    p.add_argument("--param", required=True,
                   help="NODE/ROW/OUTCOME for a probability, NODE/ROW for a utility")
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, default=11, help="number of grid points")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("thresholds", help="parameter values where the recommendation flips")
    p.add_argument("file")
    p.add_argument("--param", required=True)
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("evpi", help="value of observing a chance node before a decision")
    p.add_argument("file")
    p.add_argument("--chance", required=True)
    p.add_argument("--decision", required=True)
    p.set_defaults(func=cmd_evpi)

    p = sub.add_parser("serve", help="run the HTTP consultation service")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--data-dir", default=None,
                   help=f"session storage directory (default: ${DATA_DIR_ENV} or ./dw_data)")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as err:
        print(f"error {err.code}: {err.message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
