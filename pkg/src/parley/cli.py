"""Command-line interface.

Exit codes:

* 0 — success (document valid / properties hold / run completed and
  conformed / export written)
* 1 — negative result (validation errors; a verification property
  failed; the run ended Stuck or DeadlineExpired, or the protocol is
  unverified and --force was not given)
* 2 — input error (unreadable file, parse error, malformed registry)
* 3 — verification inconclusive: the state-space bound was hit
* 4 — the run finished but its trace does not conform to the net
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ParleyError, ParseError, ProtocolValidationError
from .model import ComplexMessage, RoleKind, validate_well_formedness
from .parser import parse_protocol
from .cpn import to_dot, to_pnml, translate, verify
from .cpn.reach import DEFAULT_MAX_NODES, DEFAULT_MAX_TOKENS
from .runtime import (
    AgentId,
    AgentKind,
    Status,
    announce,
    create_session,
    run_to_completion,
    trace_conformance,
)
from .services import Registry, SelectionPolicy


def _emit(data: dict) -> None:
    json.dump(data, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _cmd_validate(args) -> int:
    try:
        source = _read(args.file)
    except OSError as exc:
        return _fail(str(exc))
    try:
        ip = parse_protocol(source, validate=False)
    except ParseError as exc:
        return _fail(str(exc))
    report = validate_well_formedness(ip)
    _emit({"protocol": ip.id, **report.to_dict()})
    return 0 if report.ok else 1


def _cmd_verify(args) -> int:
    try:
        source = _read(args.file)
    except OSError as exc:
        return _fail(str(exc))
    try:
        ip = parse_protocol(source)
    except (ParseError, ProtocolValidationError) as exc:
        return _fail(str(exc))
    try:
        net = translate(ip)
        report = verify(
            net, max_nodes=args.max_nodes, max_tokens=args.max_tokens
        )
    except ParleyError as exc:
        return _fail(str(exc))
    _emit(report.to_dict())
    if not report.bounded:
        return 3
    return 0 if report.ok else 1


def _auto_bindings(ip) -> dict:
    """First step's sender becomes the Integrator; every other process
    role is played by an Enterprise agent named after it."""
    if not ip.messages:
        integrator_role = next(
            (
                r.name
                for r in ip.roles
                if r.kind is RoleKind.PRIVATE_PROCESS
            ),
            None,
        )
    else:
        first = ip.messages[0]
        integrator_role = (
            first.sender
            if not isinstance(first, ComplexMessage)
            else first.sender
        )
    bindings = {}
    for role in ip.roles:
        if role.kind is not RoleKind.PRIVATE_PROCESS:
            continue
        if role.name == integrator_role:
            bindings[role.name] = AgentId(
                "integrator", AgentKind.INTEGRATOR
            )
        else:
            bindings[role.name] = AgentId(
                role.name, AgentKind.ENTERPRISE
            )
    return bindings


def _cmd_simulate(args) -> int:
    try:
        source = _read(args.file)
    except OSError as exc:
        return _fail(str(exc))
    try:
        ip = parse_protocol(source)
    except (ParseError, ProtocolValidationError) as exc:
        return _fail(str(exc))
    registry = None
    if args.registry:
        try:
            registry = Registry.load(args.registry)
        except (OSError, ParleyError) as exc:
            return _fail(str(exc))
    try:
        net = translate(ip)
        report = verify(net)
    except ParleyError as exc:
        return _fail(str(exc))
    if not (report.bounded and report.ok) and not args.force:
        _emit(
            {
                "protocol": ip.id,
                "status": "NotRun",
                "reason": "verification did not pass; rerun with --force",
                "verification": report.to_dict(),
            }
        )
        return 1
    try:
        session = create_session(
            ip,
            net,
            _auto_bindings(ip),
            args.seed,
            verification=report,
            force=args.force,
            registry=registry,
            policy=SelectionPolicy(args.policy),
            retries=args.retries,
        )
        announce(session)
        run_to_completion(session, max_steps=args.max_steps)
    except ParleyError as exc:
        return _fail(str(exc))
    conformance = trace_conformance(session.trace, net)
    last_status = next(
        (
            e.status
            for e in reversed(list(session.trace))
            if e.status is not None
        ),
        (None, session.status.value, ""),
    )
    summary = {
        "protocol": ip.id,
        "seed": args.seed,
        "status": session.status.value,
        "reason": last_status[2],
        "ticks": session.tick,
        "events": len(session.trace),
        "conformant": conformance.ok,
        "conformance-reason": conformance.reason,
    }
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        trace_path = out / f"{ip.id}-s{args.seed}.trace.jsonl"
        trace_path.write_text(
            session.trace.dumps_jsonl(), encoding="utf-8"
        )
        summary_path = out / f"{ip.id}-s{args.seed}.summary.json"
        summary_path.write_text(
            json.dumps(summary, indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        summary["trace"] = str(trace_path)
    _emit(summary)
    if not conformance.ok:
        return 4
    return 0 if session.status is Status.COMPLETED else 1


def _cmd_export(args) -> int:
    try:
        source = _read(args.file)
    except OSError as exc:
        return _fail(str(exc))
    try:
        ip = parse_protocol(source)
        net = translate(ip)
    except ParleyError as exc:
        return _fail(str(exc))
    rendered = to_pnml(net) if args.format == "pnml" else to_dot(net)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{ip.id}.{args.format}"
        path.write_text(rendered, encoding="utf-8")
        print(path)
    else:
        sys.stdout.write(rendered)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parley",
        description="Parse, verify, simulate and export interaction "
        "protocols.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "validate", help="parse a protocol and report well-formedness"
    )
    p.add_argument("file")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser(
        "verify",
        help="check deadlock freedom and proper termination by bounded "
        "reachability",
    )
    p.add_argument("file")
    p.add_argument(
        "--max-nodes",
        type=int,
        default=DEFAULT_MAX_NODES,
        help="state-space node bound (default %(default)s)",
    )
    p.add_argument(
        "--max-tokens",
        type=int,
        default=DEFAULT_MAX_TOKENS,
        help="per-place token bound (default %(default)s)",
    )
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser(
        "simulate", help="execute the protocol with mock agents"
    )
    p.add_argument("file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--registry", help="registry JSON for service roles")
    p.add_argument("--max-steps", type=int, default=10_000)
    p.add_argument(
        "--policy",
        choices=[pol.value for pol in SelectionPolicy],
        default=SelectionPolicy.MIN_COST.value,
    )
    p.add_argument("--retries", type=int, default=1)
    p.add_argument(
        "--force",
        action="store_true",
        help="run even if verification does not pass",
    )
    p.add_argument("--out", help="directory for trace and summary files")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser(
        "export", help="export the translated net as PNML or DOT"
    )
    p.add_argument("file")
    p.add_argument("--format", choices=["pnml", "dot"], required=True)
    p.add_argument("--out", help="directory for the exported file")
    p.set_defaults(func=_cmd_export)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
