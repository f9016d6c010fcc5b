"""Command-line front end: point evaluations, plane scans, convergence tables.

Exit codes: 0 success, 2 usage error, 3 non-physical point, 4 I/O failure.
All floating-point output is fixed at 9 significant digits so files are
byte-identical across runs, platforms and thread counts.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .environment import (
    EnvironmentParams,
    EnvKind,
    bona_fide_check,
    classify_environment,
    eb_threshold,
)
from .errors import DomainError
from .protocols import (
    coherent_info_asymptotic,
    direct_eps_asymptotic,
    run_direct,
    run_swap,
    swap_eps_asymptotic,
)
from .scanner import DISTILLABLE_EPS, Activation, Protocol, ScanSpec, scan

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_IO = 4

OUTPUT_ENV_VAR = "ENTDIST_OUTPUT"

DEFAULT_CONVERGE_MUS = (1e2, 1e4, 1e6)

_PROTOCOLS = {
    "direct": Protocol.DIRECT,
    "swap": Protocol.SWAP,
    "environment": Protocol.ENVIRONMENT_ONLY,
}


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    """9-significant-digit rendering, locale independent."""
    return format(float(x), ".9g")


def _json_ready(value):
    """Round floats to the 9-digit output contract before serialization."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        return float(fmt(value))
    if isinstance(value, dict):
        return {k: _json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_ready(v) for v in value]
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entdist",
        description="Entanglement distribution through correlated lossy Gaussian environments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_point: bool) -> None:
        p.add_argument("--tau", type=float, required=True, help="beam-splitter transmissivity in (0, 1)")
        group = p.add_mutually_exclusive_group(required=True)
        group.add_argument("--omega", type=float, help="thermal variance (>= 1)")
        group.add_argument("--at-eb", action="store_true",
                           help="place the channels exactly at the entanglement-breaking threshold")
        if needs_point:
            p.add_argument("--g", type=float, required=True, help="q-quadrature correlation")
            p.add_argument("--gp", type=float, required=True, help="p-quadrature correlation")
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.add_argument("--output", "-o", default=None,
                       help=f"output path ('-' for stdout; default ${OUTPUT_ENV_VAR} or stdout)")

    p_point = sub.add_parser("point", help="classify one environment and evaluate both protocols")
    add_common(p_point, needs_point=True)
    p_point.add_argument("--mu", type=float, default=None,
                         help="also evaluate the finite-mu pipelines at this input variance")

    p_scan = sub.add_parser("scan", help="rasterize the correlation plane")
    add_common(p_scan, needs_point=False)
    p_scan.add_argument("--protocol", choices=sorted(_PROTOCOLS), required=True)
    p_scan.add_argument("--resolution", type=int, default=201)
    p_scan.add_argument("--g-min", type=float, default=None)
    p_scan.add_argument("--g-max", type=float, default=None)
    p_scan.add_argument("--gp-min", type=float, default=None)
    p_scan.add_argument("--gp-max", type=float, default=None)
    p_scan.add_argument("--threads", type=int, default=1)

    p_conv = sub.add_parser("converge", help="finite-mu convergence toward the asymptotic eps")
    add_common(p_conv, needs_point=True)
    p_conv.add_argument("--protocol", choices=["direct", "swap"], required=True)
    p_conv.add_argument("--mu", type=float, nargs="+", default=list(DEFAULT_CONVERGE_MUS))

    return parser


def _validate_common(args) -> float:
    """Flag-level validation (exit 2 territory); returns the resolved omega."""
    if not 0.0 < args.tau < 1.0:
        raise UsageError(f"--tau must lie in (0, 1), got {args.tau}")
    if args.at_eb:
        return eb_threshold(args.tau)
    if args.omega < 1.0:
        raise UsageError(f"--omega must be >= 1, got {args.omega}")
    return args.omega


def _resolve_output(args) -> str | None:
    if args.output is not None:
        return args.output
    return os.environ.get(OUTPUT_ENV_VAR)


def _write_output(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IOError(str(exc)) from exc


def _rows_to_csv(header: list[str], rows: list[list[str]]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# point
# ---------------------------------------------------------------------------

def cmd_point(args) -> int:
    omega = _validate_common(args)
    if args.mu is not None and args.mu < 1.0:
        raise UsageError(f"--mu must be >= 1, got {args.mu}")

    check = bona_fide_check(omega, args.g, args.gp)
    report: dict[str, object] = {
        "tau": args.tau,
        "omega": omega,
        "omega_eb": eb_threshold(args.tau),
        "g": args.g,
        "gp": args.gp,
    }
    if not check:
        report["env_class"] = EnvKind.FORBIDDEN.value
        report["bona_fide_failures"] = "; ".join(check.failures)
        _write_output(_render_point(report, args.format), _resolve_output(args))
        return EXIT_DOMAIN

    env_class = classify_environment(omega, args.g, args.gp)
    env = EnvironmentParams(args.tau, omega, args.g, args.gp)
    direct_eps = direct_eps_asymptotic(env)
    swap_eps = swap_eps_asymptotic(env)
    report.update({
        "env_class": env_class.kind.value,
        "env_pts": env_class.env_pts,
        "direct_eps": direct_eps,
        "direct_coherent_info": coherent_info_asymptotic(direct_eps),
        "direct_entangling": direct_eps < 1.0,
        "direct_distillable": direct_eps < DISTILLABLE_EPS,
        "swap_eps": swap_eps,
        "swap_coherent_info": coherent_info_asymptotic(swap_eps),
        "swap_entangling": swap_eps < 1.0,
        "swap_distillable": swap_eps < DISTILLABLE_EPS,
    })
    if args.mu is not None:
        direct = run_direct(args.mu, env)
        swap = run_swap(args.mu, env)
        report.update({
            "mu": args.mu,
            "direct_eps_finite": direct.report.pts_min,
            "direct_eps_rel_error": abs(direct.report.pts_min - direct_eps) / direct_eps,
            "direct_coherent_info_finite": direct.report.coherent_info,
            "swap_eps_finite": swap.report.pts_min,
            "swap_eps_rel_error": abs(swap.report.pts_min - swap_eps) / swap_eps,
            "swap_coherent_info_finite": swap.report.coherent_info,
        })
    _write_output(_render_point(report, args.format), _resolve_output(args))
    return EXIT_OK


def _render_point(report: dict, fmt_kind: str) -> str:
    if fmt_kind == "json":
        return json.dumps(_json_ready(report), indent=2) + "\n"
    rows = []
    for key, value in report.items():
        if isinstance(value, bool):
            rows.append([key, "true" if value else "false"])
        elif isinstance(value, float):
            rows.append([key, fmt(value)])
        else:
            rows.append([key, str(value)])
    return _rows_to_csv(["key", "value"], rows)


# ---------------------------------------------------------------------------
# scan
# ---------------------------------------------------------------------------

def cmd_scan(args) -> int:
    omega = _validate_common(args)
    if args.resolution < 2:
        raise UsageError(f"--resolution must be >= 2, got {args.resolution}")
    if args.threads < 1:
        raise UsageError(f"--threads must be >= 1, got {args.threads}")
    for lo, hi, name in ((args.g_min, args.g_max, "--g-min/--g-max"),
                         (args.gp_min, args.gp_max, "--gp-min/--gp-max")):
        if (lo is None) != (hi is None):
            raise UsageError(f"{name} must be given together")
        if lo is not None and not lo < hi:
            raise UsageError(f"{name} must describe a nonempty interval")

    spec = ScanSpec(
        tau=args.tau,
        protocol=_PROTOCOLS[args.protocol],
        resolution=args.resolution,
        g_range=None if args.g_min is None else (args.g_min, args.g_max),
        gp_range=None if args.gp_min is None else (args.gp_min, args.gp_max),
        omega=None if args.at_eb else omega,
    )
    grid = scan(spec, threads=args.threads)
    if args.format == "json":
        text = _render_scan_json(grid)
    else:
        text = _render_scan_csv(grid)
    _write_output(text, _resolve_output(args))
    return EXIT_OK


def _scan_rows(grid):
    gs = grid.spec.g_centers()
    gps = grid.spec.gp_centers()
    res = grid.spec.resolution
    for i in range(res):
        for j in range(res):
            cell = grid.cells[i * res + j]
            yield gs[i], gps[j], cell


def _render_scan_csv(grid) -> str:
    rows = []
    for g, gp, cell in _scan_rows(grid):
        rows.append([
            fmt(g),
            fmt(gp),
            cell.env_class.kind.value,
            cell.activation.value,
            "" if cell.eps_value is None else fmt(cell.eps_value),
        ])
    return _rows_to_csv(["g", "gp", "env_class", "activation", "eps"], rows)


def _render_scan_json(grid) -> str:
    spec = grid.spec
    counts = {f"{kind.value}/{act.value}": grid.summary.get((kind, act), 0)
              for kind in EnvKind for act in Activation}
    fractions = {key: count / len(grid.cells) for key, count in counts.items()}
    cells = [
        {
            "g": g,
            "gp": gp,
            "env_class": cell.env_class.kind.value,
            "activation": cell.activation.value,
            "eps": cell.eps_value,
        }
        for g, gp, cell in _scan_rows(grid)
    ]
    payload = {
        "spec": {
            "tau": spec.tau,
            "omega": spec.omega_value,
            "at_eb": spec.omega is None,
            "protocol": spec.protocol.value,
            "g_range": list(spec.g_range),
            "gp_range": list(spec.gp_range),
            "resolution": spec.resolution,
        },
        "summary": {"total": len(grid.cells), "counts": counts, "fractions": fractions},
        "cells": cells,
    }
    return json.dumps(_json_ready(payload), indent=2) + "\n"


# ---------------------------------------------------------------------------
# converge
# ---------------------------------------------------------------------------

def cmd_converge(args) -> int:
    omega = _validate_common(args)
    for mu in args.mu:
        if mu < 1.0:
            raise UsageError(f"--mu entries must be >= 1, got {mu}")

    env = EnvironmentParams(args.tau, omega, args.g, args.gp)  # may raise DomainError
    runner = run_direct if args.protocol == "direct" else run_swap
    rows = []
    for mu in args.mu:
        result = runner(mu, env)
        eps_inf = result.asymptotic_eps
        rows.append({
            "mu": mu,
            "eps_finite": result.report.pts_min,
            "eps_asymptotic": eps_inf,
            "rel_error": abs(result.report.pts_min - eps_inf) / eps_inf,
        })
    if args.format == "json":
        text = json.dumps(_json_ready(rows), indent=2) + "\n"
    else:
        text = _rows_to_csv(
            ["mu", "eps_finite", "eps_asymptotic", "rel_error"],
            [[fmt(r["mu"]), fmt(r["eps_finite"]), fmt(r["eps_asymptotic"]), fmt(r["rel_error"])]
             for r in rows],
        )
    _write_output(text, _resolve_output(args))
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry points
# ---------------------------------------------------------------------------

_COMMANDS = {"point": cmd_point, "scan": cmd_scan, "converge": cmd_converge}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help and 2 for usage errors
        return 0 if exc.code == 0 else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except IOError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def main_entry() -> None:
    sys.exit(main())
