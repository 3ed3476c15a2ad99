"""``darkstate`` command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 negative domain verdict
(``rwa``: no time-independent frame; ``classify``: no dark state).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .classify import DEFAULT_DEGENERACY_TOL, dark_subspaces
from .dynamics import (ScanAxis, eigenbasis, parameter_scan, projector, propagate,
                       scan_threads)
from .linalg import DEFAULT_RANK_RTOL
from .liouville import build_lindblad
from .model import (InvalidSystemError, LevelSystem, SystemFormatError, load_system,
                    save_system, system_hash)
from .presets import PRESETS, get_preset
from .report import (classification_report, format_classification, format_rb87_table,
                     frame_report, rb87_table)
from .rwa import DEFAULT_FRAME_RTOL, FrameError, build_hamiltonian, solve_frame

EXIT_OK, EXIT_USAGE, EXIT_VERDICT = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x: float) -> str:
    return f"{x:.12g}"


def _add_source(p: argparse.ArgumentParser):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=sorted(PRESETS), metavar="NAME",
                     help=f"built-in system: {', '.join(PRESETS)}")
    src.add_argument("--system", type=Path, metavar="FILE", help="system description JSON file")


def _add_common(p: argparse.ArgumentParser, formats=("table", "json")):
    p.add_argument("--tol-degeneracy", type=float, default=DEFAULT_DEGENERACY_TOL,
                   help="absolute tolerance for equal ground energies (default %(default)g)")
    p.add_argument("--tol-rank", type=float, default=DEFAULT_RANK_RTOL,
                   help="relative singular-value threshold for null spaces (default %(default)g)")
    p.add_argument("--tol-frame", type=float, default=DEFAULT_FRAME_RTOL,
                   help="relative tolerance on frequency-cycle residuals (default %(default)g)")
    p.add_argument("--out", type=Path, help="write output here instead of stdout")
    p.add_argument("--format", choices=formats, default=formats[0])


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="darkstate", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("rwa", help="check rotating-frame feasibility")
    _add_source(p)
    _add_common(p)

    p = sub.add_parser("classify", help="classify stationary dark states")
    _add_source(p)
    _add_common(p)

    p = sub.add_parser("evolve", help="propagate a density matrix")
    _add_source(p)
    _add_common(p, ("csv", "json"))
    p.add_argument("--t-end", type=float, default=100.0)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--rho0", default="e1",
                   help="initial state: e<J>, g<I>, mixed-ground, or a .npy/.json file")
    p.add_argument("--eigenbasis", action="store_true",
                   help="add populations in the eigenbasis of H, dark states last")

    p = sub.add_parser("scan", help="2-D scan of an asymptotic observable")
    _add_source(p)
    _add_common(p, ("csv", "json"))
    p.add_argument("--axis-a", required=True, metavar="PATH:MIN:MAX:N")
    p.add_argument("--axis-b", required=True, metavar="PATH:MIN:MAX:N")
    p.add_argument("--observable", default="excited_population",
                   choices=["excited_population", "purity"])
    p.add_argument("--rho0", default="e1")

    p = sub.add_parser("rb87-table", help="dark-state table of the Rb-87 schemes")
    _add_common(p)

    p = sub.add_parser("export", help="write a preset as a system description file")
    p.add_argument("--preset", choices=sorted(PRESETS), required=True, metavar="NAME")
    p.add_argument("--out", type=Path)

    sub.add_parser("presets", help="list built-in systems")
    return parser


def load_source(args) -> tuple[LevelSystem, str]:
    if args.preset:
        return get_preset(args.preset), args.preset
    try:
        data = args.system.read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {args.system}: {exc}") from exc
    return load_system(data), str(args.system)


def parse_rho0(spec: str, system: LevelSystem) -> np.ndarray:
    n, ng = system.n_levels, system.n_ground
    if spec == "mixed-ground":
        rho = np.zeros((n, n), dtype=complex)
        rho[:ng, :ng] = np.eye(ng) / ng
        return rho
    if spec[:1] in ("e", "g") and spec[1:].isdigit():
        k = int(spec[1:]) - 1
        limit = system.n_excited if spec[0] == "e" else ng
        if not 0 <= k < limit:
            raise UsageError(f"--rho0 {spec}: index out of range 1..{limit}")
        return projector(n, ng + k if spec[0] == "e" else k)
    path = Path(spec)
    if not path.exists():
        raise UsageError(f"--rho0 {spec!r}: not e<J>, g<I>, mixed-ground or an existing file")
    if path.suffix == ".npy":
        rho = np.load(path)
    else:
        doc = json.loads(path.read_text("utf-8"))
        rho = np.asarray(doc["real"], dtype=float) + 1j * np.asarray(doc.get("imag", 0.0))
    if rho.shape != (n, n):
        raise UsageError(f"--rho0 file has shape {rho.shape}, expected {(n, n)}")
    return rho.astype(complex)


def parse_axis(spec: str) -> ScanAxis:
    parts = spec.split(":")
    if len(parts) != 4:
        raise UsageError(f"axis {spec!r} must look like PATH:MIN:MAX:N")
    try:
        return ScanAxis.linspace(parts[0], float(parts[1]), float(parts[2]), int(parts[3]))
    except ValueError as exc:
        raise UsageError(f"axis {spec!r}: {exc}") from exc


def _emit(args, text: str):
    if args.out:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _write_sidecar(args, meta: dict):
    if args.out:
        Path(str(args.out) + ".meta.json").write_text(json.dumps(meta, indent=2) + "\n", "utf-8")


def _tolerances(args) -> dict:
    return {"degeneracy": args.tol_degeneracy, "rank_rtol": args.tol_rank,
            "frame_rtol": args.tol_frame}


def cmd_rwa(args) -> int:
    system, name = load_source(args)
    frame = solve_frame(system, args.tol_frame)
    rep = {"system": name, **frame_report(system, frame)}
    if args.format == "json":
        _emit(args, json.dumps(rep, indent=2) + "\n")
    else:
        lines = ["frame energies:"]
        lines += [f"  {lab:12s} {fmt(e)}" for lab, e in rep["epsilons"].items()]
        lines.append(f"independent cycles: {rep['independent_cycles']}")
        for k, cyc in enumerate(rep["cycles"], 1):
            lines.append(f"  cycle {k}: {' -> '.join(cyc['levels'])}  residual {cyc['residual']:.3e}")
        lines.append("feasible" if frame.feasible else
                     f"infeasible (tolerance {frame.tolerance:.3e})")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if frame.feasible else EXIT_VERDICT


def _classify(args, system):
    frame = solve_frame(system, args.tol_frame)
    H = build_hamiltonian(system, frame)
    return H, dark_subspaces(system, H, args.tol_degeneracy, args.tol_rank)


def cmd_classify(args) -> int:
    system, name = load_source(args)
    _, cls = _classify(args, system)
    rep = {"system": name, **classification_report(system, cls)}
    if args.format == "json":
        _emit(args, json.dumps(rep, indent=2) + "\n")
    else:
        _emit(args, format_classification(system, rep) + "\n")
    return EXIT_OK if cls.has_dark_state else EXIT_VERDICT


def cmd_evolve(args) -> int:
    if args.t_end < 0 or args.steps < 1:
        raise UsageError("--t-end must be >= 0 and --steps >= 1")
    system, name = load_source(args)
    frame = solve_frame(system, args.tol_frame)
    H = build_hamiltonian(system, frame)
    L = build_lindblad(system, H)
    rho0 = parse_rho0(args.rho0, system)
    times = [0.0] if args.t_end == 0 else np.linspace(0.0, args.t_end, args.steps + 1)
    traj = propagate(L, rho0, times)

    columns = ["t"] + [f"pop_{lab}" for lab in system.labels]
    columns += ["excited_population", "purity", "trace"]
    data = [traj.times[:, None], traj.populations, traj.excited_population[:, None],
            traj.purity[:, None], traj.trace[:, None]]
    if args.eigenbasis:
        _, vecs = eigenbasis(H)
        columns += [f"phi{n + 1}" for n in range(system.n_levels)]
        data.append(traj.projected_populations(vecs))
    table = np.hstack(data)

    meta = {"kind": "trajectory", "system": name, "system_sha256": system_hash(system),
            "stacking": "column", "tolerances": _tolerances(args), "columns": columns,
            "rho0": args.rho0, "t_end": args.t_end, "steps": len(times) - 1}
    if args.format == "json":
        _emit(args, json.dumps({"meta": meta, "rows": table.tolist()}) + "\n")
    else:
        _emit(args, _csv(columns, table))
        _write_sidecar(args, meta)
    return EXIT_OK


def _csv(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(["" if (v is None or np.ma.is_masked(v)) else fmt(v) for v in row])
    return buf.getvalue()


def cmd_scan(args) -> int:
    system, name = load_source(args)
    ax_a, ax_b = parse_axis(args.axis_a), parse_axis(args.axis_b)
    rho0 = parse_rho0(args.rho0, system)
    try:
        result = parameter_scan(system, ax_a, ax_b, args.observable, rho0)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    columns = [ax_a.path, ax_b.path, args.observable]
    rows = []
    for i, a in enumerate(ax_a.values):
        for j, b in enumerate(ax_b.values):
            cell = result.grid[i, j]
            rows.append([a, b, None if np.ma.is_masked(cell) else float(cell)])

    def axis_meta(ax, spec):
        _, lo, hi, n = spec.split(":")
        return {"path": ax.path, "min": float(lo), "max": float(hi), "n": int(n)}

    meta = {"kind": "scan", "system": name, "system_sha256": system_hash(system),
            "stacking": "column", "tolerances": _tolerances(args), "columns": columns,
            "observable": args.observable, "rho0": args.rho0,
            "axis_a": axis_meta(ax_a, args.axis_a), "axis_b": axis_meta(ax_b, args.axis_b),
            "masked_cells": int(np.ma.count_masked(result.grid)), "threads": scan_threads()}
    if args.format == "json":
        _emit(args, json.dumps({"meta": meta, "rows": rows}) + "\n")
    else:
        _emit(args, _csv(columns, rows))
        _write_sidecar(args, meta)
    return EXIT_OK


def cmd_rb87_table(args) -> int:
    rows = rb87_table(degeneracy_tol=args.tol_degeneracy, rank_rtol=args.tol_rank)
    if args.format == "json":
        _emit(args, json.dumps(rows, indent=2) + "\n")
    else:
        _emit(args, format_rb87_table(rows) + "\n")
        if args.out:
            Path(str(args.out) + ".json").write_text(json.dumps(rows, indent=2) + "\n", "utf-8")
    return EXIT_OK


def cmd_export(args) -> int:
    data = save_system(get_preset(args.preset))
    if args.out:
        args.out.write_bytes(data)
    else:
        sys.stdout.write(data.decode("utf-8"))
    return EXIT_OK


def cmd_presets(args) -> int:
    for name, desc in PRESETS.items():
        print(f"{name:12s} {desc.description}")
    return EXIT_OK


COMMANDS = {"rwa": cmd_rwa, "classify": cmd_classify, "evolve": cmd_evolve,
            "scan": cmd_scan, "rb87-table": cmd_rb87_table, "export": cmd_export,
            "presets": cmd_presets}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, SystemFormatError, InvalidSystemError) as exc:
        print(f"darkstate: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FrameError as exc:
        print(f"darkstate: {exc}", file=sys.stderr)
        return EXIT_VERDICT


if __name__ == "__main__":
    sys.exit(main())
