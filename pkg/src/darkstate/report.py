"""Serializable reports for frames, classifications and the Rb-87 table."""

from __future__ import annotations

import json
from importlib import resources

import numpy as np

from .classify import CASE_2, DarkClassification, DegenerateGroup, classify_system
from .model import LevelSystem
from .presets import RB87_POLARIZATIONS, rb87_scheme
from .rwa import RotatingFrame, coupling_components


def load_schema(name: str) -> dict:
    text = resources.files("darkstate.schemas").joinpath(name).read_text("utf-8")
    return json.loads(text)


def component_cycles(system: LevelSystem) -> dict[int, int]:
    """Independent loops per component of the nonzero-coupling graph."""
    comp = coupling_components(system)
    ng = system.n_ground
    edges: dict[int, int] = {}
    nodes: dict[int, set] = {}
    for c in system.couplings:
        if c.magnitude == 0:
            continue
        k = int(comp[c.ground])
        edges[k] = edges.get(k, 0) + 1
        nodes.setdefault(k, set()).update({c.ground, ng + c.excited})
    return {k: edges[k] - len(nodes[k]) + 1 for k in edges}


def _complex(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def frame_report(system: LevelSystem, frame: RotatingFrame) -> dict:
    labels = system.labels
    return {
        "feasible": bool(frame.feasible),
        "tolerance": frame.tolerance,
        "independent_cycles": frame.independent_cycle_count,
        "epsilons": {labels[k]: float(e) for k, e in enumerate(frame.epsilons)},
        "cycles": [
            {"levels": [labels[a] for a, _ in cyc.edges], "residual": cyc.residual}
            for cyc in frame.cycles
        ],
    }


def group_report(system: LevelSystem, group: DegenerateGroup, cycles: dict[int, int]) -> dict:
    labels = system.labels
    out = {
        "members": [labels[m] for m in group.members],
        "energy": group.energy,
        "dimension": group.dimension,
        "kernel_dim": group.kernel_dim,
        "conditional_dim": group.conditional_dim,
        "case": group.case,
        "condition": group.condition,
        "pure": group.pure,
        "sink": group.is_sink,
        "cycles": cycles.get(group.component, 0),
        "kernel_basis": [[_complex(z) for z in group.kernel_basis[list(group.members), k]]
                         for k in range(group.kernel_dim)],
    }
    if group.case == CASE_2 and group.rabi_residual is not None:
        out["rabi_residual"] = {"value": _complex(group.rabi_residual.value),
                                "kind": group.rabi_residual.kind,
                                "note": group.rabi_residual.note}
    return out


def classification_report(system: LevelSystem, cls: DarkClassification) -> dict:
    cycles = component_cycles(system)
    return {
        "groups": [group_report(system, g, cycles) for g in cls.groups],
        "total_dark_dim": cls.total_dark_dim,
        "liouvillian_kernel_dim": cls.liouvillian_kernel_dim,
        "unique": cls.unique,
        "pure_guaranteed": cls.pure_guaranteed,
        "tolerances": {"degeneracy": cls.degeneracy_tol, "rank_rtol": cls.rank_rtol},
    }


def table_groups(cls: DarkClassification) -> list[DegenerateGroup]:
    """Groups shown in a Table-I style summary: degenerate groups that carry a
    dark state, or could once their Rabi condition is met. Ordered by first member."""
    rows = [g for g in cls.groups
            if g.dimension > 1 and (g.kernel_dim > 0 or g.case == CASE_2)]
    return sorted(rows, key=lambda g: g.members[0])


def table_entry(system: LevelSystem, group: DegenerateGroup, cycles: dict[int, int]) -> dict:
    dim = group.conditional_dim
    return {
        "states": [system.labels[m] for m in group.members],
        "dim": dim,
        "pure": dim == 1,
        "cycles": cycles.get(group.component, 0),
        "condition": group.condition,
    }


def _manifold_label(labels: list[str]) -> str:
    by_f: dict[str, list[str]] = {}
    for lab in labels:
        f, _, m = lab.partition(",m=")
        by_f.setdefault(f, []).append(m)
    parts = []
    for f, ms in by_f.items():
        parts.append(f"F={f[1:]}, M={','.join(ms)}")
    return " / ".join(parts)


def rb87_table(**classify_kwargs) -> list[dict]:
    rows = []
    for k in sorted(RB87_POLARIZATIONS):
        system = rb87_scheme(k)
        cls = classify_system(system, **classify_kwargs)
        cycles = component_cycles(system)
        pols_a, pols_b = RB87_POLARIZATIONS[k]
        rows.append({
            "scheme": k,
            "laser_F2": list(pols_a),
            "laser_F1": list(pols_b),
            "manifolds": [table_entry(system, g, cycles) for g in table_groups(cls)],
        })
    return rows


def format_rb87_table(rows: list[dict]) -> str:
    pols = ("s", "sigma+", "sigma-")
    head = ["#", "A:s", "A:s+", "A:s-", "B:s", "B:s+", "B:s-",
            "d1 states", "dim", "pure", "cyc", "d2 states", "dim", "pure", "cyc"]
    lines = [head]
    for row in rows:
        cells = [str(row["scheme"])]
        cells += ["x" if p in row["laser_F2"] else "" for p in pols]
        cells += ["x" if p in row["laser_F1"] else "" for p in pols]
        for m in row["manifolds"][:2]:
            flag = "*" if m["condition"] == "unsatisfiable" else ""
            cells += [_manifold_label(m["states"]), f"{m['dim']}{flag}",
                      "yes" if m["pure"] else "no", str(m["cycles"])]
        cells += [""] * (len(head) - len(cells))
        lines.append(cells)
    widths = [max(len(r[c]) for r in lines) for c in range(len(head))]
    out = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in lines]
    if any(m["condition"] == "unsatisfiable" for r in rows for m in r["manifolds"]):
        out.append("* Rabi-conditioned; condition unsatisfiable under polarization equality")
    return "\n".join(out)


def format_classification(system: LevelSystem, report: dict) -> str:
    lines = [f"{'members':40s} {'d_s':>3s} {'N_s':>3s} {'case':6s} {'condition':14s} "
             f"{'cyc':>3s}  residual"]
    for g in report["groups"]:
        res = ""
        if "rabi_residual" in g:
            re, im = g["rabi_residual"]["value"]
            res = f"{g['rabi_residual']['kind']}={complex(re, im):.6g}"
        lines.append(f"{' '.join(g['members']):40s} {g['dimension']:3d} {g['kernel_dim']:3d} "
                     f"{g['case']:6s} {g['condition']:14s} {g['cycles']:3d}  {res}")
    for g in report["groups"]:
        if g["condition"] == "unsatisfiable":
            lines.append(f"{' '.join(g['members'])}: Rabi-conditioned; condition "
                         "unsatisfiable under polarization equality")
    lines.append(f"dark dimension M = {report['total_dark_dim']}; "
                 f"dim ker L = {report['liouvillian_kernel_dim']}")
    if report["unique"]:
        lines.append("verdict: unique pure dark state")
    elif report["total_dark_dim"]:
        lines.append("verdict: dark manifold, not unique (steady state may be mixed)")
    else:
        lines.append("verdict: bright (no dark state)")
    return "\n".join(lines)
