"""Level-system declaration, validation and the JSON system description format.

Indices on the Python objects are 0-based positions into the ground and
excited level lists. The JSON format uses 1-based indices so that files read
like the usual ``g_i <-> e_j`` notation.

All numbers are dimensionless multiples of one reference Rabi frequency;
times are in the inverse unit.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Iterable

import jsonschema
import numpy as np

TWO_PI = 2.0 * math.pi


class SystemFormatError(ValueError):
    """Raised when a system description document cannot be parsed or fails the schema.

    ``kind`` is ``"parse"`` for malformed JSON or wrongly typed values and
    ``"schema"`` for structural violations (missing keys, bad ranges).
    """

    def __init__(self, message: str, kind: str = "schema", path: str = ""):
        super().__init__(message)
        self.kind = kind
        self.path = path


class InvalidSystemError(ValueError):
    """Raised when an operation receives a system with validation errors."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__("; ".join(report.errors))


@dataclass(frozen=True)
class Level:
    label: str
    energy: float = 0.0


@dataclass(frozen=True)
class LaserCoupling:
    """One laser driving the transition ``ground <-> excited``.

    ``tag`` optionally names the physical field the coupling belongs to
    (e.g. ``"A:sigma+"``). Couplings sharing a tag are understood to share
    one controllable amplitude; the classifier uses this to decide whether a
    Rabi-frequency condition can be met at all.
    """

    ground: int
    excited: int
    magnitude: float
    phase: float = 0.0
    frequency: float = 1.0
    tag: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "phase", float(self.phase) % TWO_PI)

    @property
    def rabi(self) -> complex:
        return self.magnitude * complex(math.cos(self.phase), math.sin(self.phase))


@dataclass(frozen=True)
class DecayChannel:
    """Spontaneous decay ``excited -> ground`` at ``rate``."""

    ground: int
    excited: int
    rate: float


@dataclass(frozen=True)
class LevelSystem:
    ground: tuple[Level, ...]
    excited: tuple[Level, ...]
    couplings: tuple[LaserCoupling, ...] = ()
    decays: tuple[DecayChannel, ...] = ()

    def __post_init__(self):
        for name in ("ground", "excited", "couplings", "decays"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    @property
    def n_ground(self) -> int:
        return len(self.ground)

    @property
    def n_excited(self) -> int:
        return len(self.excited)

    @property
    def n_levels(self) -> int:
        return len(self.ground) + len(self.excited)

    @property
    def labels(self) -> list[str]:
        return [lvl.label for lvl in self.ground] + [lvl.label for lvl in self.excited]

    @property
    def energies(self) -> np.ndarray:
        return np.array([lvl.energy for lvl in self.ground + self.excited], dtype=float)

    def excited_index(self, j: int) -> int:
        """Position of excited level ``j`` in the full (ground-first) basis."""
        return self.n_ground + j

    def coupling(self, ground: int, excited: int) -> LaserCoupling | None:
        for c in self.couplings:
            if c.ground == ground and c.excited == excited:
                return c
        return None

    def replace(self, **changes) -> "LevelSystem":
        data = dict(ground=self.ground, excited=self.excited,
                    couplings=self.couplings, decays=self.decays)
        data.update(changes)
        return LevelSystem(**data)


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def __bool__(self):
        return self.ok


def validate_system(system: LevelSystem) -> ValidationReport:
    """Collect structural problems with ``system``.

    Never raises. Errors make the system unusable downstream; warnings flag
    systems outside the regime where dark states are guaranteed to coincide
    with the null space of the non-Hermitian generator (an excited level that
    never decays).
    """
    report = ValidationReport()
    ng, ne = system.n_ground, system.n_excited
    if ng < 1:
        report.errors.append("at least one ground level is required")
    if ne < 1:
        report.errors.append("at least one excited level is required")

    seen: set[str] = set()
    for label in system.labels:
        if label in seen:
            report.errors.append(f"duplicate level label {label!r}")
        seen.add(label)

    def _check_indices(kind: str, pos: int, g: int, e: int) -> bool:
        good = True
        if not 0 <= g < ng:
            report.errors.append(f"{kind} #{pos + 1}: ground index {g + 1} out of range 1..{ng}")
            good = False
        if not 0 <= e < ne:
            report.errors.append(f"{kind} #{pos + 1}: excited index {e + 1} out of range 1..{ne}")
            good = False
        return good

    pairs: set[tuple[int, int]] = set()
    for k, c in enumerate(system.couplings):
        _check_indices("coupling", k, c.ground, c.excited)
        if (c.ground, c.excited) in pairs:
            report.errors.append(
                f"duplicate coupling on (g{c.ground + 1}, e{c.excited + 1}); "
                "each transition may be driven by at most one laser")
        pairs.add((c.ground, c.excited))
        if not (np.isfinite(c.magnitude) and c.magnitude >= 0):
            report.errors.append(f"coupling #{k + 1}: magnitude must be finite and >= 0")
        if not (np.isfinite(c.frequency) and c.frequency > 0):
            report.errors.append(f"coupling #{k + 1}: laser frequency must be > 0")
        if not np.isfinite(c.phase):
            report.errors.append(f"coupling #{k + 1}: phase must be finite")

    total = np.zeros(max(ne, 0))
    for k, d in enumerate(system.decays):
        if not _check_indices("decay", k, d.ground, d.excited):
            continue
        if not (np.isfinite(d.rate) and d.rate >= 0):
            report.errors.append(f"decay #{k + 1}: rate must be finite and >= 0")
            continue
        total[d.excited] += d.rate

    for j in range(ne):
        if total[j] == 0:
            report.warnings.append(
                f"non-decaying excited level {system.excited[j].label!r}: total decay "
                "rate is zero, so dark states are no longer guaranteed to be exactly "
                "the zero modes of the non-Hermitian generator")
    return report


def check_system(system: LevelSystem) -> LevelSystem:
    report = validate_system(system)
    if not report.ok:
        raise InvalidSystemError(report)
    return system


def coupling_matrix(system: LevelSystem) -> np.ndarray:
    """Complex ``N_g x N_e`` matrix of Rabi frequencies (zero where undriven)."""
    V = np.zeros((system.n_ground, system.n_excited), dtype=complex)
    for c in system.couplings:
        V[c.ground, c.excited] = c.rabi
    return V


def rate_matrix(system: LevelSystem) -> np.ndarray:
    """Real ``N_g x N_e`` matrix of decay rates; repeated channels add up."""
    G = np.zeros((system.n_ground, system.n_excited))
    for d in system.decays:
        G[d.ground, d.excited] += d.rate
    return G


# --------------------------------------------------------------------------
# serialization

def _schema(name: str) -> dict:
    text = resources.files("darkstate.schemas").joinpath(name).read_text("utf-8")
    return json.loads(text)


SYSTEM_SCHEMA = _schema("system.schema.json")


def system_to_dict(system: LevelSystem) -> dict[str, Any]:
    def coupling(c: LaserCoupling) -> dict:
        out = {"g": c.ground + 1, "e": c.excited + 1, "magnitude": c.magnitude,
               "phase": c.phase, "frequency": c.frequency}
        if c.tag is not None:
            out["tag"] = c.tag
        return out

    return {
        "ground": [{"label": lv.label, "energy": lv.energy} for lv in system.ground],
        "excited": [{"label": lv.label, "energy": lv.energy} for lv in system.excited],
        "couplings": [coupling(c) for c in system.couplings],
        "decays": [{"g": d.ground + 1, "e": d.excited + 1, "rate": d.rate}
                   for d in system.decays],
    }


def system_from_dict(doc: Any) -> LevelSystem:
    validator = jsonschema.Draft202012Validator(SYSTEM_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        kind = "parse" if err.validator == "type" else "schema"
        label = "parse error" if kind == "parse" else "schema violation"
        raise SystemFormatError(f"{label} at {where}: {err.message}", kind, where)
    return LevelSystem(
        ground=tuple(Level(d["label"], float(d["energy"])) for d in doc["ground"]),
        excited=tuple(Level(d["label"], float(d["energy"])) for d in doc["excited"]),
        couplings=tuple(
            LaserCoupling(c["g"] - 1, c["e"] - 1, float(c["magnitude"]),
                          float(c.get("phase", 0.0)), float(c["frequency"]), c.get("tag"))
            for c in doc.get("couplings", [])),
        decays=tuple(DecayChannel(d["g"] - 1, d["e"] - 1, float(d["rate"]))
                     for d in doc.get("decays", [])),
    )


def save_system(system: LevelSystem) -> bytes:
    return (json.dumps(system_to_dict(system), indent=2) + "\n").encode("utf-8")


def load_system(data: bytes | str) -> LevelSystem:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SystemFormatError(f"parse error: not UTF-8 ({exc})", "parse") from exc
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SystemFormatError(
            f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            "parse", f"{exc.lineno}:{exc.colno}") from exc
    return system_from_dict(doc)


def system_hash(system: LevelSystem) -> str:
    canonical = json.dumps(system_to_dict(system), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def make_system(ground: Iterable, excited: Iterable, couplings=(), decays=()) -> LevelSystem:
    """Convenience constructor accepting labels or ``(label, energy)`` pairs."""

    def _levels(items):
        out = []
        for item in items:
            if isinstance(item, Level):
                out.append(item)
            elif isinstance(item, str):
                out.append(Level(item))
            else:
                out.append(Level(*item))
        return tuple(out)

    return LevelSystem(_levels(ground), _levels(excited), tuple(couplings), tuple(decays))
