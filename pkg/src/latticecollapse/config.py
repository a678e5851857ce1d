"""Run configuration: one JSON document, validated field by field."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from . import kernel
from .geometry import GeometryError
from .model import PRESETS, Model, ModelError, build_model

FUNCTIONAL_NAMES = ("q", "c", "qc", "qtilde", "qe")

KNOWN_KEYS = {
    "width", "depth", "labelling", "unitaries", "seed", "initial_state", "X",
    "extent", "tolerance", "functional", "steps", "count", "sample_seed", "keep_state", "out",
}


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"config field '{field_name}': {message}")
        self.field = field_name


@dataclass(frozen=True)
class RunConfig:
    width: int = 2
    depth: int = 4
    labelling: Any = "row-major"
    unitaries: Any = "random"
    seed: int = 42
    initial_state: Any = None
    X: tuple[float, ...] = (0.3,)
    extent: int = 2
    tolerance: float = 1e-10
    functional: str = "q"
    steps: int = 2
    count: int = 1000
    sample_seed: int = 42
    keep_state: bool = True
    out: str = "out"
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    def model(self, X: float | None = None) -> Model:
        X = self.X[0] if X is None else X
        labelling = None if self.labelling == "row-major" else self.labelling
        try:
            return build_model(self.width, self.depth, unitaries=self.unitaries, seed=self.seed,
                               initial=_initial(self.initial_state, self.width), X=X,
                               labelling=labelling)
        except GeometryError as exc:
            raise ConfigError("labelling" if labelling else "width", str(exc)) from None
        except kernel.StateError as exc:
            raise ConfigError("initial_state", str(exc)) from None
        except ModelError as exc:
            name = "unitaries" if "unitar" in str(exc) or "preset" in str(exc) else "initial_state"
            raise ConfigError(name, str(exc)) from None

    def to_dict(self) -> dict:
        return {
            "width": self.width, "depth": self.depth, "labelling": self.labelling,
            "unitaries": self.unitaries, "seed": self.seed, "initial_state": self.initial_state,
            "X": list(self.X), "extent": self.extent, "tolerance": self.tolerance,
            "functional": self.functional, "steps": self.steps, "count": self.count,
            "sample_seed": self.sample_seed,
        }


def _initial(spec: Any, width: int):
    n_slots = 2 * width
    if spec is None:
        return "0" * n_slots
    if "basis" in spec:
        return spec["basis"]
    if "amplitudes" in spec:
        return spec["amplitudes"]
    out = []
    for part in spec["mixture"]:
        psi = part["basis"] if "basis" in part else part["amplitudes"]
        out.append((float(part["weight"]), kernel.initial_state(psi, n_slots)))
    return out


def _int(raw: dict, key: str, default: int, minimum: int) -> int:
    v = raw.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(key, f"expected an integer, got {v!r}")
    if v < minimum:
        raise ConfigError(key, f"must be >= {minimum}, got {v}")
    return v


def _float(key: str, v: Any) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(key, f"expected a number, got {v!r}")
    return float(v)


def _check_unitaries(spec: Any, depth: int) -> None:
    specs = spec if isinstance(spec, list) else [spec]
    if isinstance(spec, list) and len(spec) != depth:
        raise ConfigError("unitaries", f"need one spec per vertex ({depth}), got {len(spec)}")
    for s in specs:
        if isinstance(s, str):
            s = {"preset": s}
        if not isinstance(s, dict):
            raise ConfigError("unitaries", f"expected a preset name or object, got {s!r}")
        if "matrix" in s:
            rows = s["matrix"]
            if not (isinstance(rows, list) and len(rows) == 4 and all(
                    isinstance(r, list) and len(r) == 4 for r in rows)):
                raise ConfigError("unitaries", "explicit matrix must be 4 rows of 4 [re, im] pairs")
        elif s.get("preset") not in PRESETS:
            raise ConfigError("unitaries", f"unknown preset {s.get('preset')!r}; expected one of {PRESETS}")


def _check_initial(spec: Any) -> None:
    if spec is None:
        return
    if not isinstance(spec, dict) or not ({"basis", "amplitudes", "mixture"} & set(spec)):
        raise ConfigError("initial_state", "expected an object with 'basis', 'amplitudes' or 'mixture'")
    if "mixture" in spec:
        parts = spec["mixture"]
        if not isinstance(parts, list) or not parts:
            raise ConfigError("initial_state", "mixture must be a nonempty list")
        for p in parts:
            if not isinstance(p, dict) or "weight" not in p or not ({"basis", "amplitudes"} & set(p)):
                raise ConfigError("initial_state", "mixture entries need 'weight' and 'basis' or 'amplitudes'")


def parse_config(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "configuration must be a JSON object")
    unknown = sorted(set(raw) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(unknown[0], "unknown field")
    width = _int(raw, "width", 2, 1)
    depth = _int(raw, "depth", 4, 1)

    labelling = raw.get("labelling", "row-major")
    if labelling != "row-major" and not (
            isinstance(labelling, list) and all(isinstance(x, int) for x in labelling)):
        raise ConfigError("labelling", "expected 'row-major' or a list of vertex ids")

    unitaries = raw.get("unitaries", "random")
    _check_unitaries(unitaries, depth)
    seed = _int(raw, "seed", 42, 0)
    initial = raw.get("initial_state")
    _check_initial(initial)

    xs = raw.get("X", 0.3)
    xs = xs if isinstance(xs, list) else [xs]
    if not xs:
        raise ConfigError("X", "grid must not be empty")
    grid = []
    for x in xs:
        x = _float("X", x)
        if not 0.0 <= x <= 1.0:
            raise ConfigError("X", f"coupling must lie in [0, 1], got {x}")
        grid.append(x)

    extent = _int(raw, "extent", min(2, depth), 0)
    if extent > depth:
        raise ConfigError("extent", f"extent {extent} exceeds depth {depth}")
    tolerance = _float("tolerance", raw.get("tolerance", 1e-10))
    if tolerance <= 0:
        raise ConfigError("tolerance", "must be positive")
    functional = raw.get("functional", "q")
    if functional not in FUNCTIONAL_NAMES:
        raise ConfigError("functional", f"expected one of {FUNCTIONAL_NAMES}, got {functional!r}")
    steps = _int(raw, "steps", min(2, depth), 0)
    if steps > depth:
        raise ConfigError("steps", f"steps {steps} exceeds depth {depth}")
    count = _int(raw, "count", 1000, 0)
    sample_seed = _int(raw, "sample_seed", seed, 0)
    keep_state = raw.get("keep_state", True)
    if not isinstance(keep_state, bool):
        raise ConfigError("keep_state", "expected true or false")
    out = raw.get("out", "out")
    if not isinstance(out, str):
        raise ConfigError("out", "expected a path string")

    cfg = RunConfig(width, depth, labelling, unitaries, seed, initial, tuple(grid), extent,
                    tolerance, functional, steps, count, sample_seed, keep_state, out, raw)
    # build once so state and labelling errors surface before any computation
    cfg.model()
    return cfg


def load_config(path: str | Path | None, overrides: dict | None = None) -> RunConfig:
    raw: dict = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError("<root>", f"invalid JSON: {exc}") from None
        except OSError as exc:
            raise ConfigError("<root>", f"cannot read {path}: {exc}") from None
    if overrides:
        raw = {**raw, **{k: v for k, v in overrides.items() if v is not None}}
    return parse_config(raw)

