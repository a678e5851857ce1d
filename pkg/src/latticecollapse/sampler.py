"""Sampling classical histories of the collapse model.

Histories are grown one vertex at a time: across ``v_{n+1}`` the Kraus-chain
amplitude is evolved by ``R_{n+1}`` and split into four outcomes for the two
outgoing links, each drawn with probability
``mu_c(child cylinder) / mu_c(parent cylinder)``.

Trajectory ``j`` of a run with seed ``s`` uses its own PCG64 generator seeded
from ``SeedSequence([s, j])``, so an ensemble does not depend on scheduling.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import kernel
from .events import FieldConfig, config_bits, cylinder
from .functionals import mu_c
from .model import Model

# outcomes whose probability falls below this are removed from the support
ZERO_PROBABILITY = 1e-14


class ZeroMeasureError(ValueError):
    pass


@dataclass
class TrajectoryRecord:
    seed: int
    index: int
    outcomes: list[tuple[int, int]]
    conditionals: list[float]
    state: np.ndarray | None = field(default=None, repr=False)

    @property
    def bits(self) -> str:
        return "".join(f"{a}{b}" for a, b in self.outcomes)

    @property
    def probability(self) -> float:
        return float(np.prod(self.conditionals)) if self.conditionals else 1.0

    def to_json(self) -> str:
        rec = {
            "seed": self.seed,
            "index": self.index,
            "config": self.bits,
            "outcomes": [list(o) for o in self.outcomes],
            "conditionals": [float(p) for p in self.conditionals],
            "probability": self.probability,
        }
        if self.state is not None:
            rec["state"] = [[float(z.real), float(z.imag)] for z in self.state]
        return json.dumps(rec, separators=(",", ":"))


def trajectory_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))


class CollapseSampler:
    """Step distributions of one model, cached per prefix."""

    def __init__(self, model: Model):
        self.model = model
        self._diag = kernel.kraus_diagonal(model.X)
        self._weights = np.array([w for w, _ in model.initial])
        # prefix bits -> (unnormalized branches per component, mu_c of prefix)
        self._nodes: dict[str, tuple[np.ndarray, float]] = {
            "": (np.stack([psi for _, psi in model.initial]), 1.0)
        }
        self._children: dict[str, np.ndarray] = {}

    def _node(self, prefix: str) -> tuple[np.ndarray, float]:
        if prefix not in self._nodes:
            parent = prefix[:-2]
            self._distribution(parent)
        return self._nodes[prefix]

    def _distribution(self, prefix: str) -> np.ndarray:
        if prefix in self._children:
            return self._children[prefix]
        n = len(prefix) // 2
        if n >= self.model.depth:
            raise ValueError(f"prefix of extent {n} leaves no vertex to evolve (depth {self.model.depth})")
        states, mass = self._node(prefix)
        if mass <= ZERO_PROBABILITY:
            raise ZeroMeasureError(f"prefix {prefix!r} has zero collapse-model measure")
        s, t, R = self.model.step(n + 1)
        k = states.shape[0]
        children = kernel.expand_branches(states, s, t, R, self._diag)
        probs = np.empty(4)
        for o in range(4):
            block = children[o * k:(o + 1) * k]
            child_mass = float(np.sum(self._weights * np.sum(np.abs(block) ** 2, axis=1)))
            self._nodes[prefix + f"{o % 2}{o // 2}"] = (block, child_mass)
            probs[o] = child_mass / mass
        probs[probs < ZERO_PROBABILITY] = 0.0
        probs /= probs.sum()
        self._children[prefix] = probs
        return probs

    def step_distribution(self, prefix: FieldConfig | str) -> np.ndarray:
        """Probabilities of the outcomes ``(0,0), (1,0), (0,1), (1,1)`` on the next two links.

        Outcome ``o`` sets ``l_{2n+1} = o % 2`` and ``l_{2n+2} = o // 2``.
        """
        bits = prefix.bits if isinstance(prefix, FieldConfig) else FieldConfig(prefix).bits
        return self._distribution(bits).copy()

    def conditioned_state(self, prefix: FieldConfig | str) -> np.ndarray:
        """The Kraus-chain amplitude of ``prefix``, normalized."""
        bits = prefix.bits if isinstance(prefix, FieldConfig) else FieldConfig(prefix).bits
        if not self.model.is_pure:
            raise ValueError("conditioned state is only defined for a pure initial state")
        states, mass = self._node(bits)
        if mass <= ZERO_PROBABILITY:
            raise ZeroMeasureError(f"prefix {bits!r} has zero collapse-model measure")
        return states[0] / np.sqrt(mass)

    def sample(self, n_steps: int, seed: int, index: int = 0,
               keep_state: bool = True) -> TrajectoryRecord:
        if n_steps > self.model.depth:
            raise ValueError(f"cannot sample {n_steps} steps on a lattice of depth {self.model.depth}")
        rng = trajectory_rng(seed, index)
        prefix = ""
        outcomes, conditionals = [], []
        for _ in range(n_steps):
            probs = self._distribution(prefix)
            o = int(np.searchsorted(np.cumsum(probs), rng.random(), side="right"))
            o = min(o, 3)
            while probs[o] == 0.0:  # cumsum round-off can land on an excluded outcome
                o -= 1
            outcomes.append((o % 2, o // 2))
            conditionals.append(float(probs[o]))
            prefix += f"{o % 2}{o // 2}"
        state = self.conditioned_state(prefix) if keep_state and self.model.is_pure else None
        return TrajectoryRecord(seed, index, outcomes, conditionals, state)

    def ensemble(self, n_steps: int, count: int, seed: int,
                 keep_state: bool = True) -> Iterable[TrajectoryRecord]:
        for j in range(count):
            yield self.sample(n_steps, seed, j, keep_state)


def step_distribution(prefix: FieldConfig | str, model: Model) -> np.ndarray:
    return CollapseSampler(model).step_distribution(prefix)


def conditioned_state(prefix: FieldConfig | str, model: Model) -> np.ndarray:
    return CollapseSampler(model).conditioned_state(prefix)


def sample_trajectory(model: Model, n_steps: int, seed: int, index: int = 0) -> TrajectoryRecord:
    return CollapseSampler(model).sample(n_steps, seed, index)


def binomial_sigma(p: float, count: int) -> float:
    return float(np.sqrt(p * (1.0 - p) / count)) if count else 0.0


def frequency_summary(model: Model, n_steps: int, records: Iterable[TrajectoryRecord]) -> list[dict]:
    """Empirical cylinder frequencies next to the exact collapse-model measure."""
    counts = np.zeros(4 ** n_steps, dtype=np.int64)
    total = 0
    for rec in records:
        counts[FieldConfig(rec.bits).index] += 1
        total += 1
    rows = []
    for c in range(4 ** n_steps):
        bits = config_bits(c, n_steps)
        exact = mu_c(cylinder(bits), model)
        freq = float(counts[c] / total) if total else None
        sigma = binomial_sigma(exact, total)
        rows.append({
            "config": bits or "-",
            "count": int(counts[c]),
            "frequency": freq,
            "mu_c": float(exact),
            "sigma": sigma,
            "z": (freq - exact) / sigma if total and sigma > 0 else None,
        })
    return rows


def summary_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["config", "count", "frequency", "mu_c", "sigma", "z"])
    for r in rows:
        writer.writerow([r["config"], r["count"],
                         "" if r["frequency"] is None else repr(r["frequency"]),
                         repr(r["mu_c"]), repr(r["sigma"]),
                         "" if r["z"] is None else repr(r["z"])])
    return buf.getvalue()
