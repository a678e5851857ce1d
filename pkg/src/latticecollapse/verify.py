"""Property checks over a model: functional axioms, the coarse-graining
identities, the environment equivalence, interference levels, labelling
independence and the limiting couplings.

Each check returns a :class:`CheckResult`; ``run_suite`` collects them into a
JSON-ready report.
"""
from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Callable, Iterable

import numpy as np

from . import environment as env
from . import functionals as F
from .events import Event, JointEvent, config_bits, cylinder, refine
from .model import Model

DEFAULT_TOLERANCE = 1e-10
STRICT_TOLERANCE = 1e-12
WITNESS_THRESHOLD = 1e-3


@dataclass
class CheckResult:
    name: str
    passed: bool
    max_deviation: float
    tolerance: float
    seconds: float = 0.0
    gating: bool = True
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["max_deviation"] = float(self.max_deviation)
        return d


def _timed(name: str, tolerance: float, fn: Callable[[], tuple[float, dict]],
           gating: bool = True, compare: str = "below") -> CheckResult:
    t0 = time.perf_counter()
    dev, detail = fn()
    seconds = time.perf_counter() - t0
    passed = dev < tolerance if compare == "below" else dev > tolerance
    return CheckResult(name, bool(passed), float(dev), tolerance, seconds, gating, detail)


# random events -----------------------------------------------------------

def random_event(rng: np.random.Generator, extent: int) -> Event:
    size = 4 ** extent
    mask = rng.random(size) < 0.5
    return Event(extent, np.flatnonzero(mask))


def random_joint_event(rng: np.random.Generator, extent: int, density: float = 0.5) -> JointEvent:
    size = 4 ** extent
    mask = rng.random((size, size)) < density
    phi, alpha = np.nonzero(mask)
    return JointEvent(extent, zip(phi.tolist(), alpha.tolist()))


def random_split(rng: np.random.Generator, event: Event) -> tuple[Event, Event]:
    configs = np.array(sorted(event.configs), dtype=np.int64)
    mask = rng.random(configs.size) < 0.5
    return Event(event.extent, configs[mask]), Event(event.extent, configs[~mask])


def random_joint_split(rng, event: JointEvent) -> tuple[JointEvent, JointEvent]:
    pairs = sorted(event.pairs)
    mask = rng.random(len(pairs)) < 0.5
    return (JointEvent(event.extent, [p for p, k in zip(pairs, mask) if k]),
            JointEvent(event.extent, [p for p, k in zip(pairs, mask) if not k]))


def random_disjoint(rng: np.random.Generator, extent: int, k: int) -> list[Event]:
    """``k`` pairwise disjoint events at ``extent``, each nonempty when possible."""
    size = 4 ** extent
    perm = rng.permutation(size)
    seeded = min(k, size)
    labels = np.empty(size, dtype=np.int64)
    labels[perm[:seeded]] = np.arange(seeded)
    labels[perm[seeded:]] = rng.integers(0, k + 1, size - seeded)  # label k: in none
    return [Event(extent, np.flatnonzero(labels == j)) for j in range(k)]


# axioms ------------------------------------------------------------------

def _refine_joint(event: JointEvent, m: int) -> JointEvent:
    return JointEvent(m, event.pairs_at(m))


def check_axioms(model: Model, name: str, max_extent: int, rng: np.random.Generator,
                 trials: int = 6) -> dict[str, float]:
    """Deviations for Hermiticity, additivity (split and refinement), positivity, normalization."""
    D = F.functional(name)
    joint = name in F.JOINT
    dev = {"hermiticity": 0.0, "additivity": 0.0, "refinement": 0.0,
           "positivity": 0.0, "normalization": 0.0}
    omega = JointEvent.omega() if joint else Event.omega()
    dev["normalization"] = abs(D(omega, omega, model) - 1.0)
    for k in range(max_extent + 1):
        for _ in range(trials):
            if joint:
                A, B = random_joint_event(rng, k), random_joint_event(rng, k)
                A1, A2 = random_joint_split(rng, A)
            else:
                A, B = random_event(rng, k), random_event(rng, rng.integers(0, k + 1))
                A1, A2 = random_split(rng, A)
            dab, dba = D(A, B, model), D(B, A, model)
            dev["hermiticity"] = max(dev["hermiticity"], abs(dab - np.conj(dba)))
            dev["additivity"] = max(dev["additivity"], abs(D(A1, B, model) + D(A2, B, model) - dab))
            daa = D(A, A, model)
            dev["positivity"] = max(dev["positivity"], max(0.0, -daa.real), abs(daa.imag))
            if k < max_extent:
                Ar = _refine_joint(A, k + 1) if joint else refine(A, k + 1)
                dev["refinement"] = max(dev["refinement"], abs(D(Ar, B, model) - dab))
    return dev


# coarse graining and the environment -------------------------------

def quantum_marginal_deviation(model: Model, n: int) -> float:
    """Entrywise |coarse-grained D_qc - D_c| over all classical cylinder pairs."""
    return float(np.max(np.abs(F.coarse_grain_quantum_table(model, n) - F.table_c(model, n))))


def classical_marginal_deviation(model: Model, n: int) -> float:
    return float(np.max(np.abs(F.coarse_grain_classical_table(model, n) - F.table_qtilde(model, n))))


def alpha_sum_deviation(X: float, n: int) -> float:
    """Relative deviation of the exhaustive alpha-sum from its closed form, all ``m <= 2n``."""
    worst = 0.0
    rng = np.random.default_rng(n)
    for m in range(2 * n + 1):
        # a pair of configs differing on m links, placed randomly
        phi = int(rng.integers(4 ** n))
        flips = rng.choice(2 * n, size=m, replace=False)
        phibar = phi ^ int(sum(1 << int(f) for f in flips))
        brute = F.alpha_sum_bruteforce(X, n, phi, phibar)
        closed = F.alpha_sum(X, n, m)
        worst = max(worst, abs(brute - closed) / max(1.0, abs(closed)))
    return worst


def environment_deviation(model: Model, n: int) -> float:
    return float(np.max(np.abs(env.table_qe(model, n) - F.table_qc(model, n))))


def factorization_deviation(model: Model, n: int) -> float:
    worst = 0.0
    for phi in range(4 ** n):
        for e in range(4 ** n):
            worst = max(worst, env.factorization_check(config_bits(phi, n), config_bits(e, n), model))
    return worst


# interference ------------------------------------------------------------

def interference_deviation(model: Model, k: int, mu: Callable, max_extent: int,
                           rng: np.random.Generator, tuples: int = 200) -> float:
    worst = 0.0
    for j in range(tuples):
        extent = 1 + j % max(1, max_extent)
        events = random_disjoint(rng, extent, k)
        worst = max(worst, abs(F.interference(k, events, mu)))
    return worst


def level2_witness(model: Model, max_extent: int | None = None) -> tuple[float, dict]:
    """Largest |I_2(mu_q)| over pairs of distinct cylinders up to ``max_extent``.

    Defaults to the lattice depth (capped at 4): branches only interfere once
    a vertex acts on slots already touched by an earlier one.
    """
    if max_extent is None:
        max_extent = min(model.depth, 4)
    best, where = 0.0, {}
    mu = lambda e: F.mu_q(e, model)  # noqa: E731
    for n in range(1, max_extent + 1):
        G = F.gram_matrix(model, n)
        # I_2 of two cylinders is 2 Re <a|b>
        vals = 2.0 * np.abs(np.triu(G.real, k=1))
        i, j = np.unravel_index(np.argmax(vals), vals.shape)
        if vals[i, j] > best:
            A, B = cylinder(config_bits(int(i), n)), cylinder(config_bits(int(j), n))
            best = abs(F.interference(2, [A, B], mu))
            where = {"A": A.to_text(), "B": B.to_text(), "I2": F.interference(2, [A, B], mu)}
    return best, where


# labelling ---------------------------------------------------------------

def spacelike_transposition(model: Model, n: int) -> list[int] | None:
    """A labelling equal to the model's except for one swap of adjacent spacelike vertices in v_1..v_n."""
    order = list(model.labelling.order)
    g = model.geometry
    for i in range(min(n, len(order)) - 1):
        a, b = order[i], order[i + 1]
        if not g.precedes(a, b) and not g.precedes(b, a):
            alt = order.copy()
            alt[i], alt[i + 1] = b, a
            return alt
    return None


def labelling_deviation(model: Model, n: int, rng: np.random.Generator,
                        functionals: Iterable[str] = F.FUNCTIONALS) -> tuple[float, dict]:
    alt = spacelike_transposition(model, n)
    if alt is None:
        return 0.0, {"skipped": "no spacelike pair among the first vertices"}
    pairs = [(random_event(rng, n), random_event(rng, n)) for _ in range(4)]
    pairs += [(cylinder(config_bits(int(rng.integers(4 ** n)), n)),
               cylinder(config_bits(int(rng.integers(4 ** n)), n))) for _ in range(4)]
    devs = F.labelling_invariance_check(model, alt, pairs, tuple(functionals))
    return max(devs.values()), {"alt_labelling": alt, "per_functional": devs}


# limits ------------------------------------------------------------------

def strong_collapse_deviation(model: Model, n: int) -> float:
    """At X = 0 the collapse functional is the diagonal of the unitary one."""
    m0 = model.with_X(0.0)
    return float(np.max(np.abs(F.table_c(m0, n) - np.diag(np.diag(F.table_q(m0, n))))))


def decoupled_deviation(model: Model, n: int) -> float:
    """At X = 1 the decohered functional equals the unitary one and mu_c is uniform."""
    m1 = model.with_X(1.0)
    a = np.max(np.abs(F.table_qtilde(m1, n) - F.table_q(m1, n)))
    b = np.max(np.abs(np.diag(F.table_c(m1, n)).real - 4.0 ** -n))
    return float(max(a, b))


# suite -------------------------------------------------------------------

def run_suite(model: Model, n: int, tolerance: float = DEFAULT_TOLERANCE, seed: int = 0,
              qe_extent: int | None = None, tuples: int = 200) -> list[CheckResult]:
    """All checks for one model at extents up to ``n``."""
    strict = min(tolerance, STRICT_TOLERANCE)
    qe_n = min(n, 2) if qe_extent is None else qe_extent
    rng = np.random.default_rng(seed)
    X = model.X
    out: list[CheckResult] = []

    for name in F.FUNCTIONALS:
        ext = qe_n if name == "qe" else n
        holder = {}

        def axioms(name=name, ext=ext):
            holder["dev"] = check_axioms(model, name, ext, rng)
            return max(holder["dev"].values()), {"extent": ext, **holder["dev"]}

        out.append(_timed(f"axioms[{name}]", tolerance, axioms))

    out.append(_timed("quantum_marginal", tolerance,
                      lambda: (max(quantum_marginal_deviation(model, k) for k in range(n + 1)), {"extent": n})))
    out.append(_timed("classical_marginal", tolerance,
                      lambda: (max(classical_marginal_deviation(model, k) for k in range(n + 1)), {"extent": n})))
    out.append(_timed("alpha_sum", tolerance,
                      lambda: (max(alpha_sum_deviation(X, k) for k in range(1, n + 1)), {"extent": n})))
    out.append(_timed("environment", tolerance,
                      lambda: (max(environment_deviation(model, k) for k in range(qe_n + 1)), {"extent": qe_n})))
    out.append(_timed("factorization", strict,
                      lambda: (max(factorization_deviation(model, k) for k in range(qe_n + 1)),
                               {"extent": qe_n})))
    out.append(_timed("I2_mu_c", tolerance, lambda: (interference_deviation(
        model, 2, lambda e: F.mu_c(e, model), n, rng, tuples), {"tuples": tuples})))
    out.append(_timed("I3_mu_q", tolerance, lambda: (interference_deviation(
        model, 3, lambda e: F.mu_q(e, model), n, rng, tuples), {"tuples": tuples})))
    out.append(_timed("I3_mu_tilde", tolerance, lambda: (interference_deviation(
        model, 3, lambda e: F.mu_tilde(e, model), n, rng, tuples), {"tuples": tuples})))
    out.append(_timed("I2_mu_q_witness", WITNESS_THRESHOLD, lambda: level2_witness(model),
                      gating=False, compare="above"))
    lab_functionals = [f for f in F.FUNCTIONALS if f != "qe"]
    out.append(_timed("labelling", strict, lambda: labelling_deviation(model, n, rng, lab_functionals)))
    out.append(_timed("labelling[qe]", strict, lambda: labelling_deviation(model, qe_n, rng, ["qe"])))
    out.append(_timed("limit_X0", strict, lambda: (strong_collapse_deviation(model, n), {})))
    out.append(_timed("limit_X1", strict, lambda: (decoupled_deviation(model, n), {})))
    return out


def report(results: list[CheckResult], **meta) -> dict:
    return {
        **meta,
        "passed": all(r.passed for r in results if r.gating),
        "checks": [r.to_dict() for r in results],
    }
