"""Decoherence functionals of the unitary, collapse and coupled lattice models.

Every functional is evaluated on cylinder sets at a common extent and
extended to general events by additivity: both arguments are refined to the
larger of their extents and the cylinder values are summed.

Branch amplitudes for all ``4**n`` configurations are produced at once by a
tree expansion (``kernel.expand_branches``); row ``c`` of a branch table is
the amplitude of the configuration with index ``c``.  ``branch_q`` and
``branch_c`` build a single amplitude directly from the operator chain and
serve as the independent check on the tables.
"""
from __future__ import annotations

from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from . import kernel
from .events import (Event, EventError, FieldConfig, JointEvent, as_joint, config_index,
                     hamming)
from .model import Model

# table entries above this count are refused rather than allocated
MAX_TABLE_ENTRIES = 1 << 24


class ExtentError(ValueError):
    pass


def _check_extent(model: Model, n: int) -> None:
    if n > model.depth:
        raise ExtentError(f"extent {n} exceeds the lattice depth {model.depth}")


def popcounts(size: int) -> np.ndarray:
    return np.array([bin(i).count("1") for i in range(size)], dtype=np.int64)


def hamming_matrix(n: int) -> np.ndarray:
    """``d[i, j]`` = number of links on which configs ``i`` and ``j`` differ."""
    idx = np.arange(4 ** n)
    return popcounts(4 ** n)[idx[:, None] ^ idx[None, :]]


def xpow(X: float, d) -> np.ndarray:
    # numpy gives 0.0 ** 0 == 1.0, the convention the strong-collapse limit needs
    return np.power(float(X), np.asarray(d, dtype=np.float64))


# branches ----------------------------------------------------------------

def _diag_for(kind: str, X: float) -> np.ndarray:
    return kernel.PROJECTOR_DIAGONAL if kind == "q" else kernel.kraus_diagonal(X)


def branch_table(model: Model, n: int, kind: str = "q") -> np.ndarray:
    """Branch amplitudes, shape ``(components, 4**n, dim)``.

    ``kind`` is ``"q"`` (projector chain) or ``"c"`` (Kraus chain).
    """
    _check_extent(model, n)
    key = ("branches", kind, n)
    if key not in model._cache:
        diag = _diag_for(kind, model.X)
        out = []
        for _, psi in model.initial:
            states = psi[None, :]
            for i in range(1, n + 1):
                s, t, R = model.step(i)
                states = kernel.expand_branches(states, s, t, R, diag)
            out.append(states)
        table = np.stack(out)
        table.setflags(write=False)
        model._cache[key] = table
    return model._cache[key]


def _chain(config: FieldConfig | str, model: Model, make_op, component: int) -> np.ndarray:
    if isinstance(config, str):
        config = FieldConfig(config)
    n = config.extent
    _check_extent(model, n)
    psi = model.initial[component][1]
    for i in range(1, n + 1):
        vid = model.labelling.vertex(i)
        psi = kernel.apply_vertex_unitary(psi, model.geometry, vid, model.unitary_of(vid))
        left, right = model.geometry.outgoing(vid)
        psi = kernel.apply_link_operator(psi, left.slot, make_op(int(config.bits[2 * i - 2])))
        psi = kernel.apply_link_operator(psi, right.slot, make_op(int(config.bits[2 * i - 1])))
    return psi


def branch_q(config: FieldConfig | str, model: Model, component: int = 0) -> np.ndarray:
    """Evolve, project, evolve, project: the unitary-theory branch of ``config``."""
    return _chain(config, model, kernel.make_projector, component)


def branch_c(config: FieldConfig | str, model: Model, component: int = 0) -> np.ndarray:
    """The collapse-model amplitude: Kraus hits in place of projectors."""
    return _chain(config, model, lambda v: kernel.make_kraus(v, model.X), component)


def _weights(model: Model) -> np.ndarray:
    return np.array([w for w, _ in model.initial])


def _common_extent(model: Model, *events) -> int:
    m = max(e.extent for e in events)
    _check_extent(model, m)
    return m


# unitary and collapse functionals ----------------------------------------

def D_q(A: Event, B: Event, model: Model) -> complex:
    m = _common_extent(model, A, B)
    T = branch_table(model, m, "q")
    a = T[:, A.configs_at(m)].sum(axis=1)
    b = T[:, B.configs_at(m)].sum(axis=1)
    return complex(np.sum(_weights(model) * np.einsum("ki,ki->k", a.conj(), b)))


def mu_q(A: Event, model: Model) -> float:
    return D_q(A, A, model).real


def D_c(A: Event, B: Event, model: Model) -> complex:
    """Diagonal in the classical histories: only common cylinders contribute."""
    m = _common_extent(model, A, B)
    T = branch_table(model, m, "c")
    common = np.intersect1d(A.configs_at(m), B.configs_at(m))
    norms = np.einsum("kci,kci->k", T[:, common].conj(), T[:, common]).real
    return complex(np.sum(_weights(model) * norms))


def mu_c(A: Event, model: Model) -> float:
    return D_c(A, A, model).real


# coupled functional ------------------------------------------------------

def _grouped(joint: JointEvent, m: int) -> dict[int, list[int]]:
    groups: dict[int, list[int]] = {}
    for phi, alpha in joint.pairs_at(m):
        groups.setdefault(alpha, []).append(phi)
    return groups


def _weighted_sums(T: np.ndarray, groups: dict[int, list[int]], X: float,
                   m: int) -> dict[int, np.ndarray]:
    pop = popcounts(4 ** m)
    out = {}
    for alpha, phis in groups.items():
        phis = np.array(phis)
        w = xpow(X, pop[phis ^ alpha])
        out[alpha] = np.einsum("c,kci->ki", w, T[:, phis])
    return out


def D_qc(A, B, model: Model) -> complex:
    """Coupled functional on the product of quantum and classical histories.

    ``A`` and ``B`` are JointEvents or ``(quantum event, classical event)``
    pairs.  On cylinders it is ``D_q`` times ``X**(d + d') / (1+X^2)**(2n)``
    times a Kronecker delta in the classical configurations.
    """
    A, B = as_joint(A), as_joint(B)
    m = _common_extent(model, A, B)
    T = branch_table(model, m, "q")
    ga, gb = _grouped(A, m), _grouped(B, m)
    shared = sorted(set(ga) & set(gb))
    if not shared:
        return 0j
    va = _weighted_sums(T, {k: ga[k] for k in shared}, model.X, m)
    vb = _weighted_sums(T, {k: gb[k] for k in shared}, model.X, m)
    w = _weights(model)
    total = sum(np.sum(w * np.einsum("ki,ki->k", va[k].conj(), vb[k])) for k in shared)
    return complex(total / (1.0 + model.X ** 2) ** (2 * m))


def coarse_grain_quantum(A: Event, B: Event, model: Model) -> complex:
    """``D_qc`` summed over every quantum history: ``D_qc(Omega x A; Omega x B)``."""
    return D_qc((Event.omega(), A), (Event.omega(), B), model)


def coarse_grain_classical(F: Event, G: Event, model: Model) -> complex:
    """``D_qc`` summed over every classical history: ``D_qc(F x Omega; G x Omega)``."""
    return D_qc((F, Event.omega()), (G, Event.omega()), model)


def decoherence_factor(X: float, d) -> np.ndarray:
    """Off-diagonal suppression ``(2X / (1 + X^2)) ** d``."""
    return xpow(2.0 * X / (1.0 + X * X), d)


def Dtilde_closed_form(F: Event, G: Event, model: Model) -> complex:
    m = _common_extent(model, F, G)
    f, g = F.configs_at(m), G.configs_at(m)
    gram = gram_matrix(model, m)[np.ix_(f, g)]
    d = popcounts(4 ** m)[f[:, None] ^ g[None, :]]
    return complex(np.sum(decoherence_factor(model.X, d) * gram))


def mu_tilde(F: Event, model: Model) -> float:
    return Dtilde_closed_form(F, F, model).real


def alpha_sum(X: float, n: int, m: int) -> float:
    """Closed form of ``sum_alpha X**(d(Phi, alpha) + d(Phi', alpha))`` with ``d(Phi, Phi') = m``."""
    return 2.0 ** m * float(xpow(X, m)) * (1.0 + X * X) ** (2 * n - m)


def alpha_sum_bruteforce(X: float, n: int, phi: int, phibar: int) -> float:
    pop = popcounts(4 ** n)
    alphas = np.arange(4 ** n)
    return float(np.sum(xpow(X, pop[phi ^ alphas] + pop[phibar ^ alphas])))


# full tables -------------------------------------------------------------

def _guard(entries: int, what: str) -> None:
    if entries > MAX_TABLE_ENTRIES:
        raise MemoryError(f"{what} table would hold {entries} entries (limit {MAX_TABLE_ENTRIES})")


def gram_matrix(model: Model, n: int, kind: str = "q") -> np.ndarray:
    """Mixture-weighted ``<branch_i | branch_j>`` over all configurations at extent ``n``."""
    key = ("gram", kind, n)
    if key not in model._cache:
        _guard(16 ** n, "gram")
        T = branch_table(model, n, kind)
        G = np.einsum("k,kai,kbi->ab", _weights(model), T.conj(), T)
        G.setflags(write=False)
        model._cache[key] = G
    return model._cache[key]


def table_q(model: Model, n: int) -> np.ndarray:
    return gram_matrix(model, n, "q").copy()


def table_c(model: Model, n: int) -> np.ndarray:
    G = gram_matrix(model, n, "c")
    return np.diag(np.diag(G))


def kraus_weights(X: float, n: int) -> np.ndarray:
    """``W[phi, alpha] = X**d(phi, alpha)``."""
    return xpow(X, hamming_matrix(n))


def table_qc(model: Model, n: int) -> np.ndarray:
    """Coupled table on joint configurations ``phi + 4**n * alpha``."""
    size = 16 ** n
    _guard(size * size, "qc")
    G = gram_matrix(model, n, "q")
    W = kraus_weights(model.X, n)
    # T[phi, alpha, phib, alphab] = G[phi, phib] W[phi, alpha] W[phib, alpha] delta
    T = np.einsum("pq,pa,qa,ab->apbq", G, W, W, np.eye(4 ** n))
    T = T / (1.0 + model.X ** 2) ** (2 * n)
    return T.reshape(size, size)


def table_qtilde(model: Model, n: int) -> np.ndarray:
    return decoherence_factor(model.X, hamming_matrix(n)) * gram_matrix(model, n, "q")


def coarse_grain_quantum_table(model: Model, n: int) -> np.ndarray:
    """Dense sum of ``D_qc`` over both quantum arguments, indexed by classical configs."""
    G = gram_matrix(model, n, "q")
    W = kraus_weights(model.X, n)
    full = (W.T @ G @ W) / (1.0 + model.X ** 2) ** (2 * n)
    return full * np.eye(4 ** n)


def coarse_grain_classical_table(model: Model, n: int) -> np.ndarray:
    """Dense sum of ``D_qc`` over both classical arguments, indexed by quantum configs."""
    G = gram_matrix(model, n, "q")
    W = kraus_weights(model.X, n)
    return G * (W @ W.T) / (1.0 + model.X ** 2) ** (2 * n)


def table(model: Model, functional: str, n: int) -> np.ndarray:
    _check_extent(model, n)
    if functional == "q":
        return table_q(model, n)
    if functional == "c":
        return table_c(model, n)
    if functional == "qc":
        return table_qc(model, n)
    if functional == "qtilde":
        return table_qtilde(model, n)
    if functional == "qe":
        from .environment import table_qe
        return table_qe(model, n)
    raise ValueError(f"unknown functional {functional!r}")


def table_labels(functional: str, n: int) -> list[str]:
    from .events import config_bits
    if functional in ("qc", "qe"):
        return [f"{config_bits(i % 4 ** n, n) or '-'}|{config_bits(i // 4 ** n, n) or '-'}"
                for i in range(16 ** n)]
    return [config_bits(i, n) or "-" for i in range(4 ** n)]


# functional dispatch -----------------------------------------------------

FUNCTIONALS = ("q", "c", "qc", "qtilde", "qe")
JOINT = ("qc", "qe")


def functional(name: str) -> Callable:
    if name == "q":
        return D_q
    if name == "c":
        return D_c
    if name == "qc":
        return D_qc
    if name == "qtilde":
        return Dtilde_closed_form
    if name == "qe":
        from .environment import D_qe
        return D_qe
    raise ValueError(f"unknown functional {name!r}")


# interference ------------------------------------------------------------

def interference(k: int, events: Sequence[Event], mu: Callable[[Event], float]) -> float:
    """Alternating sum over sub-unions, e.g. ``I_2(X, Y) = mu(X u Y) - mu(X) - mu(Y)``."""
    if k not in (1, 2, 3):
        raise ValueError(f"only I_1, I_2, I_3 are supported, got k={k}")
    if len(events) != k:
        raise ValueError(f"I_{k} takes {k} events, got {len(events)}")
    for a, b in combinations(events, 2):
        if not a.disjoint(b):
            raise EventError("interference terms need pairwise disjoint events")
    total = 0.0
    for size in range(1, k + 1):
        sign = (-1) ** (k - size)
        for subset in combinations(events, size):
            u = subset[0]
            for e in subset[1:]:
                u = u.union(e)
            total += sign * mu(u)
    return total


# labelling independence --------------------------------------------------

def _link_permutation(model: Model, alt: Model, m: int) -> list[int]:
    """``perm[a - 1]`` = label under ``alt`` of the link labelled ``l_a`` in ``model``."""
    perm = []
    for a in range(1, 2 * m + 1):
        link = model.labelling.link(model.geometry, a)
        b = alt.labelling.link_label(link)
        if b > 2 * m:
            raise ExtentError(f"the first {m} vertices differ between the two labellings")
        perm.append(b)
    return perm


def translate_event(event: Event, perm: Sequence[int], m: int) -> Event:
    out = []
    for c in event.configs_at(m):
        out.append(sum(((int(c) >> a) & 1) << (perm[a] - 1) for a in range(2 * m)))
    return Event(m, out)


def _translate_joint(event: JointEvent, perm: Sequence[int], m: int) -> JointEvent:
    def tr(c):
        return sum(((c >> a) & 1) << (perm[a] - 1) for a in range(2 * m))
    return JointEvent(m, [(tr(p), tr(q)) for p, q in event.pairs_at(m)])


def _joint_arg(E) -> JointEvent:
    return JointEvent.product(E, E) if isinstance(E, Event) else as_joint(E)


def labelling_invariance_check(model: Model, alt_labelling, event_pairs,
                               functionals: Sequence[str] = FUNCTIONALS) -> dict[str, float]:
    """Max |D - D_alt| per functional over ``event_pairs``.

    Single events are used for ``q``, ``c`` and ``qtilde``; joint functionals
    use the product of each event with itself on the classical factor.
    Events are written in ``model``'s labelling and translated link by link.
    """
    alt = model.with_labelling(alt_labelling)
    out = {}
    for name in functionals:
        D = functional(name)
        worst = 0.0
        for A, B in event_pairs:
            if name in JOINT:
                A, B = _joint_arg(A), _joint_arg(B)
                m = max(A.extent, B.extent)
                perm = _link_permutation(model, alt, m)
                A2, B2 = _translate_joint(A, perm, m), _translate_joint(B, perm, m)
            else:
                m = max(A.extent, B.extent)
                perm = _link_permutation(model, alt, m)
                A2, B2 = translate_event(A, perm, m), translate_event(B, perm, m)
            worst = max(worst, abs(D(A, B, model) - D(A2, B2, alt)))
        out[name] = worst
    return out


__all__ = [
    "D_q", "D_c", "D_qc", "mu_q", "mu_c", "mu_tilde", "branch_q", "branch_c", "branch_table",
    "coarse_grain_quantum", "coarse_grain_classical", "Dtilde_closed_form", "interference",
    "labelling_invariance_check", "hamming", "gram_matrix", "table", "table_labels",
    "alpha_sum", "alpha_sum_bruteforce", "config_index",
]
