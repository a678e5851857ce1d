"""Shared fixtures and a dense reference implementation.

The reference builds every local operator as a full ``2**q x 2**q`` matrix
by looping over basis states, so it shares no code with the package's
strided kernels.  It is slow and only meant for small lattices.
"""
from __future__ import annotations

import sys

import numpy as np
import pytest

from latticecollapse.model import build_model


def full_pair(R: np.ndarray, s: int, t: int, nq: int) -> np.ndarray:
    """``R`` on qubits ``(s, t)`` of ``nq``, local index ``bit_s + 2 bit_t``."""
    dim = 1 << nq
    M = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bs, bt = (col >> s) & 1, (col >> t) & 1
        rest = col & ~((1 << s) | (1 << t))
        for out in range(4):
            os_, ot = out & 1, out >> 1
            row = rest | (os_ << s) | (ot << t)
            M[row, col] += R[out, bs + 2 * bt]
    return M


def full_diag(d0: complex, d1: complex, slot: int, nq: int) -> np.ndarray:
    dim = 1 << nq
    return np.diag([d1 if (i >> slot) & 1 else d0 for i in range(dim)]).astype(complex)


def kraus_pair(X: float, v: int) -> tuple[float, float]:
    """Diagonal of ``J(v)`` written out from its definition."""
    n = np.sqrt(1 + X * X)
    return ((1 / n, X / n) if v == 0 else (X / n, 1 / n))


def reference_branch(model, bits: str, kind: str = "q", component: int = 0) -> np.ndarray:
    nq = model.n_slots
    psi = model.initial[component][1].astype(complex)
    for i in range(1, len(bits) // 2 + 1):
        vid = model.labelling.vertex(i)
        left, right = model.geometry.outgoing(vid)
        psi = full_pair(model.unitaries[vid - 1], left.slot, right.slot, nq) @ psi
        for slot, ch in ((left.slot, bits[2 * i - 2]), (right.slot, bits[2 * i - 1])):
            v = int(ch)
            if kind == "q":
                d = (1.0, 0.0) if v == 0 else (0.0, 1.0)
            else:
                d = kraus_pair(model.X, v)
            psi = full_diag(*d, slot, nq) @ psi
    return psi


def all_bits(n: int) -> list[str]:
    """All configs at extent ``n`` in index order (character ``a-1`` is link ``l_a``)."""
    out = []
    for idx in range(4 ** n):
        out.append("".join(str((idx >> a) & 1) for a in range(2 * n)))
    return out


def reference_gram(model, n: int, kind: str = "q") -> np.ndarray:
    configs = all_bits(n)
    G = np.zeros((len(configs), len(configs)), dtype=complex)
    for k, (w, _) in enumerate(model.initial):
        B = np.array([reference_branch(model, c, kind, k) for c in configs])
        G += w * B.conj() @ B.T
    return G


def hamming_bits(a: str, b: str) -> int:
    return sum(x != y for x, y in zip(a, b))


SUPERPOSED_N2 = [0.5, 0.5, 0.5, 0.5] + [0.0] * 12  # (|0> + |1>)/sqrt2 on slots 0 and 1


@pytest.fixture
def default_model():
    return build_model()


@pytest.fixture
def superposed_model():
    return build_model(2, 4, unitaries="random", seed=7, initial=SUPERPOSED_N2, X=0.3)


@pytest.fixture
def mixed_model():
    return build_model(2, 4, unitaries="random", seed=3,
                       initial=[(0.25, "0000"), (0.75, "1010")], X=0.7)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "ACCEPTANCE_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda l: int(l.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
