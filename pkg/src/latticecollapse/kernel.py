"""Dense surface states and the local operators acting on them.

States are plain ``complex128`` numpy vectors of length ``2**(2N)``; basis
index bit ``k`` is the field value in slot ``k``.  Every function returns a
new array and never mutates its input.

The low-level loops come from the compiled ``_kernels`` extension when it is
importable, else from ``_kernels_py``.  Set ``LATTICECOLLAPSE_PURE_PYTHON=1``
to force the fallback.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels_py

if os.environ.get("LATTICECOLLAPSE_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "cython"

ATOL = 1e-12

apply_pair = _impl.apply_pair
apply_single = _impl.apply_single
apply_diag = _impl.apply_diag
expand_branches = _impl.expand_branches


class StateError(ValueError):
    pass


def check_coupling(X: float) -> float:
    X = float(X)
    if not np.isfinite(X) or not 0.0 <= X <= 1.0:
        raise ValueError(f"coupling X must lie in [0, 1], got {X}")
    return X


@dataclass(frozen=True)
class LinkOperator:
    """A single-link operator; ``kind`` is 'projector' or 'kraus'."""

    matrix: np.ndarray
    kind: str
    value: int

    @property
    def diagonal(self) -> tuple[complex, complex]:
        return complex(self.matrix[0, 0]), complex(self.matrix[1, 1])


def make_projector(value: int) -> LinkOperator:
    if value not in (0, 1):
        raise ValueError(f"field value must be 0 or 1, got {value!r}")
    m = np.zeros((2, 2), dtype=np.complex128)
    m[value, value] = 1.0
    return LinkOperator(m, "projector", value)


def kraus_diagonal(X: float) -> np.ndarray:
    """``d[v, b]``: diagonal entry of ``J(v)`` on field eigenstate ``b``."""
    X = check_coupling(X)
    s = 1.0 / np.sqrt(1.0 + X * X)
    return np.array([[s, X * s], [X * s, s]], dtype=np.complex128)


PROJECTOR_DIAGONAL = np.eye(2, dtype=np.complex128)


def make_kraus(value: int, X: float) -> LinkOperator:
    if value not in (0, 1):
        raise ValueError(f"field value must be 0 or 1, got {value!r}")
    d = kraus_diagonal(X)
    return LinkOperator(np.diag(d[value]), "kraus", value)


def make_partial_measurement(X: float) -> np.ndarray:
    """Two-qubit unitary on (field, environment), local index ``q + 2e``.

    Columns: |0q0e> -> |0q>(|0e> + X|1e>), |1q0e> -> |1q>(X|0e> + |1e>),
    |0q1e> -> |0q>(X|0e> - |1e>), |1q1e> -> |1q>(|0e> - X|1e>), all over
    sqrt(1 + X^2).
    """
    X = check_coupling(X)
    s = 1.0 / np.sqrt(1.0 + X * X)
    U = np.zeros((4, 4), dtype=np.complex128)

    def col(q, e):
        return q + 2 * e

    U[col(0, 0), col(0, 0)], U[col(0, 1), col(0, 0)] = 1.0, X
    U[col(1, 0), col(1, 0)], U[col(1, 1), col(1, 0)] = X, 1.0
    U[col(0, 0), col(0, 1)], U[col(0, 1), col(0, 1)] = X, -1.0
    U[col(1, 0), col(1, 1)], U[col(1, 1), col(1, 1)] = 1.0, -X
    return U * s


def is_unitary(M: np.ndarray, atol: float = ATOL) -> bool:
    M = np.asarray(M)
    return M.shape[0] == M.shape[1] and np.allclose(
        M.conj().T @ M, np.eye(M.shape[0]), rtol=0.0, atol=atol
    )


# unitary presets ---------------------------------------------------------

def identity_unitary() -> np.ndarray:
    return np.eye(4, dtype=np.complex128)


def swap_unitary() -> np.ndarray:
    U = np.zeros((4, 4), dtype=np.complex128)
    U[0, 0] = U[3, 3] = 1.0
    U[1, 2] = U[2, 1] = 1.0
    return U


def rotation_unitary(theta_left: float, theta_right: float) -> np.ndarray:
    """Tensor product of Y rotations; the left-going slot is the low bit."""

    def ry(t):
        c, s = np.cos(t / 2), np.sin(t / 2)
        return np.array([[c, -s], [s, c]], dtype=np.complex128)

    return np.kron(ry(theta_right), ry(theta_left))


def random_unitary(rng: np.random.Generator, dim: int = 4) -> np.ndarray:
    """Haar-distributed unitary via QR with the phase of R's diagonal removed."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


# states ------------------------------------------------------------------

def initial_state(spec: str | Sequence, n_slots: int) -> np.ndarray:
    """Build a normalized state on ``n_slots`` qubits.

    ``spec`` is either a bit-string (character ``k`` is slot ``k``) or an
    explicit amplitude list whose entries are numbers or ``[re, im]`` pairs.
    """
    dim = 1 << n_slots
    if isinstance(spec, str):
        if len(spec) != n_slots or set(spec) - {"0", "1"}:
            raise StateError(f"basis string must have {n_slots} characters from 0/1, got {spec!r}")
        psi = np.zeros(dim, dtype=np.complex128)
        psi[sum(1 << k for k, ch in enumerate(spec) if ch == "1")] = 1.0
        return psi
    amps = np.array([_as_complex(a) for a in spec], dtype=np.complex128)
    if amps.shape != (dim,):
        raise StateError(f"expected {dim} amplitudes, got {amps.shape[0]}")
    norm = np.linalg.norm(amps)
    if abs(norm - 1.0) > ATOL:
        raise StateError(f"explicit state is not normalized (norm {norm:.15g})")
    return amps


def _as_complex(a) -> complex:
    if isinstance(a, (list, tuple)):
        if len(a) != 2:
            raise StateError(f"complex entries must be [re, im] pairs, got {a!r}")
        return complex(float(a[0]), float(a[1]))
    return complex(a)


def apply_vertex_unitary(state: np.ndarray, geometry, vertex_id: int, R: np.ndarray) -> np.ndarray:
    """Apply ``R`` across a vertex; local index is left slot + 2 * right slot."""
    left, right = geometry.outgoing(vertex_id)
    return apply_pair(state, left.slot, right.slot, R)


def apply_link_operator(state: np.ndarray, slot: int, op: LinkOperator) -> np.ndarray:
    nbits = np.asarray(state).shape[0].bit_length() - 1
    if not 0 <= slot < nbits:
        raise StateError(f"slot {slot} out of range for {nbits} slots")
    m = op.matrix
    if m[0, 1] == 0 and m[1, 0] == 0:
        return apply_diag(state, slot, complex(m[0, 0]), complex(m[1, 1]))
    return apply_single(state, slot, m)


def inner_product(a: np.ndarray, b: np.ndarray) -> complex:
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise StateError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))
