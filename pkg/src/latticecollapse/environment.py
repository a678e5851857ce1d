"""Unitary field-plus-environment model.

The joint vector keeps the ``2N`` field slots in the low bits; the
environment qubit of link ``l_a`` is bit ``2N + a - 1``.  Environment qubits
are appended in state |0> two at a time, just before the vertex whose
outgoing links they watch, so a joint state after ``n`` steps has dimension
``2**(2N + 2n)`` and an environment configuration ``E`` maps to the block
offset ``index(E) << 2N``.
"""
from __future__ import annotations

import numpy as np

from . import kernel
from .events import FieldConfig, as_joint, hamming
from .functionals import MAX_TABLE_ENTRIES, _check_extent, _weights, branch_q
from .model import Model

MAX_JOINT_DIM = 1 << 24


def _check_dim(model: Model, n: int) -> None:
    dim = 1 << (model.n_slots + 2 * n)
    if dim > MAX_JOINT_DIM:
        raise MemoryError(f"joint dimension 2^{model.n_slots + 2 * n} exceeds the limit 2^24")


def _grow(state: np.ndarray) -> np.ndarray:
    # append one environment qubit in |0>
    return np.concatenate((state, np.zeros_like(state)))


def joint_branch(field: FieldConfig | str, env: FieldConfig | str, model: Model,
                 component: int = 0) -> np.ndarray:
    """Evolve, partially measure, then project field and environment, per vertex."""
    field = FieldConfig(field) if isinstance(field, str) else field
    env = FieldConfig(env) if isinstance(env, str) else env
    if field.extent != env.extent:
        raise ValueError(f"extent mismatch: field {field.extent}, environment {env.extent}")
    n = field.extent
    _check_extent(model, n)
    _check_dim(model, n)
    U = kernel.make_partial_measurement(model.X)
    base = model.n_slots
    psi = model.initial[component][1].copy()
    for i in range(1, n + 1):
        s, t, R = model.step(i)
        psi = _grow(_grow(psi))
        e1, e2 = base + 2 * i - 2, base + 2 * i - 1
        psi = kernel.apply_pair(psi, s, t, R)
        psi = kernel.apply_pair(psi, s, e1, U)
        psi = kernel.apply_pair(psi, t, e2, U)
        for slot, env_bit, a in ((s, e1, 2 * i - 1), (t, e2, 2 * i)):
            phi_a, e_a = int(field.bits[a - 1]), int(env.bits[a - 1])
            psi = kernel.apply_diag(psi, slot, *((1, 0) if phi_a == 0 else (0, 1)))
            psi = kernel.apply_diag(psi, env_bit, *((1, 0) if e_a == 0 else (0, 1)))
    return psi


def product_form(field: FieldConfig | str, env: FieldConfig | str, model: Model,
                 component: int = 0) -> np.ndarray:
    """``X**d / (1+X^2)**n`` times the field branch tensored with the environment record."""
    field = FieldConfig(field) if isinstance(field, str) else field
    env = FieldConfig(env) if isinstance(env, str) else env
    n = field.extent
    # 0.0 ** 0 == 1.0
    scale = model.X ** hamming(field, env) / (1.0 + model.X ** 2) ** n
    out = np.zeros(1 << (model.n_slots + 2 * n), dtype=np.complex128)
    offset = env.index << model.n_slots
    out[offset:offset + model.dim] = scale * branch_q(field, model, component)
    return out


def factorization_check(field, env, model: Model) -> float:
    """Max entrywise deviation between the simulated joint branch and its product form."""
    worst = 0.0
    for k in range(len(model.initial)):
        diff = joint_branch(field, env, model, k) - product_form(field, env, model, k)
        worst = max(worst, float(np.max(np.abs(diff))) if diff.size else 0.0)
    return worst


def joint_branch_table(model: Model, n: int) -> np.ndarray:
    """All joint branches by tree expansion, shape ``(components, 16**n, dim)``.

    Row ``phi + 4**n * E`` holds the branch of field config ``phi`` and
    environment config ``E``.
    """
    _check_extent(model, n)
    _check_dim(model, n)
    key = ("joint", n)
    if key in model._cache:
        return model._cache[key]
    if 16 ** n * (1 << (model.n_slots + 2 * n)) > MAX_TABLE_ENTRIES:
        raise MemoryError(f"joint branch table at extent {n} is too large")
    U = kernel.make_partial_measurement(model.X)
    base = model.n_slots
    out = []
    for _, psi0 in model.initial:
        # rows: (field index, env index, state)
        rows = [(0, 0, psi0)]
        for i in range(1, n + 1):
            s, t, R = model.step(i)
            e1, e2 = base + 2 * i - 2, base + 2 * i - 1
            shift = 2 * i - 2
            nxt = []
            for phi, env, psi in rows:
                psi = _grow(_grow(psi))
                psi = kernel.apply_pair(psi, s, t, R)
                psi = kernel.apply_pair(psi, s, e1, U)
                psi = kernel.apply_pair(psi, t, e2, U)
                for f1 in (0, 1):
                    a = kernel.apply_diag(psi, s, *((1, 0) if f1 == 0 else (0, 1)))
                    for f2 in (0, 1):
                        b = kernel.apply_diag(a, t, *((1, 0) if f2 == 0 else (0, 1)))
                        for q1 in (0, 1):
                            c = kernel.apply_diag(b, e1, *((1, 0) if q1 == 0 else (0, 1)))
                            for q2 in (0, 1):
                                d = kernel.apply_diag(c, e2, *((1, 0) if q2 == 0 else (0, 1)))
                                nxt.append((phi | (f1 | f2 << 1) << shift,
                                            env | (q1 | q2 << 1) << shift, d))
            rows = nxt
        table = np.zeros((16 ** n, 1 << (base + 2 * n)), dtype=np.complex128)
        for phi, env, psi in rows:
            table[phi + 4 ** n * env] = psi
        out.append(table)
    result = np.stack(out)
    result.setflags(write=False)
    model._cache[key] = result
    return result


def D_qe(A, B, model: Model) -> complex:
    """Inner product of summed joint branches; arguments are JointEvents or event pairs."""
    A, B = as_joint(A), as_joint(B)
    m = max(A.extent, B.extent)
    T = joint_branch_table(model, m)
    ia = np.array([p + 4 ** m * e for p, e in A.pairs_at(m)], dtype=np.int64)
    ib = np.array([p + 4 ** m * e for p, e in B.pairs_at(m)], dtype=np.int64)
    if not ia.size or not ib.size:
        return 0j
    a = T[:, ia].sum(axis=1)
    b = T[:, ib].sum(axis=1)
    return complex(np.sum(_weights(model) * np.einsum("ki,ki->k", a.conj(), b)))


def table_qe(model: Model, n: int) -> np.ndarray:
    size = 16 ** n
    if size * size > MAX_TABLE_ENTRIES:
        raise MemoryError(f"qe table at extent {n} would hold {size * size} entries")
    T = joint_branch_table(model, n)
    return np.einsum("k,kai,kbi->ab", _weights(model), T.conj(), T)
