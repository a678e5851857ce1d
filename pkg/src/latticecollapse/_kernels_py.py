"""Pure numpy implementations of the state-vector kernels.

Same signatures and semantics as the compiled ``_kernels`` module.  A state
of ``nbits`` qubits is a complex vector whose index bit ``k`` is qubit ``k``.
Two-qubit operators act on the local index ``bit_s + 2 * bit_t``.
"""
import numpy as np


def _nbits(dim):
    nbits = dim.bit_length() - 1
    if 1 << nbits != dim:
        raise ValueError(f"state dimension {dim} is not a power of two")
    return nbits


def _pair_view(states, s, t):
    # (k, dim) -> (k, 4, rest) with local index bit_s + 2*bit_t
    k, dim = states.shape
    nbits = _nbits(dim)
    if s == t or not (0 <= s < nbits and 0 <= t < nbits):
        raise ValueError(f"invalid qubit pair ({s}, {t}) for {nbits} qubits")
    x = states.reshape((k,) + (2,) * nbits)
    x = np.moveaxis(x, (1 + nbits - 1 - t, 1 + nbits - 1 - s), (1, 2))
    return x.reshape(k, 4, -1), x.shape, nbits


def _pair_restore(y, shape, nbits, s, t):
    k = shape[0]
    x = y.reshape(shape)
    x = np.moveaxis(x, (1, 2), (1 + nbits - 1 - t, 1 + nbits - 1 - s))
    return np.ascontiguousarray(x).reshape(k, -1)


def apply_pair(state, s, t, matrix):
    state = np.asarray(state, dtype=np.complex128)
    x, shape, nbits = _pair_view(state[None, :], s, t)
    y = np.einsum("ij,kjr->kir", np.asarray(matrix, dtype=np.complex128), x)
    return _pair_restore(y, shape, nbits, s, t)[0]


def apply_single(state, s, matrix):
    state = np.asarray(state, dtype=np.complex128)
    nbits = _nbits(state.shape[0])
    if not 0 <= s < nbits:
        raise ValueError(f"qubit {s} out of range for {nbits} qubits")
    x = state.reshape(-1, 2, 1 << s)
    y = np.einsum("ij,ajb->aib", np.asarray(matrix, dtype=np.complex128), x)
    return y.reshape(-1)


def apply_diag(state, s, d0, d1):
    state = np.asarray(state, dtype=np.complex128)
    nbits = _nbits(state.shape[0])
    if not 0 <= s < nbits:
        raise ValueError(f"qubit {s} out of range for {nbits} qubits")
    x = state.reshape(-1, 2, 1 << s).copy()
    x[:, 0, :] *= d0
    x[:, 1, :] *= d1
    return x.reshape(-1)


def expand_branches(states, s, t, matrix, diag):
    """Evolve every row of ``states`` by ``matrix`` on (s, t), then split it
    into four outcome branches.

    Outcome ``o = v_s + 2 * v_t`` multiplies the amplitude at local index
    ``bit_s + 2 * bit_t`` by ``diag[v_s, bit_s] * diag[v_t, bit_t]``.  Row
    ``j`` of the input becomes row ``o * k + j`` of the ``(4k, dim)`` output.
    """
    states = np.asarray(states, dtype=np.complex128)
    diag = np.asarray(diag, dtype=np.complex128)
    k = states.shape[0]
    x, shape, nbits = _pair_view(states, s, t)
    y = np.einsum("ij,kjr->kir", np.asarray(matrix, dtype=np.complex128), x)
    # factors[o, local]
    vs, vt = np.arange(4) % 2, np.arange(4) // 2
    factors = diag[vs[:, None], vs[None, :]] * diag[vt[:, None], vt[None, :]]
    out = factors[:, None, :, None] * y[None, :, :, :]
    out = out.reshape((4 * k,) + y.shape[1:])
    shape = (4 * k,) + shape[1:]
    return _pair_restore(out, shape, nbits, s, t)
