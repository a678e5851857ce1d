"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Times ``apply_pair`` on a single state, ``expand_branches`` on a stack of
branches, and a full Kraus-chain branch table built through each backend.
Both backends are also checked to agree before timing.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from latticecollapse import _kernels_py, kernel
from latticecollapse.model import build_model

try:
    from latticecollapse import _kernels as _compiled
except ImportError:
    _compiled = None


def branch_table(impl, model, n):
    diag = kernel.kraus_diagonal(model.X)
    states = model.initial[0][1][None, :]
    for i in range(1, n + 1):
        s, t, R = model.step(i)
        states = impl.expand_branches(states, s, t, R, diag)
    return states


def cases(rng):
    R = kernel.random_unitary(rng)
    psi = rng.standard_normal(1 << 16) + 1j * rng.standard_normal(1 << 16)
    stack = rng.standard_normal((64, 1 << 8)) + 1j * rng.standard_normal((64, 1 << 8))
    diag = kernel.kraus_diagonal(0.3)
    model = build_model(3, 6, X=0.3)
    return {
        "apply_pair (16 qubits)": lambda impl: impl.apply_pair(psi, 3, 12, R),
        "expand_branches (64 x 8 qubits)": lambda impl: impl.expand_branches(stack, 1, 6, R, diag),
        "branch table (N=3, n=4)": lambda impl: branch_table(impl, model, 4),
    }


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--number", type=int, default=20)
    args = p.parse_args(argv)

    impls = {"numpy": _kernels_py}
    if _compiled is not None:
        impls["cython"] = _compiled
    else:
        print("compiled extension not built; timing the numpy fallback only")

    rng = np.random.default_rng(0)
    print(f"{'case':34s} " + " ".join(f"{name:>12s}" for name in impls) + "     speedup")
    for label, fn in cases(rng).items():
        outs = {name: fn(impl) for name, impl in impls.items()}
        if len(outs) == 2:
            diff = float(np.max(np.abs(outs["numpy"] - outs["cython"])))
            assert diff < 1e-12, f"{label}: backends disagree by {diff:.2e}"
        times = {name: min(timeit.repeat(lambda: fn(impl), number=args.number, repeat=args.repeat))
                 / args.number for name, impl in impls.items()}
        row = f"{label:34s} " + " ".join(f"{times[n] * 1e3:10.3f}ms" for n in impls)
        if len(times) == 2:
            row += f"   x{times['numpy'] / times['cython']:.2f}"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
