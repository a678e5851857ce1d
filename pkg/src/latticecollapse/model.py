"""Model configuration shared by all decoherence functionals."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Sequence

import numpy as np

from . import kernel
from .geometry import (LatticeGeometry, LatticeSpec, NaturalLabelling, build_lattice,
                       validate_labelling)

PRESETS = ("identity", "swap", "rotation", "random")


class ModelError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Model:
    """Lattice, evolution order, per-vertex unitaries, initial state and coupling.

    ``unitaries[v - 1]`` is the 4x4 unitary of vertex id ``v`` (so it travels
    with the vertex when the labelling changes).  ``initial`` is a tuple of
    ``(weight, state)`` pairs; a pure state is a single pair of weight 1.
    """

    geometry: LatticeGeometry
    labelling: NaturalLabelling
    unitaries: tuple[np.ndarray, ...]
    initial: tuple[tuple[float, np.ndarray], ...]
    X: float
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        kernel.check_coupling(self.X)
        if len(self.unitaries) != self.geometry.depth:
            raise ModelError(f"need {self.geometry.depth} vertex unitaries, got {len(self.unitaries)}")
        for vid, R in enumerate(self.unitaries, start=1):
            if R.shape != (4, 4) or not kernel.is_unitary(R):
                raise ModelError(f"unitary for vertex {vid} is not a 4x4 unitary")
        if not self.initial:
            raise ModelError("at least one initial state is required")
        weights = np.array([w for w, _ in self.initial])
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > kernel.ATOL:
            raise ModelError(f"mixture weights must be nonnegative and sum to 1, got {weights.tolist()}")
        for _, psi in self.initial:
            if psi.shape != (self.dim,):
                raise ModelError(f"initial state has dimension {psi.shape[0]}, expected {self.dim}")
            if abs(np.linalg.norm(psi) - 1.0) > kernel.ATOL:
                raise ModelError("initial states must be normalized")

    @property
    def n_slots(self) -> int:
        return self.geometry.n_slots

    @property
    def dim(self) -> int:
        return 1 << self.n_slots

    @property
    def depth(self) -> int:
        return self.geometry.depth

    @property
    def is_pure(self) -> bool:
        return len(self.initial) == 1

    def unitary_of(self, vertex_id: int) -> np.ndarray:
        return self.unitaries[vertex_id - 1]

    def step(self, i: int) -> tuple[int, int, np.ndarray]:
        """(left slot, right slot, unitary) of the elementary motion over ``v_i``."""
        vid = self.labelling.vertex(i)
        left, right = self.geometry.outgoing(vid)
        return left.slot, right.slot, self.unitaries[vid - 1]

    def with_labelling(self, labelling: NaturalLabelling | Sequence[int]) -> "Model":
        if not isinstance(labelling, NaturalLabelling):
            labelling = validate_labelling(self.geometry, labelling)
        else:
            validate_labelling(self.geometry, labelling.order)
        return replace(self, labelling=labelling, _cache={})

    def with_X(self, X: float) -> "Model":
        return replace(self, X=float(X), _cache={})

    def with_initial(self, initial) -> "Model":
        return replace(self, initial=_initial_tuple(initial, self.n_slots), _cache={})


def preset_unitary(spec: str | Mapping[str, Any], vertex_id: int, seed: int = 42) -> np.ndarray:
    """Resolve a per-vertex unitary spec.

    ``spec`` is a preset name or a mapping with ``preset`` (plus ``seed`` for
    random, ``angles`` for rotation) or ``matrix`` (rows of ``[re, im]``).
    """
    if isinstance(spec, str):
        spec = {"preset": spec}
    if "matrix" in spec:
        rows = spec["matrix"]
        M = np.array([[kernel._as_complex(x) for x in row] for row in rows], dtype=np.complex128)
        if M.shape != (4, 4):
            raise ModelError(f"explicit unitary for vertex {vertex_id} must be 4x4")
        return M
    name = spec.get("preset")
    if name == "identity":
        return kernel.identity_unitary()
    if name == "swap":
        return kernel.swap_unitary()
    if name == "rotation":
        a, b = spec.get("angles", (np.pi / 5, np.pi / 3))
        return kernel.rotation_unitary(float(a), float(b))
    if name == "random":
        s = int(spec.get("seed", seed))
        return kernel.random_unitary(np.random.default_rng([s, vertex_id]))
    raise ModelError(f"unknown unitary preset {name!r}; expected one of {PRESETS}")


def _initial_tuple(initial, n_slots: int) -> tuple[tuple[float, np.ndarray], ...]:
    if isinstance(initial, np.ndarray):
        return ((1.0, initial.astype(np.complex128)),)
    if isinstance(initial, str):
        return ((1.0, kernel.initial_state(initial, n_slots)),)
    if isinstance(initial, (list, tuple)) and initial and isinstance(initial[0], tuple) \
            and len(initial[0]) == 2 and not isinstance(initial[0][0], (list, tuple)):
        # already (weight, state) pairs
        return tuple((float(w), s if isinstance(s, np.ndarray) else kernel.initial_state(s, n_slots))
                     for w, s in initial)
    return ((1.0, kernel.initial_state(initial, n_slots)),)


def build_model(width: int = 2, depth: int = 4, *, unitaries: Any = "random", seed: int = 42,
                initial: Any = None, X: float = 0.3,
                labelling: Sequence[int] | None = None) -> Model:
    """Assemble a model.

    ``unitaries`` is one spec applied to every vertex, or a list with one spec
    per vertex id.  ``initial`` defaults to the all-zeros basis state.
    """
    geometry = build_lattice(LatticeSpec(width, depth))
    if labelling is None:
        lab = geometry.default_labelling
    else:
        lab = validate_labelling(geometry, labelling)
    if isinstance(unitaries, (str, Mapping)):
        specs = [unitaries] * depth
    else:
        specs = list(unitaries)
        if len(specs) != depth:
            raise ModelError(f"need {depth} unitary specs, got {len(specs)}")
    Rs = tuple(R if isinstance(R, np.ndarray) else preset_unitary(R, vid, seed)
               for vid, R in enumerate(specs, start=1))
    if initial is None:
        initial = "0" * geometry.n_slots
    return Model(geometry, lab, Rs, _initial_tuple(initial, geometry.n_slots), float(X))
