"""Pure states on small labelled tensor-product spaces.

Basis ordering is row-major over subsystem slots with the first subsystem
most significant, so for a photon pair the basis runs HH, HV, VH, VV.
Subsystems are numbered from 1, matching the labels (``H1V2`` is photon 1
horizontal, photon 2 vertical).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

EPS_NORM = 1e-10
EPS_RANK = 1e-9
MAX_DIM = 64


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition."""


@dataclass(frozen=True)
class Space:
    """Tensor-product space described by one symbol alphabet per subsystem.

    ``slot_names`` optionally renames subsystems for labelling, e.g.
    ``("X1", "X2")`` gives labels of the form ``X1=1,X2=0``; an empty name
    leaves the bare symbol.
    """

    alphabets: tuple[tuple[str, ...], ...]
    slot_names: tuple[str, ...] | None = None

    def __post_init__(self):
        alphabets = tuple(tuple(str(s) for s in a) for a in self.alphabets)
        object.__setattr__(self, "alphabets", alphabets)
        if not alphabets or any(len(a) == 0 for a in alphabets):
            raise ValidationError("space needs at least one subsystem and non-empty alphabets")
        if any(len(set(a)) != len(a) for a in alphabets):
            raise ValidationError("alphabet symbols must be distinct")
        if self.slot_names is not None:
            names = tuple(self.slot_names)
            if len(names) != len(alphabets):
                raise ValidationError("one slot name per subsystem")
            object.__setattr__(self, "slot_names", names)
        if self.dim > MAX_DIM:
            raise ValidationError(f"dimension {self.dim} exceeds {MAX_DIM}")

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.alphabets)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def n_subsystems(self) -> int:
        return len(self.alphabets)

    def outcomes(self) -> list[tuple[str, ...]]:
        """All joint outcomes, in basis-index order."""
        return list(itertools.product(*self.alphabets))

    def label(self, outcome: Sequence[str]) -> str:
        if self.slot_names is None:
            return "".join(f"{sym}{k + 1}" for k, sym in enumerate(outcome))
        return ",".join(f"{name}={sym}" if name else sym for name, sym in zip(self.slot_names, outcome))

    def labels(self) -> list[str]:
        return [self.label(o) for o in self.outcomes()]

    def index(self, outcome: str | Sequence[str]) -> int:
        """Basis index of a joint outcome given as a label or a symbol tuple."""
        if isinstance(outcome, str):
            try:
                return self.labels().index(outcome)
            except ValueError:
                raise ValidationError(f"unknown basis label {outcome!r}") from None
        outcome = tuple(str(s) for s in outcome)
        if len(outcome) != self.n_subsystems:
            raise ValidationError(f"outcome {outcome!r} has wrong arity")
        idx = 0
        for sym, alphabet in zip(outcome, self.alphabets):
            if sym not in alphabet:
                raise ValidationError(f"symbol {sym!r} not in alphabet {alphabet}")
            idx = idx * len(alphabet) + alphabet.index(sym)
        return idx

    def check_subsystem(self, subsystem: int) -> int:
        """Validate a 1-based subsystem number and return the 0-based axis."""
        if not isinstance(subsystem, (int, np.integer)) or not 1 <= subsystem <= self.n_subsystems:
            raise ValidationError(
                f"subsystem {subsystem!r} out of range 1..{self.n_subsystems}"
            )
        return int(subsystem) - 1

    def concat(self, other: Space) -> Space:
        if (self.slot_names is None) != (other.slot_names is None):
            raise ValidationError("cannot join named and unnamed spaces")
        names = None
        if self.slot_names is not None:
            names = self.slot_names + other.slot_names
        return Space(self.alphabets + other.alphabets, names)


PHOTON = Space((("H", "V"),))
PHOTON_PAIR = Space((("H", "V"), ("H", "V")))
SPIN_PAIR = Space((("+", "-"), ("+", "-")))
BOXES = Space((("0", "1"), ("0", "1")), slot_names=("X1", "X2"))


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitude vector over a :class:`Space`.

    ``physical`` is True only for vectors whose norm was checked on
    construction. Unnormalised intermediates (e.g. images under a map that
    is not an isometry) carry ``physical=False`` and are never silently
    renormalised.
    """

    space: Space
    amplitudes: np.ndarray = field(repr=False)
    physical: bool = True

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != self.space.dim:
            raise ValidationError(
                f"{amps.size} amplitudes for a space of dimension {self.space.dim}"
            )
        if not np.all(np.isfinite(amps)):
            raise ValidationError("amplitudes must be finite")
        if self.physical and abs(np.vdot(amps, amps).real - 1.0) > EPS_NORM:
            raise ValidationError(
                f"state is not normalised (norm^2 = {np.vdot(amps, amps).real!r})"
            )
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def raw(cls, space: Space, amplitudes) -> StateVector:
        """Unchecked, explicitly unnormalised vector."""
        return cls(space, amplitudes, physical=False)

    @classmethod
    def from_terms(cls, space: Space, terms: Mapping[str, complex], physical: bool = True) -> StateVector:
        """Build from ``{label: amplitude}``; missing labels get zero."""
        amps = np.zeros(space.dim, dtype=np.complex128)
        for lab, amp in terms.items():
            amps[space.index(lab)] += amp
        return cls(space, amps, physical=physical)

    @classmethod
    def basis(cls, space: Space, outcome: str | Sequence[str]) -> StateVector:
        amps = np.zeros(space.dim, dtype=np.complex128)
        amps[space.index(outcome)] = 1.0
        return cls(space, amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, eps: float = EPS_NORM) -> bool:
        return abs(self.norm**2 - 1.0) <= eps

    def as_physical(self) -> StateVector:
        """Promote an intermediate to a physical state; fails if not normalised."""
        return StateVector(self.space, self.amplitudes, physical=True)

    def amplitude(self, outcome: str | Sequence[str]) -> complex:
        return complex(self.amplitudes[self.space.index(outcome)])

    def tensor_shape(self) -> np.ndarray:
        return self.amplitudes.reshape(self.space.dims)

    def allclose(self, other: StateVector, atol: float = 1e-12) -> bool:
        return self.space == other.space and np.allclose(
            self.amplitudes, other.amplitudes, rtol=0.0, atol=atol
        )

    def to_dict(self) -> dict:
        return {
            "basis": self.space.labels(),
            "re": [float(x) for x in self.amplitudes.real],
            "im": [float(x) for x in self.amplitudes.imag],
        }

    @classmethod
    def from_dict(cls, space: Space, data: Mapping, physical: bool = True) -> StateVector:
        if list(data["basis"]) != space.labels():
            raise ValidationError("basis labels do not match the space")
        amps = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
        return cls(space, amps, physical=physical)


def _require_normalized(s: StateVector, what: str = "state") -> None:
    if not s.is_normalized():
        raise ValidationError(f"{what} must be normalised (norm = {s.norm!r})")


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Product state ``a ⊗ b`` on the concatenated space."""
    _require_normalized(a, "left factor")
    _require_normalized(b, "right factor")
    return StateVector(a.space.concat(b.space), np.kron(a.amplitudes, b.amplitudes))


def born(s: StateVector, outcome: str | Sequence[str]) -> float:
    """Probability of a joint basis outcome."""
    _require_normalized(s)
    amp = s.amplitudes[s.space.index(outcome)]
    return float(amp.real**2 + amp.imag**2)


def probabilities(s: StateVector) -> np.ndarray:
    return np.abs(s.amplitudes) ** 2


def marginal(s: StateVector, subsystem: int, outcome: str) -> float:
    """Probability that ``subsystem`` (1-based) shows ``outcome``."""
    _require_normalized(s)
    axis = s.space.check_subsystem(subsystem)
    alphabet = s.space.alphabets[axis]
    if outcome not in alphabet:
        raise ValidationError(f"symbol {outcome!r} not in alphabet {alphabet}")
    probs = probabilities(s).reshape(s.space.dims)
    return float(np.take(probs, alphabet.index(outcome), axis=axis).sum())


@dataclass(frozen=True)
class SchmidtReport:
    rank: int
    coefficients: tuple[float, ...]
    cut: tuple[tuple[int, ...], tuple[int, ...]]
    left: np.ndarray = field(repr=False, compare=False)
    right: np.ndarray = field(repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "coefficients": list(self.coefficients),
            "cut": [list(self.cut[0]), list(self.cut[1])],
        }


def _split(space: Space, cut: Iterable[int] | None) -> tuple[tuple[int, ...], tuple[int, ...]]:
    n = space.n_subsystems
    group = (1,) if cut is None else tuple(sorted(set(int(k) for k in cut)))
    for k in group:
        space.check_subsystem(k)
    rest = tuple(k for k in range(1, n + 1) if k not in group)
    if not group or not rest:
        raise ValidationError(f"cut {group} does not split {n} subsystems into two non-empty groups")
    return group, rest


def _cut_matrix(s: StateVector, left: tuple[int, ...], right: tuple[int, ...]) -> np.ndarray:
    dims = s.space.dims
    order = [k - 1 for k in left + right]
    d_left = int(np.prod([dims[k - 1] for k in left]))
    return np.transpose(s.tensor_shape(), order).reshape(d_left, -1)


def schmidt(s: StateVector, cut: Iterable[int] | None = None) -> SchmidtReport:
    """Schmidt coefficients across the bipartition ``cut | rest``.

    ``cut`` lists the 1-based subsystems on the left side; it defaults to
    subsystem 1 alone.
    """
    _require_normalized(s)
    left, right = _split(s.space, cut)
    u, sv, vh = np.linalg.svd(_cut_matrix(s, left, right))
    return SchmidtReport(
        rank=int(np.sum(sv > EPS_RANK)),
        coefficients=tuple(float(x) for x in sv),
        cut=(left, right),
        left=u,
        right=vh.T,
    )


def product_residual(s: StateVector, cut: Iterable[int] | None = None) -> float:
    """Distance from ``s`` to the product state built from its leading Schmidt pair.

    Vanishes (to rounding) exactly when the Schmidt rank is one.
    """
    rep = schmidt(s, cut)
    best = rep.coefficients[0] * np.outer(rep.left[:, 0], rep.right[:, 0])
    return float(np.linalg.norm(_cut_matrix(s, *rep.cut) - best))


def random_state(space: Space, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state."""
    v = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
    return StateVector(space, v / np.linalg.norm(v))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
