"""Linear maps given by basis images: extension, Gram audit, locality test."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .qcore import Space, StateVector, ValidationError

EPS_UNITARY = 1e-10
EPS_LOCAL = 1e-8


def matrix_to_dict(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    return {"re": m.real.tolist(), "im": m.imag.tolist()}


def matrix_from_dict(data: Mapping) -> np.ndarray:
    return np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)


@dataclass(frozen=True, eq=False)
class BasisMapSpec:
    """A linear map fixed by the image of each domain basis vector.

    Images are stored as the columns of ``matrix`` and need not be
    normalised; whether they are is exactly what :func:`gram` reports.
    """

    domain: Space
    codomain: Space
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        if m.shape != (self.codomain.dim, self.domain.dim):
            raise ValidationError(
                f"map matrix has shape {m.shape}, expected "
                f"({self.codomain.dim}, {self.domain.dim})"
            )
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_images(cls, domain: Space, images: Sequence[StateVector]) -> BasisMapSpec:
        if len(images) != domain.dim:
            raise ValidationError(f"need {domain.dim} images, got {len(images)}")
        codomain = images[0].space
        if any(im.space != codomain for im in images):
            raise ValidationError("all images must live in the same space")
        return cls(domain, codomain, np.column_stack([im.amplitudes for im in images]))

    @classmethod
    def identity(cls, space: Space) -> BasisMapSpec:
        return cls(space, space, np.eye(space.dim))

    def image(self, i: int) -> StateVector:
        return StateVector.raw(self.codomain, self.matrix[:, i])


def extend(spec: BasisMapSpec, s: StateVector) -> StateVector:
    """Linear extension: ``sum_i s_i * image_i``.

    The result is returned as an unnormalised intermediate; callers decide
    whether to promote it with :meth:`StateVector.as_physical`.
    """
    if s.space != spec.domain:
        raise ValidationError("state does not live in the map's domain")
    return StateVector.raw(spec.codomain, spec.matrix @ s.amplitudes)


@dataclass(frozen=True, eq=False)
class GramReport:
    gram: np.ndarray = field(repr=False)
    is_isometry: bool
    max_deviation: float
    per_basis_norms: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "gram": matrix_to_dict(self.gram),
            "is_isometry": self.is_isometry,
            "max_deviation": self.max_deviation,
            "per_basis_norms": list(self.per_basis_norms),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> GramReport:
        return cls(
            gram=matrix_from_dict(data["gram"]),
            is_isometry=bool(data["is_isometry"]),
            max_deviation=float(data["max_deviation"]),
            per_basis_norms=tuple(float(x) for x in data["per_basis_norms"]),
        )


def gram(spec: BasisMapSpec) -> GramReport:
    """Pairwise inner products ``G[i, j] = <image_i|image_j>``."""
    m = spec.matrix
    g = m.conj().T @ m
    # exact Hermitian symmetry; the product above only gets it to rounding
    g = np.triu(g, 1) + np.triu(g, 1).conj().T + np.diag(np.real(np.diag(g)))
    dev = float(np.max(np.abs(g - np.eye(g.shape[0]))))
    norms = tuple(float(x) for x in np.sqrt(np.real(np.diag(g))))
    return GramReport(g, dev <= EPS_UNITARY, dev, norms)


@dataclass(frozen=True, eq=False)
class Witness:
    """Normalised input whose image norm differs from one.

    ``image_norm_sq - 1`` equals ``eigenvalue`` of ``G - I``.
    """

    input: StateVector
    eigenvalue: float
    image_norm_sq: float

    def to_dict(self) -> dict:
        return {
            "input": self.input.to_dict(),
            "eigenvalue": self.eigenvalue,
            "image_norm_sq": self.image_norm_sq,
        }


def witness(spec: BasisMapSpec, eps: float = EPS_UNITARY) -> Witness | None:
    """Constructive refutation of isometry, or None if the map is one.

    Takes the eigenvector of ``G - I`` with the largest-magnitude eigenvalue
    (ties go to the positive one). Its spectral norm bounds every entry of
    ``G - I``, so the image norm^2 misses 1 by at least ``max_deviation``.
    """
    g = gram(spec).gram
    vals, vecs = np.linalg.eigh(g - np.eye(g.shape[0]))
    # eigh sorts ascending: the candidates are the two ends
    lo, hi = vals[0], vals[-1]
    idx = len(vals) - 1 if abs(hi) >= abs(lo) - 1e-15 else 0
    lam = float(vals[idx])
    if abs(lam) <= eps:
        return None
    v = vecs[:, idx]
    # fix the global phase so the largest component is real positive
    k = int(np.argmax(np.abs(v)))
    v = v * (abs(v[k]) / v[k])
    s = StateVector(spec.domain, v / np.linalg.norm(v))
    out = extend(spec, s)
    return Witness(s, lam, float(np.vdot(out.amplitudes, out.amplitudes).real))


@dataclass(frozen=True, eq=False)
class FactorReport:
    factorable: bool
    best_local_factor: np.ndarray = field(repr=False)
    residual: float
    acted: int

    def to_dict(self) -> dict:
        return {
            "factorable": self.factorable,
            "best_local_factor": matrix_to_dict(self.best_local_factor),
            "residual": self.residual,
            "acted": self.acted,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> FactorReport:
        return cls(
            factorable=bool(data["factorable"]),
            best_local_factor=matrix_from_dict(data["best_local_factor"]),
            residual=float(data["residual"]),
            acted=int(data["acted"]),
        )


def local_factor(m: np.ndarray, acted: int, dims: Sequence[int] = (2, 2)) -> FactorReport:
    """Best fit of ``m`` by an operator acting on one subsystem only.

    For ``acted=1`` the fit is ``A ⊗ I`` with ``A[i, j] = tr(block_ij) / d2``;
    for ``acted=2`` it is ``I ⊗ A`` with ``A`` the normalised partial trace
    over subsystem 1. Both are the Frobenius-optimal local fits.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"matrix must be square, got shape {m.shape}")
    d1, d2 = (int(d) for d in dims)
    if m.shape[0] != d1 * d2:
        raise ValidationError(f"matrix size {m.shape[0]} does not match dims {d1}x{d2}")
    t = m.reshape(d1, d2, d1, d2)
    if acted == 1:
        a = np.einsum("ikjk->ij", t) / d2
        fit = np.kron(a, np.eye(d2))
    elif acted == 2:
        a = np.einsum("kikj->ij", t) / d1
        fit = np.kron(np.eye(d1), a)
    else:
        raise ValidationError(f"acted subsystem must be 1 or 2, got {acted!r}")
    residual = float(np.linalg.norm(m - fit))
    return FactorReport(residual <= EPS_LOCAL, a, residual, acted)


def embed(spec: BasisMapSpec, ambient: Space, basis: Sequence[str]) -> np.ndarray:
    """Full matrix on ``ambient`` for a map defined on a subspace.

    ``basis`` names the ambient basis vectors spanning the subspace, in the
    order of ``spec.domain``; ``spec.codomain`` is read in the same basis.
    The orthogonal complement is mapped by the identity, which is a choice
    and not implied by the map itself.
    """
    if spec.domain != spec.codomain:
        raise ValidationError("only endomorphisms of the subspace can be embedded")
    if len(basis) != spec.domain.dim:
        raise ValidationError("one ambient label per subspace basis vector")
    idx = [ambient.index(lab) for lab in basis]
    if len(set(idx)) != len(idx):
        raise ValidationError("subspace basis labels must be distinct")
    full = np.eye(ambient.dim, dtype=np.complex128)
    for i in idx:
        full[i, i] = 0
    full[np.ix_(idx, idx)] = spec.matrix
    return full


def local_operator(a: np.ndarray, acted: int, dims: Sequence[int] = (2, 2)) -> np.ndarray:
    """``A ⊗ I`` or ``I ⊗ A`` on a bipartite space."""
    d1, d2 = dims
    if acted == 1:
        return np.kron(a, np.eye(d2))
    if acted == 2:
        return np.kron(np.eye(d1), a)
    raise ValidationError(f"acted subsystem must be 1 or 2, got {acted!r}")
