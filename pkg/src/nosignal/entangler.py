"""The one-sided entangling map and every reading of its sign ambiguity.

The map acts on span{|Psi1>, |Psi2>} = span{|H1H2>, |V1V2>}:

    |Psi1> -> (|Psi1> + s1 |Psi2>) / sqrt2
    |Psi2> -> phase2 (|Psi1> + s2 |Psi2>) / sqrt2

Which signs are meant decides whether the map is unitary at all, so all
four readings are built and audited side by side.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .linmaps import (
    BasisMapSpec,
    FactorReport,
    GramReport,
    Witness,
    embed,
    extend,
    gram,
    local_factor,
    witness,
)
from .qcore import EPS_NORM, PHOTON_PAIR, Space, StateVector, ValidationError, marginal, schmidt

SPAN = Space((("Psi1", "Psi2"),), slot_names=("",))
SPAN_LABELS = ("H1H2", "V1V2")
R2 = 1 / math.sqrt(2)


@dataclass(frozen=True)
class EntanglerParams:
    s1: int = 1
    s2: int = 1
    phase2: complex = 1j
    general_a: complex | None = None
    general_b: complex | None = None

    def __post_init__(self):
        if self.s1 not in (1, -1) or self.s2 not in (1, -1):
            raise ValidationError(f"signs must be +1 or -1, got {self.s1!r}, {self.s2!r}")
        object.__setattr__(self, "phase2", complex(self.phase2))
        if abs(abs(self.phase2) - 1) > EPS_NORM:
            raise ValidationError(f"phase2 must have unit modulus, got {self.phase2!r}")
        if (self.general_a is None) != (self.general_b is None):
            raise ValidationError("general form needs both a and b")
        if self.general:
            a, b = complex(self.general_a), complex(self.general_b)
            object.__setattr__(self, "general_a", a)
            object.__setattr__(self, "general_b", b)
            if abs(abs(a) ** 2 + abs(b) ** 2 - 1) > EPS_NORM:
                raise ValidationError("general form needs |a|^2 + |b|^2 = 1")

    @property
    def general(self) -> bool:
        return self.general_a is not None

    @property
    def label(self) -> str:
        if self.general:
            return "general"
        return ("+" if self.s1 > 0 else "-") + ("+" if self.s2 > 0 else "-")

    @classmethod
    def from_signs(cls, signs: str, phase2: complex = 1j) -> EntanglerParams:
        if len(signs) != 2 or set(signs) - {"+", "-"}:
            raise ValidationError(f"signs must be two of '+'/'-', got {signs!r}")
        s1, s2 = (1 if ch == "+" else -1 for ch in signs)
        return cls(s1, s2, phase2)


def readings(phase2: complex = 1j) -> list[EntanglerParams]:
    return [EntanglerParams.from_signs(a + b, phase2) for a, b in itertools.product("+-", repeat=2)]


def build(params: EntanglerParams) -> BasisMapSpec:
    """Map on the two-dimensional span, columns = images of Psi1, Psi2.

    In the general form only the image ``a Psi1 + b Psi2`` of ``Psi1`` is
    given; ``Psi2`` is sent to ``phase2 * (-conj(b) Psi1 + conj(a) Psi2)``,
    the orthogonal partner, which always exists for a normalised ``(a, b)``.
    """
    if params.general:
        a, b = params.general_a, params.general_b
        first = np.array([a, b])
        second = params.phase2 * np.array([-b.conjugate(), a.conjugate()])
    else:
        first = np.array([1, params.s1]) * R2
        second = params.phase2 * np.array([1, params.s2]) * R2
    return BasisMapSpec(SPAN, SPAN, np.column_stack([first, second]))


def full_matrix(params: EntanglerParams) -> np.ndarray:
    """Extension to the photon-pair space, identity on |H1V2>, |V1H2>."""
    return embed(build(params), PHOTON_PAIR, SPAN_LABELS)


@dataclass(frozen=True, eq=False)
class EntanglerAudit:
    params: EntanglerParams
    gram: GramReport
    witness: Witness | None
    single_input_norm: float
    single_input_passes: bool
    factor: FactorReport

    def to_dict(self) -> dict:
        p = self.params
        out = {
            "reading": p.label,
            "phase2": {"re": p.phase2.real, "im": p.phase2.imag},
            "gram": self.gram.to_dict(),
            "gram_offdiag_abs": float(abs(self.gram.gram[0, 1])),
            "witness": None if self.witness is None else self.witness.to_dict(),
            "single_input_check": {
                "input": "(Psi1 + Psi2)/sqrt2",
                "image_norm": self.single_input_norm,
                "passes": self.single_input_passes,
            },
            "locality": {**self.factor.to_dict(), "complement_extension": "identity"},
        }
        if p.general:
            out["general"] = {
                "a": {"re": p.general_a.real, "im": p.general_a.imag},
                "b": {"re": p.general_b.real, "im": p.general_b.imag},
                "psi2_image": "completed to orthogonal partner",
            }
        return out


def audit(params: EntanglerParams) -> EntanglerAudit:
    """Gram verdict next to the norm check on the single input (Psi1+Psi2)/sqrt2.

    The single-input check only tests one vector and passes for every sign
    reading; the Gram matrix is what separates isometries from the rest.
    """
    spec = build(params)
    probe = extend(spec, StateVector(SPAN, [R2, R2]))
    return EntanglerAudit(
        params=params,
        gram=gram(spec),
        witness=witness(spec),
        single_input_norm=probe.norm,
        single_input_passes=abs(probe.norm - 1) <= 1e-12,
        factor=local_factor(full_matrix(params), acted=1),
    )


@dataclass(frozen=True, eq=False)
class DemoReport:
    output: StateVector
    schmidt_before: int
    schmidt_after: int | None
    marginal_before: float
    marginal_after: float | None

    def to_dict(self) -> dict:
        return {
            "output": self.output.to_dict(),
            "output_norm": self.output.norm,
            "schmidt_before": self.schmidt_before,
            "schmidt_after": self.schmidt_after,
            "marginal_before": self.marginal_before,
            "marginal_after": self.marginal_after,
            "receiver_outcome": "H2",
        }


def demo(initial: StateVector, params: EntanglerParams) -> DemoReport:
    """Apply the full-space map to a product state and watch photon 2.

    If the reading is not an isometry the output may be unnormalised; then
    no probabilities are reported for it (``None``) rather than
    renormalising.
    """
    if initial.space != PHOTON_PAIR:
        raise ValidationError("demo runs on the photon-pair space")
    before = schmidt(initial)
    if before.rank != 1:
        raise ValidationError("initial state must be a product state")
    out = StateVector.raw(PHOTON_PAIR, full_matrix(params) @ initial.amplitudes)
    if out.is_normalized():
        out = out.as_physical()
        return DemoReport(out, 1, schmidt(out).rank, marginal(initial, 2, "H"), marginal(out, 2, "H"))
    return DemoReport(out, 1, None, marginal(initial, 2, "H"), None)
