"""Audit of a one-sided device that would partially disentangle a Bell pair.

The device is asked to take ``(|H1H2> + |V1V2>)/sqrt2`` to
``alpha|H1H2> + beta|V1V2>`` while acting on photon 1 only. Linearity
forces the local action; the audit then checks that action for unitarity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linmaps import EPS_UNITARY, BasisMapSpec, extend, gram, local_operator
from .qcore import EPS_NORM, PHOTON, PHOTON_PAIR, StateVector, ValidationError, marginal

EPS_SIG = 1e-9
SQRT2 = math.sqrt(2)


def _c(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


@dataclass(frozen=True)
class DisentanglerTarget:
    alpha: complex
    beta: complex

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        total = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if not math.isfinite(total) or abs(total - 1) > EPS_NORM:
            raise ValidationError(f"|alpha|^2 + |beta|^2 = {total!r}, expected 1")

    @property
    def signalling(self) -> bool:
        """Whether the receiver's statistics would move at all."""
        return abs(abs(self.alpha) - 1 / SQRT2) > EPS_SIG

    def state(self) -> StateVector:
        return StateVector.from_terms(PHOTON_PAIR, {"H1H2": self.alpha, "V1V2": self.beta})


ENTANGLED = StateVector.from_terms(PHOTON_PAIR, {"H1H2": 1 / SQRT2, "V1V2": 1 / SQRT2})


@dataclass(frozen=True)
class LocalCoefficients:
    """Action on photon 1: ``H -> aH + bV`` and ``V -> cH + dV``."""

    a: complex
    b: complex
    c: complex
    d: complex

    def operator(self) -> np.ndarray:
        return np.array([[self.a, self.c], [self.b, self.d]], dtype=np.complex128)

    def local_spec(self) -> BasisMapSpec:
        return BasisMapSpec(PHOTON, PHOTON, self.operator())

    def pair_spec(self) -> BasisMapSpec:
        return BasisMapSpec(PHOTON_PAIR, PHOTON_PAIR, local_operator(self.operator(), 1))

    def to_dict(self) -> dict:
        return {k: _c(getattr(self, k)) for k in "abcd"}


def solve(target: DisentanglerTarget) -> LocalCoefficients:
    """The only local action compatible with the requested output.

    Matching ``(a HH + b VH + c HV + d VV)/sqrt2`` to ``alpha HH + beta VV``
    kills the cross terms and fixes the diagonal.
    """
    return LocalCoefficients(SQRT2 * target.alpha, 0j, 0j, SQRT2 * target.beta)


@dataclass(frozen=True)
class Step:
    """One equality in the derivation, with both sides evaluated."""

    claim: str
    lhs: complex | float
    rhs: complex | float
    holds: bool

    def to_dict(self) -> dict:
        def enc(x):
            return _c(x) if isinstance(x, complex) else float(x)

        return {"claim": self.claim, "lhs": enc(self.lhs), "rhs": enc(self.rhs), "holds": self.holds}


def _step(claim, lhs, rhs, tol=1e-12) -> Step:
    return Step(claim, lhs, rhs, bool(abs(lhs - rhs) <= tol))


@dataclass(frozen=True)
class AuditVerdict:
    target: DisentanglerTarget
    coefficients: LocalCoefficients
    unitarity_row1: float
    unitarity_row2: float
    contradiction: bool
    signalling: bool
    narrative: tuple[Step, ...] = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "alpha": _c(self.target.alpha),
            "beta": _c(self.target.beta),
            "signalling": self.signalling,
            "coefficients": self.coefficients.to_dict(),
            "unitarity_row1": self.unitarity_row1,
            "unitarity_row2": self.unitarity_row2,
            "contradiction": self.contradiction,
            "narrative": [s.to_dict() for s in self.narrative],
        }


def audit(target: DisentanglerTarget) -> AuditVerdict:
    """Replay the linearity argument and test the forced action for unitarity.

    A contradiction is a result, not an error: it is flagged whenever a row
    sum of the forced local action misses 1 by more than ``EPS_UNITARY``.
    """
    co = solve(target)
    al, be = target.alpha, target.beta
    out = extend(co.pair_spec(), ENTANGLED)
    row1 = abs(co.a) ** 2 + abs(co.b) ** 2
    row2 = abs(co.c) ** 2 + abs(co.d) ** 2
    steps = (
        _step("|alpha|^2 + |beta|^2 = 1", abs(al) ** 2 + abs(be) ** 2, 1.0, EPS_NORM),
        _step("<H1V2|out> = c/sqrt2 = 0", out.amplitude("H1V2"), 0j),
        _step("<V1H2|out> = b/sqrt2 = 0", out.amplitude("V1H2"), 0j),
        _step("<H1H2|out> = a/sqrt2 = alpha", out.amplitude("H1H2"), al),
        _step("<V1V2|out> = d/sqrt2 = beta", out.amplitude("V1V2"), be),
        _step("|a|^2 = 2|alpha|^2", abs(co.a) ** 2, 2 * abs(al) ** 2),
        _step("|d|^2 = 2|beta|^2", abs(co.d) ** 2, 2 * abs(be) ** 2),
        _step("|a|^2 + |b|^2 = 1", row1, 1.0, EPS_UNITARY),
        _step("|c|^2 + |d|^2 = 1", row2, 1.0, EPS_UNITARY),
    )
    contradiction = abs(row1 - 1) > EPS_UNITARY or abs(row2 - 1) > EPS_UNITARY
    return AuditVerdict(target, co, row1, row2, contradiction, target.signalling, steps)


@dataclass(frozen=True)
class ShiftReport:
    before: float
    after: float
    shift: float

    def to_dict(self) -> dict:
        return {"before": self.before, "after": self.after, "shift": self.shift}


def receiver_shift(target: DisentanglerTarget) -> ShiftReport:
    """P(H on photon 2) before and after the forced action on photon 1.

    The after-state is obtained by running the solved local action on the
    entangled input, not by writing the target down directly. For a
    contradictory target that image is still normalised (it is the target).
    """
    out = extend(solve(target).pair_spec(), ENTANGLED).as_physical()
    before = marginal(ENTANGLED, 2, "H")
    after = marginal(out, 2, "H")
    return ShiftReport(before, after, after - before)


def induced_isometry(target: DisentanglerTarget) -> bool:
    """Gram verdict on the forced local action, as an independent route."""
    return gram(solve(target).local_spec()).is_isometry
