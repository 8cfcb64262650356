"""Two-box tunnelling as a two-level system with a blockable coupling.

While the barrier is open the amplitudes rotate under the hopping
generator ``gamma * sigma_x``:

    amp1 -> cos(g t) amp1 - i sin(g t) amp2
    amp2 -> -i sin(g t) amp1 + cos(g t) amp2

and while it is blocked nothing moves. Since the generator is the same in
every open interval, the state at time ``t`` depends only on the total
open time accumulated up to ``t``.

The generator couples both boxes; :data:`GENERATOR_SUPPORT` records that
and no claim is made about whether removing the barrier is a local act.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .qcore import BOXES, EPS_NORM, SPIN_PAIR, StateVector, ValidationError

GENERATOR_SUPPORT = ("X1", "X2")


@dataclass(frozen=True)
class TwoBoxState:
    """Amplitudes on |X1=1,X2=0> (``amp1``) and |X1=0,X2=1> (``amp2``)."""

    amp1: complex
    amp2: complex

    def __post_init__(self):
        object.__setattr__(self, "amp1", complex(self.amp1))
        object.__setattr__(self, "amp2", complex(self.amp2))
        total = abs(self.amp1) ** 2 + abs(self.amp2) ** 2
        if not math.isfinite(total) or abs(total - 1) > EPS_NORM:
            raise ValidationError(f"two-box state not normalised (norm^2 = {total!r})")

    def vector(self) -> np.ndarray:
        return np.array([self.amp1, self.amp2])

    def to_occupation_state(self) -> StateVector:
        """The same state on the two occupation slots X1, X2."""
        return StateVector.from_terms(BOXES, {"X1=1,X2=0": self.amp1, "X1=0,X2=1": self.amp2})

    def to_spin_state(self) -> StateVector:
        return StateVector.from_terms(SPIN_PAIR, {"+1-2": self.amp1, "-1+2": self.amp2})


IN_X1 = TwoBoxState(1, 0)
IN_X2 = TwoBoxState(0, 1)


@dataclass(frozen=True)
class Segment:
    start: float
    end: float  # may be math.inf
    open: bool

    def overlap(self, t: float) -> float:
        return max(0.0, min(t, self.end) - self.start)


@dataclass(frozen=True)
class TunnelConfig:
    """Coupling rate, barrier schedule and sampling grid.

    ``gamma`` is in radians per unit time. Physical runs use ``gamma > 0``;
    a negative rate is the time-reversed generator and is accepted so that
    reversibility can be checked.
    """

    gamma: float
    schedule: tuple[Segment, ...]
    t_grid: tuple[float, ...] = ()

    def __post_init__(self):
        g = float(self.gamma)
        if not math.isfinite(g) or g == 0:
            raise ValidationError(f"gamma must be finite and non-zero, got {self.gamma!r}")
        object.__setattr__(self, "gamma", g)
        segs = tuple(self.schedule)
        if not segs:
            raise ValidationError("schedule is empty")
        if segs[0].start != 0:
            raise ValidationError("schedule must start at t = 0")
        for a, b in zip(segs, segs[1:]):
            if a.end != b.start:
                raise ValidationError(f"schedule gap or overlap at t = {a.end}")
        for s in segs:
            if not s.end > s.start:
                raise ValidationError(f"empty schedule interval {s.start}..{s.end}")
        object.__setattr__(self, "schedule", segs)
        grid = tuple(float(t) for t in self.t_grid)
        object.__setattr__(self, "t_grid", grid)
        for t in grid:
            self._check_time(t)

    @property
    def horizon(self) -> float:
        return self.schedule[-1].end

    def _check_time(self, t: float) -> None:
        if not (0 <= t <= self.horizon):
            raise ValidationError(f"t = {t} outside the schedule 0..{self.horizon}")

    def open_time(self, t: float) -> float:
        """Total time the barrier has been open during [0, t]."""
        self._check_time(t)
        return sum(s.overlap(t) for s in self.schedule if s.open)

    def reversed(self) -> TunnelConfig:
        return TunnelConfig(-self.gamma, self.schedule, self.t_grid)


def parse_schedule(text: str) -> tuple[Segment, ...]:
    """Read ``"blocked:0..2,open:2.."`` style schedules.

    A bare ``open`` or ``blocked`` covers [0, inf). An omitted end means
    infinity and an omitted start continues from the previous interval.
    """
    segs: list[Segment] = []
    for part in (p.strip() for p in text.split(",")):
        kind, _, span = part.partition(":")
        kind = kind.strip()
        if kind not in ("open", "blocked"):
            raise ValidationError(f"schedule item {part!r} must start with open or blocked")
        prev_end = segs[-1].end if segs else 0.0
        lo_text, sep, hi_text = span.partition("..")
        if span.strip() and not sep:
            raise ValidationError(f"schedule item {part!r} needs a start..end range")
        try:
            lo = float(lo_text) if lo_text.strip() else prev_end
            hi = float(hi_text) if hi_text.strip() else math.inf
        except ValueError:
            raise ValidationError(f"bad number in schedule item {part!r}") from None
        segs.append(Segment(lo, hi, kind == "open"))
    return tuple(segs)


def parse_grid(text: str) -> tuple[float, ...]:
    """``"t0:t1:dt"``, endpoints included when ``t1`` falls on the grid."""
    try:
        t0, t1, dt = (float(x) for x in text.split(":"))
    except ValueError:
        raise ValidationError(f"grid must be t0:t1:dt, got {text!r}") from None
    if dt <= 0 or t1 < t0:
        raise ValidationError("grid needs dt > 0 and t1 >= t0")
    n = int(math.floor((t1 - t0) / dt + 1e-9)) + 1
    return tuple(t0 + k * dt for k in range(n))


def rotate(state: TwoBoxState, angle: float) -> TwoBoxState:
    c, s = math.cos(angle), math.sin(angle)
    return TwoBoxState(c * state.amp1 - 1j * s * state.amp2, -1j * s * state.amp1 + c * state.amp2)


def evolve(config: TunnelConfig, initial: TwoBoxState, t: float) -> TwoBoxState:
    return rotate(initial, config.gamma * config.open_time(t))


def occupations(state: TwoBoxState) -> tuple[float, float]:
    return abs(state.amp1) ** 2, abs(state.amp2) ** 2


def time_to_balance(config: TunnelConfig) -> float | None:
    """Earliest time with P(X2) = 1/2 starting from X1, or None if never reached.

    That is the moment the accumulated open time reaches ``pi / (4|gamma|)``.
    """
    need = math.pi / (4 * abs(config.gamma))
    acc = 0.0
    for s in config.schedule:
        if not s.open:
            continue
        span = s.end - s.start
        if acc + span >= need:
            return s.start + (need - acc)
        acc += span
    return None


@dataclass(frozen=True)
class Trace:
    t: np.ndarray
    amp1: np.ndarray
    amp2: np.ndarray

    @property
    def p1(self) -> np.ndarray:
        return np.abs(self.amp1) ** 2

    @property
    def p2(self) -> np.ndarray:
        return np.abs(self.amp2) ** 2

    def rows(self):
        for t, a1, a2 in zip(self.t, self.amp1, self.amp2):
            yield (
                float(t), float(abs(a1) ** 2), float(abs(a2) ** 2),
                float(a1.real), float(a1.imag), float(a2.real), float(a2.imag),
            )


def trace(config: TunnelConfig, initial: TwoBoxState = IN_X1, grid: Sequence[float] | None = None) -> Trace:
    """Closed-form samples on ``grid`` (default: the config's grid)."""
    ts = np.asarray(config.t_grid if grid is None else grid, dtype=float)
    states = [evolve(config, initial, float(t)) for t in ts]
    return Trace(ts, np.array([s.amp1 for s in states]), np.array([s.amp2 for s in states]))


def integrate(config: TunnelConfig, initial: TwoBoxState, t: float, max_step: float | None = None) -> TwoBoxState:
    """Classical RK4 on ``i d/dt psi = gamma sigma_x psi`` over the open intervals.

    Independent of :func:`evolve`; used to check the closed form.
    """
    config._check_time(t)
    g = config.gamma
    h_max = max_step if max_step is not None else 1e-4 / abs(g)
    a, b = initial.amp1, initial.amp2
    for seg in config.schedule:
        if not seg.open or seg.start >= t:
            continue
        length = min(t, seg.end) - seg.start
        n = max(1, math.ceil(length / h_max))
        h = length / n
        for _ in range(n):
            k1a, k1b = -1j * g * b, -1j * g * a
            k2a, k2b = -1j * g * (b + 0.5 * h * k1b), -1j * g * (a + 0.5 * h * k1a)
            k3a, k3b = -1j * g * (b + 0.5 * h * k2b), -1j * g * (a + 0.5 * h * k2a)
            k4a, k4b = -1j * g * (b + h * k3b), -1j * g * (a + h * k3a)
            a, b = (
                a + h / 6 * (k1a + 2 * k2a + 2 * k3a + k4a),
                b + h / 6 * (k1b + 2 * k2b + 2 * k3b + k4b),
            )
    norm = math.hypot(abs(a), abs(b))
    if abs(norm**2 - 1) > EPS_NORM:
        raise ArithmeticError(f"integrator drifted off the unit sphere (norm^2 = {norm**2})")
    return TwoBoxState(a, b)


def spin_map(initial: StateVector | str) -> TwoBoxState:
    """|+-> maps to X1 occupied, |-+> to X2 occupied.

    Anything outside the one-excitation subspace is rejected.
    """
    if isinstance(initial, str):
        initial = StateVector.basis(SPIN_PAIR, initial)
    if initial.space != SPIN_PAIR:
        raise ValidationError("spin_map expects a state on the spin-pair space")
    outside = abs(initial.amplitude("+1+2")) ** 2 + abs(initial.amplitude("-1-2")) ** 2
    if outside > EPS_NORM:
        raise ValidationError("state has weight on |++> or |-->, outside the exchange subspace")
    return TwoBoxState(initial.amplitude("+1-2"), initial.amplitude("-1+2"))
