"""How many particles the receiver needs to tell "sender idle" from "sender acted".

Each particle gives the watched outcome with probability ``p0`` (idle) or
``p1`` (acted). The receiver counts hits ``K`` among ``n`` particles and
thresholds the count:

* ``p1 < p0`` (or equal): declare "acted" iff ``K <= k``
* ``p1 > p0``: declare "acted" iff ``K >= k``

Type I is declaring "acted" while idle, type II declaring "idle" after the
sender acted. All tails are exact binomial sums, accumulated in log space.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qcore import ValidationError
from .rng import uniforms

N_MAX = 10_000


def _check_p(name: str, p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"{name} must lie in [0, 1], got {p!r}")
    return p


def log_pmf(n: int, p: float) -> np.ndarray:
    """``log P(K = k)`` for k = 0..n, with ``log 0 = -inf``."""
    k = np.arange(1, n + 1)
    log_binom = np.concatenate([[0.0], np.cumsum(np.log(n - k + 1) - np.log(k))])
    ks = np.arange(n + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        hit = np.where(ks == 0, 0.0, ks * np.log(p)) if p > 0 else np.where(ks == 0, 0.0, -np.inf)
        miss = (
            np.where(ks == n, 0.0, (n - ks) * np.log1p(-p)) if p < 1 else np.where(ks == n, 0.0, -np.inf)
        )
    return log_binom + hit + miss


def tails(n: int, p: float) -> tuple[np.ndarray, np.ndarray]:
    """``(P(K <= k), P(K > k))`` for k = 0..n, each summed directly."""
    lp = log_pmf(n, p)
    lower = np.exp(np.logaddexp.accumulate(lp))
    upper_incl = np.exp(np.logaddexp.accumulate(lp[::-1]))[::-1]  # P(K >= k)
    upper = np.append(upper_incl[1:], 0.0)
    return np.minimum(lower, 1.0), np.minimum(upper, 1.0)


def rule(p0: float, p1: float) -> str:
    return "acted iff K >= k" if p1 > p0 else "acted iff K <= k"


def error_curves(p0: float, p1: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Type I and type II error for every threshold k = 0..n."""
    lo0, up0 = tails(n, p0)
    lo1, up1 = tails(n, p1)
    if p1 > p0:
        # acted iff K >= k: type1 = P0(K >= k), type2 = P1(K < k) = P1(K <= k-1)
        ge0 = np.append(1.0, up0[:-1])
        lt1 = np.append(0.0, lo1[:-1])
        return ge0, lt1
    return lo0, up1


@dataclass(frozen=True)
class SignalBudget:
    p0: float
    p1: float
    n: int
    k_threshold: int

    def __post_init__(self):
        object.__setattr__(self, "p0", _check_p("p0", self.p0))
        object.__setattr__(self, "p1", _check_p("p1", self.p1))
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n!r}")
        if int(self.k_threshold) != self.k_threshold or not 0 <= self.k_threshold <= self.n:
            raise ValidationError(f"k_threshold must lie in 0..{self.n}, got {self.k_threshold!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "k_threshold", int(self.k_threshold))

    @property
    def rule(self) -> str:
        return rule(self.p0, self.p1)

    def decide(self, hits: np.ndarray) -> np.ndarray:
        """True where the receiver declares "acted"."""
        if self.p1 > self.p0:
            return hits >= self.k_threshold
        return hits <= self.k_threshold


@dataclass(frozen=True)
class ErrorReport:
    type1: float
    type2: float
    total_min: float
    best_threshold: int
    rule: str

    def to_dict(self) -> dict:
        return {
            "type1": self.type1,
            "type2": self.type2,
            "total_min": self.total_min,
            "best_threshold": self.best_threshold,
            "rule": self.rule,
        }


def decision_errors(budget: SignalBudget) -> ErrorReport:
    t1, t2 = error_curves(budget.p0, budget.p1, budget.n)
    total = t1 + t2
    best = int(np.argmin(total))
    k = budget.k_threshold
    return ErrorReport(float(t1[k]), float(t2[k]), float(min(total[best], 1.0)), best, budget.rule)


@dataclass(frozen=True)
class SampleSize:
    """Smallest ``n`` (and a threshold) with max(type1, type2) <= epsilon.

    ``n`` is None when the two distributions coincide or ``n_max`` is
    exceeded; ``reason`` says which.
    """

    n: int | None
    threshold: int | None
    error: float | None
    reason: str

    def to_dict(self) -> dict:
        return {"n": self.n, "threshold": self.threshold, "max_error": self.error, "reason": self.reason}


def required_samples(p0: float, p1: float, epsilon: float = 1e-3, n_max: int = N_MAX) -> SampleSize:
    p0, p1 = _check_p("p0", p0), _check_p("p1", p1)
    if not 0 < epsilon < 0.5 + 1e-15:
        raise ValidationError(f"epsilon must lie in (0, 0.5], got {epsilon!r}")
    if p0 == p1:
        return SampleSize(None, None, None, "impossible: p0 == p1")
    for n in range(1, n_max + 1):
        t1, t2 = error_curves(p0, p1, n)
        worst = np.maximum(t1, t2)
        k = int(np.argmin(worst))
        if worst[k] <= epsilon:
            return SampleSize(n, k, float(worst[k]), "reached")
    return SampleSize(None, None, None, f"not reached within n <= {n_max}")


@dataclass(frozen=True)
class SimReport:
    message: tuple[int, ...]
    decoded: tuple[int, ...]
    error_rate: float
    type1_rate: float | None
    type2_rate: float | None
    seed: int
    rule: str

    def to_dict(self) -> dict:
        return {
            "message": "".join(map(str, self.message)),
            "decoded": "".join(map(str, self.decoded)),
            "error_rate": self.error_rate,
            "type1_rate": self.type1_rate,
            "type2_rate": self.type2_rate,
            "seed": self.seed,
            "rule": self.rule,
        }


def simulate(budget: SignalBudget, message, seed: int) -> SimReport:
    """Send ``message`` (0 = idle, 1 = acted) through the receiver's threshold test.

    Sample ``j`` of bit ``b`` uses stream position ``b * n + j``, so any
    slice of the message can be regenerated on its own.
    """
    bits = np.array([int(b) for b in message], dtype=np.int64)
    if bits.size and not np.isin(bits, (0, 1)).all():
        raise ValidationError("message must consist of 0s and 1s")
    n = budget.n
    u = uniforms(int(seed), 0, bits.size * n).reshape(bits.size, n)
    p = np.where(bits == 1, budget.p1, budget.p0)
    hits = (u < p[:, None]).sum(axis=1)
    decoded = budget.decide(hits).astype(np.int64)
    wrong = decoded != bits
    zeros, ones = bits == 0, bits == 1
    return SimReport(
        message=tuple(int(b) for b in bits),
        decoded=tuple(int(b) for b in decoded),
        error_rate=float(wrong.mean()) if bits.size else 0.0,
        type1_rate=float(wrong[zeros].mean()) if zeros.any() else None,
        type2_rate=float(wrong[ones].mean()) if ones.any() else None,
        seed=int(seed),
        rule=budget.rule,
    )
