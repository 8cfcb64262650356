import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nosignal.disentangler import (
    ENTANGLED,
    DisentanglerTarget,
    LocalCoefficients,
    audit,
    induced_isometry,
    receiver_shift,
    solve,
)
from nosignal.linmaps import BasisMapSpec, extend, local_operator
from nosignal.qcore import PHOTON_PAIR, ValidationError, marginal

R2 = 1 / math.sqrt(2)


def test_solve_examples():
    co = solve(DisentanglerTarget(1, 0))
    assert (co.a, co.b, co.c, co.d) == (pytest.approx(math.sqrt(2)), 0, 0, 0)
    co = solve(DisentanglerTarget(R2, R2))
    assert co.a == pytest.approx(1) and co.d == pytest.approx(1)
    co = solve(DisentanglerTarget(0.6, 0.8))
    assert co.a == pytest.approx(0.6 * math.sqrt(2))
    assert co.d == pytest.approx(0.8 * math.sqrt(2))
    assert co.b == co.c == 0


def test_target_must_be_normalized():
    with pytest.raises(ValidationError):
        DisentanglerTarget(1, 1)


def test_audit_full_collapse():
    v = audit(DisentanglerTarget(1, 0))
    assert v.contradiction
    assert v.unitarity_row1 == pytest.approx(2, abs=1e-15)
    assert v.unitarity_row2 == 0


def test_audit_balanced_with_phase():
    v = audit(DisentanglerTarget(R2 * cmath.exp(0.7j), R2))
    assert not v.contradiction
    assert not v.signalling
    assert v.unitarity_row1 == pytest.approx(1, abs=1e-15)
    assert v.unitarity_row2 == pytest.approx(1, abs=1e-15)


def test_audit_partial():
    v = audit(DisentanglerTarget(0.6, 0.8))
    assert v.contradiction
    assert (v.unitarity_row1, v.unitarity_row2) == (pytest.approx(0.72), pytest.approx(1.28))


def test_narrative_steps_replayable():
    v = audit(DisentanglerTarget(0.6, 0.8j))
    by_claim = {s.claim: s for s in v.narrative}
    # linearity steps all hold; only the unitarity steps fail
    failing = [s.claim for s in v.narrative if not s.holds]
    assert failing == ["|a|^2 + |b|^2 = 1", "|c|^2 + |d|^2 = 1"]
    assert by_claim["|a|^2 = 2|alpha|^2"].lhs == pytest.approx(0.72)
    assert by_claim["<V1V2|out> = d/sqrt2 = beta"].lhs == pytest.approx(0.8j)


def test_receiver_shift_examples():
    r = receiver_shift(DisentanglerTarget(1, 0))
    assert (r.before, r.after) == (pytest.approx(0.5), pytest.approx(1.0))
    assert receiver_shift(DisentanglerTarget(R2, R2)).shift == pytest.approx(0, abs=1e-15)
    r = receiver_shift(DisentanglerTarget(0.6, 0.8))
    assert r.after == pytest.approx(0.36, abs=1e-15)
    assert r.after == pytest.approx(marginal(DisentanglerTarget(0.6, 0.8).state(), 2, "H"), abs=1e-15)


def random_target(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    v /= np.linalg.norm(v)
    return DisentanglerTarget(v[0], v[1])


def test_agrees_with_gram(rng):
    for _ in range(1000):
        t = random_target(rng)
        assert audit(t).contradiction == (not induced_isometry(t))


def test_nonzero_cross_terms_leave_target_form(rng):
    for _ in range(200):
        b, c = rng.normal(size=2) + 1j * rng.normal(size=2)
        co = LocalCoefficients(1, b, c, 1)
        spec = BasisMapSpec(PHOTON_PAIR, PHOTON_PAIR, local_operator(co.operator(), 1))
        out = extend(spec, ENTANGLED)
        assert abs(out.amplitude("V1H2")) == pytest.approx(abs(b) * R2)
        assert abs(out.amplitude("H1V2")) == pytest.approx(abs(c) * R2)
        cross = np.hypot(abs(out.amplitude("V1H2")), abs(out.amplitude("H1V2")))
        assert cross > 0


@settings(max_examples=300, deadline=None)
@given(theta=st.floats(0, math.pi / 2), phi=st.floats(-math.pi, math.pi), chi=st.floats(-math.pi, math.pi))
def test_verdict_depends_only_on_moduli(theta, phi, chi):
    base = DisentanglerTarget(math.cos(theta), math.sin(theta))
    rotated = DisentanglerTarget(math.cos(theta) * cmath.exp(1j * phi), math.sin(theta) * cmath.exp(1j * chi))
    a, b = audit(base), audit(rotated)
    assert a.contradiction == b.contradiction
    assert a.unitarity_row1 == pytest.approx(b.unitarity_row1, abs=1e-14)
