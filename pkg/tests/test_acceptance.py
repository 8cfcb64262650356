"""Exit criteria, each at its stated tolerance."""
import math
import time

import numpy as np

from nosignal import disentangler as dis
from nosignal import entangler as ent
from nosignal import sigstat, tunnel
from nosignal.linmaps import BasisMapSpec, extend, local_factor, local_operator
from nosignal.qcore import PHOTON_PAIR, StateVector, marginal, random_state, random_unitary, schmidt

R2 = 1 / math.sqrt(2)
HH = StateVector.basis(PHOTON_PAIR, "H1H2")


def targets(rng, count):
    out = []
    while len(out) < count:
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        v /= np.linalg.norm(v)
        out.append(dis.DisentanglerTarget(v[0], v[1]))
    return out


def test_ac1_disentangler_contradiction(criterion):
    rng = np.random.default_rng(1)
    pool = [t for t in targets(rng, 1100) if abs(abs(t.alpha) - R2) > 1e-6][:1000]
    balanced = [
        dis.DisentanglerTarget(R2 * np.exp(1j * a), R2 * np.exp(1j * b))
        for a, b in rng.uniform(-math.pi, math.pi, size=(100, 2))
    ]
    start = time.perf_counter()
    verdicts = [dis.audit(t) for t in pool]
    calm = [dis.audit(t) for t in balanced]
    elapsed = time.perf_counter() - start
    ok_contra = all(v.contradiction for v in verdicts)
    worst = max(abs(v.unitarity_row1 - 2 * abs(t.alpha) ** 2) for v, t in zip(verdicts, pool))
    ok_calm = not any(v.contradiction for v in calm)
    ok = len(pool) == 1000 and ok_contra and worst <= 1e-12 and ok_calm and elapsed < 1.0
    criterion("AC1", f"1000 contradictions, row1 err {worst:.1e} <= 1e-12, 100 balanced clean, {elapsed:.2f}s < 1s", ok)
    assert ok


def test_ac2_receiver_shift(criterion):
    rng = np.random.default_rng(2)
    worst = 0.0
    for t in targets(rng, 1000):
        explicit = StateVector.from_terms(PHOTON_PAIR, {"H1H2": t.alpha, "V1V2": t.beta})
        worst = max(worst, abs(dis.receiver_shift(t).after - marginal(explicit, 2, "H")))
    ok = worst <= 1e-12
    criterion("AC2", f"receiver shift vs explicit marginal, max err {worst:.1e} <= 1e-12", ok)
    assert ok


def test_ac3_entangler_readings(criterion):
    audits = {p.label: ent.audit(p) for p in ent.readings(1j)}
    same = [audits["++"], audits["--"]]
    opposite = [audits["+-"], audits["-+"]]
    ok_same = all(
        abs(abs(a.gram.gram[0, 1]) - 1) <= 1e-12
        and not a.gram.is_isometry
        and a.witness is not None
        and abs(a.witness.image_norm_sq - 2) <= 1e-10
        and a.witness.input.is_normalized()
        for a in same
    )
    ok_opp = all(np.max(np.abs(a.gram.gram - np.eye(2))) < 1e-12 for a in opposite)
    ok_single = all(a.single_input_passes and abs(a.single_input_norm - 1) <= 1e-12 for a in audits.values())
    ok = ok_same and ok_opp and ok_single
    criterion(
        "AC3",
        f"same-sign |G01|=1 & witness norm^2=2: {ok_same}; opposite-sign G=I: {ok_opp}; "
        f"single-input check passes for all four: {ok_single}",
        ok,
    )
    assert ok


def test_ac4_entangler_demo(criterion):
    rep = ent.demo(HH, ent.EntanglerParams.from_signs("++"))
    ok = (
        abs(rep.marginal_before - 1) <= 1e-12
        and abs(rep.marginal_after - 0.5) <= 1e-12
        and rep.schmidt_before == 1
        and rep.schmidt_after == 2
    )
    criterion("AC4", f"P(H2) {rep.marginal_before!r} -> {rep.marginal_after!r}, rank {rep.schmidt_before} -> {rep.schmidt_after}", ok)
    assert ok


def test_ac5_no_signalling(criterion):
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(1000):
        spec = BasisMapSpec(PHOTON_PAIR, PHOTON_PAIR, local_operator(random_unitary(2, rng), 1))
        s = random_state(PHOTON_PAIR, rng)
        out = extend(spec, s).as_physical()
        for y in ("H", "V"):
            worst = max(worst, abs(marginal(out, 2, y) - marginal(s, 2, y)))
    ok_local = worst < 1e-10
    ok_ent = True
    for p in ent.readings(1j):
        m = ent.full_matrix(p)
        out = StateVector(PHOTON_PAIR, m @ HH.amplitudes)
        shift = marginal(HH, 2, "H") - marginal(out, 2, "H")
        fac = local_factor(m, acted=1)
        ok_ent &= abs(shift - 0.5) <= 1e-12 and not fac.factorable and fac.residual > 0.1
    ok = ok_local and ok_ent
    criterion("AC5", f"local unitaries: max marginal change {worst:.1e} < 1e-10; entangler shifts 0.5 and is non-local: {ok_ent}", ok)
    assert ok


def test_ac6_tunnelling(criterion):
    gamma = 1.3
    cfg = tunnel.TunnelConfig(gamma, tunnel.parse_schedule("open"))
    period = math.pi / gamma
    worst_rk = worst_cf = 0.0
    for t in np.linspace(0, period, 13):
        num = tunnel.occupations(tunnel.integrate(cfg, tunnel.IN_X1, float(t)))[1]
        closed = tunnel.occupations(tunnel.evolve(cfg, tunnel.IN_X1, float(t)))[1]
        exact = math.sin(gamma * t) ** 2
        worst_rk = max(worst_rk, abs(num - exact))
        worst_cf = max(worst_cf, abs(closed - exact))
    balance = tunnel.time_to_balance(cfg)
    ok_bal = abs(balance - math.pi / (4 * gamma)) <= 1e-9
    blocked = tunnel.TunnelConfig(gamma, tunnel.parse_schedule("open:0..0.4,blocked:0.4..3,open:3.."))
    frozen = {tunnel.occupations(tunnel.evolve(blocked, tunnel.IN_X1, t)) for t in np.linspace(0.4, 3, 40)}
    ok_frozen = len(frozen) == 1
    spin0 = tunnel.spin_map("+1-2")
    p_before = marginal(spin0.to_spin_state(), 2, "-")
    p_after = marginal(tunnel.evolve(cfg, spin0, balance).to_spin_state(), 2, "-")
    ok_spin = p_before == 1 and abs(p_after - 0.5) <= 1e-9
    ok = worst_rk <= 1e-9 and worst_cf <= 1e-9 and ok_bal and ok_frozen and ok_spin
    criterion(
        "AC6",
        f"RK4 vs sin^2 {worst_rk:.1e}, closed form {worst_cf:.1e} (<= 1e-9); balance at pi/4g: {ok_bal}; "
        f"blocked frozen: {ok_frozen}; spin P(-) {p_before} -> {p_after:.12f}",
        ok,
    )
    assert ok


def test_ac7_signal_statistics(criterion):
    start = time.perf_counter()
    t2 = sigstat.decision_errors(sigstat.SignalBudget(1.0, 0.5, 1, 0)).type2
    need = sigstat.required_samples(1.0, 0.5, 1e-3).n
    budget = sigstat.SignalBudget(1.0, 0.5, 3, 2)
    analytic = sigstat.decision_errors(budget).type2
    trials = 100_000
    sim = sigstat.simulate(budget, [1] * trials, 777)
    sigma = math.sqrt(analytic * (1 - analytic) / trials)
    elapsed = time.perf_counter() - start
    ok_mc = abs(sim.type2_rate - analytic) <= 3 * sigma
    ok = t2 == 0.5 and need == 10 and ok_mc and elapsed < 5.0
    criterion(
        "AC7",
        f"n=1 type2 = {t2!r}; required n = {need}; MC type2 {sim.type2_rate:.5f} vs {analytic:.5f} "
        f"(3 sigma = {3 * sigma:.5f}); {elapsed:.2f}s < 5s",
        ok,
    )
    assert ok


def test_ac8_cross_module_soundness(criterion):
    rng = np.random.default_rng(8)
    pool = targets(rng, 900) + [
        dis.DisentanglerTarget(R2 * np.exp(1j * a), R2) for a in rng.uniform(-3, 3, size=100)
    ]
    disagree = sum(dis.audit(t).contradiction != (not dis.induced_isometry(t)) for t in pool)
    both = {dis.audit(t).contradiction for t in pool}
    ok = disagree == 0 and both == {True, False}
    criterion("AC8", f"{len(pool)} targets, {disagree} disagreements between audit and Gram", ok)
    assert ok
