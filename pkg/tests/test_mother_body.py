import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stokesgraph.mother_body import (DegenerateDiscriminant, MotherBodyCandidate, QuadraticAlgebraicEq,
                                     Rejection, discriminant_qd, plemelj_density, total_mass,
                                     verify_candidate)
from stokesgraph.quad_diff import Anchor, Trajectory, critical_graph, short_trajectories

BETA_B1 = 2.2063737812513207  # extrapolated normalized eigenvalue at b = 1


def _graph(eq, rotation=1.0):
    disc = discriminant_qd(eq, rotation)
    return disc, critical_graph(disc.qd)


# ---------------------------------------------------------------- equation and discriminant


def test_equation_validation():
    with pytest.raises(ValueError):
        QuadraticAlgebraicEq((0, 1, 1), (1, 0))
    with pytest.raises(ValueError):
        QuadraticAlgebraicEq((1, 1), (1, 0))


@pytest.mark.parametrize("b, beta", [(1.0, BETA_B1), (0.5, -0.3), (-2.0, 4.0)])
def test_spectral_discriminant(b, beta):
    eq = QuadraticAlgebraicEq.from_spectral(b, beta)
    z = np.array([0.3 + 0.1j, -1.2 + 2j, 3.0])
    q = eq.discriminant()
    assert np.allclose(q(z), 4 * ((z * z - b) ** 2 - 2 * z + beta), rtol=1e-13)
    disc = discriminant_qd(eq)
    assert disc.factor == 4.0 and disc.rotation == 1
    assert np.allclose(disc.qd.p.coeffs, [b * b + beta, -2, -2 * b, 0, 1], atol=1e-14)


def test_discriminant_zero_parameters():
    disc = discriminant_qd(QuadraticAlgebraicEq.from_spectral(0.0, 0.0))
    assert np.allclose(disc.qd.p.coeffs, [0, -2, 0, 0, 1])


def test_degenerate_discriminant():
    with pytest.raises(DegenerateDiscriminant):
        discriminant_qd(QuadraticAlgebraicEq((1, 0, 0), (0, 0)))


def test_negative_lead_needs_rotation():
    eq = QuadraticAlgebraicEq((1j, 0, 1), (1, 0))
    with pytest.raises(ValueError, match="rotation"):
        discriminant_qd(eq)
    u = cmath.exp(1j * math.pi / 6)
    disc = discriminant_qd(eq, rotation=u)
    assert abs(disc.factor - 1) < 1e-12
    # -Q(z) dz^2 = -u^2 Q(u w) dw^2 with the monic p in w
    w = 0.7 - 0.4j
    assert abs(disc.factor * disc.qd.p(w) - u * u * eq.discriminant()(u * w)) < 1e-12
    with pytest.raises(ValueError):
        discriminant_qd(eq, rotation=2.0)


def test_decaying_solution_solves_equation():
    eq = QuadraticAlgebraicEq((2, -1j, 0.5), (3, 1 + 1j))
    for z in (5.0, 40j, -300 + 20j):
        c = eq.decaying_solution(z)
        assert abs(c * c + eq.r(z) * c + eq.s(z)) < 1e-10 * abs(eq.r(z) * c)
    assert abs(eq.decaying_solution(1e7)) < 1e-6


# ---------------------------------------------------------------- mass


def test_spectral_mass_is_one():
    rep = total_mass(QuadraticAlgebraicEq.from_spectral(1.0, BETA_B1))
    assert abs(rep.mass - 1) < 1e-8
    assert rep.analytic == 1 and rep.doubled == 2
    assert abs(rep.doubled_ratio - 2) < 1e-8
    assert rep.e_over_a_real


def test_zero_mass():
    rep = total_mass(QuadraticAlgebraicEq((1, 0, 0), (0, 0)))
    assert rep.mass == 0 and rep.doubled_ratio is None


@pytest.mark.parametrize("a, e, real", [(-2, 2, True), (1, 1j, False), (1j, 2j, True)])
def test_e_over_a_reality(a, e, real):
    assert total_mass(QuadraticAlgebraicEq((a, 0, 0), (e, 1))).e_over_a_real is real


def test_mass_matches_closed_form_on_random_equations():
    rng = np.random.default_rng(3)
    for _ in range(100):
        c = rng.normal(size=5) + 1j * rng.normal(size=5)
        eq = QuadraticAlgebraicEq(tuple(c[:3]), tuple(c[3:]))
        rep = total_mass(eq)
        assert abs(rep.mass - (-c[3] / c[0])) < 1e-8 * max(1.0, abs(c[3] / c[0]))
        assert abs(rep.doubled - 2 * rep.analytic) < 1e-15 * max(1.0, abs(rep.analytic))


@settings(max_examples=50, deadline=None)
@given(st.floats(-3, 3), st.floats(-5, 5))
def test_spectral_family_mass(b, beta):
    assert abs(total_mass(QuadraticAlgebraicEq.from_spectral(b, beta)).mass - 1) < 1e-8


def test_mass_report_dict():
    d = total_mass(QuadraticAlgebraicEq.from_spectral(1.0, 0.0)).to_dict()
    assert d["minus_e_over_a"] == [1.0, 0.0] and d["minus_2e_over_a"] == [2.0, 0.0]


# ---------------------------------------------------------------- densities


@pytest.fixture(scope="module")
def zero_case():
    eq = QuadraticAlgebraicEq.from_spectral(0.0, 0.0)
    disc, g = _graph(eq)
    return eq, disc, g


def test_density_zero_parameters(zero_case):
    eq, disc, g = zero_case
    shorts = short_trajectories(g)
    assert len(shorts) == 3
    for s in shorts:
        d = plemelj_density(eq, s.trajectory, disc)
        assert d.max_imag < 1e-8 * np.max(np.abs(d.density))
        assert d.sign != 0
        assert abs(abs(d.mass) - 1 / 3) < 1e-8  # the three arcs are rotations of each other


def test_density_reversal(zero_case):
    eq, disc, g = zero_case
    t = short_trajectories(g)[0].trajectory
    fwd = plemelj_density(eq, t, disc)
    back = plemelj_density(eq, t.reversed(), disc)
    assert np.allclose(back.density[::-1], -fwd.density, rtol=1e-10, atol=1e-14)
    assert abs(back.mass + fwd.mass) < 1e-10


@pytest.mark.parametrize("b, beta", [(1.0, BETA_B1), (1.0, 0.0), (2.0, 1.0), (0.5, 1.0), (-1.0, 0.0)])
def test_density_real_on_every_short(b, beta):
    eq = QuadraticAlgebraicEq.from_spectral(b, beta)
    disc, g = _graph(eq)
    for s in short_trajectories(g):
        d = plemelj_density(eq, s.trajectory, disc)
        assert d.max_imag < 1e-8 * max(1.0, float(np.max(np.abs(d.density))))


def test_density_rejects_non_trajectory(zero_case):
    eq, disc, _ = zero_case
    pts = np.linspace(0.2 + 0.1j, 1.0 + 0.9j, 50)
    fake = Trajectory(pts, np.arange(50.0), Anchor("point"), Anchor("point"), float(abs(pts[-1] - pts[0])))
    with pytest.raises(ValueError, match="not a trajectory"):
        plemelj_density(eq, fake, disc)


# ---------------------------------------------------------------- verification


@pytest.mark.parametrize("b, beta", [(1.0, BETA_B1), (1.0, 0.0), (0.0, 0.0), (2.0, 1.0)])
def test_accepted_candidates(b, beta):
    eq = QuadraticAlgebraicEq.from_spectral(b, beta)
    disc, g = _graph(eq)
    cand = verify_candidate(eq, g, disc)
    assert isinstance(cand, MotherBodyCandidate)
    assert abs(cand.total_mass - 1) < 1e-6
    assert abs(sum(a.mass for a in cand.arcs) - cand.total_mass) < 1e-12
    d = cand.to_dict()
    assert set(d) == {"mass", "e_over_a_real", "arcs", "verdict", "violated"}
    assert d["verdict"] == "accepted" and d["violated"] is None


@pytest.mark.parametrize("eq, reason", [
    (QuadraticAlgebraicEq((1, 0, 0), (1j, 1)), "mass not real"),
    (QuadraticAlgebraicEq.from_spectral(-1.0, 0.0), "support deficit"),
    (QuadraticAlgebraicEq.from_spectral(1.0, 5.0), "support excess"),
])
def test_rejections(eq, reason):
    disc, g = _graph(eq)
    rej = verify_candidate(eq, g, disc)
    assert isinstance(rej, Rejection)
    assert rej.violated == reason and rej.to_dict()["verdict"] == "rejected"


def test_spectral_short_count_bounded():
    for b in (-1.0, 0.0, 1.0, 2.0):
        for beta in (-2.0, 0.0, 1.0, 3.0):
            _, g = _graph(QuadraticAlgebraicEq.from_spectral(b, beta))
            assert len(short_trajectories(g)) <= 3
