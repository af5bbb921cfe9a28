import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stokesgraph.config import Config
from stokesgraph.polynomial import ComplexPolynomial, OrientedPath, period_integral
from stokesgraph.quad_diff import (Corner, GraphError, QuadraticDifferential, conjugation_distance,
                                   critical_graph, crossing_pairs, infinity_directions, local_rays,
                                   short_trajectories, teichmuller_check, teichmuller_from_corners,
                                   trace, trace_ray)

CFG = Config()
GAMMA_POINT = 1 + 2 * cmath.exp(1j * math.pi / 3)


def _zero_index(qd, z):
    return int(np.argmin([abs(w - z) for w in qd.zeros]))


def _pair_set(qd, graph):
    return {frozenset((qd.zeros[i], qd.zeros[j])) for i, j in (s.pair for s in short_trajectories(graph))}


@pytest.fixture(scope="module")
def graphs():
    out = {}
    for a in (2 + 0.2j, -2 + 0.3j, 1j, GAMMA_POINT):
        qd = QuadraticDifferential.from_parameter(a)
        out[a] = (qd, critical_graph(qd))
    return out


# ---------------------------------------------------------------- construction


def test_zeros_reproduce_polynomial():
    qd = QuadraticDifferential.from_parameter(0.4 + 0.7j)
    assert sum(qd.mults) == 4
    for z in qd.zeros:
        assert abs(qd.p(z)) < 1e-12


@pytest.mark.parametrize("a", [0.5, 1.0, -1.0, 2 + 1e-6j])
def test_real_parameter_rejected(a):
    with pytest.raises(ValueError, match="non-real"):
        QuadraticDifferential.from_parameter(a)


def test_non_monic_rejected():
    with pytest.raises(ValueError, match="monic quartic"):
        QuadraticDifferential(ComplexPolynomial([1, 0, 0, 0, 2]))


def test_family_zeros_are_conjugation_symmetric():
    qd = QuadraticDifferential.from_parameter(0.3 + 1.1j)
    assert qd.is_real
    assert set(qd.zeros) == {z.conjugate() for z in qd.zeros}


def test_near_degenerate_rejected():
    qd = QuadraticDifferential.from_roots([-1, 1, 2 + 1j, 2 + 1j + 1e-6])
    with pytest.raises(GraphError, match="near-degenerate"):
        critical_graph(qd)


def test_collided_zeros_merge_to_double():
    qd = QuadraticDifferential.from_roots([-1, 1, 2 + 1j, 2 + 1j + 1e-9])
    assert sorted(qd.mults) == [1, 1, 2]


# ---------------------------------------------------------------- local structure


@pytest.mark.parametrize("k, expected", [(0, math.pi / 6), (2, 5 * math.pi / 6)])
def test_infinity_directions(k, expected):
    assert abs(infinity_directions()[k] - expected) < 1e-15


def test_infinity_direction_spacing():
    assert np.allclose(np.diff(infinity_directions()), math.pi / 3)


def test_local_rays_quartic_at_one():
    qd = QuadraticDifferential(ComplexPolynomial([-1, 0, 0, 0, 1]))
    rays = np.sort(np.mod(local_rays(qd, _zero_index(qd, 1.0)), 2 * math.pi))
    assert np.allclose(rays, [math.pi / 3, math.pi, 5 * math.pi / 3], atol=1e-12)


@pytest.mark.parametrize("a", [2 + 0.2j, 1j, -0.3 + 2j])
def test_simple_zero_ray_spacing(a):
    qd = QuadraticDifferential.from_parameter(a)
    for j in range(4):
        th = local_rays(qd, j)
        gaps = np.diff(np.concatenate((th, [th[0] + 2 * math.pi])))
        assert np.allclose(gaps, 2 * math.pi / 3, atol=1e-12)


def test_local_rays_solve_leading_order_condition():
    qd = QuadraticDifferential.from_parameter(0.7 + 0.4j)
    for j in range(4):
        c = qd.leads[j]
        for th in local_rays(qd, j):
            assert abs((cmath.sqrt(c) * cmath.exp(1.5j * th)).real) < 1e-12


def test_double_zero_has_four_rays():
    qd = QuadraticDifferential.from_roots([-1, -1, 1, 1])
    assert qd.mults == (2, 2)
    for j in range(2):
        th = local_rays(qd, j)
        assert th.size == 4
        assert np.allclose(np.diff(th), math.pi / 2, atol=1e-12)
    graph = critical_graph(qd)
    assert [graph.degree(j) for j in range(2)] == [4, 4]


# ---------------------------------------------------------------- tracing


@pytest.mark.parametrize("direction, target", [(1.0, 1.0), (-1.0, -1.0)])
def test_trace_segment_from_origin(direction, target):
    qd = QuadraticDifferential.from_parameter(1 + 1j)
    t = trace(qd, 0.0, direction)
    assert t.end.kind == "zero"
    assert abs(qd.zeros[t.end.index] - target) < 1e-12


def test_trace_pure_quartic_segment():
    qd = QuadraticDifferential(ComplexPolynomial([-1, 0, 0, 0, 1]))
    t = trace(qd, 0.0, 1.0)
    assert t.end.kind == "zero" and abs(qd.zeros[t.end.index] - 1) < 1e-12
    assert np.max(np.abs(t.points.imag)) < 1e-10


def test_trace_escapes_to_first_direction():
    qd = QuadraticDifferential.from_parameter(1 + 1j)
    u = cmath.exp(1j * math.pi / 6)
    t = trace(qd, 2 * CFG.escape_mult * qd.scale * u, u)
    assert t.end.kind == "infinity" and t.end.index == 0


@pytest.mark.parametrize("a", [2 + 0.2j, 1j, 0.5 + 0.5j])
def test_trajectory_invariants(a):
    qd = QuadraticDifferential.from_parameter(a)
    for j in range(4):
        for th in local_rays(qd, j):
            t = trace_ray(qd, j, float(th))
            assert np.all(np.diff(t.im_progress) > 0)
            zs = np.array(qd.zeros)
            inner = t.points[1:-1]
            inner = inner[np.min(np.abs(inner[:, None] - zs[None, :]), axis=1) > 1e-3]
            if t.end.kind == "infinity":
                inner = inner[np.abs(inner) < 4 * qd.scale]
                pts = np.concatenate((t.points[:1], inner))
            else:
                pts = np.concatenate((t.points[:1], inner, t.points[-1:]))
            if len(pts) < 3:
                continue
            val = period_integral(qd.p, OrientedPath(pts))
            length = float(np.sum(np.abs(np.diff(pts))))
            assert abs(val.real) < 1e-6 * max(1.0, length)


def test_trajectory_reversal_and_conjugation():
    qd = QuadraticDifferential.from_parameter(1 + 1j)
    t = trace(qd, 0.0, 1.0)
    r = t.reversed()
    assert r.start == t.end and r.points[0] == t.points[-1]
    assert np.array_equal(t.conj().points, t.points.conj())


# ---------------------------------------------------------------- graphs


def test_census_omega_one(graphs):
    qd, g = graphs[2 + 0.2j]
    assert g.face_census() == {"half_planes": 6, "strips": 1}
    a = qd.zeros[_zero_index(qd, 2 + 0.2j)]
    assert _pair_set(qd, g) == {frozenset((-1 + 0j, 1 + 0j)), frozenset((a, a.conjugate()))}


def test_census_omega_two(graphs):
    qd, g = graphs[-2 + 0.3j]
    assert g.face_census() == {"half_planes": 6, "strips": 1}
    a = qd.zeros[_zero_index(qd, -2 + 0.3j)]
    assert frozenset((a, a.conjugate())) in _pair_set(qd, g)


def test_census_omega_plus(graphs):
    qd, g = graphs[1j]
    assert g.face_census() == {"half_planes": 6, "strips": 2}
    assert _pair_set(qd, g) == {frozenset((-1 + 0j, 1 + 0j))}


def test_census_on_gamma(graphs):
    qd, g = graphs[GAMMA_POINT]
    assert g.face_census() == {"half_planes": 6, "strips": 0}
    a = qd.zeros[_zero_index(qd, GAMMA_POINT)]
    one = qd.zeros[_zero_index(qd, 1.0)]
    pairs = _pair_set(qd, g)
    assert len(pairs) == 3
    assert frozenset((one, a)) in pairs and frozenset((one, a.conjugate())) in pairs


@pytest.mark.parametrize("a", [2 + 0.2j, -2 + 0.3j, 1j, GAMMA_POINT])
def test_degrees_and_no_crossings(graphs, a):
    qd, g = graphs[a]
    assert all(g.degree(j) == 3 for j in range(4))
    assert crossing_pairs(g) == []


@pytest.mark.parametrize("a", [2 + 0.2j, -2 + 0.3j, 1j, GAMMA_POINT])
def test_conjugation_symmetry(graphs, a):
    assert conjugation_distance(graphs[a][1]) < 1e-6


@pytest.mark.parametrize("a", [2 + 0.2j, -2 + 0.3j, 1j, GAMMA_POINT])
def test_teichmuller_on_every_face(graphs, a):
    qd, g = graphs[a]
    for face in g.faces:
        rep = teichmuller_check(qd, face, g)
        assert rep.holds, (face.label, rep)


@pytest.mark.parametrize("a", [2 + 0.2j, 1j, -0.5 + 0.8j])
def test_minus_one_has_single_ray_to_d2(a):
    qd = QuadraticDifferential.from_parameter(a)
    g = critical_graph(qd)
    jm, jp = _zero_index(qd, -1.0), _zero_index(qd, 1.0)
    ends = {j: [t.end for (jj, _), t in g.traces.items() if jj == j] for j in (jm, jp)}
    assert sum(e.kind == "infinity" and e.index == 2 for e in ends[jm]) == 1
    assert not any(e.kind == "infinity" and e.index == 2 for e in ends[jp])


def test_graph_json_round_trip_fields(graphs):
    qd, g = graphs[1j]
    d = g.to_json()
    assert d["census"] == {"half_planes": 6, "strips": 2}
    assert len(d["zeros"]) == 4 and len(d["infinity_directions"]) == 6
    assert len(d["faces"]) == 8


# ---------------------------------------------------------------- Teichmuller


def test_sector_polygon_holds():
    qd = QuadraticDifferential(ComplexPolynomial([-1, 0, 0, 0, 1]))
    j = _zero_index(qd, 1.0)
    down = trace_ray(qd, j, -math.pi / 3)
    up = trace_ray(qd, j, math.pi / 3)
    assert down.end.index == 5 and up.end.index == 0
    rep = teichmuller_check(qd, [down, up.reversed()])
    assert rep.holds and rep.m == 0 and abs(rep.lhs - 2) < 1e-6


def test_same_direction_polygon_violates():
    # a zero corner of 2 pi / 3 closed at infinity inside one direction
    rep = teichmuller_from_corners([Corner("zero:0", 1, 2 * math.pi / 3), Corner("inf:0-0", -8, 0.0)], 0)
    assert not rep.holds
    assert abs(rep.lhs - 1) < 1e-12 and rep.rhs == 2


def test_open_boundary_rejected():
    qd = QuadraticDifferential.from_parameter(1 + 1j)
    t = trace(qd, 0.0, 1.0)
    with pytest.raises(ValueError, match="boundary not closed"):
        teichmuller_check(qd, [t, trace(qd, 0.5j, 1.0)])


# ---------------------------------------------------------------- variants


def test_four_real_zeros_give_two_segments():
    qd = QuadraticDifferential.from_roots([-2.0, -0.5, 1.0, 3.0])
    g = critical_graph(qd)
    pairs = _pair_set(qd, g)
    assert frozenset((-2 + 0j, -0.5 + 0j)) in pairs and frozenset((1 + 0j, 3 + 0j)) in pairs
    assert conjugation_distance(g) < 1e-6


@pytest.mark.parametrize("a, b", [(1 + 1j, -1 + 2j), (0.5 + 0.3j, 2 + 1j), (1j, 2j)])
def test_conjugate_pairs_have_a_short(a, b):
    qd = QuadraticDifferential.from_roots([a, a.conjugate(), b, b.conjugate()])
    assert len(short_trajectories(critical_graph(qd))) >= 1


@settings(max_examples=12, deadline=None)
@given(st.builds(complex, st.floats(-2.5, 2.5), st.floats(0.1, 2.5)))
def test_random_parameter_structure(a):
    qd = QuadraticDifferential.from_parameter(a)
    g = critical_graph(qd)
    shorts = short_trajectories(g)
    assert len(shorts) <= 3
    assert frozenset((-1 + 0j, 1 + 0j)) in _pair_set(qd, g)
    census = g.face_census()
    assert census["half_planes"] == 6 and census["strips"] in (0, 1, 2)
