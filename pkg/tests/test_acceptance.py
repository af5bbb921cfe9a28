"""Acceptance criteria 1-9, one test each, with a printed PASS/FAIL line per criterion."""
import cmath
import math
import time

import numpy as np
import pytest

from stokesgraph.gamma_curve import asymptote_function, classify_region, gamma_value, solve_asymptote_angle
from stokesgraph.mother_body import QuadraticAlgebraicEq, total_mass
from stokesgraph.pipeline import run_pipeline
from stokesgraph.polynomial import ComplexPolynomial, OrientedPath, period_integral
from stokesgraph.qes_spectrum import (SpectralProblem, eigenpairs, rescaled_measure, riccati_residual,
                                      select_state)
from stokesgraph.quad_diff import (QuadraticDifferential, conjugation_distance, critical_graph,
                                   short_trajectories, teichmuller_check)

GAMMA_POINT = 1 + 2 * cmath.exp(1j * math.pi / 3)
CENSUS_CASES = {"O1": 2 + 0.2j, "O2": -2 + 0.3j, "O+": 1j, "G1+": GAMMA_POINT}


def _report(capsys, n: int, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\nCRITERION {n}: {'PASS' if ok else 'FAIL'} | {detail}")


def _pairs(qd, graph):
    return {frozenset((qd.zeros[i], qd.zeros[j])) for i, j in (s.pair for s in short_trajectories(graph))}


def _nearest(qd, z):
    return qd.zeros[int(np.argmin([abs(w - z) for w in qd.zeros]))]


@pytest.fixture(scope="module")
def census_graphs():
    t0 = time.perf_counter()
    out = {}
    for label, a in CENSUS_CASES.items():
        qd = QuadraticDifferential.from_parameter(a)
        out[label] = (qd, critical_graph(qd))
    return out, time.perf_counter() - t0


def test_criterion_1_asymptote_angle(capsys):
    t0 = time.perf_counter()
    x = solve_asymptote_angle()
    dt = time.perf_counter() - t0
    res = abs(float(asymptote_function(x)))
    ok = abs(x - 0.898) < 5e-3 and res < 1e-12 and dt < 0.1
    _report(capsys, 1, ok, f"x*={x:.12f} |x*-0.898|={abs(x - 0.898):.2e} |f(x*)|={res:.1e} time={dt:.3f}s")
    assert ok


def test_criterion_2_gamma_membership(capsys):
    t0 = time.perf_counter()
    v_point = abs(gamma_value(GAMMA_POINT))
    v_seg = max(abs(gamma_value(complex(t, 0.0))) for t in (0.0, 0.5, -0.5))
    dt = time.perf_counter() - t0
    ok = v_point < 1e-8 and v_seg < 1e-10 and dt < 1.0
    _report(capsys, 2, ok, f"|G(1+2e^(i pi/3))|={v_point:.1e} max segment={v_seg:.1e} time={dt:.3f}s")
    assert ok


def test_criterion_3_imaginary_periods(capsys):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst_seg = worst_pair = 0.0
    for _ in range(100):
        a = complex(rng.uniform(-3, 3), rng.uniform(0.05, 3))
        p = ComplexPolynomial.quartic_family(a)
        worst_seg = max(worst_seg, abs(period_integral(p, OrientedPath.segment(-1, 1)).real))
        # conjugation-symmetric path crossing the real axis away from [-1, 1]
        x = a.real if abs(a.real) > 1 else math.copysign(1.5 + abs(a.real), a.real or 1.0)
        path = OrientedPath([a.conjugate(), complex(x, 0.0), a])
        worst_pair = max(worst_pair, abs(period_integral(p, path).real))
    dt = time.perf_counter() - t0
    ok = worst_seg < 1e-10 and worst_pair < 1e-10 and dt < 10
    _report(capsys, 3, ok, f"max|Re int_-1^1|={worst_seg:.1e} max|Re int_conj(a)^a|={worst_pair:.1e} "
                           f"time={dt:.2f}s")
    assert ok


def test_criterion_4_census(capsys, census_graphs):
    graphs, dt = census_graphs
    seg = frozenset((-1 + 0j, 1 + 0j))
    details, ok = [], dt < 30
    for label, (qd, g) in graphs.items():
        a = _nearest(qd, CENSUS_CASES[label])
        one = _nearest(qd, 1.0)
        pairs = _pairs(qd, g)
        census = g.face_census()
        conj_short = frozenset((a, a.conjugate())) in pairs
        if label in ("O1", "O2"):
            good = census == {"half_planes": 6, "strips": 1} and seg in pairs and conj_short
        elif label == "O+":
            good = census == {"half_planes": 6, "strips": 2} and seg in pairs and not conj_short
        else:
            # on the curve: +1 is joined to a and to conj(a), plus the segment
            good = (census == {"half_planes": 6, "strips": 0} and len(pairs) == 3 and seg in pairs
                    and frozenset((one, a)) in pairs and frozenset((one, a.conjugate())) in pairs)
        ok &= good
        details.append(f"{label}:{census['half_planes']}+{census['strips']},{len(pairs)} shorts")
    _report(capsys, 4, ok, "; ".join(details) + f"; time={dt:.2f}s")
    assert ok


def test_criterion_5_teichmuller(capsys, census_graphs):
    graphs, _ = census_graphs
    n_faces, bad = 0, []
    for label, (qd, g) in graphs.items():
        for face in g.faces:
            rep = teichmuller_check(qd, face, g)
            n_faces += 1
            if not rep.holds:
                bad.append((label, face.label, rep.lhs, rep.rhs))
    ok = not bad and n_faces > 0
    _report(capsys, 5, ok, f"{n_faces} faces checked, {len(bad)} violations {bad[:3]}")
    assert ok


def test_criterion_6_qes_exactness(capsys):
    t0 = time.perf_counter()
    c43 = 2 ** (4 / 3)
    b2 = sorted(p.beta.real for p in eigenpairs(SpectralProblem(2, 1.0)))
    err2 = max(abs(b2[0] + c43), abs(b2[1] - c43))
    err1 = abs(eigenpairs(SpectralProblem(1, 1.0))[0].beta)
    s = 3 ** (2 / 3)
    oracle = np.sort_complex(np.roots([1, 0, -16 * s, -16]))
    err3 = float(np.max(np.abs(np.sort_complex(np.array([p.beta for p in eigenpairs(SpectralProblem(3, 1.0))]))
                                - oracle)))
    rng = np.random.default_rng(6)
    worst = 0.0
    for b in (0.5, 1.0, 2.0):
        for m in range(1, 41):
            prob = SpectralProblem(m, b)
            pair = select_state(eigenpairs(prob))
            meas = rescaled_measure(prob, pair)
            zs = rng.uniform(-2.5, 2.5, 50) + 1j * rng.uniform(-2.5, 2.5, 50)
            worst = max(worst, max(abs(riccati_residual(prob, pair, z, meas)) for z in zs))
    dt = time.perf_counter() - t0
    ok = err1 == 0 and err2 < 1e-12 and err3 < 1e-12 and worst < 1e-8 and dt < 60
    _report(capsys, 6, ok, f"m=1 err={err1:.1e} m=2 err={err2:.1e} m=3 err={err3:.1e} "
                           f"max Riccati residual (m<=40, 50 pts)={worst:.1e} time={dt:.1f}s")
    assert ok


def test_criterion_7_mass(capsys):
    worst, ratios = 0.0, []
    for b in (-1.0, 0.0, 0.5, 1.0, 2.0):
        for beta in (-1.0, 0.0, 2.2063737812513207, 4.0):
            rep = total_mass(QuadraticAlgebraicEq.from_spectral(b, beta))
            worst = max(worst, abs(rep.mass - 1), abs(rep.mass - rep.analytic))
            ratios.append(rep.doubled_ratio)
    ok = worst < 1e-8 and all(abs(r - 2) < 1e-8 for r in ratios)
    _report(capsys, 7, ok, f"max|mass-1|={worst:.1e}; -2e/a over mass = {ratios[0]:.12f} (all {len(ratios)} cases)")
    assert ok


def test_criterion_8_weak_convergence(capsys):
    t0 = time.perf_counter()
    res = run_pipeline(1.0, [8, 16, 32])
    dt = time.perf_counter() - t0
    d = [r.mean_distance for r in res.rows]
    ok = d[0] > d[1] > d[2] and dt < 120
    _report(capsys, 8, ok, "mean distances " + ", ".join(f"{v:.5f}" for v in d)
            + f"; beta limit {res.beta_limit.real:.10f}; time={dt:.1f}s")
    assert ok


def test_criterion_9_structure(capsys):
    t0 = time.perf_counter()
    xs = np.linspace(-3, 3, 20)
    ys = np.linspace(0.1, 3, 20)
    max_shorts, max_asym, disagree = 0, 0.0, []
    for x in xs:
        for y in ys:
            a = complex(x, y)
            qd = QuadraticDifferential.from_parameter(a)
            g = critical_graph(qd)
            max_shorts = max(max_shorts, len(short_trajectories(g)))
            max_asym = max(max_asym, conjugation_distance(g))
            region = classify_region(a).kind
            strips = g.face_census()["strips"]
            if (region in ("O1", "O2") and strips != 1) or (region == "O+" and strips != 2):
                disagree.append(a)
    qd4 = QuadraticDifferential.from_roots([-2.0, -0.5, 1.0, 3.0])
    pairs4 = _pairs(qd4, critical_graph(qd4))
    real_ok = frozenset((-2 + 0j, -0.5 + 0j)) in pairs4 and frozenset((1 + 0j, 3 + 0j)) in pairs4
    conj_counts = []
    for u, v in ((1 + 1j, -1 + 2j), (0.5 + 0.3j, 2 + 1j), (1j, 2j), (-2 + 0.5j, 0.3 + 1.7j)):
        qd = QuadraticDifferential.from_roots([u, u.conjugate(), v, v.conjugate()])
        conj_counts.append(len(short_trajectories(critical_graph(qd))))
    dt = time.perf_counter() - t0
    ok = max_shorts <= 3 and max_asym < 1e-6 and real_ok and min(conj_counts) >= 1
    _report(capsys, 9, ok, f"grid 20x20: max shorts={max_shorts}, max conjugation distance={max_asym:.1e}, "
                           f"region/census disagreements={len(disagree)}; four real zeros segments={real_ok}; "
                           f"conjugate-pair short counts={conj_counts}; time={dt:.1f}s")
    assert ok
    assert not disagree
