"""From eigenpolynomials to the limit quadratic differential.

For each ``m`` the selected eigenstate gives a rescaled root cloud and a
normalized eigenvalue ``beta_m / m**(4/3)``.  The extrapolated eigenvalue
defines the limit equation ``C**2 - 2 (z**2 - b) C + 2 z - beta = 0``; the
short trajectories of its discriminant differential are the candidate
support, and the distance of each root cloud to that support is the
convergence diagnostic.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import Config, resolve
from .mother_body import (DiscriminantQD, MotherBodyCandidate, QuadraticAlgebraicEq, Rejection,
                          discriminant_qd, verify_candidate)
from .qes_spectrum import (BetaLimit, RootMeasure, SpectralProblem, beta_limit_estimate, eigenpairs,
                           rescaled_measure, select_state)
from .quad_diff import CriticalGraph, _dist_to_polyline, critical_graph, short_trajectories

__all__ = ["PipelineRow", "PipelineResult", "run_pipeline", "support_distances"]


@dataclass(frozen=True)
class PipelineRow:
    m: int
    beta: complex
    normalized: complex
    root_mass: float  # (m - 1) / m
    mean_distance: float
    max_distance: float
    decreasing: bool | None  # mean distance below the previous row's; None for the first row


@dataclass
class PipelineResult:
    b: float
    rule: str
    rows: list
    limit: BetaLimit
    beta_limit: complex
    equation: QuadraticAlgebraicEq
    discriminant: DiscriminantQD
    graph: CriticalGraph
    candidate: MotherBodyCandidate | Rejection
    measures: dict

    @property
    def monotone(self) -> bool | None:
        flags = [r.decreasing for r in self.rows[1:]]
        return all(flags) if flags else None

    def to_dict(self) -> dict:
        census = self.graph.face_census()
        shorts = short_trajectories(self.graph)
        zs = self.graph.qd.zeros
        return {
            "b": self.b,
            "rule": self.rule,
            "rows": [
                {"m": r.m, "beta": r.beta, "normalized": r.normalized, "root_mass": r.root_mass,
                 "mean_distance": r.mean_distance, "max_distance": r.max_distance,
                 "decreasing": r.decreasing}
                for r in self.rows
            ],
            "beta_limit": self.beta_limit,
            "limit": self.limit.to_dict(),
            "discriminant_zeros": list(zs),
            "face_census": census,
            "short_trajectory_pairs": [[zs[s.pair[0]], zs[s.pair[1]]] for s in shorts],
            "mother_body": self.candidate.to_dict(),
            "mass_consistency": {"root_mass_last": self.rows[-1].root_mass,
                                 "candidate_mass": self.candidate.total_mass},
            "monotone_decreasing": self.monotone,
        }


def support_distances(points: np.ndarray, graph: CriticalGraph) -> tuple[float, float]:
    """Mean and maximum distance from ``points`` to the union of short trajectories."""
    polys = [s.trajectory.points for s in short_trajectories(graph)]
    if not polys or len(points) == 0:
        return float("nan"), float("nan")
    d = np.array([min(_dist_to_polyline(complex(z), P) for P in polys) for z in points])
    return float(d.mean()), float(d.max())


def run_pipeline(b: float, ms, rule: str = "max-real", index: int | None = None,
                 cfg: Config | None = None) -> PipelineResult:
    """Root clouds, eigenvalue limit, limit differential and distance trend.

    With a single ``m`` the limit is replaced by that ``m``'s normalized eigenvalue.
    """
    cfg = resolve(cfg)
    ms = tuple(int(m) for m in ms)
    limit = beta_limit_estimate(b, ms, rule, index)
    beta = limit.extrapolated if limit.extrapolated is not None else limit.normalized[-1]
    if abs(beta.imag) <= 1e-12 * max(1.0, abs(beta)):
        beta = complex(beta.real, 0.0)
    eq = QuadraticAlgebraicEq.from_spectral(b, beta)
    disc = discriminant_qd(eq, cfg=cfg)
    graph = critical_graph(disc.qd, cfg)
    cand = verify_candidate(eq, graph, disc, cfg)
    rows, measures = [], {}
    prev = None
    for m, norm in zip(ms, limit.normalized):
        prob = SpectralProblem(m, b)
        pair = select_state(eigenpairs(prob), rule, index)
        meas: RootMeasure = rescaled_measure(prob, pair, cfg)
        measures[m] = meas
        mean, mx = support_distances(meas.points, graph)
        dec = None if prev is None else bool(mean < prev)
        rows.append(PipelineRow(m, pair.beta, norm, meas.mass, mean, mx, dec))
        prev = mean
    return PipelineResult(float(b), rule, rows, limit, beta, eq, disc, graph, cand, measures)
