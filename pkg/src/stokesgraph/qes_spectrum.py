"""Polynomial eigenstates of the quasi-exactly-solvable quartic oscillator.

The operator ``T(y) = y'' - 2 tau' y' + 2 (m - 1) z y`` with
``tau = z**3 / 3 - b m**(2/3) z`` maps polynomials of degree ``< m`` into
themselves.  Its eigenvalues ``beta`` and eigenpolynomials ``p`` are found on
the monomial basis; the roots of ``p`` rescaled by ``m**(-1/3)`` give a
root-counting measure whose Cauchy transform ``rho`` satisfies a Riccati
equation exactly.

At a root ``z_j`` of ``p`` the eigen-equation reads
``sum_{k != j} 1 / (z_j - z_k) = z_j**2 - b m**(2/3)`` and the ``z**(m-2)``
coefficient gives ``beta = -2 sum_j z_j``.  Both are used to make the roots
accurate for larger ``m``, where companion-matrix roots of the monomial
coefficients lose all digits.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite import hermroots
from scipy import linalg

from .config import Config, resolve
from .polynomial import ComplexPolynomial, roots

__all__ = [
    "SpectralProblem", "EigenPair", "RootMeasure", "BetaLimit", "SELECT_RULES",
    "operator_matrix", "eigenpairs", "select_state", "rescaled_measure",
    "riccati_residual", "simplified_riccati_residual", "beta_limit_estimate",
    "SpectrumError",
]

SELECT_RULES = ("max-real", "min-real", "max-modulus", "index")


class SpectrumError(RuntimeError):
    pass


@dataclass(frozen=True)
class SpectralProblem:
    """Truncation size ``m >= 1`` and potential parameter ``b``."""

    m: int
    b: float

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError("m must be a positive integer")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "b", float(self.b))

    @property
    def shift(self) -> float:
        """``b m**(2/3)``, the linear coefficient of ``tau'``."""
        return self.b * self.m ** (2.0 / 3.0)

    def energy(self, beta: complex) -> complex:
        """``lambda = beta - b**2 m**(4/3)``."""
        return beta - self.b ** 2 * self.m ** (4.0 / 3.0)


@dataclass(frozen=True)
class EigenPair:
    """Eigenvalue and monomial coefficients (lowest first, top coefficient 1)."""

    beta: complex
    coeffs: np.ndarray

    def polynomial(self) -> ComplexPolynomial:
        return ComplexPolynomial(self.coeffs)


@dataclass(frozen=True)
class RootMeasure:
    """Rescaled roots, each carrying weight ``1/m``."""

    points: np.ndarray
    m: int

    @property
    def weight(self) -> float:
        return 1.0 / self.m

    @property
    def mass(self) -> float:
        return len(self.points) / self.m

    def cauchy(self, z: complex) -> complex:
        """``rho(z) = (1/m) sum 1 / (z - x_j)``."""
        return complex(np.sum(1.0 / (z - self.points)) / self.m)

    def cauchy_derivative(self, z: complex) -> complex:
        return complex(-np.sum(1.0 / (z - self.points) ** 2) / self.m)

    def to_csv(self) -> str:
        lines = ["re,im,m"] + [f"{float(x.real)!r},{float(x.imag)!r},{self.m}" for x in self.points]
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- matrix


def operator_matrix(prob: SpectralProblem) -> np.ndarray:
    """Matrix of ``T`` on ``1, z, ..., z**(m-1)``; column ``k`` is the image of ``z**k``.

    ``T(z**k) = k (k-1) z**(k-2) + 2 B k z**(k-1) + 2 (m-1-k) z**(k+1)``
    with ``B = b m**(2/3)``; the last term vanishes for ``k = m - 1``.
    """
    m, shift = prob.m, prob.shift
    mat = np.zeros((m, m))
    k = np.arange(m)
    mat[k[2:] - 2, k[2:]] = k[2:] * (k[2:] - 1)
    mat[k[1:] - 1, k[1:]] = 2.0 * shift * k[1:]
    mat[k[:-1] + 1, k[:-1]] = 2.0 * (m - 1 - k[:-1])
    return mat


def eigenpairs(prob: SpectralProblem) -> list[EigenPair]:
    """All ``m`` eigenpairs, sorted by descending real part then imaginary part.

    The matrix is balanced before the dense nonsymmetric solve; eigenvectors
    are mapped back and scaled so that the top nonzero coefficient is 1.
    A near-singular eigenvector matrix triggers a Jordan-block warning.
    """
    mat = operator_matrix(prob)
    bal, trans = linalg.matrix_balance(mat)
    vals, vecs = linalg.eig(bal)
    vecs = trans @ vecs
    if prob.m > 1:
        # a defective eigenvalue shows up as a near-repeated value whose
        # computed eigenvectors are nearly parallel
        cols = vecs / np.linalg.norm(vecs, axis=0)
        scale = max(1.0, float(np.max(np.abs(vals))))
        close = np.abs(vals[:, None] - vals[None, :]) < 1e-6 * scale
        par = np.abs(cols.conj().T @ cols) > 1.0 - 1e-8
        np.fill_diagonal(close, False)
        if np.any(close & par):
            warnings.warn("repeated eigenvalue with parallel eigenvectors: possible Jordan block",
                          RuntimeWarning, stacklevel=2)
    order = np.lexsort((-vals.imag, -vals.real))
    out = []
    for i in order:
        v = vecs[:, i]
        nz = np.flatnonzero(np.abs(v) > 1e-300)
        v = v / v[nz[-1]]
        v[nz[-1]] = 1.0  # exact, not 1 - ulp from the complex division
        beta = complex(vals[i])
        if abs(beta.imag) <= 1e-13 * max(1.0, abs(beta)):
            beta = complex(beta.real, 0.0)
        out.append(EigenPair(beta, v.astype(complex)))
    return out


def select_state(pairs: list[EigenPair], rule: str = "max-real", index: int | None = None) -> EigenPair:
    """Pick one eigenpair by ``rule`` (one of :data:`SELECT_RULES`)."""
    if not pairs:
        raise ValueError("no eigenpairs to select from")
    betas = np.array([p.beta for p in pairs])
    if rule == "max-real":
        i = int(np.argmax(betas.real))
    elif rule == "min-real":
        i = int(np.argmin(betas.real))
    elif rule == "max-modulus":
        i = int(np.argmax(np.abs(betas)))
    elif rule == "index":
        if index is None or not 0 <= index < len(pairs):
            raise IndexError(f"state index {index} out of range for {len(pairs)} states")
        i = index
    else:
        raise ValueError(f"unknown selection rule {rule!r}")
    return pairs[i]


# ---------------------------------------------------------------- roots


def _bethe(x: np.ndarray, m: int, b: float):
    """Residual and Jacobian of the rescaled root equations."""
    n = len(x)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    inv = 1.0 / diff
    np.fill_diagonal(inv, 0.0)
    res = inv.sum(axis=1) / m - (x * x - b)
    jac = inv ** 2 / m
    jac[np.diag_indices(n)] = -(inv ** 2).sum(axis=1) / m - 2.0 * x
    return res, jac


def _newton(x: np.ndarray, m: int, b: float, maxit: int, damped: bool):
    res, jac = _bethe(x, m, b)
    for _ in range(maxit):
        try:
            dx = np.linalg.solve(jac, -res)
        except np.linalg.LinAlgError:
            return x, False
        lam = 1.0
        while True:
            xn = x + lam * dx
            rn, jn = _bethe(xn, m, b)
            if not damped or np.linalg.norm(rn) < (1 - 1e-4 * lam) * np.linalg.norm(res) or lam < 1e-8:
                break
            lam *= 0.5
        x, res, jac = xn, rn, jn
        if np.max(np.abs(lam * dx)) < 1e-14 * max(1.0, np.max(np.abs(x))):
            return x, True
    return x, False


def _continuation(m: int, b: float, npos: int) -> np.ndarray | None:
    """Roots at ``b`` continued from a well-separated configuration at large ``b``.

    For large ``b`` the roots sit near ``+-sqrt(b)`` in Hermite-like clusters;
    ``npos`` of them start at ``+sqrt(b)``.  ``b`` is then moved linearly to
    the target with step control on Newton convergence.
    """
    n = m - 1
    b0 = max(4.0, 4.0 * abs(b)) * max(1, n) ** (2.0 / 3.0)
    width = math.sqrt(1.0 / (2.0 * m * math.sqrt(b0)))
    hp = hermroots([0] * npos + [1]) if npos > 0 else np.array([])
    hn = hermroots([0] * (n - npos) + [1]) if n - npos > 0 else np.array([])
    x = np.concatenate([math.sqrt(b0) + width * hp, -math.sqrt(b0) + 1j * width * hn]).astype(complex)
    x, ok = _newton(x, m, b0, 50, damped=True)
    if not ok:
        return None
    t, dt = 0.0, 0.05
    while t < 1.0:
        tn = min(1.0, t + dt)
        xn, ok = _newton(x, m, b0 + (b - b0) * tn, 8, damped=False)
        sep = np.min(np.abs(x[:, None] - x[None, :]) + 9.0 * np.eye(len(x))) if len(x) > 1 else 1.0
        if ok and np.max(np.abs(xn - x)) < 0.2 * sep:
            x, t = xn, tn
            dt = min(1.5 * dt, 0.2)
        else:
            dt *= 0.5
            if dt < 1e-8:
                return None
    return x


def _beta_of(x: np.ndarray, m: int) -> complex:
    return complex(-2.0 * m ** (1.0 / 3.0) * np.sum(x))


def _matches(x, prob, pair) -> bool:
    if x is None or not np.all(np.isfinite(x)):
        return False
    res, _ = _bethe(x, prob.m, prob.b)
    scale = 1.0 + np.max(np.abs(x)) ** 2
    return (abs(_beta_of(x, prob.m) - pair.beta) <= 1e-9 * (1.0 + abs(pair.beta))
            and np.max(np.abs(res)) <= 1e-10 * scale)


def rescaled_measure(prob: SpectralProblem, pair: EigenPair, cfg: Config | None = None) -> RootMeasure:
    """Roots of the eigenpolynomial divided by ``m**(1/3)``.

    Companion roots are polished by Newton's method on the root equations.
    If the polished set does not reproduce ``beta`` (companion roots of the
    monomial coefficients are unreliable beyond ``m`` of about 10), the roots
    are obtained by continuation in ``b`` instead, trying each starting
    cluster split until ``beta`` is reproduced.
    """
    cfg = resolve(cfg)
    m = prob.m
    poly = pair.polynomial()
    if poly.degree == 0:
        return RootMeasure(np.zeros(0, dtype=complex), m)
    if poly.degree != m - 1:
        raise SpectrumError("eigenpolynomial degree below m - 1")
    x0 = np.asarray(roots(poly, cfg), dtype=complex) / m ** (1.0 / 3.0)
    x, _ = _newton(x0, m, prob.b, 60, damped=True)
    if _matches(x, prob, pair):
        return RootMeasure(x, m)
    # start with the split that yields the top state for b > 0
    order = range(m) if pair.beta.real >= 0 else range(m - 1, -1, -1)
    for npos in order:
        x = _continuation(m, prob.b, npos)
        if _matches(x, prob, pair):
            return RootMeasure(x, m)
    raise SpectrumError(f"root finding failed for m={m}, b={prob.b}, beta={pair.beta}")


# ---------------------------------------------------------------- Riccati


def _check_pole(z: complex, measure: RootMeasure, cfg: Config) -> None:
    if len(measure.points):
        d = np.min(np.abs(z - measure.points))
        if d <= cfg.clearance_rel * (1.0 + np.max(np.abs(measure.points))):
            raise ValueError(f"pole proximity: z is {d:.3g} from a rescaled root")


def riccati_residual(prob: SpectralProblem, pair: EigenPair, z: complex,
                     measure: RootMeasure | None = None, cfg: Config | None = None) -> complex:
    """``rho**2 + rho'/m - 2 (z**2 - b) rho + 2 (m-1) z / m - beta / m**(4/3)``.

    This vanishes identically; ``rho'`` is taken from the root representation.
    """
    cfg = resolve(cfg)
    measure = measure if measure is not None else rescaled_measure(prob, pair, cfg)
    z = complex(z)
    _check_pole(z, measure, cfg)
    m, b = prob.m, prob.b
    rho, drho = measure.cauchy(z), measure.cauchy_derivative(z)
    return (rho * rho + drho / m - 2.0 * (z * z - b) * rho
            + 2.0 * (m - 1) * z / m - pair.beta / m ** (4.0 / 3.0))


def simplified_riccati_residual(prob: SpectralProblem, pair: EigenPair, z: complex,
                                measure: RootMeasure | None = None, cfg: Config | None = None) -> complex:
    """The residual with ``2 z`` in place of ``2 (m-1) z / m``; of size ``2 |z| / m``."""
    exact = riccati_residual(prob, pair, z, measure, cfg)
    return exact + 2.0 * complex(z) / prob.m


# ---------------------------------------------------------------- limit


@dataclass(frozen=True)
class BetaLimit:
    """Normalized eigenvalues ``beta_m / m**(4/3)`` and their diagnostics."""

    ms: tuple
    normalized: tuple
    differences: tuple
    extrapolated: complex | None

    def to_dict(self) -> dict:
        c = lambda v: [v.real, v.imag]
        return {
            "m": list(self.ms),
            "normalized": [c(v) for v in self.normalized],
            "differences": [abs(d) for d in self.differences],
            "extrapolated": None if self.extrapolated is None else c(self.extrapolated),
        }


def beta_limit_estimate(b: float, ms, rule: str = "max-real", index: int | None = None) -> BetaLimit:
    """``beta_m / m**(4/3)`` for the selected state at each ``m``.

    With two or more sizes the limit is extrapolated from the last two
    assuming an error proportional to ``1/m``.
    """
    ms = tuple(int(m) for m in ms)
    if any(m2 <= m1 for m1, m2 in zip(ms, ms[1:])):
        raise ValueError("m list must be strictly increasing")
    vals = []
    for m in ms:
        prob = SpectralProblem(m, b)
        pair = select_state(eigenpairs(prob), rule, index)
        vals.append(pair.beta / m ** (4.0 / 3.0))
    diffs = tuple(v2 - v1 for v1, v2 in zip(vals, vals[1:]))
    extra = None
    if len(ms) >= 2:
        m1, m2 = ms[-2], ms[-1]
        extra = (m2 * vals[-1] - m1 * vals[-2]) / (m2 - m1)
    return BetaLimit(ms, tuple(vals), diffs, extra)
