"""Path simulation, covariance validation, and the Laplace transform of
the squared L2 norm.

Two samplers produce the process on a uniform grid.  The direct sampler
follows the definition Y_t = B_t - g(t) * int_0^1 g'(u) dB(u): Wiener
increments, a cumulative sum, and a midpoint-rule discretization of the
stochastic integral.  The KL sampler sums sqrt(lambda_k) xi_k e_k(t) over
a computed spectrum.  Agreement of their empirical covariances with
R(s,t) = min(s,t) - g(s)g(t), and of the Monte Carlo average of
exp(-c int Y^2) with the eigenvalue product (1 + 2 c lambda_k)^{-1/2},
closes the loop between the analytic spectrum and the process itself.

Randomness is counter-based for reproducibility: path i of a run seeded
with s draws from Philox keyed by (s, i), uniforms are built from the top
53 bits of each 64-bit draw, and normals come from the inverse normal CDF,
so output files are byte-identical across runs and platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Philox
from scipy.special import ndtri

from .charconst import build_rule
from .errors import EmptySpectrum, InsufficientPaths, NegativeC, ValidationError
from .generator import GeneratorFunction
from .spectrum import PI, Spectrum

DEFAULT_GRID_N = 256
DEFAULT_N_PATHS = 100_000
TAIL_TERMS = 10_000
_MASK64 = (1 << 64) - 1
_INV53 = 1.0 / (1 << 53)


@dataclass(frozen=True)
class SamplePath:
    grid: np.ndarray
    values: np.ndarray
    seed: int
    method: str          # 'KL' | 'Direct'


def _path_normals(seed: int, index: int, count: int) -> np.ndarray:
    """count standard normals for path `index` of a run seeded `seed`;
    an independent Philox stream per (seed, index) pair."""
    bits = Philox(key=np.array([seed & _MASK64, index & _MASK64], dtype=np.uint64))
    raw = bits.random_raw(count)
    uniforms = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _INV53
    return ndtri(uniforms)


def sample_kl(s: Spectrum, grid_n: int = DEFAULT_GRID_N, n_paths: int = DEFAULT_N_PATHS,
              seed: int = 0) -> list[SamplePath]:
    """Truncated Karhunen-Loeve paths Y(t_i) = sum_k sqrt(lambda_k) xi_k e_k(t_i)."""
    if not s.pairs:
        raise EmptySpectrum("KL sampler needs at least one eigenpair")
    if grid_n < 2:
        raise ValidationError(f"grid_n must be >= 2, got {grid_n}")
    grid = np.linspace(0.0, 1.0, grid_n + 1)
    K = len(s.pairs)
    basis = np.empty((K, grid.size))
    for k, pair in enumerate(s.pairs):
        basis[k] = math.sqrt(pair.lam) * pair.e(grid)
    out = np.empty((n_paths, grid.size))
    for i in range(n_paths):
        xi = _path_normals(seed, i, K)
        np.dot(xi, basis, out=out[i])
    return [SamplePath(grid=grid, values=out[i], seed=seed, method="kl") for i in range(n_paths)]


def sample_direct(g: GeneratorFunction, grid_n: int = DEFAULT_GRID_N,
                  n_paths: int = DEFAULT_N_PATHS, seed: int = 0) -> list[SamplePath]:
    """Paths from the definition: Wiener increments dB_i ~ N(0, dt),
    B by cumulative sum, the stochastic integral by the midpoint rule
    int g' dB ~ sum g'(mid_i) dB_i, then Y_i = B_i - g(t_i) * integral.

    The integral accumulates in the same sequential order as B, so for
    g(t) = t the endpoint Y(1) = B_1 - B_1 vanishes exactly.
    """
    if grid_n < 2:
        raise ValidationError(f"grid_n must be >= 2, got {grid_n}")
    grid = np.linspace(0.0, 1.0, grid_n + 1)
    sqrt_dt = math.sqrt(1.0 / grid_n)
    gp_mid = g.d1(0.5 * (grid[:-1] + grid[1:]))
    g_grid = g(grid)
    out = np.empty((n_paths, grid.size))
    for i in range(n_paths):
        db = sqrt_dt * _path_normals(seed, i, grid_n)
        b = np.concatenate(([0.0], np.cumsum(db)))
        integral = np.cumsum(gp_mid * db)[-1]
        np.subtract(b, g_grid * integral, out=out[i])
    return [SamplePath(grid=grid, values=out[i], seed=seed, method="direct") for i in range(n_paths)]


@dataclass(frozen=True)
class CovarianceReport:
    matrix: np.ndarray
    grid: np.ndarray
    max_abs_deviation: float


def empirical_covariance(paths: list[SamplePath], g: GeneratorFunction) -> CovarianceReport:
    """Unbiased sample covariance over the grid and its max deviation from
    the analytic kernel.  Accumulation is a fixed-order matrix product, so
    the result is deterministic for a given path list."""
    if len(paths) < 2:
        raise InsufficientPaths(f"covariance needs >= 2 paths, got {len(paths)}")
    grid = paths[0].grid
    X = np.stack([p.values for p in paths])
    X = X - X.mean(axis=0)
    cov = (X.T @ X) / (len(paths) - 1)
    kernel = np.minimum.outer(grid, grid) - np.outer(g(grid), g(grid))
    dev = float(np.abs(cov - kernel).max())
    return CovarianceReport(matrix=cov, grid=grid, max_abs_deviation=dev)


# ---------------------------------------------------------------------------
# Laplace transform of int_0^1 Y_t^2 dt


@dataclass(frozen=True)
class LaplaceApprox:
    lambdas: tuple
    poly_coeffs: tuple     # prod (1 + 2 c lambda_k) expanded in c


def product_polynomial(lambdas) -> np.ndarray:
    """Exact coefficients of prod_k (1 + 2 c lambda_k) in powers of c."""
    lams = list(lambdas)
    if not lams:
        raise ValidationError("product_polynomial needs at least one eigenvalue")
    coeffs = np.array([1.0])
    for lam in lams:
        coeffs = np.convolve(coeffs, np.array([1.0, 2.0 * lam]))
    return coeffs                   # ascending powers of c


def laplace_approx(lambdas) -> LaplaceApprox:
    return LaplaceApprox(lambdas=tuple(lambdas), poly_coeffs=tuple(product_polynomial(lambdas)))


def laplace_transform(s: Spectrum, c: float, tail: str = "none") -> float:
    """E exp(-c int_0^1 Y^2) = prod_k (1 + 2 c lambda_k)^{-1/2} over the
    computed spectrum; tail='geometric' appends 10^4 factors with the
    Wiener decay lambda_k ~ 1/(k pi)^2, which the computed eigenvalues
    track beyond any truncation."""
    if c < 0:
        raise NegativeC(f"Laplace transform needs c >= 0, got {c}")
    if tail not in ("none", "geometric"):
        raise ValidationError(f"unknown tail mode {tail!r}")
    value = 1.0
    for pair in s.pairs:
        value /= math.sqrt(1.0 + 2.0 * c * pair.lam)
    if tail == "geometric":
        K = len(s.pairs)
        k = np.arange(K + 1, K + 1 + TAIL_TERMS, dtype=float)
        value *= float(np.exp(-0.5 * np.log1p(2.0 * c / (k * PI) ** 2).sum()))
    return value


@dataclass(frozen=True)
class TraceCheck:
    trace: float
    partial_sum: float
    gap: float


def trace_check(g: GeneratorFunction, s: Spectrum) -> TraceCheck:
    """Parseval bookkeeping: trace = int_0^1 (t - g(t)^2) dt against the
    partial eigenvalue sum; the gap is the unresolved tail and can never
    be materially negative for a positive semi-definite operator."""
    rule = build_rule(12, 16)
    gx = g(rule.nodes)
    trace = float(rule.weights @ (rule.nodes - gx * gx))
    partial = float(sum(p.lam for p in s.pairs))
    return TraceCheck(trace=trace, partial_sum=partial, gap=trace - partial)
