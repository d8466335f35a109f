"""Composite Gauss-Legendre quadrature and the characteristic constants.

For a candidate eigenvalue lambda > 0 (write u = 1/sqrt(lambda)) the
characteristic function and the eigenfunction formula are driven by

    a_g(lambda) = int_0^1 g(t) cos(u t) dt
    b_g(lambda) = int_0^1 g(t) sin(u t) dt
    c_g(lambda) = int_0^1 ( int_0^t g(s) g(t) sin(u s) cos(u t) ds ) dt

and by the running integrals int_0^t g sin(u s) ds, int_0^t g cos(u s) ds.
Small eigenvalues mean high frequency u, so the composite rule scales its
panel count with u to keep a fixed number of nodes per oscillation period.
The double integral c_g is evaluated as an iterated integral, with the
inner rule mapped onto [0, t] for every outer node (O(n^2) kernel
evaluations, chunked to bound memory).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, InvalidOrder, NonPositiveLambda

DEFAULT_ORDER = 12
_CHUNK = 512    # outer-node block size for the O(n^2) iterated integrals


@dataclass(frozen=True)
class QuadratureRule:
    """Composite Gauss-Legendre rule on [0,1] with panels*order nodes."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int
    panels: int


def build_rule(order: int, panels: int) -> QuadratureRule:
    """Composite rule: `order`-point Gauss-Legendre on `panels` equal panels."""
    if order != int(order) or int(order) < 2:
        raise InvalidOrder(f"order must be an integer >= 2, got {order}")
    if panels != int(panels) or int(panels) < 1:
        raise InvalidOrder(f"panels must be an integer >= 1, got {panels}")
    return _build_rule(int(order), int(panels))


@lru_cache(maxsize=256)
def _build_rule(order: int, panels: int) -> QuadratureRule:
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, 1.0, panels + 1)
    half = 0.5 / panels
    nodes = (half * (x + 1.0)[None, :] + edges[:-1, None]).ravel()
    weights = np.broadcast_to(half * w, (panels, order)).ravel().copy()
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return QuadratureRule(nodes=nodes, weights=weights, order=order, panels=panels)


def rule_for_lambda(lam: float, order: int = DEFAULT_ORDER) -> QuadratureRule:
    """Panel count max(8, ceil(4/sqrt(lambda))) so cos(t/sqrt(lambda)) keeps
    a fixed node density per period."""
    if not lam > 0:
        raise NonPositiveLambda(f"lambda must be positive, got {lam}")
    panels = max(8, math.ceil(4.0 / math.sqrt(lam)))
    return build_rule(order, panels)


def integrate(rule: QuadratureRule, values: np.ndarray) -> float:
    """Dot the rule weights with integrand values at the rule nodes."""
    return float(rule.weights @ values)


@dataclass(frozen=True)
class CharacteristicConstants:
    lam: float
    a_g: float
    b_g: float
    c_g: float


def compute_constants(g, lam: float, rule: QuadratureRule) -> CharacteristicConstants:
    """Evaluate a_g, b_g by single quadrature and c_g by iterated quadrature."""
    if not lam > 0:
        raise NonPositiveLambda(f"lambda must be positive, got {lam}")
    u = 1.0 / math.sqrt(lam)
    x, w = rule.nodes, rule.weights
    gx = g(x)
    a_g = float(w @ (gx * np.cos(u * x)))
    b_g = float(w @ (gx * np.sin(u * x)))
    c_g = iterated_sin_cos(g, lam, rule)
    return CharacteristicConstants(lam=lam, a_g=a_g, b_g=b_g, c_g=c_g)


def iterated_sin_cos(g, lam: float, rule: QuadratureRule, swapped: bool = False) -> float:
    """The double integral c_g, or its transpose with sin and cos swapped.

    c_g        = int_0^1 g(t) cos(u t) ( int_0^t g(s) sin(u s) ds ) dt
    swapped    = int_0^1 g(t) sin(u t) ( int_0^t g(s) cos(u s) ds ) dt

    The two add up to a_g * b_g (integration over the full square splits
    along the diagonal), which the tests exploit as an exchange identity.
    """
    if not lam > 0:
        raise NonPositiveLambda(f"lambda must be positive, got {lam}")
    u = 1.0 / math.sqrt(lam)
    x, w = rule.nodes, rule.weights
    gx = g(x)
    outer = gx * (np.sin(u * x) if swapped else np.cos(u * x))
    total = 0.0
    for lo in range(0, x.size, _CHUNK):
        hi = min(lo + _CHUNK, x.size)
        t = x[lo:hi]
        s = np.multiply.outer(t, x)          # inner nodes mapped to [0, t]
        inner_w = np.multiply.outer(t, w)
        gs = g(s)
        trig = np.cos(u * s) if swapped else np.sin(u * s)
        inner = np.einsum("ij,ij->i", inner_w, gs * trig)
        total += float(w[lo:hi] @ (outer[lo:hi] * inner))
    return total


@dataclass(frozen=True)
class RunningIntegrals:
    I_sin: np.ndarray
    I_cos: np.ndarray


def running_integrals(g, lam: float, t, rule: QuadratureRule) -> RunningIntegrals:
    """int_0^t g(s) sin(u s) ds and int_0^t g(s) cos(u s) ds, vectorized in t."""
    if not lam > 0:
        raise NonPositiveLambda(f"lambda must be positive, got {lam}")
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0.0) or np.any(t_arr > 1.0):
        raise DomainError("running integral endpoint must lie in [0,1]")
    u = 1.0 / math.sqrt(lam)
    x, w = rule.nodes, rule.weights
    I_sin = np.empty_like(t_arr)
    I_cos = np.empty_like(t_arr)
    for lo in range(0, t_arr.size, _CHUNK):
        hi = min(lo + _CHUNK, t_arr.size)
        tt = t_arr[lo:hi]
        s = np.multiply.outer(tt, x)
        inner_w = np.multiply.outer(tt, w)
        gs = g(s)
        I_sin[lo:hi] = np.einsum("ij,ij->i", inner_w, gs * np.sin(u * s))
        I_cos[lo:hi] = np.einsum("ij,ij->i", inner_w, gs * np.cos(u * s))
    if np.ndim(t) == 0:
        return RunningIntegrals(I_sin=float(I_sin[0]), I_cos=float(I_cos[0]))
    return RunningIntegrals(I_sin=I_sin, I_cos=I_cos)
