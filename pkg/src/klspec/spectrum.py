"""Characteristic function, eigenvalue search, and eigenfunction construction.

A positive lambda (u = 1/sqrt(lambda)) is an eigenvalue candidate of the
covariance operator when

    F(lambda) = (lambda^{3/2} + sqrt(lambda) * int g^2 + 2 c_g(lambda)) * cos(u)
                + b_g(lambda)^2 * sin(u)  =  0,

and the corresponding eigenfunction is

    e(t) = C * [ sqrt(lambda) cos(u) g(t)
                 + (a_g cos(u) + b_g sin(u)) sin(u t)
                 + cos(u) ( cos(u t) int_0^t g sin(u s) ds
                            - sin(u t) int_0^t g cos(u s) ds ) ],

with the standalone sin(u t) term dropped on the degenerate branch
a_g cos(u) + b_g sin(u) = 0.  F oscillates with near-period 2 pi in u, so
root scanning runs on a uniform u grid and refines each sign change by
bisection.  A refined root is only accepted as an eigenvalue when its
eigenfunction passes a Fredholm residual check; roots whose formula
collapses to the zero function or whose residual stays large are recorded
as spurious (the reduced sine-case equation has exactly such a root at
lambda = 1/pi^2, a removable-singularity artifact).

Two closed-form spectra are provided: the sine case (reduced equation and
eigenfunction with explicit normalization constant) and the Wiener bridge
g(t) = t with lambda_k = 1/(k pi)^2, e_k = sqrt(2) sin(k pi t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .charconst import (
    DEFAULT_ORDER,
    QuadratureRule,
    build_rule,
    compute_constants,
    rule_for_lambda,
    running_integrals,
)
from .errors import (
    BracketingFailure,
    NonPositiveLambda,
    TrivialEigenfunction,
)
from .generator import GeneratorFunction, make_preset

PI = np.pi
SCAN_STEP = PI / 64          # u-grid step of the root scan
REFINE_REL = 1e-12           # bisection target |d(lambda)/lambda|
REFINE_BUDGET = 100          # bisection iterations per bracket
FREDHOLM_TOL = 1e-6          # classification threshold (order >= 40 rule)
FREDHOLM_ORDER = 40
DEGENERATE_TOL = 1e-9        # |a cos + b sin| threshold, relative to scale
TRIVIAL_TOL = 1e-12          # ||unnormalized e|| below this is the zero function
CHEB_POINTS = 513            # dense cache for eigenfunction evaluation


# ---------------------------------------------------------------------------
# characteristic functions


@dataclass(frozen=True)
class CharacteristicFunction:
    """Cached state for evaluating F(lambda) for one generator."""

    g: GeneratorFunction
    gsq: float
    rule: QuadratureRule
    min_panels: int = 0


def characteristic_function(g: GeneratorFunction, order: int = DEFAULT_ORDER,
                            min_panels: int = 0) -> CharacteristicFunction:
    """Precompute int g^2 and fix the per-panel quadrature order.

    min_panels is a floor on every panel count chosen downstream; zero
    leaves the per-lambda automatic choice alone.
    """
    from .generator import SineTerm

    omega_max = max((t.omega for t in g.terms if isinstance(t, SineTerm)), default=1.0)
    panels = max(8, math.ceil(omega_max / PI) * 2, min_panels)
    rule = build_rule(order, panels)
    gx = g(rule.nodes)
    gsq = float(rule.weights @ (gx * gx))
    return CharacteristicFunction(g=g, gsq=gsq, rule=rule, min_panels=min_panels)


def _rule_for(cf: CharacteristicFunction, lam: float) -> QuadratureRule:
    rule = rule_for_lambda(lam, cf.rule.order)
    if cf.min_panels > rule.panels:
        rule = build_rule(cf.rule.order, cf.min_panels)
    return rule


def char_fn(cf: CharacteristicFunction, lam: float) -> float:
    """The general characteristic function, constants by quadrature."""
    if not lam > 0:
        raise NonPositiveLambda(f"lambda must be positive, got {lam}")
    u = 1.0 / math.sqrt(lam)
    rule = _rule_for(cf, lam)
    cc = compute_constants(cf.g, lam, rule)
    return float(
        (lam ** 1.5 + math.sqrt(lam) * cf.gsq + 2.0 * cc.c_g) * math.cos(u)
        + cc.b_g ** 2 * math.sin(u)
    )


def char_fn_sine(lam: float) -> float:
    """Reduced sine-case characteristic function, closed form.

    In u = 1/sqrt(lambda):  cos(u)/u^3 + 2 sin(u) / (pi^2 (pi^2 - u^2)).
    The 0/0 at u = pi is removable; writing eps = u - pi,

        sin(u) / (pi^2 - u^2) = (sin(eps)/eps) / (u + pi),

    which is exact for every u and finite at the singular point, where the
    function takes its limit value 0.
    """
    if not lam > 0:
        raise NonPositiveLambda(f"lambda must be positive, got {lam}")
    u = 1.0 / math.sqrt(lam)
    eps = u - PI
    sinc = np.sinc(eps / PI)     # sin(eps)/eps, stable through eps = 0
    return float(math.cos(u) / u ** 3 + (2.0 / PI ** 2) * sinc / (u + PI))


# ---------------------------------------------------------------------------
# eigenfunction evaluation cache


def _cheb_grid(n: int = CHEB_POINTS):
    j = np.arange(n)
    x = 0.5 * (1.0 - np.cos(PI * j / (n - 1)))
    w = np.where(j % 2 == 0, 1.0, -1.0)
    w[0] *= 0.5
    w[-1] *= 0.5
    return x, w


class EigenfunctionEvaluator:
    """Barycentric interpolation of an eigenfunction cached on a
    Chebyshev-Lobatto grid; exact at the cache nodes."""

    def __init__(self, grid: np.ndarray, values: np.ndarray, bary: np.ndarray):
        self.grid = grid
        self.values = values
        self._bary = bary

    def __call__(self, t):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty_like(t_arr)
        for lo in range(0, t_arr.size, 4096):
            hi = min(lo + 4096, t_arr.size)
            diff = t_arr[lo:hi, None] - self.grid[None, :]
            exact_row, exact_col = np.nonzero(diff == 0.0)
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = self._bary / diff
                num = ratio @ self.values
                den = ratio.sum(axis=1)
                vals = num / den
            vals[exact_row] = self.values[exact_col]
            out[lo:hi] = vals
        return out if np.ndim(t) else float(out[0])


def _make_evaluator(fn) -> EigenfunctionEvaluator:
    x, w = _cheb_grid()
    return EigenfunctionEvaluator(x, fn(x), w)


def _sign_convention(values: np.ndarray) -> float:
    """+1 if the first significant value (smallest t) is positive."""
    peak = np.abs(values).max()
    if peak == 0.0:
        return 1.0
    idx = np.argmax(np.abs(values) > 1e-3 * peak)
    return 1.0 if values[idx] >= 0.0 else -1.0


# ---------------------------------------------------------------------------
# eigenpairs and spectra


@dataclass(frozen=True)
class EigenfunctionCoefficients:
    A: float
    K: float


@dataclass(frozen=True)
class Eigenpair:
    lam: float
    k_bracket: int
    C: float
    coeffs: EigenfunctionCoefficients
    classification: str             # 'genuine' | 'degenerate' | 'spurious'
    fredholm_residual: float
    e: object = field(repr=False, compare=False)   # callable t -> e(t)

    @property
    def is_genuine(self) -> bool:
        return self.classification != "spurious"


@dataclass(frozen=True)
class Spectrum:
    """Accepted eigenpairs in strictly decreasing lambda, with any rejected
    (spurious) roots kept separately so the two lists are never merged
    silently."""

    pairs: tuple
    g: GeneratorFunction
    rejected: tuple = ()

    def __post_init__(self):
        lams = [p.lam for p in self.pairs]
        if any(b >= a for a, b in zip(lams, lams[1:])):
            raise ValueError("eigenvalues must decrease strictly")

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([p.lam for p in self.pairs])

    def root_list(self):
        """Every root of the characteristic equation found in the scan,
        genuine and spurious alike, in decreasing lambda."""
        merged = sorted(self.pairs + self.rejected, key=lambda p: -p.lam)
        return merged


def _zero_function(t):
    t_arr = np.asarray(t, dtype=float)
    out = np.zeros_like(t_arr)
    return out if out.ndim else 0.0


def _bracket_index(u: float) -> int:
    return int(math.floor(u / PI + 1e-9))


def system_rows(cf: CharacteristicFunction, lam: float):
    """Both rows of the homogeneous 2x2 system for (A, K), where the
    eigenfunction ansatz is

        e(t) = A sin(u t) - K u^2 g(t)
               + K u^3 ( sin(u t) I_cos(t) - cos(u t) I_sin(t) ).

    Row 1 is the self-consistency K = int g e, row 2 the boundary
    condition lam e'(1) = -g'(1) K; det = F(lambda) up to a positive
    factor.  Each row comes with the magnitude of the terms summed into
    it, the cancellation floor against which 'this row vanishes' must be
    judged."""
    u = 1.0 / math.sqrt(lam)
    cosu, sinu = math.cos(u), math.sin(u)
    rule = _rule_for(cf, lam)
    cc = compute_constants(cf.g, lam, rule)
    kappa = cc.a_g * cosu + cc.b_g * sinu
    m12 = -1.0 - cf.gsq / lam + (cc.a_g * cc.b_g - 2.0 * cc.c_g) / lam ** 1.5
    row1 = (cc.b_g, m12)
    row2 = (lam ** 1.5 * cosu, kappa)
    scale1 = abs(cc.b_g) + 1.0 + cf.gsq / lam + (abs(cc.a_g * cc.b_g) + 2.0 * abs(cc.c_g)) / lam ** 1.5
    scale2 = lam ** 1.5 + abs(cc.a_g) + abs(cc.b_g)
    return row1, row2, scale1, scale2, cc, rule


def eigenfunction(cf: CharacteristicFunction, lam: float, *, k_bracket: int | None = None,
                  fredholm_tol: float = FREDHOLM_TOL, grid: int = 201) -> Eigenpair:
    """Construct, normalize and classify the eigenfunction at a root of F.

    The null vector of the 2x2 system is taken from whichever row is
    numerically trustworthy.  Usually that is the boundary row, which
    reproduces the standard form

        e = C [ sqrt(lam) cos(u) g + kappa sin(u t)
                + cos(u) (cos(u t) I_sin - sin(u t) I_cos) ],

    but some generators silence the boundary row entirely: for the
    half-sine preset every eigenvalue sits at cos(u) = 0 with b_g = 0,
    both boundary-row entries vanish, and the self-consistency row yields
    (A, K) = (m12, 0), i.e. a pure sine eigenfunction.  The caller is
    expected to pass a refined root of char_fn; at other points the
    construction still runs but the Fredholm residual (and hence a
    'spurious' classification) reflects the defect.
    """
    if not lam > 0:
        raise NonPositiveLambda(f"lambda must be positive, got {lam}")
    g = cf.g
    u = 1.0 / math.sqrt(lam)
    cosu, sinu = math.cos(u), math.sin(u)
    row1, row2, scale1, scale2, cc, rule = system_rows(cf, lam)

    kappa = row2[1]
    degenerate = abs(kappa) <= DEGENERATE_TOL * scale2

    eps = np.finfo(float).eps
    snr1 = max(abs(row1[0]), abs(row1[1])) / (eps * scale1)
    snr2 = max(abs(row2[0]), abs(row2[1])) / (eps * scale2)
    if snr2 >= 1e-3 * snr1:
        A0, K0 = kappa, -row2[0]
    else:
        A0, K0 = row1[1], -row1[0]
    vec_scale = max(abs(A0), abs(K0))
    if vec_scale == 0.0:
        raise TrivialEigenfunction(f"null vector vanished at lambda={lam}")
    A0, K0 = A0 / vec_scale, K0 / vec_scale

    def raw(t):
        run = running_integrals(g, lam, t, rule)
        ut = u * np.asarray(t, dtype=float)
        return (
            A0 * np.sin(ut)
            - K0 * u ** 2 * g(t)
            + K0 * u ** 3 * (np.sin(ut) * run.I_cos - np.cos(ut) * run.I_sin)
        )

    raw_nodes = raw(rule.nodes)
    norm = math.sqrt(float(rule.weights @ (raw_nodes * raw_nodes)))
    if norm <= TRIVIAL_TOL:
        raise TrivialEigenfunction(f"eigenfunction formula collapsed at lambda={lam}")

    evaluator = _make_evaluator(raw)
    sign = _sign_convention(evaluator.values)
    C = sign / norm
    evaluator.values = C * evaluator.values

    K = C * float(rule.weights @ (g(rule.nodes) * raw_nodes))
    A = C * A0
    if k_bracket is None:
        k_bracket = _bracket_index(u)

    residual = _fredholm(g, lam, evaluator, K, grid=grid)
    if residual <= fredholm_tol:
        classification = "degenerate" if degenerate else "genuine"
    else:
        classification = "spurious"
    return Eigenpair(
        lam=lam,
        k_bracket=k_bracket,
        C=C,
        coeffs=EigenfunctionCoefficients(A=A, K=K),
        classification=classification,
        fredholm_residual=residual,
        e=evaluator,
    )


# ---------------------------------------------------------------------------
# residual checks


def _panelwise_integrals(fn, grid_pts: np.ndarray, order: int):
    """Integrals of fn over each cell of a uniform grid by per-cell
    Gauss-Legendre; returns per-cell integrals of fn and of s*fn."""
    x, w = np.polynomial.legendre.leggauss(order)
    a = grid_pts[:-1]
    h = grid_pts[1] - grid_pts[0]
    nodes = a[:, None] + 0.5 * h * (x + 1.0)[None, :]
    weights = 0.5 * h * w
    vals = fn(nodes.ravel()).reshape(nodes.shape)
    cell = vals @ weights
    cell_s = (vals * nodes) @ weights
    return cell, cell_s


def _fredholm(g, lam: float, e, K: float, *, grid: int = 201, order: int = FREDHOLM_ORDER) -> float:
    """max_t | int_0^1 R(t,s) e(s) ds - lam e(t) | on a uniform grid.

    Splitting min(s,t) at the diagonal,

        int_0^1 R(t,s) e(s) ds = int_0^t s e ds + t int_t^1 e ds - g(t) K,

    and both running integrals come from per-cell quadrature aligned with
    the evaluation grid, so the kernel kink never crosses a panel.
    """
    t = np.linspace(0.0, 1.0, grid)
    cell, cell_s = _panelwise_integrals(e, t, order)
    Q = np.concatenate(([0.0], np.cumsum(cell)))      # int_0^t e
    P = np.concatenate(([0.0], np.cumsum(cell_s)))    # int_0^t s e
    E1 = Q[-1]
    resid = P + t * (E1 - Q) - g(t) * K - lam * e(t)
    return float(np.abs(resid).max())


def fredholm_residual(g: GeneratorFunction, pair: Eigenpair, rule: QuadratureRule | None = None,
                      grid: int = 201) -> float:
    """Public wrapper: max-norm Fredholm defect of a normalized eigenpair."""
    order = FREDHOLM_ORDER if rule is None else rule.order
    return _fredholm(g, pair.lam, pair.e, pair.coeffs.K, grid=grid, order=order)


@dataclass(frozen=True)
class OdeResiduals:
    interior: float
    bc0: float
    bc1: float


def ode_residual(g: GeneratorFunction, pair: Eigenpair, *, grid: int = 201, h: float = 1e-4) -> OdeResiduals:
    """Finite-difference defect of lam e'' = -e - g'' K with e(0) = 0 and
    lam e'(1) = -g'(1) K."""
    lam, e, K = pair.lam, pair.e, pair.coeffs.K
    t = np.linspace(0.0, 1.0, grid)[1:-1]
    t = t[(t - h >= 0.0) & (t + h <= 1.0)]
    d2 = (e(t + h) - 2.0 * e(t) + e(t - h)) / h ** 2
    interior = float(np.abs(lam * d2 + e(t) + g.d2(t) * K).max())
    bc0 = abs(float(e(0.0)))
    d1_at_1 = (3.0 * e(1.0) - 4.0 * e(1.0 - h) + e(1.0 - 2.0 * h)) / (2.0 * h)
    bc1 = abs(lam * d1_at_1 + float(g.d1(1.0)) * K)
    return OdeResiduals(interior=interior, bc0=bc0, bc1=float(bc1))


# ---------------------------------------------------------------------------
# root scan


def _refine_bisect(fn, a: float, b: float, fa: float, fb: float) -> float:
    """Bisection on [a,b] in u until the implied relative lambda width
    drops below REFINE_REL; returns the root in u."""
    for _ in range(REFINE_BUDGET):
        mid = 0.5 * (a + b)
        if (b - a) <= 0.5 * REFINE_REL * mid:
            return mid
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fa < 0.0) == (fm < 0.0):
            a, fa = mid, fm
        else:
            b, fb = mid, fm
    return 0.5 * (a + b)


def _scan_roots(fn_of_u, u_max: float, step: float):
    """Sign-change scan on the uniform u grid; yields refined roots in u."""
    n_steps = int(math.ceil(u_max / step))
    roots = []
    u_prev = step
    f_prev = fn_of_u(u_prev)
    if f_prev == 0.0:
        roots.append(u_prev)
    for j in range(2, n_steps + 1):
        u = min(j * step, u_max)
        f = fn_of_u(u)
        if f == 0.0:
            roots.append(u)
        elif (f_prev < 0.0) != (f < 0.0) and f_prev != 0.0:
            roots.append(_refine_bisect(fn_of_u, u_prev, u, f_prev, f))
        u_prev, f_prev = u, f
    return roots


def _spurious_pair(lam: float, k_bracket: int) -> Eigenpair:
    return Eigenpair(
        lam=lam,
        k_bracket=k_bracket,
        C=0.0,
        coeffs=EigenfunctionCoefficients(A=0.0, K=0.0),
        classification="spurious",
        fredholm_residual=float("inf"),
        e=_zero_function,
    )


def find_eigenvalues(cf: CharacteristicFunction, K: int, *, step: float = SCAN_STEP,
                     u_max: float | None = None, fredholm_tol: float = FREDHOLM_TOL) -> Spectrum:
    """Scan char_fn in u = 1/sqrt(lambda), refine sign changes, classify
    each root by its Fredholm residual, and return the first K genuine
    eigenpairs (decreasing lambda).  Spurious roots are reported in
    Spectrum.rejected rather than dropped."""
    if K < 1:
        raise ValueError("K must be >= 1")
    if u_max is None:
        u_max = (K + 2) * PI

    def F(u):
        return char_fn(cf, 1.0 / (u * u))

    pairs, rejected = [], []
    for u_root in _scan_roots(F, u_max, step):
        lam = 1.0 / (u_root * u_root)
        kb = _bracket_index(u_root)
        try:
            pair = eigenfunction(cf, lam, k_bracket=kb, fredholm_tol=fredholm_tol)
        except TrivialEigenfunction:
            rejected.append(_spurious_pair(lam, kb))
            continue
        if pair.is_genuine:
            pairs.append(pair)
            if len(pairs) == K:
                break
        else:
            rejected.append(pair)

    if len(pairs) < K:
        partial = Spectrum(pairs=tuple(pairs), g=cf.g, rejected=tuple(rejected))
        raise BracketingFailure(
            f"found {len(pairs)} genuine eigenvalues, requested {K} "
            f"(scan u <= {u_max:.3f})",
            partial=partial,
        )
    return Spectrum(pairs=tuple(pairs), g=cf.g, rejected=tuple(rejected))


# ---------------------------------------------------------------------------
# closed forms


def closed_form_sine(K: int, *, step: float = SCAN_STEP,
                     fredholm_tol: float = FREDHOLM_TOL) -> Spectrum:
    """Spectrum of the sine case from the reduced characteristic equation.

    Roots are located by the same u-space bracketing as the general path.
    The root at lambda = 1/pi^2 is excluded from the eigenpair list: its
    eigenfunction formula collapses to the zero function (the corollary
    proof shows 1/pi^2 is not an eigenvalue), so it lands in `rejected`.
    Eigenfunctions use the explicit form

        e(t) = C [ sin(u t) + sqrt(lambda) pi cos(u) sin(pi t) ].
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    g = make_preset("sine-bridge")

    def F(u):
        return char_fn_sine(1.0 / (u * u))

    pairs, rejected = [], []
    for u_root in _scan_roots(F, (K + 2) * PI, step):
        lam = 1.0 / (u_root * u_root)
        kb = _bracket_index(u_root)
        pair = _sine_pair(g, lam, kb, fredholm_tol)
        if pair.is_genuine and len(pairs) < K:
            pairs.append(pair)
        elif not pair.is_genuine:
            rejected.append(pair)

    if len(pairs) < K:
        partial = Spectrum(pairs=tuple(pairs), g=g, rejected=tuple(rejected))
        raise BracketingFailure(
            f"found {len(pairs)} genuine sine-case eigenvalues, requested {K}",
            partial=partial,
        )
    return Spectrum(pairs=tuple(pairs), g=g, rejected=tuple(rejected))


def sine_normalization(lam: float) -> float:
    """The closed-form C of the sine case, evaluated stably.

    C = (lam pi^2/2 cos^2(u) + sqrt(lam) (pi^2/(pi^2 - 1/lam) - 1/4) sin(2u)
         + 1/2)^{-1/2};  the pole factor is rewritten as
    pi^2 sin(2u)/(pi^2 - u^2) = -2 pi^2 sinc(2 eps) / (u + pi), eps = u - pi,
    sharing the removable singularity treatment of char_fn_sine.
    """
    u = 1.0 / math.sqrt(lam)
    eps = u - PI
    pole_term = -(PI ** 2) * 2.0 * np.sinc(2.0 * eps / PI) / (u + PI)
    inner = (
        lam * PI ** 2 / 2.0 * math.cos(u) ** 2
        + math.sqrt(lam) * (pole_term - 0.25 * math.sin(2.0 * u))
        + 0.5
    )
    if inner <= TRIVIAL_TOL:
        raise TrivialEigenfunction(f"normalization integral vanished at lambda={lam}")
    return 1.0 / math.sqrt(inner)


def _sine_pair(g, lam: float, kb: int, fredholm_tol: float) -> Eigenpair:
    u = 1.0 / math.sqrt(lam)
    amp = math.sqrt(lam) * PI * math.cos(u)

    def raw(t):
        t_arr = np.asarray(t, dtype=float)
        return np.sin(u * t_arr) + amp * np.sin(PI * t_arr)

    quad_rule = rule_for_lambda(lam, DEFAULT_ORDER)
    raw_nodes = raw(quad_rule.nodes)
    norm = math.sqrt(float(quad_rule.weights @ (raw_nodes * raw_nodes)))
    if norm <= TRIVIAL_TOL:
        return _spurious_pair(lam, kb)
    sign = _sign_convention(raw(np.linspace(0.0, 1.0, 65)))
    C = sign / norm

    def e(t, _C=C, _raw=raw):
        return _C * _raw(t)

    K = C * float(quad_rule.weights @ (g(quad_rule.nodes) * raw_nodes))
    residual = _fredholm(g, lam, e, K, grid=201)
    classification = "genuine" if residual <= fredholm_tol else "spurious"
    return Eigenpair(
        lam=lam,
        k_bracket=kb,
        C=C,
        coeffs=EigenfunctionCoefficients(A=C, K=K),
        classification=classification,
        fredholm_residual=residual,
        e=e,
    )


def closed_form_bridge(K: int) -> Spectrum:
    """Exact Wiener bridge spectrum: lambda_k = 1/(k pi)^2,
    e_k(t) = sqrt(2) sin(k pi t), C = sqrt(2) (k pi)^2 bookkeeping."""
    if K < 1:
        raise ValueError("K must be >= 1")
    g = make_preset("identity")
    pairs = []
    for k in range(1, K + 1):
        lam = 1.0 / (k * PI) ** 2

        def e(t, _k=k):
            t_arr = np.asarray(t, dtype=float)
            out = math.sqrt(2.0) * np.sin(_k * PI * t_arr)
            return out if out.ndim else float(out)

        K_coef = math.sqrt(2.0) * ((-1.0) ** (k + 1)) / (k * PI)   # int t e_k dt
        pair = Eigenpair(
            lam=lam,
            k_bracket=k,
            C=math.sqrt(2.0) * (k * PI) ** 2,
            coeffs=EigenfunctionCoefficients(A=math.sqrt(2.0), K=K_coef),
            classification="genuine",
            fredholm_residual=_fredholm(g, lam, e, K_coef, grid=201),
            e=e,
        )
        pairs.append(pair)
    return Spectrum(pairs=tuple(pairs), g=g)
