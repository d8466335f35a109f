"""Generator functions for the perturbed Wiener process Y_t = B_t - g(t) * I_g.

The process under study is

    Y_t = B_t - g(t) * int_0^1 g'(u) dB_u,      t in [0,1],

where the generator g is twice continuously differentiable with g(0) = 0
and unit energy int_0^1 (g'(u))^2 du = 1.  Its covariance kernel is

    R(s, t) = min(s, t) - g(s) * g(t).

Generators are represented as finite sums of monomials coeff * t^j (j >= 1)
and sines coeff * sin(omega * t), so that g' and g'' are exact, every term
vanishes at t = 0 structurally, and all downstream integrands stay smooth.
The module also builds generators from a perturbation function phi via

    psi(t) = int_0^t s * phi(s) ds + t * int_t^1 phi(s) ds,

the kernel-smoothing construction behind the worked zero-eigenvalue example;
the term basis is closed under the double antidifferentiation involved, so
psi is produced exactly (psi'' = -phi, psi(0) = 0, psi'(1) = 0 by
construction, not approximation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateGenerator,
    DegeneratePerturbation,
    DomainError,
    NonEvaluable,
    NormalizationFailure,
)

PRESET_NAMES = ("sine-bridge", "identity", "neg-identity", "half-sine")

G0_TOL = 1e-10          # |g(0)| tolerance (structurally zero for the basis)
ENERGY_TOL = 1e-8       # |energy - 1| tolerance, quadrature-limited
BRIDGE_TOL = 1e-10      # |1 - g(1)^2| threshold for the bridge property


@dataclass(frozen=True)
class PolyTerm:
    """Monomial term coeff * t^degree with degree >= 1."""

    degree: int
    coeff: float

    def g(self, t):
        return self.coeff * t ** self.degree

    def d1(self, t):
        return self.coeff * self.degree * t ** (self.degree - 1)

    def d2(self, t):
        j = self.degree
        if j == 1:
            return np.zeros_like(t)
        return self.coeff * j * (j - 1) * t ** (j - 2)

    def scaled(self, factor):
        return PolyTerm(self.degree, self.coeff * factor)


@dataclass(frozen=True)
class SineTerm:
    """Sine term coeff * sin(omega * t) with omega > 0."""

    omega: float
    coeff: float

    def g(self, t):
        return self.coeff * np.sin(self.omega * t)

    def d1(self, t):
        return self.coeff * self.omega * np.cos(self.omega * t)

    def d2(self, t):
        return -self.coeff * self.omega ** 2 * np.sin(self.omega * t)

    def scaled(self, factor):
        return SineTerm(self.omega, self.coeff * factor)


def _check_terms(terms):
    for term in terms:
        if isinstance(term, PolyTerm):
            if term.degree < 1 or term.degree != int(term.degree):
                raise NonEvaluable(f"polynomial degree must be an integer >= 1, got {term.degree}")
        elif isinstance(term, SineTerm):
            if not term.omega > 0:
                raise NonEvaluable(f"sine frequency must be positive, got {term.omega}")
        else:
            raise NonEvaluable(f"unknown term type {type(term).__name__}")
        if not math.isfinite(term.coeff):
            raise NonEvaluable(f"non-finite coefficient in {term}")


def _eval_terms(terms, t, order):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    with np.errstate(over="raise", invalid="raise"):
        try:
            for term in terms:
                if order == 0:
                    out = out + term.g(t)
                elif order == 1:
                    out = out + term.d1(t)
                else:
                    out = out + term.d2(t)
        except FloatingPointError as exc:
            raise NonEvaluable(f"term evaluation failed: {exc}") from exc
    return out


@dataclass(frozen=True)
class GeneratorFunction:
    """A generator g as a finite polynomial + sine combination.

    Fields
    ------
    kind : one of PRESET_NAMES or "custom"
    terms : tuple of PolyTerm / SineTerm
    energy : cached int_0^1 (g')^2 du
    normalized : whether coefficients were rescaled to unit energy
    """

    kind: str
    terms: tuple
    energy: float
    normalized: bool

    def __call__(self, t):
        out = _eval_terms(self.terms, t, 0)
        return out if out.ndim else float(out)

    def d1(self, t):
        out = _eval_terms(self.terms, t, 1)
        return out if out.ndim else float(out)

    def d2(self, t):
        out = _eval_terms(self.terms, t, 2)
        return out if out.ndim else float(out)


def make_custom(terms, *, normalize_energy=False) -> GeneratorFunction:
    """Build a custom generator from basis terms, optionally normalizing."""
    terms = tuple(terms)
    _check_terms(terms)
    g = GeneratorFunction("custom", terms, _energy(terms), False)
    return normalize(g) if normalize_energy else g


def from_descriptor(data) -> GeneratorFunction:
    """Build a generator from its JSON descriptor.

    A descriptor is either a preset name or an object

        {"kind": "custom",
         "terms": [{"type": "poly", "degree": 1, "coeff": 1.0},
                   {"type": "sine", "omega": 3.14159, "coeff": 0.5}],
         "normalize": true}

    where "normalize" (default false) rescales coefficients to unit energy.
    A preset name is also accepted as the "kind" of an object with no terms.
    """
    if isinstance(data, str):
        return make_preset(data)
    if not isinstance(data, dict):
        raise NonEvaluable(f"descriptor must be a name or an object, got {type(data).__name__}")
    unknown = set(data) - {"kind", "terms", "normalize"}
    if unknown:
        raise NonEvaluable(f"unknown descriptor keys: {sorted(unknown)}")
    kind = data.get("kind")
    if kind in PRESET_NAMES:
        if "terms" in data or "normalize" in data:
            raise NonEvaluable(f"preset descriptor {kind!r} takes no terms or normalize flag")
        return make_preset(kind)
    if kind != "custom":
        raise NonEvaluable(f"descriptor kind must be 'custom' or one of {PRESET_NAMES}, got {kind!r}")
    raw_terms = data.get("terms")
    if not isinstance(raw_terms, (list, tuple)) or not raw_terms:
        raise NonEvaluable("custom descriptor needs a non-empty 'terms' list")
    terms = []
    for item in raw_terms:
        if not isinstance(item, dict):
            raise NonEvaluable(f"term must be an object, got {item!r}")
        kind_keys = {"poly": {"type", "degree", "coeff"}, "sine": {"type", "omega", "coeff"}}
        ttype = item.get("type")
        if ttype not in kind_keys:
            raise NonEvaluable(f"term type must be 'poly' or 'sine', got {ttype!r}")
        if set(item) != kind_keys[ttype]:
            raise NonEvaluable(f"{ttype} term needs exactly keys {sorted(kind_keys[ttype])}, got {sorted(item)}")
        if ttype == "poly":
            degree = item["degree"]
            if degree != int(degree):
                raise NonEvaluable(f"polynomial degree must be an integer, got {degree!r}")
            terms.append(PolyTerm(int(degree), float(item["coeff"])))
        else:
            terms.append(SineTerm(float(item["omega"]), float(item["coeff"])))
    return make_custom(terms, normalize_energy=bool(data.get("normalize", False)))


def make_preset(kind: str) -> GeneratorFunction:
    """Return one of the four closed-form generators with unit energy.

    sine-bridge : g(t) = (sqrt(2)/pi) sin(pi t)
    identity    : g(t) = t            (Wiener bridge)
    neg-identity: g(t) = -t
    half-sine   : g(t) = (2 sqrt(2)/pi) sin(pi t / 2), has g'(1) = 0 and a
                  zero eigenvalue of the covariance operator
    """
    if kind == "sine-bridge":
        terms = (SineTerm(np.pi, math.sqrt(2.0) / np.pi),)
    elif kind == "identity":
        terms = (PolyTerm(1, 1.0),)
    elif kind == "neg-identity":
        terms = (PolyTerm(1, -1.0),)
    elif kind == "half-sine":
        terms = (SineTerm(np.pi / 2, 2.0 * math.sqrt(2.0) / np.pi),)
    else:
        raise DomainError(f"unknown preset {kind!r}; expected one of {PRESET_NAMES}")
    # all four have int (g')^2 = 1 exactly
    return GeneratorFunction(kind, terms, 1.0, True)


def _energy(terms) -> float:
    """int_0^1 (g')^2 du by composite Gauss-Legendre."""
    from .charconst import build_rule

    omega_max = max((t.omega for t in terms if isinstance(t, SineTerm)), default=1.0)
    panels = max(8, math.ceil(omega_max / np.pi) * 2)
    rule = build_rule(12, panels)
    d1 = _eval_terms(terms, rule.nodes, 1)
    return float(rule.weights @ (d1 * d1))


@dataclass(frozen=True)
class ValidationReport:
    g0: float
    energy: float
    ok: bool


def validate(g: GeneratorFunction, tol: float = ENERGY_TOL) -> ValidationReport:
    """Check the standing assumptions g(0) = 0 and unit energy.

    The energy is recomputed by quadrature rather than trusted from the
    cached field.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    g0 = float(g(0.0))
    energy = _energy(g.terms)
    ok = abs(g0) <= G0_TOL and abs(energy - 1.0) <= tol
    return ValidationReport(g0=g0, energy=energy, ok=ok)


def normalize(g: GeneratorFunction) -> GeneratorFunction:
    """Rescale coefficients so that int (g')^2 = 1."""
    energy = _energy(g.terms)
    if energy <= 1e-30:
        raise DegenerateGenerator("generator has zero energy")
    if abs(energy - 1.0) <= 1e-14:
        return g if g.normalized else GeneratorFunction(g.kind, g.terms, 1.0, True)
    factor = 1.0 / math.sqrt(energy)
    terms = tuple(term.scaled(factor) for term in g.terms)
    return GeneratorFunction(g.kind, terms, _energy(terms), True)


def covariance(g: GeneratorFunction, s, t):
    """Covariance kernel R(s,t) = min(s,t) - g(s) g(t) on [0,1]^2."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(s < 0.0) or np.any(s > 1.0) or np.any(t < 0.0) or np.any(t > 1.0):
        raise DomainError("covariance arguments must lie in [0,1]")
    out = np.minimum(s, t) - g(s) * g(t)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class BridgeCheck:
    variance: float
    is_bridge: bool


def variance_at_one(g: GeneratorFunction) -> BridgeCheck:
    """Var(Y_1) = 1 - g(1)^2; the process is a bridge iff g(1) is +-1."""
    variance = 1.0 - float(g(1.0)) ** 2
    return BridgeCheck(variance=variance, is_bridge=abs(variance) <= BRIDGE_TOL)


# ---------------------------------------------------------------------------
# perturbation construction


@dataclass(frozen=True)
class PerturbationSpec:
    """A perturbation phi in the same term basis, with its kernel energy q.

    q = int_0^1 int_0^1 min(t,s) phi(t) phi(s) dt ds.  alpha is the critical
    perturbation strength solving q*alpha^2 - 2*alpha = -1 (NaN when q > 1,
    where no real critical strength exists).
    """

    phi: tuple
    q: float
    alpha: float


def make_perturbation(terms) -> PerturbationSpec:
    """Assemble a PerturbationSpec, computing q by iterated quadrature."""
    terms = tuple(terms)
    _check_terms(terms)
    q = _kernel_energy(terms)
    disc = 1.0 - q
    alpha = (1.0 - math.sqrt(disc)) / q if (q > 0 and disc >= 0) else float("nan")
    return PerturbationSpec(phi=terms, q=q, alpha=alpha)


def _kernel_energy(terms) -> float:
    """q = int int min(t,s) phi phi, as the iterated integral int phi(t) psi_0(t) dt
    with psi_0(t) = int_0^t s phi(s) ds + t int_t^1 phi(s) ds."""
    from .charconst import build_rule

    omega_max = max((t.omega for t in terms if isinstance(t, SineTerm)), default=1.0)
    rule = build_rule(12, max(8, math.ceil(omega_max / np.pi) * 2))
    x, w = rule.nodes, rule.weights
    phi_x = _eval_terms(terms, x, 0)
    # inner integrals on [0, t] with the same rule scaled to the interval
    s_grid = np.multiply.outer(x, x)            # s_grid[i, j] = x_i * x_j
    w_inner = np.multiply.outer(x, w)
    phi_inner = _eval_terms(terms, s_grid, 0)
    lower_s = np.einsum("ij,ij->i", w_inner, s_grid * phi_inner)   # int_0^t s phi
    lower = np.einsum("ij,ij->i", w_inner, phi_inner)              # int_0^t phi
    total = float(w @ phi_x)                                       # int_0^1 phi
    psi0 = lower_s + x * (total - lower)
    return float(w @ (phi_x * psi0))


def from_perturbation(p: PerturbationSpec) -> GeneratorFunction:
    """Build g = psi / ||psi'|| from phi, exactly within the term basis.

    With Phi the antiderivative of phi vanishing at 0,

        psi(t) = Phi(1) * t - int_0^t Phi(s) ds,

    and both operations keep polynomial and sine terms inside the basis:
    a monomial c*t^j contributes c/(j+1) to the linear slope and the
    monomial -c/((j+1)(j+2)) * t^(j+2); a sine c*sin(omega t) contributes
    -(c/omega) cos(omega) to the slope and the sine (c/omega^2) sin(omega t).
    Hence psi'' = -phi, psi(0) = 0 and psi'(1) = 0 hold exactly.
    """
    _check_terms(p.phi)
    slope = 0.0
    out_terms = []
    for term in p.phi:
        if isinstance(term, PolyTerm):
            j, c = term.degree, term.coeff
            slope += c / (j + 1)
            out_terms.append(PolyTerm(j + 2, -c / ((j + 1) * (j + 2))))
        else:
            om, c = term.omega, term.coeff
            slope += -(c / om) * math.cos(om)
            out_terms.append(SineTerm(om, c / om ** 2))
    if abs(slope) > 1e-300:
        out_terms.append(PolyTerm(1, slope))
    terms = tuple(t for t in out_terms if t.coeff != 0.0)

    energy = _energy(terms) if terms else 0.0
    if energy <= 1e-24:
        raise DegeneratePerturbation("psi is identically zero")
    factor = 1.0 / math.sqrt(energy)
    terms = tuple(term.scaled(factor) for term in terms)
    g = GeneratorFunction("custom", terms, _energy(terms), True)

    if abs(float(g(0.0))) > G0_TOL:
        raise DegeneratePerturbation("psi(0) != 0; construction violated")
    if abs(float(g.d1(1.0))) > 1e-9:
        raise DegeneratePerturbation("psi'(1) != 0; construction violated")
    if abs(g.energy - 1.0) > ENERGY_TOL:
        raise NormalizationFailure(f"energy {g.energy} not within tolerance of 1")
    return g
