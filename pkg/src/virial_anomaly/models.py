"""The three point-interaction systems: Robin free half-line, s-wave Coulomb
and the isotropic oscillator, with branch-aware eigenvalue solvers and
normalized reduced radial eigenfunctions (phi = r * psi conventions).

Spectra depend on the ratios alpha/xi and beta/sigma only; dimensionful
scales enter through PhysicalScales and are reduced immediately.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Union

import numpy as np
from scipy import special as _sc

from . import quad, specfun

_EULER_GAMMA = float(np.euler_gamma)
_ROOT_BUDGET = 200
_NORM_TOL = 1e-11


class ModelError(Exception):
    """Base class for model-layer failures."""


class NonConvergenceError(ModelError):
    """Root iteration exhausted its budget."""


class IntegrityError(ModelError):
    """Closed form and quadrature disagree beyond tolerance: formula bug."""


class DirichletLimit:
    """Explicit tag for the extension parameter -> -infinity limit."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "DirichletLimit"


DIRICHLET = DirichletLimit()

Extension = Union[float, DirichletLimit]


class ModelKind(enum.Enum):
    ROBIN_FREE = "robin"
    COULOMB_POINT = "coulomb"
    OSCILLATOR_POINT = "oscillator"


@dataclass(frozen=True)
class PhysicalScales:
    """hbar, mass and one of {coupling_k, omega}; fixes all prefactors."""

    hbar: float = 1.0
    mass: float = 1.0
    coupling_k: float | None = None
    omega: float | None = None

    def __post_init__(self):
        if self.hbar <= 0.0 or self.mass <= 0.0:
            raise ValueError("hbar and mass must be positive")
        if self.omega is not None and self.omega <= 0.0:
            raise ValueError("omega must be positive")

    @property
    def xi(self) -> float:
        """Coulomb strength 2 m k / hbar^2."""
        if self.coupling_k is None:
            raise ValueError("coupling_k not set on these scales")
        return 2.0 * self.mass * self.coupling_k / self.hbar**2

    @property
    def sigma(self) -> float:
        """Oscillator inverse length sqrt(m omega / hbar)."""
        if self.omega is None:
            raise ValueError("omega not set on these scales")
        return math.sqrt(self.mass * self.omega / self.hbar)


@dataclass(frozen=True)
class ModelSpec:
    kind: ModelKind
    extension: Extension
    scales: PhysicalScales

    def __post_init__(self):
        if self.kind is ModelKind.ROBIN_FREE:
            if isinstance(self.extension, DirichletLimit):
                raise ValueError("Robin free particle has no Dirichlet-limit bound state")
            if self.extension <= 0.0:
                raise ValueError("Robin free particle requires alpha > 0")
        if self.kind is ModelKind.COULOMB_POINT and self.scales.coupling_k is None:
            raise ValueError("Coulomb model requires coupling_k")
        if self.kind is ModelKind.OSCILLATOR_POINT and self.scales.omega is None:
            raise ValueError("oscillator model requires omega")

    # -- convenience constructors in reduced units ---------------------------

    @staticmethod
    def robin_free(alpha: float, hbar: float = 1.0, mass: float = 1.0) -> "ModelSpec":
        return ModelSpec(ModelKind.ROBIN_FREE, alpha, PhysicalScales(hbar, mass))

    @staticmethod
    def coulomb(alpha_over_xi: Extension, xi: float = 1.0,
                hbar: float = 1.0, mass: float = 1.0) -> "ModelSpec":
        if xi == 0.0:
            raise ValueError("xi must be nonzero")
        k = xi * hbar**2 / (2.0 * mass)
        ext = alpha_over_xi if isinstance(alpha_over_xi, DirichletLimit) else alpha_over_xi * xi
        return ModelSpec(ModelKind.COULOMB_POINT, ext,
                         PhysicalScales(hbar, mass, coupling_k=k))

    @staticmethod
    def oscillator(beta_over_sigma: Extension, sigma: float = 1.0,
                   hbar: float = 1.0, mass: float = 1.0) -> "ModelSpec":
        if sigma <= 0.0:
            raise ValueError("sigma must be positive")
        omega = sigma**2 * hbar / mass
        ext = beta_over_sigma if isinstance(beta_over_sigma, DirichletLimit) else beta_over_sigma * sigma
        return ModelSpec(ModelKind.OSCILLATOR_POINT, ext,
                         PhysicalScales(hbar, mass, omega=omega))

    @property
    def extension_ratio(self) -> float:
        """alpha/xi (Coulomb) or beta/sigma (oscillator); -inf for Dirichlet."""
        if isinstance(self.extension, DirichletLimit):
            return -math.inf
        if self.kind is ModelKind.COULOMB_POINT:
            return self.extension / self.scales.xi
        if self.kind is ModelKind.OSCILLATOR_POINT:
            return self.extension / self.scales.sigma
        return self.extension


@dataclass(frozen=True)
class EigenState:
    branch: int
    spectral_param: float  # lambda_n (Coulomb), kappa_n (oscillator), alpha (Robin)
    energy: float
    norm_const: float
    model: ModelSpec


# ---------------------------------------------------------------------------
# Eigenvalue functions
# ---------------------------------------------------------------------------

def f_coulomb(lam: float) -> float:
    """F_C(lambda) = psi(1-lambda) - ln|lambda| + 1/(2 lambda) + 2 gamma - 1.

    Poles at lambda = 0 and at the positive integers; the point spectrum
    solves F_C(lambda) = alpha/xi on the branch with sign(lambda) = sign(xi).
    """
    if lam == 0.0 or (lam > 0.0 and lam == math.floor(lam)):
        raise specfun.PoleError(f"f_coulomb pole at lambda={lam}")
    return (float(_sc.psi(1.0 - lam)) - math.log(abs(lam)) + 0.5 / lam
            + 2.0 * _EULER_GAMMA - 1.0)


def f_harmonic(kappa: float) -> float:
    """F_H(kappa) = Gamma(3/4 - kappa)/Gamma(1/4 - kappa).

    Poles at kappa = 3/4 + n; regular zeros at kappa = 1/4 + n.
    """
    x3 = 0.75 - kappa
    if x3 <= 0.0 and x3 == math.floor(x3):
        raise specfun.PoleError(f"f_harmonic pole at kappa={kappa}")
    x1 = 0.25 - kappa
    if x1 <= 0.0 and x1 == math.floor(x1):
        return 0.0  # pole of the denominator Gamma kills the ratio
    # Form the ratio through logs to dodge overflow for very negative kappa.
    sign = float(_sc.gammasgn(x3) * _sc.gammasgn(x1))
    return sign * math.exp(float(_sc.gammaln(x3)) - float(_sc.gammaln(x1)))


# ---------------------------------------------------------------------------
# Bracketed root finding (safeguarded secant/bisection hybrid)
# ---------------------------------------------------------------------------

def _solve_bracketed(f, lo: float, hi: float, target: float,
                     budget: int = _ROOT_BUDGET) -> float:
    """Find x in (lo, hi) with f(x) = target; f(lo), f(hi) must straddle it.

    Secant steps are taken while they stay inside the shrinking bracket,
    with bisection as the safeguard, so no monotonicity is assumed.
    """
    tol_resid = 1e-13 * max(1.0, abs(target))
    fa = f(lo) - target
    fb = f(hi) - target
    if fa == 0.0:
        return lo
    if fb == 0.0:
        return hi
    if math.copysign(1.0, fa) == math.copysign(1.0, fb):
        raise NonConvergenceError(
            f"no sign change on bracket ({lo}, {hi}) for target {target}")
    a, b = lo, hi
    x_prev, f_prev = a, fa
    x_cur, f_cur = b, fb
    for _ in range(budget):
        # secant proposal from the two most recent iterates
        denom = f_cur - f_prev
        if denom != 0.0:
            x_new = x_cur - f_cur * (x_cur - x_prev) / denom
        else:
            x_new = 0.5 * (a + b)
        if not (a < x_new < b):
            x_new = 0.5 * (a + b)
        f_new = f(x_new) - target
        if abs(f_new) <= tol_resid:
            return x_new
        if math.copysign(1.0, f_new) == math.copysign(1.0, fa):
            a = x_new
        else:
            b = x_new
        x_prev, f_prev = x_cur, f_cur
        x_cur, f_cur = x_new, f_new
        if b - a <= 8.0 * math.ulp(max(abs(a), abs(b))):
            return 0.5 * (a + b)
    raise NonConvergenceError(
        f"root iteration budget {budget} exhausted on ({lo}, {hi})")


def _bracket_endpoint(f, pole: float, side: int, target: float) -> float:
    """Endpoint near `pole` where f is already past the target.

    Every branch of F_C and F_H runs from +inf (left pole) down to -inf
    (right pole), so side=+1 needs f > target and side=-1 needs f < target;
    the offset shrinks until that holds.
    """
    for k in range(9, 15):
        x = pole + side * 10.0 ** (-k) * max(1.0, abs(pole))
        try:
            val = f(x)
        except specfun.PoleError:
            continue
        if not math.isfinite(val):
            continue
        if (side > 0 and val > target) or (side < 0 and val < target):
            return x
    raise NonConvergenceError(
        f"could not seed a bracket near pole {pole} for target {target}")


# ---------------------------------------------------------------------------
# Solvers
# ---------------------------------------------------------------------------

def solve_coulomb_branch(spec: ModelSpec, n: int) -> EigenState | None:
    """The single root of branch n, or None when the branch is empty.

    For xi < 0 only branch 0 can hold a state, and it does iff
    alpha/xi < 2*gamma - 1.
    """
    if spec.kind is not ModelKind.COULOMB_POINT:
        raise ValueError("spec is not a Coulomb model")
    xi = spec.scales.xi
    if isinstance(spec.extension, DirichletLimit):
        if xi < 0.0:
            return None  # repulsive Coulomb with Dirichlet walls binds nothing
        return _make_coulomb_state(spec, n, float(n + 1))
    target = spec.extension_ratio
    if xi > 0.0:
        lo = _bracket_endpoint(f_coulomb, float(n), +1, target)
        hi = _bracket_endpoint(f_coulomb, float(n + 1), -1, target)
        lam = _solve_bracketed(f_coulomb, lo, hi, target)
        return _make_coulomb_state(spec, n, lam)
    # repulsive case: F_C on (-inf, 0) rises from -inf to the asymptote
    if n > 0 or target >= 2.0 * _EULER_GAMMA - 1.0:
        return None
    hi = _bracket_endpoint(f_coulomb, 0.0, -1, target)
    lo = -1.0
    for _ in range(80):
        if f_coulomb(lo) > target:
            break
        lo *= 2.0
    else:
        return None
    lam = _solve_bracketed(f_coulomb, lo, hi, target)
    return _make_coulomb_state(spec, 0, lam)


def solve_coulomb_eigenvalues(spec: ModelSpec, n_max: int) -> list[EigenState]:
    """Bound states of the point-interaction Coulomb Hamiltonian.

    xi > 0: one root per branch (n, n+1), n = 0..n_max-1.
    xi < 0: at most one state, on lambda < 0, existing iff alpha/xi < 2*gamma - 1.
    The Dirichlet limit returns the pole locations lambda_n = 1..n_max exactly.
    """
    states = []
    for n in range(n_max):
        st = solve_coulomb_branch(spec, n)
        if st is not None:
            states.append(st)
    return states


def solve_oscillator_branch(spec: ModelSpec, n: int) -> EigenState:
    """The single root of oscillator branch n (never empty)."""
    if spec.kind is not ModelKind.OSCILLATOR_POINT:
        raise ValueError("spec is not an oscillator model")
    if isinstance(spec.extension, DirichletLimit):
        return _make_oscillator_state(spec, n, n + 0.75)
    target = spec.extension_ratio
    right_pole = 0.75 + n
    hi = _bracket_endpoint(f_harmonic, right_pole, -1, target)
    if n == 0:
        lo = -1.0
        for _ in range(80):
            if f_harmonic(lo) > target:
                break
            lo *= 2.0
        else:
            raise NonConvergenceError("left expansion failed for oscillator branch 0")
    else:
        lo = _bracket_endpoint(f_harmonic, right_pole - 1.0, +1, target)
    kappa = _solve_bracketed(f_harmonic, lo, hi, target)
    return _make_oscillator_state(spec, n, kappa)


def solve_oscillator_eigenvalues(spec: ModelSpec, n_max: int) -> list[EigenState]:
    """Bound states of the point-interaction oscillator.

    Branch 0 is (-inf, 3/4); branch n >= 1 is (n - 1/4, n + 3/4).  Every
    branch carries exactly one root for any beta/sigma; the Dirichlet
    limit returns kappa_n = n + 3/4 exactly.
    """
    return [solve_oscillator_branch(spec, n) for n in range(n_max)]


def robin_free_eigenstate(spec: ModelSpec) -> EigenState:
    """The single bound state of the Robin half-line free particle."""
    if spec.kind is not ModelKind.ROBIN_FREE:
        raise ValueError("spec is not a Robin free-particle model")
    alpha = float(spec.extension)
    hbar, m = spec.scales.hbar, spec.scales.mass
    energy = -(hbar * alpha) ** 2 / (2.0 * m)
    return EigenState(branch=0, spectral_param=alpha, energy=energy,
                      norm_const=math.sqrt(2.0 * alpha), model=spec)


def _coulomb_energy(spec: ModelSpec, lam: float) -> float:
    k = spec.scales.coupling_k
    return -(spec.scales.mass * k * k / (2.0 * spec.scales.hbar**2)) / lam**2


def _make_coulomb_state(spec: ModelSpec, branch: int, lam: float) -> EigenState:
    n = _norm_quadrature(spec, lam)
    return EigenState(branch=branch, spectral_param=lam,
                      energy=_coulomb_energy(spec, lam), norm_const=n, model=spec)


def _make_oscillator_state(spec: ModelSpec, branch: int, kappa: float) -> EigenState:
    energy = 2.0 * kappa * spec.scales.hbar * spec.scales.omega
    n = _norm_quadrature(spec, kappa)
    return EigenState(branch=branch, spectral_param=kappa, energy=energy,
                      norm_const=n, model=spec)


# ---------------------------------------------------------------------------
# Eigenfunctions and normalization
# ---------------------------------------------------------------------------

def _eval_unnormalized(spec: ModelSpec, sp: float, r: float) -> float:
    if spec.kind is ModelKind.ROBIN_FREE:
        return math.exp(-sp * r)
    if spec.kind is ModelKind.COULOMB_POINT:
        xi = spec.scales.xi
        return specfun.whittaker_w(sp, 0.5, xi * r / sp).value
    sigma = spec.scales.sigma
    z = (sigma * r) ** 2
    return specfun.whittaker_w(sp, 0.25, z).value / math.sqrt(sigma * r)


def eval_eigenfunction(state: EigenState, r: float) -> float:
    """Normalized reduced radial wave function phi_n(r), r > 0."""
    if r <= 0.0:
        raise specfun.DomainError(f"eigenfunction requires r > 0, got r={r}")
    return state.norm_const * _eval_unnormalized(state.model, state.spectral_param, r)


def _norm_quadrature(spec: ModelSpec, sp: float) -> float:
    """Normalization from quadrature of |phi|^2 (the source of truth).

    Two-stage: a coarse pass sizes the integral so the final absolute
    tolerance sits above the eigenfunction's evaluation-noise floor while
    still giving N to much better than 1e-8 relative.
    """
    if spec.kind is ModelKind.ROBIN_FREE:
        return math.sqrt(2.0 * sp)

    def u2(r: float) -> float:
        return _eval_unnormalized(spec, sp, r) ** 2

    coarse = quad.integrate_semi_infinite(u2, 0.0, tol=1e-6)
    tol = max(_NORM_TOL, 1e-12 * abs(coarse.value))
    res = quad.integrate_semi_infinite(u2, 0.0, tol=tol)
    return 1.0 / math.sqrt(res.value)


def _norm_closed_form_sq(spec: ModelSpec, sp: float) -> float:
    """Closed-form N^2, with the Dirichlet poles handled by their limits."""
    if spec.kind is ModelKind.ROBIN_FREE:
        return 2.0 * sp
    if spec.kind is ModelKind.COULOMB_POINT:
        xi = spec.scales.xi
        lam = sp
        if lam > 0.0 and lam == math.floor(lam):
            n = int(lam)  # limit through the Gamma/trigamma poles
            return xi / (2.0 * n * math.factorial(n) ** 2)
        g = float(_sc.gamma(-lam))
        denom = 2.0 * lam * float(_sc.polygamma(1, -lam)) + 2.0 - 1.0 / lam
        return xi * g * g / denom
    sigma = spec.scales.sigma
    kappa = sp
    x3, x1 = 0.75 - kappa, 0.25 - kappa
    if x3 <= 0.0 and x3 == math.floor(x3):
        n = int(-x3)
        return (2.0 * sigma / math.pi) * abs(float(_sc.gamma(-0.5 - n))) / math.factorial(n)
    return (2.0 * sigma / math.pi) * float(_sc.gamma(x3)) * float(_sc.gamma(x1)) / (
        float(_sc.psi(x3)) - float(_sc.psi(x1)))


def normalization_constant(state: EigenState) -> float:
    """N such that the eigenfunction is unit-normalized, cross-validated.

    Quadrature is authoritative; the closed forms must agree to 1e-6 or an
    IntegrityError flags a transcription/special-function bug.
    """
    n_quad = _norm_quadrature(state.model, state.spectral_param)
    n2_closed = _norm_closed_form_sq(state.model, state.spectral_param)
    if n2_closed <= 0.0:
        raise IntegrityError(
            f"closed-form N^2 = {n2_closed} is not positive for {state!r}")
    n_closed = math.sqrt(n2_closed)
    if abs(n_closed - n_quad) > 1e-6 * n_quad:
        raise IntegrityError(
            f"normalization mismatch: quadrature {n_quad!r} vs closed form "
            f"{n_closed!r} for spectral_param={state.spectral_param}")
    return n_quad


def boundary_values(state: EigenState) -> tuple[float, float | None]:
    """(phi(0+), phi'(0+)) from the closed small-r behavior.

    The Coulomb derivative is logarithmically divergent for finite alpha,
    reported as None; callers use the regularized machinery instead.
    """
    spec = state.model
    n = state.norm_const
    if spec.kind is ModelKind.ROBIN_FREE:
        return n, -state.spectral_param * n
    if spec.kind is ModelKind.OSCILLATOR_POINT:
        kappa = state.spectral_param
        sigma = spec.scales.sigma
        sqpi = math.sqrt(math.pi)
        phi0 = n * sqpi * float(_sc.rgamma(0.75 - kappa))
        dphi0 = -2.0 * n * sqpi * sigma * float(_sc.rgamma(0.25 - kappa))
        return phi0, dphi0
    lam = state.spectral_param
    phi0 = n * float(_sc.rgamma(1.0 - lam))
    if lam > 0.0 and lam == math.floor(lam):
        # Dirichlet limit: phi(0) = 0 with a finite slope
        m = int(lam) - 1
        u0 = float((-1.0) ** m * math.factorial(m + 1))
        return 0.0, n * (spec.scales.xi / lam) * u0
    return phi0, None


def extension_alpha(state: EigenState) -> float:
    """The Coulomb extension parameter alpha = xi * F_C(lambda_n) of a state."""
    spec = state.model
    if spec.kind is not ModelKind.COULOMB_POINT:
        raise ValueError("extension_alpha applies to Coulomb states")
    if isinstance(spec.extension, DirichletLimit):
        raise ValueError("Dirichlet-limit states have alpha -> -infinity")
    return float(spec.extension)
