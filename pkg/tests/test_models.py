"""Eigenvalue functions, branch-aware solvers and eigenfunction tests."""

import math

import numpy as np
import pytest

from virial_anomaly import models, quad, specfun
from virial_anomaly.models import (
    DIRICHLET,
    ModelSpec,
    eval_eigenfunction,
    f_coulomb,
    f_harmonic,
    normalization_constant,
    robin_free_eigenstate,
    solve_coulomb_eigenvalues,
    solve_oscillator_eigenvalues,
)

EULER_GAMMA = float(np.euler_gamma)


def bisect_root(f, lo: float, hi: float, target: float, tol: float = 1e-13) -> float:
    """Plain bisection oracle, independent of the package's hybrid solver."""
    flo = f(lo) - target
    assert (flo > 0) != (f(hi) - target > 0)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid) - target
        if abs(hi - lo) < tol:
            return mid
        if (fm > 0) == (flo > 0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Eigenvalue functions
# ---------------------------------------------------------------------------

def test_f_coulomb_asymptote():
    # F_C -> 2*gamma - 1 as lambda -> -inf, with an O(1/lambda^2) approach
    assert abs(f_coulomb(-1e4) - (2.0 * EULER_GAMMA - 1.0)) <= 1e-8


def test_f_coulomb_hand_value():
    # F_C(1/2) = psi(1/2) - ln(1/2) + 1 + 2g - 1 = gamma - ln 2
    assert f_coulomb(0.5) == pytest.approx(EULER_GAMMA - math.log(2.0), abs=1e-13)


def test_f_coulomb_pole_structure():
    # psi(1-lambda) pole at lambda = 1: -inf from the left, +inf from the right
    assert f_coulomb(1.0 - 1e-9) < -1e6
    assert f_coulomb(1.0 + 1e-9) > 1e6
    for lam in (0.0, 1.0, 2.0, 5.0):
        with pytest.raises(specfun.PoleError):
            f_coulomb(lam)


def test_f_harmonic_values():
    assert f_harmonic(0.0) == pytest.approx(0.3379891200336423, rel=1e-12)
    assert f"{f_harmonic(0.0):.6f}" == "0.337989"
    assert f_harmonic(0.25) == 0.0
    assert f_harmonic(-0.75) == pytest.approx(math.sqrt(math.pi) / 2.0, rel=1e-13)
    with pytest.raises(specfun.PoleError):
        f_harmonic(0.75)
    with pytest.raises(specfun.PoleError):
        f_harmonic(3.75)


# ---------------------------------------------------------------------------
# Coulomb solver
# ---------------------------------------------------------------------------

def test_coulomb_dirichlet_recovers_hydrogen():
    spec = ModelSpec.coulomb(DIRICHLET, xi=1.0)
    states = solve_coulomb_eigenvalues(spec, 3)
    k = spec.scales.coupling_k
    for n, st in enumerate(states, start=1):
        assert st.spectral_param == float(n)
        assert st.energy == pytest.approx(-k * k / (2.0 * n * n), rel=1e-14)


def test_coulomb_root_against_bisection_oracle():
    spec = ModelSpec.coulomb(0.5, xi=1.0)
    st = solve_coulomb_eigenvalues(spec, 1)[0]
    lam_oracle = bisect_root(f_coulomb, 1e-9, 1.0 - 1e-9, 0.5)
    assert st.spectral_param == pytest.approx(lam_oracle, abs=1e-12)


def test_coulomb_root_residuals():
    for aox in (-2.0, -0.3, 0.0, 0.7, 3.0):
        spec = ModelSpec.coulomb(aox, xi=1.0)
        for st in solve_coulomb_eigenvalues(spec, 4):
            resid = abs(f_coulomb(st.spectral_param) - aox)
            assert resid <= 1e-12 * max(1.0, abs(aox))


def test_repulsive_coulomb_single_state():
    spec = ModelSpec.coulomb(0.0, xi=-1.0)
    states = solve_coulomb_eigenvalues(spec, 5)
    assert len(states) == 1
    assert states[0].spectral_param < 0.0
    # threshold: no state at or above 2*gamma - 1
    assert solve_coulomb_eigenvalues(ModelSpec.coulomb(0.2, xi=-1.0), 5) == []
    assert solve_coulomb_eigenvalues(
        ModelSpec.coulomb(2.0 * EULER_GAMMA - 1.0, xi=-1.0), 5) == []


def test_repulsive_threshold_side():
    spec = ModelSpec.coulomb(0.15, xi=-1.0)  # just below 0.15443...
    states = solve_coulomb_eigenvalues(spec, 1)
    assert len(states) == 1
    assert f_coulomb(states[0].spectral_param) == pytest.approx(0.15, abs=1e-12)


def test_coulomb_sign_invariant():
    for aox, xi in ((0.5, 1.0), (0.0, -1.0)):
        for st in solve_coulomb_eigenvalues(ModelSpec.coulomb(aox, xi=xi), 2):
            assert math.copysign(1.0, st.spectral_param) == math.copysign(1.0, xi)


# ---------------------------------------------------------------------------
# Oscillator solver
# ---------------------------------------------------------------------------

def test_oscillator_neumann_and_dirichlet():
    neu = solve_oscillator_eigenvalues(ModelSpec.oscillator(0.0), 6)
    for n, st in enumerate(neu):
        assert st.spectral_param == pytest.approx(n + 0.25, abs=1e-12)
        assert st.energy == pytest.approx(2.0 * (n + 0.25), abs=1e-11)
    dir_ = solve_oscillator_eigenvalues(ModelSpec.oscillator(DIRICHLET), 6)
    for n, st in enumerate(dir_):
        assert st.spectral_param == n + 0.75


def test_oscillator_negative_energy_threshold():
    k34 = solve_oscillator_eigenvalues(ModelSpec.oscillator(0.34), 1)[0]
    k33 = solve_oscillator_eigenvalues(ModelSpec.oscillator(0.33), 1)[0]
    assert k34.spectral_param < 0.0
    assert k33.spectral_param > 0.0


def test_oscillator_root_residuals():
    for bos in (-2.0, -0.5, 0.3, 0.5):
        spec = ModelSpec.oscillator(bos)
        for st in solve_oscillator_eigenvalues(spec, 4):
            assert abs(f_harmonic(st.spectral_param) - bos) <= 1e-12 * max(1.0, abs(bos))


def test_oscillator_monotone_interlacing():
    """kappa_n(beta) strictly monotone in beta/sigma within each branch and
    interlaced with the poles at 3/4 + n.

    F_H is decreasing across every branch, so raising the target beta/sigma
    moves each root left (the Dirichlet limit beta -> -inf sits at the top
    of the branch); criterion "0.34 -> kappa_0 < 0 < kappa_0(0.33)" pins the
    same direction.
    """
    targets = np.linspace(-2.5, 2.5, 9)
    prev = None
    for bos in targets:
        roots = [st.spectral_param
                 for st in solve_oscillator_eigenvalues(ModelSpec.oscillator(bos), 4)]
        for n, kap in enumerate(roots):
            assert kap < 0.75 + n
            if n > 0:
                assert roots[n - 1] < 0.75 + (n - 1) < kap
        if prev is not None:
            for a, b in zip(prev, roots):
                assert b < a  # decreasing in beta/sigma
        prev = roots


def test_branch_completeness_scan():
    """Scanning the extension never drops or duplicates roots: the count of
    roots below a fixed energy cutoff moves by at most 1 between neighbors."""
    from virial_anomaly.models import _bracket_endpoint, _solve_bracketed
    cutoff_kappa = 5.75  # energy cutoff E < 2*kappa*hbar*omega
    counts = []
    for bos in np.linspace(-3.0, 3.0, 50):
        count = 0
        for n in range(8):
            hi = _bracket_endpoint(f_harmonic, 0.75 + n, -1, bos)
            if n == 0:
                lo = -2.0
                while f_harmonic(lo) <= bos:
                    lo *= 2.0
            else:
                lo = _bracket_endpoint(f_harmonic, 0.75 + n - 1.0, +1, bos)
            kap = _solve_bracketed(f_harmonic, lo, hi, bos)
            if kap < cutoff_kappa:
                count += 1
        counts.append(count)
    diffs = np.abs(np.diff(counts))
    assert diffs.max() <= 1


# ---------------------------------------------------------------------------
# Robin free particle
# ---------------------------------------------------------------------------

def test_robin_eigenstate():
    st = robin_free_eigenstate(ModelSpec.robin_free(1.0))
    assert st.energy == -0.5
    assert st.norm_const == pytest.approx(math.sqrt(2.0), rel=1e-15)
    st2 = robin_free_eigenstate(ModelSpec.robin_free(2.0))
    assert st2.energy == -2.0


def test_robin_normalization_quadrature():
    st = robin_free_eigenstate(ModelSpec.robin_free(1.3))
    res = quad.integrate_semi_infinite(
        lambda x: eval_eigenfunction(st, x) ** 2, 0.0, tol=1e-12)
    assert res.value == pytest.approx(1.0, abs=1e-11)


def test_robin_requires_positive_alpha():
    with pytest.raises(ValueError):
        ModelSpec.robin_free(-1.0)
    with pytest.raises(ValueError):
        ModelSpec.robin_free(0.0)


# ---------------------------------------------------------------------------
# Eigenfunctions
# ---------------------------------------------------------------------------

def test_eigenfunction_robin_closed_form():
    st = robin_free_eigenstate(ModelSpec.robin_free(1.0))
    assert eval_eigenfunction(st, 1.0) == pytest.approx(
        math.sqrt(2.0) * math.exp(-1.0), rel=1e-13)


def test_eigenfunction_oscillator_dirichlet_shape():
    # ground state is proportional to r * exp(-sigma^2 r^2 / 2)
    st = solve_oscillator_eigenvalues(ModelSpec.oscillator(DIRICHLET), 1)[0]
    ref = lambda r: r * math.exp(-0.5 * r * r)
    base = eval_eigenfunction(st, 0.5) / ref(0.5)
    for r in (1.0, 2.0):
        assert eval_eigenfunction(st, r) / ref(r) == pytest.approx(base, rel=1e-10)


def test_eigenfunction_coulomb_hydrogen_ratio():
    # lambda = 1 reduced function is proportional to xi r e^{-xi r/2}
    xi = 1.0
    st = solve_coulomb_eigenvalues(ModelSpec.coulomb(DIRICHLET, xi=xi), 1)[0]
    ratio = eval_eigenfunction(st, 2.0) / eval_eigenfunction(st, 1.0)
    assert ratio == pytest.approx(2.0 * math.exp(-xi / 2.0), rel=1e-11)


def test_eigenfunction_domain_error():
    st = robin_free_eigenstate(ModelSpec.robin_free(1.0))
    with pytest.raises(specfun.DomainError):
        eval_eigenfunction(st, 0.0)
    with pytest.raises(specfun.DomainError):
        eval_eigenfunction(st, -1.0)


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("make_state", [
    lambda: robin_free_eigenstate(ModelSpec.robin_free(1.0)),
    lambda: solve_oscillator_eigenvalues(ModelSpec.oscillator(0.0), 1)[0],
    lambda: solve_oscillator_eigenvalues(ModelSpec.oscillator(0.5), 2)[1],
    lambda: solve_coulomb_eigenvalues(ModelSpec.coulomb(0.5, xi=1.0), 1)[0],
    lambda: solve_coulomb_eigenvalues(ModelSpec.coulomb(0.0, xi=-1.0), 1)[0],
    lambda: solve_coulomb_eigenvalues(ModelSpec.coulomb(DIRICHLET, xi=1.0), 2)[1],
], ids=["robin", "osc-neumann", "osc-excited", "coulomb", "coulomb-repulsive",
        "coulomb-dirichlet"])
def test_states_are_unit_normalized(make_state):
    st = make_state()
    res = quad.integrate_semi_infinite(
        lambda r: eval_eigenfunction(st, r) ** 2, 0.0, tol=1e-11)
    assert res.value == pytest.approx(1.0, abs=1e-8)


def test_normalization_constant_cross_checks():
    # closed forms must confirm the quadrature for all three systems,
    # including the repulsive branch where the paper's denominator sign
    # is only settled numerically
    st = solve_coulomb_eigenvalues(ModelSpec.coulomb(0.5, xi=1.0), 1)[0]
    assert normalization_constant(st) == pytest.approx(st.norm_const, rel=1e-12)
    st = solve_coulomb_eigenvalues(ModelSpec.coulomb(0.0, xi=-1.0), 1)[0]
    assert normalization_constant(st) == pytest.approx(st.norm_const, rel=1e-12)
    st = solve_oscillator_eigenvalues(ModelSpec.oscillator(0.0), 1)[0]
    assert normalization_constant(st) == pytest.approx(st.norm_const, rel=1e-12)
    # hydrogen limit fixes the branch handling: N^2 = xi/2
    st = solve_coulomb_eigenvalues(ModelSpec.coulomb(DIRICHLET, xi=1.0), 1)[0]
    assert normalization_constant(st) ** 2 == pytest.approx(0.5, rel=1e-10)


def test_normalization_integrity_error(monkeypatch):
    st = solve_oscillator_eigenvalues(ModelSpec.oscillator(0.0), 1)[0]
    monkeypatch.setattr(models, "_norm_closed_form_sq", lambda spec, sp: 1.2345)
    with pytest.raises(models.IntegrityError):
        normalization_constant(st)


# ---------------------------------------------------------------------------
# Small-r behavior
# ---------------------------------------------------------------------------

def test_oscillator_boundary_condition_residual():
    """phi'(0) + 2 beta phi(0) = 0, with the boundary data extrapolated
    one-sidedly from r in [1e-6, 1e-3]."""
    for bos in (-1.0, 0.3, 0.5):
        spec = ModelSpec.oscillator(bos)
        for st in solve_oscillator_eigenvalues(spec, 2):
            rs = np.array([1e-3, 7.5e-4, 5e-4, 2.5e-4, 1e-4, 1e-6])
            vals = np.array([eval_eigenfunction(st, r) for r in rs])
            coef = np.polynomial.polynomial.polyfit(rs / 1e-3, vals, 4)
            phi0 = coef[0]
            dphi0 = coef[1] / 1e-3
            beta = bos * spec.scales.sigma
            resid = abs(dphi0 + 2.0 * beta * phi0)
            assert resid / max(abs(dphi0), abs(2.0 * beta * phi0), 1e-30) <= 1e-6


def test_coulomb_domain_expansion():
    """phi(r)/phi(0) = 1 - xi r ln(|xi| r) - alpha r + o(r) with alpha the
    F_C extension parameter (the sign is fixed by the anomaly cancellation;
    see the decisions ledger for the conflict with the quoted domain)."""
    aox, xi = 0.5, 1.0
    spec = ModelSpec.coulomb(aox, xi=xi)
    st = solve_coulomb_eigenvalues(spec, 1)[0]
    alpha = float(spec.extension)
    phi0 = st.norm_const / math.gamma(1.0 - st.spectral_param)
    residuals = []
    for r in (1e-4, 1e-6, 1e-8):
        phi = eval_eigenfunction(st, r)
        g = phi / phi0 - (1.0 - xi * r * math.log(abs(xi) * r) - alpha * r)
        residuals.append(abs(g))
    assert residuals[0] < 1e-6
    assert residuals[1] < 1e-10
    assert residuals[2] < 1e-13  # o(r): vanishes faster than r itself
    assert residuals[2] < residuals[1] < residuals[0]


# ---------------------------------------------------------------------------
# Scales plumbing
# ---------------------------------------------------------------------------

def test_physical_scales_reduction():
    s = models.PhysicalScales(hbar=2.0, mass=3.0, coupling_k=0.5)
    assert s.xi == pytest.approx(2.0 * 3.0 * 0.5 / 4.0)
    s = models.PhysicalScales(hbar=2.0, mass=3.0, omega=1.5)
    assert s.sigma == pytest.approx(math.sqrt(3.0 * 1.5 / 2.0))
    with pytest.raises(ValueError):
        models.PhysicalScales(hbar=-1.0, mass=1.0)
    with pytest.raises(ValueError):
        models.PhysicalScales(hbar=1.0, mass=1.0, omega=-2.0)


def test_dimensionful_scales_match_reduced():
    # spectra depend only on alpha/xi; dimensionful inputs reduce to the same roots
    a = solve_coulomb_eigenvalues(ModelSpec.coulomb(0.5, xi=1.0), 2)
    b = solve_coulomb_eigenvalues(ModelSpec.coulomb(0.5, xi=2.0, hbar=1.5, mass=0.7), 2)
    for sa, sb in zip(a, b):
        assert sa.spectral_param == pytest.approx(sb.spectral_param, rel=1e-12)
