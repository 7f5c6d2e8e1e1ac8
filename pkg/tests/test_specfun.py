import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hpk.specfun import (ConvergenceError, GammaPoleError, HpParams, arccot,
                         cgamma, ferrer_orders, ferrer_p, gamma_abs2_1pim,
                         hyp2f1, phi_eigen, phi_flat_form, phi_flat_principal,
                         phi_series_form, rgamma, romanovski, speed_density,
                         stationary_density, weight_w)
from hpk.quad import QuadConfig, integrate

mp.mp.dps = 30


# ------------------------------------------------------------------ params

def test_hp_params_charts_consistent():
    p = HpParams(A=-1.0, K=1.0)
    assert p.alpha == 1.5 and p.mu == -1.5 and p.nu == 0.5
    assert p.alpha + p.mu == 0.0
    assert p.K == 2.0 * p.nu
    assert p.A == p.mu + 0.5


@settings(deadline=None, max_examples=50)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_hp_params_constructors_agree(a, k):
    p = HpParams(a, k)
    r = HpParams.from_alpha(p.alpha, k)
    q = HpParams.from_mu_nu(p.mu, p.nu)
    for other in (r, q):
        assert math.isclose(other.A, p.A, rel_tol=0, abs_tol=1e-15)
        assert math.isclose(other.K, p.K, rel_tol=0, abs_tol=1e-15)


# ------------------------------------------------------------------- gamma

def test_gamma_half_integer_and_factorial():
    assert abs(cgamma(0.5) - math.sqrt(math.pi)) < 1e-13
    assert abs(cgamma(5.0) - 24.0) < 24.0 * 1e-13


def test_gamma_reflection_product():
    # Gamma(1+im) Gamma(1-im) = pi m / sinh(pi m), m = 1
    got = cgamma(1 + 1j) * cgamma(1 - 1j)
    want = math.pi / math.sinh(math.pi)
    assert abs(got - want) < 1e-12
    assert abs(gamma_abs2_1pim(1.0) - want) < 1e-14


def test_gamma_accuracy_grid_vs_mpmath():
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(120):
        z = complex(rng.uniform(-20, 20), rng.uniform(-20, 20))
        if abs(z.imag) < 1e-2 and z.real <= 0.5:
            continue  # stay off the pole line
        got = cgamma(z)
        want = complex(mp.gamma(z))
        worst = max(worst, abs(got - want) / abs(want))
    assert worst < 1e-12   # >= 12 significant digits


def test_gamma_pole_raises():
    for z in (0.0, -1.0, -7.0):
        with pytest.raises(GammaPoleError):
            cgamma(z)


def test_rgamma_zero_at_poles():
    assert rgamma(0.0) == 0.0
    assert rgamma(-4.0) == 0.0
    assert abs(rgamma(0.5) - 1.0 / math.sqrt(math.pi)) < 1e-13
    z = 2.3 - 1.1j
    assert abs(rgamma(z) - 1.0 / complex(mp.gamma(z))) < 1e-13


# ------------------------------------------------------------------- 2F1

def test_hyp2f1_empty_series():
    assert hyp2f1(0.3 + 1j, -2.2, 1.7, 0.0) == 1.0


def test_hyp2f1_degree_one_polynomial():
    b, c, z = 1.3 - 0.4j, 0.9 + 0.2j, 0.77 + 0.5j
    assert abs(hyp2f1(-1.0, b, c, z) - (1.0 - b * z / c)) < 1e-14


def test_hyp2f1_log_value():
    # 2F1(1,1;2;z) = -log(1-z)/z; cross-checked by direct 200-term sum
    got = hyp2f1(1.0, 1.0, 2.0, 0.5)
    want = 2.0 * math.log(2.0)
    direct = sum(0.5 ** n / (n + 1.0) for n in range(200))
    assert abs(want - direct) < 1e-15
    assert abs(got - want) < 1e-13


@settings(deadline=None, max_examples=60)
@given(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
       st.complex_numbers(min_magnitude=0.3, max_magnitude=3,
                          allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=0.8, allow_nan=False, allow_infinity=False))
def test_hyp2f1_vs_mpmath(a, b, c, z):
    # keep c away from the pole line
    if abs(c.imag) < 0.05 and c.real < 0.5:
        c = c + 1.5
    got = hyp2f1(a, b, c, z)
    want = complex(mp.hyp2f1(a, b, c, z))
    assert abs(got - want) <= 1e-11 * max(1.0, abs(want))


def test_hyp2f1_c_pole_raises_unless_terminated():
    with pytest.raises(GammaPoleError):
        hyp2f1(0.3, 0.7, -2.0, 0.4)
    # terminating numerator saves it
    got = hyp2f1(-1.0, 0.7, -2.0, 0.4)
    assert abs(got - (1.0 - 0.7 * 0.4 / -2.0)) < 1e-14


def test_hyp2f1_domain_errors():
    with pytest.raises(ValueError):
        hyp2f1(0.3, 0.7, 1.9, 1.5 + 0.5j)
    with pytest.raises(ValueError):
        hyp2f1(0.3, 0.7, 1.9, -1.2)


# ---------------------------------------------------------------- Ferrers

def test_ferrer_legendre_polynomials():
    assert abs(ferrer_p(1.0, 0.0, 0.3) - 0.3) < 1e-14
    assert abs(ferrer_p(2.0, 0.0, 0.0) - (-0.5)) < 1e-14


def test_ferrer_direct_series_oracle():
    # independent oracle: summation of the defining series to 1e-12 tail
    alpha, order, x = 1.5, -1j, 0.2
    tot = mp.mpc(0)
    term = mp.mpc(1)
    z = mp.mpf((1 - x) / 2)
    a, b, c = -alpha, 1 + alpha, 1 - order
    n = 0
    while abs(term) > 1e-40 * (1 + abs(tot)):
        tot += term
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        n += 1
        if n > 4000:
            break
    want = complex(((1 + x) / (1 - x)) ** (order / 2) / mp.gamma(1 - order) * tot)
    got = ferrer_p(alpha, order, x)
    assert abs(got - want) < 1e-12 * abs(want)


@pytest.mark.parametrize("alpha,order,x", [
    (1.5, -0.5j, 0.3),
    (1.5, -0.5j, -0.92),          # connected branch
    (2.5, 1.0 - 2.5, -0.6),
    (3.7, 2.0 - 3.7, -0.97),      # connected branch, real order
    (0.7, -2.0j, -0.99),
    (3.0, -1.3j, -0.8),           # integer degree, terminating series
    (2.0, 0.5, 0.4),              # integer degree, real order
    (1.2, -1.0, -0.95),           # integer-order fallback on the left
])
def test_ferrer_vs_mpmath(alpha, order, x):
    got = ferrer_p(alpha, order, x)
    want = complex(mp.legenp(alpha, order, x, type=2))
    assert abs(got - want) <= 1e-10 * max(1.0, abs(want))


def test_ferrer_conjugation_symmetry():
    for (alpha, m, x) in [(1.5, 0.7, 0.4), (2.2, 1.3, -0.85)]:
        a = ferrer_p(alpha, complex(0, -m), x)
        b = ferrer_p(alpha, complex(0, m), x)
        assert abs(a - np.conj(b)) < 1e-12 * abs(a)


def test_ferrer_errors():
    with pytest.raises(ValueError):
        ferrer_p(1.5, 0.0, 1.0)
    with pytest.raises(GammaPoleError):
        ferrer_p(1.5, 2.0, 0.3)     # 1 - order = -1


def test_ferrer_orders_vectorized_matches_scalar():
    orders = np.array([-0.5j, -1.5j, 0.3 + 0j])
    for x in (0.5, -0.9):
        vec = ferrer_orders(1.7, orders, x)
        for o, v in zip(orders, vec):
            assert abs(v - ferrer_p(1.7, o, x)) < 1e-13 * max(1.0, abs(v))


# ------------------------------------------------------------- Romanovski

def test_romanovski_degree_zero():
    assert romanovski(0, 2.2, 1.3, 0.7) == 1.0


def test_romanovski_degree_one_closed_form():
    # d/du (1+u^2)^(1/2-alpha) times the Rodrigues prefactor gives (1-2a)u
    for alpha, u in [(2.5, 0.7), (3.7, -1.1)]:
        assert abs(romanovski(1, alpha, 0.0, u) - (1.0 - 2.0 * alpha) * u) < 1e-12


def test_romanovski_degree_two_value():
    # R_2 = (3-2a) + (3-2a)(2-2a) u^2 at a=3, u=1: -3 + (-3)(-4) = 9
    assert abs(romanovski(2, 3.0, 0.0, 1.0) - 9.0) < 1e-12


def test_romanovski_rodrigues_oracle():
    # Rodrigues derivative via mpmath numerical differentiation
    for (n, alpha, u) in [(1, 2.5, 0.4), (2, 3.7, -0.8), (3, 3.7, 1.2)]:
        f = lambda t: (1 + t * t) ** (n - alpha - mp.mpf(1) / 2)
        want = float((1 + u * u) ** (alpha + mp.mpf(1) / 2) * mp.diff(f, mp.mpf(u), n))
        assert abs(romanovski(n, alpha, 0.0, u) - want) < 1e-9 * (1 + abs(want))


def test_romanovski_parity():
    for n in range(4):
        for u in (0.3, 1.7):
            a = romanovski(n, 3.7, 0.0, -u)
            b = (-1.0) ** n * romanovski(n, 3.7, 0.0, u)
            assert abs(a - b) < 1e-12 * (1 + abs(b))


def test_romanovski_nonsymmetric_real():
    # K != 0 evaluation stays real (imaginary residue is checked inside)
    val = romanovski(2, 3.5, 1.0, 0.7)
    assert isinstance(val, float)
    want = complex(
        (-2) ** 2 * 2 * mp.rf((1 + 1j) / 2 - 3.5, 2) / 2
        * (1j) ** 2 * mp.hyp2f1(-2, 2 - 7.0, (1 + 1j) / 2 - 3.5, (1 - 0.7j) / 2))
    assert abs(val - want.real) < 1e-10 * (1 + abs(val))
    assert abs(want.imag) < 1e-10 * (1 + abs(val))


def test_romanovski_degree_one_with_drift():
    # eigen-oriented deformation: R_1^(a,K) = (1-2a) u + K, the unique
    # degree-1 eigenpolynomial of the drift-(2Au+K) generator
    for (alpha, K, u) in [(2.5, 1.0, 0.7), (1.5, -0.8, -1.2)]:
        assert abs(romanovski(1, alpha, K, u)
                   - ((1.0 - 2.0 * alpha) * u + K)) < 1e-12


# ----------------------------------------------------------------- weights

def test_weight_and_speed_density():
    assert weight_w(1.7, 0.0) == 1.0
    p = HpParams(A=-0.5, K=0.0)
    u = np.array([-1.0, 0.3, 2.0])
    assert np.allclose(speed_density(p, u), (1 + u * u) ** (p.A - 1.0))
    # weight integral: int (1+u^2)^(-3/2) du = 2 at alpha = 1
    est = integrate(lambda x: weight_w(1.0, x), -np.inf, np.inf)
    assert abs(est.value - 2.0) < 1e-9
    assert abs(arccot(0.0) - math.pi / 2) < 1e-15
    assert arccot(-5.0) > math.pi / 2 > arccot(5.0) > 0.0


def test_stationary_density_normalized():
    est = integrate(lambda x: stationary_density(1.5, x), -np.inf, np.inf)
    assert abs(est.value - 1.0) < 1e-9


# ----------------------------------------------------------- eigenfunction

def test_phi_eigen_real_at_zero_order():
    for u in (-2.0, 0.0, 1.3):
        val = phi_eigen(1.5, 0.0, 0.0, u)
        assert abs(val.imag) <= 1e-12 * (1 + abs(val))


def test_phi_eigen_conjugation():
    for (alpha, m, u) in [(0.7, 0.5, -1.0), (1.5, 2.0, 0.6), (3.0, 0.5, 2.5)]:
        a = phi_eigen(alpha, 0.0, -m, u)
        b = np.conj(phi_eigen(alpha, 0.0, m, u))
        assert abs(a - b) < 1e-11 * abs(a)


def test_phi_forms_agree_on_sample():
    for (alpha, m) in [(0.7, 0.5), (1.5, 2.0), (3.0, 0.5)]:
        for u in (-5.0, -1.0, 0.0, 0.4, 1.0, 5.0):
            a = phi_series_form(alpha, m, u)
            b = phi_flat_form(alpha, m, u)
            c = phi_eigen(alpha, 0.0, m, u)
            assert abs(a - b) < 1e-10 * abs(a)
            assert abs(a - c) < 1e-10 * abs(a)


def test_phi_flat_principal_branch_sides():
    # the literal principal-branch series equals the eigenfunction for
    # u <= 0 and its u -> -u mirror for u > 0
    alpha, m = 1.5, 0.5
    for u in (-2.0, -0.5):
        assert abs(phi_flat_principal(alpha, m, u)
                   - phi_eigen(alpha, 0.0, m, u)) < 1e-10
    for u in (0.5, 2.0):
        assert abs(phi_flat_principal(alpha, m, u)
                   - phi_eigen(alpha, 0.0, m, -u)) < 1e-10


def test_phi_eigen_flat_oracle_value():
    # frozen from direct summation of the 1/(1+u^2)-argument series at
    # u = -0.7 (inside its principal validity region), alpha=1.5, m=0.5
    want = complex(2 ** (-0.5j) * (1 + 0.49) ** ((1.5 - 0.5j) / 2)
                   * mp.hyp2f1((1 + 1.5 + 0.5j) / 2, (0.5j - 1.5) / 2,
                               1 + 0.5j, 1 / 1.49))
    got = phi_eigen(1.5, 0.0, 0.5, -0.7)
    assert abs(got - want) < 1e-11 * abs(want)


def test_phi_eigen_nonsymmetric_series():
    # K != 0: 2F1(-a-im, -a+im; (1+iK)/2 - a; (1-iu)/2), |u| < sqrt(3)
    alpha, K, m, u = 1.2, 0.8, 0.6, 0.4
    want = complex(mp.hyp2f1(-alpha - 0.6j, -alpha + 0.6j,
                             (1 + 0.8j) / 2 - alpha, (1 - 0.4j) / 2))
    got = phi_eigen(alpha, K, m, u)
    assert abs(got - want) < 1e-11 * abs(want)


def test_phi_eigen_requires_positive_alpha():
    with pytest.raises(ValueError):
        phi_eigen(-0.5, 0.0, 1.0, 0.3)
