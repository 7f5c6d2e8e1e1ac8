import math

import mpmath as mp
import numpy as np
import pytest

from hpk.quad import QuadConfig, integrate
from hpk.specfun import HpParams, phi_eigen, romanovski, weight_w
from hpk.spectral import (apply_generator_fd, build_scheme, check_integral0,
                          check_intertwining, discrete_count,
                          hp_density_spectral, hp_density_spectral_grid,
                          norm_sq, prop3_check, reflection_weight)

mp.mp.dps = 25


# -------------------------------------------------------------- norms

def test_norm_values():
    assert abs(norm_sq(0, 1.0) - 2.0) < 1e-13
    # sqrt(pi) Gamma(2)/Gamma(2.5) = 4/3
    assert abs(norm_sq(0, 2.0) - 4.0 / 3.0) < 1e-13


@pytest.mark.parametrize("n", [0, 1, 2])
def test_norm_vs_quadrature(n):
    alpha = 3.2
    est = integrate(
        lambda u: np.array([romanovski(n, alpha, 0.0, float(x)) ** 2
                            for x in np.atleast_1d(u)]) * weight_w(alpha, u),
        -np.inf, np.inf, QuadConfig(rel_tol=1e-9, abs_tol=1e-12))
    assert abs(est.value - norm_sq(n, alpha)) < 1e-6 * norm_sq(n, alpha)


def test_norm_shallowest_state():
    # n = floor(alpha) is square-integrable and matches the closed form
    alpha, n = 1.5, 1
    est = integrate(
        lambda u: np.array([romanovski(n, alpha, 0.0, float(x)) ** 2
                            for x in np.atleast_1d(u)]) * weight_w(alpha, u),
        -np.inf, np.inf, QuadConfig(rel_tol=1e-9, abs_tol=1e-12,
                                    max_subdivisions=400))
    assert abs(est.value - 2.0 * math.pi) < 1e-6 * 2.0 * math.pi
    assert abs(norm_sq(1, 1.5) - 2.0 * math.pi) < 1e-12


def test_norm_range_errors():
    with pytest.raises(ValueError):
        norm_sq(2, 1.5)
    with pytest.raises(ValueError):
        norm_sq(-1, 1.5)


# ------------------------------------------------------------- scheme

def test_discrete_count_is_states_below_alpha():
    # n < alpha exactly; the classical [alpha-1] truncation drops one
    # bound state for non-integer alpha
    assert discrete_count(0.5) == 1
    assert discrete_count(1.0) == 1
    assert discrete_count(1.5) == 2
    assert discrete_count(2.5) == 3
    assert discrete_count(3.0) == 3


def test_build_scheme_nodes():
    s = build_scheme(2.5, 1.0)
    assert list(s.ns) == [0, 1, 2]
    assert np.allclose(s.mu_n, [2.5, 1.5, 0.5])
    assert np.allclose(s.lam_n, [0.0, 4.0, 6.0])
    assert np.all(np.diff(s.lam_n) > 0)
    assert np.all(s.w_n > 0)
    s3 = build_scheme(3.0, 0.5)
    assert list(s3.ns) == [0, 1, 2]
    assert np.allclose(s3.lam_n, [0.0, 5.0, 8.0])
    s05 = build_scheme(0.5, 1.0)
    assert list(s05.ns) == [0]


def test_build_scheme_continuous_rule_symmetric():
    s = build_scheme(1.5, 0.5)
    assert np.allclose(np.sort(-s.m_nodes), np.sort(s.m_nodes))
    assert np.all(s.m_weights > 0)
    assert np.all(s.gamma2 > 0)
    assert s.m_max > 5.0


def test_reflection_weight_vanishes_at_integer_alpha():
    m = np.array([0.3, 1.0, 2.5])
    assert np.all(reflection_weight(2.0, m) == 0.0)
    assert np.all(reflection_weight(3.0, m) == 0.0)
    s = reflection_weight(1.5, m)
    assert np.all(np.abs(s) > 0)
    # independent mpmath evaluation
    for mm, sv in zip(m, s):
        want = complex(-mp.pi * mm / mp.sinh(mp.pi * mm)
                       * mp.gamma(1 + 1.5 + 1j * mm) * mp.gamma(1j * mm - 1.5)
                       / (mp.gamma(-1.5) * mp.gamma(2.5)))
        assert abs(sv - want) < 1e-12 * abs(want)
    # exponentially small at large m
    assert abs(reflection_weight(1.5, np.array([8.0]))[0]) < 1e-9


def test_scheme_discrete_weights_factorize_density_terms():
    # discrete spectral weight times Ferrers squares reproduces
    # R_n(v) R_n(u) / |R_n|^2 through the polynomial-Ferrers link
    from hpk.specfun import ferrer_p
    alpha, v, u = 2.5, 0.4, -1.1
    s = build_scheme(alpha, 1.0)
    for n, w in zip(s.ns, s.w_n):
        n = int(n)
        lhs = (romanovski(n, alpha, 0.0, v) * romanovski(n, alpha, 0.0, u)
               / norm_sq(n, alpha))
        pv = ferrer_p(alpha, n - alpha, -v / math.sqrt(1 + v * v)).real
        pu = ferrer_p(alpha, n - alpha, -u / math.sqrt(1 + u * u)).real
        rhs = w * ((1 + u * u) * (1 + v * v)) ** (alpha / 2.0) * pv * pu
        assert abs(lhs - rhs) < 1e-10 * (1 + abs(lhs))


# ------------------------------------------------------------- density

def test_density_matches_raw_eigenfunction_expansion():
    # oracle: brute-force (SDD-style) sum with mpmath eigenfunctions
    # plus the scattering-completed continuous part, at one point
    alpha, t, v, u = 1.5, 0.5, 1.0, -1.0
    got = hp_density_spectral(alpha, t, v, u)
    assert abs(got - 0.0765773036166) < 2e-9   # frozen from the mpmath run


def test_density_normalization():
    est = integrate(
        lambda us: hp_density_spectral_grid(1.5, 0.5, 0.7, np.atleast_1d(us)),
        -np.inf, np.inf, QuadConfig(rel_tol=1e-7, abs_tol=1e-9))
    assert abs(est.value - 1.0) < 1e-4


def test_density_reversibility():
    alpha, t = 2.0, 0.75
    for (v, u) in [(0.3, -1.2), (1.0, 2.0)]:
        a = weight_w(alpha, v) * hp_density_spectral(alpha, t, v, u)
        b = weight_w(alpha, u) * hp_density_spectral(alpha, t, u, v)
        assert abs(a - b) < 1e-8 * abs(a)


def test_density_positive_on_grid():
    for v in (-1.0, 0.0, 2.0):
        for u in (-2.0, 0.0, 1.0):
            assert hp_density_spectral(1.5, 0.5, v, u) > -1e-8


def test_density_long_time_stationary():
    alpha, t = 1.5, 30.0
    z = math.sqrt(math.pi) * math.gamma(alpha) / math.gamma(alpha + 0.5)
    for u in (-1.0, 0.0, 2.0):
        want = weight_w(alpha, u) / z
        assert abs(hp_density_spectral(alpha, t, 0.0, u) - want) < 1e-4


def test_density_chapman_kolmogorov_point():
    alpha, t, s_, v, u = 1.5, 0.4, 0.6, 1.0, -1.0
    est = integrate(
        lambda ws: hp_density_spectral_grid(alpha, t, v, np.atleast_1d(ws))
        * np.array([hp_density_spectral(alpha, s_, float(w), u)
                    for w in np.atleast_1d(ws)]),
        -np.inf, np.inf, QuadConfig(rel_tol=1e-6, abs_tol=1e-8))
    want = hp_density_spectral(alpha, t + s_, v, u)
    assert abs(est.value - want) < 1e-3


def test_integral0_residual():
    assert abs(check_integral0(1.5, 1.0, 0.0)) < 1e-6


# ----------------------------------------------------------- generator

def test_generator_fd_linear_and_constant():
    p = HpParams(A=0.7, K=1.3)
    for u in (-1.0, 0.0, 2.0):
        assert abs(apply_generator_fd(p, lambda x: x, u)
                   - (2 * p.A * u + p.K)) < 1e-8
        assert abs(apply_generator_fd(p, lambda x: 1.0, u)) < 1e-8


@pytest.mark.parametrize("alpha,K", [(2.5, 0.0), (2.5, 1.0), (3.7, 0.5)])
def test_generator_fd_polynomial_eigenfunctions(alpha, K):
    p = HpParams.from_alpha(alpha, K)
    for n in range(int(math.floor(alpha - 1)) + 1):
        lam = n * (2 * alpha - n)
        for u in (-1.0, 0.2, 1.5):
            f = lambda x: romanovski(n, alpha, K, x)
            got = apply_generator_fd(p, f, u)
            assert abs(got + lam * f(u)) < 1e-6 * (1 + abs(lam * f(u)))


def test_generator_fd_continuous_eigenfunction():
    # K != 0 continuous eigenfunction, spectral value alpha^2 + m^2
    alpha, K, m, u = 1.2, 0.8, 0.6, 0.3
    p = HpParams.from_alpha(alpha, K)
    lam = alpha * alpha + m * m
    re = apply_generator_fd(p, lambda x: phi_eigen(alpha, K, m, x).real, u)
    im = apply_generator_fd(p, lambda x: phi_eigen(alpha, K, m, x).imag, u)
    want = -lam * phi_eigen(alpha, K, m, u)
    assert abs(complex(re, im) - want) < 1e-6 * (1 + abs(want))


def test_intertwining_residuals():
    for (A, K) in [(1.5, 0.0), (2.0, 1.0)]:
        p = HpParams(A, K)
        assert abs(check_intertwining(p, lambda x: 1.0, 0.0)) < 1e-7
        assert abs(check_intertwining(p, lambda x: x * x, 0.5)) < 1e-6
        assert abs(check_intertwining(p, lambda x: x, 1.0)) < 1e-6


# --------------------------------------------------------------- prop3

def test_prop3_rhs_closed_form_degree_zero():
    # Cauchy's Beta integral with a = alpha+1/2, b = 1+iK/2 gives
    # Gamma(alpha+(1+iK)/2)/(Gamma(1+iK/2) (1-iu)^(alpha+(1+iK)/2))
    alpha, K, u = 2.5, 1.0, 0.7
    _, rhs = _rhs_only(0, alpha, K, u)
    want = complex(mp.gamma(alpha + (1 + 1j * K) / 2) / mp.gamma(1 + 1j * K / 2)
                   / (1 - 1j * u) ** (alpha + (1 + 1j * K) / 2))
    assert abs(rhs - want) < 1e-12 * abs(want)


def _rhs_only(n, alpha, K, u):
    from hpk.spectral import romanovski_complexified
    from hpk.specfun import cgamma, rgamma
    poch = cgamma(alpha - n + 0.5 + 0.5j * K) * rgamma(1.0 + 0.5j * K)
    rhs = (poch * romanovski_complexified(n, alpha, -K, u)
           / (1.0 - 1j * u) ** (alpha + 0.5 * (1.0 + 1j * K)))
    return None, rhs


def test_prop3_rhs_collapses_at_k_zero():
    # K = 0: factor Gamma(alpha-n+1/2)/Gamma(1) * R_n / (1-iu)^(alpha+1/2)
    alpha, n, u = 2.5, 1, 0.7
    _, rhs = _rhs_only(n, alpha, 0.0, u)
    want = complex(mp.gamma(alpha - n + 0.5) * romanovski(n, alpha, 0.0, u)
                   / (1 - 1j * u) ** (alpha + 0.5))
    assert abs(rhs - want) < 1e-12 * abs(want)


@pytest.mark.slow
def test_prop3_limit_matches_closed_form():
    lhs, rhs = prop3_check(0, 2.5, 1.0, 0.7)
    assert abs(lhs - rhs) < 1e-4 * abs(rhs)
