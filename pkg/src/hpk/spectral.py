"""Stationary-case transition density by eigenfunction expansion.

The generator (1+u^2) d^2/du^2 + (1-2*alpha) u d/du (alpha > 0) has
finitely many polynomial eigenfunctions R_n, n < alpha, and a
continuous spectrum alpha^2 + m^2 with Ferrers-function eigenfunctions.
Substituting u = sinh(y) and peeling off cosh(y)^alpha turns it into a
Schroedinger operator with the sech^2 well of depth alpha*(alpha+1), so
the continuous part carries the scattering structure of that well: a
transmitted pairing conj(P) P weighted by |Gamma(1+im)|^2 plus a
reflected pairing P P whose weight vanishes exactly at integer alpha.
Both pieces are assembled here; dropping either one breaks
Chapman-Kolmogorov for non-integer alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .quad import QuadConfig, gauss_legendre, gaussian_tail_cutoff, \
    integrate, integrate_complex, richardson_limit
from .specfun import HpParams, cgamma, ferrer_orders, gamma_abs2_1pim, rgamma, \
    romanovski, weight_w, arccot

_SQRT_PI = math.sqrt(math.pi)


def discrete_count(alpha: float) -> int:
    """Number of polynomial eigenfunctions: #{n >= 0 : n < alpha}.

    The L^2(W) membership of R_n requires exactly n < alpha.  For
    non-integer alpha this keeps the shallowest bound state n =
    floor(alpha), which the classical truncation at floor(alpha-1)
    drops; without it the expansion fails to satisfy the semigroup
    property.
    """
    if alpha <= 0:
        return 0
    return int(math.ceil(alpha))  # n = 0 .. ceil(alpha)-1


def norm_sq(n: int, alpha: float) -> float:
    """Squared L^2(W) norm of R_n:

    pi n! Gamma(2*alpha+1-n) / (2^(2*alpha-2n) (alpha-n) Gamma(alpha-n+1/2)^2)
    """
    if not 0 <= n < alpha:
        raise ValueError("norm_sq requires 0 <= n < alpha")
    return (math.pi * math.factorial(n) * math.gamma(2 * alpha + 1 - n)
            / (2.0 ** (2 * alpha - 2 * n) * (alpha - n)
               * math.gamma(alpha - n + 0.5) ** 2))


def reflection_weight(alpha: float, m):
    """Reflected-pairing spectral weight S(m).

    S(m) = -|Gamma(1+im)|^2 Gamma(1+alpha+im) Gamma(im-alpha)
           / (Gamma(-alpha) Gamma(1+alpha));
    identically zero for integer alpha (reflectionless well).  Decays
    like exp(-pi m), so it only matters at small m.
    """
    m = np.asarray(m, dtype=float)
    if float(alpha) == math.floor(alpha):
        return np.zeros(m.shape, dtype=complex)
    im = 1j * m
    return (-gamma_abs2_1pim(m) * cgamma(1.0 + alpha + im) * cgamma(im - alpha)
            * rgamma(-alpha) * rgamma(1.0 + alpha))


@dataclass(frozen=True)
class SpectralScheme:
    """Discretization of the spectral measure for one (alpha, t).

    Discrete nodes carry (n, mu_n = alpha-n, lambda_n = n(2*alpha-n),
    weight Gamma(2*alpha+1-n)(alpha-n)/n!).  The continuous rule is a
    symmetric Gauss-Legendre grid on [-m_max, m_max]; evaluation uses
    the positive half plus conjugation.
    """

    alpha: float
    t: float
    ns: np.ndarray
    mu_n: np.ndarray
    lam_n: np.ndarray
    w_n: np.ndarray
    m_nodes: np.ndarray          # symmetric in m -> -m
    m_weights: np.ndarray
    m_max: float
    gamma2: np.ndarray = field(repr=False)   # |Gamma(1+im)|^2 on m > 0
    refl: np.ndarray = field(repr=False)     # S(m) on m > 0

    @property
    def m_pos(self) -> np.ndarray:
        return self.m_nodes[self.m_nodes > 0]

    @property
    def w_pos(self) -> np.ndarray:
        return self.m_weights[self.m_nodes > 0]


def build_scheme(alpha: float, t: float, cfg: QuadConfig | None = None) -> SpectralScheme:
    """Spectral discretization: discrete nodes plus a continuous rule.

    The continuous grid resolves exp(-(alpha^2+m^2) t) out to the tail
    cutoff; node count scales with the truncation length.
    """
    if alpha <= 0 or t <= 0:
        raise ValueError("need alpha > 0 and t > 0")
    cfg = cfg or QuadConfig()
    ns = np.arange(discrete_count(alpha))
    mu_n = alpha - ns
    lam_n = ns * (2.0 * alpha - ns)
    w_n = np.array([math.gamma(2 * alpha + 1 - n) * (alpha - n) / math.factorial(n)
                    for n in ns])
    m_max = gaussian_tail_cutoff(t, cfg.tail_cutoff_epsilon)
    npts = max(48, int(8 * m_max))
    mp_, wp = gauss_legendre(npts, 0.0, m_max)
    nodes = np.concatenate((-mp_[::-1], mp_))
    weights = np.concatenate((wp[::-1], wp))
    return SpectralScheme(
        alpha=alpha, t=t, ns=ns, mu_n=mu_n, lam_n=lam_n, w_n=w_n,
        m_nodes=nodes, m_weights=weights, m_max=m_max,
        gamma2=gamma_abs2_1pim(mp_), refl=reflection_weight(alpha, mp_),
    )


@lru_cache(maxsize=64)
def _cached_scheme(alpha: float, t: float, cfg: QuadConfig) -> SpectralScheme:
    return build_scheme(alpha, t, cfg)


def _cut_coordinate(u: float) -> float:
    return -u / math.sqrt(1.0 + u * u)


def _ferrer_imag_orders(scheme: SpectralScheme, u: float) -> np.ndarray:
    return ferrer_orders(scheme.alpha, -1j * scheme.m_pos, _cut_coordinate(u))


def _continuous_part(scheme: SpectralScheme, v: float, u: float,
                     pv: np.ndarray | None = None, pu: np.ndarray | None = None) -> float:
    alpha, t = scheme.alpha, scheme.t
    if pv is None:
        pv = _ferrer_imag_orders(scheme, v)
    if pu is None:
        pu = _ferrer_imag_orders(scheme, u)
    m = scheme.m_pos
    damp = np.exp(-(alpha * alpha + m * m) * t)
    pair = scheme.gamma2 * np.conj(pv) * pu + scheme.refl * pv * pu
    integral = float(np.sum(scheme.w_pos * damp * np.real(pair)))
    return ((1.0 + v * v) * (1.0 + u * u)) ** (alpha / 2.0) * integral / math.pi


def _discrete_part(scheme: SpectralScheme, v: float, u: float) -> float:
    alpha, t = scheme.alpha, scheme.t
    tot = 0.0
    for n, lam in zip(scheme.ns, scheme.lam_n):
        tot += (math.exp(-lam * t) * romanovski(int(n), alpha, 0.0, v)
                * romanovski(int(n), alpha, 0.0, u) / norm_sq(int(n), alpha))
    return tot


def hp_density_spectral(alpha: float, t: float, v: float, u: float,
                        cfg: QuadConfig | None = None,
                        scheme: SpectralScheme | None = None) -> float:
    """Transition density q_t(v, u) of the stationary-case diffusion.

    q_t(v,u) = W(u) [ sum_{n<alpha} e^{-n(2a-n)t} R_n(v)R_n(u)/|R_n|^2
                      + continuous part ].
    The continuous part integrates the transmitted and reflected
    Ferrers pairings against exp(-(alpha^2+m^2) t).
    """
    scheme = scheme or _cached_scheme(alpha, t, cfg or QuadConfig())
    return weight_w(alpha, u) * (_discrete_part(scheme, v, u)
                                 + _continuous_part(scheme, v, u))


def hp_density_spectral_grid(alpha: float, t: float, v: float, us,
                             cfg: QuadConfig | None = None) -> np.ndarray:
    """q_t(v, u) over a grid of endpoints, reusing the source column."""
    scheme = _cached_scheme(alpha, t, cfg or QuadConfig())
    pv = _ferrer_imag_orders(scheme, v)
    out = np.empty(len(us))
    for i, u in enumerate(us):
        u = float(u)
        out[i] = weight_w(alpha, u) * (
            _discrete_part(scheme, v, u)
            + _continuous_part(scheme, v, u, pv=pv))
    return out


def check_integral0(alpha: float, t: float, v: float,
                    cfg: QuadConfig | None = None) -> float:
    """Residual of the vanishing double integral

    int_R int_R e^{-m^2 t} phi_{alpha,-m}(v) phi_{alpha,m}(u) dm W(u) du = 0,

    which expresses that the transmitted continuous pairing carries no
    total mass (each eigenfunction is W-orthogonal to the constant).
    """
    cfg = cfg or QuadConfig()
    scheme = _cached_scheme(alpha, t, cfg)
    pv = _ferrer_imag_orders(scheme, v)
    m = scheme.m_pos
    damp = np.exp(-m * m * t) * scheme.gamma2 * np.conj(pv)
    pref_v = (1.0 + v * v) ** (alpha / 2.0)

    def inner(us):
        us = np.atleast_1d(us)
        vals = np.empty(len(us))
        for i, u in enumerate(us):
            u = float(u)
            pu = _ferrer_imag_orders(scheme, u)
            s = 2.0 * float(np.sum(scheme.w_pos * np.real(damp * pu)))
            vals[i] = (s * pref_v * (1.0 + u * u) ** (alpha / 2.0)
                       * weight_w(alpha, u))
        return vals

    est = integrate(inner, -np.inf, np.inf,
                    QuadConfig(rel_tol=1e-7, abs_tol=1e-9,
                               max_subdivisions=cfg.max_subdivisions,
                               tail_cutoff_epsilon=cfg.tail_cutoff_epsilon))
    return est.value


def apply_generator_fd(params: HpParams, f, u: float, h: float | None = None) -> float:
    """(1+u^2) f'' + (2Au+K) f' by fourth-order central differences.

    Default step 1e-3 (1+|u|) with one Richardson halving; used as the
    oracle for eigenfunction and intertwining checks.
    """
    if h is None:
        h = 1e-3 * (1.0 + abs(u))

    def stencil(hh: float) -> float:
        pts = np.array([f(u + k * hh) for k in (-2, -1, 0, 1, 2)], dtype=float)
        d1 = (pts[0] - 8 * pts[1] + 8 * pts[3] - pts[4]) / (12 * hh)
        d2 = (-pts[0] + 16 * pts[1] - 30 * pts[2] + 16 * pts[3] - pts[4]) / (12 * hh * hh)
        return (1.0 + u * u) * d2 + (2.0 * params.A * u + params.K) * d1

    g1, g2 = stencil(h), stencil(h / 2.0)
    return (16.0 * g2 - g1) / 15.0


def check_intertwining(params: HpParams, f, u: float) -> float:
    """Residual of the conjugation identity between (A,K) and (2-A,-K).

    L_{A,K}( f e^{K arccot} / W )(u)
        = (e^{K arccot(u)}/W(u)) [ L_{2-A,-K} f (u) + 2(1-A) f(u) ];
    the final term multiplies f.  Returns lhs - rhs, expected ~ 0.
    """
    A, K = params.A, params.K
    alpha = params.alpha

    def envelope(x: float) -> float:
        return (1.0 + x * x) ** (1.0 - A) * math.exp(K * arccot(x))

    lhs = apply_generator_fd(params, lambda x: f(x) * envelope(x), u)
    flip = HpParams(2.0 - A, -K)
    rhs = envelope(u) * (apply_generator_fd(flip, f, u) + 2.0 * (1.0 - A) * f(u))
    return lhs - rhs


def romanovski_complexified(n: int, alpha: float, K: float, u: float) -> complex:
    """R_n^(alpha,K) without the realness projection (complex return).

    Same eigenfunction-oriented parameters as specfun.romanovski.
    """
    cc = 0.5 * (1.0 + 1j * K) - alpha
    z = 0.5 * (1.0 - 1j * u)
    total = term = 1.0 + 0.0j
    for k in range(n):
        term *= (-n + k) * (n - 2.0 * alpha + k) / ((cc + k) * (k + 1.0)) * z
        total += term
    poch = 1.0 + 0.0j
    for k in range(n):
        poch *= cc + k
    return (-2.0) ** n * (1j) ** n * poch * total


def prop3_check(n: int, alpha: float, K: float, u: float,
                cfg: QuadConfig | None = None) -> tuple[complex, complex]:
    """Cauchy-Beta map from the symmetric to the deformed polynomials.

    lhs: (Gamma(alpha-n+1/2)/(2 pi)) lim_{eps->0+}
         int R_n(y) (1-iy)^(-alpha-1/2) (eps - iu + iy)^(-1-iK/2) dy,
    computed at a decreasing eps ladder and Richardson-extrapolated.
    rhs: the closed form
         Gamma(alpha-n+(1+iK)/2)/Gamma(1+iK/2)
         * R_n^(alpha,-K)(u) / (1-iu)^(alpha+(1+iK)/2),
    where the deformed polynomial carries the conjugate parameter
    orientation the (w+iy)^(-1-iK/2) kernel produces.  (The n = 0 case
    is Cauchy's Beta integral with a = alpha+1/2, b = 1+iK/2, whose
    exponent fixes the Gamma index above.)
    """
    if not 0 <= n <= alpha - 0.5:
        raise ValueError("prop3_check needs 0 <= n < alpha - 1/2 for integrability")
    cfg = cfg or QuadConfig()
    quad_cfg = QuadConfig(rel_tol=1e-10, abs_tol=1e-13,
                          max_subdivisions=max(cfg.max_subdivisions, 400),
                          tail_cutoff_epsilon=cfg.tail_cutoff_epsilon)

    def lhs_at(eps: float) -> complex:
        w = eps - 1j * u

        def f(y):
            y = np.asarray(y, dtype=float)
            r = np.array([romanovski(n, alpha, 0.0, float(t)) for t in y])
            return (r * (1.0 - 1j * y) ** (-alpha - 0.5)
                    * (w + 1j * y) ** (-1.0 - 0.5j * K))

        est = integrate_complex(f, -np.inf, np.inf, quad_cfg,
                                breakpoints=(u - 1.0, u, u + 1.0))
        return complex(math.gamma(alpha - n + 0.5) / (2.0 * math.pi) * est.value)

    ladder = [0.1 / 2 ** k for k in range(5)]
    lhs = richardson_limit([(e, lhs_at(e)) for e in ladder]).value

    poch = cgamma(alpha - n + 0.5 + 0.5j * K) * rgamma(1.0 + 0.5j * K)
    rhs = (poch * romanovski_complexified(n, alpha, -K, u)
           / (1.0 - 1j * u) ** (alpha + 0.5 * (1.0 + 1j * K)))
    return complex(lhs), complex(rhs)
