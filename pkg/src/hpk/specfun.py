"""Complex special functions for the Hua-Pickrell generator.

Gamma (Lanczos), the Gauss hypergeometric series, Ferrers functions
(associated Legendre on the cut), Routh-Romanovski polynomials and the
continuous-spectrum eigenfunctions built out of them.  Complex values
are plain Python/numpy complex numbers throughout.

Coordinate conventions for one parameter point of the generator
(1+u^2) d^2/du^2 + (2Au+K) d/du are collected in ``HpParams``:
alpha = 1/2 - A, mu = A - 1/2, nu = K/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_SQRT_PI = math.sqrt(math.pi)
_MAX_TERMS = 100_000
_TERM_EPS = 1e-16
# series-argument threshold: Ferrers argument (1-x)/2 stays below
# (1 + 1/sqrt(2))/2 ~ 0.854 for x > -1/sqrt(2); beyond that the
# argument->1 connection formula takes over.
_X_SWITCH = -1.0 / math.sqrt(2.0)


class GammaPoleError(ZeroDivisionError):
    """Gamma evaluated at a non-positive integer."""


class ConvergenceError(RuntimeError):
    """A hypergeometric series failed to converge within the term cap."""


@dataclass(frozen=True)
class HpParams:
    """One diffusion parameter point in the (A, K) chart.

    The equivalent charts are exposed read-only: ``alpha`` = 1/2 - A,
    ``mu`` = A - 1/2 = -alpha and ``nu`` = K/2.
    """

    A: float
    K: float = 0.0

    @classmethod
    def from_alpha(cls, alpha: float, K: float = 0.0) -> "HpParams":
        return cls(0.5 - alpha, K)

    @classmethod
    def from_mu_nu(cls, mu: float, nu: float) -> "HpParams":
        return cls(mu + 0.5, 2.0 * nu)

    @property
    def alpha(self) -> float:
        return 0.5 - self.A

    @property
    def mu(self) -> float:
        return self.A - 0.5

    @property
    def nu(self) -> float:
        return self.K / 2.0


# Lanczos rational approximation, g = 7, 9 coefficients.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _is_nonpositive_int(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return (z.imag == 0.0) & (z.real <= 0.0) & (z.real == np.floor(z.real))


def cgamma(z):
    """Gamma(z) for complex scalar or array argument.

    Lanczos approximation with reflection for Re(z) < 1/2; good for a
    bit over 12 significant digits on moderate arguments.  Raises
    GammaPoleError at non-positive integers.
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    if np.any(_is_nonpositive_int(z)):
        raise GammaPoleError("gamma pole at non-positive integer")

    out = np.empty_like(z)
    refl = z.real < 0.5
    w = np.where(refl, 1.0 - z, z) - 1.0
    acc = np.full_like(w, _LANCZOS[0])
    for i, c in enumerate(_LANCZOS[1:], start=1):
        acc = acc + c / (w + i)
    t = w + _LANCZOS_G + 0.5
    g = np.sqrt(2.0 * np.pi) * t ** (w + 0.5) * np.exp(-t) * acc
    out[~refl] = g[~refl]
    if np.any(refl):
        zr = z[refl]
        out[refl] = np.pi / (np.sin(np.pi * zr) * g[refl])
    return complex(out[0]) if scalar else out


def rgamma(z):
    """1/Gamma(z); zero (not a pole) at non-positive integers."""
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    poles = _is_nonpositive_int(z)
    safe = np.where(poles, 1.0, z)
    out = 1.0 / cgamma(safe)
    out[poles] = 0.0
    return complex(out[0]) if scalar else out


def gamma_abs2_1pim(m):
    """|Gamma(1+im)|^2 = pi*m/sinh(pi*m) for real m (1 at m=0)."""
    m = np.asarray(m, dtype=float)
    out = np.ones_like(m)
    nz = m != 0.0
    out[nz] = np.pi * m[nz] / np.sinh(np.pi * m[nz])
    return out if out.ndim else float(out)


def _gauss_series(a, b, c, z, max_terms=_MAX_TERMS):
    """Sum 2F1(a,b;c;z) by term-ratio recursion.

    ``a``, ``b``, ``c`` may be complex arrays of a common shape (one
    series per entry), ``z`` a complex scalar.  Stops when two
    consecutive terms fall below _TERM_EPS * |partial sum|.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    c = np.asarray(c, dtype=complex)
    shape = np.broadcast_shapes(a.shape, b.shape, c.shape)
    a, b, c = (np.broadcast_to(x, shape).copy() for x in (a, b, c))
    total = np.ones(shape, dtype=complex)
    term = np.ones(shape, dtype=complex)
    small_runs = np.zeros(shape, dtype=int)
    active = np.ones(shape, dtype=bool)
    for n in range(max_terms):
        ratio = (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
        term = term * np.where(active, ratio, 0.0)
        total += term
        small = np.abs(term) <= _TERM_EPS * np.abs(total)
        small_runs = np.where(small, small_runs + 1, 0)
        active &= small_runs < 2
        if not active.any():
            return total
    raise ConvergenceError("2F1 series did not converge within the term cap")


def hyp2f1(a, b, c, z) -> complex:
    """Gauss hypergeometric 2F1(a,b;c;z), complex parameters.

    Covered domain: terminating series (a or b a non-positive integer),
    |z| < 1, or real z in [0,1) with Re(c-a-b) > 0.  Accuracy degrades
    as |z| -> 1; the term-cap error then surfaces as ConvergenceError.
    """
    a, b, c, z = complex(a), complex(b), complex(c), complex(z)
    na = _termination_order(a)
    nb = _termination_order(b)
    nterm = min(x for x in (na, nb) if x is not None) if (na is not None or nb is not None) else None
    if _is_nonpositive_int(c):
        # allowed only if a/b terminates the series strictly earlier
        nc = int(-c.real)
        if nterm is None or nterm > nc:
            raise GammaPoleError("2F1 pole: c is a non-positive integer")
    if nterm is not None:
        total = term = 1.0 + 0.0j
        for n in range(nterm):
            term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
            total += term
        return total
    if abs(z) >= 1.0 and not (z.imag == 0.0 and 0.0 <= z.real < 1.0):
        raise ValueError("2F1 argument outside the supported region")
    return complex(_gauss_series(a, b, c, z))


def _termination_order(p: complex):
    if p.imag == 0.0 and p.real <= 0.0 and p.real == math.floor(p.real):
        return int(-p.real)
    return None


def _ferrer_series(alpha, orders, x, max_terms=_MAX_TERMS):
    """Ferrers P_alpha^mu(x) from the defining series in (1-x)/2.

    P = ((1+x)/(1-x))^(mu/2) 2F1(-alpha, 1+alpha; 1-mu; (1-x)/2) / Gamma(1-mu)
    Vectorized over ``orders``.
    """
    orders = np.asarray(orders, dtype=complex)
    z = 0.5 * (1.0 - x)
    f = _gauss_series(-alpha, 1.0 + alpha, 1.0 - orders, z, max_terms)
    pref = ((1.0 + x) / (1.0 - x)) ** (orders / 2.0) * rgamma(1.0 - orders)
    return pref * f


def _ferrer_connected(alpha, orders, x):
    """Ferrers P via the argument -> 1 connection, for x <= -1/sqrt(2).

    Two companion series in w = (1+x)/2 < 0.15; the coefficient of the
    first vanishes automatically (through rgamma) when alpha+mu is a
    non-negative integer.  Requires non-integer order.
    """
    orders = np.asarray(orders, dtype=complex)
    w = 0.5 * (1.0 + x)
    t1 = (cgamma(-orders) * rgamma(1.0 - orders + alpha) * rgamma(-orders - alpha)
          * _gauss_series(-alpha, alpha + 1.0, 1.0 + orders, w))
    t2 = (w ** (-orders) * cgamma(orders) * rgamma(-alpha) * rgamma(alpha + 1.0)
          * _gauss_series(1.0 - orders + alpha, -orders - alpha, 1.0 - orders, w))
    return ((1.0 + x) / (1.0 - x)) ** (orders / 2.0) * (t1 + t2)


def ferrer_orders(alpha: float, orders, x: float):
    """Ferrers functions P_alpha^mu(x) for an array of orders mu.

    Branch rule: integer alpha >= 0 terminates the defining series, so
    that series is used everywhere; otherwise the defining series is
    used for x > -1/sqrt(2) (argument bounded away from 1) and the
    connection form for x <= -1/sqrt(2).  Integer orders on the
    connected branch fall back to the (slow but convergent) defining
    series.
    """
    if not -1.0 < x < 1.0:
        raise ValueError("Ferrers functions live on the open cut (-1, 1)")
    orders = np.atleast_1d(np.asarray(orders, dtype=complex))
    if np.any(_is_nonpositive_int(1.0 - orders)):
        raise GammaPoleError("Ferrers pole: 1 - order is a non-positive integer")
    if float(alpha) >= 0.0 and float(alpha) == math.floor(alpha):
        return _ferrer_series(alpha, orders, x)
    if x > _X_SWITCH:
        return _ferrer_series(alpha, orders, x)
    is_int = (orders.imag == 0.0) & (orders.real == np.floor(orders.real))
    out = np.empty(orders.shape, dtype=complex)
    if np.any(~is_int):
        out[~is_int] = _ferrer_connected(alpha, orders[~is_int], x)
    if np.any(is_int):
        out[is_int] = _ferrer_series(alpha, orders[is_int], x)
    return out


def ferrer_p(alpha: float, order, x: float) -> complex:
    """Associated Legendre (Ferrers) function P_alpha^order on (-1, 1)."""
    return complex(ferrer_orders(alpha, [order], x)[0])


def romanovski(n: int, alpha: float, K: float, u: float) -> float:
    """Routh-Romanovski polynomial R_n at u (K = 0: symmetric family).

    Evaluated from the terminating hypergeometric form
    c_n i^n ((1+iK)/2 - alpha)_n / n! 2F1(-n, n-2a; (1+iK)/2 - a; (1-iu)/2)
    with c_n = (-2)^n n!.  The parameter orientation is fixed by the
    eigenfunction property: the generator with drift 2Au+K annihilates
    R_1 + n(2a-n)-shifts only for this sign of K (the conjugate
    orientation belongs to the drift 2Au-K; at n=1 the two are
    (1-2a)u + K versus (1-2a)u - K).  The complex evaluation is real up
    to roundoff for real parameters; the imaginary residue is checked
    against 1e-10 * (1 + |value|) and dropped.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    cc = 0.5 * (1.0 + 1j * K) - alpha
    z = 0.5 * (1.0 - 1j * u)
    total = term = 1.0 + 0.0j
    for k in range(n):
        denom = (cc + k) * (k + 1.0)
        if denom == 0:
            raise GammaPoleError("Romanovski parameter pole before termination")
        term *= (-n + k) * (n - 2.0 * alpha + k) / denom * z
        total += term
    poch = 1.0 + 0.0j
    for k in range(n):
        poch *= cc + k
    val = (-2.0) ** n * (1j) ** n * poch * total
    if abs(val.imag) > 1e-10 * (1.0 + abs(val)):
        raise ConvergenceError("Romanovski evaluation lost realness")
    return float(val.real)


def weight_w(alpha: float, u) -> float:
    """Symmetric Student-type weight W(u) = (1+u^2)^(-alpha-1/2)."""
    u = np.asarray(u, dtype=float)
    out = (1.0 + u * u) ** (-alpha - 0.5)
    return float(out) if out.ndim == 0 else out


def arccot(u):
    """Continuous inverse cotangent with range (0, pi); arccot(0) = pi/2."""
    u = np.asarray(u, dtype=float)
    out = 0.5 * np.pi - np.arctan(u)
    return float(out) if out.ndim == 0 else out


def speed_density(params: HpParams, u) -> float:
    """Speed density m(u) = (1+u^2)^(A-1) exp(-K arccot(u)).

    The generator is symmetric with respect to m(u) du.
    """
    u = np.asarray(u, dtype=float)
    out = (1.0 + u * u) ** (params.A - 1.0) * np.exp(-params.K * arccot(u))
    return float(out) if out.ndim == 0 else out


def stationary_density(alpha: float, u) -> float:
    """Normalized stationary law W/Z, Z = sqrt(pi) Gamma(alpha)/Gamma(alpha+1/2)."""
    if alpha <= 0:
        raise ValueError("stationary law requires alpha > 0")
    z = _SQRT_PI * cgamma(alpha).real / cgamma(alpha + 0.5).real
    return weight_w(alpha, u) / z


def phi_eigen(alpha: float, K: float, m: float, u: float) -> complex:
    """Continuous-spectrum eigenfunction at spectral value alpha^2 + m^2.

    K = 0: phi(u) = (1+u^2)^(alpha/2) Gamma(1+im) P_alpha^(-im)(x) with
    x = -u/sqrt(1+u^2) (routed through the Ferrers branch logic).
    K != 0: 2F1(-alpha-im, -alpha+im; (1+iK)/2-alpha; (1-iu)/2), whose
    series converges for u^2 < 3; the lower-parameter orientation is
    the eigenfunction-consistent one (same convention as romanovski).
    """
    if alpha <= 0:
        raise ValueError("phi_eigen requires alpha > 0")
    if K == 0.0:
        x = -u / math.sqrt(1.0 + u * u)
        p = ferrer_p(alpha, -1j * m, x)
        return (1.0 + u * u) ** (alpha / 2.0) * cgamma(1.0 + 1j * m) * p
    return hyp2f1(-alpha - 1j * m, -alpha + 1j * m,
                  0.5 * (1.0 + 1j * K) - alpha, 0.5 * (1.0 - 1j * u))


def phi_series_form(alpha: float, m: float, u: float) -> complex:
    """Eigenfunction from its defining representation,

    (u+sqrt(1+u^2))^(im) (1+u^2)^(alpha/2)
        2F1(-alpha, alpha+1; 1+im; 1/2 + u/(2 sqrt(1+u^2))),

    summed directly.  The series argument approaches 1 as u -> +inf, so
    this route is slow (though convergent) there; phi_eigen switches
    representations instead and is the production evaluator.
    """
    s = math.sqrt(1.0 + u * u)
    z = 0.5 + u / (2.0 * s)
    f = complex(_gauss_series(-alpha + 0.0j, alpha + 1.0 + 0.0j, 1.0 + 1j * m, z))
    return (u + s) ** (1j * m) * (1.0 + u * u) ** (alpha / 2.0) * f


def phi_flat_form(alpha: float, m: float, u: float) -> complex:
    """The 1/(1+u^2)-argument expression of the eigenfunction.

    The printed series 2^(-im) (1+u^2)^((alpha-im)/2)
    2F1((1+a+im)/2, (im-a)/2; 1+im; 1/(1+u^2)) reaches its argument's
    branch point at u = 0; the principal branch reproduces the
    eigenfunction only for u <= 0.  The branch-resolved evaluation used
    here splits the function into even and odd components in u (series
    in u^2/(1+u^2)), which agrees with the principal series for u <= 0
    and continues it across u = 0.
    """
    im = 1j * m
    aa = 0.5 * (1.0 + alpha + im)
    bb = 0.5 * (im - alpha)
    cc = 1.0 + im
    x2 = u * u / (1.0 + u * u)
    even = hyp2f1(aa, bb, 0.5, x2) * rgamma(cc - aa) * rgamma(cc - bb)
    odd = (2.0 * u / math.sqrt(1.0 + u * u)) * hyp2f1(cc - aa, cc - bb, 1.5, x2) \
        * rgamma(aa) * rgamma(bb)
    pref = 2.0 ** (-im) * (1.0 + u * u) ** (0.5 * (alpha - im)) * cgamma(cc) * _SQRT_PI
    return complex(pref * (even + odd))


def phi_flat_principal(alpha: float, m: float, u: float) -> complex:
    """The same expression summed literally on its principal branch.

    Equal to phi_eigen for u <= 0 and to its u -> -u mirror for u > 0;
    kept for documenting/testing the branch behavior.  The series
    argument is exactly 1 at u = 0, where the Gauss summation formula
    is used instead.
    """
    im = 1j * m
    aa = 0.5 * (1.0 + alpha + im)
    bb = 0.5 * (im - alpha)
    cc = 1.0 + im
    pref = 2.0 ** (-im) * (1.0 + u * u) ** (0.5 * (alpha - im))
    if u == 0.0:
        # Gauss: 2F1(a,b;c;1) = G(c)G(c-a-b)/(G(c-a)G(c-b)), c-a-b = 1/2
        return complex(pref * cgamma(cc) * cgamma(0.5)
                       * rgamma(cc - aa) * rgamma(cc - bb))
    return complex(pref * hyp2f1(aa, bb, cc, 1.0 / (1.0 + u * u)))
