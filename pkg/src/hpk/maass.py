"""Upper-half-plane heat kernels and the integral route to the density.

The magnetic Laplacian -y^2(dw^2+dy^2)/2 + iky dw + k^2/2 on the
Poincare half-plane has an explicit semigroup kernel from the point i:
a phase times a one-dimensional integral against the hyperbolic
distance.  Analytic continuation to imaginary magnetic field k = i*nu
turns the phase into a real tilt and the cosh factor into a cosine;
a partial Mellin transform in y of that continued kernel produces the
general-parameter transition density g_t, and an oscillatory Hartman
integral produces the characteristic function of the same law.

Internally every exponent pair e^{-nu^2 t/2} * e^{+nu^2 t/2} is fused
before exponentiation, so large nu cannot overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quad import QuadConfig, gauss_legendre, integrate
from .specfun import HpParams, arccot

_SQRT2 = math.sqrt(2.0)
_NS_INNER = 160          # nodes of the distance-integral rule
_NETA_PANEL = 44         # nodes per panel of the Mellin variable
_THETA_NODES = 640       # nodes of the Hartman oscillatory rule
_THETA_T_MIN = 0.05      # oscillation guard for the Hartman integral
_R_FLOOR = 1e-12


@dataclass(frozen=True)
class HyperbolicPoint:
    """A point w + iy of the upper half-plane, y > 0."""

    w: float
    y: float

    def __post_init__(self):
        if not (self.y > 0 and math.isfinite(self.y) and math.isfinite(self.w)):
            raise ValueError("need finite w and y > 0")


def hyp_distance(p: HyperbolicPoint) -> float:
    """Hyperbolic distance from i: cosh(r) = 1 + (w^2+(y-1)^2)/(2y)."""
    c = 1.0 + (p.w * p.w + (p.y - 1.0) ** 2) / (2.0 * p.y)
    return float(np.arccosh(max(c, 1.0)))


def _dist_batch(w: np.ndarray, y: np.ndarray) -> np.ndarray:
    c = 1.0 + (w * w + (y - 1.0) ** 2) / (2.0 * y)
    return np.arccosh(np.maximum(c, 1.0))


def theta_hw(r: float, t: float, cfg: QuadConfig | None = None) -> float:
    """Hartman oscillatory kernel

    theta_r(t) = r/(2 pi^3 t)^(1/2) e^(pi^2/2t)
                 int_0^inf e^(-w^2/2t) e^(-r cosh w) sinh(w) sin(pi w/t) dw.

    The integral cancels down to e^(-pi^2/2t) of its own scale, so it
    is summed in extended precision; the residual noise floor is about
    r * 1e-9 at t = 0.2 and shrinks rapidly with t.  Requires r > 0 and
    t >= 0.05 (the sin(pi w/t) oscillation defeats the rule below that).
    """
    if r <= 0:
        raise ValueError("theta_hw needs r > 0")
    return float(_theta_batch(np.array([r]), t, cfg)[0])


def _theta_batch(r: np.ndarray, t: float, cfg: QuadConfig | None = None) -> np.ndarray:
    cfg = cfg or QuadConfig()
    if t < _THETA_T_MIN:
        raise ValueError(f"theta_hw oscillation guard: t >= {_THETA_T_MIN} required")
    wmax = math.sqrt(2.0 * t * math.log(1.0 / cfg.tail_cutoff_epsilon)) + math.pi
    # composite rule sized to the oscillation wavelength 2t
    panels = max(8, int(math.ceil(wmax / t)))
    nper = max(24, _THETA_NODES // panels)
    edges = np.linspace(0.0, wmax, panels + 1)
    xs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        x, w = gauss_legendre(nper, a, b)
        xs.append(x)
        ws.append(w)
    x = np.concatenate(xs).astype(np.longdouble)
    w = np.concatenate(ws).astype(np.longdouble)
    tl = np.longdouble(t)
    base = np.exp(-x * x / (2 * tl)) * np.sinh(x) * np.sin(np.pi * x / tl) * w
    rl = np.asarray(r, dtype=np.longdouble)
    mat = np.exp(-np.outer(rl, np.cosh(x)))
    # pairwise np.sum keeps the rounding of this heavily cancelling sum
    # near eps*log(n); a naive accumulation would cost ~eps*n
    integral = np.sum(mat * base, axis=-1)
    pref = rl / np.sqrt(np.longdouble(2.0) * np.pi ** 3 * tl) \
        * np.exp(np.pi ** 2 / (2 * tl))
    return np.asarray(pref * integral, dtype=float)


def _inner_distance_integral(t: float, r: np.ndarray, twok: complex,
                             ns: int = _NS_INNER,
                             eps: float = 1e-14) -> np.ndarray:
    """int_r^inf z e^(-z^2/2t) cosh(2k * acosh(cosh(z/2)/cosh(r/2)))
    / sqrt(cosh z - cosh r) dz, batched over r.

    The substitution z = r + s^2 absorbs the inverse-square-root
    endpoint; cosh z - cosh r is evaluated as
    2 sinh(s^2/2) sinh(r + s^2/2) to avoid cancellation.
    """
    r = np.asarray(r, dtype=float)
    zmax = r + 2.0 * abs(twok.real) * t / 2.0 + math.sqrt(2.0 * t * math.log(1.0 / eps)) + 3.0
    smax = np.sqrt(zmax - r)
    xi, wq = np.polynomial.legendre.leggauss(ns)
    xi = 0.5 * (xi + 1.0)
    wq = 0.5 * wq
    s = smax[..., None] * xi                          # (..., ns)
    w = smax[..., None] * wq
    rr = r[..., None]
    z = rr + s * s
    den = np.sqrt(2.0 * np.sinh(0.5 * s * s) * np.sinh(rr + 0.5 * s * s))
    den = np.maximum(den, 1e-300)
    ratio = np.cosh(0.5 * z) / np.cosh(0.5 * rr)
    beta = np.arccosh(np.maximum(ratio, 1.0))
    if twok.imag == 0.0:
        osc = np.cosh(twok.real * beta)
    elif twok.real == 0.0:
        osc = np.cos(twok.imag * beta)
    else:
        osc = np.cosh(complex(twok) * beta)
    val = np.sum(w * 2.0 * s * z * np.exp(-z * z / (2.0 * t)) * osc / den, axis=-1)
    return val


def maass_q(t: float, k: complex, p: HyperbolicPoint,
            cfg: QuadConfig | None = None) -> complex:
    """Semigroup kernel Q_{t,k}(i, w+iy) of the magnetic Laplacian,
    with respect to the hyperbolic area measure dw dy / y^2.

    Q = e^{ik(2 arg(w+(y+1)i) - pi)} * sqrt(2) e^{-t/8 - k^2 t/2}
        / (2 pi t)^{3/2} * (distance integral with cosh(2k * ...)).

    ``k`` may be complex; for k = i*nu the phase degenerates to a real
    tilt and the value is real up to roundoff.
    """
    if t <= 0:
        raise ValueError("need t > 0")
    cfg = cfg or QuadConfig()
    k = complex(k)
    r = max(hyp_distance(p), _R_FLOOR)
    inner = _inner_distance_integral(t, np.array([r]), 2.0 * k,
                                     eps=cfg.tail_cutoff_epsilon)[0]
    phi2 = 2.0 * math.atan2(p.y + 1.0, p.w) - math.pi
    phase = np.exp(1j * k * phi2)
    pref = _SQRT2 * np.exp(-t / 8.0 - k * k * t / 2.0) / (2.0 * math.pi * t) ** 1.5
    return complex(phase * pref * inner)


def _tilted_kernel_batch(t: float, nu: float, w: np.ndarray, y: np.ndarray,
                         eps: float) -> np.ndarray:
    """Q_{t, i nu} * e^{-nu^2 t/2} * e^{t/8} * (2 pi t)^{3/2} / sqrt(2).

    The nu^2 growth of the continued kernel is cancelled against the
    e^{-nu^2 t/2} it is always paired with, so nothing here can
    overflow for moderate nu.  Batched over (w, y) arrays.
    """
    r = np.maximum(_dist_batch(w, y), _R_FLOOR)
    inner = _inner_distance_integral(t, r, 2j * nu, eps=eps)
    tilt = np.exp(-nu * (2.0 * np.arctan2(y + 1.0, w) - math.pi))
    return tilt * inner


def maass_moment(s: float, k: complex, t: float,
                 cfg: QuadConfig | None = None) -> complex:
    """int_H y^s Q_{t,k}(i, w+iy) dw dy/y^2 (equals e^{[s(s-1)-k^2]t/2}).

    Computed on hyperbolic-polar slices: for fixed y = e^eta the w-line
    is parametrized by distance, w = sqrt(2y(cosh r - cosh eta)), and
    the endpoint r -> |eta| is absorbed by r = |eta| + sigma^2.
    """
    if t <= 0:
        raise ValueError("need t > 0")
    cfg = cfg or QuadConfig()
    k = complex(k)
    eps = cfg.tail_cutoff_epsilon
    rmax = math.sqrt(2.0 * t * math.log(1.0 / eps)) + 2.0 * abs(k) * t \
        + abs(s - 1.0) * t + 4.0
    neta = max(128, int(10 * rmax))
    eta, weta = gauss_legendre(neta, -rmax, rmax)
    nsig = 64
    xi, wxi = np.polynomial.legendre.leggauss(nsig)
    xi = 0.5 * (xi + 1.0)
    wxi = 0.5 * wxi

    total = 0.0 + 0.0j
    for e, we in zip(eta, weta):
        y = math.exp(e)
        sigmax = math.sqrt(max(rmax - abs(e), 0.0))
        if sigmax <= 0:
            continue
        sig = sigmax * xi
        wsig = sigmax * wxi
        r = abs(e) + sig * sig
        dc = 2.0 * np.sinh(0.5 * sig * sig) * np.sinh(0.5 * (r + abs(e)))
        wline = np.sqrt(np.maximum(2.0 * y * dc, 0.0))
        wline = np.maximum(wline, 1e-300)
        jac = 2.0 * sig * y * np.sinh(r) / wline
        inner = _inner_distance_integral(t, r, 2.0 * k, eps=eps)
        phi2p = 2.0 * np.arctan2(y + 1.0, wline) - math.pi
        phi2m = 2.0 * np.arctan2(y + 1.0, -wline) - math.pi
        if k.real == 0.0:
            pair = np.exp(-k.imag * phi2p) + np.exp(-k.imag * phi2m)
        else:
            pair = np.exp(1j * k * phi2p) + np.exp(1j * k * phi2m)
        total += we * math.exp((s - 1.0) * e) * np.sum(wsig * jac * pair * inner)

    pref = _SQRT2 * np.exp(-t / 8.0 - k * k * t / 2.0) / (2.0 * math.pi * t) ** 1.5
    out = pref * total
    return complex(out)


def _eta_panels(t: float, eps: float) -> tuple[np.ndarray, np.ndarray]:
    etamax = 12.0 + math.sqrt(2.0 * t * math.log(1.0 / eps))
    edges = [-etamax, -8.0, -3.0, 3.0, 8.0, etamax]
    xs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        x, w = gauss_legendre(_NETA_PANEL, a, b)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def hp_density_integral(params: HpParams, t: float, x0: float, w: float,
                        alt: bool = False,
                        cfg: QuadConfig | None = None) -> float:
    """Transition density g_t(x0, w) by the half-plane kernel route:

    g_t(x0, w) = e^{(1-4 mu^2) t/8} e^{-nu^2 t/2}
                 int_0^inf y^{mu - 3/2} Q_{t, i nu}(i, (w - x0 y) + iy) dy,

    with the Mellin variable substituted y = e^eta.  With ``alt`` the
    conjugate representation is used: exponent -mu - 1/2, kernel tilt
    of -nu, and the speed-density prefactor ratio between x0 and w.
    """
    return float(hp_density_integral_grid(params, t, x0, np.array([w]), alt, cfg)[0])


def hp_density_integral_grid(params: HpParams, t: float, x0: float, ws,
                             alt: bool = False,
                             cfg: QuadConfig | None = None) -> np.ndarray:
    if t <= 0:
        raise ValueError("need t > 0")
    cfg = cfg or QuadConfig()
    mu, nu = params.mu, params.nu
    eta, weta = _eta_panels(t, cfg.tail_cutoff_epsilon)
    y = np.exp(eta)
    p = (mu - 0.5) if not alt else (0.5 - mu)
    tilt_nu = nu if not alt else -nu
    ws = np.asarray(ws, dtype=float)
    out = np.empty(len(ws))
    pref = math.exp(-mu * mu * t / 2.0) * _SQRT2 / (2.0 * math.pi * t) ** 1.5
    for i, wv in enumerate(ws):
        q = _tilted_kernel_batch(t, tilt_nu, wv - x0 * y, y,
                                 cfg.tail_cutoff_epsilon)
        out[i] = pref * float(np.sum(weta * np.exp(p * eta) * q))
    if alt:
        ratio = (np.exp(2.0 * nu * arccot(x0)) * (1.0 + x0 * x0) ** (0.5 - mu)
                 / (np.exp(2.0 * nu * arccot(ws)) * (1.0 + ws * ws) ** (0.5 - mu)))
        out = out * ratio
    return out


#: clock relation between this density and the stationary-case clock:
#: g_t equals the stationary-case q at time t/2 (coordinate chart halves
#: the diffusion speed), i.e. q_t^(alpha) == g_{2t} at mu = -alpha, nu = 0.
G_TO_Q_CLOCK = 0.5


def hp_charfn(params: HpParams, t: float, v: float, lam: float,
              cfg: QuadConfig | None = None) -> complex:
    """E_v[exp(i lam sinh(Y_t))] via the Hartman-kernel double integral

    e^{-mu^2 t/2} int_R dy e^{i lam sinh(v) e^y + mu y}
        int_0^inf dz e^{2 i nu z}/(2 sinh z)
            e^{-lam (1+e^y) coth z} theta_{2 lam e^{y/2}/sinh z}(t/4).

    Negative lam follows by conjugation; lam = 0 returns 1.  Requires
    t >= 0.2 so the quarter-clock Hartman integral stays above its
    oscillation guard.
    """
    if lam < 0:
        return complex(np.conj(hp_charfn(params, t, v, -lam, cfg)))
    if lam == 0.0:
        return 1.0 + 0.0j
    cfg = cfg or QuadConfig()
    if t / 4.0 < _THETA_T_MIN:
        raise ValueError("hp_charfn needs t >= 0.2 (Hartman oscillation guard)")
    mu, nu = params.mu, params.nu
    tq = t / 4.0
    big = math.log(1.0 / cfg.tail_cutoff_epsilon) + 5.0
    r_cut = 0.02
    y_hi = math.log(max(big / lam, 2.0))
    sv = math.sinh(v)

    def slice_integral(yy: float) -> complex:
        ey = math.exp(yy)
        c = lam * (1.0 + ey)
        ratio = big / c
        z_lo = 0.5 * math.log((ratio + 1.0) / (ratio - 1.0)) if ratio > 1.0 else 0.0
        z_hi = math.asinh(2.0 * lam * math.exp(yy / 2.0) / r_cut)
        if z_hi <= z_lo:
            return 0.0 + 0.0j
        nz = 160
        z, wz = gauss_legendre(nz, max(z_lo, 1e-12), z_hi)
        r = 2.0 * lam * math.exp(yy / 2.0) / np.sinh(z)
        th = _theta_batch(r, tq, cfg)
        vals = np.exp(2j * nu * z) / (2.0 * np.sinh(z)) \
            * np.exp(-c / np.tanh(z)) * th
        return complex(np.sum(wz * vals))

    def panel(a: float, b: float, n: int = 40) -> complex:
        ys, wq = gauss_legendre(n, a, b)
        tot = 0.0 + 0.0j
        for yy, wy in zip(ys, wq):
            tot += wy * np.exp(1j * lam * sv * math.exp(yy) + mu * yy) \
                * slice_integral(yy)
        return tot

    total = panel(-4.0 - math.sqrt(t), y_hi, 48)
    lo = -4.0 - math.sqrt(t)
    for _ in range(8):
        block = panel(lo - 4.0, lo, 32)
        total += block
        lo -= 4.0
        if abs(block) < 1e-10 * max(abs(total), 1e-6):
            break
    return math.exp(-mu * mu * t / 2.0) * total
