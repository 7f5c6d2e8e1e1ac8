"""Shared numerical machinery.

Adaptive Gauss-Kronrod quadrature on finite and infinite intervals,
principal-branch complex powers, Richardson extrapolation to h = 0, and
counter-based reproducible random streams.  Everything here is pure and
safe for concurrent use; an ``RngStream`` is a stateful value owned by
one consumer at a time.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import ndtri


@dataclass(frozen=True)
class QuadConfig:
    """Tolerances and budgets shared by the quadrature routines.

    ``rel_tol``/``abs_tol`` bound the accepted error estimate,
    ``max_subdivisions`` caps adaptive bisection, and
    ``tail_cutoff_epsilon`` drives the truncation rules for integrands
    with Gaussian or exponential tails.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 200
    tail_cutoff_epsilon: float = 1e-14

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0 or self.tail_cutoff_epsilon <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


#: loose defaults for the nested 2-d/3-d density integrals
DENSITY_CONFIG = QuadConfig(rel_tol=1e-6, abs_tol=1e-9)


@dataclass(frozen=True)
class Estimate:
    """A value with a (non-rigorous but honest) error bound."""

    value: float | complex
    error_bound: float

    def __post_init__(self):
        if not (self.error_bound >= 0 and math.isfinite(self.error_bound)):
            raise ValueError("error_bound must be finite and >= 0")


class QuadratureError(RuntimeError):
    """Subdivision budget exhausted with error above tolerance."""


# 15-point Kronrod extension of 7-point Gauss (positive abscissae).
_XGK = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0,
])
_WGK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
])
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
])

_NODES = np.concatenate((-_XGK[:-1], _XGK[::-1]))          # 15 ascending nodes
_KW = np.concatenate((_WGK[:-1], _WGK[::-1]))              # Kronrod weights
_GW = np.zeros(15)
_GW[1:-1:2] = np.concatenate((_WG[:-1], _WG[::-1]))        # embedded Gauss weights


def _gk15(f, a, b):
    """One Gauss-Kronrod panel on [a, b]; returns (value, error).

    The raw Kronrod-Gauss difference is rescaled against the panel's
    total variation (the standard QUADPACK heuristic), which keeps the
    estimate honest on panels with endpoint-singular behavior.
    """
    h = 0.5 * (b - a)
    x = 0.5 * (a + b) + h * _NODES
    y = np.asarray(f(x), dtype=float)
    val = h * float(_KW @ y)
    diff = abs(val - h * float(_GW @ y))
    resasc = abs(h) * float(_KW @ np.abs(y - val / (b - a)))
    if resasc != 0.0 and diff != 0.0:
        err = resasc * min(1.0, (200.0 * diff / resasc) ** 1.5)
    else:
        err = diff
    return val, err


def gauss_legendre(n: int, a: float, b: float):
    """Gauss-Legendre nodes and weights on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(n)
    h = 0.5 * (b - a)
    return 0.5 * (a + b) + h * x, h * w


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    cfg: QuadConfig | None = None,
    singular_left: bool = False,
    breakpoints: Sequence[float] = (),
) -> Estimate:
    """Adaptive Gauss-Kronrod integral of a vectorized integrand.

    Infinite endpoints are allowed: the infinite part is folded to a
    finite interval by the tanh-sinh composition x = s/sqrt(1-s^2)
    (the map handles both exponential and algebraic tails).  With
    ``singular_left`` the substitution z = a + s**2 absorbs an
    inverse-square-root singularity at the left endpoint (finite ``a``
    only).  ``breakpoints`` force initial panel boundaries, which helps
    when the integrand has a sharp interior feature the first panels
    would otherwise miss.

    The integrand must accept and return 1-d numpy arrays.  Raises
    QuadratureError when the subdivision budget is exhausted with the
    error estimate above tolerance.
    """
    cfg = cfg or QuadConfig()
    if not a < b:
        raise ValueError("need a < b")

    g = f
    lo, hi = a, b
    if singular_left:
        if not math.isfinite(a):
            raise ValueError("singular_left requires a finite left endpoint")
        base, inner = a, f
        g = lambda s: 2.0 * s * np.asarray(inner(base + s * s))
        lo = 0.0
        hi = math.sqrt(b - a) if math.isfinite(b) else math.inf
        breakpoints = [math.sqrt(p - base) for p in breakpoints if base < p < b]

    if not math.isfinite(lo) or not math.isfinite(hi):
        inner2, lo2, hi2 = g, lo, hi

        def fold(x: float) -> float:
            return x / math.sqrt(1.0 + x * x)

        def g2(s):
            s = np.asarray(s, dtype=float)
            # panels can round onto the endpoint; the documented decay
            # of the integrand makes the folded value 0 there
            inside = np.abs(s) < 1.0 - 1e-16
            out = np.zeros(s.shape)
            sc = s[inside]
            r2 = 1.0 - sc * sc
            out[inside] = np.asarray(inner2(sc / np.sqrt(r2))) * r2 ** -1.5
            return out

        g = g2
        lo = fold(lo2) if math.isfinite(lo2) else -1.0
        hi = fold(hi2) if math.isfinite(hi2) else 1.0
        breakpoints = [fold(p) for p in breakpoints if lo2 < p < hi2]

    cuts = sorted(set([lo, hi] + [p for p in breakpoints if lo < p < hi]))
    heap = []
    total, toterr = 0.0, 0.0
    for x0, x1 in zip(cuts[:-1], cuts[1:]):
        v, e = _gk15(g, x0, x1)
        total += v
        toterr += e
        heapq.heappush(heap, (-e, x0, x1, v, e))

    for _ in range(cfg.max_subdivisions):
        if toterr <= max(cfg.abs_tol, cfg.rel_tol * abs(total)):
            break
        _, x0, x1, v, e = heapq.heappop(heap)
        mid = 0.5 * (x0 + x1)
        v1, e1 = _gk15(g, x0, mid)
        v2, e2 = _gk15(g, mid, x1)
        total += v1 + v2 - v
        toterr += e1 + e2 - e
        heapq.heappush(heap, (-e1, x0, mid, v1, e1))
        heapq.heappush(heap, (-e2, mid, x1, v2, e2))
    else:
        if toterr > max(cfg.abs_tol, cfg.rel_tol * abs(total)):
            raise QuadratureError(
                f"error {toterr:.3e} above tolerance after "
                f"{cfg.max_subdivisions} subdivisions"
            )
    return Estimate(total, toterr)


def integrate_complex(f, a, b, cfg=None, singular_left=False, breakpoints=()):
    """integrate() for complex-valued integrands (real and imag parts)."""
    re = integrate(lambda x: np.real(f(x)), a, b, cfg, singular_left, breakpoints)
    im = integrate(lambda x: np.imag(f(x)), a, b, cfg, singular_left, breakpoints)
    return Estimate(re.value + 1j * im.value, re.error_bound + im.error_bound)


def gaussian_tail_cutoff(t: float, eps: float) -> float:
    """Truncation point for integrals weighted by exp(-m**2 t)."""
    return math.sqrt(math.log(1.0 / eps) / t) + 5.0


def principal_power(z: complex, a: complex) -> complex:
    """z**a = exp(a log z) with the principal branch, arg in (-pi, pi]."""
    z = complex(z)
    if z == 0:
        raise ZeroDivisionError("principal_power undefined at z = 0")
    return complex(np.exp(complex(a) * np.log(z)))


def richardson_limit(samples: Sequence[tuple[float, float | complex]],
                     power: int = 1) -> Estimate:
    """Polynomial extrapolation of (h, value) samples to h = 0.

    Neville's scheme in the variable h**power (``power = 2`` when the
    caller knows the error expansion is even); the error estimate is
    the size of the final correction.  Needs at least 3 samples with h
    decreasing.
    """
    if len(samples) < 3:
        raise ValueError("richardson_limit needs >= 3 samples")
    hs = [float(h) ** power for h, _ in samples]
    if any(h2 >= h1 for h1, h2 in zip(hs[:-1], hs[1:])):
        raise ValueError("h values must be strictly decreasing")
    tab = [v for _, v in samples]
    orders = [tab[-1]]
    for j in range(1, len(hs)):
        for i in range(len(hs) - 1, j - 1, -1):
            tab[i] = tab[i] + (tab[i] - tab[i - 1]) * hs[i] / (hs[i - j] - hs[i])
        orders.append(tab[-1])
    # error estimate: size of the last order's correction
    return Estimate(orders[-1], float(abs(orders[-1] - orders[-2])))


def _mix64(x: int) -> int:
    """splitmix64 finalizer; spreads stream ids over the key space."""
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return x ^ (x >> 31)


class RngStream:
    """Counter-based (Philox) random stream keyed by (seed, stream_id).

    Identical keys replay byte-identical draws on any platform; distinct
    stream ids are statistically independent.  Normals are produced by
    inverse-CDF from uniforms so that replay does not depend on a
    rejection method's consumption pattern.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.stream_id = int(stream_id) & 0xFFFFFFFFFFFFFFFF
        key = np.array([self.seed, _mix64(self.stream_id)], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def uniforms(self, n: int) -> np.ndarray:
        return self._gen.random(int(n))

    def normals(self, n: int) -> np.ndarray:
        u = self.uniforms(n)
        # keep ndtri off the exact endpoints
        return ndtri(np.clip(u, 1e-300, 1.0 - 1e-16))

    def child(self, k: int) -> "RngStream":
        """Independent substream; deterministic in (stream_id, k)."""
        return RngStream(self.seed, _mix64(self.stream_id ^ _mix64(k + 1)))
