"""Monte-Carlo oracles: Euler schemes and change-of-measure checks.

Everything simulates on the (mu, nu) chart, where the state equation
dY = (mu tanh Y + nu sech Y) dt + dB has additive noise; samples of the
diffusion itself are sinh(endpoint).  All randomness flows through
RngStream, so a (seed, stream_id) pair replays bit-identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import gammaincinv

from .quad import RngStream
from .specfun import HpParams, arccot


@dataclass(frozen=True)
class SampleSet:
    """Endpoint draws plus the metadata needed to reproduce them."""

    values: np.ndarray
    t: float
    n_steps: int
    seed: int
    stream_id: int
    label: str = ""

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise ValueError("sample set contains non-finite values")


def simulate_y(params: HpParams, y0: float, t: float, n_steps: int,
               stream: RngStream, n_paths: int = 1) -> np.ndarray:
    """Euler endpoints of dY = (mu tanh Y + nu sech Y) dt + dB.

    Returns the Y endpoints (one per path); the diffusion sample is
    sinh of the result.
    """
    if n_steps < 1:
        raise ValueError("n_steps >= 1")
    mu, nu = params.mu, params.nu
    dt = t / n_steps
    sq = math.sqrt(dt)
    y = np.full(n_paths, float(y0))
    for _ in range(n_steps):
        y += (mu * np.tanh(y) + nu / np.cosh(y)) * dt + sq * stream.normals(n_paths)
    return y


def _sim_y_with_path_integrals(params: HpParams, y0: float, t: float,
                               n_steps: int, stream: RngStream, n_paths: int):
    """Endpoints plus left-point Riemann sums of sinh/cosh^2 and 1/cosh^2."""
    mu, nu = params.mu, params.nu
    dt = t / n_steps
    sq = math.sqrt(dt)
    y = np.full(n_paths, float(y0))
    i_sc = np.zeros(n_paths)
    i_cc = np.zeros(n_paths)
    for _ in range(n_steps):
        ch = np.cosh(y)
        i_sc += np.sinh(y) / (ch * ch) * dt
        i_cc += dt / (ch * ch)
        y += (mu * np.tanh(y) + nu / ch) * dt + sq * stream.normals(n_paths)
    return y, i_sc, i_cc


def sample_expfunctional(params: HpParams, x0: float, t: float, n_steps: int,
                         stream: RngStream, n_paths: int = 1) -> np.ndarray:
    """Draws of x0 e^{B_t^(mu)} + int_0^t e^{B_s^(mu)} d gamma_s^(nu).

    Two independent drifted Brownian motions; the stochastic integral
    is a left-point (Ito) Riemann sum.  Targets the same law as
    sinh(simulate_y) started from sinh^{-1}(x0)... = asinh(x0).
    """
    if n_steps < 1:
        raise ValueError("n_steps >= 1")
    mu, nu = params.mu, params.nu
    dt = t / n_steps
    sq = math.sqrt(dt)
    b = np.zeros(n_paths)
    acc = np.zeros(n_paths)
    for _ in range(n_steps):
        dgam = nu * dt + sq * stream.normals(n_paths)
        acc += np.exp(b) * dgam
        b += mu * dt + sq * stream.normals(n_paths)
    return x0 * np.exp(b) + acc


def _exp_functionals(mu: float, t: float, n_steps: int, stream: RngStream,
                     n_paths: int, with_a: bool = False):
    """Riemann sums A_t = int e^{2B} ds and (optionally) a_t = int e^B ds."""
    dt = t / n_steps
    sq = math.sqrt(dt)
    b = np.zeros(n_paths)
    big = np.zeros(n_paths)
    small = np.zeros(n_paths) if with_a else None
    for _ in range(n_steps):
        eb = np.exp(b)
        big += eb * eb * dt
        if with_a:
            small += eb * dt
        b += mu * dt + sq * stream.normals(n_paths)
    return (big, small) if with_a else big


def simulate_particles(pp, x0, t: float, n_steps: int, stream: RngStream,
                       n_paths: int = 1) -> np.ndarray:
    """Euler endpoints of the interacting system

    dX_n = sqrt(2(1+X_n^2)) dW_n
           + 2[ (1-N-Re s) X_n + Im s + sum_{j!=n} (1+X_n^2)/(X_n-X_j) ] dt.

    Near-collisions (gap < 1e-4) are integrated with locally halved
    steps down to a floor of dt/64; a path that still collides is
    discarded and resampled from a fresh substream.  Returns endpoints
    of shape (n_paths, N), decreasingly ordered in each row.
    """
    from .particles import ParticleParams  # local import to avoid a cycle

    if isinstance(pp, ParticleParams):
        N, s_re, s_im = pp.N, pp.s_re, pp.s_im
    else:
        raise TypeError("pp must be ParticleParams")
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (N,) or not np.all(np.diff(x0) < 0):
        raise ValueError("x0 must be a strictly decreasing N-vector")
    dt = t / n_steps
    lin = 1.0 - N - s_re

    def drift(x):
        d = 2.0 * (lin * x + s_im)
        if N > 1:
            for j in range(N):
                diff = x - x[:, [j]]
                diff[:, j] = np.inf
                d += 2.0 * (1.0 + x * x) / diff
        return d

    def euler_block(x, h, draws):
        return x + drift(x) * h + np.sqrt(2.0 * (1.0 + x * x) * h) * draws

    x = np.tile(x0, (n_paths, 1))
    for _ in range(n_steps):
        draws = stream.normals(n_paths * N).reshape(n_paths, N)
        xn = euler_block(x, dt, draws)
        gap = np.min(-np.diff(xn, axis=1), axis=1) if N > 1 else np.full(n_paths, np.inf)
        bad = gap < 1e-4
        if np.any(bad):
            xb = x[bad]
            for halvings in range(1, 7):           # floor dt/64
                sub = 2 ** halvings
                h = dt / sub
                ok = np.ones(xb.shape[0], dtype=bool)
                xtry = xb.copy()
                for _k in range(sub):
                    d2 = stream.normals(xtry.shape[0] * N).reshape(-1, N)
                    xtry = euler_block(xtry, h, d2)
                    ok &= np.min(-np.diff(xtry, axis=1), axis=1) > 0
                if np.all(ok) or halvings == 6:
                    break
            xn[bad] = xtry
        x = xn
    # a residual unordered path (floor breached) is resampled whole
    if N > 1:
        broken = np.where(np.min(-np.diff(x, axis=1), axis=1) <= 0)[0]
        for idx, path in enumerate(broken):
            redo = simulate_particles(pp, x0, t, n_steps,
                                      stream.child(1000 + idx), n_paths=1)
            x[path] = redo[0]
    return x


def ks_distance(samples, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """Sup distance between the empirical CDF of ``samples`` and ``cdf``."""
    vals = samples.values if isinstance(samples, SampleSet) else np.asarray(samples)
    if len(vals) < 100:
        raise ValueError("ks_distance needs >= 100 samples")
    xs = np.sort(vals)
    n = len(xs)
    f = np.asarray(cdf(xs), dtype=float)
    hi = np.max(np.abs(f - np.arange(1, n + 1) / n))
    lo = np.max(np.abs(f - np.arange(0, n) / n))
    return float(max(hi, lo))


def density_cdf(grid: np.ndarray, dens: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    """CDF interpolant from density values on an increasing grid."""
    c = np.concatenate(([0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(grid))))
    c /= c[-1]
    return lambda x: np.interp(x, grid, c, left=0.0, right=1.0)


def check_girsanov(params: HpParams, t: float, variant: str, test_fn,
                   n: int, streams: tuple[RngStream, RngStream],
                   n_steps: int = 2000, y0: float = 0.0):
    """Change-of-measure consistency for the Y diffusion; returns
    (lhs, rhs, ci) with ci a 3-sigma half-width for the difference.

    endpoint: E^{mu,nu}[F(Y_t)] vs
        e^{(1/2-mu)t} E^{1-mu,-nu}[F(Y_t) W(sinh Y_t) e^{2 nu h(Y_t)}],
        h(x) = arctan(sinh x), W(x) = (1+x^2)^(mu-1/2); the weights are
        normalized by their value at y0 so any start point works.
    path: E^{mu,nu}[F(Y_t)] vs E^{mu,0}[F(Y_t) exp(nu h(Y_t) - nu h(y0)
        + nu(1-2mu)/2 int sinh/cosh^2 - nu^2/2 int 1/cosh^2)].
    """
    if n < 10_000:
        raise ValueError("check_girsanov needs n >= 1e4")
    mu, nu = params.mu, params.nu
    s1, s2 = streams
    y1 = simulate_y(params, y0, t, n_steps, s1, n)
    f1 = np.asarray(test_fn(y1), dtype=float)
    lhs, lvar = float(np.mean(f1)), float(np.var(f1) / n)

    if variant == "endpoint":
        flip = HpParams.from_mu_nu(1.0 - mu, -nu)
        y2 = simulate_y(flip, y0, t, n_steps, s2, n)
        h = np.arctan(np.sinh(y2))
        w = (1.0 + np.sinh(y2) ** 2) ** (mu - 0.5)
        h0 = math.atan(math.sinh(y0))
        w0 = (1.0 + math.sinh(y0) ** 2) ** (mu - 0.5)
        g = (np.asarray(test_fn(y2), dtype=float) * (w / w0)
             * np.exp(2.0 * nu * (h - h0)) * math.exp((0.5 - mu) * t))
    elif variant == "path":
        base = HpParams.from_mu_nu(mu, 0.0)
        y2, i_sc, i_cc = _sim_y_with_path_integrals(base, y0, t, n_steps, s2, n)
        h = np.arctan(np.sinh(y2))
        h0 = math.atan(math.sinh(y0))
        g = (np.asarray(test_fn(y2), dtype=float)
             * np.exp(nu * (h - h0) + nu * (1.0 - 2.0 * mu) / 2.0 * i_sc
                      - nu * nu / 2.0 * i_cc))
    else:
        raise ValueError("variant must be 'endpoint' or 'path'")
    rhs, rvar = float(np.mean(g)), float(np.var(g) / n)
    return lhs, rhs, 3.0 * math.sqrt(lvar + rvar)


def check_dufresne(mu: float, t: float, psi, n: int,
                   streams: tuple[RngStream, RngStream],
                   n_steps: int = 2000):
    """Exponential-functional reflection identity (mu < 1/2):

    e^{mu^2 t/2} E[A_mu^{-1/2} psi(1/A_mu)]
      = e^{(1-mu)^2 t/2} E[A_{1-mu}^{-1/2} psi(1/A_{1-mu} + 2 G)],
    A_m = int_0^t e^{2 B_s^{(m)}} ds and G an independent
    Gamma(1/2 - mu) draw (inverse-CDF sampled).
    """
    if mu >= 0.5:
        raise ValueError("check_dufresne needs mu < 1/2")
    s1, s2 = streams
    a1 = _exp_functionals(mu, t, n_steps, s1, n)
    f1 = math.exp(mu * mu * t / 2.0) * np.asarray(psi(1.0 / a1)) / np.sqrt(a1)
    a2 = _exp_functionals(1.0 - mu, t, n_steps, s2, n)
    g = gammaincinv(0.5 - mu, s2.uniforms(n))
    f2 = (math.exp((1.0 - mu) ** 2 * t / 2.0)
          * np.asarray(psi(1.0 / a2 + 2.0 * g)) / np.sqrt(a2))
    return (float(np.mean(f1)), float(np.mean(f2)),
            3.0 * math.sqrt(np.var(f1) / n + np.var(f2) / n))


def check_iden(mu: float, nu: float, t: float, u: float, n: int,
               streams: tuple[RngStream, RngStream],
               n_steps: int = 2000):
    """Gaussian-mixture form of the reflection identity:

    E[(2 pi A_mu)^{-1/2} e^{-(u - nu a_mu)^2/(2 A_mu)}]
      = e^{(1/2-mu)t} eta(u)
        E[(2 pi A_{1-mu})^{-1/2} e^{-(u + nu a_{1-mu})^2/(2 A_{1-mu})}],
    eta(u) = (1+u^2)^{mu-1/2} e^{nu (pi - 2 arccot u)}.
    """
    s1, s2 = streams
    a1, sm1 = _exp_functionals(mu, t, n_steps, s1, n, with_a=True)
    f1 = np.exp(-(u - nu * sm1) ** 2 / (2.0 * a1)) / np.sqrt(2.0 * math.pi * a1)
    a2, sm2 = _exp_functionals(1.0 - mu, t, n_steps, s2, n, with_a=True)
    eta = (1.0 + u * u) ** (mu - 0.5) * math.exp(nu * (math.pi - 2.0 * arccot(u)))
    f2 = (math.exp((0.5 - mu) * t) * eta
          * np.exp(-(u + nu * sm2) ** 2 / (2.0 * a2)) / np.sqrt(2.0 * math.pi * a2))
    return (float(np.mean(f1)), float(np.mean(f2)),
            3.0 * math.sqrt(np.var(f1) / n + np.var(f2) / n))
