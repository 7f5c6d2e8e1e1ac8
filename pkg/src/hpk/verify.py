"""Machine verification of the library's defining identities.

Each check computes a residual for one identity and compares it with a
fixed tolerance; suites group the checks by module.  The same registry
backs the command-line ``verify`` subcommand and the acceptance test
module, so there is exactly one source of truth for tolerances.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, asdict

import numpy as np

from . import maass, particles, spectral, stochastic
from .quad import QuadConfig, RngStream, integrate
from .specfun import (HpParams, cgamma, ferrer_p, hyp2f1, phi_eigen,
                      phi_flat_form, phi_series_form, romanovski,
                      stationary_density, weight_w)


@dataclass
class CheckRecord:
    name: str
    anchor: str
    residual: float
    tol: float
    passed: bool
    ms: float


@dataclass
class VerificationReport:
    records: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def add(self, name: str, anchor: str, residual: float, tol: float, ms: float):
        ok = math.isfinite(residual) and residual <= tol
        self.records.append(CheckRecord(name, anchor, float(residual),
                                        float(tol), bool(ok), float(ms)))

    def to_json(self) -> str:
        return json.dumps(
            [{"name": r.name, "anchor": r.anchor, "residual": r.residual,
              "tol": r.tol, "pass": r.passed} for r in self.records],
            indent=2)

    def summary_lines(self):
        for r in self.records:
            status = "PASS" if r.passed else "FAIL"
            yield (f"[{status}] {r.name:<38s} residual={r.residual:10.3e} "
                   f"tol={r.tol:8.1e} ({r.ms:7.1f} ms)")


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, (time.perf_counter() - t0) * 1e3


# ---------------------------------------------------------------- specfun

def suite_specfun(report: VerificationReport):
    def rep_equality():
        worst = 0.0
        for alpha in (0.7, 1.5, 3.0):
            for m in (0.5, 2.0):
                for u in range(-5, 6):
                    a = phi_series_form(alpha, m, float(u))
                    b = phi_flat_form(alpha, m, float(u))
                    worst = max(worst, abs(a - b) / abs(a))
        return worst
    res, ms = _timed(rep_equality)
    report.add("eigenfunction-representations", "continuous-eigenfunction", res, 1e-10, ms)

    def lemrom():
        worst = 0.0
        for alpha in (1.2, 2.5, 3.7):
            for n in range(int(math.floor(alpha)) + 1):
                cst = (2.0 ** (n - alpha) * math.sqrt(math.pi)
                       * math.gamma(1 + 2 * alpha - n) / math.gamma(alpha + 0.5 - n))
                for u in np.linspace(-4, 4, 17):
                    u = float(u)
                    lhs = romanovski(n, alpha, 0.0, u)
                    x = -u / math.sqrt(1 + u * u)
                    rhs = cst * (1 + u * u) ** (alpha / 2.0) \
                        * ferrer_p(alpha, n - alpha, x).real
                    worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1e-30))
        return worst
    res, ms = _timed(lemrom)
    report.add("polynomial-ferrers-link", "rodrigues-vs-legendre", res, 1e-8, ms)

    def sqnor():
        alpha = 3.2
        worst = 0.0
        for n in range(3):
            closed = spectral.norm_sq(n, alpha)
            est = integrate(
                lambda u, nn=n: np.array(
                    [romanovski(nn, alpha, 0.0, float(x)) ** 2 for x in np.atleast_1d(u)]
                ) * weight_w(alpha, np.atleast_1d(u)),
                -np.inf, np.inf, QuadConfig(rel_tol=1e-9, abs_tol=1e-12))
            worst = max(worst, abs(est.value - closed) / closed)
        return worst
    res, ms = _timed(sqnor)
    report.add("norm-closed-form", "squared-norm", res, 1e-6, ms)

    def trivia():
        worst = abs(cgamma(0.5) - math.sqrt(math.pi)) / math.sqrt(math.pi)
        worst = max(worst, abs(cgamma(5.0) - 24.0) / 24.0)
        target = math.pi / math.sinh(math.pi)
        worst = max(worst, abs(cgamma(1 + 1j) * cgamma(1 - 1j) - target) / target)
        worst = max(worst, abs(hyp2f1(1, 1, 2, 0.5) - 2 * math.log(2)) / (2 * math.log(2)))
        return worst
    res, ms = _timed(trivia)
    report.add("gamma-hypergeometric-values", "classical-values", res, 1e-11, ms)

    def conjugation():
        worst = 0.0
        for alpha in (0.7, 2.2):
            for m in (0.5, 1.5):
                for u in (-1.3, 0.4, 2.0):
                    a = phi_eigen(alpha, 0.0, -m, u)
                    b = np.conj(phi_eigen(alpha, 0.0, m, u))
                    worst = max(worst, abs(a - b) / abs(a))
        return worst
    res, ms = _timed(conjugation)
    report.add("eigenfunction-conjugation", "conjugate-order", res, 1e-11, ms)


# ---------------------------------------------------------------- spectral

def suite_spectral(report: VerificationReport):
    cfg = QuadConfig()

    def normalization():
        worst = 0.0
        for alpha in (1.5, 2.0, 3.0):
            for t in (0.5, 1.0):
                for v in (0.0, 1.0):
                    est = integrate(
                        lambda us: spectral.hp_density_spectral_grid(alpha, t, v, np.atleast_1d(us)),
                        -np.inf, np.inf,
                        QuadConfig(rel_tol=1e-7, abs_tol=1e-9))
                    worst = max(worst, abs(est.value - 1.0))
        return worst
    res, ms = _timed(normalization)
    report.add("expansion-normalization", "density-total-mass", res, 1e-4, ms)

    def reversibility():
        worst = 0.0
        for alpha, t in ((1.5, 0.5), (2.0, 1.0), (3.0, 0.5)):
            for (v, u) in ((0.3, -1.2), (1.0, 2.0), (-0.5, 0.1)):
                a = weight_w(alpha, v) * spectral.hp_density_spectral(alpha, t, v, u)
                b = weight_w(alpha, u) * spectral.hp_density_spectral(alpha, t, u, v)
                worst = max(worst, abs(a - b) / abs(a))
        return worst
    res, ms = _timed(reversibility)
    report.add("detailed-balance", "weight-symmetry", res, 1e-8, ms)

    def chapman():
        alpha, t, s = 1.5, 0.4, 0.6
        worst = 0.0
        for v in (-1.0, 0.0, 1.0):
            for u in (-1.0, 0.0, 1.0):
                est = integrate(
                    lambda ws: spectral.hp_density_spectral_grid(alpha, t, v, np.atleast_1d(ws))
                    * np.array([spectral.hp_density_spectral(alpha, s, float(w), u)
                                for w in np.atleast_1d(ws)]),
                    -np.inf, np.inf, QuadConfig(rel_tol=1e-6, abs_tol=1e-8))
                direct = spectral.hp_density_spectral(alpha, t + s, v, u)
                worst = max(worst, abs(est.value - direct))
        return worst
    res, ms = _timed(chapman)
    report.add("chapman-kolmogorov", "semigroup-property", res, 1e-3, ms)

    def integral0():
        worst = 0.0
        for alpha, t, v in ((1.5, 1.0, 0.0), (2.0, 0.5, 1.0), (3.0, 1.0, 0.0)):
            worst = max(worst, abs(spectral.check_integral0(alpha, t, v)))
        return worst
    res, ms = _timed(integral0)
    report.add("vanishing-cross-mass", "continuous-part-zero-mass", res, 1e-6, ms)

    def eigen_fd():
        worst = 0.0
        for alpha, K in ((2.5, 0.0), (2.5, 1.0), (3.7, 0.5)):
            params = HpParams.from_alpha(alpha, K)
            for n in range(int(math.floor(alpha - 1)) + 1):
                lam = n * (2 * alpha - n)
                for u in (-1.0, 0.2, 1.5):
                    f = lambda x, nn=n: romanovski(nn, alpha, K, x)
                    got = spectral.apply_generator_fd(params, f, u)
                    want = -lam * f(u)
                    worst = max(worst, abs(got - want) / (1.0 + abs(want)))
        return worst
    res, ms = _timed(eigen_fd)
    report.add("generator-eigenfunction", "polynomial-eigenvalues", res, 1e-6, ms)

    def intertwining():
        worst = 0.0
        for (A, K) in ((1.5, 0.0), (2.0, 1.0)):
            params = HpParams(A, K)
            for f in (lambda x: 1.0, lambda x: x, lambda x: x * x):
                for u in (0.0, 0.5, 1.0):
                    worst = max(worst, abs(spectral.check_intertwining(params, f, u)))
        return worst
    res, ms = _timed(intertwining)
    report.add("conjugation-intertwining", "parameter-flip", res, 1e-6, ms)

    def prop3():
        worst = 0.0
        for (n, alpha, K, u) in ((0, 2.5, 1.0, 0.7), (1, 2.5, 1.0, 0.7)):
            lhs, rhs = spectral.prop3_check(n, alpha, K, u, cfg)
            worst = max(worst, abs(lhs - rhs) / abs(rhs))
        return worst
    res, ms = _timed(prop3)
    report.add("beta-integral-map", "symmetric-to-deformed", res, 1e-4, ms)

    def longtime():
        alpha, t = 1.5, 30.0
        worst = 0.0
        for u in (-1.0, 0.0, 2.0):
            got = spectral.hp_density_spectral(alpha, t, 0.0, u)
            worst = max(worst, abs(got - stationary_density(alpha, u)))
        return worst
    res, ms = _timed(longtime)
    report.add("long-time-limit", "stationary-law", res, 1e-4, ms)


# ------------------------------------------------------------------ maass

def suite_maass(report: VerificationReport):
    def theta_checks():
        worst = 0.0
        for r in (0.5, 1.0, 2.0):
            for t in (0.25, 1.0, 4.0):
                if maass.theta_hw(r, t) <= 0:
                    worst = max(worst, 1.0)
        ratio = maass.theta_hw(0.01, 1.0) / maass.theta_hw(0.5, 1.0)
        if not ratio < 0.05:
            worst = max(worst, ratio)
        return worst
    res, ms = _timed(theta_checks)
    report.add("hartman-positivity-decay", "oscillatory-kernel", res, 1e-12, ms)

    def moments():
        worst = 0.0
        t = 1.0
        for s in (0.5, 1.0, 1.5):
            for k in (0.0, 0.7, 0.5j):
                got = maass.maass_moment(s, k, t)
                want = np.exp((s * (s - 1.0) - k * k) * t / 2.0)
                worst = max(worst, abs(got - want) / abs(want))
        return worst
    res, ms = _timed(moments)
    report.add("kernel-moment-identity", "power-moments", res, 1e-4, ms)

    def g_normalization():
        worst = 0.0
        for (mu, nu) in ((-1.5, 0.5), (0.8, 1.0)):
            params = HpParams.from_mu_nu(mu, nu)
            est = integrate(
                lambda ws: maass.hp_density_integral_grid(params, 1.0, 0.0, np.atleast_1d(ws)),
                -np.inf, np.inf, QuadConfig(rel_tol=1e-6, abs_tol=1e-8))
            worst = max(worst, abs(est.value - 1.0))
        return worst
    res, ms = _timed(g_normalization)
    report.add("density-normalization", "integral-route-mass", res, 1e-3, ms)

    def alt_agreement():
        worst = 0.0
        for (mu, nu) in ((-1.5, 0.5), (0.8, 1.0)):
            params = HpParams.from_mu_nu(mu, nu)
            for w in (-1.5, 0.0, 0.7, 2.0):
                a = maass.hp_density_integral(params, 1.0, 0.3, w)
                b = maass.hp_density_integral(params, 1.0, 0.3, w, alt=True)
                worst = max(worst, abs(a - b) / abs(a))
        return worst
    res, ms = _timed(alt_agreement)
    report.add("dual-representation", "conjugate-form", res, 1e-4, ms)

    def cross_route():
        alpha, t = 1.5, 0.5
        params = HpParams.from_mu_nu(-alpha, 0.0)
        worst = 0.0
        for v in (0.0, 1.0, -1.0):
            for u in (0.0, 1.0, -1.0):
                q = spectral.hp_density_spectral(alpha, t, v, u)
                g = maass.hp_density_integral(params, 2.0 * t, v, u)
                worst = max(worst, abs(q - g) / abs(q))
        return worst
    res, ms = _timed(cross_route)
    report.add("spectral-vs-integral", "route-consistency", res, 1e-3, ms)

    def fourier():
        worst = 0.0
        t = 1.0
        wgrid = np.linspace(-48.0, 48.0, 1441)
        for (mu, nu) in ((-1.5, 0.0), (-1.0, 0.5)):
            params = HpParams.from_mu_nu(mu, nu)
            dens = maass.hp_density_integral_grid(params, t, 0.0, wgrid)
            for lam in (0.5, 1.0, 2.0):
                cf = maass.hp_charfn(params, t, 0.0, lam)
                ft = np.trapezoid(np.exp(1j * lam * wgrid) * dens, wgrid)
                worst = max(worst, abs(cf - ft))
        return worst
    res, ms = _timed(fourier)
    report.add("fourier-consistency", "characteristic-function", res, 1e-3, ms)

    def speed_symmetry():
        worst = 0.0
        params = HpParams.from_mu_nu(-1.2, 0.6)
        from .specfun import speed_density
        for (v, u) in ((0.0, 1.0), (-0.8, 0.5), (1.2, 2.0)):
            a = speed_density(params, v) * maass.hp_density_integral(params, 1.0, v, u)
            b = speed_density(params, u) * maass.hp_density_integral(params, 1.0, u, v)
            worst = max(worst, abs(a - b) / abs(a))
        return worst
    res, ms = _timed(speed_symmetry)
    report.add("speed-measure-symmetry", "kernel-reversibility", res, 1e-6, ms)


# -------------------------------------------------------------- stochastic

def suite_stochastic(report: VerificationReport, n_paths: int = 100_000,
                     n_steps: int = 2000):
    def ratio(lhs, rhs, ci):
        return abs(lhs - rhs) / ci if ci > 0 else math.inf

    def girsanov_endpoint():
        params = HpParams.from_mu_nu(0.8, 0.5)
        lhs, rhs, ci = stochastic.check_girsanov(
            params, 1.0, "endpoint", lambda y: np.exp(-y * y), n_paths,
            (RngStream(101, 1), RngStream(101, 2)), n_steps)
        return ratio(lhs, rhs, ci)
    res, ms = _timed(girsanov_endpoint)
    report.add("measure-change-endpoint", "parameter-flip-weights", res, 1.0, ms)

    def girsanov_path():
        params = HpParams.from_mu_nu(0.8, 0.5)
        lhs, rhs, ci = stochastic.check_girsanov(
            params, 1.0, "path", lambda y: np.exp(-y * y), n_paths,
            (RngStream(202, 1), RngStream(202, 2)), n_steps)
        return ratio(lhs, rhs, ci)
    res, ms = _timed(girsanov_path)
    report.add("measure-change-path", "drift-removal-weights", res, 1.0, ms)

    def dufresne():
        worst = 0.0
        for (mu, t, psi) in ((0.0, 1.0, lambda x: np.exp(-x)),
                             (-0.5, 0.5, lambda x: 1.0 / (1.0 + x))):
            lhs, rhs, ci = stochastic.check_dufresne(
                mu, t, psi, n_paths,
                (RngStream(303, 1), RngStream(303, 2)), n_steps)
            worst = max(worst, ratio(lhs, rhs, ci))
        return worst
    res, ms = _timed(dufresne)
    report.add("exp-functional-reflection", "gamma-augmented-identity", res, 1.0, ms)

    def iden():
        worst = 0.0
        for (mu, nu, t, u) in ((0.8, 0.5, 1.0, 0.3), (0.5, 1.0, 0.5, -1.0)):
            lhs, rhs, ci = stochastic.check_iden(
                mu, nu, t, u, n_paths,
                (RngStream(404, 1), RngStream(404, 2)), n_steps)
            worst = max(worst, ratio(lhs, rhs, ci))
        return worst
    res, ms = _timed(iden)
    report.add("gaussian-mixture-reflection", "joint-functional-identity", res, 1.0, ms)

    def samplers_and_law():
        mu, nu, t = -1.5, 0.5, 1.0
        params = HpParams.from_mu_nu(mu, nu)
        y = stochastic.simulate_y(params, 0.0, t, n_steps, RngStream(505, 1), n_paths)
        s1 = np.sinh(y)
        s2 = stochastic.sample_expfunctional(params, 0.0, t, n_steps,
                                             RngStream(505, 2), n_paths)
        grid = np.linspace(-14.0, 14.0, 561)
        dens = maass.hp_density_integral_grid(params, t, 0.0, grid)
        cdf = stochastic.density_cdf(grid, dens)
        return max(stochastic.ks_distance(s1, cdf), stochastic.ks_distance(s2, cdf))
    res, ms = _timed(samplers_and_law)
    report.add("law-vs-density", "samplers-against-analytic-law", res, 0.02, ms)


# --------------------------------------------------------------- particles

def suite_particles(report: VerificationReport, n_paths: int = 20_000,
                    n_steps: int = 1000):
    pp = particles.ParticleParams(0.25, 0.0, 2)
    x0 = particles.ParticleState.of((1.0, -1.0))
    t = 0.5

    def chamber():
        # km_density extends symmetrically across the diagonal: the
        # chamber integral is half the full tensor integral
        n = 128
        th, wq = np.polynomial.legendre.leggauss(n)
        th = 0.5 * th * math.pi * (1 - 1e-9)
        wq = wq * 0.5 * math.pi
        ys = np.tan(th)
        jac = wq / np.cos(th) ** 2
        one = pp.one_particle()
        g0 = maass.hp_density_integral_grid(one, particles.CLOCK_FACTOR * t, x0.arr[0], ys)
        g1 = maass.hp_density_integral_grid(one, particles.CLOCK_FACTOR * t, x0.arr[1], ys)
        pref = math.exp(-particles.lambda_sn(pp) * t) / particles.vandermonde(x0.arr)
        a = jac * g0
        b = jac * g1
        diff = np.subtract.outer(ys, ys)
        det = np.outer(a, b) - np.outer(b, a)
        # V(y) det[...] extends symmetrically, so chamber = full plane / 2
        total = 0.5 * pref * float(np.sum(diff * det))
        return abs(total - 1.0)
    res, ms = _timed(chamber)
    report.add("chamber-normalization", "determinantal-total-mass", res, 1e-2, ms)

    def det_vs_km():
        y = particles.ParticleState.of((0.8, -0.6))
        km = particles.km_density(pp, t, x0, y)
        det_form, ordered = particles.particles_density_spectral(pp, t, x0, y)
        return max(abs(det_form - km) / abs(km), abs(ordered - det_form) / abs(det_form))
    res, ms = _timed(det_vs_km)
    report.add("determinant-route-consistency", "kernel-vs-expansion", res, 1e-2, ms)

    def mc_marginal():
        ends = stochastic.simulate_particles(pp, x0.arr, t, n_steps,
                                             RngStream(606, 1), n_paths)
        grid = np.linspace(-12.0, 12.0, 481)
        dens = particles.km_marginal_grid(pp, t, x0, grid, component=0)
        cdf = stochastic.density_cdf(grid, dens)
        return stochastic.ks_distance(ends[:, 0], cdf)
    res, ms = _timed(mc_marginal)
    report.add("marginal-law", "simulation-vs-kernel", res, 0.05, ms)

    def stationarity():
        pp1 = particles.ParticleParams(0.25, 0.0, 1)
        t1 = 0.5
        z = particles.invariant_normalize(pp1)
        worst = 0.0
        for yv in (0.0, 0.8):
            est = integrate(
                lambda xs: np.array([
                    particles.invariant_density(pp1, particles.ParticleState.of((float(xx),)))
                    * particles.km_density(pp1, t1,
                                           particles.ParticleState.of((float(xx),)),
                                           particles.ParticleState.of((yv,)))
                    for xx in np.atleast_1d(xs)]) / z,
                -np.inf, np.inf, QuadConfig(rel_tol=1e-5, abs_tol=1e-7,
                                            max_subdivisions=60))
            want = particles.invariant_density(pp1, particles.ParticleState.of((yv,))) / z
            worst = max(worst, abs(est.value - want) / want)
        return worst
    res, ms = _timed(stationarity)
    report.add("invariant-stationarity", "stationary-measure", res, 2e-2, ms)


_SUITES = {
    "specfun": suite_specfun,
    "spectral": suite_spectral,
    "maass": suite_maass,
    "stochastic": suite_stochastic,
    "particles": suite_particles,
}


def run_suite(name: str, **kwargs) -> VerificationReport:
    """Run one named suite, or 'all'; returns the populated report."""
    report = VerificationReport()
    if name == "all":
        for fn in _SUITES.values():
            fn(report)
        return report
    if name not in _SUITES:
        raise KeyError(f"unknown suite {name!r}")
    _SUITES[name](report, **kwargs)
    return report
