"""Runnable verification suites behind the ``verify`` CLI subcommand.

Each check re-derives its expected values from an independent route
(exact combinatorics, closed forms, spectral Cauchy coefficients,
brute-force quadrature) and compares at a fixed tolerance.  Suites:
kernel, combinatorics, oracle, lve, all.  ``quick`` shrinks grids and
sample counts to keep the full run under a minute.
"""

from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exact, jets, kernel, lve, oracle
from .errors import LoopVertexError
from .quadrature import adaptive_quadrature

__all__ = ["CheckResult", "run_suite", "SUITES"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    elapsed: float


def _sector_grid(p: int, epsilon: float, r_max: float, n_radii: int = 10,
                 include_negative_axis: bool = True) -> list:
    radii = np.geomspace(1e-3 * kernel.radius(p), r_max, n_radii)
    angles = [epsilon * 1.2, 0.5 * math.pi, 2.5, -0.7, -0.5 * math.pi, -2.8]
    if include_negative_axis:
        angles.append(math.pi)
    return [complex(r * cmath.exp(1j * a)) for r in radii for a in angles]


def _offcut_grid(p: int, n_points: int, rng: np.random.Generator) -> list:
    rp = kernel.radius(p)
    pts = []
    while len(pts) < n_points:
        rho = float(rng.uniform(1e-3, 10.0)) * rp
        theta = float(rng.uniform(-math.pi, math.pi))
        if abs(theta) < 0.05:  # keep clear of the cut direction
            continue
        pts.append(complex(rho * cmath.exp(1j * theta)))
    return pts


# ---------------------------------------------------------------------------
# kernel suite
# ---------------------------------------------------------------------------

def _check_residuals(quick: bool):
    orders = (2, 3) if quick else (2, 3, 4, 5, 6)
    n_pts = 40 if quick else 200
    worst = 0.0
    rng = np.random.default_rng(1)
    for p in orders:
        for z in _offcut_grid(p, n_pts, rng):
            worst = max(worst, kernel.t_solve(p, z).residual)
    return worst < 1e-12, f"worst residual {worst:.3e} (tol 1e-12)"


def _check_reflection(quick: bool):
    worst = 0.0
    rng = np.random.default_rng(2)
    for p in (2, 3, 5):
        for z in _offcut_grid(p, 10 if quick else 30, rng):
            if z.imag == 0:
                continue
            a = kernel.t_solve(p, z)
            b = kernel.t_solve(p, z.conjugate())
            worst = max(worst,
                        abs(b.t - a.t.conjugate()), abs(b.f - a.f.conjugate()),
                        abs(b.s - a.s.conjugate()), abs(b.e - a.e.conjugate()))
    return worst < 1e-12, f"worst reflection defect {worst:.3e}"


def _check_series_agreement(quick: bool):
    worst = 0.0
    rng = np.random.default_rng(3)
    for p in (2, 3, 4, 6):
        rp = kernel.radius(p)
        for _ in range(10 if quick else 25):
            rho = float(rng.uniform(0.0, 0.5)) * rp
            theta = float(rng.uniform(-math.pi, math.pi))
            z = complex(rho * cmath.exp(1j * theta))
            worst = max(worst, abs(kernel.t_solve(p, z).t
                                   - kernel.t_series(p, z, 200)))
    return worst < 1e-10, f"worst |solve - series| {worst:.3e} (tol 1e-10)"


def _check_closed_forms(quick: bool):
    worst = 0.0
    rng = np.random.default_rng(4)
    n_pts = 30 if quick else 100
    for p in (2, 3, 4):
        for z in _offcut_grid(p, n_pts, rng):
            worst = max(worst, abs(kernel.t_solve(p, z).t
                                   - kernel.t_closed_form(p, z)))
    return worst < 1e-10, f"worst |solve - closed form| {worst:.3e} (tol 1e-10)"


def _check_f_consistency(quick: bool):
    # F = (p-1) z T' + T with T' = E T
    worst = 0.0
    rng = np.random.default_rng(5)
    for p in (2, 3, 5):
        for z in _offcut_grid(p, 10 if quick else 30, rng):
            ev = kernel.t_solve(p, z)
            lhs = (p - 1) * z * (ev.e * ev.t) + ev.t
            worst = max(worst, abs(lhs - ev.f) / max(1.0, abs(ev.f)))
    return worst < 1e-10, f"worst |(p-1)zT'+T - F|/|F| {worst:.3e}"


def _check_decay(quick: bool):
    worst_ratio = 0.0
    for p in (2, 3, 4):
        for theta in (0.35, 0.5 * math.pi, math.pi, -0.5 * math.pi):
            ray = kernel.RayEvaluator(p, cmath.exp(1j * theta))
            radii = np.geomspace(1e-2, 1e6, 20 if quick else 60)
            _, f, _, e = ray.kernel_arrays(radii)
            qf = np.abs(f) * (1.0 + radii) ** (1.0 / p)
            qe = np.abs(e) * (1.0 + radii)
            # bounded: the tail must not exceed the head of the ray
            head_f, head_e = qf[radii <= 1e3].max(), qe[radii <= 1e3].max()
            worst_ratio = max(worst_ratio, qf[-1] / head_f, qe[-1] / head_e)
    return worst_ratio < 1.05, \
        f"tail/head decay ratio {worst_ratio:.3f} (must stay ~<= 1)"


def _check_quotient_identity(quick: bool):
    # (D+ - D-)/(D+ + D-) = h [sqrt(u) - (D+ - D-)] on a u-grid
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(20 if quick else 60):
        u = complex(rng.uniform(0.05, 10.0) * cmath.exp(1j * rng.uniform(-2.8, 2.8)))
        dp, dm, h = kernel._p3_parts(u)
        lhs = (dp - dm) / (dp + dm)
        rhs = h * (cmath.sqrt(u) - (dp - dm))
        worst = max(worst, abs(lhs - rhs))
    return worst < 1e-10, f"worst quotient-identity defect {worst:.3e}"


def _check_bound_constant(quick: bool):
    eps = 0.3
    orders = (2, 3) if quick else (2, 3, 5)
    details = []
    ok = True
    for p in orders:
        spec = kernel.ModelSpec(p, 0.0, eps)
        grid = _sector_grid(p, eps, 1e4, n_radii=6 if quick else 10)
        k_fit = kernel.bound_constant(spec, grid, 8)
        ok &= math.isfinite(k_fit)
        details.append(f"K_{p}={k_fit:.3f}")
    # p=2 on the negative axis: analytic K = 4
    spec2 = kernel.ModelSpec(2, 0.0, eps)
    neg = [complex(-x) for x in np.geomspace(1e-6, 1e4, 30)]
    k_neg = kernel.bound_constant(spec2, neg, 8)
    ok &= k_neg <= 4.01
    details.append(f"K_2(neg axis)={k_neg:.4f} (<= 4.01)")
    return ok, "; ".join(details)


def _check_derivative_structure(quick: bool):
    # |S^(q)| (1+|z|)^q / (q-1)! stays bounded along sector rays, q <= 8
    worst_ratio = 0.0
    for p in (2, 3):
        for theta in (0.4, math.pi):
            radii = np.geomspace(1e-2, 1e4, 8 if quick else 16)
            vals = []
            for rho in radii:
                z = complex(rho * cmath.exp(1j * theta))
                derivs = jets.s_derivatives(p, z, 8)
                vals.append(max(abs(derivs[q - 1]) * (1 + rho) ** q
                                / math.factorial(q - 1) for q in range(1, 9)))
            vals = np.array(vals)
            worst_ratio = max(worst_ratio, float(vals[-1] / vals.max()))
    return worst_ratio < 1.05, \
        f"structure-bound tail/head ratio {worst_ratio:.3f}"


def _check_s_derivs_fd(quick: bool):
    # central finite differences of s_eval, q <= 5
    worst = 0.0
    pts = [(2, -0.8 + 0.3j), (3, 0.02 + 0.05j)] if quick else \
        [(2, -0.8 + 0.3j), (2, -2.0 + 0j), (3, 0.02 + 0.05j), (5, -0.5 + 0.2j)]
    for p, z in pts:
        derivs = jets.s_derivatives(p, z, 5)
        h = 0.02 * kernel.radius(p)
        stencil = np.arange(-4, 5)
        svals = np.array([kernel.s_eval(p, z + k * h) for k in stencil])
        for q in range(1, 6):
            fd = _fd_derivative(svals, stencil, h, q)
            worst = max(worst, abs(fd - derivs[q - 1]) / abs(derivs[q - 1]))
    return worst < 1e-6, f"worst FD mismatch {worst:.3e} (tol 1e-6)"


def _fd_derivative(values: np.ndarray, stencil: np.ndarray, h: float,
                   q: int) -> complex:
    """q-th derivative from function values on a uniform stencil."""
    m = len(stencil)
    vander = np.vander(stencil.astype(float), m, increasing=True).T
    rhs = np.zeros(m)
    rhs[q] = math.factorial(q)
    wts = np.linalg.solve(vander, rhs)
    return complex(np.sum(wts * values)) / h ** q


def cauchy_mixed_partials(p: int, lam: complex, phi: complex, phibar: complex,
                          a_max: int, b_max: int, rad: float = 0.3,
                          n_fft: int = 32) -> np.ndarray:
    """Mixed partials of S(-lam (phi phibar)^{p-1}) via Cauchy coefficients.

    Spectral-accuracy oracle independent of the jet machinery: sample
    s_eval on a torus around (phi, phibar) and FFT.  The torus radius must
    keep the argument off the cut; callers pick tame (lam, phi) values.
    """
    theta = 2.0 * math.pi * np.arange(n_fft) / n_fft
    u = rad * np.exp(1j * theta)
    samples = np.empty((n_fft, n_fft), dtype=complex)
    for j in range(n_fft):
        for k in range(n_fft):
            z = -lam * ((phi + u[j]) * (phibar + u[k])) ** (p - 1)
            samples[j, k] = kernel.s_eval(p, z)
    coeff = np.fft.fft2(samples) / n_fft ** 2
    out = np.empty((a_max + 1, b_max + 1), dtype=complex)
    for a in range(a_max + 1):
        for b in range(b_max + 1):
            out[a, b] = coeff[a, b] / rad ** (a + b) \
                * math.factorial(a) * math.factorial(b)
    return out


def _check_corner_derivative(quick: bool):
    cases = [(2, 0.1, 0.7 + 0.1j, 0.6 - 0.2j), (3, 0.05, 0.8, 0.5 + 0.3j)]
    worst = 0.0
    for p, lam, phi, phibar in cases:
        spec = kernel.ModelSpec(p, lam)
        ref = cauchy_mixed_partials(p, lam, phi, phibar, 2, 2)
        for a in range(3):
            for b in range(3):
                if a + b > 4 or (a, b) == (0, 0):
                    continue
                got = jets.corner_derivative(spec, phi, phibar, a, b)
                scale = max(1e-12, abs(ref[a, b]))
                worst = max(worst, abs(got - ref[a, b]) / scale)
    return worst < 1e-5, f"worst corner-derivative mismatch {worst:.3e}"


def _check_s_integral_identity(quick: bool):
    # S(z) = int_0^1 z S'(t z) dt
    rng = np.random.default_rng(7)
    worst = 0.0
    for p in (2, 3):
        for z in _offcut_grid(p, 10 if quick else 25, rng):
            direction = z / abs(z)
            ray = kernel.RayEvaluator(p, direction)

            def integrand(ts: np.ndarray) -> np.ndarray:
                rho = np.abs(z) * ts
                _, _, _, e = ray.kernel_arrays(rho)
                zs = rho * direction
                return z * p * e * (1.0 + (p - 1) * zs * e)

            val, _, _ = adaptive_quadrature(integrand, 0.0, 1.0, 1e-12)
            worst = max(worst, abs(val - kernel.s_eval(p, z)))
    return worst < 1e-10, f"worst |S - int z S'(tz) dt| {worst:.3e}"


# ---------------------------------------------------------------------------
# combinatorics suite
# ---------------------------------------------------------------------------

def _check_fuss_catalan_values(quick: bool):
    got2 = [exact.fuss_catalan_number(2, n) for n in range(7)]
    got3 = [exact.fuss_catalan_number(3, n) for n in range(5)]
    ok = got2 == [1, 1, 2, 5, 14, 42, 132] and got3 == [1, 1, 3, 12, 55]
    return ok, f"C^(2)={got2}, C^(3)={got3}"


def _check_divisibility(quick: bool):
    p_max, n_max = (5, 20) if quick else (8, 40)
    for p in range(2, p_max + 1):
        for n in range(n_max + 1):
            b = exact.binom_pn_n(p, n)
            c = exact.fuss_catalan_number(p, n)
            if ((p - 1) * n + 1) * c != b:
                return False, f"divisibility fails at p={p}, n={n}"
            alt = Fraction(math.comb(p * n + 1, n), p * n + 1)
            if alt != c:
                return False, f"the two defining formulas differ at p={p}, n={n}"
    return True, f"exact for p <= {p_max}, n <= {n_max}"


def _check_series_coefficients(quick: bool):
    # jets of T and F at 0 against exact integer coefficients
    order = 8 if quick else 12
    worst = 0.0
    for p in (2, 3, 4):
        e_coeffs = jets.e_jet_coeffs(p, 0.0 + 0j, 1.0 + 0j, order)
        t_coeffs = [1.0 + 0j]
        f_coeffs = [1.0 + 0j]
        for k in range(order):
            t_coeffs.append(sum(e_coeffs[i] * t_coeffs[k - i]
                                for i in range(k + 1)) / (k + 1))
        s1 = jets.s_derivative_values(p, 0.0 + 0j, e_coeffs, order)
        g = [s1[q - 1] / math.factorial(q - 1) for q in range(1, order + 1)]
        for k in range(order):
            f_coeffs.append(sum(f_coeffs[i] * g[k - i]
                                for i in range(k + 1)) / (k + 1))
        for n in range(order + 1):
            worst = max(worst,
                        abs(t_coeffs[n] - exact.fuss_catalan_number(p, n))
                        / exact.fuss_catalan_number(p, n),
                        abs(f_coeffs[n] - exact.binom_pn_n(p, n))
                        / exact.binom_pn_n(p, n))
    return worst < 1e-12, f"worst T/F coefficient mismatch {worst:.3e}"


def _check_two_point_slope_coefficients(quick: bool):
    slopes = {}
    for p in (2, 3):
        c11 = exact.z_series_coefficient(p, 1, 1)
        c01 = exact.z_series_coefficient(p, 0, 1)
        c10 = exact.z_series_coefficient(p, 1, 0)
        c00 = exact.z_series_coefficient(p, 0, 0)
        slopes[p] = c11 / c01 - c10 / c00
    ok = slopes[2] == Fraction(-4) and slopes[3] == Fraction(-18)
    return ok, f"first-order two-point slopes {dict(slopes)}"


def _check_cayley(quick: bool):
    got = [exact.cayley_count(n) for n in range(1, 7)]
    return got == [1, 1, 3, 16, 125, 1296], f"counts {got}"


def _check_majorant(quick: bool):
    terms_small = [exact.majorant_term(2, 1e-4, 2.0, n) for n in range(2, 9)]
    ratios_small = [b / a for a, b in zip(terms_small, terms_small[1:])]
    terms_large = [exact.majorant_term(2, 25.0, 2.0, n) for n in range(2, 9)]
    ratios_large = [b / a for a, b in zip(terms_large, terms_large[1:])]
    ok = max(ratios_small) < 1.0 and min(ratios_large) > 1.0
    return ok, (f"term ratios: small-lambda max {max(ratios_small):.3f} < 1, "
                f"large-lambda min {min(ratios_large):.3f} > 1")


def _check_partial_sums(quick: bool):
    spec = kernel.ModelSpec(2, 0.01)
    val = exact.perturbative_partial_sum(spec, 3, 0)
    expect = 1 - 0.02 + 12e-4 - 120e-6
    if abs(val - expect) > 1e-15:
        return False, f"partial sum {val} != {expect}"
    sums = [abs(exact.perturbative_partial_sum(spec, n, 0)) for n in range(60)]
    return sums[-1] > 1e6, \
        "partial sums blow up at large order (divergent series), " \
        f"|sum_59| = {sums[-1]:.2e}"


# ---------------------------------------------------------------------------
# oracle suite
# ---------------------------------------------------------------------------

def _check_moments(quick: bool):
    worst = 0.0
    for k in range(0, 21, 2 if quick else 1):
        fact = math.factorial(k)
        res = oracle.radial_integral(
            lambda t, k=k: t ** k * np.exp(-t), 0.0, 1e-12 * fact)
        worst = max(worst, abs(res.value - fact) / fact)
    return worst < 1e-10, f"worst moment defect {worst:.3e} (k <= 20)"


def _lvr_grid(quick: bool) -> list:
    lams = [0.05, 0.5] if quick else [0.01, 0.05, 0.1, 0.5, 1.0]
    grid = [(p, complex(lam)) for p in (2, 3, 4) for lam in lams]
    grid.append((2, 0.1 * cmath.exp(1j * math.pi / 3)))
    grid.append((3, 0.1 * cmath.exp(-1j * math.pi / 3)))
    return grid


def _check_lvr_identity(quick: bool):
    worst = 0.0
    for p, lam in _lvr_grid(quick):
        spec = kernel.ModelSpec(p, lam)
        worst = max(worst, abs(oracle.z_lvr(spec, 1e-10).value
                               - oracle.z_oracle(spec, 1e-10).value))
    return worst < 1e-8, f"worst |Z_resummed - Z_direct| {worst:.3e} (tol 1e-8)"


def _check_cumulant_identity(quick: bool):
    worst = 0.0
    for p, lam in _lvr_grid(quick):
        spec = kernel.ModelSpec(p, lam)
        worst = max(worst, abs(oracle.g2_lvr(spec, 1e-10).value
                               - oracle.g2_oracle(spec, 1e-10).value))
    return worst < 1e-8, f"worst |G_resummed - G_direct| {worst:.3e} (tol 1e-8)"


def _check_slopes(quick: bool):
    details = []
    ok = True
    for p, expect in ((2, -4.0), (3, -18.0)):
        slopes = []
        for lam in (0.01, 0.005):
            g = oracle.g2_oracle(kernel.ModelSpec(p, lam), 1e-12).value
            slopes.append((g.real - 1.0) / lam)
        richardson = 2.0 * slopes[1] - slopes[0]
        ok &= abs(richardson - expect) / abs(expect) < 0.01
        details.append(f"p={p}: slope {richardson:.4f} (expect {expect})")
    return ok, "; ".join(details)


def _check_asymptoticity(quick: bool):
    # |Z - partial_sum(3)| / lam^4 <= 2 |c4|, c4 = (2*4)!/4! = 1680 at p=2
    c4 = float(abs(exact.z_series_coefficient(2, 4, 0)))
    worst = 0.0
    for lam in (1e-3, 3e-3, 1e-2):
        spec = kernel.ModelSpec(2, lam)
        z = oracle.z_oracle(spec, 1e-13).value
        partial = exact.perturbative_partial_sum(spec, 3, 0)
        worst = max(worst, abs(z - partial) / lam ** 4 / c4)
    return worst <= 2.0, f"max |Z - sum_3|/(lam^4 c4) = {worst:.3f} (<= 2)"


def _check_gallavotti(quick: bool):
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(20 if quick else 100):
        g = complex(rng.normal(0, 0.3), rng.normal(0, 0.3))
        phi = complex(rng.normal(0, 1), rng.normal(0, 1))
        phibar = complex(rng.normal(0, 1), rng.normal(0, 1))
        p = int(rng.integers(2, 5))
        z = g ** p * (phi * phibar) ** (p - 1)
        if kernel.classify(p, z).region == "on-cut":
            continue
        lhs = oracle.gallavotti_free_energy(p, g ** p * phibar ** (p - 1), phi)
        rhs = kernel.s_eval(p, z)
        worst = max(worst, abs(lhs - rhs))
    return worst < 1e-10, f"worst substitution defect {worst:.3e}"


# ---------------------------------------------------------------------------
# lve suite
# ---------------------------------------------------------------------------

def _check_tree_counts(quick: bool):
    counts = [len(lve.enumerate_trees(n)) for n in range(1, 7)]
    if counts != [exact.cayley_count(n) for n in range(1, 7)]:
        return False, f"tree counts {counts}"
    oriented_ok = True
    for n in range(2, 5):
        seen = set()
        for tree in lve.enumerate_trees(n):
            for o in range(2 ** (n - 1)):
                ot = lve.orient_tree(tree, o)
                if (sum(ot.in_degree) != n - 1
                        or sum(ot.out_degree) != n - 1):
                    return False, f"degree bookkeeping broken at n={n}"
                seen.add(ot.edges)
        oriented_ok &= len(seen) == exact.cayley_count(n) * 2 ** (n - 1)
    return oriented_ok, \
        f"counts {counts}, oriented counts equal Cayley * 2^(n-1)"


def _check_covariance_psd(quick: bool):
    rng = np.random.default_rng(9)
    n_draws = 100 if quick else 1000
    worst = 0.0
    for n in range(2, 7):
        trees = lve.enumerate_trees(n)
        for _ in range(n_draws):
            tree = trees[int(rng.integers(len(trees)))]
            w = rng.uniform(size=n - 1)
            worst = min(worst, lve.covariance(tree, w).min_eigenvalue())
    return worst >= -1e-10, f"min covariance eigenvalue {worst:.3e}"


def _check_sampling_moments(quick: bool):
    rng = np.random.default_rng(10)
    n_samp = 30_000 if quick else 100_000
    tree = lve.enumerate_trees(2)[0]
    cov = lve.covariance(tree, np.array([0.5]))
    phi = lve.sample_replicas(cov, rng, n_samp)
    m11 = np.mean(phi[0] * np.conj(phi[0])).real
    m12 = np.mean(phi[0] * np.conj(phi[1]))
    mpp = np.mean(phi[0] * phi[1])
    sig = 3.0 / math.sqrt(n_samp)
    ok = (abs(m11 - 1.0) < 2 * sig and abs(m12 - 0.5) < 2 * sig
          and abs(mpp) < 2 * sig)
    return ok, (f"E|phi|^2={m11:.4f} (1), E phi1 conj phi2={m12:.4f} (0.5), "
                f"E phi1 phi2={abs(mpp):.4f} (0)")


def _brute_force_n2_term(spec: kernel.ModelSpec, m_gh: int = 24,
                         m_w: int = 16) -> complex:
    """Deterministic (Gauss-Hermite x Gauss-Legendre) evaluation of the
    n = 2 tree integral, orientation pair summed, without the 1/2! factor."""
    x, wx = np.polynomial.hermite.hermgauss(m_gh)
    xw, ww = np.polynomial.legendre.leggauss(m_w)
    w_nodes = 0.5 * (xw + 1.0)
    w_wts = 0.5 * ww
    g1 = (x[:, None] + 1j * x[None, :]).ravel()
    wg = (wx[:, None] * wx[None, :]).ravel() / math.pi
    zeta1 = g1[:, None]
    zeta2 = g1[None, :]
    weight = (wg[:, None] * wg[None, :]).ravel()
    vd = lve._VertexDerivatives(spec)
    total = 0.0 + 0j
    for wval, wwt in zip(w_nodes, w_wts):
        l21 = wval
        l22 = math.sqrt(1.0 - wval * wval)
        phi1 = np.broadcast_to(zeta1, (g1.size, g1.size)).ravel()
        phi2 = (l21 * zeta1 + l22 * zeta2).ravel()
        tables = vd.tables(np.vstack([phi1, phi2]), [1, 1])
        both = tables[0][1] * tables[1][0] + tables[0][0] * tables[1][1]
        total += wwt * np.sum(weight * both)
    return total


def _check_n2_brute_force(quick: bool):
    spec = kernel.ModelSpec(2, 0.05)
    cfg = lve.LveConfig(mc_samples=20_000 if quick else 100_000,
                        master_seed=11, n_max=2)
    tree = lve.enumerate_trees(2)[0]
    est = lve.tree_term(spec, tree, cfg, 0)
    ref = _brute_force_n2_term(spec)
    diff = abs(est.value - ref)
    tol = max(3.0 * est.std_error, 1e-9)
    return diff < tol, (f"MC {est.value:.6e} vs quadrature {ref:.6e}, "
                        f"|diff| {diff:.2e} < {tol:.2e}")


def _check_lve_determinism(quick: bool):
    spec = kernel.ModelSpec(2, 0.05)
    cfg = lve.LveConfig(mc_samples=5000, master_seed=12, n_max=3)
    a_orders, a_cum = lve.log_z_partial(spec, cfg)
    b_orders, b_cum = lve.log_z_partial(spec, cfg)
    same = (a_cum.value == b_cum.value and a_cum.std_error == b_cum.std_error
            and all(x.value == y.value for x, y in zip(a_orders, b_orders)))
    return same, "two runs with the same seed are bit-identical"


def _check_lve_perturbative(quick: bool):
    # d(log Z)/d lambda near 0 matches the formal log of the exact
    # divergent series (-2 lam + 10 lam^2 - 296/3 lam^3 + ... for p = 2)
    samples = 20_000 if quick else 100_000
    a, b = 0.01, 0.02
    vals = {}
    for lam in (a, b):
        spec = kernel.ModelSpec(2, lam)
        cfg = lve.LveConfig(mc_samples=samples, master_seed=13, n_max=3)
        _, cum = lve.log_z_partial(spec, cfg)
        vals[lam] = cum
    slope = (vals[b].value - vals[a].value) / (b - a)
    err = math.sqrt(vals[b].std_error ** 2 + vals[a].std_error ** 2) / (b - a)
    coeffs = exact.log_partition_series_coefficients(2, 8)

    def power_slope(n: int) -> float:  # (b^n - a^n) / (b - a)
        return sum(a ** i * b ** (n - 1 - i) for i in range(n))

    expect = sum(float(coeffs[n - 1]) * power_slope(n) for n in range(1, 7))
    series_trunc = sum(abs(float(coeffs[n - 1])) * power_slope(n)
                       for n in (7, 8))
    tol = 3.0 * err + series_trunc + 1e-3  # 1e-3 covers the n > 3 tree orders
    return abs(slope.real - expect) < tol, \
        f"slope {slope.real:.4f} vs series {expect:.4f} (tol {tol:.1e})"


def _check_lve_majorant_domination(quick: bool):
    spec = kernel.ModelSpec(2, 0.05)
    cfg = lve.LveConfig(mc_samples=8000 if quick else 40_000,
                        master_seed=14, n_max=4)
    per_order, _ = lve.log_z_partial(spec, cfg)
    mags = [abs(est.value) for est in per_order]
    k_fit = exact.fit_majorant_constant(2, 0.05, mags)
    dominated = all(
        mag <= exact.majorant_term(2, 0.05, k_fit, n) * (1 + 1e-12)
        for n, mag in enumerate(mags, start=1))
    return math.isfinite(k_fit) and dominated, \
        f"fitted K = {k_fit:.3f}, per-order domination holds"


def _check_ibp(quick: bool):
    details = []
    ok = True
    for p, lam in ((2, 0.1), (3, 0.05)):
        spec = kernel.ModelSpec(p, lam)
        cfg = lve.LveConfig(mc_samples=1000, master_seed=0, n_max=1)
        direct = lve.tree_term(spec, lve.enumerate_trees(1)[0], cfg).value
        alt = lve.order_one_ibp_check(spec, 1e-10)
        diff = abs(direct - alt)
        ok &= diff < 1e-8
        details.append(f"p={p}: |direct - interpolated| = {diff:.2e}")
    return ok, "; ".join(details)


def _check_lve_zero_coupling(quick: bool):
    spec = kernel.ModelSpec(2, 0.0)
    cfg = lve.LveConfig(mc_samples=500, master_seed=0, n_max=3)
    per_order, cum = lve.log_z_partial(spec, cfg)
    ok = cum.value == 0 and all(est.value == 0 for est in per_order)
    return ok, "all orders vanish identically at lambda = 0"


_KERNEL_CHECKS = [
    ("kernel.residual", _check_residuals),
    ("kernel.schwarz_reflection", _check_reflection),
    ("kernel.series_agreement", _check_series_agreement),
    ("kernel.closed_forms", _check_closed_forms),
    ("kernel.f_consistency", _check_f_consistency),
    ("kernel.decay", _check_decay),
    ("kernel.p3_quotient_identity", _check_quotient_identity),
    ("kernel.bound_constant", _check_bound_constant),
    ("kernel.derivative_structure", _check_derivative_structure),
    ("kernel.s_derivatives_vs_fd", _check_s_derivs_fd),
    ("kernel.corner_derivative", _check_corner_derivative),
    ("kernel.s_integral_identity", _check_s_integral_identity),
]

_COMBINATORICS_CHECKS = [
    ("combinatorics.fuss_catalan_values", _check_fuss_catalan_values),
    ("combinatorics.divisibility", _check_divisibility),
    ("combinatorics.series_coefficients", _check_series_coefficients),
    ("combinatorics.two_point_slopes", _check_two_point_slope_coefficients),
    ("combinatorics.cayley", _check_cayley),
    ("combinatorics.majorant", _check_majorant),
    ("combinatorics.partial_sums", _check_partial_sums),
]

_ORACLE_CHECKS = [
    ("oracle.moment_identity", _check_moments),
    ("oracle.lvr_identity", _check_lvr_identity),
    ("oracle.cumulant_identity", _check_cumulant_identity),
    ("oracle.cumulant_slopes", _check_slopes),
    ("oracle.asymptoticity", _check_asymptoticity),
    ("oracle.gallavotti_substitution", _check_gallavotti),
]

_LVE_CHECKS = [
    ("lve.tree_counts", _check_tree_counts),
    ("lve.covariance_psd", _check_covariance_psd),
    ("lve.sampling_moments", _check_sampling_moments),
    ("lve.n2_brute_force", _check_n2_brute_force),
    ("lve.determinism", _check_lve_determinism),
    ("lve.perturbative_consistency", _check_lve_perturbative),
    ("lve.majorant_domination", _check_lve_majorant_domination),
    ("lve.order_one_ibp", _check_ibp),
    ("lve.zero_coupling", _check_lve_zero_coupling),
]

SUITES = {
    "kernel": _KERNEL_CHECKS,
    "combinatorics": _COMBINATORICS_CHECKS,
    "oracle": _ORACLE_CHECKS,
    "lve": _LVE_CHECKS,
}
SUITES["all"] = (_KERNEL_CHECKS + _COMBINATORICS_CHECKS
                 + _ORACLE_CHECKS + _LVE_CHECKS)


def run_suite(name: str, quick: bool = False) -> list:
    """Run one suite; returns a list of CheckResult."""
    if name not in SUITES:
        raise LoopVertexError(
            f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    results = []
    for check_name, fn in SUITES[name]:
        start = time.perf_counter()
        try:
            passed, detail = fn(quick)
        except LoopVertexError as exc:  # a failing subsystem, not a crash
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append(CheckResult(check_name, bool(passed), detail,
                                   time.perf_counter() - start))
    return results
