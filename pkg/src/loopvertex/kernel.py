"""Evaluation of the order-p tree function and the quantities built on it.

T_p is the analytic branch with T_p(0) = 1 of the algebraic equation

    z T^p - T + 1 = 0,

the generating function of the Fuss-Catalan numbers.  From it:

    F_p = 1 / (1 - p z T^{p-1})     (= sum binom(pn, n) z^n),
    S_p = log F_p                   (principal branch, S_p(0) = 0),
    E   = F_p T^{p-1}               (= T_p' / T_p).

All four are analytic on the cut plane C - [R_p, +inf) with
R_p = (p-1)^{p-1} / p^p, and F, E decay at infinity inside any sector
that excludes the positive real axis.  Branch selection everywhere is by
continuity from the series at the origin.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import exact
from .errors import (ContractError, DomainError, NumericalError,
                     SlowConvergenceWarning)

__all__ = [
    "ModelSpec", "CutPlanePoint", "KernelEval", "RayEvaluator",
    "radius", "classify", "t_series", "t_solve", "t_closed_form",
    "f_eval", "s_eval", "e_eval", "bound_constant",
]

#: points closer than this to the branch point get a degraded-accuracy flag
BRANCH_POINT_WINDOW = 1e-6
#: residual accepted for every solved T value
RESIDUAL_TOL = 1e-12
#: half-width of the machine test for "on the cut"
CUT_PAD = 1e-12

_NEWTON_TOL = 1e-14
_NEWTON_MAXIT = 50


def radius(p: int) -> float:
    """Convergence radius R_p = (p-1)^{p-1} / p^p of the T_p series."""
    _check_order(p)
    return (p - 1) ** (p - 1) / p ** p


def _check_order(p: int) -> None:
    if not isinstance(p, int) or isinstance(p, bool) or p < 2:
        raise ContractError(f"interaction order must be an integer >= 2, got {p!r}")


@dataclass(frozen=True)
class ModelSpec:
    """The model: interaction order p, coupling lambda, sector half-angle.

    lambda must lie in the pacman domain |arg lambda| < pi - epsilon
    (checked whenever lambda != 0); the negative real coupling axis is
    excluded.  epsilon is also the sector half-angle used when fitting
    derivative bounds.
    """

    p: int
    lam: complex
    epsilon: float = 0.3

    def __post_init__(self):
        _check_order(self.p)
        object.__setattr__(self, "lam", complex(self.lam))
        if not 0.0 < self.epsilon < math.pi:
            raise ContractError("epsilon must lie in (0, pi)")
        if self.lam != 0 and abs(cmath.phase(self.lam)) >= math.pi - self.epsilon:
            raise DomainError(
                f"lambda={self.lam} outside the pacman domain "
                f"|arg lambda| < pi - {self.epsilon}")


@dataclass(frozen=True)
class CutPlanePoint:
    """A point of the z-plane together with its domain classification."""

    z: complex
    region: str  # "inside-disk" | "cut-plane" | "on-cut"


def classify(p: int, z: complex) -> CutPlanePoint:
    """Classify z against the cut [R_p, +inf).

    A point is on the cut only for an exactly zero imaginary part with
    Re z >= R_p - 1e-12; that is the one unambiguous machine test.
    """
    z = complex(z)
    rp = radius(p)
    if z.imag == 0.0 and z.real >= rp - CUT_PAD:
        region = "on-cut"
    elif abs(z) < rp:
        region = "inside-disk"
    else:
        region = "cut-plane"
    return CutPlanePoint(z, region)


def _require_off_cut(p: int, z: complex) -> complex:
    pt = classify(p, z)
    if pt.region == "on-cut":
        raise DomainError(f"z={z} lies on the cut [R_{p}, +inf)")
    return pt.z


@dataclass(frozen=True)
class KernelEval:
    """T, F, S, E at one point plus the defining-equation residual."""

    t: complex
    f: complex
    s: complex
    e: complex
    residual: float
    degraded: bool = False


def t_series(p: int, z: complex, n_terms: int = 200) -> complex:
    """Partial sum of the Fuss-Catalan series sum C_n^{(p)} z^n.

    Only meaningful for |z| < R_p (the series diverges outside the disk);
    emits SlowConvergenceWarning within 10% of the radius.
    """
    _check_order(p)
    if n_terms < 1:
        raise ContractError("n_terms must be >= 1")
    z = complex(z)
    if abs(z) >= 0.9 * radius(p):
        warnings.warn(
            f"|z|={abs(z):.3g} is within 10% of the convergence radius "
            f"R_{p}={radius(p):.3g}; the partial sum converges slowly",
            SlowConvergenceWarning, stacklevel=2)
    acc = 0j
    for n in reversed(range(n_terms)):
        acc = acc * z + exact.fuss_catalan_number(p, n)
    return acc


def _newton_scalar(p: int, z: complex, t0: complex):
    """Newton for z t^p - t + 1 = 0 from t0; returns (t, converged)."""
    t = t0
    for _ in range(_NEWTON_MAXIT):
        fval = z * t ** p - t + 1.0
        fprime = p * z * t ** (p - 1) - 1.0
        if fprime == 0:
            return t, False
        step = fval / fprime
        t -= step
        if abs(step) <= _NEWTON_TOL * max(1.0, abs(t)):
            return t, True
    return t, abs(z * t ** p - t + 1.0) < RESIDUAL_TOL


class RayEvaluator:
    """Branch-continued evaluation of T_p along a fixed ray from the origin.

    The branch is seeded by the series near the origin and continued
    outward along the straight segment (the ray itself), with adaptive
    step halving on Newton failure.  Anchors are cached so that repeated
    or vectorized queries along the same ray cost a few Newton polish
    steps each.  Instances are cheap; one per (p, direction).
    """

    _GROWTH = 1.25

    def __init__(self, p: int, direction: complex):
        _check_order(p)
        direction = complex(direction)
        if direction == 0:
            raise ContractError("direction must be nonzero")
        self.p = p
        self.direction = direction / abs(direction)
        self._on_axis = self.direction.imag == 0.0 and self.direction.real > 0.0
        rp = radius(p)
        rho0 = 1e-8 * rp
        t0 = complex(t_series(p, rho0 * self.direction, n_terms=8))
        self._rho = [rho0]
        self._t = [t0]

    def _extend(self, target: float) -> None:
        p, d = self.p, self.direction
        rp = radius(p)
        if self._on_axis and target >= rp - CUT_PAD:
            raise DomainError("ray along the positive real axis meets the cut")
        rho, t = self._rho[-1], self._t[-1]
        while rho < target:
            step = min(rho * (self._GROWTH - 1.0), target - rho)
            while True:
                cand = rho + step
                tn, ok = _newton_scalar(p, cand * d, t)
                if ok and abs(tn - t) < 0.5 * max(abs(t), 1e-3):
                    break
                step *= 0.5
                if step < 1e-15 * max(rho, target):
                    raise NumericalError(
                        f"branch continuation stalled at |z|={rho:g} along "
                        f"direction {d} (p={p}); point too close to the "
                        f"branch point R_{p}={rp:g}")
            rho, t = cand, tn
            self._rho.append(rho)
            self._t.append(t)

    def t_at(self, rho: float) -> complex:
        """T_p at z = rho * direction (scalar)."""
        if rho == 0.0:
            return 1.0 + 0j
        self._extend(rho)
        idx = int(np.searchsorted(self._rho, rho))
        idx = min(max(idx, 0), len(self._rho) - 1)
        t, ok = _newton_scalar(self.p, rho * self.direction, self._t[idx])
        z = rho * self.direction
        res = abs(z * t ** self.p - t + 1.0)
        if not ok or res > RESIDUAL_TOL:
            raise NumericalError(
                f"Newton polish failed at z={z} (residual {res:g})")
        return t

    def t_array(self, rho) -> np.ndarray:
        """Vectorized T_p at z = rho * direction for rho >= 0."""
        rho = np.asarray(rho, dtype=float)
        out = np.ones(rho.shape, dtype=complex)
        live = rho > 0.0
        if not live.any():
            return out
        self._extend(float(rho[live].max()))
        anchors_rho = np.asarray(self._rho)
        anchors_t = np.asarray(self._t)
        idx = np.clip(np.searchsorted(anchors_rho, rho[live]), 0,
                      len(anchors_rho) - 1)
        t = anchors_t[idx]
        z = rho[live] * self.direction
        p = self.p
        for _ in range(12):
            fval = z * t ** p - t + 1.0
            fprime = p * z * t ** (p - 1) - 1.0
            step = fval / fprime
            t = t - step
            if np.max(np.abs(step)) <= _NEWTON_TOL * max(1.0, np.max(np.abs(t))):
                break
        res = np.abs(z * t ** p - t + 1.0)
        worst = float(res.max())
        if worst > RESIDUAL_TOL:
            raise NumericalError(
                f"vectorized branch solve: worst residual {worst:g} "
                f"exceeds {RESIDUAL_TOL:g}")
        out[live] = t
        return out

    def kernel_arrays(self, rho):
        """(t, f, s, e) arrays at z = rho * direction."""
        rho = np.asarray(rho, dtype=float)
        t = self.t_array(rho)
        z = rho * self.direction
        g = 1.0 - self.p * z * t ** (self.p - 1)
        f = 1.0 / g
        s = -np.log(g)
        e = f * t ** (self.p - 1)
        return t, f, s, e


def t_solve(p: int, z: complex) -> KernelEval:
    """Solve for the T_p branch at z and assemble T, F, S, E.

    Uses series start inside the disk and Newton continuation along the
    ray through z; rejects points on the cut.  The residual
    |z T^p - T + 1| is guaranteed below 1e-12.
    """
    z = _require_off_cut(p, complex(z))
    if z == 0:
        return KernelEval(1.0 + 0j, 1.0 + 0j, 0.0 + 0j, 1.0 + 0j, 0.0)
    t = RayEvaluator(p, z / abs(z)).t_at(abs(z))
    g = 1.0 - p * z * t ** (p - 1)
    f = 1.0 / g
    s = -cmath.log(g)
    e = f * t ** (p - 1)
    residual = abs(z * t ** p - t + 1.0)
    degraded = abs(z - radius(p)) < BRANCH_POINT_WINDOW
    return KernelEval(t, f, s, e, residual, degraded)


def f_eval(p: int, z: complex) -> complex:
    """F_p(z) = 1 / (1 - p z T^{p-1})."""
    return t_solve(p, z).f


def s_eval(p: int, z: complex) -> complex:
    """S_p(z) = log F_p(z), principal branch, S_p(0) = 0."""
    return t_solve(p, z).s


def e_eval(p: int, z: complex) -> complex:
    """E(z) = F_p(z) T_p^{p-1}(z) = T_p'/T_p."""
    return t_solve(p, z).e


# ---------------------------------------------------------------------------
# closed forms for p = 2, 3, 4
# ---------------------------------------------------------------------------

_OMEGA = cmath.exp(2j * cmath.pi / 3)
_IROOTS = (1.0 + 0j, 1j, -1.0 + 0j, -1j)
_C4 = 256.0 / 27.0


def t_closed_form(p: int, z: complex) -> complex:
    """Radical closed forms of T_p for p in {2, 3, 4}.

    p=2: the Catalan function 2/(1 + sqrt(1-4z)) (cancellation-free form
    of (1 - sqrt(1-4z))/2z).  p=3: the Cardano form via
    Delta_pm = (sqrt(1+u) pm sqrt(u))^{1/3}, u = -27z/4, with principal
    radicals (the sign jumps of sqrt(u) and sqrt(-3z) across (0, R_3)
    cancel).  p=4: the radical form via the auxiliary v, with branches
    of each radical chosen by matching the series near the origin and
    tracked by continuity along the ray to z.
    """
    _check_order(p)
    z = _require_off_cut(p, complex(z))
    if z == 0:
        return 1.0 + 0j
    if p == 2:
        return 2.0 / (1.0 + cmath.sqrt(1.0 - 4.0 * z))
    if p == 3:
        dp, dm, _ = _p3_parts(-27.0 * z / 4.0)
        return (dp - dm) / cmath.sqrt(-3.0 * z)
    if p == 4:
        return _t4_tracked(z)
    raise ContractError(f"closed form available only for p in {{2, 3, 4}}, got {p}")


def _p3_parts(u: complex):
    """Delta_plus, Delta_minus, h = 1/sqrt(1+u) with principal radicals."""
    su = cmath.sqrt(u)
    s1u = cmath.sqrt(1.0 + u)
    dp = (s1u + su) ** (1.0 / 3.0)
    dm = (s1u - su) ** (1.0 / 3.0)
    return dp, dm, 1.0 / s1u


def _t4_state(z: complex, prev: dict) -> dict:
    """The p=4 radical tower at z with branches nearest to ``prev``."""
    w = _nearest_branch(cmath.sqrt(1.0 - _C4 * z), (1, -1), prev["w"])
    P = _nearest_branch((z * (1.0 + w)) ** (1.0 / 3.0),
                        (1, _OMEGA, _OMEGA.conjugate()), prev["P"])
    # pairing constraint: the two cube roots multiply to (256 z^3 / 27)^(1/3)
    Q = _C4 ** (1.0 / 3.0) * z / P
    v = (P + Q) / 2.0 ** (1.0 / 3.0)
    q4 = _nearest_branch((1.0 + 4.0 * v) ** 0.25, _IROOTS, prev["q4"])
    r2 = _nearest_branch(cmath.sqrt(2.0 - q4 * q4), (1, -1), prev["r2"])
    d4 = _nearest_branch((v * z) ** 0.25, _IROOTS, prev["d4"])
    t = (q4 - r2) / (2.0 * d4)
    return {"w": w, "P": P, "q4": q4, "r2": r2, "d4": d4, "t": t}


def _nearest_branch(principal: complex, multipliers, prev: complex) -> complex:
    return min((m * principal for m in multipliers), key=lambda c: abs(c - prev))


def _t4_seed(z: complex, t_ref: complex) -> dict:
    """Search the finite branch combinations at the matching point."""
    w0 = cmath.sqrt(1.0 - _C4 * z)
    for sw in (1, -1):
        w = sw * w0
        P0 = (z * (1.0 + w)) ** (1.0 / 3.0)
        for mp_ in (1, _OMEGA, _OMEGA.conjugate()):
            P = mp_ * P0
            Q = _C4 ** (1.0 / 3.0) * z / P
            v = (P + Q) / 2.0 ** (1.0 / 3.0)
            q40 = (1.0 + 4.0 * v) ** 0.25
            d40 = (v * z) ** 0.25
            for mq in _IROOTS:
                q4 = mq * q40
                r20 = cmath.sqrt(2.0 - q4 * q4)
                for sr in (1, -1):
                    r2 = sr * r20
                    for md in _IROOTS:
                        d4 = md * d40
                        t = (q4 - r2) / (2.0 * d4)
                        if abs(t - t_ref) < 1e-10:
                            return {"w": w, "P": P, "q4": q4,
                                    "r2": r2, "d4": d4, "t": t}
    raise NumericalError(f"no p=4 branch combination matches the series at z={z}")


def _t4_tracked(z: complex) -> complex:
    rho = abs(z)
    direction = z / rho
    rho_ref = 0.05 * radius(4)
    state = _t4_seed(rho_ref * direction,
                     t_series(4, rho_ref * direction, n_terms=60))
    span = abs(math.log(rho / rho_ref))
    n_steps = max(8, int(24 * span) + 8)
    pending = list(np.geomspace(rho_ref, rho, n_steps))[1:]
    cur = rho_ref
    keys = ("w", "P", "q4", "r2", "d4")
    guard = 0
    while pending:
        nxt = pending[0]
        cand = _t4_state(nxt * direction, state)
        jump = max(abs(cand[k] - state[k]) / max(abs(state[k]), 0.05)
                   for k in keys)
        if jump > 0.2 and abs(nxt - cur) > 1e-12 * rho:
            pending.insert(0, 0.5 * (cur + nxt))  # halve the step
        else:
            state, cur = cand, nxt
            pending.pop(0)
        guard += 1
        if guard > 200000:
            raise NumericalError(f"p=4 branch tracking stalled near z={z}")
    return state["t"]


# ---------------------------------------------------------------------------
# derivative bound fitting
# ---------------------------------------------------------------------------

def bound_constant(spec: ModelSpec, z_grid, q_max: int) -> float:
    """Smallest K with |S^{(q)}(z)| <= (q-1)! [K/(1+|z|)]^q on the grid.

    Every grid point must lie in the sector |arg z| >= spec.epsilon and off
    the cut.  A finite return value certifies the derivative bound
    empirically for 1 <= q <= q_max on the given grid.
    """
    from . import jets  # local import; jets builds on this module

    if q_max < 1:
        raise ContractError("q_max must be >= 1")
    best = 0.0
    for z in z_grid:
        z = complex(z)
        if z != 0 and abs(cmath.phase(z)) < spec.epsilon:
            raise DomainError(
                f"grid point {z} lies inside the excluded sector "
                f"|arg z| < {spec.epsilon}")
        _require_off_cut(spec.p, z)
        derivs = jets.s_derivatives(spec.p, z, q_max)
        scale = 1.0 + abs(z)
        for q in range(1, q_max + 1):
            mag = abs(derivs[q - 1]) / math.factorial(q - 1)
            best = max(best, scale * mag ** (1.0 / q))
    return best
