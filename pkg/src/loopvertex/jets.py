"""Truncated Taylor (jet) arithmetic and exact high-order derivatives.

High derivatives of S_p come from the first-order recursion satisfied by
E = F T^{p-1},

    E' = E^2 [(2p-1) + p(p-1) z E],

propagated through truncated Taylor coefficients, so no accuracy is lost
to numerical differencing: the q-th derivative is exact up to rounding.
Mixed field derivatives of S_p(-lambda (phi phibar)^{p-1}) follow by
composing the univariate jet of S_p with the bivariate polynomial jet of
the argument.

Coefficient payloads are duck-typed: plain complex numbers or equal-shape
ndarrays both work, which is how the tree-expansion engine vectorizes the
same recursions over Monte Carlo samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import kernel
from .errors import ContractError

__all__ = [
    "UnivariateJet", "BivariateJet",
    "e_jet", "s_derivatives", "corner_derivative",
]

#: factorial scaling is done in floating point; cap the total order
MAX_MIXED_ORDER = 64


@dataclass(frozen=True)
class UnivariateJet:
    """Taylor coefficients c_k = f^{(k)}(base)/k! around a fixed base point.

    The truncation order is len(coeffs) - 1 and is preserved by arithmetic;
    operands must share base point and order.
    """

    base: complex
    coeffs: tuple

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def _check_compatible(self, other: "UnivariateJet") -> None:
        if self.base != other.base or self.order != other.order:
            raise ContractError("jet base points and orders must match")

    def __add__(self, other: "UnivariateJet") -> "UnivariateJet":
        self._check_compatible(other)
        return UnivariateJet(self.base, tuple(
            a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, other):
        if isinstance(other, UnivariateJet):
            self._check_compatible(other)
            a, b = self.coeffs, other.coeffs
            return UnivariateJet(self.base, tuple(
                sum(a[i] * b[k - i] for i in range(k + 1))
                for k in range(len(a))))
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, factor) -> "UnivariateJet":
        return UnivariateJet(self.base, tuple(factor * c for c in self.coeffs))

    def derivative_value(self, k: int):
        """f^{(k)}(base) = k! c_k."""
        return math.factorial(k) * self.coeffs[k]


class BivariateJet:
    """Sparse truncated power series in two displacements (u, v).

    Coefficients are stored in a dict {(j, k): payload}; multiplication
    truncates to the fixed rectangle (a_max, b_max).
    """

    __slots__ = ("a_max", "b_max", "coeffs")

    def __init__(self, a_max: int, b_max: int, coeffs: dict | None = None):
        if a_max < 0 or b_max < 0:
            raise ContractError("truncation orders must be >= 0")
        self.a_max = a_max
        self.b_max = b_max
        self.coeffs = dict(coeffs or {})

    def _check_compatible(self, other: "BivariateJet") -> None:
        if (self.a_max, self.b_max) != (other.a_max, other.b_max):
            raise ContractError("bivariate jet truncation orders must match")

    def get(self, j: int, k: int):
        return self.coeffs.get((j, k), 0.0)

    def __add__(self, other: "BivariateJet") -> "BivariateJet":
        self._check_compatible(other)
        out = dict(self.coeffs)
        for key, val in other.coeffs.items():
            out[key] = out[key] + val if key in out else val
        return BivariateJet(self.a_max, self.b_max, out)

    def __mul__(self, other):
        if not isinstance(other, BivariateJet):
            return self.scale(other)
        self._check_compatible(other)
        out: dict = {}
        for (j1, k1), v1 in self.coeffs.items():
            for (j2, k2), v2 in other.coeffs.items():
                j, k = j1 + j2, k1 + k2
                if j <= self.a_max and k <= self.b_max:
                    key = (j, k)
                    out[key] = out[key] + v1 * v2 if key in out else v1 * v2
        return BivariateJet(self.a_max, self.b_max, out)

    __rmul__ = __mul__

    def scale(self, factor) -> "BivariateJet":
        return BivariateJet(self.a_max, self.b_max,
                            {key: factor * val for key, val in self.coeffs.items()})

    def add_constant(self, value) -> "BivariateJet":
        out = dict(self.coeffs)
        out[(0, 0)] = out[(0, 0)] + value if (0, 0) in out else value
        return BivariateJet(self.a_max, self.b_max, out)


# ---------------------------------------------------------------------------
# coefficient recursions (payload-agnostic: complex scalars or ndarrays)
# ---------------------------------------------------------------------------

def _conv_at(a, b, k: int):
    return sum(a[i] * b[k - i] for i in range(k + 1))


def e_jet_coeffs(p: int, z, e0, order: int) -> list:
    """Taylor coefficients of E at z, seeded with c_0 = E(z).

    Pushes the recursion E' = E^2[(2p-1) + p(p-1) z E] through
    coefficients: (k+1) c_{k+1} = coefficient k of E^2 [(2p-1)
    + p(p-1)(z+h) E].
    """
    if order < 0:
        raise ContractError("order must be >= 0")
    c = [e0]
    pp1 = p * (p - 1)
    for k in range(order):
        e2_k = _conv_at(c, c, k)
        e3_k = sum(_conv_at(c, c, i) * c[k - i] for i in range(k + 1))
        e3_km1 = (sum(_conv_at(c, c, i) * c[k - 1 - i] for i in range(k))
                  if k >= 1 else 0.0)
        c.append(((2 * p - 1) * e2_k + pp1 * (z * e3_k + e3_km1)) / (k + 1))
    return c


def s_derivative_values(p: int, z, e_coeffs: list, q_max: int) -> list:
    """S^{(1)}..S^{(q_max)} at z from the E jet at z.

    S^{(q)} = (q-1)! * [coefficient q-1 of p E (1 + (p-1)(z+h) E)].
    """
    if q_max < 1:
        raise ContractError("q_max must be >= 1")
    if len(e_coeffs) < q_max:
        raise ContractError("E jet too short for the requested q_max")
    out = []
    for q in range(1, q_max + 1):
        k = q - 1
        e2_k = _conv_at(e_coeffs, e_coeffs, k)
        e2_km1 = _conv_at(e_coeffs, e_coeffs, k - 1) if k >= 1 else 0.0
        g_k = p * (e_coeffs[k] + (p - 1) * (z * e2_k + e2_km1))
        out.append(math.factorial(q - 1) * g_k)
    return out


def e_jet(p: int, z: complex, order: int) -> UnivariateJet:
    """Jet of E = F T^{p-1} at z to the given truncation order."""
    z = complex(z)
    e0 = kernel.e_eval(p, z)
    return UnivariateJet(z, tuple(e_jet_coeffs(p, z, e0, order)))


def s_derivatives(p: int, z: complex, q_max: int) -> list:
    """Derivatives S^{(1)}(z)..S^{(q_max)}(z), exact up to rounding."""
    z = complex(z)
    e0 = kernel.e_eval(p, z)
    coeffs = e_jet_coeffs(p, z, e0, q_max - 1)
    return s_derivative_values(p, z, coeffs, q_max)


# ---------------------------------------------------------------------------
# mixed field derivatives
# ---------------------------------------------------------------------------

def inner_argument_jet(p: int, lam, phi, phibar, a_max: int,
                       b_max: int) -> BivariateJet:
    """Bivariate jet of -lambda (phi+u)^{p-1} (phibar+v)^{p-1} - z_0.

    The constant term cancels exactly against z_0 = -lambda (phi phibar)^{p-1}
    and is omitted, so the jet starts at total degree 1.
    """
    coeffs: dict = {}
    for j in range(min(a_max, p - 1) + 1):
        cj = math.comb(p - 1, j)
        phi_pow = phi ** (p - 1 - j)
        for k in range(min(b_max, p - 1) + 1):
            if j == 0 and k == 0:
                continue
            coeffs[(j, k)] = (-lam) * cj * math.comb(p - 1, k) \
                * phi_pow * phibar ** (p - 1 - k)
    return BivariateJet(a_max, b_max, coeffs)


def compose_with_inner(outer_coeffs: list, inner: BivariateJet) -> BivariateJet:
    """Horner evaluation of sum_r outer_coeffs[r] * inner^r (truncated).

    Requires inner to have no constant term; then the truncated result is
    exact through the rectangle.
    """
    if (0, 0) in inner.coeffs:
        raise ContractError("inner jet must have zero constant term")
    result = BivariateJet(inner.a_max, inner.b_max,
                          {(0, 0): outer_coeffs[-1]})
    for r in range(len(outer_coeffs) - 2, -1, -1):
        result = (inner * result).add_constant(outer_coeffs[r])
    return result


def corner_derivative(spec, phi: complex, phibar: complex,
                      a: int, b: int) -> complex:
    """Mixed partial d^a/dphi^a d^b/dphibar^b of S_p(-lambda (phi phibar)^{p-1}).

    Composes the univariate jet of S_p at z_0 = -lambda (phi phibar)^{p-1}
    with the bivariate jet of the argument, then scales coefficient (a, b)
    by a! b!.
    """
    if a < 0 or b < 0:
        raise ContractError("derivative orders must be >= 0")
    if a + b > MAX_MIXED_ORDER:
        raise ContractError(f"total order a+b capped at {MAX_MIXED_ORDER}")
    phi = complex(phi)
    phibar = complex(phibar)
    z0 = -spec.lam * (phi * phibar) ** (spec.p - 1)
    ev = kernel.t_solve(spec.p, z0)  # raises DomainError on the cut
    if a == 0 and b == 0:
        return ev.s
    derivs = s_derivatives(spec.p, z0, a + b)
    outer = [ev.s] + [derivs[r - 1] / math.factorial(r)
                      for r in range(1, a + b + 1)]
    inner = inner_argument_jet(spec.p, spec.lam, phi, phibar, a, b)
    composed = compose_with_inner(outer, inner)
    return composed.get(a, b) * math.factorial(a) * math.factorial(b)


def mixed_partials_antidiagonal(p: int, lam, phi, phibar,
                                s_values: list, d: int) -> list:
    """All mixed partials of total order d at once, payload-vectorized.

    ``s_values[r-1]`` holds S^{(r)} at z_0 = -lambda (phi phibar)^{p-1}
    (payloads).  Returns the list D[a] = d^a/dphi^a d^{d-a}/dphibar^{d-a} S
    for a = 0..d.  Used by the tree engine, where only total order d =
    vertex degree occurs; the r = 0 outer term cannot reach any (a, d-a)
    coefficient with d >= 1 and is set to zero.
    """
    if d < 1:
        raise ContractError("total order d must be >= 1")
    outer = [0.0] + [s_values[r - 1] / math.factorial(r) for r in range(1, d + 1)]
    inner = inner_argument_jet(p, lam, phi, phibar, d, d)
    composed = compose_with_inner(outer, inner)
    return [composed.get(a, d - a) * math.factorial(a) * math.factorial(d - a)
            for a in range(d + 1)]
