"""Floer pairing pipeline for splittings along ``S^1 x Sigma`` (genus 2).

A relative invariant is stored through its dual components
``phi_l = <Phi, h^l>``; two of them pair through ``DUAL_PAIRING`` (the inverse
of the ring pairing).  Gluing a piece with vector ``phi`` to one with vector
``psi`` along a class ``D`` with ``D.Sigma = 1`` gives the combined series

    D_X(exp(s Sigma + t D)) = exp(t s) * phi^T B(s) psi,
    B(s) = DUAL_PAIRING @ mult_matrix(exp(s mu(Sigma))).

Expanding ``phi^T B psi`` in the functions ``exp(2s), exp(-2s), 1, s`` gives
the matrix ``A_psi``; the cap ``D^2 x Sigma`` with vector ``a`` yields the
matrix ``U(a)`` that converts coefficient vectors back into pairings.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Sequence

from .errors import NotNormalized, NotSimpleType, SingularCap
from .exppoly import ZERO, ExpElement, ExpMatrix, GaussRat, exp, var
from .kmseries import StructureSeries, _factorial, dw_power, dx_eval
from .qh2 import (
    DUAL_PAIRING, MU_X, RingClass, dual_coords, exp_mu_sigma, mult_matrix,
)

# the functions of s that A_psi separates, in row order: (power of s, frequency)
S_FUNCTIONS = ((0, 2), (0, -2), (0, 0), (1, 0))


def _vec(v: Sequence) -> tuple:
    return tuple(ExpElement.coerce(x) for x in v)


def b_matrix(s: str = "s") -> ExpMatrix:
    return DUAL_PAIRING @ mult_matrix(exp_mu_sigma(s))


def pair_relative(phi: Sequence, psi: Sequence, s: str = "s", t: str | None = None) -> ExpElement:
    """``phi^T B(s) psi``, times ``exp(t s)`` when ``t`` names the dbar variable."""
    phi, psi = _vec(phi), _vec(psi)
    out = sum((x * y for x, y in zip(phi, b_matrix(s) @ psi)), ZERO)
    if t is not None:
        out = out * exp(var(t) * var(s))
    return out


def a_matrix(psi: Sequence) -> ExpMatrix:
    """Closed form of ``A_psi`` (rows follow ``S_FUNCTIONS``, columns ``phi``)."""
    p0, p1, p2, p3 = _vec(psi)
    q = Fraction(1, 4)
    r = Fraction(1, 128)
    z = ZERO
    return ExpMatrix([
        [z, z, (p3 * 4 + p2 * 16) * (q * r), (p2 * 4 + p3) * (q * r)],
        [z, z, (p3 * 4 - p2 * 16) * (q * r), (p2 * 4 - p3) * (q * r)],
        [(p3 - p1 * 16) * q, (p2 - p0 * 16) * q, (p1 - p3 / 16) * q, (p0 - p2 / 16) * q],
        [z, (p3 - p1 * 16) / 8, z, (p1 - p3 / 16) / 8],
    ])


def a_matrix_by_extraction(psi: Sequence, s: str = "s") -> ExpMatrix:
    """``A_psi`` read off ``B psi`` by extracting each function of ``s``."""
    col = b_matrix(s) @ _vec(psi)
    return ExpMatrix([[col[j].extract(s, k, f) for j in range(4)] for k, f in S_FUNCTIONS])


def s_functions(s: str = "s") -> tuple:
    sv = var(s)
    return (exp(2 * sv), exp(-2 * sv), ExpElement.coerce(1), sv)


def _cap_factors(a: Sequence) -> tuple:
    a0, a1, a2, a3 = (GaussRat.coerce(Fraction(x) if not isinstance(x, GaussRat) else x) for x in a)
    return a0, a1, a2, a3, a3 + 4 * a2, a3 - 4 * a2, a3 - 16 * a1


def u_matrix(a: Sequence) -> ExpMatrix:
    """The matrix ``U(a)`` with ``A_a^T U A_a = DUAL_PAIRING``.

    Raises SingularCap on the locus ``(a3 + 4 a2)(a3 - 4 a2)(a3 - 16 a1) = 0``,
    exactly where ``A_a`` is not invertible.
    """
    a0, _a1, a2, _a3, plus, minus, third = _cap_factors(a)
    if not (plus and minus and third):
        raise SingularCap(f"cap vector {tuple(a)} lies on the singular locus")
    z = GaussRat(0)
    off = -128 / (third * third)
    return ExpMatrix([
        [512 / (plus * plus), z, z, z],
        [z, -512 / (minus * minus), z, z],
        [z, z, z, off],
        [z, z, off, 512 * (a2 - 16 * a0) / (third * third * third)],
    ])


def a_determinant(a: Sequence) -> GaussRat:
    """``det A_a = -(a3 - 16 a1)^2 (a3 - 4 a2)(a3 + 4 a2) / 2^20``."""
    *_, plus, minus, third = _cap_factors(a)
    return -(third * third * minus * plus) / 1048576


# -- caps and relative vectors ------------------------------------------------

def cap_vector(z: RingClass | None = None) -> tuple:
    """Dual components of a cap class; the default is ``D_A(1) = 1``."""
    return tuple(dual_coords(RingClass.unit() if z is None else z))


def cap_unit() -> tuple:
    return cap_vector()


def cap_point(mu_x: RingClass | None = None) -> tuple:
    """Dual components of the cap carrying one point class."""
    return cap_vector(MU_X if mu_x is None else mu_x)


def v_vector(series: StructureSeries, dbar: Sequence[int] | None = None, t: str = "t") -> tuple:
    """Sector sums ``sum a_i exp(t K_i.dbar)`` over ``K.Sigma = 2, -2, 0`` and a zero slot."""
    m = series.owner
    dbar = tuple(m.dbar if dbar is None else dbar)
    if not m.simple_type:
        raise NotSimpleType(f"{m.name or 'manifold'} is not of simple type")
    if m.dot(dbar, dbar) != 0 or m.dot(dbar, m.sigma) != 1:
        raise NotNormalized("dbar must satisfy dbar^2 = 0 and dbar.Sigma = 1")
    out = []
    for value in (2, -2, 0):
        acc = ZERO
        for k, a in series.sector(value):
            c = m.dot(k, dbar)
            acc = acc + (exp(var(t) * c) * a if c else ExpElement.coerce(a))
        out.append(acc)
    return tuple(out) + (ZERO,)


def relative_from_closed(series: StructureSeries, dbar: Sequence[int] | None = None,
                         extra: tuple[int, int] = (0, 0), t: str | None = "t") -> tuple:
    """``phi_l = D_X(z_l * Sigma^m * x^n * exp(t dbar))`` with ``z_l = 2^l Sigma^l``.

    ``extra = (m, n)``; pass ``t=None`` (or no dbar) to evaluate at ``t = 0``.
    """
    m = series.owner
    alpha = {"_s": m.sigma}
    if dbar is None:
        dbar = m.dbar
    if t is not None and dbar is not None:
        alpha[t] = tuple(dbar)
    em, en = extra
    e = dx_eval(series, alpha, lam="_lam" if en else None)
    if en:
        e = e.taylor_coeff("_lam", en) * _factorial(en)
    out = []
    for ell in range(4):
        n = ell + em
        out.append(e.taylor_coeff("_s", n) * (_factorial(n) * 2 ** ell))
    return tuple(out)


def sigma_scale_from_series(series: StructureSeries, n: int = 1) -> Fraction:
    """Solve ``D(Sigma^{n+6}) = a^4 * c * D(Sigma^{n+2})`` for ``a > 0``.

    Here ``h^6 = c h^2`` in the ring (``c = 256``); the answer is the factor in
    ``mu(Sigma) = a h``.
    """
    sig = series.owner.sigma
    hi, lo = dw_power(series, sig, n + 6), dw_power(series, sig, n + 2)
    c = RingClass.h_power(6)[2]
    if not lo or hi.im or lo.im:
        raise ValueError("scale equation is degenerate for this series")
    a4 = hi.re / lo.re / c
    return fourth_root(a4)


def fourth_root(q: Fraction) -> Fraction:
    """The positive rational fourth root of ``q``; ValueError if none exists."""
    q = Fraction(q)
    if q <= 0:
        raise ValueError(f"{q} has no positive fourth root")
    num, den = _iroot4(q.numerator), _iroot4(q.denominator)
    if num is None or den is None:
        raise ValueError(f"{q} is not a rational fourth power")
    return Fraction(num, den)


def _iroot4(n: int):
    r = isqrt(isqrt(n))
    return r if r ** 4 == n else None


__all__ = [
    "S_FUNCTIONS", "b_matrix", "pair_relative", "a_matrix", "a_matrix_by_extraction",
    "s_functions", "u_matrix", "a_determinant", "cap_vector", "cap_unit", "cap_point",
    "v_vector", "relative_from_closed", "sigma_scale_from_series", "fourth_root",
]
