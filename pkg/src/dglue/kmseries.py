"""Structure series of simple-type 4-manifolds.

A simple-type manifold with ``b1 = 0`` has Donaldson series

    DD^w(a) = exp(Q(a)/2) * sum_i a_i * exp(K_i . a)

for finitely many basic classes ``K_i``.  This module stores such series on a
reduced lattice (only the classes one evaluates on), evaluates them on formal
linear combinations of lattice vectors, and converts between ``DD^w`` and the
combined series ``D_X = D^w + D^{w+Sigma}``.

A formal combination is a mapping ``{variable: vector}`` meaning
``sum(variable * vector)``; for instance ``{"s": sigma, "t": dbar}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import partial
from typing import Mapping, Sequence

from .errors import BadTopology, GenusMismatch, NonIntegralSign, QuadraticInVar
from .exppoly import (
    I, ZERO, ExpElement, ExpMatrix, GaussRat, exp, mat_inv, var,
)

Vector = tuple
Alpha = Mapping[str, Sequence[int]]


@dataclass(frozen=True)
class Lattice:
    form: tuple

    def __post_init__(self):
        object.__setattr__(self, "form", tuple(tuple(int(x) for x in r) for r in self.form))

    @property
    def rank(self) -> int:
        return len(self.form)

    def dot(self, u: Sequence, v: Sequence):
        return sum(u[i] * self.form[i][j] * v[j]
                   for i in range(self.rank) if u[i]
                   for j in range(self.rank) if v[j])

    def square(self, u: Sequence):
        return self.dot(u, u)

    def problems(self) -> list[str]:
        out = []
        if any(len(r) != self.rank for r in self.form):
            out.append("form is not square")
        elif any(self.form[i][j] != self.form[j][i]
                 for i in range(self.rank) for j in range(self.rank)):
            out.append("form is not symmetric")
        return out

    def solve(self, pairings: Sequence) -> tuple:
        """The vector ``K`` with ``K . e_j = pairings[j]`` (form must be invertible)."""
        inv = mat_inv(ExpMatrix(self.form))
        sol = inv @ list(pairings)
        return tuple(x.constant_value() for x in sol)


@dataclass(frozen=True)
class ManifoldDescriptor:
    lattice: Lattice
    sigma: Vector
    w: Vector
    b_plus: int
    euler: int
    signature: int
    genus: int
    dbar: Vector | None = None
    b1: int = 0
    name: str = ""
    simple_type: bool = True
    # named vectors usable in class expressions (basis names, probes)
    classes: Mapping[str, Vector] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "sigma", tuple(self.sigma))
        object.__setattr__(self, "w", tuple(self.w))
        if self.dbar is not None:
            object.__setattr__(self, "dbar", tuple(self.dbar))

    def dot(self, u, v):
        return self.lattice.dot(u, v)

    @property
    def d0(self) -> Fraction:
        return -self.lattice.square(self.w) - Fraction(3, 2) * (1 + self.b_plus)

    def named(self) -> dict:
        out = dict(self.classes)
        out["sigma"] = self.sigma
        out["w"] = self.w
        if self.dbar is not None:
            out["dbar"] = self.dbar
        return out


@dataclass(frozen=True)
class StructureSeries:
    owner: ManifoldDescriptor
    classes: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(
            (tuple(int(x) for x in k), GaussRat.coerce(a)) for k, a in self.classes))

    def sigma_pairings(self) -> list[int]:
        return [self.owner.dot(k, self.owner.sigma) for k, _ in self.classes]

    def sector(self, value: int) -> list[tuple]:
        """Classes with ``K . Sigma == value``."""
        return [(k, a) for k, a in self.classes if self.owner.dot(k, self.owner.sigma) == value]

    def merged(self) -> "StructureSeries":
        """Combine repeated classes and drop zero coefficients."""
        acc: dict = {}
        for k, a in self.classes:
            acc[k] = acc.get(k, GaussRat(0)) + a
        return replace(self, classes=tuple((k, a) for k, a in sorted(acc.items()) if a))


def validate(m: ManifoldDescriptor, s: StructureSeries | None = None) -> list[str]:
    """Every violated hypothesis, as short labelled messages; empty means valid.

    The characteristic-vector test runs against the reduced lattice only, so a
    pass there is necessary but not sufficient.
    """
    out = list(m.lattice.problems())
    n = m.lattice.rank
    vecs = [("sigma", m.sigma), ("w", m.w)] + ([("dbar", m.dbar)] if m.dbar is not None else [])
    vecs += [(f"class {name}", v) for name, v in m.classes.items()]
    if s is not None:
        vecs += [(f"basic class {k}", k) for k, _ in s.classes]
    bad_len = [name for name, v in vecs if len(v) != n]
    if bad_len:
        out.append("vector length: " + ", ".join(bad_len) + f" (rank is {n})")
    if out:
        return out
    if m.lattice.square(m.sigma) != 0:
        out.append(f"sigma self-intersection is {m.lattice.square(m.sigma)}, not 0")
    if m.dot(m.w, m.sigma) % 2 != 1:
        out.append("w.sigma parity: w.sigma must be odd")
    if m.b1 != 0:
        out.append("b1 must be 0")
    if (m.b_plus - m.b1) % 2 != 1 or m.b_plus <= 1:
        out.append("suitable: need b+ - b1 odd and b+ > 1")
    if m.d0.denominator != 1:
        out.append("d0 integrality: -w^2 - 3(1+b+)/2 is not an integer")
    if m.genus < 1:
        out.append("genus must be positive")
    if m.dbar is not None and m.dot(m.dbar, m.sigma) == 0:
        out.append("dbar must meet sigma (dbar.sigma != 0)")
    if s is not None:
        basis = [tuple(int(i == j) for j in range(n)) for i in range(n)]
        for k, _ in s.classes:
            if any((m.dot(k, e) - m.lattice.square(e)) % 2 for e in basis):
                out.append(f"characteristic: {k} is not characteristic")
            ks = m.dot(k, m.sigma)
            if ks % 2 or abs(ks) > 2 * m.genus - 2:
                out.append(f"adjunction/parity: {k} has K.sigma = {ks}")
    return out


# -- formal evaluation -----------------------------------------------------

def pair_linear(lat: Lattice, k: Sequence, alpha: Alpha) -> ExpElement:
    """``K . alpha`` as a linear polynomial in the formal variables."""
    out = ZERO
    for v, vec in alpha.items():
        c = lat.dot(k, vec)
        if c:
            out = out + var(v) * c
    return out


def quad(lat: Lattice, alpha: Alpha) -> ExpElement:
    """``Q(alpha)`` as a quadratic polynomial."""
    out = ZERO
    items = list(alpha.items())
    for i, (u, uv) in enumerate(items):
        for v, vv in items[i:]:
            c = lat.dot(uv, vv)
            if c:
                out = out + var(u) * var(v) * (c if u == v else 2 * c)
    return out


def dd_eval(s: StructureSeries, alpha: Alpha) -> ExpElement:
    """``DD^w(alpha) = exp(Q(alpha)/2) * sum a_i exp(K_i . alpha)``."""
    lat = s.owner.lattice
    out = ZERO
    for k, a in s.classes:
        out = out + exp(pair_linear(lat, k, alpha)) * a
    if out.is_zero():
        return out
    return exp(quad(lat, alpha) / 2) * out


def _i_scaled(e: ExpElement, alpha: Alpha) -> ExpElement:
    for v in alpha:
        e = e.subs(v, var(v) * I)
    return e


def _i_pow_d0(m: ManifoldDescriptor, sign: int = -1) -> GaussRat:
    d0 = m.d0
    if d0.denominator != 1:
        raise BadTopology("d0 is not an integer")
    return GaussRat.i_pow(sign * int(d0))


def dw_eval(s: StructureSeries, alpha: Alpha, point: bool = False) -> ExpElement:
    """``D^w(e^alpha)``, or ``D^w(x e^alpha)`` when ``point`` is set.

    Separates the degrees of ``DD^w`` mod 4 using ``DD^w(i alpha)``.
    """
    dd = dd_eval(s, alpha)
    twisted = _i_scaled(dd, alpha) * _i_pow_d0(s.owner)
    if point:
        return dd - twisted
    return (dd + twisted) / 2


def dx_eval(s: StructureSeries, alpha: Alpha, lam: str | None = None) -> ExpElement:
    """Combined series ``D_X(e^{alpha + lam x})`` with ``D_X = D^w + D^{w+Sigma}``.

    Classes with ``K.Sigma = 2 mod 4`` contribute ``a exp(Q/2 + K.alpha)`` and the
    point class acts on them by 2; classes with ``K.Sigma = 0 mod 4`` contribute
    ``i^{-d0} a exp(-Q/2 + i K.alpha)`` and the point class acts by -2.
    """
    m = s.owner
    lat = m.lattice
    q = quad(lat, alpha) / 2
    unit = _i_pow_d0(m)
    out = ZERO
    for k, a in s.classes:
        lin = pair_linear(lat, k, alpha)
        if m.dot(k, m.sigma) % 4 == 2:
            term = exp(q + lin) * a
            if lam is not None:
                term = term * exp(var(lam) * 2)
        else:
            term = exp(-q + lin * I) * (a * unit)
            if lam is not None:
                term = term * exp(var(lam) * -2)
        out = out + term
    return out


def dx_from_dd(s: StructureSeries):
    """``alpha -> D_X(e^alpha)`` as a callable (keyword ``lam`` adds the point class)."""
    return partial(dx_eval, s)


def generic_alpha(lat: Lattice, prefix: str = "x") -> dict:
    """One formal variable per basis vector: ``{x0: e_0, x1: e_1, ...}``."""
    n = lat.rank
    return {f"{prefix}{i}": tuple(int(i == j) for j in range(n)) for i in range(n)}


def recover_series(dx: ExpElement, owner: ManifoldDescriptor,
                   alpha: Alpha | None = None) -> tuple[StructureSeries, StructureSeries]:
    """Split a combined series back into ``(DD^w, DD^{w+Sigma})``.

    ``dx`` must be ``dx_eval`` on ``generic_alpha(owner.lattice)`` (or on the
    given ``alpha`` with one variable per basis vector, in order).  Terms with
    quadratic part ``+Q/2`` are the ``K.Sigma = 2 mod 4`` sector; those with
    ``-Q/2`` carry Gaussian frequencies ``i K`` and form the other sector.
    """
    lat = owner.lattice
    alpha = dict(alpha or generic_alpha(lat))
    names = list(alpha)
    qhalf = quad(lat, alpha) / 2
    unit_back = _i_pow_d0(owner, sign=1)
    dd_w, dd_ws = [], []
    for c, mono, expo in dx:
        if mono:
            raise ValueError("combined series has polynomial factors")
        quad_part = ExpElement({(m2, ()): q for m2, q in expo if sum(p for _, p in m2) == 2})
        lin = {m2[0][0]: q for m2, q in expo if m2 and sum(p for _, p in m2) == 1}
        pair = [lin.get(v, GaussRat(0)) for v in names]
        if quad_part == qhalf and not qhalf.is_zero():
            dd_w.append((lat.solve(pair), c))
            dd_ws.append((lat.solve(pair), c))
        elif quad_part == -qhalf:
            k = lat.solve([x / I for x in pair])
            a = c * unit_back
            dd_w.append((k, a))
            dd_ws.append((k, -a))
        else:
            raise ValueError("a term does not belong to either sector")
    out = []
    for lst in (dd_w, dd_ws):
        cls = []
        for k, a in lst:
            if any(x.im != 0 or x.re.denominator != 1 for x in k):
                raise ValueError(f"recovered class {k} is not integral")
            cls.append((tuple(int(x.re) for x in k), a))
        out.append(StructureSeries(owner, tuple(cls)).merged())
    return out[0], out[1]


def change_w(s: StructureSeries, w_new: Sequence[int]) -> StructureSeries:
    """Re-sign coefficients for a new choice of ``w``."""
    m = s.owner
    w_new = tuple(w_new)
    if m.dot(w_new, m.sigma) % 2 != 1:
        raise NonIntegralSign("w_new.sigma must be odd")
    old = m.lattice.square(m.w)
    new = m.lattice.square(w_new)
    out = []
    for k, a in s.classes:
        diff = (m.dot(k, w_new) + new) - (m.dot(k, m.w) + old)
        if diff % 2:
            raise NonIntegralSign(f"(K.w + w^2)/2 is not integral for K = {k}")
        out.append((k, a if (diff // 2) % 2 == 0 else -a))
    return StructureSeries(replace(m, w=w_new), tuple(out))


def witten_scale(euler: int, signature: int) -> Fraction:
    """``2^(2 + (7 chi + 11 sigma)/4)``."""
    num = 7 * euler + 11 * signature
    if num % 4:
        raise BadTopology(f"7*chi + 11*sigma = {num} is not divisible by 4")
    return Fraction(2) ** (2 + num // 4)


def witten_coefficient(m: ManifoldDescriptor, k: Sequence[int], sw) -> GaussRat:
    """Donaldson coefficient predicted from a Seiberg-Witten value."""
    scale = witten_scale(m.euler, m.signature)
    e = m.dot(k, m.w) + m.lattice.square(m.w)
    if e % 2:
        raise NonIntegralSign("K.w + w^2 is odd")
    sign = -1 if (e // 2) % 2 else 1
    return GaussRat.coerce(Fraction(sw)) * (sign * scale)


@dataclass(frozen=True)
class ComposedTopology:
    euler: int
    signature: int
    b_plus: int
    d0_parity: int
    genus: int


def topology_compose(m1: ManifoldDescriptor, m2: ManifoldDescriptor, g: int = 2) -> ComposedTopology:
    """Topological numbers of the fiber sum along genus-``g`` surfaces."""
    if m1.genus != m2.genus or m1.genus != g:
        raise GenusMismatch(f"genera {m1.genus}, {m2.genus} and {g} differ")
    parity = (int(m1.d0) + int(m2.d0) + 3 * (g - 1)) % 2
    return ComposedTopology(
        euler=m1.euler + m2.euler + 4 * g - 4,
        signature=m1.signature + m2.signature,
        b_plus=m1.b_plus + m2.b_plus + 2 * g - 1,
        d0_parity=parity,
        genus=g,
    )


def simple_type_shape(e: ExpElement, v: str) -> bool:
    """True when no term carries a positive power of ``v`` (only exponentials in ``v``)."""
    for (k, _freq), rest in e.components(v).items():
        if k >= 1 and not rest.is_zero():
            return False
    return True


def dw_power(s: StructureSeries, cls: Sequence[int], n: int) -> GaussRat:
    """``D^w(cls^n)``."""
    e = dw_eval(s, {"_u": cls})
    return (e.taylor_coeff("_u", n) * _factorial(n)).constant_value()


def dx_power(s: StructureSeries, cls: Sequence[int], n: int, points: int = 0) -> GaussRat:
    """``D_X(cls^n x^points)`` from the combined series."""
    e = dx_eval(s, {"_u": cls}, lam="_lam" if points else None)
    if points:
        e = e.taylor_coeff("_lam", points) * _factorial(points)
    return (e.taylor_coeff("_u", n) * _factorial(n)).constant_value()


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


__all__ = [
    "Lattice", "ManifoldDescriptor", "StructureSeries", "validate", "dd_eval", "dw_eval",
    "dx_eval", "dx_from_dd", "generic_alpha", "recover_series", "change_w",
    "witten_scale", "witten_coefficient", "ComposedTopology", "topology_compose",
    "simple_type_shape", "dw_power", "dx_power", "pair_linear", "quad", "QuadraticInVar",
]
