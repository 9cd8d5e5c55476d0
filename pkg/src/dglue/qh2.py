"""Even part of the quantum cohomology ring of the genus-2 moduli space.

The ring is 4-dimensional with power basis ``1, h, h^2, h^3`` and the single
reduction ``h^4 = 16 h^2``.  The geometric generators are ``l = (h^2 - 4)/4``
and ``p = (h^3 - 12 h)/4``.  The intersection pairing in the power basis is::

    4 * [[0, 0, 0, 1],
         [0, 0, 1, 0],
         [0, 1, 0, 16],
         [1, 0, 16, 0]]

Coordinates may live in any commutative ring that mixes with ``Fraction``:
plain rationals, :class:`~dglue.exppoly.GaussRat` or
:class:`~dglue.exppoly.ExpElement`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .exppoly import ExpElement, ExpMatrix, cosh, mat_inv, sinh, var

# h^4 = H4 * h^2
H4 = 16

PAIRING_BASE = ((0, 0, 0, 1), (0, 0, 1, 0), (0, 1, 0, 16), (1, 0, 16, 0))
PAIRING = ExpMatrix([[4 * x for x in r] for r in PAIRING_BASE])
# Inverse of PAIRING; the pairing of dual-basis vectors.
DUAL_PAIRING = mat_inv(PAIRING)


def _num(x):
    return Fraction(x) if isinstance(x, int) else x


class RingClass:
    """Element ``c0 + c1 h + c2 h^2 + c3 h^3``."""

    __slots__ = ("coords",)

    def __init__(self, coords: Sequence):
        coords = tuple(_num(c) for c in coords)
        if len(coords) != 4:
            raise ValueError("RingClass needs exactly 4 coordinates")
        object.__setattr__(self, "coords", coords)

    def __setattr__(self, name, value):
        raise AttributeError("RingClass is immutable")

    @classmethod
    def unit(cls) -> "RingClass":
        return cls((1, 0, 0, 0))

    @classmethod
    def h_power(cls, n: int) -> "RingClass":
        """``h**n`` reduced to the power basis."""
        if n < 4:
            return cls([1 if i == n else 0 for i in range(4)])
        return cls.h_power(n - 2) * H4

    def __getitem__(self, i):
        return self.coords[i]

    def __iter__(self):
        return iter(self.coords)

    def __add__(self, other):
        if not isinstance(other, RingClass):
            other = RingClass.unit() * other
        return RingClass([a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __neg__(self):
        return RingClass([-c for c in self.coords])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, RingClass):
            return qmul(self, other)
        other = _num(other)
        return RingClass([c * other for c in self.coords])

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return RingClass([c / scalar for c in self.coords])

    def __pow__(self, n: int):
        out = RingClass.unit()
        for _ in range(n):
            out = qmul(out, self)
        return out

    def __eq__(self, other):
        if not isinstance(other, RingClass):
            return NotImplemented
        return all(a == b for a, b in zip(self.coords, other.coords))

    def __hash__(self):
        return hash(self.coords)

    def map(self, fn) -> "RingClass":
        return RingClass([fn(c) for c in self.coords])

    def __repr__(self):
        return f"RingClass({', '.join(str(c) for c in self.coords)})"


def qmul(a: RingClass, b: RingClass) -> RingClass:
    """Quantum product, reducing ``h^n`` for ``n >= 4`` through ``h^4 = 16 h^2``."""
    prod = [Fraction(0)] * 7
    for i, x in enumerate(a.coords):
        if x == 0:
            continue
        for j, y in enumerate(b.coords):
            if y == 0:
                continue
            prod[i + j] = prod[i + j] + x * y
    for n in range(6, 3, -1):
        prod[n - 2] = prod[n - 2] + prod[n] * H4
    return RingClass(prod[:4])


def qpair(a: RingClass, b: RingClass):
    """Intersection pairing ``<a, b>``."""
    out = Fraction(0)
    for i, x in enumerate(a.coords):
        for j, y in enumerate(b.coords):
            w = 4 * PAIRING_BASE[i][j]
            if w and x != 0 and y != 0:
                out = out + x * y * w
    return out


H = RingClass((0, 1, 0, 0))
L_CLASS = RingClass((-1, 0, Fraction(1, 4), 0))
P_CLASS = RingClass((0, -3, 0, Fraction(1, 4)))

MU_SIGMA = RingClass((0, Fraction(1, 2), 0, 0))
MU_X = RingClass((-2, 0, Fraction(1, 4), 0))


def basis_convert(z: RingClass, to: str) -> tuple:
    """Coordinates of ``z`` in another basis.

    ``to`` is ``"power"`` (h^i), ``"geometric"`` (1, h, l, p) or ``"sigma"``
    (powers of mu(Sigma) = h/2).
    """
    c0, c1, c2, c3 = z.coords
    if to == "power":
        return z.coords
    if to == "geometric":
        # h^2 = 4l + 4, h^3 = 4p + 12h
        return (c0 + 4 * c2, c1 + 12 * c3, 4 * c2, 4 * c3)
    if to == "sigma":
        return (c0, 2 * c1, 4 * c2, 8 * c3)
    raise ValueError(f"unknown basis {to!r}")


def from_basis(coords: Sequence, basis: str) -> RingClass:
    """Inverse of :func:`basis_convert`."""
    g0, g1, g2, g3 = (_num(c) for c in coords)
    if basis == "power":
        return RingClass(coords)
    if basis == "geometric":
        return RingClass((g0 - g2, g1 - 3 * g3, g2 / 4, g3 / 4))
    if basis == "sigma":
        return RingClass((g0, g1 / 2, g2 / 4, g3 / 8))
    raise ValueError(f"unknown basis {basis!r}")


def mu_class(a: int, b: int, mu_x: RingClass | None = None) -> RingClass:
    """``mu(Sigma)^a * mu(x)^b``."""
    if a < 0 or b < 0:
        raise ValueError("powers must be non-negative")
    return MU_SIGMA ** a * (MU_X if mu_x is None else mu_x) ** b


def exp_mu_sigma(s: str = "s") -> RingClass:
    """Closed form of ``exp(s * mu(Sigma))`` with ExpElement coordinates."""
    sv = var(s)
    return RingClass((
        ExpElement.coerce(1),
        sv / 2,
        (cosh(2 * sv) - 1) / 16,
        (sinh(2 * sv) - 2 * sv) / 64,
    ))


def mult_matrix(z: RingClass) -> ExpMatrix:
    """Entry ``(i, j)`` is the ``h^j`` coordinate of ``z * h^i``."""
    return ExpMatrix([(z * RingClass.h_power(i)).coords for i in range(4)])


def dual_coords(z: RingClass) -> tuple:
    """``(<z, h^0>, ..., <z, h^3>)``, the components paired through DUAL_PAIRING."""
    return tuple(qpair(z, RingClass.h_power(m)) for m in range(4))


def from_dual(phi: Sequence) -> RingClass:
    return RingClass(DUAL_PAIRING @ phi)
