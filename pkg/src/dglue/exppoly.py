"""Exact exponential polynomials over the Gaussian rationals.

An :class:`ExpElement` is a finite sum

    c * m(x_1, ..., x_n) * exp(q(x_1, ..., x_n))

with ``c`` a :class:`GaussRat`, ``m`` a monomial and ``q`` a quadratic form plus
linear form (no constant term).  This is the smallest class closed under
products that contains ``exp(Q(a)/2 + K.a)`` for a formal linear combination
``a`` of lattice vectors, so every series in the package lives here.

Nothing is ever rounded; equality is equality of normal forms.

Text grammar (rendering and parsing agree)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' INT)?
    atom   := INT | NAME | 'i' | 'exp(' expr ')' | 'cosh(' expr ')'
            | 'sinh(' expr ')' | '(' expr ')'

``i`` is the imaginary unit and cannot be used as a variable name.  Division is
only allowed by nonzero constants.  Example: ``(1/32)*exp(2*s) - (1/8)*s``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import factorial
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import ParseError, QuadraticInVar, Singular

Number = Union[int, Fraction, "GaussRat"]


class GaussRat:
    """Exact element of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re: int | Fraction | str = 0, im: int | Fraction | str = 0):
        if isinstance(re, float) or isinstance(im, float):
            raise TypeError("floats are not exact; pass int, Fraction or str")
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussRat is immutable")

    @classmethod
    def coerce(cls, x) -> "GaussRat":
        if isinstance(x, GaussRat):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        if isinstance(x, str):
            return cls.parse(x)
        if isinstance(x, complex):
            raise TypeError("complex floats are not exact")
        raise TypeError(f"cannot coerce {type(x).__name__} to GaussRat")

    @classmethod
    def parse(cls, text: str) -> "GaussRat":
        """Parse ``"p/q"``, ``"p/q+r/s i"``, ``"3/4i"``, ``"-i"`` and similar."""
        t = text.replace(" ", "").replace("*", "")
        try:
            if not t.endswith("i"):
                return cls(Fraction(t))
            body = t[:-1]
            cut = max(body.rfind("+"), body.rfind("-"))
            if cut > 0:
                re_txt, im_txt = body[:cut], body[cut:]
            else:
                re_txt, im_txt = "0", body
            if im_txt in ("", "+", "-"):
                im_txt += "1"
            return cls(Fraction(re_txt), Fraction(im_txt))
        except (ValueError, ZeroDivisionError) as err:
            raise ParseError(f"bad Gaussian rational {text!r}") from err

    @staticmethod
    def i_pow(n: int) -> "GaussRat":
        return _I_POWERS[n % 4]

    def conjugate(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    def is_real(self) -> bool:
        return self.im == 0

    def __add__(self, other):
        try:
            o = GaussRat.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussRat(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __sub__(self, other):
        try:
            o = GaussRat.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussRat(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = GaussRat.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussRat(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = GaussRat.coerce(other)
        except TypeError:
            return NotImplemented
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("GaussRat division by zero")
        return self * GaussRat(o.re / n, -o.im / n)

    def __rtruediv__(self, other):
        return GaussRat.coerce(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return GaussRat(1) / (self ** (-n))
        out, base = GaussRat(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        try:
            o = GaussRat.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def sort_key(self):
        return (self.re, self.im)

    def is_negative_lead(self) -> bool:
        """True when the first nonzero part (real, then imaginary) is negative."""
        if self.re != 0:
            return self.re < 0
        return self.im < 0

    def __repr__(self):
        return f"GaussRat({self})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        im = "i" if self.im == 1 else "-i" if self.im == -1 else f"{self.im}*i"
        if self.re == 0:
            return im
        sign = "-" if self.im < 0 else "+"
        mag = "i" if abs(self.im) == 1 else f"{abs(self.im)}*i"
        return f"{self.re} {sign} {mag}"


_I_POWERS = (GaussRat(1), GaussRat(0, 1), GaussRat(-1), GaussRat(0, -1))
I = GaussRat(0, 1)

Mono = tuple  # tuple[tuple[str, int], ...], sorted by variable name
Expo = tuple  # tuple[tuple[Mono, GaussRat], ...], monomials of degree 1 or 2
_ONE: Mono = ()


def _mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, p in b:
        d[v] = d.get(v, 0) + p
    return tuple(sorted(d.items()))


def _mono_deg(m: Mono) -> int:
    return sum(p for _, p in m)


def _mono_power(m: Mono, var: str) -> int:
    for v, p in m:
        if v == var:
            return p
    return 0


def _mono_drop(m: Mono, var: str, k: int = 1) -> Mono:
    out = []
    for v, p in m:
        if v == var:
            if p > k:
                out.append((v, p - k))
        else:
            out.append((v, p))
    return tuple(out)


def _expo_add(a: Expo, b: Expo) -> Expo:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for m, c in b:
        s = d.get(m)
        s = c if s is None else s + c
        if s:
            d[m] = s
        else:
            d.pop(m, None)
    return tuple(sorted(d.items(), key=lambda kv: kv[0]))


def _expo_key(e: Expo):
    return tuple((m, -c.re, -c.im) for m, c in e)


def _term_key(key):
    mono, expo = key
    return (not expo, _expo_key(expo), -_mono_deg(mono), mono)


class ExpElement:
    """Immutable exponential polynomial in normal form.

    Build values with :func:`var`, :func:`const`, :func:`exp` and ordinary
    arithmetic, or with :func:`parse`.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping | None = None):
        clean = {}
        if terms:
            for key, c in terms.items():
                c = GaussRat.coerce(c)
                if c:
                    clean[key] = c
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _raw(cls, terms: dict) -> "ExpElement":
        obj = cls.__new__(cls)
        object.__setattr__(obj, "_terms", {k: c for k, c in terms.items() if c})
        object.__setattr__(obj, "_hash", None)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("ExpElement is immutable")

    @classmethod
    def coerce(cls, x) -> "ExpElement":
        if isinstance(x, ExpElement):
            return x
        return cls._raw({(_ONE, ()): GaussRat.coerce(x)})

    # -- inspection -------------------------------------------------------
    def terms(self) -> list[tuple[GaussRat, Mono, Expo]]:
        """Terms as ``(coeff, mono, expo)`` in canonical order."""
        return [(self._terms[k], k[0], k[1]) for k in sorted(self._terms, key=_term_key)]

    def __iter__(self) -> Iterator[tuple[GaussRat, Mono, Expo]]:
        return iter(self.terms())

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(k == (_ONE, ()) for k in self._terms)

    def constant_value(self) -> GaussRat:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self._terms.get((_ONE, ()), GaussRat(0))

    def is_polynomial(self) -> bool:
        return all(not expo for _, expo in self._terms)

    def variables(self) -> set[str]:
        out = set()
        for mono, expo in self._terms:
            out.update(v for v, _ in mono)
            for m, _ in expo:
                out.update(v for v, _ in m)
        return out

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        try:
            o = ExpElement.coerce(other)
        except TypeError:
            return NotImplemented
        d = dict(self._terms)
        for k, c in o._terms.items():
            s = d.get(k)
            d[k] = c if s is None else s + c
        return ExpElement._raw(d)

    __radd__ = __add__

    def __neg__(self):
        return ExpElement._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        try:
            o = ExpElement.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussRat)):
            c0 = GaussRat.coerce(other)
            return ExpElement._raw({k: c * c0 for k, c in self._terms.items()})
        try:
            o = ExpElement.coerce(other)
        except TypeError:
            return NotImplemented
        d: dict = {}
        for (m1, e1), c1 in self._terms.items():
            for (m2, e2), c2 in o._terms.items():
                k = (_mono_mul(m1, m2), _expo_add(e1, e2))
                s = d.get(k)
                d[k] = c1 * c2 if s is None else s + c1 * c2
        return ExpElement._raw(d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ExpElement):
            other = other.constant_value()
        c0 = GaussRat.coerce(other)
        if not c0:
            raise ZeroDivisionError("division of ExpElement by zero")
        inv = GaussRat(1) / c0
        return ExpElement._raw({k: c * inv for k, c in self._terms.items()})

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("ExpElement powers must be non-negative integers")
        out, base = ONE, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        try:
            o = ExpElement.coerce(other)
        except TypeError:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(frozenset(self._terms.items())))
        return self._hash

    # -- calculus ---------------------------------------------------------
    def derive(self, var: str) -> "ExpElement":
        """Partial derivative with respect to ``var`` (product and chain rule)."""
        d: dict = {}

        def put(k, c):
            s = d.get(k)
            d[k] = c if s is None else s + c

        for (mono, expo), c in self._terms.items():
            p = _mono_power(mono, var)
            if p:
                put((_mono_drop(mono, var), expo), c * p)
            for qm, qc in expo:
                k = _mono_power(qm, var)
                if k:
                    put((_mono_mul(mono, _mono_drop(qm, var)), expo), c * qc * k)
        return ExpElement._raw(d)

    def subs(self, var: str, value) -> "ExpElement":
        """Substitute a polynomial ``value`` for ``var``.

        Raises ``ValueError`` when the substituted exponent stops being a
        quadratic form plus linear form (e.g. gains a constant term).
        """
        value = ExpElement.coerce(value)
        if not value.is_polynomial():
            raise ValueError("can only substitute polynomials")
        out = ZERO
        cache = {0: ONE}

        def vpow(n):
            if n not in cache:
                cache[n] = vpow(n - 1) * value
            return cache[n]

        for (mono, expo), c in self._terms.items():
            p = _mono_power(mono, var)
            rest = ExpElement._raw({(_mono_drop(mono, var, p), ()): c})
            new_expo = ZERO
            touched = False
            for qm, qc in expo:
                k = _mono_power(qm, var)
                if k:
                    touched = True
                    new_expo = new_expo + ExpElement._raw({(_mono_drop(qm, var, k), ()): qc}) * vpow(k)
                else:
                    new_expo = new_expo + ExpElement._raw({(qm, ()): qc})
            if touched:
                factor = exp(new_expo)
            else:
                factor = ExpElement._raw({(_ONE, expo): GaussRat(1)})
            out = out + rest * vpow(p) * factor
        return out

    def at_zero(self, *vars: str) -> "ExpElement":
        out = self
        for v in vars:
            out = out.subs(v, 0)
        return out

    def taylor_coeff(self, var: str, n: int) -> "ExpElement":
        """Coefficient of ``var**n`` in the expansion around ``var = 0``."""
        f = self
        for _ in range(n):
            f = f.derive(var)
        return f.at_zero(var) / factorial(n)

    def _split(self, var: str):
        """Yield ``(power, freq_key, rest_key, coeff)`` for every term."""
        for (mono, expo), c in self._terms.items():
            lin = {}
            rest_expo = []
            for qm, qc in expo:
                k = _mono_power(qm, var)
                if k >= 2:
                    raise QuadraticInVar(f"{var}^2 occurs in an exponent of {self}")
                if k == 1:
                    lin[_mono_drop(qm, var)] = qc
                else:
                    rest_expo.append((qm, qc))
            freq = tuple(sorted(lin.items()))
            p = _mono_power(mono, var)
            yield p, freq, (_mono_drop(mono, var, p), tuple(rest_expo)), c

    def components(self, var: str) -> dict:
        """Group terms by ``(k, freq)`` where the term is ``var^k exp(freq*var) * rest``.

        Keys are ``(k, freq)`` with ``freq`` an :class:`ExpElement` polynomial of
        degree at most one in the remaining variables; values are the ``rest``
        parts.  ``sum(basis(var, k, f) * v)`` over the result reconstructs self.
        """
        groups: dict = {}
        for p, freq, rest, c in self._split(var):
            g = groups.setdefault((p, freq), {})
            g[rest] = g.get(rest, GaussRat(0)) + c
        return {
            (p, ExpElement._raw({(m, ()): c for m, c in freq})): ExpElement._raw(g)
            for (p, freq), g in groups.items()
        }

    def extract(self, var: str, k: int, freq=0) -> "ExpElement":
        """Coefficient of ``var**k * exp(freq * var)``.

        ``freq`` is a number or a polynomial of degree at most one in the other
        variables, e.g. ``2 + t`` selects ``exp(2*s) * exp(t*s)``.
        """
        fkey = _freq_key(ExpElement.coerce(freq), var)
        acc: dict = {}
        for p, f, rest, c in self._split(var):
            if p == k and f == fkey:
                acc[rest] = acc.get(rest, GaussRat(0)) + c
        return ExpElement._raw(acc)

    def max_power(self, var: str) -> int:
        return max((_mono_power(m, var) for m, _ in self._terms), default=0)

    # -- text ---------------------------------------------------------------
    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"ExpElement({render(self)!r})"


def _freq_key(freq: ExpElement, var: str):
    if not freq.is_polynomial():
        raise ValueError("frequency must be a polynomial")
    items = []
    for c, mono, _ in freq.terms():
        if _mono_deg(mono) > 1 or _mono_power(mono, var):
            raise ValueError("frequency must be linear in the other variables")
        items.append((mono, c))
    return tuple(sorted(items))


ZERO = ExpElement._raw({})
ONE = ExpElement._raw({(_ONE, ()): GaussRat(1)})


def const(c: Number) -> ExpElement:
    return ExpElement.coerce(c)


def var(name: str) -> ExpElement:
    if name in ("i", "exp", "cosh", "sinh"):
        raise ValueError(f"{name!r} is reserved")
    return ExpElement._raw({(((name, 1),), ()): GaussRat(1)})


def exp(p) -> ExpElement:
    """``exp(p)`` for a polynomial ``p`` of degree <= 2 with zero constant term."""
    p = ExpElement.coerce(p)
    if not p.is_polynomial():
        raise ValueError("exponent must be a polynomial")
    items = []
    for c, mono, _ in p.terms():
        deg = _mono_deg(mono)
        if deg == 0:
            raise ValueError(f"exponent {p} has a nonzero constant term")
        if deg > 2:
            raise ValueError(f"exponent {p} is not quadratic")
        items.append((mono, c))
    return ExpElement._raw({(_ONE, tuple(sorted(items, key=lambda kv: kv[0]))): GaussRat(1)})


def cosh(p) -> ExpElement:
    return (exp(p) + exp(-ExpElement.coerce(p))) / 2


def sinh(p) -> ExpElement:
    return (exp(p) - exp(-ExpElement.coerce(p))) / 2


def basis_function(v: str, k: int, freq) -> ExpElement:
    """``v**k * exp(freq * v)``, the inverse of :meth:`ExpElement.components`."""
    return var(v) ** k * exp(ExpElement.coerce(freq) * var(v))


# -- rendering ---------------------------------------------------------------

def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _coeff_str(c: GaussRat) -> str:
    """Render a coefficient known to be non-negative-led."""
    if c.im == 0:
        s = _frac_str(c.re)
        return s if c.re.denominator == 1 else f"({s})"
    if c.re == 0:
        if c.im == 1:
            return "i"
        return f"({_frac_str(c.im)}*i)" if c.im.denominator != 1 else f"{c.im.numerator}*i"
    sign = "-" if c.im < 0 else "+"
    mag = "i" if abs(c.im) == 1 else f"{_frac_str(abs(c.im))}*i"
    return f"({_frac_str(c.re)} {sign} {mag})"


def _mono_str(m: Mono) -> str:
    return "*".join(v if p == 1 else f"{v}^{p}" for v, p in m)


def render(e: ExpElement) -> str:
    """Canonical text for ``e``; :func:`parse` inverts it."""
    terms = e.terms()
    if not terms:
        return "0"
    pieces = []
    for idx, (c, mono, expo) in enumerate(terms):
        neg = c.is_negative_lead()
        if neg:
            c = -c
        factors = []
        if c != 1:
            factors.append(_coeff_str(c))
        if mono:
            factors.append(_mono_str(mono))
        if expo:
            inner = ExpElement._raw({(m, ()): q for m, q in expo})
            factors.append(f"exp({render(inner)})")
        body = "*".join(factors) if factors else "1"
        if idx == 0:
            pieces.append(("-" if neg else "") + body)
        else:
            pieces.append((" - " if neg else " + ") + body)
    return "".join(pieces)


# -- parsing -----------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str) -> list[str]:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character at {pos} in {text!r}")
        tok = m.group(1) or m.group(2) or m.group(3)
        out.append("^" if tok == "**" else tok)
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.text = text

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise ParseError(f"expected {expected or 'token'} in {self.text!r}, got {tok!r}")
        self.i += 1
        return tok

    def parse(self) -> ExpElement:
        out = self.expr()
        if self.peek() is not None:
            raise ParseError(f"trailing input {self.peek()!r} in {self.text!r}")
        return out

    def expr(self):
        out = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self):
        out = self.unary()
        while self.peek() in ("*", "/"):
            op = self.take()
            rhs = self.unary()
            if op == "*":
                out = out * rhs
            else:
                if not rhs.is_constant() or rhs.is_zero():
                    raise ParseError("division only by nonzero constants")
                out = out / rhs.constant_value()
        return out

    def unary(self):
        if self.peek() == "-":
            self.take()
            return -self.unary()
        if self.peek() == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.take()
            tok = self.take()
            if not tok.isdigit():
                raise ParseError("exponents must be non-negative integers")
            base = base ** int(tok)
        return base

    def atom(self):
        tok = self.take()
        if tok.isdigit():
            return const(int(tok))
        if tok == "(":
            inner = self.expr()
            self.take(")")
            return inner
        if tok == "i":
            return const(I)
        if tok in ("exp", "cosh", "sinh"):
            self.take("(")
            arg = self.expr()
            self.take(")")
            fn = {"exp": exp, "cosh": cosh, "sinh": sinh}[tok]
            try:
                return fn(arg)
            except ValueError as err:
                raise ParseError(str(err)) from err
        if tok[0].isalpha() or tok[0] == "_":
            return var(tok)
        raise ParseError(f"unexpected token {tok!r} in {self.text!r}")


def parse(text: str) -> ExpElement:
    """Parse the grammar documented at module level."""
    return _Parser(text).parse()


# -- matrices ----------------------------------------------------------------

class ExpMatrix:
    """Rectangular matrix with :class:`ExpElement` entries."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable]):
        rows = tuple(tuple(ExpElement.coerce(x) for x in r) for r in rows)
        if not rows or not rows[0]:
            raise ValueError("matrix must be non-empty")
        if any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("matrix rows have different lengths")
        object.__setattr__(self, "rows", rows)

    def __setattr__(self, name, value):
        raise AttributeError("ExpMatrix is immutable")

    @classmethod
    def identity(cls, n: int) -> "ExpMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, n: int, m: int | None = None) -> "ExpMatrix":
        return cls([[0] * (n if m is None else m) for _ in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def row(self, i: int) -> tuple:
        return self.rows[i]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def transpose(self) -> "ExpMatrix":
        return ExpMatrix(zip(*self.rows))

    T = property(transpose)

    def map(self, fn) -> "ExpMatrix":
        return ExpMatrix([[fn(x) for x in r] for r in self.rows])

    def subs(self, v: str, value) -> "ExpMatrix":
        return self.map(lambda x: x.subs(v, value))

    def __add__(self, other: "ExpMatrix"):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return ExpMatrix([[a + b for a, b in zip(r, q)] for r, q in zip(self.rows, other.rows)])

    def __sub__(self, other: "ExpMatrix"):
        return self + other * -1

    def __mul__(self, c):
        if isinstance(c, ExpMatrix):
            return self @ c
        return self.map(lambda x: x * c)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, ExpMatrix):
            n, k = self.shape
            k2, m = other.shape
            if k != k2:
                raise ValueError("shape mismatch")
            cols = [other.col(j) for j in range(m)]
            return ExpMatrix([[_dot(r, c) for c in cols] for r in self.rows])
        vec = [ExpElement.coerce(x) for x in other]
        if len(vec) != self.shape[1]:
            raise ValueError("shape mismatch")
        return tuple(_dot(r, vec) for r in self.rows)

    def __pow__(self, n: int) -> "ExpMatrix":
        out = ExpMatrix.identity(self.shape[0])
        for _ in range(n):
            out = out @ self
        return out

    def __rmatmul__(self, vec):
        vec = [ExpElement.coerce(x) for x in vec]
        if len(vec) != self.shape[0]:
            raise ValueError("shape mismatch")
        return tuple(_dot(vec, self.col(j)) for j in range(self.shape[1]))

    def __eq__(self, other):
        if not isinstance(other, ExpMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def is_constant(self) -> bool:
        return all(x.is_constant() for r in self.rows for x in r)

    def det(self) -> ExpElement:
        n, m = self.shape
        if n != m:
            raise ValueError("determinant of a non-square matrix")
        if self.is_constant():
            return const(_det_const([[x.constant_value() for x in r] for r in self.rows]))
        return _det_laplace([list(r) for r in self.rows])

    def inverse(self) -> "ExpMatrix":
        return mat_inv(self)

    def __str__(self):
        return "\n".join("[" + ", ".join(render(x) for x in r) + "]" for r in self.rows)

    def __repr__(self):
        return f"ExpMatrix({[[render(x) for x in r] for r in self.rows]!r})"


def _dot(a: Sequence[ExpElement], b: Sequence[ExpElement]) -> ExpElement:
    out = ZERO
    for x, y in zip(a, b):
        if not x.is_zero() and not y.is_zero():
            out = out + x * y
    return out


def _det_laplace(rows: list[list[ExpElement]]) -> ExpElement:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    out = ZERO
    for j, a in enumerate(rows[0]):
        if a.is_zero():
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = a * _det_laplace(minor)
        out = out + term if j % 2 == 0 else out - term
    return out


def _det_const(rows: list[list[GaussRat]]) -> GaussRat:
    a = [list(r) for r in rows]
    n = len(a)
    det = GaussRat(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            return GaussRat(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det = det * a[col][col]
        inv = GaussRat(1) / a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] * inv
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


def mat_inv(M: ExpMatrix) -> ExpMatrix:
    """Exact inverse of a square constant matrix by Gauss-Jordan elimination."""
    n, m = M.shape
    if n != m:
        raise ValueError("inverse of a non-square matrix")
    if not M.is_constant():
        raise ValueError("mat_inv needs constant entries")
    a = [[x.constant_value() for x in r] + [GaussRat(int(i == j)) for j in range(n)]
         for i, r in enumerate(M.rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise Singular("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        inv = GaussRat(1) / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return ExpMatrix([row[n:] for row in a])
