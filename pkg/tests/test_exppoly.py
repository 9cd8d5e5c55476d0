from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from conftest import exp_elements, gauss, small_fracs, to_sympy
from dglue.errors import ParseError, QuadraticInVar, Singular
from dglue.exppoly import (
    I, ONE, ZERO, ExpElement, ExpMatrix, GaussRat, basis_function, cosh, exp, mat_inv, parse,
    render, sinh, var,
)

s, t = var("s"), var("t")


# -- GaussRat ------------------------------------------------------------------

def test_gaussrat_canonical_form():
    z = GaussRat(Fraction(6, -4), Fraction(2, 8))
    assert z.re == Fraction(-3, 2) and z.re.denominator > 0
    assert z.im == Fraction(1, 4)


@pytest.mark.parametrize("text, re, im", [
    ("1/4", Fraction(1, 4), 0),
    ("-1/4", Fraction(-1, 4), 0),
    ("1/2+3/4 i", Fraction(1, 2), Fraction(3, 4)),
    ("3/4i", 0, Fraction(3, 4)),
    ("-i", 0, -1),
    ("2-i", 2, -1),
])
def test_gaussrat_parse(text, re, im):
    assert GaussRat.parse(text) == GaussRat(re, im)


def test_gaussrat_parse_rejects_garbage():
    with pytest.raises(ParseError):
        GaussRat.parse("one half")


@given(gauss, gauss, gauss)
def test_gaussrat_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    if b:
        assert (a / b) * b == a


@given(gauss)
def test_gaussrat_str_roundtrip(a):
    assert GaussRat.parse(str(a)) == a


def test_i_powers():
    assert [GaussRat.i_pow(n) for n in range(-2, 3)] == [GaussRat(-1), -I, GaussRat(1), I, GaussRat(-1)]
    assert I * I == GaussRat(-1)


# -- ExpElement: examples --------------------------------------------------------

def test_exponents_cancel():
    assert (s * exp(2 * s)) * exp(-2 * s) == s


def test_derive_cross_term():
    assert exp(t * s).derive("s") == t * exp(t * s)


def test_cosh_sinh_identity():
    assert cosh(2 * s) ** 2 - sinh(2 * s) ** 2 == ONE


def test_constant_exponent_rejected():
    with pytest.raises(ValueError):
        exp(s + 1)
    with pytest.raises(ValueError):
        exp(s ** 3)


def test_reserved_names():
    with pytest.raises(ValueError):
        var("exp")


CAP = parse("(1/32)*exp(2*s) - (1/32)*exp(-2*s) - (1/8)*s")


def test_extract_examples():
    assert CAP == (sinh(2 * s) - 2 * s) / 16
    assert CAP.extract("s", 1, 0) == ExpElement.coerce(Fraction(-1, 8))
    assert CAP.extract("s", 0, 2) == ExpElement.coerce(Fraction(1, 32))
    assert ZERO.extract("s", 0, 0) == ZERO


def test_extract_with_symbolic_frequency():
    e = exp(t * s + 2 * s) * 5 + exp(t * s) * 3
    assert e.extract("s", 0, t + 2) == ExpElement.coerce(5)
    assert e.extract("s", 0, t) == ExpElement.coerce(3)


def test_extract_quadratic_rejected():
    with pytest.raises(QuadraticInVar):
        exp(s * s).extract("s", 0, 0)


def test_render_grammar():
    assert render(CAP) == "(1/32)*exp(2*s) - (1/32)*exp(-2*s) - (1/8)*s"
    assert render(ZERO) == "0"
    assert render(parse("2*exp(s*t + 2*s)")) == "2*exp(s*t + 2*s)"


def test_parse_gaussian_coefficients():
    e = parse("i*exp(2*s) + (1/2)*t^2")
    assert e.extract("s", 0, 2) == ExpElement.coerce(I)
    assert parse("s**2") == s * s


def test_parse_errors():
    with pytest.raises(ParseError):
        parse("exp(")
    with pytest.raises(ParseError):
        parse("s $ t")


# -- ExpElement: properties ------------------------------------------------------

@given(exp_elements(), exp_elements(), exp_elements())
def test_ring_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a - a == ZERO
    assert a * ONE == a


@given(exp_elements(), exp_elements())
def test_derive_rules(a, b):
    assert (a + b).derive("s") == a.derive("s") + b.derive("s")
    assert (a * b).derive("s") == a.derive("s") * b + a * b.derive("s")


@given(exp_elements(max_terms=3))
def test_derive_matches_sympy(a):
    assert sympy.simplify(to_sympy(a.derive("s")) - sympy.diff(to_sympy(a), sympy.Symbol("s"))) == 0


@given(exp_elements())
def test_extraction_reconstructs(a):
    comps = a.components("s")
    rebuilt = sum((basis_function("s", k, f) * v for (k, f), v in comps.items()), ZERO)
    assert rebuilt == a
    for (k, f), v in comps.items():
        assert a.extract("s", k, f) == v


@given(exp_elements(), exp_elements(), gauss)
def test_extract_linear(a, b, c):
    for (k, f) in set(a.components("s")) | set(b.components("s")):
        assert (a * c + b).extract("s", k, f) == a.extract("s", k, f) * c + b.extract("s", k, f)


@given(exp_elements())
def test_render_parse_roundtrip(a):
    assert parse(render(a)) == a


@given(exp_elements(vars=("s",), quadratic=False, max_terms=3), st.integers(0, 5))
def test_taylor_coeff_matches_sympy(a, n):
    sym = sympy.Symbol("s")
    want = sympy.series(to_sympy(a), sym, 0, n + 1).removeO().coeff(sym, n)
    got = to_sympy(a.taylor_coeff("s", n))
    assert sympy.simplify(got - want) == 0


# -- matrices ------------------------------------------------------------------------

def test_mat_inv_pairing_example():
    m = ExpMatrix([[4 * x for x in r] for r in ((0, 0, 0, 1), (0, 0, 1, 0), (0, 1, 0, 16), (1, 0, 16, 0))])
    want = ExpMatrix([[0, -16, 0, 1], [-16, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]]) * Fraction(1, 4)
    assert mat_inv(m) == want


def test_mat_inv_identity_and_singular():
    assert mat_inv(ExpMatrix.identity(3)) == ExpMatrix.identity(3)
    with pytest.raises(Singular):
        mat_inv(ExpMatrix.zeros(2))


def test_mat_inv_rejects_symbolic():
    with pytest.raises((ValueError, TypeError)):
        mat_inv(ExpMatrix([[s, 0], [0, 1]]))


@given(st.integers(1, 4).flatmap(lambda n: st.lists(
    st.lists(small_fracs, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_mat_inv_roundtrip(rows):
    m = ExpMatrix(rows)
    oracle = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in rows])
    if oracle.det() == 0:
        with pytest.raises(Singular):
            mat_inv(m)
        return
    inv = mat_inv(m)
    n = len(rows)
    assert m @ inv == ExpMatrix.identity(n)
    assert inv @ m == ExpMatrix.identity(n)
    assert m.det().constant_value() == GaussRat(Fraction(int(oracle.det().p), int(oracle.det().q)))


def test_symbolic_det_matches_sympy():
    m = ExpMatrix([[exp(s), s, 1], [0, exp(-s), t], [t, 1, 2]])
    oracle = sympy.Matrix([[to_sympy(x) for x in r] for r in m.rows]).det()
    assert sympy.simplify(to_sympy(m.det()) - oracle) == 0
