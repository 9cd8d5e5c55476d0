from dataclasses import replace
from fractions import Fraction
from math import factorial

import pytest
import sympy
from hypothesis import given, settings

from conftest import hyperbolic_series, to_sympy
from dglue.errors import BadTopology, GenusMismatch, NonIntegralSign
from dglue.exppoly import ZERO, ExpElement, GaussRat, exp, parse, sinh, var
from dglue.kmseries import (
    Lattice, ManifoldDescriptor, StructureSeries, change_w, dd_eval, dw_eval, dw_power, dx_eval,
    dx_from_dd, dx_power, generic_alpha, recover_series, simple_type_shape, topology_compose,
    validate, witten_coefficient, witten_scale,
)

t = var("t")


def test_k3_valid(k3):
    m, s = k3
    assert validate(m, s) == []
    assert m.d0 == -5


def test_k3_reduced_three_dim_lattice_valid():
    m = ManifoldDescriptor(Lattice([[2, 0, 0], [0, -1, 0], [0, 0, -1]]), sigma=(1, -1, -1), w=(0, 1, 0),
                           b_plus=3, euler=26, signature=-18, genus=2)
    s = StructureSeries(m, [((0, 1, 1), 1), ((0, 1, -1), 1), ((0, -1, 1), -1), ((0, -1, -1), -1)])
    assert validate(m, s) == []


def test_sigma_not_square_zero(k3):
    m, s = k3
    bad = replace(m, sigma=(1, 0, 0, 0))
    assert any("sigma self-intersection" in v for v in validate(bad))


def test_adjunction_violation(k3):
    m, _ = k3
    # K.Sigma = 3 (also fails characteristic, which is reported separately)
    s = StructureSeries(m, [((0, 0, 1, 2), 1)])
    assert m.dot((0, 0, 1, 2), m.sigma) == 3
    assert any("adjunction/parity" in v for v in validate(m, s))


def test_other_violations(k3):
    m, _ = k3
    assert any("w.sigma parity" in v for v in validate(replace(m, w=(0, 0, 1, 1))))
    assert any("suitable" in v for v in validate(replace(m, b_plus=2)))
    assert any("b1" in v for v in validate(replace(m, b1=2)))
    assert any("characteristic" in v for v in validate(m, StructureSeries(m, [((0, 0, 2, 0), 1)])))
    assert any("vector length" in v for v in validate(replace(m, w=(0, 1))))
    asym = replace(m, lattice=Lattice([[0, 1], [2, 0]]), sigma=(1, 0), w=(0, 1), dbar=None)
    assert any("symmetric" in v for v in validate(asym))


def test_dd_eval_examples(k3):
    m, s = k3
    assert dd_eval(s, {"t": m.sigma}) == sinh(2 * t) / 2
    assert dd_eval(StructureSeries(m, []), {"t": m.sigma}) == ZERO
    single = StructureSeries(m, [((0, 0, 1, 1), Fraction(3, 5))])
    alpha = {"t": (0, 1, 1, -1)}  # K.alpha = -1 + 1 = 0, Q = -2 ... pick a class with Q = 2t^2
    alpha = {"t": (1, 0, 0, 0)}
    assert m.lattice.square(alpha["t"]) == 2 and m.dot((0, 0, 1, 1), alpha["t"]) == 0
    assert dd_eval(single, alpha) == exp(t * t) * Fraction(3, 5)


def test_dx_examples(k3):
    m, s = k3
    assert dx_eval(s, {"s": m.sigma}) == parse("(1/4)*exp(2*s) - (1/4)*exp(-2*s)")
    assert dx_from_dd(s)({"s": m.sigma}) == dx_eval(s, {"s": m.sigma})
    assert dx_power(s, m.sigma, 1) == 1
    single = StructureSeries(m, [((0, 0, 1, 1), 1)])
    alpha = {"u": (1, 2, 0, -1)}
    assert dx_eval(single, alpha) == dd_eval(single, alpha)


def test_k3_powers_and_point_class(k3):
    m, s = k3
    assert dw_power(s, m.sigma, 3) == 4
    assert dw_power(s, m.sigma, 7) == 64
    assert dw_power(s, m.sigma, 11) == 1024
    assert dx_power(s, m.sigma, 1, points=1) == 2


def test_dw_eval_point_class(k3):
    m, s = k3
    # D^w(x Sigma^n) is nonzero only in the other residue class mod 4
    e = dw_eval(s, {"u": m.sigma}, point=True)
    assert e.taylor_coeff("u", 3).is_zero()


def _dw_oracle(series, alpha_vec, n):
    """D^w(alpha^n) from the sympy series of DD^w(t alpha), keeping degrees n = d0 (mod 4)."""
    m = series.owner
    if (n - int(m.d0)) % 4:
        return 0
    sym = sympy.Symbol("u")
    expr = to_sympy(dd_eval(series, {"u": alpha_vec}))
    return sympy.series(expr, sym, 0, n + 1).removeO().coeff(sym, n) * sympy.factorial(n)


@settings(max_examples=30)
@given(hyperbolic_series(max_rank_extra=2, max_classes=2))
def test_dx_matches_degree_oracle(series):
    m = series.owner
    other = change_w(series, tuple(a + b for a, b in zip(m.w, m.sigma)))
    alpha = tuple([1, 1] + [1] * (m.lattice.rank - 2))
    dx = dx_eval(series, {"u": alpha})
    for n in range(6):
        want = _dw_oracle(series, alpha, n) + _dw_oracle(other, alpha, n)
        got = dx.taylor_coeff("u", n).constant_value() * factorial(n)
        assert sympy.nsimplify(want) == sympy.Rational(str(got.re)) + sympy.I * sympy.Rational(str(got.im))


def test_change_w_examples(k3):
    m, s = k3
    assert change_w(s, m.w).classes == s.classes
    moved = change_w(s, (0, 0, 0, 1))
    e1, e2 = var("e1"), var("e2")
    # the new series is e^{Q/2} cosh E1 sinh E2; on alpha = e1*E1 + e2*E2 one has
    # E_i.alpha = -e_i, so after removing e^{Q/2} it reads cosh(-e1) sinh(-e2)
    got = dd_eval(moved, {"e1": (0, 0, 1, 0), "e2": (0, 0, 0, 1)}) * exp((e1 * e1 + e2 * e2) / 2)
    assert got == -parse("cosh(e1)*sinh(e2)")
    assert dict(moved.classes) == {
        (0, 0, 1, 1): Fraction(1, 4), (0, 0, 1, -1): Fraction(-1, 4),
        (0, 0, -1, 1): Fraction(1, 4), (0, 0, -1, -1): Fraction(-1, 4)}


def test_change_w_by_sigma(k3):
    m, _ = k3
    w_new = tuple(a + b for a, b in zip(m.w, m.sigma))
    two = StructureSeries(m, [((0, 0, 1, 1), 1)])    # K.Sigma = 2
    zero = StructureSeries(m, [((0, 0, 1, -1), 1)])  # K.Sigma = 0
    assert change_w(two, w_new).classes[0][1] == 1
    assert change_w(zero, w_new).classes[0][1] == -1


def test_change_w_rejects_even(k3):
    m, s = k3
    with pytest.raises(NonIntegralSign):
        change_w(s, (0, 0, 1, 1))


@given(hyperbolic_series())
def test_change_w_involution(series):
    m = series.owner
    w_new = tuple(a + 2 * b + c for a, b, c in zip(m.w, m.sigma, (0, 0) + (1,) * (m.lattice.rank - 2)))
    if m.dot(w_new, m.sigma) % 2 == 0:
        w_new = tuple(a + b for a, b in zip(m.w, m.sigma))
    back = change_w(change_w(series, w_new), m.w)
    assert back.classes == series.classes


@given(hyperbolic_series())
def test_recover_roundtrip(series):
    m = series.owner
    dx = dx_eval(series, generic_alpha(m.lattice))
    dd_w, dd_ws = recover_series(dx, m)
    assert dd_w.classes == series.merged().classes
    assert dd_ws.classes == change_w(series, tuple(a + b for a, b in zip(m.w, m.sigma))).merged().classes


@given(hyperbolic_series())
def test_dd_eval_linear(series):
    m = series.owner
    alpha = {"u": tuple(range(1, m.lattice.rank + 1))}
    doubled = StructureSeries(m, [(k, a * 2) for k, a in series.classes])
    assert dd_eval(doubled, alpha) == dd_eval(series, alpha) * 2
    halves = [StructureSeries(m, series.classes[:1]), StructureSeries(m, series.classes[1:])]
    assert dd_eval(series, alpha) == dd_eval(halves[0], alpha) + dd_eval(halves[1], alpha)


@given(hyperbolic_series())
def test_adjunction_frequencies(series):
    m = series.owner
    e = dd_eval(series, {"t": m.sigma})
    for (k, f), _ in e.components("t").items():
        assert k == 0
        freq = f.constant_value() if not f.is_zero() else GaussRat(0)
        assert freq.im == 0 and freq.re in (-2, 0, 2)


def test_witten_coefficient_examples(k3):
    m, _ = k3
    k = (0, 0, -1, 1)  # K.w + w^2 = 1 - 1 = 0
    assert witten_coefficient(m, k, 1) == GaussRat(Fraction(1, 4))
    assert witten_coefficient(m, k, 0) == 0
    assert witten_scale(26, -18) == Fraction(1, 4)
    with pytest.raises(BadTopology):
        witten_scale(1, 0)


def test_witten_shift_is_five_powers(k3):
    m, _ = k3
    top = topology_compose(m, m)
    assert witten_scale(top.euler, top.signature) == 32 * witten_scale(26, -18) ** 2


def test_topology_compose(k3):
    m, _ = k3
    top = topology_compose(m, m, 2)
    assert (top.euler, top.signature, top.b_plus) == (56, -36, 9)
    assert top.d0_parity == ((-5) + (-5) + 1) % 2
    with pytest.raises(GenusMismatch):
        topology_compose(m, replace(m, genus=3), 2)


def test_simple_type_shape():
    assert not simple_type_shape(parse("(sinh(2*s) - 2*s)/16"), "s")
    assert simple_type_shape(parse("2*exp(2*s) - 2*exp(-2*s)"), "s")
    assert simple_type_shape(ZERO, "s")
    assert simple_type_shape(ExpElement.coerce(3), "s")
