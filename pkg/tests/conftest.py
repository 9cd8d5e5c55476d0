from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from dglue.exppoly import ExpElement, GaussRat, exp, var
from dglue.manifest import load_builtin

settings.register_profile("exact", max_examples=100, deadline=None)
settings.load_profile("exact")

small_fracs = st.builds(Fraction, st.integers(-12, 12), st.integers(1, 6))
gauss = st.builds(GaussRat, small_fracs, small_fracs)

VARS = ("s", "t")


@st.composite
def exp_terms(draw, vars=VARS, quadratic=True):
    """A single term c * s^a t^b * exp(linear + optional cross term)."""
    c = draw(gauss)
    mono = ExpElement.coerce(1)
    for v in vars:
        mono = mono * var(v) ** draw(st.integers(0, 2))
    lin = sum((var(v) * draw(st.integers(-3, 3)) for v in vars), ExpElement.coerce(0))
    if quadratic and len(vars) > 1:
        lin = lin + var(vars[0]) * var(vars[1]) * draw(st.integers(-1, 1))
    lin = lin - lin.at_zero(*vars)  # drop any constant
    return mono * c * (exp(lin) if not lin.is_zero() else ExpElement.coerce(1))


@st.composite
def exp_elements(draw, vars=VARS, quadratic=True, max_terms=4):
    terms = draw(st.lists(exp_terms(vars, quadratic), max_size=max_terms))
    return sum(terms, ExpElement.coerce(0))


@pytest.fixture(scope="session")
def k3():
    return load_builtin("k3_blowup2")


@pytest.fixture(scope="session")
def k3_twisted():
    return load_builtin("k3_blowup2_twisted")


@pytest.fixture(scope="session")
def torus_handle():
    return load_builtin("k3_torus_handle")


def to_sympy(e: ExpElement):
    """Independent rendering of an ExpElement as a sympy expression."""
    import sympy

    def num(c: GaussRat):
        return sympy.Rational(c.re.numerator, c.re.denominator) + sympy.I * sympy.Rational(
            c.im.numerator, c.im.denominator)

    def mono(m):
        out = sympy.Integer(1)
        for v, p in m:
            out *= sympy.Symbol(v) ** p
        return out

    total = sympy.Integer(0)
    for c, m, expo in e:
        total += num(c) * mono(m) * sympy.exp(sum((num(q) * mono(qm) for qm, q in expo), sympy.Integer(0)))
    return total


@st.composite
def hyperbolic_series(draw, max_rank_extra=3, max_classes=4):
    """Random valid simple-type data on H + <-1>^r with Sigma = T and w = F (+ E1).

    Classes come in pairs +-K as for genuine Donaldson series.
    Characteristic classes here are 2a T + 2b F + (odd) E_i; genus 2 forces
    b in {-1, 0, 1}.
    """
    from dglue.kmseries import Lattice, ManifoldDescriptor, StructureSeries

    r = draw(st.integers(1, max_rank_extra))
    n = r + 2
    form = [[0] * n for _ in range(n)]
    form[0][1] = form[1][0] = 1
    for i in range(2, n):
        form[i][i] = -1
    w = [0, 1] + [0] * r
    if draw(st.booleans()):
        w[2] = 1
    m = ManifoldDescriptor(
        lattice=Lattice(form), sigma=(1, 0) + (0,) * r, w=tuple(w), dbar=(0, 1) + (0,) * r,
        b_plus=3, euler=24 + r, signature=-16 - r, genus=2, name="random",
    )
    odd = st.sampled_from([-3, -1, 1, 3])
    k_vec = st.builds(lambda a, b, cs: (2 * a, 2 * b) + tuple(cs),
                      st.integers(-1, 1), st.integers(-1, 1), st.lists(odd, min_size=r, max_size=r))
    drawn = draw(st.lists(st.tuples(k_vec, gauss.filter(bool)), max_size=max_classes,
                          unique_by=lambda p: p[0]))
    # a_{-K} = (-1)^{d0} a_K, so the series has a single degree parity
    sign = -1 if int(m.d0) % 2 else 1
    classes = {}
    for k, a in drawn:
        if tuple(-x for x in k) not in classes:
            classes[k] = a
            classes[tuple(-x for x in k)] = a * sign
    return StructureSeries(m, list(classes.items()))


# -- acceptance report ----------------------------------------------------------

ACCEPTANCE: dict[int, tuple[str, bool]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok = ACCEPTANCE[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {title}")
