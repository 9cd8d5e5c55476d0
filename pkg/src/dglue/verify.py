"""Conformance checks for the ring, the pairing matrices, caps, gluing and Witten data.

Each check is a zero-argument callable returning ``(ok, detail)``.  Checks are
grouped into sections; :func:`run` evaluates a selection and reports results.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .exppoly import ExpMatrix, parse, var
from .fibersum import (
    GlueInput, contraction_factor, glue_h2, glue_with_d, predict_coefficient, witten_shift,
)
from .floerpair import (
    a_matrix, a_matrix_by_extraction, a_determinant, b_matrix, cap_point, cap_unit,
    pair_relative, relative_from_closed, sigma_scale_from_series, u_matrix,
)
from .kmseries import dw_power, dx_power, simple_type_shape, witten_coefficient
from .manifest import load_builtin
from .qh2 import (
    DUAL_PAIRING, H, L_CLASS, MU_SIGMA, MU_X, P_CLASS, PAIRING, RingClass, basis_convert,
    exp_mu_sigma, qmul, qpair,
)

SECTIONS = ("ring", "matrices", "cap", "gluing", "witten")

M_PRIME = ((0, -16, 0, 1), (-16, 0, 1, 0), (0, 1, 0, 0), (1, 0, 0, 0))

PRINTED_B = [
    ["0", "-16", "0", "1"],
    ["-16", "-8*s", "1", "s/2"],
    ["0", "1", "sinh(2*s)/4", "(cosh(2*s) - 1)/16"],
    ["1", "s/2", "(cosh(2*s) - 1)/16", "(sinh(2*s) - 2*s)/64"],
]


@dataclass(frozen=True)
class Check:
    section: str
    name: str
    fn: Callable[[], tuple]


@dataclass(frozen=True)
class Result:
    section: str
    name: str
    ok: bool
    detail: str


def _basis():
    return [RingClass.h_power(i) for i in range(4)]


def _rand_frac(rng: random.Random, lo: int = -9, hi: int = 9) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(1, 6))


# -- ring -------------------------------------------------------------------------

def check_pairing_matrix():
    want = ExpMatrix([[4 * x for x in r] for r in ((0, 0, 0, 1), (0, 0, 1, 0), (0, 1, 0, 16), (1, 0, 16, 0))])
    got = ExpMatrix([[qpair(a, b) for b in _basis()] for a in _basis()])
    return got == want == PAIRING, "pairing on h^i equals 4M"


def check_dual_pairing():
    want = ExpMatrix(M_PRIME) * Fraction(1, 4)
    return DUAL_PAIRING == want, "inverse pairing equals M'/4"


def check_h_squared():
    return (basis_convert(H * H, "geometric") == (4, 0, 4, 0)
            and basis_convert(H ** 3, "geometric") == (0, 12, 0, 4)), "h*h = 4l + 4 and h^3 = 4p + 12h"


def check_generators():
    return (L_CLASS == (H * H - 4) / 4 and P_CLASS == (H ** 3 - 12 * H) / 4
            and qpair(P_CLASS, RingClass.unit()) == 1), "l and p in power coordinates"


def check_mu_x_square(mu_x: RingClass = MU_X):
    return mu_x * mu_x == RingClass.unit() * 4, f"mu(x)^2 = 4 for mu(x) = {mu_x}"


def check_frobenius():
    b = _basis()
    ok = all(qpair(qmul(x, y), z) == qpair(x, qmul(y, z)) for x in b for y in b for z in b)
    return ok, "<ab, c> = <a, bc> on 64 basis triples"


def check_exp_closed_form():
    e = exp_mu_sigma("s")
    want = [parse("1"), parse("s/2"), parse("(cosh(2*s) - 1)/16"), parse("(sinh(2*s) - 2*s)/64")]
    closed = all(x == y for x, y in zip(e, want))
    deriv = e.map(lambda c: c.derive("s")) == qmul(MU_SIGMA, e)
    return closed and deriv, "closed form and d/ds E = mu(Sigma) E"


def check_exp_series(order: int = 12):
    e = exp_mu_sigma("s")
    power = RingClass.unit()
    fact = 1
    for n in range(order + 1):
        if n:
            power = power * MU_SIGMA
            fact *= n
        for c, want in zip(e, power):
            if c.taylor_coeff("s", n) != parse("0") + Fraction(want) / fact:
                return False, f"order {n} differs"
    return True, f"Taylor coefficients through order {order}"


# -- matrices ---------------------------------------------------------------------

def check_b_matrix():
    want = ExpMatrix([[parse(x) / 4 for x in row] for row in PRINTED_B])
    return b_matrix("s") == want, "B = (1/4) M' mult(exp(s mu(Sigma)))"


def check_a_matrix(n: int = 20, seed: int = 1):
    rng = random.Random(seed)
    s_funcs = (parse("exp(2*s)"), parse("exp(-2*s)"), parse("1"), parse("s"))
    for _ in range(n):
        psi = [_rand_frac(rng) for _ in range(4)]
        phi = [_rand_frac(rng) for _ in range(4)]
        a = a_matrix(psi)
        if a != a_matrix_by_extraction(psi):
            return False, f"closed form differs from extraction at psi={psi}"
        lhs = sum((f * x for f, x in zip(s_funcs, a @ phi)), parse("0"))
        if lhs != pair_relative(phi, psi):
            return False, f"defining identity fails at psi={psi}"
    return True, f"defining identity at {n} random points"


def check_u_matrix(n: int = 20, seed: int = 2):
    rng = random.Random(seed)
    done = 0
    while done < n:
        a = [_rand_frac(rng) for _ in range(4)]
        if a_determinant(a) == 0:
            continue
        am = a_matrix(a)
        if am.T @ u_matrix(a) @ am != DUAL_PAIRING:
            return False, f"A^T U A != M'/4 at a={a}"
        done += 1
    return True, f"A^T U A = M'/4 at {n} random caps"


def check_singular_locus(n: int = 20, seed: int = 3):
    rng = random.Random(seed)
    for _ in range(n):
        a0, a1, a2 = (_rand_frac(rng) for _ in range(3))
        for a3 in (4 * a2, -4 * a2, 16 * a1):
            d = a_matrix((a0, a1, a2, a3)).det()
            if not d.is_zero():
                return False, f"A not singular at {(a0, a1, a2, a3)}"
        a3 = 16 * a1 + 1 + abs(a2) * 4
        a3 = a3 if a3 not in (4 * a2, -4 * a2) else a3 + 1
        d = a_matrix((a0, a1, a2, a3)).det().constant_value()
        if d == 0 or d != a_determinant((a0, a1, a2, a3)):
            return False, "determinant formula fails off the locus"
    return True, "det A vanishes exactly on (a3 + 4a2)(a3 - 4a2)(a3 - 16a1) = 0"


# -- cap and the K3 example ---------------------------------------------------------

def check_cap_cap():
    got = pair_relative(cap_unit(), cap_unit())
    want = parse("(sinh(2*s) - 2*s)/16")
    return got == want, "cap against cap gives (1/16)(sinh 2s - 2s)"


def check_k3_powers():
    _, s = load_builtin("k3_blowup2")
    sig = s.owner.sigma
    vals = [dw_power(s, sig, 3 + 4 * n) for n in range(3)]
    return vals == [2 ** (2 + 4 * n) for n in range(3)], f"D^w(Sigma^(3+4n)) = {', '.join(map(str, vals))}"


def check_sigma_scale():
    _, s = load_builtin("k3_blowup2")
    a = sigma_scale_from_series(s)
    return a == Fraction(1, 2) and MU_SIGMA == H * a, f"scale equation gives mu(Sigma) = {a} h"


def check_point_insertion(mu_x: RingClass = MU_X):
    _, s = load_builtin("k3_blowup2")
    phi = relative_from_closed(s, extra=(1, 0), t=None)
    got = pair_relative(phi, cap_point(mu_x)).at_zero("s").constant_value()
    want = dx_power(s, s.owner.sigma, 1, points=1)
    return got == want == 2, f"D_X(Sigma x) by pairing = {got}, from the series = {want}"


# -- gluing ---------------------------------------------------------------------------

def _k3_input():
    _, s = load_builtin("k3_blowup2")
    return GlueInput(s, s)


def check_sector_factors():
    vals = {(k, l): contraction_factor(k, l) for k in (-2, 0, 2) for l in (-2, 0, 2)}
    ok = vals[(2, 2)] == 32 and vals[(-2, -2)] == -32 and all(
        v == 0 for key, v in vals.items() if key not in ((2, 2), (-2, -2)))
    return ok, "contraction gives +32, -32 and 0"


def check_glue_routes():
    inp = _k3_input()
    al = {"u": inp.m1.classes["P"]}
    ok = glue_h2(inp, al, al) == glue_h2(inp, al, al, route="contraction")
    ok = ok and glue_h2(inp) == parse("0")
    return ok, "both gluing routes agree"


def check_theorem_d():
    inp = _k3_input()
    want = parse("2*exp(2*t) - 2*exp(-2*t)")
    ok = glue_with_d(inp) == want == glue_with_d(inp, route="matrix")
    return ok, "DD(e^{tD}) = 2e^{2t} - 2e^{-2t} for K3#2 glued to itself"


def check_symmetry():
    e = glue_with_d(_k3_input(), s="s")
    swapped = e.subs("s", var("_u")).subs("t", var("s")).subs("_u", var("t"))
    want = parse("exp(t*s)*(2*exp(2*s + 2*t) - 2*exp(-2*s - 2*t))")
    return e == want and swapped == e, "self-glued series is symmetric in s and t"


def check_simple_type_shape():
    e = glue_with_d(_k3_input(), s="s")
    _, s = load_builtin("k3_blowup2")
    phi = relative_from_closed(s, t=None)
    return simple_type_shape(e, "s") and phi[3] == 16 * phi[1], "no s e^{ts} part; phi3 = 16 phi1"


# -- Witten ----------------------------------------------------------------------------

def check_witten_shift():
    m, _ = load_builtin("k3_blowup2")
    return witten_shift(m, m) == 32, "fiber-sum Witten scale is 32 times the product"


def check_witten_k3():
    m, s = load_builtin("k3_blowup2")
    ok = all(witten_coefficient(m, k, 1) in (a, -a) for k, a in s.classes)
    return ok, "K3#2 coefficients are Witten coefficients of SW values +-1"


def check_predict():
    ok = all(predict_coefficient(g)[0] == 2 ** (7 * g - 9) for g in range(2, 7))
    return ok and predict_coefficient(2)[1] == "theorem", "2^(7g-9) for g = 2..6"


def checks(mu_x: RingClass | None = None) -> list[Check]:
    mx = MU_X if mu_x is None else mu_x
    return [
        Check("ring", "pairing matrix", check_pairing_matrix),
        Check("ring", "dual pairing", check_dual_pairing),
        Check("ring", "h products", check_h_squared),
        Check("ring", "generators l, p", check_generators),
        Check("ring", "point class square", lambda: check_mu_x_square(mx)),
        Check("ring", "Frobenius identity", check_frobenius),
        Check("ring", "exp(s mu(Sigma)) closed form", check_exp_closed_form),
        Check("ring", "exp(s mu(Sigma)) series", check_exp_series),
        Check("matrices", "B matrix", check_b_matrix),
        Check("matrices", "A_psi identity", check_a_matrix),
        Check("matrices", "U conjugation", check_u_matrix),
        Check("matrices", "singular locus", check_singular_locus),
        Check("cap", "cap against cap", check_cap_cap),
        Check("cap", "K3 Sigma powers", check_k3_powers),
        Check("cap", "mu(Sigma) scale", check_sigma_scale),
        Check("cap", "point-class insertion", lambda: check_point_insertion(mx)),
        Check("gluing", "sector factors", check_sector_factors),
        Check("gluing", "routes agree", check_glue_routes),
        Check("gluing", "classes crossing the neck", check_theorem_d),
        Check("gluing", "s/t symmetry", check_symmetry),
        Check("gluing", "simple-type shape", check_simple_type_shape),
        Check("witten", "exponent shift", check_witten_shift),
        Check("witten", "K3 coefficients", check_witten_k3),
        Check("witten", "coefficient predictor", check_predict),
    ]


def run(section: str = "all", mu_x: RingClass | None = None) -> list[Result]:
    if section != "all" and section not in SECTIONS:
        raise ValueError(f"unknown section {section!r}")
    out = []
    for c in checks(mu_x):
        if section != "all" and c.section != section:
            continue
        try:
            ok, detail = c.fn()
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(Result(c.section, c.name, bool(ok), detail))
    return out


__all__ = ["SECTIONS", "Check", "Result", "checks", "run"]
