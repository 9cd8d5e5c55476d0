"""Basic classes of a fiber sum along genus-2 surfaces.

For ``X = X1 #_Sigma X2`` with structure series ``sum a_i e^{K_i}`` and
``sum b_j e^{L_j}``, only pairs with ``K.Sigma = L.Sigma = +-2`` contribute.
Each such pair produces glued classes ``kappa`` with

    kappa.alpha = K.alpha,  kappa.beta = L.beta,  kappa.Sigma = +-2,
    kappa.D = K.dbar1 + L.dbar2 +- 2,  kappa^2 = K^2 + L^2 + 8,

and the coefficients of all ``kappa`` over the pair sum to ``+-32 a b``.
Here ``alpha``, ``beta`` are classes of the two complements (orthogonal to
Sigma) and ``D = dbar1 + dbar2`` crosses the neck with ``D.Sigma = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import (
    GenusMismatch, GenusUnsupported, NotNormalized, NotSimpleType, OutOfDomain,
    SectorMismatch, ValidationError,
)
from .exppoly import ZERO, ExpElement, ExpMatrix, GaussRat, exp, var
from .floerpair import v_vector
from .kmseries import (
    ComposedTopology, ManifoldDescriptor, StructureSeries, pair_linear, quad,
    topology_compose, validate, witten_coefficient, witten_scale,
)
from .qh2 import DUAL_PAIRING

GLUE_FACTOR = 32


def normalize_dbar(m: ManifoldDescriptor, dbar: Sequence[int]) -> tuple:
    """Shift ``dbar`` by a multiple of Sigma to make its square as small as possible.

    Since ``Sigma^2 = 0`` and ``dbar.Sigma = 1``, adding ``k Sigma`` changes the
    square by ``2k``; the result has square 0 (even case) or 1 (odd case).
    """
    dbar = tuple(dbar)
    if m.dot(dbar, m.sigma) != 1:
        raise NotNormalized(f"dbar.Sigma must be 1, got {m.dot(dbar, m.sigma)}")
    k = -(m.dot(dbar, dbar) // 2)
    return tuple(d + k * s for d, s in zip(dbar, m.sigma))


def coset_rep(m: ManifoldDescriptor, k: Sequence[int]) -> tuple:
    """Canonical representative of ``k + Z Sigma``."""
    k = tuple(k)
    piv = next(i for i, x in enumerate(m.sigma) if x)
    step = abs(m.sigma[piv])
    shift = -(k[piv] // step) if m.sigma[piv] > 0 else k[piv] // step
    return tuple(a + shift * s for a, s in zip(k, m.sigma))


@dataclass(frozen=True)
class GlueInput:
    s1: StructureSeries
    s2: StructureSeries
    dbar1: tuple | None = None
    dbar2: tuple | None = None
    one_to_one: bool = False

    def __post_init__(self):
        m1, m2 = self.s1.owner, self.s2.owner
        problems = [f"m1: {p}" for p in validate(m1, self.s1)]
        problems += [f"m2: {p}" for p in validate(m2, self.s2)]
        if problems:
            raise ValidationError(problems)
        if m1.genus != m2.genus:
            raise GenusMismatch(f"genera {m1.genus} and {m2.genus} differ")
        if m1.genus != 2:
            raise GenusUnsupported(f"gluing is implemented for genus 2, got {m1.genus}")
        for m in (m1, m2):
            if not m.simple_type:
                raise NotSimpleType(f"{m.name or 'manifold'} is not of simple type")
        d1 = self.dbar1 if self.dbar1 is not None else m1.dbar
        d2 = self.dbar2 if self.dbar2 is not None else m2.dbar
        object.__setattr__(self, "dbar1", None if d1 is None else tuple(d1))
        object.__setattr__(self, "dbar2", None if d2 is None else tuple(d2))

    @property
    def m1(self) -> ManifoldDescriptor:
        return self.s1.owner

    @property
    def m2(self) -> ManifoldDescriptor:
        return self.s2.owner

    def normalized(self) -> tuple[tuple, tuple]:
        """``(dbar1, dbar2)`` shifted along Sigma so that both squares vanish."""
        if self.dbar1 is None or self.dbar2 is None:
            raise NotNormalized("both sides need a dbar class")
        d1 = normalize_dbar(self.m1, self.dbar1)
        d2 = normalize_dbar(self.m2, self.dbar2)
        if self.m1.dot(d1, d1) or self.m2.dot(d2, d2):
            raise NotNormalized("dbar squares are odd; D^2 = 0 cannot be reached by Sigma-shifts")
        return d1, d2

    def topology(self) -> ComposedTopology:
        return topology_compose(self.m1, self.m2, 2)


def _sector_sign(k_sigma: int, l_sigma: int) -> int:
    if k_sigma == l_sigma == 2:
        return 1
    if k_sigma == l_sigma == -2:
        return -1
    return 0


def _check_domain(m: ManifoldDescriptor, alpha: Mapping | None, side: str) -> dict:
    alpha = dict(alpha or {})
    for v, vec in alpha.items():
        if m.dot(vec, m.sigma):
            raise OutOfDomain(f"{side} class for {v} meets Sigma; it does not extend over the fiber sum")
    return alpha


def sigma_gram() -> ExpMatrix:
    """Dual pairing written in the basis of powers of ``mu(Sigma)``."""
    scale = [2 ** a for a in range(4)]
    return ExpMatrix([[DUAL_PAIRING[i, j] * (scale[i] * scale[j]) for j in range(4)] for i in range(4)])


def contraction_factor(k_sigma: int, l_sigma: int) -> GaussRat:
    """``sum_{a,a'} (K.Sigma)^a (L.Sigma)^{a'} G_{a a'}``; equals +-32 or 0."""
    g = sigma_gram()
    out = GaussRat(0)
    for i in range(4):
        for j in range(4):
            out = out + g[i, j].constant_value() * (k_sigma ** i * l_sigma ** j)
    return out


def pair_coefficient(k_sigma: int, l_sigma: int, a, b, route: str = "theorem") -> GaussRat:
    """Glued coefficient of one pair of basic classes (before splitting among kappa)."""
    a, b = GaussRat.coerce(a), GaussRat.coerce(b)
    if route == "theorem":
        return a * b * (GLUE_FACTOR * _sector_sign(k_sigma, l_sigma))
    if route == "contraction":
        return a * b * contraction_factor(k_sigma, l_sigma)
    raise ValueError(f"unknown route {route!r}")


def glue_eval(inp: GlueInput, alpha: Mapping | None = None, beta: Mapping | None = None,
              t: str | None = None, s: str | None = None, route: str = "theorem") -> ExpElement:
    """``DD^w_X(exp(alpha + beta + t D + s Sigma))`` for the fiber sum.

    ``alpha``/``beta`` are formal combinations on the two sides, orthogonal to
    Sigma; ``t``/``s`` name formal variables for ``D`` and ``Sigma``.
    """
    m1, m2 = inp.m1, inp.m2
    alpha = _check_domain(m1, alpha, "m1")
    beta = _check_domain(m2, beta, "m2")
    if t is not None:
        d1, d2 = inp.normalized()
    q = quad(m1.lattice, alpha) + quad(m2.lattice, beta)
    if t is not None:
        tv = var(t)
        cross = sum((var(v) * m1.dot(vec, d1) for v, vec in alpha.items()), ZERO)
        cross = cross + sum((var(v) * m2.dot(vec, d2) for v, vec in beta.items()), ZERO)
        q = q + 2 * tv * cross
        if s is not None:
            q = q + 2 * tv * var(s)
    total = ZERO
    for k, a in inp.s1.classes:
        ks = m1.dot(k, m1.sigma)
        for l, b in inp.s2.classes:
            ls = m2.dot(l, m2.sigma)
            c = pair_coefficient(ks, ls, a, b, route)
            if not c:
                continue
            lin = pair_linear(m1.lattice, k, alpha) + pair_linear(m2.lattice, l, beta)
            if t is not None:
                lin = lin + var(t) * (m1.dot(k, d1) + m2.dot(l, d2) + ks)
            if s is not None:
                lin = lin + var(s) * ks
            total = total + (exp(lin) * c if not lin.is_zero() else ExpElement.coerce(c))
    if total.is_zero() or q.is_zero():
        return total
    return exp(q / 2) * total


def glue_h2(inp: GlueInput, alpha: Mapping | None = None, beta: Mapping | None = None,
            route: str = "theorem") -> ExpElement:
    """Glued series on classes coming from the two complements."""
    return glue_eval(inp, alpha, beta, route=route)


def glue_with_d(inp: GlueInput, t: str = "t", s: str | None = None,
                route: str = "theorem") -> ExpElement:
    """``DD^w_X(exp(t D))`` (or ``exp(s Sigma + t D)`` when ``s`` is given).

    ``route="matrix"`` contracts the two sector vectors with
    ``diag(32 e^{2t}, -32 e^{-2t}, 0)``.
    """
    if route == "theorem":
        return glue_eval(inp, t=t, s=s)
    if route != "matrix":
        raise ValueError(f"unknown route {route!r}")
    d1, d2 = inp.normalized()
    v1 = v_vector(inp.s1, d1, t)
    v2 = v_vector(inp.s2, d2, t)
    tv = var(t)
    plus, minus = 2 * tv, -2 * tv
    if s is not None:
        plus, minus = plus + 2 * var(s), minus - 2 * var(s)
    diag = (exp(plus) * GLUE_FACTOR, exp(minus) * -GLUE_FACTOR, ZERO)
    out = sum((v1[i] * diag[i] * v2[i] for i in range(3)), ZERO)
    if s is not None and not out.is_zero():
        out = out * exp(tv * var(s))
    return out


def theorem_matrix(t: str = "t") -> ExpMatrix:
    tv = var(t)
    z = ZERO
    return ExpMatrix([[exp(2 * tv) * GLUE_FACTOR, z, z],
                      [z, exp(-2 * tv) * -GLUE_FACTOR, z],
                      [z, z, z]])


# -- glued classes and sum rules -----------------------------------------------

@dataclass(frozen=True)
class KappaData:
    k: tuple
    l: tuple
    sign: int
    fiber: tuple
    kappa_sigma: int
    kappa_sq: int
    coeff: GaussRat
    kappa_d: int | None = None

    def to_dict(self) -> dict:
        out = {
            "K": list(self.k), "L": list(self.l), "sector": "+" if self.sign > 0 else "-",
            "fiber": [list(self.fiber[0]), list(self.fiber[1])],
            "kappa_sigma": self.kappa_sigma, "kappa_sq": self.kappa_sq,
            "coeff": str(self.coeff),
        }
        if self.kappa_d is not None:
            out["kappa_d"] = self.kappa_d
        return out


def kappa_construct(k: Sequence[int], l: Sequence[int], inp: GlueInput,
                    a=1, b=1) -> KappaData:
    m1, m2 = inp.m1, inp.m2
    k, l = tuple(k), tuple(l)
    ks, ls = m1.dot(k, m1.sigma), m2.dot(l, m2.sigma)
    if ks != ls or abs(ks) != 2:
        raise SectorMismatch(f"K.Sigma = {ks} and L.Sigma = {ls}; need both equal to +-2")
    sign = 1 if ks > 0 else -1
    kd = None
    if inp.dbar1 is not None and inp.dbar2 is not None:
        d1, d2 = inp.normalized()
        kd = m1.dot(k, d1) + m2.dot(l, d2) + 2 * sign
    return KappaData(
        k=k, l=l, sign=sign,
        fiber=(coset_rep(m1, k), coset_rep(m2, l)),
        kappa_sigma=ks,
        kappa_sq=m1.lattice.square(k) + m2.lattice.square(l) + 8,
        coeff=pair_coefficient(ks, ls, a, b),
        kappa_d=kd,
    )


@dataclass(frozen=True)
class SumRule:
    fiber: tuple
    case: str  # "plus", "minus", "zero-sector", "not-basic"
    total: GaussRat
    kappas: tuple = ()

    def to_dict(self) -> dict:
        return {
            "fiber": [list(self.fiber[0]), list(self.fiber[1])],
            "case": self.case,
            "sum": str(self.total),
            "kappas": [kd.to_dict() for kd in self.kappas],
        }


@dataclass(frozen=True)
class GlueReport:
    kappa_list: tuple
    rules: tuple
    topology: ComposedTopology
    one_to_one: bool = False
    normalization: Mapping = field(default_factory=dict)
    skipped: tuple = ()  # pairs outside the group G (K.Sigma != L.Sigma)

    def nonzero_rules(self) -> list[SumRule]:
        return [r for r in self.rules if r.total]

    def rule_for(self, inp: GlueInput, k: Sequence[int], l: Sequence[int]) -> SumRule:
        """The rule for the fiber over ``(k mod Sigma1, l mod Sigma2)``.

        Fibers not built from basic classes on both sides sum to zero.
        """
        m1, m2 = inp.m1, inp.m2
        if not in_group_g(inp, k, l):
            raise SectorMismatch("pair is not in the group G (K.Sigma != L.Sigma)")
        fiber = (coset_rep(m1, k), coset_rep(m2, l))
        for r in self.rules:
            if r.fiber == fiber:
                return r
        return SumRule(fiber, "not-basic", GaussRat(0))

    def to_dict(self) -> dict:
        t = self.topology
        out = {
            "kappas": [kd.to_dict() for kd in self.kappa_list],
            "rules": [r.to_dict() for r in self.rules],
            "topology": {"euler": t.euler, "signature": t.signature, "b_plus": t.b_plus,
                         "d0_parity": t.d0_parity, "genus": t.genus},
            "one_to_one": self.one_to_one,
            "outside_group_g": [[list(k), list(l)] for k, l in self.skipped],
            "normalization": {k: list(v) for k, v in self.normalization.items()},
        }
        if self.one_to_one:
            out["no_kappa_with_kappa_sigma_zero"] = True
            out["unique_kappa"] = {
                _fiber_key(r.fiber): r.kappas[0].to_dict() for r in self.nonzero_rules()
                if len(r.kappas) == 1
            }
        return out


def _fiber_key(fiber) -> str:
    return f"{list(fiber[0])}|{list(fiber[1])}"


def in_group_g(inp: GlueInput, k: Sequence[int], l: Sequence[int]) -> bool:
    return inp.m1.dot(k, inp.m1.sigma) == inp.m2.dot(l, inp.m2.sigma)


def sum_rules(inp: GlueInput) -> GlueReport:
    m1, m2 = inp.m1, inp.m2
    s1, s2 = inp.s1.merged(), inp.s2.merged()
    fibers: dict = {}
    kappas = []
    skipped = []
    for k, a in s1.classes:
        ks = m1.dot(k, m1.sigma)
        for l, b in s2.classes:
            ls = m2.dot(l, m2.sigma)
            if ks != ls:
                skipped.append((k, l))
                continue
            fiber = (coset_rep(m1, k), coset_rep(m2, l))
            entry = fibers.setdefault(fiber, {"case": None, "total": GaussRat(0), "kappas": []})
            if abs(ks) == 2:
                kd = kappa_construct(k, l, inp, a, b)
                kappas.append(kd)
                entry["kappas"].append(kd)
                entry["total"] = entry["total"] + kd.coeff
                entry["case"] = "plus" if ks > 0 else "minus"
            else:
                entry["case"] = entry["case"] or "zero-sector"
    rules = tuple(SumRule(f, e["case"], e["total"], tuple(e["kappas"]))
                  for f, e in sorted(fibers.items()))
    norm = {}
    if inp.dbar1 is not None and inp.dbar2 is not None:
        try:
            d1, d2 = inp.normalized()
            norm = {"dbar1": d1, "dbar2": d2}
        except NotNormalized:
            norm = {}
    return GlueReport(tuple(kappas), rules, inp.topology(), inp.one_to_one, norm, tuple(skipped))


def predict_coefficient(g: int) -> tuple[int, str]:
    """Gluing factor ``2^(7g - 9)``; proven for ``g = 2``, conjectural beyond."""
    if g < 2:
        raise OutOfDomain(f"genus {g} < 2")
    return 2 ** (7 * g - 9), "theorem" if g == 2 else "conjecture"


def witten_shift(m1: ManifoldDescriptor, m2: ManifoldDescriptor, g: int = 2) -> Fraction:
    """Ratio of the fiber-sum Witten scale to the product of the pieces' scales."""
    top = topology_compose(m1, m2, g)
    return witten_scale(top.euler, top.signature) / (
        witten_scale(m1.euler, m1.signature) * witten_scale(m2.euler, m2.signature))


def witten_consistent(inp: GlueInput, k, l, sw_k, sw_l) -> bool:
    """Check ``|32 a b| = scale_X |SW(K) SW(L)|`` for coefficients fed by Witten's formula."""
    a = witten_coefficient(inp.m1, k, sw_k)
    b = witten_coefficient(inp.m2, l, sw_l)
    top = inp.topology()
    lhs = a * b * GLUE_FACTOR
    rhs = witten_scale(top.euler, top.signature) * Fraction(sw_k) * Fraction(sw_l)
    return lhs == rhs or lhs == -GaussRat.coerce(rhs)


__all__ = [
    "GLUE_FACTOR", "GlueInput", "GlueReport", "KappaData", "SumRule", "normalize_dbar",
    "coset_rep", "sigma_gram", "contraction_factor", "pair_coefficient", "glue_eval",
    "glue_h2", "glue_with_d", "theorem_matrix", "kappa_construct", "in_group_g",
    "sum_rules", "predict_coefficient", "witten_shift", "witten_consistent",
]
