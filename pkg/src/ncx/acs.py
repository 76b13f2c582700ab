"""Almost complex structures, (p,q)-projections, del and delbar, integrability.

An :class:`ACS` assigns to every one-form letter a degree-one form.  It acts
on forms as a degree-zero derivation that kills functions.  Projections onto
``Omega^{p,q}`` expand each letter into its ``+i`` and ``-i`` eigenparts
``(l -+ i J l) / 2`` and keep the terms with exactly ``p`` holomorphic
factors; when ``J`` is diagonal on letters this reduces to counting.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Mapping

from .calculus import Calculus, Form, combine, d
from .scalar import I, ONE, Scalar, as_scalar

__all__ = [
    "ACS",
    "AxiomViolation",
    "IntegrabilityReport",
    "apply_J",
    "apply_J_wedge",
    "project_pq",
    "pq_components",
    "partial",
    "dbar",
    "verify_axioms",
    "check_integrability",
    "standard_acs",
    "sign_flipped_acs",
    "conjugated_acs",
    "literal_free_acs",
    "rotated_acs",
]

_HALF = Scalar(Fraction(1, 2))


class AxiomViolation(ValueError):
    """An almost complex structure failed one of its defining axioms."""


class ACS:
    """Letter-level almost complex structure on a calculus."""

    def __init__(self, calc: Calculus, action: Mapping[int, Form], name: str = "J"):
        self.calc = calc
        self.name = name
        self.action = {int(k): v for k, v in action.items()}
        missing = [l for l in calc.one_form_generators() if l not in self.action]
        if missing:
            raise ValueError(f"J undefined on letters {missing}")
        self.eigen = {}
        for l, f in self.action.items():
            if f.terms == {(l,): I}:
                self.eigen[l] = (1, 0)
            elif f.terms == {(l,): -I}:
                self.eigen[l] = (0, 1)
        self.diagonal = len(self.eigen) == len(self.action)
        self._parts: dict = {}

    def parts(self, letter: int) -> tuple:
        """``(pi^{1,0} l, pi^{0,1} l)`` as forms."""
        got = self._parts.get(letter)
        if got is None:
            lf = Form(self.calc, {(letter,): ONE}, _normal=True)
            jl = self.action[letter]
            p10 = (lf - jl.scale(I)).scale(_HALF)
            p01 = (lf + jl.scale(I)).scale(_HALF)
            got = (p10, p01)
            self._parts[letter] = got
        return got

    def __call__(self, a: Form) -> Form:
        return apply_J(self, a)

    def to_json(self) -> dict:
        return {self.calc.letter_name(l): str(f) for l, f in sorted(self.action.items())}


def _substitute(a: Form, choose) -> Form:
    """Expand words letter by letter; ``choose(pos, letter)`` gives the
    replacement form for odd letters (or None to keep the letter)."""
    calc = a.calc

    def pieces():
        for w, c in a.terms.items():
            partial_words = [((), c)]
            pos = 0
            for x in w:
                if not x & 1:
                    partial_words = [(u + (x,), k) for u, k in partial_words]
                    continue
                rep = choose(pos, x)
                pos += 1
                if rep is None:
                    partial_words = [(u + (x,), k) for u, k in partial_words]
                    continue
                partial_words = [
                    (u + v, k * e) for u, k in partial_words for v, e in rep.terms.items()
                ]
                if not partial_words:
                    break
            yield from partial_words

    return combine(calc, pieces())


def apply_letter_map(a: Form, action: Mapping[int, Form]) -> Form:
    """Extend a letter map as a degree-zero derivation (functions killed)."""
    calc = a.calc

    def pieces():
        for w, c in a.terms.items():
            for i, x in enumerate(w):
                if x & 1:
                    rep = action.get(x)
                    if rep is None:
                        continue
                    for v, e in rep.terms.items():
                        yield w[:i] + v + w[i + 1 :], c * e

    return combine(calc, pieces())


def apply_J(j: ACS, a: Form) -> Form:
    """J as a derivation over wedge, zero on functions."""
    return apply_letter_map(a, j.action)


def apply_J_wedge(j: ACS, a: Form) -> Form:
    """Multiplicative extension of J (``J wedge J`` on two-forms)."""
    return _substitute(a, lambda pos, x: j.action[x])


def project_pq(j: ACS, a: Form, p: int, q: int) -> Form:
    """Component of ``a`` in ``Omega^{p,q}``."""
    if p < 0 or q < 0:
        return a.calc.zero()
    if j.diagonal:
        eig = j.eigen

        def keep(w):
            pp = qq = 0
            for x in w:
                if x & 1:
                    if eig[x] == (1, 0):
                        pp += 1
                    else:
                        qq += 1
            return pp == p and qq == q

        return a.filter(keep)
    out = a.calc.zero()
    n = p + q
    by_len: dict = {}
    for w, c in a.terms.items():
        k = sum(x & 1 for x in w)
        if k == n:
            by_len[w] = c
    if not by_len:
        return out
    src = Form(a.calc, by_len, _normal=True)
    for holo in combinations(range(n), p):
        hs = set(holo)
        out = out + _substitute(src, lambda pos, x: j.parts(x)[0 if pos in hs else 1])
    return out


def pq_components(j: ACS, a: Form) -> dict:
    out = {}
    for k in sorted(a.degrees()):
        ak = a.homogeneous(k)
        for p in range(k + 1):
            c = project_pq(j, ak, p, k - p)
            if c:
                out[(p, k - p)] = c
    return out


def partial(j: ACS, a: Form) -> Form:
    out = a.calc.zero()
    for (p, q), c in pq_components(j, a).items():
        out = out + project_pq(j, d(c), p + 1, q)
    return out


def dbar(j: ACS, a: Form) -> Form:
    out = a.calc.zero()
    for (p, q), c in pq_components(j, a).items():
        out = out + project_pq(j, d(c), p, q + 1)
    return out


# ---------------------------------------------------------------------------
# axioms


def _letter(calc: Calculus, l: int) -> Form:
    return Form(calc, {(l,): ONE}, _normal=True)


def verify_axioms(
    j: ACS,
    is_zero: Callable[[Form], bool] | None = None,
    samples: list | None = None,
    raise_on_failure: bool = True,
) -> list:
    """Check J^2 = -1 and J(x^*) = (J x)^* on letters, and bimodule linearity.

    ``samples`` are extra one-forms given as ``(left, letter, right)`` with
    function forms ``left``/``right``; J of the normalized product must equal
    the product with J applied to the letter.
    """
    calc = j.calc
    is_zero = is_zero or (lambda f: f.is_zero())
    fails = []
    for l in calc.one_form_generators():
        x = _letter(calc, l)
        jx = j.action[l]
        if jx.degrees() - {1}:
            fails.append(f"J({calc.letter_name(l)}) is not a one-form")
            continue
        if not is_zero(apply_J(j, jx) + x):
            fails.append(f"J^2 != -1 on {calc.letter_name(l)}")
        if not is_zero(apply_J(j, x.star()) - jx.star()):
            fails.append(f"J(x^*) != (Jx)^* on {calc.letter_name(l)}")
    funcs = [calc.fn(g.id) for g in calc.pres.generators]
    for l in calc.one_form_generators():
        x = _letter(calc, l)
        for f in funcs:
            for left, right in ((f, calc.one()), (calc.one(), f)):
                lhs = apply_J(j, left * x * right)
                rhs = left * j.action[l] * right
                if not is_zero(lhs - rhs):
                    fails.append(
                        f"J not bimodule-linear on {left} {calc.letter_name(l)} {right}"
                    )
    for left, l, right in samples or ():
        lhs = apply_J(j, left * _letter(calc, l) * right)
        rhs = left * j.action[l] * right
        if not is_zero(lhs - rhs):
            fails.append(f"J not bimodule-linear on sample ({left}) {calc.letter_name(l)} ({right})")
    if fails and raise_on_failure:
        raise AxiomViolation("; ".join(fails))
    return fails


# ---------------------------------------------------------------------------
# integrability


@dataclass
class IntegrabilityReport:
    model: str
    acs: str
    residuals: dict = field(default_factory=dict)  # test -> {generator: form text}
    verdicts: dict = field(default_factory=dict)  # test -> bool (True = vanishes)
    conditions: dict = field(default_factory=dict)  # generator-level conditions -> bool

    @property
    def integrable(self) -> bool:
        return all(self.verdicts.values())

    @property
    def tests_agree(self) -> bool:
        return len(set(self.verdicts.values())) <= 1

    @property
    def conditions_agree(self) -> bool:
        return len(set(self.conditions.values()) | set(self.verdicts.values())) <= 1

    def to_json(self) -> dict:
        return {
            "model": self.model,
            "acs": self.acs,
            "integrable": self.integrable,
            "tests_agree": self.tests_agree,
            "conditions_agree": self.conditions_agree,
            "verdicts": dict(sorted(self.verdicts.items())),
            "conditions": dict(sorted(self.conditions.items())),
            "residuals": {k: dict(sorted(v.items())) for k, v in sorted(self.residuals.items())},
        }


def check_integrability(model, j: ACS | None = None, verify: bool = True) -> IntegrabilityReport:
    """Run the four operator tests on generators plus the generator-level
    conditions (delbar^2 and del^2 on functions, d = del + delbar and the
    two type conditions on one-forms)."""
    j = j or model.acs
    calc = j.calc
    is_zero = model.is_zero
    if verify:
        verify_axioms(j, is_zero)
    rep = IntegrabilityReport(model=model.label, acs=j.name)
    J = lambda f: apply_J(j, f)  # noqa: E731
    JJ = lambda f: apply_J_wedge(j, f)  # noqa: E731
    tests = {"N1": {}, "N2": {}, "N3": {}, "N4": {}}
    for l in calc.one_form_generators():
        xi = _letter(calc, l)
        name = calc.letter_name(l)
        dJ = d(J(xi))
        Jd = J(d(xi))
        tests["N1"][name] = dJ - JJ(dJ) - Jd
        tests["N2"][name] = J(J(dJ)) + Jd.scale(2)
        tests["N3"][name] = J(J(d(xi))) - J(dJ).scale(2)
    for g in calc.pres.generators:
        a = calc.fn(g.id)
        tests["N4"][g.name] = J(d(J(d(a))))
    for t, res in tests.items():
        rep.verdicts[t] = all(is_zero(f) for f in res.values())
        rep.residuals[t] = {k: str(f) for k, f in res.items() if not is_zero(f)}

    c1 = c2 = c3 = c4 = c5 = True
    for g in calc.pres.generators:
        a = calc.fn(g.id)
        c1 &= is_zero(dbar(j, dbar(j, a)))
        c2 &= is_zero(partial(j, partial(j, a)))
    for l in calc.one_form_generators():
        xi = _letter(calc, l)
        c3 &= is_zero(d(xi) - partial(j, xi) - dbar(j, xi))
        x10, x01 = j.parts(l)
        c4 &= is_zero(project_pq(j, d(x10), 0, 2))
        c5 &= is_zero(project_pq(j, d(x01), 2, 0))
    rep.conditions = {
        "dbar_squared_on_functions": c1,
        "del_squared_on_functions": c2,
        "d_equals_del_plus_dbar": c3,
        "d_Omega10_type": c4,
        "d_Omega01_type": c5,
    }
    return rep


# ---------------------------------------------------------------------------
# constructors


def _holomorphic(g) -> bool:
    if g.kind in ("z", "zbar"):
        return g.kind == "z"
    return g.id < g.star_partner


def standard_acs(calc: Calculus) -> ACS:
    """``J dz = i dz`` and ``J dzbar = -i dzbar``; on the free calculus the
    same rule with ``x_k`` holomorphic and ``x_k^*`` antiholomorphic."""
    action = {}
    for g in calc.pres.generators:
        l = 2 * g.id + 1
        action[l] = Form(calc, {(l,): I if _holomorphic(g) else -I}, _normal=True)
    return ACS(calc, action, "standard")


def literal_free_acs(calc: Calculus) -> ACS:
    """``J dx_k = -d(x_k^*)``, ``J d(x_k^*) = dx_k`` on the free calculus.

    This squares to -1 but is not compatible with the star: ``(J dx)^*`` is
    ``-dx`` while ``J(dx^*)`` is ``dx``.
    """
    action = {}
    for g in calc.pres.generators:
        l = 2 * g.id + 1
        partner = 2 * g.star_partner + 1
        c = -ONE if _holomorphic(g) else ONE
        action[l] = Form(calc, {(partner,): c}, _normal=True)
    return ACS(calc, action, "literal_free")


def rotated_acs(calc: Calculus) -> ACS:
    """Star compatible, non-diagonal ``J``: ``dx -> (5i/4) dx + (3/4) dx^*``.

    The matrix ``[[5i/4, 3/4], [3/4, -5i/4]]`` squares to -1 and commutes
    with the star, so projections must go through the eigenbasis.
    """
    a = I * Fraction(5, 4)
    b = Scalar(Fraction(3, 4))
    action = {}
    for g in calc.pres.generators:
        l = 2 * g.id + 1
        partner = 2 * g.star_partner + 1
        own = a if _holomorphic(g) else -a
        action[l] = Form(calc, {(l,): own, (partner,): b}, _normal=True)
    return ACS(calc, action, "rotated")


def sign_flipped_acs(calc: Calculus, letter: int | str | None = None) -> ACS:
    """Negate J on exactly one letter; breaks compatibility with the star."""
    base = standard_acs(calc)
    if letter is None:
        letter = calc.one_form_generators()[0]
    if isinstance(letter, str):
        letter = calc.letter_code(letter)
    action = dict(base.action)
    action[letter] = -action[letter]
    return ACS(calc, action, f"sign_flipped[{calc.letter_name(letter)}]")


def conjugated_acs(calc: Calculus, seed: int = 0) -> ACS:
    """A non-integrable ACS obtained by conjugating the standard one with a
    star-compatible bimodule automorphism ``1 + N`` with ``N^2 = 0``.

    ``N(dz0) = h dzb1`` where ``h`` has the torus weight of ``z0 z1`` and
    depends on ``zb0``; ``N(dzb0) = (h dzb1)^*``.  Needs at least two
    coordinates.
    """
    import numpy as np

    pres = calc.pres
    if calc.universal or "z1" not in pres.names:
        raise ValueError("conjugated_acs needs a theta calculus with n >= 1")
    rng = np.random.default_rng(seed)
    names = pres.names
    z0, z1, zb0 = (2 * names[x] for x in ("z0", "z1", "zb0"))
    extra: tuple = ()
    if rng.integers(0, 2):
        mu = int(rng.integers(0, 1 + max(g.index for g in pres.generators)))
        extra = (2 * names[f"z{mu}"], 2 * names[f"zb{mu}"])
    re_, im_ = 0, 0
    while re_ == 0 and im_ == 0:
        re_, im_ = (int(v) for v in rng.integers(-2, 3, size=2))
    coef = as_scalar(complex(re_, im_))
    dzb1 = 2 * names["zb1"] + 1
    dz0, dzb0 = 2 * names["z0"] + 1, 2 * names["zb0"] + 1
    hx = Form(calc, {(z0, z0, zb0, z1) + extra + (dzb1,): coef})
    N = {dz0: hx, dzb0: hx.star()}
    J0 = standard_acs(calc).action

    def app(m, f):
        return apply_letter_map(f, m)

    action = {}
    for l in calc.one_form_generators():
        x = _letter(calc, l)
        j0x = app(J0, x)
        nx = app(N, x)
        action[l] = j0x + app(N, j0x) - app(J0, nx) - app(N, app(J0, nx))
    return ACS(calc, action, f"conjugated[seed={seed}]")
