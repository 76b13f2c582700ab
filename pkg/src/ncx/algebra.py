"""Presented graded *-algebras with phase-swap relations and central rules.

Words are tuples of generator ids.  A presentation with swap closure rewrites
``g h -> c(g, h) h g`` whenever ``g`` comes after ``h`` in the generator
order, so normal words are nondecreasing.  Central rules replace an
occurrence of a central word by a polynomial; since the left-hand side is
central its letters need not be adjacent, and an occurrence is any
sub-multiset of letters.

Two rewrite strategies are provided, ``"left"`` (sort first, then extract the
leftmost occurrence of a central word) and ``"right"`` (extract the rightmost
occurrence eagerly, and swap rightmost inversions).  Normal forms must agree;
:func:`normal_form` with ``check=True`` raises
:class:`NonConfluentPresentation` otherwise.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .scalar import ONE, ZERO, Scalar, as_scalar, lam

__all__ = [
    "Generator",
    "Presentation",
    "NCPoly",
    "NonConfluentPresentation",
    "normal_form",
    "theta_presentation",
    "sphere_presentation",
    "free_presentation",
]

Word = tuple


class NonConfluentPresentation(RuntimeError):
    """Two rewrite strategies produced different normal forms."""


@dataclass(frozen=True)
class Generator:
    id: int
    name: str
    grade: int
    star_partner: int
    kind: str = "generic"  # "z", "zbar" or "generic"
    index: int = -1  # coordinate index for z/zbar letters


@dataclass(frozen=True)
class CentralRule:
    lhs: Word
    rhs: tuple  # tuple of (word, Scalar) pairs

    def rhs_terms(self) -> dict:
        return dict(self.rhs)


@dataclass(frozen=True, eq=False)
class Presentation:
    """Generators, swap coefficients and central rules.

    ``swap[(g, h)]`` for ``g > h`` is the coefficient ``c`` with
    ``g h = c h g``.  Swap coefficients must be units.
    """

    name: str
    generators: tuple
    swap: Mapping = field(default_factory=dict)
    central_rules: tuple = ()
    has_swap_closure: bool = True

    def __post_init__(self):
        for g in self.generators:
            p = self.generators[g.star_partner]
            if p.star_partner != g.id or p.grade != -g.grade:
                raise ValueError(f"bad star partner for {g.name}")
        if self.has_swap_closure:
            k = len(self.generators)
            for g in range(k):
                for h in range(g):
                    c = self.swap.get((g, h))
                    if c is None or not c.is_monomial():
                        raise ValueError(f"swap({g},{h}) must be a unit scalar")

    @cached_property
    def _swap_table(self) -> list:
        k = len(self.generators)
        t = [[ONE] * k for _ in range(k)]
        if self.has_swap_closure:
            for (g, h), c in self.swap.items():
                t[g][h] = c
                t[h][g] = c.inverse()
        return t

    def swap_coef(self, g: int, h: int) -> Scalar:
        """Coefficient ``c`` with ``g h = c h g`` (any order of g, h)."""
        return self._swap_table[g][h]

    @cached_property
    def names(self) -> dict:
        return {g.name: g.id for g in self.generators}

    def gen(self, name_or_id) -> int:
        if isinstance(name_or_id, int):
            return name_or_id
        return self.names[name_or_id]

    def element(self, name_or_id) -> "NCPoly":
        return NCPoly(self, {(self.gen(name_or_id),): ONE})

    def one(self) -> "NCPoly":
        return NCPoly(self, {(): ONE})

    def zero(self) -> "NCPoly":
        return NCPoly(self, {})

    def scalar(self, s) -> "NCPoly":
        s = as_scalar(s)
        return NCPoly(self, {(): s} if s else {})

    # ------------------------------------------------------------------
    def consistency_errors(self) -> list:
        """Violations of the swap-consistency and centrality invariants."""
        errs = []
        k = len(self.generators)
        for g in range(k):
            for h in range(k):
                if self.swap_coef(g, h) * self.swap_coef(h, g) != ONE:
                    errs.append(f"swap({g},{h}) not inverse to swap({h},{g})")
        for rule in self.central_rules:
            for g in range(k):
                left = reduce_terms(self, {rule.lhs + (g,): ONE}, "left", central=False)
                right = reduce_terms(self, {(g,) + rule.lhs: ONE}, "left", central=False)
                if left != right:
                    errs.append(f"central rule lhs {rule.lhs} does not commute with {g}")
        return errs

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        gens = [
            {
                "name": g.name,
                "grade": g.grade,
                "partner": self.generators[g.star_partner].name,
                "kind": g.kind,
                **({"index": g.index} if g.index >= 0 else {}),
            }
            for g in self.generators
        ]
        swaps = []
        for (g, h), c in sorted(self.swap.items()):
            swaps.append(
                {
                    "left": self.generators[g].name,
                    "right": self.generators[h].name,
                    "coef": str(c),
                }
            )
        rules = []
        for r in self.central_rules:
            rules.append(
                {
                    "lhs": [self.generators[x].name for x in r.lhs],
                    "rhs": str(NCPoly(self, r.rhs_terms())),
                }
            )
        return {
            "name": self.name,
            "generators": gens,
            "swap_closure": self.has_swap_closure,
            "swaps": swaps,
            "central_rules": rules,
        }

    @classmethod
    def from_json(cls, doc: Mapping | str) -> "Presentation":
        if isinstance(doc, str):
            doc = json.loads(doc)
        gdocs = doc["generators"]
        names = {g["name"]: i for i, g in enumerate(gdocs)}
        gens = tuple(
            Generator(
                id=i,
                name=g["name"],
                grade=int(g.get("grade", 0)),
                star_partner=names[g["partner"]],
                kind=g.get("kind", "generic"),
                index=int(g.get("index", -1)),
            )
            for i, g in enumerate(gdocs)
        )
        swaps = {}
        for s in doc.get("swaps", []):
            g, h = names[s["left"]], names[s["right"]]
            c = Scalar.parse(str(s["coef"]))
            if g < h:
                g, h, c = h, g, c.inverse()
            swaps[(g, h)] = c
        closure = bool(doc.get("swap_closure", True))
        if closure:
            for g in range(len(gens)):
                for h in range(g):
                    swaps.setdefault((g, h), ONE)
        bare = cls(doc.get("name", "custom"), gens, swaps, (), closure)
        rules = []
        for r in doc.get("central_rules", []):
            lhs = tuple(names[x] for x in r["lhs"])
            rhs = parse_ncpoly(bare, r["rhs"])
            rules.append(CentralRule(lhs, tuple(sorted(rhs.terms.items()))))
        return cls(bare.name, gens, swaps, tuple(rules), closure)


# ---------------------------------------------------------------------------
# rewriting


def _sort_word(p: Presentation, w: Word, from_right: bool) -> tuple:
    """Bubble ``w`` into nondecreasing order, returning (coefficient, word)."""
    w = list(w)
    c = ONE
    n = len(w)
    table = p._swap_table
    changed = True
    while changed:
        changed = False
        rng = range(n - 2, -1, -1) if from_right else range(n - 1)
        for i in rng:
            a, b = w[i], w[i + 1]
            if a > b:
                w[i], w[i + 1] = b, a
                c = c * table[a][b]
                changed = True
    return c, tuple(w)


def _find_occurrence(w: Word, lhs: Word, rightmost: bool):
    need = Counter(lhs)
    have = Counter(w)
    if any(have[x] < k for x, k in need.items()):
        return None
    positions = []
    used = set()
    order = range(len(w) - 1, -1, -1) if rightmost else range(len(w))
    for x in lhs:
        for i in order:
            if i not in used and w[i] == x:
                used.add(i)
                positions.append(i)
                break
    return positions


def _extract(p: Presentation, w: Word, positions: Sequence[int]) -> tuple:
    """Write ``w = c * (w[positions] in order) * rest``; return (c, rest)."""
    table = p._swap_table
    cur = list(range(len(w)))  # remaining original positions, in order
    c = ONE
    front = 0
    for pos in positions:
        k = cur.index(pos)
        y = w[pos]
        # move y left past cur[front:k]
        for j in range(k - 1, front - 1, -1):
            c = c * table[w[cur[j]]][y]
        cur.pop(k)
        cur.insert(front, pos)
        front += 1
    rest = tuple(w[i] for i in cur[front:])
    return c, rest


def reduce_terms(
    p: Presentation, terms: Mapping, strategy: str = "left", central: bool = True
) -> dict:
    """Normal form of a linear combination of words."""
    if strategy not in ("left", "right"):
        raise ValueError("strategy must be 'left' or 'right'")
    right = strategy == "right"
    out: dict = {}
    stack = [(w, c) for w, c in terms.items() if c]
    rules = p.central_rules if central else ()
    while stack:
        w, c = stack.pop()
        if right and rules:
            hit = None
            for rule in rules:
                pos = _find_occurrence(w, rule.lhs, True)
                if pos is not None:
                    hit = (rule, pos)
                    break
            if hit is not None:
                rule, pos = hit
                k, rest = _extract(p, w, pos)
                for rw, rc in rule.rhs:
                    stack.append((rw + rest, c * k * rc))
                continue
        if p.has_swap_closure:
            k, w = _sort_word(p, w, from_right=right)
            c = c * k
        if rules and not right:
            hit = None
            for rule in rules:
                pos = _find_occurrence(w, rule.lhs, False)
                if pos is not None:
                    hit = (rule, pos)
                    break
            if hit is not None:
                rule, pos = hit
                k, rest = _extract(p, w, pos)
                for rw, rc in rule.rhs:
                    stack.append((rw + rest, c * k * rc))
                continue
        v = out.get(w)
        v = c if v is None else v + c
        if v:
            out[w] = v
        else:
            out.pop(w, None)
    return out


def normal_form(
    p: Presentation, w: Word | Mapping, strategy: str = "left", check: bool = False
) -> "NCPoly":
    terms = w if isinstance(w, Mapping) else {tuple(w): ONE}
    for word in terms:
        for x in word:
            if not 0 <= x < len(p.generators):
                raise ValueError(f"invalid letter {x}")
    res = reduce_terms(p, terms, strategy)
    if check:
        other = reduce_terms(p, terms, "right" if strategy == "left" else "left")
        if other != res:
            raise NonConfluentPresentation(
                f"strategies disagree on {dict(terms)}: {res} vs {other}"
            )
    return NCPoly(p, res, _normal=True)


# ---------------------------------------------------------------------------


class NCPoly:
    """Normal-form noncommutative polynomial."""

    __slots__ = ("pres", "terms")

    def __init__(self, pres: Presentation, terms: Mapping, _normal: bool = False):
        self.pres = pres
        if _normal:
            self.terms = dict(terms)
        else:
            self.terms = reduce_terms(pres, {tuple(w): as_scalar(c) for w, c in terms.items()})

    def _lift(self, other) -> "NCPoly":
        if isinstance(other, NCPoly):
            if other.pres is not self.pres:
                raise ValueError("polynomials over different presentations")
            return other
        return self.pres.scalar(other)

    def __add__(self, other) -> "NCPoly":
        other = self._lift(other)
        t = dict(self.terms)
        for w, c in other.terms.items():
            v = t.get(w, ZERO) + c
            if v:
                t[w] = v
            else:
                t.pop(w, None)
        return NCPoly(self.pres, t, _normal=True)

    __radd__ = __add__

    def __neg__(self) -> "NCPoly":
        return NCPoly(self.pres, {w: -c for w, c in self.terms.items()}, _normal=True)

    def __sub__(self, other) -> "NCPoly":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "NCPoly":
        return self._lift(other) - self

    def __mul__(self, other) -> "NCPoly":
        if not isinstance(other, NCPoly):
            s = as_scalar(other)
            return NCPoly(self.pres, {w: c * s for w, c in self.terms.items() if c * s}, _normal=True)
        return mul(self.pres, self, other)

    def __rmul__(self, other) -> "NCPoly":
        s = as_scalar(other)
        return NCPoly(self.pres, {w: s * c for w, c in self.terms.items() if s * c}, _normal=True)

    def __pow__(self, k: int) -> "NCPoly":
        out = self.pres.one()
        for _ in range(k):
            out = out * self
        return out

    def star(self) -> "NCPoly":
        return star(self.pres, self)

    def grade_components(self) -> dict:
        return grade_components(self.pres, self)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, NCPoly):
            try:
                other = self._lift(other)
            except TypeError:
                return NotImplemented
        return self.pres is other.pres and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __str__(self) -> str:
        return render_terms(self.terms, lambda w: " ".join(self.pres.generators[x].name for x in w))

    def __repr__(self) -> str:
        return f"NCPoly({str(self)!r})"


def mul(p: Presentation, a: NCPoly, b: NCPoly) -> NCPoly:
    t: dict = {}
    for u, c in a.terms.items():
        for v, e in b.terms.items():
            w = u + v
            t[w] = t.get(w, ZERO) + c * e
    return NCPoly(p, {w: c for w, c in t.items() if c})


def star(p: Presentation, a: NCPoly) -> NCPoly:
    gens = p.generators
    t: dict = {}
    for w, c in a.terms.items():
        sw = tuple(gens[x].star_partner for x in reversed(w))
        t[sw] = t.get(sw, ZERO) + c.conj()
    return NCPoly(p, {w: c for w, c in t.items() if c})


def grade_components(p: Presentation, a: NCPoly) -> dict:
    out: dict = {}
    for w, c in a.terms.items():
        g = sum(p.generators[x].grade for x in w)
        out.setdefault(g, {})[w] = c
    return {g: NCPoly(p, t, _normal=True) for g, t in sorted(out.items())}


def render_terms(terms: Mapping, word_str, empty: str = "1") -> str:
    """Canonical text ``coef * word + ...`` used for polynomials and forms."""
    if not terms:
        return "0"
    pieces = []
    for w, c in sorted(terms.items(), key=lambda kv: (len(kv[0]), kv[0])):
        ws = word_str(w)
        neg = c.is_negative_real_monomial()
        cc = -c if neg else c
        cs = str(cc)
        if len(cc) > 1:
            cs = f"({cs})"
        if not ws:
            body = cs
        elif cs == "1":
            body = ws
        else:
            body = f"{cs} * {ws}"
        pieces.append(("-" if neg else "+", body))
    out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


def _has_phase(c: Scalar) -> bool:
    return any(ph for ph in c.terms)


def parse_ncpoly(p: Presentation, text: str) -> NCPoly:
    from .calculus import parse_expression

    return parse_expression(text, p)


# ---------------------------------------------------------------------------
# model presentations


def _zz_generators(n: int) -> tuple:
    k = n + 1
    gens = []
    for mu in range(k):
        gens.append(Generator(mu, f"z{mu}", 1, k + mu, "z", mu))
    for mu in range(k):
        gens.append(Generator(k + mu, f"zb{mu}", -1, mu, "zbar", mu))
    return tuple(gens)


def torus_sign(g: Generator) -> int:
    return 1 if g.kind == "z" else -1


def theta_swaps(gens: Sequence[Generator]) -> dict:
    """Bicharacter swap coefficients: ``c = (lambda^{mu nu})^{s_g s_h}``."""
    swaps = {}
    for g in gens:
        for h in gens:
            if g.id > h.id:
                swaps[(g.id, h.id)] = lam(g.index, h.index, torus_sign(g) * torus_sign(h))
    return swaps


def theta_presentation(n: int) -> Presentation:
    gens = _zz_generators(n)
    return Presentation(f"theta_plane_{n}", gens, theta_swaps(gens))


def sphere_presentation(n: int) -> Presentation:
    gens = _zz_generators(n)
    k = n + 1
    rhs = [((), ONE)] + [((mu, k + mu), -ONE) for mu in range(n)]
    rule = CentralRule((n, k + n), tuple(rhs))
    return Presentation(f"theta_sphere_{n}", gens, theta_swaps(gens), (rule,))


def free_presentation(n: int) -> Presentation:
    gens = []
    for k in range(n):
        gens.append(Generator(k, f"x{k}", 1, n + k, "generic", k))
    for k in range(n):
        gens.append(Generator(n + k, f"xb{k}", -1, k, "generic", k))
    return Presentation(f"free_{n}", tuple(gens), {}, (), has_swap_closure=False)


def random_word(rng, p: Presentation, max_len: int) -> Word:
    k = len(p.generators)
    length = int(rng.integers(0, max_len + 1))
    return tuple(int(x) for x in rng.integers(0, k, size=length))


def random_ncpoly(rng, p: Presentation, max_len: int = 3, max_terms: int = 3) -> NCPoly:
    from .scalar import random_scalar

    t = {}
    for _ in range(int(rng.integers(1, max_terms + 1))):
        w = random_word(rng, p, max_len)
        t[w] = t.get(w, ZERO) + random_scalar(rng, phase_pairs(p))
    return NCPoly(p, {w: c for w, c in t.items() if c})


def phase_pairs(p: Presentation) -> list:
    idx = sorted({g.index for g in p.generators if g.index >= 0})
    return [(a, b) for a in idx for b in idx if a < b]


def sum_of(p: Presentation, items: Iterable[NCPoly]) -> NCPoly:
    out = p.zero()
    for x in items:
        out = out + x
    return out
