"""Concrete models: free *-algebra, theta-plane, theta-sphere and CP^n_theta.

Quotient models (sphere and projective space) keep forms as ambient plane
representatives.  ``r2 = sum_mu z^mu zbar^mu`` is central and equals 1, so
a form is homogenized by multiplying each piece with a power of ``r2``;
two homogeneous forms agree iff their difference lies in the span of the
block-level relations (``d r2`` on the sphere, ``del r2`` and ``dbar r2``
on projective space) wedged with forms of lower weight.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement
from typing import Iterable

from .acs import ACS, standard_acs
from .algebra import Presentation, free_presentation, sphere_presentation, theta_presentation
from .calculus import Calculus, Form, ThetaCalculus, UniversalCalculus
from .linalg import RowSpace
from .scalar import ONE

__all__ = [
    "KINDS",
    "ModelDescriptor",
    "Model",
    "build",
    "default_max_weight",
    "line_module",
    "projectors",
    "matmul_forms",
]

KINDS = ("free", "theta_plane", "theta_sphere", "theta_projective")
MAX_N = 3


def default_max_weight() -> int:
    """Truncation bound on ``a + b``; ``NCX_MAX_WEIGHT`` overrides the default 6."""
    raw = os.environ.get("NCX_MAX_WEIGHT")
    if raw is None or raw == "":
        return 6
    try:
        v = int(raw)
    except ValueError:
        raise ValueError(f"NCX_MAX_WEIGHT must be an integer, got {raw!r}") from None
    if v <= 0:
        raise ValueError("NCX_MAX_WEIGHT must be positive")
    return v


@dataclass(frozen=True)
class ModelDescriptor:
    kind: str
    n: int
    max_weight: int = field(default_factory=default_max_weight)
    max_n: int = MAX_N

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}; expected one of {KINDS}")
        if not isinstance(self.n, int) or self.n < 0:
            raise ValueError("n must be a non-negative integer")
        if self.kind == "free" and self.n < 1:
            raise ValueError("the free model needs n >= 1")
        if self.n > self.max_n:
            raise ValueError(f"n={self.n} exceeds the configured maximum {self.max_n}")
        if self.max_weight <= 0:
            raise ValueError("max_weight must be positive")

    @property
    def label(self) -> str:
        return f"{self.kind}_{self.n}"

    def to_json(self) -> dict:
        return {"kind": self.kind, "n": self.n, "max_weight": self.max_weight}

    @classmethod
    def from_json(cls, data: dict) -> "ModelDescriptor":
        if not isinstance(data, dict) or "kind" not in data or "n" not in data:
            raise ValueError("model descriptor needs 'kind' and 'n'")
        extra = {}
        if "max_weight" in data:
            extra["max_weight"] = int(data["max_weight"])
        return cls(str(data["kind"]), int(data["n"]), **extra)


class Model:
    """Presentation, calculus, complex structure and quotient data."""

    def __init__(self, md: ModelDescriptor):
        self.descriptor = md
        self.kind = md.kind
        self.n = md.n
        self.label = md.label
        self.max_weight = md.max_weight
        if md.kind == "free":
            self.pres: Presentation = free_presentation(md.n)
            self.calc: Calculus = UniversalCalculus(self.pres)
            self.ambient = None
        elif md.kind == "theta_plane":
            self.pres = theta_presentation(md.n)
            self.calc = ThetaCalculus(self.pres)
            self.ambient = self.calc
        else:
            self.pres = sphere_presentation(md.n)
            self.calc = ThetaCalculus(self.pres)
            self.ambient = ThetaCalculus(self.pres, central=False)
        self.acs: ACS = standard_acs(self.calc)
        self.ambient_acs: ACS | None = None
        if self.ambient is not None:
            self.ambient_acs = self.acs if self.ambient is self.calc else standard_acs(self.ambient)
        self.relations: list = []  # (name, form, bidegree or None)
        self.r2: Form | None = None
        if self.quotient:
            self._setup_quotient()
        self._spaces: dict = {}
        self.lift_margin = md.n + 2
        self.blocks: dict = {}

    # -- structure ------------------------------------------------------------
    @property
    def quotient(self) -> bool:
        return self.kind in ("theta_sphere", "theta_projective")

    @property
    def bigraded_relations(self) -> bool:
        return self.kind != "theta_sphere"

    def z_ids(self) -> list:
        return [g.id for g in self.pres.generators if g.kind == "z"]

    def zb_ids(self) -> list:
        return [g.id for g in self.pres.generators if g.kind == "zbar"]

    def _setup_quotient(self) -> None:
        amb = self.ambient
        k = self.n + 1
        r2 = amb.zero()
        dl = amb.zero()
        db = amb.zero()
        for mu in range(k):
            z, zb = amb.fn(mu), amb.fn(k + mu)
            r2 = r2 + z * zb
            dl = dl + amb.dfn(mu) * zb
            db = db + z * amb.dfn(k + mu)
        self.r2 = r2
        if self.kind == "theta_sphere":
            self.relations = [("d_r2", dl + db, None)]
        else:
            self.relations = [("del_r2", dl, (1, 0)), ("dbar_r2", db, (0, 1))]

    def to_ambient(self, a: Form) -> Form:
        if self.ambient is None or a.calc is self.ambient:
            return a
        return Form(self.ambient, a.terms, _normal=True)

    def from_ambient(self, a: Form) -> Form:
        if self.ambient is None or a.calc is self.calc:
            return a
        return Form(self.calc, a.terms)

    # -- homogeneous words ------------------------------------------------------
    def words(self, a: int, b: int, degree: int | None = None, bidegree: tuple | None = None,
              torus: tuple | None = None) -> list:
        """Normal ambient words of letter weights ``(a, b)`` in a degree or bidegree."""
        if self.ambient is None:
            raise ValueError("homogeneous words are defined for theta models only")
        if a < 0 or b < 0:
            return []
        zs, zbs = self.z_ids(), self.zb_ids()
        if bidegree is not None:
            splits = [bidegree]
        elif degree is not None:
            splits = [(p, degree - p) for p in range(degree + 1)]
        else:
            raise ValueError("need a degree or a bidegree")
        out = []
        for p, q in splits:
            if p < 0 or q < 0 or p > a or q > b or p > len(zs) or q > len(zbs):
                continue
            for S in combinations(zs, p):
                for T in combinations(zbs, q):
                    forms = tuple(2 * g + 1 for g in S + T)
                    for fz in combinations_with_replacement(zs, a - p):
                        for fb in combinations_with_replacement(zbs, b - q):
                            w = tuple(2 * g for g in fz + fb) + forms
                            if torus is not None and self.ambient.torus_weight(w) != torus:
                                continue
                            out.append(w)
        out.sort()
        return out

    def relation_forms(self, a: int, b: int, degree: int | None = None,
                       bidegree: tuple | None = None, torus: tuple | None = None) -> list:
        """Relation generators times lower basis words, on both sides."""
        out = []
        if not self.relations:
            return out
        for _, g, gbd in self.relations:
            if bidegree is not None:
                if gbd is None:
                    raise ValueError("relation is not bigraded")
                sub = dict(bidegree=(bidegree[0] - gbd[0], bidegree[1] - gbd[1]))
                if min(sub["bidegree"]) < 0:
                    continue
            else:
                if degree < 1:
                    continue
                sub = dict(degree=degree - 1)
            for w in self.words(a - 1, b - 1, torus=torus, **sub):
                beta = Form(self.ambient, {w: ONE}, _normal=True)
                out.append(g * beta)
                out.append(beta * g)
        return out

    def relation_space(self, a: int, b: int, degree: int, bidegree: tuple | None, torus: tuple) -> tuple:
        key = (a, b, degree, bidegree, torus)
        got = self._spaces.get(key)
        if got is None:
            words = self.words(a, b, degree=degree, bidegree=bidegree, torus=torus)
            index = {w: i for i, w in enumerate(words)}
            space = RowSpace()
            for f in self.relation_forms(a, b, degree=degree, bidegree=bidegree, torus=torus):
                space.add({index[w]: c for w, c in f.terms.items()})
            got = (index, space)
            self._spaces[key] = got
        return got

    # -- equality in the model ------------------------------------------------------
    def homogenize(self, a: Form) -> list:
        """Split ``a`` into homogeneous representatives.

        Returns ``(degree, bidegree, (a, b), form)`` pieces, one per
        (degree, charge, bidegree) group, each lifted to the top level of
        its group by powers of ``r2``.
        """
        amb = self.ambient
        a = self.to_ambient(a)
        groups: dict = {}
        for w, c in a.terms.items():
            wa, wb = amb.weights(w)
            k = sum(x & 1 for x in w)
            bd = amb.bidegree(w) if self.bigraded_relations else None
            groups.setdefault((k, bd, wa - wb), []).append((wa + wb, w, c))
        out = []
        for (k, bd, charge), items in sorted(groups.items(), key=lambda t: repr(t[0])):
            top = max(lvl for lvl, _, _ in items)
            acc = amb.zero()
            powers: dict = {}
            for lvl, w, c in items:
                e = (top - lvl) // 2
                if e not in powers:
                    powers[e] = self.r2 ** e if e else amb.one()
                acc = acc + powers[e] * Form(amb, {w: c}, _normal=True)
            out.append((k, bd, ((top + charge) // 2, (top - charge) // 2), acc))
        return out

    def is_zero(self, a: Form) -> bool:
        if not self.quotient:
            return a.is_zero()
        if a.is_zero():
            return True
        return all(self._piece_is_zero(k, bd, wa, wb, f)
                   for k, bd, (wa, wb), f in self.homogenize(a))

    def _piece_is_zero(self, k: int, bd, wa: int, wb: int, f: Form) -> bool:
        """Membership in the relation span, retried after multiplying by
        ``r2`` (a unit in the quotient) up to ``lift_margin`` times; low
        levels may not yet contain relations generated higher up."""
        for e in range(self.lift_margin + 1):
            if e:
                f = self.r2 * f
            by_torus: dict = {}
            for w, c in f.terms.items():
                by_torus.setdefault(self.ambient.torus_weight(w), {})[w] = c
            if all(self._in_span(wa + e, wb + e, k, bd, t, terms) for t, terms in by_torus.items()):
                return True
        return False

    def _in_span(self, wa, wb, k, bd, t, terms) -> bool:
        index, space = self.relation_space(wa, wb, k, bd, t)
        return space.contains({index[w]: c for w, c in terms.items()})

    def equal(self, a: Form, b: Form) -> bool:
        return self.is_zero(self.to_ambient(a) - self.to_ambient(b))

    def __repr__(self) -> str:
        return f"Model({self.label})"


def build(md: ModelDescriptor | str, n: int | None = None, **options) -> Model:
    if isinstance(md, str):
        md = ModelDescriptor(md, n if n is not None else 1, **options)
    return Model(md)


def line_module(model: Model, m: int, bound: int = 3):
    """Grade-``m`` component of the sphere algebra with ambient delbar."""
    from .holmod import DbarModule

    if model.kind not in ("theta_sphere", "theta_projective"):
        raise ValueError("line modules live on the sphere or projective models")
    if abs(m) > bound:
        raise ValueError(f"|m|={abs(m)} exceeds the configured bound {bound}")
    return DbarModule.line(model, m)


def matmul_forms(a: list, b: list) -> list:
    rows, inner, cols = len(a), len(b), len(b[0])
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = a[i][0] * b[0][j]
            for k in range(1, inner):
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def projectors(model: Model) -> tuple:
    """``P_{mu nu} = delta - z^mu zbar^nu`` and ``Q_{mu nu} = delta - zbar^mu z^nu``
    as matrices of sphere-algebra elements."""
    calc = model.calc
    k = model.n + 1
    P = [[(calc.one() if i == j else calc.zero()) - calc.fn(i) * calc.fn(k + j) for j in range(k)]
         for i in range(k)]
    Q = [[(calc.one() if i == j else calc.zero()) - calc.fn(k + i) * calc.fn(j) for j in range(k)]
         for i in range(k)]
    return P, Q


def iter_models(kinds: Iterable[str], ns: Iterable[int]) -> list:
    return [build(ModelDescriptor(k, n)) for k in kinds for n in ns]
