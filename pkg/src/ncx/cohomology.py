"""Finite blocks of forms, operator matrices and cohomology dimensions.

A block fixes the degree (or bidegree) and the letter weights ``(a, b)``:
``a`` counts z-type letters (functions and differentials), ``b`` counts
zbar-type letters.  d, del, delbar and J preserve ``(a, b)`` on the theta
models, so every complex splits into finite blocks.  For quotient models
the block carries the span of relations; dimensions and ranks are those of
the quotient, computed from ranks of ambient vector families only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import acs as _acs
from .calculus import Form, d as _d
from .linalg import ExactMatrix, RowSpace, kernel, numeric_rank, rank
from .scalar import ONE

__all__ = [
    "TruncationExceeded",
    "IllDefinedOnQuotient",
    "NotApplicable",
    "BlockKey",
    "Block",
    "enumerate_block",
    "apply_operator",
    "operator_matrix",
    "operator_images",
    "chain_keys",
    "cohomology_dims",
    "numeric_cohomology_dims",
    "derham_dims",
    "dolbeault_dims",
    "dolbeault_table",
    "derham_table",
    "TensorForm",
    "theta_pq",
    "wedge_tensor",
    "cycles",
]

OPS = ("d", "del", "dbar", "J")


class TruncationExceeded(ValueError):
    """Requested weights lie beyond the configured truncation bound."""


class IllDefinedOnQuotient(ValueError):
    """An operator does not preserve the relation span of a quotient block."""


class NotApplicable(ValueError):
    """The wedge/Theta isomorphism is not configured for this model."""


@dataclass(frozen=True, order=True)
class BlockKey:
    model: str
    degree: int
    a: int
    b: int
    bidegree: tuple | None = None

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise ValueError("weights must be non-negative")
        if self.bidegree is not None:
            p, q = self.bidegree
            if p < 0 or q < 0 or p + q != self.degree:
                raise ValueError(f"inconsistent bidegree {self.bidegree} for degree {self.degree}")
        if self.degree < 0:
            raise ValueError("degree must be non-negative")

    @classmethod
    def dolbeault(cls, model: str, p: int, q: int, a: int, b: int) -> "BlockKey":
        return cls(model, p + q, a, b, (p, q))

    @classmethod
    def derham(cls, model: str, k: int, a: int, b: int) -> "BlockKey":
        return cls(model, k, a, b, None)

    @property
    def p(self):
        return None if self.bidegree is None else self.bidegree[0]

    @property
    def q(self):
        return None if self.bidegree is None else self.bidegree[1]

    def target(self, op: str) -> "BlockKey":
        if op == "J":
            return self
        if op == "d":
            if self.bidegree is not None:
                raise ValueError("d does not preserve bidegree blocks; use a degree block")
            return BlockKey(self.model, self.degree + 1, self.a, self.b)
        if self.bidegree is None:
            raise ValueError(f"{op} needs a bidegree block")
        p, q = self.bidegree
        if op == "dbar":
            return BlockKey.dolbeault(self.model, p, q + 1, self.a, self.b)
        if op == "del":
            return BlockKey.dolbeault(self.model, p + 1, q, self.a, self.b)
        raise ValueError(f"unknown operator {op!r}")

    def label(self) -> str:
        deg = f"({self.p},{self.q})" if self.bidegree is not None else str(self.degree)
        return f"{self.model}[{deg}; a={self.a}, b={self.b}]"

    def to_json(self) -> dict:
        out = {"model": self.model, "degree": self.degree, "a": self.a, "b": self.b}
        if self.bidegree is not None:
            out["bidegree"] = list(self.bidegree)
        return out


@dataclass
class Block:
    key: BlockKey
    basis: list
    relations: list = field(default_factory=list)
    _rank_rel: int | None = None
    _space: RowSpace | None = None

    def __post_init__(self):
        self.index = {w: i for i, w in enumerate(self.basis)}

    def __len__(self) -> int:
        return len(self.basis)

    @property
    def ambient_dim(self) -> int:
        return len(self.basis)

    @property
    def relation_rank(self) -> int:
        if self._rank_rel is None:
            self._rank_rel = rank(self.relations)
        return self._rank_rel

    @property
    def dim(self) -> int:
        return len(self.basis) - self.relation_rank

    def relation_space(self) -> RowSpace:
        if self._space is None:
            self._space = RowSpace().extend(self.relations)
        return self._space

    def vector(self, f: Form) -> dict:
        out = {}
        for w, c in f.terms.items():
            i = self.index.get(w)
            if i is None:
                raise ValueError(f"word {w} lies outside block {self.key.label()}")
            out[i] = c
        return out

    def form(self, calc, v: dict) -> Form:
        return Form(calc, {self.basis[i]: c for i, c in v.items()}, _normal=True)

    def in_relations(self, v: dict) -> bool:
        if not v:
            return True
        if not self.relations:
            return False
        return self.relation_space().contains(v)


def enumerate_block(model, key: BlockKey, bound: int | None = None) -> Block:
    """Basis words and relation vectors of a block (cached on the model)."""
    if model.ambient is None:
        raise NotApplicable("blocks are defined for theta models only")
    limit = model.max_weight if bound is None else bound
    if key.a + key.b > limit:
        raise TruncationExceeded(f"a+b={key.a + key.b} exceeds the truncation bound {limit}")
    cached = model.blocks.get(key)
    if cached is not None:
        return cached
    if key.bidegree is not None and not model.bigraded_relations:
        raise IllDefinedOnQuotient(
            f"{model.label}: the relation d(r2) is not of pure type, bidegree blocks do not descend"
        )
    kw = dict(bidegree=key.bidegree) if key.bidegree is not None else dict(degree=key.degree)
    basis = model.words(key.a, key.b, **kw)
    blk = Block(key, basis)
    rels = []
    for f in model.relation_forms(key.a, key.b, **kw):
        v = blk.vector(f)
        if v:
            rels.append(v)
    blk.relations = rels
    # distinct keys never collide, so concurrent insertion is safe
    model.blocks[key] = blk
    return blk


def apply_operator(model, op: str, f: Form) -> Form:
    j = model.ambient_acs
    if op == "d":
        return _d(f)
    if op == "dbar":
        return _acs.dbar(j, f)
    if op == "del":
        return _acs.partial(j, f)
    if op == "J":
        return _acs.apply_J(j, f)
    raise ValueError(f"unknown operator {op!r}; expected one of {OPS}")


def operator_images(model, op: str, key: BlockKey, bound: int | None = None,
                    check: bool = True) -> tuple:
    """Images of the source basis as target vectors: ``(source, target, vectors)``."""
    src = enumerate_block(model, key, bound)
    tkey = key.target(op)
    tgt = _target_block(model, tkey, bound)
    amb = model.ambient
    cache_key = ("images", op, key)
    got = model.blocks.get(cache_key)
    if got is None:
        got = []
        for w in src.basis:
            img = apply_operator(model, op, Form(amb, {w: ONE}, _normal=True))
            got.append(tgt.vector(img) if tgt is not None else {})
        model.blocks[cache_key] = got
    if check and src.relations:
        for r in src.relations:
            img = _combine(got, r)
            if img and (tgt is None or not tgt.in_relations(img)):
                raise IllDefinedOnQuotient(
                    f"{op} does not preserve the relation span at {key.label()}"
                )
    return src, tgt, got


def _target_block(model, tkey: BlockKey, bound):
    if tkey.degree > 2 * (model.n + 1):
        return None
    try:
        return enumerate_block(model, tkey, bound)
    except TruncationExceeded:
        raise


def _combine(vectors: Sequence[dict], coeffs: dict) -> dict:
    out: dict = {}
    for i, c in coeffs.items():
        for k, x in vectors[i].items():
            v = out.get(k)
            v = c * x if v is None else v + c * x
            if v:
                out[k] = v
            else:
                out.pop(k, None)
    return out


def operator_matrix(model, op: str, key: BlockKey, bound: int | None = None) -> ExactMatrix:
    """Matrix of ``op`` from block ``key`` in ambient representative bases.

    Rows index the target basis; for quotient blocks columns are taken
    modulo the target relation span, which the source relations are checked
    to map into (otherwise :class:`IllDefinedOnQuotient`).
    """
    src, tgt, imgs = operator_images(model, op, key, bound)
    return ExactMatrix(len(tgt) if tgt is not None else 0, imgs)


def chain_keys(model, op: str, a: int, b: int, p: int | None = None) -> list:
    """Consecutive block keys of the ``op`` complex at weights ``(a, b)``."""
    top = 2 * (model.n + 1)
    if op == "d":
        return [BlockKey.derham(model.label, k, a, b) for k in range(min(a + b, top) + 1)]
    if op == "dbar":
        return [BlockKey.dolbeault(model.label, p, q, a, b) for q in range(min(b, model.n + 1) + 1)
                if p <= a and p <= model.n + 1]
    if op == "del":
        raise ValueError("use dbar chains; del chains are reached through dolbeault_table")
    raise ValueError(f"no complex for operator {op!r}")


def _rank_fn(theta):
    if theta is None:
        return lambda vs: rank(vs)
    return lambda vs: numeric_rank(vs, None, theta)


def cohomology_dims(model, op: str, keys: Sequence[BlockKey], bound: int | None = None,
                    theta=None, check: bool = True) -> list:
    """``dim H`` at each key of a chain, using ranks only.

    With relation spans ``R`` and basis images ``Op C``:
    ``H^q = dim C^q - (r[Op C^q, R^{q+1}] - r R^{q+1}) - (r[Op C^{q-1}, R^q] - r R^q)``.
    Supplying ``theta`` evaluates every rank numerically instead.
    """
    rk = _rank_fn(theta)
    blocks = [enumerate_block(model, k, bound) for k in keys]
    rel_rank = [rk(b.relations) for b in blocks]
    out_rank = []
    for i, k in enumerate(keys):
        src, tgt, imgs = operator_images(model, op, k, bound, check=check)
        if tgt is None:
            out_rank.append(0)
            continue
        trel = tgt.relations
        trr = rel_rank[i + 1] if i + 1 < len(blocks) and blocks[i + 1] is tgt else rk(trel)
        out_rank.append(rk(list(imgs) + list(trel)) - trr)
    dims = []
    for i, b in enumerate(blocks):
        incoming = out_rank[i - 1] if i > 0 else 0
        dims.append(len(b.basis) - rel_rank[i] - out_rank[i] - incoming)
    return dims


def numeric_cohomology_dims(model, op: str, keys: Sequence[BlockKey], theta, bound=None) -> list:
    return cohomology_dims(model, op, keys, bound, theta=theta, check=False)


def derham_dims(model, a: int, b: int, bound: int | None = None, theta=None) -> list:
    return cohomology_dims(model, "d", chain_keys(model, "d", a, b), bound, theta=theta)


def dolbeault_dims(model, p: int, a: int, b: int, bound: int | None = None, theta=None) -> list:
    keys = chain_keys(model, "dbar", a, b, p)
    if not keys:
        return []
    return cohomology_dims(model, "dbar", keys, bound, theta=theta)


def cycles(model, op: str, key: BlockKey, bound: int | None = None) -> list:
    """Source vectors whose image lies in the target relation span."""
    src, tgt, imgs = operator_images(model, op, key, bound)
    if tgt is None:
        return [{i: ONE} for i in range(len(src))]
    fam = list(imgs) + list(tgt.relations)
    nb = len(imgs)
    out = []
    for rel in kernel(fam):
        z = {i: c for i, c in rel.items() if i < nb}
        if z:
            out.append(z)
    return out


def _weights(model, max_weight: int, charge: int | None = None):
    for s in range(max_weight + 1):
        for a in range(s + 1):
            b = s - a
            if charge is not None and a - b != charge:
                continue
            yield a, b


def dolbeault_table(model, max_weight: int | None = None) -> dict:
    """``{(p, q): {(a, b): dim}}`` plus entries that do not descend.

    On projective space only invariant weights ``a = b`` are used and only
    the ``p = 0`` rows descend along delbar.
    """
    mw = model.max_weight if max_weight is None else max_weight
    charge = 0 if model.kind == "theta_projective" else None
    table: dict = {}
    ill: dict = {}
    for a, b in _weights(model, mw, charge):
        for p in range(min(a, model.n + 1) + 1):
            try:
                dims = dolbeault_dims(model, p, a, b, bound=mw)
            except IllDefinedOnQuotient as e:
                ill[(p, a, b)] = str(e)
                continue
            for q, v in enumerate(dims):
                table.setdefault((p, q), {})[(a, b)] = v
    return {"dims": table, "ill_defined": ill}


def derham_table(model, max_weight: int | None = None) -> dict:
    mw = model.max_weight if max_weight is None else max_weight
    charge = 0 if model.kind == "theta_projective" else None
    table: dict = {}
    ill: dict = {}
    for a, b in _weights(model, mw, charge):
        try:
            dims = derham_dims(model, a, b, bound=mw)
        except IllDefinedOnQuotient as e:
            ill[(a, b)] = str(e)
            continue
        for k, v in enumerate(dims):
            table.setdefault(k, {})[(a, b)] = v
    return {"dims": table, "ill_defined": ill}


# ---------------------------------------------------------------------------
# Theta^{p,q}: Omega^{p,q} -> Omega^{0,q} (x)_A Omega^{p,0}


class TensorForm:
    """Element of ``Omega^{0,q} (x)_A Omega^{p,0}`` in the normal form
    ``sum c (f dzbar_T) (x) dz_S``: functions sit in the left factor and the
    right factor is a bare word of dz letters."""

    __slots__ = ("calc", "terms")

    def __init__(self, calc, terms: dict | None = None):
        self.calc = calc
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    @classmethod
    def from_pair(cls, left: Form, right: Form) -> "TensorForm":
        """Normalize ``left (x) right`` by moving functions of ``right`` left."""
        calc = left.calc
        out: dict = {}
        for rw, rc in right.terms.items():
            funcs = tuple(x for x in rw if not x & 1)
            odd = tuple(x for x in rw if x & 1)
            lf = left * Form(calc, {funcs: rc}, _normal=True) if funcs else left.scale(rc)
            for lw, lc in lf.terms.items():
                k = (lw, odd)
                v = out.get(k)
                v = lc if v is None else v + lc
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        return cls(calc, out)

    def __add__(self, other: "TensorForm") -> "TensorForm":
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t[k] + v if k in t else v
        return TensorForm(self.calc, t)

    def __sub__(self, other: "TensorForm") -> "TensorForm":
        return self + other.scale(-ONE)

    def scale(self, s) -> "TensorForm":
        return TensorForm(self.calc, {k: s * v for k, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, TensorForm) and self.terms == other.terms

    def left_wedge(self, xi: Form) -> "TensorForm":
        """``xi /\\ (eta (x) e) = (xi /\\ eta) (x) e``."""
        out = TensorForm(self.calc)
        for (lw, rw), c in self.terms.items():
            lf = xi * Form(self.calc, {lw: c}, _normal=True)
            out = out + TensorForm(self.calc, {(w, rw): v for w, v in lf.terms.items()})
        return out

    def pieces(self):
        for (lw, rw), c in self.terms.items():
            yield Form(self.calc, {lw: c}, _normal=True), Form(self.calc, {rw: ONE}, _normal=True)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (lw, rw), c in sorted(self.terms.items()):
            left = self.calc.word_str(lw) or "1"
            right = self.calc.word_str(rw) or "1"
            parts.append(f"({c}) * {left} (x) {right}")
        return " + ".join(parts)

    __repr__ = __str__


def _check_theta_model(model) -> None:
    if model.kind != "theta_plane":
        raise NotApplicable(
            f"{model.label}: wedge is configured as an isomorphism only on the theta plane"
        )


def theta_pq(model, a: Form) -> TensorForm:
    """Move every dzbar letter left of the dz letters and split there."""
    _check_theta_model(model)
    calc = model.ambient
    a = model.to_ambient(a)
    kinds = {g.id: g.kind for g in model.pres.generators}
    out: dict = {}
    for w, c in a.terms.items():
        funcs = tuple(x for x in w if not x & 1)
        S = tuple(x for x in w if x & 1 and kinds[x >> 1] == "z")
        T = tuple(x for x in w if x & 1 and kinds[x >> 1] == "zbar")
        if funcs + S + T != w:
            raise ValueError("form is not in normal order")
        # funcs T S = k * funcs S T, so funcs S T = k^{-1} (funcs T) (x) S
        (nw, k), = calc.normalize(funcs + T + S)
        coef = c * k.inverse()
        key = (funcs + T, S)
        v = out.get(key)
        v = coef if v is None else v + coef
        if v:
            out[key] = v
        else:
            out.pop(key, None)
    return TensorForm(calc, out)


def wedge_tensor(t: TensorForm) -> Form:
    acc = t.calc.zero()
    for left, right in t.pieces():
        acc = acc + left * right
    return acc
