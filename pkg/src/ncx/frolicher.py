"""The Hodge to de Rham spectral sequence on weight blocks.

A :class:`Bicomplex` holds finite spaces ``C^{p,q}`` (optionally modulo
relation spans) with delbar images into ``C^{p,q+1}`` and del images into
``C^{p+1,q}``.  ``E_1`` is delbar cohomology, ``d_1`` is induced by del on
delbar cycles, and ``E_2`` is the homology of ``(E_1, d_1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import cohomology as co
from .calculus import Form
from .linalg import ExactMatrix, RowSpace, kernel, rank
from .scalar import ONE, Scalar

__all__ = [
    "Bicomplex",
    "SpectralPage",
    "e1_page",
    "e2_page",
    "euler",
    "frolicher_check",
    "filtration_compatible",
    "synthetic_bicomplex",
    "HolomorphicFormsDbar",
    "nabla_on_holomorphic_forms",
]

_combine = co._combine


@dataclass
class Bicomplex:
    dims: dict  # (p, q) -> ambient dimension
    dbar: dict  # (p, q) -> list of image vectors in C^{p, q+1}
    delta: dict  # (p, q) -> list of image vectors in C^{p+1, q}
    relations: dict = field(default_factory=dict)
    label: str = ""

    def rel(self, pq) -> list:
        return self.relations.get(pq, [])

    def quotient_dim(self, pq) -> int:
        return self.dims.get(pq, 0) - rank(self.rel(pq))

    def boundaries(self, pq) -> list:
        p, q = pq
        return list(self.dbar.get((p, q - 1), [])) + list(self.rel(pq))

    @classmethod
    def from_model(cls, model, a: int, b: int, bound: int | None = None) -> "Bicomplex":
        dims, dbar, delta, rels = {}, {}, {}, {}
        top = model.n + 1
        for p in range(min(a, top) + 1):
            for q in range(min(b, top) + 1):
                key = co.BlockKey.dolbeault(model.label, p, q, a, b)
                blk = co.enumerate_block(model, key, bound)
                if not len(blk):
                    continue
                dims[(p, q)] = len(blk)
                rels[(p, q)] = blk.relations
                dbar[(p, q)] = co.operator_images(model, "dbar", key, bound)[2]
                delta[(p, q)] = co.operator_images(model, "del", key, bound)[2]
        return cls(dims, dbar, delta, rels, f"{model.label}[a={a}, b={b}]")


@dataclass
class SpectralPage:
    r: int
    entries: dict  # (p, q) -> dimension
    reps: dict = field(default_factory=dict)  # (p, q) -> cycle vectors
    differentials: dict = field(default_factory=dict)  # (p, q) -> ExactMatrix
    ranks: dict = field(default_factory=dict)  # (p, q) -> rank of outgoing d_r

    def euler(self) -> int:
        return sum((-1) ** (p + q) * v for (p, q), v in self.entries.items())

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "entries": {f"{p},{q}": v for (p, q), v in sorted(self.entries.items())},
        }


def _dbar_cycles(bc: Bicomplex, pq) -> list:
    p, q = pq
    imgs = bc.dbar.get(pq, [])
    tgt_rel = bc.rel((p, q + 1))
    n = len(imgs)
    out = []
    for rel in kernel(list(imgs) + list(tgt_rel)):
        z = {i: c for i, c in rel.items() if i < n}
        if z:
            out.append(z)
    return out


def e1_page(bc: Bicomplex) -> SpectralPage:
    entries, reps, diffs, ranks = {}, {}, {}, {}
    for pq in sorted(bc.dims):
        p, q = pq
        out_r = rank(list(bc.dbar.get(pq, [])) + list(bc.rel((p, q + 1)))) - rank(bc.rel((p, q + 1)))
        in_r = rank(bc.boundaries(pq)) - rank(bc.rel(pq))
        entries[pq] = bc.quotient_dim(pq) - out_r - in_r
        reps[pq] = _dbar_cycles(bc, pq)
    for pq in sorted(bc.dims):
        p, q = pq
        tgt = (p + 1, q)
        imgs = [_combine(bc.delta[pq], z) if pq in bc.delta else {} for z in reps[pq]]
        diffs[pq] = ExactMatrix(bc.dims.get(tgt, 0), imgs)
        bnd = bc.boundaries(tgt)
        ranks[pq] = rank(imgs + bnd) - rank(bnd) if tgt in bc.dims else 0
    return SpectralPage(1, entries, reps, diffs, ranks)


def e2_page(e1: SpectralPage) -> SpectralPage:
    entries = {}
    for (p, q), v in e1.entries.items():
        entries[(p, q)] = v - e1.ranks.get((p, q), 0) - e1.ranks.get((p - 1, q), 0)
    return SpectralPage(2, entries)


def d1_squares_to_zero(bc: Bicomplex, e1: SpectralPage) -> bool:
    for pq, mat in e1.differentials.items():
        p, q = pq
        tgt, tgt2 = (p + 1, q), (p + 2, q)
        if tgt not in bc.delta or tgt2 not in bc.dims:
            continue
        space = RowSpace().extend(bc.boundaries(tgt2))
        for col in mat.cols:
            if not space.contains(_combine(bc.delta[tgt], col)):
                return False
    return True


def euler(dims) -> int:
    return sum((-1) ** k * v for k, v in enumerate(dims))


def frolicher_check(model, a: int, b: int, bound: int | None = None) -> dict:
    """E_1, E_2 and de Rham dims at one weight block, with consistency verdicts."""
    bc = Bicomplex.from_model(model, a, b, bound)
    e1 = e1_page(bc)
    e2 = e2_page(e1)
    dr = co.derham_dims(model, a, b, bound)
    return {
        "a": a,
        "b": b,
        "E1": e1.to_json()["entries"],
        "E2": e2.to_json()["entries"],
        "derham": dr,
        "euler_E1": e1.euler(),
        "euler_E2": e2.euler(),
        "euler_derham": euler(dr),
        "euler_agrees": e1.euler() == euler(dr) == e2.euler(),
        "d1_squared_zero": d1_squares_to_zero(bc, e1),
        "d1_zero": all(v == 0 for v in e1.ranks.values()),
        "filtration_compatible": filtration_compatible(model, a, b, bound),
    }


def filtration_compatible(model, a: int, b: int, bound: int | None = None) -> bool:
    """``d(F^p) in F^p``: d of a (p, q) word has no component of lower p."""
    amb = model.ambient
    for key in co.chain_keys(model, "d", a, b):
        src, tgt, imgs = co.operator_images(model, "d", key, bound)
        if tgt is None:
            continue
        for w, img in zip(src.basis, imgs):
            p = amb.bidegree(w)[0]
            if any(amb.bidegree(tgt.basis[i])[0] < p for i in img):
                return False
    return True


def synthetic_bicomplex(rng, dims: dict | None = None) -> Bicomplex:
    """Negative control: delbar = 0 and a random del from ``C^{0,0}``."""
    dims = dims or {(0, 0): 2, (1, 0): 3, (0, 1): 1, (1, 1): 1}
    dbar = {pq: [{} for _ in range(n)] for pq, n in dims.items()}
    delta = {pq: [{} for _ in range(n)] for pq, n in dims.items()}
    src, tgt = (0, 0), (1, 0)
    cols = []
    for _ in range(dims[src]):
        col = {}
        for i in range(dims[tgt]):
            v = int(rng.integers(-3, 4))
            if v:
                col[i] = Scalar(v)
        cols.append(col)
    if not any(cols):
        cols[0] = {0: ONE}
    delta[src] = cols
    return Bicomplex(dims, dbar, delta, {}, "synthetic")


# ---------------------------------------------------------------------------
# delbar operator on holomorphic forms through Theta


class HolomorphicFormsDbar:
    """``nabla = Theta^{p, q+1} delbar wedge`` on ``Omega^{0,q} (x) Omega^{p,0}``."""

    def __init__(self, model, p: int):
        co._check_theta_model(model)
        self.model = model
        self.p = p
        self.calc = model.ambient

    def __call__(self, t: co.TensorForm) -> co.TensorForm:
        f = co.wedge_tensor(t)
        return co.theta_pq(self.model, co.apply_operator(self.model, "dbar", f))

    def on_forms(self, e: Form) -> co.TensorForm:
        """``nabla e = Theta^{p,1}(delbar e)`` for ``e`` in ``Omega^{p,0}``."""
        return co.theta_pq(self.model, co.apply_operator(self.model, "dbar", e))

    def leibniz(self, t: co.TensorForm) -> co.TensorForm:
        """``delbar xi (x) e + (-1)^q xi /\\ nabla e``, summed over the pieces."""
        out = co.TensorForm(self.calc)
        for left, right in t.pieces():
            q = left.degree() if left.terms else 0
            dxi = co.apply_operator(self.model, "dbar", left)
            out = out + co.TensorForm.from_pair(dxi, right)
            term = self.on_forms(right).left_wedge(left)
            out = out + (term if q % 2 == 0 else term.scale(-ONE))
        return out

    def basis(self, q: int, a: int, b: int, bound: int | None = None) -> list:
        key = co.BlockKey.dolbeault(self.model.label, self.p, q, a, b)
        blk = co.enumerate_block(self.model, key, bound)
        keys = []
        for w in blk.basis:
            t = co.theta_pq(self.model, Form(self.calc, {w: ONE}, _normal=True))
            (k, _), = t.terms.items()
            keys.append(k)
        return sorted(keys)

    def images(self, q: int, a: int, b: int, bound: int | None = None) -> list:
        src = self.basis(q, a, b, bound)
        tgt = {k: i for i, k in enumerate(self.basis(q + 1, a, b, bound))}
        out = []
        for k in src:
            img = self(co.TensorForm(self.calc, {k: ONE}))
            out.append({tgt[x]: c for x, c in img.terms.items()})
        return out

    def curvature_zero(self, q: int, a: int, b: int, bound: int | None = None) -> bool:
        for k in self.basis(q, a, b, bound):
            if not self(self(co.TensorForm(self.calc, {k: ONE}))).is_zero():
                return False
        return True

    def cohomology_dims(self, a: int, b: int, bound: int | None = None) -> list:
        qs = list(range(min(b, self.model.n + 1) + 1))
        sizes = [len(self.basis(q, a, b, bound)) for q in qs]
        ranks = [rank(self.images(q, a, b, bound)) for q in qs]
        return [sizes[i] - ranks[i] - (ranks[i - 1] if i else 0) for i in range(len(qs))]


def nabla_on_holomorphic_forms(model, p: int) -> HolomorphicFormsDbar:
    return HolomorphicFormsDbar(model, p)
