"""Exact sparse linear algebra over the fraction field of Laurent polynomials.

Vectors are ``dict`` maps from coordinate index to nonzero :class:`Scalar`.
Entries never leave the Laurent ring: elimination uses unit pivots (single
term scalars, invertible in the ring) whenever possible and falls back to
fraction-free Bareiss steps otherwise.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .scalar import ONE, ZERO, Scalar

__all__ = ["ExactMatrix", "rank", "kernel", "RowSpace", "numeric_rank", "random_theta"]

Vec = dict


class ExactMatrix:
    """Sparse matrix stored by columns."""

    __slots__ = ("nrows", "ncols", "cols")

    def __init__(self, nrows: int, cols: Sequence[Vec]):
        self.nrows = nrows
        self.cols = [dict(c) for c in cols]
        self.ncols = len(self.cols)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "ExactMatrix":
        return cls(nrows, [{} for _ in range(ncols)])

    @classmethod
    def identity(cls, n: int, s: Scalar = ONE) -> "ExactMatrix":
        return cls(n, [{i: s} for i in range(n)])

    def __getitem__(self, ij) -> Scalar:
        i, j = ij
        return self.cols[j].get(i, ZERO)

    def is_zero(self) -> bool:
        return not any(self.cols)

    def rows(self) -> list:
        out = [dict() for _ in range(self.nrows)]
        for j, c in enumerate(self.cols):
            for i, v in c.items():
                out[i][j] = v
        return out

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.ncols, self.rows())

    def apply(self, v: Vec) -> Vec:
        out: dict = {}
        for j, x in v.items():
            for i, y in self.cols[j].items():
                _acc(out, i, x * y)
        return out

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return ExactMatrix(self.nrows, [self.apply(c) for c in other.cols])

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        cols = []
        for a, b in zip(self.cols, other.cols):
            c = dict(a)
            for i, v in b.items():
                _acc(c, i, v)
            cols.append(c)
        return ExactMatrix(self.nrows, cols)

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix(self.nrows, [{i: -v for i, v in c.items()} for c in self.cols])

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self + (-other)

    def __eq__(self, other) -> bool:
        return isinstance(other, ExactMatrix) and self.shape == other.shape and self.cols == other.cols

    @property
    def shape(self) -> tuple:
        return (self.nrows, self.ncols)

    def rank(self) -> int:
        return rank(self.cols)

    def numeric(self, theta) -> np.ndarray:
        a = np.zeros((self.nrows, self.ncols), dtype=complex)
        for j, c in enumerate(self.cols):
            for i, v in c.items():
                a[i, j] = v.eval_numeric(theta)
        return a

    def __repr__(self) -> str:
        nnz = sum(len(c) for c in self.cols)
        return f"ExactMatrix({self.nrows}x{self.ncols}, nnz={nnz})"


def _acc(t: dict, k, c) -> None:
    v = t.get(k)
    v = c if v is None else v + c
    if v:
        t[k] = v
    else:
        t.pop(k, None)


def _clean(v: Vec) -> Vec:
    return {c: x for c, x in v.items() if x}


def hstack(nrows: int, *mats: ExactMatrix) -> ExactMatrix:
    cols = []
    for m in mats:
        cols.extend(m.cols)
    return ExactMatrix(nrows, cols)


# ---------------------------------------------------------------------------
# rank


def _components(vectors: list) -> list:
    parent: dict = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for v in vectors:
        keys = list(v)
        r = find(keys[0])
        for k in keys[1:]:
            s = find(k)
            if s != r:
                parent[s] = r
    groups: dict = {}
    for v in vectors:
        groups.setdefault(find(next(iter(v))), []).append(v)
    return list(groups.values())


def _unit_eliminate(rows: list) -> tuple:
    """Eliminate with unit pivots; return (rank found, remaining rows)."""
    rows = [dict(r) for r in rows if r]
    found = 0
    by_col: dict = {}
    for idx, r in enumerate(rows):
        for c in r:
            by_col.setdefault(c, set()).add(idx)
    alive = set(range(len(rows)))
    while True:
        best = None
        for idx in alive:
            r = rows[idx]
            for c, v in r.items():
                if len(v) == 1:
                    key = (len(by_col[c]), len(r))
                    if best is None or key < best[0]:
                        best = (key, idx, c)
            if best is not None and best[0] == (1, 1):
                break
        if best is None:
            break
        _, pi, pc = best
        prow = rows[pi]
        inv = prow[pc].inverse()
        alive.discard(pi)
        for c in prow:
            by_col[c].discard(pi)
        found += 1
        for idx in list(by_col[pc]):
            r = rows[idx]
            f = r[pc] * inv
            for c, v in prow.items():
                old = r.get(c)
                new = -(f * v) if old is None else old - f * v
                if new:
                    if old is None:
                        by_col.setdefault(c, set()).add(idx)
                    r[c] = new
                elif old is not None:
                    del r[c]
                    by_col[c].discard(idx)
            if not r:
                alive.discard(idx)
    return found, [rows[i] for i in sorted(alive) if rows[i]]


def _bareiss_rank(rows: list) -> int:
    active = [dict(r) for r in rows if r]
    prev = ONE
    found = 0
    while active:
        best = None
        for ri, r in enumerate(active):
            for c, v in r.items():
                key = (len(v), len(r))
                if best is None or key < best[0]:
                    best = (key, ri, c)
        _, ri, pc = best
        prow = active.pop(ri)
        piv = prow[pc]
        unit_prev = prev.is_monomial()
        prev_inv = prev.inverse() if unit_prev else None

        def div(x):
            return x * prev_inv if unit_prev else x.exact_div(prev)

        nxt = []
        for r in active:
            a = r.get(pc)
            nr = {}
            if a is None:
                for c, v in r.items():
                    nr[c] = div(piv * v)
            else:
                for c in set(r) | set(prow):
                    if c == pc:
                        continue
                    val = piv * r.get(c, ZERO) - a * prow.get(c, ZERO)
                    if val:
                        nr[c] = div(val)
            if nr:
                nxt.append(nr)
        active = nxt
        prev = piv
        found += 1
    return found


def rank(vectors: Iterable[Vec]) -> int:
    """Exact rank of a family of sparse vectors."""
    vecs = [c for c in (_clean(v) for v in vectors) if c]
    if not vecs:
        return 0
    total = 0
    for comp in _components(vecs):
        k, rest = _unit_eliminate(comp)
        total += k
        if rest:
            for sub in _components(rest):
                total += _bareiss_rank(sub)
    return total


# ---------------------------------------------------------------------------
# incremental echelon space


class RowSpace:
    """Span of vectors with membership testing and optional relation tags.

    Each stored row has a pivot coordinate absent from all later rows.  A
    tag is a dict recording the combination of inserted vectors the row
    represents, so vectors reducing to zero yield kernel relations.
    """

    def __init__(self, track: bool = False):
        self.rows: list = []  # (pivot col, pivot value, row, tag)
        self.track = track

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, v: Vec, tag: Vec | None = None) -> tuple:
        v = _clean(v)
        tag = dict(tag) if tag is not None else None
        for pc, pv, row, rtag in self.rows:
            a = v.get(pc)
            if a is None:
                continue
            if pv.is_monomial():
                f = a * pv.inverse()
                for c, x in row.items():
                    _acc(v, c, -(f * x))
                if tag is not None:
                    for c, x in rtag.items():
                        _acc(tag, c, -(f * x))
            else:
                v = {c: pv * x for c, x in v.items()}
                for c, x in row.items():
                    _acc(v, c, -(a * x))
                if tag is not None:
                    tag = {c: pv * x for c, x in tag.items()}
                    for c, x in rtag.items():
                        _acc(tag, c, -(a * x))
        return v, tag

    def add(self, v: Vec, tag: Vec | None = None) -> Vec | None:
        """Insert ``v``; return None if it was independent, else its relation tag."""
        r, t = self.reduce(v, tag if self.track else None)
        if not r:
            return t if self.track else {}
        r, t = _strip_monomial(r, t)
        pc = min(r, key=lambda c: (len(r[c]), c))
        self.rows.append((pc, r[pc], r, t))
        return None

    def contains(self, v: Vec) -> bool:
        r, _ = self.reduce(v)
        return not r

    def extend(self, vectors: Iterable[Vec]) -> "RowSpace":
        for v in vectors:
            self.add(v)
        return self


def _strip_monomial(r: Vec, t: Vec | None) -> tuple:
    """Divide by a common unit factor to keep entries small."""
    first = next(iter(r.values()))
    if len(first) != 1:
        return r, t
    inv = first.inverse()
    r = {c: x * inv for c, x in r.items()}
    if t is not None:
        t = {c: x * inv for c, x in t.items()}
    return r, t


def kernel(vectors: Sequence[Vec]) -> list:
    """Basis of ``{c : sum_i c_i v_i = 0}`` as sparse coefficient vectors."""
    space = RowSpace(track=True)
    out = []
    for i, v in enumerate(vectors):
        rel = space.add(v, {i: ONE})
        if rel is not None:
            out.append(rel)
    return out


def span_dim(*families: Iterable[Vec]) -> int:
    vecs = []
    for f in families:
        vecs.extend(f)
    return rank(vecs)


# ---------------------------------------------------------------------------
# numerics


def random_theta(rng, n: int) -> np.ndarray:
    a = rng.uniform(-np.pi, np.pi, size=(n + 1, n + 1))
    a = np.triu(a, 1)
    return a - a.T


def numeric_rank(vectors: Sequence[Vec], nrows: int | None, theta, tol: float = 1e-8) -> int:
    vecs = [v for v in vectors if v]
    if not vecs:
        return 0
    rows = sorted({i for v in vecs for i in v})
    idx = {r: k for k, r in enumerate(rows)}
    a = np.zeros((len(rows), len(vecs)), dtype=complex)
    for j, v in enumerate(vecs):
        for i, x in v.items():
            a[idx[i], j] = x.eval_numeric(theta)
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0:
        return 0
    return int(np.sum(s > tol * max(1.0, float(s[0]))))
