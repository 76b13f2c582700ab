"""Differential forms, wedge, exterior derivative and star.

A form word is a tuple of letter codes: ``2*g`` is the function letter of
generator ``g`` and ``2*g + 1`` its differential ``dg``.  Letters carry the
parity of their code.

Two calculi share this encoding:

* :class:`ThetaCalculus` -- functions pushed left, form letters sorted, using
  the presentation's swap coefficients for every letter pair plus a sign
  when two odd letters pass each other.  Central rules of the presentation
  act on the function part.
* :class:`UniversalCalculus` -- the universal calculus of a free algebra,
  interleaved words with no rewriting at all.
"""

from __future__ import annotations

import re
from functools import lru_cache
from typing import Iterable, Mapping

from .algebra import NCPoly, Presentation, random_word, reduce_terms, render_terms
from .scalar import I, ONE, ZERO, Scalar, as_scalar, lam, random_scalar

__all__ = [
    "Form",
    "ThetaCalculus",
    "UniversalCalculus",
    "wedge",
    "d",
    "star_form",
    "universal_d",
    "universal_star",
    "epsilon",
    "parse_form",
    "parse_expression",
    "random_form",
]


def is_odd(code: int) -> bool:
    return bool(code & 1)


def gen_of(code: int) -> int:
    return code >> 1


class Calculus:
    """Common letter bookkeeping; subclasses provide :meth:`normalize`."""

    pres: Presentation
    universal = False

    def letter_name(self, code: int) -> str:
        name = self.pres.generators[code >> 1].name
        return "d" + name if code & 1 else name

    def letter_code(self, name: str) -> int:
        names = self.pres.names
        if name in names:
            return 2 * names[name]
        if name.startswith("d") and name[1:] in names:
            return 2 * names[name[1:]] + 1
        raise KeyError(name)

    def partner(self, code: int) -> int:
        return 2 * self.pres.generators[code >> 1].star_partner + (code & 1)

    def normalize(self, word: tuple) -> tuple:
        raise NotImplementedError

    def word_str(self, w: tuple) -> str:
        raise NotImplementedError

    # -- constructors -------------------------------------------------------
    def form(self, terms: Mapping | None = None) -> "Form":
        return Form(self, terms or {})

    def one(self) -> "Form":
        return Form(self, {(): ONE}, _normal=True)

    def zero(self) -> "Form":
        return Form(self, {}, _normal=True)

    def scalar(self, s) -> "Form":
        s = as_scalar(s)
        return Form(self, {(): s} if s else {}, _normal=True)

    def fn(self, name_or_id) -> "Form":
        g = self.pres.gen(name_or_id)
        return Form(self, {(2 * g,): ONE})

    def dfn(self, name_or_id) -> "Form":
        g = self.pres.gen(name_or_id)
        return Form(self, {(2 * g + 1,): ONE})

    def from_poly(self, a: NCPoly) -> "Form":
        return Form(self, {tuple(2 * x for x in w): c for w, c in a.terms.items()})

    def parse(self, text: str) -> "Form":
        return parse_form(self, text)

    def one_form_generators(self) -> list:
        return [2 * g.id + 1 for g in self.pres.generators]


class ThetaCalculus(Calculus):
    """Calculus whose relations mirror the algebra's swap coefficients."""

    def __init__(self, pres: Presentation, central: bool = True):
        if not pres.has_swap_closure:
            raise ValueError("theta calculus needs a presentation with swap closure")
        self.pres = pres
        self.central = central and bool(pres.central_rules)
        self._table = pres._swap_table
        self.normalize = lru_cache(maxsize=1 << 18)(self._normalize)

    def _normalize(self, word: tuple) -> tuple:
        w = list(word)
        n = len(w)
        c = ONE
        table = self._table
        # Insertion sort by (parity, generator); each transposition of
        # adjacent letters x y -> y x carries swap(x, y), and a sign for two
        # odd letters.
        for i in range(1, n):
            j = i
            while j > 0:
                x, y = w[j - 1], w[j]
                kx, ky = ((x & 1), x >> 1), ((y & 1), y >> 1)
                if kx <= ky:
                    break
                s = table[x >> 1][y >> 1]
                if x & 1 and y & 1:
                    s = -s
                c = c * s
                w[j - 1], w[j] = y, x
                j -= 1
        for i in range(1, n):
            if w[i] & 1 and w[i] == w[i - 1]:
                return ()
        word = tuple(w)
        if not self.central:
            return ((word, c),)
        m = 0
        while m < n and not w[m] & 1:
            m += 1
        func = tuple(x >> 1 for x in word[:m])
        red = reduce_terms(self.pres, {func: c})
        tail = word[m:]
        return tuple((tuple(2 * x for x in f) + tail, k) for f, k in red.items())

    def word_str(self, w: tuple) -> str:
        funcs = [self.letter_name(x) for x in w if not x & 1]
        odd = [self.letter_name(x) for x in w if x & 1]
        parts = funcs + (["^".join(odd)] if odd else [])
        return " ".join(parts)

    # -- gradings -----------------------------------------------------------
    def bidegree(self, w: tuple) -> tuple:
        gens = self.pres.generators
        p = sum(1 for x in w if x & 1 and gens[x >> 1].kind == "z")
        q = sum(1 for x in w if x & 1 and gens[x >> 1].kind == "zbar")
        return p, q

    def weights(self, w: tuple) -> tuple:
        gens = self.pres.generators
        a = sum(1 for x in w if gens[x >> 1].kind == "z")
        b = sum(1 for x in w if gens[x >> 1].kind == "zbar")
        return a, b

    def torus_weight(self, w: tuple) -> tuple:
        gens = self.pres.generators
        k = 1 + max(g.index for g in gens)
        v = [0] * k
        for x in w:
            g = gens[x >> 1]
            v[g.index] += 1 if g.kind == "z" else -1
        return tuple(v)

    def multidegree(self, w: tuple) -> tuple:
        v = [0] * len(self.pres.generators)
        for x in w:
            v[x >> 1] += 1
        return tuple(v)


class UniversalCalculus(Calculus):
    """Universal calculus over a free *-algebra: interleaved words."""

    universal = True

    def __init__(self, pres: Presentation):
        self.pres = pres

    def normalize(self, word: tuple) -> tuple:
        return ((tuple(word), ONE),)

    def word_str(self, w: tuple) -> str:
        return " ".join(self.letter_name(x) for x in w)


# ---------------------------------------------------------------------------


class Form:
    """Sparse linear combination of normalized form words."""

    __slots__ = ("calc", "terms")

    def __init__(self, calc: Calculus, terms: Mapping, _normal: bool = False):
        self.calc = calc
        if _normal:
            self.terms = dict(terms)
            return
        out: dict = {}
        for w, c in terms.items():
            c = as_scalar(c)
            if not c:
                continue
            for nw, k in calc.normalize(tuple(w)):
                _acc(out, nw, c * k)
        self.terms = out

    # -- vector space ---------------------------------------------------------
    def _lift(self, other) -> "Form":
        if isinstance(other, Form):
            if other.calc is not self.calc:
                raise ValueError("forms over different calculi")
            return other
        if isinstance(other, NCPoly):
            return self.calc.from_poly(other)
        return self.calc.scalar(other)

    def __add__(self, other) -> "Form":
        other = self._lift(other)
        t = dict(self.terms)
        for w, c in other.terms.items():
            _acc(t, w, c)
        return Form(self.calc, t, _normal=True)

    __radd__ = __add__

    def __neg__(self) -> "Form":
        return Form(self.calc, {w: -c for w, c in self.terms.items()}, _normal=True)

    def __sub__(self, other) -> "Form":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Form":
        return self._lift(other) - self

    def scale(self, s) -> "Form":
        s = as_scalar(s)
        if not s:
            return self.calc.zero()
        return Form(self.calc, {w: s * c for w, c in self.terms.items()}, _normal=True)

    def __mul__(self, other) -> "Form":
        if isinstance(other, (Form, NCPoly)):
            return wedge(self, self._lift(other))
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __rmul__(self, other) -> "Form":
        if isinstance(other, NCPoly):
            return wedge(self.calc.from_poly(other), self)
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    __xor__ = __mul__

    def __pow__(self, k: int) -> "Form":
        if k < 0:
            raise ValueError("negative powers of forms are undefined")
        out = self.calc.one()
        for _ in range(k):
            out = out * self
        return out

    # -- structure ------------------------------------------------------------
    def d(self) -> "Form":
        return d(self)

    def star(self) -> "Form":
        return star_form(self)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def degrees(self) -> set:
        return {sum(x & 1 for x in w) for w in self.terms}

    def degree(self) -> int:
        ds = self.degrees()
        if len(ds) > 1:
            raise ValueError("form is not homogeneous")
        return ds.pop() if ds else 0

    def homogeneous(self, k: int) -> "Form":
        return self.filter(lambda w: sum(x & 1 for x in w) == k)

    def filter(self, pred) -> "Form":
        return Form(self.calc, {w: c for w, c in self.terms.items() if pred(w)}, _normal=True)

    def bidegree_components(self) -> dict:
        out: dict = {}
        for w, c in self.terms.items():
            out.setdefault(self.calc.bidegree(w), {})[w] = c
        return {k: Form(self.calc, t, _normal=True) for k, t in sorted(out.items())}

    def map_scalars(self, f) -> "Form":
        return Form(self.calc, {w: f(c) for w, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, Form):
            try:
                other = self._lift(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.calc is other.calc and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __str__(self) -> str:
        return render_terms(self.terms, self.calc.word_str)

    def __repr__(self) -> str:
        return f"Form({str(self)!r})"


def _acc(t: dict, w, c) -> None:
    v = t.get(w)
    v = c if v is None else v + c
    if v:
        t[w] = v
    else:
        t.pop(w, None)


def combine(calc: Calculus, pieces: Iterable) -> Form:
    """Form from an iterable of (raw word, coefficient) pairs."""
    out: dict = {}
    norm = calc.normalize
    for w, c in pieces:
        if not c:
            continue
        for nw, k in norm(w):
            _acc(out, nw, c * k)
    return Form(calc, out, _normal=True)


def wedge(a: Form, b: Form) -> Form:
    if a.calc is not b.calc:
        raise ValueError("forms over different calculi")
    return combine(a.calc, ((u + v, c * e) for u, c in a.terms.items() for v, e in b.terms.items()))


def d(a: Form) -> Form:
    """Exterior derivative by the graded Leibniz rule on letters."""

    def pieces():
        for w, c in a.terms.items():
            odd = 0
            for i, x in enumerate(w):
                if x & 1:
                    odd += 1
                    continue
                yield w[:i] + (x + 1,) + w[i + 1 :], -c if odd & 1 else c

    return combine(a.calc, pieces())


def star_form(a: Form) -> Form:
    """Antilinear star with ``(x y)^* = (-1)^{|x||y|} y^* x^*`` applied letterwise."""
    calc = a.calc

    def pieces():
        for w, c in a.terms.items():
            # peel letters off the left: (x rest)^* = (-1)^{|x||rest|} rest^* x^*
            sign = 1
            rest_odd = sum(x & 1 for x in w)
            for x in w:
                rest_odd -= x & 1
                if x & 1 and rest_odd & 1:
                    sign = -sign
            sw = tuple(calc.partner(x) for x in reversed(w))
            cc = c.conj()
            yield sw, cc if sign > 0 else -cc

    return combine(calc, pieces())


# Universal calculus aliases: the same letterwise rules with no rewriting.
universal_d = d
universal_star = star_form


def epsilon(n: int) -> int:
    """Sign in ``(a0 da1 ... dan)^* = eps_n dan^* ... da1^* a0^*``."""
    return -1 if (n * (n - 1) // 2) % 2 else 1


# ---------------------------------------------------------------------------
# text syntax

_TOKEN = re.compile(
    r"""\s*(?:
        (?P<rat>\d+(?:/\d+)?)(?P<imag>i(?![A-Za-z0-9_]))? |
        (?P<phase>L(?:\d\d|\{\d+,\d+\}))(?![A-Za-z0-9_]) |
        (?P<name>[A-Za-z_][A-Za-z0-9_]*) |
        (?P<op>[-+*/^()])
    )""",
    re.VERBOSE,
)


def _tokenize(text: str) -> list:
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise SyntaxError(f"unexpected input at {text[pos:]!r}")
        pos = m.end()
        if m.group("rat"):
            out.append(("num", (m.group("rat"), bool(m.group("imag")))))
        elif m.group("phase"):
            out.append(("phase", m.group("phase")))
        elif m.group("name"):
            out.append(("name", m.group("name")))
        else:
            out.append(("op", m.group("op")))
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


def _phase_scalar(tok: str, exp: int) -> Scalar:
    m = re.fullmatch(r"L(?:(\d)(\d)|\{(\d+),(\d+)\})", tok)
    mu = int(m.group(1) or m.group(3))
    nu = int(m.group(2) or m.group(4))
    return lam(mu, nu, exp)


class _Parser:
    def __init__(self, text: str, ctx):
        from fractions import Fraction

        self.Fraction = Fraction
        self.toks = _tokenize(text)
        self.i = 0
        self.ctx = ctx

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def lift(self, s: Scalar):
        ctx = self.ctx
        if ctx is None:
            return s
        return ctx.scalar(s)

    def expr(self):
        kind, val = self.peek()
        neg = False
        if kind == "op" and val in "+-":
            self.take()
            neg = val == "-"
        acc = self.product()
        if neg:
            acc = -acc
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.product()
                acc = acc + rhs if val == "+" else acc - rhs
            else:
                return acc

    def _starts_atom(self):
        kind, val = self.peek()
        return kind in ("num", "phase", "name") or (kind == "op" and val == "(")

    def product(self):
        acc = self.atom()
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "*^":
                self.take()
                acc = _mul(acc, self.atom())
            elif self._starts_atom():
                acc = _mul(acc, self.atom())
            else:
                return acc

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            text, imag = val
            q = self.Fraction(text)
            s = Scalar({(): (0, q)}) if imag else Scalar({(): (q, 0)})
            return self.lift(s)
        if kind == "phase":
            exp = 1
            k2, v2 = self.peek()
            if k2 == "op" and v2 == "^":
                nxt = self.toks[self.i + 1] if self.i + 1 < len(self.toks) else (None, None)
                sign = 1
                j = self.i + 1
                if nxt == ("op", "-"):
                    sign = -1
                    j += 1
                    nxt = self.toks[j] if j < len(self.toks) else (None, None)
                if nxt[0] == "num" and not nxt[1][1] and "/" not in nxt[1][0]:
                    exp = sign * int(nxt[1][0])
                    self.i = j + 1
            return self.lift(_phase_scalar(val, exp))
        if kind == "name":
            if val == "i":
                return self.lift(I)
            ctx = self.ctx
            if ctx is None:
                raise SyntaxError(f"unexpected name {val!r} in scalar")
            if isinstance(ctx, Presentation):
                return ctx.element(val)
            code = ctx.letter_code(val)
            return Form(ctx, {(code,): ONE}, _normal=True)
        if kind == "op" and val == "(":
            e = self.expr()
            if self.take() != ("op", ")"):
                raise SyntaxError("expected ')'")
            return e
        raise SyntaxError(f"unexpected token {val!r}")


def _mul(a, b):
    if isinstance(a, Scalar) and not isinstance(b, Scalar):
        return b.__rmul__(a)
    return a * b


def parse_expression(text: str, ctx):
    """Parse the canonical text syntax into a Scalar, NCPoly or Form."""
    p = _Parser(text, ctx)
    if not p.toks:
        raise SyntaxError("empty expression")
    out = p.expr()
    if p.i != len(p.toks):
        raise SyntaxError(f"trailing input near token {p.toks[p.i]}")
    return out


def parse_form(calc: Calculus, text: str) -> Form:
    out = parse_expression(text, calc)
    return out if isinstance(out, Form) else calc.scalar(out)


# ---------------------------------------------------------------------------


def phase_pairs_of(calc: Calculus) -> list:
    from .algebra import phase_pairs

    return phase_pairs(calc.pres)


def random_form(
    rng,
    calc: Calculus,
    max_degree: int = 3,
    max_terms: int = 3,
    max_funcs: int = 2,
    degree: int | None = None,
) -> Form:
    """Random form with small words; ``degree`` fixes the form degree."""
    k = len(calc.pres.generators)
    pairs = phase_pairs_of(calc)
    raw = []
    for _ in range(int(rng.integers(1, max_terms + 1))):
        deg = degree if degree is not None else int(rng.integers(0, max_degree + 1))
        funcs = [2 * int(g) for g in rng.integers(0, k, size=int(rng.integers(0, max_funcs + 1)))]
        if calc.universal:
            odd = [2 * int(g) + 1 for g in rng.integers(0, k, size=deg)]
        else:
            odd = [2 * int(g) + 1 for g in rng.choice(k, size=min(deg, k), replace=False)]
        letters = funcs + odd
        order = rng.permutation(len(letters))
        w = tuple(letters[j] for j in order)
        raw.append((w, random_scalar(rng, pairs)))
    return combine(calc, raw)


def random_poly_form(rng, calc: Calculus, max_len: int = 2) -> Form:
    w = random_word(rng, calc.pres, max_len)
    return combine(calc, [(tuple(2 * x for x in w), random_scalar(rng, phase_pairs_of(calc)))])
