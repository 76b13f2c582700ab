"""Exact coefficients: Gaussian rationals times Laurent monomials in formal phases.

A :class:`Scalar` is an element of the group ring ``Q(i)[Z^k]`` where the free
abelian group is generated by the phase units ``L_{mu,nu} = exp(i theta_{mu,nu})``
for ``mu < nu``.  ``L_{nu,mu}`` is stored as ``L_{mu,nu}^-1`` and ``L_{mu,mu}``
is ``1``, which encodes skew-symmetry of theta.

Scalars are immutable and hashable.
"""

from __future__ import annotations

import cmath
import re
from fractions import Fraction
from typing import Iterable, Mapping, Union

import numpy as np

__all__ = [
    "Scalar",
    "NonSkewTheta",
    "NotDivisible",
    "lam",
    "I",
    "ONE",
    "ZERO",
    "as_scalar",
]

# A phase exponent is a sorted tuple of ((mu, nu), e) with mu < nu and e != 0.
Phase = tuple
Gauss = tuple  # (re: Fraction, im: Fraction)

_Q0 = Fraction(0)
_Q1 = Fraction(1)


class NonSkewTheta(ValueError):
    """Raised when a numeric theta matrix is not skew-symmetric."""


class NotDivisible(ArithmeticError):
    """Raised by :meth:`Scalar.exact_div` when the quotient is not a Laurent polynomial."""


def _gmul(x: Gauss, y: Gauss) -> Gauss:
    a, b = x
    c, d = y
    return (a * c - b * d, a * d + b * c)


def _gadd(x: Gauss, y: Gauss) -> Gauss:
    return (x[0] + y[0], x[1] + y[1])


def _ginv(x: Gauss) -> Gauss:
    a, b = x
    n = a * a + b * b
    return (a / n, -b / n)


def _pmul(p: Phase, q: Phase) -> Phase:
    if not p:
        return q
    if not q:
        return p
    acc = dict(p)
    for k, e in q:
        v = acc.get(k, 0) + e
        if v:
            acc[k] = v
        else:
            del acc[k]
    return tuple(sorted(acc.items()))


def _pinv(p: Phase) -> Phase:
    return tuple((k, -e) for k, e in p)


def _canon_phase(items: Iterable) -> Phase:
    acc: dict = {}
    for (mu, nu), e in items:
        if mu == nu or e == 0:
            continue
        if mu > nu:
            mu, nu, e = nu, mu, -e
        v = acc.get((mu, nu), 0) + e
        if v:
            acc[(mu, nu)] = v
        else:
            acc.pop((mu, nu), None)
    return tuple(sorted(acc.items()))


ScalarLike = Union["Scalar", int, Fraction, complex]


class Scalar:
    """Element of ``Q(i)[L_{mu,nu}^{+-1}]``."""

    __slots__ = ("_t", "_h")

    def __init__(self, value: ScalarLike | Mapping = 0):
        if isinstance(value, Scalar):
            self._t = value._t
        elif isinstance(value, Mapping):
            t = {}
            for ph, g in value.items():
                g = (Fraction(g[0]), Fraction(g[1]))
                if g[0] or g[1]:
                    t[ph] = g
            self._t = t
        else:
            g = _to_gauss(value)
            self._t = {(): g} if (g[0] or g[1]) else {}
        self._h = None

    @classmethod
    def _raw(cls, terms: dict) -> "Scalar":
        s = object.__new__(cls)
        s._t = terms
        s._h = None
        return s

    @classmethod
    def monomial(cls, coeff: ScalarLike, phase: Iterable = ()) -> "Scalar":
        g = _to_gauss(coeff)
        if not (g[0] or g[1]):
            return ZERO
        return cls._raw({_canon_phase(phase): g})

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._t)

    def __len__(self) -> int:
        return len(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self) -> bool:
        return bool(self._t)

    def is_monomial(self) -> bool:
        return len(self._t) == 1

    def variables(self) -> set:
        return {k for ph in self._t for k, _ in ph}

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other: ScalarLike) -> "Scalar":
        other = as_scalar(other)
        if not other._t:
            return self
        if not self._t:
            return other
        t = dict(self._t)
        for ph, g in other._t.items():
            h = t.get(ph)
            if h is None:
                t[ph] = g
            else:
                s = (h[0] + g[0], h[1] + g[1])
                if s[0] or s[1]:
                    t[ph] = s
                else:
                    del t[ph]
        return Scalar._raw(t)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar._raw({ph: (-g[0], -g[1]) for ph, g in self._t.items()})

    def __sub__(self, other: ScalarLike) -> "Scalar":
        return self + (-as_scalar(other))

    def __rsub__(self, other: ScalarLike) -> "Scalar":
        return as_scalar(other) - self

    def __mul__(self, other: ScalarLike) -> "Scalar":
        if not isinstance(other, Scalar):
            try:
                other = as_scalar(other)
            except TypeError:
                return NotImplemented
        a, b = self._t, other._t
        if not a or not b:
            return ZERO
        if len(a) == 1 and len(b) == 1:
            (p, x), = a.items()
            (q, y), = b.items()
            return Scalar._raw({_pmul(p, q): _gmul(x, y)})
        t: dict = {}
        for p, x in a.items():
            for q, y in b.items():
                ph = _pmul(p, q)
                g = _gmul(x, y)
                h = t.get(ph)
                if h is not None:
                    g = (h[0] + g[0], h[1] + g[1])
                    if not (g[0] or g[1]):
                        del t[ph]
                        continue
                t[ph] = g
        return Scalar._raw(t)

    def __rmul__(self, other: ScalarLike) -> "Scalar":
        return self.__mul__(other)

    def __pow__(self, k: int) -> "Scalar":
        if k < 0:
            return self.inverse() ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self) -> "Scalar":
        """Complex conjugation; each phase is unimodular so it is inverted."""
        return Scalar._raw({_pinv(ph): (g[0], -g[1]) for ph, g in self._t.items()})

    def inverse(self) -> "Scalar":
        """Inverse of a unit (a single nonzero term)."""
        if len(self._t) != 1:
            raise NotDivisible(f"{self} is not a unit")
        (ph, g), = self._t.items()
        return Scalar._raw({_pinv(ph): _ginv(g)})

    def __truediv__(self, other: ScalarLike) -> "Scalar":
        return self.exact_div(as_scalar(other))

    def exact_div(self, other: "Scalar") -> "Scalar":
        """Quotient ``self / other`` when it is again a Laurent polynomial.

        Uses lexicographic leading-term division.  Lex order on exponent
        vectors is a group order, so leading terms always divide; a
        Newton-box bound on quotient exponents detects the inexact case and
        guarantees termination.
        """
        if not other._t:
            raise ZeroDivisionError("division by zero Scalar")
        if not self._t:
            return ZERO
        if len(other._t) == 1:
            return self * other.inverse()
        vars_ = sorted(self.variables() | other.variables())
        idx = {v: i for i, v in enumerate(vars_)}
        k = len(vars_)

        def vec(ph):
            v = [0] * k
            for key, e in ph:
                v[idx[key]] = e
            return tuple(v)

        def unvec(v):
            return tuple((vars_[i], e) for i, e in enumerate(v) if e)

        rem = {vec(ph): g for ph, g in self._t.items()}
        div = sorted(((vec(ph), g) for ph, g in other._t.items()), reverse=True)
        lead_e, lead_g = div[0]
        lead_inv = _ginv(lead_g)
        # Newton polytopes add under multiplication, so every quotient
        # exponent lies in this box; leaving it proves inexactness.
        lo = [min(e[i] for e in rem) - min(e[i] for e, _ in div) for i in range(k)]
        hi = [max(e[i] for e in rem) - max(e[i] for e, _ in div) for i in range(k)]
        quot: dict = {}
        while rem:
            top = max(rem)
            qe = tuple(a - b for a, b in zip(top, lead_e))
            if any(x < l or x > h for x, l, h in zip(qe, lo, hi)):
                raise NotDivisible(f"{self} is not divisible by {other}")
            qg = _gmul(rem[top], lead_inv)
            quot[qe] = qg
            for e, g in div:
                key = tuple(a + b for a, b in zip(qe, e))
                prod = _gmul(qg, g)
                h = rem.get(key)
                if h is None:
                    rem[key] = (-prod[0], -prod[1])
                else:
                    s = (h[0] - prod[0], h[1] - prod[1])
                    if s[0] or s[1]:
                        rem[key] = s
                    else:
                        del rem[key]
        return Scalar._raw({unvec(e): g for e, g in quot.items()})

    # -- comparison -------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if isinstance(other, Scalar):
            return self._t == other._t
        try:
            return self._t == as_scalar(other)._t
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        if self._h is None:
            self._h = hash(frozenset(self._t.items()))
        return self._h

    # -- numerics ---------------------------------------------------------
    def eval_numeric(self, theta) -> complex:
        """Substitute ``L_{mu,nu} = exp(i theta[mu, nu])``."""
        th = np.asarray(theta, dtype=float)
        if th.ndim != 2 or th.shape[0] != th.shape[1]:
            raise NonSkewTheta("theta must be a square matrix")
        if np.max(np.abs(th + th.T), initial=0.0) > 1e-12:
            raise NonSkewTheta("theta is not skew-symmetric")
        total = 0j
        for ph, (a, b) in self._t.items():
            angle = 0.0
            for (mu, nu), e in ph:
                angle += e * th[mu, nu]
            total += complex(float(a), float(b)) * cmath.exp(1j * angle)
        return total

    # -- text ---------------------------------------------------------------
    def __str__(self) -> str:
        if not self._t:
            return "0"
        parts = [_term_str(ph, g) for ph, g in sorted(self._t.items(), key=_term_key)]
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self) -> str:
        return f"Scalar({str(self)!r})"

    def is_negative_real_monomial(self) -> bool:
        if len(self._t) != 1:
            return False
        (_, (a, b)), = self._t.items()
        return b == 0 and a < 0 or a == 0 and b < 0

    @classmethod
    def parse(cls, text: str) -> "Scalar":
        from .calculus import parse_expression

        return parse_expression(text, None)


def _term_key(item):
    ph, _ = item
    return (sum(abs(e) for _, e in ph), ph)


def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _gauss_str(g: Gauss) -> str:
    a, b = g
    if b == 0:
        return _frac_str(a)
    if a == 0:
        if b == 1:
            return "i"
        if b == -1:
            return "-i"
        return f"{_frac_str(b)}i"
    sign = "+" if b > 0 else "-"
    bb = abs(b)
    im = "i" if bb == 1 else f"{_frac_str(bb)}i"
    return f"({_frac_str(a)}{sign}{im})"


def phase_name(mu: int, nu: int) -> str:
    if mu < 10 and nu < 10:
        return f"L{mu}{nu}"
    return f"L{{{mu},{nu}}}"


def _phase_str(ph: Phase) -> str:
    out = []
    for (mu, nu), e in ph:
        name = phase_name(mu, nu)
        out.append(name if e == 1 else f"{name}^{e}")
    return "*".join(out)


def _term_str(ph: Phase, g: Gauss) -> str:
    gs = _gauss_str(g)
    if not ph:
        return gs
    ps = _phase_str(ph)
    if gs == "1":
        return ps
    if gs == "-1":
        return "-" + ps
    return f"{gs}*{ps}"


def _to_gauss(value) -> Gauss:
    if isinstance(value, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(value, (int, Fraction)):
        return (Fraction(value), _Q0)
    if isinstance(value, complex):
        re_, im_ = value.real, value.imag
        if re_ != int(re_) or im_ != int(im_):
            raise TypeError("only integral complex literals are accepted")
        return (Fraction(int(re_)), Fraction(int(im_)))
    raise TypeError(f"cannot convert {type(value).__name__} to Scalar")


def as_scalar(value: ScalarLike) -> Scalar:
    if isinstance(value, Scalar):
        return value
    return Scalar(value)


def lam(mu: int, nu: int, k: int = 1) -> Scalar:
    """The phase ``L_{mu,nu}^k`` with skew-symmetric conventions."""
    if mu == nu or k == 0:
        return ONE
    return Scalar._raw({_canon_phase([((mu, nu), k)]): (_Q1, _Q0)})


ZERO = Scalar._raw({})
ONE = Scalar._raw({(): (_Q1, _Q0)})
I = Scalar._raw({(): (_Q0, _Q1)})

_PHASE_RE = re.compile(r"L(?:(\d)(\d)|\{(\d+),(\d+)\})")


def random_scalar(rng, pairs, max_terms: int = 2, max_coef: int = 3) -> Scalar:
    """Small random Scalar over the given phase pairs (numpy Generator ``rng``)."""
    pairs = list(pairs() if callable(pairs) else pairs)
    out = ZERO
    for _ in range(int(rng.integers(1, max_terms + 1))):
        re_ = int(rng.integers(-max_coef, max_coef + 1))
        im_ = int(rng.integers(-max_coef, max_coef + 1))
        if re_ == 0 and im_ == 0:
            re_ = 1
        ph = []
        for pr in pairs:
            e = int(rng.integers(-1, 2))
            if e:
                ph.append((pr, e))
        out = out + Scalar.monomial(complex(re_, im_), ph)
    return out if out else ONE
