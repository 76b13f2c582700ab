"""Randomized law checks shared by the command line and the test suite."""

from __future__ import annotations

import numpy as np

from . import acs as _acs
from .calculus import Form, d, epsilon, phase_pairs_of, random_form
from .models import Model
from .scalar import I, ONE, random_scalar

__all__ = ["axiom_suite", "dolbeault_suite", "epsilon_table", "rng_for"]


def rng_for(seed: int, *salt: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, *salt]))


def _functions(rng, calc, k: int = 2) -> list:
    return [random_form(rng, calc, degree=0, max_terms=2) for _ in range(k)]


class _Tally:
    def __init__(self):
        self.counts: dict = {}
        self.failures: list = []

    def check(self, law: str, ok: bool, detail) -> None:
        passed, total = self.counts.get(law, (0, 0))
        self.counts[law] = (passed + bool(ok), total + 1)
        if not ok and len(self.failures) < 20:
            self.failures.append({"law": law, "input": str(detail() if callable(detail) else detail)})

    def to_json(self) -> dict:
        laws = {k: {"passed": p, "total": t} for k, (p, t) in sorted(self.counts.items())}
        return {
            "laws": laws,
            "passed": all(p == t for p, t in self.counts.values()),
            "failures": self.failures,
        }


def axiom_suite(model: Model, samples: int = 200, seed: int = 0, max_degree: int = 3) -> dict:
    """Star-calculus laws and complex-structure axioms on random forms."""
    calc = model.calc
    j = model.acs
    z = model.is_zero
    rng = rng_for(seed, 1)
    t = _Tally()
    phases = phase_pairs_of(calc)
    for _ in range(samples):
        a = random_form(rng, calc, max_degree=max_degree)
        b = random_form(rng, calc, max_degree=max_degree)
        s = random_scalar(rng, phases)
        ka = a.degrees()
        t.check("star_involutive", z(a.star().star() - a), a)
        t.check("d_squared", z(d(d(a))), a)
        t.check("d_commutes_with_star", z(d(a).star() - d(a.star())), a)
        t.check("star_antilinear", z((a.scale(s * I)).star() - a.star().scale((s * I).conj())), a)
        lhs_d = d(a * b)
        rhs_d = calc.zero()
        for k in sorted(ka):
            ak = a.homogeneous(k)
            part = ak * d(b)
            rhs_d = rhs_d + d(ak) * b + (part if k % 2 == 0 else -part)
        t.check("leibniz", z(lhs_d - rhs_d), lambda: f"{a} | {b}")
        lhs_s = (a * b).star()
        rhs_s = calc.zero()
        for k in sorted(ka):
            for l in sorted(b.degrees()):
                piece = b.homogeneous(l).star() * a.homogeneous(k).star()
                rhs_s = rhs_s + (piece if (k * l) % 2 == 0 else -piece)
        t.check("star_antimultiplicative", z(lhs_s - rhs_s), lambda: f"{a} | {b}")
        # complex structure
        Jab = _acs.apply_J(j, a * b)
        t.check("J_derivation", z(Jab - _acs.apply_J(j, a) * b - a * _acs.apply_J(j, b)),
                lambda: f"{a} | {b}")
        t.check("J_kills_functions", z(_acs.apply_J(j, a.homogeneous(0))), a)
        xi = random_form(rng, calc, degree=1)
        t.check("J_squared_minus_one", z(_acs.apply_J(j, _acs.apply_J(j, xi)) + xi), xi)
        t.check("J_commutes_with_star", z(_acs.apply_J(j, xi.star()) - _acs.apply_J(j, xi).star()), xi)
        f, g = _functions(rng, calc)
        t.check("J_bimodule", z(_acs.apply_J(j, f * xi * g) - f * _acs.apply_J(j, xi) * g),
                lambda: f"{f} | {xi} | {g}")
    out = t.to_json()
    out["model"] = model.label
    out["samples"] = samples
    return out


def dolbeault_suite(model: Model, samples: int = 200, seed: int = 0, max_degree: int = 3) -> dict:
    """``del^2 = delbar^2 = del delbar + delbar del = 0``, ``d = del + delbar``
    and ``delbar(xi)^* = del(xi^*)``."""
    calc = model.calc
    j = model.acs
    z = model.is_zero
    rng = rng_for(seed, 2)
    t = _Tally()
    P = lambda f: _acs.partial(j, f)  # noqa: E731
    Q = lambda f: _acs.dbar(j, f)  # noqa: E731
    for _ in range(samples):
        a = random_form(rng, calc, max_degree=max_degree)
        pa, qa = P(a), Q(a)
        t.check("del_squared", z(P(pa)), a)
        t.check("dbar_squared", z(Q(qa)), a)
        t.check("del_dbar_anticommute", z(P(qa) + Q(pa)), a)
        t.check("d_splits", z(d(a) - pa - qa), a)
        t.check("dbar_star", z(qa.star() - P(a.star())), a)
    out = t.to_json()
    out["model"] = model.label
    out["samples"] = samples
    return out


def epsilon_table(model: Model, nmax: int = 6) -> dict:
    """Star sign of ``dx_1 ... dx_n`` on the universal calculus against
    ``(-1)^{n(n-1)/2}``; the reversed word of partner letters is read off."""
    calc = model.calc
    letters = calc.one_form_generators()
    rows = {}
    for n in range(nmax + 1):
        word = tuple(letters[i % len(letters)] for i in range(n))
        f = Form(calc, {word: ONE})
        st = f.star()
        target = tuple(calc.partner(x) for x in reversed(word))
        coef = st.terms.get(target)
        sign = None
        if coef is not None and len(st.terms) == 1:
            sign = 1 if coef == 1 else (-1 if coef == -1 else None)
        rows[n] = {"computed": sign, "formula": epsilon(n)}
    return {"rows": rows, "passed": all(r["computed"] == r["formula"] for r in rows.values())}
