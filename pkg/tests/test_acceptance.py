"""Acceptance criteria, one test each, with wall-time limits.

Run standalone (``python3 tests/test_acceptance.py``) or under pytest; both
print one PASS/FAIL line per criterion.
"""

from __future__ import annotations

import json
import os
import sys
import time

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from oracles import plane_derham_dims, reversal_sign  # noqa: E402

from ncx import acs, cli, suites  # noqa: E402
from ncx import cohomology as co  # noqa: E402
from ncx import frolicher as fr  # noqa: E402
from ncx import holmod as hm  # noqa: E402
from ncx.calculus import Form, epsilon  # noqa: E402
from ncx.linalg import random_theta  # noqa: E402
from ncx.models import build, matmul_forms, projectors  # noqa: E402
from ncx.scalar import ONE  # noqa: E402

SEED = 20261014
SAMPLES = 200
RESULTS: dict = {}

STAR_MODELS = [("free", 1), ("free", 2), ("theta_plane", 0), ("theta_plane", 1), ("theta_plane", 2),
               ("theta_sphere", 0), ("theta_sphere", 1), ("theta_sphere", 2)]

_cache: dict = {}


def _model(kind, n):
    if (kind, n) not in _cache:
        _cache[(kind, n)] = build(kind, n)
    return _cache[(kind, n)]


def _pad(dims, n):
    return list(dims) + [0] * (2 * (n + 1) + 1 - len(dims))


def criterion_1():
    t0 = time.perf_counter()
    bad = []
    for kind, n in STAR_MODELS:
        rep = suites.axiom_suite(build(kind, n), samples=SAMPLES, seed=SEED, max_degree=3)
        if not rep["passed"] or min(v["total"] for v in rep["laws"].values()) < SAMPLES:
            bad.append((kind, n, rep["failures"][:2]))
    dt = time.perf_counter() - t0
    return not bad and dt < 30, f"{len(STAR_MODELS)} models x {SAMPLES} samples, {dt:.1f}s, failures={bad}"


def criterion_2():
    t0 = time.perf_counter()
    bad = []
    for kind, n in STAR_MODELS:
        m = _model(kind, n)
        rep = acs.check_integrability(m)
        if not (rep.integrable and rep.tests_agree and len(rep.verdicts) == 4):
            bad.append((kind, n))
    broken = _model("theta_plane", 1)
    j = acs.conjugated_acs(broken.calc, SEED % 1000)
    brep = acs.check_integrability(broken, j)
    broken_ok = not any(brep.verdicts.values()) and len(brep.verdicts) == 4
    dt = time.perf_counter() - t0
    return (not bad and broken_ok and dt < 5,
            f"integrable={not bad}, broken fixture fails all four={broken_ok}, {dt:.1f}s")


def criterion_3():
    bad = []
    for kind, n in STAR_MODELS:
        rep = suites.dolbeault_suite(_model(kind, n), samples=SAMPLES, seed=SEED)
        if not rep["passed"] or min(v["total"] for v in rep["laws"].values()) < SAMPLES:
            bad.append((kind, n, rep["failures"][:2]))
    return not bad, f"{len(STAR_MODELS)} models x {SAMPLES} samples, failures={bad}"


def criterion_4():
    rows = suites.epsilon_table(_model("free", 2), nmax=6)["rows"]
    ok = all(rows[n]["computed"] == (-1) ** (n * (n - 1) // 2) == reversal_sign(n) == epsilon(n)
             for n in range(7))
    return ok, "signs " + " ".join(str(rows[n]["computed"]) for n in range(7))


def criterion_5():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    bad = []
    blocks = 0
    for n in (1, 2):
        m = build("theta_plane", n)
        thetas = [random_theta(rng, n + 1) for _ in range(3)]
        for s in range(7):
            for a in range(s + 1):
                b = s - a
                blocks += 1
                dims = _pad(co.derham_dims(m, a, b), n)
                expected = [1 if (k == 0 and s == 0) else 0 for k in range(2 * n + 3)]
                if dims != expected:
                    bad.append(("exact", n, a, b, dims))
                if plane_derham_dims(n, a, b, shift=s % 3) != dims:
                    bad.append(("oracle", n, a, b))
                for th in thetas:
                    if _pad(co.derham_dims(m, a, b, theta=th), n) != dims:
                        bad.append(("numeric", n, a, b))
    dt = time.perf_counter() - t0
    return not bad and dt < 120, f"{blocks} blocks, {dt:.1f}s, mismatches={bad[:3]}"


def criterion_6():
    t0 = time.perf_counter()
    proj = _model("theta_projective", 1)
    got = {}
    ok = True
    for m in (0, 1, 2, 3, -1, -2):
        res = hm.module_cohomology(hm.DbarModule.line(proj, m), (3, 4))
        got[m] = res.dims
        ok &= res.stable
    ok &= all(got[m][0] == m + 1 for m in range(4)) and got[-1][0] == 0
    ok &= got[-2][1] == 1
    dt = time.perf_counter() - t0
    return ok and dt < 120, f"H^0: {[got[m][0] for m in (0, 1, 2, 3, -1)]}, H^1(L_-2)={got[-2][1]}, {dt:.1f}s"


def criterion_7():
    parts = []
    ok = True
    for n, level in ((1, 4), (2, 2)):
        rep = hm.induced_from_connection(hm.GrassmannConnection(_model("theta_projective", n)),
                                         max_level=level)
        ok &= rep.ok and rep.curvature_formula_exact
        parts.append(f"CP^{n}: {rep.checked} sections")
    for n in (1, 2):
        sph = _model("theta_sphere", n)
        for M in projectors(sph):
            MM = matmul_forms(M, M)
            ok &= all(sph.is_zero(MM[i][j] - M[i][j]) for i in range(n + 1) for j in range(n + 1))
    parts.append("P^2=P, Q^2=Q")
    return ok, ", ".join(parts)


def criterion_8():
    proj = _model("theta_projective", 1)
    ok = True
    nodes = 0
    for m in (0, 1, 2):
        for B, rep in hm.ses_les_check(proj, m, windows=(3, 4), raise_on_failure=False).items():
            ok &= rep.ok and all(rep.exact)
            nodes += len(rep.nodes)
    return ok, f"{nodes} nodes exact"


def criterion_9():
    bad = []
    checked = 0
    for n, top in ((1, 6), (2, 4)):
        m = _model("theta_plane", n)
        amb = m.ambient
        for s in range(top + 1):
            for a in range(s + 1):
                b = s - a
                r = fr.frolicher_check(m, a, b)
                checked += 1
                if not (r["euler_agrees"] and r["d1_squared_zero"]):
                    bad.append(("frolicher", n, a, b))
                for k in range(2 * (n + 1) + 1):
                    for w in m.words(a, b, degree=k):
                        f = Form(amb, {w: ONE}, _normal=True)
                        t = co.theta_pq(m, f)
                        if co.wedge_tensor(t) != f or co.theta_pq(m, co.wedge_tensor(t)) != t:
                            bad.append(("theta", n, a, b))
    return not bad, f"{checked} blocks, failures={bad[:3]}"


def criterion_10():
    cfg = {"task": "all", "model": {"kind": "theta_plane", "n": 1, "max_weight": 3},
           "samples": 50, "seed": SEED}
    outs = []
    for jobs in (1, 1, 2):
        c = cli.RunConfig.from_json(cfg)
        c.jobs = jobs
        _, report = cli.run(c)
        outs.append(cli.dumps(report))
    proj = {**cfg, "model": {"kind": "theta_projective", "n": 1}, "m": [0, 1]}
    a, b = (cli.dumps(cli.run(cli.RunConfig.from_json(proj))[1]) for _ in range(2))
    ok = outs[0] == outs[1] == outs[2] and a == b
    return ok, f"{len(outs[0])} bytes, identical across runs and job counts"


CRITERIA = {
    1: ("axiom suite", criterion_1),
    2: ("integrability battery", criterion_2),
    3: ("Dolbeault identities", criterion_3),
    4: ("epsilon table", criterion_4),
    5: ("plane de Rham cohomology", criterion_5),
    6: ("holomorphic sections", criterion_6),
    7: ("curvature identities", criterion_7),
    8: ("long exact sequence", criterion_8),
    9: ("spectral sequence consistency", criterion_9),
    10: ("determinism", criterion_10),
}


def _record(k):
    name, fn = CRITERIA[k]
    t0 = time.perf_counter()
    ok, detail = fn()
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {k:2d} {name}: {detail} ({time.perf_counter() - t0:.1f}s)"
    RESULTS[k] = line
    print(line)
    return ok, detail


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k):
    ok, detail = _record(k)
    assert ok, detail


if __name__ == "__main__":
    status = 0
    for k in sorted(CRITERIA):
        ok, _ = _record(k)
        status |= not ok
    sys.exit(int(status))
