"""Command line front end: ``ncx``.

Reports are JSON with sorted keys and a schema tag; identical arguments and
seed give byte-identical output.  Exit status is 0 when every requested
check passes, 1 when a mathematical check fails and 2 on configuration
errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import __version__
from . import acs as _acs
from . import cohomology as co
from . import frolicher as fr
from . import holmod as hm
from . import suites
from .models import KINDS, ModelDescriptor, build, default_max_weight

SCHEMA = "ncx-report/1"
DEFAULT_SEED = 0x6E63785F73656564  # recorded 64-bit default
TASKS = ("axioms", "integrability", "dolbeault", "derham", "frolicher", "modcohom", "les", "all")
ACS_KINDS = ("standard", "conjugated", "sign_flipped", "literal_free", "rotated")


class ConfigError(ValueError):
    """Invalid run configuration (exit status 2)."""


@dataclass
class RunConfig:
    model: ModelDescriptor
    task: str
    seed: int = DEFAULT_SEED
    samples: int = 200
    numeric_checks: int = 3
    acs: dict = field(default_factory=lambda: {"kind": "standard"})
    m: list = field(default_factory=lambda: [0, 1, 2, 3, -1, -2])
    windows: list = field(default_factory=lambda: [3, 4])
    output: str | None = None
    jobs: int = 1
    timings: bool = False

    def __post_init__(self):
        if self.task not in TASKS:
            raise ConfigError(f"unknown task {self.task!r}; expected one of {TASKS}")
        if self.samples <= 0 or self.numeric_checks < 0 or self.jobs <= 0:
            raise ConfigError("samples and jobs must be positive, numeric_checks non-negative")
        if not self.windows or any(w < 0 for w in self.windows):
            raise ConfigError("windows must be non-negative integers")
        if self.acs.get("kind", "standard") not in ACS_KINDS:
            raise ConfigError(f"unknown acs kind {self.acs.get('kind')!r}")

    @classmethod
    def from_json(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        try:
            md = ModelDescriptor.from_json(data.get("model", {}))
        except (ValueError, TypeError) as e:
            raise ConfigError(str(e)) from None
        known = {"model", "task", "seed", "samples", "numeric_checks", "acs", "m", "windows",
                 "output", "jobs", "timings"}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        kw = {k: data[k] for k in known - {"model"} if k in data}
        if "task" not in kw:
            raise ConfigError("config needs a 'task'")
        try:
            return cls(md, **kw)
        except TypeError as e:
            raise ConfigError(str(e)) from None

    def to_json(self) -> dict:
        return {
            "model": self.model.to_json(),
            "task": self.task,
            "seed": self.seed,
            "samples": self.samples,
            "numeric_checks": self.numeric_checks,
            "acs": self.acs,
            "m": self.m,
            "windows": self.windows,
        }


# ---------------------------------------------------------------------------
# tasks


def _acs_for(model, opts: dict):
    kind = opts.get("kind", "standard")
    calc = model.calc
    if kind == "standard":
        return model.acs
    if kind == "conjugated":
        return _acs.conjugated_acs(calc, int(opts.get("seed", 0)))
    if kind == "sign_flipped":
        return _acs.sign_flipped_acs(calc, opts.get("letter"))
    if kind == "literal_free":
        return _acs.literal_free_acs(calc)
    if kind == "rotated":
        return _acs.rotated_acs(calc)
    raise ConfigError(f"unknown acs kind {kind!r}")


def task_axioms(cfg: RunConfig) -> list:
    model = build(cfg.model)
    out = [{"name": "axioms", **suites.axiom_suite(model, cfg.samples, cfg.seed)}]
    if model.kind == "free":
        out.append({"name": "epsilon_table", **suites.epsilon_table(model)})
    return out


def task_integrability(cfg: RunConfig) -> list:
    model = build(cfg.model)
    j = _acs_for(model, cfg.acs)
    fails = _acs.verify_axioms(j, model.is_zero, raise_on_failure=False)
    rep = _acs.check_integrability(model, j, verify=False)
    body = rep.to_json()
    body["axiom_failures"] = fails
    checks = [{"name": "integrability", "passed": rep.integrable and not fails and rep.tests_agree, **body}]
    if cfg.model.kind != "free" and j is model.acs:
        d = suites.dolbeault_suite(model, cfg.samples, cfg.seed)
        checks.append({"name": "dolbeault_identities", **d})
    return checks


def _weights(mw: int, charge):
    for s in range(mw + 1):
        for a in range(s + 1):
            if charge is None or 2 * a - s == charge:
                yield a, s - a


def _block_dims(args) -> dict:
    md_json, kind, a, b, mw, thetas = args
    model = build(ModelDescriptor.from_json(md_json))
    out = {"a": a, "b": b}
    t0 = time.perf_counter()
    try:
        if kind == "derham":
            out["dims"] = co.derham_dims(model, a, b, bound=mw)
            out["numeric"] = [co.derham_dims(model, a, b, bound=mw, theta=th) for th in thetas]
        else:
            rows = {}
            num = {}
            for p in range(min(a, model.n + 1) + 1):
                try:
                    rows[str(p)] = co.dolbeault_dims(model, p, a, b, bound=mw)
                    num[str(p)] = [co.dolbeault_dims(model, p, a, b, bound=mw, theta=th)
                                   for th in thetas]
                except co.IllDefinedOnQuotient as e:
                    rows[str(p)] = None
                    out.setdefault("ill_defined", {})[str(p)] = str(e)
            out["dims"] = rows
            out["numeric"] = num
    except co.IllDefinedOnQuotient as e:
        out["dims"] = None
        out["ill_defined"] = str(e)
    out["seconds"] = time.perf_counter() - t0
    return out


def _pmap(fn, items: list, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def _thetas(cfg: RunConfig, n: int) -> list:
    from .linalg import random_theta

    rng = suites.rng_for(cfg.seed, 7)
    return [random_theta(rng, n) for _ in range(cfg.numeric_checks)]


def _cohomology(cfg: RunConfig, kind: str) -> list:
    md = cfg.model
    if md.kind == "free":
        raise ConfigError("cohomology blocks are defined for theta models")
    charge = 0 if md.kind == "theta_projective" else None
    items = [(md.to_json(), kind, a, b, md.max_weight, _thetas(cfg, md.n))
             for a, b in _weights(md.max_weight, charge)]
    results = _pmap(_block_dims, items, cfg.jobs)
    blocks = []
    numeric_ok = True
    totals: dict = {}
    for r in results:
        if r["dims"] is None:
            pass
        elif kind == "derham":
            numeric_ok &= all(x == r["dims"] for x in r["numeric"])
            for k, v in enumerate(r["dims"]):
                totals[str(k)] = totals.get(str(k), 0) + v
        else:
            for p, dims in r["dims"].items():
                if dims is None:
                    continue
                numeric_ok &= all(x == dims for x in r["numeric"].get(p, []))
                for q, v in enumerate(dims):
                    key = f"{p},{q}"
                    totals[key] = totals.get(key, 0) + v
        if not cfg.timings:
            r.pop("seconds")
        r.pop("numeric", None)
        blocks.append(r)
    return [{
        "name": kind,
        "passed": numeric_ok,
        "numeric_agrees": numeric_ok,
        "numeric_checks": cfg.numeric_checks,
        "max_weight": md.max_weight,
        "totals": dict(sorted(totals.items())),
        "blocks": blocks,
    }]


def task_dolbeault(cfg: RunConfig) -> list:
    return _cohomology(cfg, "dolbeault")


def task_derham(cfg: RunConfig) -> list:
    return _cohomology(cfg, "derham")


def task_frolicher(cfg: RunConfig) -> list:
    md = cfg.model
    if md.kind != "theta_plane":
        raise ConfigError("the spectral sequence check runs on theta_plane models")
    model = build(md)
    rows = []
    ok = True
    for a, b in _weights(md.max_weight, None):
        t0 = time.perf_counter()
        r = fr.frolicher_check(model, a, b)
        ok &= r["euler_agrees"] and r["d1_squared_zero"] and r["filtration_compatible"]
        if cfg.timings:
            r["seconds"] = time.perf_counter() - t0
        rows.append(r)
    return [{"name": "frolicher", "passed": ok, "blocks": rows}]


def _projective(cfg: RunConfig):
    md = cfg.model
    if md.kind != "theta_projective":
        raise ConfigError("module tasks run on theta_projective models")
    return build(md)


def task_modcohom(cfg: RunConfig) -> list:
    model = _projective(cfg)
    rows = []
    ok = True
    for m in cfg.m:
        E = hm.DbarModule.line(model, m)
        res = hm.module_cohomology(E, cfg.windows)
        holo = all(hm.block_curvature_zero(E, B) for B in cfg.windows)
        ok &= holo
        rows.append({"m": m, "holomorphic": holo, **res.to_json()})
    return [{"name": "modcohom", "passed": ok, "modules": rows}]


def task_les(cfg: RunConfig) -> list:
    model = _projective(cfg)
    rows = []
    ok = True
    for m in cfg.m:
        if m < 0:
            continue
        try:
            reps = hm.ses_les_check(model, m, windows=cfg.windows, raise_on_failure=False)
        except (hm.NotAComplex, hm.NotExact) as e:
            ok = False
            rows.append({"m": m, "error": str(e)})
            continue
        for B, rep in sorted(reps.items()):
            ok &= rep.ok
            rows.append({"m": m, "window": B, **rep.to_json()})
    return [{"name": "les", "passed": ok, "sequences": rows}]


TASK_FNS = {
    "axioms": task_axioms,
    "integrability": task_integrability,
    "dolbeault": task_dolbeault,
    "derham": task_derham,
    "frolicher": task_frolicher,
    "modcohom": task_modcohom,
    "les": task_les,
}


def _tasks_for_all(kind: str) -> list:
    base = ["axioms", "integrability"]
    if kind == "theta_plane":
        return base + ["dolbeault", "derham", "frolicher"]
    if kind == "theta_sphere":
        return base + ["derham"]
    if kind == "theta_projective":
        return ["dolbeault", "modcohom", "les"]
    return base


def run(cfg: RunConfig) -> tuple:
    """Execute a configuration; return ``(exit status, report dict)``."""
    tasks = _tasks_for_all(cfg.model.kind) if cfg.task == "all" else [cfg.task]
    checks = []
    for t in tasks:
        checks.extend(TASK_FNS[t](cfg))
    passed = all(c.get("passed", False) for c in checks)
    report = {
        "schema": SCHEMA,
        "version": __version__,
        "config": cfg.to_json(),
        "seed": cfg.seed,
        "checks": checks,
        "passed": passed,
    }
    return (0 if passed else 1), report


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=str) + "\n"


# ---------------------------------------------------------------------------
# text rendering


def render_text(report: dict) -> str:
    lines = [f"ncx {report['version']}  model={report['config']['model']}  seed={report['seed']}"]
    for c in report["checks"]:
        lines.append(f"[{'PASS' if c.get('passed') else 'FAIL'}] {c['name']}")
        if c["name"] in ("dolbeault", "derham"):
            lines.extend(_table_text(c))
        if c["name"] == "integrability":
            for t, v in sorted(c["verdicts"].items()):
                lines.append(f"    {t}: {'vanishes' if v else 'NONZERO'}")
                for g, res in sorted(c["residuals"].get(t, {}).items()):
                    lines.append(f"      {g}: {res}")
        if c["name"] == "modcohom":
            for mrow in c["modules"]:
                stable = "stable" if mrow["stable"] else "UNSTABLE"
                lines.append(f"    {mrow['module']:>6}: H = {mrow['dims']}  ({stable})")
        if c["name"] == "les":
            for s in c["sequences"]:
                if "nodes" in s:
                    dims = " -> ".join(str(n["dim"]) for n in s["nodes"])
                    lines.append(f"    m={s['m']} B={s['window']}: {dims}  exact={s['exact']}")
        for f in c.get("failures", [])[:5]:
            lines.append(f"    failed {f['law']}: {f['input']}")
    lines.append("PASS" if report["passed"] else "FAIL")
    return "\n".join(lines) + "\n"


def _table_text(c: dict) -> list:
    totals = c["totals"]
    if c["name"] == "derham":
        return ["    " + "  ".join(f"H^{k}={v}" for k, v in sorted(totals.items(), key=lambda t: int(t[0])))]
    cells = {tuple(int(x) for x in k.split(",")): v for k, v in totals.items()}
    if not cells:
        return ["    (no descending entries)"]
    pmax = max(p for p, _ in cells)
    qmax = max(q for _, q in cells)
    width = max(len(str(v)) for v in cells.values()) + 1
    out = []
    for q in range(qmax, -1, -1):
        row = "".join(str(cells.get((p, q), ".")).rjust(width) for p in range(pmax + 1))
        out.append(f"    q={q} |{row}")
    out.append("        +" + "-" * (width * (pmax + 1)))
    out.append("         " + "".join(f"p{p}".rjust(width) for p in range(pmax + 1)))
    return out


# ---------------------------------------------------------------------------
# argument parsing


def _model_args(p: argparse.ArgumentParser, kinds=KINDS, default="theta_plane") -> None:
    p.add_argument("--model", choices=kinds, default=default)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--max-weight", type=int, default=None,
                   help="truncation bound on a+b (default: NCX_MAX_WEIGHT or 6)")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=lambda s: int(s, 0), default=DEFAULT_SEED)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--numeric-checks", type=int, default=3)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--output", "-o", default=None)
    p.add_argument("--text", action="store_true", help="human-readable output")
    p.add_argument("--timings", action="store_true", help="include wall time per block")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ncx", description="Noncommutative complex geometry checks")
    ap.add_argument("--version", action="version", version=f"ncx {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="axiom and integrability suites")
    c.add_argument("what", choices=("axioms", "integrability"))
    _model_args(c)
    c.add_argument("--acs", choices=ACS_KINDS, default="standard")
    c.add_argument("--acs-seed", type=int, default=0)
    _common(c)

    h = sub.add_parser("cohomology", help="Dolbeault or de Rham tables")
    h.add_argument("what", choices=("dolbeault", "derham"))
    _model_args(h)
    _common(h)

    f = sub.add_parser("frolicher", help="spectral sequence consistency per weight block")
    _model_args(f, ("theta_plane",))
    _common(f)

    for name, hlp in (("modcohom", "line module cohomology"), ("les", "long exact sequences")):
        s = sub.add_parser(name, help=hlp)
        _model_args(s, ("theta_projective",), "theta_projective")
        s.add_argument("--m", type=int, nargs="+", default=None)
        s.add_argument("--windows", type=int, nargs="+", default=[3, 4])
        _common(s)

    r = sub.add_parser("run", help="run a JSON configuration")
    r.add_argument("--config", required=True)
    r.add_argument("--jobs", type=int, default=None)
    r.add_argument("--output", "-o", default=None)
    r.add_argument("--text", action="store_true")

    m = sub.add_parser("model", help="model utilities")
    m.add_argument("what", choices=("dump",))
    _model_args(m)
    m.add_argument("--output", "-o", default=None)
    return ap


def _descriptor(args) -> ModelDescriptor:
    mw = args.max_weight if args.max_weight is not None else default_max_weight()
    return ModelDescriptor(args.model, args.n, max_weight=mw)


def _config_from_args(args) -> RunConfig:
    md = _descriptor(args)
    task = args.what if args.command in ("check", "cohomology") else args.command
    kw = dict(seed=args.seed, samples=args.samples, numeric_checks=args.numeric_checks,
              jobs=args.jobs, output=args.output, timings=args.timings)
    if args.command == "check":
        kw["acs"] = {"kind": args.acs, "seed": args.acs_seed}
    if args.command in ("modcohom", "les"):
        if args.m is not None:
            kw["m"] = args.m
        elif args.command == "les":
            kw["m"] = [0, 1, 2]
        kw["windows"] = args.windows
    return RunConfig(md, task, **kw)


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    ap = make_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "model":
            model = build(_descriptor(args))
            data = {"schema": SCHEMA, "descriptor": model.descriptor.to_json(),
                    "presentation": model.pres.to_json(), "acs": model.acs.to_json(),
                    "relations": {name: str(f) for name, f, _ in model.relations}}
            _emit(dumps(data), args.output)
            return 0
        if args.command == "run":
            try:
                with open(args.config, encoding="utf-8") as fh:
                    data = json.load(fh)
            except (OSError, json.JSONDecodeError) as e:
                raise ConfigError(f"cannot read config: {e}") from None
            cfg = RunConfig.from_json(data)
            if args.jobs is not None:
                cfg.jobs = args.jobs
            if args.output is not None:
                cfg.output = args.output
            text = args.text
        else:
            cfg = _config_from_args(args)
            text = args.text
        status, report = run(cfg)
    except (ConfigError, ValueError) as e:
        print(f"ncx: configuration error: {e}", file=sys.stderr)
        return 2
    _emit(render_text(report) if text else dumps(report), cfg.output)
    if status != 0 and cfg.output:
        print(f"ncx: checks failed, see {cfg.output}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
