"""Command-line batch runner for the verification checks."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable

from . import __version__
from .report import PASS, CheckReport, combine

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SEED_ENV = "COBOUNDARY_SEED"


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class CheckConfig:
    check: str
    n: int = 2
    max_degree: int = 6
    seed: int = 0
    samples: int = 10
    algebra: str = "Z2,sweedler"
    g0: str = "eps-antidiagonal"
    out: str | None = None

    def params_for(self) -> dict:
        entry = REGISTRY[self.check]
        return {k: getattr(self, k) for k in entry.params}


# ---------------------------------------------------------------------------
# check runners
# ---------------------------------------------------------------------------


def _r(n):
    from .classical import standard_r

    return standard_r(n)


def _run_schouten(c: CheckConfig) -> CheckReport:
    from .classical import check_schouten_invariance

    return check_schouten_invariance(_r(c.n))


def _with_symbolic(rep: CheckReport, sym: CheckReport | None) -> CheckReport:
    if sym is None:
        return rep
    details = dict(rep.details, symbolic=sym.status)
    witness = rep.witness if rep.witness is not None else sym.witness
    return replace(rep, status=combine([rep.status, sym.status]), details=details, witness=witness)


def _run_multiplicativity(c: CheckConfig) -> CheckReport:
    from .classical import check_multiplicativity, sample_points, symbolic_multiplicativity

    r = _r(c.n)
    rep = check_multiplicativity(r, sample_points(c.n, c.seed, c.samples, 2), c.seed)
    return _with_symbolic(rep, symbolic_multiplicativity(r) if c.n == 2 else None)


def _run_antipode(c: CheckConfig) -> CheckReport:
    from .classical import check_antipode, sample_points, symbolic_antipode

    r = _r(c.n)
    rep = check_antipode(r, sample_points(c.n, c.seed, c.samples, 1), c.seed)
    return _with_symbolic(rep, symbolic_antipode(r) if c.n == 2 else None)


def _run_gauge_identity(c: CheckConfig) -> CheckReport:
    from .classical import check_gauge_identity, sample_points

    r = _r(c.n)
    # rho = pi_+ corresponds to the constant offset 2r
    return check_gauge_identity(r, r.scale(2), sample_points(c.n, c.seed, c.samples, 3), c.seed)


def _g0(c: CheckConfig):
    from .classical import g0_matrix
    from .linalg import Tensor

    if c.g0 == "identity":
        return Tensor.identity(c.n)
    return g0_matrix(c.n)


def _run_translation(c: CheckConfig) -> CheckReport:
    from .classical import check_translation, sample_points

    return check_translation(_r(c.n), _g0(c), sample_points(c.n, c.seed, c.samples, 1), c.seed)


def _run_jacobi(c: CheckConfig) -> CheckReport:
    from .classical import jacobi_check

    return jacobi_check(_r(c.n))


def _run_qybe(c: CheckConfig) -> CheckReport:
    from .quantum import check_qybe

    return check_qybe(c.n)


def _run_eq22(c: CheckConfig) -> CheckReport:
    from .quantum import check_eq22

    return check_eq22(c.n, g0=c.g0)


def _run_volume(c: CheckConfig) -> CheckReport:
    from .quantum import check_volume_element

    return check_volume_element(c.n)


def _run_frt(c: CheckConfig) -> CheckReport:
    from .quantum import check_frt

    return check_frt(c.n)


def _run_gauge_quantum(c: CheckConfig) -> CheckReport:
    from .quantum import check_quantum_gauge

    return check_quantum_gauge(c.n, c.max_degree)


def _run_iso(c: CheckConfig) -> CheckReport:
    from .quantum import check_isomorphism

    return check_isomorphism(c.n)


def _run_t(c: CheckConfig) -> CheckReport:
    from .quantum import compute_t

    return compute_t(c.n)


def _run_eq18(c: CheckConfig) -> CheckReport:
    from .quantum import check_eq18_derivation

    return check_eq18_derivation(c.n, c.max_degree)


def _algebra(c: CheckConfig):
    from .hopf import CATALOG, catalog, load_hopf

    if c.algebra in CATALOG:
        return catalog(c.algebra)
    if os.path.exists(c.algebra):
        return load_hopf(c.algebra)
    raise UsageError(f"unknown algebra {c.algebra!r}: use one of {sorted(CATALOG)} or a JSON file")


def _run_hopf_chain(c: CheckConfig) -> CheckReport:
    from .hopf import hopf_chain

    return hopf_chain(_algebra(c), seed=c.seed)


def _run_hopf_unitarity(c: CheckConfig) -> CheckReport:
    from .hopf import check_unitarity, find_R

    h = _algebra(c)
    rows = []
    for k, fam in enumerate(find_R(h)):
        for j, r in enumerate(fam.members()):
            rows.append({"family": k, "member": j, "unitary": check_unitarity(h, r).details["unitary"], "R": r})
    return CheckReport("hopf-unitarity", PASS, {"algebra": h.name}, None, {"members": rows})


@dataclass(frozen=True)
class CheckEntry:
    run: Callable[[CheckConfig], CheckReport]
    params: tuple[str, ...]
    about: str
    min_n: int = 2
    max_n: int | None = None
    in_all: bool = True


_N = ("n",)
_NS = ("n", "seed", "samples")
REGISTRY: dict[str, CheckEntry] = {
    "schouten-invariance": CheckEntry(_run_schouten, _N, "Schouten square of the standard r is ad-invariant"),
    "multiplicativity": CheckEntry(_run_multiplicativity, _NS, "pi(gh) = pi(g)h + g pi(h)"),
    "antipode": CheckEntry(_run_antipode, _NS, "pi(g^-1) = -g^-1 pi(g) g^-1"),
    "gauge-identity": CheckEntry(_run_gauge_identity, _NS, "rho = pi_+ obeys the three-point gauge identity"),
    "translation": CheckEntry(_run_translation, ("n", "seed", "samples", "g0"), "pi(g g0) = pi_+(g) g0",
                             max_n=3),
    "jacobi": CheckEntry(_run_jacobi, _N, "Jacobi identity of the coordinate brackets"),
    "qybe": CheckEntry(_run_qybe, _N, "quantum Yang-Baxter equation for the standard R"),
    "eq22": CheckEntry(_run_eq22, ("n", "g0"), "(g0 (x) g0) R (g0 (x) g0)^-1 = P R P", max_n=3),
    "volume-element": CheckEntry(_run_volume, _N, "q-antisymmetry of the volume element"),
    "eq17-frt": CheckEntry(_run_frt, _N, "quadratic relations agree with the volume relations"),
    "gauge-quantum": CheckEntry(_run_gauge_quantum, ("n", "max_degree"), "R (vTv) = (vTv) R~ for v = u w u*",
                               max_n=3),
    "iso-20-21": CheckEntry(_run_iso, _N, "relations of A and B correspond under u = eps w P", max_n=3),
    "t-scalar": CheckEntry(_run_t, _N, "(u^-1)^(n) E~ as a multiple of E", max_n=3),
    "eq18-derivation": CheckEntry(_run_eq18, ("n", "max_degree"), "inverse relations follow from the FRT relations and unitarity",
                                 max_n=3, in_all=False),
    "hopf-chain": CheckEntry(_run_hopf_chain, ("algebra", "seed"), "R-matrix conditions and the twisted coproduct"),
    "hopf-unitarity": CheckEntry(_run_hopf_unitarity, ("algebra",), "R12 R21 = 1 per solution (observation)"),
}


def validate(c: CheckConfig) -> None:
    if c.check not in REGISTRY:
        raise UsageError(f"unknown check {c.check!r}\n{registry_listing()}")
    entry = REGISTRY[c.check]
    if "n" in entry.params:
        if c.n < entry.min_n:
            raise UsageError(f"{c.check}: n must be >= {entry.min_n}, got {c.n}")
        if entry.max_n is not None and c.n > entry.max_n:
            raise UsageError(f"{c.check}: n must be <= {entry.max_n}, got {c.n}")
    if c.max_degree < 1:
        raise UsageError(f"max-degree must be positive, got {c.max_degree}")
    if c.samples < 1:
        raise UsageError(f"samples must be positive, got {c.samples}")
    if "algebra" in entry.params and "," in c.algebra:
        raise UsageError(f"{c.check}: one algebra per run, got {c.algebra!r}")
    if c.g0 not in ("eps-antidiagonal", "identity"):
        raise UsageError(f"g0 must be eps-antidiagonal or identity, got {c.g0!r}")


def registry_listing() -> str:
    width = max(map(len, REGISTRY))
    lines = ["available checks:"]
    for name, entry in sorted(REGISTRY.items()):
        tag = "" if entry.in_all else "  [not in 'all']"
        lines.append(f"  {name:<{width}}  {entry.about}{tag}")
    return "\n".join(lines)


def run(config: CheckConfig, timings: bool = False) -> CheckReport:
    """Run one check; the report parameters are exactly the ones that check uses."""
    validate(config)
    t0 = time.perf_counter()
    try:
        rep = REGISTRY[config.check].run(config)
    except UsageError:
        raise
    except ValueError as exc:
        raise UsageError(f"{config.check}: {exc}") from exc
    rep = replace(rep, check=config.check, params=dict(rep.params, **config.params_for()))
    if timings:
        rep.details = dict(rep.details, seconds=round(time.perf_counter() - t0, 3))
    return rep


def _run_json(config: CheckConfig, timings: bool) -> dict:
    return run(config, timings).to_json()


def expand_suite(names, base: CheckConfig) -> list[CheckConfig]:
    if names == "all":
        names = [k for k, s in REGISTRY.items() if s.in_all]
    out = []
    for name in names:
        if name not in REGISTRY:
            raise UsageError(f"unknown check {name!r}\n{registry_listing()}")
        if "algebra" in REGISTRY[name].params:
            for alg in base.algebra.split(","):
                out.append(replace(base, check=name, algebra=alg.strip()))
        else:
            out.append(replace(base, check=name))
    for c in out:
        validate(c)
    return out


def _sort_key(rep: dict):
    return rep["check"], json.dumps(rep["params"], sort_keys=True)


def run_suite(names, base: CheckConfig, jobs: int = 1, timings: bool = False) -> dict:
    """Run several checks and collect them into one document, ordered by check name."""
    configs = expand_suite(names, base)
    if jobs > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_run_json, configs, [timings] * len(configs)))
    else:
        reports = [_run_json(c, timings) for c in configs]
    return document(sorted(reports, key=_sort_key), base.seed)


def document(reports: list[dict], seed: int) -> dict:
    stamp = os.environ.get("SOURCE_DATE_EPOCH")
    return {
        "version": __version__,
        "timestamp": int(stamp) if stamp and stamp.isdigit() else None,
        "seed": seed,
        "checks": reports,
    }


def exit_code(doc: dict) -> int:
    statuses = [r["status"] for r in doc["checks"]]
    return EXIT_PASS if combine(statuses) == PASS else EXIT_FAIL


def summary_table(doc: dict) -> str:
    rows = [(r["check"], ",".join(f"{k}={v}" for k, v in r["params"].items()), r["status"]) for r in doc["checks"]]
    if not rows:
        return "no checks run"
    w0 = max(len(r[0]) for r in rows + [("check", "", "")])
    w1 = max(len(r[1]) for r in rows + [("", "params", "")])
    lines = [f"{'check':<{w0}}  {'params':<{w1}}  status", f"{'-' * w0}  {'-' * w1}  ------"]
    lines += [f"{a:<{w0}}  {b:<{w1}}  {c}" for a, b, c in rows]
    n_fail = sum(r[2] != PASS for r in rows)
    lines.append(f"{len(rows) - n_fail}/{len(rows)} passed")
    return "\n".join(lines)


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coboundary", description="Exact verification of coboundary Poisson Lie "
                                "structures and their quantum counterparts.")
    p.add_argument("--check", action="append", help="check to run (repeatable)")
    p.add_argument("--suite", help="'all' or a comma-separated list of checks")
    p.add_argument("--n", type=int)
    p.add_argument("--max-degree", type=int, dest="max_degree")
    p.add_argument("--seed", type=int, help=f"sample seed (default: ${SEED_ENV} or 0)")
    p.add_argument("--samples", type=int)
    p.add_argument("--algebra", help="catalog name, JSON file, or comma-separated list")
    p.add_argument("--g0", choices=["eps-antidiagonal", "identity"])
    p.add_argument("--config", help="JSON file with defaults; flags override it")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--jobs", type=int, help="worker processes for suites")
    p.add_argument("--timings", action="store_true", default=None, help="add wall-clock seconds (breaks byte-identity)")
    p.add_argument("--list", action="store_true", help="list the registered checks")
    return p


_CONFIG_KEYS = {"check", "suite", "n", "max_degree", "seed", "samples", "algebra", "g0", "out", "jobs", "timings"}


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    data = {k.replace("-", "_"): v for k, v in data.items()}
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return data


def resolve(args: argparse.Namespace) -> tuple[list[str] | str, CheckConfig, dict]:
    conf = _load_config(args.config) if args.config else {}
    for key in _CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            conf[key] = val
    if "seed" not in conf:
        env = os.environ.get(SEED_ENV)
        if env is not None:
            try:
                conf["seed"] = int(env)
            except ValueError:
                raise UsageError(f"${SEED_ENV} must be an integer, got {env!r}") from None
    checks = conf.get("check")
    suite = conf.get("suite")
    if checks and suite:
        raise UsageError("use either --check or --suite, not both")
    if suite is not None:
        names = "all" if suite == "all" else [s.strip() for s in str(suite).split(",") if s.strip()]
    elif checks:
        names = [checks] if isinstance(checks, str) else list(checks)
    else:
        raise UsageError(f"nothing to run: give --check or --suite\n{registry_listing()}")
    fields = {k: conf[k] for k in ("n", "max_degree", "seed", "samples", "algebra", "g0", "out") if k in conf}
    for k in ("n", "max_degree", "seed", "samples"):
        if k in fields and not isinstance(fields[k], int):
            raise UsageError(f"{k} must be an integer")
    base = CheckConfig(check="", **fields)
    extra = {"jobs": int(conf.get("jobs", 1)), "timings": bool(conf.get("timings", False))}
    return names, base, extra


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    if args.list:
        print(registry_listing())
        return EXIT_PASS
    try:
        names, base, extra = resolve(args)
        doc = run_suite(names, base, jobs=extra["jobs"], timings=extra["timings"])
    except UsageError as exc:
        print(f"coboundary: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = dumps(doc)
    if base.out:
        with open(base.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(summary_table(doc), file=sys.stderr)
    return exit_code(doc)


if __name__ == "__main__":
    sys.exit(main())
