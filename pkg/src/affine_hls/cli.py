"""Command line driver: run chain verifications on the corpus and summarize reports.

Subcommands
-----------
``run``
    Evaluate the configured chains on the corpus. Writes one JSON file per
    (chain, function, parameter) triple under ``<out>/json`` and a single
    ``<out>/reports.csv``. Exits 1 if any check fails or any divergence flag
    fires, 2 on configuration errors.
``summary DIR``
    Per-chain table of pass counts, worst slack margin and largest residual.
``corpus list``
    Names, dimensions and descriptions of the corpus entries.

The output directory defaults to ``reports``; the ``AFFINE_HLS_OUTPUT_DIR``
environment variable overrides the default and the config file, and
``--output-dir`` overrides everything.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

from . import harness
from .bodies import sphere_quadrature
from .corpus import CORPUS, CORPUS_VERSION, random_grid_function

__all__ = ["RunConfig", "ConfigError", "CSV_COLUMNS", "CHAINS", "run", "report_summary", "main"]

ENV_OUTPUT = "AFFINE_HLS_OUTPUT_DIR"

CHAINS = ("specfun", "affine_hls", "affine_log_hls", "affine_log_sobolev", "affine_frac_l2", "beckner")
ALPHA_CHAINS = ("affine_hls", "affine_frac_l2")
RESOLUTION_CHAINS = ("affine_log_hls", "affine_log_sobolev")

CSV_COLUMNS = (
    "chain", "function", "n", "param", "value", "m", "passed", "flags",
    "term_0", "term_1", "term_2", "error_0", "error_1", "error_2",
    "slack_0", "slack_1", "tolerance_0", "tolerance_1", "residual_0", "residual_1",
)


class ConfigError(ValueError):
    """Invalid run configuration; the message starts with the offending field path."""


def _default_alphas():
    return {"affine_hls": [0.25, 0.5, 0.75], "affine_frac_l2": [-0.1, -0.25, -0.4]}


@dataclass
class RunConfig:
    chains: list = field(default_factory=lambda: list(CHAINS))
    dimensions: list = field(default_factory=lambda: [1, 2])
    alphas: dict = field(default_factory=_default_alphas)
    m: int = 256
    sphere_nodes: int = 256
    multiplier: float = harness.DEFAULT_MULTIPLIER
    seed: int = 0
    random_functions: int = 0
    functions: list | None = None
    output_dir: str = "reports"
    formats: list = field(default_factory=lambda: ["json", "csv"])
    jobs: int = 1

    @classmethod
    def from_mapping(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"{unknown[0]}: unknown field")
        cfg = cls(**data)
        if "alphas" in data:
            merged = _default_alphas()
            merged.update(data["alphas"])
            cfg.alphas = merged
        return cfg

    def validate(self) -> "RunConfig":
        if not isinstance(self.chains, list) or not self.chains:
            raise ConfigError("chains: must be a nonempty list")
        for i, c in enumerate(self.chains):
            if c not in CHAINS:
                raise ConfigError(f"chains[{i}]: unknown chain {c!r}; known: {', '.join(CHAINS)}")
        for i, d in enumerate(self.dimensions):
            if d not in (1, 2):
                raise ConfigError(f"dimensions[{i}]: must be 1 or 2, got {d!r}")
        if not self.dimensions:
            raise ConfigError("dimensions: must be nonempty")
        if not isinstance(self.m, int) or isinstance(self.m, bool) or not 32 <= self.m <= 512 or self.m & (self.m - 1):
            raise ConfigError(f"m: must be a power of two between 32 and 512, got {self.m!r}")
        if not isinstance(self.sphere_nodes, int) or self.sphere_nodes < 8 or self.sphere_nodes % 2:
            raise ConfigError(f"sphere_nodes: must be an even integer >= 8, got {self.sphere_nodes!r}")
        if not (isinstance(self.multiplier, (int, float)) and self.multiplier > 0):
            raise ConfigError(f"multiplier: must be positive, got {self.multiplier!r}")
        if not isinstance(self.seed, int):
            raise ConfigError(f"seed: must be an integer, got {self.seed!r}")
        if not isinstance(self.random_functions, int) or self.random_functions < 0:
            raise ConfigError(f"random_functions: must be a nonnegative integer, got {self.random_functions!r}")
        if self.functions is not None:
            for i, name in enumerate(self.functions):
                if name not in CORPUS:
                    raise ConfigError(f"functions[{i}]: unknown corpus entry {name!r}")
        for i, fmt in enumerate(self.formats):
            if fmt not in ("json", "csv"):
                raise ConfigError(f"formats[{i}]: must be 'json' or 'csv', got {fmt!r}")
        if not isinstance(self.jobs, int) or self.jobs < 1:
            raise ConfigError(f"jobs: must be a positive integer, got {self.jobs!r}")
        n_min = min(self.dimensions)
        for chain in ALPHA_CHAINS:
            values = self.alphas.get(chain)
            if not isinstance(values, list) or not values:
                raise ConfigError(f"alphas.{chain}: must be a nonempty list")
            lo, hi = (0.0, float(n_min)) if chain == "affine_hls" else (max(-1.0, -n_min / 2.0), 0.0)
            for i, a in enumerate(values):
                if not isinstance(a, (int, float)) or not lo < a < hi:
                    raise ConfigError(f"alphas.{chain}[{i}]: {a!r} outside ({lo:g}, {hi:g})")
        for key in self.alphas:
            if key not in ALPHA_CHAINS:
                raise ConfigError(f"alphas.{key}: chain takes no alpha list")
        return self


# jobs -------------------------------------------------------------------


@dataclass(frozen=True)
class Job:
    chain: str
    function: str
    param: str
    value: float


def _functions(cfg: RunConfig):
    names = [name for name, e in CORPUS.items() if e.n in cfg.dimensions]
    if cfg.functions is not None:
        names = [name for name in names if name in cfg.functions]
    for n in cfg.dimensions:
        for k in range(cfg.random_functions):
            names.append(f"random{n}d_{cfg.seed}_{k}")
    return names


def _resolutions(m):
    return sorted({max(m >> k, 32) for k in range(3)})


def _supports(function, chain):
    if function.startswith("random"):
        return True
    return CORPUS[function].supports(chain)


def plan(cfg: RunConfig) -> list[Job]:
    """Jobs in a fixed order: chains as configured, then functions, then parameters."""
    jobs = []
    for chain in cfg.chains:
        if chain == "specfun":
            jobs.extend(Job("specfun", "constants", "n", float(n)) for n in range(1, 6))
            continue
        for name in _functions(cfg):
            if not _supports(name, chain):
                continue
            if chain in ALPHA_CHAINS:
                jobs.extend(Job(chain, name, "alpha", float(a)) for a in cfg.alphas[chain])
            elif chain in RESOLUTION_CHAINS:
                jobs.extend(Job(chain, name, "m", float(r)) for r in _resolutions(cfg.m))
            else:
                jobs.append(Job(chain, name, "m", float(cfg.m)))
    return jobs


def _build(name, m, seed):
    if name.startswith("random"):
        dim, s, k = name[len("random"):].split("_")
        return random_grid_function(int(dim[0]), m, int(s) * 1000 + int(k))
    return CORPUS[name].build(m)


def _evaluate(job: Job, cfg: RunConfig) -> dict:
    if job.chain == "specfun":
        return harness.specfun_self_test(int(job.value)).to_record()
    m = int(job.value) if job.param == "m" else cfg.m
    f = _build(job.function, m, cfg.seed)
    quad = sphere_quadrature(f.n, cfg.sphere_nodes) if f.n == 2 else None
    kw = {"name": job.function, "multiplier": cfg.multiplier}
    if job.chain == "affine_hls":
        rep = harness.verify_affine_hls(f, job.value, quad=quad, **kw)
    elif job.chain == "affine_frac_l2":
        rep = harness.verify_affine_frac_l2(f, job.value, quad=quad, **kw)
    elif job.chain == "affine_log_hls":
        rep = harness.verify_affine_log_hls(f, quad=quad, **kw)
    elif job.chain == "affine_log_sobolev":
        rep = harness.verify_affine_log_sobolev(f, quad=quad, **kw)
    else:
        rep = harness.verify_beckner(f, **kw)
    return rep.to_record()


def _run_job(args):
    job, cfg = args
    try:
        rec = _evaluate(job, cfg)
    except Exception as exc:  # reported as a failed check, never swallowed
        rec = {"chain": job.chain, "function": job.function, "n": 0, "params": {}, "terms": [], "errors": [],
               "slacks": [], "tolerances": [], "passed": False, "flags": [f"error: {type(exc).__name__}: {exc}"],
               "residuals": [], "equality_direction": "sufficiency"}
    rec["job"] = {"param": job.param, "value": job.value}
    return rec


# output -----------------------------------------------------------------


def _fmt(x):
    return "%.12e" % x


def _csv_row(rec):
    def pick(seq, i):
        return _fmt(seq[i]) if i < len(seq) else ""

    p = rec["params"]
    return [
        rec["chain"], rec["function"], str(rec["n"]), rec["job"]["param"], _fmt(rec["job"]["value"]),
        str(p.get("m", "")), "1" if rec["passed"] else "0", ";".join(rec["flags"]),
        *(pick(rec["terms"], i) for i in range(3)), *(pick(rec["errors"], i) for i in range(3)),
        *(pick(rec["slacks"], i) for i in range(2)), *(pick(rec["tolerances"], i) for i in range(2)),
        *(pick(rec["residuals"], i) for i in range(2)),
    ]


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rec in records:
        w.writerow(_csv_row(rec))
    return buf.getvalue()


def _file_stem(rec):
    return f"{rec['chain']}__{rec['function']}__{rec['job']['param']}={rec['job']['value']:g}"


def run(cfg: RunConfig, *, log=print) -> int:
    """Run every planned job; returns the process exit status (0 all pass, 1 otherwise)."""
    cfg.validate()
    jobs = plan(cfg)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.time()
    args = [(j, cfg) for j in jobs]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            records = list(pool.map(_run_job, args))
    else:
        records = [_run_job(a) for a in args]
    records.sort(key=lambda r: (CHAINS.index(r["chain"]), r["function"], r["job"]["param"], r["job"]["value"]))
    stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    if "json" in cfg.formats:
        jdir = out / "json"
        jdir.mkdir(exist_ok=True)
        for rec in records:
            doc = dict(rec, timestamp=stamp, corpus_version=CORPUS_VERSION, seed=cfg.seed)
            (jdir / f"{_file_stem(rec)}.json").write_text(json.dumps(doc, indent=2, allow_nan=True))
    if "csv" in cfg.formats:
        (out / "reports.csv").write_text(records_to_csv(records))
    bad = [r for r in records if not r["passed"] or r["flags"]]
    for r in bad:
        log(f"FAIL {_file_stem(r)} flags={r['flags']} slacks={r['slacks']} tolerances={r['tolerances']}")
    log(f"{len(records) - len(bad)}/{len(records)} checks passed in {time.time() - t0:.1f}s; reports in {out}")
    return 1 if bad else 0


# summary ----------------------------------------------------------------


def _margin(rec):
    """Smallest ``slack + tolerance`` of a record (nonnegative means pass)."""
    vals = [s + t for s, t in zip(rec.get("slacks", []), rec.get("tolerances", []))]
    return min(vals) if vals else math.nan


def report_summary(directory, *, log=print) -> int:
    """Print per-chain pass counts, worst slack margin and max residual for a report directory."""
    root = Path(directory)
    files = sorted((root / "json").glob("*.json")) if (root / "json").is_dir() else sorted(root.glob("*.json"))
    if not root.is_dir() or not files:
        log(f"no reports in {root}")
        return 0
    rows, errors = {}, []
    for path in files:
        try:
            rec = json.loads(path.read_text())
            chain, passed = rec["chain"], bool(rec["passed"])
            margin, resid = _margin(rec), max(rec.get("residuals") or [math.nan])
        except (OSError, ValueError, KeyError, TypeError) as exc:
            errors.append((path.name, f"{type(exc).__name__}: {exc}"))
            continue
        row = rows.setdefault(chain, {"total": 0, "passed": 0, "margin": math.inf, "residual": 0.0})
        row["total"] += 1
        row["passed"] += passed and not rec.get("flags")
        if math.isfinite(margin):
            row["margin"] = min(row["margin"], margin)
        if math.isfinite(resid):
            row["residual"] = max(row["residual"], resid)
    header = f"{'chain':20s} {'passed':>9s} {'worst margin':>14s} {'max residual':>14s}"
    log(header)
    log("-" * len(header))
    for chain in sorted(rows, key=lambda c: (CHAINS.index(c) if c in CHAINS else len(CHAINS), c)):
        r = rows[chain]
        log(f"{chain:20s} {r['passed']:>4d}/{r['total']:<4d} {r['margin']:>14.3e} {r['residual']:>14.3e}")
    if errors:
        log("errors:")
        for name, msg in errors:
            log(f"  {name}: {msg}")
    return 0


# argument parsing -------------------------------------------------------


def _float_list(s):
    return [float(v) for v in s.split(",") if v.strip()]


def _str_list(s):
    return [v.strip() for v in s.split(",") if v.strip()]


def config_from_args(ns, environ=os.environ) -> RunConfig:
    data = {}
    if ns.config:
        try:
            data = json.loads(Path(ns.config).read_text())
        except (OSError, ValueError) as exc:
            raise ConfigError(f"config: cannot read {ns.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config: must be a JSON object")
    if environ.get(ENV_OUTPUT):
        data["output_dir"] = environ[ENV_OUTPUT]
    flags = {
        "chains": ns.chains, "dimensions": ns.dimensions, "m": ns.m, "sphere_nodes": ns.sphere_nodes,
        "multiplier": ns.multiplier, "seed": ns.seed, "random_functions": ns.random_functions,
        "functions": ns.functions, "output_dir": ns.output_dir, "formats": ns.formats, "jobs": ns.jobs,
    }
    data.update({k: v for k, v in flags.items() if v is not None})
    alphas = dict(data.get("alphas", {}))
    if ns.hls_alphas is not None:
        alphas["affine_hls"] = ns.hls_alphas
    if ns.frac_alphas is not None:
        alphas["affine_frac_l2"] = ns.frac_alphas
    if alphas:
        data["alphas"] = alphas
    return RunConfig.from_mapping(data).validate()


def _parser():
    ap = argparse.ArgumentParser(prog="affine-hls", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run chain verifications and write reports")
    r.add_argument("--config", help="flat JSON config file; flags override its values")
    r.add_argument("--chains", type=_str_list, help=f"comma list from {', '.join(CHAINS)}")
    r.add_argument("--dimensions", type=lambda s: [int(v) for v in _str_list(s)])
    r.add_argument("--hls-alphas", type=_float_list, help="alpha list for affine_hls")
    r.add_argument("--frac-alphas", type=_float_list, help="alpha list for affine_frac_l2")
    r.add_argument("-m", type=int, help="grid resolution (power of two, 32..512)")
    r.add_argument("--sphere-nodes", type=int)
    r.add_argument("--multiplier", type=float, help="tolerance multiplier on error estimates")
    r.add_argument("--seed", type=int)
    r.add_argument("--random-functions", type=int, help="random grid functions per dimension")
    r.add_argument("--functions", type=_str_list, help="restrict to these corpus entries")
    r.add_argument("--output-dir")
    r.add_argument("--formats", type=_str_list)
    r.add_argument("--jobs", type=int)
    s = sub.add_parser("summary", help="summarize a report directory")
    s.add_argument("directory", nargs="?", default=None)
    c = sub.add_parser("corpus", help="corpus utilities")
    c.add_argument("action", choices=["list"])
    return ap


def main(argv=None) -> int:
    ns = _parser().parse_args(argv)
    if ns.command == "run":
        try:
            cfg = config_from_args(ns)
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
        try:
            return run(cfg)
        except OSError as exc:
            print(f"I/O error: {exc}", file=sys.stderr)
            return 2
    if ns.command == "summary":
        directory = ns.directory or os.environ.get(ENV_OUTPUT) or "reports"
        return report_summary(directory)
    print(f"corpus version {CORPUS_VERSION}")
    for name, e in CORPUS.items():
        print(f"{name:12s} n={e.n} {e.kind:6s} {e.description}  [{', '.join(e.tags)}]")
    return 0


if __name__ == "__main__":
    sys.exit(main())
