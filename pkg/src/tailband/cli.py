"""``tailband`` command line: parse a scenario config, run it, write CSVs.

Config files are ``key = value`` lines; ``#`` starts a comment::

    distribution = pareto
    dist_params = 0.5
    n_machines = 50
    m_per_machine = 2000
    d_exceedances = 40
    replications = 1000
    seed = 20240611
    estimators = hill, moment       # optional, default hill
    quantile_p = 1e-5               # optional
    xgrid = 1, 10, 50               # optional: start, stop, count (log-spaced)
    sgrid = 0.02, 1, 50             # optional: start, stop, count (linear)
    output_dir = ./out              # optional
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .distributions import parse_distribution
from .experiment import ScenarioConfig, oracle_gap, run_scenario, summarize_values

REQUIRED = ("distribution", "dist_params", "n_machines", "m_per_machine",
            "d_exceedances", "replications", "seed")
OPTIONAL = ("estimators", "quantile_p", "xgrid", "sgrid", "output_dir")

REPLICATION_COLUMNS = ("rep", "estimator", "mode", "value", "failed", "reason")
SUMMARY_COLUMNS = ("estimator", "mode", "mean", "bias", "sd", "rmse", "ks_normal", "failures")
GAP_COLUMNS = ("estimator", "ks_two_sample", "diff_mean", "diff_sd")
CURVE_COLUMNS = ("rep", "process", "mode", "grid_point", "value")


class ConfigError(ValueError):
    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key


def _split(value):
    return [t for t in value.replace(",", " ").split() if t]


def _int(key, value):
    try:
        return int(value)
    except ValueError:
        raise ConfigError(key, f"expected an integer, got {value!r}") from None


def _float(key, value):
    try:
        return float(value)
    except ValueError:
        raise ConfigError(key, f"expected a number, got {value!r}") from None


def _grid(key, value, log):
    parts = _split(value)
    if len(parts) != 3:
        raise ConfigError(key, "expected 'start, stop, count'")
    start, stop = _float(key, parts[0]), _float(key, parts[1])
    count = _int(key, parts[2])
    if count < 1:
        raise ConfigError(key, "count must be positive")
    if log:
        if start <= 0 or stop <= 0:
            raise ConfigError(key, "log-spaced grid needs positive endpoints")
        return tuple(np.geomspace(start, stop, count))
    return tuple(np.linspace(start, stop, count))


# ScenarioConfig messages start with the offending config key
_FIELD_KEYS = ("n_machines", "m_per_machine", "d_exceedances", "replications", "seed",
               "estimators", "quantile_p", "xgrid", "sgrid")


def parse_config(text: str) -> ScenarioConfig:
    """Parse ``key = value`` text into a validated :class:`ScenarioConfig`."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {line!r}")
        if key not in REQUIRED + OPTIONAL:
            raise ConfigError(key, "unknown key")
        if key in raw:
            raise ConfigError(key, "duplicate key")
        raw[key] = value
    for key in REQUIRED:
        if key not in raw:
            raise ConfigError(key, "missing required key")

    kwargs = {}
    try:
        params = [_float("dist_params", t) for t in _split(raw["dist_params"])]
        kwargs["distribution"] = parse_distribution(raw["distribution"], params)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("distribution", str(exc)) from None
    kwargs["J"] = _int("n_machines", raw["n_machines"])
    kwargs["m"] = _int("m_per_machine", raw["m_per_machine"])
    kwargs["d"] = _int("d_exceedances", raw["d_exceedances"])
    kwargs["replications"] = _int("replications", raw["replications"])
    kwargs["master_seed"] = _int("seed", raw["seed"])
    if "estimators" in raw:
        kwargs["estimators"] = tuple(t.lower() for t in _split(raw["estimators"]))
    if "quantile_p" in raw:
        kwargs["quantile_p"] = _float("quantile_p", raw["quantile_p"])
    if "xgrid" in raw:
        kwargs["xgrid"] = _grid("xgrid", raw["xgrid"], log=True)
    if "sgrid" in raw:
        kwargs["sgrid"] = _grid("sgrid", raw["sgrid"], log=False)
    if "output_dir" in raw:
        kwargs["output_dir"] = raw["output_dir"]

    try:
        return ScenarioConfig(**kwargs)
    except ValueError as exc:
        msg = str(exc)
        if "is not a valid EstimatorKind" in msg:
            raise ConfigError("estimators", msg) from None
        key = next((k for k in _FIELD_KEYS if msg.startswith(k)), "config")
        raise ConfigError(key, msg) from None


def fmt(x) -> str:
    """17 significant digits, enough to round-trip a double."""
    return format(float(x), ".17g")


@dataclass
class RunManifest:
    config: dict
    version: str
    duration_seconds: float
    outputs: list[str]


def _config_echo(cfg: ScenarioConfig) -> dict:
    d = asdict(cfg)
    d["distribution"] = {"family": cfg.distribution.family,
                         "params": list(cfg.distribution.params),
                         "true_gamma": cfg.distribution.true_gamma}
    d["estimators"] = [e.value for e in cfg.estimators]
    return d


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def summary_rows(cfg: ScenarioConfig, records):
    """Rows of summary.csv; a group without successes gets NaN statistics."""
    scale = math.sqrt(cfg.k)
    rows = []
    for kind in cfg.estimators:
        for mode in ("distributed", "oracle"):
            recs = [r for r in records if r.estimator == kind.value and r.mode == mode]
            ok = [r.value for r in recs if not r.failed]
            nfail = len(recs) - len(ok)
            if not ok:
                rows.append([kind.value, mode] + ["nan"] * 5 + [nfail])
                continue
            s = summarize_values(ok, cfg.truth(kind), scale, failures=nfail)
            rows.append([kind.value, mode, fmt(s.mean), fmt(s.bias), fmt(s.sd),
                         fmt(s.rmse), fmt(s.ks_normal), s.failures])
    return rows


def execute(cfg: ScenarioConfig, threads: int | None = None, curves: bool = False,
            output_dir: str | os.PathLike | None = None) -> RunManifest:
    """Run the scenario and write the CSV outputs plus ``manifest.json``."""
    start = time.perf_counter()
    out = Path(output_dir if output_dir is not None else cfg.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output directory {str(out)!r} is not writable: {exc.strerror}") from None

    result = run_scenario(cfg, workers=threads or os.cpu_count() or 1, curves=curves)
    records = result.records

    paths = [out / "replications.csv", out / "summary.csv", out / "oracle_gap.csv"]
    _write_csv(paths[0], REPLICATION_COLUMNS, (
        [r.rep, r.estimator, r.mode, fmt(r.value), int(r.failed), r.reason] for r in records))
    _write_csv(paths[1], SUMMARY_COLUMNS, summary_rows(cfg, records))

    gap_rows = []
    for kind in cfg.estimators:
        try:
            g = oracle_gap([r for r in records if r.estimator == kind.value])[kind.value]
            gap_rows.append([kind.value, fmt(g.ks_two_sample), fmt(g.diff_mean), fmt(g.diff_sd)])
        except ValueError:
            gap_rows.append([kind.value, "nan", "nan", "nan"])
    _write_csv(paths[2], GAP_COLUMNS, gap_rows)

    if curves:
        paths.append(out / "curves.csv")
        _write_csv(paths[3], CURVE_COLUMNS, (
            [c.rep, c.process, c.mode, fmt(c.grid_point), fmt(c.value)] for c in result.curves))

    manifest = RunManifest(_config_echo(cfg), __version__,
                           time.perf_counter() - start, [str(p) for p in paths])
    mpath = out / "manifest.json"
    manifest.outputs.append(str(mpath))
    mpath.write_text(json.dumps(asdict(manifest), indent=2) + "\n")
    return manifest


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tailband", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario and write CSV outputs")
    run.add_argument("config", help="path to a key = value scenario file")
    run.add_argument("--threads", type=int, default=None,
                     help="worker processes (default: all CPUs); never changes output")
    run.add_argument("--curves", action="store_true", help="also write curves.csv")
    val = sub.add_parser("validate", help="parse a scenario file and report problems")
    val.add_argument("config")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(Path(args.config).read_text())
        if args.command == "validate":
            print(f"ok: {cfg.distribution.family} J={cfg.J} m={cfg.m} d={cfg.d} "
                  f"R={cfg.replications}")
            return 0
        if args.threads is not None and args.threads < 1:
            raise ValueError("--threads must be at least 1")
        manifest = execute(cfg, threads=args.threads, curves=args.curves,
                           output_dir=os.environ.get("TAILBAND_OUT") or None)
        print(f"wrote {len(manifest.outputs)} files to "
              f"{Path(manifest.outputs[0]).parent} in {manifest.duration_seconds:.1f}s")
        return 0
    except (OSError, ValueError) as exc:
        print(f"tailband: error: {' '.join(str(exc).split())}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
