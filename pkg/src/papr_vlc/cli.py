"""Command-line front end writing CCDF / violation / variance curves.

Exit codes: 0 success, 1 configuration error, 2 runtime or convergence
error, 3 selftest failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import json
import os
import sys
import tempfile
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from . import __version__
from . import analytic as an
from .ofdm_signal import SUPPORTED_ORDERS, batch_generate, make_constellation
from .papr_stats import ccdf_std_error, db_to_ratio, empirical_ccdf, peak_arrays, peak_triple
from .quadrature import QuadratureError
from .scaling_bias import BiasScalePlan, variance_mc, violation_rate_mc
from .selftest import run_selftest

COMMANDS = ("ccdf", "violation", "variance", "gen", "selftest")
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RangeSpec:
    lo: float
    hi: float
    step: float

    @classmethod
    def parse(cls, text: str, field: str) -> "RangeSpec":
        try:
            lo, hi, step = (float(p) for p in str(text).split(":"))
        except ValueError:
            raise ConfigError(f"{field}: expected lo:hi:step, got {text!r}") from None
        if not step > 0 or hi < lo:
            raise ConfigError(f"{field}: need step > 0 and hi >= lo, got {text!r}")
        return cls(lo, hi, step)

    def values(self) -> np.ndarray:
        count = int(round((self.hi - self.lo) / self.step)) + 1
        return np.round(self.lo + self.step * np.arange(count), 10)

    def __str__(self) -> str:
        return f"{self.lo!r}:{self.hi!r}:{self.step!r}"


@dataclass(frozen=True)
class RunConfig:
    command: str = "ccdf"
    n_subcarriers: tuple[int, ...] = (1024,)
    qam_order: tuple[int, ...] = (4,)
    symbols: int = 100_000
    seed: int = 2024
    thresholds_db: RangeSpec = RangeSpec(4.0, 14.0, 0.1)
    biasing_ratios: tuple[float, ...] = (0.1, 0.2, 0.3, 0.4, 0.5)
    backoffs_db: RangeSpec = RangeSpec(5.0, 35.0, 1.0)
    output_path: str | None = None
    format: str = "csv"

    def echo(self) -> dict:
        d = dataclasses.asdict(self)
        d["thresholds_db"] = str(self.thresholds_db)
        d["backoffs_db"] = str(self.backoffs_db)
        d["n_subcarriers"] = list(self.n_subcarriers)
        d["qam_order"] = list(self.qam_order)
        d["biasing_ratios"] = list(self.biasing_ratios)
        return d


_FIG_RATIOS = (0.1, 0.2, 0.3, 0.4, 0.5)
PRESETS: dict[str, dict] = {
    "fig1": dict(command="ccdf", n_subcarriers=(128, 1024), qam_order=(4, 64, 256)),
    "fig2": dict(command="violation", n_subcarriers=(128,), qam_order=(4, 64, 256),
                 biasing_ratios=_FIG_RATIOS, backoffs_db=RangeSpec(5.0, 35.0, 0.5)),
    "fig3": dict(command="violation", n_subcarriers=(1024,), qam_order=(4, 64, 256),
                 biasing_ratios=_FIG_RATIOS, backoffs_db=RangeSpec(5.0, 35.0, 0.5)),
    "fig4": dict(command="variance", n_subcarriers=(128, 1024), qam_order=(4, 64, 256),
                 biasing_ratios=tuple(round(0.05 * i, 2) for i in range(1, 11))),
}


def _int_list(value, field: str) -> tuple[int, ...]:
    items = value if isinstance(value, (list, tuple)) else str(value).split(",")
    try:
        return tuple(int(v) for v in items)
    except (TypeError, ValueError):
        raise ConfigError(f"{field}: expected comma-separated integers, got {value!r}") from None


def _float_list(value, field: str) -> tuple[float, ...]:
    items = value if isinstance(value, (list, tuple)) else str(value).split(",")
    try:
        return tuple(float(v) for v in items)
    except (TypeError, ValueError):
        raise ConfigError(f"{field}: expected comma-separated numbers, got {value!r}") from None


def _coerce(key: str, value):
    if key in ("n_subcarriers", "qam_order"):
        return _int_list(value, key)
    if key == "biasing_ratios":
        return _float_list(value, key)
    if key in ("thresholds_db", "backoffs_db"):
        return value if isinstance(value, RangeSpec) else RangeSpec.parse(value, key)
    if key in ("symbols", "seed"):
        try:
            return int(value)
        except (TypeError, ValueError):
            raise ConfigError(f"{key}: expected an integer, got {value!r}") from None
    return value


def _validate(cfg: RunConfig) -> None:
    if cfg.command not in COMMANDS:
        raise ConfigError(f"command: must be one of {COMMANDS}, got {cfg.command!r}")
    if cfg.format not in FORMATS:
        raise ConfigError(f"format: must be one of {FORMATS}, got {cfg.format!r}")
    for n in cfg.n_subcarriers:
        if n < 8 or n & (n - 1):
            raise ConfigError(f"n_subcarriers: {n} is not a power of two >= 8")
    for m in cfg.qam_order:
        if m not in SUPPORTED_ORDERS:
            raise ConfigError(f"qam_order: {m} not in {SUPPORTED_ORDERS}")
    if cfg.seed < 0:
        raise ConfigError("seed: must be >= 0")
    if cfg.command in ("ccdf", "gen") and cfg.symbols < 1:
        raise ConfigError(f"symbols: {cfg.command} needs at least 1 symbol")
    if cfg.command in ("violation", "variance") and cfg.symbols < 0:
        raise ConfigError("symbols: must be >= 0")
    if cfg.command == "variance":
        if 0 < cfg.symbols < 1000:
            raise ConfigError("symbols: variance Monte Carlo needs 0 or >= 1000 symbols")
    if cfg.command in ("violation", "variance"):
        for s in cfg.biasing_ratios:
            if not 0.0 < s <= 0.5:
                raise ConfigError(f"biasing_ratios: {s} outside (0, 0.5]")
    if cfg.command == "gen" and (len(cfg.n_subcarriers) != 1 or len(cfg.qam_order) != 1):
        raise ConfigError("gen: give exactly one --n and one --qam")
    if cfg.output_path and cfg.output_path != "-":
        parent = os.path.dirname(os.path.abspath(cfg.output_path))
        if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
            raise ConfigError(f"output_path: directory {parent!r} is not writable")


def build_config(args: argparse.Namespace) -> RunConfig:
    """Defaults < preset < config file < command-line flags."""
    merged: dict = {}
    if args.preset:
        if args.preset not in PRESETS:
            raise ConfigError(f"preset: unknown {args.preset!r}; choose from {sorted(PRESETS)}")
        merged.update(PRESETS[args.preset])
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"config: cannot read {args.config!r}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: {args.config}: line {exc.lineno}: {exc.msg}") from None
        known = {f.name for f in dataclasses.fields(RunConfig)}
        for key, value in data.items():
            norm = key.replace("-", "_")
            if norm not in known:
                raise ConfigError(f"config: unknown field {key!r}")
            merged[norm] = value
    flags = {
        "command": args.command, "n_subcarriers": args.n, "qam_order": args.qam,
        "symbols": args.symbols, "seed": args.seed, "thresholds_db": args.thresholds_db,
        "biasing_ratios": args.biasing_ratios, "backoffs_db": args.backoff_db,
        "output_path": args.out, "format": args.format,
    }
    merged.update({k: v for k, v in flags.items() if v is not None})
    cfg = RunConfig(**{k: _coerce(k, v) for k, v in merged.items()})
    _validate(cfg)
    return cfg


# ---- table builders -------------------------------------------------------

def ccdf_table(cfg: RunConfig):
    cols = ["n", "qam", "threshold_db", "threshold",
            "ccdf_upapr_emp", "ccdf_lpapr_emp", "ccdf_papr_emp",
            "ccdf_upapr_theory", "ccdf_papr_theory",
            "se_upapr", "se_papr", "symbols"]
    db = cfg.thresholds_db.values()
    r = db_to_ratio(db)
    rows = []
    for N in cfg.n_subcarriers:
        th_u = np.asarray(an.ccdf_upapr(r, N))
        th_p = np.asarray(an.ccdf_papr_real(r, N))
        se_u = ccdf_std_error(th_u, cfg.symbols)
        se_p = ccdf_std_error(th_p, cfg.symbols)
        for M in cfg.qam_order:
            pk = peak_arrays(N, M, cfg.symbols, cfg.seed)
            emp = {k: empirical_ccdf([v], r).probabilities for k, v in pk.items()}
            for i in range(len(r)):
                rows.append([N, M, db[i], r[i], emp["upapr"][i], emp["lpapr"][i],
                             emp["papr"][i], th_u[i], th_p[i], se_u[i], se_p[i], cfg.symbols])
    return "ccdf/1", cols, rows


def violation_table(cfg: RunConfig):
    cols = ["n", "qam", "varsigma", "backoff_db", "backoff",
            "prob_theory", "prob_mc", "se_theory", "symbols"]
    db = cfg.backoffs_db.values()
    gammas = db_to_ratio(db)
    rows = []
    for N in cfg.n_subcarriers:
        for M in cfg.qam_order:
            for s in cfg.biasing_ratios:
                theory = np.asarray(an.violation_probability(gammas, s, N))
                for i, g in enumerate(gammas):
                    mc = se = None
                    if cfg.symbols > 0:
                        mc = violation_rate_mc(BiasScalePlan.normalized(s, float(g)),
                                               N, M, cfg.symbols, cfg.seed)
                        se = ccdf_std_error(min(max(theory[i], 0.0), 1.0), cfg.symbols)
                    rows.append([N, M, s, db[i], g, theory[i], mc, se, cfg.symbols])
    return "violation/1", cols, rows


def variance_table(cfg: RunConfig):
    cols = ["n", "qam", "varsigma", "variance_quad", "variance_mc", "rel_diff", "symbols"]
    rows = []
    for N in cfg.n_subcarriers:
        quad = {}
        for s in cfg.biasing_ratios:
            try:
                quad[s] = an.symbol_variant_variance(s, N, 1.0)
            except QuadratureError as exc:
                raise QuadratureError(f"varsigma={s}, N={N}: {exc}", exc.estimate, exc.error) from exc
        for M in cfg.qam_order:
            for s in cfg.biasing_ratios:
                mc = rel = None
                if cfg.symbols > 0:
                    mc = variance_mc(s, N, M, cfg.symbols, cfg.seed, 1.0)
                    rel = (mc - quad[s]) / quad[s]
                rows.append([N, M, s, quad[s], mc, rel, cfg.symbols])
    return "variance/1", cols, rows


def gen_rows(cfg: RunConfig) -> Iterable[list]:
    N, M = cfg.n_subcarriers[0], cfg.qam_order[0]
    for i, sym in enumerate(batch_generate(cfg.symbols, N, make_constellation(M), cfg.seed)):
        p = peak_triple(sym)
        yield [i, p.papr, p.upapr, p.lpapr, *sym.x.tolist()]


# ---- serialization --------------------------------------------------------

def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _plain(v):
    if v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, np.integer):
        return int(v)
    return float(v)


def render(cfg: RunConfig, schema: str, cols: Sequence[str], rows: Iterable[list], fh) -> None:
    header = {"tool": f"papr-vlc {__version__}", "schema": schema,
              "seed": cfg.seed, "config": cfg.echo()}
    if cfg.format == "json":
        doc = dict(header, columns=list(cols), rows=[[_plain(v) for v in r] for r in rows])
        json.dump(doc, fh, indent=1)
        fh.write("\n")
        return
    fh.write(f"# tool: {header['tool']}\n# schema: {schema}\n# seed: {cfg.seed}\n")
    fh.write(f"# config: {json.dumps(header['config'], sort_keys=True)}\n")
    fh.write(",".join(cols) + "\n")
    for r in rows:
        fh.write(",".join(fmt(v) for v in r) + "\n")


def write_output(cfg: RunConfig, schema: str, cols, rows) -> None:
    if not cfg.output_path or cfg.output_path == "-":
        render(cfg, schema, cols, rows, sys.stdout)
        return
    target = os.path.abspath(cfg.output_path)
    fd, tmp = tempfile.mkstemp(prefix=".papr-vlc-", dir=os.path.dirname(target))
    try:
        with io.open(fd, "w", encoding="utf-8", newline="\n") as fh:
            render(cfg, schema, cols, rows, fh)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_selftest(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    results = run_selftest()
    for r in results:
        print(r.line(), file=out)
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed", file=out)
    return 3 if failed else 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="papr-vlc",
        description="UPAPR/LPAPR statistics of real-valued VLC-OFDM: curves and checks.",
    )
    p.add_argument("--command", help=" | ".join(COMMANDS))
    p.add_argument("--preset", help="fig1 | fig2 | fig3 | fig4")
    p.add_argument("--config", help="JSON file with RunConfig fields")
    p.add_argument("--n", help="subcarrier count(s), comma-separated")
    p.add_argument("--qam", help="QAM order(s), comma-separated (4, 64, 256)")
    p.add_argument("--symbols", help="Monte Carlo symbol count")
    p.add_argument("--seed")
    p.add_argument("--thresholds-db", dest="thresholds_db", help="lo:hi:step")
    p.add_argument("--biasing-ratios", dest="biasing_ratios", help="a,b,c")
    p.add_argument("--backoff-db", dest="backoff_db", help="lo:hi:step")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", help="csv | json")
    p.add_argument("--version", action="version", version=f"papr-vlc {__version__}")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = build_config(make_parser().parse_args(argv))
    except ConfigError as exc:
        print(f"papr-vlc: config error: {exc}", file=sys.stderr)
        return 1
    try:
        if cfg.command == "selftest":
            return cmd_selftest(cfg)
        if cfg.command == "gen":
            cols = ["index", "papr", "upapr", "lpapr",
                    *(f"x{n}" for n in range(cfg.n_subcarriers[0]))]
            write_output(cfg, "gen/1", cols, gen_rows(cfg))
        else:
            builder = {"ccdf": ccdf_table, "violation": violation_table,
                       "variance": variance_table}[cfg.command]
            write_output(cfg, *builder(cfg))
    except (QuadratureError, OSError, ValueError) as exc:
        print(f"papr-vlc: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
