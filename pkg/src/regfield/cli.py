"""Command line front end: ``regfield analyze|factor|simulate|verify``.

Every command prints a versioned report (JSON or CSV).  Exit codes: 0 on
success/PASS, 1 on a domain failure (non-positive symbol, failed check,
internal inconsistency), 2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from .correlation import (
    DEFAULT_K,
    check_v_identity,
    correlations_from_symbol,
    min_section_eigenvalue,
    symbol_identity_residual,
)
from .errors import RegFieldError
from .factorization import (
    MAX_ROOTING_DEGREE,
    SpectralFactor,
    band_beta_to_b,
    beta_from_factor,
    fejer_riesz,
    szego_factor,
    verify_bbeta_identity,
    yule_walker,
)
from .simulation import (
    empirical_correlations,
    estimate_one_sided,
    estimate_two_sided,
    simulate_ar,
    simulate_circulant,
)
from .symbol import Verdict, build_symbol, check_positivity

SCHEMA_VERSION = 1
ROUTE_TOL = 1e-6
SIGMA_LEVEL = 3.0
FORMATS = ("json", "csv")


class UsageError(Exception):
    pass


@dataclass
class JobConfig:
    """Job parameters.  Keys in config files and flags share the names in ``_FLAG``."""

    b_coeffs: list[float] | None = None
    beta_coeffs: list[float] | None = None
    K: int | None = None
    order: int | None = None
    T: int = 100_000
    replications: int = 4
    seed: int = 0
    grid: int = 1024
    output_format: str = "json"
    generator: str = "AR"

    def validate(self) -> "JobConfig":
        if (self.b_coeffs is None) == (self.beta_coeffs is None):
            raise UsageError("give exactly one of --b / --beta")
        for name in ("T", "replications", "grid"):
            if getattr(self, name) < 1:
                raise UsageError(f"{_FLAG[name]} must be positive")
        if self.K is not None and self.K < 1:
            raise UsageError("--K must be positive")
        if self.order is not None and self.order < 1:
            raise UsageError("--order must be positive")
        if self.grid & (self.grid - 1):
            raise UsageError("--grid must be a power of two")
        if self.output_format not in FORMATS:
            raise UsageError(f"--format must be one of {FORMATS}")
        if self.generator not in ("AR", "CIRCULANT"):
            raise UsageError("--generator must be AR or CIRCULANT")
        return self

    def to_dict(self) -> dict:
        return {_FLAG[k]: v for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, d: dict) -> "JobConfig":
        kw = {}
        for key, value in d.items():
            if key not in _FIELD:
                raise UsageError(f"unknown config key {key!r}")
            kw[_FIELD[key]] = value
        return cls(**kw)


_FLAG = {
    "b_coeffs": "b",
    "beta_coeffs": "beta",
    "K": "K",
    "order": "order",
    "T": "T",
    "replications": "reps",
    "seed": "seed",
    "grid": "grid",
    "output_format": "format",
    "generator": "generator",
}
_FIELD = {v: k for k, v in _FLAG.items()}
assert set(_FLAG) == {f.name for f in fields(JobConfig)}


def _block(values=None, residuals=None) -> dict:
    return {"values": values or {}, "residuals": residuals or {}}


def _floats(a) -> list[float]:
    return [float(x) for x in np.asarray(a).ravel()]


def _quantity(value, stderr=None, truth=None, passed=None) -> dict:
    q = {"value": value}
    if stderr is not None:
        q["stderr"] = stderr
    if truth is not None:
        q["truth"] = truth
    if passed is not None:
        q["pass"] = passed
    return q


def _new_report(command: str, config: JobConfig) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "command": command,
        "input": _block({"config": config.to_dict()}),
        "existence": None,
        "correlation": None,
        "factorization": None,
        "verification": None,
        "notes": [],
    }


def _resolve_symbol(config: JobConfig, report: dict):
    if config.beta_coeffs is not None:
        sym = band_beta_to_b(config.beta_coeffs)
        report["input"]["values"]["beta"] = _floats(config.beta_coeffs)
    else:
        sym = build_symbol(config.b_coeffs)
    report["input"]["values"]["b"] = sym.tolist()
    report["input"]["values"]["N"] = sym.N
    return sym


def _analyze(config: JobConfig, report: dict):
    """Fill the existence and correlation blocks; return (sym, corr) or (sym, None)."""
    sym = _resolve_symbol(config, report)
    pos = check_positivity(sym)
    report["existence"] = _block(pos.to_dict())
    if not pos.is_positive:
        if pos.verdict is Verdict.NEAR_SINGULAR:
            report["notes"].append(f"symbol minimum {pos.min_value:.3e} is positive but below tolerance")
        else:
            report["notes"].append("symbol attains 0" if abs(pos.min_value) < 1e-12
                                   else "symbol attains negative values")
        return sym, None

    corr = correlations_from_symbol(sym, config.K)
    if config.K is None and corr.K > DEFAULT_K:
        report["notes"].append(
            f"slow correlation decay: K enlarged to {corr.K} so that |r_K| < 1e-12"
        )
    tail = abs(corr.r[-1])
    report["correlation"] = _block(
        {"K": corr.K, "r": _floats(corr.r), "v": corr.v},
        {
            "b_times_r_minus_v": symbol_identity_residual(sym, corr, max(config.grid, 4 * corr.K)),
            "v_identity": check_v_identity(sym, corr) if corr.K >= sym.N else None,
            "tail_ratio": tail,
            "min_section_eigenvalue": min_section_eigenvalue(corr),
        },
    )
    return sym, corr


def cmd_analyze(config: JobConfig) -> tuple[dict, int]:
    report = _new_report("analyze", config)
    _, corr = _analyze(config, report)
    return report, 0 if corr is not None else 1


def _factor(config: JobConfig, report: dict, sym, corr) -> int:
    N = sym.N
    values, residuals = {}, {}
    if N <= MAX_ROOTING_DEGREE:
        fr = fejer_riesz(sym)
    else:
        fr = None
        report["notes"].append("band width above rooting limit; cepstral route is authoritative")
    sz = szego_factor(sym)
    if fr is not None:
        primary = fr
    else:
        # a band symbol has a band factor; whatever the cepstral route puts past N is error
        residuals["szego_beyond_N"] = float(np.max(np.abs(sz.c[N + 1:]), initial=0.0))
        c = sz.c[: N + 1]
        primary = SpectralFactor(c / np.sqrt(np.sum(c**2)))
    model, v_over_w = beta_from_factor(primary, corr)
    values.update(
        beta=_floats(model.betas),
        w=model.w,
        v=corr.v,
        v_over_w=v_over_w,
        c=_floats(primary.c),
    )

    n_yw = max(4 * N, 1)
    if corr.K < n_yw:
        corr_yw = correlations_from_symbol(sym, n_yw)
    else:
        corr_yw = corr
    beta_yw, w_yw = yule_walker(corr_yw, n_yw)
    values["beta_yule_walker"] = _floats(beta_yw)
    values["w_yule_walker"] = w_yw

    c_sz = np.zeros(max(len(sz.c), len(primary.c)))
    c_sz[: len(sz.c)] = sz.c
    c_pr = np.zeros_like(c_sz)
    c_pr[: len(primary.c)] = primary.c
    route = {
        "szego_vs_fejer_riesz": float(np.max(np.abs(c_sz - c_pr))),
        "yule_walker_vs_factor": float(np.max(np.abs(beta_yw[:N] - model.betas))) if N else 0.0,
        "yule_walker_beyond_N": float(np.max(np.abs(beta_yw[N:]))) if n_yw > N else 0.0,
        "yule_walker_w": abs(w_yw - model.w),
        "v_over_w_vs_ratio": abs(v_over_w - corr.v / model.w),
    }
    if N:
        route["v_over_w_vs_bN_over_betaN"] = abs(v_over_w - sym.coeffs[-1] / model.betas[-1])
    residuals.update(route)
    residuals["bbeta_identity"] = verify_bbeta_identity(sym, model, corr.v, model.w, config.grid)
    if config.beta_coeffs is not None:
        beta_in = np.asarray(config.beta_coeffs, dtype=float)
        nz = np.flatnonzero(beta_in)
        beta_in = beta_in[: nz[-1] + 1] if nz.size else beta_in[:0]
        if beta_in.size == model.order:
            residuals["round_trip"] = float(np.max(np.abs(beta_in - model.betas))) if N else 0.0
        else:
            residuals["round_trip"] = math.inf
            report["notes"].append("recovered band width differs from the input order")
    report["factorization"] = _block(values, residuals)

    worst = max(v for v in residuals.values() if v is not None)
    if worst > ROUTE_TOL:
        report["notes"].append(f"route disagreement {worst:.3e} exceeds {ROUTE_TOL:g}")
        return 1
    return 0


def cmd_factor(config: JobConfig) -> tuple[dict, int]:
    report = _new_report("factor", config)
    sym, corr = _analyze(config, report)
    if corr is None:
        return report, 1
    return report, _factor(config, report, sym, corr)


def cmd_simulate(config: JobConfig) -> tuple[dict, int]:
    report = _new_report("simulate", config)
    sym, corr = _analyze(config, report)
    if corr is None:
        return report, 1
    model, _ = beta_from_factor(_primary_factor(sym), corr)
    if config.generator == "AR":
        path = simulate_ar(model, config.T, seed=config.seed)
    else:
        path = simulate_circulant(corr, config.T, seed=config.seed)
    lags = min(config.order or max(sym.N + 2, 3), corr.K)
    r_hat, se = empirical_correlations(path, lags)
    truth = corr.r[: lags + 1]
    z = np.abs(r_hat - truth)[1:] / se[1:]
    passed = [bool(x <= SIGMA_LEVEL) for x in z]
    report["verification"] = _block(
        {
            "path": path.metadata(),
            "r_hat": _quantity(_floats(r_hat[1:]), _floats(se[1:]), _floats(truth[1:]), passed),
            "sample_variance": float(np.mean(path.values**2)),
        },
        {"max_z": float(z.max()) if z.size else 0.0},
    )
    return report, 0 if all(passed) else 1


def _primary_factor(sym):
    if sym.N <= MAX_ROOTING_DEGREE:
        return fejer_riesz(sym)
    c = szego_factor(sym).c[: sym.N + 1]
    return SpectralFactor(c / np.sqrt(np.sum(c**2)))


def _replicate(args):
    model, J, seed, stream, T = args
    path = simulate_ar(model, T, seed=seed, stream=stream)
    return estimate_two_sided(path, J), estimate_one_sided(path, J)


def _pool(estimates):
    R = len(estimates)
    coeffs = np.mean([e.coeffs for e in estimates], axis=0)
    se = np.sqrt(np.sum([e.stderr**2 for e in estimates], axis=0)) / R
    var = float(np.mean([e.residual_variance for e in estimates]))
    var_se = math.sqrt(sum(e.residual_variance_stderr**2 for e in estimates)) / R
    return coeffs, se, var, var_se


def _check(est, se, truth):
    est, se, truth = np.atleast_1d(est), np.atleast_1d(se), np.atleast_1d(truth)
    ok = [bool(abs(e - t) <= SIGMA_LEVEL * s) for e, s, t in zip(est, se, truth)]
    return _quantity(_floats(est), _floats(se), _floats(truth), ok), all(ok)


def cmd_verify(config: JobConfig) -> tuple[dict, int]:
    report = _new_report("verify", config)
    sym, corr = _analyze(config, report)
    if corr is None:
        return report, 1
    model, _ = beta_from_factor(_primary_factor(sym), corr)
    J = config.order or sym.N + 2
    if config.T <= 50 * J:
        raise UsageError(f"--T must exceed 50 * order = {50 * J}")

    jobs = [(model, J, config.seed, i, config.T) for i in range(config.replications)]
    workers = min(config.replications, os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as ex:
        results = list(ex.map(_replicate, jobs))

    b_true = np.zeros(J)
    b_true[: min(J, sym.N)] = sym.coeffs[:J]
    beta_true = np.zeros(J)
    beta_true[: min(J, model.order)] = model.betas[:J]

    b_hat, b_se, v_hat, v_se = _pool([r[0] for r in results])
    beta_hat, beta_se, w_hat, w_se = _pool([r[1] for r in results])
    checks = {
        "b_hat": _check(b_hat, b_se, b_true),
        "v_hat": _check(v_hat, v_se, corr.v),
        "beta_hat": _check(beta_hat, beta_se, beta_true),
        "w_hat": _check(w_hat, w_se, model.w),
    }
    values = {name: q for name, (q, _) in checks.items()}
    values["replications"] = config.replications
    values["order"] = J
    values["sample_size"] = int(results[0][1].sample_size)
    status = {name: "PASS" if ok else "FAIL" for name, (_, ok) in checks.items()}
    report["verification"] = _block(values, {"status": status})
    return report, 0 if all(s == "PASS" for s in status.values()) else 1


COMMANDS = {
    "analyze": cmd_analyze,
    "factor": cmd_factor,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
}


def _flatten(prefix: str, obj, rows: list):
    if isinstance(obj, dict):
        if "value" in obj:
            vals = obj["value"] if isinstance(obj["value"], list) else [obj["value"]]
            ses = obj.get("stderr")
            ses = ses if isinstance(ses, list) else [ses] * len(vals)
            for i, (v, s) in enumerate(zip(vals, ses), start=1):
                rows.append((prefix, i, v, "" if s is None else s))
            return
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, rows)
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            if isinstance(v, (dict, list)):
                _flatten(f"{prefix}[{i}]", v, rows)
            else:
                rows.append((prefix, i, v, ""))
    elif obj is not None:
        rows.append((prefix, "", obj, ""))


def to_csv(report: dict) -> str:
    rows: list = []
    _flatten("", report, rows)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("name", "index", "value", "stderr"))
    for name, idx, value, se in rows:
        w.writerow((name, idx, repr(value) if isinstance(value, float) else value,
                    repr(se) if isinstance(se, float) else se))
    return buf.getvalue()


def to_json(report: dict) -> str:
    def default(o):
        if isinstance(o, np.generic):
            return o.item()
        raise TypeError(type(o))
    return json.dumps(report, indent=2, default=default, allow_nan=True) + "\n"


def _parse_list(text: str) -> list[float]:
    text = text.strip()
    if not text:
        return []
    try:
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="regfield",
        description="Existence, correlations and AR representation of stationary "
                    "fields with linear two-sided regressions.",
    )
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        g = s.add_mutually_exclusive_group()
        g.add_argument("--b", type=_parse_list, default=None, help="two-sided coefficients b_1,..,b_N")
        g.add_argument("--beta", type=_parse_list, default=None, help="one-sided coefficients beta_1,..,beta_N")
        s.add_argument("--K", type=int, help="correlation depth (default: automatic)")
        s.add_argument("--order", type=int, help="regression order for estimation")
        s.add_argument("--T", type=int, help="path length")
        s.add_argument("--reps", type=int, help="number of replications")
        s.add_argument("--seed", type=int, help="master seed")
        s.add_argument("--grid", type=int, help="power-of-two grid size for residual checks")
        s.add_argument("--format", choices=FORMATS, help="output format")
        s.add_argument("--generator", choices=("AR", "CIRCULANT"), help="simulator for 'simulate'")
        s.add_argument("--config", help="JSON job file or a previous JSON report")
        s.add_argument("--out", help="write the report here instead of stdout")
    return p


def load_config_file(path: str) -> dict:
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, dict) and "schema" in data:
        data = data["input"]["values"]["config"]
    if not isinstance(data, dict):
        raise UsageError(f"{path}: expected a JSON object")
    return data


def config_from_args(args: argparse.Namespace) -> JobConfig:
    base = load_config_file(args.config) if args.config else {}
    if args.b is not None or args.beta is not None:
        base.pop("b", None)
        base.pop("beta", None)
    for key in _FIELD:
        val = getattr(args, key, None)
        if val is not None:
            base[key] = val
    return JobConfig.from_dict(base).validate()


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        report, code = COMMANDS[args.command](config)
    except (UsageError, OSError, json.JSONDecodeError, TypeError) as exc:
        print(f"regfield: error: {exc}", file=sys.stderr)
        return 2
    except RegFieldError as exc:
        print(f"regfield: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

    text = to_json(report) if config.output_format == "json" else to_csv(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
