"""Command-line front-end.

Subcommands:

    epsn      print the backed-off quantile level eps_n for a selector
    rate      select a rate from a sample file (one gain per line)
    sweep     run a Monte Carlo sweep from a config file, write CSV
    mismatch  tabulate mean outage / meta-probability under mismatch

Exit codes: 0 success, 2 usage or config error, 3 mathematical
no-solution or insufficient data, 4 I/O or sample-parse failure.
Warnings and progress go to stderr; results go to stdout or the
configured CSV file.

Config files are flat `key = value` text: one pair per line, '#'
starts a comment, keys may not repeat, unknown keys are rejected. The
schemas are documented in the README and enforced here.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys

from .channels import Nakagami, Rayleigh, Rician
from .errors import (
    ConfigError,
    InsufficientTailDataError,
    NoSolutionError,
    NoValidTiltError,
    SampleParseError,
)
from .evalmc import SWEEP_AXES, EvalConfig, evaluate, sweep
from .learn import load_sample_file
from .mismatch import mean_outage_mismatch, meta_prob_mismatch
from .rateselect import (
    AR,
    FAMILIES,
    PCR,
    ReliabilityTarget,
    SelectorSpec,
    epsn_powerlaw,
    epsn_rayleigh_ar,
    epsn_rayleigh_pcr,
    select_rate,
)

SWEEP_HEADER = [
    "axis_name", "axis_value", "rate_mean", "rate_stddev",
    "mean_outage", "mean_outage_ci_lo", "mean_outage_ci_hi",
    "meta_prob", "meta_prob_ci_lo", "meta_prob_ci_hi",
    "omega", "omega_ci_lo", "omega_ci_hi",
    "zero_rate_fraction", "trials", "seed",
]

MISMATCH_HEADER = [
    "param_name", "param_value", "selector",
    "mean_outage_numeric", "mean_outage_approx",
    "meta_prob_numeric", "meta_prob_chernoff",
]

MISMATCH_SELECTORS = (
    "rayleigh-ar", "rayleigh-pcr", "powerlaw-asym-ar", "powerlaw-asym-pcr",
)

_EPSN_FAMILIES = ("rayleigh", "powerlaw-asym", "powerlaw-nonasym")


def _fmt(x) -> str:
    # 12 significant digits, locale-independent
    return "{:.11e}".format(float(x))


def _parse_kv_file(path: str) -> dict[str, str]:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    entries: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ConfigError(f"{path}:{line_no}: expected 'key = value'")
        if key in entries:
            raise ConfigError(f"{path}:{line_no}: duplicate key {key!r}")
        entries[key] = value
    return entries


def _as_int(text: str) -> int:
    value = float(text)
    if value != int(value):
        raise ValueError(f"expected an integer, got {text!r}")
    return int(value)


def _as_float_list(text: str) -> list[float]:
    parts = [p.strip() for p in text.split(",")]
    values = [float(p) for p in parts if p]
    if not values:
        raise ValueError("expected a comma-separated list of numbers")
    return values


def _as_str_list(text: str) -> list[str]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ValueError("expected a comma-separated list")
    return parts


def _choice(options):
    def cast(text: str) -> str:
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {text!r}")
        return text
    return cast


def _take(entries: dict[str, str], key: str, cast, required=True, default=None):
    if key not in entries:
        if required:
            raise ConfigError(f"missing required key {key!r}")
        return default
    raw = entries.pop(key)
    try:
        return cast(raw)
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: {exc}") from exc


def _reject_unknown(entries: dict[str, str]) -> None:
    if entries:
        raise ConfigError(f"unknown keys: {', '.join(sorted(entries))}")


def _build_model(name: str, lam: float, k, m):
    if name == "rayleigh":
        if k is not None or m is not None:
            raise ConfigError("keys 'k'/'m' are only valid for rician/nakagami models")
        return Rayleigh(lam)
    if name == "rician":
        if m is not None:
            raise ConfigError("key 'm' is only valid for the nakagami model")
        if k is None:
            raise ConfigError("the rician model requires key 'k'")
        return Rician(lam, k)
    if m is None:
        raise ConfigError("the nakagami model requires key 'm'")
    if k is not None:
        raise ConfigError("key 'k' is only valid for the rician model")
    return Nakagami(lam, m)


def _build_target(constraint: str, eps: float, xi) -> ReliabilityTarget:
    if constraint == PCR:
        if xi is None:
            raise ConfigError("a pcr constraint requires key 'xi'")
        return ReliabilityTarget(eps, PCR, xi)
    if xi is not None:
        raise ConfigError("key 'xi' is only valid with a pcr constraint")
    return ReliabilityTarget(eps, AR)


def _write_csv(path: str, header: list[str], rows: list[list[str]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def cmd_epsn(args) -> int:
    if args.constraint == PCR and args.xi is None:
        args.parser.error("--xi is required with --constraint pcr")
    if args.constraint == AR and args.xi is not None:
        args.parser.error("--xi is only valid with --constraint pcr")
    if args.family == "powerlaw-nonasym" and args.beta is None:
        args.parser.error("--beta is required with --family powerlaw-nonasym")
    if args.family == "powerlaw-asym" and args.constraint == PCR and args.beta is None:
        args.parser.error("--beta is required for the asymptotic pcr level")
    if args.beta is not None and args.family == "rayleigh":
        args.parser.error("--beta is only valid for power-law families")

    if args.family == "rayleigh":
        if args.constraint == AR:
            eps_n = epsn_rayleigh_ar(args.eps, args.n)
        else:
            eps_n = epsn_rayleigh_pcr(args.eps, args.xi, args.n)
    else:
        target = _build_target(args.constraint, args.eps, args.xi)
        mode = "asymptotic" if args.family == "powerlaw-asym" else "non-asymptotic"
        # the asymptotic AR level is beta-free; any admissible placeholder works
        beta = args.beta if args.beta is not None else 0.5
        eps_n = epsn_powerlaw(target, args.n, beta, mode=mode)
    print(_fmt(eps_n))
    return 0


def cmd_rate(args) -> int:
    if args.constraint == PCR and args.xi is None:
        args.parser.error("--xi is required with --constraint pcr")
    if args.constraint == AR and args.xi is not None:
        args.parser.error("--xi is only valid with --constraint pcr")
    is_powerlaw = args.selector.startswith("powerlaw")
    if is_powerlaw and args.beta is None:
        args.parser.error(f"--beta is required with --selector {args.selector}")
    if not is_powerlaw and args.beta is not None:
        args.parser.error("--beta is only valid for power-law selectors")

    sample = load_sample_file(args.sample)
    target = _build_target(args.constraint, args.eps, args.xi)
    selector = SelectorSpec(args.selector, beta=args.beta)
    rate = select_rate(selector, target, sample)
    if rate == 0.0:
        print("0")
        print("note: zero-rate outcome; the constraint admits no positive "
              "rate at this sample size", file=sys.stderr)
    else:
        print(_fmt(rate))
    return 0


def cmd_sweep(args) -> int:
    entries = _parse_kv_file(args.config)
    model_name = _take(entries, "model", _choice(("rayleigh", "rician", "nakagami")))
    lam = _take(entries, "lam", float, required=False, default=1.0)
    k = _take(entries, "k", float, required=False)
    m = _take(entries, "m", float, required=False)
    family = _take(entries, "selector", _choice(FAMILIES))
    constraint = _take(entries, "constraint", _choice((AR, PCR)))
    eps = _take(entries, "eps", float)
    xi = _take(entries, "xi", float, required=False)
    beta = _take(entries, "beta", float, required=False)
    n = _take(entries, "n", _as_int)
    trials = _take(entries, "trials", _as_int)
    seed = _take(entries, "seed", _as_int)
    axis = _take(entries, "axis", _choice(SWEEP_AXES))
    axis_values = _take(entries, "axis_values", _as_float_list)
    workers = _take(entries, "workers", _as_int, required=False, default=1)
    output = _take(entries, "output", str)
    _reject_unknown(entries)

    if axis == "xi" and constraint != PCR:
        raise ConfigError("axis 'xi' requires constraint = pcr")
    if axis == "beta" and not family.startswith("powerlaw"):
        raise ConfigError("axis 'beta' requires a power-law selector")
    is_powerlaw = family.startswith("powerlaw")
    if is_powerlaw and beta is None and axis != "beta":
        raise ConfigError(f"selector {family} requires key 'beta'")
    if not is_powerlaw and beta is not None:
        raise ConfigError("key 'beta' is only valid for power-law selectors")
    if axis == "beta" and beta is None:
        beta = axis_values[0]  # placeholder; overwritten at every axis point

    try:
        model = _build_model(model_name, lam, k, m)
        target = _build_target(constraint, eps, xi)
        selector = SelectorSpec(family, beta=beta)
        base = EvalConfig(model, selector, target, n, trials, seed)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    results = sweep(base, axis, axis_values, workers=workers)
    rows = []
    for value, rep in results:
        rows.append([
            axis, _fmt(value), _fmt(rep.rate_mean), _fmt(rep.rate_stddev),
            _fmt(rep.mean_outage.value), _fmt(rep.mean_outage.ci_lo),
            _fmt(rep.mean_outage.ci_hi),
            _fmt(rep.meta_prob.value), _fmt(rep.meta_prob.ci_lo),
            _fmt(rep.meta_prob.ci_hi),
            _fmt(rep.throughput_ratio.value), _fmt(rep.throughput_ratio.ci_lo),
            _fmt(rep.throughput_ratio.ci_hi),
            _fmt(rep.zero_rate_fraction), str(rep.trials), str(rep.seed),
        ])
    _write_csv(output, SWEEP_HEADER, rows)
    print(f"wrote {len(rows)} rows to {output}")
    return 0


def cmd_mismatch(args) -> int:
    entries = _parse_kv_file(args.config)
    param = _take(entries, "param", _choice(("k", "m")))
    param_values = _take(entries, "param_values", _as_float_list)
    lam = _take(entries, "lam", float, required=False, default=1.0)
    selectors = _take(entries, "selectors", _as_str_list)
    eps = _take(entries, "eps", float)
    xi = _take(entries, "xi", float, required=False)
    beta = _take(entries, "beta", float, required=False)
    n = _take(entries, "n", _as_int)
    trials = _take(entries, "trials", _as_int, required=False)
    seed = _take(entries, "seed", _as_int, required=False, default=0)
    output = _take(entries, "output", str)
    _reject_unknown(entries)

    for sel in selectors:
        if sel not in MISMATCH_SELECTORS:
            raise ConfigError(
                f"unknown selector {sel!r}; expected one of {', '.join(MISMATCH_SELECTORS)}")
    needs_xi = any(sel.endswith("-pcr") for sel in selectors)
    needs_mc = any(sel.startswith("powerlaw") for sel in selectors)
    if needs_xi and xi is None:
        raise ConfigError("pcr-designed selectors require key 'xi'")
    if not needs_xi and xi is not None:
        raise ConfigError("key 'xi' is only valid with pcr-designed selectors")
    if needs_mc and beta is None:
        raise ConfigError("power-law selectors require key 'beta'")
    if not needs_mc and beta is not None:
        raise ConfigError("key 'beta' is only valid with power-law selectors")
    if needs_mc and trials is None:
        raise ConfigError("power-law selectors require key 'trials'")

    try:
        levels = {}
        for sel in selectors:
            if sel == "rayleigh-ar":
                levels[sel] = epsn_rayleigh_ar(eps, n)
            elif sel == "rayleigh-pcr":
                levels[sel] = epsn_rayleigh_pcr(eps, xi, n)
        models = [Rician(lam, v) if param == "k" else Nakagami(lam, v)
                  for v in param_values]
    except (NoSolutionError, InsufficientTailDataError):
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    rows = []
    row_index = 0
    nan = math.nan
    for value, model in zip(param_values, models):
        for sel in selectors:
            if sel.startswith("rayleigh"):
                eps_n = levels[sel]
                mo_num = mean_outage_mismatch(model, eps_n, n, method="numeric")
                mo_app = mean_outage_mismatch(model, eps, n, method="weak_n")
                mp_num = meta_prob_mismatch(model, eps_n, eps, n, method="numeric")
                mp_ch = meta_prob_mismatch(model, eps_n, eps, n, method="chernoff")
            else:
                kind = AR if sel.endswith("-ar") else PCR
                target = ReliabilityTarget(eps, kind, xi if kind == PCR else None)
                cfg = EvalConfig(model, SelectorSpec("powerlaw-asym", beta=beta),
                                 target, n, trials, seed)
                rep = evaluate(cfg, axis_index=row_index)
                mo_num, mo_app = rep.mean_outage.value, nan
                mp_num, mp_ch = rep.meta_prob.value, nan
            rows.append([param, _fmt(value), sel, _fmt(mo_num), _fmt(mo_app),
                         _fmt(mp_num), _fmt(mp_ch)])
            row_index += 1
    _write_csv(output, MISMATCH_HEADER, rows)
    print(f"wrote {len(rows)} rows to {output}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="statrate",
        description="Rate selection under statistical reliability constraints.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_epsn = sub.add_parser(
        "epsn", help="print the backed-off quantile level eps_n")
    p_epsn.add_argument("--family", required=True, choices=_EPSN_FAMILIES)
    p_epsn.add_argument("--constraint", required=True, choices=(AR, PCR))
    p_epsn.add_argument("--eps", required=True, type=float,
                        help="target outage level in (0, 1)")
    p_epsn.add_argument("--xi", type=float,
                        help="pcr confidence level in (0, 1)")
    p_epsn.add_argument("--n", required=True, type=int,
                        help="training sample size")
    p_epsn.add_argument("--beta", type=float,
                        help="tail fraction for power-law families")
    p_epsn.set_defaults(func=cmd_epsn, parser=p_epsn)

    p_rate = sub.add_parser(
        "rate", help="select a rate from a sample file")
    p_rate.add_argument("--selector", required=True, choices=FAMILIES)
    p_rate.add_argument("--constraint", required=True, choices=(AR, PCR))
    p_rate.add_argument("--eps", required=True, type=float)
    p_rate.add_argument("--xi", type=float)
    p_rate.add_argument("--beta", type=float)
    p_rate.add_argument("--sample", required=True,
                        help="text file with one gain measurement per line")
    p_rate.set_defaults(func=cmd_rate, parser=p_rate)

    p_sweep = sub.add_parser(
        "sweep", help="run a Monte Carlo sweep from a config file")
    p_sweep.add_argument("config", help="flat key = value config file")
    p_sweep.set_defaults(func=cmd_sweep, parser=p_sweep)

    p_mism = sub.add_parser(
        "mismatch", help="tabulate outage statistics under model mismatch")
    p_mism.add_argument("config", help="flat key = value config file")
    p_mism.set_defaults(func=cmd_mismatch, parser=p_mism)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s",
                        stream=sys.stderr)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SampleParseError as exc:
        where = f" (line {exc.line_no})" if exc.line_no is not None else ""
        print(f"sample parse error{where}: {exc}", file=sys.stderr)
        return 4
    except (NoSolutionError, InsufficientTailDataError, NoValidTiltError) as exc:
        print(f"no solution: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"invalid arguments: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
