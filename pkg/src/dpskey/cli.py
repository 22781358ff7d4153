"""Command-line front end.

Subcommands: rate, optimize, curve, compare, crossover, validate. Results go
to stdout (or ``--output``) as CSV or JSON. Exit codes: 0 success, 1 a
validation check failed, 2 bad configuration, 3 every evaluated point aborts.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from .channel import ChannelSpec, eta_from_distance, expected_counts
from .concentration import DeviationBudget
from .finite_key import Method, ProtocolParams
from .optimize import BoundaryOptimumWarning, evaluate, find_crossover, optimize_rate

SCHEMA_VERSION = 1
RATE_COLUMNS = ("eta", "mu", "t", "n_det", "n_ph_u", "n_pa", "n_ec", "ell", "rate",
                "eps_sec", "method")
CROSSOVER_COLUMNS = ("n_em", "eta_star", "q3", "deviation")
VALIDATE_COLUMNS = ("check", "violations", "trials", "eps", "frequency", "limit", "ok")
THREADS_ENV = "DPSKEY_THREADS"
DEFAULT_EPS = "2^-58/6"

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_ALL_ABORT = 0, 1, 2, 3


class ConfigError(Exception):
    pass


def parse_probability(text: str) -> Fraction | float:
    """Parse ``0.05``, ``1/20`` or ``2^-58/6`` into a probability.

    Integer powers and quotients stay exact as :class:`Fraction`.
    """
    def atom(tok):
        tok = tok.strip()
        if "^" in tok:
            base, exp = tok.split("^", 1)
            return Fraction(int(base)) ** int(exp)
        try:
            return Fraction(int(tok))
        except ValueError:
            return float(tok)

    try:
        parts = [atom(p) for p in str(text).split("/")]
        value = parts[0]
        for p in parts[1:]:
            value = value / p
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad probability {text!r}") from exc
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"probability {text!r} must lie in (0, 1)")
    return value


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _common(p):
    g = p.add_argument_group("protocol and channel")
    g.add_argument("--n-em", type=float, default=1e13, help="emitted blocks (default 1e13)")
    g.add_argument("--e-bit", type=float, default=0.01)
    g.add_argument("--zeta", type=float, default=58.0)
    g.add_argument("--zeta-prime", type=float, default=28.0)
    g.add_argument("--eps1", type=parse_probability, default=DEFAULT_EPS)
    g.add_argument("--eps2", type=parse_probability, default=DEFAULT_EPS)
    g.add_argument("--method", choices=[m.value for m in Method], default="kato")
    g.add_argument("--asymptotic", action="store_true",
                   help="drop every finite-size deviation term and zeta, zeta'")
    g.add_argument("--fiber-loss", type=float, default=0.2, help="dB/km")
    g.add_argument("--rep-rate", type=float, default=1e9, help="pulses per second")
    o = p.add_argument_group("output")
    o.add_argument("--format", choices=("csv", "json"), default="csv")
    o.add_argument("--output", default="-", help="file path, '-' for stdout")
    o.add_argument("--config", help="JSON file of option defaults")


def _point(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--eta", type=float)
    g.add_argument("--distance", type=float, help="fibre length in km")


def _sweep(p):
    p.add_argument("--eta-min", type=float, default=1e-3)
    p.add_argument("--eta-max", type=float, default=1.0)
    p.add_argument("--points", type=int, default=31)
    p.add_argument("--log-spacing", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dpskey", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("rate", help="key rate at one transmission")
    _common(p)
    _point(p)
    p.add_argument("--mu", type=float, help="fix mu (optimised when omitted)")
    p.add_argument("--t", type=float, help="fix t (optimised when omitted)")

    p = sub.add_parser("optimize", help="optimal (mu, t) at one transmission")
    _common(p)
    _point(p)

    p = sub.add_parser("curve", help="optimised rate over a transmission sweep")
    _common(p)
    _sweep(p)

    p = sub.add_parser("compare", help="paired Kato and Azuma rows over a sweep")
    _common(p)
    _sweep(p)

    p = sub.add_parser("crossover", help="eta where q3 meets the Azuma deviation")
    _common(p)

    p = sub.add_parser("validate", help="Monte Carlo coverage of the bounds")
    _common(p)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--eps", type=parse_probability, default=Fraction(1, 20))
    return parser


def _subparser(parser, command):
    for action in parser._subparsers._group_actions:
        if command in action.choices:
            return action.choices[command]
    raise ConfigError(f"unknown command {command!r}")


def parse_args(argv=None) -> argparse.Namespace:
    """Parse ``argv``, merging a ``--config`` JSON file under explicit flags."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, ValueError) as exc:
            parser.error(f"cannot read config {args.config}: {exc}")
        if not isinstance(cfg, dict):
            parser.error("config must be a JSON object")
        sub = _subparser(parser, args.command)
        known = {a.dest: a for a in sub._actions}
        defaults = {}
        for key, value in cfg.items():
            dest = key.replace("-", "_")
            if dest not in known or dest in ("config", "help"):
                parser.error(f"unknown config key {key!r}")
            action = known[dest]
            if action.type is not None and not isinstance(value, bool):
                try:
                    value = action.type(str(value))
                except (argparse.ArgumentTypeError, ValueError) as exc:
                    parser.error(f"config key {key!r}: {exc}")
            defaults[dest] = value
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def _validate(args):
    if not args.n_em > 0:
        raise ConfigError("--n-em must be positive")
    if not 0 <= args.e_bit <= 1:
        raise ConfigError("--e-bit must lie in [0, 1]")
    if not (args.zeta > 0 and args.zeta_prime > 0):
        raise ConfigError("--zeta and --zeta-prime must be positive")
    if getattr(args, "points", None) is not None:
        if args.points < 2:
            raise ConfigError("--points must be at least 2")
        if not (0 < args.eta_min < args.eta_max <= 1):
            raise ConfigError("sweep needs 0 < --eta-min < --eta-max <= 1")


def _setup(args):
    spec = ChannelSpec(e_bit=args.e_bit, rep_rate_hz=args.rep_rate,
                       fiber_loss_db_per_km=args.fiber_loss)
    template = ProtocolParams(args.n_em, 0.5, args.zeta, args.zeta_prime,
                              DeviationBudget(args.eps1, args.eps2))
    return spec, template


def _point_eta(args, spec):
    if args.eta is None and args.distance is None:
        raise ConfigError("give --eta or --distance")
    eta = args.eta if args.eta is not None else eta_from_distance(args.distance, spec)
    if not 0 < eta <= 1:
        raise ConfigError("eta must lie in (0, 1]")
    return eta


def _rate_row(eta, mu, t, res, spec, n_em, label):
    n_det = expected_counts(spec.__class__(eta=eta, e_bit=spec.e_bit), mu, t, n_em).n_det
    return {"eta": eta, "mu": mu, "t": t, "n_det": n_det, "n_ph_u": res.n_ph_u,
            "n_pa": res.n_pa, "n_ec": res.n_ec, "ell": res.ell, "rate": res.rate,
            "eps_sec": res.eps_sec, "method": label}


def _label(method, asymptotic):
    return "asymptotic" if asymptotic else Method(method).value


def _optimised_row(eta, args, spec, template, method):
    opt = optimize_rate(eta, args.n_em, spec, template, method, asymptotic=args.asymptotic)
    return _rate_row(eta, opt.mu_opt, opt.t_opt, opt.result, spec, args.n_em,
                     _label(method, args.asymptotic))


def _threads():
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    return max(1, n)


def _sweep_etas(args):
    if args.log_spacing:
        return [float(e) for e in np.geomspace(args.eta_min, args.eta_max, args.points)]
    return [float(e) for e in np.linspace(args.eta_min, args.eta_max, args.points)]


def _map(fn, items):
    n = _threads()
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(n) as pool:
        return list(pool.map(fn, items))


def run_rate(args, spec, template):
    eta = _point_eta(args, spec)
    if (args.mu is None) != (args.t is None):
        raise ConfigError("--mu and --t must be given together")
    if args.mu is None:
        return [_optimised_row(eta, args, spec, template, args.method)], RATE_COLUMNS
    if not args.mu > 0 or not 0 < args.t < 1:
        raise ConfigError("need --mu > 0 and 0 < --t < 1")
    res = evaluate(eta, args.mu, args.t, args.n_em, spec, template, args.method,
                   asymptotic=args.asymptotic)
    return [_rate_row(eta, args.mu, args.t, res, spec, args.n_em,
                      _label(args.method, args.asymptotic))], RATE_COLUMNS


def run_optimize(args, spec, template):
    eta = _point_eta(args, spec)
    return [_optimised_row(eta, args, spec, template, args.method)], RATE_COLUMNS


def run_curve(args, spec, template):
    rows = _map(lambda e: _optimised_row(e, args, spec, template, args.method),
                _sweep_etas(args))
    return rows, RATE_COLUMNS


def run_compare(args, spec, template):
    def pair(eta):
        return [_optimised_row(eta, args, spec, template, m) for m in Method]

    rows = [r for pair_rows in _map(pair, _sweep_etas(args)) for r in pair_rows]
    return rows, RATE_COLUMNS


def run_crossover(args, spec, template):
    res = find_crossover(args.n_em, template, spec)
    return [{"n_em": res.n_em, "eta_star": res.eta_star, "q3": res.q3,
             "deviation": res.deviation}], CROSSOVER_COLUMNS


def run_validate(args, spec, template):
    from . import validation as v

    eps = args.eps
    n, trials, seed = args.steps, args.trials, args.seed
    p3 = 0.01
    checks = [
        ("azuma_constant", v.coverage_azuma(v.MartingaleProcess(n, 0.5, "constant", seed),
                                            eps, trials, _threads())),
        ("azuma_adaptive", v.coverage_azuma(v.MartingaleProcess(n, 0.3, "adaptive", seed + 1),
                                            eps, trials, _threads())),
        ("kato_accurate", v.coverage_kato(v.MartingaleProcess(n, p3, "scheduled", seed + 2),
                                          round(n * p3), eps, trials, _threads())),
        ("kato_wrong", v.coverage_kato(v.MartingaleProcess(n, p3, "scheduled", seed + 3),
                                       round(10 * n * p3), eps, trials, _threads())),
        ("chernoff", v.coverage_chernoff(1e-4, 0.9, 10**7, float(eps), trials, seed + 4)),
    ]
    rows = [{"check": name, "violations": c.violations, "trials": c.trials,
             "eps": float(c.eps), "frequency": c.frequency, "limit": c.limit,
             "ok": c.ok} for name, c in checks]
    return rows, VALIDATE_COLUMNS


COMMANDS = {"rate": run_rate, "optimize": run_optimize, "curve": run_curve,
            "compare": run_compare, "crossover": run_crossover, "validate": run_validate}


def _fmt(value, digits):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), f".{digits}g")
    return str(value)


def _json_value(value):
    if isinstance(value, (float, np.floating)) and not math.isfinite(value):
        return "null"
    if isinstance(value, str):
        return json.dumps(value)
    return _fmt(value, 17)


def render(rows, columns, fmt, command, config=None) -> str:
    """Serialise rows: CSV with 10 significant digits, JSON with 17."""
    if fmt == "csv":
        lines = [",".join(columns)]
        lines += [",".join(_fmt(r[c], 10) for c in columns) for r in rows]
        return "\n".join(lines) + "\n"
    body = ",\n".join("    {" + ", ".join(f"{json.dumps(c)}: {_json_value(r[c])}"
                                            for c in columns) + "}" for r in rows)
    cfg = json.dumps(config or {}, sort_keys=True)
    return (f'{{\n  "schema_version": {SCHEMA_VERSION},\n  "command": {json.dumps(command)},\n'
            f'  "config": {cfg},\n  "rows": [\n{body}\n  ]\n}}\n')


def _config_echo(args):
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in ("config", "output", "format", "command"):
            continue
        out[k] = str(v) if isinstance(v, Fraction) else v
    return out


def main(argv=None) -> int:
    args = parse_args(argv)
    try:
        _validate(args)
        spec, template = _setup(args)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BoundaryOptimumWarning)
            rows, columns = COMMANDS[args.command](args, spec, template)
    except (ConfigError, ValueError) as exc:
        print(f"dpskey: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = render(rows, columns, args.format, args.command, _config_echo(args))
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w") as fh:
            fh.write(text)
    if args.command == "validate":
        return EXIT_OK if all(r["ok"] for r in rows) else EXIT_CHECK_FAILED
    if columns is RATE_COLUMNS and all(not r["ell"] > 0 for r in rows):
        return EXIT_ALL_ABORT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
