"""Command-line entry point: ``conifold-rh {eval,verify,expand,tau,wallcross}``.

Exit codes: 0 on success or a passing verification, 1 on a failing
verification, 2 on invalid input or a domain error.  Complex numbers are
read and written as ``a+bi`` with repr-precision parts.

CSV output always has the columns (re_t, im_t, re_value, im_value, residual).
The ``t`` columns hold the sample point of the row: t for tau and the
verification suites, z for eval, the expansion parameter for expand.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Sequence

from . import asym, bps, msine, rhverify
from .errors import ConifoldError
from .numlib import format_complex, parse_complex

CSV_COLUMNS = ("re_t", "im_t", "re_value", "im_value", "residual")
TOL_ENV = "CONIFOLD_RH_TOL"

SUITES = ("jump", "m0", "minus", "regularity", "limit0", "growth", "tau", "homogeneity",
          "wallcross", "asym_contact", "asym_consistency", "genus")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- parsing

def _complex(s: str) -> complex:
    try:
        return parse_complex(s)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _charge(s: str) -> bps.Charge:
    try:
        parts = [int(x) for x in s.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"charge must be a,b,c,d integers, got {s!r}") from None
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(f"charge must have four entries, got {s!r}")
    return bps.Charge(*parts)


def parse_ray(s: str) -> bps.RayLabel:
    """'n' or 'l_n' is l_n, '-l_n' is -l_n, 'inf'/'l_inf' and '-inf'/'-l_inf' the vertical rays."""
    t = s.strip().lower()
    sign = 1
    if t.startswith("-l") or t == "-inf":
        sign, t = -1, t[1:]
    if t.startswith("l_"):
        t = t[2:]
    elif t.startswith("l") and t != "l":
        t = t[1:]
    if t in ("inf", "infinity"):
        return bps.RayLabel(bps.INFINITY, sign)
    try:
        return bps.RayLabel(int(t), sign)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse ray {s!r}") from None


def read_config(path: str) -> dict[str, str]:
    """Flat ``key=value`` lines; '#' starts a comment; keys may use - or _."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{n}: expected key=value")
            k, v = line.split("=", 1)
            out[k.strip().replace("-", "_")] = v.strip()
    return out


def _env_tol() -> float | None:
    raw = os.environ.get(TOL_ENV)
    if raw in (None, ""):
        return None
    try:
        return float(raw)
    except ValueError:
        raise UsageError(f"{TOL_ENV} must be a number, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", help="write here instead of standard output")
    common.add_argument("--config", help="flat key=value file overriding defaults")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("--tol", type=float, default=None,
                        help=f"tolerance (default: per command, or ${TOL_ENV})")

    p = argparse.ArgumentParser(prog="conifold-rh", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", parents=[common], help="evaluate one special function")
    e.add_argument("--fn", required=True,
                   choices=("F", "G", "H", "Fstar", "Hstar", "Hdagger", "K", "tau"))
    e.add_argument("--z", type=_complex)
    e.add_argument("--w1", type=_complex)
    e.add_argument("--w2", type=_complex)
    e.add_argument("--v", type=_complex)
    e.add_argument("--w", type=_complex)
    e.add_argument("--t", type=_complex)
    e.add_argument("--n", type=int, default=0)
    e.add_argument("--method", default="auto")

    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("--suite", default="all", choices=SUITES + ("all",))
    v.add_argument("--v", type=_complex, default=0.2 + 0.5j)
    v.add_argument("--w", type=_complex, default=1 + 0j)
    v.add_argument("--samples", type=int, default=None)
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--variant", choices=("printed", "corrected"), default="corrected",
                   help="expansion variant for the asym suites")

    x = sub.add_parser("expand", parents=[common], help="asymptotic expansion table or fit")
    x.add_argument("--kind", required=True, choices=[k.value for k in asym.Kind])
    x.add_argument("--order", type=int, default=2)
    x.add_argument("--variant", choices=("printed", "corrected"), default="printed")
    x.add_argument("--z", type=_complex)
    x.add_argument("--w1", type=_complex)
    x.add_argument("--v", type=_complex)
    x.add_argument("--w", type=_complex)
    x.add_argument("--fit", action="store_true", help="fit the contact order numerically")
    x.add_argument("--ray", type=float, default=None, help="ray angle in radians")
    x.add_argument("--lo", type=float, default=None)
    x.add_argument("--hi", type=float, default=None)

    t = sub.add_parser("tau", parents=[common], help="evaluate tau_n at one or more t")
    t.add_argument("--v", type=_complex, required=True)
    t.add_argument("--w", type=_complex, required=True)
    t.add_argument("--t", type=_complex, nargs="+", required=True)
    t.add_argument("--n", type=int, default=0)
    t.add_argument("--method", choices=("kernel", "dagger"), default="kernel")

    w = sub.add_parser("wallcross", parents=[common], help="apply S(l) to a twisted character")
    w.add_argument("--ray", type=parse_ray, help="l_n as n or l_n, -l_n, inf, -inf")
    w.add_argument("--sector", action="store_true", help="apply the whole sector composition")
    w.add_argument("--charge", type=_charge, required=True)
    w.add_argument("--order", type=int, default=4, help="truncation degree above the input")
    w.add_argument("--v", type=_complex, default=0.2 + 0.5j)
    w.add_argument("--w", type=_complex, default=1 + 0j)
    return p


def parse(argv: Sequence[str]) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        cfg = read_config(args.config)
        sp = parser._subparsers._group_actions[0].choices[args.command]  # noqa: SLF001
        known = {a.dest: a for a in sp._actions}  # noqa: SLF001
        defaults = {}
        for k, raw in cfg.items():
            if k not in known or k in ("config", "help"):
                raise UsageError(f"unknown config key {k!r} for {args.command}")
            act = known[k]
            if act.type is not None and act.nargs in (None, "?"):
                try:
                    defaults[k] = act.type(raw)
                except (argparse.ArgumentTypeError, ValueError) as exc:
                    raise UsageError(f"config key {k}: {exc}") from None
            elif act.nargs == "+":
                defaults[k] = [act.type(s) if act.type else s for s in raw.split()]
            elif isinstance(act, argparse._StoreTrueAction):  # noqa: SLF001
                defaults[k] = raw.lower() in ("1", "true", "yes", "on")
            else:
                defaults[k] = raw
            if act.choices is not None and defaults[k] not in act.choices:
                raise UsageError(f"config key {k}: {raw!r} not in {sorted(act.choices)}")
        sp.set_defaults(**defaults)
        args = parser.parse_args(argv)  # explicit flags still win
    if args.tol is None:
        args.tol = _env_tol()
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    return args


# ---------------------------------------------------------------- output

def _encode(x):
    if isinstance(x, complex):
        return format_complex(x)
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if isinstance(x, dict):
        return {k: _encode(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_encode(v) for v in x]
    return x


def _csv(rows: Sequence[tuple[complex, complex, float]]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(CSV_COLUMNS)
    for t, val, res in rows:
        t = complex(t) if t is not None else complex(math.nan, math.nan)
        val = complex(val) if val is not None else complex(math.nan, math.nan)
        wr.writerow([repr(t.real), repr(t.imag), repr(val.real), repr(val.imag), repr(float(res))])
    return buf.getvalue()


def _emit(args, payload: dict, rows) -> None:
    text = _csv(rows) if args.format == "csv" else json.dumps(_encode(payload), sort_keys=True) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- commands

def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.command} --fn {getattr(args, 'fn', '')}: missing "
                         + ", ".join("--" + n for n in missing))


def cmd_eval(args) -> int:
    tol = args.tol if args.tol is not None else msine.DEFAULT_TOL
    fn = args.fn
    if fn in ("K", "tau"):
        _need(args, "v", "w", "t")
        if fn == "K":
            res = msine.eval_K(args.v, args.w, args.t, tol=tol)
        else:
            method = "kernel" if args.method == "auto" else args.method
            res = msine.eval_tau(args.v, args.w, args.t, n=args.n, method=method, tol=tol)
        point = args.t
    else:
        _need(args, "z", "w1", "w2")
        a = msine.SineArgs(args.z, args.w1, args.w2)
        if fn == "Hdagger":
            res = msine.eval_H_dagger(args.z, args.w2, args.w1, method=args.method, tol=tol)
        else:
            f = {"F": msine.eval_F, "G": msine.eval_G, "H": msine.eval_H,
                 "Fstar": msine.eval_F_star, "Hstar": msine.eval_H_star}[fn]
            res = f(a, method=args.method, tol=tol)
        point = args.z
    payload = res.to_dict()
    payload["log_value"] = res.log_value
    _emit(args, payload, [(point, res.value, res.error_estimate)])
    return 0


def _report_rows(rep: rhverify.VerificationReport):
    rows = []
    for d in rep.details:
        t = d.get("inputs", {}).get("t") if isinstance(d.get("inputs"), dict) else None
        val = d.get("value")
        rows.append((t, val if isinstance(val, (int, float, complex)) else None,
                     d.get("residual", math.nan)))
    return rows


def _run_suite(name: str, args) -> rhverify.VerificationReport:
    p = bps.ConifoldPoint(args.v, args.w)
    tol, samples, seed, jobs = args.tol, args.samples, args.seed, args.jobs
    kw = {}
    if name == "jump":
        if tol is not None:
            kw["tol"] = tol
        return rhverify.check_jump_suite(p, samples=samples or 64, seed=12345 if seed is None else seed,
                                         jobs=jobs, **kw)
    if name == "m0":
        q = bps.ConifoldPoint(0.5 * args.w, args.w)
        if tol is not None:
            kw["tol"] = tol
        rep = rhverify.check_jump_suite(q, samples=samples or 64,
                                        seed=12345 if seed is None else seed, jobs=jobs, **kw)
        rep.suite = "m0"
        return rep
    if name == "minus":
        if tol is not None:
            kw["tol"] = tol
        return rhverify.check_minus_reflection(p, samples=samples or 16, seed=7 if seed is None else seed, **kw)
    if name == "regularity":
        return rhverify.check_regularity(p, samples=samples or 200, seed=99 if seed is None else seed,
                                         jobs=jobs)
    if name == "limit0":
        if tol is not None:
            kw["tol"] = tol
        return rhverify.check_limit0(p, **kw)
    if name == "growth":
        if tol is not None:
            kw["rel_tol"] = tol
        return rhverify.check_growth(p, **kw)
    if name == "tau":
        if tol is not None:
            kw["tol"] = tol
        return rhverify.check_tau_ode(p, samples=samples or 20, seed=2024 if seed is None else seed,
                                      jobs=jobs, **kw)
    if name == "homogeneity":
        if tol is not None:
            kw["tol"] = tol
        t = 0.5 * abs(args.w) * math.e ** (1j * rhverify.sigma0_bisector(p))
        return rhverify.check_tau_homogeneity(args.v, args.w, -t, **kw)
    if name == "wallcross":
        return rhverify.check_wallcross(p)
    if name == "asym_contact":
        if tol is not None:
            kw["tol"] = tol
        return asym.check_contact_orders(variant=args.variant, jobs=jobs, **kw)
    if name == "asym_consistency":
        return asym.consistency_cross_checks()
    if name == "genus":
        return asym.check_genus(variant=args.variant)
    raise UsageError(f"unknown suite {name!r}")


def cmd_verify(args) -> int:
    names = SUITES if args.suite == "all" else (args.suite,)
    reports = [_run_suite(n, args) for n in names]
    rep = reports[0] if len(reports) == 1 else rhverify.merge_reports("all", reports)
    rep.info = {**rep.info, "seed": args.seed, "point": {"v": args.v, "w": args.w}}
    rows = [r for x in reports for r in _report_rows(x)]
    _emit(args, rep.to_json(), rows)
    return 0 if rep.passed else 1


def _expand_params(args) -> dict:
    kind = asym.Kind(args.kind)
    p = asym.default_params(kind)
    for k in ("z", "w1", "v", "w"):
        val = getattr(args, k)
        if val is not None:
            if k not in p:
                raise UsageError(f"--{k} does not apply to {kind.value}")
            p[k] = val
    return p


def cmd_expand(args) -> int:
    kind = asym.Kind(args.kind)
    params = _expand_params(args)
    series = asym.expansion(kind, params, args.order, args.variant)
    payload = series.to_json()
    rows = []
    if args.fit or args.format == "csv":
        ray = asym.default_rays(kind)[0] if args.ray is None else args.ray
        lo, hi = asym.DEFAULT_WINDOWS[kind]
        window = (args.lo or lo, args.hi or hi)
        fit = asym.fit_order(asym.numeric_log(kind, params), series, ray, window=window)
        payload["fit"] = fit.to_json()
        rows = [(s.var, s.value, abs(s.remainder)) for s in fit.samples]
    _emit(args, payload, rows)
    return 0


def cmd_tau(args) -> int:
    tol = args.tol if args.tol is not None else msine.DEFAULT_TOL
    rows, values = [], []
    for t in args.t:
        r = msine.eval_tau(args.v, args.w, t, n=args.n, method=args.method, tol=tol)
        rows.append((t, r.value, r.error_estimate))
        values.append({"t": t, "value": r.value, "log_value": r.log_value,
                       "error_estimate": r.error_estimate, "method": r.method.value})
    _emit(args, {"v": args.v, "w": args.w, "n": args.n, "values": values}, rows)
    return 0


def cmd_wallcross(args) -> int:
    p = bps.ConifoldPoint(args.v, args.w)
    if args.order < 0:
        raise UsageError("--order must be non-negative")
    s = bps.TwistedSeries.monomial(args.charge, args.order)
    if args.sector:
        out = bps.sector_automorphism(p, args.order)(s)
        label = "sector"
    else:
        if args.ray is None:
            raise UsageError("wallcross needs --ray or --sector")
        out = bps.wall_cross(args.ray, s, p)
        label = str(args.ray)
    payload = {"ray": label, "charge": list(args.charge.as_tuple()), "series": out.to_json()}
    rows = [(None, complex(float(c)), 0.0) for _, c in out.terms]
    _emit(args, payload, rows)
    return 0


COMMANDS = {"eval": cmd_eval, "verify": cmd_verify, "expand": cmd_expand,
            "tau": cmd_tau, "wallcross": cmd_wallcross}


@dataclass
class CommandConfig:
    """Programmatic form of one invocation; ``params`` maps flag names to values."""

    command: str
    params: dict = field(default_factory=dict)
    output: str | None = None
    format: str = "json"

    def argv(self) -> list[str]:
        out = [self.command, "--format", self.format]
        if self.output:
            out += ["--output", self.output]
        for k, val in self.params.items():
            flag = "--" + k
            if val is True:
                out.append(flag)
            elif val is False or val is None:
                continue
            elif isinstance(val, (list, tuple)) and not isinstance(val, bps.Charge):
                out.append(flag)
                out += [_flag_text(x) for x in val]
            else:
                out += [flag, _flag_text(val)]
        return out


def _flag_text(x) -> str:
    if isinstance(x, complex):
        return format_complex(x)
    if isinstance(x, bps.Charge):
        return ",".join(str(c) for c in x.as_tuple())
    return str(x)


def run(config: CommandConfig) -> int:
    return main(config.argv())


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse(argv)
        return COMMANDS[args.command](args)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code) if isinstance(exc.code, int) else 2
    except (UsageError, ConifoldError, ValueError, OSError) as exc:
        print(f"conifold-rh: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
