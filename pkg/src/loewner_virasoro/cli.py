"""Command-line runner: ``loewner-virasoro <command> --config cfg.json --out dir``.

Every run validates its JSON config against the command's schema, writes
``<command>-<hash>.json`` (and ``.csv`` where a table is produced) into the
output directory and prints a one-line summary.  Exit codes: 0 success,
1 invalid config, 2 numerical blow-up, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from . import experiments as ex
from .evolution import BlowUpError, DrivingError
from .export import canonical_hash, csv_text, dumps, write_text

EXIT_OK, EXIT_VALIDATION, EXIT_BLOWUP, EXIT_IO = 0, 1, 2, 3


@dataclass(frozen=True)
class Field:
    kind: str
    default: Any = None
    required: bool = False


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _is_complex(x) -> bool:
    return _is_number(x) or (isinstance(x, list) and len(x) == 2 and all(_is_number(v) for v in x))


def _is_rational(x) -> bool:
    if _is_number(x):
        return True
    if isinstance(x, str):
        try:
            Fraction(x)
        except (ValueError, ZeroDivisionError):
            return False
        return True
    return False


CHECKS: dict[str, tuple[Callable[[Any], bool], str]] = {
    "pos_int": (lambda x: isinstance(x, int) and not isinstance(x, bool) and x >= 1, "a positive integer"),
    "nonneg_int": (lambda x: isinstance(x, int) and not isinstance(x, bool) and x >= 0, "a non-negative integer"),
    "int": (lambda x: isinstance(x, int) and not isinstance(x, bool), "an integer"),
    "pos_float": (lambda x: _is_number(x) and x > 0 and math.isfinite(x), "a positive number"),
    "nonneg_float": (lambda x: _is_number(x) and x >= 0 and math.isfinite(x), "a non-negative number"),
    "float": (lambda x: _is_number(x) and math.isfinite(x), "a finite number"),
    "bool": (lambda x: isinstance(x, bool), "true or false"),
    "complex": (_is_complex, "a number or [re, im]"),
    "complex_list": (lambda x: isinstance(x, list) and all(_is_complex(v) for v in x), "a list of numbers or [re, im] pairs"),
    "rational": (_is_rational, "a number or a fraction string such as \"8/3\""),
    "rational_list": (lambda x: isinstance(x, list) and all(_is_rational(v) for v in x), "a list of numbers or fraction strings"),
    "driver": (lambda x: isinstance(x, dict) and "kind" in x, "an object with a 'kind'"),
    "object": (lambda x: isinstance(x, dict), "an object"),
    "observable": (lambda x: isinstance(x, list) and len(x) > 0 and all(
        isinstance(t, list) and len(t) == 2 and _is_rational(t[0]) and _is_complex(t[1]) for t in x),
        "a non-empty list of [power, coefficient] pairs"),
    "system": (lambda x: x in ("u-flow", "hamiltonian"), "\"u-flow\" or \"hamiltonian\""),
    "variant": (lambda x: x in ("conjugate", "printed"), "\"conjugate\" or \"printed\""),
}

_FLOW = {
    "driver": Field("driver", required=True),
    "n": Field("pos_int", 8),
    "dt": Field("pos_float", 1e-3),
    "t_end": Field("pos_float", 5.0),
    "c0": Field("complex_list"),
    "psibar": Field("complex_list"),
    "psibar0": Field("complex"),
    "record_every": Field("pos_int", 1),
}

SCHEMAS: dict[str, dict[str, Field]] = {
    "witt-check": {"n": Field("pos_int", 12)},
    "duality-check": {
        "n_p": Field("nonneg_int", 12),
        "n_action": Field("pos_int", 10),
        "n_omega": Field("pos_int", 10),
        "n_l0": Field("pos_int", 8),
    },
    "build-lneg": {"n": Field("pos_int", 10), "depth": Field("nonneg_int", 5), "cross_k": Field("pos_int", 5)},
    "evolve": {**_FLOW, "limit_T": Field("pos_float"), "limit_dt": Field("pos_float")},
    "conserve": {**_FLOW, "compare_dt": Field("pos_float")},
    "geodesic": {
        "n": Field("pos_int", 8),
        "dt": Field("pos_float", 1e-3),
        "t_end": Field("pos_float", 10.0),
        "seed": Field("int", 0),
        "u0": Field("complex_list"),
        "c0": Field("complex_list"),
        "random_c0": Field("bool", False),
        "c0_scale": Field("pos_float", 0.3),
        "system": Field("system", "u-flow"),
        "variant": Field("variant", "conjugate"),
        "record_every": Field("pos_int", 100),
    },
    "geodesic-const": {
        "n": Field("pos_int", 6),
        "seed": Field("int", 0),
        "u0": Field("complex_list"),
        "c0": Field("complex_list"),
        "c0_scale": Field("pos_float", 0.3),
        "s": Field("float", 1.0),
        "ds": Field("pos_float", 1e-3),
    },
    "sle-sim": {
        "kappa": Field("rational"),
        "z0": Field("complex", [0.0, 2.0]),
        "dt": Field("pos_float", 1e-3),
        "T": Field("nonneg_float", 0.5),
        "n_paths": Field("pos_int", 100),
        "seed": Field("int", 0),
        "eps": Field("pos_float", 1e-3),
        "noise_scale": Field("nonneg_float", 1.0),
        "record_every": Field("pos_int", 50),
        "charge_table": Field("rational_list"),
        "deterministic_check": Field("object"),
        "capacity_t": Field("pos_float"),
    },
    "sle-martingale": {
        "kappa": Field("rational", required=True),
        "observable": Field("observable", required=True),
        "z0": Field("complex", [0.0, 2.0]),
        "dt": Field("pos_float", 1e-3),
        "T": Field("pos_float", 0.5),
        "n_paths": Field("pos_int", 10000),
        "seed": Field("int", 0),
        "eps": Field("pos_float", 1e-3),
        "checkpoints": Field("pos_int", 5),
    },
}

COMMANDS = tuple(SCHEMAS)
OVERRIDES = {"n": "n", "dt": "dt", "t_end": "t_end", "seed": "seed"}


class ConfigError(ValueError):
    def __init__(self, problems: list[dict]):
        super().__init__("; ".join(f"{p['field']}: {p['message']}" for p in problems))
        self.problems = problems


def validate(command: str, raw: Any) -> dict:
    """Apply defaults and check every field; collect all problems before failing."""
    if command not in SCHEMAS:
        raise ConfigError([{"field": "command", "message": f"unknown command; expected one of {list(COMMANDS)}"}])
    if not isinstance(raw, dict):
        raise ConfigError([{"field": "<root>", "message": "config must be a JSON object"}])
    schema = SCHEMAS[command]
    problems = []
    for key in sorted(set(raw) - set(schema)):
        problems.append({"field": key, "message": f"unexpected field for '{command}'; allowed: {sorted(schema)}"})
    cfg = {}
    for key, fld in schema.items():
        if key not in raw or raw[key] is None:
            if fld.required:
                problems.append({"field": key, "message": f"required field missing (expected {CHECKS[fld.kind][1]})"})
            cfg[key] = fld.default
            continue
        check, what = CHECKS[fld.kind]
        if not check(raw[key]):
            problems.append({"field": key, "message": f"expected {what}, got {raw[key]!r}"})
        cfg[key] = raw[key]
    if not problems:
        problems += _cross_checks(command, cfg)
    if problems:
        raise ConfigError(problems)
    return cfg


def _cross_checks(command: str, cfg: dict) -> list[dict]:
    out = []
    n = cfg.get("n")
    for key in ("c0", "psibar", "u0"):
        if key in cfg and cfg[key] is not None and n is not None and len(cfg[key]) != n:
            out.append({"field": key, "message": f"must have n = {n} entries"})
    if command == "conserve" and cfg["compare_dt"] is None:
        cfg["compare_dt"] = 2 * cfg["dt"]
    if command == "build-lneg":
        if cfg["depth"] > cfg["n"] - 1:
            out.append({"field": "depth", "message": f"must be <= n - 1 = {cfg['n'] - 1}"})
        if cfg["cross_k"] < 5 or cfg["cross_k"] > cfg["depth"]:
            out.append({"field": "cross_k", "message": "must satisfy 5 <= cross_k <= depth"})
    if command in ("sle-sim", "sle-martingale"):
        if cfg.get("kappa") is not None and Fraction(str(cfg["kappa"])) <= 0:
            out.append({"field": "kappa", "message": "must be > 0"})
        z = cfg["z0"]
        im = z[1] if isinstance(z, list) else 0.0
        if im <= 0:
            out.append({"field": "z0", "message": "must lie in the upper half-plane"})
    if command == "sle-sim":
        if cfg.get("kappa") is None and not any(
            cfg.get(k) is not None for k in ("charge_table", "deterministic_check", "capacity_t")
        ):
            out.append({"field": "kappa", "message": "nothing to do: give kappa or one of charge_table, deterministic_check, capacity_t"})
        d = cfg.get("deterministic_check")
        if d is not None:
            for key in set(d) - {"z", "t_end", "dt"}:
                out.append({"field": f"deterministic_check.{key}", "message": "unexpected field; allowed: ['dt', 't_end', 'z']"})
    return out


# --------------------------------------------------------------------------
# execution


def _summary(command: str, result: dict) -> str:
    if command == "witt-check":
        return f"witt-check n={result['n']} pairs={result['n_pairs']} max_residual={result['max_residual']:.3g}"
    if command == "duality-check":
        bad = sum(len(result[k]["mismatches"]) for k in ("p_oracle", "lk_action_on_p", "l0_expansion"))
        bad += len(result["omega"]["off_identity"])
        return f"duality-check mismatches={bad} omega_routes_agree={result['omega']['routes_agree']}"
    if command == "build-lneg":
        lead = all(v["match"] for v in result["leading_terms"].values())
        return f"build-lneg n={result['n']} depth={result['depth']} leading_terms_match={lead} cross_route={result['cross_route']['agree']}"
    if command == "evolve":
        parts = [f"evolve n={result['n']} t_end={result['t_end']:g}"]
        if "closed_form" in result:
            parts.append(f"closed_form_error={result['closed_form']['max_abs_error']:.3g}")
        if "limit" in result and "max_abs_error_vs_limit" in result["limit"]:
            parts.append(f"limit_error={result['limit']['max_abs_error_vs_limit']:.3g}")
        return " ".join(parts)
    if command == "conserve":
        ratios = ", ".join(f"{k}:{v:.3g}" for k, v in result["drift_ratio"].items())
        return f"conserve max_rel_drift={result['max_rel_drift']:.3g} drift_ratio=[{ratios}]"
    if command == "geodesic":
        return f"geodesic n={result['n']} system={result['system']} max_rel_energy_drift={result['max_rel_energy_drift']:.3g}"
    if command == "geodesic-const":
        return f"geodesic-const n={result['n']} max_abs_error={result['max_abs_error']:.3g}"
    if command == "sle-sim":
        parts = ["sle-sim"]
        if "charge_table" in result:
            parts.append("charges=" + ";".join(f"{r['kappa']}:({r['c']},{r['h']})" for r in result["charge_table"]))
        if "deterministic_check" in result:
            parts.append(f"rk4_max_error={result['deterministic_check']['max_error']:.3g}")
        if "capacity" in result:
            parts.append(f"capacity_rel_error={result['capacity']['rel_error']:.3g}")
        if "ensemble" in result:
            parts.append(f"swallowed={result['ensemble']['swallowed_fraction']:.3g}")
        return " ".join(parts)
    if command == "sle-martingale":
        return (f"sle-martingale kappa={result['kappa']:g} deviation_sigma={result['deviation_sigma']:.3g} "
                f"swallowed_fraction={result['swallowed_fraction']:.3g}")
    return command


def execute(command: str, cfg: dict, threads: int = 1) -> tuple[dict, tuple | None]:
    """Run a validated config; returns ``(json_result, optional (header, rows))``."""
    if command == "witt-check":
        return ex.witt_report(cfg["n"]), None
    if command == "duality-check":
        return ex.duality_report(cfg["n_p"], cfg["n_action"], cfg["n_omega"], cfg["n_l0"]), None
    if command == "build-lneg":
        return ex.lneg_report(cfg["n"], cfg["depth"], cfg["cross_k"]), None
    if command == "evolve":
        res, traj = ex.evolve_run(cfg)
        return res, (traj.csv_header(), traj.csv_rows())
    if command == "conserve":
        return ex.conserve_run(cfg), None
    if command == "geodesic":
        return ex.geodesic_run(cfg)
    if command == "geodesic-const":
        return ex.geodesic_const_run(cfg), None
    if command == "sle-sim":
        return ex.sle_sim_run(cfg, threads)
    if command == "sle-martingale":
        return ex.sle_martingale_run(cfg, threads), None
    raise ConfigError([{"field": "command", "message": f"unknown command {command!r}"}])


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="loewner-virasoro", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", type=Path, help="JSON config file (default: all defaults)")
    ap.add_argument("--out", type=Path, default=Path("out"), help="output directory (default: ./out)")
    ap.add_argument("--threads", type=int, default=1, help="worker threads for Monte-Carlo (0 = auto)")
    ap.add_argument("--quiet", action="store_true", help="suppress the summary line")
    ap.add_argument("--n", type=int, help="override the config's n")
    ap.add_argument("--dt", type=float, help="override the config's dt")
    ap.add_argument("--t-end", dest="t_end", type=float, help="override the config's t_end")
    ap.add_argument("--seed", type=int, help="override the config's seed")
    return ap


def _fail(code: int, kind: str, message: str, fields: list | None = None) -> int:
    payload: dict = {"error": kind, "message": message}
    if fields is not None:
        payload["fields"] = fields
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    raw: dict = {}
    if args.config is not None:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            return _fail(EXIT_IO, "io", f"cannot read config: {exc}")
        try:
            raw = json.loads(text) if text.strip() else {}
        except json.JSONDecodeError as exc:
            return _fail(EXIT_VALIDATION, "validation", f"config is not valid JSON: {exc}",
                         [{"field": "<root>", "message": str(exc)}])
    if isinstance(raw, dict):
        for opt, key in OVERRIDES.items():
            val = getattr(args, opt)
            if val is not None:
                if key not in SCHEMAS[args.command]:
                    return _fail(EXIT_VALIDATION, "validation", f"--{opt.replace('_', '-')} does not apply",
                                 [{"field": key, "message": f"not a field of '{args.command}'"}])
                raw[key] = val
    try:
        cfg = validate(args.command, raw)
        result, table = execute(args.command, cfg, args.threads)
    except ConfigError as exc:
        return _fail(EXIT_VALIDATION, "validation", "invalid config", exc.problems)
    except (DrivingError, ValueError) as exc:
        return _fail(EXIT_VALIDATION, "validation", str(exc), [{"field": "<config>", "message": str(exc)}])
    except BlowUpError as exc:
        return _fail(EXIT_BLOWUP, "blow-up", str(exc))

    stem = f"{args.command}-{canonical_hash({'command': args.command, **cfg})}"
    payload = {"command": args.command, "config": cfg, "result": result}
    try:
        write_text(args.out / f"{stem}.json", dumps(payload))
        if table is not None:
            write_text(args.out / f"{stem}.csv", csv_text(*table))
    except OSError as exc:
        return _fail(EXIT_IO, "io", f"cannot write artifacts: {exc}")
    if not args.quiet:
        print(f"{_summary(args.command, result)} -> {args.out / stem}.json")
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
