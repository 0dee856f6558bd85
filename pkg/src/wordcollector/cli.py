"""Command-line interface: ``wordcollector {classes,analyze,psi,tstar,sweep}``.

Exit codes: 0 success, 2 partial success (some requested method failed),
1 invalid request.  Settings come from flags, then from an optional
``--config`` file of ``key=value`` lines, then from built-in defaults.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import time
from typing import Any, Sequence

from . import approximations, asymptotics, exact, simulate
from .languages import BRACKET_ALPHABET, Kind, LanguageModel
from .languages import spectrum as build_language_spectrum
from .spectrum import ClassSpectrum, SpectrumError, WeightAssignment

SCHEMA_VERSION = 1
METHODS = ("exact", "asymptotic", "u2", "simulate")
MAX_GRID_POINTS = 10**6

EXIT_OK, EXIT_INVALID, EXIT_PARTIAL = 0, 1, 2

DEFAULTS: dict[str, Any] = {
    "language": "sigma-star",
    "weights": None,
    "theta": 1,
    "n": None,
    "n_list": None,
    "methods": "exact,asymptotic,u2",
    "trials": 1000,
    "seed": 0,
    "out": None,
    "format": None,
    "grid": "0:2:0.01",
    "probe_limit": 10_000,
}


class UsageError(ValueError):
    """Invalid request; maps to exit code 1."""


# --- request parsing -------------------------------------------------------

def parse_weights(text: str) -> dict[str, float]:
    out: dict[str, float] = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise UsageError(f"weight entry {item!r} is not letter=value")
        letter, value = (s.strip() for s in item.split("=", 1))
        if not letter:
            raise UsageError(f"weight entry {item!r} has no letter")
        if letter in out:
            raise UsageError(f"letter {letter!r} given twice")
        try:
            out[letter] = float(value)
        except ValueError:
            raise UsageError(f"weight of {letter!r} is not a number: {value!r}") from None
    if not out:
        raise UsageError("empty weight list")
    return out


def parse_int_list(text: str) -> list[int]:
    try:
        values = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"bad integer list {text!r}") from None
    if not values:
        raise UsageError("empty length list")
    return values


def parse_grid(text: str) -> list[float]:
    """``start:stop:step``, both ends included."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid {text!r} is not start:stop:step")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"grid {text!r} has a non-numeric field") from None
    if not all(math.isfinite(v) for v in (start, stop, step)):
        raise UsageError(f"grid {text!r} is not finite")
    if step <= 0:
        raise UsageError(f"grid step must be positive, got {step}")
    if start < 0 or stop < start:
        raise UsageError(f"grid needs 0 <= start <= stop, got {start}:{stop}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    if count > MAX_GRID_POINTS:
        raise UsageError(f"grid has {count} points, limit is {MAX_GRID_POINTS}")
    return [start + j * step for j in range(count)]


def parse_methods(text: str) -> list[str]:
    methods = [m.strip() for m in text.split(",") if m.strip()]
    bad = [m for m in methods if m not in METHODS]
    if bad:
        raise UsageError(f"unknown method(s) {bad}; choose from {list(METHODS)}")
    if not methods:
        raise UsageError("no methods requested")
    return list(dict.fromkeys(methods))


def read_config(path: str) -> dict[str, str]:
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def resolve_settings(args: argparse.Namespace) -> dict[str, Any]:
    """Merge flags over config file over defaults."""
    config = read_config(args.config) if args.config else {}
    settings = {}
    for key, default in DEFAULTS.items():
        value = getattr(args, key, None)
        if value is None:
            value = config.get(key, default)
        settings[key] = value
    for key in ("theta", "trials", "seed", "probe_limit"):
        try:
            settings[key] = int(settings[key])
        except (TypeError, ValueError):
            raise UsageError(f"{key} must be an integer, got {settings[key]!r}") from None
    if settings["n"] is not None:
        try:
            settings["n"] = int(settings["n"])
        except ValueError:
            raise UsageError(f"n must be an integer, got {settings['n']!r}") from None
    return settings


def build_model(settings: dict[str, Any]) -> LanguageModel:
    try:
        kind = Kind(settings["language"])
    except ValueError:
        raise UsageError(
            f"unknown language {settings['language']!r}; choose from {[k.value for k in Kind]}"
        ) from None
    text = settings["weights"]
    if kind is Kind.SIGMA_STAR:
        weights = parse_weights(text) if text else {"a": 1.0, "b": 1.0}
    else:
        weights = {a: 1.0 for a in BRACKET_ALPHABET}
        if text:
            given = parse_weights(text)
            unknown = [a for a in given if a not in BRACKET_ALPHABET]
            if unknown:
                raise UsageError(
                    f"unknown letter {unknown[0]!r} for {kind.value}; alphabet is {', '.join(BRACKET_ALPHABET)}"
                )
            weights.update(given)
    theta = settings["theta"]
    if kind is not Kind.RNA and theta != 1:
        raise UsageError("--theta only applies to the rna language")
    return LanguageModel(kind, WeightAssignment.from_mapping(weights), theta)


def lengths(settings: dict[str, Any]) -> list[int]:
    if settings["n_list"] is not None:
        ns = parse_int_list(str(settings["n_list"]))
    elif settings["n"] is not None:
        ns = [settings["n"]]
    else:
        raise UsageError("a length is required (--n or --n-list)")
    bad = [n for n in ns if n < 0]
    if bad:
        raise UsageError(f"lengths must be non-negative, got {bad}")
    return ns


# --- reports ---------------------------------------------------------------

def finite_or_none(x: float) -> float | None:
    """JSON-safe float: overflowed or non-finite values become null."""
    if x is None or not math.isfinite(x) or abs(x) > 1e308:
        return None
    return float(x)


def safe_exp(log_x: float) -> float | None:
    try:
        return finite_or_none(math.exp(log_x))
    except OverflowError:
        return None


def error_entry(exc: BaseException) -> dict[str, Any]:
    return {"error": {"type": type(exc).__name__, "message": str(exc)}}


def key_weight(model: LanguageModel, counts: Sequence[int]) -> float | None:
    """Class weight as a direct product of letter weights (exact for small counts)."""
    try:
        w = math.prod(model.weight(a) ** c for a, c in zip(model.assignment.non_unit_letters, counts))
    except OverflowError:
        return None
    return finite_or_none(w)


def key_dict(model: LanguageModel, counts: Sequence[int]) -> dict[str, int]:
    return dict(zip(model.assignment.non_unit_letters, counts))


def request_echo(model: LanguageModel, settings: dict[str, Any], n: int, methods: Sequence[str]) -> dict[str, Any]:
    echo = {
        "language": model.kind.value,
        "weights": model.assignment.as_dict(),
        "n": n,
        "methods": list(methods),
    }
    if model.kind is Kind.RNA:
        echo["theta"] = model.theta
    if "simulate" in methods:
        echo["trials"] = settings["trials"]
        echo["seed"] = settings["seed"]
    return echo


def spectrum_summary(model: LanguageModel, sp: ClassSpectrum) -> dict[str, Any]:
    return {
        "classes": len(sp),
        "m": sp.m,
        "log_m": sp.log_m,
        "log_mu": sp.log_mu,
        "collisions": [
            {"log_weight": c.log_weight, "keys": [key_dict(model, k) for k in c.keys]} for c in sp.collisions
        ],
    }


def run_exact(sp: ClassSpectrum) -> dict[str, Any]:
    r = exact.waiting_time_exact_result(sp)
    return {
        "value": safe_exp(r.log_value),
        "log_value": r.log_value,
        "quadrature_error": r.error,
        "subdivisions": r.subdivisions,
    }


def run_asymptotic(model: LanguageModel, sp: ClassSpectrum, probe_limit: int) -> dict[str, Any]:
    pack = asymptotics.parameter_pack(model)
    est = asymptotics.asymptotic_waiting_time(pack, sp, probe_limit)
    out: dict[str, Any] = {
        "value": safe_exp(est.estimate_log),
        "log_value": est.estimate_log,
        "t_star": est.t_star,
        "argmax": est.arg_i,
        "regime": pack.regime or pack.description,
    }
    try:
        e = asymptotics.m_scale_exponents(model)
        out["exponents"] = {"p": e.p, "q": e.q, "r": e.r}
    except asymptotics.UnsupportedConfigurationError as exc:
        out["exponents"] = error_entry(exc)
    return out


def run_u2(sp: ClassSpectrum, log_exact: float | None) -> dict[str, Any]:
    lu = approximations.log_u2(sp)
    out: dict[str, Any] = {"value": safe_exp(lu), "log_value": lu, "m_float": safe_exp(sp.log_m)}
    try:
        _, log_lower, log_upper = approximations.log_bounds(sp)
    except approximations.BoundUndefinedError as exc:
        out["bounds"] = error_entry(exc)
        return out
    out.update(lower=safe_exp(log_lower), upper=safe_exp(log_upper), log_lower=log_lower, log_upper=log_upper)
    if log_exact is not None:
        out["bounds_satisfied"] = bool(log_lower <= log_exact <= log_upper)
    return out


def run_simulate(sp: ClassSpectrum, settings: dict[str, Any]) -> dict[str, Any]:
    cfg = simulate.SimulationConfig(trials=settings["trials"], seed=settings["seed"])
    res = simulate.run_trials(sp, cfg)
    return {
        "mean": res.mean,
        "std_error": res.std_error,
        "trials": res.trials,
        "seed": res.seed,
        "degenerate": res.degenerate,
    }


def analyze_one(model: LanguageModel, n: int, methods: Sequence[str], settings: dict[str, Any]) -> tuple[dict, bool]:
    """Report for one length, plus whether every requested method succeeded."""
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    sp = build_language_spectrum(model, n)
    timings["spectrum"] = time.perf_counter() - t0
    results: dict[str, Any] = {}
    ok = True
    log_exact = None
    for method in METHODS:
        if method not in methods:
            continue
        t0 = time.perf_counter()
        try:
            if method == "exact":
                results[method] = run_exact(sp)
                log_exact = results[method]["log_value"]
            elif method == "asymptotic":
                results[method] = run_asymptotic(model, sp, settings["probe_limit"])
            elif method == "u2":
                results[method] = run_u2(sp, log_exact)
            else:
                results[method] = run_simulate(sp, settings)
        except Exception as exc:  # every method gets a result or a structured error
            results[method] = error_entry(exc)
            ok = False
        timings[method] = time.perf_counter() - t0
    report = {
        "schema_version": SCHEMA_VERSION,
        "request": request_echo(model, settings, n, methods),
        "spectrum": spectrum_summary(model, sp),
        "results": results,
        "timings": timings,
    }
    return report, ok


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        atomic_write(out, text)


def atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --- commands --------------------------------------------------------------

def cmd_classes(settings: dict[str, Any]) -> int:
    model = build_model(settings)
    fmt = settings["format"] or "text"
    blocks = []
    payload = []
    for n in lengths(settings):
        sp = build_language_spectrum(model, n)
        rows = [
            {
                "rank": i,
                "key": key_dict(model, c.key.counts),
                "weight": key_weight(model, c.key.counts),
                "log_weight": c.log_weight,
                "multiplicity": c.multiplicity,
            }
            for i, c in enumerate(sp.classes, 1)
        ]
        payload.append({"n": n, "m": sp.m, "classes": rows})
        if fmt == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["n", "rank", "key", "weight", "log_weight", "multiplicity"])
            for r in rows:
                key = ";".join(f"{a}={c}" for a, c in r["key"].items())
                w.writerow([n, r["rank"], key, fmt_float(r["weight"]), fmt_float(r["log_weight"]), r["multiplicity"]])
            blocks.append(buf.getvalue())
        elif fmt == "text":
            lines = [f"# {model.kind.value} n={n}: {len(sp)} classes, m={sp.m}"]
            lines.append(f"{'rank':>5}  {'sub-composition':<24} {'weight':>24}  multiplicity")
            for r in rows:
                key = ",".join(f"{a}={c}" for a, c in r["key"].items()) or "-"
                weight = fmt_float(r["weight"]) if r["weight"] is not None else f"exp({r['log_weight']!r})"
                lines.append(f"{r['rank']:>5}  {key:<24} {weight:>24}  {r['multiplicity']}")
            blocks.append("\n".join(lines) + "\n")
    if fmt == "json":
        emit(dumps({"schema_version": SCHEMA_VERSION, "language": model.kind.value,
                    "weights": model.assignment.as_dict(), "spectra": payload}), settings["out"])
    else:
        emit("".join(blocks), settings["out"])
    return EXIT_OK


def fmt_float(x: float | None) -> str:
    return "" if x is None else "%.17g" % x


def cmd_analyze(settings: dict[str, Any]) -> int:
    model = build_model(settings)
    ns = lengths(settings)
    if len(ns) != 1:
        raise UsageError("analyze takes a single length; use sweep for several")
    methods = parse_methods(settings["methods"])
    report, ok = analyze_one(model, ns[0], methods, settings)
    fmt = settings["format"] or "json"
    if fmt == "json":
        emit(dumps(report), settings["out"])
    elif fmt == "text":
        emit(report_text(report), settings["out"])
    else:
        emit(sweep_csv([report]), settings["out"])
    return EXIT_OK if ok else EXIT_PARTIAL


def report_text(report: dict[str, Any]) -> str:
    req, spec = report["request"], report["spectrum"]
    m = str(spec["m"])
    if len(m) > 20:
        m = f"~{m[0]}.{m[1:4]}e{len(m) - 1}"
    lines = [f"{req['language']} n={req['n']}  classes={spec['classes']}  m={m}"]
    for method, res in report["results"].items():
        if "error" in res:
            lines.append(f"  {method:<10} error: {res['error']['message']}")
        elif method == "simulate":
            lines.append(f"  {method:<10} {res['mean']!r} +- {res['std_error']!r} ({res['trials']} trials, seed {res['seed']})")
        else:
            shown = fmt_float(res["value"]) if res["value"] is not None else f"exp({res['log_value']!r})"
            lines.append(f"  {method:<10} {shown}")
    return "\n".join(lines) + "\n"


SWEEP_COLUMNS = (
    "n", "classes", "m", "log_m",
    "exact", "log_exact", "asymptotic", "log_asymptotic", "t_star",
    "u2", "log_u2", "sim_mean", "sim_std_error", "errors",
)


def sweep_row(report: dict[str, Any]) -> dict[str, Any]:
    if "error" in report:
        return {"n": report["request"]["n"], "errors": report["error"]["message"]}
    res = report["results"]
    spec = report["spectrum"]
    row: dict[str, Any] = {
        "n": report["request"]["n"], "classes": spec["classes"], "m": spec["m"], "log_m": spec["log_m"],
    }
    errors = []
    for method, (val, log_val) in {
        "exact": ("exact", "log_exact"), "asymptotic": ("asymptotic", "log_asymptotic"), "u2": ("u2", "log_u2"),
    }.items():
        r = res.get(method)
        if r is None:
            continue
        if "error" in r:
            errors.append(f"{method}: {r['error']['message']}")
            continue
        row[val], row[log_val] = r["value"], r["log_value"]
        if method == "asymptotic":
            row["t_star"] = r["t_star"]
    r = res.get("simulate")
    if r is not None:
        if "error" in r:
            errors.append(f"simulate: {r['error']['message']}")
        else:
            row["sim_mean"], row["sim_std_error"] = r["mean"], r["std_error"]
    row["errors"] = "; ".join(errors)
    return row


def sweep_csv(reports: Sequence[dict[str, Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for rep in reports:
        row = sweep_row(rep)
        w.writerow([fmt_float(row.get(c)) if isinstance(row.get(c), float) else row.get(c, "") for c in SWEEP_COLUMNS])
    return buf.getvalue()


def cmd_sweep(settings: dict[str, Any]) -> int:
    model = build_model(settings)
    methods = parse_methods(settings["methods"])
    reports, all_ok = [], True
    for n in lengths(settings):
        try:
            report, ok = analyze_one(model, n, methods, settings)
        except SpectrumError as exc:
            report = {"schema_version": SCHEMA_VERSION, "request": request_echo(model, settings, n, methods),
                      **error_entry(exc)}
            ok = False
        reports.append(report)
        all_ok &= ok
    fmt = settings["format"] or "json"
    if fmt == "json":
        emit(dumps({"schema_version": SCHEMA_VERSION, "reports": reports}), settings["out"])
    else:
        emit(sweep_csv(reports), settings["out"])
    return EXIT_OK if all_ok else EXIT_PARTIAL


def psi_csv(points: Sequence[tuple[float, float]]) -> str:
    return "t,psi\n" + "".join(f"{t:.17g},{p:.17g}\n" for t, p in points)


def psi_path(out: str, n: int, many: bool) -> str:
    if "{n}" in out:
        return out.format(n=n)
    if many or out.endswith(os.sep) or os.path.isdir(out):
        return os.path.join(out, f"psi_n{n}.csv")
    return out


def cmd_psi(settings: dict[str, Any]) -> int:
    model = build_model(settings)
    grid = parse_grid(str(settings["grid"]))
    ns = lengths(settings)
    pack = asymptotics.parameter_pack(model)
    chunks = []
    for n in ns:
        sp = build_language_spectrum(model, n)
        text = psi_csv(exact.psi_curve(sp, pack, grid))
        if settings["out"] is None:
            chunks.append((f"# n={n}\n" if len(ns) > 1 else "") + text)
        else:
            atomic_write(psi_path(settings["out"], n, len(ns) > 1), text)
    if chunks:
        sys.stdout.write("".join(chunks))
    return EXIT_OK


def cmd_tstar(settings: dict[str, Any]) -> int:
    model = build_model(settings)
    pack = asymptotics.parameter_pack(model)
    ts, arg = pack.t_star(settings["probe_limit"])
    out: dict[str, Any] = {"t_star": ts, "argmax": arg, "regime": pack.regime or pack.description}
    code = EXIT_OK
    try:
        e = asymptotics.m_scale_exponents(model)
        out["exponents"] = {"p": e.p, "q": e.q, "r": e.r}
    except asymptotics.UnsupportedConfigurationError as exc:
        out["exponents"] = error_entry(exc)
        code = EXIT_PARTIAL
    if (settings["format"] or "text") == "json":
        emit(dumps({"schema_version": SCHEMA_VERSION, "request": {"language": model.kind.value,
                    "weights": model.assignment.as_dict()}, **out}), settings["out"])
    else:
        lines = [f"t_star {ts!r}", f"argmax {arg}", f"regime {out['regime']}"]
        e = out["exponents"]
        lines.append(f"exponents unsupported: {e['error']['message']}" if "error" in e
                     else f"exponents p={e['p']!r} q={e['q']!r} r={e['r']}")
        emit("\n".join(lines) + "\n", settings["out"])
    return code


COMMANDS = {
    "classes": cmd_classes,
    "analyze": cmd_analyze,
    "psi": cmd_psi,
    "tstar": cmd_tstar,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--language", help="sigma-star, motzkin, rna or nc")
    common.add_argument("--weights", help="letter weights as k=v,... (bracket letters: a, abar, b)")
    common.add_argument("--theta", help="minimal hairpin size for rna")
    common.add_argument("--n", help="word length")
    common.add_argument("--n-list", dest="n_list", help="comma-separated word lengths")
    common.add_argument("--methods", help=f"subset of {','.join(METHODS)}")
    common.add_argument("--trials", help="simulation trials")
    common.add_argument("--seed", help="simulation seed (unsigned 64-bit)")
    common.add_argument("--grid", help="psi grid start:stop:step")
    common.add_argument("--probe-limit", dest="probe_limit", help="largest rank probed for t*")
    common.add_argument("--out", help="output file (psi: file, directory or pattern with {n})")
    common.add_argument("--format", choices=("json", "csv", "text"))
    common.add_argument("--config", help="key=value settings file")

    parser = argparse.ArgumentParser(prog="wordcollector", description="Waiting times for collecting all words of a weighted language.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "classes": "dump the weight classes",
        "analyze": "full report for one length",
        "psi": "rescaled survival curves as CSV",
        "tstar": "asymptotic constant and growth exponents",
        "sweep": "reports over several lengths",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        settings = resolve_settings(args)
        return COMMANDS[args.command](settings)
    except (UsageError, SpectrumError, asymptotics.UnsupportedConfigurationError,
            asymptotics.TStarConvergenceError, simulate.SimulationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
