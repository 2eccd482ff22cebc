"""Command-line interface.

Subcommands ``fit``, ``compare``, ``ttt``, ``km`` and ``simulate`` write
JSON and CSV files into ``--out``.  Every artifact embeds a run manifest
(command, inputs, scheme flags, seed, output directory, version); CSV files
carry it on a leading ``#`` comment line.

Exit codes: 0 success, 1 input error, 2 non-convergence, 3 calibration
failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .censoring import Complete, Random, TypeI, TypeII, coerce_scheme, load_dataset
from .errors import (
    AllCensoredError,
    BoundaryDriftError,
    CalibrationError,
    ConvergenceError,
    DatasetError,
    DomainError,
    EvaluationError,
    QuadratureError,
)
from .estimation import _sig, aic_table, fit
from .models import get_family
from .montecarlo import StudyConfig, run_study
from .nonparam import kaplan_meier, shape_hint, ttt_curve

EXIT_OK, EXIT_INPUT, EXIT_NONCONVERGED, EXIT_CALIBRATION = 0, 1, 2, 3
GRID_POINTS = 200


class InputError(Exception):
    """Bad flags or configuration; maps to exit code 1."""


@dataclass(frozen=True)
class RunManifest:
    command: str
    inputs: tuple[str, ...]
    scheme: dict
    seed: int | None
    out: str
    version: str = __version__

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": list(self.inputs),
            "scheme": self.scheme,
            "seed": self.seed,
            "out": self.out,
            "version": self.version,
        }

    def comment(self) -> str:
        return "# manifest: " + json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"


def _dump_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text, encoding="utf-8")
    return path


def _csv_text(manifest: RunManifest, header, rows) -> str:
    buf = io.StringIO()
    buf.write(manifest.comment())
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else (f"{v:.10g}" if isinstance(v, float) else v) for v in row])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------


def _scheme_from_args(args):
    name = args.scheme
    if name == "type1":
        if args.tc is None:
            raise InputError("--scheme type1 requires --tc")
        return TypeI(args.tc)
    if name == "type2":
        if args.r is None:
            raise InputError("--scheme type2 requires --r")
        return TypeII(args.r)
    if args.tc is not None or args.r is not None:
        raise InputError(f"--tc/--r do not apply to --scheme {name}")
    return Complete() if name == "complete" else Random()


def _scheme_flags(args) -> dict:
    flags = {"scheme": args.scheme}
    if getattr(args, "tc", None) is not None:
        flags["tc"] = args.tc
    if getattr(args, "r", None) is not None:
        flags["r"] = args.r
    return flags


def _load(args, with_scheme=True):
    sample = load_dataset(args.data)
    if with_scheme:
        sample = coerce_scheme(sample, _scheme_from_args(args))
    return sample


def _grid(sample) -> np.ndarray:
    return np.linspace(0.0, 1.1 * float(np.max(sample.times)), GRID_POINTS)


def _add_scheme_flags(p):
    p.add_argument("--scheme", choices=("random", "type1", "type2", "complete"), default="random",
                   help="censoring scheme of the data (default: random)")
    p.add_argument("--tc", type=float, help="type I censoring time")
    p.add_argument("--r", type=int, help="type II number of failures")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_fit(args) -> int:
    sample = _load(args)
    manifest = RunManifest("fit", (args.data,), _scheme_flags(args) | {"model": args.model}, None, args.out)
    res = fit(sample, args.model, level=args.level)
    out = Path(args.out)
    _write(out, "fit.json", res.to_json(manifest=manifest.to_dict(), message=res.message))
    grid = _grid(sample)
    surv = res.comparison_model().survival(grid)
    _write(out, "survival_curve.csv", _csv_text(manifest, ("time", "survival"), zip(grid.tolist(), surv.tolist())))
    names = ", ".join(f"{k}={v:.6g} (se {s:.4g})" for k, v, s in zip(res.param_names, res.estimates, res.std_errors))
    print(f"{get_family(args.model).label}: {names}; loglik={res.loglik:.6f} AIC={res.aic:.6f}")
    if not res.converged:
        print(f"warning: optimizer did not converge ({res.message})", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def _format_table(rows) -> str:
    head = ("rank", "model", "AIC", "loglik", "status")
    body = []
    for i, row in enumerate(rows, 1):
        ok = row.converged
        body.append((
            str(i) if ok else "-",
            get_family(row.family).label,
            f"{row.aic:.4f}" if ok else "",
            f"{row.loglik:.4f}" if ok else "",
            "converged" if ok else f"failed: {row.error}",
        ))
    widths = [max(len(r[j]) for r in [head, *body]) for j in range(len(head))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in [head, *body]]
    return "\n".join(lines) + "\n"


def cmd_compare(args) -> int:
    sample = _load(args)
    if sample.n < 2:
        raise InputError("compare needs at least two observations")
    manifest = RunManifest("compare", (args.data,), _scheme_flags(args), None, args.out)
    rows = aic_table(sample)
    table = []
    for row in rows:
        entry = {"model": row.family, "aic": _sig(row.aic), "loglik": _sig(row.loglik),
                 "converged": row.converged, "error": row.error}
        if row.fit is not None:
            entry["estimates"] = {k: _sig(v) for k, v in zip(row.fit.param_names, row.fit.estimates)}
        table.append(entry)
    out = Path(args.out)
    text = _format_table(rows)
    _write(out, "compare.json", _dump_json({"manifest": manifest.to_dict(), "ranking": table}))
    _write(out, "compare.txt", text)
    grid = _grid(sample)
    km = kaplan_meier(sample)
    cols = [km(grid)]
    header = ["time", "km"]
    for name in ("wl", "weibull", "gamma"):
        row = next((r for r in rows if r.family == name), None)
        header.append(name)
        if row is not None and row.fit is not None and row.converged:
            cols.append(row.fit.comparison_model().survival(grid))
        else:
            cols.append([None] * grid.size)
    lines = [[float(t)] + [None if c[i] is None else float(c[i]) for c in cols] for i, t in enumerate(grid)]
    _write(out, "overlay.csv", _csv_text(manifest, header, lines))
    sys.stdout.write(text)
    return EXIT_OK if any(r.converged for r in rows) else EXIT_NONCONVERGED


def cmd_ttt(args) -> int:
    sample = _load(args, with_scheme=False)
    manifest = RunManifest("ttt", (args.data,), {}, None, args.out)
    curve = ttt_curve(sample.times)
    hint = shape_hint(curve)
    rows = zip(curve.breakpoints.tolist(), curve.values.tolist())
    _write(Path(args.out), "ttt.csv", _csv_text(manifest, ("u", "G"), rows))
    print(hint)
    return EXIT_OK


def cmd_km(args) -> int:
    sample = _load(args, with_scheme=False)
    manifest = RunManifest("km", (args.data,), {}, None, args.out)
    km = kaplan_meier(sample)
    rows = zip(km.breakpoints.tolist(), km.values.tolist())
    _write(Path(args.out), "km.csv", _csv_text(manifest, ("time", "survival"), rows))
    print(f"{len(km)} steps; S(t_max) = {km.values[-1]:.6g}")
    return EXIT_OK


_SIM_KEYS = {
    "phi": float, "lambda": float, "n": int, "scheme": str, "p_target": float,
    "r": int, "replicates": int, "seed": int, "level": float,
}


def read_config(path) -> dict:
    """Parse a flat ``key=value`` file; ``#`` starts a comment."""
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}: line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _SIM_KEYS:
            raise InputError(f"{path}: line {lineno}: unknown key {key!r}")
        try:
            values[key] = _SIM_KEYS[key](value)
        except ValueError:
            raise InputError(f"{path}: line {lineno}: bad value for {key}: {value!r}") from None
    return values


def cmd_simulate(args) -> int:
    settings = read_config(args.config) if args.config else {}
    for key in _SIM_KEYS:
        value = getattr(args, key)
        if value is not None:
            settings[key] = value
    missing = [k for k in ("phi", "lambda", "n") if k not in settings]
    if missing:
        raise InputError("simulate needs " + ", ".join("--" + k for k in missing))
    settings.setdefault("scheme", "complete")
    settings.setdefault("replicates", 2000)
    settings.setdefault("seed", 0)
    settings.setdefault("level", 0.95)
    config = StudyConfig(
        (settings["lambda"], settings["phi"]), settings["n"], settings["scheme"],
        p_target=settings.get("p_target"), r=settings.get("r"),
        replicates=settings["replicates"], seed=settings["seed"], level=settings["level"],
    )
    inputs = (args.config,) if args.config else ()
    flags = {k: settings[k] for k in ("scheme", "p_target", "r") if settings.get(k) is not None}
    manifest = RunManifest("simulate", inputs, flags, config.seed, args.out)
    report = run_study(config, workers=args.workers)
    out = Path(args.out)
    _write(out, "simulation.json", report.to_json(manifest=manifest.to_dict()))
    _write(out, "simulation.csv", _csv_text(manifest, report.csv_header(), [report.csv_row()]))
    d = report.to_dict()
    print(f"MRE phi={d['mre']['phi']} lambda={d['mre']['lambda']}; "
          f"coverage phi={d['coverage']['phi']} lambda={d['coverage']['lambda']}; "
          f"E[p]={d['mean_censored_fraction']}; converged {report.converged}/{report.attempted}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wlsurv", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="maximum likelihood fit of one model")
    p.add_argument("data", help="CSV file with columns time,status")
    _add_scheme_flags(p)
    p.add_argument("--model", choices=("wl", "weibull", "gamma"), default="wl")
    p.add_argument("--level", type=float, default=0.95, help="Wald interval level")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("compare", help="fit all models and rank by AIC")
    p.add_argument("data")
    _add_scheme_flags(p)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_compare)

    for name, func, text in (("ttt", cmd_ttt, "scaled TTT curve and hazard-shape hint"),
                             ("km", cmd_km, "Kaplan-Meier survival estimate")):
        p = sub.add_parser(name, help=text)
        p.add_argument("data")
        p.add_argument("--out", default=".")
        p.set_defaults(func=func)

    p = sub.add_parser("simulate", help="Monte Carlo study of the estimators")
    p.add_argument("--config", help="key=value file with defaults for the flags below")
    p.add_argument("--phi", type=float)
    p.add_argument("--lambda", dest="lambda", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--scheme", choices=("complete", "type1", "type2", "random"))
    p.add_argument("--p-target", dest="p_target", type=float)
    p.add_argument("--r", type=int)
    p.add_argument("--replicates", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--level", type=float)
    p.add_argument("--workers", type=int, help="worker processes (default WLSURV_THREADS; 0 = all CPUs)")
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DatasetError, InputError, AllCensoredError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CalibrationError as exc:
        print(f"calibration failure: {exc}", file=sys.stderr)
        return EXIT_CALIBRATION
    except (BoundaryDriftError, ConvergenceError, EvaluationError, QuadratureError) as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
