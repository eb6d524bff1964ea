"""Command-line interface: ``leja gen | verify-distribution | converge-1d | adaptive``.

Options may also come from a JSON file given with ``--config``; keys are
the long option names with dashes replaced by underscores, plus a
``schema_version`` field.  Explicit flags override the file.  When no
``--output`` is given, results go to ``$LEJA_OUTPUT_DIR`` if that is set
and to standard output otherwise.

Failures print one JSON object per line on standard error and exit with a
nonzero status (2 for usage errors, 1 for runtime errors).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from . import orthopoly as op
from .adaptive import LOG_FIELDS, AdaptiveConfig, run_adaptive
from .leja1d import build_sequence, format_float, sequence_to_csv
from .metrics import sample_inputs
from .models import get_model, model_names
from .studies import DEFAULT_LADDER, converge_1d, verify_distribution

CONFIG_SCHEMA_VERSION = 1
OUTPUT_ENV = "LEJA_OUTPUT_DIR"

DEFAULTS = {
    "common": {"family": "jacobi", "alpha": 0.0, "beta": 0.0, "exponent": 2.0, "mu": 0.0,
               "s": 0.0, "scale": 1.0, "shift": 0.0, "output": None, "seed": 0},
    "gen": {"n": None},
    "verify-distribution": {"ladder": ",".join(map(str, DEFAULT_LADDER))},
    "converge-1d": {"model": "f1", "rule": "leja", "max_level": 7, "growth": "doubling"},
    "adaptive": {"model": "oscillator", "rule": "leja", "budget": None, "tol": None,
                 "growth": None, "samples": 100_000, "surrogate": None, "sections": None,
                 "reference_mean": None, "reference_var": None},
}
DEFAULT_NAMES = {"gen": "leja_sequence.csv", "verify-distribution": "distribution.csv",
                 "converge-1d": "converge_1d.csv", "adaptive": "adaptive_log.csv"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _weight_options(p):
    g = p.add_argument_group("weight")
    g.add_argument("--family", choices=("jacobi", "hermite", "laguerre"))
    g.add_argument("--alpha", type=float, help="Jacobi exponent of (1 - z)")
    g.add_argument("--beta", type=float, help="Jacobi exponent of (1 + z)")
    g.add_argument("--exponent", type=float, help="Hermite exponent of |z|")
    g.add_argument("--mu", type=float, help="Hermite parameter, weight |z|^(2 mu)")
    g.add_argument("--s", type=float, help="Laguerre parameter, weight z^s exp(-z)")
    g.add_argument("--scale", type=float, help="affine map x = scale * z + shift")
    g.add_argument("--shift", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="leja", description=__doc__.splitlines()[0],
                     argument_default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="JSON file with option values")
        p.add_argument("-o", "--output", help="output CSV path ('-' for stdout)")
        p.add_argument("--seed", type=int)

    p = sub.add_parser("gen", help="generate a weighted Leja sequence", argument_default=argparse.SUPPRESS)
    common(p)
    _weight_options(p)
    p.add_argument("-n", type=int, help="number of nodes")

    p = sub.add_parser("verify-distribution", help="equilibrium-law diagnostics over an N ladder",
                       argument_default=argparse.SUPPRESS)
    common(p)
    _weight_options(p)
    p.add_argument("--ladder", help="comma-separated node counts")

    p = sub.add_parser("converge-1d", help="univariate refinement study",
                       argument_default=argparse.SUPPRESS)
    common(p)
    p.add_argument("--model", choices=("f1", "f2"))
    p.add_argument("--rule", choices=("leja", "cc"))
    p.add_argument("--max-level", dest="max_level", type=int)
    p.add_argument("--growth", choices=("linear", "doubling"))

    p = sub.add_parser("adaptive", help="dimension-adaptive sparse grid run",
                       argument_default=argparse.SUPPRESS)
    common(p)
    p.add_argument("--model", choices=model_names())
    p.add_argument("--rule", choices=("leja", "cc"))
    p.add_argument("--budget", type=int, help="maximum model evaluations")
    p.add_argument("--tol", type=float, help="tolerance on the summed active indicators")
    p.add_argument("--growth", choices=("linear", "doubling"))
    p.add_argument("--samples", type=int, help="Monte Carlo samples for the RMSE column")
    p.add_argument("--surrogate", help="path of the surrogate JSON (default: next to the log)")
    p.add_argument("--sections", type=int, help="resistor ladder sections P (d = 2P)")
    p.add_argument("--reference-mean", dest="reference_mean", type=float)
    p.add_argument("--reference-var", dest="reference_var", type=float)
    return parser


def resolve_config(argv=None) -> dict:
    ns = vars(build_parser().parse_args(argv))
    cmd = ns.pop("command")
    cfg = {**DEFAULTS["common"], **DEFAULTS[cmd]}
    path = ns.pop("config", None)
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config file {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        version = data.pop("schema_version", None)
        if version != CONFIG_SCHEMA_VERSION:
            raise UsageError(f"config schema_version must be {CONFIG_SCHEMA_VERSION}, got {version!r}")
        data.pop("command", None)
        unknown = sorted(set(data) - set(cfg))
        if unknown:
            raise UsageError(f"unknown config keys for {cmd}: {unknown}")
        cfg.update(data)
    cfg.update(ns)
    cfg["command"] = cmd
    return cfg


def _spec(cfg) -> op.WeightSpec:
    fam = cfg["family"]
    if fam == "jacobi":
        return op.WeightSpec("jacobi", alpha=cfg["alpha"], beta=cfg["beta"],
                             scale=cfg["scale"], shift=cfg["shift"])
    if fam == "hermite":
        return op.WeightSpec("hermite", exponent=cfg["exponent"], mu=cfg["mu"],
                             scale=cfg["scale"], shift=cfg["shift"])
    if fam == "laguerre":
        return op.WeightSpec("laguerre", s=cfg["s"], scale=cfg["scale"], shift=cfg["shift"])
    raise UsageError(f"family {fam!r} is not available from the command line")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _output_path(cfg) -> Path | None:
    out = cfg.get("output")
    if out == "-":
        return None
    if out is not None:
        return Path(out)
    env = os.environ.get(OUTPUT_ENV)
    if env:
        return Path(env) / DEFAULT_NAMES[cfg["command"]]
    return None


def _emit(cfg, text: str) -> Path | None:
    path = _output_path(cfg)
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return None
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def cmd_leja_gen(cfg) -> None:
    n = cfg["n"]
    if n is None or n < 1:
        raise UsageError("gen needs -n >= 1")
    seq = build_sequence(_spec(cfg), int(n))
    _emit(cfg, sequence_to_csv(seq, condition=True))


def cmd_verify_distribution(cfg) -> None:
    try:
        ladder = [int(v) for v in str(cfg["ladder"]).split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --ladder: {exc}") from exc
    if not ladder or min(ladder) < 1:
        raise UsageError("--ladder needs positive node counts")
    rows = verify_distribution(_spec(cfg), ladder)
    _emit(cfg, _csv(("N", "kolmogorov_distance", "fekete_ratio"),
                    [(r.N, format_float(r.kolmogorov_distance), format_float(r.fekete_ratio))
                     for r in rows]))


def cmd_converge_1d(cfg) -> None:
    if cfg["max_level"] < 0:
        raise UsageError("--max-level must be >= 0")
    rows = converge_1d(cfg["model"], cfg["rule"], int(cfg["max_level"]), cfg["growth"])
    _emit(cfg, _csv(("level", "N", "l2_error", "max_error", "quad_error", "max_surplus"),
                    [(r.level, r.N) + tuple(format_float(v) for v in
                                            (r.l2_error, r.max_error, r.quad_error, r.max_surplus))
                     for r in rows]))


def cmd_adaptive(cfg) -> None:
    if cfg["budget"] is None and not cfg["tol"]:
        raise UsageError("adaptive needs --budget and/or a positive --tol")
    kwargs = {}
    if cfg["sections"] is not None:
        if cfg["model"] != "resistor":
            raise UsageError("--sections only applies to the resistor model")
        kwargs["P"] = int(cfg["sections"])
    model = get_model(cfg["model"], **kwargs)
    config = AdaptiveConfig(budget=cfg["budget"], tol=cfg["tol"] or 0.0, rule=cfg["rule"],
                            growth=cfg["growth"], seed=int(cfg["seed"]))
    validation = None
    if cfg["samples"]:
        X = sample_inputs(model.specs, int(cfg["samples"]), int(cfg["seed"]))
        validation = (X, model(X))
    result = run_adaptive(model, config, validation=validation)
    refs = cfg["reference_mean"], cfg["reference_var"]
    header = list(LOG_FIELDS)
    rows = [row.cells() for row in result.log]
    if None not in refs:
        header += ["mean_error", "variance_error"]
        for cells, row in zip(rows, result.log):
            cells += [format_float(abs(row.mean - refs[0])), format_float(abs(row.variance - refs[1]))]
    path = _emit(cfg, _csv(header, rows))
    target = cfg["surrogate"]
    if target is None and path is not None:
        target = path.with_suffix(".json")
    if target is not None:
        Path(target).parent.mkdir(parents=True, exist_ok=True)
        Path(target).write_text(result.grid.to_json(indent=1, sort_keys=True) + "\n")


COMMANDS = {"gen": cmd_leja_gen, "verify-distribution": cmd_verify_distribution,
            "converge-1d": cmd_converge_1d, "adaptive": cmd_adaptive}


def _fail(kind: str, exc: BaseException, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "type": type(exc).__name__,
                                 "message": str(exc)}) + "\n")
    return code


def main(argv=None) -> int:
    try:
        cfg = resolve_config(argv)
        COMMANDS[cfg["command"]](cfg)
    except UsageError as exc:
        return _fail("usage", exc, 2)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except Exception as exc:
        return _fail("runtime", exc, 1)
    return 0


if __name__ == "__main__":
    sys.exit(main())
