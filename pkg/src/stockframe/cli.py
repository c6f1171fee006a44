"""Command-line driver: ``stockframe <subcommand> [flags]``.

Exit codes are 0 for success or a passed check, 1 for a checked failure
(including a bandwidth violation) and 2 for usage or configuration errors.
Every number written to a file or stdout uses 17 significant digits.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .admissibility import (
    CheckConfig,
    ConfigError,
    check_norm_admissibility,
    check_seminorm_admissibility,
    check_sufficient,
)
from .frame import BandwidthError, FrameIndex, FrameSpec, analyze, fmt, gram
from .partition import FrequencyPartition, validate_admissible
from .sobolev import (
    band_limited_family,
    FrameElementSignal,
    GaussianSignal,
    ZeroSignal,
    coefficient_energy,
    default_family,
    dilation_family,
    estimate_frame_bounds,
    gaussian_mixture_family,
    scan_nu,
    seminorm_energy,
    sobolev_norm_sq,
    sobolev_seminorm_sq,
)
from .window import Window, tensor

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    args: argparse.Namespace
    out: Path | None
    seed: int


def dumps(obj, indent=0):
    """Deterministic JSON with every float written by :func:`fmt`."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[" + ", ".join(dumps(v, indent + 1) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else json.dumps(str(float(obj)))
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def _emit(cfg, name, text):
    if not text.endswith("\n"):
        text += "\n"
    if cfg.out is not None:
        cfg.out.mkdir(parents=True, exist_ok=True)
        with open(cfg.out / name, "w", newline="\n") as fh:
            fh.write(text)
    sys.stdout.write(text)


def _partition(args):
    if args.jmax is None or args.jmax < 0:
        raise UsageError("--jmax must be a nonnegative integer")
    return FrequencyPartition(args.partition, args.jmax)


def _window(args, dimension):
    data = {"kind": args.window}
    if args.n is not None:
        data["n"] = args.n
    w = Window.from_json(data)
    if dimension == 2 and w.dimension == 1:
        w = tensor(w, w)
    return w


def _spec(cfg):
    a = cfg.args
    if a.spec is not None:
        path = Path(a.spec)
        if not path.exists():
            raise UsageError(f"spec file {path} does not exist")
        data = json.loads(path.read_text())
        spec = FrameSpec.from_json(data)
    else:
        part = _partition(a)
        spec = FrameSpec(
            part,
            _window(a, part.dimension),
            nu=a.nu,
            s=a.s,
            normalization=a.normalization,
            seminorm_mode=a.seminorm,
            j_neg=a.j_neg,
            lambda_max=a.lambda_max,
        )
    over = {}
    if a.grid_points is not None:
        over["points"] = a.grid_points
    if a.omega_max is not None:
        over["omega_max"] = a.omega_max
    if over:
        spec = spec.replace(**over)
    g = spec.grid
    if g.omega_max < 2.0 ** (spec.partition.j_max + 1) or g.spacing > 0.5:
        raise UsageError("grid too coarse for this partition (need spacing <= 1/2)")
    return spec


def _parse_key(text):
    text = text.strip()
    if text == "bullet":
        return ("bullet",)
    j, k = text.split(",")
    k = k.strip()
    return (int(j), int(k) if k.lstrip("-").isdigit() else k)


def _signal(cfg, spec):
    a = cfg.args
    d = spec.dimension
    if a.signal == "zero":
        return ZeroSignal(d)
    if a.signal == "gaussian":
        t0 = tuple([a.t0] * d)
        w0 = tuple([a.w0] * d)
        return GaussianSignal(a.a, t0, w0, 1.0, "gaussian")
    if a.signal == "element":
        if a.element is None:
            raise UsageError("--signal element needs --element 'j,k,lambda'")
        parts = [p.strip() for p in a.element.split(",")]
        if parts[0] == "bullet":
            key, lam = ("bullet",), parts[1:]
        else:
            key, lam = _parse_key(",".join(parts[:2])), parts[2:]
        if len(lam) != d:
            raise UsageError("--element needs one translation per dimension")
        idx = FrameIndex(key, tuple(float(x) for x in lam))
        try:
            spec.band(key)
        except KeyError as exc:
            raise UsageError(str(exc)) from exc
        return FrameElementSignal(spec, idx)
    raise UsageError(f"unknown signal {a.signal!r}")


def _family(cfg, spec):
    a = cfg.args
    if a.family == "default":
        return default_family(cfg.seed)
    if a.family == "dilation":
        return dilation_family()
    if a.family == "mixture":
        return gaussian_mixture_family(a.count, cfg.seed)
    if a.family == "bandlimited":
        return band_limited_family(spec.partition, a.count, cfg.seed)
    raise UsageError(f"unknown family {a.family!r}")


def cmd_validate_partition(cfg):
    part = _partition(cfg.args)
    report = validate_admissible(part, spacing=cfg.args.spacing)
    body = {"partition": part.to_json(), **report.to_json()}
    _emit(cfg, "partition_report.json", dumps(body))
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_check_window(cfg):
    a = cfg.args
    ccfg = CheckConfig(spacing=a.spacing, j_neg=a.j_neg)
    if a.mode == "sufficient":
        report = check_sufficient(_window(a, 1), a.s, ccfg)
    else:
        part = _partition(a)
        w = _window(a, part.dimension)
        fn = check_norm_admissibility if a.mode == "norm" else check_seminorm_admissibility
        report = fn(w, part, a.s, ccfg)
    _emit(cfg, "check_report.json", dumps(report.to_json()))
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_analyze(cfg):
    spec = _spec(cfg)
    sig = _signal(cfg, spec)
    try:
        table = analyze(spec, sig)
    except BandwidthError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAIL
    _emit(cfg, "coefficients.csv", table.to_csv())
    if spec.seminorm_mode:
        energy = seminorm_energy(table, spec.s)
        ref = sobolev_seminorm_sq(sig, spec.s, spec.grid) if sig.energy() > 0 else 0.0
    else:
        energy = coefficient_energy(table, spec.s)
        ref = sobolev_norm_sq(sig, spec.s, spec.grid) if sig.energy() > 0 else 0.0
    summary = {"spec": spec.to_json(), "signal": getattr(sig, "signal_id", ""),
               "coefficient_energy": energy, "reference_norm_sq": ref,
               "truncation_estimate": table.truncation_estimate()}
    text = dumps(summary) + "\n"
    if cfg.out is not None:
        with open(cfg.out / "summary.json", "w", newline="\n") as fh:
            fh.write(text)
    sys.stderr.write(f"coefficient_energy={fmt(energy)} reference_norm_sq={fmt(ref)}\n")
    return EXIT_OK


def cmd_frame_bounds(cfg):
    spec = _spec(cfg)
    family = _family(cfg, spec)
    try:
        if cfg.args.scan_nu:
            try:
                nus = [float(x) for x in cfg.args.scan_nu.split(",") if x.strip()]
            except ValueError as exc:
                raise UsageError(f"bad --scan-nu list: {exc}") from exc
            rows = scan_nu(spec, family, spec.s, nus)
            text = "nu,A_hat,B_hat,ratio\n" + "".join(
                f"{fmt(r.nu)},{fmt(r.A_hat)},{fmt(r.B_hat)},{fmt(r.ratio)}\n" for r in rows
            )
            _emit(cfg, "scan.csv", text)
            return EXIT_OK
        est = estimate_frame_bounds(spec, family)
    except BandwidthError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAIL
    _emit(cfg, "ratios.csv", est.to_csv())
    summary = {"spec": spec.to_json(), "A_hat": est.A_hat, "B_hat": est.B_hat, "ratio": est.ratio,
               "seminorm": est.seminorm, "count": len(est.ratios)}
    if cfg.out is not None:
        with open(cfg.out / "bounds.json", "w", newline="\n") as fh:
            fh.write(dumps(summary) + "\n")
    sys.stderr.write(f"A_hat={fmt(est.A_hat)} B_hat={fmt(est.B_hat)}\n")
    return EXIT_OK


def cmd_orthonormality(cfg):
    spec = _spec(cfg)
    a = cfg.args
    keys = None
    if a.bands is not None:
        keys = {_parse_key(t) for t in a.bands.split(";") if t.strip()}
    if a.lmax < 0:
        raise UsageError("--lmax must be nonnegative")
    idx = spec.indices(keys=keys, lmax=a.lmax)
    if not idx:
        raise UsageError("index selection is empty")
    G = gram(spec, idx)
    dev = float(np.max(np.abs(G - np.eye(len(idx)))))
    body = {"spec": spec.to_json(), "count": len(idx), "max_deviation": dev}
    _emit(cfg, "gram_report.json", dumps(body))
    return EXIT_OK


def _add_spec_flags(p, window="gaussian", nu=1.0, jmax=3):
    p.add_argument("--partition", choices=["dyadic1d", "polar2d"], default="dyadic1d")
    p.add_argument("--jmax", type=int, default=jmax)
    p.add_argument("--window", default=window,
                   choices=["gaussian", "sinc", "sinc_pow", "boxcar", "bspline_freq"])
    p.add_argument("--n", type=int, default=None, help="order for sinc_pow and bspline_freq")
    p.add_argument("--nu", type=float, default=nu)
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--normalization", choices=["exact", "dyadic"], default="exact")
    p.add_argument("--seminorm", action="store_true")
    p.add_argument("--j-neg", type=int, default=6)
    p.add_argument("--lambda-max", type=float, default=16.0)


def build_parser():
    glob = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    glob.add_argument("--spec", default=None, help="FrameSpec JSON file")
    glob.add_argument("--out", default=None, help="output directory")
    glob.add_argument("--grid-points", type=int, default=None)
    glob.add_argument("--omega-max", type=float, default=None)
    glob.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="stockframe", allow_abbrev=False)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, help):
        return sub.add_parser(name, parents=[glob], help=help, allow_abbrev=False)


    p = add("validate", "validate a frequency partition")
    p.add_argument("--partition", choices=["dyadic1d", "polar2d"], default="dyadic1d")
    p.add_argument("--jmax", type=int, default=6)
    p.add_argument("--spacing", type=float, default=1.0 / 64)

    p = add("check", "check window admissibility")
    p.add_argument("--partition", choices=["dyadic1d", "polar2d"], default="dyadic1d")
    p.add_argument("--jmax", type=int, default=6)
    p.add_argument("--window", required=True,
                   choices=["gaussian", "sinc", "sinc_pow", "boxcar", "bspline_freq"])
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--mode", choices=["norm", "seminorm", "sufficient"], default="norm")
    p.add_argument("--spacing", type=float, default=1.0 / 64)
    p.add_argument("--j-neg", type=int, default=6)

    p = add("analyze", "frame coefficients of one signal")
    _add_spec_flags(p)
    p.add_argument("--signal", choices=["gaussian", "element", "zero"], default="gaussian")
    p.add_argument("--a", type=float, default=1.0, help="gaussian dilation")
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--w0", type=float, default=0.0)
    p.add_argument("--element", default=None, help="frame index 'j,k,lambda' or 'bullet,lambda'")

    p = add("frame-bounds", "estimate frame bounds over a family")
    _add_spec_flags(p, nu=0.25)
    p.add_argument("--family", choices=["default", "dilation", "mixture", "bandlimited"], default="default")
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--scan-nu", default=None, help="comma-separated nu values")

    p = add("orthonormality", "Gram deviation from the identity")
    _add_spec_flags(p, window="sinc", nu=1.0, jmax=4)
    p.add_argument("--lmax", type=int, default=8)
    p.add_argument("--bands", default=None, help="';'-separated band keys such as '0,+;1,-;bullet'")
    return parser


COMMANDS = {
    "validate": cmd_validate_partition,
    "check": cmd_check_window,
    "analyze": cmd_analyze,
    "frame-bounds": cmd_frame_bounds,
    "orthonormality": cmd_orthonormality,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_CONFIG
    cfg = RunConfig(args.subcommand, args, Path(args.out) if args.out else None, args.seed)
    try:
        return COMMANDS[args.subcommand](cfg)
    except (UsageError, ConfigError, ValueError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
