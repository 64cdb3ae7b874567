"""Command-line front end.

One subcommand per pipeline stage; reports are JSON (default) or flat CSV,
written to stdout or --out.  All numeric output is full double precision and
byte-identical across runs for the same configuration.  Exit codes: 0 on
success (and all inequality checks holding), 1 on validation/inequality/
operation failure, 2 on usage errors (unknown command, unreadable file, bad
parameters).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass

from . import fileio
from .complex import validate
from .energy import energy, energy_ratio, fourier_energy, fourier_relabel
from .errors import CobsigError
from .generators import gen_annular_shell, gen_rectangle, gen_square
from .signalops import NoiseSpec, apply_noise, compose, extract_filter
from .verify import (check_composition, check_thm1_bounds, eps_sweep,
                     grid_oracle, refinement_study)

USAGE_ERROR = 2
OPERATION_ERROR = 1


@dataclass
class RunConfig:
    """Validated invocation: command, paths, numeric parameters, format."""

    command: str
    args: argparse.Namespace
    threads: int

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        threads = int(os.environ.get("COBSIG_THREADS", "0")) or os.cpu_count() or 1
        cfg = cls(command=args.command, args=args, threads=threads)
        cfg.check()
        return cfg

    def check(self) -> None:
        a = self.args
        if getattr(a, "resolution", None) is not None and a.resolution < 2:
            raise UsageError("resolution must be at least 2")
        if getattr(a, "eps", None) is not None:
            values = _parse_eps(a.eps)
            if any(not 0 < e < 1 for e in values):
                raise UsageError("eps values must lie in (0, 1)")
            if sorted(values, reverse=True) != values:
                raise UsageError("eps values must be strictly descending")
        if getattr(a, "delta0", None) is not None and getattr(a, "delta", None) is not None:
            if not 0 < a.delta0 < a.delta:
                raise UsageError("need 0 < delta0 < delta")


class UsageError(Exception):
    pass


def _parse_eps(text: str) -> list:
    return [float(x) for x in text.split(",") if x.strip()]


def _emit(payload, args) -> None:
    if getattr(args, "format", "json") == "csv":
        text = _to_csv(payload)
    else:
        text = json.dumps(payload, indent=2) + "\n"
    out = getattr(args, "report_out", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _flatten(prefix: str, obj, row: dict) -> None:
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)):
                _flatten(f"{prefix}{k}.", v, row)
            else:
                row[prefix + k] = v
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            if isinstance(v, (dict, list)):
                _flatten(f"{prefix}{i}.", v, row)
            else:
                row[f"{prefix}{i}"] = v


def _to_csv(payload) -> str:
    # one row per case: reports with a "rows" list expand, others emit one row
    if isinstance(payload, dict) and isinstance(payload.get("rows"), list):
        rows = []
        for r in payload["rows"]:
            flat = {}
            _flatten("", r, flat)
            rows.append(flat)
    else:
        flat = {}
        _flatten("", payload, flat)
        rows = [flat]
    if not rows:
        return ""
    fields = list(rows[0].keys())
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, extrasaction="ignore")
    writer.writeheader()
    for r in rows:
        writer.writerow(r)
    return buf.getvalue()


def _load(path):
    if not os.path.exists(path):
        raise UsageError(f"cannot read {path}")
    return fileio.load_signal(path)


# -- subcommand implementations ---------------------------------------------


def cmd_generate(cfg: RunConfig) -> int:
    a = cfg.args
    if a.kind == "square":
        sig = gen_square(a.resolution)
    elif a.kind == "rectangle":
        sig = gen_rectangle(a.width, a.height, a.resolution)
    elif a.kind == "annular_shell":
        sig = gen_annular_shell(a.r0, a.r1, a.height, a.resolution)
    else:
        raise UsageError(f"unknown kind {a.kind!r}")
    fileio.save_signal(sig, a.out)
    return 0


def cmd_validate(cfg: RunConfig) -> int:
    if not os.path.exists(cfg.args.path):
        raise UsageError(f"cannot read {cfg.args.path}")
    try:
        data = json.loads(open(cfg.args.path).read())
        sig_report = validate(fileio.signal_from_dict(data).complex)
    except CobsigError as exc:
        # structurally unbuildable counts as failed validation, not usage
        _emit({"ok": False, "violations": [["unbuildable", str(exc)]]}, cfg.args)
        return OPERATION_ERROR
    _emit(sig_report.to_dict(), cfg.args)
    return 0 if sig_report.ok else OPERATION_ERROR


def _energy_payload(sig, steiner_level: int) -> dict:
    return {
        "E": energy(sig, steiner_level),
        "EF": fourier_energy(sig, steiner_level),
        "ratio": energy_ratio(sig, steiner_level),
        "steiner_level": steiner_level,
        "resolution": sig.hints.get("resolution"),
    }


def cmd_energy(cfg: RunConfig) -> int:
    sig = _load(cfg.args.path)
    _emit(_energy_payload(sig, cfg.args.steiner_level), cfg.args)
    return 0


def cmd_fourier(cfg: RunConfig) -> int:
    sig = fourier_relabel(_load(cfg.args.path))
    if cfg.args.transformed_out:
        fileio.save_signal(sig, cfg.args.transformed_out)
    _emit(_energy_payload(sig, cfg.args.steiner_level), cfg.args)
    return 0


def cmd_noise(cfg: RunConfig) -> int:
    a = cfg.args
    sig = _load(a.path)
    spec = NoiseSpec(a.center_vertex, a.delta0, a.delta, a.epsilon)
    noisy = apply_noise(sig, spec, a.steiner_level)
    fileio.save_signal(noisy, a.out)
    _emit(_energy_payload(noisy, a.steiner_level), a)
    return 0


def cmd_filter(cfg: RunConfig) -> int:
    a = cfg.args
    sig = _load(a.path)
    if not os.path.exists(a.keep):
        raise UsageError(f"cannot read {a.keep}")
    keep_spec = fileio.load_keep_spec(a.keep)
    kept = fileio.kept_simplices_from_spec(sig, keep_spec)
    filt = extract_filter(sig, kept)
    fileio.save_signal(filt, a.out)
    _emit(_energy_payload(filt, a.steiner_level), a)
    return 0


def cmd_compose(cfg: RunConfig) -> int:
    a = cfg.args
    left = _load(a.left)
    right = _load(a.right)
    if not os.path.exists(a.corr):
        raise UsageError(f"cannot read {a.corr}")
    corr = fileio.load_correspondence(a.corr)
    glued = compose(left, right, corr)
    fileio.save_signal(glued, a.out)
    _emit(_energy_payload(glued, a.steiner_level), a)
    return 0


def cmd_verify_thm1(cfg: RunConfig) -> int:
    sig = _load(cfg.args.path)
    report = check_thm1_bounds(sig, cfg.args.steiner_level)
    _emit(report.to_dict(), cfg.args)
    return 0 if report.holds else OPERATION_ERROR


def cmd_verify_thm2(cfg: RunConfig) -> int:
    a = cfg.args
    left = _load(a.left)
    right = _load(a.right)
    if not os.path.exists(a.corr):
        raise UsageError(f"cannot read {a.corr}")
    corr = fileio.load_correspondence(a.corr)
    report = check_composition(left, right, corr, a.steiner_level)
    _emit(report.to_dict(), a)
    return 0 if report.holds else OPERATION_ERROR


def cmd_sweep_eps(cfg: RunConfig) -> int:
    a = cfg.args
    sig = _load(a.path)
    spec = NoiseSpec(a.center_vertex, a.delta0, a.delta, 0.5)
    report = eps_sweep(sig, spec, _parse_eps(a.eps), a.steiner_level)
    _emit(report.to_dict(), a)
    return 0


def cmd_refine_study(cfg: RunConfig) -> int:
    a = cfg.args
    params = {"width": a.width, "height": a.height, "r0": a.r0, "r1": a.r1}
    resolutions = [int(x) for x in a.resolutions.split(",")]
    report = refinement_study(a.kind, params, resolutions, a.steiner_level,
                              a.oracle_resolution)
    _emit(report.to_dict(), a)
    return 0


def cmd_oracle(cfg: RunConfig) -> int:
    a = cfg.args
    params = {"width": a.width, "height": a.height, "r0": a.r0, "r1": a.r1}
    _emit(grid_oracle(a.kind, params, a.fine_resolution), a)
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "validate": cmd_validate,
    "energy": cmd_energy,
    "fourier": cmd_fourier,
    "noise": cmd_noise,
    "filter": cmd_filter,
    "compose": cmd_compose,
    "verify-thm1": cmd_verify_thm1,
    "verify-thm2": cmd_verify_thm2,
    "sweep-eps": cmd_sweep_eps,
    "refine-study": cmd_refine_study,
    "oracle": cmd_oracle,
}


def _add_common(p, steiner=True):
    if steiner:
        p.add_argument("--steiner-level", type=int, default=2,
                       help="edge refinement level for distance fields")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", dest="report_out",
                   help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cobsig",
        description="Cobordism signals: generate meshes, compute geodesic "
                    "energies, apply noise/filters/composition, and check "
                    "the energy inequalities.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a canonical instance to a mesh file")
    p.add_argument("--kind", required=True,
                   choices=("square", "rectangle", "annular_shell"))
    p.add_argument("--resolution", type=int, required=True)
    p.add_argument("--width", type=float, default=1.0)
    p.add_argument("--height", type=float, default=1.0)
    p.add_argument("--r0", type=float, default=1.0)
    p.add_argument("--r1", type=float, default=1.2)
    p.add_argument("--out", required=True)

    p = sub.add_parser("validate", help="run the labeling/orientation invariants")
    p.add_argument("path")
    _add_common(p, steiner=False)

    p = sub.add_parser("energy",
                       help="energy, transformed energy, and their ratio")
    p.add_argument("path")
    _add_common(p)

    p = sub.add_parser("fourier",
                       help="exchange the region roles (X,Y)<->(A,B) and "
                            "report the relabeled energies")
    p.add_argument("path")
    p.add_argument("--transformed-out", help="write the relabeled mesh here")
    _add_common(p)

    p = sub.add_parser("noise", help="apply a local conformal deformation")
    p.add_argument("path")
    p.add_argument("--center-vertex", type=int, required=True)
    p.add_argument("--delta0", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--out", required=True, help="deformed mesh file")
    p.add_argument("--steiner-level", type=int, default=2)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("filter", help="extract a sub-signal keeping all of A")
    p.add_argument("path")
    p.add_argument("--keep", required=True,
                   help="JSON predicate file: {'simplices': [...]} or "
                        "{'axis': k, 'min': ..., 'max': ...}")
    p.add_argument("--out", required=True, help="filtered mesh file")
    p.add_argument("--steiner-level", type=int, default=2)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("compose", help="glue left Y to right X along a "
                                       "correspondence file")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--corr", required=True)
    p.add_argument("--out", required=True, help="glued mesh file")
    p.add_argument("--steiner-level", type=int, default=2)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("verify-thm1",
                       help="check the two-sided bound on the energy ratio "
                            "from volumes, diameters, and injectivity radii")
    p.add_argument("path")
    _add_common(p)

    p = sub.add_parser("verify-thm2",
                       help="check sub-additivity of energy and growth of the "
                            "transformed energy under composition")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--corr", required=True)
    _add_common(p)

    p = sub.add_parser("sweep-eps",
                       help="noise-modulation expansion: measured ratio vs "
                            "(beta/gamma)(1 + C eps^(d/2)) across depths")
    p.add_argument("path")
    p.add_argument("--center-vertex", type=int, required=True)
    p.add_argument("--delta0", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--eps", required=True,
                   help="comma-separated descending values in (0,1)")
    _add_common(p)

    p = sub.add_parser("refine-study",
                       help="energies across resolutions against the "
                            "midpoint-rule oracle")
    p.add_argument("--kind", required=True,
                   choices=("square", "rectangle", "annular_shell"))
    p.add_argument("--resolutions", required=True)
    p.add_argument("--width", type=float, default=1.0)
    p.add_argument("--height", type=float, default=1.0)
    p.add_argument("--r0", type=float, default=1.0)
    p.add_argument("--r1", type=float, default=1.2)
    p.add_argument("--oracle-resolution", type=int, default=1024)
    _add_common(p)

    p = sub.add_parser("oracle",
                       help="independent midpoint-rule quadrature of the "
                            "closed-form distance fields")
    p.add_argument("--kind", required=True,
                   choices=("square", "rectangle", "annular_shell",
                            "rectangle_split_A"))
    p.add_argument("--fine-resolution", type=int, default=1024)
    p.add_argument("--width", type=float, default=1.0)
    p.add_argument("--height", type=float, default=1.0)
    p.add_argument("--r0", type=float, default=1.0)
    p.add_argument("--r1", type=float, default=1.2)
    _add_common(p, steiner=False)

    return ap


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        cfg = RunConfig.from_args(args)
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except CobsigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return OPERATION_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return OPERATION_ERROR


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
