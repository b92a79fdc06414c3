"""Command-line front end: ``hybrid-dicke {point,sweep,ed,figure}``.

Exit codes are 0 on success, 2 on usage errors and 1 on runtime failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .ed import FRAMES, EDConfig
from .errors import HybridDickeError, InvalidAxis
from .figures import FIGURE_NAMES, build_figure, run_ed_study, write_ed_study
from .model import ModelParams, lambda_from_chi
from .sweep import (
    AxisSpec,
    read_manifest,
    rerun_from_manifest,
    run_sweep,
    sweep_metadata,
    write_manifest,
    write_table,
)
from .thermo import solve_point


class UsageError(Exception):
    """Flag combination that parses but makes no sense; reported with exit 2."""


def _model_flags(parser: argparse.ArgumentParser, required: bool) -> None:
    defaults = {} if required else {"Omega": 1.0, "omega": 1.0, "alpha": 0.0, "g0": 0.0, "n": 0}
    g = parser.add_argument_group("model parameters")
    g.add_argument("--Omega", type=float, required=required, default=defaults.get("Omega"),
                   help="spin splitting")
    g.add_argument("--omega", type=float, required=required, default=defaults.get("omega"),
                   help="field frequency")
    coupling = g.add_mutually_exclusive_group(required=required)
    coupling.add_argument("--chi", type=float, help="dimensionless coupling 2 lambda / sqrt(Omega omega)")
    coupling.add_argument("--lambda", dest="lam", type=float, help="bare spin-field coupling")
    g.add_argument("--alpha", type=float, required=required, default=defaults.get("alpha"),
                   help="A^2-term strength")
    g.add_argument("--g0", type=float, required=required, default=defaults.get("g0"),
                   help="quadratic optomechanical coupling")
    g.add_argument("--n", type=int, required=required, default=defaults.get("n"),
                   help="photon number of the ancillary cavity")
    g.add_argument("--omega-c", dest="omega_c", type=float, default=1.0,
                   help="ancillary cavity frequency (constant energy shift only)")


def _ed_flags(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("exact diagonalization")
    g.add_argument("--fock-cutoff", type=int, help="initial boson cutoff (default: estimated)")
    g.add_argument("--max-cutoff", type=int, default=EDConfig.max_cutoff)
    g.add_argument("--cutoff-tol", type=float, default=EDConfig.cutoff_tol)
    g.add_argument("--cutoff-growth", type=float, default=EDConfig.cutoff_growth)
    g.add_argument("--eig-tol", type=float, default=EDConfig.eig_tol)
    g.add_argument("--dense-threshold", type=int, default=EDConfig.dense_threshold)
    g.add_argument("--frame", choices=FRAMES, default=EDConfig.frame)
    g.add_argument("--seed", type=int, default=EDConfig.seed)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hybrid-dicke",
        description="Dicke model with a photon-number-dependent quadratic field coupling.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    point = sub.add_parser("point", help="analytic solution at one parameter point (JSON)")
    _model_flags(point, required=True)
    point.add_argument("--N", type=int, help="spin count (recorded only)")

    sweep = sub.add_parser("sweep", help="1-D or 2-D parameter sweep to CSV")
    _model_flags(sweep, required=False)
    sweep.add_argument("--N", type=int, help="spin count, required by the ed backend")
    sweep.add_argument("--axis", action="append", default=[], metavar="NAME=START:STOP:COUNT",
                       help="grid axis over chi, lambda, g0 or N (repeat for 2-D)")
    sweep.add_argument("--backend", choices=("analytic", "ed"), default="analytic")
    sweep.add_argument("--manifest", type=Path, help="repeat the sweep described by this manifest")
    sweep.add_argument("--out", type=Path, required=True, help="output directory")
    sweep.add_argument("--workers", type=int, default=1)
    _ed_flags(sweep)

    ed = sub.add_parser("ed", help="finite-N order parameter against the analytic limit")
    _model_flags(ed, required=False)
    ed.add_argument("--N", type=int, action="append", required=True, help="spin count (repeatable)")
    ed.add_argument("--axis", required=True, metavar="chi=START:STOP:COUNT", help="coupling axis")
    ed.add_argument("--out", type=Path, required=True, help="output directory")
    ed.add_argument("--workers", type=int, default=1)
    _ed_flags(ed)

    fig = sub.add_parser("figure", help="regenerate the dataset behind a figure panel")
    fig.add_argument("name", choices=FIGURE_NAMES)
    fig.add_argument("--out", type=Path, required=True, help="output directory")
    fig.add_argument("--workers", type=int, default=1)
    return parser


def _params(args, N=None) -> ModelParams:
    lam = args.lam
    if args.chi is not None:
        lam = lambda_from_chi(args.chi, args.Omega, args.omega)
    return ModelParams(
        Omega=args.Omega, omega=args.omega, lam=0.0 if lam is None else lam,
        alpha=args.alpha, g0=args.g0, n=args.n, omega_c=args.omega_c, N=N,
    )


def _ed_config(args) -> EDConfig:
    return EDConfig(
        fock_cutoff=args.fock_cutoff,
        cutoff_growth=args.cutoff_growth,
        cutoff_tol=args.cutoff_tol,
        max_cutoff=args.max_cutoff,
        eig_tol=args.eig_tol,
        dense_threshold=args.dense_threshold,
        frame=args.frame,
        seed=args.seed,
    )


def cmd_point(args) -> int:
    point = solve_point(_params(args, args.N))
    print(json.dumps(point.as_dict(), sort_keys=True))
    return 0


def cmd_sweep(args) -> int:
    if args.manifest is not None:
        if args.axis:
            raise UsageError("--manifest and --axis are mutually exclusive")
        result = rerun_from_manifest(read_manifest(args.manifest), workers=args.workers)
    else:
        if not args.axis:
            raise UsageError("at least one --axis is required")
        axes = [AxisSpec.parse(a) for a in args.axis]
        backend = _ed_config(args) if args.backend == "ed" else "analytic"
        if args.backend == "ed" and args.N is None and "N" not in {a.name for a in axes}:
            raise UsageError("the ed backend needs --N or an N axis")
        result = run_sweep(_params(args, args.N), axes, backend, workers=args.workers)
    write_table(result, args.out / "sweep.csv")
    meta = sweep_metadata(result)
    meta["file"] = "sweep.csv"
    path = args.out / "manifest.json"
    write_manifest(meta, path)
    print(path)
    return 0


def cmd_ed(args) -> int:
    axis = AxisSpec.parse(args.axis)
    if axis.name != "chi":
        raise UsageError(f"the ed study runs over chi, got axis {axis.name!r}")
    if any(N < 1 for N in args.N):
        raise UsageError("--N must be positive")
    n_list = tuple(dict.fromkeys(args.N))
    cfg = _ed_config(args)
    study = run_ed_study(_params(args), axis, n_list, cfg, args.workers)
    manifest = write_ed_study(study, args.out, prefix="ed")
    manifest.update({
        "tool": "hybrid_dicke",
        "version": __version__,
        "N": list(n_list),
        "axes": [axis.as_dict()],
        "all_converged": all(s["all_converged"] for s in manifest["studies"]),
    })
    path = args.out / "manifest.json"
    write_manifest(manifest, path)
    print(path)
    return 0


def cmd_figure(args) -> int:
    print(build_figure(args.name, args.out, workers=args.workers))
    return 0


COMMANDS = {"point": cmd_point, "sweep": cmd_sweep, "ed": cmd_ed, "figure": cmd_figure}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "workers", 1) < 1:
        parser.error("--workers must be at least 1")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, InvalidAxis) as exc:
        parser.error(str(exc))
    except ValueError as exc:
        # parameter validation in ModelParams / EDConfig
        parser.error(str(exc))
    except (HybridDickeError, OSError) as exc:
        print(f"hybrid-dicke: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
