"""
main_tifs.py - Tiling IFS Command Line (Production-Ready)

Thin subcommand wrappers over the library:
validate -> omega -> tiles -> addresses -> attractor/chaos -> dimension
-> equiv -> inflate/deflate -> rigidity -> render

Exit status: 0 success, 1 validation failure, 2 usage error.
Results go to --out or standard output; diagnostics to standard error.
"""

import argparse
import sys

import numpy as np

import production_config
from production_config import (
    DEFAULT_CHAOS_POINTS, DEFAULT_RNG_SEED, EQUIVALENCE_BOUND,
    RENDER_DEPTH, RIGIDITY_DEPTH, RIGIDITY_TOLERANCE, NUMBER_FORMAT,
    load_system, log,
)
from tifs_core import (
    ConfigError, Inconclusive, TIFSError, TIFSValidation,
    hausdorff_dimension_osc, parse_word,
)
from symbolic_tiling import omega, omega_table
from attractor_geometry import attractor_deterministic, chaos_game, cloud_to_text
from tiling_engine import (
    canonical_tiling, realize_tile, sorted_tiles, tiling_of, tiling_to_text,
)
from address_system import absolute_addresses, relative_text
from tiling_dynamics import check_equivalence, deflate, inflate, neighbor_map_check
from renderers import render_ppm, render_svg, spec_for_cloud, spec_for_tiling

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2


# ============================================================================
# ARGUMENTS
# ============================================================================
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="system JSON file or fixture name (BIN, FIB, SIER, GD2)")
    common.add_argument("--out", help="output file (default: standard output)")
    common.add_argument("--verbose", action="store_true", help="INFO diagnostics on standard error")

    parser = argparse.ArgumentParser(prog="tifs", description="Tiling iterated function systems")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("validate", parents=[common], help="check a system description")

    p = sub.add_parser("omega", parents=[common], help="list Omega_k")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--root", type=int)
    p.add_argument("--details", action="store_true", help="also print xi and prototile letter")

    p = sub.add_parser("tiles", parents=[common], help="dump a canonical or blow-up tiling")
    _add_tiling_choice(p)
    p.add_argument("--depth", type=int, help="append each tile's realized bounding box")

    p = sub.add_parser("addresses", parents=[common], help="relative and absolute addresses of Pi(theta)")
    p.add_argument("--theta", required=True)

    p = sub.add_parser("attractor", parents=[common], help="deterministic point cloud")
    p.add_argument("--depth", type=int, required=True)

    p = sub.add_parser("chaos", parents=[common], help="chaos-game point cloud")
    p.add_argument("--points", type=int, default=DEFAULT_CHAOS_POINTS)
    p.add_argument("--seed", type=int, default=DEFAULT_RNG_SEED)

    sub.add_parser("dimension", parents=[common], help="similarity dimension")

    p = sub.add_parser("equiv", parents=[common], help="search an equivalence witness")
    p.add_argument("--theta", required=True)
    p.add_argument("--psi", required=True)
    p.add_argument("--bound", type=int, default=EQUIVALENCE_BOUND)
    p.add_argument("--common-tail", action="store_true",
                   help="theta and psi continue with one shared unknown tail")

    for name in ("inflate", "deflate"):
        p = sub.add_parser(name, parents=[common], help=f"{name} the canonical tiling T_k")
        p.add_argument("-k", "--level", dest="k", type=int, required=True)
        p.add_argument("--root", type=int)

    p = sub.add_parser("rigidity", parents=[common], help="local-rigidity heuristic")
    p.add_argument("--depth", type=int, default=RIGIDITY_DEPTH)
    p.add_argument("--tolerance", type=float, default=RIGIDITY_TOLERANCE)

    p = sub.add_parser("render", parents=[common], help="SVG tiling or PPM attractor")
    choice = p.add_mutually_exclusive_group(required=True)
    choice.add_argument("--theta")
    choice.add_argument("-k", type=int)
    choice.add_argument("--cloud", choices=("chaos", "deterministic"))
    p.add_argument("--root", type=int)
    p.add_argument("--depth", type=int, default=RENDER_DEPTH)
    p.add_argument("--points", type=int, default=DEFAULT_CHAOS_POINTS)
    p.add_argument("--seed", type=int, default=DEFAULT_RNG_SEED)

    return parser


def _add_tiling_choice(p: argparse.ArgumentParser):
    choice = p.add_mutually_exclusive_group(required=True)
    choice.add_argument("--theta", help="reversed word for Pi(theta) ('∅' for the empty word)")
    choice.add_argument("-k", type=int, help="canonical level")
    p.add_argument("--root", type=int)


def _tiling_from_args(t, args):
    if args.theta is not None:
        return tiling_of(t, parse_word(args.theta, t.N), args.root)
    return canonical_tiling(t, args.k, args.root)


def _emit(args, payload):
    if args.out:
        mode = "wb" if isinstance(payload, bytes) else "w"
        with open(args.out, mode, **({} if mode == "wb" else {"encoding": "utf-8"})) as f:
            f.write(payload)
        log("tifs", f"OK wrote {args.out}")
    elif isinstance(payload, bytes):
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()
    else:
        sys.stdout.write(payload)


def _lines(lines) -> str:
    return "".join(f"{line}\n" for line in lines)


# ============================================================================
# SUBCOMMANDS
# ============================================================================
def cmd_validate(t, args):
    lines = [f"OK {t.name or 'system'}: M={t.M} s={t.s_text} N={t.N} V={t.V} a_max={t.a_max}"]
    lines.extend(f"WARN {note}" for note in t.warnings)
    return _lines(lines)


def cmd_omega(t, args):
    if args.details:
        return _lines(omega_table(t, args.k, args.root))
    return _lines(str(w) for w in omega(t, args.k, args.root))


def cmd_tiles(t, args):
    tiling = _tiling_from_args(t, args)
    if args.depth is None:
        return tiling_to_text(t, tiling)

    lines = []
    for line, tile in zip(tiling_to_text(t, tiling).splitlines(), sorted_tiles(t, tiling)):
        cloud = realize_tile(t, tile, args.depth)
        box = " ".join(format(float(c), NUMBER_FORMAT) for c in np.concatenate([cloud.min(axis=0), cloud.max(axis=0)]))
        lines.append(f"{line} | {box}")
    return _lines(lines)


def cmd_addresses(t, args):
    theta = parse_word(args.theta, t.N)
    tiling = tiling_of(t, theta)
    lines = []
    for tile in sorted_tiles(t, tiling):
        absolute = min(absolute_addresses(t, tile, theta))
        lines.append(f"{relative_text(tile.body)} {absolute}")
    return _lines(lines)


def cmd_attractor(t, args):
    return cloud_to_text(attractor_deterministic(t, args.depth))


def cmd_chaos(t, args):
    return cloud_to_text(chaos_game(t, args.points, rng_seed=args.seed))


def cmd_dimension(t, args):
    return f"{hausdorff_dimension_osc(t):.10f}\n"


def cmd_equiv(t, args):
    theta = parse_word(args.theta, t.N)
    psi = parse_word(args.psi, t.N)
    try:
        witness = check_equivalence(t, theta, psi, args.bound, common_tail=args.common_tail)
    except Inconclusive as e:
        return f"inconclusive: {e}\n"
    return f"equivalent {witness.describe()}\n"


def cmd_inflate(t, args):
    return tiling_to_text(t, inflate(t, canonical_tiling(t, args.k, args.root)))


def cmd_deflate(t, args):
    return tiling_to_text(t, deflate(t, canonical_tiling(t, args.k, args.root)))


def cmd_rigidity(t, args):
    report = neighbor_map_check(t, args.depth, args.tolerance)
    lines = [f"locally rigid: {report.passes} ({report.status}, {report.candidates} candidates)"]
    for w in report.witnesses:
        lines.append(f"witness vertex={w.vertex} shared={w.shared_tiles} E: {w.E.describe()}")
    return _lines(lines)


def cmd_render(t, args):
    if args.cloud is not None:
        if args.cloud == "chaos":
            cloud = chaos_game(t, args.points, rng_seed=args.seed)
        else:
            cloud = attractor_deterministic(t, args.depth)
        return render_ppm(t, cloud, spec_for_cloud(t, cloud))

    tiling = _tiling_from_args(t, args)
    return render_svg(t, tiling, spec_for_tiling(t, tiling, args.depth))


COMMANDS = {
    "validate": cmd_validate,
    "omega": cmd_omega,
    "tiles": cmd_tiles,
    "addresses": cmd_addresses,
    "attractor": cmd_attractor,
    "chaos": cmd_chaos,
    "dimension": cmd_dimension,
    "equiv": cmd_equiv,
    "inflate": cmd_inflate,
    "deflate": cmd_deflate,
    "rigidity": cmd_rigidity,
    "render": cmd_render,
}


def main(argv=None) -> int:
    """Entry point; returns the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    production_config.set_verbose(args.verbose)

    try:
        t = load_system(args.config)
        _emit(args, COMMANDS[args.command](t, args))
        return EXIT_OK

    except (TIFSValidation, ConfigError) as e:
        log("tifs", f"{type(e).__name__}: {e}", level="ERROR")
        return EXIT_INVALID

    except (TIFSError, ValueError) as e:
        log("tifs", f"{type(e).__name__}: {e}", level="ERROR")
        return EXIT_USAGE

    except OSError as e:
        log("tifs", f"cannot write output: {e}", level="ERROR")
        return EXIT_USAGE

    except KeyboardInterrupt:
        log("tifs", "Stopped by user", level="WARN")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
