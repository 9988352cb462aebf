"""Command-line front end: ``torus-wigner <subcommand> ...``.

Exit status is 0 on success, 2 on usage errors and 1 when a computation fails.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import check_dimension, fourier, phase_point_op, phase_point_relations_check
from .evolution import (
    UndefinedInterference,
    apply_classical_map,
    parse_map_spec,
    z_matrix,
)
from .grover import GroverConfig, default_steps, floor_steps, run_grover
from .render import COLOR_MAPS, write_pgm
from .states import make_state, parse_state_spec, random_density_matrix, random_pure_state
from .tomography import GENERATOR_ID, measure_wigner_point, scattering_circuit, wigner_tomography
from .wigner import (
    LineSpec,
    format_grid_csv,
    inner_product,
    line_projector,
    line_sum,
    purity_residual,
    read_grid_csv,
    state_from_wigner,
    wigner_of,
    write_grid_csv,
)


class UsageError(Exception):
    pass


def _int_pair(text: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two integers 'a,b', got {text!r}") from None
    return a, b


def _state(text: str):
    try:
        return parse_state_spec(text)
    except (ValueError, OSError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("scale must be positive")
    return v


def _add_dimension(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--n", type=int, help="Hilbert space dimension N (even)")
    g.add_argument("--qubits", type=int, help="number of qubits L, meaning N = 2^L")


def _add_pgm(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pgm", help="also write a PGM image of the grid here")
    p.add_argument("--cmap", choices=COLOR_MAPS, default="sign")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="torus-wigner", description="Discrete Wigner functions on the 2N x 2N torus.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: $WIGNER_THREADS, else all cores)")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("wigner", help="Wigner grid of a state as CSV")
    _add_dimension(p)
    p.add_argument("--state", type=_state, required=True)
    p.add_argument("--out", help="CSV path (default: stdout)")
    _add_pgm(p)

    p = sub.add_parser("evolve", help="propagate a state and compare with the classical map")
    _add_dimension(p)
    p.add_argument("--state", type=_state, required=True)
    p.add_argument("--map", dest="map_spec", required=True,
                   help="trans:q,p | refl:q,p | ft | cat:a,b | perm:@file | halfft | shift:a")
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--out", help="CSV path for the final grid (default: stdout)")
    _add_pgm(p)

    p = sub.add_parser("lines", help="line sums (marginals) of a state's Wigner grid")
    _add_dimension(p)
    p.add_argument("--state", type=_state, required=True)
    p.add_argument("--family", choices=("position", "momentum"), default="position")
    p.add_argument("--line", type=str, help="single line n1,n2,n3: print its sum and projector dimension")

    p = sub.add_parser("grover", help="Grover trajectory as per-step grids")
    _add_dimension(p)
    p.add_argument("--marked", type=int, required=True)
    p.add_argument("--momentum", type=int, default=0)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--pgm", action="store_true", help="also write one PGM per step")
    p.add_argument("--cmap", choices=COLOR_MAPS, default="sign")

    p = sub.add_parser("tomo", help="simulate the scattering measurement of one W(alpha)")
    _add_dimension(p)
    p.add_argument("--state", type=_state, required=True)
    p.add_argument("--point", type=_int_pair, required=True)
    p.add_argument("--shots", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("tomo-full", help="simulate tomography of the whole grid")
    _add_dimension(p)
    p.add_argument("--state", type=_state, required=True)
    p.add_argument("--shots", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="CSV path for the estimated grid")
    p.add_argument("--meta", help="metadata path (default: meta.json next to --out)")
    _add_pgm(p)

    p = sub.add_parser("render", help="render a grid CSV as PGM")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--map", dest="cmap", choices=COLOR_MAPS, default="sign")
    p.add_argument("--scale", type=_positive, default=None, help="fixed max |W| (default: auto)")

    p = sub.add_parser("zmatrix", help="Z superoperator of a map")
    _add_dimension(p)
    p.add_argument("--map", dest="map_spec", required=True)
    p.add_argument("--out", help="CSV of nonzero entries (default: stdout)")
    p.add_argument("--tol", type=float, default=1e-12, help="entries below this are omitted")

    p = sub.add_parser("check", help="run the invariant self-test")
    _add_dimension(p)
    return parser


def _dimension(args) -> int:
    if args.qubits is not None:
        if not 1 <= args.qubits <= 8:
            raise UsageError(f"--qubits must be in 1..8, got {args.qubits}")
        return 2**args.qubits
    try:
        return check_dimension(args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _workers(args) -> int:
    if args.threads is not None:
        if args.threads < 1:
            raise UsageError("--threads must be positive")
        return args.threads
    env = os.environ.get("WIGNER_THREADS")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise UsageError(f"WIGNER_THREADS must be an integer, got {env!r}") from None
        if value >= 1:
            return value
    return os.cpu_count() or 1


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _map(args, n):
    try:
        return parse_map_spec(args.map_spec, n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_wigner(args) -> int:
    n = _dimension(args)
    grid = wigner_of(make_state(n, args.state))
    _emit(format_grid_csv(grid), args.out)
    if args.pgm:
        write_pgm(grid, args.pgm, args.cmap)
    return 0


def cmd_evolve(args) -> int:
    n = _dimension(args)
    if args.steps < 0:
        raise UsageError("--steps must be non-negative")
    u, cmap = _map(args, n)
    rho = make_state(n, args.state)
    grid = wigner_of(rho)
    classical = grid
    defined = cmap is not None
    for _ in range(args.steps):
        rho = u @ rho @ u.conj().T
        if defined:
            try:
                classical = apply_classical_map(classical, cmap)
            except UndefinedInterference:
                defined = False
    quantum = wigner_of(rho)
    _emit(format_grid_csv(quantum), args.out)
    if args.pgm:
        write_pgm(quantum, args.pgm, args.cmap)
    if defined:
        dev = float(np.abs(quantum.values - classical.values).max())
        print(f"classical_deviation,{dev:.6e}", file=sys.stderr if not args.out else sys.stdout)
    else:
        print("classical_deviation,undefined", file=sys.stderr if not args.out else sys.stdout)
    return 0


def cmd_lines(args) -> int:
    n = _dimension(args)
    rho = make_state(n, args.state)
    grid = wigner_of(rho)
    if args.line:
        try:
            n1, n2, n3 = (int(x) for x in args.line.split(","))
        except ValueError:
            raise UsageError(f"--line expects n1,n2,n3, got {args.line!r}") from None
        line = LineSpec(n1, n2, n3)
        _, dim = line_projector(n, line)
        print("n1,n2,n3,sum,dimension")
        print(f"{n1},{n2},{n3},{line_sum(grid, line):.17g},{dim}")
        return 0
    if args.family == "position":
        probs = np.diag(rho).real
        lines = [LineSpec.vertical(q) for q in range(2 * n)]
    else:
        ft = fourier(n)
        probs = np.diag(ft.conj().T @ rho @ ft).real
        lines = [LineSpec.horizontal(p) for p in range(2 * n)]
    print("index,line_sum,probability")
    for j, line in enumerate(lines):
        expected = probs[j // 2] if j % 2 == 0 else 0.0
        print(f"{j},{line_sum(grid, line):.17g},{expected:.17g}")
    return 0


def cmd_grover(args) -> int:
    n = _dimension(args)
    try:
        cfg = GroverConfig(n, args.marked, args.momentum)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.steps is not None and args.steps < 0:
        raise UsageError("--steps must be non-negative")
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    frames = run_grover(cfg, args.steps)
    width = len(str(len(frames) - 1))
    rows = ["step,success_probability"]
    for fr in frames:
        stem = f"step_{fr.step:0{width}d}"
        write_grid_csv(fr.wigner, out / f"{stem}.csv")
        if args.pgm:
            write_pgm(fr.wigner, out / f"{stem}.pgm", args.cmap)
        rows.append(f"{fr.step},{fr.success_probability:.17g}")
    (out / "summary.csv").write_text("\n".join(rows) + "\n")
    print(f"steps_round,{default_steps(n)}")
    print(f"steps_floor,{floor_steps(n)}")
    print(f"steps_run,{len(frames) - 1}")
    print(f"final_success_probability,{frames[-1].success_probability:.10f}")
    return 0


def cmd_tomo(args) -> int:
    n = _dimension(args)
    if args.shots < 0:
        raise UsageError("--shots must be non-negative")
    rho = make_state(n, args.state)
    est, err = measure_wigner_point(rho, args.point, args.shots, args.seed)
    exact, _ = measure_wigner_point(rho, args.point, 0)
    print("W_estimate,stderr,W_exact")
    print(f"{est:.17g},{err:.17g},{exact:.17g}")
    return 0


def cmd_tomo_full(args) -> int:
    n = _dimension(args)
    if args.shots < 0:
        raise UsageError("--shots must be non-negative")
    rho = make_state(n, args.state)
    grid = wigner_tomography(rho, args.shots, args.seed, workers=_workers(args))
    write_grid_csv(grid, args.out)
    if args.pgm:
        write_pgm(grid, args.pgm, args.cmap)
    meta_path = Path(args.meta) if args.meta else Path(args.out).with_name("meta.json")
    meta = {
        "command": "tomo-full",
        "seed": args.seed,
        "shots": args.shots,
        "generator": GENERATOR_ID,
        "version": __version__,
    }
    meta_path.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")
    return 0


def cmd_render(args) -> int:
    grid = read_grid_csv(args.input)
    write_pgm(grid, args.out, args.cmap, args.scale)
    return 0


def cmd_zmatrix(args) -> int:
    n = _dimension(args)
    u, _ = _map(args, n)
    z = z_matrix(u, workers=_workers(args)).entries
    side = 2 * n
    rows = ["alpha_q,alpha_p,beta_q,beta_p,z"]
    for a, b in zip(*np.nonzero(np.abs(z) > args.tol)):
        rows.append(f"{a // side},{a % side},{b // side},{b % side},{z[a, b]:.17g}")
    _emit("\n".join(rows) + "\n", args.out)
    density = (len(rows) - 1) / z.size
    print(f"nonzero_fraction,{density:.6f}", file=sys.stderr if not args.out else sys.stdout)
    return 0


def self_test(n: int, seed: int = 0) -> list[tuple[str, bool]]:
    """Invariant checks at dimension ``n``; returns (name, passed) pairs."""
    rng = np.random.default_rng(seed)
    results = []
    results.append(("phase-point relations", phase_point_relations_check(n)))
    traces = [np.trace(phase_point_op(n, (q, p))).real for q in range(2 * n) for p in range(2 * n)]
    expected = [1 / n if q % 2 == 0 and p % 2 == 0 else 0.0 for q in range(2 * n) for p in range(2 * n)]
    results.append(("trace pattern", bool(np.allclose(traces, expected, atol=1e-12, rtol=0))))
    rho = random_density_matrix(n, rng)
    grid = wigner_of(rho)
    results.append(("reconstruction", bool(np.abs(state_from_wigner(grid) - rho).max() < 1e-10)))
    rho2 = random_density_matrix(n, rng)
    overlap = np.trace(rho @ rho2).real
    results.append(("inner product", abs(inner_product(grid, wigner_of(rho2)) - overlap) < 1e-10))
    ok = True
    for q in range(2 * n):
        expected = rho[q // 2, q // 2].real if q % 2 == 0 else 0.0
        ok &= abs(line_sum(grid, LineSpec.vertical(q)) - expected) < 1e-10
    results.append(("position marginals", bool(ok)))
    if n <= 8:
        pure_grid = wigner_of(random_pure_state(n, rng))
        results.append(("purity constraint", purity_residual(pure_grid) < 1e-10))
    u = 2 * n * phase_point_op(n, (1, 1))
    try:
        scattering_circuit(rho, u)
        results.append(("scattering identity", True))
    except RuntimeError:
        results.append(("scattering identity", False))
    return results


def cmd_check(args) -> int:
    n = _dimension(args)
    results = self_test(n)
    for name, passed in results:
        print(f"{name}: {'PASS' if passed else 'FAIL'}")
    ok = all(p for _, p in results)
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


COMMANDS = {
    "wigner": cmd_wigner,
    "evolve": cmd_evolve,
    "lines": cmd_lines,
    "grover": cmd_grover,
    "tomo": cmd_tomo,
    "tomo-full": cmd_tomo_full,
    "render": cmd_render,
    "zmatrix": cmd_zmatrix,
    "check": cmd_check,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"torus-wigner: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"torus-wigner: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
