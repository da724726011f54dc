"""Command-line front end: ``spinlab <subcommand> ...``.

Exit codes: 0 success, 1 a checked condition fails, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import gstruct as gs
from . import spin7
from .algebra import JacobiError, MetricLieAlgebra, family
from .dirac import FrameError, assemble_dirac_squared, kernel
from .forms import DimensionError, Form, chop, render
from .parsing import ParseError, parse_expr
from .scan import (SCHEMA, clean_json, dirac_matrix, parse_range, scan_grid, thread_count,
                   verify_paper)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Bad command-line input; reported with exit code 2."""


# input handling

def _bindings(pairs: list[str] | None) -> dict[str, float]:
    out = {}
    for item in pairs or []:
        name, sep, expr = item.partition("=")
        if not sep or not name.strip():
            raise InputError(f"--param expects name=value, got {item!r}")
        out[name.strip()] = parse_expr(expr)
    return out


def load_algebra(args, check: bool = True) -> MetricLieAlgebra:
    """The algebra named by exactly one of: inline Salamon string, file path, --family."""
    params = _bindings(getattr(args, "param", None))
    source = getattr(args, "input", None)
    fam = getattr(args, "family", None)
    if (source is None) == (fam is None):
        raise InputError("give exactly one input: a Salamon string, a file path or --family")
    if fam is not None:
        try:
            pf = family(fam)
        except KeyError as exc:
            raise InputError(str(exc.args[0])) from None
        try:
            return pf.instantiate(params, check=check)
        except (KeyError, ValueError) as exc:
            if isinstance(exc, JacobiError):
                raise
            raise InputError(str(exc)) from None
    if source.lstrip().startswith("("):
        return MetricLieAlgebra.from_salamon(source, params, check=check)
    path = Path(source)
    if not path.is_file():
        raise InputError(f"no such file: {source} (inline structure equations start with '(')")
    return MetricLieAlgebra.from_text(path.read_text(), params, name=path.stem, check=check)


def _unit_vector(text: str, N: int) -> np.ndarray:
    try:
        vec = np.array([parse_expr(t) for t in text.split(",")], dtype=float)
    except ParseError as exc:
        raise InputError(f"--vector: {exc}") from None
    if vec.shape != (N,):
        raise InputError(f"--vector needs {N} components, got {vec.size}")
    if abs(np.linalg.norm(vec) - 1.0) > gs.UNIT_TOL:
        raise InputError(f"--vector is not unit (norm {np.linalg.norm(vec):.12g})")
    return vec


def select_spinor(args, alg: MetricLieAlgebra, N: int, default_basis: bool = False
                  ) -> tuple[np.ndarray, str]:
    """Spinor from --spinor k (basis spinor phi_k), --vector, --kernel k, or the first kernel vector."""
    chosen = [x for x in (args.spinor, args.vector, args.kernel) if x is not None]
    if len(chosen) > 1:
        raise InputError("give at most one of --spinor, --vector, --kernel")
    if args.spinor is not None:
        if not 1 <= args.spinor <= N:
            raise InputError(f"--spinor must lie in 1..{N}")
        eta = np.zeros(N)
        eta[args.spinor - 1] = 1.0
        return eta, f"phi{args.spinor}"
    if args.vector is not None:
        return _unit_vector(args.vector, N), "vector"
    k = kernel(dirac_matrix(alg), args.tol)
    index = args.kernel or 1
    if k.kernel_dim >= index:
        eta = k.kernel_basis[:, index - 1]
        return eta / np.linalg.norm(eta), f"kernel[{index}]"
    if args.kernel is not None:
        raise InputError(f"--kernel {index} but the kernel has dimension {k.kernel_dim}")
    if default_basis:
        eta = np.zeros(N)
        eta[0] = 1.0
        return eta, "phi1"
    raise InputError("the Dirac kernel is empty; choose a spinor with --spinor or --vector")


def form_json(f: Form) -> dict[str, float]:
    return {"e" + "".join(map(str, idx)): c for idx, c in sorted(chop(f).terms.items())}


def show(f: Form) -> str:
    return render(chop(f))


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(clean_json({"schema": SCHEMA, **payload}), indent=2))
    else:
        print("\n".join(lines))


def _fmt(x: float) -> str:
    return f"{x:.12g}"


# subcommands

def cmd_algebra(args) -> int:
    alg = load_algebra(args, check=False)
    residuals = alg.jacobi_residuals()
    worst = max(residuals.values(), default=0.0)
    ok = worst <= 1e-10
    payload = {"dim": alg.dim, "salamon": alg.to_salamon(), "orientation": alg.orientation,
               "jacobi": ok, "jacobi_residual": worst, "nilpotent_frame": alg.is_nilpotent_frame,
               "abelian": alg.is_abelian,
               "differentials": [form_json(d) for d in alg.differentials]}
    lines = [alg.render(), f"dim {alg.dim}", f"jacobi: {'ok' if ok else 'FAILS'} ({_fmt(worst)})",
             f"nilpotent frame: {alg.is_nilpotent_frame}", f"abelian: {alg.is_abelian}"]
    _emit(args, payload, lines)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_dirac(args) -> int:
    alg = load_algebra(args)
    M = assemble_dirac_squared(alg) if args.squared else dirac_matrix(alg)
    rep = kernel(M, args.tol)
    payload = {"dim": alg.dim, "N": M.N, "squared": args.squared, "source": M.source,
               "scale": "16 D^2" if args.squared else "4 D",
               "kernel_dim": rep.kernel_dim, "spectrum_kind":
               "singular values" if rep.singular else "eigenvalues",
               "spectrum": sorted(rep.eigenvalues.tolist())}
    lines = [f"{payload['scale']} on {M.N}-dim spinors ({M.source})",
             f"kernel_dim: {rep.kernel_dim}"]
    if args.spectrum or not args.kernel:
        lines.append(f"{payload['spectrum_kind']}: "
                     + " ".join(_fmt(x) for x in payload["spectrum"]))
    if args.kernel:
        payload["kernel"] = [v.tolist() for v in rep.kernel_vectors()]
        lines += ["  " + " ".join(_fmt(x) for x in v) for v in rep.kernel_vectors()]
    if args.matrix:
        payload["matrix"] = M.matrix.tolist()
        lines += ["  " + " ".join(f"{x:9.4g}" for x in row) for row in M.matrix]
    _emit(args, payload, lines)
    if args.expect_kernel and rep.kernel_dim == 0:
        return EXIT_FAIL
    return EXIT_OK


def cmd_invariants(args) -> int:
    alg = load_algebra(args)
    if not alg.is_nilpotent_frame:
        raise InputError("invariants need structure equations in a nilpotent frame")
    if alg.dim == 5:
        inv = gs.mu_v(alg)
        harmonic = inv.is_harmonic(args.tol)
        payload = {"dim": 5, "mu": inv.mu, "v": inv.v.tolist(), "v_norm": inv.v_norm,
                   "harmonic": harmonic}
        lines = [f"mu = {_fmt(inv.mu)}", "v = (" + ", ".join(_fmt(x) for x in inv.v) + ")",
                 f"|v| = {_fmt(inv.v_norm)}", f"harmonic spinors: {harmonic}"]
    elif alg.dim == 6:
        inv = gs.mu_gamma(alg)
        payload = {"dim": 6, "mu": inv.mu, "gamma": form_json(inv.gamma)}
        lines = [f"mu = {_fmt(inv.mu)}", f"gamma = {show(inv.gamma)}"]
    else:
        raise InputError("invariants are defined in dimensions 5 and 6")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_structure(args) -> int:
    alg = load_algebra(args)
    kind = "su3" if args.su3 else "su2"
    need = 6 if kind == "su3" else 5
    if alg.dim != need:
        raise InputError(f"--{kind} needs a {need}-dimensional algebra")
    N = 8
    eta, source = select_spinor(args, alg, N)
    dirac_residual = float(np.abs(dirac_matrix(alg).matrix @ eta).max())
    payload = {"dim": alg.dim, "structure": kind, "spinor": source, "eta": eta.tolist(),
               "dirac_residual": dirac_residual}
    lines = [f"spinor {source}, |4D eta|_max = {_fmt(dirac_residual)}"]
    status = EXIT_OK
    if kind == "su3":
        s3 = gs.su3_from_spinor(eta)
        payload.update(omega=form_json(s3.omega), theta_plus=form_json(s3.theta_plus))
        lines += [f"omega = {show(s3.omega)}", f"Theta+ = {show(s3.theta_plus)}"]
        _emit(args, payload, lines)
        return status
    s = gs.su2_from_spinor(eta)
    payload.update(alpha=form_json(s.alpha), omega=[form_json(w) for w in s.omega],
                   compatibility=s.compatibility_residuals())
    lines += [f"alpha = {show(s.alpha)}"]
    lines += [f"omega{k + 1} = {show(w)}" for k, w in enumerate(s.omega)]
    if args.torsion:
        t = gs.su2_torsion(alg, s)
        payload["torsion"] = {
            "tau0": list(t.tau0), "tau0_kl": t.tau0_kl.tolist(),
            "tau1": [form_json(f) for f in t.tau1], "tau2": [form_json(f) for f in t.tau2],
            "nonzero": t.nonzero(args.tol), "residual": t.residual}
        lines.append("nonzero torsion: " + (", ".join(t.nonzero(args.tol)) or "none"))
        for k, f in enumerate(t.tau2):
            if f.norm() > args.tol:
                lines.append(f"tau2^{k + 1} = {show(f)}")
        for k, f in enumerate(t.tau1):
            if f.norm() > args.tol:
                lines.append(f"tau1^{k + 1} = {show(f)}")
    if args.hypo:
        hypo = gs.is_hypo(alg, s)
        payload["hypo"] = hypo
        lines.append(f"hypo: {hypo}")
        if not hypo:
            status = EXIT_FAIL
    _emit(args, payload, lines)
    return status


def cmd_lift(args) -> int:
    alg = load_algebra(args)
    if not 4 <= alg.dim <= 7:
        raise InputError("lifts are defined for algebras of dimension 4 to 7")
    if args.torus is not None and alg.dim + args.torus != 8:
        raise InputError(f"a torus of dimension {args.torus} does not reach dimension 8")
    N = spin7.intertwiner(alg.dim).shape[1]
    eta, source = select_spinor(args, alg, N, default_basis=True)
    data = spin7.lift_structure(alg, eta, args.tol)
    payload = {"dim": alg.dim, "torus": 8 - alg.dim, "spinor": source,
               "tau1_norm": data.tau1_norm, "d_omega_norm": data.d_omega.norm(),
               "balanced": data.balanced, "parallel": data.parallel,
               "tau1": form_json(data.tau1),
               "normalization": spin7.normalization_residuals(data.omega4),
               "residuals": data.residuals()}
    lines = [f"lift of a {alg.dim}-dim algebra by T^{8 - alg.dim}, spinor {source}",
             f"|tau1| = {_fmt(data.tau1_norm)}", f"|d Omega| = {_fmt(data.d_omega.norm())}",
             f"balanced: {data.balanced}", f"parallel: {data.parallel}"]
    _emit(args, payload, lines)
    if args.check_balanced and not data.balanced:
        return EXIT_FAIL
    return EXIT_OK


def cmd_scan(args) -> int:
    try:
        pf = family(args.family)
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from None
    try:
        ranges = dict(parse_range(r) for r in args.range or [])
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if not ranges:
        raise InputError("give at least one --range name=lo:hi")
    fixed = _bindings(args.param)
    try:
        res = scan_grid(pf, ranges, args.steps, args.tol, fixed, thread_count(args.threads),
                        args.nonzero_margin)
    except (KeyError, ValueError) as exc:
        raise InputError(str(exc.args[0])) from None
    payload = {**res.to_dict(),
               "hit_list": [{"binding": dict(h.binding), "kernel_dim": h.kernel_dim,
                             "min_abs": h.min_abs} for h in res.hits]}
    lines = [f"{res.family}: {res.points} points, {res.skipped} skipped, {len(res.hits)} hits",
             f"min singular value off the hits: {_fmt(res.min_singular)}"]
    lines += ["  " + ", ".join(f"{k}={_fmt(v)}" for k, v in h.binding)
              + f"  kernel_dim={h.kernel_dim}" for h in res.hits[:args.show]]
    if len(res.hits) > args.show:
        lines.append(f"  ... {len(res.hits) - args.show} more")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_verify_paper(args) -> int:
    try:
        report = verify_paper(args.seed, args.claim, args.timing)
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from None
    ok = all(c.passed for c in report.claims) if args.claim else report.passed
    if args.json:
        print(report.to_json())
    else:
        for c in report.claims:
            tag = "" if c.reading == "as-stated" else f" [{c.reading}]"
            crit = f"c{c.criterion}" if c.criterion else "  -"
            print(f"{c.status.upper():4s} {crit:>4s} {c.id}{tag}")
        n_fail = sum(not c.passed for c in report.claims if c.reading == "as-stated")
        print(f"{len(report.claims)} records, {n_fail} as-stated failures")
        if report.elapsed_ms is not None:
            print(f"elapsed {report.elapsed_ms:.0f} ms")
    return EXIT_OK if ok else EXIT_FAIL


# parser

def _add_input(p, allow_family: bool = True) -> None:
    p.add_argument("input", nargs="?", help="inline structure equations '(0,0,12,...)' or a file")
    if allow_family:
        p.add_argument("--family", help="catalog family name, e.g. N5,6")
    p.add_argument("--param", action="append", metavar="NAME=VALUE",
                   help="parameter binding (repeatable)")


def _add_spinor(p) -> None:
    p.add_argument("--spinor", type=int, metavar="K", help="basis spinor phi_K (1-based)")
    p.add_argument("--vector", metavar="C1,C2,...", help="explicit unit spinor")
    p.add_argument("--kernel", type=int, metavar="K", help="K-th Dirac kernel basis vector")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinlab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=fn)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    p = add("algebra", cmd_algebra, "parse and validate structure equations")
    _add_input(p)
    p.add_argument("--check", action="store_true", help="check the Jacobi identity (always on)")

    p = add("dirac", cmd_dirac, "Dirac matrix, spectrum and kernel")
    _add_input(p)
    p.add_argument("--squared", action="store_true", help="use 16 D^2 instead of 4 D")
    p.add_argument("--spectrum", action="store_true")
    p.add_argument("--kernel", action="store_true", help="print a kernel basis")
    p.add_argument("--matrix", action="store_true")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--expect-kernel", action="store_true", help="exit 1 if the kernel is empty")

    p = add("invariants", cmd_invariants, "(mu, v) in dim 5 or (mu, gamma) in dim 6")
    _add_input(p)
    p.add_argument("--tol", type=float, default=1e-9)

    p = add("structure", cmd_structure, "G-structure induced by a spinor")
    _add_input(p)
    _add_spinor(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--su2", action="store_true", help="SU(2) structure (dim 5, default)")
    g.add_argument("--su3", action="store_true", help="SU(3) forms (dim 6)")
    p.add_argument("--torsion", action="store_true")
    p.add_argument("--hypo", action="store_true", help="exit 1 unless the structure is hypo")
    p.add_argument("--tol", type=float, default=1e-9)

    p = add("lift", cmd_lift, "Spin(7) structure on the product with a flat torus")
    _add_input(p)
    _add_spinor(p)
    p.add_argument("--torus", type=int, help="torus dimension (must equal 8 - n)")
    p.add_argument("--check-balanced", action="store_true", help="exit 1 unless balanced")
    p.add_argument("--tol", type=float, default=1e-8)

    p = add("scan", cmd_scan, "grid scan of a family for harmonic spinors")
    p.add_argument("family")
    p.add_argument("--range", action="append", metavar="NAME=LO:HI")
    p.add_argument("--param", action="append", metavar="NAME=VALUE", help="fixed parameter")
    p.add_argument("--steps", type=int, default=41)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--nonzero-margin", type=float, default=0.0)
    p.add_argument("--threads", type=int)
    p.add_argument("--show", type=int, default=20, help="hits listed in text mode")

    p = add("verify-paper", cmd_verify_paper, "run the reproduction suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--claim", help="run a single claim id")
    p.add_argument("--timing", action="store_true", help="record elapsed_ms")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except JacobiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL if args.command == "algebra" else EXIT_INPUT
    except (InputError, ParseError, DimensionError, FrameError, gs.SpinorError,
            spin7.LiftError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
