"""Command-line front end.

Exit codes: 0 success, 2 bad input or arguments, 3 internal solver failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import render
from .chainlp import LpConfig, alternate_optimum, flat_norm_lp
from .complex import BinarySet, ComplexError, build_complex
from .dualform import complementary_slackness_report, dual_flat_norm, extract_X, x_as_chain
from .formats import (FormatError, read_chain, read_pbm, write_chain, write_pbm,
                      write_ppm, write_report)
from .mincut import MincutConfig, SolverError, l1tv_denoise
from .shapes import distance_matrix, lambda_sweep, shape_distance, write_distance_matrix


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    subcommand: str
    inputs: list[Path]
    out: Path
    lambdas: list[float]
    connectivity: int = 4
    method: str = ""
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        self.inputs = [Path(p).resolve() for p in self.inputs]
        self.out = Path(self.out).resolve()

    def output(self, name: str) -> Path:
        path = self.out / name
        if path in self.inputs:
            raise UsageError(f"refusing to overwrite input file {path}")
        return path


def _positive(text: str) -> float:
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not val > 0:
        raise argparse.ArgumentTypeError(f"lambda must be positive, got {text}")
    return val


def _lambda_list(text: str) -> list[float]:
    return [_positive(t) for t in text.split(",") if t.strip()]


def _load_set(path: Path) -> BinarySet:
    mask = read_pbm(path)
    h, w = mask.shape
    return BinarySet.from_mask(build_complex(2, (w, h)), mask)


def _load_any(path: Path):
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic == b"P1":
        return _load_set(path)
    return read_chain(path)


def _decomposition_fields(dec) -> dict:
    return {
        "lambda": dec.lam,
        "value": dec.value,
        "mass_s": dec.mass_s,
        "mass_t_minus_ds": dec.mass_t_minus_ds,
        "gap": dec.gap,
        "solver": dec.solver,
    }


def _write_renderings(dec, man: RunManifest, stem: str) -> None:
    cx = dec.t.complex
    if cx.dimension != 2 or dec.t.degree != 1:
        return
    write_ppm(render.decomposition_rgb(dec), man.output(f"{stem}.ppm"))
    render.save_decomposition_figure(dec, man.output(f"{stem}.png"))


def cmd_denoise(args) -> None:
    man = RunManifest("denoise", [args.image], args.out, [args.lam], args.connectivity)
    omega = _load_set(man.inputs[0])
    dec = l1tv_denoise(omega, MincutConfig(args.lam, args.connectivity))
    man.out.mkdir(parents=True, exist_ok=True)
    write_pbm(dec.sigma.to_mask(), man.output("sigma.pbm"))
    _write_renderings(dec, man, "decomposition")
    with open(man.output("report.txt"), "w", encoding="ascii", newline="\n") as fh:
        fields = _decomposition_fields(dec)
        fields["connectivity"] = args.connectivity
        fields["omega_size"] = len(omega)
        fields["sigma_size"] = len(dec.sigma)
        write_report(fields, fh)


def cmd_flatnorm(args) -> None:
    man = RunManifest("flatnorm", [args.chain], args.out, [args.lam], method=args.method,
                      tolerances={"gap": args.gap_tol})
    t = read_chain(man.inputs[0])
    if t.degree + 1 > t.complex.dimension:
        raise UsageError(f"degree-{t.degree} chain in {t.complex.dimension}D: nothing to fill with")
    config = LpConfig(args.lam, args.gap_tol)
    dec = flat_norm_lp(t, config)
    man.out.mkdir(parents=True, exist_ok=True)
    write_chain(dec.s_chain, man.output("s.fc"))
    write_chain(dec.t_minus_ds, man.output("residual.fc"))
    fields = _decomposition_fields(dec)
    fields["mass_t"] = sum(abs(c) for _, c in t.items())
    fields["support_s"] = len(dec.s_chain)
    extra_lines: list[str] = []
    if args.method in ("dual", "both"):
        phi, dual_value = dual_flat_norm(t, args.lam, args.gap_tol)
        x = extract_X(phi, args.lam)
        write_chain(phi.as_chain(), man.output("phi.fc"))
        write_chain(x_as_chain(phi, x), man.output("x.fc"))
        fields["dual_value"] = dual_value
        fields["dual_gap"] = abs(dual_value - dec.value)
        fields["x_size"] = len(x)
        fields["support_in_x"] = dec.s_chain.support() <= x
        fields["x_strictly_contains_support"] = dec.s_chain.support() < x
        if args.method == "both":
            rep = complementary_slackness_report(dec, phi)
            extra_lines = rep.lines()
            with open(man.output("slackness.txt"), "w", encoding="ascii", newline="\n") as fh:
                fh.write("\n".join(extra_lines) + "\n")
    if args.alternate:
        low, high = alternate_optimum(t, config, dec.value)
        write_chain(high.s_chain, man.output("s_alt.fc"))
        fields["alternate_support_differs"] = low.s_chain.support() != high.s_chain.support()
    if dec.info.get("degenerate_lambda"):
        fields["degenerate_lambda"] = 1
    _write_renderings(dec, man, "decomposition")
    with open(man.output("report.txt"), "w", encoding="ascii", newline="\n") as fh:
        write_report(fields, fh)
        for ln in extra_lines:
            fh.write(ln + "\n")


def cmd_distance(args) -> None:
    man = RunManifest("distance", args.images, args.out, [args.lam], method=args.method)
    if len(man.inputs) < 2:
        raise UsageError("distance needs at least two images")
    shapes = [_load_set(p) for p in man.inputs]
    for s in shapes[1:]:
        if s.complex != shapes[0].complex:
            raise UsageError("images have different sizes")
    man.out.mkdir(parents=True, exist_ok=True)
    dec = shape_distance(shapes[0], shapes[1], args.lam, args.method)
    _write_renderings(dec, man, "decomposition")
    write_chain(dec.s_chain, man.output("s.fc"))
    write_chain(dec.t_minus_ds, man.output("residual.fc"))
    with open(man.output("report.txt"), "w", encoding="ascii", newline="\n") as fh:
        fields = _decomposition_fields(dec)
        fields["distance"] = dec.value
        write_report(fields, fh)
    if len(shapes) > 2:
        mat = distance_matrix(shapes, args.lam, args.method, jobs=args.jobs)
        write_distance_matrix(mat, [p.stem for p in man.inputs], man.output("distances.csv"))


def cmd_sweep(args) -> None:
    lambdas = args.lambdas
    if any(b <= a for a, b in zip(lambdas, lambdas[1:])):
        raise UsageError("--lambdas must be strictly ascending")
    man = RunManifest("sweep", [args.input], args.out, lambdas, args.connectivity, args.method)
    item = _load_any(man.inputs[0])
    method = args.method or ("mincut" if isinstance(item, BinarySet) else "lp")
    sig, decs = lambda_sweep(item, lambdas, method, args.connectivity, jobs=args.jobs)
    man.out.mkdir(parents=True, exist_ok=True)
    sig.to_csv(man.output("signature.csv"))
    render.save_sweep_figure(sig, man.output("signature.png"))
    for i, dec in enumerate(decs):
        cx = dec.t.complex
        if cx.dimension == 2 and dec.t.degree == 1:
            write_ppm(render.decomposition_rgb(dec), man.output(f"decomposition_{i:03d}.ppm"))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="flatnorm", description="Flat norm decompositions of discretized currents.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("denoise", help="binary L1TV by min-cut on a PBM image")
    d.add_argument("image")
    d.add_argument("--lambda", dest="lam", type=_positive, required=True)
    d.add_argument("--connectivity", type=int, choices=(4, 8, 16), default=4)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_denoise)

    f = sub.add_parser("flatnorm", help="flat norm of a FLATCHAIN file by LP")
    f.add_argument("chain")
    f.add_argument("--lambda", dest="lam", type=_positive, default=1.0)
    f.add_argument("--method", choices=("lp", "dual", "both"), default="lp")
    f.add_argument("--gap-tol", type=_positive, default=1e-9)
    f.add_argument("--alternate", action="store_true",
                   help="re-solve with perturbed costs to expose non-unique optima")
    f.add_argument("--out", required=True)
    f.set_defaults(func=cmd_flatnorm)

    s = sub.add_parser("distance", help="flat norm distance between PBM shapes")
    s.add_argument("images", nargs="+")
    s.add_argument("--lambda", dest="lam", type=_positive, required=True)
    s.add_argument("--method", choices=("mincut", "lp"), default="mincut")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_distance)

    w = sub.add_parser("sweep", help="multiscale signature over a lambda list")
    w.add_argument("input", help="PBM image or FLATCHAIN file")
    w.add_argument("--lambdas", type=_lambda_list, required=True)
    w.add_argument("--method", choices=("mincut", "lp"), default=None)
    w.add_argument("--connectivity", type=int, choices=(4, 8, 16), default=4)
    w.add_argument("--jobs", type=int, default=1)
    w.add_argument("--out", required=True)
    w.set_defaults(func=cmd_sweep)
    return p


def main(argv: list[str] | None = None) -> int:
    os.environ.get("FLATNORM_SEED")  # reserved; solvers are deterministic
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (UsageError, FormatError, ComplexError, ValueError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"flatnorm: error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"flatnorm: solver failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
