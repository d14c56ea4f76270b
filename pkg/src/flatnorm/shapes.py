"""Flat norm shape distances and multiscale lambda sweeps."""

from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .chainlp import LpConfig, flat_norm_lp
from .complex import BinarySet, Chain, ComplexError, boundary_of_set
from .formats import format_number
from .mincut import Decomposition, MincutConfig, l1tv_denoise

METHODS = ("mincut", "lp")


def _solve(item, lam: float, method: str, connectivity: int = 4) -> Decomposition:
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    if isinstance(item, BinarySet):
        if method == "mincut":
            return l1tv_denoise(item, MincutConfig(lam, connectivity))
        return flat_norm_lp(boundary_of_set(item), LpConfig(lam))
    if method == "mincut":
        raise ValueError("chain inputs need method='lp'")
    return flat_norm_lp(item, LpConfig(lam))


def shape_distance(omega1: BinarySet, omega2: BinarySet, lam: float, method: str = "mincut") -> Decomposition:
    """Flat norm decomposition of ``d(Omega1 ^ Omega2)`` at scale ``lam``."""
    if omega1.complex != omega2.complex:
        raise ComplexError("shapes live on different complexes")
    return _solve(omega1.symmetric_difference(omega2), lam, method)


def chain_distance(t1: Chain, t2: Chain, lam: float) -> Decomposition:
    """``F_lam(T1 - T2)`` by the chain LP; works for non-boundary chains."""
    return flat_norm_lp(t1 - t2, LpConfig(lam))


@dataclass(frozen=True)
class SweepRow:
    lam: float
    value: float
    mass_s: float
    mass_t_minus_ds: float


class SweepSignature(list):
    """Rows of ``(lambda, value, mass_s, mass_t_minus_ds)``, lambda ascending."""

    def is_monotone(self, tol: float = 1e-9) -> bool:
        return all(b.value >= a.value - tol for a, b in zip(self, self[1:]))

    def is_concave(self, tol: float = 1e-9) -> bool:
        # second divided differences on a possibly uneven lambda grid
        for a, b, c in zip(self, self[1:], self[2:]):
            left = (b.value - a.value) / (b.lam - a.lam)
            right = (c.value - b.value) / (c.lam - b.lam)
            if right - left > tol:
                return False
        return True

    def to_csv(self, path: str | os.PathLike) -> None:
        with open(path, "w", newline="", encoding="ascii") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["lambda", "value", "mass_s", "mass_t_minus_ds"])
            for r in self:
                w.writerow([format_number(r.lam), format_number(r.value),
                            format_number(r.mass_s), format_number(r.mass_t_minus_ds)])

    @classmethod
    def from_csv(cls, path: str | os.PathLike) -> "SweepSignature":
        with open(path, newline="", encoding="ascii") as fh:
            rows = list(csv.DictReader(fh))
        return cls(SweepRow(float(r["lambda"]), float(r["value"]), float(r["mass_s"]),
                            float(r["mass_t_minus_ds"])) for r in rows)


def _check_lambdas(lambdas: Sequence[float]) -> list[float]:
    lambdas = [float(x) for x in lambdas]
    if not lambdas:
        raise ValueError("empty lambda list")
    if any(x <= 0 for x in lambdas):
        raise ValueError("lambda values must be positive")
    if any(b <= a for a, b in zip(lambdas, lambdas[1:])):
        raise ValueError("lambda values must be strictly ascending")
    return lambdas


def _sweep_one(args):
    item, lam, method, connectivity = args
    return _solve(item, lam, method, connectivity)


def lambda_sweep(item, lambdas: Sequence[float], method: str = "mincut", connectivity: int = 4,
                 jobs: int = 1) -> tuple[SweepSignature, list[Decomposition]]:
    """Solve at every scale; returns the signature and the decompositions."""
    lambdas = _check_lambdas(lambdas)
    tasks = [(item, lam, method, connectivity) for lam in lambdas]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            decs = list(pool.map(_sweep_one, tasks))
    else:
        decs = [_sweep_one(t) for t in tasks]
    sig = SweepSignature(SweepRow(d.lam, d.value, d.mass_s, d.mass_t_minus_ds) for d in decs)
    return sig, decs


def _pair_value(args):
    a, b, lam, method = args
    return shape_distance(a, b, lam, method).value


def distance_matrix(shapes: Sequence[BinarySet], lam: float, method: str = "mincut",
                    jobs: int = 1) -> list[list[float]]:
    n = len(shapes)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    tasks = [(shapes[i], shapes[j], lam, method) for i, j in pairs]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            vals = list(pool.map(_pair_value, tasks))
    else:
        vals = [_pair_value(t) for t in tasks]
    out = [[0.0] * n for _ in range(n)]
    for (i, j), v in zip(pairs, vals):
        out[i][j] = out[j][i] = v
    return out


def write_distance_matrix(matrix: list[list[float]], ids: Sequence[str], path: str | os.PathLike) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", *ids])
        for name, row in zip(ids, matrix):
            w.writerow([name, *(format_number(v) for v in row)])
