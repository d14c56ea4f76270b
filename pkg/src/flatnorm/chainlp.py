"""Flat norm with scale by linear programming over chains.

    F_lam(T) = min_S  lam * M(S) + M(T - dS)

with ``S`` ranging over real (k+1)-chains.  Absolute values are split into
nonnegative pairs; the LP is solved with the HiGHS dual simplex, which is
deterministic for a fixed input ordering and returns vertex solutions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .complex import Chain, ComplexError, boundary, dilate_complex, dilate_pushforward, mass
from .mincut import Decomposition, SolverError

HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}


@dataclass(frozen=True)
class LpConfig:
    lam: float = 1.0
    duality_gap_tolerance: float = 1e-9
    integrality_rounding: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam >= 0):
            raise ValueError(f"lambda must be >= 0, got {self.lam!r}")
        if not self.duality_gap_tolerance > 0:
            raise ValueError("duality_gap_tolerance must be > 0")


def _check_degree(t: Chain) -> None:
    if t.degree + 1 > t.complex.dimension:
        raise ComplexError(
            f"a degree-{t.degree} chain in {t.complex.dimension}D has no (k+1)-cells to fill with"
        )


def _solve(t: Chain, lam: float, face_cost: np.ndarray | None = None):
    cx = t.complex
    bmat = cx.boundary_matrix(t.degree + 1)
    n, m = bmat.shape
    eye = sp.identity(n, format="csr")
    a_eq = sp.hstack([bmat, -bmat, eye, -eye], format="csc")
    fc = np.full(m, float(lam)) if face_cost is None else face_cost
    c = np.concatenate([fc, fc, np.ones(2 * n)])
    res = linprog(c, A_eq=a_eq, b_eq=t.to_vector(), bounds=(0, None), method="highs-ds",
                  options=HIGHS_OPTIONS)
    if res.status != 0:
        raise SolverError(f"LP solver failed (status {res.status}): {res.message}")
    s = res.x[:m] - res.x[m:2 * m]
    duals = np.asarray(res.eqlin.marginals)
    return s, float(res.fun), duals


def _decompose(t: Chain, lam: float, s_vec: np.ndarray, lp_value: float, config: LpConfig,
               duals: np.ndarray | None, solver: str) -> Decomposition:
    cx = t.complex
    s_vec = np.where(np.abs(s_vec) < 1e-12, 0.0, s_vec)
    rounded = False
    if config.integrality_rounding and np.all(np.abs(s_vec - np.round(s_vec)) <= 1e-6):
        s_int = np.round(s_vec)
        s_chain = Chain.from_vector(cx, t.degree + 1, s_int)
        r = t - boundary(s_chain)
        v = lam * mass(s_chain) + mass(r)
        if abs(v - lp_value) <= 1e-6 * max(1.0, abs(lp_value)):
            rounded = True
    if not rounded:
        s_chain = Chain.from_vector(cx, t.degree + 1, s_vec)
        r = t - boundary(s_chain)
    mass_s = mass(s_chain)
    mass_r = mass(r)
    value = lam * mass_s + mass_r
    gap = abs(lp_value - float(t.to_vector() @ duals)) if duals is not None else float("nan")
    if gap > config.duality_gap_tolerance * max(1.0, abs(lp_value)):
        raise SolverError(f"duality gap {gap:.3g} exceeds tolerance {config.duality_gap_tolerance:g}")
    info = {"lp_value": lp_value, "rounded": rounded, "duals": duals}
    if lam == 0:
        info["degenerate_lambda"] = True
    return Decomposition(lam=lam, t=t, s_chain=s_chain, t_minus_ds=r, mass_s=mass_s,
                         mass_t_minus_ds=mass_r, value=value, solver=solver, gap=gap, info=info)


def flat_norm_lp(t: Chain, config: LpConfig | None = None) -> Decomposition:
    """Minimize ``lam M(S) + M(T - dS)`` over (k+1)-chains ``S``."""
    config = config or LpConfig()
    _check_degree(t)
    lam = float(config.lam)
    if t.is_zero():
        zero = Chain.zero(t.complex, t.degree + 1)
        return Decomposition(lam=lam, t=t, s_chain=zero, t_minus_ds=t, mass_s=0.0, mass_t_minus_ds=0.0,
                             value=0.0, solver="lp-highs-ds", gap=0.0,
                             info={"lp_value": 0.0, "rounded": True,
                                   "duals": np.zeros(t.complex.num_cells(t.degree)),
                                   **({"degenerate_lambda": True} if lam == 0 else {})})
    s_vec, lp_value, duals = _solve(t, lam)
    return _decompose(t, lam, s_vec, lp_value, config, duals, "lp-highs-ds")


def flat_norm(t: Chain) -> Decomposition:
    """The flat norm: scale 1."""
    return flat_norm_lp(t, LpConfig(lam=1.0))


def alternate_optimum(t: Chain, config: LpConfig | None = None, optimum: float | None = None,
                      eps: float = 1e-6) -> tuple[Decomposition, Decomposition]:
    """Re-solve with opposite lexicographic perturbations of the filling cost.

    Returns the optima favouring low and high cell indices respectively.  Both
    are checked to attain the unperturbed optimum; different supports expose a
    non-unique minimizer.
    """
    config = config or LpConfig()
    _check_degree(t)
    lam = float(config.lam)
    if optimum is None:
        optimum = flat_norm_lp(t, config).value
    m = t.complex.num_cells(t.degree + 1)
    ramp = np.arange(m) / max(m, 1)
    out = []
    for tilt in (ramp, ramp[::-1]):
        s_vec, _, _ = _solve(t, lam, face_cost=lam + eps * tilt)
        dec = _decompose(t, lam, s_vec, optimum, LpConfig(lam, 1.0, config.integrality_rounding),
                         None, "lp-highs-ds-perturbed")
        if abs(dec.value - optimum) > 1e-6 * max(1.0, abs(optimum)):
            raise SolverError(f"perturbed solve missed the optimum: {dec.value} vs {optimum}")
        out.append(dec)
    return out[0], out[1]


@dataclass
class ScalingReport:
    factor: int
    value_at_scale: float          # F_k(T) on the original grid
    value_dilated: float           # F_1(d_k# T) on the dilated grid
    pushed_value: float            # objective of d_k# S_k for the dilated problem at scale 1
    same_support: bool             # spt d_k# S_k == spt of the dilated problem's own optimum
    tol: float = 1e-6
    details: dict = field(default_factory=dict)

    @property
    def values_match(self) -> bool:
        return abs(self.value_dilated - self.factor * self.value_at_scale) <= self.tol

    @property
    def pushforward_optimal(self) -> bool:
        return abs(self.pushed_value - self.value_dilated) <= self.tol

    @property
    def ok(self) -> bool:
        return self.values_match and self.pushforward_optimal


def scaling_check(t: Chain, factor, tol: float = 1e-6) -> ScalingReport:
    """Check ``F_1(d_k# T) = k F_k(T)`` and that ``d_k# S_k`` is optimal at scale 1."""
    if isinstance(factor, bool) or not float(factor).is_integer() or factor < 1:
        raise ValueError(f"scaling check needs a positive integer scale, got {factor!r}")
    k = int(factor)
    if t.degree != 1 or t.complex.dimension != 2:
        raise ComplexError("scaling check expects a 1-chain in a 2D complex")
    coarse = flat_norm_lp(t, LpConfig(lam=k))
    big = dilate_complex(t.complex, k)
    t_big = dilate_pushforward(t, k, big)
    fine = flat_norm_lp(t_big, LpConfig(lam=1.0))
    s_push = dilate_pushforward(coarse.s_chain, k, big)
    pushed_value = mass(s_push) + mass(t_big - boundary(s_push))
    return ScalingReport(
        factor=k,
        value_at_scale=coarse.value,
        value_dilated=fine.value,
        pushed_value=pushed_value,
        same_support=s_push.support() == fine.s_chain.support(),
        tol=tol,
        details={"coarse": coarse, "fine": fine},
    )
