"""Dual flat norm: maximize T(phi) over cochains with |phi| <= 1, |d phi| <= lam.

This is an LP of its own, solved independently of the primal chain LP, so the
two values give a genuine strong-duality check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .chainlp import HIGHS_OPTIONS
from .complex import Chain, ComplexError, FormCochain
from .mincut import Decomposition, SolverError

FEASIBILITY_TOL = 1e-9
ACTIVITY_TOL = 1e-6


def dual_flat_norm(t: Chain, lam: float, gap_tolerance: float = 1e-9) -> tuple[FormCochain, float]:
    """Return an optimal cochain and the dual value ``sup T(phi)``."""
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam!r}")
    cx = t.complex
    if t.degree + 1 > cx.dimension:
        raise ComplexError(f"degree-{t.degree} chains have no dual constraint in {cx.dimension}D")
    if t.is_zero():
        return FormCochain(cx, t.degree), 0.0
    cob = cx.boundary_matrix(t.degree + 1).T.tocsr()
    a_ub = sp.vstack([cob, -cob], format="csc")
    b_ub = np.full(a_ub.shape[0], float(lam))
    res = linprog(-t.to_vector(), A_ub=a_ub, b_ub=b_ub, bounds=(-1, 1), method="highs-ds",
                  options=HIGHS_OPTIONS)
    if res.status != 0:
        raise SolverError(f"dual LP failed (status {res.status}): {res.message}")
    phi = np.clip(res.x, -1.0, 1.0)
    phi = np.where(np.abs(phi) < 1e-13, 0.0, phi)
    form = FormCochain(cx, t.degree, phi)
    value = form.pair(t)
    if not form.is_feasible(lam, FEASIBILITY_TOL):
        raise SolverError("dual LP returned an infeasible cochain")
    if abs(value + res.fun) > gap_tolerance * max(1.0, abs(value)):
        raise SolverError(f"dual value drifted from the LP optimum by {abs(value + res.fun):.3g}")
    return form, value


@dataclass
class SlacknessReport:
    lam: float
    primal_value: float
    dual_value: float
    violations_s: list[int] = field(default_factory=list)        # faces in spt S with |d phi| != lam
    violations_r: list[int] = field(default_factory=list)        # edges in spt(T - dS) with |phi| != 1
    infeasible: list[str] = field(default_factory=list)
    tol: float = ACTIVITY_TOL

    @property
    def gap(self) -> float:
        return abs(self.primal_value - self.dual_value)

    @property
    def ok(self) -> bool:
        return not (self.violations_s or self.violations_r or self.infeasible)

    def lines(self) -> list[str]:
        return [
            f"slackness_ok={int(self.ok)}",
            f"violations_s={len(self.violations_s)}",
            f"violations_t_minus_ds={len(self.violations_r)}",
            f"infeasible={len(self.infeasible)}",
        ]


def complementary_slackness_report(primal: Decomposition, phi: FormCochain, tol: float = ACTIVITY_TOL,
                                   value_tol: float = 1e-6) -> SlacknessReport:
    """Check ``|d phi| = lam`` on spt S and ``|phi| = 1`` on spt(T - dS)."""
    t = primal.t
    if phi.complex != t.complex or phi.degree != t.degree:
        raise ComplexError("cochain does not match the primal problem")
    lam = primal.lam
    dual_value = phi.pair(t)
    if abs(dual_value - primal.value) > value_tol * max(1.0, abs(primal.value)):
        raise ValueError(
            f"primal ({primal.value}) and dual ({dual_value}) values differ; not the same problem")
    dphi = phi.d
    rep = SlacknessReport(lam=lam, primal_value=primal.value, dual_value=dual_value, tol=tol)
    rep.violations_s = sorted(i for i in primal.s_chain.support() if abs(abs(dphi[i]) - lam) > tol)
    rep.violations_r = sorted(i for i in primal.t_minus_ds.support() if abs(abs(phi.values[i]) - 1) > tol)
    if np.any(np.abs(phi.values) > 1 + tol):
        rep.infeasible.append("|phi| > 1")
    if np.any(np.abs(dphi) > lam + tol):
        rep.infeasible.append("|d phi| > lambda")
    return rep


def extract_X(phi: FormCochain, lam: float, tol: float = ACTIVITY_TOL) -> frozenset[int]:
    """(k+1)-cells where the coboundary saturates: ``|d phi| >= lam - tol``."""
    dphi = phi.d
    return frozenset(int(i) for i in np.flatnonzero(np.abs(dphi) >= lam - tol))


def x_as_chain(phi: FormCochain, cells: frozenset[int]) -> Chain:
    return Chain(phi.complex, phi.degree + 1, {i: 1 for i in cells})


def project_feasible(phi: FormCochain, lam: float) -> FormCochain:
    """Scale a cochain into the feasible set ``|phi| <= 1, |d phi| <= lam``."""
    v = phi.values
    top = max(np.max(np.abs(v), initial=0.0), np.max(np.abs(phi.d), initial=0.0) / lam if lam > 0 else 0.0)
    if top <= 1:
        return phi
    return FormCochain(phi.complex, phi.degree, v / top)
