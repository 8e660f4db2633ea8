"""Closed-form fixed points, stability classification, and bi-stability
predicates for both strategy rules.

Interior equilibria of the imitation model sit on the strategy boundaries
x = 0 and x = 1, where the resource drift reduces to
T*R*((R/A - 1)(1 - R/K) - e_hat); its nonzero roots are

    R = (1 + A -+ sqrt((1-A)^2 - 4*A*e_hat)) / 2,

existing while e_hat <= (1-A)^2 / (4A).  Under knowledge feedback the
interior points solve the nullcline pair x = (1-R)/(K-A) restricted to the
R > A branch of the step function, which collapses to a quadratic in R.

Stability is ALWAYS decided numerically from a finite-difference Jacobian:
the eigenvalue lists printed alongside the closed forms in the source
material are kept as cross-checks only (tests hold them to 1e-6), and the
+/- branch names of the knowledge-feedback points are reported as labels
but never trusted for classification, because direct evaluation shows the
minus branch is the stable one.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import (GrowthKind, ModelParams, State, StrategyRule,
                   coevolution_rhs, make_rhs, validate_params)

# classification thresholds: FD eigenvalues carry O(h^2) noise, so exact
# zeros (the neutral line) show up as ~1e-10
_EIG_TOL = 1e-7


class BranchCrossingError(ValueError):
    """A finite-difference stencil straddles the R = A kink."""


class ExistenceRegionMismatch(RuntimeError):
    """A closed-form point landed outside its formula's validity region."""


class NewtonRefinementError(RuntimeError):
    """Newton refinement of a closed-form root failed to converge."""


class NoBoundary(RuntimeError):
    """The critical line requires fixed points that do not exist here."""


class Label(enum.Enum):
    S0 = "S0"
    S00 = "S00"
    S01 = "S01"
    SCminus = "SCminus"
    SCplus = "SCplus"
    SDminus = "SDminus"
    SDplus = "SDplus"
    KF_S0 = "KF_S0"
    KF_minus = "KF_minus"
    KF_plus = "KF_plus"


class Classification(enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    SADDLE = "Saddle"
    NEUTRAL_LINE = "NeutralLine"
    NOT_APPLICABLE = "NotApplicable"


@dataclass(frozen=True)
class FixedPoint:
    R_star: float
    x_star: float | None  # None marks the free coordinate of the R=0 line
    label: Label
    eigenvalues: tuple[complex, complex]
    classification: Classification
    residual: float


@dataclass(frozen=True)
class BistabilityReport:
    bistable: bool
    existing_points: tuple
    threshold_value: float


# ---------------------------------------------------------------------------
# Jacobian and classification


def numeric_jacobian(state: State, params: ModelParams, kind: GrowthKind,
                     rule: StrategyRule, h: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of the drift field, O(h^2) per entry.

    For knowledge feedback the stencil must stay on one branch of the step
    function: |R - A| <= h raises BranchCrossingError.
    """
    R, x = state
    if rule is StrategyRule.KNOWLEDGE_FEEDBACK and abs(R - params.A) <= h:
        raise BranchCrossingError(
            f"stencil at R={R} straddles the kink at A={params.A} (h={h})")
    rhs = make_rhs(params, kind, rule)
    fRp = rhs(R + h, x)
    fRm = rhs(R - h, x)
    fxp = rhs(R, x + h)
    fxm = rhs(R, x - h)
    inv2h = 1.0 / (2.0 * h)
    return np.array([
        [(fRp[0] - fRm[0]) * inv2h, (fxp[0] - fxm[0]) * inv2h],
        [(fRp[1] - fRm[1]) * inv2h, (fxp[1] - fxm[1]) * inv2h],
    ])


def eigenvalues_2x2(J: np.ndarray) -> tuple[complex, complex]:
    """Closed-form eigenvalues, sorted by (real, imag) for determinism."""
    tr = J[0, 0] + J[1, 1]
    det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
    root = cmath.sqrt(tr * tr - 4.0 * det)
    lam = (0.5 * (tr - root), 0.5 * (tr + root))
    return tuple(sorted(lam, key=lambda z: (z.real, z.imag)))


def classify(J: np.ndarray, interior: bool) -> Classification:
    """Det/Tr verdict for interior points; coarse sign verdict otherwise.

    Boundary equilibria (x pinned to 0 or 1 by an invariant manifold) get
    Stable/Unstable from the eigenvalue real parts alone -- a mixed-sign
    boundary point is reported Unstable, not Saddle, matching the usage
    for the x=0/x=1 resource branches.
    """
    if interior:
        det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
        tr = J[0, 0] + J[1, 1]
        if det < -_EIG_TOL:
            return Classification.SADDLE
        if det > _EIG_TOL:
            return Classification.STABLE if tr < 0 else Classification.UNSTABLE
        return Classification.NOT_APPLICABLE
    lams = eigenvalues_2x2(J)
    res = [lam.real for lam in lams]
    if max(res) < -_EIG_TOL:
        return Classification.STABLE
    if max(res) > _EIG_TOL:
        return Classification.UNSTABLE
    return Classification.NOT_APPLICABLE


def _is_interior(R, x):
    return 0.0 < R < 1.0 and 0.0 < x < 1.0


def _residual(R, x, params, kind, rule):
    dR, dx = coevolution_rhs(State(R, x), params, kind, rule)
    return max(abs(dR), abs(dx))


# ---------------------------------------------------------------------------
# Newton refinement


def _refine_resource_root(R0: float, e_hat: float, params: ModelParams,
                          max_iter: int = 10, tol: float = 1e-13) -> float:
    """Newton on (R/A - 1)(1 - R/K) - e_hat = 0 from the closed form."""
    A, K = params.A, params.K
    R = R0
    for _ in range(max_iter):
        f = (R / A - 1.0) * (1.0 - R / K) - e_hat
        if abs(f) <= tol:
            return R
        df = (1.0 - R / K) / A - (R / A - 1.0) / K
        R -= f / df
    f = (R / A - 1.0) * (1.0 - R / K) - e_hat
    if abs(f) <= tol:
        return R
    raise NewtonRefinementError(
        f"resource root near R={R0} did not refine below {tol} in {max_iter} iterations")


def _refine_kf_interior(R0: float, x0: float, params: ModelParams,
                        max_iter: int = 10, tol: float = 1e-12) -> tuple[float, float]:
    """2-D Newton on the smooth R > A branch of the knowledge-feedback field."""
    T, A, K = params.T, params.A, params.K
    eC, eD = params.e_C_hat, params.e_D_hat
    R, x = R0, x0
    for _ in range(max_iter):
        fR = T * R * (R / A - 1.0) * (1.0 - R / K) - T * R * (x * eC + (1.0 - x) * eD)
        fx = 1.0 - x - (R - A) / (K - A)
        if max(abs(fR), abs(fx)) <= tol:
            return R, x
        j00 = T * ((R / A - 1.0) * (1.0 - R / K) + R * (1.0 - R / K) / A
                   - R * (R / A - 1.0) / K - (x * eC + (1.0 - x) * eD))
        j01 = T * R * (eD - eC)
        j10 = -1.0 / (K - A)
        j11 = -1.0
        det = j00 * j11 - j01 * j10
        R -= (fR * j11 - j01 * fx) / det
        x -= (j00 * fx - fR * j10) / det
    raise NewtonRefinementError(
        f"knowledge-feedback point near ({R0}, {x0}) did not refine below {tol}")


# ---------------------------------------------------------------------------
# Fixed-point catalogues


def _fixed_point(R, x, label, params, kind, rule, x_free=False):
    # the R=0 line is evaluated at a representative x for the Jacobian
    x_eval = 0.5 if x_free else x
    J = numeric_jacobian(State(R, x_eval), params, kind, rule)
    lams = eigenvalues_2x2(J)
    if label in (Label.S0, Label.S00, Label.S01):
        cls = Classification.NEUTRAL_LINE
    else:
        cls = classify(J, interior=_is_interior(R, x_eval))
    res = _residual(R, x_eval, params, kind, rule)
    return FixedPoint(R, None if x_free else x, label, lams, cls, res)


def replicator_fixed_points(params: ModelParams,
                            kind: GrowthKind = GrowthKind.ALLEE_LOGISTIC) -> list[FixedPoint]:
    """All stationary solutions of the imitation model.

    Always returns the extinction line (S0, with its x=0 / x=1 endpoints
    S00 and S01); the x=1 resource roots SCminus/SCplus and the x=0 roots
    SDminus/SDplus appear only where their discriminants allow.
    """
    validate_params(params)
    rule = StrategyRule.REPLICATOR
    pts = [
        _fixed_point(0.0, None, Label.S0, params, kind, rule, x_free=True),
        _fixed_point(0.0, 0.0, Label.S00, params, kind, rule),
        _fixed_point(0.0, 1.0, Label.S01, params, kind, rule),
    ]
    A, K = params.A, params.K
    for e_hat, x_star, lab_m, lab_p in (
            (params.e_C_hat, 1.0, Label.SCminus, Label.SCplus),
            (params.e_D_hat, 0.0, Label.SDminus, Label.SDplus)):
        disc = (K - A) ** 2 - 4.0 * A * K * e_hat
        if disc < 0.0:
            continue
        root = math.sqrt(disc)
        for lab, sign in ((lab_m, -1.0), (lab_p, +1.0)):
            R = 0.5 * (K + A + sign * root)
            R = _refine_resource_root(R, e_hat, params)
            pts.append(_fixed_point(R, x_star, lab, params, kind, rule))
    return pts


def knowledge_fixed_points(params: ModelParams,
                           kind: GrowthKind = GrowthKind.ALLEE_LOGISTIC) -> list[FixedPoint]:
    """Stationary solutions of the knowledge-feedback model.

    KF_S0 = (R=0, x=1) always exists.  The two interior closed-form points
    share a discriminant; when it is non-negative each computed point must
    land on the R > A branch inside the unit square, otherwise the closed
    form is being evaluated outside its validity region and
    ExistenceRegionMismatch is raised.
    """
    validate_params(params)
    rule = StrategyRule.KNOWLEDGE_FEEDBACK
    pts = [_fixed_point(0.0, 1.0, Label.KF_S0, params, kind, rule)]
    A, eC, eD = params.A, params.e_C_hat, params.e_D_hat
    disc = ((A * A - A * (eC + 2.0) + 1.0) ** 2
            + A * A * eD * eD
            - 2.0 * A * eD * (A * (A + eC - 2.0) + 1.0))
    if disc < 0.0:
        return pts
    root = math.sqrt(disc)
    for lab, sign in ((Label.KF_minus, -1.0), (Label.KF_plus, +1.0)):
        R = (-1.0 + A * (A - eC + eD) + sign * root) / (2.0 * (A - 1.0))
        x = (1.0 + A * (A - eC + eD - 2.0) + sign * root) / (2.0 * (A - 1.0) ** 2)
        if not (A < R < 1.0 and 0.0 < x < 1.0):
            raise ExistenceRegionMismatch(
                f"{lab.value} closed form gives (R={R}, x={x}) outside the "
                f"valid region R in (A, 1), x in (0, 1) at A={A}, "
                f"e_C_hat={eC}, e_D_hat={eD}")
        R, x = _refine_kf_interior(R, x, params)
        pts.append(_fixed_point(R, x, lab, params, kind, rule))
    return pts


# ---------------------------------------------------------------------------
# Bi-stability predicates (array-capable; the region sweeps broadcast these)


def replicator_bistable_threshold(A):
    """The e_D_hat bound (1-A)^2 / (4A) below which the x=0 sustainable
    branch exists."""
    return (1.0 - A) ** 2 / (4.0 * A)


def replicator_bistable_ok(A, e_D_hat):
    """True where a stable sustainable equilibrium coexists with collapse."""
    return e_D_hat < replicator_bistable_threshold(A)


def knowledge_bistable_ok(A, e_C_hat, e_D_hat):
    """Two-branch existence condition for the knowledge-feedback interior
    points, evaluated verbatim."""
    expr1 = (2.0 * np.sqrt((A - 1.0) ** 2 * e_C_hat / A)
             - A - 1.0 / A - e_C_hat + e_D_hat + 2.0) < 0.0
    expr2 = (-A + 2.0 * np.sqrt((A - 1.0) ** 2 / A)
             - 1.0 / A + e_C_hat + 1.0) < 0.0
    lo = 3.0 - 2.0 * math.sqrt(2.0)
    hi = 0.5 * (3.0 - math.sqrt(5.0))
    branch1 = (0.0 < A) & (A < lo) & expr1
    branch2 = (lo < A) & (A < hi) & expr1 & expr2
    return branch1 | branch2


def replicator_bistable(params: ModelParams) -> BistabilityReport:
    validate_params(params)
    bistable = bool(replicator_bistable_ok(params.A, params.e_D_hat))
    return BistabilityReport(
        bistable=bistable,
        existing_points=tuple(replicator_fixed_points(params)),
        threshold_value=float(replicator_bistable_threshold(params.A)),
    )


def knowledge_bistable(params: ModelParams) -> BistabilityReport:
    validate_params(params)
    A, eC = params.A, params.e_C_hat
    bistable = bool(knowledge_bistable_ok(A, eC, params.e_D_hat))
    # the e_D_hat value at which expr1 changes sign: the bound that binds
    threshold = A + 1.0 / A + eC - 2.0 - 2.0 * math.sqrt((A - 1.0) ** 2 * eC / A)
    return BistabilityReport(
        bistable=bistable,
        existing_points=tuple(knowledge_fixed_points(params)),
        threshold_value=float(threshold),
    )


# ---------------------------------------------------------------------------
# Critical line


def critical_line_x0(R0: float, params: ModelParams) -> float:
    """Boundary cooperator fraction x0 = (R0 - R_Dminus)/(R_Cminus - R_Dminus).

    Initial conditions below the returned value are predicted to collapse,
    the rest to reach the sustainable branch.  The value may fall outside
    [0, 1], meaning the whole x0 column lies on one side of the line.
    """
    validate_params(params)
    A, K = params.A, params.K
    disc_C = (K - A) ** 2 - 4.0 * A * K * params.e_C_hat
    disc_D = (K - A) ** 2 - 4.0 * A * K * params.e_D_hat
    if disc_C < 0.0 or disc_D < 0.0:
        raise NoBoundary(
            f"critical line needs both minus-branch roots; discriminants are "
            f"C: {disc_C}, D: {disc_D}")
    sCm = _refine_resource_root(0.5 * (K + A - math.sqrt(disc_C)), params.e_C_hat, params)
    sDm = _refine_resource_root(0.5 * (K + A - math.sqrt(disc_D)), params.e_D_hat, params)
    return (R0 - sDm) / (sCm - sDm)
