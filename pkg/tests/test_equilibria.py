import math
from dataclasses import replace

import numpy as np
import pytest

from cpr_allee import (BranchCrossingError, Classification,
                       ExistenceRegionMismatch, GrowthKind, Label, ModelParams,
                       NoBoundary, State, StrategyRule, coevolution_rhs,
                       critical_line_x0, knowledge_bistable,
                       knowledge_fixed_points, numeric_jacobian,
                       replicator_bistable, replicator_fixed_points)
from cpr_allee.core import make_rhs
from cpr_allee.equilibria import (classify, eigenvalues_2x2,
                                  knowledge_bistable_ok, replicator_bistable_ok,
                                  replicator_bistable_threshold)

from _oracles import (KF_SADDLE, KF_STABLE, SC_MINUS, SC_PLUS, SD_MINUS,
                      SD_PLUS, fd_jacobian, kf_nullcline_points,
                      resource_roots)

ALLEE = GrowthKind.ALLEE_LOGISTIC
REP = StrategyRule.REPLICATOR
KF = StrategyRule.KNOWLEDGE_FEEDBACK
FIG2 = ModelParams(T=2.0, A=0.1, K=1.0, e_C_hat=0.5, e_D_hat=1.5, w=1.0)


def by_label(pts):
    return {fp.label: fp for fp in pts}


class TestReplicatorFixedPoints:
    def test_reference_set_and_locations(self):
        pts = by_label(replicator_fixed_points(FIG2))
        assert set(pts) == {Label.S0, Label.S00, Label.S01, Label.SCminus,
                            Label.SCplus, Label.SDminus, Label.SDplus}
        assert pts[Label.SCminus].R_star == pytest.approx(SC_MINUS, abs=1e-12)
        assert pts[Label.SCplus].R_star == pytest.approx(SC_PLUS, abs=1e-12)
        assert pts[Label.SDminus].R_star == pytest.approx(SD_MINUS, abs=1e-12)
        assert pts[Label.SDplus].R_star == pytest.approx(SD_PLUS, abs=1e-12)
        assert pts[Label.S0].x_star is None

    def test_classifications(self):
        pts = by_label(replicator_fixed_points(FIG2))
        assert pts[Label.S0].classification is Classification.NEUTRAL_LINE
        assert pts[Label.S00].classification is Classification.NEUTRAL_LINE
        assert pts[Label.S01].classification is Classification.NEUTRAL_LINE
        assert pts[Label.SCminus].classification is Classification.UNSTABLE
        assert pts[Label.SCplus].classification is Classification.UNSTABLE
        assert pts[Label.SDminus].classification is Classification.UNSTABLE
        assert pts[Label.SDplus].classification is Classification.STABLE

    def test_residuals_below_1e9(self):
        for fp in replicator_fixed_points(FIG2):
            assert fp.residual < 1e-9

    def test_d_branch_absent_for_strong_allee(self):
        pts = by_label(replicator_fixed_points(replace(FIG2, A=0.3)))
        assert Label.SDminus not in pts and Label.SDplus not in pts
        # (1-A)^2/(4A) = 0.408 < 1.5
        assert replicator_bistable_threshold(0.3) == pytest.approx(0.40833333333333333)

    def test_closed_forms_match_oracle_randomized(self):
        # 1e3 random valid parameter draws: closed forms vs bisection to 1e-8
        rng = np.random.default_rng(314)
        checked = 0
        while checked < 1000:
            A = float(rng.uniform(0.02, 0.6))
            e = float(rng.uniform(1.01, 4.0))
            if (1 - A) ** 2 - 4 * A * e < 1e-6:
                continue
            roots = resource_roots(A, e)
            p = replace(FIG2, A=A, e_D_hat=e)
            pts = by_label(replicator_fixed_points(p))
            assert abs(pts[Label.SDminus].R_star - roots[0]) < 1e-8
            assert abs(pts[Label.SDplus].R_star - roots[1]) < 1e-8
            checked += 1

    def test_discriminant_consistency(self):
        # branch existence <=> discriminant sign <=> oracle root count
        rng = np.random.default_rng(99)
        for _ in range(300):
            A = float(rng.uniform(0.02, 0.8))
            e = float(rng.uniform(1.01, 4.0))
            disc = (1 - A) ** 2 - 4 * A * e
            if abs(disc) < 1e-9:
                continue
            p = replace(FIG2, A=A, e_D_hat=e)
            pts = by_label(replicator_fixed_points(p))
            has = Label.SDplus in pts
            assert has == (disc >= 0)
            assert has == (len(resource_roots(A, e)) == 2)

    def test_eigenvalue_formulas_cross_check(self):
        # the Jacobian is triangular at the x=0 roots, so the analytic
        # eigenvalues are lambda_R = -T*R*(sign*s)/A and lambda_x = -w*R,
        # with s the discriminant root and sign = -/+ for the two branches
        pts = by_label(replicator_fixed_points(FIG2))
        T, A, w = FIG2.T, FIG2.A, FIG2.w
        s = math.sqrt((1 - A) ** 2 - 4 * A * FIG2.e_D_hat)
        for lab, sign in ((Label.SDminus, -1.0), (Label.SDplus, 1.0)):
            R = pts[lab].R_star
            lam_R = -T * R * (sign * s) / A
            lam_x = -w * R
            got = sorted(l.real for l in pts[lab].eigenvalues)
            assert got == pytest.approx(sorted([lam_R, lam_x]), abs=1e-6)


class TestKnowledgeFixedPoints:
    def test_reference_points_match_nullcline_oracle(self):
        pts = by_label(knowledge_fixed_points(FIG2))
        assert set(pts) == {Label.KF_S0, Label.KF_minus, Label.KF_plus}
        oracle = kf_nullcline_points(FIG2.A, FIG2.e_C_hat, FIG2.e_D_hat)
        assert len(oracle) == 2
        (r_sad, x_sad), (r_st, x_st) = oracle
        assert pts[Label.KF_plus].R_star == pytest.approx(r_sad, abs=1e-8)
        assert pts[Label.KF_plus].x_star == pytest.approx(x_sad, abs=1e-8)
        assert pts[Label.KF_minus].R_star == pytest.approx(r_st, abs=1e-8)
        assert pts[Label.KF_minus].x_star == pytest.approx(x_st, abs=1e-8)

    def test_classifications_numeric_not_paper_labels(self):
        # the minus-sqrt branch is the stable one; Det/Tr on the plus branch
        # is a saddle (the source's +/- stability wording is inverted)
        pts = by_label(knowledge_fixed_points(FIG2))
        assert pts[Label.KF_S0].classification is Classification.STABLE
        assert pts[Label.KF_minus].classification is Classification.STABLE
        assert pts[Label.KF_plus].classification is Classification.SADDLE

    def test_det_tr_values(self):
        J = numeric_jacobian(State(*KF_STABLE), FIG2, ALLEE, KF)
        assert np.trace(J) == pytest.approx(-9.8292, abs=1e-3)
        assert np.linalg.det(J) == pytest.approx(10.6501, abs=1e-3)
        J = numeric_jacobian(State(*KF_SADDLE), FIG2, ALLEE, KF)
        assert np.linalg.det(J) < 0

    def test_absent_for_strong_allee(self):
        pts = by_label(knowledge_fixed_points(replace(FIG2, A=0.3)))
        assert set(pts) == {Label.KF_S0}

    def test_existence_region_mismatch_raised(self):
        # discriminant positive again far beyond the valid window, but the
        # closed form lands at R <= A
        with pytest.raises(ExistenceRegionMismatch):
            knowledge_fixed_points(replace(FIG2, e_D_hat=20.0))

    def test_residuals(self):
        for fp in knowledge_fixed_points(FIG2):
            assert fp.residual < 1e-9


class TestNumericJacobian:
    def test_exact_on_affine_field(self):
        J = fd_jacobian(lambda R, x: (2.0 * R - 3.0 * x + 1.0, 0.5 * R + 4.0 * x), 0.3, 0.7)
        assert np.allclose(J, [[2.0, -3.0], [0.5, 4.0]], atol=1e-10)
        # library version on the replicator field vs independent stencil
        rhs = make_rhs(FIG2, ALLEE, REP)
        Jlib = numeric_jacobian(State(0.4, 0.6), FIG2, ALLEE, REP)
        Jora = fd_jacobian(rhs, 0.4, 0.6)
        assert np.allclose(Jlib, Jora, atol=1e-6)

    def test_extinct_line_eigenvalues(self):
        # {0, -T(1 + e_D(1-x) + e_C x)} = {0, -4} at x = 0.5
        J = numeric_jacobian(State(0.0, 0.5), FIG2, ALLEE, REP)
        lams = sorted(l.real for l in eigenvalues_2x2(J))
        assert lams[0] == pytest.approx(-4.0, abs=1e-6)
        assert lams[1] == pytest.approx(0.0, abs=1e-6)

    def test_branch_crossing_guard(self):
        with pytest.raises(BranchCrossingError):
            numeric_jacobian(State(FIG2.A + 1e-9, 0.5), FIG2, ALLEE, KF)

    def test_classification_invariance_interior(self):
        # numeric eigenvalue verdict equals the Det/Tr verdict at interior pts
        for fp in knowledge_fixed_points(FIG2):
            if fp.label is Label.KF_S0:
                continue
            J = numeric_jacobian(State(fp.R_star, fp.x_star), FIG2, ALLEE, KF)
            det = np.linalg.det(J)
            tr = np.trace(J)
            if det < 0:
                expected = Classification.SADDLE
            elif tr < 0:
                expected = Classification.STABLE
            else:
                expected = Classification.UNSTABLE
            assert classify(J, interior=True) is expected is fp.classification


class TestBistability:
    def test_replicator_examples(self):
        assert replicator_bistable(FIG2).bistable
        assert replicator_bistable(FIG2).threshold_value == pytest.approx(2.025)
        assert not replicator_bistable(replace(FIG2, e_D_hat=2.5)).bistable
        assert not replicator_bistable(replace(FIG2, A=0.3)).bistable

    def test_knowledge_examples(self):
        assert knowledge_bistable(FIG2).bistable
        assert knowledge_bistable(replace(FIG2, e_D_hat=2.5)).bistable
        assert not knowledge_bistable(replace(FIG2, A=0.3)).bistable

    def test_predicate_matches_stable_point_geometry(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            A = float(rng.uniform(0.02, 0.6))
            e = float(rng.uniform(1.01, 3.5))
            disc = (1 - A) ** 2 - 4 * A * e
            if abs(disc) < 1e-6:
                continue
            p = replace(FIG2, A=A, e_D_hat=e)
            pts = by_label(replicator_fixed_points(p))
            stable_sustainable = (Label.SDplus in pts and
                                  pts[Label.SDplus].classification is Classification.STABLE)
            assert bool(replicator_bistable_ok(A, e)) == stable_sustainable

    def test_predicates_array_capable(self):
        A = np.array([0.1, 0.1, 0.3])
        eD = np.array([1.5, 2.5, 1.5])
        assert list(replicator_bistable_ok(A, eD)) == [True, False, False]
        assert list(knowledge_bistable_ok(A, 0.5, eD)) == [True, True, False]


class TestCriticalLine:
    def test_anchors(self):
        assert critical_line_x0(SD_MINUS, FIG2) == pytest.approx(0.0, abs=1e-12)
        assert critical_line_x0(SC_MINUS, FIG2) == pytest.approx(1.0, abs=1e-12)

    def test_midpoint(self):
        R0 = SD_MINUS + 0.5 * (SC_MINUS - SD_MINUS)
        assert R0 == pytest.approx(0.2401794, abs=1e-6)
        assert critical_line_x0(R0, FIG2) == pytest.approx(0.5, abs=1e-12)

    def test_out_of_range_values_returned(self):
        assert critical_line_x0(0.5, FIG2) < 0.0
        assert critical_line_x0(0.0, FIG2) > 1.0

    def test_no_boundary_when_roots_missing(self):
        with pytest.raises(NoBoundary):
            critical_line_x0(0.3, replace(FIG2, A=0.3))
