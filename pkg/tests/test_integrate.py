import numpy as np
import pytest

from cpr_allee import (GrowthKind, IntegratorConfig, ModelParams, State,
                       StrategyRule, integrate, run_to_steady_state, step_rk4)
from cpr_allee.core import make_rhs
from cpr_allee.integrate import integrate_batch

from _oracles import KF_STABLE, SD_PLUS

ALLEE = GrowthKind.ALLEE_LOGISTIC
LOGISTIC = GrowthKind.PLAIN_LOGISTIC
REP = StrategyRule.REPLICATOR
KF = StrategyRule.KNOWLEDGE_FEEDBACK

FIG2 = ModelParams(T=2.0, A=0.1, K=1.0, e_C_hat=0.5, e_D_hat=1.5, w=1.0)
STRONG = ModelParams(T=2.0, A=0.3, K=1.0, e_C_hat=0.5, e_D_hat=1.5, w=1.0)


class TestStepRK4:
    def test_extinct_line_invariant(self):
        s = step_rk4(State(0.0, 0.5), FIG2, ALLEE, REP, dt=1e-3)
        assert s == State(0.0, 0.5)

    def test_fixed_point_barely_moves(self):
        s = step_rk4(State(SD_PLUS, 0.0), FIG2, ALLEE, REP, dt=1e-3)
        assert abs(s.R - SD_PLUS) < 1e-10 and s.x == 0.0

    def test_drift_signs_from_center(self):
        # growth beats extraction at (0.5, 0.5) while imitation erodes x
        s = step_rk4(State(0.5, 0.5), FIG2, ALLEE, REP, dt=1e-3)
        assert s.R > 0.5 and s.x < 0.5

    def test_unit_square_closure_random(self):
        # 1e4 random states/params: one step never leaves [0,1]^2
        rng = np.random.default_rng(2024)
        for _ in range(10_000):
            p = ModelParams(T=float(rng.uniform(0.1, 5)),
                            A=float(rng.uniform(0.01, 0.99)),
                            e_C_hat=float(rng.uniform(0.01, 0.99)),
                            e_D_hat=float(rng.uniform(1.01, 5.0)),
                            w=float(rng.uniform(0.05, 1.0)))
            kind = ALLEE if rng.random() < 0.5 else LOGISTIC
            rule = REP if rng.random() < 0.5 else KF
            s = step_rk4(State(float(rng.random()), float(rng.random())),
                         p, kind, rule, dt=float(rng.choice([1e-3, 1e-2, 0.1])))
            assert 0.0 <= s.R <= 1.0 and 0.0 <= s.x <= 1.0


class TestIntegrate:
    def test_fig2cd_sustains(self):
        traj = integrate(State(0.5, 0.5), FIG2, ALLEE, REP)
        assert traj.final.R == pytest.approx(SD_PLUS, abs=1e-6)
        assert traj.final.x < 1e-6

    def test_fig2gh_low_start_collapses(self):
        traj = integrate(State(0.2, 0.5), FIG2, ALLEE, REP)
        assert traj.final.R < 1e-6

    def test_fig2ef_strong_allee_collapses(self):
        traj = integrate(State(0.5, 0.5), STRONG, ALLEE, REP)
        assert traj.final.R < 1e-6

    def test_times_strictly_increasing_states_in_square(self):
        traj = integrate(State(0.5, 0.5), FIG2, ALLEE, KF,
                         IntegratorConfig(record_stride=37))
        assert (np.diff(traj.times) > 0).all()
        assert ((traj.R >= 0) & (traj.R <= 1)).all()
        assert ((traj.x >= 0) & (traj.x <= 1)).all()
        assert traj.times[0] == 0.0 and traj.R[0] == 0.5 and traj.x[0] == 0.5

    def test_extinction_absorbing_along_trajectory(self):
        # a loose snap threshold with a tight conv_tol forces the snap to fire
        traj = integrate(State(0.2, 0.5), FIG2, ALLEE, REP,
                         IntegratorConfig(record_stride=1, extinct_eps=1e-9,
                                          conv_tol=1e-13))
        hit = np.nonzero(traj.R == 0.0)[0]
        assert hit.size > 0
        assert (traj.R[hit[0]:] == 0.0).all()

    def test_dt_halving_changes_terminal_below_1e6(self):
        scenarios = [
            (State(0.5, 0.5), FIG2, ALLEE, REP),
            (State(0.2, 0.5), FIG2, ALLEE, REP),
            (State(0.5, 0.5), STRONG, ALLEE, REP),
            (State(0.5, 0.5), FIG2, ALLEE, KF),
            (State(0.2, 0.5), FIG2, ALLEE, KF),
        ]
        for s0, p, kind, rule in scenarios:
            a = integrate(s0, p, kind, rule, IntegratorConfig(dt=1e-3)).final
            b = integrate(s0, p, kind, rule, IntegratorConfig(dt=5e-4)).final
            assert abs(a.R - b.R) < 1e-6 and abs(a.x - b.x) < 1e-6


class TestRunToSteadyState:
    def test_kf_reaches_interior_point(self):
        res = run_to_steady_state(State(0.5, 0.5), FIG2, ALLEE, KF)
        assert res.converged
        assert res.final.R == pytest.approx(KF_STABLE[0], abs=1e-6)
        assert res.final.x == pytest.approx(KF_STABLE[1], abs=1e-6)

    def test_kf_strong_allee_low_start_collapses(self):
        res = run_to_steady_state(State(0.05, 0.5), STRONG, ALLEE, KF)
        assert res.final.R == 0.0  # decays through extinct_eps and snaps

    def test_extinct_line_converges_immediately_replicator(self):
        res = run_to_steady_state(State(0.0, 0.3), FIG2, ALLEE, REP)
        assert res.converged and res.t_elapsed == 0.0
        assert res.final == State(0.0, 0.3)

    def test_extinct_line_knowledge_drives_cooperation(self):
        res = run_to_steady_state(State(0.0, 0.3), FIG2, ALLEE, KF)
        assert res.converged
        assert res.final.R == 0.0
        assert res.final.x == pytest.approx(1.0, abs=1e-8)

    def test_converged_implies_norm_within_tol(self):
        cfg = IntegratorConfig()
        res = run_to_steady_state(State(0.5, 0.5), FIG2, ALLEE, REP, cfg)
        assert res.converged and res.rhs_norm <= cfg.conv_tol

    def test_agrees_with_integrate(self):
        for s0, p, rule in [
            (State(0.5, 0.5), FIG2, REP),
            (State(0.2, 0.5), FIG2, REP),
            (State(0.5, 0.5), FIG2, KF),
            (State(0.5, 0.5), STRONG, KF),
        ]:
            cfg = IntegratorConfig()
            a = integrate(s0, p, ALLEE, rule, cfg).final
            b = run_to_steady_state(s0, p, ALLEE, rule, cfg).final
            assert abs(a.R - b.R) <= cfg.conv_tol and abs(a.x - b.x) <= cfg.conv_tol

    def test_rejects_state_outside_unit_square(self):
        with pytest.raises(ValueError):
            run_to_steady_state(State(1.2, 0.5), FIG2, ALLEE, REP)


class TestBatchMatchesScalar:
    def test_batch_equals_scalar_bitwise(self):
        cfg = IntegratorConfig(dt=2e-3, t_max=80.0)
        rng = np.random.default_rng(11)
        R0 = rng.random(16)
        x0 = rng.random(16)
        for rule in (REP, KF):
            rhs = make_rhs(FIG2, ALLEE, rule)
            Rb, xb, conv = integrate_batch(R0, x0, rhs, cfg)
            for i in range(R0.size):
                res = run_to_steady_state(State(R0[i], x0[i]), FIG2, ALLEE, rule, cfg)
                assert Rb[i] == res.final.R
                assert xb[i] == res.final.x
                assert bool(conv[i]) == res.converged

    def test_masked_path_equals_shrunk_path(self):
        cfg = IntegratorConfig(dt=2e-3, t_max=60.0)
        rng = np.random.default_rng(5)
        R0, x0 = rng.random(12), rng.random(12)
        rhs = make_rhs(FIG2, ALLEE, REP)
        a = integrate_batch(R0, x0, rhs, cfg, shrink=True)
        b = integrate_batch(R0, x0, rhs, cfg, shrink=False)
        assert (a[0] == b[0]).all() and (a[1] == b[1]).all() and (a[2] == b[2]).all()
