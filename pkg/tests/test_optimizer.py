import math
import pickle

import numpy as np
import pytest

import costfree.optimizer as optimizer_module
from costfree import (
    OptResult,
    ParamSpace,
    PowellConfig,
    line_maximize,
    powell_maximize,
)

UNIT = ParamSpace(np.array([0.0]), np.array([1.0]))
UNIT2 = ParamSpace(np.zeros(2), np.ones(2))


class TestParamSpace:
    def test_contains(self):
        space = ParamSpace(np.zeros(2), np.ones(2), sum_upper=1.0)
        assert space.contains(np.array([0.3, 0.3]))
        assert not space.contains(np.array([0.6, 0.6]))
        assert not space.contains(np.array([-0.1, 0.2]))

    def test_zero_volume_rejected(self):
        with pytest.raises(ValueError):
            ParamSpace(np.array([0.6, 0.6]), np.ones(2), sum_upper=1.0)

    def test_sample_feasible(self):
        space = ParamSpace(np.zeros(3), np.ones(3), sum_upper=1.2)
        rng = np.random.default_rng(0)
        for _ in range(200):
            assert space.contains(space.sample(rng))

    def test_clip_restores_feasibility(self):
        space = ParamSpace(np.zeros(2), np.ones(2), sum_upper=1.0)
        clipped = space.clip(np.array([0.9, 0.9]))
        assert space.contains(clipped)
        inside = np.array([0.2, 0.3])
        assert np.array_equal(space.clip(inside), inside)

    def test_step_interval_matches_box(self):
        space = ParamSpace(np.zeros(2), np.ones(2))
        lo, hi = space.step_interval(np.array([0.5, 0.5]), np.array([1.0, 0.0]))
        assert lo == pytest.approx(-0.5)
        assert hi == pytest.approx(0.5)


class TestLineMaximize:
    def test_concave_quadratic(self):
        eta, value = line_maximize(lambda t: -((t - 0.5) ** 2), 0.0, 1.0)
        assert eta == pytest.approx(0.5, abs=1e-5)
        assert value == pytest.approx(0.0, abs=1e-9)

    def test_constant_objective(self):
        eta, value = line_maximize(lambda t: 4.2, 0.0, 1.0)
        assert value == 4.2
        assert 0.0 <= eta <= 1.0

    def test_step_function_lands_in_best_plateau(self):
        # best plateau is [0.4, 0.6); everything else is lower
        def stepped(t):
            if 0.4 <= t < 0.6:
                return 2.0
            if t < 0.4:
                return 1.0
            return 0.0

        eta, value = line_maximize(stepped, 0.0, 1.0)
        assert value == 2.0
        assert 0.4 <= eta < 0.6

    def test_degenerate_interval(self):
        eta, value = line_maximize(lambda t: -t * t, 0.5, 0.5)
        assert eta == pytest.approx(0.5)

    def test_nan_treated_as_minus_inf(self):
        def partial(t):
            return math.nan if t > 0.5 else t

        eta, value = line_maximize(partial, 0.0, 1.0)
        assert value == pytest.approx(0.5, abs=0.05)
        assert eta <= 0.5


class TestPowell:
    def test_one_dimensional_quadratic(self):
        cfg = PowellConfig(seed=1)
        result = powell_maximize(lambda x: -((x[0] - 0.3) ** 2), UNIT, cfg)
        assert result.best_params[0] == pytest.approx(0.3, abs=1e-4)

    def test_two_dimensional_quadratic(self):
        cfg = PowellConfig(seed=1)
        target = np.array([0.25, 0.6])
        result = powell_maximize(
            lambda x: -float(((x - target) ** 2).sum()), UNIT2, cfg
        )
        assert np.allclose(result.best_params, target, atol=1e-3)

    def test_three_dimensional_quadratic(self):
        cfg = PowellConfig(seed=3)
        space = ParamSpace(np.zeros(3), np.ones(3))
        target = np.array([0.7, 0.2, 0.5])
        result = powell_maximize(
            lambda x: -float(((x - target) ** 2).sum()), space, cfg
        )
        assert np.allclose(result.best_params, target, atol=1e-3)

    def test_maximum_on_boundary(self):
        cfg = PowellConfig(seed=2)
        result = powell_maximize(lambda x: float(x[0]), UNIT, cfg)
        assert result.best_params[0] == pytest.approx(1.0, abs=1e-6)

    def test_never_leaves_feasible_region(self):
        space = ParamSpace(np.zeros(3), np.full(3, 1.0 - 1e-9), sum_upper=2.0)
        seen = []

        def spy(x):
            seen.append(x.copy())
            return -float(((x - 0.4) ** 2).sum())

        powell_maximize(spy, space, PowellConfig(seed=0, restarts=2))
        assert seen
        for x in seen:
            assert space.contains(x)

    def test_best_at_least_every_start(self):
        def rugged(x):
            return float(np.sin(13 * x[0]) * np.cos(7 * x[1]))

        result = powell_maximize(rugged, UNIT2, PowellConfig(seed=5))
        for record in result.restarts_log:
            assert record.objective >= rugged(record.start) - 1e-12
        assert result.best_objective == max(
            r.objective for r in result.restarts_log
        )

    def test_fixed_seed_bit_identical(self):
        def objective(x):
            return -float(((x - 0.37) ** 2).sum())

        a = powell_maximize(objective, UNIT2, PowellConfig(seed=42))
        b = powell_maximize(objective, UNIT2, PowellConfig(seed=42))
        assert a.best_params.tobytes() == b.best_params.tobytes()
        assert a.best_objective == b.best_objective
        assert pickle.dumps(a.restarts_log) == pickle.dumps(b.restarts_log)

    def test_line_maximizations_per_iteration(self, monkeypatch):
        calls = []
        real = optimizer_module.line_maximize

        def counting(g, lo, hi, **kw):
            calls.append((lo, hi))
            return real(g, lo, hi, **kw)

        monkeypatch.setattr(optimizer_module, "line_maximize", counting)
        target = np.array([0.3, 0.7])
        cfg = PowellConfig(seed=0, restarts=1, max_iterations=1)
        powell_maximize(
            lambda x: -float(((x - target) ** 2).sum()), UNIT2, cfg
        )
        # dimension + 1 per iteration: two axis sweeps plus the displacement
        assert len(calls) == 3

    def test_one_dimensional_is_single_line_search(self, monkeypatch):
        calls = []
        real = optimizer_module.line_maximize

        def counting(g, lo, hi, **kw):
            calls.append(1)
            return real(g, lo, hi, **kw)

        monkeypatch.setattr(optimizer_module, "line_maximize", counting)
        cfg = PowellConfig(seed=0, restarts=1)
        powell_maximize(lambda x: -((x[0] - 0.3) ** 2), UNIT, cfg)
        assert len(calls) == 1

    def test_nan_objective_survives(self):
        def moody(x):
            return math.nan if x[0] > 0.8 else float(x[0])

        result = powell_maximize(moody, UNIT, PowellConfig(seed=0))
        assert 0.0 <= result.best_params[0] <= 0.8
        assert result.best_objective == pytest.approx(0.8, abs=1e-2)

    def test_trace_written(self, tmp_path):
        path = tmp_path / "trace.csv"
        powell_maximize(
            lambda x: -float(((x - 0.5) ** 2).sum()),
            UNIT2,
            PowellConfig(seed=0, restarts=2),
            trace_path=path,
        )
        lines = path.read_text().splitlines()
        assert lines[0] == "restart,iteration,p1,p2,objective"
        assert len(lines) > 2

    def test_result_type(self):
        result = powell_maximize(
            lambda x: 0.0, UNIT, PowellConfig(seed=0, restarts=2)
        )
        assert isinstance(result, OptResult)
        assert len(result.restarts_log) == 2


class TestConfigValidation:
    def test_bad_epsilon(self):
        with pytest.raises(ValueError):
            PowellConfig(epsilon=-1.0)

    def test_bad_restarts(self):
        with pytest.raises(ValueError):
            PowellConfig(restarts=0)

    def test_bad_iterations(self):
        with pytest.raises(ValueError):
            PowellConfig(max_iterations=0)
