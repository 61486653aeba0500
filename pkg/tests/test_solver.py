import math

import numpy as np
import pytest

from gnormal import (
    CFLError,
    Field,
    GFunction,
    Grid,
    PhiParams,
    Schedule,
    SolveConfig,
    convergence_study,
    phi_eval,
    rescale_to_canonical,
    solve,
    step_explicit,
)

TWO_PI = 2.0 * math.pi


def periodic_grid(n=256):
    return Grid(0.0, TWO_PI, n, "periodic")


def random_trig_field(grid, rng, amp=1.0):
    x = grid.nodes()
    v = np.zeros_like(x)
    for k in range(1, 4):
        v += rng.uniform(-amp, amp) * np.cos(k * x + rng.uniform(0, TWO_PI))
    return Field(grid, v)


class TestGridField:
    def test_grid_validation(self):
        with pytest.raises(ValueError):
            Grid(0.0, 1.0, 4)
        with pytest.raises(ValueError):
            Grid(1.0, 0.0, 64)
        with pytest.raises(ValueError):
            Grid(0.0, 1.0, 64, "mirror")

    def test_field_validation(self):
        g = periodic_grid(16)
        with pytest.raises(ValueError):
            Field(g, np.zeros(8))
        with pytest.raises(ValueError):
            Field(g, np.full(16, np.nan))

    def test_interpolation_hits_nodes(self):
        g = periodic_grid(64)
        f = Field.sample(g, np.cos)
        assert f.at(g.nodes()[10]) == pytest.approx(f.values[10], abs=1e-12)
        # periodic wrap
        assert f.at(g.nodes()[10] + TWO_PI) == pytest.approx(f.values[10], abs=1e-10)


class TestStepExplicit:
    def test_constant_preserved_exactly(self):
        g = periodic_grid(64)
        f = Field(g, np.full(64, 3.25))
        out = step_explicit(f, GFunction(1.0, 2.0), 1e-4)
        assert np.array_equal(out.values, f.values)

    def test_cfl_violation_raises(self):
        g = periodic_grid(64)
        f = Field.sample(g, np.cos)
        dx = g.dx
        with pytest.raises(CFLError):
            step_explicit(f, GFunction(1.0, 2.0), 1.01 * dx * dx / 4.0)

    def test_classical_stencil_when_bounds_equal(self):
        sigma = 1.7
        g = periodic_grid(64)
        f = random_trig_field(g, np.random.default_rng(0))
        dt = 0.4 * g.dx**2 / sigma**2
        out = step_explicit(f, GFunction(sigma, sigma), dt)
        v = f.values
        lap = (np.roll(v, -1) - 2.0 * v + np.roll(v, 1)) / g.dx**2
        expected = v + dt * 0.5 * sigma**2 * lap
        assert np.allclose(out.values, expected, atol=1e-14)

    def test_monotone_update(self):
        rng = np.random.default_rng(7)
        grid = periodic_grid(64)
        g = GFunction(0.7, 1.9)
        dt = 0.9 * grid.dx**2 / g.sigma_hi**2
        for _ in range(100):
            f = random_trig_field(grid, rng)
            h = Field(grid, f.values + rng.uniform(0.0, 1.0, grid.n))
            out_f = step_explicit(f, g, dt)
            out_h = step_explicit(h, g, dt)
            assert np.all(out_h.values - out_f.values >= -1e-12)

    def test_edge_copy_boundary_zeroes_second_difference(self):
        grid = Grid(-1.0, 1.0, 32, "edge_copy")
        f = Field.sample(grid, lambda x: x)  # linear, zero interior curvature
        out = step_explicit(f, GFunction(1.0, 1.0), 1e-4)
        assert np.allclose(out.values, f.values, atol=1e-12)


class TestSolve:
    def test_constant_initial_data(self):
        grid = periodic_grid(64)
        f = Field(grid, np.full(64, 7.0))
        rep = solve(Schedule(((GFunction(1.0, 2.0), 0.5), (GFunction(1.0, 3.0), 0.5))), f)
        assert np.array_equal(rep.final.values, f.values)
        assert rep.steps_taken >= 2

    def test_eigen_decay(self):
        grid = periodic_grid(512)
        f = Field.sample(grid, lambda x: phi_eval(2.0, x))
        rep = solve(Schedule.single(GFunction(1.0, 2.0), 1.0), f)
        exact = math.exp(-1.125) * phi_eval(2.0, grid.nodes())
        assert np.max(np.abs(rep.final.values - exact)) <= 1e-3

    def test_classical_heat_equation(self):
        grid = periodic_grid(512)
        f = Field.sample(grid, np.cos)
        rep = solve(Schedule.single(GFunction(1.0, 1.0), 1.0), f)
        assert rep.final.at(0.0) == pytest.approx(math.exp(-0.5), abs=5e-4)

    def test_lands_exactly_on_segment_boundaries(self):
        grid = periodic_grid(64)
        f = Field.sample(grid, np.cos)
        schedule = Schedule(((GFunction(1.0, 1.0), 0.37), (GFunction(1.0, 2.0), 0.13)))
        rep = solve(schedule, f)
        total_steps = 0
        for (g, dur), dt in zip(schedule.segments, rep.dt_used):
            assert dt <= 0.5 * grid.dx**2 / g.sigma_hi**2 * (1.0 + 1e-12)
            n_steps = round(dur / dt)
            assert n_steps * dt == pytest.approx(dur, rel=1e-14)
            total_steps += n_steps
        assert total_steps == rep.steps_taken

    def test_two_grid_error_estimate_bounds_error(self):
        grid = periodic_grid(512)
        f = Field.sample(grid, lambda x: phi_eval(2.0, x))
        rep = solve(Schedule.single(GFunction(1.0, 2.0), 1.0), f,
                    SolveConfig(0.5, record_error_estimate=True))
        exact = math.exp(-1.125) * phi_eval(2.0, grid.nodes())
        actual = np.max(np.abs(rep.final.values - exact))
        assert rep.error_estimate is not None and rep.error_estimate >= 0.0
        assert actual <= 2.0 * rep.error_estimate + 1e-12

    def test_deterministic_rerun(self):
        grid = periodic_grid(128)
        f = random_trig_field(grid, np.random.default_rng(3))
        r1 = solve(Schedule.single(GFunction(1.0, 2.0), 0.2), f)
        r2 = solve(Schedule.single(GFunction(1.0, 2.0), 0.2), f)
        assert np.array_equal(r1.final.values, r2.final.values)


class TestSolveProperties:
    schedule = Schedule(((GFunction(0.8, 1.6), 0.11), (GFunction(1.0, 2.0), 0.09)))

    def test_comparison_principle(self):
        rng = np.random.default_rng(11)
        grid = periodic_grid(128)
        for _ in range(20):
            f = random_trig_field(grid, rng)
            h = Field(grid, f.values + rng.uniform(0.0, 0.5, grid.n))
            uf = solve(self.schedule, f).final.values
            uh = solve(self.schedule, h).final.values
            assert np.all(uh - uf >= -1e-10)

    def test_cash_invariance(self):
        grid = periodic_grid(128)
        f = random_trig_field(grid, np.random.default_rng(5))
        shifted = Field(grid, f.values + 4.5)
        u = solve(self.schedule, f).final.values
        us = solve(self.schedule, shifted).final.values
        assert np.allclose(us, u + 4.5, atol=1e-10)

    def test_positive_homogeneity(self):
        grid = periodic_grid(128)
        f = random_trig_field(grid, np.random.default_rng(6))
        lam = 2.75
        u = solve(self.schedule, f).final.values
        ul = solve(self.schedule, Field(grid, lam * f.values)).final.values
        assert np.allclose(ul, lam * u, atol=1e-10)

    def test_sublinearity(self):
        rng = np.random.default_rng(8)
        grid = periodic_grid(128)
        f = random_trig_field(grid, rng)
        h = random_trig_field(grid, rng)
        u_sum = solve(self.schedule, Field(grid, f.values + h.values)).final.values
        u_f = solve(self.schedule, f).final.values
        u_h = solve(self.schedule, h).final.values
        assert np.all(u_sum <= u_f + u_h + 1e-10)

    def test_max_principle(self):
        rng = np.random.default_rng(9)
        grid = periodic_grid(128)
        f = random_trig_field(grid, rng)
        u = solve(self.schedule, f).final.values
        assert np.min(u) >= np.min(f.values) - 1e-10
        assert np.max(u) <= np.max(f.values) + 1e-10


class TestRescaleToCanonical:
    def test_identity_and_scaling(self):
        s = Schedule.single(GFunction(1.0, 1.0), 1.0)
        p, s1 = rescale_to_canonical(PhiParams(2.0, 1.0, 1.0, 0.3), s)
        assert p.c == 1.0 and s1.total_duration == pytest.approx(1.0)
        _, s2 = rescale_to_canonical(PhiParams(2.0, 1.0, 2.0, 0.0), s)
        assert s2.total_duration == pytest.approx(4.0)
        _, s3 = rescale_to_canonical(PhiParams(2.0, 1.0, -1.0, 0.0), s)
        assert s3.total_duration == pytest.approx(1.0)

    def test_zero_frequency_rejected(self):
        with pytest.raises(ValueError):
            rescale_to_canonical(PhiParams(2.0, 1.0, 0.0, 0.0),
                                 Schedule.single(GFunction(1.0, 1.0), 1.0))

    @pytest.mark.parametrize("c", [2.0, -1.0])
    def test_matches_direct_solve(self, c):
        g = GFunction(1.0, 2.0)
        t, theta, x_eval = 0.25, 0.4, 0.7
        p = PhiParams(2.0, 1.0, c, theta)
        # direct: solve on one period of the scaled initial data
        period = TWO_PI / abs(c)
        grid_d = Grid(0.0, period, 1024, "periodic")
        init_d = Field.sample(grid_d, lambda y: phi_eval(2.0, c * y + theta))
        direct = solve(Schedule.single(g, t), init_d).final.at(x_eval)
        # canonical: scaled durations, evaluation at c*x + theta
        canon, sched = rescale_to_canonical(p, Schedule.single(g, t))
        grid_c = Grid(0.0, TWO_PI, 1024, "periodic")
        init_c = Field.sample(grid_c, lambda y: canon.lam * phi_eval(canon.beta, y))
        canonical = solve(sched, init_c).final.at(c * x_eval + theta)
        assert canonical == pytest.approx(direct, abs=1e-6)


class TestConvergenceStudy:
    def test_eigen_problem_order(self):
        g = GFunction(1.0, 2.0)
        decay = math.exp(-1.125)
        study = convergence_study(
            Schedule.single(g, 1.0),
            lambda x: phi_eval(2.0, x),
            [64, 128, 256],
            exact_fn=lambda x: decay * phi_eval(2.0, x),
        )
        errs = [e for _, e in study.points]
        assert errs[0] > errs[1] > errs[2]
        assert all(o >= 1.0 for o in study.orders)

    def test_classical_problem_second_order(self):
        g = GFunction(1.0, 1.0)
        decay = math.exp(-0.5)
        study = convergence_study(
            Schedule.single(g, 1.0), np.cos, [64, 128, 256],
            exact_fn=lambda x: decay * np.cos(x),
        )
        assert all(1.7 <= o <= 2.3 for o in study.orders)

    def test_constant_data_zero_error(self):
        study = convergence_study(
            Schedule.single(GFunction(1.0, 2.0), 0.5),
            lambda x: np.full_like(x, 3.0),
            [64, 128],
            exact_fn=lambda x: np.full_like(x, 3.0),
        )
        assert all(e == 0.0 for _, e in study.points)

    def test_finest_as_reference(self):
        study = convergence_study(
            Schedule.single(GFunction(1.0, 2.0), 0.5),
            lambda x: phi_eval(2.0, x),
            [64, 128, 256],
        )
        assert len(study.points) == 2
        assert study.points[0][1] > study.points[1][1] > 0.0
