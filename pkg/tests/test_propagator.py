import numpy as np
import pytest
from hypothesis import given, strategies as st

from fkdv.propagator import (BlowUpError, ModelParams, Stepper, StepperConfig, apply_group,
                             etd_coefficients, evolve, nonlinear_term, phi_contour, phi_direct, step)
from fkdv.spectral import Field, dealias_mask, make_grid, odd_wavenumber

from conftest import random_field, smooth_field

BO = ModelParams.single(1.0, 2, 1)


class TestModelParams:
    @pytest.mark.parametrize("kwargs", [
        dict(a=0.0, nonlinearities=((2, 1),)),
        dict(a=2.5, nonlinearities=((2, 1),)),
        dict(a=1.0, nonlinearities=()),
        dict(a=1.0, nonlinearities=((1, 1),)),
        dict(a=1.0, nonlinearities=((2.5, 1),)),
        dict(a=1.0, nonlinearities=((2, 2),)),
        dict(a=1.0, nonlinearities=((2, 1),), d=3),
    ])
    def test_rejects(self, kwargs):
        with pytest.raises(ValueError):
            ModelParams(**kwargs)

    def test_critical_weight(self):
        assert ModelParams.single(0.5, d=2).critical_weight == pytest.approx(2.5)

    def test_stepper_config_validation(self):
        with pytest.raises(ValueError):
            StepperConfig(dt=0.1, t_end=0.05)
        with pytest.raises(ValueError):
            StepperConfig(dt=0.01, t_end=1.0, scheme="euler")
        with pytest.raises(ValueError):
            StepperConfig(dt=0.01, t_end=1.0, dealias_fraction=0.0)
        with pytest.raises(ValueError):
            StepperConfig(dt=0.01, t_end=1.0, record_every=0)
        assert StepperConfig(dt=0.01, t_end=1.0).n_steps == 100


class TestLinearGroup:
    def test_zero_time_is_identity(self):
        f = random_field(make_grid(1, 32, 2.0))
        assert np.array_equal(apply_group(f, 0.0, 1.0).values, f.values)

    @given(st.integers(0, 2**31), st.floats(-100, 100), st.floats(0.05, 2.0), st.sampled_from([1, 2]))
    def test_unitary(self, seed, t, a, d):
        f = random_field(make_grid(d, 32, 5.0), seed)
        assert apply_group(f, t, a).l2_norm() == pytest.approx(f.l2_norm(), rel=1e-12)

    @given(st.integers(0, 2**31), st.floats(-10, 10), st.floats(-10, 10), st.floats(0.05, 2.0))
    def test_group_law(self, seed, t1, t2, a):
        f = random_field(make_grid(1, 64, 5.0), seed)
        lhs = apply_group(apply_group(f, t2, a), t1, a)
        rhs = apply_group(f, t1 + t2, a)
        assert np.max(np.abs(lhs.values - rhs.values)) < 1e-11 * max(1.0, np.max(np.abs(f.values)))

    @given(st.integers(0, 2**31), st.floats(-5, 5), st.sampled_from([1, 2]))
    def test_reflection_reverses_time(self, seed, t, d):
        f = random_field(make_grid(d, 32, 3.0), seed)
        lhs = apply_group(f.reflect(0), t, 0.7)
        rhs = apply_group(f, -t, 0.7).reflect(0)
        assert np.max(np.abs(lhs.values - rhs.values)) < 1e-11

    def test_preserves_other_moments_and_mass(self):
        g = make_grid(2, 64, 12.0)
        f = Field.from_function(g, lambda x, y: np.exp(-x**2 - (y - 1) ** 2))
        u = apply_group(f, 0.3, 1.0)
        assert u.integral() == pytest.approx(f.integral(), rel=1e-13)
        m2 = lambda v: np.sum(g.coords[1] * v.values) * g.cell_volume  # noqa: E731
        assert m2(u) == pytest.approx(m2(f), rel=1e-10)


class TestNonlinearTerm:
    def test_trig_identity(self):
        g = make_grid(1, 32, np.pi)
        out = nonlinear_term(Field.from_function(g, np.sin), BO)
        assert np.max(np.abs(out.values + np.sin(2 * g.x1d) / 2)) < 1e-13

    def test_zero(self):
        g = make_grid(2, 16, 1.0)
        assert not np.any(nonlinear_term(Field.zeros(g), ModelParams.single(1.0, 3, -1, d=2)).values)

    def test_cubic_matches_convolution_oracle(self):
        g = make_grid(1, 32, 2.0)
        u = random_field(g, 5)
        n = g.n
        mask = dealias_mask(g)
        c = u.coeffs * mask / n
        conv2 = np.array([sum(c[j] * c[(m - j) % n] for j in range(n)) for m in range(n)])
        conv3 = np.array([sum(conv2[j] * c[(m - j) % n] for j in range(n)) for m in range(n)])
        params = ModelParams.single(1.0, 3, -1)
        expected = -(-1 / 3) * 1j * odd_wavenumber(g, 0) * conv3 * n * mask
        got = nonlinear_term(u, params).coeffs
        assert np.max(np.abs(got - expected)) < 1e-10

    def test_amplitude_cap(self):
        g = make_grid(1, 16, 1.0)
        with pytest.raises(BlowUpError):
            nonlinear_term(Field.from_values(g, np.full(16, 10.0)), BO, max_amplitude=1.0)


class TestContourCoefficients:
    def test_limits_at_zero(self):
        q, f1, f2, f3 = phi_contour(np.zeros(1))
        assert q[0] == pytest.approx(0.5, abs=1e-14)
        for f in (f1, f2, f3):
            assert f[0] == pytest.approx(1 / 6, abs=1e-14)
        # Simpson-weight combination reproduces (e^z - 1)/z, equal to 1 at 0
        assert (f1 + 4 * f2 + f3)[0] == pytest.approx(1.0, abs=1e-14)

    @given(st.floats(-30, 30), st.floats(-30, 30))
    def test_conjugate_symmetry(self, re, im):
        z = np.array([complex(re, im)])
        for p, pc in zip(phi_contour(z), phi_contour(np.conj(z))):
            assert pc[0] == pytest.approx(np.conj(p[0]), rel=1e-12, abs=1e-15)

    def test_contour_matches_closed_form_far_from_zero(self):
        z = 10 * np.exp(1j * np.linspace(0, 2 * np.pi, 13))
        for c, d in zip(phi_contour(z), phi_direct(z)):
            assert np.max(np.abs(c - d)) < 1e-12

    def test_needs_enough_points(self):
        with pytest.raises(ValueError):
            phi_contour(np.zeros(1), points=16)

    def test_tables_are_conjugate_symmetric_over_the_lattice(self):
        g = make_grid(1, 64, 5.0)
        co = etd_coefficients(g, 1.0, 0.01)
        idx = (-np.arange(64)) % 64
        for tab in (co.exp_full, co.q, co.f1, co.f2, co.f3):
            assert np.max(np.abs(tab[idx] - np.conj(tab))) < 1e-15


class TestStep:
    @pytest.mark.parametrize("scheme", ["etdrk4", "ifrk4"])
    def test_linear_hook_is_exact_group(self, scheme):
        g = make_grid(1, 128, 10.0)
        u = random_field(g, 2)
        st_ = Stepper(g, BO, 0.05, scheme, nonlinear_scale=0.0)
        out = st_.step(u)
        ref = apply_group(u, 0.05, 1.0)
        assert np.max(np.abs(out.values - ref.values)) < 1e-12 * np.max(np.abs(u.values))

    @given(st.integers(0, 2**31), st.sampled_from([1, 2]), st.sampled_from(["etdrk4", "ifrk4"]))
    def test_conserves_zero_mode(self, seed, d, scheme):
        g = make_grid(d, 32, 4.0)
        u = smooth_field(g, seed, modes=4)
        params = ModelParams(0.8, ((2, 1), (3, -1)), d)
        out = step(u, 0.01, params, scheme)
        assert abs(out.coeffs.flat[0] - u.coeffs.flat[0]) <= 1e-12 * np.sum(np.abs(u.values))

    def test_stays_real(self):
        g = make_grid(1, 64, 4.0)
        u = smooth_field(g, 1)
        new = Stepper(g, ModelParams.single(1.0, 3, 1), 0.01).advance(u.coeffs)
        imag = np.fft.ifft(new).imag
        assert np.max(np.abs(imag)) < 1e-12 * np.max(np.abs(u.values))

    @pytest.mark.parametrize("scheme", ["etdrk4", "ifrk4"])
    def test_fourth_order_in_time(self, scheme):
        g = make_grid(1, 512, 40.0)
        u0 = Field.from_function(g, lambda x: 2 * np.exp(-x**2 / 4))

        def run(dt):
            return evolve(u0, BO, StepperConfig(dt, 2.0, scheme=scheme, record_every=10**6)).final

        ref = run(0.025 / 8)
        e1 = (run(0.05) - ref).l2_norm()
        e2 = (run(0.025) - ref).l2_norm()
        assert 12 < e1 / e2 < 20

    def test_schemes_agree(self):
        g = make_grid(1, 256, 20.0)
        u0 = Field.from_function(g, lambda x: np.exp(-x**2))
        cfg = dict(dt=0.002, t_end=0.5, record_every=1000)
        a = evolve(u0, BO, StepperConfig(**cfg)).final
        b = evolve(u0, BO, StepperConfig(scheme="ifrk4", **cfg)).final
        assert (a - b).l2_norm() < 1e-9

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            Stepper(make_grid(2, 16, 1.0), BO, 0.1)


class TestEvolve:
    def test_zero_data(self):
        g = make_grid(1, 64, 10.0)
        traj = evolve(Field.zeros(g), BO, StepperConfig(0.1, 1.0, record_every=2))
        assert not np.any(traj.final.values)
        assert len(traj.records) == 6
        for rec in traj.records:
            assert rec.I1 == rec.I2 == rec.sup_norm == 0.0
            assert all(v == 0.0 for v in rec.moments.values())

    def test_sink_and_record_times(self):
        g = make_grid(1, 64, 10.0)
        seen = []
        traj = evolve(Field.from_function(g, lambda x: np.exp(-x**2)), BO,
                      StepperConfig(0.05, 0.5, record_every=4), sink=seen.append)
        assert [r.t for r in seen] == pytest.approx([0.0, 0.2, 0.4])
        assert seen == traj.records
        assert traj.t_final == pytest.approx(0.5)

    @pytest.mark.slow
    def test_soliton_translates(self):
        # spacing 0.15 resolves the exponentially decaying spectrum of 4/(1+x^2)
        g = make_grid(1, 4096, 100 * np.pi)
        x = g.x1d
        u0 = Field.from_values(g, 4 / (1 + x**2))
        traj = evolve(u0, BO, StepperConfig(1e-3, 1.0, record_every=1000))
        exact = Field.from_values(g, 4 / (1 + (x - 1) ** 2))
        assert (traj.final - exact).l2_norm() < 1e-3

    def test_combined_nonlinearities_conserve_mass(self):
        g = make_grid(1, 1024, 64.0)
        params = ModelParams(1.0, ((2, 1), (3, 1)))
        u0 = Field.from_function(g, lambda x: 0.5 * np.exp(-x**2))
        traj = evolve(u0, params, StepperConfig(0.005, 1.0, record_every=200))
        drift = abs(traj.records[-1].I2 - traj.records[0].I2) / traj.records[0].I2
        assert drift < 1e-6

    def test_blowup_reports_time_and_records(self):
        g = make_grid(1, 512, 20.0)
        params = ModelParams.single(0.5, 5, 1)
        u0 = Field.from_function(g, lambda x: 3 * np.exp(-x**2))
        with pytest.raises(BlowUpError) as info:
            evolve(u0, params, StepperConfig(0.01, 2.0))
        assert 0 < info.value.t <= 2.0
        assert info.value.records and info.value.records[0].t == 0.0
