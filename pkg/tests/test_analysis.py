import numpy as np
import pytest

from dafd.analysis import (
    energy_identity_check,
    error_decay_table,
    rate_bound_check,
    verify_interpolation,
    zero_crossing_count,
)
from dafd.engine import EngineConfig, run_afd, run_mono_component
from dafd.errors import ContractError
from dafd.experiments import example2_class_bound
from dafd.kernels import normalized_kernel
from dafd.signals import grid_t

from conftest import kernel_combination, monomial

N = 512
CFG = EngineConfig(n_samples=N, max_terms=8)

# sign-change counts for the piecewise example at N=4096 on an 8192 grid,
# fixed by an oracle run; the bound is 4n
EX1_CROSSINGS = {1: 8, 2: 12, 3: 14, 4: 16, 5: 22}


class TestInterpolation:
    def test_exact_kernel(self):
        f = normalized_kernel(0.3 + 0.3j, N)
        d = run_afd(f, "double", CFG)
        report = verify_interpolation(f, d, 1)
        assert report.max_value_error < 1e-10
        assert report.max_derivative_error < 1e-9

    def test_z_one_term_closed_form(self):
        # S_1 = (1/2) e_a with a = 1/sqrt(2): S_1(a) = f(a) and S_1'(a) = f'(a)
        f = monomial(1, N)
        d = run_afd(f, "double", EngineConfig(n_samples=N, max_terms=1))
        report = verify_interpolation(f, d, 1)
        assert report.max_value_error < 1e-9
        assert report.max_derivative_error < 1e-8

    def test_example1_six_terms(self, ex1_fplus, ex1_double10):
        report = verify_interpolation(ex1_fplus, ex1_double10, 6)
        assert report.max_value_error <= 1e-7 * ex1_fplus.norm()

    def test_core_mode_values_only(self, ex2_signal, ex2_core8):
        report = verify_interpolation(ex2_signal, ex2_core8, 8)
        assert report.max_value_error <= 1e-7 * ex2_signal.norm()
        # derivative column is reported but carries no guarantee in core mode
        assert report.max_derivative_error >= 0.0

    def test_rejects_too_many_terms(self, ex2_double10):
        with pytest.raises(ContractError):
            verify_interpolation(
                normalized_kernel(0.1, ex2_double10.config.n_samples),
                ex2_double10,
                len(ex2_double10.terms) + 1,
            )


class TestEnergyIdentity:
    def test_exact_kernel(self):
        f = normalized_kernel(0.5 - 0.2j, N)
        d = run_afd(f, "double", CFG)
        assert energy_identity_check(f, d) < 1e-12

    def test_z_one_term(self):
        f = monomial(1, N)
        d = run_afd(f, "double", EngineConfig(n_samples=N, max_terms=1))
        # 1 = 1/4 + 3/4
        assert energy_identity_check(f, d) <= 1e-12

    def test_example2_ten_terms(self, ex2_signal, ex2_double10):
        assert energy_identity_check(ex2_signal, ex2_double10) <= 1e-8

    def test_mono_mode(self):
        rng = np.random.default_rng(3)
        params = 0.6 * (rng.uniform(-1, 1, 3) + 1j * rng.uniform(-1, 1, 3))
        f = kernel_combination(params, [1.0, -0.5j, 0.25], N)
        d = run_mono_component(f, CFG)
        assert energy_identity_check(f, d) <= 1e-8


class TestRateBound:
    def test_single_kernel(self):
        f = normalized_kernel(0.4, N)
        d = run_afd(f, "double", CFG)
        rows = rate_bound_check(f, d, 1.0)
        assert all(r.passed for r in rows)

    def test_two_kernel_combination(self):
        # 0.6 e_b1 + 0.4 e_b2 lies in the unit-bound class
        b1, b2 = 0.2 + 0.1j, -0.4
        samples = (
            0.6 * normalized_kernel(b1, N).samples
            + 0.4 * normalized_kernel(b2, N).samples
        )
        from dafd.signals import BoundarySignal

        f = BoundarySignal(samples)
        d = run_afd(f, "double", EngineConfig(n_samples=N, max_terms=2))
        rows = rate_bound_check(f, d, 1.0)
        assert len(rows) >= 2 and all(r.passed for r in rows)

    def test_example2_class_bound(self, ex2_signal, ex2_double10):
        bound = example2_class_bound()
        assert bound == pytest.approx(4.351, abs=5e-4)
        rows = rate_bound_check(ex2_signal, ex2_double10, bound)
        assert [r.n for r in rows] == list(range(1, 11))
        assert all(r.passed for r in rows)

    def test_rejects_bound_below_norm(self, ex2_signal, ex2_double10):
        with pytest.raises(ContractError):
            rate_bound_check(ex2_signal, ex2_double10, 0.1)


class TestZeroCrossings:
    def test_cosine_one_term(self):
        x = np.cos(grid_t(N))
        from dafd.signals import project_real

        fplus, _ = project_real(x)
        d = run_afd(fplus, "double", EngineConfig(n_samples=N, max_terms=1))
        assert zero_crossing_count(x, d, 1, fine_n=2048) >= 4

    def test_example1_counts(self, ex1_real, ex1_double10):
        for n, expected in EX1_CROSSINGS.items():
            count = zero_crossing_count(ex1_real, ex1_double10, n)
            assert count == expected
            assert count >= 4 * n

    def test_n_zero_demeaned(self, ex1_real, ex1_double10):
        # no lower bound is claimed at n = 0; the count is of f minus its mean
        count = zero_crossing_count(ex1_real, ex1_double10, 0)
        assert count == EX1_CROSSINGS[1] == 8

    def test_rejects_coarse_fine_grid(self, ex1_real, ex1_double10):
        with pytest.raises(ContractError):
            zero_crossing_count(ex1_real, ex1_double10, 1, fine_n=2048)


class TestErrorDecay:
    def test_kernel_exact_at_one_term(self):
        f = normalized_kernel(0.35 - 0.1j, N)
        rows = error_decay_table(f, ("core", "double"), 3, CFG)
        for mode in ("core", "double"):
            first = [r for r in rows if r.mode == mode][0]
            assert first.relative_l2_error < 1e-8

    def test_unit_kernel_exact_for_every_mode(self):
        # e_0 is the constant, which every mode captures with its first term
        f = normalized_kernel(0.0, N)
        rows = error_decay_table(f, ("core", "double", "mono"), 2, CFG)
        for mode in ("core", "double", "mono"):
            first = [r for r in rows if r.mode == mode][0]
            assert first.relative_l2_error < 1e-8

    def test_rows_monotone(self, ex2_signal):
        cfg = EngineConfig(max_terms=6)
        rows = error_decay_table(ex2_signal, ("core", "double"), 6, cfg)
        for mode in ("core", "double"):
            errors = [r.relative_l2_error for r in rows if r.mode == mode]
            assert all(b <= a + 1e-12 for a, b in zip(errors, errors[1:]))

    def test_reports_are_pure(self):
        f = kernel_combination([0.3, -0.2j], [1.0, 0.5], N)
        cfg = EngineConfig(n_samples=N, max_terms=4)
        first = error_decay_table(f, ("double",), 4, cfg)
        second = error_decay_table(f, ("double",), 4, cfg)
        assert [(r.n, r.mode, r.relative_l2_error) for r in first] == [
            (r.n, r.mode, r.relative_l2_error) for r in second
        ]
