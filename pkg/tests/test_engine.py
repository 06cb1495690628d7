import dataclasses

import numpy as np
import pytest
from numpy.polynomial import polynomial as npoly

from dafd.engine import (
    EngineConfig,
    core_step,
    decompose,
    double_step,
    grid_select,
    higher_order_condition,
    higher_order_step,
    objective,
    partial_sum,
    refine_stationary,
    run_afd,
    run_higher_order,
    run_mono_component,
)
from dafd.errors import ContractError, DomainError
from dafd.kernels import BasisSpec, basis_eval, moebius_boundary, normalized_kernel
from dafd.signals import (
    BoundarySignal,
    boundary_z,
    eval_deriv_disc,
    eval_disc,
    inner_product,
)

from conftest import kernel_combination, monomial

N = 256
CFG = EngineConfig(n_samples=N, max_terms=8)
SQ2 = 1.0 / np.sqrt(2.0)


def constant(value, n=N):
    return BoundarySignal(np.full(n, value, dtype=np.complex128))


def random_rational(rng, n=N, n_kernels=4, radius=0.7):
    params, coeffs = [], []
    for _ in range(n_kernels):
        a = complex(*(rng.uniform(-1, 1, 2)))
        params.append(radius * a / max(abs(a), 1.0))
        coeffs.append(complex(*(rng.standard_normal(2))))
    return kernel_combination(params, coeffs, n)


class TestObjective:
    def test_kernel_equality_case(self):
        b = 0.4 + 0.2j
        assert objective(normalized_kernel(b, N), b) == pytest.approx(1.0, rel=1e-12)

    def test_identity_closed_form(self):
        z = monomial(1, N)
        for a in (0.3, 0.5 - 0.2j, -0.6j):
            assert objective(z, a) == pytest.approx(
                (1 - abs(a) ** 2) * abs(a) ** 2, rel=1e-12
            )
        assert objective(z, SQ2) == pytest.approx(0.25, rel=1e-12)

    def test_constant_at_origin(self):
        assert objective(constant(1.0), 0.0) == pytest.approx(1.0)

    def test_matches_inner_product(self):
        rng = np.random.default_rng(21)
        f = random_rational(rng)
        for _ in range(5):
            a = complex(*(0.5 * rng.standard_normal(2)))
            a = 0.9 * a / max(abs(a), 1.0)
            via_product = abs(inner_product(f, normalized_kernel(a, N))) ** 2
            assert objective(f, a) == pytest.approx(via_product, rel=1e-10)

    def test_domain_error(self):
        with pytest.raises(DomainError):
            objective(constant(1.0), 1.01)


def exhaustive_grid_argmax(f, config):
    """Independent scalar-evaluation oracle with the documented tie-break:
    smallest angle index first, then smallest radius index."""
    radii = np.arange(config.grid_radii) / config.grid_radii * config.r_max
    angles = 2 * np.pi * np.arange(config.grid_angles) / config.grid_angles
    values = np.empty((config.grid_radii, config.grid_angles))
    for j, r in enumerate(radii):
        for i, theta in enumerate(angles):
            values[j, i] = objective(f, r * np.exp(1j * theta), config.r_max)
    best = values.max()
    tied = np.argwhere(values >= best * (1 - 1e-12))
    order = np.lexsort((tied[:, 0], tied[:, 1]))
    j, i = tied[order[0]]
    return complex(radii[j] * np.exp(1j * angles[i]))


class TestGridSelect:
    def test_kernel_peak(self):
        b = 0.55 - 0.15j
        sel = grid_select(normalized_kernel(b, N), CFG)
        assert sel.objective >= 0.99
        assert abs(sel.a - b) < 0.05

    def test_constant_selects_origin(self):
        sel = grid_select(constant(1.0), CFG)

        assert sel.a == 0.0
        assert sel.objective == pytest.approx(1.0)

    def test_z_selects_real_axis(self):
        sel = grid_select(monomial(1, N), CFG)
        # whole circle of maximizers; tie-break picks angle index 0
        assert sel.a.imag == 0.0 and sel.a.real > 0
        radii = np.arange(CFG.grid_radii) / CFG.grid_radii * CFG.r_max
        expected = radii[np.argmax((1 - radii**2) * radii**2)]
        assert sel.a.real == pytest.approx(expected)

    def test_zero_signal(self):
        assert grid_select(constant(0.0), CFG) is None

    def test_matches_exhaustive_scan(self):
        rng = np.random.default_rng(17)
        coarse = dataclasses.replace(CFG, grid_radii=16, grid_angles=32)
        for _ in range(20):
            f = random_rational(rng)
            sel = grid_select(f, coarse)
            assert sel.a == exhaustive_grid_argmax(f, coarse)

    def test_parallel_evaluation_is_deterministic(self, monkeypatch):
        rng = np.random.default_rng(19)
        f = random_rational(rng)
        serial = grid_select(f, CFG)
        threaded = grid_select(f, dataclasses.replace(CFG, threads=3))
        assert serial.a == threaded.a
        assert serial.objective == threaded.objective
        monkeypatch.setenv("DAFD_THREADS", "4")
        via_env = grid_select(f, CFG)
        assert via_env.a == serial.a


class TestRefine:
    def test_constant_converges_to_origin(self):
        sel = refine_stationary(constant(1.0), 0.1 + 0.1j, CFG)
        assert sel.refined
        assert abs(sel.a) < 1e-10

    def test_z_converges_to_circle(self):
        sel = refine_stationary(monomial(1, N), 0.7, CFG)
        assert sel.refined
        assert abs(abs(sel.a) - SQ2) < 1e-9

    def test_kernel_recovers_parameter(self):
        b = 0.2 + 0.2j
        f = normalized_kernel(b, N)
        seed = grid_select(f, CFG).a
        sel = refine_stationary(f, seed, CFG)
        assert sel.refined
        assert abs(sel.a - b) < 1e-9
        assert sel.objective >= objective(f, seed) - 1e-15

    def test_stationarity_residual_small(self):
        rng = np.random.default_rng(23)
        f = random_rational(rng)
        sel = refine_stationary(f, grid_select(f, CFG).a, CFG)
        assert sel.stationarity_residual <= 1e-9 * f.norm()

    def test_zero_value_seed_rejected(self):
        with pytest.raises(ContractError):
            refine_stationary(monomial(1, N), 0.0, CFG)


class TestCoreStep:
    def test_exact_kernel(self):
        b = 0.3 + 0.4j
        f = normalized_kernel(b, N)
        step = core_step(f, b, inner_product(f, f), CFG)
        assert step.remainder.norm() < 1e-12

    def test_z_at_origin(self):
        step = core_step(monomial(1, N), 0.0, 0.0, CFG)
        assert np.allclose(step.remainder.samples, 1.0)

    def test_z_squared_shifts(self):
        step = core_step(monomial(2, N), 0.0, 0.0, CFG)
        assert np.allclose(step.remainder.samples, boundary_z(N))

    def test_aliasing_diagnostic_near_boundary(self):
        from dafd.kernels import szego_boundary

        n = 64
        f = BoundarySignal(boundary_z(n) * szego_boundary(0.9, n).samples)
        step = core_step(f, 0.0, 0.0, EngineConfig(n_samples=n))
        assert any("aliasing" in d for d in step.diagnostics)


def brute_force_double_remainder(a, c, n):
    """Polynomial-arithmetic oracle for (z - c e_a) / phi_a^2, valid when the
    numerator's power series terminates quickly.  Division by (z - a) is done
    twice by synthetic division; the (1 - conj(a) z)^2 factor multiplies back.
    """
    degree = 200
    num = -c * np.sqrt(1 - abs(a) ** 2) * np.conj(a) ** np.arange(degree)
    num[1] += 1.0
    for _ in range(2):
        quotient = np.zeros(degree, dtype=np.complex128)
        rem = 0.0
        for k in range(degree - 1, -1, -1):
            quotient[k] = rem
            rem = num[k] + rem * a
        assert abs(rem) < 1e-12
        num = quotient
    back = npoly.polymul(num, npoly.polymul([1, -np.conj(a)], [1, -np.conj(a)]))
    spec = np.zeros(n, dtype=np.complex128)
    spec[: min(len(back), n // 2)] = back[: min(len(back), n // 2)]
    return BoundarySignal.from_spectrum(spec)


class TestDoubleStep:
    def test_exact_kernel(self):
        b = 0.3 + 0.4j
        f = normalized_kernel(b, N)
        step = double_step(f, b, inner_product(f, f), CFG)
        assert step.remainder.norm() < 1e-12

    def test_worked_example(self):
        f = monomial(1, N)
        c = inner_product(f, normalized_kernel(SQ2, N))
        assert c == pytest.approx(0.5, abs=1e-12)
        step = double_step(f, SQ2, c, CFG)
        spec = step.remainder.spectrum
        assert spec[0] == pytest.approx(-np.sqrt(2) / 2, abs=1e-12)
        assert spec[1] == pytest.approx(0.5, abs=1e-12)
        assert np.max(np.abs(spec[2:])) < 1e-12
        assert step.remainder.energy() == pytest.approx(0.75, abs=1e-12)
        assert step.leakage < 1e-20

    def test_worked_example_against_polynomial_oracle(self):
        f = monomial(1, N)
        c = inner_product(f, normalized_kernel(SQ2, N))
        step = double_step(f, SQ2, c, CFG)
        oracle = brute_force_double_remainder(SQ2, c, N)
        assert np.max(np.abs(step.remainder.samples - oracle.samples)) < 1e-10

    def test_nonstationary_parameter_leaks(self):
        f = monomial(1, N)
        a = 0.3
        c = inner_product(f, normalized_kernel(a, N))
        step = double_step(f, a, c, CFG)
        assert step.leakage > CFG.leak_tol * f.energy()
        assert any("leak" in d for d in step.diagnostics)

    def test_energy_identity(self):
        rng = np.random.default_rng(31)
        for _ in range(4):
            f = random_rational(rng)
            sel = refine_stationary(f, grid_select(f, CFG).a, CFG)
            c = inner_product(f, normalized_kernel(sel.a, N))
            step = double_step(f, sel.a, c, CFG)
            identity = f.energy() - abs(c) ** 2 - step.leakage
            assert step.remainder.energy() == pytest.approx(identity, rel=1e-10)


class TestRunAfd:
    @pytest.mark.parametrize("mode", ["core", "double"])
    def test_single_kernel(self, mode):
        b = 0.55 - 0.15j
        f = normalized_kernel(b, N)
        d = run_afd(f, mode, CFG)
        assert len(d.terms) == 1
        assert abs(d.terms[0].a - b) < 1e-8
        assert abs(d.terms[0].c) == pytest.approx(1.0, abs=1e-9)
        assert d.terms[0].residual_energy_after < 1e-12

    def test_z_double_first_term(self):
        d = run_afd(monomial(1, N), "double", dataclasses.replace(CFG, max_terms=1))
        term = d.terms[0]
        assert abs(term.a) == pytest.approx(SQ2, abs=1e-9)
        assert abs(term.c) == pytest.approx(0.5, abs=1e-10)
        assert term.residual_energy_after == pytest.approx(0.75, abs=1e-10)

    def test_residuals_strictly_decrease(self, ex2_double10):
        energies = ex2_double10.residual_energies
        assert np.all(np.diff(energies) < 0)

    def test_double_beats_core_at_equal_terms(self, ex2_double10, ex2_core8):
        double = ex2_double10.relative_errors()[:8]
        core = ex2_core8.relative_errors()
        assert np.all(double <= core * (1 + 1e-9))

    def test_rejects_unknown_mode(self):
        with pytest.raises(ContractError):
            run_afd(constant(1.0), "mono", CFG)


class TestMonoComponent:
    def test_constant(self):
        d = run_mono_component(constant(2.0), CFG)
        assert len(d.terms) == 1
        assert d.terms[0].a == 0
        assert d.terms[0].c == pytest.approx(2.0)
        assert d.terms[0].residual_energy_after < 1e-24

    def test_z_exact_in_two_terms(self):
        d = run_mono_component(monomial(1, N), CFG)
        assert len(d.terms) == 2
        assert d.terms[0].a == 0 and abs(d.terms[0].c) < 1e-13
        assert abs(d.terms[1].a) < 1e-9
        assert abs(d.terms[1].c) == pytest.approx(1.0, abs=1e-9)
        assert d.terms[1].residual_energy_after < 1e-18

    def test_energy_identity_on_kernel_mix(self):
        rng = np.random.default_rng(37)
        f = random_rational(rng)
        d = run_mono_component(f, dataclasses.replace(CFG, max_terms=10))
        total = np.sum(np.abs(d.coefficients) ** 2) + d.terms[-1].residual_energy_after
        assert total == pytest.approx(f.energy(), rel=1e-8)


class TestHigherOrder:
    def test_condition_trivial(self):
        assert higher_order_condition(constant(1.0), 0.0, 1) == 0

    def test_condition_z_closed_form(self):
        f = monomial(1, N)
        for a in (0.2, 0.5j, 0.6 - 0.3j):
            got = higher_order_condition(f, a, 1)
            assert got == pytest.approx(1 - 2 * abs(a) ** 2, abs=1e-12)

    def test_condition_z2_closed_form(self):
        f = monomial(2, N)
        for a in (0.3, 0.4 + 0.2j):
            got = higher_order_condition(f, a, 2)
            assert got == pytest.approx(1 - 3 * abs(a) ** 2, abs=1e-12)

    def test_step_kernel_any_order(self):
        b = 0.35 - 0.2j
        f = normalized_kernel(b, N)
        for order in (1, 2, 3):
            term, remainder = higher_order_step(f, b, order, CFG)
            assert remainder.norm() < 1e-10
            assert abs(term.c) == pytest.approx(1.0, abs=1e-10)

    def test_step_refuses_unmet_conditions(self):
        with pytest.raises(ContractError):
            higher_order_step(monomial(1, N), 0.3, 1, CFG)

    def test_z2_order2_has_no_common_root(self):
        # scan: order-1 and order-2 conditions never vanish together
        f = monomial(2, N)
        radii = np.linspace(0, 0.99, 60)
        angles = np.linspace(0, 2 * np.pi, 60, endpoint=False)
        best = np.inf
        for r in radii:
            for theta in angles:
                a = r * np.exp(1j * theta)
                worst = max(
                    abs(higher_order_condition(f, a, 1)),
                    abs(higher_order_condition(f, a, 2)),
                )
                best = min(best, worst)
        assert best > 1e-3
        d = run_higher_order(f, 2, CFG)
        assert len(d.terms) == 0
        assert any("stopping" in x for x in d.diagnostics)

    def test_order1_path_matches_double_step_bitwise(self):
        f = monomial(1, N)
        a = SQ2
        c = inner_product(f, normalized_kernel(a, N))
        step = double_step(f, a, c, CFG)
        term, remainder = higher_order_step(f, a, 1, CFG)
        assert term.c == c
        assert np.array_equal(remainder.samples, step.remainder.samples)
        assert term.leakage == step.leakage


class TestPartialSum:
    def test_zero_terms(self, ex2_double10):
        s = partial_sum(ex2_double10, 0)
        assert s.norm() == 0.0

    def test_one_kernel(self):
        b = 0.4 + 0.1j
        f = normalized_kernel(b, N)
        d = run_afd(f, "double", CFG)
        s = partial_sum(d, 1)
        assert np.max(np.abs(s.samples - f.samples)) < 1e-8

    def test_residual_matches_trace(self, ex2_signal, ex2_double10):
        n = len(ex2_double10.terms)
        s = partial_sum(ex2_double10, n)
        residual = BoundarySignal(ex2_signal.samples - s.samples).energy()
        assert residual == pytest.approx(
            ex2_double10.terms[-1].residual_energy_after,
            rel=1e-8,
            abs=1e-8 * ex2_signal.energy(),
        )


class TestStructuralIdentities:
    def test_coefficient_identity_two_paths(self, ex2_signal, ex2_double10):
        # chain inner products against direct projections onto the basis
        params = tuple(ex2_double10.parameters)
        nrm2 = ex2_signal.energy()
        for k in range(1, len(params) + 1):
            basis = basis_eval(BasisSpec(params[:k], "dtm"), ex2_signal.n_samples)
            direct = inner_product(ex2_signal, basis)
            chained = ex2_double10.terms[k - 1].c
            assert abs(direct - chained) <= 1e-8 * max(abs(direct), np.sqrt(nrm2))

    def test_remainder_factorization(self):
        # f - S_{k-1} equals the double-reduced remainder times the squared
        # Blaschke product of the consumed parameters, pointwise
        rng = np.random.default_rng(41)
        f = random_rational(rng)
        d = run_afd(f, "double", dataclasses.replace(CFG, max_terms=4))
        remainder = f
        product = np.ones(N, dtype=np.complex128)
        for k, term in enumerate(d.terms):
            tail = BoundarySignal(f.samples - partial_sum(d, k).samples)
            recombined = remainder.samples * product
            assert np.max(np.abs(tail.samples - recombined)) <= 1e-8 * f.norm()
            c = inner_product(remainder, normalized_kernel(term.a, N))
            remainder = double_step(remainder, term.a, c, CFG).remainder
            product *= moebius_boundary(term.a, N).samples ** 2

    def test_argmax_invariant_under_scaling(self):
        rng = np.random.default_rng(43)
        f = random_rational(rng)
        scale = 2.0 - 3.0j
        g = BoundarySignal(scale * f.samples)
        cfg = dataclasses.replace(CFG, max_terms=3)
        d_f = run_afd(f, "double", cfg)
        d_g = run_afd(g, "double", cfg)
        assert np.allclose(d_f.parameters, d_g.parameters, atol=1e-9)
        assert np.allclose(scale * d_f.coefficients, d_g.coefficients, rtol=1e-8)

    def test_double_interpolation_of_partial_sums(self, ex2_signal, ex2_double10):
        nrm = ex2_signal.norm()
        n = 6
        s_n = partial_sum(ex2_double10, n)
        for term in ex2_double10.terms[:n]:
            fv = eval_disc(ex2_signal, term.a)
            sv = eval_disc(s_n, term.a)
            assert abs(fv - sv) <= 1e-7 * nrm
            fd = eval_deriv_disc(ex2_signal, term.a, 1)
            sd = eval_deriv_disc(s_n, term.a, 1)
            assert abs(fd - sd) <= 1e-5 * nrm
