"""Greedy decomposition engine.

Selection maximizes the matching energy A(a) = (1 - |a|^2) |f(a)|^2 over a
polar grid and then polishes the maximizer with a damped Newton iteration
on the real gradient of A.  At an interior maximizer the first-order
condition

    -conj(a) f(a) + (1 - |a|^2) f'(a) = 0

holds, which gives the subtracted term a double zero at a and makes the
double-zero reduction (division by the squared Moebius factor) stay inside
the Hardy space.  The anti-analytic energy discarded after each division
("leakage") is the numerical certificate for that claim.
"""

from __future__ import annotations

import dataclasses
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError
from .kernels import moebius_boundary, normalized_kernel
from .signals import (
    ALIASING_ENERGY_TOL,
    DEFAULT_N_SAMPLES,
    DEFAULT_R_MAX,
    BoundarySignal,
    _check_disc,
    aliasing_fraction,
    eval_deriv_disc,
    eval_disc,
    inner_product,
    taylor_coefficients,
)

MODES = ("core", "double", "mono")  # plus "ho:<k>" for k >= 1

# grid maxima within this relative window of the best value count as ties
GRID_TIE_REL = 1e-12
# refined selections must reach this stationarity residual (times ||f||)
REFINED_STATIONARITY_REL = 1e-9


@dataclass
class EngineConfig:
    """Knobs for selection, refinement, and stopping.

    ``residual_tol`` is relative residual energy: iteration stops once the
    remainder energy drops below residual_tol times the source energy.
    ``threads`` caps parallel grid evaluation; None reads DAFD_THREADS.
    """

    n_samples: int = DEFAULT_N_SAMPLES
    r_max: float = DEFAULT_R_MAX
    grid_radii: int = 64
    grid_angles: int = 256
    newton_max_iter: int = 50
    newton_tol: float = 1e-12
    leak_tol: float = 1e-6
    max_terms: int = 50
    residual_tol: float = 1e-8
    threads: int | None = None

    def resolved_threads(self) -> int:
        if self.threads is not None:
            return max(1, int(self.threads))
        try:
            return max(1, int(os.environ.get("DAFD_THREADS", "1")))
        except ValueError:
            return 1


@dataclass
class SelectionResult:
    """Outcome of one parameter search."""

    a: complex
    objective: float
    refined: bool
    stationarity_residual: float
    diagnostics: list = field(default_factory=list)


@dataclass
class DecompositionTerm:
    """One selected parameter with its coefficient and step diagnostics."""

    a: complex
    c: complex
    residual_energy_after: float
    leakage: float
    diagnostics: list = field(default_factory=list)


@dataclass
class Decomposition:
    """Ordered terms of one greedy run plus the data needed to replay it."""

    mode: str
    terms: list
    source_norm2: float
    config: EngineConfig
    diagnostics: list = field(default_factory=list)

    @property
    def parameters(self) -> np.ndarray:
        return np.array([t.a for t in self.terms], dtype=np.complex128)

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([t.c for t in self.terms], dtype=np.complex128)

    @property
    def residual_energies(self) -> np.ndarray:
        return np.array([t.residual_energy_after for t in self.terms])

    def relative_errors(self) -> np.ndarray:
        """Relative L2 error after each term."""
        if self.source_norm2 == 0.0:
            return np.zeros(len(self.terms))
        return np.sqrt(np.maximum(self.residual_energies, 0.0) / self.source_norm2)


@dataclass
class StepResult:
    remainder: BoundarySignal
    leakage: float
    diagnostics: list = field(default_factory=list)


def _mode_power(mode: str, term_index: int) -> int:
    """Moebius-factor multiplicity contributed by term ``term_index`` (1-based)
    to every later basis function."""
    if mode == "core":
        return 1
    if mode == "double":
        return 2
    if mode == "mono":
        return 1 if term_index == 1 else 2
    if mode.startswith("ho:"):
        return int(mode.split(":", 1)[1]) + 1
    raise ContractError(f"unknown mode {mode!r}")


def validate_mode(mode: str) -> str:
    if mode in MODES:
        return mode
    if mode.startswith("ho:"):
        try:
            k = int(mode.split(":", 1)[1])
        except ValueError:
            k = 0
        if k >= 1:
            return mode
    raise ContractError(f"unknown mode {mode!r}")


def objective(f: BoundarySignal, a: complex, r_max: float = DEFAULT_R_MAX) -> float:
    """Matching energy A(a) = (1 - |a|^2) |f(a)|^2 = |<f, e_a>|^2."""
    _check_disc(a, r_max)
    return float((1.0 - abs(a) ** 2) * abs(eval_disc(f, a, r_max)) ** 2)


def _objective_grid(f: BoundarySignal, config: EngineConfig):
    """Objective on the polar grid r_j = (j/R) r_max, theta_i = 2 pi i / T.

    For each radius the angular sweep is an inverse DFT of the Taylor
    coefficients scaled by r^m and folded modulo the angle count, so the
    whole grid costs a few FFTs.  Parallel radius blocks write disjoint
    slices of one output array, keeping the reduction deterministic.
    """
    coeffs = taylor_coefficients(f)
    n_ang = config.grid_angles
    radii = np.arange(config.grid_radii) / config.grid_radii * config.r_max
    padded_len = -(-coeffs.size // n_ang) * n_ang
    padded = np.zeros(padded_len, dtype=np.complex128)
    padded[: coeffs.size] = coeffs
    m = np.arange(padded_len)
    out = np.empty((config.grid_radii, n_ang))

    def fill(j0: int, j1: int):
        scaled = padded[None, :] * radii[j0:j1, None] ** m[None, :]
        folded = scaled.reshape(j1 - j0, -1, n_ang).sum(axis=1)
        values = np.fft.ifft(folded, axis=1) * n_ang
        out[j0:j1] = (1.0 - radii[j0:j1, None] ** 2) * np.abs(values) ** 2

    threads = min(config.resolved_threads(), config.grid_radii)
    if threads <= 1:
        fill(0, config.grid_radii)
    else:
        bounds = np.linspace(0, config.grid_radii, threads + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda be: fill(be[0], be[1]), zip(bounds, bounds[1:])))
    return radii, out


def _stationarity(f: BoundarySignal, a: complex, r_max: float) -> complex:
    return -np.conj(a) * eval_disc(f, a, r_max) + (1.0 - abs(a) ** 2) * eval_deriv_disc(
        f, a, 1, r_max
    )


def grid_select(f: BoundarySignal, config: EngineConfig | None = None):
    """Grid argmax of the objective with a deterministic tie-break.

    Among grid maxima within a relative window of the best value the
    smallest angle index wins, then the smallest radius index.  Returns
    None for a zero signal (no selection possible).
    """
    config = config or EngineConfig()
    if f.norm() == 0.0:
        return None
    radii, grid = _objective_grid(f, config)
    best = float(grid.max())
    if best == 0.0:
        return None
    tied = np.argwhere(grid >= best * (1.0 - GRID_TIE_REL))
    order = np.lexsort((tied[:, 0], tied[:, 1]))
    j, i = tied[order[0]]
    a = complex(radii[j] * np.exp(2j * np.pi * i / config.grid_angles))
    return SelectionResult(
        a=a,
        objective=float(grid[j, i]),
        refined=False,
        stationarity_residual=abs(_stationarity(f, a, config.r_max)),
    )


def _hessian(f: BoundarySignal, a: complex, r_max: float) -> np.ndarray:
    """Hessian of A(a) in (Re a, Im a) coordinates via Wirtinger derivatives."""
    fa = eval_disc(f, a, r_max)
    f1 = eval_deriv_disc(f, a, 1, r_max)
    f2 = eval_deriv_disc(f, a, 2, r_max)
    one_m = 1.0 - abs(a) ** 2
    a_zz = -2.0 * np.conj(a) * f1 * np.conj(fa) + one_m * f2 * np.conj(fa)
    a_zzb = (
        -abs(fa) ** 2
        - 2.0 * (np.conj(a) * fa * np.conj(f1)).real
        + one_m * abs(f1) ** 2
    )
    return np.array(
        [
            [2.0 * a_zz.real + 2.0 * a_zzb, -2.0 * a_zz.imag],
            [-2.0 * a_zz.imag, -2.0 * a_zz.real + 2.0 * a_zzb],
        ]
    )


def _coordinate_polish(f: BoundarySignal, a: complex, config: EngineConfig) -> complex:
    """Axis-aligned ascent fallback for when Newton stalls."""
    best, best_val = a, objective(f, a, config.r_max)
    step = 1e-3
    for _ in range(200):
        improved = False
        for d in (step, -step, 1j * step, -1j * step):
            cand = best + d
            if abs(cand) >= config.r_max:
                continue
            val = objective(f, cand, config.r_max)
            if val > best_val:
                best, best_val = cand, val
                improved = True
        if not improved:
            step *= 0.5
            if step < 1e-13:
                break
    return best


def refine_stationary(
    f: BoundarySignal, seed: complex, config: EngineConfig | None = None
) -> SelectionResult:
    """Polish a seed with damped Newton steps on the gradient of A(a).

    Steps that do not increase the objective are halved; iterates that
    leave the disc of radius r_max are clamped back and flagged.  On
    success the stationarity residual |-conj(a) f(a) + (1-|a|^2) f'(a)|
    drops below 1e-9 times the norm and the objective never falls below
    the seed's value.  If Newton stalls, a coordinate-ascent polish runs
    instead and the result is flagged unrefined.
    """
    config = config or EngineConfig()
    nrm = f.norm()
    a = complex(seed)
    if abs(a) >= config.r_max:
        raise ContractError("seed must lie strictly inside the search radius")
    if abs(eval_disc(f, a, config.r_max)) <= 1e-14 * nrm:
        raise ContractError("seed with f(seed) = 0 cannot be refined")
    diagnostics: list = []
    seed_val = objective(f, a, config.r_max)
    current_val = seed_val
    converged = False
    for _ in range(config.newton_max_iter):
        s = _stationarity(f, a, config.r_max)
        if abs(s) <= config.newton_tol * nrm:
            converged = True
            break
        grad_c = s * np.conj(eval_disc(f, a, config.r_max))
        grad = np.array([2.0 * grad_c.real, -2.0 * grad_c.imag])
        hess = _hessian(f, a, config.r_max)
        try:
            delta = np.linalg.lstsq(hess, -grad, rcond=1e-12)[0]
        except np.linalg.LinAlgError:
            break
        step = complex(delta[0], delta[1])
        accepted = False
        for halving in range(30):
            cand = a + step * 0.5**halving
            if abs(cand) >= config.r_max:
                cand *= config.r_max * (1.0 - 1e-12) / abs(cand)
                if "clamped to r_max" not in diagnostics:
                    diagnostics.append("clamped to r_max")
            val = objective(f, cand, config.r_max)
            if val >= current_val and cand != a:
                a, current_val = cand, val
                accepted = True
                break
        if not accepted:
            break
    s_final = abs(_stationarity(f, a, config.r_max))
    refined = converged or s_final <= REFINED_STATIONARITY_REL * nrm
    if not refined:
        a = _coordinate_polish(f, a, config)
        current_val = objective(f, a, config.r_max)
        s_final = abs(_stationarity(f, a, config.r_max))
        diagnostics.append("newton stalled; coordinate-ascent fallback")
    return SelectionResult(
        a=a,
        objective=current_val,
        refined=refined,
        stationarity_residual=s_final,
        diagnostics=diagnostics,
    )


def select_parameter(f: BoundarySignal, config: EngineConfig | None = None):
    """Grid search followed by Newton refinement; None for zero signals."""
    config = config or EngineConfig()
    coarse = grid_select(f, config)
    if coarse is None:
        return None
    return refine_stationary(f, coarse.a, config)


def _divide_step(
    f: BoundarySignal, a: complex, c: complex, power: int, r_max: float
) -> StepResult:
    """Subtract the kernel term, divide by phi_a^power on the boundary, and
    re-project onto the analytic part, recording the discarded energy."""
    e_a = normalized_kernel(a, f.n_samples, r_max)
    phi = moebius_boundary(a, f.n_samples, r_max)
    quotient = (f.samples - c * e_a.samples) / phi.samples**power
    spec = np.fft.fft(quotient) / f.n_samples
    n = f.n_samples
    leakage = float(np.sum(np.abs(spec[n // 2 + 1:]) ** 2))
    spec[n // 2 + 1:] = 0.0
    remainder = BoundarySignal.from_spectrum(spec)
    diagnostics: list = []
    if aliasing_fraction(remainder) > ALIASING_ENERGY_TOL:
        diagnostics.append("aliasing: top-frequency bins hold significant energy")
    return StepResult(remainder=remainder, leakage=leakage, diagnostics=diagnostics)


def core_step(
    f: BoundarySignal, a: complex, c: complex, config: EngineConfig | None = None
) -> StepResult:
    """Single-zero reduction (f - c e_a) / phi_a; valid for any a in the disc."""
    config = config or EngineConfig()
    return _divide_step(f, a, c, 1, config.r_max)


def double_step(
    f: BoundarySignal, a: complex, c: complex, config: EngineConfig | None = None
) -> StepResult:
    """Double-zero reduction (f - c e_a) / phi_a^2.

    Sound only at a stationary a; elsewhere the quotient leaves the Hardy
    space and the leaked energy is flagged against ``leak_tol`` (relative
    to the current remainder energy).
    """
    config = config or EngineConfig()
    result = _divide_step(f, a, c, 2, config.r_max)
    energy = f.energy()
    if energy > 0 and result.leakage > config.leak_tol * energy:
        result.diagnostics.append(
            f"leakage {result.leakage / energy:.3e} exceeds leak_tol; "
            "parameter is not stationary"
        )
    return result


def higher_order_condition(
    f: BoundarySignal, a: complex, order: int, r_max: float = DEFAULT_R_MAX
) -> complex:
    """Order-k zero condition -conj(a) f^(k-1)(a) + ((1-|a|^2)/k) f^(k)(a).

    For order 1 this is the stationarity expression of the selection
    objective.
    """
    if order < 1:
        raise ContractError("order must be >= 1")
    _check_disc(a, r_max)
    if order == 1:
        low = eval_disc(f, a, r_max)
    else:
        low = eval_deriv_disc(f, a, order - 1, r_max)
    high = eval_deriv_disc(f, a, order, r_max)
    return complex(-np.conj(a) * low + (1.0 - abs(a) ** 2) / order * high)


def higher_order_step(
    f: BoundarySignal,
    a: complex,
    order: int,
    config: EngineConfig | None = None,
    condition_tol: float = 1e-6,
):
    """Order-(k+1) reduction: divide the subtracted remainder by phi_a^(k+1).

    Requires the zero conditions of all orders 1..k to hold at a (within
    condition_tol times the norm); otherwise the division would leak
    spuriously, so the step refuses.  Returns the term and the remainder.
    """
    config = config or EngineConfig()
    nrm = f.norm()
    for j in range(1, order + 1):
        value = abs(higher_order_condition(f, a, j, config.r_max))
        if value > condition_tol * nrm:
            raise ContractError(
                f"order-{j} zero condition fails at a = {a:.6g} "
                f"(|value| = {value:.3e}, tol = {condition_tol * nrm:.3e})"
            )
    c = inner_product(f, normalized_kernel(a, f.n_samples, config.r_max))
    result = _divide_step(f, a, c, order + 1, config.r_max)
    term = DecompositionTerm(
        a=complex(a),
        c=c,
        residual_energy_after=result.remainder.energy(),
        leakage=result.leakage,
        diagnostics=list(result.diagnostics),
    )
    return term, result.remainder


def _snapshot_config(config: EngineConfig, f: BoundarySignal) -> EngineConfig:
    return dataclasses.replace(config, n_samples=f.n_samples)


def _finalize(mode, terms, source, config, diagnostics, energy):
    if terms and energy <= config.residual_tol * source:
        diagnostics.append(f"residual below threshold after {len(terms)} terms")
    return Decomposition(
        mode=mode,
        terms=terms,
        source_norm2=source,
        config=config,
        diagnostics=diagnostics,
    )


def run_afd(
    f: BoundarySignal, mode: str = "double", config: EngineConfig | None = None
) -> Decomposition:
    """Greedy decomposition: select, refine, subtract, divide, repeat.

    mode "core" divides by phi once per step; mode "double" divides by
    phi squared, which is what buys the derivative interpolation at the
    selected points.
    """
    if mode not in ("core", "double"):
        raise ContractError("run_afd supports modes 'core' and 'double'")
    config = _snapshot_config(config or EngineConfig(), f)
    if not f.analytic:
        raise ContractError("decompose the analytic projection, not the raw signal")
    source = f.energy()
    terms: list = []
    diagnostics: list = []
    if source == 0.0:
        return Decomposition(mode, terms, 0.0, config, ["zero input signal"])
    remainder, energy = f, source
    while len(terms) < config.max_terms and energy > config.residual_tol * source:
        selection = select_parameter(remainder, config)
        if selection is None:
            diagnostics.append("no selectable parameter; stopping")
            break
        e_a = normalized_kernel(selection.a, f.n_samples, config.r_max)
        c = inner_product(remainder, e_a)
        if mode == "double":
            step = double_step(remainder, selection.a, c, config)
        else:
            step = core_step(remainder, selection.a, c, config)
        term_diags = list(selection.diagnostics) + list(step.diagnostics)
        if mode == "double" and not selection.refined:
            term_diags.append("accepted parameter is not refined-stationary")
        remainder = step.remainder
        energy = remainder.energy()
        terms.append(
            DecompositionTerm(
                a=selection.a,
                c=c,
                residual_energy_after=energy,
                leakage=step.leakage,
                diagnostics=term_diags,
            )
        )
    return _finalize(mode, terms, source, config, diagnostics, energy)


def run_mono_component(
    f: BoundarySignal, config: EngineConfig | None = None
) -> Decomposition:
    """Decomposition into mono-component terms.

    The first parameter is pinned to 0 (single-zero reduction, so every
    later basis function carries a factor z), the second is selected on
    the shifted remainder, and all later steps run as in mode "double".
    """
    config = _snapshot_config(config or EngineConfig(), f)
    if not f.analytic:
        raise ContractError("decompose the analytic projection, not the raw signal")
    source = f.energy()
    terms: list = []
    diagnostics: list = []
    if source == 0.0:
        return Decomposition("mono", terms, 0.0, config, ["zero input signal"])

    ones = normalized_kernel(0.0, f.n_samples, config.r_max)
    c1 = inner_product(f, ones)
    step = core_step(f, 0.0, c1, config)
    remainder = step.remainder
    energy = remainder.energy()
    terms.append(
        DecompositionTerm(
            a=0j,
            c=c1,
            residual_energy_after=energy,
            leakage=step.leakage,
            diagnostics=list(step.diagnostics),
        )
    )
    while len(terms) < config.max_terms and energy > config.residual_tol * source:
        selection = select_parameter(remainder, config)
        if selection is None:
            diagnostics.append("no selectable parameter; stopping")
            break
        e_a = normalized_kernel(selection.a, f.n_samples, config.r_max)
        c = inner_product(remainder, e_a)
        step = double_step(remainder, selection.a, c, config)
        term_diags = list(selection.diagnostics) + list(step.diagnostics)
        if not selection.refined:
            term_diags.append("accepted parameter is not refined-stationary")
        remainder = step.remainder
        energy = remainder.energy()
        terms.append(
            DecompositionTerm(
                a=selection.a,
                c=c,
                residual_energy_after=energy,
                leakage=step.leakage,
                diagnostics=term_diags,
            )
        )
    return _finalize("mono", terms, source, config, diagnostics, energy)


def _gauss_newton_conditions(
    f: BoundarySignal, seed: complex, order: int, config: EngineConfig
) -> complex:
    """Least-squares Newton on the stacked zero conditions of orders 1..k,
    with a central-difference Jacobian in (Re a, Im a)."""
    h = 1e-6
    limit = config.r_max - 4.0 * h

    def clamp(point: complex) -> complex:
        return point if abs(point) <= limit else point / abs(point) * limit

    def stack(point: complex) -> np.ndarray:
        vals = [
            higher_order_condition(f, point, j, config.r_max)
            for j in range(1, order + 1)
        ]
        return np.array(
            [x for v in vals for x in (v.real, v.imag)], dtype=np.float64
        )

    a = clamp(complex(seed))
    current = stack(a)
    for _ in range(config.newton_max_iter):
        if np.linalg.norm(current, ord=np.inf) <= config.newton_tol * f.norm():
            break
        jac = np.column_stack(
            [(stack(a + d) - stack(a - d)) / (2.0 * h) for d in (h, 1j * h)]
        )
        delta, *_ = np.linalg.lstsq(jac, -current, rcond=None)
        step = complex(delta[0], delta[1])
        accepted = False
        for halving in range(25):
            cand = clamp(a + step * 0.5**halving)
            if cand == a:
                continue
            trial = stack(cand)
            if np.linalg.norm(trial) < np.linalg.norm(current):
                a, current = cand, trial
                accepted = True
                break
        if not accepted:
            break
    return a


def run_higher_order(
    f: BoundarySignal,
    order: int,
    config: EngineConfig | None = None,
    condition_tol: float = 1e-6,
) -> Decomposition:
    """Experimental decomposition with order-(k+1) zero factors.

    Each step seeds from the double-mode maximizer, then drives the
    stacked zero conditions toward 0 with a damped least-squares Newton
    iteration.  If no parameter satisfying the conditions is found the run
    stops and says so; for order >= 2 a common root need not exist.
    """
    if order < 1:
        raise ContractError("order must be >= 1")
    config = _snapshot_config(config or EngineConfig(), f)
    if not f.analytic:
        raise ContractError("decompose the analytic projection, not the raw signal")
    mode = f"ho:{order}"
    source = f.energy()
    terms: list = []
    diagnostics: list = []
    if source == 0.0:
        return Decomposition(mode, terms, 0.0, config, ["zero input signal"])
    remainder, energy = f, source
    while len(terms) < config.max_terms and energy > config.residual_tol * source:
        selection = select_parameter(remainder, config)
        if selection is None:
            diagnostics.append("no selectable parameter; stopping")
            break
        a = selection.a
        if order > 1:
            a = _gauss_newton_conditions(remainder, a, order, config)
        try:
            term, remainder = higher_order_step(
                remainder, a, order, config, condition_tol
            )
        except ContractError as exc:
            diagnostics.append(f"stopping: {exc}")
            break
        energy = term.residual_energy_after
        terms.append(term)
    return _finalize(mode, terms, source, config, diagnostics, energy)


def decompose(
    f: BoundarySignal, mode: str = "double", config: EngineConfig | None = None
) -> Decomposition:
    """Dispatch to the run matching ``mode`` (core, double, mono, ho:<k>)."""
    mode = validate_mode(mode)
    if mode in ("core", "double"):
        return run_afd(f, mode, config)
    if mode == "mono":
        return run_mono_component(f, config)
    return run_higher_order(f, int(mode.split(":", 1)[1]), config)


def partial_sum(d: Decomposition, n: int) -> BoundarySignal:
    """Sum of the first n terms against the mode's basis functions."""
    if n > len(d.terms):
        raise ContractError(f"decomposition has {len(d.terms)} terms, asked for {n}")
    n_samples = d.config.n_samples
    acc = np.zeros(n_samples, dtype=np.complex128)
    product = np.ones(n_samples, dtype=np.complex128)
    for k, term in enumerate(d.terms[:n], start=1):
        e_a = normalized_kernel(term.a, n_samples, d.config.r_max)
        acc += term.c * e_a.samples * product
        power = _mode_power(d.mode, k)
        product *= moebius_boundary(term.a, n_samples, d.config.r_max).samples ** power
    return BoundarySignal(acc)
