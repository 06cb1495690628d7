"""Verifiers that turn the theory's guarantees into checkable reports.

Every function here is a pure function of the signal and a finished
decomposition: interpolation errors at the selected parameters, the
energy identity, the M/sqrt(n) residual bound for kernel combinations,
residual sign-change counts for real signals, and error-decay tables.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .engine import Decomposition, EngineConfig, decompose, partial_sum
from .errors import ContractError
from .signals import BoundarySignal, eval_deriv_disc, eval_disc, project_real


@dataclass
class InterpolationRow:
    a: complex
    value_error: float
    derivative_error: float


@dataclass
class InterpolationReport:
    mode: str
    n: int
    rows: list
    max_value_error: float
    max_derivative_error: float


@dataclass
class ResidualTraceRow:
    n: int
    residual_energy: float
    relative_l2_error: float
    bound: float | None = None
    passed: bool | None = None


@dataclass
class ErrorDecayRow:
    n: int
    mode: str
    relative_l2_error: float


def verify_interpolation(
    f: BoundarySignal, d: Decomposition, n: int
) -> InterpolationReport:
    """Errors of the n-term partial sum and its derivative at each selected
    parameter.

    With double-zero reductions and stationary parameters both columns
    should vanish; single-zero runs only guarantee the value column.
    """
    if n > len(d.terms):
        raise ContractError(f"decomposition has {len(d.terms)} terms, asked for {n}")
    s_n = partial_sum(d, n)
    r_max = d.config.r_max
    rows = []
    for term in d.terms[:n]:
        value_error = abs(eval_disc(f, term.a, r_max) - eval_disc(s_n, term.a, r_max))
        deriv_error = abs(
            eval_deriv_disc(f, term.a, 1, r_max)
            - eval_deriv_disc(s_n, term.a, 1, r_max)
        )
        rows.append(InterpolationRow(term.a, value_error, deriv_error))
    return InterpolationReport(
        mode=d.mode,
        n=n,
        rows=rows,
        max_value_error=max((r.value_error for r in rows), default=0.0),
        max_derivative_error=max((r.derivative_error for r in rows), default=0.0),
    )


def energy_identity_check(f: BoundarySignal, d: Decomposition) -> float:
    """Relative defect of ||f||^2 = sum |c_k|^2 + ||f - S_n||^2.

    The residual energy is recomputed from the partial sum rather than
    taken from the stored trace, so this is an independent check.
    """
    energy = f.energy()
    if energy == 0.0:
        return 0.0
    s_n = partial_sum(d, len(d.terms))
    residual = BoundarySignal(f.samples - s_n.samples).energy()
    coeff_energy = float(np.sum(np.abs(d.coefficients) ** 2))
    return abs(energy - coeff_energy - residual) / energy


def rate_bound_check(
    f: BoundarySignal, d: Decomposition, class_bound: float
) -> list[ResidualTraceRow]:
    """Check the residual decay against class_bound / sqrt(n) per term.

    class_bound is an l1 bound on coefficients of f over unit-norm
    kernels; it must be at least ||f||.
    """
    if class_bound < f.norm() * (1.0 - 1e-12):
        raise ContractError("class bound is smaller than the signal norm")
    source = d.source_norm2 if d.source_norm2 > 0 else 1.0
    rows = []
    for k, term in enumerate(d.terms, start=1):
        residual_norm = np.sqrt(max(term.residual_energy_after, 0.0))
        bound = class_bound / np.sqrt(k)
        rows.append(
            ResidualTraceRow(
                n=k,
                residual_energy=term.residual_energy_after,
                relative_l2_error=float(residual_norm / np.sqrt(source)),
                bound=float(bound),
                passed=bool(residual_norm <= bound),
            )
        )
    return rows


def _upsample_real_part(spectrum: np.ndarray, n_coarse: int, n_fine: int) -> np.ndarray:
    """Twice the real part of the analytic signal with the given coefficients,
    evaluated on a finer uniform grid by zero-padding the spectrum."""
    fine = np.zeros(n_fine, dtype=np.complex128)
    keep = n_coarse // 2 + 1
    fine[:keep] = spectrum[:keep]
    return 2.0 * (n_fine * np.fft.ifft(fine)).real


def zero_crossing_count(
    f_real, d: Decomposition, n: int, fine_n: int = 8192
) -> int:
    """Sign changes of the real reconstruction residual on a fine grid.

    For n >= 1 the residual is f - (2 Re S_n - c0), evaluated through the
    band-limited interpolant of the projection; for n = 0 it is the
    de-meaned input.  Near-zero samples (below 1e-12 of the signal norm)
    are dropped before counting, and the count is cyclic.
    """
    x = np.asarray(f_real, dtype=np.float64)
    fplus, c0 = project_real(x)
    if fine_n < x.size:
        raise ContractError("fine grid must be at least as fine as the input")
    if n == 0:
        residual_spec = np.array(fplus.spectrum)
        residual = _upsample_real_part(residual_spec, x.size, fine_n) - 2.0 * c0
    else:
        s_n = partial_sum(d, n)
        residual_spec = fplus.spectrum - s_n.spectrum
        residual = _upsample_real_part(residual_spec, x.size, fine_n)
    threshold = 1e-12 * np.sqrt(np.mean(x**2))
    kept = residual[np.abs(residual) >= threshold]
    if kept.size < 2:
        return 0
    signs = np.sign(kept)
    return int(np.count_nonzero(signs != np.roll(signs, 1)))


def error_decay_table(
    f: BoundarySignal,
    modes,
    n_max: int,
    config: EngineConfig | None = None,
) -> list[ErrorDecayRow]:
    """Relative L2 error after 1..n_max terms for each mode, all runs on
    the same signal."""
    config = config or EngineConfig()
    rows = []
    for mode in modes:
        run_cfg = dataclasses.replace(config, max_terms=n_max)
        d = decompose(f, mode, run_cfg)
        errors = d.relative_errors()
        for k in range(len(d.terms)):
            rows.append(ErrorDecayRow(n=k + 1, mode=mode, relative_l2_error=float(errors[k])))
    return rows
