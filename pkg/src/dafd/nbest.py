"""Best n-term approximation over parameter tuples in the poly-disc.

The residual of the orthogonal projection onto the basis generated by a
tuple is minimized with multi-start Nelder-Mead in 2n real coordinates.
The disc constraint is enforced by a radial squashing map, so the search
itself is unconstrained.  The greedy tuple is always one of the
candidates, which makes the result dominate the greedy run by
construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .engine import EngineConfig, run_afd
from .errors import ContractError
from .signals import BoundarySignal, _check_disc, boundary_z

ORIGIN_GREEDY = "greedy-seed"
ORIGIN_SUPPLIED = "true-peaks"
ORIGIN_RANDOM = "random"

# two tuple entries closer than this count as a parameter collision
COLLISION_TOL = 1e-10


@dataclass
class NBestResult:
    """Best tuple found, its projection coefficients, and search metadata."""

    params: tuple
    coefficients: np.ndarray
    residual_energy: float
    starts_used: int
    best_start_origin: str
    diagnostics: list = field(default_factory=list)


def projection_residual(
    f: BoundarySignal, params, mode: str, r_max: float = 0.995
) -> tuple[np.ndarray, float]:
    """Coefficients of f against the tuple's orthonormal system and the
    energy left over: ||f||^2 - sum |c_j|^2.

    Kernel and Moebius samples are assembled inline (no FFT round trips)
    because this sits in the optimizer's inner loop.
    """
    if not f.analytic:
        raise ContractError("project the signal before computing residuals")
    if mode not in ("tm", "dtm"):
        raise ContractError("mode must be 'tm' or 'dtm'")
    params = tuple(complex(p) for p in params)
    power = 1 if mode == "tm" else 2
    n_samples = f.n_samples
    z = boundary_z(n_samples)
    coeffs = np.empty(len(params), dtype=np.complex128)
    product = np.ones(n_samples, dtype=np.complex128)
    for k, a in enumerate(params):
        _check_disc(a, r_max)
        inv_denom = 1.0 / (1.0 - np.conj(a) * z)
        basis = (np.sqrt(1.0 - abs(a) ** 2) * inv_denom) * product
        coeffs[k] = np.vdot(basis, f.samples) / n_samples
        product = product * ((z - a) * inv_denom) ** power
    residual = f.energy() - float(np.sum(np.abs(coeffs) ** 2))
    return coeffs, residual


def _squash(v: np.ndarray, r_max: float) -> np.ndarray:
    """Map unconstrained (Re, Im) pairs into the open disc of radius r_max.

    A small margin keeps rounding from landing exactly on the radius."""
    points = v[0::2] + 1j * v[1::2]
    radii = np.abs(points)
    scale = np.where(radii > 0, np.tanh(radii) / np.maximum(radii, 1e-300), 1.0)
    return (1.0 - 1e-9) * r_max * scale * points


def _unsquash(params, r_max: float) -> np.ndarray:
    out = np.empty(2 * len(params))
    for k, a in enumerate(params):
        s = min(abs(a) / r_max, 1.0 - 1e-12)
        rho = np.arctanh(s)
        unit = a / abs(a) if abs(a) > 0 else 0.0
        out[2 * k] = (rho * unit).real if abs(a) > 0 else 0.0
        out[2 * k + 1] = (rho * unit).imag if abs(a) > 0 else 0.0
    return out


def _tuple_key(params) -> tuple:
    return tuple(x for a in params for x in (a.real, a.imag))


def collision_diagnostics(params) -> list:
    """Messages for tuple entries that coincide; the basis stays valid but
    the effective order drops."""
    params = [complex(p) for p in params]
    messages = []
    for j in range(len(params)):
        for k in range(j):
            if abs(params[j] - params[k]) < COLLISION_TOL:
                messages.append(
                    f"parameters {k + 1} and {j + 1} collide; "
                    "effective order is reduced"
                )
    return messages


def optimize(
    f: BoundarySignal,
    n: int,
    mode: str,
    config: EngineConfig | None = None,
    extra_starts=(),
    seed: int = 0,
) -> NBestResult:
    """Multi-start Nelder-Mead search for the best n-term parameter tuple.

    Starts are the greedy tuple, per-coordinate perturbations of it, any
    caller-supplied tuples, and 8 random tuples.  Every start is also
    evaluated as-is, so the best greedy or supplied tuple can win without
    the local search improving it.
    """
    if n < 1:
        raise ContractError("n must be >= 1")
    config = config or EngineConfig()
    rng = np.random.default_rng(seed)
    greedy_mode = "core" if mode == "tm" else "double"
    greedy = run_afd(f, greedy_mode, config)
    greedy_params = [complex(a) for a in greedy.parameters[:n]]
    while len(greedy_params) < n:
        # greedy run ended early (exact recovery); pad with small random points
        greedy_params.append(complex(*(0.1 * rng.standard_normal(2))))

    starts: list[tuple[np.ndarray, str]] = []
    base = _unsquash(greedy_params, config.r_max)
    starts.append((base, ORIGIN_GREEDY))
    for coord in range(2 * n):
        perturbed = base.copy()
        perturbed[coord] += 0.25
        starts.append((perturbed, ORIGIN_GREEDY))
    for supplied in extra_starts:
        supplied = [complex(p) for p in supplied]
        if len(supplied) != n:
            raise ContractError("supplied starts must have length n")
        starts.append((_unsquash(supplied, config.r_max), ORIGIN_SUPPLIED))
    for _ in range(8):
        starts.append((rng.standard_normal(2 * n) * 0.6, ORIGIN_RANDOM))

    def cost(v: np.ndarray) -> float:
        return projection_residual(f, _squash(v, config.r_max), mode, config.r_max)[1]

    best = None  # (residual, tuple_key, params, origin)
    non_improving = 0
    for v0, origin in starts:
        candidates = [v0]
        result = minimize(
            cost,
            v0,
            method="Nelder-Mead",
            options={"maxfev": 400 * n, "xatol": 1e-10, "fatol": 1e-14},
        )
        candidates.append(result.x)
        improved = False
        for v in candidates:
            params = tuple(_squash(v, config.r_max))
            residual = cost(v)
            entry = (residual, _tuple_key(params), params, origin)
            if best is None or entry[:2] < best[:2]:
                best = entry
                improved = True
        if not improved:
            non_improving += 1

    residual, _, params, origin = best
    coeffs, residual = projection_residual(f, params, mode, config.r_max)
    diagnostics = []
    if non_improving:
        diagnostics.append(f"{non_improving} starts did not improve the best residual")
    diagnostics.extend(collision_diagnostics(params))
    return NBestResult(
        params=params,
        coefficients=coeffs,
        residual_energy=residual,
        starts_used=len(starts),
        best_start_origin=origin,
        diagnostics=diagnostics,
    )
