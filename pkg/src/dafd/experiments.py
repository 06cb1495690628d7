"""Built-in test signals used by the CLI, the demos, and the test suite.

"ex1" is a continuous piecewise function on [0, 2*pi] whose derivative
jumps at pi; "ex2" is a linear combination of five reproducing kernels,
so it is exactly a rational Hardy-space function and is synthesized
directly on the boundary grid.
"""

from __future__ import annotations

import numpy as np

from .errors import ContractError
from .kernels import szego_boundary
from .signals import DEFAULT_R_MAX, BoundarySignal, grid_t, project_real

EXAMPLE2_PARAMS = (
    0.20 + 0.20j,
    0.55 - 0.15j,
    -0.30 + 0.40j,
    0.75 + 0.05j,
    -0.10 - 0.60j,
)
EXAMPLE2_COEFFS = (1.0, -0.7, 0.4, 0.9, -0.5)


def example1_samples(n_samples: int) -> np.ndarray:
    """sin(4t) - t/4 on [0, pi]; sin(4t) + (t - pi)/2 - t/4 on (pi, 2*pi]."""
    t = grid_t(n_samples)
    ramp = np.where(t > np.pi, 0.5 * (t - np.pi), 0.0)
    return np.sin(4.0 * t) + ramp - 0.25 * t


def example1_projection(n_samples: int) -> tuple[BoundarySignal, float]:
    """Analytic projection of the piecewise signal plus its mean."""
    return project_real(example1_samples(n_samples))


def example2_signal(
    n_samples: int, r_max: float = DEFAULT_R_MAX
) -> BoundarySignal:
    """Kernel combination sum_k c_k / (1 - conj(a_k) z) on the boundary grid."""
    acc = np.zeros(n_samples, dtype=np.complex128)
    for a, c in zip(EXAMPLE2_PARAMS, EXAMPLE2_COEFFS):
        acc += c * szego_boundary(a, n_samples, r_max).samples
    return BoundarySignal(acc)


def example2_class_bound() -> float:
    """l1 bound of ex2 over unit-norm kernels: sum |c_k| / sqrt(1 - |a_k|^2)."""
    return float(
        sum(
            abs(c) / np.sqrt(1.0 - abs(a) ** 2)
            for a, c in zip(EXAMPLE2_PARAMS, EXAMPLE2_COEFFS)
        )
    )


def example_signal(name: str, n_samples: int) -> tuple[BoundarySignal, dict]:
    """Signal plus a serializable source descriptor for `ex1` or `ex2`."""
    if name == "ex1":
        fplus, c0 = example1_projection(n_samples)
        descriptor = {
            "kind": "piecewise-real",
            "formula": "sin(4t) - t/4 on [0, pi]; sin(4t) + (t - pi)/2 - t/4 on (pi, 2pi]",
            "c0": c0,
            "n_samples": n_samples,
        }
        return fplus, descriptor
    if name == "ex2":
        descriptor = {
            "kind": "kernel-combination",
            "parameters": [[a.real, a.imag] for a in EXAMPLE2_PARAMS],
            "coefficients": [[complex(c).real, complex(c).imag] for c in EXAMPLE2_COEFFS],
            "n_samples": n_samples,
        }
        return example2_signal(n_samples), descriptor
    raise ContractError(f"unknown example {name!r}")
