"""Szego kernels, Moebius factors, and Takenaka-Malmquist bases.

The two basis families share one closed form: the k-th function is the
normalized kernel of the k-th parameter times Moebius factors of all
earlier parameters, taken to the first power ("tm") or squared ("dtm").
Parameter order is significant and never re-sorted; for the squared
family, permuting the parameters changes the spanned subspace.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from .signals import (
    DEFAULT_R_MAX,
    BoundarySignal,
    _check_disc,
    boundary_z,
    inner_product,
)

BASIS_MODES = ("tm", "dtm")


def szego_boundary(
    a: complex, n_samples: int, r_max: float = DEFAULT_R_MAX
) -> BoundarySignal:
    """Boundary samples of the reproducing kernel 1/(1 - conj(a) z)."""
    _check_disc(a, r_max)
    z = boundary_z(n_samples)
    return BoundarySignal(1.0 / (1.0 - np.conj(a) * z))


def normalized_kernel(
    a: complex, n_samples: int, r_max: float = DEFAULT_R_MAX
) -> BoundarySignal:
    """Unit-norm kernel e_a = sqrt(1 - |a|^2) / (1 - conj(a) z)."""
    _check_disc(a, r_max)
    z = boundary_z(n_samples)
    scale = np.sqrt(1.0 - abs(a) ** 2)
    return BoundarySignal(scale / (1.0 - np.conj(a) * z))


def moebius_boundary(
    a: complex, n_samples: int, r_max: float = DEFAULT_R_MAX
) -> BoundarySignal:
    """Boundary samples of phi_a(z) = (z - a)/(1 - conj(a) z); unimodular."""
    _check_disc(a, r_max)
    z = boundary_z(n_samples)
    return BoundarySignal((z - a) / (1.0 - np.conj(a) * z))


def moebius_at(a: complex, z: complex) -> complex:
    """phi_a evaluated at a single point."""
    return (z - a) / (1.0 - np.conj(a) * z)


@dataclass(frozen=True)
class BasisSpec:
    """One basis function: the k-th element of the system generated by
    ``params``, where k = len(params) and mode selects single ("tm") or
    squared ("dtm") Moebius factors for the earlier parameters."""

    params: tuple
    mode: str

    def __post_init__(self):
        object.__setattr__(
            self, "params", tuple(complex(p) for p in self.params)
        )
        if self.mode not in BASIS_MODES:
            raise ContractError(f"mode must be one of {BASIS_MODES}")
        if not self.params:
            raise ContractError("params must be non-empty")

    @property
    def index(self) -> int:
        return len(self.params)


def system_specs(params, mode: str) -> list[BasisSpec]:
    """Specs for the full system B_1..B_n over one parameter tuple."""
    params = tuple(complex(p) for p in params)
    return [BasisSpec(params[: k + 1], mode) for k in range(len(params))]


def basis_eval(
    spec: BasisSpec, n_samples: int, r_max: float = DEFAULT_R_MAX
) -> BoundarySignal:
    """Boundary samples of the basis function described by ``spec``."""
    power = 1 if spec.mode == "tm" else 2
    values = normalized_kernel(spec.params[-1], n_samples, r_max).samples.copy()
    for a in spec.params[:-1]:
        values *= moebius_boundary(a, n_samples, r_max).samples ** power
    return BoundarySignal(values)


def gram_check(
    specs, n_samples: int, r_max: float = DEFAULT_R_MAX
) -> float:
    """Largest off-diagonal Gram-matrix magnitude of a consistent system.

    The specs must share one parameter tuple and one mode, with indices
    running 1..n; anything else raises ContractError.
    """
    specs = list(specs)
    if not specs:
        raise ContractError("no basis specs given")
    full = specs[-1].params
    mode = specs[-1].mode
    for k, spec in enumerate(specs, start=1):
        if spec.mode != mode or spec.index != k or spec.params != full[:k]:
            raise ContractError(
                "specs must share one parameter tuple with consecutive indices"
            )
    signals = [basis_eval(s, n_samples, r_max) for s in specs]
    worst = 0.0
    for j in range(len(signals)):
        for k in range(j):
            worst = max(worst, abs(inner_product(signals[j], signals[k])))
    return worst
