"""Boundary signals on the unit circle and their evaluation inside the disc.

A signal is stored as N uniform samples x_j at t_j = 2*pi*j/N together with
its cached discrete Fourier coefficients c_m = (1/N) sum_j x_j exp(-i m t_j).
Bins 0..N//2 carry nonnegative frequencies, which make up the analytic
(Hardy-space) content; the remaining bins carry negative frequencies.

All boundary integrals are the N-point rectangle rule on the uniform grid,
which is spectrally accurate for band-limited integrands.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import ContractError, DimensionError, DomainError

MIN_SAMPLES = 64
DEFAULT_N_SAMPLES = 4096
DEFAULT_R_MAX = 0.995

# relative tolerance below which negative-frequency energy counts as zero
ANALYTIC_REL_TOL = 1e-12
# disc evaluation drops trailing coefficients below this relative magnitude
COEFF_REL_CUTOFF = 1e-16
# fraction of total energy in the top 5% of bins that triggers a warning
ALIASING_ENERGY_TOL = 1e-8


def grid_t(n_samples: int) -> np.ndarray:
    """Uniform sample points t_j = 2*pi*j/N on [0, 2*pi)."""
    return np.arange(n_samples) * (2.0 * np.pi / n_samples)


@lru_cache(maxsize=32)
def boundary_z(n_samples: int) -> np.ndarray:
    """Samples of z = exp(i t) on the uniform grid (cached, read-only)."""
    z = np.exp(1j * grid_t(n_samples))
    z.setflags(write=False)
    return z


class BoundarySignal:
    """Immutable sampled function on the unit circle with cached spectrum.

    Parameters
    ----------
    samples : array_like of complex, length N >= 64
        Values on the uniform grid t_j = 2*pi*j/N.

    The spectrum is computed once at construction and both arrays are
    frozen, so instances are safe to share across threads.
    """

    __slots__ = ("samples", "spectrum", "n_samples", "analytic")

    def __init__(self, samples):
        arr = np.array(samples, dtype=np.complex128)
        if arr.ndim != 1:
            raise ContractError("samples must be one-dimensional")
        if arr.size < MIN_SAMPLES:
            raise ContractError(
                f"need at least {MIN_SAMPLES} samples, got {arr.size}"
            )
        spectrum = np.fft.fft(arr) / arr.size
        arr.setflags(write=False)
        spectrum.setflags(write=False)
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "spectrum", spectrum)
        object.__setattr__(self, "n_samples", arr.size)
        total = float(np.sum(np.abs(spectrum) ** 2))
        neg = float(np.sum(np.abs(spectrum[arr.size // 2 + 1:]) ** 2))
        object.__setattr__(
            self, "analytic", neg <= ANALYTIC_REL_TOL * total or total == 0.0
        )

    def __setattr__(self, name, value):
        raise AttributeError("BoundarySignal is immutable")

    @classmethod
    def from_spectrum(cls, spectrum) -> "BoundarySignal":
        """Build a signal from Fourier coefficients c_m (bin order as FFT)."""
        spec = np.asarray(spectrum, dtype=np.complex128)
        return cls(spec.size * np.fft.ifft(spec))

    def energy(self) -> float:
        """Squared L2 norm (1/N) sum |x_j|^2."""
        return float(np.mean(np.abs(self.samples) ** 2))

    def norm(self) -> float:
        return float(np.sqrt(self.energy()))

    def __repr__(self):
        return (
            f"BoundarySignal(n_samples={self.n_samples}, "
            f"analytic={self.analytic}, norm={self.norm():.6g})"
        )


def _check_same_grid(f: BoundarySignal, g: BoundarySignal):
    if f.n_samples != g.n_samples:
        raise DimensionError(
            f"mismatched sample counts: {f.n_samples} != {g.n_samples}"
        )


def _check_disc(a: complex, r_max: float):
    if abs(a) > r_max:
        raise DomainError(f"|a| = {abs(a):.6g} exceeds r_max = {r_max:.6g}")


def inner_product(f: BoundarySignal, g: BoundarySignal) -> complex:
    """Boundary inner product (1/N) sum_j f_j conj(g_j).

    This is the rectangle-rule quadrature of (1/2pi) int f conj(g) dt and is
    conjugate-symmetric in its arguments.
    """
    _check_same_grid(f, g)
    return complex(np.vdot(g.samples, f.samples) / f.n_samples)


def project_real(samples) -> tuple[BoundarySignal, float]:
    """Analytic (nonnegative-frequency) part of a real signal.

    Keeps c_m for m >= 0 with c_0 whole; for even N the shared Nyquist bin
    is halved so that ``reconstruct_real(project_real(x))`` returns x
    exactly for any real vector.  Returns the analytic signal and c_0.
    """
    arr = np.asarray(samples)
    if np.iscomplexobj(arr):
        raise ContractError("project_real expects real samples")
    x = np.ascontiguousarray(arr, dtype=np.float64)
    if x.ndim != 1:
        raise ContractError("samples must be one-dimensional")
    if x.size < MIN_SAMPLES:
        raise ContractError(f"need at least {MIN_SAMPLES} samples, got {x.size}")
    n = x.size
    c = np.fft.fft(x) / n
    kept = np.zeros_like(c)
    kept[: n // 2 + 1] = c[: n // 2 + 1]
    if n % 2 == 0:
        kept[n // 2] *= 0.5
    return BoundarySignal.from_spectrum(kept), float(c[0].real)


def reconstruct_real(fplus: BoundarySignal, c0: float) -> np.ndarray:
    """Inverse of project_real: 2*Re(fplus) - c0 on the sample grid."""
    return 2.0 * fplus.samples.real - c0


def anti_analytic_energy(f: BoundarySignal) -> float:
    """Energy held in negative-frequency bins; zero for analytic signals."""
    return float(np.sum(np.abs(f.spectrum[f.n_samples // 2 + 1:]) ** 2))


def analytic_part(f: BoundarySignal) -> tuple[BoundarySignal, float]:
    """Zero the negative-frequency bins, returning the projection and the
    discarded energy."""
    spec = np.array(f.spectrum)
    leaked = float(np.sum(np.abs(spec[f.n_samples // 2 + 1:]) ** 2))
    spec[f.n_samples // 2 + 1:] = 0.0
    return BoundarySignal.from_spectrum(spec), leaked


def taylor_coefficients(f: BoundarySignal) -> np.ndarray:
    """Nonnegative-frequency coefficients truncated at the last bin whose
    magnitude exceeds ``COEFF_REL_CUTOFF`` times the signal norm."""
    coeffs = f.spectrum[: f.n_samples // 2 + 1]
    cutoff = COEFF_REL_CUTOFF * f.norm()
    significant = np.nonzero(np.abs(coeffs) > cutoff)[0]
    if significant.size == 0:
        return np.zeros(1, dtype=np.complex128)
    return coeffs[: significant[-1] + 1]


def _require_analytic(f: BoundarySignal):
    if not f.analytic:
        raise ContractError(
            "signal has significant negative-frequency content; "
            "project it first"
        )


def eval_disc(f: BoundarySignal, a: complex, r_max: float = DEFAULT_R_MAX) -> complex:
    """Evaluate the analytic extension f(a) = sum_{m>=0} c_m a^m by Horner."""
    _require_analytic(f)
    _check_disc(a, r_max)
    return complex(npoly.polyval(complex(a), taylor_coefficients(f)))


def eval_deriv_disc(
    f: BoundarySignal, a: complex, order: int = 1, r_max: float = DEFAULT_R_MAX
) -> complex:
    """Evaluate the order-th derivative of the analytic extension at a."""
    if order < 1:
        raise ContractError("derivative order must be >= 1")
    _require_analytic(f)
    _check_disc(a, r_max)
    deriv = npoly.polyder(taylor_coefficients(f), m=order)
    return complex(npoly.polyval(complex(a), deriv))


def aliasing_fraction(f: BoundarySignal) -> float:
    """Fraction of total energy held by bins with |m| >= 0.95 * (N/2)."""
    n = f.n_samples
    m = np.fft.fftfreq(n, d=1.0 / n)
    mask = np.abs(m) >= 0.95 * (n / 2.0)
    total = float(np.sum(np.abs(f.spectrum) ** 2))
    if total == 0.0:
        return 0.0
    return float(np.sum(np.abs(f.spectrum[mask]) ** 2) / total)
