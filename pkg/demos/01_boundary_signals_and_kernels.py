"""Boundary signals, analytic projection, and reproducing kernels.

Walks through the basic objects: sampling a real signal on the circle,
splitting off its analytic part, evaluating it inside the disc, and the
closed-form kernel identities everything else is built on.
"""

import numpy as np

from dafd import (
    BoundarySignal,
    eval_disc,
    inner_product,
    normalized_kernel,
    project_real,
    reconstruct_real,
    szego_boundary,
)
from dafd.signals import grid_t

N = 1024
t = grid_t(N)

# A real signal and its analytic (nonnegative-frequency) part.
x = np.cos(3 * t) + 0.5 * np.sin(t) - 0.2
fplus, c0 = project_real(x)
print(f"mean of x:            {c0:+.6f}")
print(f"analytic flag:        {fplus.analytic}")
roundtrip = reconstruct_real(fplus, c0)
print(f"roundtrip max error:  {np.max(np.abs(roundtrip - x)):.2e}")

# The reproducing property: pairing with a kernel evaluates the function.
a = 0.4 + 0.3j
k_a = szego_boundary(a, N)
print(f"\n<f, k_a>:             {inner_product(fplus, k_a):+.6f}")
print(f"f(a) by power series: {eval_disc(fplus, a):+.6f}")

# Normalized kernels have unit energy; their pairing rescales f(a).
e_a = normalized_kernel(a, N)
print(f"\n||e_a||^2:            {e_a.energy():.12f}")
lhs = inner_product(fplus, e_a)
rhs = np.sqrt(1 - abs(a) ** 2) * eval_disc(fplus, a)
print(f"<f, e_a>:             {lhs:+.6f}")
print(f"sqrt(1-|a|^2) f(a):   {rhs:+.6f}")

# Kernels against kernels reduce to a closed form as well.
b = 0.5 - 0.2j
k_b = szego_boundary(b, N)
print(f"\n<k_b, k_a>:           {inner_product(k_b, k_a):+.6f}")
print(f"1/(1 - conj(b) a):    {1 / (1 - np.conj(b) * a):+.6f}")
