"""Single-zero versus double-zero greedy decomposition on a toy signal.

For f(z) = z the best parameter can be worked out by hand: the matching
energy (1 - |a|^2) |a|^2 peaks on the circle |a| = 1/sqrt(2), the first
coefficient is 1/2, and the double-zero remainder is (z - sqrt(2))/2 with
energy 3/4.  The demo reproduces this and then shows why stationarity
matters: dividing by the squared Moebius factor at a non-stationary
parameter throws energy out of the Hardy space.
"""

import numpy as np

from dafd import (
    BoundarySignal,
    EngineConfig,
    double_step,
    inner_product,
    normalized_kernel,
    run_afd,
)
from dafd.signals import boundary_z

N = 2048
config = EngineConfig(n_samples=N)
f = BoundarySignal(boundary_z(N))

d = run_afd(f, "double", EngineConfig(n_samples=N, max_terms=1))
term = d.terms[0]
print("one double-zero step on f(z) = z")
print(f"  selected a:        {term.a:+.12f}  (|a| = {abs(term.a):.12f})")
print(f"  expected |a|:      {1 / np.sqrt(2):.12f}")
print(f"  coefficient:       {term.c:+.12f}")
print(f"  residual energy:   {term.residual_energy_after:.12f}  (expected 0.75)")
print(f"  leakage:           {term.leakage:.3e}")

# The same division at a non-stationary parameter is not sound: the
# quotient has genuine negative-frequency content, and the step says so.
a_bad = 0.3
c_bad = inner_product(f, normalized_kernel(a_bad, N))
bad = double_step(f, a_bad, c_bad, config)
print(f"\nforcing a = {a_bad} (not stationary for z)")
print(f"  leakage:           {bad.leakage:.3e} of energy {f.energy():.3f}")
for message in bad.diagnostics:
    print(f"  diagnostic:        {message}")

# Full greedy runs, single-zero and double-zero, on a rational signal.
mix = BoundarySignal(
    1.2 * normalized_kernel(0.5 + 0.2j, N).samples
    - 0.7 * normalized_kernel(-0.3 + 0.6j, N).samples
    + 0.4 * normalized_kernel(0.1 - 0.4j, N).samples
)
print("\nerror decay on a three-kernel signal")
print("n    core          double")
core = run_afd(mix, "core", EngineConfig(n_samples=N, max_terms=6))
dbl = run_afd(mix, "double", EngineConfig(n_samples=N, max_terms=6))
for k in range(max(len(core.terms), len(dbl.terms))):
    ec = core.relative_errors()[k] if k < len(core.terms) else float("nan")
    ed = dbl.relative_errors()[k] if k < len(dbl.terms) else float("nan")
    print(f"{k + 1}    {ec:.6e}  {ed:.6e}")
