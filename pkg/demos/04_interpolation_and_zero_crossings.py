"""What optimal selection buys: interpolation and boundary oscillation.

The double-zero partial sums match both the value and the first
derivative of the signal at every selected parameter.  On the boundary,
the real reconstruction residual after n terms oscillates: it changes
sign at least 4n times.  Both effects are shown on the piecewise signal.
"""

from dafd import EngineConfig, rate_bound_check, run_afd, verify_interpolation, zero_crossing_count
from dafd.experiments import (
    example1_projection,
    example1_samples,
    example2_class_bound,
    example2_signal,
)

N = 4096
x = example1_samples(N)
fplus, _ = example1_projection(N)
d = run_afd(fplus, "double", EngineConfig(max_terms=8))

print("interpolation errors of the n-term partial sum at the selected points")
print("n    max |f - S_n|    max |f' - S_n'|")
for n in (2, 4, 6, 8):
    report = verify_interpolation(fplus, d, n)
    print(f"{n}    {report.max_value_error:.3e}        {report.max_derivative_error:.3e}")

print("\nresidual sign changes on an 8192-point grid (lower bound 4n)")
for n in range(1, 6):
    count = zero_crossing_count(x, d, n)
    print(f"n = {n}: {count:3d} sign changes (bound {4 * n})")

f2 = example2_signal(N)
d2 = run_afd(f2, "double", EngineConfig(max_terms=10))
bound = example2_class_bound()
print(f"\nresidual decay against {bound:.4f}/sqrt(n) for the kernel combination")
print("n    ||residual||    bound")
for row in rate_bound_check(f2, d2, bound):
    print(
        f"{row.n:<5}{row.residual_energy**0.5:<15.6e} {row.bound:.6e}"
        + ("" if row.passed else "  VIOLATED")
    )
