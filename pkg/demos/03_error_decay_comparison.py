"""Error decay of the built-in reproductions.

Runs the piecewise signal (ex1) and the five-kernel combination (ex2)
through the single-zero, double-zero, and mono-component decompositions
and prints the relative L2 error per term count.  The double-zero run
needs roughly half the terms of the single-zero run for equal accuracy.
"""

from dafd import EngineConfig, error_decay_table
from dafd.experiments import example1_projection, example2_signal

N = 4096
N_MAX = 12
MODES = ("core", "double", "mono")


def show(name, f):
    rows = error_decay_table(f, MODES, N_MAX, EngineConfig(n_samples=N))
    by_mode = {m: [r for r in rows if r.mode == m] for m in MODES}
    print(f"\n{name}: relative L2 error")
    print("n    " + "".join(f"{m:<14}" for m in MODES))
    for k in range(N_MAX):
        cells = []
        for m in MODES:
            cells.append(
                f"{by_mode[m][k].relative_l2_error:<14.6e}"
                if k < len(by_mode[m])
                else " " * 14
            )
        print(f"{k + 1:<5}" + "".join(cells))


fplus, _ = example1_projection(N)
show("piecewise signal (ex1)", fplus)

show("five-kernel combination (ex2)", example2_signal(N))
