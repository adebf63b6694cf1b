"""Watch the solver converge and compare the two hard-threshold rules.

Each run records a trace: the relative change of u per iteration and the
relative primal residual of every splitting. The run only counts as
converged once both are small. The "exact" threshold sqrt(2*beta/rho) is
the true proximal step of the L0 penalty; the "paper" rule thresholds at
beta/rho and tends to settle sooner on the same weights.
"""
import io

from semisparse import DecomposeConfig, decompose
from semisparse.synthetic import ramp_sinusoid

f, _ = ramp_sinusoid(64)

for mode in ("exact", "paper"):
    res = decompose(f, DecomposeConfig(hard_shrink_mode=mode, max_iters=400))
    t = res.trace
    print(f"{mode:5s}: {res.iterations:3d} iterations, converged={res.converged}")
    for k in (0, 9, 49, 99, res.iterations - 1):
        if k < len(t):
            print(f"   iter {k + 1:3d}  q_r {t.q_r[k]:.2e}  r_fid {t.r_fidelity[k]:.2e}  "
                  f"r_grad {t.r_grad[k]:.2e}  r_hess {t.r_hess[k]:.2e}")

# the same numbers as CSV, as written by `semisparse decompose --trace-csv`
buf = io.StringIO()
buf.write(",".join(t.COLUMNS) + "\n")
for row in list(t.rows())[:3]:
    buf.write(",".join(repr(x) for x in row) + "\n")
print(buf.getvalue())
