"""Independent reference computations used to derive expected test values.

Nothing here imports the package's solvers; each oracle reaches the answer by
a different route (closed forms typed from the circuit equations, bisection,
finite differences).
"""

import math


def g_three_segment(x, m0=-0.6, m1=-1.2):
    """The three-case Chua nonlinearity written out branch by branch."""
    if x <= -1:
        return m0 * x + (m0 - m1)
    if x < 1:
        return m1 * x
    return m0 * x - (m0 - m1)


def bisect(f, lo, hi, tol=1e-15, iters=200):
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def band_edge_by_continuity(r_f, r_a, r_b, u_sat, hi=100.0):
    """Current where the linear branch meets the saturated branch, found numerically."""
    linear = lambda i: -(r_b * r_f / r_a) * i
    saturated = lambda i: r_f * i - u_sat
    return bisect(lambda i: linear(i) - saturated(i), 0.0, hi)


def outer_equilibrium_by_root(m0=-0.6, m1=-1.2, lo=1.0, hi=50.0):
    """Root of dx/dtau with y = 0, z = -x on the positive outer segment."""
    return bisect(lambda x: -x - g_three_segment(x, m0, m1), lo, hi)


def central_difference_jacobian(f, s, eps=1e-7):
    cols = []
    for j in range(3):
        sp = list(s)
        sm = list(s)
        sp[j] += eps
        sm[j] -= eps
        fp, fm = f(tuple(sp)), f(tuple(sm))
        cols.append([(a - b) / (2 * eps) for a, b in zip(fp, fm)])
    return [[cols[j][i] for j in range(3)] for i in range(3)]


def rk4_exp_decay(h):
    """Closed-form value of y' = -y after one step, for comparison."""
    return math.exp(-h)
