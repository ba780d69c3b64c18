"""Compiled inner loop of the clamped Euler relaxation."""
import numba as nb
import numpy as np


@nb.njit(cache=True)
def relax_kernel(weights, bias, s, n_input, out_idx, y, beta, steps, h, tol, traj):
    """Integrate ``steps`` clamped Euler steps in place, recording into ``traj``.

    Returns ``(converged_at, diverged_at)``; each is -1 when it did not happen.
    Rows after an early stop are filled with the final state.
    """
    n = s.shape[0]
    leak = np.zeros(n)
    for j in range(n):
        acc = 0.0
        for i in range(n):
            acc += weights[j, i]
        leak[j] = acc
    v = np.empty(n)
    traj[0, :] = s
    for m in range(steps):
        for j in range(n_input, n):
            acc = 0.0
            for i in range(n):
                acc += weights[i, j] * s[i]
            v[j] = acc + bias[j] - s[j] * leak[j]
        if beta != 0.0:
            for k in range(out_idx.shape[0]):
                j = out_idx[k]
                v[j] -= beta * (s[j] - y[k])
        delta = 0.0
        for j in range(n_input, n):
            if not np.isfinite(v[j]):
                return -1, m + 1
            z = s[j] + h * v[j]
            if z < 0.0:
                z = 0.0
            elif z > 1.0:
                z = 1.0
            d = abs(z - s[j])
            if d > delta:
                delta = d
            s[j] = z
        traj[m + 1, :] = s
        if tol > 0.0 and delta < tol:
            for r in range(m + 2, steps + 1):
                traj[r, :] = s
            return m + 1, -1
    return -1, -1
