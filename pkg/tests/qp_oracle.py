"""Independent brute-force oracle for the box- and equality-constrained dual.

Enumerates every active set (each variable at its lower bound, upper bound,
or free), solves the equality-constrained system on the free variables, and
keeps the best feasible stationary point. Exact for n <= ~8; used to check
the iterative solver on tiny problems.
"""

import itertools

import numpy as np

LOWER, UPPER, FREE = 0, 1, 2


def brute_force_dual(kernel_matrix, signs, linear, box):
    """Minimize 0.5 a'(SKS)a + linear'a s.t. signs'a = 0, 0 <= a <= box."""
    n = len(signs)
    q = kernel_matrix * np.outer(signs, signs)
    best_obj, best_alpha = np.inf, None
    for statuses in itertools.product((LOWER, UPPER, FREE), repeat=n):
        alpha = np.zeros(n)
        free = [i for i in range(n) if statuses[i] == FREE]
        bound = [i for i in range(n) if statuses[i] != FREE]
        for i in bound:
            if statuses[i] == UPPER:
                alpha[i] = box[i]
        if free:
            f = np.asarray(free)
            b = np.asarray(bound, dtype=np.int64)
            size = len(free)
            kkt = np.zeros((size + 1, size + 1))
            kkt[:size, :size] = q[np.ix_(f, f)]
            kkt[:size, -1] = signs[f]
            kkt[-1, :size] = signs[f]
            rhs = np.zeros(size + 1)
            rhs[:size] = -linear[f]
            if b.size:
                rhs[:size] -= q[np.ix_(f, b)] @ alpha[b]
                rhs[-1] = -(signs[b] @ alpha[b])
            sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
            if not np.allclose(kkt @ sol, rhs, atol=1e-9):
                continue
            alpha[f] = sol[:size]
            if np.any(alpha[f] < -1e-9) or np.any(alpha[f] > box[f] + 1e-9):
                continue
            alpha = np.clip(alpha, 0.0, box)
        if abs(signs @ alpha) > 1e-9:
            continue
        obj = 0.5 * alpha @ q @ alpha + linear @ alpha
        if obj < best_obj:
            best_obj, best_alpha = obj, alpha.copy()
    return best_obj, best_alpha
