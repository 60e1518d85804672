"""First-hop bandwidth split.

With the offloading decision fixed, the bandwidth-dependent part of the
total cost is ``sum_k c_k / eta_k`` where
``c_k = w_k ((1 - mu_k) + mu_k p_b) l_k / (B log2(1 + snr_k))``. Its minimizer
on the simplex is ``eta_k = sqrt(c_k) / sum_j sqrt(c_j)``.
"""

import numpy as np

from .channel import first_hop_snr
from .exceptions import InfeasibleError, SolverError


def bandwidth_weights(scenario, realization):
    """Coefficients ``c_k`` of the first-hop cost ``sum_k c_k / eta_k``."""
    s = scenario
    snr = first_hop_snr(s, realization)
    if np.any(snr <= 0):
        raise InfeasibleError(f"tasks {np.flatnonzero(snr <= 0).tolist()} have zero first-hop SNR")
    return s.w * ((1.0 - s.mu) + s.mu * s.p_b) * s.l / (s.B * np.log2(1.0 + snr))


def kkt_split(c):
    """Closed-form simplex minimizer of ``sum c_k / eta_k``; uniform if all ``c`` are 0."""
    c = np.asarray(c, dtype=float)
    if np.any(c < 0):
        raise ValueError("weights must be non-negative")
    root = np.sqrt(c)
    total = root.sum()
    if total == 0:
        return np.full(c.shape, 1.0 / c.size)
    return root / total


def kkt_multiplier(c):
    """Common multiplier of the simplex constraint at the optimum, ``(sum sqrt c)^2``."""
    return float(np.sum(np.sqrt(np.asarray(c, dtype=float))) ** 2)


def optimal_bandwidth(scenario, realization):
    """Optimal bandwidth fractions for one realization."""
    return kkt_split(bandwidth_weights(scenario, realization))


def split_objective(c, eta):
    return float(np.sum(np.asarray(c) / np.asarray(eta)))


def _project_simplex(y, floor):
    """Euclidean projection onto ``{x : x >= floor, sum x = 1}``."""
    n = y.size
    mass = 1.0 - n * floor
    v = y - floor
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - mass
    idx = np.arange(1, n + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0) + floor


def minimize_on_simplex(c, tolerance=1e-12, max_iter=200_000, floor=1e-12):
    """Projected gradient descent for ``min sum c_k / eta_k`` on the simplex.

    Barzilai-Borwein steps with a backtracking sufficient-decrease test.
    Stops once the relative objective change and the largest coordinate move
    both fall below ``tolerance``.

    Raises:
        SolverError: if ``max_iter`` is reached first.
    """
    c = np.asarray(c, dtype=float)
    n = c.size
    if n == 1:
        return np.ones(1)
    scale = c.max()
    if scale == 0:
        return np.full(n, 1.0 / n)
    c = c / scale

    x = np.full(n, 1.0 / n)
    f = np.sum(c / x)
    g = -c / x**2
    step = 1.0 / np.max(np.abs(g))
    for _ in range(max_iter):
        while True:
            x_new = _project_simplex(x - step * g, floor)
            dx = x_new - x
            f_new = np.sum(c / x_new)
            if f_new <= f + g @ dx + (dx @ dx) / (2.0 * step) or step < 1e-300:
                break
            step *= 0.5
        g_new = -c / x_new**2
        if abs(f - f_new) <= tolerance * abs(f) and np.max(np.abs(dx)) <= tolerance:
            return x_new
        sy = dx @ (g_new - g)
        step = (dx @ dx) / sy if sy > 0 else step * 2.0
        x, f, g = x_new, f_new, g_new
    raise SolverError("projected gradient did not converge", np.max(np.abs(dx)))


def bandwidth_oracle(scenario, realization, tolerance=1e-12):
    """Numerical bandwidth split, independent of the closed form."""
    return minimize_on_simplex(bandwidth_weights(scenario, realization), tolerance=tolerance)
