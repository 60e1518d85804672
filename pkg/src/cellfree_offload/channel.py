"""Seeded channel realizations for both hops.

Every random quantity comes from its own generator keyed by
``(seed, trial, attempt, stream, index)``. Draws are laid out so that the
realization for ``M`` CANs is a row prefix of the one for ``2M``, and the one
for ``K`` tasks a column prefix of the one for ``K + 1``; sweeps over ``M`` and
``K`` therefore compare nested channels trial by trial.
"""

from dataclasses import dataclass

import numpy as np

# stream identifiers
_TN_POS, _FAN_POS, _CAN_POS, _FIRST_HOP, _G_HAT, _CSI_ERR = 1, 2, 3, 4, 5, 6


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """One draw of both hops.

    Attributes:
        d: first-hop path-loss gains, shape (K,).
        h: first-hop small-scale gains, shape (K,), CN(0, 1).
        G_hat: estimated second-hop channel, shape (M, K).
        G: actual second-hop channel, shape (M, K).
        beta: second-hop large-scale gains, shape (M, K).
        trial_index: trial this realization belongs to.
        attempt: resample counter (0 unless earlier draws were rejected).
    """

    d: np.ndarray
    h: np.ndarray
    G_hat: np.ndarray
    G: np.ndarray
    beta: np.ndarray
    trial_index: int = 0
    attempt: int = 0


def path_loss(distance, params):
    """Large-scale power gain ``(d_ref / max(d, d_ref)) ** exponent``.

    Gains are clamped to 1 inside the reference distance so the law stays
    non-increasing and never amplifies.
    """
    d = np.asarray(distance, dtype=float)
    if np.any(~(d > 0)):
        raise ValueError("path_loss: distance must be positive")
    if params.model == "unity":
        return np.ones_like(d)
    return (params.ref_distance / np.maximum(d, params.ref_distance)) ** params.exponent


def complex_gaussian(rng, n):
    """``n`` i.i.d. CN(0, 1) samples (prefix-stable in ``n``)."""
    z = rng.standard_normal((n, 2))
    return (z[:, 0] + 1j * z[:, 1]) / np.sqrt(2.0)


def _rng(seed, trial, attempt, stream, index=0):
    return np.random.default_rng([int(seed), int(trial), int(attempt), stream, int(index)])


def _positions(seed, trial, attempt, stream, n, extent):
    return _rng(seed, trial, attempt, stream).uniform(0.0, extent, (n, 2))


def sample_realization(scenario, trial_index, attempt=0):
    """Draw the channel realization for one trial.

    Node positions are uniform in a square of side ``pathloss.extent``; TN k
    talks to FAN k on the first hop, and every FAN reaches every CAN on the
    second hop. The estimate is drawn first and the actual channel mixed from
    it: ``G = sqrt(1 - tau^2) G_hat + tau sqrt(beta) * Omega``.
    """
    s = scenario
    K, M, pl = s.K, s.M, s.pathloss
    args = (s.seed, trial_index, attempt)

    if pl.model == "unity":
        d = np.ones(K)
        beta = np.ones((M, K))
    else:
        tn = _positions(*args, _TN_POS, K, pl.extent)
        fan = _positions(*args, _FAN_POS, K, pl.extent)
        can = _positions(*args, _CAN_POS, M, pl.extent)
        # coincident nodes get the reference-distance gain
        d = path_loss(np.maximum(np.linalg.norm(tn - fan, axis=1), 1e-9), pl)
        dist = np.linalg.norm(can[:, None, :] - fan[None, :, :], axis=2)
        beta = path_loss(np.maximum(dist, 1e-9), pl)

    h = complex_gaussian(_rng(*args, _FIRST_HOP), K)
    H_hat = np.column_stack([complex_gaussian(_rng(*args, _G_HAT, k), M) for k in range(K)])
    omega = np.column_stack([complex_gaussian(_rng(*args, _CSI_ERR, k), M) for k in range(K)])

    sqrt_beta = np.sqrt(beta)
    G_hat = sqrt_beta * H_hat
    tau = s.tau_D
    G = np.sqrt(1.0 - tau**2) * G_hat + tau * (sqrt_beta * omega)
    return ChannelRealization(d=d, h=h, G_hat=G_hat, G=G, beta=beta, trial_index=int(trial_index), attempt=int(attempt))


def first_hop_snr(scenario, realization):
    """Received SNR at each FAN, ``p_b d_k |h_k|^2 / sigma_k^2``."""
    return scenario.p_b * realization.d * np.abs(realization.h) ** 2 / scenario.sigma2_first
