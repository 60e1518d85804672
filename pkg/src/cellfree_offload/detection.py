"""Zero-forcing detection at the CPU and second-hop SINR.

A single ZF receiver acts on the stacked ``M x K`` estimated channel. Its
exact SINR treats the CSI-error leakage as uncorrelated noise; the
asymptotic SINR is the large-``M`` deterministic limit.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import SingularChannelError


@dataclass(frozen=True, eq=False)
class SinrReport:
    gamma_exact: np.ndarray
    gamma_asym: np.ndarray
    gram_eigenvalues: np.ndarray
    relative_gap: np.ndarray


def zf_detector(G_hat, cond_threshold=1e10):
    """Left pseudo-inverse ``(G^H G)^{-1} G^H`` of the estimated channel.

    Raises:
        SingularChannelError: if ``M < K`` or the condition number of
            ``G_hat`` exceeds ``cond_threshold``.
    """
    G_hat = np.asarray(G_hat)
    M, K = G_hat.shape
    if M < K:
        raise SingularChannelError(np.inf)
    cond = np.linalg.cond(G_hat)
    if not np.isfinite(cond) or cond > cond_threshold:
        raise SingularChannelError(cond)
    return np.linalg.pinv(G_hat)


def gram_eigenvalues(G_hat):
    """Eigenvalues of ``G_hat^H G_hat`` in descending order, clipped at 0."""
    G_hat = np.asarray(G_hat)
    lam = np.linalg.eigvalsh(G_hat.conj().T @ G_hat)[::-1]
    return np.clip(lam, 0.0, None)


def exact_sinr(G_hat, A, scenario, beta=None):
    """Per-task SINR of the ZF output for a fixed estimate.

    With ``beta`` omitted (unit large-scale gains) this is
    ``rho q_k (1 - tau^2) / ((rho tau^2 sum_j q_j + sigma2) ||a_k||^2)``.
    Given ``beta`` the error leakage into task k is weighted per CAN:
    ``rho tau^2 sum_m |a_km|^2 sum_j beta_mj q_j``.
    """
    s = scenario
    tau2 = s.tau_D**2
    abs_a2 = np.abs(np.asarray(A)) ** 2
    row_norm2 = abs_a2.sum(axis=1)
    if beta is None:
        leakage = s.rho * tau2 * np.sum(s.q) * row_norm2
    else:
        leakage = s.rho * tau2 * (abs_a2 @ (np.asarray(beta) @ s.q))
    return s.rho * s.q * (1.0 - tau2) / (leakage + s.sigma2 * row_norm2)


def asymptotic_sinr(scenario, beta=None, eigenvalues=None, variant="beta"):
    """Large-``M`` SINR.

    ``variant="beta"`` (default) returns
    ``q_k rho (1 - tau^2) M mean_m(beta_mk) / sigma2``.
    ``variant="eigen"`` evaluates the eigenvalue expression
    ``q_k rho (1 - tau^2) / ((sigma2 / M) sum_i 1/lambda_i)`` from the Gram
    eigenvalues, kept for side-by-side comparison.
    """
    s = scenario
    num = s.q * s.rho * (1.0 - s.tau_D**2)
    if variant == "beta":
        mean_beta = np.ones(s.K) if beta is None else np.asarray(beta).mean(axis=0)
        return num * s.M * mean_beta / s.sigma2
    if variant == "eigen":
        if eigenvalues is None:
            raise ValueError("variant='eigen' needs Gram eigenvalues")
        with np.errstate(divide="ignore"):
            inv_sum = np.sum(1.0 / np.asarray(eigenvalues))
        return num / ((s.sigma2 / s.M) * inv_sum)
    raise ValueError(f"unknown variant {variant!r}")


def sinr_report(scenario, realization, variant="beta"):
    """Detector, exact and asymptotic SINRs for one realization."""
    A = zf_detector(realization.G_hat, scenario.cond_threshold)
    lam = gram_eigenvalues(realization.G_hat)
    gamma = exact_sinr(realization.G_hat, A, scenario, beta=realization.beta)
    asym = asymptotic_sinr(scenario, beta=realization.beta, eigenvalues=lam, variant=variant)
    # undefined (NaN) when the limit is zero, i.e. tau_D = 1
    with np.errstate(invalid="ignore", divide="ignore"):
        gap = np.where(asym > 0, np.abs(gamma - asym) / asym, np.nan)
    return SinrReport(gamma_exact=gamma, gamma_asym=asym, gram_eigenvalues=lam, relative_gap=gap)
