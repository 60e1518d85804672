import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cellfree_offload import (
    PathLossParams,
    asymptotic_sinr,
    exact_sinr,
    gram_eigenvalues,
    make_scenario,
    sample_realization,
    sinr_report,
    zf_detector,
)
from cellfree_offload.exceptions import SingularChannelError
from conftest import rand_complex
from oracles import monte_carlo_sinr

UNITY = PathLossParams(model="unity")


def dft_columns(M, K):
    return np.exp(-2j * np.pi * np.outer(np.arange(M), np.arange(K)) / M)


def test_identity_gram():
    np.testing.assert_allclose(gram_eigenvalues(np.eye(4)), np.ones(4))


def test_orthogonal_columns_give_scaled_adjoint():
    F = dft_columns(16, 4)
    np.testing.assert_allclose(gram_eigenvalues(F), np.full(4, 16.0), rtol=1e-12)
    np.testing.assert_allclose(zf_detector(F), F.conj().T / 16, atol=1e-14)


def test_eigenvalue_trace_identity():
    G = rand_complex(np.random.default_rng(1), (64, 4))
    lam = gram_eigenvalues(G)
    assert np.all(np.diff(lam) <= 0) and np.all(lam >= 0)
    assert lam.sum() == pytest.approx(np.sum(np.abs(G) ** 2), rel=1e-8)


def test_detector_matches_normal_equations():
    G = rand_complex(np.random.default_rng(2), (40, 6))
    A = zf_detector(G)
    np.testing.assert_allclose(A, np.linalg.solve(G.conj().T @ G, G.conj().T), atol=1e-12)
    np.testing.assert_allclose(A @ G, np.eye(6), atol=1e-10)


@pytest.mark.parametrize("G", [np.zeros((8, 2)), np.ones((8, 2)), rand_complex(np.random.default_rng(0), (3, 5))])
def test_singular_or_wide_channels_are_rejected(G):
    with pytest.raises(SingularChannelError):
        zf_detector(G)


def test_exact_sinr_orthogonal_closed_form():
    s = make_scenario(K=4, M=16, tau_D=0.0, q=[0.1, 0.2, 0.3, 0.4], sigma2=1.0)
    F = dft_columns(16, 4)
    np.testing.assert_allclose(exact_sinr(F, zf_detector(F), s), s.rho * s.q * 16 / s.sigma2, rtol=1e-12)


def test_exact_sinr_matches_monte_carlo_perfect_csi():
    s = make_scenario(K=4, M=16, tau_D=0.0, q=[0.1, 0.2, 0.3, 0.4], sigma2=1.0)
    G = rand_complex(np.random.default_rng(5), (16, 4))
    A = zf_detector(G)
    mc = monte_carlo_sinr(G, A, s, n_symbols=1_000_000, seed=1)
    np.testing.assert_allclose(exact_sinr(G, A, s), mc, rtol=0.02)


@pytest.mark.slow
def test_exact_sinr_matches_monte_carlo_with_csi_error_and_path_loss():
    s = make_scenario(K=4, M=16, tau_D=0.3, q=[0.1, 0.2, 0.3, 0.4], sigma2=1.0)
    rng = np.random.default_rng(3)
    beta = rng.uniform(0.1, 1.0, (16, 4))
    G = np.sqrt(beta) * rand_complex(rng, (16, 4))
    A = zf_detector(G)
    mc = monte_carlo_sinr(G, A, s, beta=beta, n_symbols=1_000_000, seed=2)
    np.testing.assert_allclose(exact_sinr(G, A, s, beta=beta), mc, rtol=0.02)


def test_no_csi_means_no_signal():
    s = make_scenario(K=3, M=16, tau_D=1.0)
    r = sample_realization(s, 0)
    np.testing.assert_array_equal(sinr_report(s, r).gamma_exact, 0.0)


def test_sinr_positive_and_decreasing_in_tau():
    G = rand_complex(np.random.default_rng(4), (32, 4))
    A = zf_detector(G)
    prev = np.inf
    for tau in np.linspace(0.0, 0.99, 12):
        g = exact_sinr(G, A, make_scenario(K=4, M=32, tau_D=tau))
        assert np.all(g > 0) and np.all(g < prev)
        prev = g


def test_sinr_linear_in_own_power_without_csi_error():
    G = rand_complex(np.random.default_rng(6), (32, 3))
    A = zf_detector(G)
    g1 = exact_sinr(G, A, make_scenario(K=3, M=32, tau_D=0.0, q=1.0))
    g2 = exact_sinr(G, A, make_scenario(K=3, M=32, tau_D=0.0, q=2.0))
    np.testing.assert_allclose(g2, 2 * g1, rtol=1e-12)


@settings(max_examples=40, deadline=None)
@given(re=st.floats(0.1, 10), im=st.floats(-10, 10), seed=st.integers(0, 1000))
def test_scale_invariance(re, im, seed):
    c = complex(re, im)
    G = rand_complex(np.random.default_rng(seed), (24, 3))
    s = make_scenario(K=3, M=24, tau_D=0.0)
    A, Ac = zf_detector(G), zf_detector(c * G)
    np.testing.assert_allclose(Ac @ (c * G), np.eye(3), atol=1e-9)
    np.testing.assert_allclose(np.sum(np.abs(Ac) ** 2, axis=1), np.sum(np.abs(A) ** 2, axis=1) / abs(c) ** 2, rtol=1e-9)
    np.testing.assert_allclose(exact_sinr(c * G, Ac, s), abs(c) ** 2 * exact_sinr(G, A, s), rtol=1e-9)


def test_asymptotic_forms():
    s = make_scenario(K=2, M=64, tau_D=0.1, q=[1.0, 2.0], rho=1.0, sigma2=2.0)
    np.testing.assert_allclose(asymptotic_sinr(s), [0.99 * 64 / 2, 2 * 0.99 * 64 / 2], rtol=1e-14)
    beta = np.full((64, 2), 0.5)
    np.testing.assert_allclose(asymptotic_sinr(s, beta=beta), 0.5 * asymptotic_sinr(s), rtol=1e-14)
    # eigenvalues all equal to M reproduce the same limit up to the 1/K factor in the sum
    lam = np.full(2, 64.0)
    np.testing.assert_allclose(asymptotic_sinr(s, eigenvalues=lam, variant="eigen"),
                               s.q * 0.99 / ((2.0 / 64) * (2 / 64.0)), rtol=1e-14)
    with pytest.raises(ValueError):
        asymptotic_sinr(s, variant="eigen")


def test_gap_floor_from_wishart_mean():
    # E[1/||a_k||^2] = M - K + 1 for i.i.d. CN(0,1) entries, so with unit
    # gains E[gamma_exact] / gamma_asym = (M - K + 1) / (M (1 + x)),
    # x = rho tau^2 sum(q) / sigma2: the relative gap tends to x / (1 + x).
    K, M, tau, q, sigma2 = 4, 128, 0.3, 0.5, 1.0
    s = make_scenario(K=K, M=M, tau_D=tau, q=q, sigma2=sigma2, pathloss=UNITY)
    ratios = []
    for t in range(400):
        r = sinr_report(s, sample_realization(s, t))
        ratios.append(r.gamma_exact / r.gamma_asym)
    x = tau**2 * K * q / sigma2
    assert np.mean(ratios) == pytest.approx((M - K + 1) / (M * (1 + x)), rel=0.01)


def test_report_fields(trial):
    s, _, report = trial
    assert report.gamma_exact.shape == report.gamma_asym.shape == (s.K,)
    np.testing.assert_allclose(report.relative_gap, np.abs(report.gamma_exact - report.gamma_asym) / report.gamma_asym)
