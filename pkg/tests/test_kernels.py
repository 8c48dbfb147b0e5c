"""Cross-backend agreement: the numba kernels must reproduce the numpy
fallback to floating-point noise on every routine."""

import numpy as np
import pytest

from inflakit import _kernels_np

nb_kernels = pytest.importorskip("inflakit._kernels_nb")


@pytest.fixture(scope="module")
def rng():
    return np.random.default_rng(99)


def assert_matches(a, b, tol=1e-12):
    a = np.asarray(a)
    b = np.asarray(b)
    assert a.shape == b.shape
    assert np.max(np.abs(a - b)) <= tol * max(1.0, np.max(np.abs(b)))


def test_gbm_paths_all_schemes(rng):
    z = rng.standard_normal((200, 50))
    for scheme in (0, 1, 2):
        a = _kernels_np.gbm_paths(1.0, 0.05, 0.2, 0.02, z, scheme)
        b = nb_kernels.gbm_paths(1.0, 0.05, 0.2, 0.02, z, scheme)
        assert_matches(a, b)


def test_cir_paths(rng):
    z = rng.standard_normal((200, 80))
    a = _kernels_np.cir_paths(0.04, 0.05, 1.2, 0.15, 0.01, z)
    b = nb_kernels.cir_paths(0.04, 0.05, 1.2, 0.15, 0.01, z)
    assert_matches(a, b)


def test_ou_exact_paths(rng):
    z = rng.standard_normal((150, 60))
    theta = rng.uniform(0.0, 0.001, size=60)
    a = _kernels_np.ou_exact_paths(0.02, 0.995, theta, 0.0012, z)
    b = nb_kernels.ou_exact_paths(0.02, 0.995, theta, 0.0012, z)
    assert_matches(a, b)


def test_jy_exact_paths(rng):
    zc = rng.standard_normal((100, 40, 3))
    th_n = rng.uniform(0.0, 1e-3, size=40)
    th_r = rng.uniform(0.0, 1e-3, size=40)
    args = (0.03, 0.01, 100.0, 0.05, 0.995, 0.99, th_n, th_r,
            0.002, 0.0015, 0.012, zc)
    out_np = _kernels_np.jy_exact_paths(*args)
    out_nb = nb_kernels.jy_exact_paths(*args)
    for a, b in zip(out_np, out_nb):
        assert_matches(a, b)


def test_jy_euler_paths(rng):
    zc = rng.standard_normal((100, 40, 3))
    th_n = rng.uniform(0.0, 1e-3, size=40)
    th_r = rng.uniform(0.0, 1e-3, size=40)
    args = (0.03, 0.01, 100.0, 0.05, 0.1, 0.2, 0.01, 0.008, 0.012,
            1e-5, th_n, th_r, zc)
    out_np = _kernels_np.jy_euler_paths(*args)
    out_nb = nb_kernels.jy_euler_paths(*args)
    for a, b in zip(out_np, out_nb):
        assert_matches(a, b)


def test_exp_martingale_paths(rng):
    z = rng.standard_normal((300, 30))
    a = _kernels_np.exp_martingale_paths(1.0, 0.25, 0.1, z)
    b = nb_kernels.exp_martingale_paths(1.0, 0.25, 0.1, z)
    assert_matches(a, b)


def test_binomial_backward(rng):
    terminal = np.maximum(rng.uniform(50, 150, size=257) - 100.0, 0.0)
    a = _kernels_np.binomial_backward(terminal, 0.47, 0.999)
    b = nb_kernels.binomial_backward(terminal, 0.47, 0.999)
    assert abs(a - b) < 1e-12


def test_ho_lee_forward_induction():
    targets = np.exp(-0.02 * np.arange(1, 13) - 0.0005 * np.arange(1, 13) ** 2)
    m_np, q_np = _kernels_np.ho_lee_forward_induction(targets, 0.01, 1.0, 0.0205)
    m_nb, q_nb = nb_kernels.ho_lee_forward_induction(targets, 0.01, 1.0, 0.0205)
    assert_matches(m_np, m_nb)
    assert_matches(q_np, q_nb)


def test_backend_flag_reports():
    from inflakit import kernels

    assert kernels.BACKEND in ("numba", "numpy")
