import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bomric import linalg
from bomric.linalg import (
    NotHermitianError,
    ShapeError,
    SylvesterSingularError,
    adjoint,
    expm,
    frobenius_norm,
    hermitian_eig,
    matmul,
    operator_norm_estimate,
    solve_sylvester,
)

from conftest import random_complex, random_hermitian


def matmul_oracle(a, b):
    # triple loop, no vectorization
    n, k = a.shape
    k2, m = b.shape
    assert k == k2
    out = np.zeros((n, m), dtype=complex)
    for i in range(n):
        for j in range(m):
            for l in range(k):
                out[i, j] += a[i, l] * b[l, j]
    return out


def test_matmul_against_triple_loop(rng):
    for _ in range(10):
        a = random_complex(rng, 3)
        b = random_complex(rng, 3)
        assert frobenius_norm(matmul(a, b) - matmul_oracle(a, b)) <= 1e-13


def test_matmul_rectangular(rng):
    a = random_complex(rng, 2, 5)
    b = random_complex(rng, 5, 3)
    assert frobenius_norm(matmul(a, b) - matmul_oracle(a, b)) <= 1e-13


def test_matmul_shape_error(rng):
    with pytest.raises(ShapeError):
        matmul(random_complex(rng, 2, 3), random_complex(rng, 2, 3))


def test_adjoint_by_index_swap(rng):
    a = random_complex(rng, 4, 6)
    adj = adjoint(a)
    for i in range(4):
        for j in range(6):
            assert adj[j, i] == np.conj(a[i, j])


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_adjoint_involution_and_product_rule(seed):
    rng = np.random.default_rng(seed)
    a = random_complex(rng, 3, 4)
    b = random_complex(rng, 4, 2)
    assert np.array_equal(adjoint(adjoint(a)), a)
    assert frobenius_norm(adjoint(a @ b) - adjoint(b) @ adjoint(a)) <= 1e-12


def test_expm_nilpotent_exact():
    n = np.array([[0.0, 1.0], [0.0, 0.0]])
    assert frobenius_norm(expm(n) - np.array([[1, 1], [0, 1]])) <= 1e-15


def test_expm_diagonal_exact():
    d = np.diag([1.0 + 2.0j, -0.5j])
    assert frobenius_norm(expm(d) - np.diag(np.exp(np.diag(d)))) <= 1e-14


def test_expm_matches_eigendecomposition_oracle(rng):
    # independent route: exponentiate the spectrum
    for _ in range(5):
        h = random_hermitian(rng, 8)
        w, v = np.linalg.eigh(h)
        oracle = (v * np.exp(-1j * 0.7 * w)) @ v.conj().T
        got = expm(h, scale=-0.7j)
        assert frobenius_norm(got - oracle) <= 1e-11


def test_expm_antihermitian_is_unitary(rng):
    h = random_hermitian(rng, 6)
    u = expm(h, scale=-1j)
    assert frobenius_norm(u.conj().T @ u - np.eye(6)) <= 1e-12


@given(st.floats(-3, 3), st.floats(-3, 3))
@settings(max_examples=25, deadline=None)
def test_expm_semigroup(t, s):
    rng = np.random.default_rng(99)
    h = random_hermitian(rng, 5)
    lhs = expm(h, scale=-1j * (t + s))
    rhs = expm(h, scale=-1j * t) @ expm(h, scale=-1j * s)
    assert frobenius_norm(lhs - rhs) <= 1e-10


def test_hermitian_eig_pauli_z():
    w, v = hermitian_eig(np.array([[1, 0], [0, -1]], dtype=complex))
    assert np.allclose(w, [-1.0, 1.0])
    assert frobenius_norm(v.conj().T @ v - np.eye(2)) <= 1e-14


def test_hermitian_eig_reconstruction(rng):
    h = random_hermitian(rng, 8)
    w, v = hermitian_eig(h)
    assert np.all(np.diff(w) >= 0)
    recon = (v * w) @ v.conj().T
    assert frobenius_norm(recon - h) <= linalg.TOL_EIG * max(frobenius_norm(h), 1.0)


def test_hermitian_eig_rejects_nonhermitian(rng):
    with pytest.raises(NotHermitianError):
        hermitian_eig(random_complex(rng, 4))


def sylvester_oracle(p, q, r):
    # row-major vec: vec(q @ d) = kron(q, I) vec(d), vec(d @ p) = kron(I, p.T) vec(d)
    n = p.shape[0]
    m = q.shape[0]
    big = np.kron(np.eye(m), p.T) + np.kron(q, np.eye(n))
    return np.linalg.solve(big, r.reshape(-1)).reshape(m, n)


def test_solve_sylvester_against_kronecker_oracle(rng):
    for n, m in ((3, 3), (5, 2), (8, 8)):
        p = random_complex(rng, n)
        q = random_complex(rng, m)
        r = random_complex(rng, m, n)
        d = solve_sylvester(p, q, r)
        assert frobenius_norm(d - sylvester_oracle(p, q, r)) <= 1e-10
        assert frobenius_norm(d @ p + q @ d - r) <= 1e-10


def test_solve_sylvester_singular_spectra():
    p = np.diag([1.0, 2.0]).astype(complex)
    q = np.diag([-1.0, 5.0]).astype(complex)  # -q has eigenvalue 1 = eig of p
    with pytest.raises(SylvesterSingularError):
        solve_sylvester(p, q, np.ones((2, 2), dtype=complex))


def test_solve_sylvester_shape_check(rng):
    with pytest.raises(ShapeError):
        solve_sylvester(random_complex(rng, 3), random_complex(rng, 2), random_complex(rng, 3, 2))


def test_frobenius_norm_definition(rng):
    a = random_complex(rng, 4, 3)
    assert abs(frobenius_norm(a) - np.sqrt(np.sum(np.abs(a) ** 2))) <= 1e-13


def test_operator_norm_rank_one(rng):
    u = random_complex(rng, 5, 1)
    v = random_complex(rng, 5, 1)
    a = u @ v.conj().T
    expected = np.linalg.norm(u) * np.linalg.norm(v)
    assert abs(operator_norm_estimate(a) - expected) <= 1e-10 * expected


def test_operator_norm_dominates_action(rng):
    a = random_complex(rng, 6)
    x = random_complex(rng, 6, 1)
    assert operator_norm_estimate(a) >= np.linalg.norm(a @ x) / np.linalg.norm(x) - 1e-12
