import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bomric.bath import BathMode, BathSpec, bath_hamiltonian, coupling_operator, dephasing_hamiltonian
from bomric.blockop import bom_adjoint, bom_mul, flatten, identity_blockop
from bomric.dynamics import QubitParams, hamiltonian_static
from bomric.linalg import NotHermitianError, ShapeError, frobenius_norm
from bomric.riccati import (
    AmbiguousSubspaceError,
    NoGraphError,
    RiccatiConvergenceError,
    RiccatiProblem,
    RiccatiSettings,
    build_ux,
    diagonalize,
    matching_branch,
    periodic_bom,
    periodic_phase,
    problem_from_blockop,
    residual,
    s_frame_transform,
    s_frame_unitary,
    solve_dephasing_quadratic,
    solve_invariant_subspace,
    solve_newton,
    time_dependent_residual,
)

from conftest import random_complex, random_hermitian

QUBIT = QubitParams(alpha=0.3, beta=0.5, omega=1.0)


def spinboson_problem(bath):
    return problem_from_blockop(hamiltonian_static(QUBIT, bath))


def test_scalar_root_closed_form():
    # 1 x 1 problem: alpha x^2 + 2 beta x - alpha = 0
    alpha, beta, h = 0.3, 0.5, 1.7
    p = RiccatiProblem(a=[[h + beta]], b=[[alpha]], c=[[h - beta]])
    sol = solve_newton(p)
    expected = (-beta + math.sqrt(beta**2 + alpha**2)) / alpha
    assert abs(complex(sol.x[0, 0]) - expected) <= 1e-14
    assert abs(expected) < 1.0


def test_newton_on_spin_boson(riccati_bath):
    p = spinboson_problem(riccati_bath)
    sol = solve_newton(p)
    assert sol.method == "newton"
    assert sol.residual <= 1e-12
    assert sol.iterations <= 8
    # the contractive branch
    assert np.linalg.norm(sol.x, 2) < 1.0
    # residual field is recomputed, not carried over
    assert abs(sol.residual - residual(p, sol.x)) == 0.0


def test_newton_decoupled_blocks_give_zero(riccati_bath):
    q0 = QubitParams(alpha=0.0, beta=0.5, omega=1.0)
    p = problem_from_blockop(hamiltonian_static(q0, riccati_bath))
    sol = solve_newton(p)
    assert sol.iterations == 0
    assert np.count_nonzero(sol.x) == 0


def test_graph_branch_agrees_with_newton(riccati_bath):
    p = spinboson_problem(riccati_bath)
    newton = solve_newton(p)
    sub = solve_invariant_subspace(p, which="graph")
    assert sub.method == "invariant_subspace"
    assert sub.residual <= 1e-9
    assert frobenius_norm(sub.x - newton.x) <= 1e-8


def test_matching_branch_reproduces_graph(riccati_bath):
    p = spinboson_problem(riccati_bath)
    newton = solve_newton(p)
    idx = matching_branch(p, newton.x)
    assert len(idx) == p.dim
    by_index = solve_invariant_subspace(p, which=idx)
    by_graph = solve_invariant_subspace(p, which="graph")
    assert frobenius_norm(by_index.x - by_graph.x) <= 1e-12


def test_spectral_halves_are_not_graphs(riccati_bath):
    # the two spectral ladders interleave, so neither half is a graph
    p = spinboson_problem(riccati_bath)
    with pytest.raises(NoGraphError):
        solve_invariant_subspace(p, which="lower")


def test_upper_half_graph_for_separated_spectra(rng):
    # pushing the blocks apart makes the upper half the contractive branch
    h = random_hermitian(rng, 6)
    spread = float(np.ptp(np.linalg.eigvalsh(h)))
    s = spread + 1.0
    b = 0.05 * random_complex(rng, 6)
    p = RiccatiProblem(a=h + s * np.eye(6), b=b, c=h - s * np.eye(6))
    newton = solve_newton(p)
    upper = solve_invariant_subspace(p, which="upper")
    assert frobenius_norm(upper.x - newton.x) <= 1e-8
    graph = solve_invariant_subspace(p, which="graph")
    assert frobenius_norm(graph.x - upper.x) <= 1e-10


def test_ambiguous_cut_raises():
    # spectra of the halves touch at the cut
    p = RiccatiProblem(a=np.diag([0.0, 1.0]), b=np.zeros((2, 2)), c=np.diag([1.0, 2.0]))
    with pytest.raises(AmbiguousSubspaceError):
        solve_invariant_subspace(p, which="lower")


def test_ambiguous_graph_weights_raise():
    # a = c = 0, b = 1: both eigenvectors carry weight 1/2 on the top block
    p = RiccatiProblem(a=[[0.0]], b=[[1.0]], c=[[0.0]])
    with pytest.raises(AmbiguousSubspaceError):
        solve_invariant_subspace(p, which="graph")


def test_vertical_subspace_has_no_graph():
    # lower half lives entirely in the bottom block, Y1 is singular
    p = RiccatiProblem(a=np.diag([5.0, 6.0]), b=np.zeros((2, 2)), c=np.diag([0.0, 1.0]))
    with pytest.raises(NoGraphError):
        solve_invariant_subspace(p, which="lower")


def test_explicit_index_validation():
    p = RiccatiProblem(a=np.diag([5.0, 6.0]), b=np.zeros((2, 2)), c=np.diag([0.0, 1.0]))
    with pytest.raises(ValueError):
        solve_invariant_subspace(p, which=(0, 0))
    with pytest.raises(ValueError):
        solve_invariant_subspace(p, which=(0, 4))
    with pytest.raises(ValueError):
        solve_invariant_subspace(p, which="sideways")


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_congruence_factor_normal_equations(seed):
    # U_X† U_X = diag(1 + X†X, 1 + XX†)
    rng = np.random.default_rng(seed)
    x = random_complex(rng, 4)
    u = flatten(build_ux(x))
    gram = u.conj().T @ u
    eye = np.eye(4)
    expected = np.block(
        [
            [eye + x.conj().T @ x, np.zeros((4, 4))],
            [np.zeros((4, 4)), eye + x @ x.conj().T],
        ]
    )
    assert frobenius_norm(gram - expected) <= 1e-12


def test_diagonalize_splits_spectrum(riccati_bath):
    h = hamiltonian_static(QUBIT, riccati_bath)
    p = problem_from_blockop(h)
    sol = solve_newton(p)
    diag = diagonalize(h, sol)
    assert diag.offdiag_residual <= 10.0 * max(sol.residual, 1e-15) * diag.cond_ux
    assert frobenius_norm(diag.d1 - (p.a + p.b @ sol.x)) <= 1e-10
    # similarity preserves the full spectrum; the blocks split it exactly
    got = np.sort_complex(
        np.concatenate([np.linalg.eigvals(diag.d1), np.linalg.eigvals(diag.d2)])
    )
    expected = np.sort_complex(np.linalg.eigvalsh(flatten(h)).astype(complex))
    assert np.max(np.abs(got - expected)) <= 1e-9


def test_newton_iteration_budget_exhausted(riccati_bath):
    p = problem_from_blockop(
        hamiltonian_static(QUBIT, riccati_bath),
        settings=RiccatiSettings(max_newton_iters=1, tol_residual=1e-15),
    )
    with pytest.raises(RiccatiConvergenceError) as exc:
        solve_newton(p)
    assert len(exc.value.trace) == 2
    assert exc.value.trace[1] < exc.value.trace[0]


def test_newton_resonant_drive_fails():
    # 2 beta equal to the mode frequency makes the linearization singular:
    # the spectra of the shifted blocks coincide level by level
    bath = BathSpec((BathMode(1.0, 0.2),), fock_cutoff=8)
    p = problem_from_blockop(hamiltonian_static(QubitParams(0.3, 0.5, 1.0), bath))
    with pytest.raises(RiccatiConvergenceError) as exc:
        solve_newton(p)
    assert len(exc.value.trace) >= 1


def test_problem_validation(rng):
    h = random_hermitian(rng, 3)
    with pytest.raises(NotHermitianError):
        RiccatiProblem(a=random_complex(rng, 3), b=h, c=h)
    with pytest.raises(ShapeError):
        RiccatiProblem(a=h, b=random_complex(rng, 2), c=h)
    bad = identity_blockop(3)
    bad = type(bad)(bad.a11, bad.a12 + 1.0, bad.a21, bad.a22)
    with pytest.raises(NotHermitianError):
        problem_from_blockop(bad)


def test_initial_guess_is_used(riccati_bath):
    p0 = spinboson_problem(riccati_bath)
    warm = solve_newton(p0).x
    p = problem_from_blockop(
        hamiltonian_static(QUBIT, riccati_bath),
        settings=RiccatiSettings(initial_guess=warm),
    )
    sol = solve_newton(p)
    assert sol.iterations == 0


# -- dephasing quadratic -----------------------------------------------------

def test_dephasing_symmetric_coupling():
    roots = solve_dephasing_quadratic(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert roots.principal == 1.0
    assert roots.partner == -1.0


def test_dephasing_frozen_example():
    m = np.array([[1.0, 1.0j], [-1.0j, -1.0]])
    roots = solve_dephasing_quadratic(m)
    assert abs(roots.principal - 1j * (1.0 - math.sqrt(2.0))) <= 1e-15
    assert abs(roots.partner - 1j * (1.0 + math.sqrt(2.0))) <= 1e-15


@given(
    st.floats(-3, 3),
    st.floats(-3, 3),
    st.floats(-3, 3),
    st.floats(-3, 3),
)
@settings(max_examples=50, deadline=None)
def test_dephasing_root_pair_structure(m11, m22, re12, im12):
    m12 = complex(re12, im12)
    if abs(m12) < 1e-6:
        return
    m = np.array([[m11, m12], [np.conj(m12), m22]])
    roots = solve_dephasing_quadratic(m)
    for x in roots.roots:
        scale = max(1.0, abs(m12) * abs(x) ** 2 + abs(m11 - m22) * abs(x))
        assert abs(m12 * x * x + (m11 - m22) * x - np.conj(m12)) <= 1e-12 * scale
    assert abs(roots.partner - (-1.0 / np.conj(roots.principal))) <= 1e-12 * max(
        1.0, abs(roots.partner)
    )
    assert abs(roots.principal) <= 1.0 + 1e-12


def test_dephasing_scalar_root_solves_operator_equation(small_bath):
    m = np.array([[1.0, 1.0j], [-1.0j, -1.0]])
    roots = solve_dephasing_quadratic(m)
    p = problem_from_blockop(dephasing_hamiltonian(small_bath, m))
    vnorm = frobenius_norm(coupling_operator(small_bath))
    eye = np.eye(small_bath.env_dim)
    for x in roots.roots:
        assert residual(p, x * eye) <= 1e-12 * max(1.0, abs(x) ** 2) * vnorm


def test_dephasing_rejects_degenerate_coupling():
    with pytest.raises(ValueError):
        solve_dephasing_quadratic(np.diag([1.0, -1.0]))
    with pytest.raises(NotHermitianError):
        solve_dephasing_quadratic(np.array([[0.0, 1.0], [2.0, 0.0]]))


# -- periodically driven block operator --------------------------------------

def test_periodic_phase_winding():
    assert periodic_phase(0.3, 0.0) == 1.0
    t = 1.7
    z = periodic_phase(0.3, t)
    assert abs(abs(z) - 1.0) <= 1e-15
    assert abs(z - np.exp(-2j * 0.3 * t)) == 0.0


def test_phase_solves_driven_riccati(small_bath):
    for t in np.linspace(0.0, 12.0, 13):
        h = periodic_bom(small_bath, beta=0.5, alpha=0.3, t=float(t))
        w = coupling_operator(small_bath) + 0.5 * np.eye(small_bath.env_dim)
        scale = max(1.0, frobenius_norm(w))
        assert time_dependent_residual(small_bath, 0.5, 0.3, float(t)) <= 1e-13 * scale
        # and the blocks are what they should be
        assert frobenius_norm(h.a11 - bath_hamiltonian(small_bath)) == 0.0
        z = periodic_phase(0.3, float(t))
        assert frobenius_norm(h.a21 - z * w) <= 1e-15


def test_drive_frame_unitary(small_bath):
    s = flatten(s_frame_unitary(small_bath, alpha=0.3, t=2.1))
    n = 2 * small_bath.env_dim
    assert frobenius_norm(s.conj().T @ s - np.eye(n)) <= 1e-13


def test_drive_frame_diagonalizes_at_all_times(small_bath):
    he = bath_hamiltonian(small_bath)
    w = coupling_operator(small_bath) + 0.5 * np.eye(small_bath.env_dim)
    for t in (0.0, 0.4, 3.3, 7.9):
        d = s_frame_transform(small_bath, beta=0.5, alpha=0.3, t=t)
        assert frobenius_norm(d.a12) <= 1e-13
        assert frobenius_norm(d.a21) <= 1e-13
        assert frobenius_norm(d.a11 - (he + w)) <= 1e-13
        assert frobenius_norm(d.a22 - (he - w)) <= 1e-13


def test_drive_frame_transform_is_time_independent(small_bath):
    d0 = s_frame_transform(small_bath, beta=0.5, alpha=0.3, t=0.0)
    d1 = s_frame_transform(small_bath, beta=0.5, alpha=0.3, t=5.5)
    assert frobenius_norm(flatten(d0) - flatten(d1)) <= 1e-12
