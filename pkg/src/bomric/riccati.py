"""Operator Riccati equations attached to Hermitian 2 x 2 block operators.

For a Hermitian block operator

    R = [[a, b],
         [b†, c]]

a solution X of

    X b X + X a - c X - b† = 0

makes the columns of [1; X] span an R-invariant subspace, and the
congruence U_X = [[1, -X†], [X, 1]] block-diagonalizes R with diagonal
blocks a + b X and c - b† X†.  Two independent solvers are provided: a
Newton iteration on the residual and a spectral invariant-subspace
construction, so either can validate the other.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg
from .bath import BathSpec, bath_hamiltonian, coupling_operator
from .blockop import BlockOp, bom_adjoint, bom_mul, bom_scale, flatten
from .linalg import NotHermitianError, ShapeError, SylvesterSingularError

# An invariant-subspace result whose recomputed residual exceeds this
# (times max(1, ||R||_F)) is rejected as not actually solving the equation.
_SUBSPACE_RESIDUAL_CAP = 1e-9
_Y1_COND_CAP = 1e12


class RiccatiConvergenceError(RuntimeError):
    """Newton failed; carries the residual trace of the iterates."""

    def __init__(self, message: str, trace: list[float]):
        super().__init__(message)
        self.trace = trace


class NoGraphError(RuntimeError):
    """Selected spectral subspace has no graph representation over the top block."""


class AmbiguousSubspaceError(RuntimeError):
    """Branch selection is degenerate at the cut; no well-defined subspace."""


@dataclass(frozen=True)
class RiccatiSettings:
    max_newton_iters: int = 40
    tol_residual: float = 1e-12
    initial_guess: np.ndarray | None = None


@dataclass(frozen=True)
class RiccatiProblem:
    """Blocks a, b, c of a Hermitian block operator; a and c Hermitian."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    settings: RiccatiSettings = field(default_factory=RiccatiSettings)

    def __post_init__(self):
        a = np.asarray(self.a, dtype=complex)
        b = np.asarray(self.b, dtype=complex)
        c = np.asarray(self.c, dtype=complex)
        for name, m in (("a", a), ("b", b), ("c", c)):
            if m.ndim != 2 or m.shape != a.shape:
                raise ShapeError(f"block {name} must match shape {a.shape}")
        if a.shape[0] != a.shape[1]:
            raise ShapeError(f"blocks must be square, got {a.shape}")
        for name, m in (("a", a), ("c", c)):
            if not linalg.is_hermitian(m):
                raise NotHermitianError(f"block {name} must be Hermitian")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    def full(self) -> np.ndarray:
        """The Hermitian 2N x 2N matrix [[a, b], [b†, c]]."""
        return np.block([[self.a, self.b], [self.b.conj().T, self.c]])


@dataclass(frozen=True)
class RiccatiSolution:
    x: np.ndarray
    method: str
    iterations: int
    residual: float


def residual(p: RiccatiProblem, x) -> float:
    """Frobenius norm of X b X + X a - c X - b†."""
    x = np.asarray(x, dtype=complex)
    if x.shape != p.a.shape:
        raise ShapeError(f"solution shape {x.shape} does not match blocks {p.a.shape}")
    return linalg.frobenius_norm(x @ p.b @ x + x @ p.a - p.c @ x - p.b.conj().T)


def _make_solution(p: RiccatiProblem, x: np.ndarray, method: str, iterations: int) -> RiccatiSolution:
    # residual always recomputed from x, never taken from solver internals
    return RiccatiSolution(
        x=x, method=method, iterations=iterations, residual=residual(p, x)
    )


def problem_from_blockop(h: BlockOp, settings: RiccatiSettings | None = None) -> RiccatiProblem:
    """Read the blocks of a Hermitian BlockOp as a Riccati problem."""
    if linalg.frobenius_norm(h.a21 - h.a12.conj().T) > linalg.TOL_HERM_REL * max(
        1.0, linalg.frobenius_norm(h.a12)
    ):
        raise NotHermitianError("lower-left block is not the adjoint of upper-right")
    return RiccatiProblem(
        a=h.a11, b=h.a12, c=h.a22, settings=settings or RiccatiSettings()
    )


def solve_newton(p: RiccatiProblem) -> RiccatiSolution:
    """Newton iteration from settings.initial_guess (default 0).

    Each step solves the Sylvester equation
        delta (a + b X) + (X b - c) delta = -F(X)
    for the correction delta.  Raises RiccatiConvergenceError with the
    residual trace when the iteration stalls, blows up, or hits a singular
    linearization.
    """
    s = p.settings
    if s.initial_guess is None:
        x = np.zeros_like(p.a)
    else:
        x = np.asarray(s.initial_guess, dtype=complex)
        if x.shape != p.a.shape:
            raise ShapeError("initial guess shape does not match problem blocks")
    trace: list[float] = []
    for it in range(s.max_newton_iters + 1):
        f = x @ p.b @ x + x @ p.a - p.c @ x - p.b.conj().T
        r = linalg.frobenius_norm(f)
        trace.append(r)
        if not np.isfinite(r):
            raise RiccatiConvergenceError(
                f"newton iterate diverged at iteration {it}", trace
            )
        if r <= s.tol_residual:
            return _make_solution(p, x, "newton", it)
        if it == s.max_newton_iters:
            break
        try:
            delta = linalg.solve_sylvester(p.a + p.b @ x, x @ p.b - p.c, -f)
        except SylvesterSingularError as exc:
            raise RiccatiConvergenceError(
                f"newton linearization singular at iteration {it}: {exc}", trace
            ) from exc
        x = x + delta
    raise RiccatiConvergenceError(
        f"newton did not reach residual {s.tol_residual:.1e} in "
        f"{s.max_newton_iters} iterations (best {min(trace):.3e})",
        trace,
    )


def _select_branch(p: RiccatiProblem, lam: np.ndarray, vec: np.ndarray, which) -> np.ndarray:
    n = p.dim
    scale = max(1.0, float(np.max(np.abs(lam))))
    if isinstance(which, str):
        if which == "lower":
            if lam[n] - lam[n - 1] <= 1e-10 * scale:
                raise AmbiguousSubspaceError(
                    "spectrum is degenerate at the lower/upper cut"
                )
            return np.arange(n)
        if which == "upper":
            if lam[n] - lam[n - 1] <= 1e-10 * scale:
                raise AmbiguousSubspaceError(
                    "spectrum is degenerate at the lower/upper cut"
                )
            return np.arange(n, 2 * n)
        if which == "graph":
            # weight of each eigenvector on the top block; the branch that
            # admits a contractive graph representation has weights > 1/2
            w = np.sum(np.abs(vec[:n, :]) ** 2, axis=0)
            order = np.argsort(w)[::-1]
            if w[order[n - 1]] - w[order[n]] <= 1e-8:
                raise AmbiguousSubspaceError(
                    "top-block weights do not separate a graph branch"
                )
            return np.sort(order[:n])
        raise ValueError(f"unknown branch selector {which!r}")
    idx = np.asarray(list(which), dtype=int)
    if idx.shape != (n,) or len(set(idx.tolist())) != n or idx.min() < 0 or idx.max() >= 2 * n:
        raise ValueError(f"branch index set must be {n} distinct indices in [0, {2*n})")
    return np.sort(idx)


def solve_invariant_subspace(p: RiccatiProblem, which="lower") -> RiccatiSolution:
    """Solve via eigenvectors of the full matrix R = [[a, b], [b†, c]].

    The eigenvectors of the selected spectral branch are stacked as
    [Y1; Y2] and X = Y2 Y1^{-1}.  `which` is "lower" or "upper" for the
    corresponding half of the spectrum, "graph" for the branch with the
    dominant top-block weights (the contractive branch when one exists),
    or an explicit sequence of N eigenvalue indices.

    Raises NoGraphError when Y1 is numerically singular (condition number
    above 1e12) or the recomputed residual shows the selected subspace is
    not a solution graph; AmbiguousSubspaceError on a degenerate cut.
    """
    r = p.full()
    lam, vec = linalg.hermitian_eig(r)
    sel = _select_branch(p, lam, vec, which)
    n = p.dim
    y1 = vec[:n, sel]
    y2 = vec[n:, sel]
    cond = np.linalg.cond(y1)
    if not np.isfinite(cond) or cond > _Y1_COND_CAP:
        raise NoGraphError(
            f"selected subspace has no graph representation: cond(Y1) = {cond:.3e}"
        )
    x = np.linalg.solve(y1.T, y2.T).T
    sol = _make_solution(p, x, "invariant_subspace", 0)
    if sol.residual > _SUBSPACE_RESIDUAL_CAP * max(1.0, linalg.frobenius_norm(r)):
        raise NoGraphError(
            f"selected subspace is not a solution graph: residual {sol.residual:.3e}"
        )
    return sol


def matching_branch(p: RiccatiProblem, x) -> tuple[int, ...]:
    """Eigenvalue indices of R whose eigenvectors lie on the graph of x.

    Lets the invariant-subspace solver be pointed at the same branch an
    iterative solver found: eigenvectors [y1; y2] with small
    ||y2 - x y1|| belong to the graph subspace span[1; X].
    """
    x = np.asarray(x, dtype=complex)
    lam, vec = linalg.hermitian_eig(p.full())
    n = p.dim
    defect = np.linalg.norm(vec[n:, :] - x @ vec[:n, :], axis=0)
    return tuple(sorted(np.argsort(defect)[:n].tolist()))


def build_ux(x) -> BlockOp:
    """Congruence factor U_X = [[1, -X†], [X, 1]]."""
    x = np.asarray(x, dtype=complex)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ShapeError(f"solution must be square, got {x.shape}")
    eye = np.eye(x.shape[0], dtype=complex)
    return BlockOp(eye, -x.conj().T, x, eye)


@dataclass(frozen=True)
class Diagonalization:
    d1: np.ndarray
    d2: np.ndarray
    offdiag_residual: float
    cond_ux: float


def diagonalize(h: BlockOp, sol: RiccatiSolution) -> Diagonalization:
    """Transform h by U_X^{-1} h U_X and report the off-diagonal leftover.

    For an exact solution the result is diag(a + b X, c - b† X†); the
    off-diagonal residual of a computed solution stays below
    10 * sol.residual * cond(U_X).
    """
    ux = flatten(build_ux(sol.x))
    transformed = np.linalg.solve(ux, flatten(h) @ ux)
    n = h.dim
    off = np.sqrt(
        linalg.frobenius_norm(transformed[:n, n:]) ** 2
        + linalg.frobenius_norm(transformed[n:, :n]) ** 2
    )
    svals = np.linalg.svd(ux, compute_uv=False)
    return Diagonalization(
        d1=transformed[:n, :n],
        d2=transformed[n:, n:],
        offdiag_residual=float(off),
        cond_ux=float(svals[0] / svals[-1]),
    )


# -- pure dephasing ---------------------------------------------------------

@dataclass(frozen=True)
class DephasingRoots:
    """Scalar Riccati roots for a dephasing block operator 1 (x) H_E + M (x) V."""

    principal: complex
    partner: complex

    @property
    def roots(self) -> tuple[complex, complex]:
        return self.principal, self.partner


def solve_dephasing_quadratic(m) -> DephasingRoots:
    """Roots of m12 x^2 + (m11 - m22) x - m12* = 0 for Hermitian 2 x 2 M.

    Multiples of the identity X = x 1 solve the operator Riccati equation
    of 1 (x) H_E + M (x) V exactly, so the operator problem reduces to
    this scalar quadratic.  The two roots form a pair (x, -1/x*); the
    principal root is the one with |x| <= 1 (ties broken toward the root
    with the larger real part, then larger imaginary part).
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ShapeError(f"dephasing coupling must be 2 x 2, got {m.shape}")
    if not linalg.is_hermitian(m):
        raise NotHermitianError("dephasing coupling matrix must be Hermitian")
    m12 = complex(m[0, 1])
    if m12 == 0:
        raise ValueError(
            "coupling matrix is diagonal; the block operator is already "
            "block-diagonal and the quadratic degenerates"
        )
    delta = float(m[0, 0].real - m[1, 1].real)
    s = np.sqrt(delta * delta + 4.0 * abs(m12) ** 2)  # real and positive
    # compute the large root first (the numerator -delta -+ s with no
    # cancellation), then the small one from the root product -m12*/m12;
    # the naive -delta + s loses the small root to cancellation when
    # |m12| << |delta|
    big_num = -(delta + s) if delta >= 0.0 else -delta + s
    r_big = big_num / (2.0 * m12)
    r_small = (-np.conj(m12) / m12) / r_big

    def key(z: complex) -> tuple[float, float, float]:
        return (abs(z), -z.real, -z.imag)

    principal, partner = sorted((complex(r_small), complex(r_big)), key=key)
    return DephasingRoots(principal=principal, partner=partner)


# -- periodically driven block operator (resonant drive) --------------------

def periodic_phase(alpha: float, t: float) -> complex:
    """The drive phase z_t = exp(-2 i alpha t)."""
    return complex(np.exp(-2j * alpha * t))


def periodic_bom(spec: BathSpec, beta: float, alpha: float, t: float) -> BlockOp:
    """Block operator [[H_E, z_t* (V + beta)], [z_t (V + beta), H_E]]."""
    he = bath_hamiltonian(spec)
    w = coupling_operator(spec) + beta * np.eye(spec.env_dim)
    z = periodic_phase(alpha, t)
    return BlockOp(he, np.conj(z) * w, z * w, he)


def time_dependent_residual(spec: BathSpec, beta: float, alpha: float, t: float) -> float:
    """Residual of X_t = z_t 1 in the Riccati equation of periodic_bom.

    The phase X_t = z_t 1 solves the equation identically for every t, so
    the returned norm is pure roundoff.
    """
    h = periodic_bom(spec, beta, alpha, t)
    p = RiccatiProblem(a=h.a11, b=h.a12, c=h.a22)
    z = periodic_phase(alpha, t)
    return residual(p, z * np.eye(spec.env_dim))


def s_frame_unitary(spec: BathSpec, alpha: float, t: float) -> BlockOp:
    """S_t = U_{z_t} / sqrt(2), the unitary congruence built from X_t = z_t 1."""
    z = periodic_phase(alpha, t)
    return bom_scale(build_ux(z * np.eye(spec.env_dim)), 1.0 / np.sqrt(2.0))


def s_frame_transform(spec: BathSpec, beta: float, alpha: float, t: float) -> BlockOp:
    """S_t† H_t S_t; equals diag(H_E + V + beta, H_E - V - beta) exactly.

    The time dependence cancels: the transformed operator is the same
    block-diagonal matrix at every t.
    """
    st = s_frame_unitary(spec, alpha, t)
    return bom_mul(bom_adjoint(st), bom_mul(periodic_bom(spec, beta, alpha, t), st))
