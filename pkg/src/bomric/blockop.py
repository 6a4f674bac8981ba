"""2 x 2 block operator matrices over a qubit (C^2) tensor environment space.

An operator on C^2 (x) C^N is stored as four N x N blocks

    [[a11, a12],
     [a21, a22]]

so that kron(qubit 2x2, env N x N) lands in block form without reshuffling,
and the environment trace of each block gives the reduced 2 x 2 operator
directly.  Flattening uses the qubit index as the slow (outer) index.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .linalg import ShapeError

PAULI_1 = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_3 = np.array([[1, 0], [0, -1]], dtype=complex)
ID2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class BlockOp:
    """Four equal-size square blocks of an operator on C^2 (x) C^N."""

    a11: np.ndarray
    a12: np.ndarray
    a21: np.ndarray
    a22: np.ndarray

    def __post_init__(self):
        blocks = []
        for name in ("a11", "a12", "a21", "a22"):
            b = np.asarray(getattr(self, name), dtype=complex)
            if b.ndim != 2 or b.shape[0] != b.shape[1]:
                raise ShapeError(f"block {name} must be square, got shape {b.shape}")
            blocks.append(b)
        dim = blocks[0].shape[0]
        if any(b.shape[0] != dim for b in blocks):
            raise ShapeError("all four blocks must share one dimension")
        for name, b in zip(("a11", "a12", "a21", "a22"), blocks):
            object.__setattr__(self, name, b)

    @property
    def dim(self) -> int:
        """Environment dimension N (each block is N x N)."""
        return self.a11.shape[0]

    @property
    def blocks(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        return self.a11, self.a12, self.a21, self.a22

    def __add__(self, other: "BlockOp") -> "BlockOp":
        return bom_add(self, other)

    def __sub__(self, other: "BlockOp") -> "BlockOp":
        return bom_add(self, bom_scale(other, -1.0))

    def __matmul__(self, other: "BlockOp") -> "BlockOp":
        return bom_mul(self, other)

    def __mul__(self, s: complex) -> "BlockOp":
        return bom_scale(self, s)

    __rmul__ = __mul__


def identity_blockop(dim: int) -> BlockOp:
    eye = np.eye(dim, dtype=complex)
    zero = np.zeros((dim, dim), dtype=complex)
    return BlockOp(eye, zero, zero, eye)


def kron_qubit_env(m, env) -> BlockOp:
    """kron(m, env) for a 2 x 2 qubit matrix m and a square env matrix."""
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ShapeError(f"qubit factor must be 2 x 2, got {m.shape}")
    env = np.asarray(env, dtype=complex)
    if env.ndim != 2 or env.shape[0] != env.shape[1]:
        raise ShapeError(f"environment factor must be square, got {env.shape}")
    return BlockOp(m[0, 0] * env, m[0, 1] * env, m[1, 0] * env, m[1, 1] * env)


def _check_same_dim(x: BlockOp, y: BlockOp):
    if x.dim != y.dim:
        raise ShapeError(f"block dimensions differ: {x.dim} vs {y.dim}")


def bom_add(x: BlockOp, y: BlockOp) -> BlockOp:
    _check_same_dim(x, y)
    return BlockOp(x.a11 + y.a11, x.a12 + y.a12, x.a21 + y.a21, x.a22 + y.a22)


def bom_scale(x: BlockOp, s: complex) -> BlockOp:
    return BlockOp(s * x.a11, s * x.a12, s * x.a21, s * x.a22)


def bom_mul(x: BlockOp, y: BlockOp) -> BlockOp:
    """Block matrix product."""
    _check_same_dim(x, y)
    return BlockOp(
        x.a11 @ y.a11 + x.a12 @ y.a21,
        x.a11 @ y.a12 + x.a12 @ y.a22,
        x.a21 @ y.a11 + x.a22 @ y.a21,
        x.a21 @ y.a12 + x.a22 @ y.a22,
    )


def bom_adjoint(x: BlockOp) -> BlockOp:
    return BlockOp(
        x.a11.conj().T, x.a21.conj().T, x.a12.conj().T, x.a22.conj().T
    )


def partial_trace_env(x: BlockOp) -> np.ndarray:
    """Trace out the environment: 2 x 2 matrix of blockwise traces."""
    return np.array(
        [
            [np.trace(x.a11), np.trace(x.a12)],
            [np.trace(x.a21), np.trace(x.a22)],
        ],
        dtype=complex,
    )


def flatten(x: BlockOp) -> np.ndarray:
    """Assemble the full 2N x 2N matrix, qubit index slow."""
    return np.block([[x.a11, x.a12], [x.a21, x.a22]])


def unflatten(m) -> BlockOp:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
        raise ShapeError(f"expected a square even-dimension matrix, got {m.shape}")
    n = m.shape[0] // 2
    return BlockOp(m[:n, :n], m[:n, n:], m[n:, :n], m[n:, n:])


def is_hermitian_blockop(x: BlockOp, tol: float | None = None) -> bool:
    return linalg.is_hermitian(flatten(x), tol)


def sandwich_lemma_check(a1, b: BlockOp, a2) -> float:
    """Residual of Tr_E(A1 (x) 1 . B . A2 (x) 1) == A1 Tr_E(B) A2.

    a1 and a2 are 2 x 2 qubit matrices acting as A (x) identity on the
    environment; the identity holds exactly, so the returned Frobenius
    norm is pure roundoff.
    """
    eye = np.eye(b.dim, dtype=complex)
    lhs = partial_trace_env(
        bom_mul(bom_mul(kron_qubit_env(a1, eye), b), kron_qubit_env(a2, eye))
    )
    rhs = np.asarray(a1, dtype=complex) @ partial_trace_env(b) @ np.asarray(
        a2, dtype=complex
    )
    return linalg.frobenius_norm(lhs - rhs)
