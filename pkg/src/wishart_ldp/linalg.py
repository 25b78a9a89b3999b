"""Symmetric-matrix kernels: cone tests, square roots, Sylvester solves, norms.

All routines operate on plain float ndarrays of shape ``(m, m)`` (or stacks
``(..., m, m)`` where noted).  There is deliberately a single spectral backend:
every eigendecomposition in the package goes through ``numpy.linalg.eigh`` /
``eigvalsh`` so that results are reproducible bit-for-bit across calls with the
same inputs.

Tolerances follow one convention throughout: a matrix-dependent threshold

    tol = tol_abs + tol_rel * ||M||_op

with package-wide defaults ``ABS_TOL = 1e-12`` and ``REL_TOL = 1e-10``.
Eigenvalues within ``tol`` of zero are treated as zero by the cone
classifier and are clipped to zero by :func:`sqrt_spd`.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .errors import IndefiniteInputError, SingularPencilError

#: Default absolute spectral tolerance.
ABS_TOL = 1e-12
#: Default relative spectral tolerance (scaled by the operator norm).
REL_TOL = 1e-10


def sym(a: np.ndarray) -> np.ndarray:
    """Return the symmetric part ``(A + A^T) / 2`` of a square matrix or stack.

    This is the one place where near-symmetric inputs (e.g. results of
    round-tripped arithmetic) are normalised; downstream kernels require
    exactly symmetric storage.

    Parameters
    ----------
    a : ndarray, shape (..., m, m)
        Square matrix or stack of square matrices.

    Returns
    -------
    ndarray
        ``(a + a.swapaxes(-1, -2)) / 2`` as a float array.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"expected square matrix or stack, got shape {a.shape}")
    return 0.5 * (a + np.swapaxes(a, -1, -2))


def check_symmetric(a: np.ndarray, *, name: str = "matrix",
                    tol_abs: float = ABS_TOL, tol_rel: float = REL_TOL) -> np.ndarray:
    """Validate that ``a`` is square, finite, and symmetric within tolerance.

    Returns the exactly symmetrised array.  Raises ``ValueError`` otherwise.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    scale = float(np.abs(a).max(initial=0.0))
    skew = float(np.abs(a - a.T).max(initial=0.0))
    if skew > tol_abs + tol_rel * scale:
        raise ValueError(
            f"{name} is not symmetric: max |A - A^T| = {skew:.3e} "
            f"exceeds tolerance {tol_abs + tol_rel * scale:.3e}"
        )
    return sym(a)


class Definiteness(Enum):
    """Verdict of the cone classifier."""

    POSITIVE_DEFINITE = "positive_definite"
    POSITIVE_SEMIDEFINITE = "positive_semidefinite"
    INDEFINITE = "indefinite"


@dataclass(frozen=True)
class ConeCheck:
    """Result of :func:`classify_spd`.

    Attributes
    ----------
    kind : Definiteness
        Cone membership verdict at the effective tolerance.
    min_eigenvalue : float
        Smallest eigenvalue of the (symmetrised) input.
    tolerance : float
        The effective threshold ``tol_abs + tol_rel * ||M||_op`` used.
    """

    kind: Definiteness
    min_eigenvalue: float
    tolerance: float

    @property
    def is_psd(self) -> bool:
        return self.kind is not Definiteness.INDEFINITE

    @property
    def is_pd(self) -> bool:
        return self.kind is Definiteness.POSITIVE_DEFINITE


def classify_spd(a: np.ndarray, *, tol_abs: float = ABS_TOL,
                 tol_rel: float = REL_TOL) -> ConeCheck:
    """Classify a symmetric matrix against the positive semidefinite cone.

    A matrix is reported positive definite when ``lambda_min > tol``,
    positive semidefinite when ``lambda_min >= -tol``, and indefinite
    otherwise, with ``tol = tol_abs + tol_rel * ||M||_op``.

    Parameters
    ----------
    a : ndarray, shape (m, m)
        Symmetric matrix (validated; symmetrised exactly before the solve).
    tol_abs, tol_rel : float
        Tolerance parameters; see module docstring.

    Returns
    -------
    ConeCheck
    """
    a = check_symmetric(a, name="classify_spd input", tol_abs=tol_abs, tol_rel=tol_rel)
    w = np.linalg.eigvalsh(a)
    opnorm = float(np.abs(w).max(initial=0.0))
    tol = tol_abs + tol_rel * opnorm
    wmin = float(w[0])
    if wmin > tol:
        kind = Definiteness.POSITIVE_DEFINITE
    elif wmin >= -tol:
        kind = Definiteness.POSITIVE_SEMIDEFINITE
    else:
        kind = Definiteness.INDEFINITE
    return ConeCheck(kind=kind, min_eigenvalue=wmin, tolerance=tol)


def sqrt_spd(a: np.ndarray, *, tol_abs: float = ABS_TOL,
             tol_rel: float = REL_TOL) -> np.ndarray:
    """Symmetric square root of a positive semidefinite matrix.

    Eigenvalues in ``[-tol, 0)`` are treated as roundoff and clipped to zero;
    an eigenvalue below ``-tol`` raises :class:`IndefiniteInputError`.

    Parameters
    ----------
    a : ndarray, shape (m, m)
        Symmetric positive semidefinite matrix.

    Returns
    -------
    ndarray, shape (m, m)
        The unique symmetric PSD root ``S`` with ``S @ S = a`` (up to the
        clipping of near-zero eigenvalues).

    Raises
    ------
    IndefiniteInputError
        If the smallest eigenvalue is below ``-tol``.
    """
    a = check_symmetric(a, name="sqrt_spd input", tol_abs=tol_abs, tol_rel=tol_rel)
    w, v = np.linalg.eigh(a)
    tol = tol_abs + tol_rel * float(np.abs(w).max(initial=0.0))
    if w[0] < -tol:
        raise IndefiniteInputError(
            f"matrix is not positive semidefinite: lambda_min = {w[0]:.3e} < -{tol:.3e}"
        )
    w = np.clip(w, 0.0, None)
    return sym((v * np.sqrt(w)) @ v.T)


def solve_sylvester(a: np.ndarray, b: np.ndarray, *, tol_abs: float = ABS_TOL,
                    tol_rel: float = REL_TOL) -> np.ndarray:
    """Solve ``A X + X A = B`` for symmetric ``A`` and ``B``.

    The solve diagonalises ``A = V diag(d) V^T``, transforms ``B`` into the
    eigenbasis, divides entrywise by the eigenvalue pair sums ``d_i + d_j``,
    and rotates back.  The solution ``X`` is symmetric whenever ``B`` is.

    Parameters
    ----------
    a : ndarray, shape (m, m)
        Symmetric coefficient matrix.  Must have ``min(d_i + d_j) > tol`` —
        in particular any strictly positive definite ``A`` qualifies.
    b : ndarray, shape (m, m)
        Symmetric right-hand side.

    Returns
    -------
    ndarray, shape (m, m)
        The unique symmetric solution.

    Raises
    ------
    SingularPencilError
        If some eigenvalue pair sum ``d_i + d_j`` falls below the tolerance,
        making the equation singular or numerically unsafe.
    """
    a = check_symmetric(a, name="solve_sylvester coefficient", tol_abs=tol_abs, tol_rel=tol_rel)
    b = check_symmetric(b, name="solve_sylvester rhs", tol_abs=tol_abs, tol_rel=tol_rel)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: A is {a.shape}, B is {b.shape}")
    d, v = np.linalg.eigh(a)
    tol = tol_abs + tol_rel * float(np.abs(d).max(initial=0.0))
    pair_sums = d[:, None] + d[None, :]
    if float(pair_sums.min()) <= tol:
        raise SingularPencilError(
            f"eigenvalue pair sum {pair_sums.min():.3e} <= tolerance {tol:.3e}; "
            "coefficient matrix must be strictly positive (or at least have "
            "no near-cancelling eigenvalue pairs)"
        )
    bt = v.T @ b @ v
    x = v @ (bt / pair_sums) @ v.T
    return sym(x)


def solve_sylvester_stack(a: np.ndarray, b: np.ndarray, *, tol_abs: float = ABS_TOL,
                          tol_rel: float = REL_TOL) -> np.ndarray:
    """Vectorised :func:`solve_sylvester` over leading stack dimensions.

    ``a`` and ``b`` have shape ``(..., m, m)``; inputs are assumed already
    symmetric (no per-slice validation — this is the hot path used by the
    rate functionals).  Raises :class:`SingularPencilError` naming the first
    offending slice if any pencil is singular at the stack-wide tolerance.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d, v = np.linalg.eigh(a)
    tol = tol_abs + tol_rel * np.abs(d).max(axis=-1)
    pair_sums = d[..., :, None] + d[..., None, :]
    bad = pair_sums.min(axis=(-1, -2)) <= tol
    if np.any(bad):
        idx = np.argwhere(bad)[0]
        raise SingularPencilError(
            f"singular Sylvester pencil at stack index {tuple(int(i) for i in idx)}"
        )
    vt = np.swapaxes(v, -1, -2)
    bt = vt @ b @ v
    x = v @ (bt / pair_sums) @ vt
    return 0.5 * (x + np.swapaxes(x, -1, -2))


class MatrixNorms(NamedTuple):
    """Trace (nuclear), Frobenius, and operator norms of a symmetric matrix."""

    trace: float
    frobenius: float
    operator: float


def matrix_norms(a: np.ndarray) -> MatrixNorms:
    """Compute the trace, Frobenius, and operator norms of a symmetric matrix.

    All three are spectral functions of the eigenvalues: sum of absolute
    values, root of the sum of squares, and maximum absolute value.
    """
    a = check_symmetric(a, name="matrix_norms input")
    w = np.linalg.eigvalsh(a)
    return MatrixNorms(
        trace=float(np.abs(w).sum()),
        frobenius=float(np.sqrt((w * w).sum())),
        operator=float(np.abs(w).max(initial=0.0)),
    )


def operator_norm_stack(a: np.ndarray) -> np.ndarray:
    """Operator norms of a stack ``(..., m, m)`` of symmetric matrices."""
    w = np.linalg.eigvalsh(np.asarray(a, dtype=float))
    return np.abs(w).max(axis=-1)
