"""Tests for the symmetric-matrix kernels."""

import numpy as np
import pytest

from wishart_ldp.errors import IndefiniteInputError, SingularPencilError
from wishart_ldp.linalg import (
    Definiteness,
    check_symmetric,
    classify_spd,
    matrix_norms,
    operator_norm_stack,
    solve_sylvester,
    solve_sylvester_stack,
    sqrt_spd,
    sym,
)


def random_rotation(rng, m):
    """Haar-ish orthogonal matrix from a QR factorisation."""
    q, r = np.linalg.qr(rng.standard_normal((m, m)))
    return q * np.sign(np.diag(r))


def dense_sylvester_oracle(a, b):
    """Brute-force solve of A X + X A = B on the symmetric-matrix basis.

    Builds the m(m+1)/2-dimensional linear system explicitly and solves it
    densely — independent of the eigendecomposition route under test.
    """
    m = a.shape[0]
    idx = [(i, j) for i in range(m) for j in range(i, m)]
    k = len(idx)
    system = np.zeros((k, k))
    for col, (i, j) in enumerate(idx):
        basis = np.zeros((m, m))
        basis[i, j] = 1.0
        basis[j, i] = 1.0
        image = a @ basis + basis @ a
        for row, (p, q) in enumerate(idx):
            system[row, col] = image[p, q]
    rhs = np.array([b[p, q] for p, q in idx])
    coeffs = np.linalg.solve(system, rhs)
    x = np.zeros((m, m))
    for col, (i, j) in enumerate(idx):
        x[i, j] = coeffs[col]
        x[j, i] = coeffs[col]
    return x


def test_sym_returns_symmetric_part():
    a = np.array([[1.0, 2.0], [0.0, 3.0]])
    s = sym(a)
    assert np.array_equal(s, s.T)
    assert s[0, 1] == pytest.approx(1.0)


def test_sym_rejects_nonsquare():
    with pytest.raises(ValueError):
        sym(np.zeros((2, 3)))


def test_check_symmetric_rejects_asymmetric_and_nonfinite():
    with pytest.raises(ValueError, match="not symmetric"):
        check_symmetric(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError, match="non-finite"):
        check_symmetric(np.array([[np.nan, 0.0], [0.0, 0.0]]))


def test_classify_spd_three_verdicts():
    assert classify_spd(np.eye(2)).kind is Definiteness.POSITIVE_DEFINITE
    assert classify_spd(np.diag([1.0, 0.0])).kind is Definiteness.POSITIVE_SEMIDEFINITE
    check = classify_spd(np.diag([1.0, -1.0]))
    assert check.kind is Definiteness.INDEFINITE
    assert not check.is_psd
    assert check.min_eigenvalue == pytest.approx(-1.0)


def test_sqrt_spd_identity():
    assert np.allclose(sqrt_spd(np.eye(3)), np.eye(3), atol=1e-14)


def test_sqrt_spd_squares_back_to_input():
    # oracle: multiply the result by itself
    rng = np.random.default_rng(7)
    for _ in range(20):
        q = random_rotation(rng, 2)
        m = q @ np.diag([2.0, 5.0]) @ q.T
        s = sqrt_spd(m)
        assert np.abs(s @ s - m).max() <= 1e-10
        assert np.array_equal(s, s.T)


def test_sqrt_spd_clips_roundoff_but_rejects_indefinite():
    tiny = np.diag([1.0, -1e-13])
    s = sqrt_spd(tiny)
    assert s[1, 1] == 0.0
    with pytest.raises(IndefiniteInputError):
        sqrt_spd(np.diag([1.0, -1e-3]))


def test_solve_sylvester_diagonal_case():
    # for diagonal A the solution is entrywise B_ij / (d_i + d_j)
    a = np.diag([1.0, 3.0])
    b = np.array([[2.0, 4.0], [4.0, 6.0]])
    x = solve_sylvester(a, b)
    assert np.allclose(x, np.ones((2, 2)), atol=1e-12)


def test_solve_sylvester_matches_dense_oracle():
    rng = np.random.default_rng(11)
    for _ in range(25):
        m = int(rng.integers(1, 5))
        q = random_rotation(rng, m)
        a = q @ np.diag(rng.uniform(0.2, 4.0, size=m)) @ q.T
        b = sym(rng.standard_normal((m, m)))
        x = solve_sylvester(a, b)
        x_oracle = dense_sylvester_oracle(a, b)
        scale = max(1.0, np.abs(x_oracle).max())
        assert np.abs(x - x_oracle).max() <= 1e-10 * scale
        # residual check on top of the oracle comparison
        assert np.abs(a @ x + x @ a - b).max() <= 1e-9 * max(1.0, np.abs(b).max())


def test_solve_sylvester_singular_pencil_raises():
    with pytest.raises(SingularPencilError):
        solve_sylvester(np.diag([1.0, -1.0]), np.eye(2))
    with pytest.raises(SingularPencilError):
        solve_sylvester(np.zeros((2, 2)), np.eye(2))


def test_solve_sylvester_stack_matches_scalar_loop():
    rng = np.random.default_rng(3)
    a = np.empty((6, 3, 3))
    b = np.empty((6, 3, 3))
    for i in range(6):
        q = random_rotation(rng, 3)
        a[i] = q @ np.diag(rng.uniform(0.5, 2.0, size=3)) @ q.T
        b[i] = sym(rng.standard_normal((3, 3)))
    xs = solve_sylvester_stack(a, b)
    for i in range(6):
        assert np.abs(xs[i] - solve_sylvester(a[i], b[i])).max() <= 1e-12


def test_solve_sylvester_stack_names_bad_slice():
    a = np.stack([np.eye(2), np.diag([1.0, -1.0])])
    b = np.stack([np.eye(2), np.eye(2)])
    with pytest.raises(SingularPencilError, match=r"\(1,\)"):
        solve_sylvester_stack(a, b)


def test_matrix_norms_zero_matrix():
    norms = matrix_norms(np.zeros((3, 3)))
    assert norms == (0.0, 0.0, 0.0)


def test_matrix_norms_against_independent_formulas():
    rng = np.random.default_rng(19)
    for _ in range(10):
        a = sym(rng.standard_normal((4, 4)))
        norms = matrix_norms(a)
        sv = np.linalg.svd(a, compute_uv=False)
        assert norms.trace == pytest.approx(sv.sum(), abs=1e-12)
        assert norms.frobenius == pytest.approx(np.sqrt((a * a).sum()), abs=1e-12)
        assert norms.operator == pytest.approx(np.linalg.norm(a, 2), abs=1e-12)


def test_operator_norm_stack():
    rng = np.random.default_rng(23)
    stack = sym(rng.standard_normal((5, 3, 3)))
    norms = operator_norm_stack(stack)
    for i in range(5):
        assert norms[i] == pytest.approx(matrix_norms(stack[i]).operator, abs=1e-13)
