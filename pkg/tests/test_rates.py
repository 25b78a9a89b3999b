"""Tests for the action functionals and their closed forms."""

import math

import numpy as np
import pytest
from scipy import integrate

from wishart_ldp.errors import DegeneratePathError, DomainError
from wishart_ldp.rates import (
    FLAG_CLIPPED,
    FLAG_CONTACT_NEGATIVE,
    FLAG_INFINITE,
    FLAG_SINGULAR_SKIPPED,
    FLAG_SMALL_TIME,
    ContactVerdict,
    compute_tilt_path,
    contact_measure_diagnostic,
    dual_functional,
    eigenvalue_rate,
    endpoint_rate,
    lower_envelope,
    max_eigenvalue_endpoint_rate,
    max_eigenvalue_path_rate,
    optimal_endpoint_path,
    path_rate,
)
from wishart_ldp.sde import MatrixPath, ScalarPath

# (1/8) * integral of (phi' - delta)^2 / phi for phi = 2t + 0.5 t^2 on [0,1],
# frozen from a high-resolution quadrature of the scalar integrand
SCALAR_RATE_D2_C05 = 0.026856448685790242
# the same integral for delta = 1, phi = t + 0.5 t^2
SCALAR_RATE_D1_C05 = 0.04726744594591781
# endpoint cost of diag(5, 1) at delta = 3: (1/2)*6 - 1.5 ln 5 - 3 + 3 ln 3
ENDPOINT_D3_51 = 0.8816799973531788
# three scalar wells at a=1, delta=2: 3 (1/2 - ln 1 - 1 + ln 2)
MAXEIG_ENDPOINT_D2_M3_A1 = 0.5794415416798359


def quadratic_scalar_path(delta, c, n, horizon=1.0):
    grid = np.linspace(0.0, horizon, n + 1)
    return ScalarPath(grid, delta * grid + c * grid**2)


def quadratic_matrix_path(delta, a_mat, n, horizon=1.0):
    grid = np.linspace(0.0, horizon, n + 1)
    t = grid[:, None, None]
    dim = a_mat.shape[0]
    return MatrixPath(grid, delta * t * np.eye(dim) + t * t * a_mat)


def dense_sylvester_oracle(a, b):
    """Independent solve of A X + X A = B on the symmetric basis."""
    m = a.shape[0]
    idx = [(i, j) for i in range(m) for j in range(i, m)]
    system = np.zeros((len(idx), len(idx)))
    for col, (i, j) in enumerate(idx):
        basis = np.zeros((m, m))
        basis[i, j] = 1.0
        basis[j, i] = 1.0
        image = a @ basis + basis @ a
        for row, (p, q) in enumerate(idx):
            system[row, col] = image[p, q]
    coeffs = np.linalg.solve(system, np.array([b[p, q] for p, q in idx]))
    x = np.zeros((m, m))
    for col, (i, j) in enumerate(idx):
        x[i, j] = coeffs[col]
        x[j, i] = coeffs[col]
    return x


# ---------------------------------------------------------------------------
# tilt field
# ---------------------------------------------------------------------------

def test_tilt_is_zero_on_the_pure_drift_path():
    path = quadratic_matrix_path(2.0, np.zeros((2, 2)), 200)
    tilt = compute_tilt_path(path, 2.0)
    assert tilt.grid.size == 200
    assert np.abs(tilt.values).max() <= 1e-12


def test_tilt_scalar_driftless_square_path():
    # phi = t^2 with delta = 0: the tilt is phi'/phi = 2/t
    n = 100
    grid = np.linspace(0.0, 1.0, n + 1)
    path = MatrixPath(grid, (grid**2)[:, None, None])
    tilt = compute_tilt_path(path, 0.0)
    interior = tilt.values[:-1, 0, 0]  # last node uses a one-sided derivative
    assert np.abs(interior - 2.0 / tilt.grid[:-1]).max() <= 1e-9


def test_tilt_matches_closed_form_and_dense_oracle():
    delta = 2.0
    a_mat = np.diag([1.0, -0.5])
    path = quadratic_matrix_path(delta, a_mat, 50)
    tilt = compute_tilt_path(path, delta)
    eye = np.eye(2)
    for j, t in enumerate(tilt.grid[:-1]):
        phi = delta * t * eye + t * t * a_mat
        closed = 2.0 * t * a_mat @ np.linalg.inv(phi)  # commuting case
        assert np.abs(tilt.values[j] - closed).max() <= 1e-8
        oracle = dense_sylvester_oracle(phi, 2.0 * (2.0 * t * a_mat))
        assert np.abs(tilt.values[j] - oracle).max() <= 1e-8


def test_tilt_satisfies_its_defining_equation_on_the_grid():
    # the residual uses the same finite-difference derivative that built it
    delta = 1.5
    rng = np.random.default_rng(31)
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    a_mat = q @ np.diag([0.4, -0.1, 0.2]) @ q.T
    path = quadratic_matrix_path(delta, a_mat, 120)
    tilt = compute_tilt_path(path, delta)
    grid, vals = path.grid, path.values
    n = grid.size - 1
    phidot = np.empty((n, 3, 3))
    phidot[: n - 1] = (vals[2:] - vals[:-2]) / (grid[2:] - grid[:-2])[:, None, None]
    phidot[n - 1] = (vals[n] - vals[n - 1]) / (grid[n] - grid[n - 1])
    for j in range(n):
        phi = vals[j + 1]
        k = tilt.values[j]
        rhs = 2.0 * (phidot[j] - delta * np.eye(3))
        scale = max(1.0, np.abs(rhs).max())
        assert np.abs(k @ phi + phi @ k - rhs).max() <= 1e-8 * scale


def test_tilt_rejects_paths_leaving_the_cone():
    grid = np.linspace(0.0, 1.0, 21)
    vals = 2.0 * grid[:, None, None] * np.eye(2)
    vals[10] = np.diag([2.0 * grid[10], 0.0])
    with pytest.raises(DegeneratePathError):
        compute_tilt_path(MatrixPath(grid, vals), 2.0)


def test_tilt_rejects_negative_delta():
    path = quadratic_matrix_path(1.0, np.zeros((1, 1)), 10)
    with pytest.raises(DomainError):
        compute_tilt_path(path, -0.5)


# ---------------------------------------------------------------------------
# path action
# ---------------------------------------------------------------------------

def test_path_rate_zero_on_pure_drift():
    report = path_rate(quadratic_matrix_path(3.0, np.zeros((3, 3)), 64), 3.0)
    assert report.value <= 1e-14
    assert report.is_finite
    assert report.flags[FLAG_SMALL_TIME]
    assert report.value == pytest.approx(report.contributions.sum(), abs=1e-15)


def test_path_rate_scalar_quadratic_matches_quadrature():
    delta, c = 2.0, 0.5
    report = path_rate(
        MatrixPath(
            quadratic_scalar_path(delta, c, 4000).grid,
            quadratic_scalar_path(delta, c, 4000).values[:, None, None],
        ),
        delta,
    )
    assert report.value == pytest.approx(SCALAR_RATE_D2_C05, abs=1e-6)
    # recompute the frozen constant independently
    direct, _ = integrate.quad(lambda t: (2 * c * t) ** 2 / (delta * t + c * t * t) / 8.0,
                               0.0, 1.0)
    assert direct == pytest.approx(SCALAR_RATE_D2_C05, abs=1e-12)
    assert report.richardson_value == pytest.approx(SCALAR_RATE_D2_C05, abs=1e-7)
    assert np.all(report.contributions >= 0.0)


def test_path_rate_of_optimal_path_equals_endpoint_cost():
    m_end = np.diag([5.0, 1.0])
    grid = np.linspace(0.0, 1.0, 2001)
    path = optimal_endpoint_path(m_end, 3.0, grid)
    report = path_rate(path, 3.0)
    assert report.value == pytest.approx(ENDPOINT_D3_51, abs=1e-5)
    assert endpoint_rate(m_end, 3.0) == pytest.approx(ENDPOINT_D3_51, abs=1e-12)


def test_path_rate_is_orthogonal_invariant():
    rng = np.random.default_rng(8)
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    a_mat = np.diag([0.5, -0.2, 0.1])
    path = quadratic_matrix_path(1.7, a_mat, 400)
    rotated = MatrixPath(path.grid, np.einsum("ij,njk,lk->nil", q, path.values, q))
    r0 = path_rate(path, 1.7)
    r1 = path_rate(rotated, 1.7)
    assert abs(r0.value - r1.value) <= 1e-10 * max(1.0, r0.value)


def test_path_rate_infinite_when_short_time_profile_is_wrong():
    # phi = 3 delta t I misses the mandatory slope by a factor of three
    delta = 2.0
    report = path_rate(quadratic_matrix_path(3.0 * delta, np.zeros((2, 2)), 100), delta)
    assert report.value == math.inf
    assert not report.is_finite
    assert report.flags[FLAG_INFINITE]
    assert not report.flags[FLAG_SMALL_TIME]
    assert np.isinf(report.contributions.sum())


def test_path_rate_skips_singular_nodes_leniently():
    grid = np.linspace(0.0, 1.0, 51)
    vals = 2.0 * grid[:, None, None] * np.eye(2)
    vals[25] = 0.0
    report = path_rate(MatrixPath(grid, vals), 2.0)
    assert report.flags[FLAG_SINGULAR_SKIPPED] == 1
    assert report.is_finite


def test_path_rate_requires_zero_start():
    grid = np.linspace(0.0, 1.0, 11)
    vals = (2.0 * grid[:, None, None] + 0.5) * np.eye(2)
    with pytest.raises(DegeneratePathError):
        path_rate(MatrixPath(grid, vals), 2.0)


def test_endpoint_optimality_over_fixed_endpoint_perturbations():
    delta = 3.0
    m_end = np.diag([5.0, 1.0])
    base = endpoint_rate(m_end, delta)
    grid = np.linspace(0.0, 1.0, 2001)
    bump = (grid * (1.0 - grid))[:, None, None]
    opt = optimal_endpoint_path(m_end, delta, grid)
    rng = np.random.default_rng(44)
    for _ in range(20):
        r = rng.uniform(-0.3, 0.3, size=(2, 2))
        r = 0.5 * (r + r.T)
        perturbed = MatrixPath(grid, opt.values + bump * r)
        assert perturbed.values[-1] == pytest.approx(m_end)
        assert path_rate(perturbed, delta).value >= base - 1e-6


# ---------------------------------------------------------------------------
# duality
# ---------------------------------------------------------------------------

def test_dual_zero_field_gives_zero():
    path = quadratic_matrix_path(2.0, np.diag([0.4, -0.3]), 100)
    assert dual_functional(path, np.zeros((100, 2, 2)), 2.0) == 0.0


def test_dual_attains_the_action_at_quarter_tilt():
    delta = 3.0
    path = optimal_endpoint_path(np.diag([5.0, 1.0]), delta, np.linspace(0, 1, 501))
    rate = path_rate(path, delta).value
    tilt = compute_tilt_path(path, delta)
    attained = dual_functional(path, tilt.scaled(0.25), delta)
    assert attained == pytest.approx(rate, abs=1e-10 * max(1.0, rate))


def test_dual_never_exceeds_the_action():
    delta = 2.0
    path = quadratic_matrix_path(delta, np.diag([0.8, -0.4]), 300)
    rate = path_rate(path, delta).value
    rng = np.random.default_rng(12)
    grid = path.grid[1:]
    for _ in range(30):
        b = rng.standard_normal((2, 2))
        c = rng.standard_normal((2, 2))
        h = 0.5 * (b + b.T)[None] + grid[:, None, None] * 0.5 * (c + c.T)[None]
        assert dual_functional(path, h, delta) <= rate + 1e-9


def test_dual_validates_field_shape():
    path = quadratic_matrix_path(2.0, np.zeros((2, 2)), 50)
    with pytest.raises(ValueError):
        dual_functional(path, np.zeros((7, 2, 2)), 2.0)
    # full-grid shape is accepted and its t=0 slice ignored
    full = np.zeros((51, 2, 2))
    full[0] = 1e6
    assert dual_functional(path, full, 2.0) == 0.0


# ---------------------------------------------------------------------------
# eigenvalue-family action
# ---------------------------------------------------------------------------

def test_eigenvalue_rate_zero_on_drift_family():
    paths = [quadratic_scalar_path(2.5, 0.0, 128) for _ in range(3)]
    report = eigenvalue_rate(paths, 2.5)
    assert report.value <= 1e-14
    assert report.flags[FLAG_SMALL_TIME]


def test_eigenvalue_rate_matches_frozen_scalar_values():
    r2 = eigenvalue_rate([quadratic_scalar_path(2.0, 0.5, 4000)], 2.0)
    assert r2.value == pytest.approx(SCALAR_RATE_D2_C05, abs=1e-6)
    r1 = eigenvalue_rate([quadratic_scalar_path(1.0, 0.5, 4000)], 1.0)
    assert r1.value == pytest.approx(SCALAR_RATE_D1_C05, abs=1e-6)
    direct, _ = integrate.quad(lambda t: t * t / (t + 0.5 * t * t) / 8.0, 0.0, 1.0)
    assert direct == pytest.approx(SCALAR_RATE_D1_C05, abs=1e-12)


def test_diagonal_matrix_path_agrees_with_eigenvalue_family():
    delta = 1.2
    curvatures = (0.3, 0.0, -0.25)
    n = 600
    scalars = [quadratic_scalar_path(delta, c, n) for c in curvatures]
    grid = scalars[0].grid
    diag_vals = np.zeros((n + 1, 3, 3))
    for i, p in enumerate(scalars):
        diag_vals[:, i, i] = p.values
    matrix_report = path_rate(MatrixPath(grid, diag_vals), delta)
    family_report = eigenvalue_rate(scalars, delta)
    assert abs(matrix_report.value - family_report.value) <= 1e-8


def test_eigenvalue_rate_linear_path_finite_with_small_time_flag_down():
    # f = a t with a != delta: every refinement adds mass near t = 0, so the
    # fixed-grid value is finite but flagged
    delta, a, n = 1.0, 2.0, 500
    path = quadratic_scalar_path(delta, 0.0, n)
    f = ScalarPath(path.grid, a * path.grid)
    report = eigenvalue_rate([f], delta)
    grid = f.grid
    g = (a - delta) ** 2 / (8.0 * a * grid[1:])
    expected = g[0] * grid[1] + (0.5 * (g[:-1] + g[1:]) * np.diff(grid[1:])).sum()
    assert report.value == pytest.approx(expected, rel=1e-12)
    assert not report.flags[FLAG_SMALL_TIME]
    assert report.is_finite


def test_eigenvalue_rate_infinite_on_flat_then_rising_path():
    n = 100
    grid = np.linspace(0.0, 1.0, n + 1)
    vals = np.maximum(0.0, grid - 0.5) * 4.0
    report = eigenvalue_rate([ScalarPath(grid, vals)], 2.0)
    assert report.value == math.inf
    assert report.flags[FLAG_INFINITE]
    assert np.isinf(report.contributions.sum())


def test_eigenvalue_rate_clips_matched_touchdown():
    # x(t_1) = 0 while the finite-difference slope there is exactly delta:
    # the 0/0 interval is dropped and counted, not diverged
    delta, n = 2.0, 40
    grid = np.linspace(0.0, 1.0, n + 1)
    h = grid[1]
    vals = delta * grid.copy()
    vals[1] = 0.0
    vals[2] = 2.0 * delta * h  # keeps the centered slope at t_1 equal to delta
    report = eigenvalue_rate([ScalarPath(grid, vals)], delta)
    assert report.is_finite
    assert report.flags[FLAG_CLIPPED] >= 1
    assert 0.0 <= report.value < 1.0


def test_eigenvalue_rate_input_validation():
    with pytest.raises(ValueError):
        eigenvalue_rate([], 2.0)
    with pytest.raises(DomainError):
        eigenvalue_rate([quadratic_scalar_path(1.0, 0.0, 10)], 0.0)
    a = quadratic_scalar_path(1.0, 0.0, 10)
    b = quadratic_scalar_path(1.0, 0.0, 20)
    with pytest.raises(ValueError):
        eigenvalue_rate([a, b], 1.0)


# ---------------------------------------------------------------------------
# endpoint cost and its optimal path
# ---------------------------------------------------------------------------

def test_endpoint_rate_zero_at_drift_endpoint():
    assert endpoint_rate(2.0 * np.eye(3), 2.0) == pytest.approx(0.0, abs=1e-14)


def test_endpoint_rate_scalar_case():
    # m=1, delta=1, endpoint a: (1/2)[(a - 1) - ln a]
    val = endpoint_rate(np.array([[2.0]]), 1.0)
    assert val == pytest.approx(0.5 * (1.0 - math.log(2.0)), abs=1e-14)


def test_endpoint_rate_rejects_non_positive_definite():
    with pytest.raises(DomainError):
        endpoint_rate(np.diag([1.0, 0.0]), 2.0)
    with pytest.raises(DomainError):
        endpoint_rate(np.diag([1.0, -1.0]), 2.0)


def test_optimal_endpoint_path_hits_the_endpoint_exactly():
    m_end = np.array([[2.0, 0.4], [0.4, 1.0]])
    grid = np.linspace(0.0, 1.0, 101)
    path = optimal_endpoint_path(m_end, 3.0, grid)
    assert np.array_equal(path.values[-1], 0.5 * (m_end + m_end.T))
    assert np.abs(path.values[0]).max() == 0.0


def test_optimal_endpoint_path_satisfies_stationarity():
    grid = np.linspace(0.0, 1.0, 10_001)
    path = optimal_endpoint_path(np.diag([5.0, 1.0]), 3.0, grid)
    assert path.stats["euler_lagrange_residual"] <= 1e-3


def test_optimal_endpoint_path_drift_case_trivial():
    grid = np.linspace(0.0, 1.0, 101)
    path = optimal_endpoint_path(2.0 * np.eye(2), 2.0, grid)
    expected = grid[:, None, None] * (2.0 * np.eye(2))
    assert np.abs(path.values - expected).max() <= 1e-12
    tilt = compute_tilt_path(path, 2.0)
    assert np.abs(tilt.values).max() <= 1e-12


# ---------------------------------------------------------------------------
# lower envelope and largest-eigenvalue rates
# ---------------------------------------------------------------------------

def test_lower_envelope_identity_cases():
    f = quadratic_scalar_path(2.0, 0.0, 100)
    assert np.array_equal(lower_envelope(f, 2.0).values, f.values)
    # nonnegative deviation that returns to zero never drags the envelope
    grid = f.grid
    g = ScalarPath(grid, 2.0 * grid + grid * (1.0 - grid))
    assert np.abs(lower_envelope(g, 2.0).values - 2.0 * grid).max() <= 1e-15


def test_lower_envelope_tracks_a_nonincreasing_dip():
    delta = 2.0
    grid = np.linspace(0.0, 1.0, 201)
    dev = np.minimum(0.0, 0.5 - grid)
    f = ScalarPath(grid, delta * grid + dev)
    env = lower_envelope(f, delta)
    assert np.array_equal(env.values, f.values)


def test_lower_envelope_matches_brute_force_on_wiggly_path():
    delta = 2.0
    grid = np.linspace(0.0, 1.0, 257)
    dev = 0.3 * np.sin(2.0 * np.pi * grid) - 0.1 * grid
    f = ScalarPath(grid, delta * grid + np.maximum(dev, -delta * grid))
    env = lower_envelope(f, delta)
    shifted = f.values - delta * grid
    brute = np.array([shifted[: j + 1].min() for j in range(grid.size)])
    assert np.array_equal(env.values, delta * grid + brute)
    assert np.all(env.values <= f.values + 1e-15)


def test_max_eigenvalue_rate_zero_on_drift():
    f = quadratic_scalar_path(2.0, 0.0, 128)
    for dim in (1, 2, 5):
        assert max_eigenvalue_path_rate(f, 2.0, dim).value <= 1e-14


def test_max_eigenvalue_rate_dim1_reduces_to_scalar_rate():
    f = quadratic_scalar_path(1.5, 0.4, 800)
    top = max_eigenvalue_path_rate(f, 1.5, 1)
    scalar = eigenvalue_rate([f], 1.5)
    assert top.value == pytest.approx(scalar.value, rel=1e-12)


def test_max_eigenvalue_rate_linear_path_two_term_structure():
    # f = a t with a > delta: envelope is the drift line, so the second term
    # vanishes and the first matches the one-path action
    delta, a, dim = 1.0, 2.0, 3
    n = 400
    grid = np.linspace(0.0, 1.0, n + 1)
    f = ScalarPath(grid, a * grid)
    report = max_eigenvalue_path_rate(f, delta, dim)
    single = eigenvalue_rate([f], delta)
    assert report.value == pytest.approx(single.value, rel=1e-12)
    assert not report.flags[FLAG_SMALL_TIME]
    assert not report.flags[FLAG_CONTACT_NEGATIVE]


def test_max_eigenvalue_rate_counts_envelope_copies():
    # an f that dips below the drift line makes the envelope strictly cheaper
    # but still charged (dim - 1) times
    delta, n = 2.0, 512
    grid = np.linspace(0.0, 1.0, n + 1)
    dev = np.minimum(0.0, 0.5 - grid) * 0.4
    f = ScalarPath(grid, delta * grid + dev)
    r2 = max_eigenvalue_path_rate(f, delta, 2)
    r4 = max_eigenvalue_path_rate(f, delta, 4)
    env_cost = eigenvalue_rate([lower_envelope(f, delta)], delta).value
    assert r4.value - r2.value == pytest.approx(2.0 * env_cost, rel=1e-9)


def test_max_eigenvalue_endpoint_rate_branches():
    assert max_eigenvalue_endpoint_rate(2.0, 2.0, 5) == 0.0
    # above the junction: one scalar well, independent of dim
    upper = 0.5 * 3.0 - 1.0 * math.log(3.0) - 1.0 + 1.0 * math.log(2.0)
    assert max_eigenvalue_endpoint_rate(3.0, 2.0, 7) == pytest.approx(upper, abs=1e-14)
    assert max_eigenvalue_endpoint_rate(3.0, 2.0, 1) == pytest.approx(upper, abs=1e-14)
    # below the junction: dim copies of the well
    assert max_eigenvalue_endpoint_rate(1.0, 2.0, 3) == pytest.approx(
        MAXEIG_ENDPOINT_D2_M3_A1, abs=1e-12
    )
    # scalar coincidence with the full endpoint cost at dim = 1
    assert max_eigenvalue_endpoint_rate(2.0, 1.0, 1) == pytest.approx(
        endpoint_rate(np.array([[2.0]]), 1.0), abs=1e-14
    )


def test_max_eigenvalue_endpoint_rate_continuity_and_domain():
    delta = 1.7
    left = max_eigenvalue_endpoint_rate(delta - 1e-9, delta, 4)
    right = max_eigenvalue_endpoint_rate(delta + 1e-9, delta, 4)
    assert abs(left) <= 1e-8 and abs(right) <= 1e-8
    with pytest.raises(DomainError):
        max_eigenvalue_endpoint_rate(-1.0, delta, 2)
    with pytest.raises(DomainError):
        max_eigenvalue_endpoint_rate(1.0, delta, 0)


# ---------------------------------------------------------------------------
# contact-measure diagnostic
# ---------------------------------------------------------------------------

def contact_counterexample(n):
    """A dip whose tilt measure is genuinely negative on the contact set.

    The deviation decreases monotonically (so the whole path touches its
    envelope) but with a strong oscillation in the slope, which drives the
    diagnosed density negative inside the window [0.3, 0.7].
    """
    delta, b, omega, mod = 2.0, 0.3, 30.0, 0.9
    grid = np.linspace(0.0, 1.0, n + 1)
    s = np.clip(grid, 0.3, 0.7) - 0.3
    dev = -b * (s + mod * (1.0 - np.cos(omega * s)) / omega)
    return ScalarPath(grid, delta * grid + dev), delta


def test_contact_diagnostic_positive_on_drift():
    f = quadratic_scalar_path(2.0, 0.0, 256)
    diag = contact_measure_diagnostic(f, 2.0)
    assert diag.verdict is ContactVerdict.POSITIVE


def test_contact_diagnostic_positive_when_contact_set_is_empty():
    grid = np.linspace(0.0, 1.0, 257)
    f = ScalarPath(grid, 2.0 * grid)  # a = 2 > delta = 1
    diag = contact_measure_diagnostic(f, 1.0)
    assert diag.verdict is ContactVerdict.POSITIVE
    assert diag.min_density is None


def test_contact_diagnostic_flags_engineered_negative_measure():
    for n in (800, 1600):
        f, delta = contact_counterexample(n)
        diag = contact_measure_diagnostic(f, delta)
        assert diag.verdict is ContactVerdict.NEGATIVE
        assert diag.min_density < -10.0 * diag.tolerance
    report = max_eigenvalue_path_rate(*contact_counterexample(800), dim=3)
    assert report.flags[FLAG_CONTACT_NEGATIVE]
    assert report.flags["contact_verdict"] == "negative"


def test_contact_diagnostic_inconclusive_when_path_touches_zero():
    grid = np.linspace(0.0, 1.0, 101)
    vals = np.maximum(0.0, 2.0 * (grid - 0.2))
    diag = contact_measure_diagnostic(ScalarPath(grid, vals), 2.0)
    assert diag.verdict is ContactVerdict.INCONCLUSIVE
