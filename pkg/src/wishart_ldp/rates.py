"""Action functionals for small-noise matrix squared-Bessel paths.

For an absolutely continuous cone-valued path ``phi`` started at zero, the
path action is

    I(phi) = (1/8) * integral of Tr( k(t) phi(t) k(t) ) dt,

where the symmetric *tilt field* ``k(t)`` solves the Sylvester equation

    k phi + phi k = 2 (phi' - delta * I).

This module computes the tilt field and the action on grids, together with:

* a concave dual functional of an auxiliary field ``h`` whose supremum over
  ``h`` equals the action (attained at ``h = k/4``);
* the contraction of the action to eigenvalue paths (a sum of independent
  scalar actions) and to the time-1 endpoint (closed form);
* the explicit minimising path ``phi(t) = delta*t*I + t^2 (M - delta*I)``
  for a prescribed endpoint ``M``;
* the largest-eigenvalue contraction: the closed two-term formula built on
  the running lower envelope, its endpoint rate, and the sign diagnostic
  for the contact-set measure that decides when the formula applies.

Grid conventions, shared by every functional here so that the algebraic
identities between them survive discretisation exactly:

* time derivatives are central differences (one-sided at the right end);
* the node at t = 0 is never evaluated (paths start at zero, where the
  tilt field is defined only as a limit);
* the first interval uses a right-endpoint rectangle rule, all later
  intervals the trapezoid rule.

An infinite action is reported as a flagged sentinel: ``RateReport.value``
is ``math.inf``, the offending interval's contribution is ``inf``, and
``flags["INFINITE_RATE"]`` is set.  No other code path produces infinities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import DegeneratePathError, DomainError
from .linalg import ABS_TOL, REL_TOL, sym
from .sde import MatrixPath, ScalarPath, _check_grid

FLAG_SMALL_TIME = "SMALL_TIME_LIMIT_OK"
FLAG_CLIPPED = "DERIVATIVE_CLIPPED"
FLAG_SINGULAR_SKIPPED = "SINGULAR_SYLVESTER_SKIPPED"
FLAG_INFINITE = "INFINITE_RATE"
FLAG_CONTACT_NEGATIVE = "CONTACT_MEASURE_NEGATIVE"


@dataclass
class TiltPath:
    """The tilt field on the interior grid nodes.

    ``grid`` holds the times ``t_1 < ... < t_n`` (the parent path's grid
    without its t = 0 node) and ``values[j]`` the symmetric tilt matrix at
    ``grid[j]``.
    """

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 3 or self.values.shape[0] != self.grid.size:
            raise ValueError("tilt values must align with the tilt grid")

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def scaled(self, factor: float) -> "TiltPath":
        return TiltPath(self.grid.copy(), factor * self.values)


@dataclass
class RateReport:
    """Value and per-interval breakdown of an action functional.

    ``value`` equals ``contributions.sum()`` (including the infinite
    sentinel case).  ``flags`` carries the diagnostics listed in the module
    docstring; ``richardson_value`` is the step-doubling extrapolation of
    the whole pipeline when the grid allows it, else ``None``.
    """

    value: float
    contributions: np.ndarray
    flags: dict = field(default_factory=dict)
    richardson_value: float | None = None

    def __post_init__(self) -> None:
        self.contributions = np.asarray(self.contributions, dtype=float)

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "contributions": self.contributions.tolist(),
            "flags": dict(self.flags),
            "richardson_value": self.richardson_value,
        }


def _central_diff(grid: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Derivative estimates at nodes 1..n (node 0 skipped); shape (n, ...)."""
    n = grid.size - 1
    out = np.empty((n,) + values.shape[1:])
    if n >= 2:
        span = grid[2:] - grid[:-2]
        span = span.reshape((-1,) + (1,) * (values.ndim - 1))
        out[: n - 1] = (values[2:] - values[:-2]) / span
    out[n - 1] = (values[n] - values[n - 1]) / (grid[n] - grid[n - 1])
    return out


def _compose_intervals(grid: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Per-interval quadrature from node values g_1..g_n.

    First interval: right-endpoint rectangle.  Later intervals: trapezoid.
    """
    widths = np.diff(grid)
    c = np.empty_like(g, shape=(g.shape[0],))
    c[0] = g[0] * widths[0]
    if g.shape[0] > 1:
        c[1:] = 0.5 * (g[:-1] + g[1:]) * widths[1:]
    return c


def _require_zero_start(values0, scale: float, what: str) -> None:
    mag = float(np.abs(values0).max()) if np.ndim(values0) else abs(float(values0))
    if mag > ABS_TOL + REL_TOL * scale:
        raise DegeneratePathError(
            f"{what} must start at zero; initial magnitude is {mag:.3e}"
        )


def _tilt_values(grid: np.ndarray, vals: np.ndarray, delta: float,
                 lenient: bool) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """Tilt matrices at nodes 1..n plus the derivative estimates used.

    Returns ``(tilt, phidot, defined_mask, skipped)``.  In strict mode any
    node that is not strictly positive definite raises
    :class:`DegeneratePathError`.  In lenient mode, nodes whose smallest
    eigenvalue is indefinite still raise, but nodes merely touching the
    cone boundary (within tolerance of singular) are masked out and
    counted, with the tilt set to zero there.
    """
    n = grid.size - 1
    phidot = _central_diff(grid, vals)
    interior = vals[1:]
    w, v = np.linalg.eigh(interior)
    tol = ABS_TOL + REL_TOL * np.abs(w).max(axis=-1)
    wmin = w[:, 0]
    indefinite = wmin < -tol
    if np.any(indefinite):
        j = int(np.argmax(indefinite))
        raise DegeneratePathError(
            f"path is indefinite at t = {grid[j + 1]:.6g} "
            f"(lambda_min = {wmin[j]:.3e})"
        )
    singular = ~indefinite & (wmin <= tol)
    if np.any(singular) and not lenient:
        j = int(np.argmax(singular))
        raise DegeneratePathError(
            f"path is not strictly positive definite at t = {grid[j + 1]:.6g} "
            f"(lambda_min = {wmin[j]:.3e}); the tilt field is undefined there"
        )
    eye = np.eye(vals.shape[1])
    rhs = 2.0 * (phidot - delta * eye)
    # Sylvester solve in the eigenbasis of each interior node.
    vt = np.swapaxes(v, -1, -2)
    pair_sums = w[:, :, None] + w[:, None, :]
    safe = np.where(singular[:, None, None], 1.0, pair_sums)
    bt = vt @ rhs @ v
    tilt = v @ (bt / safe) @ vt
    tilt = 0.5 * (tilt + np.swapaxes(tilt, -1, -2))
    if np.any(singular):
        tilt[singular] = 0.0
    defined = ~singular
    return tilt, phidot, defined, int(singular.sum())


def compute_tilt_path(phi: MatrixPath, delta: float) -> TiltPath:
    """Solve the tilt equation ``k phi + phi k = 2 (phi' - delta I)`` on the grid.

    The path must be strictly positive definite at every node after t = 0
    (:class:`DegeneratePathError` otherwise).  Derivatives are central
    differences, one-sided at the right end; the t = 0 node is skipped.
    The driftless case ``delta = 0`` is allowed here (the equation is still
    well posed); the action functionals require ``delta > 0``.
    """
    if not (delta >= 0):
        raise DomainError(f"delta must be >= 0, got {delta}")
    tilt, _, _, _ = _tilt_values(phi.grid, phi.values, delta, lenient=False)
    return TiltPath(phi.grid[1:].copy(), tilt)


def _small_time_diag(grid: np.ndarray, vals: np.ndarray, delta: float,
                     dim: int) -> tuple[bool, bool]:
    """(ok, badly_failing) for the short-time behaviour ``phi_t / t -> delta I``."""
    n = grid.size - 1
    j_max = min(10, n)
    ts = grid[1 : j_max + 1]
    if vals.ndim == 3:
        eye = np.eye(dim)
        dev = vals[1 : j_max + 1] / ts[:, None, None] - delta * eye
        a = np.abs(np.linalg.eigvalsh(dev)).sum(axis=-1) / (dim * delta)
    else:
        a = np.abs(vals[1 : j_max + 1] / ts - delta) / delta
    first, last = float(a[0]), float(a[-1])
    # the normalised deviation must shrink toward t = 0; a profile that stays
    # flat (e.g. a linear path with the wrong slope) is a violation
    ok = first <= 0.8 * last + 1e-9
    badly = (first > 0.1) and (first > 0.8 * last)
    return ok, badly


def _finish_report(grid: np.ndarray, contribs: np.ndarray, flags: dict,
                   coarse_value: float | None) -> RateReport:
    value = float(contribs.sum())
    richardson = None
    if coarse_value is not None and math.isfinite(value):
        richardson = (4.0 * value - coarse_value) / 3.0
    return RateReport(value=value, contributions=contribs, flags=flags,
                      richardson_value=richardson)


def _matrix_action_contributions(grid: np.ndarray, vals: np.ndarray,
                                 delta: float, flags: dict) -> np.ndarray:
    tilt, _, defined, skipped = _tilt_values(grid, vals, delta, lenient=True)
    flags[FLAG_SINGULAR_SKIPPED] = flags.get(FLAG_SINGULAR_SKIPPED, 0) + skipped
    g = 0.125 * np.einsum("nij,njk,nki->n", tilt, vals[1:], tilt)
    g = np.where(defined, g, 0.0)
    return _compose_intervals(grid, g)


def path_rate(phi: MatrixPath, delta: float) -> RateReport:
    """Action of a cone-valued path started at zero.

    Diagnostics: ``SMALL_TIME_LIMIT_OK`` records whether the short-time
    profile trends toward ``delta * t * I`` over the first ten interior
    nodes; a strong violation means the true action is infinite and is
    reported through the sentinel.  ``SINGULAR_SYLVESTER_SKIPPED`` counts
    interior nodes excluded because the path touched the cone boundary.
    """
    if not (delta > 0):
        raise DomainError(f"delta must be > 0, got {delta}")
    grid, vals = phi.grid, phi.values
    scale = float(np.abs(vals).max(initial=0.0))
    _require_zero_start(vals[0], scale, "path_rate input")
    flags: dict = {FLAG_CLIPPED: 0, FLAG_SINGULAR_SKIPPED: 0, FLAG_INFINITE: False}
    contribs = _matrix_action_contributions(grid, vals, delta, flags)
    ok, badly = _small_time_diag(grid, vals, delta, phi.dim)
    flags[FLAG_SMALL_TIME] = ok
    if badly:
        contribs = contribs.copy()
        contribs[0] = math.inf
        flags[FLAG_INFINITE] = True
        return RateReport(value=math.inf, contributions=contribs, flags=flags)
    coarse = None
    n = grid.size - 1
    if n >= 4 and n % 2 == 0:
        coarse_flags: dict = {FLAG_SINGULAR_SKIPPED: 0}
        coarse = float(
            _matrix_action_contributions(grid[::2], vals[::2], delta, coarse_flags).sum()
        )
    return _finish_report(grid, contribs, flags, coarse)


def dual_functional(phi: MatrixPath, h, delta: float) -> float:
    """Concave dual of the action in the auxiliary field ``h``.

    Evaluates ``integral Tr(h (phi' - delta I)) - 2 integral Tr(h phi h)``
    with the module's shared derivative and quadrature conventions, so that
    the bound ``dual <= action`` and the equality at ``h = tilt/4`` hold at
    the discrete level, not only in the limit.

    ``h`` may be a :class:`TiltPath` on the path's interior nodes or an
    array of shape ``(n + 1, m, m)`` on the full grid (the t = 0 slice is
    ignored).
    """
    grid, vals = phi.grid, phi.values
    n = grid.size - 1
    if isinstance(h, TiltPath):
        if h.grid.size != n or not np.allclose(h.grid, grid[1:], atol=1e-12):
            raise ValueError("tilt-field grid does not match the path grid")
        hvals = h.values
    else:
        hvals = np.asarray(h, dtype=float)
        if hvals.shape == (n + 1, phi.dim, phi.dim):
            hvals = hvals[1:]
        elif hvals.shape != (n, phi.dim, phi.dim):
            raise ValueError(
                f"h must have shape (n+1, m, m) or (n, m, m); got {hvals.shape}"
            )
    phidot = _central_diff(grid, vals)
    eye = np.eye(phi.dim)
    drift_gap = phidot - delta * eye
    g = (
        np.einsum("nij,nji->n", hvals, drift_gap)
        - 2.0 * np.einsum("nij,njk,nki->n", hvals, vals[1:], hvals)
    )
    return float(_compose_intervals(grid, g).sum())


def _scalar_action_contributions(grid: np.ndarray, x: np.ndarray, delta: float,
                                 flags: dict) -> tuple[np.ndarray, int | None]:
    """Per-interval contributions of ``(x' - delta)^2 / (8 x)``.

    Returns ``(contributions, bad_node)`` where ``bad_node`` is the first
    interior node (1-based) at which the path vanishes while its derivative
    misses ``delta`` — the division that makes the action infinite.
    """
    xdot = _central_diff(grid, x)
    xi = x[1:]
    tol_x = ABS_TOL + REL_TOL * float(np.abs(x).max(initial=0.0))
    tol_d = 1e-6 * (1.0 + abs(delta))
    mismatch = xdot - delta
    zero = xi <= tol_x
    clipped = zero & (np.abs(mismatch) <= tol_d)
    bad = zero & (np.abs(mismatch) > tol_d)
    flags[FLAG_CLIPPED] = flags.get(FLAG_CLIPPED, 0) + int(clipped.sum())
    g = np.where(zero, 0.0, mismatch * mismatch / (8.0 * np.where(zero, 1.0, xi)))
    contribs = _compose_intervals(grid, g)
    bad_node = int(np.argmax(bad)) + 1 if np.any(bad) else None
    return contribs, bad_node


def _scalar_infinite(contribs: np.ndarray, flags: dict, bad_node: int) -> RateReport:
    contribs = contribs.copy()
    contribs[bad_node - 1] = math.inf
    flags[FLAG_INFINITE] = True
    return RateReport(value=math.inf, contributions=contribs, flags=flags)


def eigenvalue_rate(paths: Sequence[ScalarPath], delta: float) -> RateReport:
    """Action of a family of eigenvalue paths: a sum of scalar actions.

    All paths must share one grid and start at zero.  Contributions are
    per-interval totals across the family, so a diagonal matrix path and
    its eigenvalue family produce identical reports.
    """
    if not (delta > 0):
        raise DomainError(f"delta must be > 0, got {delta}")
    if len(paths) == 0:
        raise ValueError("need at least one path")
    grid = paths[0].grid
    for p in paths[1:]:
        if p.grid.size != grid.size or not np.allclose(p.grid, grid, atol=1e-12):
            raise ValueError("all eigenvalue paths must share one grid")
    flags: dict = {FLAG_CLIPPED: 0, FLAG_SINGULAR_SKIPPED: 0,
                   FLAG_INFINITE: False, FLAG_SMALL_TIME: True}
    stacked = np.stack([p.values for p in paths])
    scale = float(np.abs(stacked).max(initial=0.0))
    for p in paths:
        _require_zero_start(p.values[0], scale, "eigenvalue path")
    total = np.zeros(grid.size - 1)
    small_ok = True
    for p in paths:
        contribs, bad = _scalar_action_contributions(grid, p.values, delta, flags)
        if bad is not None:
            return _scalar_infinite(total + contribs, flags, bad)
        total += contribs
        ok, _ = _small_time_diag(grid, p.values, delta, 1)
        small_ok = small_ok and ok
    flags[FLAG_SMALL_TIME] = small_ok
    coarse = None
    n = grid.size - 1
    if n >= 4 and n % 2 == 0:
        cf: dict = {}
        cvals = [
            _scalar_action_contributions(grid[::2], p.values[::2], delta, cf)[0].sum()
            for p in paths
        ]
        coarse = float(np.sum(cvals))
    return _finish_report(grid, total, flags, coarse)


def endpoint_rate(endpoint: np.ndarray, delta: float) -> float:
    """Closed-form action cost of reaching ``endpoint`` at time 1 from zero.

    ``(1/2) Tr M - (delta/2) log det M - m delta / 2 + (m delta / 2) log delta``
    for positive definite ``M``; :class:`DomainError` otherwise.
    """
    if not (delta > 0):
        raise DomainError(f"delta must be > 0, got {delta}")
    m_arr = sym(np.asarray(endpoint, dtype=float))
    w = np.linalg.eigvalsh(m_arr)
    if float(w[0]) <= 0.0:
        raise DomainError(
            f"endpoint must be positive definite (lambda_min = {w[0]:.3e})"
        )
    m = w.size
    return float(
        0.5 * w.sum()
        - 0.5 * delta * np.log(w).sum()
        - 0.5 * m * delta
        + 0.5 * m * delta * math.log(delta)
    )


def optimal_endpoint_path(endpoint: np.ndarray, delta: float,
                          grid: np.ndarray) -> MatrixPath:
    """The action minimiser ``phi(t) = delta t I + t^2 (M - delta I)``.

    The returned path's ``stats["euler_lagrange_residual"]`` reports the
    largest operator norm of ``2 k' + k^2`` along the interior grid, where
    ``k`` is the computed tilt field — the optimality condition the exact
    minimiser satisfies identically.
    """
    grid = _check_grid(grid)
    if abs(grid[0]) > 1e-12:
        raise ValueError("grid must start at t = 0")
    m_arr = sym(np.asarray(endpoint, dtype=float))
    w = np.linalg.eigvalsh(m_arr)
    if float(w[0]) <= 0.0:
        raise DomainError(
            f"endpoint must be positive definite (lambda_min = {w[0]:.3e})"
        )
    dim = m_arr.shape[0]
    eye = np.eye(dim)
    a = m_arr - delta * eye
    t = grid[:, None, None]
    values = delta * t * eye + t * t * a
    path = MatrixPath(grid.copy(), values)
    tilt = compute_tilt_path(path, delta)
    if tilt.grid.size >= 4:
        tg, tv = tilt.grid, tilt.values
        kdot = np.empty_like(tv)
        kdot[0] = (tv[1] - tv[0]) / (tg[1] - tg[0])
        kdot[-1] = (tv[-1] - tv[-2]) / (tg[-1] - tg[-2])
        kdot[1:-1] = (tv[2:] - tv[:-2]) / (tg[2:] - tg[:-2])[:, None, None]
        resid = 2.0 * kdot + np.einsum("nij,njk->nik", tv, tv)
        # the last two nodes inherit the O(h) bias of the one-sided
        # derivative at the right end, amplified by 1/h in kdot; restrict
        # the reported maximum to stencils built from interior nodes
        core = sym(resid[:-2])
        resid_norm = float(np.abs(np.linalg.eigvalsh(core)).max(initial=0.0))
    else:
        resid_norm = math.nan
    path.stats["euler_lagrange_residual"] = resid_norm
    return path


def lower_envelope(f: ScalarPath, delta: float) -> ScalarPath:
    """Running lower envelope ``t -> delta t + inf_{s <= t} (f(s) - delta s)``.

    Computed in one pass with a running minimum; the result starts at zero
    and never exceeds ``f``.
    """
    shifted = f.values - delta * f.grid
    env = np.minimum.accumulate(shifted)
    return ScalarPath(f.grid.copy(), delta * f.grid + env)


class ContactVerdict(Enum):
    """Sign verdict for the contact-set measure of a largest-eigenvalue path."""

    POSITIVE = "positive"
    NEGATIVE = "negative"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ContactDiagnostic:
    """Details behind a :class:`ContactVerdict`.

    ``min_density`` is the smallest diagnosed density value on the contact
    set (``None`` when the contact set is empty beyond t = 0);
    ``terminal_atom`` the diagnosed atom weight at the final time if that
    node is in contact, else ``None``.
    """

    verdict: ContactVerdict
    min_density: float | None
    terminal_atom: float | None
    tolerance: float


def contact_measure_diagnostic(f: ScalarPath, delta: float) -> ContactDiagnostic:
    """Decide the sign of the tilt measure restricted to the contact set.

    The scalar tilt is ``H = (f' - delta) / (2 f)``; its associated measure
    has density ``(H' + H^2) / 2`` plus a terminal atom of weight
    ``-H(T)/2``.  Only the part supported on the contact set
    ``{ f = lower envelope }`` matters for the largest-eigenvalue formula.
    The verdict is positive when the restricted measure is nonnegative
    within tolerance, negative when it dips clearly below (10x tolerance),
    and inconclusive in between or when the tilt is undefined (the path
    touches zero after t = 0).
    """
    if not (delta > 0):
        raise DomainError(f"delta must be > 0, got {delta}")
    grid, x = f.grid, f.values
    scale = float(np.abs(x).max(initial=0.0))
    _require_zero_start(x[0], scale, "largest-eigenvalue path")
    tol_v = 1e-6 * (1.0 + abs(delta))
    interior = x[1:]
    tol_x = ABS_TOL + REL_TOL * scale
    if np.any(interior <= tol_x):
        return ContactDiagnostic(ContactVerdict.INCONCLUSIVE, None, None, tol_v)
    xdot = _central_diff(grid, x)
    h = (xdot - delta) / (2.0 * interior)
    times = grid[1:]
    hdot = np.empty_like(h)
    if h.size >= 2:
        hdot[0] = (h[1] - h[0]) / (times[1] - times[0])
        hdot[-1] = (h[-1] - h[-2]) / (times[-1] - times[-2])
        if h.size >= 3:
            hdot[1:-1] = (h[2:] - h[:-2]) / (times[2:] - times[:-2])
    else:
        hdot[:] = 0.0
    density = 0.5 * (hdot + h * h)
    envelope = lower_envelope(f, delta)
    contact = np.abs(x[1:] - envelope.values[1:]) <= 1e-9 * (1.0 + np.abs(x[1:]))
    terminal_atom = float(-0.5 * h[-1]) if contact[-1] else None
    if not np.any(contact):
        return ContactDiagnostic(ContactVerdict.POSITIVE, None, terminal_atom, tol_v)
    min_density = float(density[contact].min())
    worst = min_density if terminal_atom is None else min(min_density, terminal_atom)
    if worst >= -tol_v:
        verdict = ContactVerdict.POSITIVE
    elif worst < -10.0 * tol_v:
        verdict = ContactVerdict.NEGATIVE
    else:
        verdict = ContactVerdict.INCONCLUSIVE
    return ContactDiagnostic(verdict, min_density, terminal_atom, tol_v)


def max_eigenvalue_path_rate(f: ScalarPath, delta: float, dim: int) -> RateReport:
    """Action of a largest-eigenvalue path via the two-term envelope formula.

    ``(1/8) [ integral (f' - delta)^2 / f + (dim - 1) integral
    (g' - delta)^2 / g ]`` with ``g`` the running lower envelope of ``f``.
    The report's flags carry the contact-measure verdict; when it is
    negative the closed formula is not a valid contraction for this path
    and ``CONTACT_MEASURE_NEGATIVE`` is set (the value is still reported).
    """
    if int(dim) != dim or dim < 1:
        raise DomainError(f"dim must be a positive integer, got {dim}")
    if not (delta > 0):
        raise DomainError(f"delta must be > 0, got {delta}")
    scale = float(np.abs(f.values).max(initial=0.0))
    _require_zero_start(f.values[0], scale, "largest-eigenvalue path")
    envelope = lower_envelope(f, delta)
    flags: dict = {FLAG_CLIPPED: 0, FLAG_SINGULAR_SKIPPED: 0,
                   FLAG_INFINITE: False, FLAG_SMALL_TIME: True}
    c_f, bad_f = _scalar_action_contributions(f.grid, f.values, delta, flags)
    c_g, bad_g = _scalar_action_contributions(f.grid, envelope.values, delta, flags)
    total = c_f + (dim - 1) * c_g
    diag = contact_measure_diagnostic(f, delta)
    flags["contact_verdict"] = diag.verdict.value
    flags[FLAG_CONTACT_NEGATIVE] = diag.verdict is ContactVerdict.NEGATIVE
    if bad_f is not None:
        return _scalar_infinite(total, flags, bad_f)
    if bad_g is not None:
        return _scalar_infinite(total, flags, bad_g)
    ok, _ = _small_time_diag(f.grid, f.values, delta, 1)
    flags[FLAG_SMALL_TIME] = ok
    coarse = None
    n = f.grid.size - 1
    if n >= 4 and n % 2 == 0:
        cf: dict = {}
        cgrid = f.grid[::2]
        cenv = lower_envelope(
            ScalarPath(cgrid, f.values[::2]), delta
        )
        cc_f, cbad_f = _scalar_action_contributions(cgrid, f.values[::2], delta, cf)
        cc_g, cbad_g = _scalar_action_contributions(cgrid, cenv.values, delta, cf)
        if cbad_f is None and cbad_g is None:
            coarse = float((cc_f + (dim - 1) * cc_g).sum())
    return _finish_report(f.grid, total, flags, coarse)


def max_eigenvalue_endpoint_rate(a: float, delta: float, dim: int) -> float:
    """Closed-form rate for the largest eigenvalue reaching ``a`` at time 1.

    One scalar well ``a/2 - (delta/2) log a - delta/2 + (delta/2) log delta``
    above ``a = delta``; ``dim`` copies of it at or below ``delta`` (all
    eigenvalues must be squeezed under ``a``).  Continuous, and zero exactly
    at ``a = delta``.
    """
    if int(dim) != dim or dim < 1:
        raise DomainError(f"dim must be a positive integer, got {dim}")
    if not (delta > 0):
        raise DomainError(f"delta must be > 0, got {delta}")
    if not (a > 0):
        raise DomainError(f"endpoint must be positive, got {a}")
    well = 0.5 * a - 0.5 * delta * math.log(a) - 0.5 * delta + 0.5 * delta * math.log(delta)
    return float(well if a > delta else dim * well)
