"""Positivity-preserving Euler schemes for matrix squared-Bessel dynamics.

The central object is the small-noise Wishart update

    X_{k+1} = X_k + eps * (sqrt(X_k) dB_k + dB_k^T sqrt(X_k)) + delta * dt * I

driven by an m-by-m matrix of independent Brownian increments, together with
its scalar trace reduction (a squared Bessel scheme with drift ``delta * m``)
and the coupled eigenvalue system with its Coulomb-type interaction drift.

Positivity is maintained by one of two repair schemes:

* ``"project"`` — after each update, clip negative eigenvalues to zero
  (counted as a repair when the violation exceeds the spectral tolerance);
* ``"halve"`` — reject the step and retry on two half-steps obtained by a
  Brownian-bridge split of the increment, recursing up to 10 levels before
  falling back to the projection.

Randomness is counter-based: replica ``r`` of a run with seed ``s`` always
draws from the Philox stream keyed by ``s`` at counter block ``r``, so the
set of replica outputs is independent of batching, ordering, or chunk sizes.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import BadInitialConditionError
from .linalg import ABS_TOL, REL_TOL, classify_spd, sym

_SCHEMES = ("project", "halve")
_MAX_HALVINGS = 10


@dataclass(frozen=True)
class SimConfig:
    """Immutable description of one simulation run.

    Attributes
    ----------
    dim : int
        Matrix dimension m >= 1.
    delta : float
        Drift dimension parameter, > 0.  Values below ``dim + 1`` are
        accepted; the repair statistics on the returned paths show how hard
        the scheme had to work to stay in the cone.
    epsilon : float
        Noise amplitude, >= 0.  ``epsilon = 1`` recovers the unscaled process.
    horizon : float
        Terminal time T > 0.
    steps : int
        Number of uniform Euler steps.
    replicas : int
        Number of Monte Carlo replicas an experiment will consume.
    seed : int
        64-bit stream key.
    scheme : str
        Positivity repair scheme, ``"project"`` (default) or ``"halve"``.
    gap_floor : float or None
        Optional fixed collision floor for the eigenvalue scheme.  ``None``
        (default) selects an adaptive floor at the per-step noise scale,
        ``epsilon * sqrt(dt * (lam_i + lam_k))``.
    """

    dim: int = 1
    delta: float = 2.0
    epsilon: float = 1.0
    horizon: float = 1.0
    steps: int = 1000
    replicas: int = 1
    seed: int = 0
    scheme: str = "project"
    gap_floor: float | None = None

    def __post_init__(self) -> None:
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim}")
        if not (self.delta > 0):
            raise ValueError(f"delta must be > 0, got {self.delta}")
        if not (self.epsilon >= 0):
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if not (self.horizon > 0):
            raise ValueError(f"horizon must be > 0, got {self.horizon}")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"steps must be a positive integer, got {self.steps}")
        if int(self.replicas) != self.replicas or self.replicas < 1:
            raise ValueError(f"replicas must be a positive integer, got {self.replicas}")
        if self.scheme not in _SCHEMES:
            raise ValueError(f"scheme must be one of {_SCHEMES}, got {self.scheme!r}")
        if self.gap_floor is not None and not (self.gap_floor > 0):
            raise ValueError(f"gap_floor must be positive or None, got {self.gap_floor}")

    @property
    def dt(self) -> float:
        return self.horizon / self.steps

    def grid(self) -> np.ndarray:
        """The uniform time grid ``0 = t_0 < ... < t_steps = horizon``."""
        return np.linspace(0.0, self.horizon, self.steps + 1)

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)


def _check_grid(grid: np.ndarray) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValueError("grid must be a 1-d array with at least two nodes")
    if not np.all(np.isfinite(grid)) or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be finite and strictly increasing")
    return grid


@dataclass
class ScalarPath:
    """A nonnegative scalar path sampled on a strictly increasing grid."""

    grid: np.ndarray
    values: np.ndarray
    stats: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.grid = _check_grid(self.grid)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"values shape {self.values.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("path values contain non-finite entries")
        floor = -(ABS_TOL + REL_TOL * float(np.abs(self.values).max(initial=0.0)))
        if float(self.values.min()) < floor:
            raise ValueError(
                f"scalar path dips below zero: min value {self.values.min():.3e}"
            )


@dataclass
class MatrixPath:
    """A symmetric-matrix path: ``values[k]`` is the state at ``grid[k]``."""

    grid: np.ndarray
    values: np.ndarray
    stats: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.grid = _check_grid(self.grid)
        self.values = np.asarray(self.values, dtype=float)
        if (
            self.values.ndim != 3
            or self.values.shape[0] != self.grid.size
            or self.values.shape[1] != self.values.shape[2]
        ):
            raise ValueError(
                f"values must have shape (n_nodes, m, m); got {self.values.shape} "
                f"for {self.grid.size} nodes"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("path values contain non-finite entries")

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def trace_path(self) -> ScalarPath:
        """The scalar path of traces along the grid."""
        return ScalarPath(self.grid.copy(), np.trace(self.values, axis1=1, axis2=2))

    def sorted_eigenvalues(self) -> np.ndarray:
        """Eigenvalues at every node, sorted descending; shape (n_nodes, m)."""
        return np.linalg.eigvalsh(self.values)[:, ::-1]

    def min_eigenvalue(self) -> float:
        """Smallest eigenvalue over all nodes (cone-membership diagnostic)."""
        return float(np.linalg.eigvalsh(self.values)[:, 0].min())


def replica_rng(seed: int, replica: int) -> np.random.Generator:
    """Counter-based random stream for one replica of a seeded experiment.

    The stream is a pure function of ``(seed, replica)``: the Philox engine
    is keyed by the (unsigned 64-bit) seed with its 256-bit counter offset to
    block ``replica``, leaving 2**192 draws per replica with no overlap.
    """
    if replica < 0 or int(replica) != replica:
        raise ValueError(f"replica must be a nonnegative integer, got {replica}")
    key = int(seed) & 0xFFFFFFFFFFFFFFFF
    return np.random.Generator(np.random.Philox(key=key, counter=int(replica) << 192))


def _validate_x0(x0, dim: int) -> np.ndarray:
    if x0 is None:
        return np.zeros((dim, dim))
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (dim, dim):
        raise BadInitialConditionError(
            f"initial condition has shape {x0.shape}, expected {(dim, dim)}"
        )
    try:
        check = classify_spd(x0)
    except ValueError as exc:
        raise BadInitialConditionError(str(exc)) from exc
    if not check.is_psd:
        raise BadInitialConditionError(
            f"initial condition is not positive semidefinite "
            f"(lambda_min = {check.min_eigenvalue:.3e})"
        )
    return sym(x0)


def _spectral_tol(w: np.ndarray) -> float:
    return ABS_TOL + REL_TOL * float(np.abs(w).max(initial=0.0))


def _repair_project(x: np.ndarray, stats: dict) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Clip negative eigenvalues of ``x``; returns (x_repaired, w_clipped, v).

    Updates ``stats['repaired_steps']`` when the violation was beyond the
    spectral tolerance (as opposed to plain roundoff).
    """
    w, v = np.linalg.eigh(x)
    if w[0] < 0.0:
        if w[0] < -_spectral_tol(w):
            stats["repaired_steps"] += 1
        w = np.clip(w, 0.0, None)
        x = sym((v * w) @ v.T)
    return x, w, v


def _step_halve(x: np.ndarray, db: np.ndarray, dt: float, cfg: SimConfig,
                rng: np.random.Generator, eye: np.ndarray, depth: int,
                stats: dict) -> np.ndarray:
    """One (possibly recursively halved) update from PSD state ``x``."""
    w, v = np.linalg.eigh(x)
    s = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T
    sdb = s @ db
    cand = x + cfg.epsilon * (sdb + sdb.T) + cfg.delta * dt * eye
    cand = sym(cand)
    wmin = float(np.linalg.eigvalsh(cand)[0])
    if wmin >= 0.0:
        return cand
    if depth >= _MAX_HALVINGS:
        stats["repaired_steps"] += 1
        cand, _, _ = _repair_project(cand, {"repaired_steps": 0})
        return cand
    stats["halvings"] += 1
    # Brownian-bridge split: each half-increment is N(db/2, dt/4) entrywise.
    eta = rng.normal(size=db.shape) * (0.5 * np.sqrt(dt))
    db1 = 0.5 * db + eta
    db2 = db - db1
    half = _step_halve(x, db1, 0.5 * dt, cfg, rng, eye, depth + 1, stats)
    return _step_halve(half, db2, 0.5 * dt, cfg, rng, eye, depth + 1, stats)


def simulate_wishart(cfg: SimConfig, x0: np.ndarray | None = None,
                     replica: int = 0) -> MatrixPath:
    """Simulate one replica of the matrix scheme; returns the full path.

    The returned path has ``steps + 1`` nodes, starts at ``x0`` (zero matrix
    by default), and every stored state is positive semidefinite after
    repair.  ``path.stats`` reports ``repaired_steps``, ``repair_fraction``,
    and (for the halving scheme) ``halvings``.
    """
    m = cfg.dim
    x = _validate_x0(x0, m)
    grid = cfg.grid()
    dt = cfg.dt
    sqrt_dt = np.sqrt(dt)
    eye = np.eye(m)
    rng = replica_rng(cfg.seed, replica)
    noise = rng.normal(size=(cfg.steps, m, m))
    values = np.empty((cfg.steps + 1, m, m))
    stats = {"repaired_steps": 0, "halvings": 0}
    if cfg.scheme == "project":
        for k in range(cfg.steps):
            x, w, v = _repair_project(x, stats)
            values[k] = x
            s = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T
            sdb = s @ (noise[k] * sqrt_dt)
            x = sym(x + cfg.epsilon * (sdb + sdb.T) + cfg.delta * dt * eye)
        x, _, _ = _repair_project(x, stats)
        values[cfg.steps] = x
    else:
        values[0] = x
        for k in range(cfg.steps):
            x = _step_halve(x, noise[k] * sqrt_dt, dt, cfg, rng, eye, 0, stats)
            values[k + 1] = x
    stats["repair_fraction"] = stats["repaired_steps"] / cfg.steps
    return MatrixPath(grid, values, stats)


def simulate_trace_besq(cfg: SimConfig, y0: float = 0.0, replica: int = 0) -> ScalarPath:
    """Simulate the scalar trace reduction: ``dY = 2 eps sqrt(Y) dW + delta*m dt``.

    With ``dim = 1`` and matching ``(seed, replica)`` this reproduces the
    matrix scheme's path exactly, because the update arithmetic mirrors the
    1-by-1 matrix case operation for operation.
    """
    if y0 < 0:
        raise BadInitialConditionError(f"y0 must be nonnegative, got {y0}")
    grid = cfg.grid()
    dt = cfg.dt
    sqrt_dt = np.sqrt(dt)
    drift_dt = (cfg.delta * cfg.dim) * dt
    two_eps = 2.0 * cfg.epsilon
    rng = replica_rng(cfg.seed, replica)
    noise = rng.normal(size=cfg.steps)
    values = np.empty(cfg.steps + 1)
    y = float(y0)
    values[0] = y
    for k in range(cfg.steps):
        a = np.sqrt(max(y, 0.0)) * (noise[k] * sqrt_dt)
        y = max((y + two_eps * a) + drift_dt, 0.0)
        values[k + 1] = y
    return ScalarPath(grid, values)


def _interaction_floor(cfg: SimConfig, num: np.ndarray, dt: float) -> np.ndarray:
    """Collision floor for eigenvalue gaps: fixed override or noise-scale."""
    if cfg.gap_floor is not None:
        return np.full_like(num, cfg.gap_floor)
    return cfg.epsilon * np.sqrt(dt * np.clip(num, 0.0, None)) + 1e-300


def simulate_eigenvalues(cfg: SimConfig, lam0: Sequence[float] | None = None,
                         replica: int = 0) -> list[ScalarPath]:
    """Simulate the coupled eigenvalue system directly.

    The drift on component i is ``delta + eps^2 * sum_{k != i}
    (lam_i + lam_k) / (lam_i - lam_k)``; gaps smaller than the collision
    floor are replaced by the floor with the sign implied by the descending
    ordering.  Components are clamped at zero and re-sorted after every step.

    Returns one :class:`ScalarPath` per eigenvalue (descending order); every
    path carries the same ``stats`` mapping with the number of steps that
    required re-sorting (``resorts``) and floor activations
    (``floor_activations``).
    """
    m = cfg.dim
    if lam0 is None:
        lam = np.zeros(m)
    else:
        lam = np.asarray(lam0, dtype=float)
        if lam.shape != (m,):
            raise BadInitialConditionError(
                f"lam0 has shape {lam.shape}, expected {(m,)}"
            )
        if np.any(lam < 0):
            raise BadInitialConditionError("eigenvalues must be nonnegative")
        if np.any(np.diff(lam) > 0):
            raise BadInitialConditionError(
                "lam0 must be sorted in nonincreasing order"
            )
    grid = cfg.grid()
    dt = cfg.dt
    sqrt_dt = np.sqrt(dt)
    two_eps = 2.0 * cfg.epsilon
    eps_sq = cfg.epsilon * cfg.epsilon
    rng = replica_rng(cfg.seed, replica)
    noise = rng.normal(size=(cfg.steps, m))
    values = np.empty((cfg.steps + 1, m))
    values[0] = lam
    stats = {"resorts": 0, "floor_activations": 0}
    # Sign convention for tied components: larger index = smaller eigenvalue,
    # so lam_i - lam_k gets the sign of k - i.
    idx_sign = np.sign(np.arange(m)[None, :] - np.arange(m)[:, None]) * 1.0
    off_diag = ~np.eye(m, dtype=bool)
    for k in range(cfg.steps):
        if m > 1:
            num = lam[:, None] + lam[None, :]
            gap = lam[:, None] - lam[None, :]
            floor = _interaction_floor(cfg, num, dt)
            agap = np.abs(gap)
            floored = off_diag & (agap < floor)
            if np.any(floored):
                stats["floor_activations"] += 1
            sign = np.where(gap != 0.0, np.sign(gap), idx_sign)
            denom = sign * np.maximum(agap, floor)
            ratio = np.where(off_diag, num / np.where(denom == 0.0, 1.0, denom), 0.0)
            inter = ratio.sum(axis=1)
        else:
            inter = np.zeros(1)
        drift = cfg.delta + eps_sq * inter
        a = np.sqrt(np.clip(lam, 0.0, None)) * (noise[k] * sqrt_dt)
        lam = np.maximum((lam + two_eps * a) + drift * dt, 0.0)
        if np.any(np.diff(lam) > 0):
            stats["resorts"] += 1
            lam = np.sort(lam)[::-1]
        values[k + 1] = lam
    return [ScalarPath(grid, values[:, i].copy(), stats) for i in range(m)]


# ---------------------------------------------------------------------------
# Deterministic tilted flow
# ---------------------------------------------------------------------------

def matrix_interpolator(times: np.ndarray, mats: np.ndarray) -> Callable[[float], np.ndarray]:
    """Piecewise-linear matrix interpolant with linear edge extrapolation."""
    times = np.asarray(times, dtype=float)
    mats = np.asarray(mats, dtype=float)
    if times.ndim != 1 or mats.shape[0] != times.size:
        raise ValueError("times and mats must align on the first axis")
    n = times.size

    def at(t: float) -> np.ndarray:
        if n == 1:
            return mats[0]
        j = int(np.searchsorted(times, t, side="right")) - 1
        j = min(max(j, 0), n - 2)
        w = (t - times[j]) / (times[j + 1] - times[j])
        return (1.0 - w) * mats[j] + w * mats[j + 1]

    return at


def tilted_flow(delta: float, tilt, x0: np.ndarray, grid: np.ndarray) -> MatrixPath:
    """Integrate the deterministic flow ``dX/dt = (X k + k X)/2 + delta I``.

    ``tilt`` may be a callable ``t -> (m, m)`` symmetric matrix, or any
    object with ``grid`` and ``values`` attributes (e.g. the tilt-field path
    produced by the rate functionals), which is then interpolated linearly.
    Integration is classical Runge-Kutta 4 on the supplied grid.
    """
    grid = _check_grid(grid)
    if callable(tilt):
        k_at = tilt
    elif hasattr(tilt, "grid") and hasattr(tilt, "values"):
        k_at = matrix_interpolator(np.asarray(tilt.grid), np.asarray(tilt.values))
    else:
        raise TypeError("tilt must be callable or expose grid/values")
    x = sym(np.asarray(x0, dtype=float))
    m = x.shape[0]
    eye = np.eye(m)

    def rhs(t: float, state: np.ndarray) -> np.ndarray:
        k = k_at(t)
        return 0.5 * (state @ k + k @ state) + delta * eye

    values = np.empty((grid.size, m, m))
    values[0] = x
    for j in range(grid.size - 1):
        t, h = grid[j], grid[j + 1] - grid[j]
        k1 = rhs(t, x)
        k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2)
        k4 = rhs(t + h, x + h * k3)
        x = sym(x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
        values[j + 1] = x
    return MatrixPath(grid, values)


# ---------------------------------------------------------------------------
# Vectorised endpoint/functional samplers (Monte Carlo hot paths)
# ---------------------------------------------------------------------------

def _chunk_bounds(total: int, chunk: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]


def _draw_noise_block(cfg: SimConfig, lo: int, hi: int, shape_tail: tuple[int, ...]) -> np.ndarray:
    """Stack per-replica noise blocks for replicas [lo, hi)."""
    out = np.empty((hi - lo, cfg.steps) + shape_tail)
    for i, r in enumerate(range(lo, hi)):
        out[i] = replica_rng(cfg.seed, r).normal(size=(cfg.steps,) + shape_tail)
    return out


def _require_project(cfg: SimConfig, what: str) -> None:
    if cfg.scheme != "project":
        raise ValueError(f"{what} supports only scheme='project', got {cfg.scheme!r}")


def _batch_wishart_sweep(cfg: SimConfig, x0: np.ndarray, chunk: int,
                         per_step=None) -> tuple[np.ndarray, dict]:
    """Run the projected matrix scheme for all replicas, chunked.

    Returns the stack of terminal states ``(replicas, m, m)`` and repair
    statistics.  If ``per_step`` is given it is called as
    ``per_step(step_index, X_chunk, lo, hi)`` after every repair, where
    ``step_index`` runs over all ``steps + 1`` grid nodes — this is the hook
    used by the tube-probability scan, which needs the whole path but must
    not store it.
    """
    m = cfg.dim
    dt = cfg.dt
    sqrt_dt = np.sqrt(dt)
    eps = cfg.epsilon
    drift = cfg.delta * dt * np.eye(m)
    endpoints = np.empty((cfg.replicas, m, m))
    repaired = 0
    for lo, hi in _chunk_bounds(cfg.replicas, chunk):
        nblock = _draw_noise_block(cfg, lo, hi, (m, m))
        x = np.broadcast_to(x0, (hi - lo, m, m)).copy()
        for k in range(cfg.steps + 1):
            w, v = np.linalg.eigh(x)
            neg = w[:, 0] < 0.0
            if np.any(neg):
                tol = ABS_TOL + REL_TOL * np.abs(w[neg]).max(axis=-1)
                repaired += int((w[neg, 0] < -tol).sum())
                wc = np.clip(w[neg], 0.0, None)
                vn = v[neg]
                xr = (vn * wc[:, None, :]) @ np.swapaxes(vn, -1, -2)
                x[neg] = 0.5 * (xr + np.swapaxes(xr, -1, -2))
                w = np.where(neg[:, None], np.clip(w, 0.0, None), w)
            if per_step is not None:
                per_step(k, x, lo, hi)
            if k == cfg.steps:
                break
            s = (v * np.sqrt(np.clip(w, 0.0, None))[:, None, :]) @ np.swapaxes(v, -1, -2)
            sdb = s @ (nblock[:, k] * sqrt_dt)
            x = x + eps * (sdb + np.swapaxes(sdb, -1, -2)) + drift
            x = 0.5 * (x + np.swapaxes(x, -1, -2))
        endpoints[lo:hi] = x
    stats = {
        "repaired_steps": repaired,
        "repair_fraction": repaired / (cfg.replicas * cfg.steps),
    }
    return endpoints, stats


def sample_wishart_endpoints(cfg: SimConfig, x0: np.ndarray | None = None,
                             chunk: int = 4096) -> tuple[np.ndarray, dict]:
    """Terminal states ``X_T`` for all replicas; shape ``(replicas, m, m)``.

    Replica r's draw agrees with the stream of :func:`replica_rng`; the
    chunk size changes memory use only, never the sampled values.
    """
    _require_project(cfg, "sample_wishart_endpoints")
    x0 = _validate_x0(x0, cfg.dim)
    return _batch_wishart_sweep(cfg, x0, chunk)


def tube_hit_count(cfg: SimConfig, target: MatrixPath, radius: float,
                   x0: np.ndarray | None = None, chunk: int = 4096) -> tuple[int, dict]:
    """Count replicas whose whole path stays within ``radius`` of ``target``.

    The distance is the grid sup of the operator norm of ``X_t - target_t``.
    ``target`` must live on the run's own grid.
    """
    _require_project(cfg, "tube_hit_count")
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    if target.dim != cfg.dim or target.grid.size != cfg.steps + 1 or \
            not np.allclose(target.grid, cfg.grid(), atol=1e-12):
        raise ValueError("target path must be sampled on the run's grid")
    x0 = _validate_x0(x0, cfg.dim)
    sup_dev = np.zeros(cfg.replicas)
    tvals = target.values

    def per_step(k: int, x: np.ndarray, lo: int, hi: int) -> None:
        dev = x - tvals[k]
        w = np.linalg.eigvalsh(dev)
        norms = np.abs(w).max(axis=-1)
        np.maximum(sup_dev[lo:hi], norms, out=sup_dev[lo:hi])

    _, stats = _batch_wishart_sweep(cfg, x0, chunk, per_step=per_step)
    hits = int((sup_dev < radius).sum())
    stats["max_deviation_quantiles"] = {
        "q10": float(np.quantile(sup_dev, 0.10)),
        "q50": float(np.quantile(sup_dev, 0.50)),
        "q90": float(np.quantile(sup_dev, 0.90)),
    }
    return hits, stats


def sample_besq_endpoints(cfg: SimConfig, y0: float = 0.0,
                          chunk: int = 65536) -> np.ndarray:
    """Terminal values of the scalar trace scheme for all replicas."""
    if y0 < 0:
        raise BadInitialConditionError(f"y0 must be nonnegative, got {y0}")
    dt = cfg.dt
    sqrt_dt = np.sqrt(dt)
    drift_dt = (cfg.delta * cfg.dim) * dt
    two_eps = 2.0 * cfg.epsilon
    out = np.empty(cfg.replicas)
    for lo, hi in _chunk_bounds(cfg.replicas, chunk):
        nblock = _draw_noise_block(cfg, lo, hi, ())
        y = np.full(hi - lo, float(y0))
        for k in range(cfg.steps):
            a = np.sqrt(np.maximum(y, 0.0)) * (nblock[:, k] * sqrt_dt)
            y = np.maximum((y + two_eps * a) + drift_dt, 0.0)
        out[lo:hi] = y
    return out


def sample_eigenvalue_endpoints(cfg: SimConfig, lam0: Sequence[float] | None = None,
                                chunk: int = 16384) -> tuple[np.ndarray, dict]:
    """Terminal eigenvalue vectors (descending) for all replicas."""
    m = cfg.dim
    if lam0 is None:
        lam_init = np.zeros(m)
    else:
        lam_init = np.asarray(lam0, dtype=float)
        if lam_init.shape != (m,) or np.any(lam_init < 0) or np.any(np.diff(lam_init) > 0):
            raise BadInitialConditionError(
                "lam0 must be a nonnegative, nonincreasing vector"
            )
    dt = cfg.dt
    sqrt_dt = np.sqrt(dt)
    two_eps = 2.0 * cfg.epsilon
    eps_sq = cfg.epsilon * cfg.epsilon
    idx_sign = (np.sign(np.arange(m)[None, :] - np.arange(m)[:, None]) * 1.0)[None]
    off_diag = (~np.eye(m, dtype=bool))[None]
    out = np.empty((cfg.replicas, m))
    resorts = 0
    for lo, hi in _chunk_bounds(cfg.replicas, chunk):
        nblock = _draw_noise_block(cfg, lo, hi, (m,))
        lam = np.broadcast_to(lam_init, (hi - lo, m)).copy()
        for k in range(cfg.steps):
            if m > 1:
                num = lam[:, :, None] + lam[:, None, :]
                gap = lam[:, :, None] - lam[:, None, :]
                floor = _interaction_floor(cfg, num, dt)
                sign = np.where(gap != 0.0, np.sign(gap), idx_sign)
                denom = sign * np.maximum(np.abs(gap), floor)
                ratio = np.where(off_diag, num / np.where(denom == 0.0, 1.0, denom), 0.0)
                inter = ratio.sum(axis=2)
            else:
                inter = 0.0
            drift = cfg.delta + eps_sq * inter
            a = np.sqrt(np.clip(lam, 0.0, None)) * (nblock[:, k] * sqrt_dt)
            lam = np.maximum((lam + two_eps * a) + drift * dt, 0.0)
            if m > 1:
                unsorted = np.any(np.diff(lam, axis=1) > 0, axis=1)
                if np.any(unsorted):
                    resorts += int(unsorted.sum())
                    lam[unsorted] = np.sort(lam[unsorted], axis=1)[:, ::-1]
        out[lo:hi] = lam
    return out, {"resorts": resorts}
