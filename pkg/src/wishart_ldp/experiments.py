"""Monte Carlo verification harness.

Each experiment is described by an :class:`ExperimentSpec` (a simulation
config, a kind, and a kind-specific payload) and produces a JSON-ready
report dict.  Reports are deterministic functions of the spec — rerunning
the same spec yields byte-identical canonical JSON except for the
``timestamp`` field.

Kinds
-----
``laplace_check``
    Compare empirical endpoint exponential moments against the closed-form
    transform for a battery of PSD test matrices; PASS iff every z-score is
    within the bound (default 3).
``additivity``
    Check that summing two independent runs with drift parameters
    ``delta1, delta2`` started at ``x, y`` matches a single run with
    ``delta1 + delta2`` started at ``x + y``, in distribution, through the
    same moment battery (two-sample z-tests).
``ldp_scan``
    Estimate tube probabilities around a target path for a decreasing list
    of noise levels and report the trend of ``eps^2 * log p`` — no
    quantitative limit assertion, this is a trend report by design.
``eigen_contract``
    Two-pipeline check: the largest eigenvalue sampled through the full
    matrix scheme versus the direct eigenvalue scheme
    (Kolmogorov-Smirnov distance), plus the deterministic identity between
    the matrix action of a diagonal path and the scalar-family action.
``rate_eval`` / ``riccati_eval``
    File-driven evaluation of an action functional / a backward Riccati
    solve, for scripting from the command line.
"""

from __future__ import annotations

import datetime as _dt
from dataclasses import asdict, dataclass, field

import numpy as np

from . import pathio
from .errors import InputFormatError
from .linalg import sym
from .rates import RateReport, eigenvalue_rate, max_eigenvalue_path_rate, path_rate
from .riccati import (
    MatrixMeasure,
    endpoint_laplace_closed_form,
    laplace_transform,
    riccati_residual,
    solve_riccati,
)
from .sde import (
    MatrixPath,
    ScalarPath,
    SimConfig,
    sample_eigenvalue_endpoints,
    sample_wishart_endpoints,
    tube_hit_count,
)

KINDS = (
    "laplace_check",
    "additivity",
    "ldp_scan",
    "eigen_contract",
    "rate_eval",
    "riccati_eval",
)

#: Two-sided 95% normal quantile used for Wilson intervals.
_Z95 = 1.959963984540054
#: Hit counts below this raise the LOW_HITS flag on scan entries.
LOW_HITS_THRESHOLD = 20


@dataclass(frozen=True)
class ExperimentSpec:
    """One harness run: a kind, a simulation config, and a payload.

    ``output_path`` is advisory — runners never write files themselves;
    the CLI (or caller) writes the report there if it is nonempty.
    """

    kind: str
    sim: SimConfig
    payload: dict = field(default_factory=dict)
    output_path: str = ""

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")


@dataclass
class LdpScanResult:
    """Trend data from a tube-probability scan."""

    epsilons: list
    tube_radius: float
    hits: list
    log_probs: list
    wilson_cis: list
    scaled_log_probs: list
    slope_estimate: float | None
    target_rate: float
    flags: dict

    def to_dict(self) -> dict:
        return {
            "epsilons": self.epsilons,
            "tube_radius": self.tube_radius,
            "hits": self.hits,
            "log_probs": self.log_probs,
            "wilson_cis": self.wilson_cis,
            "scaled_log_probs": self.scaled_log_probs,
            "slope_estimate": self.slope_estimate,
            "target_rate": self.target_rate,
            "flags": self.flags,
        }


def default_theta_battery(dim: int) -> list[np.ndarray]:
    """Five deterministic PSD test matrices with operator norm <= 0.6."""
    eye = np.eye(dim)
    u = np.ones((dim, 1)) / np.sqrt(dim)
    v = np.array([(-1.0) ** i for i in range(dim)])[:, None] / np.sqrt(dim)
    return [
        0.2 * eye,
        0.5 * eye,
        np.diag(np.linspace(0.6, 0.2, dim)),
        0.35 * eye + 0.25 * (u @ u.T),
        0.5 * (v @ v.T),
    ]


def wilson_interval(hits: int, total: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if total <= 0:
        raise ValueError("total must be positive")
    p = hits / total
    denom = 1.0 + z * z / total
    center = (p + z * z / (2 * total)) / denom
    half = z * np.sqrt(p * (1 - p) / total + z * z / (4 * total * total)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def ks_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Two-sample Kolmogorov-Smirnov statistic (max ECDF gap)."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    pooled = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pooled, side="right") / a.size
    cdf_b = np.searchsorted(b, pooled, side="right") / b.size
    return float(np.abs(cdf_a - cdf_b).max())


def _timestamp() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat()


def _base_report(spec: ExperimentSpec, results: dict, passed: bool | None) -> dict:
    return {
        "kind": spec.kind,
        "config": pathio.jsonify(asdict(spec.sim)),
        "payload": pathio.jsonify(spec.payload),
        "results": pathio.jsonify(results),
        "passed": passed,
        "timestamp": _timestamp(),
    }


def _payload_matrix(payload: dict, key: str, dim: int) -> np.ndarray:
    value = payload.get(key)
    if value is None:
        return np.zeros((dim, dim))
    arr = sym(np.asarray(value, dtype=float))
    if arr.shape != (dim, dim):
        raise InputFormatError(f"payload {key!r} must be a {dim}x{dim} matrix")
    return arr


def _moment_rows(endpoints: np.ndarray, thetas: list[np.ndarray]) -> list[dict]:
    rows = []
    for theta in thetas:
        z_samples = np.exp(-np.einsum("rij,ji->r", endpoints, theta))
        mean = float(z_samples.mean())
        se = float(z_samples.std(ddof=1) / np.sqrt(z_samples.size))
        rows.append({"theta": theta.tolist(), "mean": mean, "se": se})
    return rows


def run_laplace_check(spec: ExperimentSpec) -> dict:
    """Endpoint exponential moments vs the closed-form transform."""
    sim = spec.sim
    x0 = _payload_matrix(spec.payload, "x0", sim.dim)
    thetas = [
        sym(np.asarray(t, dtype=float))
        for t in spec.payload.get("thetas", default_theta_battery(sim.dim))
    ]
    z_max = float(spec.payload.get("z_max", 3.0))
    endpoints, stats = sample_wishart_endpoints(sim, x0)
    rows = _moment_rows(endpoints, thetas)
    for row in rows:
        theta = np.asarray(row["theta"])
        analytic = endpoint_laplace_closed_form(theta, x0, sim.delta, sim.epsilon)
        row["analytic"] = analytic
        row["z"] = (row["mean"] - analytic) / row["se"] if row["se"] > 0 else 0.0
    passed = all(abs(row["z"]) <= z_max for row in rows)
    results = {
        "rows": rows,
        "z_max": z_max,
        "max_abs_z": max(abs(row["z"]) for row in rows),
        "sim_stats": stats,
    }
    return _base_report(spec, results, passed)


def run_additivity(spec: ExperimentSpec) -> dict:
    """Sum of independent runs vs a single run with summed parameters."""
    sim = spec.sim
    payload = spec.payload
    delta1 = float(payload.get("delta1", sim.delta))
    delta2 = float(payload.get("delta2", sim.delta))
    x = _payload_matrix(payload, "x", sim.dim)
    y = _payload_matrix(payload, "y", sim.dim)
    thetas = [
        sym(np.asarray(t, dtype=float))
        for t in payload.get("thetas", default_theta_battery(sim.dim))
    ]
    z_max = float(payload.get("z_max", 3.0))
    end1, _ = sample_wishart_endpoints(sim.replace(delta=delta1), x)
    end2, _ = sample_wishart_endpoints(sim.replace(delta=delta2, seed=sim.seed + 1), y)
    end_sum = end1 + end2
    end_joint, _ = sample_wishart_endpoints(
        sim.replace(delta=delta1 + delta2, seed=sim.seed + 2), x + y
    )
    rows_sum = _moment_rows(end_sum, thetas)
    rows_joint = _moment_rows(end_joint, thetas)
    rows = []
    for rs, rj in zip(rows_sum, rows_joint):
        se = float(np.hypot(rs["se"], rj["se"]))
        z = (rs["mean"] - rj["mean"]) / se if se > 0 else 0.0
        rows.append(
            {
                "theta": rs["theta"],
                "mean_sum": rs["mean"],
                "mean_joint": rj["mean"],
                "se_combined": se,
                "z": z,
            }
        )
    passed = all(abs(row["z"]) <= z_max for row in rows)
    results = {
        "rows": rows,
        "z_max": z_max,
        "max_abs_z": max(abs(row["z"]) for row in rows),
        "delta1": delta1,
        "delta2": delta2,
    }
    return _base_report(spec, results, passed)


def build_scan_target(sim: SimConfig, payload: dict) -> MatrixPath:
    """Resolve the ldp_scan target path from its payload description."""
    target = payload.get("target", "zero_rate")
    grid = sim.grid()
    if target == "zero_rate":
        eye = np.eye(sim.dim)
        values = sim.delta * grid[:, None, None] * eye
        return MatrixPath(grid, values)
    if isinstance(target, dict) and "scalar_quadratic" in target:
        if sim.dim != 1:
            raise InputFormatError("scalar_quadratic targets require dim = 1")
        c = float(target["scalar_quadratic"].get("curvature", 0.5))
        if c <= -sim.delta:
            raise InputFormatError(
                f"curvature {c} makes the target leave the positive half-line"
            )
        vals = sim.delta * grid + c * grid * grid
        return MatrixPath(grid, vals[:, None, None])
    if isinstance(target, dict) and "path_file" in target:
        path = pathio.read_matrix_path(target["path_file"])
        if path.grid.size != grid.size or not np.allclose(path.grid, grid, atol=1e-12):
            raise InputFormatError(
                "target path file must be sampled on the run's own grid"
            )
        return path
    raise InputFormatError(f"unrecognised scan target {target!r}")


def _tube_infimum_estimate(sim: SimConfig, payload: dict, radius: float) -> float | None:
    """Parametric upper bound on the smallest action inside the tube.

    Only available for the scalar quadratic family, where every path
    ``delta t + a t^2`` with ``|a - c| <= radius`` stays inside the tube;
    scanning ``a`` gives an upper bound on the tube infimum.
    """
    target = payload.get("target", "zero_rate")
    if target == "zero_rate":
        return 0.0
    if not (isinstance(target, dict) and "scalar_quadratic" in target):
        return None
    c = float(target["scalar_quadratic"].get("curvature", 0.5))
    grid = sim.grid()
    best = None
    for a in np.linspace(c - radius, c + radius, 81):
        if a <= -sim.delta + 1e-9:
            continue
        vals = sim.delta * grid + a * grid * grid
        report = eigenvalue_rate([ScalarPath(grid, vals)], sim.delta)
        if best is None or report.value < best:
            best = report.value
    return best


def run_ldp_scan(spec: ExperimentSpec) -> dict:
    """Tube-probability trend over a decreasing noise schedule."""
    sim = spec.sim
    payload = spec.payload
    radius = float(payload.get("radius", 0.5))
    if radius <= 0:
        raise InputFormatError(f"radius must be positive, got {radius}")
    epsilons = [float(e) for e in payload.get("epsilons", (0.5, 0.35, 0.25))]
    if not epsilons or any(e <= 0 for e in epsilons):
        raise InputFormatError("epsilons must be a nonempty list of positive values")
    if any(b >= a for a, b in zip(epsilons, epsilons[1:])):
        raise InputFormatError("epsilons must be strictly decreasing")
    target = build_scan_target(sim, payload)
    target_report = path_rate(target, sim.delta)
    entries = []
    low_hits_any = False
    for eps in epsilons:
        cfg = sim.replace(epsilon=eps)
        hits, stats = tube_hit_count(cfg, target, radius)
        p_hat = hits / cfg.replicas
        ci = wilson_interval(hits, cfg.replicas)
        log_p = float(np.log(p_hat)) if hits > 0 else None
        low = hits < int(payload.get("low_hits", LOW_HITS_THRESHOLD))
        low_hits_any = low_hits_any or low
        entries.append(
            {
                "epsilon": eps,
                "hits": hits,
                "replicas": cfg.replicas,
                "p_hat": p_hat,
                "wilson_ci": list(ci),
                "log_prob": log_p,
                "scaled_log_prob": (eps * eps * log_p) if log_p is not None else None,
                "low_hits": low,
                "sim_stats": {
                    k: v for k, v in stats.items() if k != "max_deviation_quantiles"
                },
                "max_deviation_quantiles": stats.get("max_deviation_quantiles"),
            }
        )
    valid = [e for e in entries if e["log_prob"] is not None]
    slope = None
    if len(valid) >= 2:
        xs = np.array([1.0 / (e["epsilon"] ** 2) for e in valid])
        ys = np.array([e["log_prob"] for e in valid])
        slope = float(np.polyfit(xs, ys, 1)[0])
    scaled = [e["scaled_log_prob"] for e in entries]
    trend_ok = all(
        (a is None) or (b is not None and b >= a)
        for a, b in zip(scaled, scaled[1:])
    )
    inf_estimate = _tube_infimum_estimate(sim, payload, radius)
    result = LdpScanResult(
        epsilons=epsilons,
        tube_radius=radius,
        hits=[e["hits"] for e in entries],
        log_probs=[e["log_prob"] for e in entries],
        wilson_cis=[e["wilson_ci"] for e in entries],
        scaled_log_probs=scaled,
        slope_estimate=slope,
        target_rate=target_report.value,
        flags={"LOW_HITS": low_hits_any, "TREND_NONDECREASING": trend_ok},
    )
    results = {
        "scan": result.to_dict(),
        "entries": entries,
        "radius": radius,
        "bracket": {"low": -target_report.value, "high": 0.0},
        "tube_infimum_estimate": inf_estimate,
        "target_flags": target_report.flags,
    }
    return _base_report(spec, results, None)


def diagonal_test_path(sim: SimConfig) -> tuple[MatrixPath, list[ScalarPath]]:
    """A smooth diagonal path and its component family, for contraction checks."""
    m = sim.dim
    grid = sim.grid()
    scale = min(1.0, sim.delta / 2.0)
    if m == 1:
        curvatures = np.array([0.45 * scale])
    else:
        curvatures = 0.45 * scale * (1.0 - 2.0 * np.arange(m) / (m - 1))
    comps = [
        ScalarPath(grid, sim.delta * grid + c * grid * grid) for c in curvatures
    ]
    values = np.zeros((grid.size, m, m))
    for i, comp in enumerate(comps):
        values[:, i, i] = comp.values
    return MatrixPath(grid, values), comps


def run_eigen_contract(spec: ExperimentSpec) -> dict:
    """Two-pipeline largest-eigenvalue comparison plus the diagonal identity."""
    sim = spec.sim
    if sim.dim < 2:
        raise InputFormatError("eigen_contract requires dim >= 2")
    ks_max = float(spec.payload.get("ks_max", 0.05))
    endpoints, mat_stats = sample_wishart_endpoints(sim)
    lam_matrix = np.linalg.eigvalsh(endpoints)[:, -1]
    lam_direct_all, eig_stats = sample_eigenvalue_endpoints(
        sim.replace(seed=sim.seed + 1)
    )
    lam_direct = lam_direct_all[:, 0]
    ks = ks_distance(lam_matrix, lam_direct)
    diag_path, comps = diagonal_test_path(sim)
    matrix_report = path_rate(diag_path, sim.delta)
    family_report = eigenvalue_rate(comps, sim.delta)
    diag_gap = abs(matrix_report.value - family_report.value)
    diag_tol = 1e-8 * max(1.0, abs(matrix_report.value))
    passed = (ks <= ks_max) and (diag_gap <= diag_tol)
    results = {
        "ks_distance": ks,
        "ks_max": ks_max,
        "replicas": sim.replicas,
        "matrix_pipeline": {
            "mean_max_eig": float(lam_matrix.mean()),
            "stats": mat_stats,
        },
        "eigen_pipeline": {
            "mean_max_eig": float(lam_direct.mean()),
            "stats": eig_stats,
        },
        "diag_identity": {
            "matrix_action": matrix_report.value,
            "family_action": family_report.value,
            "gap": diag_gap,
            "tolerance": diag_tol,
        },
    }
    return _base_report(spec, results, passed)


def run_rate_eval(spec: ExperimentSpec) -> dict:
    """Evaluate an action functional on a path read from file or payload."""
    sim = spec.sim
    payload = spec.payload
    functional = payload.get("functional", "path")
    if functional == "path":
        if "path_file" in payload:
            path = pathio.read_matrix_path(payload["path_file"])
        elif "path" in payload:
            path = pathio.matrix_path_from_dict(payload["path"])
        else:
            raise InputFormatError("rate_eval needs 'path_file' or 'path' in payload")
        report = path_rate(path, sim.delta)
    elif functional == "max_eigenvalue":
        if "path_file" not in payload:
            raise InputFormatError("max_eigenvalue evaluation needs 'path_file'")
        spath = pathio.read_scalar_path_csv(payload["path_file"])
        report = max_eigenvalue_path_rate(spath, sim.delta, sim.dim)
    else:
        raise InputFormatError(f"unknown functional {functional!r}")
    results = {"functional": functional, "delta": sim.delta, "report": report.to_dict()}
    return _base_report(spec, results, None)


def run_riccati_eval(spec: ExperimentSpec) -> dict:
    """Backward Riccati solve (and optional transform) from a measure file."""
    sim = spec.sim
    payload = spec.payload
    if "measure_file" in payload:
        measure = pathio.read_measure_json(payload["measure_file"])
    elif "measure" in payload:
        measure = pathio.measure_from_dict(payload["measure"])
    else:
        raise InputFormatError("riccati_eval needs 'measure_file' or 'measure'")
    horizon = float(payload.get("horizon", sim.horizon))
    steps = int(payload.get("steps", sim.steps))
    solution = solve_riccati(measure, horizon, steps=steps)
    residual = riccati_residual(solution, measure)
    results = {
        "horizon": horizon,
        "steps": steps,
        "initial_value": solution.initial().tolist(),
        "trace_integral": solution.trace_integral,
        "max_eigenvalue": solution.stats["max_eigenvalue"],
        "residual": residual,
        "residual_scale": 1.0 + measure.total_scale(),
    }
    if "x" in payload:
        x = _payload_matrix(payload, "x", measure.dim)
        results["transform_value"] = laplace_transform(
            measure, x, sim.delta, horizon, steps=steps
        )
    return _base_report(spec, results, None)


_RUNNERS = {
    "laplace_check": run_laplace_check,
    "additivity": run_additivity,
    "ldp_scan": run_ldp_scan,
    "eigen_contract": run_eigen_contract,
    "rate_eval": run_rate_eval,
    "riccati_eval": run_riccati_eval,
}


def run_experiment(spec: ExperimentSpec) -> dict:
    """Dispatch a spec to its runner and return the report dict."""
    return _RUNNERS[spec.kind](spec)
