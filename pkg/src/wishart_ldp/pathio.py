"""File formats: paths and measures on disk, configs, canonical JSON reports.

Formats are deliberately plain:

* matrix paths — CSV with a ``t`` column plus the upper triangle in row-major
  order (``x0_0, x0_1, ..., x1_1, ...``), or JSON with explicit ``grid`` and
  ``values``;
* scalar paths — two-column CSV (``t, value``);
* measures — JSON with ``dim``, an ``atoms`` list, and an optional
  piecewise-constant ``density``;
* reports — canonical JSON (sorted keys, fixed separators) so that reruns of
  a seeded experiment are byte-identical except for the ``timestamp`` field.

Non-finite floats are encoded as the strings ``"inf"``, ``"-inf"``, ``"nan"``
because JSON has no literal for them.
"""

from __future__ import annotations

import csv
import json
import math
import os
from typing import Any

import numpy as np

from .errors import InputFormatError
from .riccati import MatrixMeasure
from .sde import MatrixPath, ScalarPath, SimConfig


def jsonify(obj: Any) -> Any:
    """Convert numpy containers/scalars and non-finite floats to JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonify(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def unjsonify_float(x: Any) -> float:
    if isinstance(x, str):
        if x == "inf":
            return math.inf
        if x == "-inf":
            return -math.inf
        if x == "nan":
            return math.nan
        raise InputFormatError(f"expected a number, got {x!r}")
    return float(x)


def canonical_json(obj: Any) -> str:
    """Deterministic JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(jsonify(obj), sort_keys=True, indent=2, separators=(",", ": ")) + "\n"


def write_report(report: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(report))


def _triangle_columns(dim: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(dim) for j in range(i, dim)]


def write_matrix_path_csv(path: MatrixPath, filename: str) -> None:
    """CSV with the time column and the upper triangle in row-major order."""
    cols = _triangle_columns(path.dim)
    with open(filename, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"x{i}_{j}" for i, j in cols])
        for k in range(path.grid.size):
            row = [repr(float(path.grid[k]))]
            row += [repr(float(path.values[k, i, j])) for i, j in cols]
            writer.writerow(row)


def read_matrix_path_csv(filename: str) -> MatrixPath:
    try:
        with open(filename, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if not header or header[0] != "t":
                raise InputFormatError(
                    f"{filename}: expected header starting with 't', got {header}"
                )
            n_cols = len(header) - 1
            dim = int(round((math.isqrt(8 * n_cols + 1) - 1) / 2))
            if dim * (dim + 1) // 2 != n_cols:
                raise InputFormatError(
                    f"{filename}: {n_cols} matrix columns do not form an upper triangle"
                )
            cols = _triangle_columns(dim)
            grid, mats = [], []
            for ln, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != n_cols + 1:
                    raise InputFormatError(
                        f"{filename}:{ln}: expected {n_cols + 1} fields, got {len(row)}"
                    )
                try:
                    vals = [float(v) for v in row]
                except ValueError as exc:
                    raise InputFormatError(f"{filename}:{ln}: {exc}") from exc
                grid.append(vals[0])
                m_arr = np.zeros((dim, dim))
                for (i, j), v in zip(cols, vals[1:]):
                    m_arr[i, j] = v
                    m_arr[j, i] = v
                mats.append(m_arr)
    except OSError as exc:
        raise InputFormatError(f"cannot read {filename}: {exc}") from exc
    try:
        return MatrixPath(np.asarray(grid), np.asarray(mats))
    except ValueError as exc:
        raise InputFormatError(f"{filename}: {exc}") from exc


def matrix_path_to_dict(path: MatrixPath) -> dict:
    return {
        "grid": path.grid.tolist(),
        "values": path.values.tolist(),
        "stats": jsonify(path.stats),
    }


def matrix_path_from_dict(data: dict, *, where: str = "matrix path") -> MatrixPath:
    try:
        return MatrixPath(
            np.asarray(data["grid"], dtype=float),
            np.asarray(data["values"], dtype=float),
            dict(data.get("stats", {})),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"{where}: {exc}") from exc


def write_matrix_path_json(path: MatrixPath, filename: str) -> None:
    with open(filename, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(matrix_path_to_dict(path)))


def read_matrix_path_json(filename: str) -> MatrixPath:
    return matrix_path_from_dict(_load_json(filename), where=filename)


def read_matrix_path(filename: str) -> MatrixPath:
    """Dispatch on extension: ``.json`` or ``.csv``."""
    if filename.endswith(".json"):
        return read_matrix_path_json(filename)
    return read_matrix_path_csv(filename)


def write_matrix_path(path: MatrixPath, filename: str) -> None:
    if filename.endswith(".json"):
        write_matrix_path_json(path, filename)
    else:
        write_matrix_path_csv(path, filename)


def write_scalar_path_csv(path: ScalarPath, filename: str) -> None:
    with open(filename, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "value"])
        for t, v in zip(path.grid, path.values):
            writer.writerow([repr(float(t)), repr(float(v))])


def read_scalar_path_csv(filename: str) -> ScalarPath:
    try:
        with open(filename, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["t", "value"]:
                raise InputFormatError(
                    f"{filename}: expected header 't,value', got {header}"
                )
            grid, vals = [], []
            for ln, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    grid.append(float(row[0]))
                    vals.append(float(row[1]))
                except (IndexError, ValueError) as exc:
                    raise InputFormatError(f"{filename}:{ln}: {exc}") from exc
    except OSError as exc:
        raise InputFormatError(f"cannot read {filename}: {exc}") from exc
    try:
        return ScalarPath(np.asarray(grid), np.asarray(vals))
    except ValueError as exc:
        raise InputFormatError(f"{filename}: {exc}") from exc


def measure_to_dict(measure: MatrixMeasure) -> dict:
    data: dict = {
        "dim": measure.dim,
        "atoms": [{"time": t, "weight": w.tolist()} for t, w in measure.atoms],
    }
    if measure.density_grid is not None:
        data["density"] = {
            "grid": measure.density_grid.tolist(),
            "values": measure.density_values.tolist(),
        }
    else:
        data["density"] = None
    return data


def measure_from_dict(data: dict, *, where: str = "measure") -> MatrixMeasure:
    try:
        atoms = tuple(
            (float(a["time"]), np.asarray(a["weight"], dtype=float))
            for a in data.get("atoms", [])
        )
        density = data.get("density")
        kwargs: dict = {}
        if density is not None:
            kwargs["density_grid"] = np.asarray(density["grid"], dtype=float)
            kwargs["density_values"] = np.asarray(density["values"], dtype=float)
        return MatrixMeasure(dim=int(data["dim"]), atoms=atoms, **kwargs)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"{where}: {exc}") from exc


def write_measure_json(measure: MatrixMeasure, filename: str) -> None:
    with open(filename, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(measure_to_dict(measure)))


def read_measure_json(filename: str) -> MatrixMeasure:
    return measure_from_dict(_load_json(filename), where=filename)


def _load_json(filename: str) -> dict:
    try:
        with open(filename, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputFormatError(f"cannot read {filename}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"{filename}: invalid JSON ({exc})") from exc


def _load_toml(filename: str) -> dict:
    try:
        import tomllib  # Python >= 3.11
    except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
        import tomli as tomllib
    try:
        with open(filename, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise InputFormatError(f"cannot read {filename}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise InputFormatError(f"{filename}: invalid TOML ({exc})") from exc


_CONFIG_KEYS = {
    "dim", "delta", "epsilon", "horizon", "steps", "replicas", "seed",
    "scheme", "gap_floor",
}
_CONFIG_ALIASES = {"m": "dim", "eps": "epsilon"}


def load_config_file(filename: str) -> dict:
    """Read a simulation config mapping from a JSON or TOML file.

    Accepts the :class:`~wishart_ldp.sde.SimConfig` field names plus the
    short aliases ``m`` (dim) and ``eps`` (epsilon).  Unknown keys are
    rejected with a message naming the offender.
    """
    ext = os.path.splitext(filename)[1].lower()
    if ext == ".toml":
        raw = _load_toml(filename)
    elif ext == ".json":
        raw = _load_json(filename)
    else:
        raise InputFormatError(
            f"{filename}: config files must end in .json or .toml"
        )
    if not isinstance(raw, dict):
        raise InputFormatError(f"{filename}: config must be a key-value table")
    out: dict = {}
    for key, value in raw.items():
        key = _CONFIG_ALIASES.get(key, key)
        if key not in _CONFIG_KEYS:
            raise InputFormatError(
                f"{filename}: unknown config key {key!r} "
                f"(expected one of {sorted(_CONFIG_KEYS)})"
            )
        out[key] = value
    return out


def build_sim_config(file_values: dict | None = None, **overrides) -> SimConfig:
    """Merge config-file values with explicit overrides (overrides win)."""
    merged: dict = dict(file_values or {})
    for key, value in overrides.items():
        if value is not None:
            merged[_CONFIG_ALIASES.get(key, key)] = value
    try:
        return SimConfig(**merged)
    except (TypeError, ValueError) as exc:
        raise InputFormatError(f"invalid simulation config: {exc}") from exc
