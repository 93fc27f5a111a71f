"""Snapshots, configuration trees and initial-data construction.

Binary snapshot layout (little-endian)::

    offset  size  field
    0       4     magic b"FKDV"
    4       4     format version (uint32, currently 1)
    8       4     dimension d (uint32)
    12      4     points per axis n (uint32)
    16      8     half-length L (float64)
    24      8     dispersion exponent a (float64)
    32      8n^d  samples (float64, C order, axis 0 = x1)

Configuration files are YAML mappings.  Every section has a fixed key
set; unknown keys are rejected so typos fail loudly, and missing keys are
reported by their dotted path (``model.a``).
"""

from __future__ import annotations

import hashlib
import struct
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import yaml

from .propagator import ModelParams, StepperConfig
from .spectral import Field, Grid, make_grid

__all__ = [
    "SNAPSHOT_MAGIC",
    "SNAPSHOT_VERSION",
    "HEADER",
    "ConfigError",
    "write_snapshot",
    "read_snapshot",
    "load_yaml",
    "config_hash",
    "check_keys",
    "require",
    "parse_model",
    "parse_grid",
    "parse_stepper",
    "build_data",
]

SNAPSHOT_MAGIC = b"FKDV"
SNAPSHOT_VERSION = 1
HEADER = struct.Struct("<4sIIIdd")


class ConfigError(ValueError):
    """Malformed configuration: missing, unknown or invalid keys."""


def write_snapshot(path, u: Field, a: float) -> None:
    g = u.grid
    header = HEADER.pack(SNAPSHOT_MAGIC, SNAPSHOT_VERSION, g.d, g.n, float(g.half_length), float(a))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(u.values, dtype="<f8").tobytes())


def read_snapshot(path) -> tuple[Field, float]:
    """Return ``(field, a)`` from a snapshot file."""
    raw = Path(path).read_bytes()
    if len(raw) < HEADER.size:
        raise ValueError(f"{path}: truncated header")
    magic, version, d, n, L, a = HEADER.unpack_from(raw)
    if magic != SNAPSHOT_MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != SNAPSHOT_VERSION:
        raise ValueError(f"{path}: unsupported snapshot version {version}")
    grid = make_grid(d, n, L)
    expected = HEADER.size + 8 * grid.size
    if len(raw) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, found {len(raw)}")
    vals = np.frombuffer(raw, dtype="<f8", offset=HEADER.size).reshape(grid.shape)
    return Field.from_values(grid, vals.astype(float)), a


def load_yaml(path) -> tuple[dict, str]:
    """Parse a config file; returns the tree and the sha256 of its bytes."""
    try:
        raw = Path(path).read_bytes()
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err.strerror}") from err
    try:
        tree = yaml.safe_load(raw)
    except yaml.YAMLError as err:
        raise ConfigError(f"{path}: invalid YAML: {err}") from err
    if tree is None:
        tree = {}
    if not isinstance(tree, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return tree, hashlib.sha256(raw).hexdigest()


def config_hash(tree: Mapping) -> str:
    """Hash of a canonical dump, for configs that never touched disk."""
    text = yaml.safe_dump(_plain(tree), sort_keys=True)
    return hashlib.sha256(text.encode()).hexdigest()


def _plain(obj):
    if isinstance(obj, Mapping):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def check_keys(section: Any, path: str, required=(), optional=()) -> dict:
    """Validate one mapping: all ``required`` present, nothing outside ``required + optional``."""
    if not isinstance(section, Mapping):
        raise ConfigError(f"{path or 'config'} must be a mapping")
    allowed = set(required) | set(optional)
    unknown = sorted(set(section) - allowed)
    if unknown:
        names = ", ".join(_join(path, k) for k in unknown)
        raise ConfigError(f"unknown key(s): {names}; allowed: {', '.join(sorted(allowed))}")
    for key in required:
        if key not in section:
            raise ConfigError(f"missing key: {_join(path, key)}")
    return dict(section)


def require(tree: Mapping, key: str, path: str = ""):
    if key not in tree:
        raise ConfigError(f"missing key: {_join(path, key)}")
    return tree[key]


def _join(path: str, key) -> str:
    return f"{path}.{key}" if path else str(key)


def _wrap(path: str, func, *args, **kwargs):
    try:
        return func(*args, **kwargs)
    except (TypeError, ValueError) as err:
        if isinstance(err, ConfigError):
            raise
        raise ConfigError(f"{path}: {err}") from err


def parse_model(tree: Mapping, path: str = "model", need_nonlinearity: bool = True) -> ModelParams:
    required = ("a", "nonlinearities") if need_nonlinearity else ("a",)
    sec = check_keys(tree, path, required, ("d", "nonlinearities"))
    nl = sec.get("nonlinearities", [[2, 1]])
    if not isinstance(nl, list):
        raise ConfigError(f"{path}.nonlinearities must be a list of [k, nu] pairs")
    pairs = []
    for i, item in enumerate(nl):
        if isinstance(item, Mapping):
            item = check_keys(item, f"{path}.nonlinearities[{i}]", ("k", "nu"))
            item = (item["k"], item["nu"])
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise ConfigError(f"{path}.nonlinearities[{i}] must be [k, nu]")
        pairs.append((item[0], item[1]))
    return _wrap(path, ModelParams, a=float(sec["a"]), nonlinearities=tuple(pairs), d=int(sec.get("d", 1)))


def parse_grid(tree: Mapping, d: int, path: str = "grid") -> Grid:
    sec = check_keys(tree, path, ("n", "half_length"))
    return _wrap(path, make_grid, d, int(sec["n"]), _number(sec["half_length"], f"{path}.half_length"))


def parse_stepper(tree: Mapping, path: str = "stepper") -> StepperConfig:
    sec = check_keys(tree, path, ("dt", "t_end"),
                     ("scheme", "dealias_fraction", "record_every", "max_amplitude"))
    kwargs = {k: sec[k] for k in sec}
    for key in ("dt", "t_end", "dealias_fraction", "max_amplitude"):
        if key in kwargs:
            kwargs[key] = _number(kwargs[key], f"{path}.{key}")
    return _wrap(path, StepperConfig, **kwargs)


def _number(value, path: str) -> float:
    if isinstance(value, str):
        # YAML 1.1 reads "1e-3" as a string; accept numeric strings
        try:
            return float(value)
        except ValueError:
            raise ConfigError(f"{path} must be a number, got {value!r}") from None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path} must be a number, got {value!r}")
    return float(value)


_DATA_KEYS = {
    "gaussian": ((), ("center", "width", "amplitude")),
    "derivative_gaussian": ((), ("axis", "center", "width", "amplitude")),
    "groundstate": ((), ("c", "tol", "max_iter")),
    "file": (("path",), ()),
    "zero": ((), ()),
}


def build_data(tree: Mapping, grid: Grid, params: ModelParams, path: str = "data",
               base_dir: Path | None = None) -> Field:
    """Initial data from a ``data`` section.

    ``gaussian``: ``amplitude * exp(-|x - center|^2 / width^2)``;
    ``derivative_gaussian``: ``amplitude * d/dx_axis`` of that Gaussian;
    ``groundstate``: Petviashvili profile at speed ``c`` on the grid;
    ``file``: a binary snapshot on a matching grid; ``zero``: zero data.
    """
    if not isinstance(tree, Mapping):
        raise ConfigError(f"{path} must be a mapping")
    kind = require(tree, "kind", path)
    if kind not in _DATA_KEYS:
        raise ConfigError(f"{path}.kind must be one of {', '.join(sorted(_DATA_KEYS))}, got {kind!r}")
    req, opt = _DATA_KEYS[kind]
    sec = check_keys(tree, path, ("kind",) + req, opt)
    if kind in ("gaussian", "derivative_gaussian"):
        center = sec.get("center", [0.0] * grid.d)
        center = [center] if not isinstance(center, (list, tuple)) else list(center)
        if len(center) != grid.d:
            raise ConfigError(f"{path}.center needs {grid.d} entries")
        center = [_number(c, f"{path}.center") for c in center]
        width = _number(sec.get("width", 1.0), f"{path}.width")
        amp = _number(sec.get("amplitude", 1.0), f"{path}.amplitude")
        if width <= 0:
            raise ConfigError(f"{path}.width must be positive")
        shifted = [x - c for x, c in zip(grid.coords, center)]
        gauss = np.exp(-sum(s**2 for s in shifted) / width**2)
        if kind == "gaussian":
            return Field.from_values(grid, amp * gauss)
        axis = int(sec.get("axis", 0))
        if not 0 <= axis < grid.d:
            raise ConfigError(f"{path}.axis must be below d={grid.d}")
        return Field.from_values(grid, amp * (-2.0 * shifted[axis] / width**2) * gauss)
    if kind == "groundstate":
        from .groundstate import petviashvili_solve

        c = _number(sec.get("c", 1.0), f"{path}.c")
        single = ModelParams(a=params.a, nonlinearities=params.nonlinearities[:1], d=params.d)
        res = _wrap(path, petviashvili_solve, single, c, grid=grid,
                    tol=_number(sec.get("tol", 1e-10), f"{path}.tol"),
                    max_iter=int(sec.get("max_iter", 500)))
        if not res.converged:
            raise ConfigError(f"{path}: ground state did not converge ({res.message or 'residual too large'})")
        return res.Q
    if kind == "zero":
        return Field.zeros(grid)
    file_path = Path(sec["path"])
    if base_dir is not None and not file_path.is_absolute():
        file_path = base_dir / file_path
    try:
        u, _ = read_snapshot(file_path)
    except (OSError, ValueError) as err:
        raise ConfigError(f"{path}.path: {err}") from err
    if u.grid != grid:
        raise ConfigError(f"{path}.path: snapshot grid {u.grid} does not match {grid}")
    return u
