"""Periodic grids, discrete Fourier transforms and Fourier multipliers.

The whole space is replaced by the periodic box ``[-L, L)^d``.  Weighted
quantities computed on the box are only meaningful while the field is
concentrated away from the box edge; a workable rule of thumb is to take
``L`` at least four times the effective support radius of the data plus
the distance the dispersive waves travel during the run.

Normalization
-------------
``forward`` applies no factor and ``inverse`` divides by ``n**d`` (the
numpy/scipy "backward" convention).  Coefficients are stored in standard
FFT order, so ``grid.wavenumbers[j][m]`` is the wavenumber of index ``m``
along axis ``j``.  Physical-space integrals are sums times
``spacing**d``, and Parseval reads

    sum(|u|**2) * h**d == sum(|c|**2) * h**d / n**d.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft

__all__ = [
    "Grid",
    "Field",
    "MultiplierSpec",
    "make_grid",
    "forward",
    "inverse",
    "oracle_dft",
    "symbol",
    "apply_multiplier",
    "dealias_mask",
    "fft_workers",
]

ORACLE_MAX_POINTS = 4096


def fft_workers() -> int:
    """Thread count for FFTs, capped by the ``FKDV_THREADS`` variable."""
    value = os.environ.get("FKDV_THREADS")
    if not value:
        return 1
    try:
        return max(1, int(value))
    except ValueError:
        return 1


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on ``[-L, L)^d``."""

    d: int
    n: int
    half_length: float

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError(f"unsupported dimension d={self.d}; expected 1 or 2")
        if int(self.n) != self.n or self.n < 8 or self.n % 2:
            raise ValueError(f"n must be an even integer >= 8, got {self.n}")
        if not self.half_length > 0:
            raise ValueError(f"half_length must be positive, got {self.half_length}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "half_length", float(self.half_length))

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_length / self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    @property
    def size(self) -> int:
        return self.n**self.d

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.d

    @cached_property
    def x1d(self) -> np.ndarray:
        """Node coordinates along one axis, starting at ``-L``."""
        x = -self.half_length + self.spacing * np.arange(self.n)
        x.flags.writeable = False
        return x

    @cached_property
    def k1d(self) -> np.ndarray:
        """Wavenumbers along one axis in FFT order, ``(pi/L) * k``."""
        k = (np.pi / self.half_length) * np.fft.fftfreq(self.n, 1.0 / self.n)
        k.flags.writeable = False
        return k

    @property
    def wavenumbers(self) -> tuple[np.ndarray, ...]:
        return (self.k1d,) * self.d

    @cached_property
    def coords(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays of shape ``grid.shape``, one per axis."""
        out = tuple(np.meshgrid(*([self.x1d] * self.d), indexing="ij"))
        for c in out:
            c.flags.writeable = False
        return out

    @cached_property
    def kgrid(self) -> tuple[np.ndarray, ...]:
        out = tuple(np.meshgrid(*([self.k1d] * self.d), indexing="ij"))
        for c in out:
            c.flags.writeable = False
        return out

    @cached_property
    def kabs(self) -> np.ndarray:
        out = np.sqrt(sum(k**2 for k in self.kgrid))
        out.flags.writeable = False
        return out

    @cached_property
    def radius(self) -> np.ndarray:
        out = np.sqrt(sum(x**2 for x in self.coords))
        out.flags.writeable = False
        return out

    @cached_property
    def nyquist(self) -> tuple[np.ndarray, ...]:
        """Boolean masks marking the Nyquist index along each axis."""
        masks = []
        for j in range(self.d):
            m = np.zeros(self.shape, dtype=bool)
            index = [slice(None)] * self.d
            index[j] = self.n // 2
            m[tuple(index)] = True
            m.flags.writeable = False
            masks.append(m)
        return tuple(masks)

    def integrate(self, values: np.ndarray) -> float:
        return float(np.sum(values) * self.cell_volume)


def make_grid(d: int, n: int, half_length: float) -> Grid:
    """Build a periodic grid on ``[-half_length, half_length)^d``.

    >>> g = make_grid(1, 8, np.pi)
    >>> sorted(g.k1d)
    [-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]
    """
    return Grid(d, n, half_length)


def forward(values: np.ndarray | "Field", grid: Grid | None = None) -> np.ndarray:
    """Unnormalized DFT of real samples (FFT order)."""
    if isinstance(values, Field):
        grid, values = values.grid, values.values
    values = np.asarray(values)
    if grid is not None and values.shape != grid.shape:
        raise ValueError(f"size mismatch: values {values.shape} vs grid {grid.shape}")
    return scipy.fft.fftn(values, workers=fft_workers())


def inverse(coeffs: np.ndarray, grid: Grid) -> "Field":
    """Field whose samples are the real part of the inverse DFT."""
    coeffs = np.asarray(coeffs)
    if coeffs.shape != grid.shape:
        raise ValueError(f"size mismatch: coeffs {coeffs.shape} vs grid {grid.shape}")
    return Field.from_coeffs(grid, coeffs)


def _inverse_values(coeffs: np.ndarray) -> np.ndarray:
    return scipy.fft.ifftn(coeffs, workers=fft_workers()).real


def oracle_dft(values: np.ndarray | "Field") -> np.ndarray:
    """Direct O(N^2) DFT with the same convention as :func:`forward`.

    Only for verification: refuses inputs with more than 4096 points.
    """
    if isinstance(values, Field):
        values = values.values
    values = np.asarray(values, dtype=float)
    if values.size > ORACLE_MAX_POINTS:
        raise ValueError(f"oracle_dft limited to {ORACLE_MAX_POINTS} points, got {values.size}")
    n = values.shape[0]
    j = np.arange(n)
    if values.ndim == 1:
        out = np.empty(n, dtype=complex)
        for k in range(n):
            out[k] = np.sum(values * np.exp(-2j * np.pi * k * j / n))
        return out
    if values.ndim == 2:
        out = np.empty((n, n), dtype=complex)
        j1, j2 = np.meshgrid(j, j, indexing="ij")
        for k1 in range(n):
            for k2 in range(n):
                phase = np.exp(-2j * np.pi * (k1 * j1 + k2 * j2) / n)
                out[k1, k2] = np.sum(values * phase)
        return out
    raise ValueError(f"unsupported array rank {values.ndim}")


@dataclass(frozen=True, eq=False)
class Field:
    """Real samples on a grid together with their DFT coefficients.

    Both arrays are read-only; build new fields instead of mutating.
    """

    grid: Grid
    values: np.ndarray = field(repr=False)
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.values.shape != self.grid.shape or self.coeffs.shape != self.grid.shape:
            raise ValueError("field arrays do not match the grid shape")
        self.values.flags.writeable = False
        self.coeffs.flags.writeable = False

    @classmethod
    def from_values(cls, grid: Grid, values) -> "Field":
        values = np.array(values, dtype=float)
        if values.shape != grid.shape:
            raise ValueError(f"size mismatch: values {values.shape} vs grid {grid.shape}")
        return cls(grid, values, forward(values))

    @classmethod
    def from_coeffs(cls, grid: Grid, coeffs) -> "Field":
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != grid.shape:
            raise ValueError(f"size mismatch: coeffs {coeffs.shape} vs grid {grid.shape}")
        values = _inverse_values(coeffs)
        # round-tripping through the real samples enforces Hermitian symmetry
        return cls(grid, values, forward(values))

    @classmethod
    def from_function(cls, grid: Grid, func) -> "Field":
        return cls.from_values(grid, func(*grid.coords))

    @classmethod
    def zeros(cls, grid: Grid) -> "Field":
        return cls.from_values(grid, np.zeros(grid.shape))

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(self.values**2) * self.grid.cell_volume))

    def integral(self) -> float:
        """Integral over the box, read off the zero Fourier mode."""
        return float(self.coeffs.flat[0].real * self.grid.cell_volume)

    def __add__(self, other: "Field") -> "Field":
        _check_same_grid(self, other)
        return Field.from_values(self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        _check_same_grid(self, other)
        return Field.from_values(self.grid, self.values - other.values)

    def __mul__(self, scalar: float) -> "Field":
        return Field(self.grid, self.values * scalar, self.coeffs * scalar)

    __rmul__ = __mul__

    def reflect(self, axis: int = 0) -> "Field":
        """The field evaluated at the point reflected through ``x_axis = 0``."""
        # node j sits at -L + j h, so -x_j is node (n - j) mod n
        idx = (-np.arange(self.grid.n)) % self.grid.n
        return Field.from_values(self.grid, np.take(self.values, idx, axis=axis))


def _check_same_grid(a: Field, b: Field):
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")


@dataclass(frozen=True)
class MultiplierSpec:
    """A Fourier multiplier.

    ``kind`` is one of ``riesz_potential`` (``|xi|^s``), ``bessel``
    (``<xi>^s``), ``riesz_transform`` (``-i xi_j/|xi|``), ``group_phase``
    (``exp(i t xi_1 |xi|^a)``) or ``derivative`` (``i xi_j``).  Axes are
    0-based.
    """

    kind: str
    s: float = 0.0
    axis: int = 0
    t: float = 0.0
    a: float = 1.0

    KINDS = ("riesz_potential", "bessel", "riesz_transform", "group_phase", "derivative")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown multiplier kind {self.kind!r}; expected one of {self.KINDS}")

    @classmethod
    def riesz_potential(cls, s: float) -> "MultiplierSpec":
        return cls("riesz_potential", s=s)

    @classmethod
    def bessel(cls, s: float) -> "MultiplierSpec":
        return cls("bessel", s=s)

    @classmethod
    def riesz_transform(cls, axis: int = 0) -> "MultiplierSpec":
        return cls("riesz_transform", axis=axis)

    @classmethod
    def group_phase(cls, t: float, a: float) -> "MultiplierSpec":
        return cls("group_phase", t=t, a=a)

    @classmethod
    def derivative(cls, axis: int = 0) -> "MultiplierSpec":
        return cls("derivative", axis=axis)


def riesz_symbol(grid: Grid, s: float) -> np.ndarray:
    """``|xi|^s`` with the zero mode set to 0 (for ``s != 0``)."""
    if s == 0:
        return np.ones(grid.shape)
    k = grid.kabs
    out = np.zeros(grid.shape)
    nz = k > 0
    out[nz] = k[nz] ** s
    return out


def odd_wavenumber(grid: Grid, axis: int) -> np.ndarray:
    """``xi_axis`` with the Nyquist entry zeroed, so odd symbols stay real-compatible."""
    if not 0 <= axis < grid.d:
        raise ValueError(f"axis {axis} out of range for d={grid.d}")
    k = np.array(grid.kgrid[axis])
    k[grid.nyquist[axis]] = 0.0
    return k


def dispersion_symbol(grid: Grid, a: float) -> np.ndarray:
    """Real symbol ``xi_1 |xi|^a`` of the linear flow (times ``i``)."""
    return odd_wavenumber(grid, 0) * riesz_symbol(grid, a)


def symbol(grid: Grid, spec: MultiplierSpec) -> np.ndarray:
    kind = spec.kind
    if kind == "riesz_potential":
        out = riesz_symbol(grid, spec.s)
    elif kind == "bessel":
        out = (1.0 + grid.kabs**2) ** (spec.s / 2.0)
    elif kind == "riesz_transform":
        k = grid.kabs
        kj = odd_wavenumber(grid, spec.axis)
        out = np.zeros(grid.shape, dtype=complex)
        nz = k > 0
        out[nz] = -1j * kj[nz] / k[nz]
    elif kind == "group_phase":
        out = np.exp(1j * spec.t * dispersion_symbol(grid, spec.a))
    else:
        out = 1j * odd_wavenumber(grid, spec.axis)
    assert not np.any(np.isnan(out)), "NaN in multiplier symbol"
    return out


def apply_multiplier(f: Field, spec: MultiplierSpec) -> Field:
    """Multiply the coefficients of ``f`` by the symbol of ``spec``.

    For a negative-order Riesz potential the zero mode is projected out.
    """
    return Field.from_coeffs(f.grid, f.coeffs * symbol(f.grid, spec))


def dealias_mask(grid: Grid, fraction: float = 2.0 / 3.0) -> np.ndarray:
    """0/1 mask keeping ``|k| <= fraction * n/2`` along every axis.

    ``fraction = 1`` keeps every mode; anything smaller also drops Nyquist.
    """
    if not 0 < fraction <= 1:
        raise ValueError(f"dealias fraction must lie in (0, 1], got {fraction}")
    if fraction == 1:
        return np.ones(grid.shape)
    index = np.abs(np.fft.fftfreq(grid.n, 1.0 / grid.n))
    keep = index <= fraction * grid.n / 2
    keep[grid.n // 2] = False
    mask = keep.astype(float)
    if grid.d == 2:
        mask = np.multiply.outer(mask, mask)
    return mask
