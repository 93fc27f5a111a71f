"""Measured functionals of fields and trajectories.

All integrals are box quadratures (sum times ``spacing**d``).  On the
periodic box the polynomial weight ``<x>^r`` and the moments are the
box-restricted versions; they are trustworthy only while the field is
negligible near the box faces (see :func:`edge_ratio`).
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import gamma as gamma_fn

from .propagator import ModelParams
from .spectral import Field, Grid, _inverse_values, dealias_mask, forward, odd_wavenumber

__all__ = [
    "DiagnosticRecord",
    "MomentSpec",
    "TruncationWarning",
    "TailFit",
    "SymbolBoundReport",
    "DecayGain",
    "weighted_l2_norm",
    "moment",
    "moment_indices",
    "conservation",
    "sobolev_norm",
    "homogeneous_norm",
    "stein_derivative",
    "stein_norm",
    "stein_constant",
    "stein_phase_value",
    "symbol_stein_check",
    "tail_exponent_fit",
    "regularity_thresholds",
    "decay_gain",
    "momentum_residual",
    "box_flux",
    "edge_ratio",
    "make_record",
    "CSV_PRECISION",
    "write_records_csv",
]

CSV_PRECISION = 17
SUPER_POLYNOMIAL_RESIDUAL = 0.05


class TruncationWarning(UserWarning):
    """The field is not negligible at the box faces; moments are unreliable."""


@dataclass(frozen=True)
class MomentSpec:
    """Vanishing moments ``int x^beta f = 0`` for all ``|beta| <= m - 1``."""

    m: int

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be an integer >= 1, got {self.m}")

    def indices(self, d: int):
        return [beta for order in range(self.m) for beta in moment_indices(d, order)]

    def residuals(self, u: Field) -> dict:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            return {beta: moment(u, beta) for beta in self.indices(u.grid.d)}


@dataclass
class DiagnosticRecord:
    """Snapshot of invariants and norms at time ``t``.

    ``moments`` maps multi-indices with ``|beta| <= 2`` to box moments,
    ``power_integrals`` maps each nonlinear power ``k`` to ``int u^k``,
    and ``box_flux`` is the integration-by-parts defect of the first
    moment on the periodic box (zero on the whole space).
    """

    t: float
    I1: float
    I2: float
    I3: float
    moments: dict
    weighted_norms: dict
    sobolev: dict
    sup_norm: float
    power_integrals: dict = field(default_factory=dict)
    box_flux: float = 0.0
    edge_ratio: float = 0.0

    def columns(self) -> list[str]:
        cols = ["t", "I1", "I2", "I3", "sup_norm"]
        cols += [f"M{list(beta)}".replace(" ", "") for beta in sorted(self.moments)]
        cols += [f"P[{k}]" for k in sorted(self.power_integrals)]
        cols += ["box_flux", "edge_ratio"]
        cols += [f"W[{r:g}]" for r in sorted(self.weighted_norms)]
        cols += [f"S[{s:g}]" for s in sorted(self.sobolev)]
        return cols

    def values(self) -> list[float]:
        vals = [self.t, self.I1, self.I2, self.I3, self.sup_norm]
        vals += [self.moments[b] for b in sorted(self.moments)]
        vals += [self.power_integrals[k] for k in sorted(self.power_integrals)]
        vals += [self.box_flux, self.edge_ratio]
        vals += [self.weighted_norms[r] for r in sorted(self.weighted_norms)]
        vals += [self.sobolev[s] for s in sorted(self.sobolev)]
        return [float(v) for v in vals]

    def csv_row(self) -> str:
        return ",".join(f"{v:.{CSV_PRECISION}g}" for v in self.values())


def write_records_csv(path, records: Sequence[DiagnosticRecord]):
    """One header row, then one row per record (17 significant digits)."""
    with open(path, "w", newline="\n") as fh:
        if not records:
            fh.write("t,I1,I2,I3,sup_norm\n")
            return
        fh.write(",".join(records[0].columns()) + "\n")
        for rec in records:
            fh.write(rec.csv_row() + "\n")


def _check_order(beta, d):
    beta = tuple(int(b) for b in np.atleast_1d(beta))
    if len(beta) != d or any(b < 0 for b in beta):
        raise ValueError(f"multi-index {beta} invalid for d={d}")
    return beta


def moment_indices(d: int, order: int):
    """All multi-indices of length ``d`` with ``|beta| == order``."""
    return [beta for beta in itertools.product(range(order + 1), repeat=d) if sum(beta) == order]


def edge_ratio(u: Field, layer: int = 2) -> float:
    """``max |u|`` over the outer ``layer`` nodes of the box, relative to ``max |u|``."""
    sup = np.max(np.abs(u.values))
    if sup == 0:
        return 0.0
    n = u.grid.n
    near = np.zeros(n, dtype=bool)
    near[:layer] = True
    near[n - layer:] = True
    if u.grid.d == 1:
        edge = near
    else:
        edge = near[:, None] | near[None, :]
    return float(np.max(np.abs(u.values[edge])) / sup)


def weighted_l2_norm(u: Field, r: float) -> float:
    """``||<x>^r u||_{L^2}`` over the box."""
    if r < 0:
        raise ValueError(f"weight exponent must be >= 0, got {r}")
    g = u.grid
    w = (1.0 + g.radius**2) ** r
    return float(np.sqrt(np.sum(w * u.values**2) * g.cell_volume))


def moment(u: Field, beta, warn_tol: float = 1e-10) -> float:
    """Box quadrature of ``x^beta u``; warns when ``u`` reaches the box faces."""
    g = u.grid
    beta = _check_order(beta, g.d)
    if sum(beta) > 4:
        raise ValueError("moments with |beta| > 4 are dominated by box truncation")
    if edge_ratio(u) > warn_tol:
        warnings.warn(f"field is not negligible at the box faces; moment {beta} is unreliable",
                      TruncationWarning, stacklevel=2)
    weight = np.ones(g.shape)
    for x, b in zip(g.coords, beta):
        if b:
            weight = weight * x**b
    return float(np.sum(weight * u.values) * g.cell_volume)


def _parseval_sum(grid: Grid, weights, coeffs) -> float:
    return float(np.sum(weights * np.abs(coeffs) ** 2) * grid.cell_volume / grid.size)


def homogeneous_norm(u: Field, s: float) -> float:
    """``||D^s u||_{L^2}`` by Parseval (zero mode dropped for ``s != 0``)."""
    g = u.grid
    w = np.where(g.kabs > 0, g.kabs, 0.0) ** (2 * s) if s != 0 else np.ones(g.shape)
    return math.sqrt(_parseval_sum(g, w, u.coeffs))


def sobolev_norm(u: Field, s: float) -> float:
    """``||J^s u||_{L^2}`` with ``<xi> = (1 + |xi|^2)^{1/2}``."""
    if s < 0:
        raise ValueError(f"sobolev order must be >= 0, got {s}")
    g = u.grid
    return math.sqrt(_parseval_sum(g, (1.0 + g.kabs**2) ** s, u.coeffs))


def conservation(u: Field, params: ModelParams) -> tuple[float, float, float]:
    """``(I1, I2, I3)``: total integral, ``L^2`` mass and energy.

    ``I1`` is the full integral (zero Fourier mode); the energy carries one
    potential term ``nu/(k(k+1)) int u^{k+1}`` per nonlinearity.
    """
    g = u.grid
    I1 = float(u.coeffs.flat[0].real * g.cell_volume)
    I2 = _parseval_sum(g, np.ones(g.shape), u.coeffs)
    kinetic = 0.5 * homogeneous_norm(u, params.a / 2) ** 2
    potential = sum(nu / (k * (k + 1)) * g.integrate(u.values ** (k + 1))
                    for k, nu in params.nonlinearities)
    return I1, I2, kinetic - potential


def _flux_values(u: Field, params: ModelParams, mask, scale: float) -> np.ndarray:
    """Flux ``F`` with ``u_t = d_1 F`` for the semi-discrete equation."""
    g = u.grid
    disp = np.where(g.kabs > 0, g.kabs, 0.0) ** params.a
    F = _inverse_values(u.coeffs * disp)
    if scale:
        ud = _inverse_values(u.coeffs * mask)
        nl = sum((nu / k) * ud**k for k, nu in params.nonlinearities)
        F = F - scale * _inverse_values(forward(nl) * mask)
    return F


def box_flux(u: Field, params: ModelParams, dealias_fraction: float = 2.0 / 3.0,
             nonlinear_scale: float = 1.0) -> float:
    """``int x_1 d_1F + int F`` on the box, for the flux ``F`` of the equation.

    On the whole space this vanishes by integration by parts; on the
    periodic box it is the boundary contribution, roughly ``2 L F(L)``,
    that separates ``d/dt int x_1 u`` from ``sum nu_j/k_j int u^{k_j}``.
    """
    g = u.grid
    mask = dealias_mask(g, dealias_fraction)
    F = _flux_values(u, params, mask, nonlinear_scale)
    dF = _inverse_values(forward(F) * 1j * odd_wavenumber(g, 0))
    return g.integrate(g.coords[0] * dF) + g.integrate(F)


def make_record(u: Field, params: ModelParams, t: float, weights: Sequence[float] = (0.0, 1.0),
                sobolev_orders: Sequence[float] = (0.0, 1.0), stepper=None) -> DiagnosticRecord:
    I1, I2, I3 = conservation(u, params)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        moments = {beta: moment(u, beta) for order in range(3)
                   for beta in moment_indices(u.grid.d, order)}
    powers = {k: u.grid.integrate(u.values**k) for k, _ in params.nonlinearities}
    if stepper is not None:
        mask, scale = stepper.mask, stepper.nonlinear_scale
    else:
        mask, scale = dealias_mask(u.grid), 1.0
    F = _flux_values(u, params, mask, scale)
    g = u.grid
    dF = _inverse_values(forward(F) * 1j * odd_wavenumber(g, 0))
    flux = g.integrate(g.coords[0] * dF) + g.integrate(F)
    return DiagnosticRecord(
        t=float(t), I1=I1, I2=I2, I3=I3, moments=moments,
        weighted_norms={float(r): weighted_l2_norm(u, r) for r in weights},
        sobolev={float(s): sobolev_norm(u, s) for s in sobolev_orders},
        sup_norm=float(np.max(np.abs(u.values))),
        power_integrals=powers, box_flux=flux, edge_ratio=edge_ratio(u),
    )


def _time_derivative(values: np.ndarray, dt: float) -> tuple[np.ndarray, slice]:
    """Centered differences: five-point where possible, else three-point."""
    if len(values) >= 5:
        d = (-values[4:] + 8 * values[3:-1] - 8 * values[1:-3] + values[:-4]) / (12 * dt)
        return d, slice(2, -2)
    d = (values[2:] - values[:-2]) / (2 * dt)
    return d, slice(1, -1)


def momentum_residual(records: Sequence[DiagnosticRecord], params: ModelParams,
                      box_corrected: bool = False, nonlinear_scale: float = 1.0) -> float:
    """Largest defect of the first-moment identities along a trajectory.

    Checks ``d/dt int x_1 u = sum_j nu_j/k_j int u^{k_j}`` and
    ``d/dt int x_j u = 0`` for ``j >= 2`` at interior record times.  With
    ``box_corrected`` the recorded periodic-box boundary flux is added to
    the right-hand side of the first identity.  ``nonlinear_scale`` must
    match the one the trajectory was run with (0 for the free flow).
    """
    if len(records) < 3:
        raise ValueError("momentum_residual needs at least 3 records")
    t = np.array([r.t for r in records])
    steps = np.diff(t)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
        raise ValueError("records must be equally spaced in time")
    dt = steps[0]
    d = len(next(iter(records[0].moments)))
    worst = 0.0
    for j in range(d):
        beta = tuple(1 if i == j else 0 for i in range(d))
        m = np.array([r.moments[beta] for r in records])
        deriv, inner = _time_derivative(m, dt)
        if j == 0:
            rhs = nonlinear_scale * np.array([sum(nu / k * r.power_integrals[k] for k, nu in params.nonlinearities)
                            for r in records])
            if box_corrected:
                rhs = rhs + np.array([r.box_flux for r in records])
            deriv = deriv - rhs[inner]
        worst = max(worst, float(np.max(np.abs(deriv))))
    return worst


# ---------------------------------------------------------------------------
# Stein derivative


def stein_constant(d: int, b: float) -> float:
    """``C(d, b)`` with ``||D^b f||^2 C = ||Stein_b f||^2`` on the whole space.

    ``C = int |1 - e^{i z_1}|^2 |z|^{-d-2b} dz``; for ``d = 1, b = 1/2`` it
    equals ``2 pi``.
    """
    if not 0 < b < 1:
        raise ValueError(f"b must lie in (0, 1), got {b}")
    # one-dimensional factor: int_R (2 - 2 cos z) |z|^{-1-2b} dz
    c1 = 2.0 * math.pi / (gamma_fn(1 + 2 * b) * math.sin(math.pi * b))
    if d == 1:
        return c1
    # integrating out the transverse variables
    return c1 * math.pi ** ((d - 1) / 2) * gamma_fn(b + 0.5) / gamma_fn(b + d / 2)


def _core_constant(d: int, b: float, h: float) -> float:
    """``int_{|z|<rho} (e.z)^2 |z|^{-d-2b} dz`` for a ball with the cell's volume."""
    if d == 1:
        rho = h / 2
        sphere = 2.0
    else:
        rho = h / math.sqrt(math.pi)
        sphere = 2.0 * math.pi
    return sphere / d * rho ** (2 - 2 * b) / (2 - 2 * b)


def _gradient_sq(f: Field) -> np.ndarray:
    g = f.grid
    out = np.zeros(g.shape)
    for j in range(g.d):
        out += _inverse_values(f.coeffs * 1j * odd_wavenumber(g, j)) ** 2
    return out


def _target_indices(f: Field, x):
    g = f.grid
    if x is None:
        return np.arange(g.size)
    pts = np.atleast_2d(np.asarray(x, dtype=float).reshape(-1, g.d))
    idx = np.rint((pts + g.half_length) / g.spacing).astype(int)
    if np.any(np.abs(-g.half_length + idx * g.spacing - pts) > 1e-9 * g.spacing) or \
            np.any(idx < 0) or np.any(idx >= g.n):
        raise ValueError("stein_derivative points must be grid nodes")
    return np.ravel_multi_index(tuple(idx.T), g.shape)


def stein_derivative(f: Field, b: float, x=None, exterior: bool = False) -> np.ndarray:
    """Pointwise ``(int |f(x)-f(y)|^2 / |x-y|^{d+2b} dy)^{1/2}`` on the box.

    ``x`` is a sequence of grid nodes (coordinates); ``None`` means every
    node.  The rectangle rule skips the node's own cell and replaces it by
    ``|grad f(x)|^2`` times the exact integral of ``(e.z)^2|z|^{-d-2b}``
    over a ball of the same volume.  Contributions from outside the box
    are omitted unless ``exterior`` is set (one dimension only), in which
    case ``f`` is taken to vanish outside and ``|f(x)|^2`` times the
    exterior kernel mass is added.
    """
    if not 0 < b < 1:
        raise ValueError(f"b must lie in (0, 1), got {b}")
    g = f.grid
    if exterior and g.d != 1:
        raise ValueError("exterior correction is implemented for d = 1 only")
    targets = _target_indices(f, x)
    vals = f.values.ravel()
    pts = np.stack([c.ravel() for c in g.coords], axis=1)
    grad2 = _gradient_sq(f).ravel()
    core = _core_constant(g.d, b, g.spacing)
    out = np.empty(len(targets))
    chunk = max(1, 4_000_000 // g.size)
    for start in range(0, len(targets), chunk):
        tg = targets[start:start + chunk]
        diff = vals[tg, None] - vals[None, :]
        dist2 = np.sum((pts[tg, None, :] - pts[None, :, :]) ** 2, axis=-1)
        dist2[np.arange(len(tg)), tg] = 1.0
        kern = dist2 ** (-(g.d + 2 * b) / 2)
        kern[np.arange(len(tg)), tg] = 0.0
        out[start:start + chunk] = np.sum(diff**2 * kern, axis=1) * g.cell_volume + grad2[tg] * core
    if exterior:
        # the last cell ends half a spacing beyond the outermost node
        xt = pts[targets, 0]
        lo = xt + g.half_length + g.spacing / 2
        hi = g.half_length - g.spacing / 2 - xt
        out += vals[targets] ** 2 * (lo ** (-2 * b) + hi ** (-2 * b)) / (2 * b)
    return np.sqrt(out)


def stein_norm(f: Field, b: float, exterior: bool = False) -> float:
    """``L^2`` norm of :func:`stein_derivative` over the box.

    With ``exterior`` (one dimension) the points outside the box are
    included too; there the derivative only sees ``f`` inside, and the
    total of that part equals the exterior term already added inside.
    """
    s = stein_derivative(f, b, exterior=exterior)
    total = np.sum(s**2)
    if exterior:
        g = f.grid
        x = g.x1d
        lo = x + g.half_length + g.spacing / 2
        hi = g.half_length - g.spacing / 2 - x
        total += np.sum(f.values**2 * (lo ** (-2 * b) + hi ** (-2 * b)) / (2 * b))
    return float(np.sqrt(total * f.grid.cell_volume))


# ---------------------------------------------------------------------------
# Stein derivative of the group's phase function (one dimension)

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def _panel_quadrature(func, edges):
    lo, hi = edges[:-1], edges[1:]
    mid, half = (hi + lo) / 2, (hi - lo) / 2
    nodes = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    return float(np.sum(func(nodes) * (half[:, None] * _GL_WEIGHTS[None, :])))


def stein_phase_value(t: float, a: float, b: float, xi: float, reach: float = 200.0) -> float:
    """Stein derivative of ``g(x) = exp(i t x |x|^a)`` at the point ``xi``.

    Quadrature on ``|x - xi| < reach`` with geometric panels near the
    diagonal; beyond ``reach`` the oscillating part averages out and
    ``|g(x)-g(y)|^2`` is replaced by its mean value 2.
    """
    if t == 0:
        return 0.0
    phase = lambda y: t * y * np.abs(y) ** a  # noqa: E731
    p0 = phase(xi)
    slope = abs(t) * (1 + a) * (abs(xi) + reach) ** a
    local = abs(t) * (1 + a) * max(abs(xi), 1.0) ** a
    h0 = min(1.0, 0.5 / local)
    near = h0 * 2.0 ** -np.arange(60, -1, -1.0)
    near = np.concatenate([[0.0], near])
    width = min(0.25, 0.5 / slope)
    far = np.linspace(h0, reach, int(math.ceil((reach - h0) / width)) + 1)
    total = 0.0
    for sign in (1.0, -1.0):
        integrand = lambda h: (2 - 2 * np.cos(phase(xi + sign * h) - p0)) * h ** (-1 - 2 * b)  # noqa: E731
        total += _panel_quadrature(integrand, near) + _panel_quadrature(integrand, far)
    total += 2 * reach ** (-2 * b) / b
    return math.sqrt(total)


@dataclass
class SymbolBoundReport:
    t_values: list
    xi_values: list
    a: float
    b: float
    values: np.ndarray
    ratios: np.ndarray
    max_ratio: float
    t_exponent: float
    xi_exponent: float
    bound: float
    passed: bool


def _slope(x, y) -> float:
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def symbol_stein_check(t_values=(1.0, 2.0, 4.0, 8.0), a: float = 0.5, b: float = 0.5,
                       xi_values=(2.0, 4.0, 8.0, 16.0), bound: float = 10.0,
                       slack: float = 0.1) -> SymbolBoundReport:
    """Test ``Stein_b(e^{itx|x|^a})(xi) <~ <t>^b <xi>^{ab}`` on sample points.

    Fits the growth exponent in ``t`` (worst ``xi``, normalized by
    ``<xi>^{ab}``) and in ``xi`` (worst ``t``, normalized by ``<t>^b``).
    Passes when both exponents are within ``slack`` of ``b`` and ``ab``
    and the normalized ratio stays below ``bound``.
    """
    if not (0 < a < 1 and 0 < b < 1):
        raise ValueError(f"need 0 < a < 1 and 0 < b < 1, got a={a}, b={b}")
    t_arr = np.asarray(t_values, dtype=float)
    xi_arr = np.asarray(xi_values, dtype=float)
    vals = np.array([[stein_phase_value(t, a, b, xi) for xi in xi_arr] for t in t_arr])
    tw = (1 + t_arr**2) ** (b / 2)
    xw = (1 + xi_arr**2) ** (a * b / 2)
    ratios = vals / (tw[:, None] * xw[None, :])
    t_exp = _slope(t_arr, np.max(vals / xw[None, :], axis=1)) if len(t_arr) > 1 else float("nan")
    xi_exp = _slope(xi_arr, np.max(vals / tw[:, None], axis=0)) if len(xi_arr) > 1 else float("nan")
    max_ratio = float(np.max(ratios))
    passed = bool(max_ratio <= bound and t_exp <= b + slack and xi_exp <= a * b + slack)
    return SymbolBoundReport(list(t_arr), list(xi_arr), a, b, vals, ratios, max_ratio,
                             t_exp, xi_exp, bound, passed)


# ---------------------------------------------------------------------------
# Tails and threshold algebra


@dataclass
class TailFit:
    """Power-law fit ``|u| ~ A |x|^{-exponent}`` on a radial window."""

    exponent: float
    residual: float
    ok: bool = True
    super_polynomial: bool = False
    message: str = ""
    radii: np.ndarray | None = field(default=None, repr=False)
    profile: np.ndarray | None = field(default=None, repr=False)

    def __iter__(self):
        yield self.exponent
        yield self.residual


def radial_profile(u: Field, window: tuple[float, float]):
    """Bin-averaged samples of ``u`` by ``|x|`` in bins of width ``2*spacing``."""
    g = u.grid
    lo, hi = window
    width = 2 * g.spacing
    edges = np.arange(lo, hi + width / 2, width)
    r = g.radius.ravel()
    v = u.values.ravel()
    sel = (r >= edges[0]) & (r < edges[-1])
    which = np.digitize(r[sel], edges) - 1
    sums = np.bincount(which, weights=v[sel], minlength=len(edges) - 1)
    sumr = np.bincount(which, weights=r[sel], minlength=len(edges) - 1)
    counts = np.bincount(which, minlength=len(edges) - 1)
    keep = counts > 0
    return sumr[keep] / counts[keep], sums[keep] / counts[keep]


def tail_exponent_fit(u: Field, window: tuple[float, float],
                      super_threshold: float = SUPER_POLYNOMIAL_RESIDUAL) -> TailFit:
    """Least-squares slope of ``log u`` against ``log |x|`` on a radial window.

    The reported exponent is ``p`` for decay like ``|x|^{-p}``; the
    residual is the RMS deviation in ``log u``.  A residual above
    ``super_threshold`` marks the tail as faster than any power.
    """
    lo, hi = window
    if not 0 < lo < hi:
        raise ValueError(f"invalid window {window}")
    if hi > 0.9 * u.grid.half_length:
        raise ValueError(f"window {window} reaches within 10% of the box face L={u.grid.half_length}")
    radii, prof = radial_profile(u, window)
    if len(radii) < 3:
        return TailFit(float("nan"), float("nan"), ok=False, message="fewer than 3 radial bins in window")
    if np.any(prof <= 0):
        return TailFit(float("nan"), float("nan"), ok=False,
                       message="non-positive samples in the fit window", radii=radii, profile=prof)
    lx, ly = np.log(radii), np.log(prof)
    coef = np.polyfit(lx, ly, 1)
    resid = float(np.sqrt(np.mean((ly - np.polyval(coef, lx)) ** 2)))
    return TailFit(float(-coef[0]), resid, ok=True, super_polynomial=resid > super_threshold,
                   radii=radii, profile=prof)


def regularity_thresholds(d: int, k: int) -> tuple[float, float]:
    """Roots ``s1 >= s2`` of ``s^2 - (d/2 + k/(k-1)) s + d/2 = 0``."""
    if int(d) != d or d < 1 or int(k) != k or k < 2:
        raise ValueError(f"need integers d >= 1 and k >= 2, got d={d}, k={k}")
    m = d / 2 + k / (k - 1)
    disc = m**2 / 4 - d / 2
    assert disc > 0, "discriminant must be positive"
    root = math.sqrt(disc)
    return m / 2 + root, m / 2 - root


class DecayGain(tuple):
    """``(r1, improves)`` with ``improves = r1 > r``."""

    __slots__ = ()

    def __new__(cls, r1: float, improves: bool, theta: float):
        obj = super().__new__(cls, (r1, improves))
        return obj

    @property
    def r1(self) -> float:
        return self[0]

    @property
    def improves(self) -> bool:
        return self[1]


def decay_gain(d: int, k: int, s: float, r: float, check_range: bool = True) -> DecayGain:
    """Weight gained by ``grad(f^k)`` over ``f``: ``r1 = theta r`` with
    ``theta = (s-1)(2ks - d(k-1)) / (2 s^2)``.

    ``check_range`` enforces ``s > max(1, d/2 - d/(2k))``; switch it off
    to evaluate the factor elsewhere (for instance at the smaller root of
    the threshold quadratic, where ``theta = 1``).
    """
    if check_range and not s > max(1.0, d / 2 - d / (2 * k)):
        raise ValueError(f"s={s} outside the range s > max(1, d/2 - d/(2k))")
    if s <= 0:
        raise ValueError(f"s must be positive, got {s}")
    theta = (s - 1) * (2 * k * s - d * (k - 1)) / (2 * s**2)
    r1 = theta * r
    return DecayGain(r1, bool(r1 > r), theta)
