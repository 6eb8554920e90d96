"""Periodic grids, derivative backends and residual operators.

Four long-wave equations share the quadratic advection/dispersion core;
they differ in the extra cubic, cross and fifth-derivative terms:

    kdv:         u_t + u_x + (3/2) a u u_x + (b/6) u_xxx
    kdv2:        kdv + second-order corrections (cubic, a*b cross terms,
                 19/360 b^2 u_xxxxx)
    fifth_order: u_t + u_x + (3/2) a u u_x + b' u_xxx + b5 u_xxxxx
    gardner:     u_t + u_x + (3/2) a u u_x - (3/8) a^2 u^2 u_x + b' u_xxx

with a = alpha, b = beta, b' = (1 - 3 tau) b / 6 and
b5 = (19 - 30 tau - 45 tau^2) b^2 / 360.  An uneven bottom h(x) (piecewise
linear, so h_xx = 0) contributes -(delta/4)(2 h u_x + h_x u).  In the
moving frame x - t the bare u_x term is absent.

Every term of every residual is assembled from sign-symmetric primitives,
so negating (u, u_t, alpha) negates the residual bitwise.  That exactness
is what the inversion harness measures.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from .waves import Frame, MediumParams, TravellingWave

__all__ = [
    "EquationKind",
    "Grid",
    "Field",
    "BottomProfile",
    "EquationId",
    "ResidualReport",
    "spectral_derivative",
    "fd8_derivative",
    "bottom_eval",
    "residual",
    "travelling_residual",
    "equation_terms",
]

DERIVATIVE_ORDERS = (1, 2, 3, 5)


class EquationKind(Enum):
    KDV = "kdv"
    KDV2 = "kdv2"
    FIFTH_ORDER = "fifth_order"
    GARDNER = "gardner"


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid: n points on [x0, x0 + length), right end excluded."""

    x0: float
    length: float
    n: int

    def __post_init__(self):
        if self.length <= 0.0:
            raise ValueError(f"Grid.length must be positive, got {self.length!r}")
        if self.n < 16 or self.n % 2 != 0:
            raise ValueError(f"Grid.n must be an even integer >= 16, got {self.n!r}")

    @property
    def dx(self) -> float:
        return self.length / self.n

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    @property
    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers of the rfft modes."""
        return 2.0 * math.pi * np.fft.rfftfreq(self.n, d=self.dx)


@dataclass
class Field:
    """Grid samples of one scalar profile at one time."""

    grid: Grid
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n,):
            raise ValueError(
                f"Field.values shape {self.values.shape} does not match grid n={self.grid.n}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("Field.values must be finite")


@dataclass(frozen=True)
class BottomProfile:
    """Piecewise-linear bottom h(x), periodically extended.

    Knots are (x, h) pairs with strictly increasing x spanning less than
    one period; the segment from the last knot back to the first (shifted
    by the period) closes the profile, so h is continuous and h_xx = 0
    away from knots.  At a knot the slope of the right-hand segment is
    used.  |h| <= 1 keeps the bottom within the long-wave ordering.
    """

    knots: tuple[tuple[float, float], ...]

    def __post_init__(self):
        knots = tuple((float(x), float(h)) for x, h in self.knots)
        object.__setattr__(self, "knots", knots)
        if len(knots) < 2:
            raise ValueError("BottomProfile needs at least 2 knots")
        xs = [x for x, _ in knots]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("BottomProfile knot positions must increase strictly")
        if any(abs(h) > 1.0 for _, h in knots):
            raise ValueError("BottomProfile requires |h| <= 1")


@dataclass(frozen=True)
class EquationId:
    kind: EquationKind
    frame: Frame = Frame.FIXED
    bottom: BottomProfile | None = None

    def label(self) -> str:
        parts = [self.kind.value, self.frame.value]
        if self.bottom is not None:
            parts.append("bottom")
        return "/".join(parts)


@dataclass(frozen=True)
class ResidualReport:
    equation: str
    norm_inf: float
    norm_2: float
    scale: float
    relative: float
    passed: bool
    tolerance: float
    flags: tuple[str, ...] = field(default=())


def spectral_derivative(f: Field, order: int) -> Field:
    """Fourier-collocation derivative of the given order (1, 2, 3 or 5)."""
    values = _spectral_diff(f.values, f.grid.length, order)
    return Field(f.grid, values, f.time)


def _spectral_diff(values: np.ndarray, length: float, order: int) -> np.ndarray:
    if order not in DERIVATIVE_ORDERS:
        raise ValueError(f"derivative order must be one of {DERIVATIVE_ORDERS}, got {order!r}")
    n = values.shape[-1]
    k = 2.0 * math.pi * np.fft.rfftfreq(n, d=length / n)
    mult = (1j * k) ** order
    if order % 2 == 1 and n % 2 == 0:
        # odd derivative of the unmatched Nyquist mode is set to zero
        mult[-1] = 0.0
    return np.fft.irfft(mult * np.fft.rfft(values), n)


def _fornberg_weights(order: int, offsets: np.ndarray) -> np.ndarray:
    """Finite-difference weights for d^order/dx^order at 0 on the given nodes
    (Fornberg 1988, Math. Comp. 51)."""
    n = len(offsets)
    c = np.zeros((n, order + 1))
    c[0, 0] = 1.0
    c1 = 1.0
    c4 = offsets[0]
    for i in range(1, n):
        mn = min(i, order)
        c2 = 1.0
        c5 = c4
        c4 = offsets[i]
        for j in range(i):
            c3 = offsets[i] - offsets[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, order]


@lru_cache(maxsize=None)
def _fd8_stencil(order: int) -> tuple[np.ndarray, np.ndarray]:
    # half-width chosen so the centred stencil is at least 8th-order accurate
    half = (order + 9) // 2
    offsets = np.arange(-half, half + 1)
    return offsets, _fornberg_weights(order, offsets.astype(float))


def fd8_derivative(f: Field, order: int) -> Field:
    """Centred finite-difference derivative (>= 8th order), periodic wrap."""
    if order not in DERIVATIVE_ORDERS:
        raise ValueError(f"derivative order must be one of {DERIVATIVE_ORDERS}, got {order!r}")
    offsets, weights = _fd8_stencil(order)
    out = np.zeros_like(f.values)
    for off, w in zip(offsets, weights):
        if w != 0.0:
            out += w * np.roll(f.values, -off)
    return Field(f.grid, out / f.grid.dx**order, f.time)


_BACKENDS = {"spectral": _spectral_diff, "fd8": None}  # fd8 filled below


def _fd8_diff(values: np.ndarray, length: float, order: int) -> np.ndarray:
    offsets, weights = _fd8_stencil(order)
    dx = length / values.shape[-1]
    out = np.zeros_like(values)
    for off, w in zip(offsets, weights):
        if w != 0.0:
            out += w * np.roll(values, -off)
    return out / dx**order


_BACKENDS["fd8"] = _fd8_diff


def bottom_eval(bottom: BottomProfile, grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    """(h, h_x) of the periodically extended bottom on grid points.

    h_x comes from the analytic segment slopes, never from differentiating
    samples, so it is exact up to the knot discontinuities.
    """
    px = np.array([x for x, _ in bottom.knots])
    ph = np.array([h for _, h in bottom.knots])
    if px[-1] - px[0] >= grid.length:
        raise ValueError("BottomProfile knots must span less than one period")
    # wrap-around segment closes the period
    px_ext = np.append(px, px[0] + grid.length)
    ph_ext = np.append(ph, ph[0])
    xr = px[0] + np.mod(grid.x - px[0], grid.length)
    idx = np.clip(np.searchsorted(px_ext, xr, side="right") - 1, 0, len(px_ext) - 2)
    slope = (ph_ext[idx + 1] - ph_ext[idx]) / (px_ext[idx + 1] - px_ext[idx])
    h = ph_ext[idx] + slope * (xr - px_ext[idx])
    return h, slope


def _required_orders(kind: EquationKind) -> tuple[int, ...]:
    if kind is EquationKind.KDV:
        return (1, 3)
    if kind is EquationKind.KDV2:
        return (1, 2, 3, 5)
    if kind is EquationKind.FIFTH_ORDER:
        return (1, 3, 5)
    if kind is EquationKind.GARDNER:
        return (1, 3)
    raise ValueError(f"unknown equation kind {kind!r}")


def equation_terms(kind: EquationKind, params: MediumParams, frame: Frame,
                   u: np.ndarray, derivs: dict[int, np.ndarray],
                   u_t: np.ndarray | None = None,
                   bottom_pair: tuple[np.ndarray, np.ndarray] | None = None,
                   ) -> list[tuple[str, np.ndarray]]:
    """Named residual terms; their sum is the equation's left-hand side."""
    a, b = params.alpha, params.beta
    ux = derivs[1]
    uxxx = derivs[3]
    terms: list[tuple[str, np.ndarray]] = []
    if u_t is not None:
        terms.append(("u_t", u_t))
    if frame is Frame.FIXED:
        terms.append(("u_x", ux))
    terms.append(("quadratic", 1.5 * a * u * ux))
    if kind in (EquationKind.KDV, EquationKind.KDV2):
        terms.append(("dispersion_3", b / 6.0 * uxxx))
    else:
        terms.append(("dispersion_3", params.beta_prime() * uxxx))
    if kind is EquationKind.KDV2:
        uxx = derivs[2]
        u5x = derivs[5]
        terms.append(("cubic", -0.375 * a * a * u * u * ux))
        terms.append(("cross_1", a * b * (23.0 / 24.0) * ux * uxx))
        terms.append(("cross_2", a * b * (5.0 / 12.0) * u * uxxx))
        terms.append(("dispersion_5", 19.0 / 360.0 * b * b * u5x))
    elif kind is EquationKind.FIFTH_ORDER:
        u5x = derivs[5]
        b5 = (19.0 - 30.0 * params.tau - 45.0 * params.tau**2) * b * b / 360.0
        terms.append(("dispersion_5", b5 * u5x))
    elif kind is EquationKind.GARDNER:
        terms.append(("cubic", -0.375 * a * a * u * u * ux))
    if bottom_pair is not None:
        h, hx = bottom_pair
        terms.append(("bottom", -0.25 * params.delta * (2.0 * h * ux + hx * u)))
    return terms


def _tau_flags(kind: EquationKind, params: MediumParams) -> tuple[str, ...]:
    if kind in (EquationKind.FIFTH_ORDER, EquationKind.GARDNER) and params.tau > 1.0 / 3.0:
        return ("dispersion_sign_change",)
    return ()


def residual(u: Field, u_t: Field, eq: EquationId, params: MediumParams,
             tolerance: float = 1e-8, backend: str = "spectral",
             ) -> tuple[ResidualReport, Field]:
    """Pointwise residual of (u, u_t) under the given equation.

    The report's scale is the largest magnitude reached by any single
    term on the grid; `relative` is norm_inf/scale, and `passed` compares
    it against the tolerance.  Returns the report and the residual field.
    """
    if backend not in _BACKENDS:
        raise ValueError(f"backend must be one of {sorted(_BACKENDS)}, got {backend!r}")
    if u.grid != u_t.grid:
        raise ValueError("u and u_t must share a grid")
    diff = _BACKENDS[backend]
    derivs = {k: diff(u.values, u.grid.length, k) for k in _required_orders(eq.kind)}
    bottom_pair = bottom_eval(eq.bottom, u.grid) if eq.bottom is not None else None
    terms = equation_terms(eq.kind, params, eq.frame, u.values, derivs,
                           u_t=u_t.values, bottom_pair=bottom_pair)
    res = terms[0][1]
    for _, t in terms[1:]:
        res = res + t
    scale = max(float(np.max(np.abs(t))) for _, t in terms)
    norm_inf = float(np.max(np.abs(res)))
    norm_2 = float(math.sqrt(u.grid.dx * np.sum(res * res)))
    relative = norm_inf / scale if scale > 0.0 else 0.0
    report = ResidualReport(
        equation=eq.label(),
        norm_inf=norm_inf,
        norm_2=norm_2,
        scale=scale,
        relative=relative,
        passed=bool(relative <= tolerance),
        tolerance=tolerance,
        flags=_tau_flags(eq.kind, params),
    )
    return report, Field(u.grid, res, u.time)


def travelling_residual(spec: TravellingWave, eq: EquationId, params: MediumParams,
                        grid: Grid, t: float = 0.0, tolerance: float = 1e-8,
                        backend: str = "spectral") -> tuple[ResidualReport, Field]:
    """Residual of a travelling profile, with u_t supplied by -v u_x.

    Any profile may be checked against any flat-bottom equation (a
    mismatched pair is simply reported as failing); a bottom profile is
    rejected because no uniformly travelling profile solves the
    variable-depth equations.
    """
    if eq.bottom is not None:
        raise ValueError("travelling profiles assume a flat bottom; "
                         "evaluate residual() directly for bottom terms")
    u = Field(grid, spec.evaluate(grid.x, t, eq.frame), t)
    ux = _BACKENDS[backend](u.values, grid.length, 1)
    u_t = Field(grid, -spec.speed_in(eq.frame) * ux, t)
    return residual(u, u_t, eq, params, tolerance=tolerance, backend=backend)
