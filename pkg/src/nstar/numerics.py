"""Monotone root finding and cumulative quadrature on (0, inf).

Everything here is deterministic and vectorized over numpy arrays. The
integrator targets positive densities with an integrable singularity at the
origin: panels are graded geometrically toward 0 and the mass below the
smallest breakpoint is estimated from the decay ratio of the final panels.
A density whose panel sums fail to decay is reported as divergent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DivergedIntegralError, NonconvergenceError

_GL_X, _GL_W = np.polynomial.legendre.leggauss(15)

_TINY = 1e-290


@dataclass(frozen=True)
class QuadConfig:
    """Quadrature settings.

    tol is a relative tolerance on cumulative integrals; mesh_ratio is the
    geometric grading factor toward the origin (must lie in (0, 1)); the
    tabulate flag lets derived densities (generalized inverses) be sampled
    once onto a log-log interpolant instead of re-solved at every node.
    """

    tol: float = 1e-8
    mesh_ratio: float = 0.5
    max_panels: int = 4000
    tabulate: bool = True
    table_points: int = 4000
    table_lo: float = 1e-12
    table_hi: float = 1e12


DEFAULT_QUAD = QuadConfig()


def gauss_panel(g: Callable, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """15-point Gauss-Legendre integral of g over each interval [a_i, b_i]."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    nodes = mid[..., None] + half[..., None] * _GL_X
    vals = g(nodes)
    return np.asarray(vals).dot(_GL_W) * half


class CumulativeIntegral:
    """F(t) = integral of g over (0, t], cached across calls.

    Each panel integral is validated by comparing one 15-point Gauss rule
    against its two-half refinement, splitting on disagreement. The mesh
    extends lazily in both directions as new arguments arrive; readers
    always see a consistent snapshot because arrays are swapped wholesale.
    """

    def __init__(self, g: Callable, config: QuadConfig = DEFAULT_QUAD):
        self._g = g
        self._cfg = config
        # (breaks, panels, prefix, stub); swapped as one reference so
        # concurrent readers never see a half-updated mesh
        self._mesh: tuple[np.ndarray, np.ndarray, np.ndarray, float] | None = None

    # -- panel construction -------------------------------------------------

    def _verified_panel(self, a: float, b: float, depth: int = 0):
        """Integrate [a, b]; split while one Gauss rule disagrees with halves."""
        whole = float(gauss_panel(self._g, a, b))
        mid = 0.5 * (a + b)
        left = float(gauss_panel(self._g, a, mid))
        right = float(gauss_panel(self._g, mid, b))
        refined = left + right
        if depth >= 22 or abs(whole - refined) <= 0.1 * self._cfg.tol * (abs(refined) + 1e-300):
            return [mid, b], [left, right]
        eb, ev = self._verified_panel(a, mid, depth + 1)
        eb2, ev2 = self._verified_panel(mid, b, depth + 1)
        return eb + eb2, ev + ev2

    def _set_mesh(self, breaks: list[float], panels: list[float], stub: float) -> None:
        br = np.asarray(breaks, dtype=float)
        pa = np.asarray(panels, dtype=float)
        prefix = np.empty(br.size)
        prefix[0] = stub
        np.cumsum(pa, out=prefix[1:])
        prefix[1:] += stub
        self._mesh = (br, pa, prefix, stub)

    def _grade_down(self, breaks: list[float], panels: list[float], t_floor: float) -> float:
        """Prepend geometric panels toward 0 until the tail below is negligible.

        Returns the stub estimate for the mass below the final smallest
        breakpoint. Raises DivergedIntegralError when the panel sums do not
        decay (the integral cannot be finite then).
        """
        r = self._cfg.mesh_ratio
        tol = self._cfg.tol
        lo = breaks[0]
        prev = None
        stalled = 0
        for k in range(self._cfg.max_panels):
            nxt = lo * r
            eb, ev = self._verified_panel(nxt, lo)
            seg = float(sum(ev))
            breaks[:0] = [nxt] + eb[:-1]
            panels[:0] = ev
            lo = nxt
            if prev is not None and prev > 0:
                q = seg / prev
                if q >= 0.9995:
                    stalled += 1
                    if stalled >= 48:
                        raise DivergedIntegralError(
                            "panel sums near 0 are not decaying; integral diverges"
                        )
                else:
                    stalled = 0
                if q < 1.0:
                    stub = seg * q / (1.0 - q)
                    below = stub + sum(p for b, p in zip(breaks[1:], panels) if b <= t_floor)
                    local = max(below, tol * sum(panels))
                    if k >= 3 and seg + stub <= tol * local and lo <= t_floor:
                        return stub
            prev = seg
            if lo < _TINY:
                if prev is not None and seg <= tol * max(sum(panels), 1e-300):
                    return seg
                raise DivergedIntegralError(
                    "mesh grading reached the underflow floor without converging"
                )
        raise DivergedIntegralError("panel budget exhausted while grading toward 0")

    def _build(self, t_hi: float, t_lo: float) -> None:
        top = max(t_hi, t_lo)
        breaks = [top]
        panels: list[float] = []
        stub = self._grade_down(breaks, panels, min(t_lo, top))
        self._set_mesh(breaks, panels, stub)

    def _extend_up(self, t_hi: float) -> None:
        br, pa, _, stub = self._mesh
        breaks = list(br)
        panels = list(pa)
        growth = 1.0 / self._cfg.mesh_ratio
        top = breaks[-1]
        for _ in range(self._cfg.max_panels):
            if top >= t_hi:
                break
            nxt = top * growth
            eb, ev = self._verified_panel(top, nxt)
            breaks.extend(eb)
            panels.extend(ev)
            top = nxt
        else:
            raise DivergedIntegralError("panel budget exhausted while extending upward")
        self._set_mesh(breaks, panels, stub)

    def _extend_down(self, t_lo: float) -> None:
        br, pa, _, _ = self._mesh
        breaks = list(br)
        panels = list(pa)
        stub = self._grade_down(breaks, panels, t_lo)
        self._set_mesh(breaks, panels, stub)

    def _ensure(self, t_hi: float, t_lo: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
        if self._mesh is None:
            self._build(t_hi, t_lo)
        if t_hi > self._mesh[0][-1]:
            self._extend_up(t_hi)
        if 0.0 < t_lo < self._mesh[0][0]:
            self._extend_down(t_lo)
        return self._mesh

    # -- evaluation -----------------------------------------------------------

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        scalar = t_arr.ndim == 0
        t_arr = np.atleast_1d(t_arr).copy()
        out = np.zeros_like(t_arr)
        pos = t_arr > 0.0
        if pos.any():
            tp = t_arr[pos]
            breaks, _, prefix, stub = self._ensure(float(tp.max()), float(max(tp.min(), _TINY)))
            idx = np.searchsorted(breaks, tp, side="left")
            vals = np.empty_like(tp)
            below = idx == 0
            if below.any():
                # under the mesh floor: scale the stub linearly (sub-tolerance mass)
                vals[below] = stub * tp[below] / breaks[0]
            inside = ~below
            if inside.any():
                i = idx[inside]
                a = breaks[i - 1]
                vals[inside] = prefix[i - 1] + gauss_panel(self._g, a, tp[inside])
            out[pos] = vals
        return float(out[0]) if scalar else out


def invert_increasing(
    f: Callable,
    y,
    *,
    hint: float = 1.0,
    iterations: int = 80,
    max_expand: int = 1100,
) -> np.ndarray | float:
    """Solve f(x) = y for an increasing f on [0, inf) with f(0) = 0.

    Bracket expansion by repeated doubling/halving from the hint, then
    bisection on the geometric midpoint. y must be non-negative; y = 0
    maps to 0 directly.
    """
    y_arr = np.asarray(y, dtype=float)
    scalar = y_arr.ndim == 0
    y_arr = np.atleast_1d(y_arr)
    out = np.zeros_like(y_arr)
    pos = y_arr > 0.0
    if pos.any():
        target = y_arr[pos]
        lo = np.full(target.shape, hint)
        hi = np.full(target.shape, hint)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            need = np.asarray(f(hi)) < target
            n = 0
            while need.any():
                hi[need] *= 4.0
                need &= np.asarray(f(hi)) < target
                n += 1
                if n > max_expand:
                    raise NonconvergenceError("upper bracket expansion failed")
            need = np.asarray(f(lo)) > target
            n = 0
            while need.any():
                lo[need] *= 0.25
                need &= np.asarray(f(lo)) > target
                n += 1
                if n > max_expand:
                    raise NonconvergenceError("lower bracket expansion failed")
            for _ in range(iterations):
                mid = np.sqrt(lo * hi)
                below = np.asarray(f(mid)) <= target
                lo = np.where(below, mid, lo)
                hi = np.where(below, hi, mid)
        out[pos] = np.sqrt(lo * hi)
    return float(out[0]) if scalar else out


def generalized_inverse(
    m: Callable,
    t,
    *,
    s_lo: float = 1e-240,
    s_hi: float = 1e240,
    iterations: int = 80,
) -> np.ndarray | float:
    """sup{s : m(s) <= t} for a non-decreasing m, elementwise over t.

    The predicate bisection keeps the invariant m(lo) <= t < m(hi), so at a
    jump or plateau of m it converges to the right endpoint of the level
    set, which is the supremum.
    """
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.ndim == 0
    t_arr = np.atleast_1d(t_arr)
    out = np.zeros_like(t_arr)
    pos = t_arr > 0.0
    if pos.any():
        target = t_arr[pos]
        lo = np.full(target.shape, s_lo)
        hi = np.full(target.shape, s_hi)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            top = np.asarray(m(hi), dtype=float)
            top = np.where(np.isnan(top), np.inf, top)  # overflow chains read as +inf
            if np.any(top <= target):
                raise NonconvergenceError(
                    "density stays below the level; no finite generalized inverse"
                )
            for _ in range(iterations):
                mid = np.sqrt(lo * hi)
                below = np.asarray(m(mid)) <= target
                lo = np.where(below, mid, lo)
                hi = np.where(below, hi, mid)
        out[pos] = np.sqrt(lo * hi)
    return float(out[0]) if scalar else out


class LogLogLinear:
    """Piecewise-linear interpolant of log y against log x.

    Exact on pure power laws. Outside the table the edge segments are
    continued with their own slopes.
    """

    def __init__(self, x: np.ndarray, y: np.ndarray):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.size < 2:
            raise ValueError("need at least two samples")
        if np.any(x <= 0) or np.any(y <= 0):
            raise ValueError("log-log interpolation needs positive samples")
        if np.any(np.diff(x) <= 0):
            raise ValueError("sample abscissae must be strictly increasing")
        self._lx = np.log(x)
        self._ly = np.log(y)

    def __call__(self, x):
        x_arr = np.asarray(x, dtype=float)
        scalar = x_arr.ndim == 0
        x_arr = np.atleast_1d(x_arr)
        out = np.zeros_like(x_arr)
        pos = x_arr > 0.0
        if pos.any():
            lx = np.log(x_arr[pos])
            out[pos] = np.exp(np.interp(lx, self._lx, self._ly))
            lo_slope = (self._ly[1] - self._ly[0]) / (self._lx[1] - self._lx[0])
            hi_slope = (self._ly[-1] - self._ly[-2]) / (self._lx[-1] - self._lx[-2])
            low = lx < self._lx[0]
            high = lx > self._lx[-1]
            if low.any():
                vals = self._ly[0] + lo_slope * (lx[low] - self._lx[0])
                out_pos = out[pos]
                out_pos[low] = np.exp(vals)
                out[pos] = out_pos
            if high.any():
                vals = self._ly[-1] + hi_slope * (lx[high] - self._lx[-1])
                out_pos = out[pos]
                out_pos[high] = np.exp(vals)
                out[pos] = out_pos
        return float(out[0]) if scalar else out


class LogLogPchip:
    """Monotone cubic interpolant of log y against log x.

    Reproduces power laws exactly (they are linear in this chart) and
    preserves monotonicity elsewhere. Linear continuation beyond the table.
    """

    def __init__(self, x: np.ndarray, y: np.ndarray):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        keep = (x > 0) & (y > 0)
        x, y = x[keep], y[keep]
        if x.size < 4:
            raise ValueError("need at least four positive samples")
        self._lx = np.log(x)
        self._ly = np.log(y)
        self._pchip = PchipInterpolator(self._lx, self._ly, extrapolate=False)
        self._lo_slope = (self._ly[1] - self._ly[0]) / (self._lx[1] - self._lx[0])
        self._hi_slope = (self._ly[-1] - self._ly[-2]) / (self._lx[-1] - self._lx[-2])

    def __call__(self, x):
        x_arr = np.asarray(x, dtype=float)
        scalar = x_arr.ndim == 0
        x_arr = np.atleast_1d(x_arr)
        out = np.zeros_like(x_arr, dtype=float)
        pos = x_arr > 0.0
        if pos.any():
            lx = np.log(x_arr[pos])
            vals = self._pchip(lx)
            low = lx < self._lx[0]
            high = lx > self._lx[-1]
            vals = np.where(low, self._ly[0] + self._lo_slope * (lx - self._lx[0]), vals)
            vals = np.where(high, self._ly[-1] + self._hi_slope * (lx - self._lx[-1]), vals)
            out[pos] = np.exp(vals)
        return float(out[0]) if scalar else out


def tabulate_density(
    g: Callable,
    *,
    lo: float,
    hi: float,
    points: int,
) -> LogLogPchip:
    """Sample a positive function on a log grid and wrap it in a fast interpolant."""
    grid = np.geomspace(lo, hi, points)
    vals = np.asarray(g(grid), dtype=float)
    return LogLogPchip(grid, vals)
