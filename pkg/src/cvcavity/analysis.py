"""Parameter sweeps and figure-grade data: minimum-variance landscapes and pump curves.

Grid points are independent, so the sweep engine integrates every (pulse
duration, loss asymmetry) point simultaneously with array-valued RK4 and a
streaming minimum tracker instead of storing full trajectories.  All points
share one window and step (identical integrator config), and results land in
coordinate-addressed arrays, so output order is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import IntegratorConfig, find_minimum_variance, integrate
from .pump import (RingGaussianPump, RingParams, _ring_strength, optimum_sigma,
                   optimum_tau, predicted_min_variance)
from .states import SqueezedThermalState


@dataclass(frozen=True)
class GridSpec:
    """Sweep grid: pulse durations x loss asymmetries at fixed pump and ring.

    The window defaults to [-5 max(tau), max(5 max(tau), 10)] so every pulse
    in the grid is fully contained and the post-pulse decay is visible.
    """

    tau_values: tuple
    zeta_values: tuple
    g0: float
    ring: RingParams
    step: float = 1e-3
    t_start: float | None = None
    t_end: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "tau_values", tuple(float(t) for t in self.tau_values))
        object.__setattr__(self, "zeta_values", tuple(float(z) for z in self.zeta_values))
        if not self.tau_values or not self.zeta_values:
            raise ValueError("grid axes must be nonempty")
        if min(self.tau_values) <= 0.0:
            raise ValueError("pulse durations must be positive")
        if max(abs(z) for z in self.zeta_values) >= 1.0:
            raise ValueError("loss asymmetries must satisfy |zeta| < 1")
        if self.step <= 0.0:
            raise ValueError("step must be positive")

    @property
    def window(self):
        tau_max = max(self.tau_values)
        t0 = self.t_start if self.t_start is not None else -5.0 * tau_max
        t1 = self.t_end if self.t_end is not None else max(5.0 * tau_max, 10.0)
        if t1 <= t0:
            raise ValueError("t_end must exceed t_start")
        return t0, t1


@dataclass
class SweepGrid:
    """Per-point minimum-variance results on a (tau, zeta) grid."""

    tau_values: np.ndarray
    zeta_values: np.ndarray
    g0: float
    ring: RingParams
    delta_theta: float
    step: float
    t_start: float
    t_end: float
    delta_sq_min: np.ndarray
    t_min: np.ndarray
    n1_at_min: np.ndarray
    n2_at_min: np.ndarray
    u_at_min: np.ndarray
    boundary: np.ndarray

    def global_minimum_index(self):
        flat = int(np.argmin(self.delta_sq_min))
        return np.unravel_index(flat, self.delta_sq_min.shape)

    def rows(self):
        """Long-format rows (tau, zeta, delta_sq_min, t_min, n1_min, n2_min)."""
        for i, tau in enumerate(self.tau_values):
            for j, zeta in enumerate(self.zeta_values):
                yield (float(tau), float(zeta), float(self.delta_sq_min[i, j]),
                       float(self.t_min[i, j]), float(self.n1_at_min[i, j]),
                       float(self.n2_at_min[i, j]))


def _rhs_arrays(u, n1, n2, g, zeta):
    s = np.sinh(u)
    c = np.cosh(u)
    s2 = s * s
    c2 = c * c
    du = 0.5 * g - (2.0 * s * c) * (1.0 + zeta * (n2 - n1)) / (2.0 * (n1 + n2 + 1.0))
    dn1 = n1 * ((1.0 - zeta) * s2 - (1.0 + zeta) * c2) + (1.0 - zeta) * s2
    dn2 = n2 * ((1.0 + zeta) * s2 - (1.0 - zeta) * c2) + (1.0 + zeta) * s2
    return du, dn1, dn2


def _minimize_points(tau, zeta, g0, ring: RingParams, delta_theta: float,
                     step: float, t_start: float, t_end: float):
    """Vacuum-initial RK4 over flat point arrays with a streaming minimum tracker.

    Returns per-point arrays for the (possibly offset) correlation-variance
    minimum, parabolic-refined in time; boundary marks minima pinned to the
    first or last sample.
    """
    tau = np.asarray(tau, float)
    zeta = np.asarray(zeta, float)
    g0 = np.broadcast_to(np.asarray(g0, float), tau.shape)
    m = tau.size
    w = 2.0 * math.sin(0.5 * delta_theta) ** 2
    n_steps = int(round((t_end - t_start) / step))
    u = np.zeros(m)
    n1 = np.zeros(m)
    n2 = np.zeros(m)

    def objective(u_, n1_, n2_):
        return (1.0 + n1_ + n2_) * (np.exp(-2.0 * u_) + w * np.sinh(2.0 * u_))

    def g_at(t):
        return _ring_strength(t, tau, ring, g0)

    d_prev = objective(u, n1, n2)
    best = d_prev.copy()
    best_t = np.full(m, t_start)
    best_n1 = n1.copy()
    best_n2 = n2.copy()
    best_u = u.copy()
    bracket_lo = np.full(m, np.nan)
    bracket_hi = np.full(m, np.nan)
    pending = np.zeros(m, dtype=bool)
    half = 0.5 * step
    sixth = step / 6.0
    g_next = g_at(t_start)
    for k in range(n_steps):
        t = t_start + k * step
        g_a = g_next
        g_m = g_at(t + half)
        g_b = g_at(t + step)
        g_next = g_b
        a1 = _rhs_arrays(u, n1, n2, g_a, zeta)
        a2 = _rhs_arrays(u + half * a1[0], n1 + half * a1[1], n2 + half * a1[2],
                         g_m, zeta)
        a3 = _rhs_arrays(u + half * a2[0], n1 + half * a2[1], n2 + half * a2[2],
                         g_m, zeta)
        a4 = _rhs_arrays(u + step * a3[0], n1 + step * a3[1], n2 + step * a3[2],
                         g_b, zeta)
        u = u + sixth * (a1[0] + 2.0 * (a2[0] + a3[0]) + a4[0])
        n1 = n1 + sixth * (a1[1] + 2.0 * (a2[1] + a3[1]) + a4[1])
        n2 = n2 + sixth * (a1[2] + 2.0 * (a2[2] + a3[2]) + a4[2])
        if not (np.isfinite(u).all() and np.isfinite(n1).all()
                and np.isfinite(n2).all()):
            from .errors import IntegrationError
            raise IntegrationError(
                f"non-finite state at t_tilde = {t + step!r} for at least one grid "
                "point", t_tilde=t + step)
        np.clip(u, 0.0, None, out=u)
        np.clip(n1, 0.0, None, out=n1)
        np.clip(n2, 0.0, None, out=n2)
        d = objective(u, n1, n2)
        if pending.any():
            bracket_hi[pending] = d[pending]
            pending[:] = False
        mask = d < best
        if mask.any():
            best[mask] = d[mask]
            best_t[mask] = t + step
            best_n1[mask] = n1[mask]
            best_n2[mask] = n2[mask]
            best_u[mask] = u[mask]
            bracket_lo[mask] = d_prev[mask]
            bracket_hi[mask] = np.nan
            pending[mask] = True
        d_prev = d
    boundary = ~(np.isfinite(bracket_lo) & np.isfinite(bracket_hi))
    refined = best.copy()
    t_ref = best_t.copy()
    den = bracket_lo - 2.0 * best + bracket_hi
    ok = ~boundary & (den > 0.0) & np.isfinite(den)
    diff = bracket_lo[ok] - bracket_hi[ok]
    refined[ok] = best[ok] - diff ** 2 / (8.0 * den[ok])
    t_ref[ok] = best_t[ok] + half * diff / den[ok]
    return {"delta_sq_min": refined, "t_min": t_ref, "n1_at_min": best_n1,
            "n2_at_min": best_n2, "u_at_min": best_u, "boundary": boundary}


def _run_sweep(spec: GridSpec, delta_theta: float) -> SweepGrid:
    taus = np.asarray(spec.tau_values)
    zetas = np.asarray(spec.zeta_values)
    tt, zz = np.meshgrid(taus, zetas, indexing="ij")
    t0, t1 = spec.window
    res = _minimize_points(tt.ravel(), zz.ravel(), spec.g0, spec.ring, delta_theta,
                           spec.step, t0, t1)
    shape = tt.shape
    return SweepGrid(tau_values=taus, zeta_values=zetas, g0=spec.g0, ring=spec.ring,
                     delta_theta=delta_theta, step=spec.step, t_start=t0, t_end=t1,
                     delta_sq_min=res["delta_sq_min"].reshape(shape),
                     t_min=res["t_min"].reshape(shape),
                     n1_at_min=res["n1_at_min"].reshape(shape),
                     n2_at_min=res["n2_at_min"].reshape(shape),
                     u_at_min=res["u_at_min"].reshape(shape),
                     boundary=res["boundary"].reshape(shape))


def sweep_min_variance(spec: GridSpec) -> SweepGrid:
    """Minimum correlation variance over the (tau, zeta) grid at perfect phase matching."""
    return _run_sweep(spec, 0.0)


def sweep_offset(spec: GridSpec, delta_theta: float) -> SweepGrid:
    """Same sweep minimizing the variance at a homodyne angle offset delta_theta."""
    return _run_sweep(spec, float(delta_theta))


@dataclass(frozen=True)
class GlobalMinimum:
    """Grid global minimum after a fine-step refinement run at the best point."""

    tau_tilde: float
    zeta: float
    t_min: float
    delta_sq_min: float
    n1: float
    n2: float
    boundary: bool


def refine_global_minimum(grid: SweepGrid, step: float = 2e-4) -> GlobalMinimum:
    """Re-run the best grid point at a finer step and return its refined minimum."""
    i, j = grid.global_minimum_index()
    tau = float(grid.tau_values[i])
    zeta = float(grid.zeta_values[j])
    pump = RingGaussianPump(g0=grid.g0, tau_tilde=tau, ring=grid.ring)
    cfg = IntegratorConfig(t_start=grid.t_start, t_end=grid.t_end, step=step)
    traj = integrate(SqueezedThermalState.vacuum(), pump, zeta, cfg)
    found = find_minimum_variance(traj, delta_theta=grid.delta_theta)
    return GlobalMinimum(tau_tilde=tau, zeta=zeta, t_min=found.t_min,
                         delta_sq_min=found.delta_sq_min, n1=found.state.n1,
                         n2=found.state.n2, boundary=found.boundary)


@dataclass
class G0Curve:
    """Numeric versus semi-analytic minimum variance as the pump amplitude grows."""

    g0_values: np.ndarray
    ring: RingParams
    tau_values: np.ndarray
    delta_sq_min_numeric: np.ndarray
    delta_sq_min_formula: np.ndarray
    total_thermal: np.ndarray
    tau_at_min: np.ndarray
    t_min: np.ndarray


def g0_curve(g0_values, a_p: float, use_optimum_sigma: bool = True,
             sigma_p: float | None = None, tau_values=None, step: float = 1e-3,
             refine_step: float = 2e-4) -> G0Curve:
    """Minimum variance versus pump amplitude, numeric and closed-form.

    By default each amplitude runs a single trajectory at the optimum pulse
    duration and zero loss asymmetry.  Passing `tau_values` instead minimizes
    over that duration grid (the landscape global minimum); either way the
    best point is re-run at `refine_step` and the refined minimum reported.
    """
    g0_values = np.asarray([float(g) for g in np.atleast_1d(g0_values)])
    if np.any(g0_values <= 0.0):
        raise ValueError("pump amplitudes must be positive")
    if use_optimum_sigma:
        sigma = optimum_sigma(a_p)
    else:
        if sigma_p is None:
            raise ValueError("sigma_p is required when use_optimum_sigma is false")
        sigma = float(sigma_p)
    ring = RingParams(sigma_p=sigma, a_p=a_p)
    taus = np.asarray([optimum_tau()] if tau_values is None
                      else [float(t) for t in np.atleast_1d(tau_values)])
    t0 = -5.0 * float(taus.max())
    t1 = max(5.0 * float(taus.max()), 10.0)
    gg, tt = np.meshgrid(g0_values, taus, indexing="ij")
    res = _minimize_points(tt.ravel(), np.zeros(tt.size), gg.ravel(), ring, 0.0,
                           step, t0, t1)
    coarse = res["delta_sq_min"].reshape(gg.shape)
    n_g0 = g0_values.size
    numeric = np.empty(n_g0)
    formula = np.empty(n_g0)
    thermal = np.empty(n_g0)
    tau_best = np.empty(n_g0)
    t_best = np.empty(n_g0)
    cfg = IntegratorConfig(t_start=t0, t_end=t1, step=refine_step)
    for i, g0 in enumerate(g0_values):
        j = int(np.argmin(coarse[i]))
        tau_best[i] = taus[j]
        pump = RingGaussianPump(g0=float(g0), tau_tilde=float(taus[j]), ring=ring)
        traj = integrate(SqueezedThermalState.vacuum(), pump, 0.0, cfg)
        found = find_minimum_variance(traj)
        numeric[i] = found.delta_sq_min
        t_best[i] = found.t_min
        thermal[i] = found.state.n1 + found.state.n2
        formula[i] = predicted_min_variance(float(g0), ring)
    return G0Curve(g0_values=g0_values, ring=ring, tau_values=taus,
                   delta_sq_min_numeric=numeric, delta_sq_min_formula=formula,
                   total_thermal=thermal, tau_at_min=tau_best, t_min=t_best)
