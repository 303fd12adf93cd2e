"""Equations of motion and fixed-step integration of the squeezed-thermal dynamics.

The full four-variable system (u, phi, n1, n2) in physical time is exposed as
`rhs_general`; its phase equation is singular at u = 0, so vacuum-initial runs
use the reduced dimensionless system `rhs_reduced` in which the phase has been
eliminated analytically (it rotates rigidly at the sum frequency).  A plain
fixed-step RK4 drives the reduced system; no adaptivity is needed in the
parameter ranges of interest.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import IntegrationError, PhaseSingularityError, WindowBoundaryWarning
from .pump import PumpModel, pump_strength
from .states import CavityParams, SqueezedThermalState, correlation_variance

# tanh(2u) floor below which the phase equation is treated as singular
U_SINGULARITY_FLOOR = 1e-12
# roundoff tolerance for clamping u, n1, n2 back to zero
NEGATIVE_CLAMP = 1e-12


def rhs_reduced(state: SqueezedThermalState, g: float, zeta: float):
    """Time derivatives (du, dn1, dn2)/dt_tilde of the reduced dimensionless system.

    du/dt = g/2 - sinh(2u) (1 + zeta (n2 - n1)) / (2 (n1 + n2 + 1))
    dn1/dt = n1 [(1-zeta) sinh^2 u - (1+zeta) cosh^2 u] + (1-zeta) sinh^2 u
    dn2/dt = n2 [(1+zeta) sinh^2 u - (1-zeta) cosh^2 u] + (1+zeta) sinh^2 u

    The u-damping denominator 2(n1+n2+1) is fixed by the exact second-moment
    equations of the master equation (<b1 b2> decays at the average rate,
    <n_j> at Gamma_j); it also makes the minimum-variance identity
    (1 + zeta [n2 - n1])/(1 + g) hold exactly at stationary points.
    """
    if abs(zeta) >= 1.0:
        raise ValueError(f"loss asymmetry must satisfy |zeta| < 1, got {zeta!r}")
    if g < 0.0:
        raise ValueError("pump strength must be >= 0")
    return _rhs_reduced_raw(state.u, state.n1, state.n2, g, zeta)


def _rhs_reduced_raw(u, n1, n2, g, zeta):
    s = math.sinh(u)
    c = math.cosh(u)
    s2 = s * s
    c2 = c * c
    du = 0.5 * g - (2.0 * s * c) * (1.0 + zeta * (n2 - n1)) / (2.0 * (n1 + n2 + 1.0))
    dn1 = n1 * ((1.0 - zeta) * s2 - (1.0 + zeta) * c2) + (1.0 - zeta) * s2
    dn2 = n2 * ((1.0 + zeta) * s2 - (1.0 - zeta) * c2) + (1.0 + zeta) * s2
    return du, dn1, dn2


def rhs_general(state: SqueezedThermalState, pump_field: complex, params: CavityParams):
    """Physical-time derivatives (du, dphi, dn1, dn2) of the full system.

    pump_field is the complex drive gamma E_P(t)/hbar.  The phase equation
    dphi/dt = -(omega1 + omega2) + 2 Re(pump_field e^{-i phi}) / tanh(2u)
    is singular at u = 0; vacuum-initial runs must use the reduced system,
    where the initial phase choice of `squeezing_phase` removes the
    singularity.  The drive enters u as +Im(pump_field e^{-i phi}), which is
    +|pump_field| on that phase branch, keeping u >= 0 from vacuum.
    """
    u, n1, n2 = state.u, state.n1, state.n2
    if u <= U_SINGULARITY_FLOOR:
        raise PhaseSingularityError(
            f"phase derivative is singular at u = {u!r} <= {U_SINGULARITY_FLOOR}; "
            "start vacuum runs from the reduced system, whose initial phase is "
            "fixed by squeezing_phase()")
    w = pump_field * cmath.exp(-1j * state.phi)
    s = math.sinh(u)
    c = math.cosh(u)
    s2 = s * s
    c2 = c * c
    du = w.imag - math.sinh(2.0 * u) \
        * (params.gamma_plus + params.gamma_minus * (n2 - n1)) \
        / (2.0 * (n1 + n2 + 1.0))
    dphi = -params.omega_s + 2.0 * w.real / math.tanh(2.0 * u)
    dn1 = n1 * (params.gamma2 * s2 - params.gamma1 * c2) + params.gamma2 * s2
    dn2 = n2 * (params.gamma1 * s2 - params.gamma2 * c2) + params.gamma1 * s2
    return du, dphi, dn1, dn2


def squeezing_phase(t: float, t_i: float, theta: float, omega_s: float) -> float:
    """Squeezing phase of a vacuum-initial run: -omega_s (t - t_i) - pi/2 + theta.

    theta is the phase of the product of the nonlinear coefficient and the
    pump field at the initial time t_i; the offset removes the singularity of
    the phase equation at u = 0, after which the phase rotates rigidly at the
    sum frequency.
    """
    return -omega_s * (t - t_i) - 0.5 * math.pi + theta


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step integration window and step in dimensionless time."""

    t_start: float
    t_end: float
    step: float = 1e-3
    method: str = "RK4"

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise ValueError("t_end must exceed t_start")
        if not self.step > 0.0:
            raise ValueError("step must be positive")
        if (self.t_end - self.t_start) / self.step < 2.0:
            raise ValueError("window must span at least two steps")
        if self.method != "RK4":
            raise ValueError(f"unsupported method {self.method!r}")

    @property
    def n_steps(self) -> int:
        return int(round((self.t_end - self.t_start) / self.step))

    @classmethod
    def default_window(cls, tau_tilde: float, step: float = 1e-3) -> "IntegratorConfig":
        """Window covering the pulse and the post-pulse decay: [-5 tau, max(5 tau, 10)].

        The pump is below 1e-7 of its peak at the start of this window.
        """
        return cls(t_start=-5.0 * tau_tilde, t_end=max(5.0 * tau_tilde, 10.0), step=step)


class TrajectoryPoint(NamedTuple):
    t_tilde: float
    state: SqueezedThermalState
    g: float
    delta_sq: float


@dataclass
class Trajectory:
    """Uniformly sampled time series of state, pump strength and correlation variance."""

    step: float
    t_tilde: np.ndarray
    u: np.ndarray
    phi: np.ndarray
    n1: np.ndarray
    n2: np.ndarray
    g: np.ndarray
    delta_sq: np.ndarray

    def __len__(self) -> int:
        return self.t_tilde.size

    def state_at(self, i: int) -> SqueezedThermalState:
        return SqueezedThermalState(u=float(self.u[i]), phi=float(self.phi[i]),
                                    n1=float(self.n1[i]), n2=float(self.n2[i]),
                                    t_tilde=float(self.t_tilde[i]))

    @property
    def samples(self):
        return [TrajectoryPoint(float(self.t_tilde[i]), self.state_at(i),
                                float(self.g[i]), float(self.delta_sq[i]))
                for i in range(len(self))]


def _clamp(value: float, t: float, name: str) -> float:
    if value >= 0.0:
        return value
    if value >= -NEGATIVE_CLAMP:
        return 0.0
    raise IntegrationError(
        f"{name} = {value!r} fell below -{NEGATIVE_CLAMP} at t_tilde = {t!r}; "
        "the step size is too large for this pump", t_tilde=t)


def integrate(initial: SqueezedThermalState, pump: PumpModel, zeta: float,
              cfg: IntegratorConfig) -> Trajectory:
    """Fixed-step RK4 trajectory of the reduced system from `initial`.

    The phase column is carried unchanged from the initial state: under
    phase-matched homodyne angles the correlation variance never references
    it, and the reduced system is closed in (u, n1, n2).  Roundoff-negative
    components within 1e-12 are clamped to zero; non-finite components abort
    with the offending time.
    """
    if abs(zeta) >= 1.0:
        raise ValueError(f"loss asymmetry must satisfy |zeta| < 1, got {zeta!r}")
    h = cfg.step
    n = cfg.n_steps
    # pump strength at all nodes and midpoints in one vectorized evaluation
    gs = np.asarray(pump_strength(cfg.t_start + 0.5 * h * np.arange(2 * n + 1), pump),
                    dtype=float)
    if not np.all(np.isfinite(gs)):
        bad = int(np.flatnonzero(~np.isfinite(gs))[0])
        raise IntegrationError(f"pump strength is not finite at t_tilde = "
                               f"{cfg.t_start + 0.5 * h * bad!r}",
                               t_tilde=cfg.t_start + 0.5 * h * bad)
    ts = cfg.t_start + h * np.arange(n + 1)
    u_arr = np.empty(n + 1)
    n1_arr = np.empty(n + 1)
    n2_arr = np.empty(n + 1)
    d_arr = np.empty(n + 1)
    u, n1, n2 = initial.u, initial.n1, initial.n2
    u_arr[0], n1_arr[0], n2_arr[0] = u, n1, n2
    d_arr[0] = (1.0 + n1 + n2) * math.exp(-2.0 * u)
    sixth = h / 6.0
    half = 0.5 * h
    for k in range(n):
        g0 = gs[2 * k]
        gm = gs[2 * k + 1]
        g1 = gs[2 * k + 2]
        t_next = float(ts[k + 1])
        try:
            a1 = _rhs_reduced_raw(u, n1, n2, g0, zeta)
            a2 = _rhs_reduced_raw(u + half * a1[0], n1 + half * a1[1],
                                  n2 + half * a1[2], gm, zeta)
            a3 = _rhs_reduced_raw(u + half * a2[0], n1 + half * a2[1],
                                  n2 + half * a2[2], gm, zeta)
            a4 = _rhs_reduced_raw(u + h * a3[0], n1 + h * a3[1], n2 + h * a3[2],
                                  g1, zeta)
        except OverflowError:
            raise IntegrationError(
                f"state overflow while stepping to t_tilde = {t_next!r}; "
                "the step size is too large for this pump",
                t_tilde=t_next) from None
        u += sixth * (a1[0] + 2.0 * (a2[0] + a3[0]) + a4[0])
        n1 += sixth * (a1[1] + 2.0 * (a2[1] + a3[1]) + a4[1])
        n2 += sixth * (a1[2] + 2.0 * (a2[2] + a3[2]) + a4[2])
        if not (math.isfinite(u) and math.isfinite(n1) and math.isfinite(n2)):
            raise IntegrationError(
                f"non-finite state (u={u!r}, n1={n1!r}, n2={n2!r}) at "
                f"t_tilde = {t_next!r}", t_tilde=t_next)
        u = _clamp(u, t_next, "u")
        n1 = _clamp(n1, t_next, "n1")
        n2 = _clamp(n2, t_next, "n2")
        u_arr[k + 1], n1_arr[k + 1], n2_arr[k + 1] = u, n1, n2
        d_arr[k + 1] = (1.0 + n1 + n2) * math.exp(-2.0 * u)
    return Trajectory(step=h, t_tilde=ts, u=u_arr,
                      phi=np.full(n + 1, initial.phi), n1=n1_arr, n2=n2_arr,
                      g=gs[::2].copy(), delta_sq=d_arr)


@dataclass(frozen=True)
class MinimumVariance:
    """Located minimum of the correlation variance along a trajectory."""

    t_min: float
    delta_sq_min: float
    state: SqueezedThermalState
    boundary: bool = False


def parabolic_vertex(h: float, d_minus: float, d_center: float, d_plus: float):
    """Vertex (time offset from center, value) of the parabola through three samples.

    Returns (0, d_center) when the samples are degenerate (flat or non-convex).
    """
    den = d_minus - 2.0 * d_center + d_plus
    if not (den > 0.0 and math.isfinite(den)):
        return 0.0, d_center
    off = 0.5 * h * (d_minus - d_plus) / den
    val = d_center - (d_minus - d_plus) ** 2 / (8.0 * den)
    return off, val


def find_minimum_variance(traj: Trajectory, delta_theta: float = 0.0) -> MinimumVariance:
    """Global minimum of the correlation variance over the sampled trajectory.

    The discrete minimum is refined by parabolic interpolation through the
    three bracketing samples.  A minimum on the window boundary cannot be
    refined and raises a WindowBoundaryWarning (window too short).  With a
    homodyne angle offset the minimized series is the offset variance.
    """
    if len(traj) == 0:
        raise ValueError("trajectory is empty")
    if delta_theta == 0.0:
        series = traj.delta_sq
    else:
        w = 2.0 * math.sin(0.5 * delta_theta) ** 2
        series = (1.0 + traj.n1 + traj.n2) * (np.exp(-2.0 * traj.u)
                                              + w * np.sinh(2.0 * traj.u))
    i = int(np.argmin(series))
    state = traj.state_at(i)
    if i == 0 or i == len(traj) - 1:
        warnings.warn(
            f"correlation-variance minimum sits on the window boundary at "
            f"t_tilde = {float(traj.t_tilde[i])!r}; the window is too short",
            WindowBoundaryWarning, stacklevel=2)
        return MinimumVariance(t_min=float(traj.t_tilde[i]),
                               delta_sq_min=float(series[i]), state=state,
                               boundary=True)
    off, val = parabolic_vertex(traj.step, float(series[i - 1]), float(series[i]),
                                float(series[i + 1]))
    return MinimumVariance(t_min=float(traj.t_tilde[i]) + off, delta_sq_min=val,
                           state=state, boundary=False)


__all__ = [
    "IntegratorConfig", "Trajectory", "TrajectoryPoint", "MinimumVariance",
    "rhs_reduced", "rhs_general", "squeezing_phase", "integrate",
    "find_minimum_variance", "parabolic_vertex",
    "U_SINGULARITY_FLOOR", "NEGATIVE_CLAMP",
]
