"""Domain types and closed-form functions of the two-mode squeezed thermal state.

A lossy two-mode cavity driven by a classical pump through a chi(2)
nonlinearity stays in a squeezed two-mode thermal state for all times, so a
single squeezing amplitude u, a squeezing phase phi and one thermal photon
number per mode fully describe the field.  Everything here is a closed-form
function of those four numbers: thermal decay, quadrature noises, the
correlation variance of the joint quadratures, and the inseparability test
on that variance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class CavityParams:
    """Static cavity physics: intensity decay rates, mode frequencies, drive phase.

    gamma1, gamma2 are the intensity decay rates of the two modes (1/time),
    omega1, omega2 the signal/idler angular frequencies (rad/time), and theta
    the phase of the product of the nonlinear coefficient and the pump field
    at the initial time, which fixes the initial squeezing phase.
    """

    gamma1: float
    gamma2: float
    omega1: float = 0.0
    omega2: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if not (self.gamma1 > 0.0 and self.gamma2 > 0.0):
            raise ValueError("intensity decay rates must be positive")

    @property
    def gamma_plus(self) -> float:
        """Average decay rate (Gamma1 + Gamma2)/2."""
        return (self.gamma1 + self.gamma2) / 2.0

    @property
    def gamma_minus(self) -> float:
        """Half difference of the decay rates (Gamma1 - Gamma2)/2."""
        return (self.gamma1 - self.gamma2) / 2.0

    @property
    def zeta(self) -> float:
        """Loss asymmetry Gamma_minus/Gamma_plus; always in (-1, 1)."""
        return self.gamma_minus / self.gamma_plus

    @property
    def omega_s(self) -> float:
        """Sum frequency omega1 + omega2."""
        return self.omega1 + self.omega2


@dataclass(frozen=True)
class SqueezedThermalState:
    """Snapshot of the cavity state: squeezing (u, phi) and thermal numbers (n1, n2).

    t_tilde is the dimensionless time Gamma_plus * t at which the snapshot was
    taken.  Vacuum-initial dynamics keeps u, n1, n2 nonnegative, and the
    constructor enforces that.
    """

    u: float
    phi: float
    n1: float
    n2: float
    t_tilde: float = 0.0

    def __post_init__(self):
        for name in ("u", "n1", "n2"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0.0:
                raise ValueError(f"{name} must be finite and >= 0, got {v!r}")

    @classmethod
    def vacuum(cls, phi: float = 0.0, t_tilde: float = 0.0) -> "SqueezedThermalState":
        return cls(u=0.0, phi=phi, n1=0.0, n2=0.0, t_tilde=t_tilde)

    @property
    def total_thermal(self) -> float:
        return self.n1 + self.n2


@dataclass(frozen=True)
class ThermalOccupation:
    """Boltzmann variable x of a single-mode thermal state and its mean occupation.

    x = exp(-hbar*omega / kB*T) in (0, 1); the mean photon number is
    n = x/(1 - x).  Temperature itself is never needed downstream, so only x
    (equivalently n) is stored.
    """

    x: float

    def __post_init__(self):
        if not (0.0 <= self.x < 1.0):
            raise ValueError(f"Boltzmann variable must be in [0, 1), got {self.x!r}")

    @property
    def n(self) -> float:
        return self.x / (1.0 - self.x)

    @classmethod
    def from_mean_photons(cls, n: float) -> "ThermalOccupation":
        if n < 0.0:
            raise ValueError("mean photon number must be >= 0")
        return cls(x=n / (1.0 + n))


def thermal_decay(n0_1: float, n0_2: float, params: CavityParams, t: float):
    """Closed-form decay of the thermal photon numbers, n_j(t) = n_j(0) exp(-Gamma_j t).

    With the pump off a thermal state stays thermal; each mode's occupation
    simply decays at its own intensity rate.
    """
    if t < 0.0:
        raise ValueError("time must be >= 0")
    if n0_1 < 0.0 or n0_2 < 0.0:
        raise ValueError("initial occupations must be >= 0")
    return n0_1 * math.exp(-params.gamma1 * t), n0_2 * math.exp(-params.gamma2 * t)


def quadrature_noise(state: SqueezedThermalState, mode: int) -> float:
    """Single-mode quadrature noise; angle-independent for this state family.

    Returns sqrt(cosh(2u)/4 + cosh(u)^2 n_j / 2 + sinh(u)^2 n_k / 2) with k the
    other mode.  The phase-space uncertainty region of either mode alone is a
    circle of radius >= 1/2: a squeezed thermal state shows no single-mode
    squeezing, only joint-quadrature squeezing.
    """
    if mode == 1:
        n_own, n_other = state.n1, state.n2
    elif mode == 2:
        n_own, n_other = state.n2, state.n1
    else:
        raise ValueError(f"mode must be 1 or 2, got {mode!r}")
    c = math.cosh(state.u)
    s = math.sinh(state.u)
    return math.sqrt(0.25 * math.cosh(2.0 * state.u)
                     + 0.5 * c * c * n_own + 0.5 * s * s * n_other)


def correlation_variance(state: SqueezedThermalState) -> float:
    """Correlation variance of the joint quadratures at phase-matched angles.

    With the homodyne angles locked to the squeezing phase (beta1 + beta2 =
    -phi) the fast oscillations drop out and the sum of the X and Y joint
    quadrature variances is (1 + n1 + n2) exp(-2u).
    """
    return (1.0 + state.n1 + state.n2) * math.exp(-2.0 * state.u)


def correlation_variance_offset(state: SqueezedThermalState, delta_theta: float) -> float:
    """Correlation variance with homodyne angle offset delta_theta from phase matching.

    Equals (1 + n1 + n2) [cosh(2u) - cos(delta_theta) sinh(2u)].  Evaluated as
    (1 + n1 + n2) [exp(-2u) + 2 sin^2(delta_theta/2) sinh(2u)], which is the
    same expression rearranged so that delta_theta = 0 reproduces
    correlation_variance exactly and large u does not cancel catastrophically.
    """
    w = 2.0 * math.sin(0.5 * delta_theta) ** 2
    return (1.0 + state.n1 + state.n2) * (
        math.exp(-2.0 * state.u) + w * math.sinh(2.0 * state.u))


def is_entangled(variance: float) -> bool:
    """Inseparability test: a correlation variance below 1 certifies entanglement.

    The boundary value 1 (vacuum level) is excluded.
    """
    if variance < 0.0:
        raise ValueError("correlation variance must be >= 0")
    return variance < 1.0


def _joint_variance(state: SqueezedThermalState, angle: float) -> float:
    # (1/2)(1 + n1 + n2)[cosh 2u - cos(angle) sinh 2u]; angle = phi + beta1 + beta2
    return 0.5 * (1.0 + state.n1 + state.n2) * (
        math.cosh(2.0 * state.u) - math.cos(angle) * math.sinh(2.0 * state.u))


def sum_quadrature_variance(state: SqueezedThermalState, beta_sum: float) -> float:
    """Variance of X = chi1(beta1) + chi2(beta2); depends only on beta1 + beta2."""
    return _joint_variance(state, state.phi + beta_sum)


def difference_quadrature_variance(state: SqueezedThermalState, beta_sum: float) -> float:
    """Variance of Y = chi1(beta1 + pi/2) - chi2(beta2 + pi/2).

    The pi/2 shifts advance the pair-covariance angle by pi, flipping its
    sign, and the relative minus in Y flips it back, so Y carries exactly the
    variance of X.  The reduction is done analytically and both functions
    evaluate the identical expression, keeping the equality exact in floats.
    """
    return _joint_variance(state, state.phi + beta_sum)
