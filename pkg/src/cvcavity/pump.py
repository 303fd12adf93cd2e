"""Pump models: constant drive, bare Gaussian pulse, and the ring-filtered Gaussian.

A side-coupled microring filters an incident Gaussian pulse; the in-ring
field is the channel field times a buildup envelope that rises with the pulse
and drains at the ring decay rate.  The closed-form envelope involves
exp(z^2) erfc(z), which is evaluated in combined-exponent form so the pump
strength stays finite arbitrarily long after the pulse.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import erfcx

from .errors import RingRegimeWarning

SQRT_8LN2 = math.sqrt(8.0 * math.log(2.0))
SQRT_PI = math.sqrt(math.pi)
SPEED_OF_LIGHT = 299_792_458.0

# The in-ring closed form is derived for (1 - sigma_P a_P) << 1; beyond this
# threshold results are still computed but flagged.
REGIME_THRESHOLD = 0.2


@dataclass(frozen=True)
class RingParams:
    """Point-coupled ring resonator: self-coupling, round-trip loss, geometry.

    kappa_p is derived from sigma_p through the lossless coupler relation
    kappa^2 + sigma^2 = 1.  t_r is the round-trip time; radius, n_eff and the
    mode numbers are informational and only checked for consistency.
    """

    sigma_p: float
    a_p: float
    t_r: float = 1.0
    radius: float | None = None
    n_eff: float | None = None
    m_p: int | None = None
    m_1: int | None = None
    m_2: int | None = None

    def __post_init__(self):
        if not (0.0 < self.sigma_p < 1.0):
            raise ValueError(f"self-coupling must be in (0, 1), got {self.sigma_p!r}")
        if not (0.0 < self.a_p <= 1.0):
            raise ValueError(f"round-trip attenuation must be in (0, 1], got {self.a_p!r}")
        if self.t_r <= 0.0:
            raise ValueError("round-trip time must be positive")
        if (self.m_p is not None and self.m_1 is not None and self.m_2 is not None
                and self.m_p != self.m_1 + self.m_2):
            raise ValueError("pump mode number must equal the sum of signal and idler mode numbers")

    @property
    def kappa_p(self) -> float:
        return math.sqrt(1.0 - self.sigma_p * self.sigma_p)

    @property
    def loss_product(self) -> float:
        """sigma_p * a_p; the buildup diverges as this approaches 1."""
        return self.sigma_p * self.a_p

    @property
    def regime_valid(self) -> bool:
        """True when (1 - sigma_p a_p) is small enough for the filtered closed form."""
        return (1.0 - self.loss_product) <= REGIME_THRESHOLD


def _restore_shape(values: np.ndarray, scalar: bool):
    return float(values[()]) if scalar else values


def _gauss_erfcx(a, b, t):
    """exp(-(b t)^2) * sqrt(pi) * exp(z^2) erfc(z) at z = a - b t, overflow-safe.

    For z < 0, erfc(z) = 2 - erfc(-z) and the exponents combine to
    z^2 - (b t)^2 = a^2 - 2 a b t, which is bounded for all t; the naive
    product overflows once z^2 exceeds ~709.
    """
    a_, b_, t_ = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float),
                                     np.asarray(t, float))
    z = a_ - b_ * t_
    gauss_log = -((b_ * t_) ** 2)
    out = np.empty(z.shape)
    pos = z >= 0.0
    out[pos] = SQRT_PI * erfcx(z[pos]) * np.exp(gauss_log[pos])
    neg = ~pos
    out[neg] = SQRT_PI * (2.0 * np.exp(a_[neg] ** 2 - 2.0 * a_[neg] * b_[neg] * t_[neg])
                          - erfcx(-z[neg]) * np.exp(gauss_log[neg]))
    return out


def channel_field_envelope(t, tau: float, t_r: float):
    """Gaussian channel-pulse envelope sqrt(T_R/tau) exp(-2 ln2 t^2 / tau^2).

    tau is the FWHM of the pulse intensity.  The 1/sqrt(tau) scaling keeps the
    pulse energy independent of the duration.  The optical carrier and the
    overall amplitude are handled by the caller.
    """
    if tau <= 0.0 or t_r <= 0.0:
        raise ValueError("pulse duration and round-trip time must be positive")
    scalar = np.isscalar(t) or np.ndim(t) == 0
    t_ = np.asarray(t, float)
    out = math.sqrt(t_r / tau) * np.exp(-2.0 * math.log(2.0) * (t_ / tau) ** 2)
    return _restore_shape(np.asarray(out), scalar)


def buildup(omega, ring: RingParams):
    """Intensity buildup of the ring relative to the channel at frequency omega.

    kappa^2 a^2 / (1 - 2 sigma a cos(omega T_R) + sigma^2 a^2); peaks on ring
    resonances where cos(omega T_R) = 1.
    """
    scalar = np.isscalar(omega) or np.ndim(omega) == 0
    w = np.asarray(omega, float)
    sa = ring.loss_product
    k2a2 = (ring.kappa_p * ring.a_p) ** 2
    out = k2a2 / (1.0 - 2.0 * sa * np.cos(w * ring.t_r) + sa * sa)
    return _restore_shape(np.asarray(out), scalar)


def ring_field_factor(t_tilde, tau_tilde: float, ring: RingParams, gamma_plus: float):
    """In-ring field envelope over the channel peak field, |E_R(t)| / |E_CH|_peak.

    Closed form for a resonant carrier in the large-buildup regime:
    (tau kappa a / (sqrt(8 ln2) T_R)) * sqrt(pi) e^{z^2} erfc(z) * gaussian(t),
    with z = (1 - sigma a) tau / (sqrt(8 ln2) T_R) - sqrt(8 ln2) t / (2 tau).
    Times are dimensionless (scaled by gamma_plus); finite for all t_tilde.
    """
    if tau_tilde <= 0.0:
        raise ValueError("pulse duration must be positive")
    if gamma_plus <= 0.0:
        raise ValueError("decay rate must be positive")
    if not ring.regime_valid:
        warnings.warn(
            f"(1 - sigma_p a_p) = {1.0 - ring.loss_product:.3f} exceeds "
            f"{REGIME_THRESHOLD}; the filtered closed form is used outside its "
            "accuracy regime", RingRegimeWarning, stacklevel=2)
    tau = tau_tilde / gamma_plus
    a_coef = (1.0 - ring.loss_product) * tau / (SQRT_8LN2 * ring.t_r)
    b_coef = SQRT_8LN2 / (2.0 * tau_tilde)
    pref = tau * ring.kappa_p * ring.a_p / (SQRT_8LN2 * ring.t_r)
    scalar = np.isscalar(t_tilde) or np.ndim(t_tilde) == 0
    out = pref * _gauss_erfcx(a_coef, b_coef, t_tilde)
    return _restore_shape(np.asarray(out), scalar)


def _ring_strength(t_tilde, tau_tilde, ring: RingParams, g0):
    """Dimensionless in-ring pump strength; broadcasts over t_tilde/tau_tilde/g0.

    Assumes the signal/idler average decay rate equals the ring pump decay
    rate Gamma_P = 2 (1 - sigma a)/T_R, which removes T_R from the expression:
    g(t) = (g0/sqrt(2)) kappa a / sqrt(1 - sigma a) * sqrt(tau/(8 ln2))
           * exp(-2 ln2 t^2/tau^2) * sqrt(pi) e^{z^2} erfc(z).
    The sqrt(2) prefactor follows from sqrt(tau/(T_R Gamma_P)) with
    T_R Gamma_P = 2 (1 - sigma a); it reproduces the peak-strength constant
    0.653 at the optimum pulse duration.
    """
    tau = np.asarray(tau_tilde, float)
    pref = (np.asarray(g0, float) / math.sqrt(2.0)) * ring.kappa_p * ring.a_p \
        / math.sqrt(1.0 - ring.loss_product) * np.sqrt(tau / (8.0 * math.log(2.0)))
    a_coef = tau / (2.0 * SQRT_8LN2)
    b_coef = SQRT_8LN2 / (2.0 * tau)
    return pref * _gauss_erfcx(a_coef, b_coef, t_tilde)


class PumpModel:
    """Evaluator of the dimensionless pumping strength g(t_tilde) >= 0."""

    def strength(self, t_tilde):
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantPump(PumpModel):
    """Continuous-wave drive with constant strength g."""

    g: float

    def __post_init__(self):
        if self.g < 0.0:
            raise ValueError("pump strength must be >= 0")

    def strength(self, t_tilde):
        scalar = np.isscalar(t_tilde) or np.ndim(t_tilde) == 0
        out = np.full(np.shape(t_tilde), self.g, dtype=float)
        return _restore_shape(out, scalar)


@dataclass(frozen=True)
class GaussianPump(PumpModel):
    """Unfiltered Gaussian drive with peak strength g0 and intensity FWHM tau_tilde."""

    g0: float
    tau_tilde: float

    def __post_init__(self):
        if self.g0 < 0.0:
            raise ValueError("pump strength must be >= 0")
        if self.tau_tilde <= 0.0:
            raise ValueError("pulse duration must be positive")

    def strength(self, t_tilde):
        scalar = np.isscalar(t_tilde) or np.ndim(t_tilde) == 0
        t_ = np.asarray(t_tilde, float)
        out = self.g0 * np.exp(-2.0 * math.log(2.0) * (t_ / self.tau_tilde) ** 2)
        return _restore_shape(np.asarray(out), scalar)


@dataclass(frozen=True)
class RingGaussianPump(PumpModel):
    """Gaussian pulse filtered by the side-coupled ring; peak input strength scale g0."""

    g0: float
    tau_tilde: float
    ring: RingParams

    def __post_init__(self):
        if self.g0 < 0.0:
            raise ValueError("pump strength must be >= 0")
        if self.tau_tilde <= 0.0:
            raise ValueError("pulse duration must be positive")
        if not self.ring.regime_valid:
            warnings.warn(
                f"(1 - sigma_p a_p) = {1.0 - self.ring.loss_product:.3f} exceeds "
                f"{REGIME_THRESHOLD}; the ring-filtered pump is used outside its "
                "accuracy regime", RingRegimeWarning, stacklevel=2)

    @property
    def regime_valid(self) -> bool:
        return self.ring.regime_valid

    def strength(self, t_tilde):
        scalar = np.isscalar(t_tilde) or np.ndim(t_tilde) == 0
        out = _ring_strength(t_tilde, self.tau_tilde, self.ring, self.g0)
        return _restore_shape(np.asarray(out), scalar)


def pump_strength(t_tilde, model: PumpModel):
    """Dimensionless pumping strength of `model` at time(s) t_tilde."""
    return model.strength(t_tilde)


def _golden_max(f, lo: float, hi: float, tol: float = 1e-10):
    """Golden-section maximization of a unimodal f on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    invphi2 = (3.0 - math.sqrt(5.0)) / 2.0
    a, b = lo, hi
    h = b - a
    c = a + invphi2 * h
    d = a + invphi * h
    yc, yd = f(c), f(d)
    while h > tol:
        if yc > yd:
            b, d, yd = d, c, yc
            h = invphi * h
            c = a + invphi2 * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            h = invphi * h
            d = a + invphi * h
            yd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def peak_strength(model: PumpModel):
    """Time and value of the pump-strength maximum."""
    if isinstance(model, ConstantPump):
        return 0.0, model.g
    if isinstance(model, GaussianPump):
        return 0.0, model.g0
    if isinstance(model, RingGaussianPump):
        t, v = _golden_max(lambda tt: float(model.strength(tt)),
                           0.0, 4.0 * model.tau_tilde + 10.0)
        return t, v
    t, v = _golden_max(lambda tt: float(model.strength(tt)), -100.0, 100.0)
    return t, v


def _normalized_peak(tau_tilde: float) -> float:
    # peak over time of g / (g0 kappa a / sqrt(1 - sigma a)) for the ring pump
    pref = math.sqrt(tau_tilde / (8.0 * math.log(2.0))) / math.sqrt(2.0)
    a_coef = tau_tilde / (2.0 * SQRT_8LN2)
    b_coef = SQRT_8LN2 / (2.0 * tau_tilde)
    _, v = _golden_max(lambda tt: float(_gauss_erfcx(a_coef, b_coef, tt)),
                       0.0, 4.0 * tau_tilde + 10.0, 1e-11)
    return pref * v


@functools.lru_cache(maxsize=1)
def optimum_tau() -> float:
    """Pulse duration (units of 1/Gamma_plus) maximizing the peak in-ring strength.

    Found by golden-section search; independent of g0 and of the ring
    coupling/loss because they scale the strength multiplicatively.  The
    value is close to 0.684 * sqrt(8 ln2) ~ 1.6107.
    """
    tau, _ = _golden_max(_normalized_peak, 0.1, 10.0, 1e-9)
    return tau


@functools.lru_cache(maxsize=1)
def peak_strength_coefficient() -> float:
    """Peak pump strength at the optimum duration over g0 kappa a / sqrt(1 - sigma a).

    Evaluates to ~0.653; recomputed numerically rather than hardcoded.
    """
    return _normalized_peak(optimum_tau())


def optimum_sigma(a_p: float) -> float:
    """Self-coupling that maximizes the peak strength for round-trip loss a_p.

    Stationary point of kappa a / sqrt(1 - sigma a) over sigma:
    sigma = (1 - sqrt(1 - a^2)) / a, approaching 1 in the lossless limit.
    """
    if not (0.0 < a_p <= 1.0):
        raise ValueError(f"round-trip attenuation must be in (0, 1], got {a_p!r}")
    if a_p == 1.0:
        return 1.0
    return (1.0 - math.sqrt(1.0 - a_p * a_p)) / a_p


def predicted_min_variance(g0: float, ring: RingParams) -> float:
    """Semi-analytic minimum correlation variance 1/(1 + g_max) for equal losses.

    g_max is the peak in-ring strength at the optimum pulse duration,
    g_max = 0.653 g0 kappa a / sqrt(1 - sigma a) with the constant recomputed
    numerically.  Valid when the loss asymmetry is negligible.
    """
    if g0 < 0.0:
        raise ValueError("pump strength must be >= 0")
    g_max = peak_strength_coefficient() * g0 * ring.kappa_p * ring.a_p \
        / math.sqrt(1.0 - ring.loss_product)
    return 1.0 / (1.0 + g_max)


def ring_round_trip_time(radius_um: float, n_eff: float) -> float:
    """Round-trip time in seconds for a ring of given radius (um) and effective index."""
    if radius_um <= 0.0 or n_eff <= 0.0:
        raise ValueError("radius and effective index must be positive")
    return 2.0 * math.pi * radius_um * 1e-6 * n_eff / SPEED_OF_LIGHT


def g0_from_physical(chi2_pm_per_v: float, e0_mv_per_cm: float, lambda_p_nm: float,
                     radius_um: float, n_eff: float, a_p: float, sigma_p: float) -> float:
    """Dimensionless pump amplitude g0 = 2 |gamma| E0 / (hbar Gamma_plus) from lab units.

    |gamma|/hbar = chi2 sqrt(omega1 omega2) with sqrt(omega1 omega2) taken at
    half the pump mode frequency; mode frequencies are c/(n_eff lambda), the
    in-medium convention under which the reference AlGaAs parameter set
    (chi2 = 11 pm/V, E0 = 1 MV/cm, lambda_P = 775 nm, R = 20 um, n_eff = 3)
    lands at g0 ~ 4.  Gamma_plus is identified with the ring pump decay rate.
    """
    chi2 = chi2_pm_per_v * 1e-12          # m/V
    e0 = e0_mv_per_cm * 1e8               # V/m
    lambda_p = lambda_p_nm * 1e-9         # m
    t_r = ring_round_trip_time(radius_um, n_eff)
    gamma_p = 2.0 * (1.0 - sigma_p * a_p) / t_r
    omega_bar = math.pi * SPEED_OF_LIGHT / (n_eff * lambda_p)   # ~ sqrt(omega1 omega2)
    return 2.0 * chi2 * omega_bar * e0 / gamma_p
