"""Brute-force master-equation oracle on a truncated two-mode Fock basis.

Validates the squeezed-thermal closed form against a direct density-matrix
integration of the same master equation.  Runs in the frame rotating at the
signal/idler frequencies, where the resonant pump carrier cancels and the
pair coupling is a slowly varying envelope; the phase-matched correlation
variance is frame-invariant, so oracle and closed form are compared on
occupations, |<b1 b2>| and the variance only.

Not a performance path: dense matrices at small photon cutoffs.  The state is
stored as a ((n_max+1)^2, (n_max+1)^2) matrix; internally the right-hand side
acts on the (D, D, D, D) reshape with pure slice arithmetic, so one step costs
O(D^4) instead of the O(D^6) of generic matrix products.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import FockTruncationError, FockTruncationWarning, IntegrationError
from .pump import PumpModel, pump_strength

# fraction of trace allowed in the top two Fock shells during evolution
SHELL_POPULATION_LIMIT = 1e-5
TRACE_DRIFT_LIMIT = 1e-6


@dataclass
class FockDensityMatrix:
    """Two-mode density matrix on the product basis |n1, n2> with n_j <= n_max."""

    n_max: int
    elements: np.ndarray

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("photon-number cutoff must be >= 1")
        d = (self.n_max + 1) ** 2
        self.elements = np.asarray(self.elements, dtype=complex)
        if self.elements.shape != (d, d):
            raise ValueError(f"expected a {d} x {d} matrix for n_max = {self.n_max}, "
                             f"got shape {self.elements.shape}")

    @classmethod
    def vacuum(cls, n_max: int) -> "FockDensityMatrix":
        d = (n_max + 1) ** 2
        rho = np.zeros((d, d), dtype=complex)
        rho[0, 0] = 1.0
        return cls(n_max=n_max, elements=rho)

    def as_tensor(self) -> np.ndarray:
        """View of the matrix as a (D, D, D, D) tensor indexed |n1 n2><m1 m2|."""
        d1 = self.n_max + 1
        return self.elements.reshape(d1, d1, d1, d1)

    def trace(self) -> float:
        return float(np.trace(self.elements).real)

    def hermiticity_defect(self) -> float:
        return float(np.abs(self.elements - self.elements.conj().T).max())

    def min_population(self) -> float:
        return float(np.diagonal(self.elements).real.min())

    def purity(self) -> float:
        return float(np.einsum("ij,ji->", self.elements, self.elements).real)

    def shell_population(self, shells: int = 2) -> float:
        """Total population with either mode within `shells` levels of the cutoff."""
        d1 = self.n_max + 1
        diag = np.diagonal(self.elements).real.reshape(d1, d1)
        lo = d1 - shells
        return float(diag[lo:, :].sum() + diag[:lo, lo:].sum())


@dataclass(frozen=True)
class OracleMoments:
    """Second moments extracted from a density matrix."""

    mean_n1: float
    mean_n2: float
    pair_corr: complex
    delta_sq: float


def annihilation_operator(n_max: int) -> np.ndarray:
    """Single-mode annihilation matrix b|n> = sqrt(n)|n-1> on n <= n_max."""
    return np.diag(np.sqrt(np.arange(1.0, n_max + 1)), k=1)


def build_hamiltonian(coupling: complex, n_max: int) -> np.ndarray:
    """Rotating-frame pair Hamiltonian over hbar: coupling b1+ b2+ + conj b1 b2.

    `coupling` is gamma E_P(t)/hbar with the resonant carrier removed; the
    free-evolution terms vanish in this frame.  The result is Hermitian.
    """
    if n_max < 1:
        raise ValueError("photon-number cutoff must be >= 1")
    b = annihilation_operator(n_max)
    pair_lower = np.kron(b, b)
    return coupling * pair_lower.conj().T + np.conj(coupling) * pair_lower


@functools.lru_cache(maxsize=8)
def _workspace(n_max: int):
    d1 = n_max + 1
    sq = np.sqrt(np.arange(d1, dtype=float))
    pair = sq[1:, None] * sq[None, 1:]                      # sqrt(n1 n2), n >= 1
    jump1 = sq[1:, None, None, None] * sq[None, None, 1:, None]
    jump2 = sq[None, 1:, None, None] * sq[None, None, None, 1:]
    nv = np.arange(d1, dtype=float)
    return sq, pair, jump1, jump2, nv


def _anticommutator_weights(n_max: int, gamma1: float, gamma2: float) -> np.ndarray:
    _, _, _, _, nv = _workspace(n_max)
    return 0.5 * (gamma1 * (nv[:, None, None, None] + nv[None, None, :, None])
                  + gamma2 * (nv[None, :, None, None] + nv[None, None, None, :]))


def _rhs_tensor(r: np.ndarray, coupling: complex, gamma1: float, gamma2: float,
                pair, jump1, jump2, weights) -> np.ndarray:
    """d rho / dt as a (D,D,D,D) tensor; commutator plus both dissipators."""
    c = coupling
    cc = np.conj(coupling)
    hr = np.zeros_like(r)
    hr[1:, 1:, :, :] = c * pair[:, :, None, None] * r[:-1, :-1, :, :]
    hr[:-1, :-1, :, :] += cc * pair[:, :, None, None] * r[1:, 1:, :, :]
    rh = np.zeros_like(r)
    rh[:, :, :-1, :-1] = c * pair[None, None, :, :] * r[:, :, 1:, 1:]
    rh[:, :, 1:, 1:] += cc * pair[None, None, :, :] * r[:, :, :-1, :-1]
    dr = -1j * (hr - rh)
    dr[:-1, :, :-1, :] += gamma1 * jump1 * r[1:, :, 1:, :]
    dr[:, :-1, :, :-1] += gamma2 * jump2 * r[:, 1:, :, 1:]
    dr -= weights * r
    return dr


def _rk4_tensor(r: np.ndarray, couplings, gamma1: float, gamma2: float, dt: float,
                pair, jump1, jump2, weights) -> np.ndarray:
    """One RK4 step; couplings = (start, midpoint, end) values of the drive."""
    c0, cm, c1 = couplings
    k1 = _rhs_tensor(r, c0, gamma1, gamma2, pair, jump1, jump2, weights)
    k2 = _rhs_tensor(r + 0.5 * dt * k1, cm, gamma1, gamma2, pair, jump1, jump2, weights)
    k3 = _rhs_tensor(r + 0.5 * dt * k2, cm, gamma1, gamma2, pair, jump1, jump2, weights)
    k4 = _rhs_tensor(r + dt * k3, c1, gamma1, gamma2, pair, jump1, jump2, weights)
    out = r + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
    # re-symmetrize; the generator preserves hermiticity, this absorbs roundoff
    return 0.5 * (out + out.conj().transpose(2, 3, 0, 1))


def lindblad_step(rho: FockDensityMatrix, coupling: complex, gamma1: float,
                  gamma2: float, dt: float) -> FockDensityMatrix:
    """One RK4 step of the master equation with the drive held at `coupling`.

    Trace is never renormalized; a per-step drift beyond 1e-6 means the step
    is too large and raises.  Hermiticity is re-symmetrized after the step.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    scale = max(gamma1, gamma2, abs(coupling))
    if dt * scale >= 0.1:
        raise ValueError(f"dt * max(rates) = {dt * scale:.3g} >= 0.1; "
                         "reduce the step for a stable RK4 integration")
    _, pair, jump1, jump2, _ = _workspace(rho.n_max)
    weights = _anticommutator_weights(rho.n_max, gamma1, gamma2)
    r = _rk4_tensor(rho.as_tensor(), (coupling, coupling, coupling), gamma1, gamma2,
                    dt, pair, jump1, jump2, weights)
    out = FockDensityMatrix(n_max=rho.n_max,
                            elements=r.reshape(rho.elements.shape))
    drift = abs(out.trace() - rho.trace())
    if drift > TRACE_DRIFT_LIMIT:
        raise IntegrationError(f"trace drifted by {drift:.2e} in a single step; "
                               "reduce dt")
    return out


def build_squeezed_thermal(u: float, phi: float, n1: float, n2: float,
                           n_max: int) -> FockDensityMatrix:
    """Squeezed two-mode thermal state S(xi) rho_th S(xi)^dagger, xi = u e^{i phi}.

    rho_th is the product of single-mode geometric (thermal) states with mean
    occupations n1, n2; S is the pair squeezing operator, built by matrix
    exponential.  Warns when the cutoff is marginal for the requested state.
    """
    if n_max < 1:
        raise ValueError("photon-number cutoff must be >= 1")
    if u < 0.0 or n1 < 0.0 or n2 < 0.0:
        raise ValueError("squeezing amplitude and occupations must be >= 0")
    d1 = n_max + 1
    if (max(n1, n2) + 1.0) * math.exp(2.0 * u) > 0.5 * n_max:
        warnings.warn(
            f"(n+1) e^{{2u}} = {(max(n1, n2) + 1.0) * math.exp(2.0 * u):.3g} is not "
            f"small against n_max = {n_max}; moments will be truncation-limited",
            FockTruncationWarning, stacklevel=2)
    probs = []
    deficit = 1.0
    for n in (n1, n2):
        x = n / (1.0 + n)
        p = (1.0 - x) * x ** np.arange(d1) if n > 0.0 else np.eye(1, d1, 0)[0]
        deficit *= p.sum()
        probs.append(p)
    if 1.0 - deficit > 1e-8:
        warnings.warn(
            f"thermal tail beyond the cutoff carries {1.0 - deficit:.2e} of the "
            "trace", FockTruncationWarning, stacklevel=2)
    rho_th = np.diag(np.outer(probs[0], probs[1]).ravel()).astype(complex)
    if u == 0.0:
        return FockDensityMatrix(n_max=n_max, elements=rho_th)
    b = annihilation_operator(n_max)
    pair_lower = np.kron(b, b)
    xi = u * complex(math.cos(phi), math.sin(phi))
    generator = np.conj(xi) * pair_lower - xi * pair_lower.conj().T
    squeezer = expm(generator)
    rho = squeezer @ rho_th @ squeezer.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return FockDensityMatrix(n_max=n_max, elements=rho)


def extract_moments(rho: FockDensityMatrix) -> OracleMoments:
    """Occupations, pair correlation and the angle-optimized correlation variance.

    For states with vanishing <b_j>, <b_j^2> and <b1 b2+> (every state this
    package produces), the variance sum minimized over homodyne angles is
    1 + <n1> + <n2> - 2 |<b1 b2>|.
    """
    r = rho.as_tensor()
    sq, _, _, _, nv = _workspace(rho.n_max)
    diag = np.einsum("ijij->ij", r).real
    mean_n1 = float((diag * nv[:, None]).sum())
    mean_n2 = float((diag * nv[None, :]).sum())
    idx = np.arange(1, rho.n_max + 1)
    pair_corr = complex((sq[idx][:, None] * sq[idx][None, :]
                         * r[idx[:, None], idx[None, :],
                             idx[:, None] - 1, idx[None, :] - 1]).sum())
    delta_sq = 1.0 + mean_n1 + mean_n2 - 2.0 * abs(pair_corr)
    return OracleMoments(mean_n1=mean_n1, mean_n2=mean_n2, pair_corr=pair_corr,
                         delta_sq=delta_sq)


@dataclass
class OracleRun:
    """Sampled moments from one master-equation integration."""

    t_tilde: np.ndarray
    moments: list
    final: FockDensityMatrix
    max_trace_error: float
    max_hermiticity_defect: float
    max_shell_population: float


def evolve(pump: PumpModel, zeta: float, n_max: int, t_start: float, t_end: float,
           step: float, n_samples: int = 21,
           initial: FockDensityMatrix | None = None) -> OracleRun:
    """Integrate the master equation over [t_start, t_end] in dimensionless time.

    Decay rates are (1 + zeta, 1 - zeta) and the pair drive is g(t)/2 with a
    real phase convention (the compared quantities are phase-independent).
    The drive is evaluated at the RK4 stage times.  Monitors trace drift,
    hermiticity and the population of the top two Fock shells; the latter
    aborts when it exceeds 1e-5 of the trace.
    """
    if abs(zeta) >= 1.0:
        raise ValueError(f"loss asymmetry must satisfy |zeta| < 1, got {zeta!r}")
    if n_samples < 2:
        raise ValueError("need at least two samples")
    n = int(round((t_end - t_start) / step))
    if n < n_samples - 1:
        raise ValueError("window too short for the requested sampling")
    gamma1 = 1.0 + zeta
    gamma2 = 1.0 - zeta
    _, pair, jump1, jump2, _ = _workspace(n_max)
    weights = _anticommutator_weights(n_max, gamma1, gamma2)
    couplings = 0.5 * np.asarray(
        pump_strength(t_start + 0.5 * step * np.arange(2 * n + 1), pump), dtype=float)
    rho = initial if initial is not None else FockDensityMatrix.vacuum(n_max)
    if rho.n_max != n_max:
        raise ValueError("initial state cutoff does not match n_max")
    r = rho.as_tensor().copy()
    every = max(1, n // (n_samples - 1))
    sample_ts = []
    sampled = []
    max_tr = 0.0
    max_herm = 0.0
    max_shell = 0.0
    for k in range(n + 1):
        t = t_start + k * step
        snapshot = FockDensityMatrix(n_max=n_max,
                                     elements=r.reshape(rho.elements.shape))
        max_tr = max(max_tr, abs(snapshot.trace() - 1.0))
        shell = snapshot.shell_population()
        max_shell = max(max_shell, shell)
        if shell > SHELL_POPULATION_LIMIT:
            raise FockTruncationError(
                f"population {shell:.2e} reached the top two Fock shells at "
                f"t_tilde = {t:.4f}; increase n_max")
        if k % every == 0 or k == n:
            max_herm = max(max_herm, snapshot.hermiticity_defect())
            sample_ts.append(t)
            sampled.append(extract_moments(snapshot))
        if k == n:
            break
        stage = (couplings[2 * k], couplings[2 * k + 1], couplings[2 * k + 2])
        r = _rk4_tensor(r, stage, gamma1, gamma2, step, pair, jump1, jump2, weights)
    final = FockDensityMatrix(n_max=n_max, elements=r.reshape(rho.elements.shape))
    return OracleRun(t_tilde=np.asarray(sample_ts), moments=sampled, final=final,
                     max_trace_error=max_tr, max_hermiticity_defect=max_herm,
                     max_shell_population=max_shell)
