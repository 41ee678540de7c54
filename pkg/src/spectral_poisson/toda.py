"""Open Toda lattice: Flaschka encoding, Jacobi-matrix Weyl functions,
constraints, flows, and cross-validation of the Dirac-restricted brackets.

Flaschka convention (one must be pinned; any valid choice is isospectral):

    a_k = exp((q_k - q_{k+1})/2) / 2,      b_k = -p_k / 2.

The Weyl function of the tridiagonal matrix is chi(lambda) =
sum w_k/(lambda_k - lambda) with w_k the squared first components of the
normalized eigenvectors; it lies in Rat'_N (residues sum to one) and is an
R-function: real poles, positive residues, Im chi > 0 in the upper half
plane.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import _kernels
from .brackets import (
    TODA_RESTRICTED,
    BracketSpec,
    QuadratureConfig,
    pushforward,
    structure_matrix,
)
from .errors import (
    DegenerateSpectrum,
    DimensionMismatch,
    LogBranchWarning,
    Phi1Undefined,
    StepSizeError,
)
from .ratfun import WeylRational, from_pole_residue

EIGENGAP_FLOOR = 1e-6


@dataclass(frozen=True)
class TodaState:
    """Positions and momenta of the open lattice."""

    q: np.ndarray
    p: np.ndarray

    @property
    def order(self) -> int:
        return len(self.q)

    def to_json_dict(self) -> dict:
        return {"q": [float(v) for v in self.q], "p": [float(v) for v in self.p]}

    @classmethod
    def from_json_dict(cls, d: dict) -> "TodaState":
        return make_toda_state(d["q"], d["p"])


def make_toda_state(q, p) -> TodaState:
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    if q.ndim != 1 or q.shape != p.shape or len(q) < 1:
        raise DimensionMismatch("q and p must be equal-length 1-d arrays")
    if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
        raise ValueError("state entries must be finite")
    q = q.copy(); q.setflags(write=False)
    p = p.copy(); p.setflags(write=False)
    return TodaState(q, p)


@dataclass(frozen=True)
class JacobiMatrixData:
    """Tridiagonal encoding plus its spectral decomposition."""

    diag: np.ndarray
    offdiag: np.ndarray
    eigenvalues: np.ndarray
    weights: np.ndarray

    @property
    def order(self) -> int:
        return len(self.diag)


def flaschka(state: TodaState) -> JacobiMatrixData:
    """Tridiagonal matrix, eigenvalues (ascending) and first-component weights."""
    b = -0.5 * state.p
    a = 0.5 * np.exp((state.q[:-1] - state.q[1:]) / 2.0)
    if state.order == 1:
        lam = b.copy()
        w = np.array([1.0])
    else:
        lam, vec = scipy.linalg.eigh_tridiagonal(b, a)
        w = vec[0, :] ** 2
    return JacobiMatrixData(b, a, lam, w)


def weyl_from_jacobi(data: JacobiMatrixData) -> WeylRational:
    """chi(lambda) = sum w_k/(lambda_k - lambda), a Rat'_N R-function."""
    return from_pole_residue(data.eigenvalues, data.weights)


def constraint_values(chi: WeylRational, n: int):
    """(Phi_1, Phi_2) for f(z) = z^n on the given Weyl function.

    Phi_1 = sum I_k with I_k = int_inf^{z_k} dz/f: sum log z_k for n = 1,
    sum z_k^{1-n}/(1-n) for n >= 2; divergent for n = 0.  Phi_2 = log sum rho.
    A pole on the negative real axis makes the n = 1 branch ambiguous; the
    principal branch is used and flagged with LogBranchWarning.
    """
    if n == 0:
        raise Phi1Undefined("I_k = int dz/1 diverges at infinity")
    z = chi.poles
    if np.any(np.abs(z) == 0):
        raise ValueError("Phi_1 undefined for a pole at the origin")
    if n == 1:
        if np.any((z.real < 0) & (np.abs(z.imag) < 1e-14)):
            warnings.warn("pole on the negative real axis; principal log branch used",
                          LogBranchWarning)
        phi1 = complex(np.sum(np.log(z)))
    else:
        phi1 = complex(np.sum(z ** (1.0 - n) / (1.0 - n)))
    phi2 = complex(np.log(np.sum(chi.residues)))
    return phi1, phi2


def hamiltonian(state: TodaState) -> float:
    q, p = state.q, state.p
    return float(0.5 * np.sum(p**2) + np.sum(np.exp(q[:-1] - q[1:])))


@dataclass(frozen=True)
class TodaTrajectory:
    times: np.ndarray
    states: tuple

    def __iter__(self):
        return iter(self.states)


def toda_flow(state: TodaState, T: float, dt: float, n_samples: int = 100) -> TodaTrajectory:
    """RK4 for qdot = p, pdot_k = -e^{q_k - q_{k+1}} + e^{q_{k-1} - q_k}
    with free ends."""
    if dt <= 0 or T <= 0:
        raise StepSizeError("need dt > 0 and T > 0")
    n_steps = int(round(T / dt))
    sample_every = max(1, n_steps // max(1, n_samples))
    qs, ps = _kernels.toda_flow_steps(
        np.asarray(state.q, float), np.asarray(state.p, float), float(dt), n_steps, sample_every
    )
    times = np.concatenate([[0.0], dt * sample_every * np.arange(1, len(qs))])
    states = tuple(TodaState(q, p) for q, p in zip(qs, ps))
    return TodaTrajectory(times, states)


def _spectral_coordinates(state: TodaState) -> np.ndarray:
    data = flaschka(state)
    return np.concatenate([data.eigenvalues, data.weights])


def spectral_jacobian(state: TodaState, step: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of (q, p) -> (z_0.., rho_0..)."""
    data = flaschka(state)
    if data.order > 1 and np.min(np.diff(data.eigenvalues)) < EIGENGAP_FLOOR:
        raise DegenerateSpectrum("eigenvalue gap below floor; Jacobian ill-conditioned")
    n = state.order
    base = np.concatenate([state.q, state.p])
    J = np.empty((2 * n, 2 * n))
    for l in range(2 * n):
        h = step * (1.0 + abs(base[l]))
        up = base.copy(); up[l] += h
        dn = base.copy(); dn[l] -= h
        J[:, l] = (
            _spectral_coordinates(TodaState(up[:n], up[n:]))
            - _spectral_coordinates(TodaState(dn[:n], dn[n:]))
        ) / (2 * h)
    return J


def canonical_tensor(n: int) -> np.ndarray:
    """{q_i, p_j} = delta_ij block tensor."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def pushforward_canonical(state: TodaState, step: float = 1e-6) -> np.ndarray:
    """Canonical bracket pushed to (z, rho) coordinates."""
    return pushforward(canonical_tensor(state.order), spectral_jacobian(state, step))


def compare_bracket_families(
    state: TodaState,
    ns=(0, 1, 2),
    cfg: QuadratureConfig | None = None,
    step: float = 1e-6,
) -> dict:
    """Pushforward of the canonical bracket vs restricted matrices per n.

    c2 is taken from the state (log sum rho, zero on Rat'_N); deviations are
    reported raw and after a best scalar fit.  Diagnostic only: the hierarchy
    offset between f = z^n and the classical bracket is reported, not assumed.
    """
    push = pushforward_canonical(state, step)
    chi = weyl_from_jacobi(flaschka(state))
    c2 = float(np.log(np.sum(chi.residues).real))
    scale = float(np.max(np.abs(push)))
    result = {"per_n": {}, "c2": c2}
    best = None
    for n in ns:
        pi = structure_matrix(chi, BracketSpec(TODA_RESTRICTED, n=n, c2=c2), cfg).entries.real
        raw = float(np.max(np.abs(push - pi)) / scale)
        denom = float(np.sum(pi * pi))
        alpha = float(np.sum(pi * push) / denom) if denom > 0 else 0.0
        fitted = float(np.max(np.abs(push - alpha * pi)) / scale)
        result["per_n"][int(n)] = {"raw_deviation": raw, "scale": alpha, "fitted_deviation": fitted}
        if best is None or fitted < result["per_n"][best]["fitted_deviation"]:
            best = int(n)
    result["best_n"] = best
    return result
