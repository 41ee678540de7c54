"""Rational Weyl functions with simple poles.

The central object is a function

    chi(z) = c + sum_k rho_k / (z_k - z)

with N distinct poles z_k and residues rho_k (in the convention above
rho_k = -Res_{z_k} chi).  With c = 0 these are exactly the functions that
vanish at infinity; the class with residues summing to one is the set of
Weyl functions of N x N Jacobi matrices.  Everything is plain complex double
arithmetic; values are immutable after construction.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, DistinctPolesViolated, PoleProximity

# relative pole-separation floor: below this the (gamma_k, q0) chart is meaningless
POLE_RESOLUTION = 1e-12
# evaluation guard around each pole
EVAL_GUARD = 1e-10


def _pairwise_min_distance(z):
    if len(z) < 2:
        return np.inf
    d = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(d, np.inf)
    return d.min()


@dataclass(frozen=True)
class WeylRational:
    """Rational function c + sum rho_k/(z_k - z) with simple, distinct poles.

    Construct through `from_pole_residue`, which validates and normalizes
    (poles sorted by real part, then imaginary part).
    """

    poles: np.ndarray
    residues: np.ndarray
    const_term: complex = 0j

    @property
    def order(self) -> int:
        return len(self.poles)

    def evaluate(self, z):
        """Value at `z` (scalar or array); raises PoleProximity near a pole."""
        z_arr = np.asarray(z, dtype=complex)
        scale = np.maximum(1.0, np.abs(self.poles))
        dist = np.abs(z_arr[..., None] - self.poles)
        if np.any(dist < EVAL_GUARD * scale):
            raise PoleProximity(f"evaluation point {z} within guard of a pole")
        vals = self.const_term + np.sum(self.residues / (self.poles - z_arr[..., None]), axis=-1)
        return vals if z_arr.shape else complex(vals)

    def derivative(self, z):
        """chi'(z) = sum rho_k/(z_k - z)^2, exact for the rational form."""
        z_arr = np.asarray(z, dtype=complex)
        scale = np.maximum(1.0, np.abs(self.poles))
        dist = np.abs(z_arr[..., None] - self.poles)
        if np.any(dist < EVAL_GUARD * scale):
            raise PoleProximity(f"evaluation point {z} within guard of a pole")
        vals = np.sum(self.residues / (self.poles - z_arr[..., None]) ** 2, axis=-1)
        return vals if z_arr.shape else complex(vals)

    def moment(self, j: int):
        """s_j = sum_k rho_k z_k^j; chi - c = -sum_{j>=1} s_{j-1} z^{-j} at infinity."""
        if j < 0:
            raise ValueError("moment order must be nonnegative")
        return complex(np.sum(self.residues * self.poles**j))

    def strip_const(self) -> "WeylRational":
        """The Rat_N part (const term dropped); identity when already zero."""
        if self.const_term == 0:
            return self
        return WeylRational(self.poles, self.residues, 0j)

    def coordinates(self) -> np.ndarray:
        """(z_0..z_{N-1}, rho_0..rho_{N-1}) as one complex vector."""
        return np.concatenate([self.poles, self.residues])

    def with_coordinates(self, x) -> "WeylRational":
        """Same const term, coordinates replaced (no re-sorting: chart moves)."""
        x = np.asarray(x, dtype=complex)
        n = self.order
        if x.shape != (2 * n,):
            raise DimensionMismatch(f"expected {2 * n} coordinates, got {x.shape}")
        return WeylRational(x[:n].copy(), x[n:].copy(), self.const_term)

    def to_json_dict(self) -> dict:
        return {
            "poles": [[float(z.real), float(z.imag)] for z in self.poles],
            "residues": [[float(r.real), float(r.imag)] for r in self.residues],
            "const": [float(self.const_term.real), float(self.const_term.imag)],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "WeylRational":
        poles = [complex(re, im) for re, im in d["poles"]]
        residues = [complex(re, im) for re, im in d["residues"]]
        c = complex(d["const"][0], d["const"][1])
        return from_pole_residue(poles, residues, c)


def from_pole_residue(poles, residues, const_term=0j) -> WeylRational:
    """Build a normalized WeylRational; poles sorted by (Re, Im).

    Raises DistinctPolesViolated when two poles are closer than
    POLE_RESOLUTION * max|z_k| and DimensionMismatch on unequal lengths.
    """
    z = np.asarray(poles, dtype=complex)
    r = np.asarray(residues, dtype=complex)
    if z.ndim != 1 or r.ndim != 1 or len(z) != len(r):
        raise DimensionMismatch(f"poles ({z.shape}) and residues ({r.shape}) must match")
    if len(z) < 1:
        raise DimensionMismatch("need at least one pole")
    tol = POLE_RESOLUTION * max(np.max(np.abs(z)), 0.0)
    if _pairwise_min_distance(z) <= tol:
        raise DistinctPolesViolated("poles coincide within resolution tolerance")
    order = np.lexsort((z.imag, z.real))
    z = z[order].copy()
    r = r[order].copy()
    z.setflags(write=False)
    r.setflags(write=False)
    return WeylRational(z, r, complex(const_term))


@dataclass(frozen=True)
class PoleZeroForm:
    """chi(z) = -q(z)/p(z) with p monic of degree N and deg q <= N-1.

    Coefficients are stored highest power first (numpy polyval convention);
    `gammas` are the roots of q.
    """

    p_coeffs: np.ndarray
    q_coeffs: np.ndarray
    gammas: np.ndarray = field(repr=False)

    @property
    def q0(self) -> complex:
        return complex(self.q_coeffs[0]) if len(self.q_coeffs) else 0j

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        vals = -np.polyval(self.q_coeffs, z) / np.polyval(self.p_coeffs, z)
        return vals if vals.shape else complex(vals)


def to_pole_zero(chi: WeylRational) -> PoleZeroForm:
    """Expand sum rho_k/(z_k - z) over the common denominator p = prod (z - z_k).

    Only valid on the Rat_N part: the constant term must be zero.
    """
    if chi.const_term != 0:
        raise ValueError("pole-zero chart defined for functions vanishing at infinity")
    z, r = chi.poles, chi.residues
    p = np.poly(z)
    # chi * p = -q with q = sum_k rho_k prod_{j != k}(z - z_j)
    q = np.zeros(max(len(z), 1), dtype=complex)
    for k in range(len(z)):
        qk = r[k] * np.atleast_1d(np.poly(np.delete(z, k)))
        q[len(q) - len(qk):] += qk
    # trim numerically-zero leading coefficients (e.g. residues summing to 0)
    mags = np.abs(q)
    cutoff = 1e-14 * (mags.max() or 1.0)
    nz = np.nonzero(mags > cutoff)[0]
    q = q[nz[0]:] if len(nz) else np.zeros(1, dtype=complex)
    gammas = np.roots(q) if len(q) > 1 else np.empty(0, dtype=complex)
    gammas = _polish(q, gammas)
    return PoleZeroForm(p, q, gammas)


def _polish(coeffs, roots, sweeps: int = 3):
    """Newton-polish simple roots against the coefficient form."""
    if len(roots) == 0:
        return roots
    d = np.polyder(coeffs)
    for _ in range(sweeps):
        roots = roots - np.polyval(coeffs, roots) / np.polyval(d, roots)
    return roots


def from_pole_zero(pz: PoleZeroForm) -> WeylRational:
    """Invert the chart: poles from p, residues rho_k = q(z_k)/p'(z_k).

    Roots are Newton-polished and both q(z_k) and p'(z_k) are evaluated in
    product form (through gamma_k and the pole differences); going through
    the monomial coefficients instead loses two to three digits by degree 8.
    """
    poles = _polish(pz.p_coeffs, np.roots(pz.p_coeffs))
    qvals = pz.q0 * np.array(
        [np.prod(zk - pz.gammas) if len(pz.gammas) else 1.0 for zk in poles]
    )
    dpvals = np.array([np.prod(zk - np.delete(poles, k)) for k, zk in enumerate(poles)])
    return from_pole_residue(poles, qvals / dpvals)
