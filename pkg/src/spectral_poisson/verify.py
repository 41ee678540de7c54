"""Quantitative Poisson-structure verification.

Antisymmetry, the Jacobi identity, pencil compatibility and Casimir
functionals are all checked on the coordinate structure matrices: the Jacobi
identity becomes the finite-dimensional tensor identity

    sum_l ( pi_il d_l pi_jk + pi_jl d_l pi_ki + pi_kl d_l pi_ij ) = 0,

with the coordinate derivatives taken by central finite differences in the
(z, rho) chart.  Every check returns a DefectReport with a normalized,
dimensionless defect.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .brackets import (
    THIRD_KIND,
    TODA_RESTRICTED,
    BracketSpec,
    QuadratureConfig,
    structure_matrix,
)
from .errors import Phi1Undefined
from .ratfun import WeylRational, from_pole_residue

FD_STEP = 1e-5  # relative central-difference step in each coordinate


@dataclass(frozen=True)
class DefectReport:
    """Outcome of one verification check; pass iff defect < tolerance."""

    kind: str
    defect: float
    tolerance: float
    state: WeylRational
    specs: tuple
    meta: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.defect < self.tolerance

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "defect": self.defect,
            "tolerance": self.tolerance,
            "pass": bool(self.passed),
            "state": self.state.to_json_dict(),
            "specs": [s.to_json_dict() for s in self.specs],
            "meta": self.meta,
        }


def default_tolerance(spec: BracketSpec) -> float:
    # quadrature noise is larger for the restricted family (extra residue sums)
    return 1e-5 if spec.family == TODA_RESTRICTED else 1e-6


def _structure_field(chi0, specs, weights, cfg, tamper):
    def field_at(x):
        chi = chi0.with_coordinates(x)
        pi = sum(
            w * structure_matrix(chi, s, cfg).entries for s, w in zip(specs, weights)
        )
        if tamper:
            pi = pi.copy()
            pi[0, 1] += tamper
        return pi

    return field_at


def _jacobi_defect_of_field(field_at, x0, step):
    pi0 = field_at(x0)
    m = len(x0)
    dpi = np.empty((m,) + pi0.shape, dtype=complex)
    for l in range(m):
        h = step * (1.0 + abs(x0[l]))
        xp = x0.copy()
        xp[l] += h
        xm = x0.copy()
        xm[l] -= h
        dpi[l] = (field_at(xp) - field_at(xm)) / (2 * h)
    cyc = np.einsum("il,ljk->ijk", pi0, dpi)
    total = cyc + np.transpose(cyc, (1, 2, 0)) + np.transpose(cyc, (2, 0, 1))
    norm = float(np.max(np.abs(pi0)))
    return float(np.max(np.abs(total))) / max(1.0, norm**2)


def jacobi_defect(
    spec: BracketSpec,
    chi: WeylRational,
    step: float = FD_STEP,
    cfg: QuadratureConfig | None = None,
    tolerance: float | None = None,
    tamper: float = 0.0,
) -> DefectReport:
    """Max Jacobi-tensor violation over index triples, central differences."""
    tol = default_tolerance(spec) if tolerance is None else tolerance
    field_at = _structure_field(chi, [spec], [1.0], cfg, tamper)
    defect = _jacobi_defect_of_field(field_at, chi.coordinates(), step)
    meta = {"step": step}
    if tamper:
        meta["tamper"] = tamper
    return DefectReport("jacobi", defect, tol, chi, (spec,), meta)


def compatibility_defect(
    spec_a: BracketSpec,
    spec_b: BracketSpec,
    t: float,
    chi: WeylRational,
    step: float = FD_STEP,
    cfg: QuadratureConfig | None = None,
    tolerance: float | None = None,
    tamper: float = 0.0,
) -> DefectReport:
    """Jacobi defect of the pencil pi_a + t * pi_b (pointwise sum of fields)."""
    tol = tolerance if tolerance is not None else max(
        default_tolerance(spec_a), default_tolerance(spec_b)
    )
    field_at = _structure_field(chi, [spec_a, spec_b], [1.0, t], cfg, tamper)
    defect = _jacobi_defect_of_field(field_at, chi.coordinates(), step)
    meta = {"step": step, "t": t}
    if tamper:
        meta["tamper"] = tamper
    return DefectReport("compatibility", defect, tol, chi, (spec_a, spec_b), meta)


def _constraint_gradient(functional: str, n: int, chi: WeylRational) -> np.ndarray:
    N = chi.order
    if functional == "phi2":
        g_rho = np.full(N, 1.0 / np.sum(chi.residues), dtype=complex)
        return np.concatenate([np.zeros(N, dtype=complex), g_rho])
    if functional == "phi1":
        if n == 0:
            raise Phi1Undefined("Phi_1 diverges for f(z) = 1 (n = 0)")
        g_z = 1.0 / chi.poles if n == 1 else chi.poles ** (-float(n))
        return np.concatenate([g_z, np.zeros(N, dtype=complex)])
    raise ValueError(f"unknown functional {functional!r}")


def casimir_defect(
    spec: BracketSpec,
    functional: str,
    chi: WeylRational,
    n_probes: int = 20,
    seed: int = 0,
    cfg: QuadratureConfig | None = None,
    tolerance: float = 1e-6,
) -> DefectReport:
    """Max over probe points q of the normalized |{Phi, chi(q)}|.

    The functional gradient is analytic (Phi_2 = log sum rho,
    Phi_1 = sum log z_k for n=1 and sum z_k^{1-n}/(1-n) for n >= 2); the
    bracket is contracted as grad(Phi)^T pi grad(chi(q)).
    """
    g = _constraint_gradient(functional, spec.n, chi)
    pi = structure_matrix(chi, spec, cfg).entries
    pi_norm = np.linalg.norm(pi)
    rng = np.random.default_rng(seed)
    z, r = chi.poles, chi.residues
    worst = 0.0
    probes = 0
    while probes < n_probes:
        q = complex(rng.uniform(-6, 6), rng.uniform(-6, 6))
        if np.min(np.abs(q - z)) < 0.4:
            continue
        probes += 1
        v = np.concatenate([-r / (z - q) ** 2, 1.0 / (z - q)])
        val = abs(g @ pi @ v)
        den = 1.0 + np.linalg.norm(g) * pi_norm * np.linalg.norm(v)
        worst = max(worst, val / den)
    return DefectReport(
        "casimir", worst, tolerance, chi, (spec,),
        {"functional": functional, "probes": n_probes, "seed": seed},
    )


def antisymmetry_defect(
    spec: BracketSpec,
    chi: WeylRational,
    cfg: QuadratureConfig | None = None,
    independent_pairs: bool = True,
    tolerance: float = 1e-9,
    tamper: float = 0.0,
) -> DefectReport:
    """||pi + pi^T|| / max(1, ||pi||), Frobenius norms."""
    pi = structure_matrix(chi, spec, cfg, independent_pairs=independent_pairs).entries
    if tamper:
        pi = pi.copy()
        pi[0, 1] += tamper
    defect = float(np.linalg.norm(pi + pi.T) / max(1.0, np.linalg.norm(pi)))
    meta = {"independent_pairs": independent_pairs}
    if tamper:
        meta["tamper"] = tamper
    return DefectReport("antisymmetry", defect, tolerance, chi, (spec,), meta)


def random_weyl(rng: np.random.Generator, n_poles: int, normalized: bool = False) -> WeylRational:
    """Random verification state: real poles in [0.5, 5] separated by >= 0.2,
    residues in [0.3, 2]; `normalized` rescales residues to sum to one."""
    while True:
        poles = np.sort(rng.uniform(0.5, 5.0, n_poles))
        if n_poles < 2 or np.min(np.diff(poles)) >= 0.2:
            break
    residues = rng.uniform(0.3, 2.0, n_poles)
    if normalized:
        residues = residues / residues.sum()
    return from_pole_residue(poles, residues)
