"""Poisson brackets of Weyl-function evaluations and their structure matrices.

Three bracket families on Rat_N, all of the residue form

    {chi(p), chi(q)}^f = sum_k  cint_{O_k} omega^f_{pq},

with small circles O_k around the poles of chi traversed CLOCKWISE.  With that
orientation the contour sum equals res_p + res_q + res_infinity of the form
(total residue on the sphere is zero), which is what makes the closed
expressions below agree with the quadrature numerically.

* third kind, f(z) = z^n:
    omega = eps_pq(z)/(p-q) * f(z) chi(z) (chi(p)-chi(q)),
  eps_pq the third-kind differential with residues +-1 at p, q.  Closed form:
    (f(p)chi(p) - f(q)chi(q))/(p-q) * (chi(p)-chi(q)) + res_inf,
  res_inf = 0 for n in {0,1}; for n >= 2 it follows from the moment expansion
  of chi at infinity.
* second kind, f in {1, z}: closed forms in chi and chi'.
* Toda-restricted: third-kind form minus the Dirac correction
    eps_pq(z) f(z) chi(z) chi(p) chi(q) e^{-c2}.

Coordinate structure matrices are extracted by nested contour quadrature of
the evaluation bracket over pairs of pole circles, through the functionals
A_i = -rho_i and B_i = -rho_i z_i.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    CoincidentPoints,
    DimensionMismatch,
    NonzeroConstTerm,
    PoleProximity,
)
from .ratfun import WeylRational

THIRD_KIND = "third_kind"
SECOND_KIND = "second_kind"
TODA_RESTRICTED = "toda_restricted"

FKIND_ONE = "one"
FKIND_Z = "z"

MAX_POWER = 8  # f = z^n beyond this is numerically unstable in quadrature
POINT_GUARD = 1e-6  # min distance of p, q from any pole, relative to pole scale


@dataclass(frozen=True)
class BracketSpec:
    """Selects a bracket family: third kind (f=z^n), second kind (f in {1,z}),
    or the Dirac-restricted Toda bracket with parameter c2."""

    family: str = THIRD_KIND
    n: int = 0
    fkind: str = FKIND_ONE
    c2: float = 0.0

    def __post_init__(self):
        if self.family not in (THIRD_KIND, SECOND_KIND, TODA_RESTRICTED):
            raise ValueError(f"unknown bracket family {self.family!r}")
        if self.family in (THIRD_KIND, TODA_RESTRICTED):
            if not (0 <= self.n <= MAX_POWER):
                raise ValueError(f"power n={self.n} outside [0, {MAX_POWER}]")
        if self.family == SECOND_KIND and self.fkind not in (FKIND_ONE, FKIND_Z):
            raise ValueError(f"unknown second-kind f {self.fkind!r}")
        if not np.isfinite(self.c2):
            raise ValueError("c2 must be finite")

    def label(self) -> str:
        if self.family == THIRD_KIND:
            return f"third_kind(n={self.n})"
        if self.family == SECOND_KIND:
            return f"second_kind(f={self.fkind})"
        return f"toda_restricted(n={self.n}, c2={self.c2})"

    def to_json_dict(self) -> dict:
        d = {"family": self.family}
        if self.family == SECOND_KIND:
            d["fkind"] = self.fkind
        else:
            d["n"] = self.n
        if self.family == TODA_RESTRICTED:
            d["c2"] = self.c2
        return d


@dataclass(frozen=True)
class QuadratureConfig:
    """Trapezoid-rule contours: `nodes` points per circle, radius a fixed
    fraction of the distance to the nearest other singularity."""

    nodes: int = 128
    radius_factor: float = 0.25

    def __post_init__(self):
        if self.nodes < 32 or (self.nodes & (self.nodes - 1)) != 0:
            raise ValueError("quadrature nodes must be a power of two >= 32")
        if not 0 < self.radius_factor < 0.5:
            raise ValueError("radius_factor must lie in (0, 0.5)")


DEFAULT_QUADRATURE = QuadratureConfig()


def _require_rat(chi: WeylRational):
    if chi.const_term != 0:
        raise NonzeroConstTerm(
            "brackets act on functions vanishing at infinity; strip the constant first"
        )


def _check_points(chi: WeylRational, p: complex, q: complex):
    scale = max(1.0, float(np.max(np.abs(chi.poles))))
    if abs(p - q) <= 1e-12 * scale:
        raise CoincidentPoints(f"p = {p} and q = {q} coincide")
    for w in (p, q):
        if np.min(np.abs(w - chi.poles)) < POINT_GUARD * scale:
            raise PoleProximity(f"evaluation point {w} too close to a pole")


def residue_at_infinity(chi: WeylRational, p: complex, q: complex, n: int) -> complex:
    """res_inf of the third-kind form; vanishes identically for n in {0, 1}.

    For n >= 2: (chi(p)-chi(q)) * sum_{m=2}^{n} h_{m-2}(p, q) s_{n-m}, where
    h_d is the complete homogeneous symmetric polynomial and s_j the moments.
    """
    if n <= 1:
        return 0j
    cp, cq = chi.evaluate(p), chi.evaluate(q)
    total = 0j
    for m in range(2, n + 1):
        d = m - 2
        h = sum(p**a * q ** (d - a) for a in range(d + 1))
        total += h * chi.moment(n - m)
    return (cp - cq) * total


def third_kind_bracket_closed(chi: WeylRational, p: complex, q: complex, n: int) -> complex:
    """Cauchy-formula value (f(p)chi(p) - f(q)chi(q))/(p-q)*(chi(p)-chi(q)) + res_inf."""
    _require_rat(chi)
    if not 0 <= n <= MAX_POWER:
        raise ValueError(f"power n={n} outside [0, {MAX_POWER}]")
    _check_points(chi, p, q)
    cp, cq = chi.evaluate(p), chi.evaluate(q)
    main = (p**n * cp - q**n * cq) / (p - q) * (cp - cq)
    return main + residue_at_infinity(chi, p, q, n)


def _contour_radii(chi: WeylRational, extra_points, radius_factor):
    """Per-pole circle radii: factor times the distance to the nearest other
    singularity (other poles and the evaluation points)."""
    z = chi.poles
    radii = np.empty(len(z))
    for k in range(len(z)):
        others = np.abs(np.delete(z, k) - z[k])
        pts = [abs(w - z[k]) for w in extra_points]
        cands = np.concatenate([others, pts]) if len(others) or pts else None
        if cands is None or len(cands) == 0:
            radii[k] = radius_factor * max(1.0, abs(z[k]))
        else:
            radii[k] = radius_factor * cands.min()
    return radii


def _pole_circle_sum(chi, density, extra_points, cfg, clockwise):
    """sum_k cint_{O_k} density(z) dz/(2 pi i) by trapezoid quadrature.

    `density` already includes everything except the (1/2 pi i) dz of the
    third-kind differential.  Clockwise orientation negates the sum.
    """
    cfg = cfg or DEFAULT_QUADRATURE
    M = cfg.nodes
    radii = _contour_radii(chi, extra_points, cfg.radius_factor)
    theta = 2 * np.pi * np.arange(M) / M
    phase = np.exp(1j * theta)
    total = 0j
    for k in range(chi.order):
        znodes = chi.poles[k] + radii[k] * phase
        total += (radii[k] / M) * np.sum(density(znodes) * phase)
    return -total if clockwise else total


def third_kind_bracket_quadrature(
    chi: WeylRational,
    p: complex,
    q: complex,
    n: int,
    cfg: QuadratureConfig | None = None,
    clockwise: bool = True,
    f=None,
) -> complex:
    """Contour-quadrature value of the third-kind bracket.

    `f` overrides the default f(z) = z^n with an arbitrary callable (entire
    function); used to exercise linearity in f.
    """
    _require_rat(chi)
    if f is None and not 0 <= n <= MAX_POWER:
        raise ValueError(f"power n={n} outside [0, {MAX_POWER}]")
    _check_points(chi, p, q)
    cp, cq = chi.evaluate(p), chi.evaluate(q)
    fz = (lambda z: z**n) if f is None else f

    def density(z):
        eps = 1.0 / (z - p) - 1.0 / (z - q)
        return eps / (p - q) * fz(z) * chi.evaluate(z) * (cp - cq)

    return complex(_pole_circle_sum(chi, density, (p, q), cfg, clockwise))


def second_kind_bracket(chi: WeylRational, P: complex, Q: complex, fkind: str) -> complex:
    """Second-kind brackets: f=1 -> chi'(P)chi(Q) - chi'(Q)chi(P);
    f=z -> P chi'(P)chi(Q) - Q chi'(Q)chi(P)."""
    _require_rat(chi)
    _check_points(chi, P, Q)
    cp, cq = chi.evaluate(P), chi.evaluate(Q)
    dp, dq = chi.derivative(P), chi.derivative(Q)
    if fkind == FKIND_ONE:
        return dp * cq - dq * cp
    if fkind == FKIND_Z:
        return P * dp * cq - Q * dq * cp
    raise ValueError(f"unknown second-kind f {fkind!r}")


def toda_restricted_correction(
    chi: WeylRational, p: complex, q: complex, n: int, c2: float
) -> complex:
    """Clockwise O_k sum of the Dirac correction term, by residues:
    - sum_k rho_k z_k^n [1/(z_k-p) - 1/(z_k-q)] chi(p) chi(q) e^{-c2}."""
    cp, cq = chi.evaluate(p), chi.evaluate(q)
    z, r = chi.poles, chi.residues
    s = np.sum(r * z**n * (1.0 / (z - p) - 1.0 / (z - q)))
    return -complex(s) * cp * cq * np.exp(-c2)


def toda_restricted_bracket(
    chi: WeylRational,
    p: complex,
    q: complex,
    n: int,
    c2: float,
    cfg: QuadratureConfig | None = None,
    clockwise: bool = True,
) -> complex:
    """Quadrature of the modified differential omega-tilde over the pole circles."""
    _require_rat(chi)
    if not 0 <= n <= MAX_POWER:
        raise ValueError(f"power n={n} outside [0, {MAX_POWER}]")
    _check_points(chi, p, q)
    cp, cq = chi.evaluate(p), chi.evaluate(q)
    damp = np.exp(-c2)

    def density(z):
        eps = 1.0 / (z - p) - 1.0 / (z - q)
        fchi = z**n * chi.evaluate(z)
        return eps * fchi * ((cp - cq) / (p - q) - cp * cq * damp)

    return complex(_pole_circle_sum(chi, density, (p, q), cfg, clockwise))


def toda_restricted_bracket_closed(
    chi: WeylRational, p: complex, q: complex, n: int, c2: float
) -> complex:
    """Third-kind closed form plus the residue form of the correction."""
    return third_kind_bracket_closed(chi, p, q, n) + toda_restricted_correction(chi, p, q, n, c2)


def evaluation_bracket(chi: WeylRational, spec: BracketSpec, p: complex, q: complex) -> complex:
    """{chi(p), chi(q)} for the selected family, closed/residue evaluation."""
    if spec.family == THIRD_KIND:
        return third_kind_bracket_closed(chi, p, q, spec.n)
    if spec.family == SECOND_KIND:
        return second_kind_bracket(chi, p, q, spec.fkind)
    return toda_restricted_bracket_closed(chi, p, q, spec.n, spec.c2)


def _bracket_matrix(chi: WeylRational, spec: BracketSpec, P, Q):
    """Vectorized closed-form bracket on the grid P x Q (no proximity guards:
    callers supply contour nodes that stay clear of the singularities)."""
    z, r, c = chi.poles, chi.residues, chi.const_term
    assert c == 0

    def val(w):
        return np.sum(r / (z - w[..., None]), axis=-1)

    cp = val(P)[:, None]
    cq = val(Q)[None, :]
    Pm = P[:, None]
    Qm = Q[None, :]
    if spec.family == SECOND_KIND:
        dp = np.sum(r / (z - P[..., None]) ** 2, axis=-1)[:, None]
        dq = np.sum(r / (z - Q[..., None]) ** 2, axis=-1)[None, :]
        if spec.fkind == FKIND_ONE:
            return dp * cq - dq * cp
        return Pm * dp * cq - Qm * dq * cp
    n = spec.n
    main = (Pm**n * cp - Qm**n * cq) / (Pm - Qm) * (cp - cq)
    if n >= 2:
        rinf = np.zeros_like(main)
        for m in range(2, n + 1):
            d = m - 2
            h = sum(Pm**a * Qm ** (d - a) for a in range(d + 1))
            rinf = rinf + h * chi.moment(n - m)
        main = main + (cp - cq) * rinf
    if spec.family == TODA_RESTRICTED:
        sp = np.sum(r * z**n / (z - P[..., None]), axis=-1)[:, None]
        sq = np.sum(r * z**n / (z - Q[..., None]), axis=-1)[None, :]
        main = main - (sp - sq) * cp * cq * np.exp(-spec.c2)
    return main


@dataclass(frozen=True)
class StructureMatrix:
    """Antisymmetric 2N x 2N matrix of coordinate brackets in the order
    (z_0..z_{N-1}, rho_0..rho_{N-1})."""

    entries: np.ndarray
    state: WeylRational
    spec: BracketSpec

    @property
    def order(self) -> int:
        return self.state.order

    def antisymmetry_defect(self) -> float:
        pi = self.entries
        return float(np.linalg.norm(pi + pi.T) / max(1.0, np.linalg.norm(pi)))

    def to_json_dict(self) -> dict:
        return {
            "spec": self.spec.to_json_dict(),
            "state": self.state.to_json_dict(),
            "entries": [[[float(v.real), float(v.imag)] for v in row] for row in self.entries],
        }

    def write_csv(self, path):
        """Row-major CSV with "re,im" cells (quoted)."""
        import csv

        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            for row in self.entries:
                writer.writerow([f"{v.real!r},{v.imag!r}" for v in row])


def structure_matrix(
    chi: WeylRational,
    spec: BracketSpec,
    cfg: QuadratureConfig | None = None,
    independent_pairs: bool = False,
) -> StructureMatrix:
    """Extract coordinate brackets by nested quadrature over pole circles.

    With functionals A_i = (2 pi i)^-1 cint_{O_i} chi dz = -rho_i and
    B_i = (2 pi i)^-1 cint_{O_i} z chi dz = -rho_i z_i, the evaluation bracket
    integrates to {A_i, A_j}, {A_i, B_j}, {B_i, B_j} and the chain rule through
    z_i = B_i/A_i, rho_i = -A_i yields the coordinate tensor.

    By default the lower triangle is filled by antisymmetry; with
    `independent_pairs` every ordered pair is quadratured separately (useful
    as an antisymmetry self-test of the quadrature).
    """
    _require_rat(chi)
    cfg = cfg or QuadratureConfig(nodes=64)
    N = chi.order
    M = cfg.nodes
    z, rho = chi.poles, chi.residues
    radii = _contour_radii(chi, (), cfg.radius_factor)
    # q nodes offset half a step so p and q never collide on a shared circle
    th_p = 2 * np.pi * np.arange(M) / M
    th_q = th_p + np.pi / M
    ph_p, ph_q = np.exp(1j * th_p), np.exp(1j * th_q)
    Pn = (z[:, None] + radii[:, None] * ph_p[None, :]).ravel()
    Qn = (z[:, None] + radii[:, None] * ph_q[None, :]).ravel()
    wp = (radii[:, None] * ph_p[None, :] / M).ravel()
    wq = (radii[:, None] * ph_q[None, :] / M).ravel()
    B = _bracket_matrix(chi, spec, Pn, Qn)

    def block(i, j, p_weighted, q_weighted):
        si, sj = slice(i * M, (i + 1) * M), slice(j * M, (j + 1) * M)
        lw = wp[si] * Pn[si] if p_weighted else wp[si]
        rw = wq[sj] * Qn[sj] if q_weighted else wq[sj]
        return lw @ B[si, sj] @ rw

    A = -rho
    Bf = -rho * z
    ZZ = np.zeros((N, N), dtype=complex)
    ZR = np.zeros((N, N), dtype=complex)
    RZ = np.zeros((N, N), dtype=complex)
    RR = np.zeros((N, N), dtype=complex)

    def fill(i, j):
        aa = block(i, j, False, False)
        ab = block(i, j, False, True)
        ba = block(i, j, True, False)
        bb = block(i, j, True, True)
        RR[i, j] = aa
        ZR[i, j] = -ba / A[i] + Bf[i] * aa / A[i] ** 2
        RZ[i, j] = -ab / A[j] + Bf[j] * aa / A[j] ** 2
        ZZ[i, j] = (
            bb / (A[i] * A[j])
            - Bf[j] * ba / (A[i] * A[j] ** 2)
            - Bf[i] * ab / (A[i] ** 2 * A[j])
            + Bf[i] * Bf[j] * aa / (A[i] ** 2 * A[j] ** 2)
        )

    for i in range(N):
        for j in range(N):
            if independent_pairs or i < j:
                fill(i, j)
            elif i == j:
                # {A_i, A_i} = {B_i, B_i} = 0; only the mixed diagonal survives
                ab = block(i, i, False, True)
                ZR[i, i] = ab / A[i]
                RZ[i, i] = -ab / A[i]
    if not independent_pairs:
        for i in range(N):
            for j in range(i):
                ZZ[i, j] = -ZZ[j, i]
                RR[i, j] = -RR[j, i]
                ZR[i, j] = -RZ[j, i]
                RZ[i, j] = -ZR[j, i]
    pi = np.block([[ZZ, ZR], [RZ, RR]])
    return StructureMatrix(pi, chi, spec)


def pushforward(pi_phase: np.ndarray, jacobian: np.ndarray) -> np.ndarray:
    """J pi J^T: the tensor of the induced bracket in the image coordinates."""
    pi = np.asarray(pi_phase)
    J = np.asarray(jacobian)
    if pi.ndim != 2 or pi.shape[0] != pi.shape[1]:
        raise DimensionMismatch(f"phase tensor must be square, got {pi.shape}")
    if J.ndim != 2 or J.shape[1] != pi.shape[0]:
        raise DimensionMismatch(f"jacobian {J.shape} incompatible with tensor {pi.shape}")
    if np.linalg.norm(pi + pi.T) > 1e-8 * max(1.0, np.linalg.norm(pi)):
        raise ValueError("phase-space tensor is not antisymmetric")
    return J @ pi @ J.T
