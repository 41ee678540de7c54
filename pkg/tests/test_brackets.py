import numpy as np
import pytest

from spectral_poisson.brackets import (
    SECOND_KIND,
    THIRD_KIND,
    TODA_RESTRICTED,
    BracketSpec,
    QuadratureConfig,
    pushforward,
    residue_at_infinity,
    second_kind_bracket,
    structure_matrix,
    third_kind_bracket_closed,
    third_kind_bracket_quadrature,
    toda_restricted_bracket,
    toda_restricted_bracket_closed,
    toda_restricted_correction,
)
from spectral_poisson.errors import (
    CoincidentPoints,
    DimensionMismatch,
    NonzeroConstTerm,
    PoleProximity,
)
from spectral_poisson.ratfun import from_pole_residue
from spectral_poisson.verify import random_weyl


def test_single_pole_closed_values():
    chi = from_pole_residue([1.0], [2.0])
    # chi(3) = -1, chi(5) = -1/2: (chi(p)-chi(q))^2/(p-q) = -1/8
    assert third_kind_bracket_closed(chi, 3.0, 5.0, 0) == pytest.approx(-0.125)
    # chi(0) = 2: (2 - (-1))^2/(0-3) = -3
    assert third_kind_bracket_closed(chi, 0.0, 3.0, 0) == pytest.approx(-3.0)
    # single pole: n=1 bracket is z_0 times the n=0 bracket; z_0 = 1
    assert third_kind_bracket_closed(chi, 0.0, 3.0, 1) == pytest.approx(-3.0)


def test_quadrature_reproduces_closed_single_pole():
    chi = from_pole_residue([1.0], [2.0])
    assert third_kind_bracket_quadrature(chi, 3.0, 5.0, 0) == pytest.approx(-0.125, abs=1e-12)
    assert third_kind_bracket_quadrature(chi, 0.0, 3.0, 0) == pytest.approx(-3.0, abs=1e-11)


def test_orientation_flip_changes_sign():
    chi = from_pole_residue([1.0, 2.2], [0.7, 1.3])
    p, q = -0.5 + 0.4j, 6.0
    cw = third_kind_bracket_quadrature(chi, p, q, 1, clockwise=True)
    ccw = third_kind_bracket_quadrature(chi, p, q, 1, clockwise=False)
    assert cw == pytest.approx(-ccw, rel=1e-12)


def test_quadrature_vs_closed_random_states():
    rng = np.random.default_rng(7)
    for _ in range(12):
        n_poles = int(rng.integers(1, 6))
        chi = random_weyl(rng, n_poles)
        p = complex(rng.uniform(-3, -1), rng.uniform(0.2, 1.5))
        q = complex(rng.uniform(5.5, 8), rng.uniform(-1.5, -0.2))
        for n in range(4):
            a = third_kind_bracket_closed(chi, p, q, n)
            b = third_kind_bracket_quadrature(chi, p, q, n)
            assert abs(a - b) <= 1e-9 * max(1.0, abs(a))


def test_residue_at_infinity_vanishes_below_quadratic():
    chi = from_pole_residue([1.0, 3.0], [2.0, 0.5])
    assert residue_at_infinity(chi, 0.2, 7.0, 0) == 0
    assert residue_at_infinity(chi, 0.2, 7.0, 1) == 0
    assert residue_at_infinity(chi, 0.2, 7.0, 2) != 0


def test_residue_at_infinity_matches_large_circle_quadrature():
    # independent check: -(1/2 pi i) * contour integral over a circle of
    # radius 10 max|z_k| of the full third-kind density
    rng = np.random.default_rng(11)
    chi = random_weyl(rng, 4)
    p, q = -1.0 + 0.3j, 7.5 - 0.2j
    cp, cq = chi.evaluate(p), chi.evaluate(q)
    R = 10.0 * float(np.max(np.abs(chi.poles)) + abs(p) + abs(q))
    theta = 2 * np.pi * np.arange(512) / 512
    znodes = R * np.exp(1j * theta)
    for n in (2, 3):
        dens = ((1 / (znodes - p) - 1 / (znodes - q)) / (p - q)
                * znodes**n * chi.evaluate(znodes) * (cp - cq))
        quad = -(R / 512) * np.sum(dens * np.exp(1j * theta))
        assert residue_at_infinity(chi, p, q, n) == pytest.approx(quad, rel=1e-8)


def test_bracket_antisymmetric_in_points():
    rng = np.random.default_rng(5)
    chi = random_weyl(rng, 3)
    p, q = 0.1 + 0.7j, 6.0 - 0.3j
    for n in (0, 2):
        assert third_kind_bracket_closed(chi, p, q, n) == pytest.approx(
            -third_kind_bracket_closed(chi, q, p, n), rel=1e-12
        )
        a = third_kind_bracket_quadrature(chi, p, q, n)
        b = third_kind_bracket_quadrature(chi, q, p, n)
        assert abs(a + b) <= 1e-10 * max(1.0, abs(a))


def test_linearity_in_f():
    chi = from_pole_residue([1.0, 2.5], [0.7, 1.1])
    p, q = -0.8 + 0.3j, 7.0
    total = third_kind_bracket_quadrature(chi, p, q, 0) + third_kind_bracket_quadrature(chi, p, q, 1)
    combined = third_kind_bracket_quadrature(chi, p, q, 0, f=lambda z: 1 + z)
    assert combined == pytest.approx(total, rel=1e-10)


def test_pole_relabeling_invariance():
    poles = [1.0, 2.0, 3.5]
    residues = [0.5, 1.0, 1.5]
    chi_a = from_pole_residue(poles, residues)
    chi_b = from_pole_residue(poles[::-1], residues[::-1])
    p, q = -1.0, 6.5
    assert third_kind_bracket_closed(chi_a, p, q, 2) == pytest.approx(
        third_kind_bracket_closed(chi_b, p, q, 2), rel=1e-12
    )


def test_input_guards():
    chi = from_pole_residue([1.0], [2.0], const_term=0.5)
    with pytest.raises(NonzeroConstTerm):
        third_kind_bracket_closed(chi, 0.0, 3.0, 0)
    bare = chi.strip_const()
    with pytest.raises(CoincidentPoints):
        third_kind_bracket_closed(bare, 3.0, 3.0, 0)
    with pytest.raises(PoleProximity):
        third_kind_bracket_quadrature(bare, 1.0 + 1e-9, 3.0, 0)
    with pytest.raises(ValueError):
        third_kind_bracket_closed(bare, 0.0, 3.0, 9)
    with pytest.raises(ValueError):
        QuadratureConfig(nodes=48)


def test_second_kind_closed_values():
    chi = from_pole_residue([1.0], [2.0])
    # chi'(0) = 2, chi'(3) = 1/2, chi(0) = 2, chi(3) = -1
    assert second_kind_bracket(chi, 0.0, 3.0, "one") == pytest.approx(-3.0)
    assert second_kind_bracket(chi, 0.0, 3.0, "z") == pytest.approx(-3.0)
    assert second_kind_bracket(chi, 3.0, 0.0, "one") == pytest.approx(3.0)


def test_toda_restriction_vanishes_at_large_c2():
    chi = from_pole_residue([1.0, 2.0], [0.4, 0.6])
    p, q = -0.7, 5.5
    base = third_kind_bracket_quadrature(chi, p, q, 1)
    restricted = toda_restricted_bracket(chi, p, q, 1, c2=60.0)
    assert restricted == pytest.approx(base, rel=1e-12)


def test_toda_restricted_terms_against_fine_quadrature():
    # both the third-kind part and the correction checked against an
    # independent 512-node quadrature
    chi = from_pole_residue([1.0], [2.0])
    p, q, n, c2 = 0.0, 3.0, 1, 0.0
    fine = QuadratureConfig(nodes=512)
    total_fine = toda_restricted_bracket(chi, p, q, n, c2, cfg=fine)
    third_fine = third_kind_bracket_quadrature(chi, p, q, n, cfg=fine)
    corr = toda_restricted_correction(chi, p, q, n, c2)
    assert total_fine == pytest.approx(third_fine + corr, rel=1e-11)
    assert toda_restricted_bracket_closed(chi, p, q, n, c2) == pytest.approx(total_fine, rel=1e-10)


def test_quadrature_node_doubling_converged():
    chi = from_pole_residue([1.0, 2.3, 4.0], [0.5, 1.0, 0.8])
    p, q = -1.2 + 0.5j, 7.3
    a = toda_restricted_bracket(chi, p, q, 2, 0.3, cfg=QuadratureConfig(nodes=128))
    b = toda_restricted_bracket(chi, p, q, 2, 0.3, cfg=QuadratureConfig(nodes=256))
    assert abs(a - b) <= 1e-10 * max(1.0, abs(a))


# --- structure matrices -----------------------------------------------------

def test_structure_matrix_single_pole():
    chi = from_pole_residue([1.0], [2.0])
    for n, expected in ((0, -2.0), (1, -2.0)):
        pi = structure_matrix(chi, BracketSpec(THIRD_KIND, n=n)).entries
        # {z0, rho0} = -rho0 z0^n
        assert pi[0, 1] == pytest.approx(expected, rel=1e-10)
        assert pi[1, 0] == pytest.approx(-expected, rel=1e-10)
        assert pi[0, 0] == pi[1, 1] == 0


def test_structure_matrix_known_third_kind_pattern():
    # hand residue algebra for f = 1: {z_i, z_j} = 0, {z_i, rho_j} =
    # -delta_ij rho_i, {rho_i, rho_j} = -2 rho_i rho_j/(z_i - z_j)
    chi = from_pole_residue([0.8, 2.0, 3.7], [0.5, 1.2, 0.9])
    pi = structure_matrix(chi, BracketSpec(THIRD_KIND, n=0), independent_pairs=True).entries
    N = 3
    z, r = chi.poles, chi.residues
    scale = np.max(np.abs(pi))
    assert np.max(np.abs(pi[:N, :N])) <= 1e-10 * scale
    for i in range(N):
        for j in range(N):
            zr_expected = -r[i] if i == j else 0.0
            assert abs(pi[i, N + j] - zr_expected) <= 1e-9 * scale
            if i != j:
                rr_expected = -2 * r[i] * r[j] / (z[i] - z[j])
                assert abs(pi[N + i, N + j] - rr_expected) <= 1e-9 * scale


def test_structure_matrix_antisymmetry_modes():
    rng = np.random.default_rng(9)
    chi = random_weyl(rng, 3)
    spec = BracketSpec(THIRD_KIND, n=2)
    mirrored = structure_matrix(chi, spec).entries
    assert np.array_equal(mirrored, -mirrored.T)  # exact by construction
    independent = structure_matrix(chi, spec, independent_pairs=True).entries
    defect = np.linalg.norm(independent + independent.T) / np.linalg.norm(independent)
    assert defect < 1e-9
    assert np.allclose(mirrored, independent, rtol=1e-9, atol=1e-12 * np.max(np.abs(mirrored)))


def test_structure_matrix_rejects_const_term():
    chi = from_pole_residue([1.0], [2.0], const_term=-0.25)
    with pytest.raises(NonzeroConstTerm):
        structure_matrix(chi, BracketSpec(THIRD_KIND, n=0))


def test_bracket_spec_validation():
    with pytest.raises(ValueError):
        BracketSpec(THIRD_KIND, n=9)
    with pytest.raises(ValueError):
        BracketSpec(SECOND_KIND, fkind="cubic")
    with pytest.raises(ValueError):
        BracketSpec("fourth_kind")
    with pytest.raises(ValueError):
        BracketSpec(TODA_RESTRICTED, n=1, c2=float("inf"))


def test_pushforward_basics():
    pi = np.array([[0.0, 1.0], [-1.0, 0.0]])
    assert np.allclose(pushforward(pi, np.eye(2)), pi)
    assert np.allclose(pushforward(pi, 3.0 * np.eye(2)), 9.0 * pi)
    with pytest.raises(DimensionMismatch):
        pushforward(pi, np.eye(3))
    with pytest.raises(ValueError):
        pushforward(np.eye(2), np.eye(2))  # symmetric input rejected
