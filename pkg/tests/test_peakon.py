import numpy as np
import pytest
import scipy.linalg

from spectral_poisson.errors import (
    CollisionDetected,
    MassPositivity,
    StepSizeError,
)
from spectral_poisson.peakon import (
    PeakonState,
    compare_bracket_families,
    hamiltonian,
    isospectral_drift,
    make_discrete_string,
    make_peakon_state,
    peakon_flow,
    peakons_to_string,
    spectra,
    string_polynomials,
    string_weyl,
    total_momentum,
    write_trajectory_csv,
)

polyval = np.polynomial.polynomial.polyval


def random_string(rng, n):
    xi = np.sort(rng.uniform(-1.8, 1.8, n))
    while n > 1 and np.min(np.diff(xi)) < 0.2:
        xi = np.sort(rng.uniform(-1.8, 1.8, n))
    return make_discrete_string(xi, rng.uniform(0.3, 2.0, n))


def test_peakon_to_string_map():
    s = make_peakon_state([0.0], [1.0])
    d = peakons_to_string(s)
    assert d.xi[0] == pytest.approx(0.0)
    assert d.masses[0] == pytest.approx(1.0)


def test_tanh_saturation():
    s = make_peakon_state([50.0], [1.0])
    d = peakons_to_string(s)
    assert abs(d.xi[0] - 2.0) < 1e-10
    assert np.isfinite(d.masses[0])


def test_negative_momentum_rejected():
    with pytest.raises(MassPositivity):
        make_peakon_state([0.0], [-1.0])


def test_single_mass_string_polynomials():
    # one jump: phi(2) = 1 - 2 lam, psi(2) = 4 - 4 lam, phi'(2) = -lam
    d = make_discrete_string([0.0], [1.0])
    phi, dphi, psi, dpsi = string_polynomials(d)
    assert np.allclose(phi, [1.0, -2.0])
    assert np.allclose(psi, [4.0, -4.0])
    assert np.allclose(dphi, [0.0, -1.0])


def test_single_mass_weyl_in_z():
    # chi(lambda) = -(1-2lam)/(4-4lam)  ->  -1/4 - 1/(4(z+1)) in z = -1/lam
    d = make_discrete_string([0.0], [1.0])
    data = string_weyl(d)
    assert data.dirichlet == pytest.approx([1.0])
    assert data.neumann == pytest.approx([0.0])
    assert data.weyl.const_term == pytest.approx(-0.25)
    assert data.weyl.poles[0] == pytest.approx(-1.0)
    assert data.weyl.residues[0] == pytest.approx(0.25)


def test_zero_mass_string_weyl_is_constant():
    d = make_discrete_string([], [])
    phi, dphi, psi, dpsi = string_polynomials(d)
    for lam in (-3.0, 0.2, 5.0):
        assert -polyval(lam, phi) / polyval(lam, psi) == pytest.approx(-0.25)


def test_spectra_match_generalized_eigenproblem():
    # oracle: K f = lambda G f on interior nodes, stiffness from the gaps
    rng = np.random.default_rng(5)
    for n in (2, 3, 5):
        d = random_string(rng, n)
        dirichlet, _ = spectra(d)
        assert len(dirichlet) == n
        edges = np.concatenate([[-2.0], d.xi, [2.0]])
        L = np.diff(edges)
        K = np.zeros((n, n))
        for i in range(n):
            K[i, i] = 1 / L[i] + 1 / L[i + 1]
            if i + 1 < n:
                K[i, i + 1] = K[i + 1, i] = -1 / L[i + 1]
        oracle = np.sort(scipy.linalg.eigh(K, np.diag(d.masses), eigvals_only=True))
        assert np.allclose(dirichlet, oracle, rtol=1e-9)


def test_dirichlet_neumann_interlace():
    # the two spectra differ by the boundary condition at BOTH ends (rank-2
    # change), so the classical oscillation bound is gam_k < lam_k < gam_{k+2}
    rng = np.random.default_rng(6)
    for n in (2, 3, 4):
        d = random_string(rng, n)
        lam, gam = spectra(d)
        assert len(gam) == n and gam[0] == pytest.approx(0.0, abs=1e-12)
        for i in range(n):
            assert gam[i] < lam[i]
            if i + 2 < n:
                assert lam[i] < gam[i + 2]


def test_weyl_const_and_positive_residues():
    rng = np.random.default_rng(7)
    for n in (1, 2, 4):
        d = random_string(rng, n)
        data = string_weyl(d)
        assert abs(data.weyl.const_term + 0.25) < 1e-9
        assert data.weyl.order == n
        assert np.all(data.weyl.residues.real > 0)
        assert np.max(np.abs(data.weyl.residues.imag)) == 0
        # partial fractions reproduce -phi/psi at sample points
        phi, _, psi, _ = string_polynomials(d)
        for z in (3.3, -7.1, 11.0):
            direct = -polyval(-1 / z, phi) / polyval(-1 / z, psi)
            assert data.weyl.evaluate(z) == pytest.approx(direct, rel=1e-10)


def test_single_peakon_travels_at_its_momentum():
    s = make_peakon_state([0.0], [1.0])
    traj = peakon_flow(s, T=2.0, dt=1e-3, n_samples=4)
    final = traj.states[-1]
    assert final.positions[0] == pytest.approx(2.0, abs=1e-10)
    assert final.momenta[0] == pytest.approx(1.0, abs=1e-12)


def test_two_peakon_conservation():
    s = make_peakon_state([-1.0, 1.5], [1.2, 0.6])
    traj = peakon_flow(s, T=2.0, dt=1e-3, n_samples=10)
    H0, P0 = hamiltonian(s), total_momentum(s)
    for st in traj.states:
        assert abs(hamiltonian(st) - H0) < 1e-9
        assert abs(total_momentum(st) - P0) < 1e-12


def test_isospectral_drift_small_and_tamper_large():
    s = make_peakon_state([-1.0, 1.5], [1.2, 0.6])
    traj = peakon_flow(s, T=2.0, dt=1e-3, n_samples=8)
    assert isospectral_drift(traj) < 1e-8
    bad = peakon_flow(s, T=2.0, dt=1e-3, n_samples=8, tamper=0.01)
    assert isospectral_drift(bad) > 1e-3


def test_single_peakon_spectrum_invariant():
    s = make_peakon_state([0.3], [0.7])
    traj = peakon_flow(s, T=2.0, dt=1e-3, n_samples=6)
    assert isospectral_drift(traj) < 1e-10


def test_flow_input_validation_and_collision():
    s = make_peakon_state([0.0, 1.0], [1.0, 1.0])
    with pytest.raises(StepSizeError):
        peakon_flow(s, T=1.0, dt=0.0)
    with pytest.raises(StepSizeError):
        peakon_flow(s, T=-1.0, dt=1e-3)
    near = make_peakon_state([0.0, 2e-7], [1.0, 1.0])
    with pytest.raises(CollisionDetected):
        peakon_flow(near, T=0.1, dt=1e-3)


def test_state_json_round_trip():
    s = make_peakon_state([-0.5, 0.5], [1.0, 2.0])
    back = PeakonState.from_json_dict(s.to_json_dict())
    assert np.allclose(back.positions, s.positions)
    assert np.allclose(back.momenta, s.momenta)


def test_trajectory_csv(tmp_path):
    s = make_peakon_state([-0.5, 0.5], [1.0, 2.0])
    traj = peakon_flow(s, T=0.05, dt=1e-3, n_samples=5)
    path = tmp_path / "traj.csv"
    write_trajectory_csv(traj, path)
    rows = path.read_text().strip().splitlines()
    assert rows[0] == "t,x0,x1,p0,p1,lambda0,lambda1"
    assert len(rows) == len(traj.states) + 1


def test_pushforward_comparison_identifies_family():
    # observed identification (diagnostic, not a claim of the bracket theory):
    # the canonical peakon bracket pushes to the f = 1 structure matrix
    s = make_peakon_state([-0.8, 0.9], [1.1, 0.7])
    result = compare_bracket_families(s, ns=(0, 1, 2))
    assert set(result["per_n"]) == {0, 1, 2}
    for row in result["per_n"].values():
        assert np.isfinite(row["raw_deviation"]) and np.isfinite(row["fitted_deviation"])
    assert result["per_n"][0]["raw_deviation"] < 1e-6
