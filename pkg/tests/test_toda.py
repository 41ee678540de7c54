import numpy as np
import pytest

from spectral_poisson.errors import (
    DegenerateSpectrum,
    LogBranchWarning,
    Phi1Undefined,
    StepSizeError,
)
from spectral_poisson.ratfun import from_pole_residue
from spectral_poisson.toda import (
    TodaState,
    compare_bracket_families,
    constraint_values,
    flaschka,
    hamiltonian,
    make_toda_state,
    pushforward_canonical,
    spectral_jacobian,
    toda_flow,
    weyl_from_jacobi,
)


def test_flaschka_rest_state():
    data = flaschka(make_toda_state([0.0, 0.0], [0.0, 0.0]))
    assert data.offdiag == pytest.approx([0.5])
    assert np.allclose(data.diag, 0.0)
    assert np.allclose(data.eigenvalues, [-0.5, 0.5])
    assert np.allclose(data.weights, [0.5, 0.5])


def test_flaschka_single_particle():
    data = flaschka(make_toda_state([0.0], [2.0]))
    assert data.diag[0] == pytest.approx(-1.0)
    assert data.eigenvalues[0] == pytest.approx(-1.0)
    assert data.weights[0] == pytest.approx(1.0)


def test_weights_sum_to_one():
    rng = np.random.default_rng(0)
    for _ in range(25):
        n = int(rng.integers(1, 6))
        data = flaschka(make_toda_state(rng.uniform(-2, 2, n), rng.uniform(-2, 2, n)))
        assert abs(np.sum(data.weights) - 1.0) < 1e-10
        assert np.all(data.weights > 0)


def test_weyl_of_unit_offdiagonal_matrix():
    # q spacing with a = 1: chi(lambda) = (1/2)/(1-lambda) + (1/2)/(-1-lambda)
    q = [np.log(2.0), -np.log(2.0)]
    data = flaschka(make_toda_state(q, [0.0, 0.0]))
    assert data.offdiag == pytest.approx([1.0])
    chi = weyl_from_jacobi(data)
    assert np.allclose(chi.poles, [-1.0, 1.0])
    assert np.allclose(chi.residues, [0.5, 0.5])
    for z in (0.3, -2.5, 7.0):
        assert chi.evaluate(z) == pytest.approx(0.5 / (1 - z) + 0.5 / (-1 - z))


def test_weyl_is_herglotz():
    rng = np.random.default_rng(1)
    chi = weyl_from_jacobi(flaschka(make_toda_state(rng.uniform(-1, 1, 4), rng.uniform(-1, 1, 4))))
    for _ in range(20):
        lam = complex(rng.uniform(-3, 3), rng.uniform(0.1, 3))
        assert chi.evaluate(lam).imag > 0


def test_constraint_values():
    chi = from_pole_residue([1.0, np.e], [0.4, 0.6])
    phi1, phi2 = constraint_values(chi, 1)
    assert phi1 == pytest.approx(1.0)  # log 1 + log e
    assert phi2 == pytest.approx(0.0)  # residues sum to one
    phi1_2, _ = constraint_values(chi, 2)
    assert phi1_2 == pytest.approx(-(1.0 + 1.0 / np.e))  # sum z^{-1}/(-1)
    with pytest.raises(Phi1Undefined):
        constraint_values(chi, 0)


def test_constraint_log_branch_flagged():
    chi = from_pole_residue([-1.0, 2.0], [0.5, 0.5])
    with pytest.warns(LogBranchWarning):
        phi1, _ = constraint_values(chi, 1)
    assert phi1.imag == pytest.approx(np.pi)


def test_free_particle_flow():
    traj = toda_flow(make_toda_state([0.5], [0.8]), T=2.0, dt=1e-3, n_samples=4)
    assert traj.states[-1].q[0] == pytest.approx(0.5 + 0.8 * 2.0, abs=1e-12)
    with pytest.raises(StepSizeError):
        toda_flow(make_toda_state([0.0], [0.0]), T=1.0, dt=-1e-3)


def test_flow_isospectral_and_energy():
    s = make_toda_state([-0.4, 0.7], [0.9, -0.3])
    lam0 = flaschka(s).eigenvalues
    H0 = hamiltonian(s)
    traj = toda_flow(s, T=2.0, dt=1e-3, n_samples=10)
    for st in traj.states:
        data = flaschka(st)
        assert np.max(np.abs(data.eigenvalues - lam0)) < 1e-10
        assert abs(np.sum(data.weights) - 1.0) < 1e-10
        assert abs(hamiltonian(st) - H0) < 1e-10


def test_spectral_jacobian_single_particle():
    J = spectral_jacobian(make_toda_state([0.3], [1.1]))
    # z0 = -p/2 depends only on p; rho0 = 1 identically
    assert J[0, 0] == pytest.approx(0.0, abs=1e-9)
    assert J[0, 1] == pytest.approx(-0.5, abs=1e-9)
    assert np.allclose(J[1, :], 0.0, atol=1e-9)


def test_spectral_jacobian_step_consistency():
    s = make_toda_state([0.2, -0.5], [0.4, 0.9])
    J1 = spectral_jacobian(s, step=1e-5)
    J2 = spectral_jacobian(s, step=5e-6)
    # central differences: halving the step shrinks the error ~4x
    assert np.max(np.abs(J1 - J2)) < 1e-9


def test_spectral_jacobian_swap_symmetry_at_rest():
    J = spectral_jacobian(make_toda_state([0.0, 0.0], [0.0, 0.0]))
    # lambda_± = ±exp((q_0-q_1)/2)/2: derivative antisymmetric under swap
    assert J[0, 0] == pytest.approx(-J[0, 1], rel=1e-6)
    assert J[1, 0] == pytest.approx(-J[1, 1], rel=1e-6)


def test_degenerate_spectrum_guard():
    s = make_toda_state([0.0, 60.0], [0.0, 0.0])  # decoupled, eigenvalues collide
    with pytest.raises(DegenerateSpectrum):
        spectral_jacobian(s)


def test_pushforward_eigenvalues_in_involution():
    rng = np.random.default_rng(3)
    for n in (2, 3):
        s = make_toda_state(rng.uniform(-1, 1, n), rng.uniform(-1, 1, n))
        push = pushforward_canonical(s)
        scale = max(1.0, float(np.max(np.abs(push))))
        assert np.max(np.abs(push[:n, :n])) / scale < 1e-7
        assert np.linalg.norm(push + push.T) / scale < 1e-8


def test_pushforward_single_particle_weight_row_zero():
    push = pushforward_canonical(make_toda_state([0.1], [0.7]))
    assert abs(push[0, 1]) < 1e-9  # {z0, rho0} = 0 since rho0 is constant


def test_compare_families_structure_and_identification():
    # observed: canonical bracket = 0.5 x restricted f=1 matrix (diagnostic)
    s = make_toda_state([0.3, -0.2, 0.5], [0.4, -0.6, 0.1])
    result = compare_bracket_families(s, ns=(0, 1, 2))
    assert set(result["per_n"]) == {0, 1, 2}
    assert result["c2"] == pytest.approx(0.0, abs=1e-12)
    row0 = result["per_n"][0]
    assert row0["scale"] == pytest.approx(0.5, rel=1e-6)
    assert row0["fitted_deviation"] < 1e-6


def test_state_json_round_trip():
    s = make_toda_state([0.1, -0.2], [0.3, 0.4])
    back = TodaState.from_json_dict(s.to_json_dict())
    assert np.allclose(back.q, s.q)
    assert np.allclose(back.p, s.p)
