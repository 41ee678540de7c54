import numpy as np
import pytest

from spectral_poisson.brackets import (
    SECOND_KIND,
    THIRD_KIND,
    TODA_RESTRICTED,
    BracketSpec,
)
from spectral_poisson.errors import Phi1Undefined
from spectral_poisson.ratfun import from_pole_residue
from spectral_poisson.verify import (
    antisymmetry_defect,
    casimir_defect,
    compatibility_defect,
    jacobi_defect,
    random_weyl,
)


def test_jacobi_third_kind_small_orders():
    rng = np.random.default_rng(0)
    rep = jacobi_defect(BracketSpec(THIRD_KIND, n=0), random_weyl(rng, 2))
    assert rep.defect < 1e-7
    assert rep.passed
    rep = jacobi_defect(BracketSpec(THIRD_KIND, n=2), random_weyl(rng, 3))
    assert rep.defect < 1e-6


def test_jacobi_tampered_field_fails():
    rng = np.random.default_rng(1)
    rep = jacobi_defect(BracketSpec(THIRD_KIND, n=0), random_weyl(rng, 2), tamper=0.1)
    assert rep.defect > 1e-3
    assert not rep.passed


def test_jacobi_second_kind():
    rng = np.random.default_rng(2)
    for fkind in ("one", "z"):
        for n_poles in (2, 3):
            rep = jacobi_defect(BracketSpec(SECOND_KIND, fkind=fkind), random_weyl(rng, n_poles))
            assert rep.defect < 1e-6


def test_jacobi_toda_restricted():
    rng = np.random.default_rng(3)
    for n in (1, 2):
        for c2 in (0.0, 1.0):
            chi = random_weyl(rng, 2, normalized=True)
            chi = from_pole_residue(chi.poles, chi.residues * np.exp(c2))
            rep = jacobi_defect(BracketSpec(TODA_RESTRICTED, n=n, c2=c2), chi)
            assert rep.defect < 1e-5


def test_compatibility_pencil():
    rng = np.random.default_rng(4)
    chi = random_weyl(rng, 2)
    rep = compatibility_defect(
        BracketSpec(THIRD_KIND, n=0), BracketSpec(THIRD_KIND, n=1), 1.0, chi
    )
    assert rep.defect < 1e-7
    rep = compatibility_defect(
        BracketSpec(THIRD_KIND, n=0), BracketSpec(THIRD_KIND, n=1), -2.7, chi
    )
    assert rep.defect < 1e-7


def test_compatibility_tampered_fails():
    rng = np.random.default_rng(5)
    chi = random_weyl(rng, 2)
    rep = compatibility_defect(
        BracketSpec(THIRD_KIND, n=0), BracketSpec(THIRD_KIND, n=1), 1.0, chi, tamper=0.1
    )
    assert rep.defect > 1e-3


def test_casimirs_of_dirac_restriction():
    rng = np.random.default_rng(6)
    chi = random_weyl(rng, 2, normalized=True)
    spec = BracketSpec(TODA_RESTRICTED, n=1, c2=0.0)
    assert casimir_defect(spec, "phi2", chi).defect < 1e-6
    assert casimir_defect(spec, "phi1", chi).defect < 1e-6
    spec2 = BracketSpec(TODA_RESTRICTED, n=2, c2=0.0)
    assert casimir_defect(spec2, "phi1", chi).defect < 1e-6


def test_casimir_negative_control_unrestricted():
    rng = np.random.default_rng(7)
    chi = random_weyl(rng, 2, normalized=True)
    rep = casimir_defect(BracketSpec(THIRD_KIND, n=1), "phi2", chi)
    assert rep.defect > 1e-3


def test_phi1_undefined_for_constant_f():
    rng = np.random.default_rng(8)
    chi = random_weyl(rng, 2, normalized=True)
    with pytest.raises(Phi1Undefined):
        casimir_defect(BracketSpec(TODA_RESTRICTED, n=0), "phi1", chi)


def test_antisymmetry_defect_modes():
    rng = np.random.default_rng(9)
    chi = random_weyl(rng, 3)
    spec = BracketSpec(THIRD_KIND, n=1)
    rep = antisymmetry_defect(spec, chi, independent_pairs=False)
    assert rep.defect == 0.0  # mirrored construction is exactly antisymmetric
    rep = antisymmetry_defect(spec, chi, independent_pairs=True)
    assert rep.defect < 1e-9
    # tamper on an order-one state: defect lands well above tolerance
    small = from_pole_residue([1.0, 2.2], [0.5, 0.4])
    rep = antisymmetry_defect(spec, small, tamper=0.1)
    assert rep.defect > 1e-2
    assert rep.defect > 1000 * rep.tolerance


def test_defect_report_serialization():
    rng = np.random.default_rng(10)
    rep = jacobi_defect(BracketSpec(THIRD_KIND, n=0), random_weyl(rng, 2))
    d = rep.to_json_dict()
    assert d["kind"] == "jacobi"
    assert d["pass"] is True
    assert "poles" in d["state"]
    assert d["specs"][0]["family"] == "third_kind"


def test_random_weyl_generator_contract():
    rng = np.random.default_rng(11)
    for _ in range(20):
        chi = random_weyl(rng, 4)
        assert np.all(chi.poles.real >= 0.5) and np.all(chi.poles.real <= 5.0)
        assert np.min(np.diff(chi.poles.real)) >= 0.2
        assert np.all(chi.residues.real >= 0.3) and np.all(chi.residues.real <= 2.0)
    chi = random_weyl(rng, 3, normalized=True)
    assert np.sum(chi.residues) == pytest.approx(1.0)
