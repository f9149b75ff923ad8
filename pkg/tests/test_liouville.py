import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from loelab.errors import ResonanceError
from loelab.liouville import (bohr_frequencies, build_omega_basis, evolve_in_energy_basis, normalize,
                              operator_norm2)
from loelab.spectral import eigendecompose, to_energy_basis
from loelab.spin_chain import PAULI, build_site_pauli, kron_all

from conftest import mfim_problem


def test_bohr_frequencies():
    w = bohr_frequencies([0.3, -1.2, 2.5])
    assert np.array_equal(w, -w.T)
    assert np.all(np.diag(w) == 0)
    w = bohr_frequencies([-1, -1, 1, 1])
    off = w[~np.eye(4, dtype=bool)]
    assert set(np.unique(off)) <= {-2, 0, 2}


def test_commuting_operator_single_group():
    H = np.diag([-1.5, -0.2, 0.4, 1.9])
    O = kron_all([PAULI["z"], PAULI["z"]]).real
    basis = build_omega_basis(O, np.diag(H))
    assert basis.K == 1
    assert basis.groups[0].omega == 0.0
    assert basis.groups[0].norm == pytest.approx(1.0)


def test_mfim_basis_properties():
    spec, Oe = mfim_problem(6)
    basis = build_omega_basis(Oe, spec.eigenvalues)
    assert basis.K <= 64 * 63 + 1
    assert np.sum(basis.norms() ** 2) == pytest.approx(1.0, abs=1e-10)
    zero = [g for g in basis.groups if g.omega == 0.0]
    assert len(zero) == 1 and len(zero[0].pairs) == 64
    assert np.all(zero[0].pairs[:, 0] == zero[0].pairs[:, 1])
    assert np.max(np.abs(basis.reconstruct() - Oe)) <= 1e-10
    g = basis.groups[5]
    a, b = g.pairs.T
    assert g.norm**2 == pytest.approx(np.sum(np.abs(Oe[a, b]) ** 2) / 64)


def test_resonance_conflict_raises():
    eigs = np.array([0.0, 1.0, 1.0])  # degenerate pair: w_12 = 0 joins the diagonal group
    O = np.array([[1.0, 0, 0], [0, 0, 1.0], [0, 1.0, 0]])
    with pytest.raises(ResonanceError):
        build_omega_basis(O, eigs)
    assert build_omega_basis(O, eigs, assume_nonresonant=False).K == 1


def test_drop_threshold():
    O = np.diag([1.0, -1.0])
    O[0, 1] = O[1, 0] = 1e-16
    assert build_omega_basis(O, [0.0, 1.0]).K == 1


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_random_completeness_and_reconstruction(seed):
    r = np.random.default_rng(seed)
    A = r.standard_normal((8, 8)) + 1j * r.standard_normal((8, 8))
    sp = eigendecompose(A + A.conj().T)
    B = r.standard_normal((8, 8)) + 1j * r.standard_normal((8, 8))
    Oe = to_energy_basis(normalize(B + B.conj().T), sp)
    basis = build_omega_basis(Oe, sp.eigenvalues)
    assert np.sum(basis.norms() ** 2) == pytest.approx(1.0, abs=1e-10)
    assert np.max(np.abs(basis.reconstruct() - Oe)) <= 1e-10


def test_evolution_basic():
    spec, Oe = mfim_problem(4)
    E = spec.eigenvalues
    assert np.array_equal(evolve_in_energy_basis(Oe, E, 0.0), Oe)
    for t in (0.3, 7.0, 150.0):
        Ot = evolve_in_energy_basis(Oe, E, t)
        assert operator_norm2(Ot) == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(np.linalg.eigvalsh(Ot), np.linalg.eigvalsh(Oe), atol=1e-10)
    a = evolve_in_energy_basis(evolve_in_energy_basis(Oe, E, 1.3), E, 2.9)
    assert np.max(np.abs(a - evolve_in_energy_basis(Oe, E, 4.2))) <= 1e-12


def test_evolution_two_level_hand_solution():
    # H = sigma_z, O = sigma_x: O(t) = e^{iHt} O e^{-iHt} = cos(2t) sigma_x - sin(2t) sigma_y
    sp = eigendecompose(PAULI["z"])
    Oe = to_energy_basis(PAULI["x"], sp)
    for t in (0.0, 0.4, 2.1):
        Ot = evolve_in_energy_basis(Oe, sp.eigenvalues, t)
        assert Ot[1, 0] == pytest.approx(np.exp(2j * t) * Oe[1, 0])
        site = sp.eigenvectors @ Ot @ sp.eigenvectors.conj().T
        assert np.allclose(site, np.cos(2 * t) * PAULI["x"] - np.sin(2 * t) * PAULI["y"])


def test_normalize():
    O = build_site_pauli(3, 1, "z") * 3.0
    assert operator_norm2(normalize(O)) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        normalize(np.zeros((2, 2)))
