import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from loelab.dynamics import (default_t_max, loe_timeseries, operator_purity, purity, reduced_density, renyi,
                             reshuffle, time_average_purity_numeric)
from loelab.errors import GeometryError
from loelab.liouville import evolve_in_energy_basis, normalize
from loelab.oracles import doubled_space_purity
from loelab.spectral import select_window
from loelab.spin_chain import PAULI, HilbertGeometry, build_site_pauli, kron_all

from conftest import mfim_problem


def random_unit_operator(r, d):
    A = r.standard_normal((d, d)) + 1j * r.standard_normal((d, d))
    return normalize(A + A.conj().T)


def test_product_operators_are_pure():
    g = HilbertGeometry(3, 1)
    O = build_site_pauli(3, 0, "y")
    assert purity(reduced_density(O, g)) == pytest.approx(1.0)
    O2 = kron_all([PAULI["x"], PAULI["x"]])
    assert purity(reduced_density(O2, HilbertGeometry(2, 1))) == pytest.approx(1.0)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), n_A=st.integers(1, 3))
def test_reduced_state_invariants(seed, n_A):
    r = np.random.default_rng(seed)
    g = HilbertGeometry(4, n_A)
    O = random_unit_operator(r, 16)
    rho = reduced_density(O, g)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-10)
    assert np.allclose(rho, rho.conj().T, atol=1e-12)
    assert np.linalg.eigvalsh(rho).min() >= -1e-10
    p = purity(rho)
    assert p == pytest.approx(float(operator_purity(O, g)), rel=1e-12)
    assert p == pytest.approx(doubled_space_purity(O, g), rel=1e-12)
    # Schmidt symmetry: the complementary reduction has the same purity
    R = reshuffle(O, g.d_A, g.d_B)
    assert purity(R.conj().T @ R / 16) == pytest.approx(p, rel=1e-10)
    assert renyi(rho, 2) <= np.log(g.d_A**2) + 1e-12


def test_reshuffle_shapes():
    O = np.arange(64.0).reshape(8, 8)
    R = reshuffle(O, 2, 4)
    assert R.shape == (4, 16)
    assert R[1, 5] == O[0 * 4 + 1, 1 * 4 + 1]  # (j, j') = (0, 1), (a, a') = (1, 1)
    with pytest.raises(GeometryError):
        reshuffle(O, 2, 2)


def test_renyi_examples():
    pure = np.diag([1.0, 0, 0, 0])
    mixed = np.eye(4) / 4
    for a in (1, 2, 3.5):
        assert renyi(pure, a) == pytest.approx(0.0, abs=1e-12)
        assert renyi(mixed, a) == pytest.approx(np.log(4))
    with pytest.raises(ValueError):
        renyi(mixed, 0.5)


def test_timeseries_trivial():
    spec, Oe = mfim_problem(6)
    # sigma_x at site 0 lies inside A for every cut
    Oe0 = spec.eigenvectors.conj().T @ build_site_pauli(6, 0, "x") @ spec.eigenvectors
    ts = loe_timeseries(spec, Oe0, HilbertGeometry(6, 2), np.linspace(0, 30, 61))
    assert ts[0, 2] == pytest.approx(0.0, abs=1e-12)
    assert np.all(ts[:, 1] > 0) and np.all(ts[:, 1] <= 1 + 1e-12)


def test_time_reversal_symmetry():
    spec, Oe = mfim_problem(4)
    g = HilbertGeometry(4, 2)
    for t in (0.5, 1.7, 4.0, 9.3, 21.0):
        p = loe_timeseries(spec, Oe, g, [t, -t])[:, 1]
        assert p[0] == pytest.approx(p[1], abs=1e-10)


def test_time_average_single_sample():
    spec, Oe = mfim_problem(4)
    g = HilbertGeometry(4, 1)
    assert time_average_purity_numeric(spec, Oe, g, 10.0, 1) == pytest.approx(
        float(operator_purity(build_site_pauli(4, 2, "x"), g)))


def test_time_average_quadrature_consistency():
    spec, Oe = mfim_problem(6)
    g = HilbertGeometry(6, 2)
    t_max = 2000.0
    m1, e1 = time_average_purity_numeric(spec, Oe, g, t_max, 2000, return_stderr=True)
    m2, e2 = time_average_purity_numeric(spec, Oe, g, t_max, 4000, return_stderr=True)
    assert abs(m1 - m2) < 2 * max(e1, e2)


def test_windowed_timeseries_norm():
    spec, Oe = mfim_problem(8)
    w = select_window(spec, 20)
    ts = loe_timeseries(spec, Oe, HilbertGeometry(8, 3), [0.0, 5.0], w)
    assert np.all((ts[:, 1] > 0) & (ts[:, 1] <= 1 + 1e-12))
    assert default_t_max(spec) == pytest.approx(100 * 2 * np.pi / spec.mean_spacing())
