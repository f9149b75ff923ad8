import numpy as np
import pytest

from loelab.checks import random_problem
from loelab.latetime import latetime_purity_ed
from loelab.oracles import doubled_space_purity, infinite_time_purity, literal_terms
from loelab.spectral import select_window
from loelab.spin_chain import HilbertGeometry


@pytest.mark.parametrize("L,n_A", [(3, 1), (3, 2), (4, 2)])
def test_literal_matches_fast(L, n_A):
    spec, Oe = random_problem(np.random.default_rng(L + n_A), L, traceless=False)
    geom = HilbertGeometry(L, n_A)
    fast = latetime_purity_ed(spec, Oe, geom).terms
    assert np.allclose(literal_terms(spec, Oe, geom), fast, rtol=1e-10, atol=1e-14)


@pytest.mark.parametrize("norm", ["renormalize", "raw"])
def test_literal_matches_fast_windowed(norm):
    spec, Oe = random_problem(np.random.default_rng(9), 4)
    geom = HilbertGeometry(4, 1)
    w = select_window(spec, 6)
    fast = latetime_purity_ed(spec, Oe, geom, window=w, window_norm=norm).terms
    assert np.allclose(literal_terms(spec, Oe, geom, w, norm), fast, rtol=1e-10, atol=1e-14)


def test_doubled_space_product_operator():
    geom = HilbertGeometry(2, 1)
    sx = np.array([[0, 1], [1, 0]])
    assert doubled_space_purity(np.kron(sx, np.eye(2)), geom) == pytest.approx(1.0)
    # the swap gate is maximally entangled as an operator
    swap = np.eye(4)[[0, 2, 1, 3]]
    assert doubled_space_purity(swap, geom) == pytest.approx(0.25)


def test_infinite_time_vs_time_average():
    """The exact infinite-time average keeps frequency coincidences w_ab + w_bc = w_ac.

    The six-part formula drops them, so the two differ at the percent level at d = 8;
    a long numerical time average follows the exact average.
    """
    spec, Oe = random_problem(np.random.default_rng(4), 3)
    geom = HilbertGeometry(3, 1)
    exact = infinite_time_purity(spec, Oe, geom)
    six = latetime_purity_ed(spec, Oe, geom).total
    rng = np.random.default_rng(0)
    ts = rng.uniform(0, 5000, 3000)
    vals = []
    for t in ts:
        ph = np.exp(-1j * spec.eigenvalues * t)
        Ot = spec.eigenvectors @ ((ph[:, None] * Oe * ph.conj()[None, :]) @ spec.eigenvectors.conj().T)
        vals.append(doubled_space_purity(Ot, geom))
    vals = np.array(vals)
    err = vals.std(ddof=1) / np.sqrt(len(vals))
    assert abs(vals.mean() - exact) <= 3 * err
    assert 1e-3 < abs(six - exact) / exact < 0.1
