import numpy as np
import pytest

from conftest import mfim_problem
from loelab.errors import WindowError
from loelab.eth import compute_stats, synth_eth_operator
from loelab.spectral import full_window, select_window


def test_norm_identity_mfim():
    spec, Oe = mfim_problem(6)
    st = compute_stats(Oe)
    assert st.norm_sum == pytest.approx(1.0, abs=1e-10)
    raw = compute_stats(Oe, centered=False)
    assert raw.diag_var + (raw.n_diag - 1) * raw.offdiag_var == pytest.approx(1.0, abs=1e-10)
    # centred variances miss only the squared off-diagonal mean
    assert st.diag_var + (st.n_diag - 1) * st.offdiag_var <= 1.0 + 1e-12


def test_constant_diagonal():
    st = compute_stats(np.eye(8))
    assert st.diag_mean == 1.0
    assert st.diag_var == 0.0 and st.offdiag_var == 0.0 and st.offdiag_mean == 0.0
    assert st.n_offdiag == 56


def test_windows():
    spec, Oe = mfim_problem(6)
    a = compute_stats(Oe)
    b = compute_stats(Oe, full_window(spec))
    assert a.diag_var == b.diag_var and a.offdiag_var == b.offdiag_var
    w = select_window(spec, 10)
    st = compute_stats(Oe, w)
    assert st.n_diag == 10 and st.window is w
    with pytest.raises(WindowError):
        compute_stats(Oe[:1, :1])


def test_synth_zero_f_is_diagonal():
    O = synth_eth_operator(16, lambda E, w: 0 * E, lambda E: 0 * E, lambda E: E)
    assert np.array_equal(O, np.diag(np.diagonal(O)))
    assert np.allclose(np.diagonal(O), np.linspace(-1, 1, 16))


def test_synth_hermitian_and_reproducible():
    kw = dict(f_profile=lambda E, w: np.exp(-w**2), entropy_profile=lambda E: 3 + 0 * E,
              microc_profile=lambda E: 0.1 * E)
    a = synth_eth_operator(32, seed=5, **kw)
    b = synth_eth_operator(32, seed=5, **kw)
    c = synth_eth_operator(32, seed=6, **kw)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert np.allclose(a, a.conj().T)
    t = synth_eth_operator(32, seed=5, traceless=True, **kw)
    assert abs(np.trace(t)) < 1e-12
    assert np.sum(np.abs(t) ** 2) / 32 == pytest.approx(1.0)


def test_synth_offdiag_variance():
    d, f = 64, 0.7
    vals = [compute_stats(synth_eth_operator(d, lambda E, w: f + 0 * E, lambda E: np.log(d) + 0 * E,
                                             lambda E: 0 * E, seed=s)).offdiag_var for s in range(50)]
    assert np.mean(vals) == pytest.approx(f * f / d, rel=0.02)


def test_mfim_offdiag_scaling():
    # off-diagonal variance roughly halves per added site
    v = [compute_stats(mfim_problem(L)[1]).offdiag_var for L in (6, 7, 8)]
    assert 1.4 < v[0] / v[1] < 2.9 and 1.4 < v[1] / v[2] < 2.9
