"""Matrix-element statistics in the energy basis and a synthetic ETH operator generator."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import WindowError
from .liouville import bohr_frequencies


@dataclass(frozen=True)
class EthStatistics:
    diag_mean: float
    diag_var: float
    offdiag_mean: complex
    offdiag_var: float
    n_diag: int
    n_offdiag: int
    window: object = None

    @property
    def norm_sum(self) -> float:
        """Raw second moments recombined: (1/n) sum_ab |O_ab|^2 of the analysed block."""
        n = self.n_diag
        m2_d = self.diag_var + self.diag_mean**2
        m2_o = self.offdiag_var + abs(self.offdiag_mean) ** 2
        return m2_d + (n - 1) * m2_o


def compute_stats(Oe: np.ndarray, window=None, centered: bool = True) -> EthStatistics:
    """Means and variances of diagonal and off-diagonal elements.

    The off-diagonal variance uses |O_ab|^2. With ``centered=False`` the squared
    means are not subtracted (pure second moments).
    """
    Oe = np.asarray(Oe)
    Ob = Oe if window is None else Oe[window.sl, window.sl]
    n = Ob.shape[0]
    if n < 2:
        raise WindowError("need at least two states for off-diagonal statistics")
    x = np.real(np.diagonal(Ob))
    off = ~np.eye(n, dtype=bool)
    o = Ob[off]
    mu_d = float(x.mean())
    mu_o = complex(o.mean())
    var_d = float(np.mean(x**2))
    var_o = float(np.mean(np.abs(o) ** 2))
    if centered:
        var_d -= mu_d**2
        var_o -= abs(mu_o) ** 2
    if np.isrealobj(Ob) or abs(mu_o.imag) < 1e-15:
        mu_o = mu_o.real
    return EthStatistics(mu_d, var_d, mu_o, var_o, n, n * (n - 1), window)


def _philox(seed) -> np.random.Generator:
    # counter-based stream: reproducible regardless of how the fill is chunked
    return np.random.Generator(np.random.Philox(key=int(seed)))


def synth_eth_operator(d: int, f_profile, entropy_profile, microc_profile, eigs=None, seed=0,
                       traceless: bool = False):
    """Random Hermitian O_ab = O(E) delta_ab + exp(-S(E)/2) f(E, w) R_ab in the energy basis.

    E = (E_a + E_b)/2 and w = E_a - E_b are taken from ``eigs`` (a flat
    spectrum on [-1, 1] by default). R is real Gaussian on the diagonal and
    complex Gaussian with unit variance off the diagonal. The profiles are
    called with numpy arrays. With ``traceless`` the trace is removed and the
    result rescaled to unit norm (1/d) Tr O^2 = 1.
    """
    eigs = np.linspace(-1.0, 1.0, d) if eigs is None else np.asarray(eigs, dtype=float)
    if len(eigs) != d:
        raise ValueError("eigs must have length d")
    rng = _philox(seed)
    Ebar = 0.5 * np.add.outer(eigs, eigs)
    w = bohr_frequencies(eigs)
    R = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    R = np.triu(R, 1)
    R = R + R.conj().T
    R[np.diag_indices(d)] = rng.standard_normal(d)
    amp = np.exp(-0.5 * np.asarray(entropy_profile(Ebar), dtype=float)) * np.asarray(f_profile(Ebar, w), dtype=float)
    O = amp * R
    O[np.diag_indices(d)] += np.asarray(microc_profile(eigs), dtype=float) * np.ones(d)
    if traceless:
        O[np.diag_indices(d)] -= np.trace(O).real / d
        n2 = np.sum(np.abs(O) ** 2) / d
        if n2 > 0:
            O = O / np.sqrt(n2)
    return O
