"""Operator entanglement in the time domain.

The vectorised operator |O>> lives on (A x B) x (A' x B'); the reduced state on
A x A' comes from reshuffling O_{(j a),(j' a')} into a matrix with rows (j, j')
and columns (a, a').
"""
from __future__ import annotations

import numpy as np

from .errors import GeometryError
from .liouville import evolve_in_energy_basis
from .spectral import EnergyWindow, SpectralData


def reshuffle(O: np.ndarray, d_A: int, d_B: int) -> np.ndarray:
    """R[(j, j'), (a, a')] = O[(j, a), (j', a')], shape (d_A^2, d_B^2).

    Leading axes of ``O`` are treated as batch axes.
    """
    O = np.asarray(O)
    batch = O.shape[:-2]
    if O.shape[-2:] != (d_A * d_B, d_A * d_B):
        raise GeometryError(f"operator shape {O.shape[-2:]} incompatible with d_A={d_A}, d_B={d_B}")
    nb = len(batch)
    R = O.reshape(batch + (d_A, d_B, d_A, d_B))
    R = np.moveaxis(R, nb + 2, nb + 1)  # (j, j', a, a')
    return R.reshape(batch + (d_A * d_A, d_B * d_B))


def reduced_density(O: np.ndarray, geom, norm: float | None = None) -> np.ndarray:
    """rho_AA' = R R^dag / norm, with norm = d by default."""
    R = reshuffle(O, geom.d_A, geom.d_B)
    if norm is None:
        norm = geom.d
    return R @ R.conj().swapaxes(-1, -2) / norm


def purity(rho: np.ndarray) -> float:
    # Tr rho^2 for Hermitian rho is the squared Frobenius norm
    return float(np.sum(np.abs(rho) ** 2))


def operator_purity(O: np.ndarray, geom, norm: float | None = None):
    """Tr rho_AA'^2 computed on whichever side of the cut is smaller."""
    R = reshuffle(O, geom.d_A, geom.d_B)
    if norm is None:
        norm = geom.d
    if R.shape[-2] <= R.shape[-1]:
        G = R @ R.conj().swapaxes(-1, -2)
    else:
        G = R.conj().swapaxes(-1, -2) @ R
    return np.sum(np.abs(G) ** 2, axis=(-2, -1)) / norm**2


def renyi(rho: np.ndarray, alpha: float = 2.0) -> float:
    if alpha < 1:
        raise ValueError("Renyi index must be >= 1")
    if alpha == 2:
        return -np.log(purity(rho))
    lam = np.linalg.eigvalsh(rho)
    lam = lam[lam > 1e-15]
    if alpha == 1:
        return float(-np.sum(lam * np.log(lam)))
    return float(np.log(np.sum(lam**alpha)) / (1 - alpha))


def _windowed_operator(spec: SpectralData, Oe: np.ndarray, window: EnergyWindow | None):
    """Energy eigenvalues, frame and operator block used for evolution, plus the trace norm."""
    if window is None:
        return spec.eigenvalues, spec.eigenvectors, Oe, spec.d
    sl = window.sl
    Ow = Oe[sl, sl]
    n2 = np.sum(np.abs(Ow) ** 2) / window.d_w
    if n2 == 0:
        raise ValueError("operator vanishes inside the window")
    return spec.eigenvalues[sl], spec.eigenvectors[:, sl], Ow / np.sqrt(n2), window.d_w


def loe_timeseries(spec: SpectralData, Oe: np.ndarray, geom, times, window: EnergyWindow | None = None):
    """Array of rows (t, purity, S2) for the Heisenberg-evolved operator."""
    E, V, Ow, norm = _windowed_operator(spec, Oe, window)
    rows = []
    for t in np.asarray(times, dtype=float):
        Ot = V @ evolve_in_energy_basis(Ow, E, t) @ V.conj().T
        p = float(operator_purity(Ot, geom, norm))
        rows.append((t, p, -np.log(p)))
    return np.array(rows).reshape(-1, 3)


def default_t_max(spec: SpectralData) -> float:
    return 100 * 2 * np.pi / spec.mean_spacing()


def time_average_purity_numeric(spec: SpectralData, Oe: np.ndarray, geom, t_max: float | None = None,
                                n_samples: int = 4096, window: EnergyWindow | None = None,
                                return_stderr: bool = False):
    """Uniform-grid average of Tr rho_AA'(t)^2 over [0, t_max].

    With ``return_stderr`` a naive standard error of the grid mean is returned too.
    """
    if t_max is None:
        t_max = default_t_max(spec)
    if n_samples == 1:
        times = np.zeros(1)
    else:
        times = np.linspace(0.0, t_max, n_samples)
    p = loe_timeseries(spec, Oe, geom, times, window)[:, 1]
    mean = float(np.mean(p))
    if return_stderr:
        err = float(np.std(p, ddof=1) / np.sqrt(len(p))) if len(p) > 1 else 0.0
        return mean, err
    return mean
