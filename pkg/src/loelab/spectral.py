"""Eigendecomposition, energy-basis rotation, spectral windows and non-resonance scans."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np
import scipy.linalg

from .errors import GeometryError, WindowError
from .spin_chain import is_hermitian


@dataclass(frozen=True)
class SpectralData:
    eigenvalues: np.ndarray   # ascending
    eigenvectors: np.ndarray  # column a is |E_a>

    @property
    def d(self) -> int:
        return len(self.eigenvalues)

    @property
    def width(self) -> float:
        return float(self.eigenvalues[-1] - self.eigenvalues[0])

    def mean_spacing(self) -> float:
        return self.width / max(self.d - 1, 1)


@dataclass(frozen=True)
class EnergyWindow:
    indices: np.ndarray
    center_energy: float

    @property
    def d_w(self) -> int:
        return len(self.indices)

    @property
    def sl(self) -> slice:
        return slice(int(self.indices[0]), int(self.indices[-1]) + 1)


def eigendecompose(H: np.ndarray) -> SpectralData:
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise GeometryError("Hamiltonian must be square")
    if not is_hermitian(H):
        raise ValueError("Hamiltonian is not Hermitian")
    E, V = scipy.linalg.eigh(H)
    return SpectralData(E, V)


def to_energy_basis(O: np.ndarray, spec: SpectralData) -> np.ndarray:
    """O_ab = <E_a|O|E_b>."""
    O = np.asarray(O)
    if O.shape != (spec.d, spec.d):
        raise GeometryError(f"operator shape {O.shape} does not match d={spec.d}")
    V = spec.eigenvectors
    return V.conj().T @ O @ V


def full_window(spec: SpectralData) -> EnergyWindow:
    return EnergyWindow(np.arange(spec.d), float(np.median(spec.eigenvalues)))


def select_window(spec: SpectralData, d_w: int) -> EnergyWindow:
    """Contiguous block of d_w eigenstates centred on the spectral median."""
    d = spec.d
    if not 1 <= d_w <= d:
        raise WindowError(f"window size {d_w} outside 1..{d}")
    start = (d - d_w) // 2
    idx = np.arange(start, start + d_w)
    return EnergyWindow(idx, float(np.median(spec.eigenvalues)))


def select_window_by_width(spec: SpectralData, delta_E: float, E0: float | None = None) -> EnergyWindow:
    """Largest contiguous block inside [E0 - dE/2, E0 + dE/2]; E0 defaults to the median."""
    E = spec.eigenvalues
    if E0 is None:
        E0 = float(np.median(E))
    idx = np.flatnonzero(np.abs(E - E0) <= delta_E / 2)
    if len(idx) == 0:
        raise WindowError(f"no eigenstate within {delta_E} of {E0}")
    return EnergyWindow(idx, E0)


def restrict(spec: SpectralData, window: EnergyWindow) -> SpectralData:
    """Window eigenvalues and the corresponding d x d_w block of eigenvectors."""
    return SpectralData(spec.eigenvalues[window.sl], spec.eigenvectors[:, window.sl])


def check_nonresonance(eigs, k: int, tol: float, allow_large_k: bool = False):
    """Pairs of distinct k-subsets of eigenvalue indices with (nearly) equal sums.

    Two sums count as equal when they differ by less than tol * max(1, width).
    Returns a list of (subset, subset) index tuples; empty means the condition holds.
    """
    eigs = np.asarray(eigs, dtype=float)
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > 4 and not allow_large_k:
        raise ValueError("k > 4 needs allow_large_k=True (combinatorial growth)")
    n = len(eigs)
    if n < k:
        return []
    width = float(eigs.max() - eigs.min()) if n > 1 else 0.0
    eps = tol * max(1.0, width)
    n_sub = comb(n, k)
    subsets = np.fromiter(
        (i for c in combinations(range(n), k) for i in c), dtype=np.int64, count=n_sub * k
    ).reshape(n_sub, k)
    sums = eigs[subsets].sum(axis=1)
    order = np.argsort(sums, kind="stable")
    s = sums[order]
    out = []
    # candidate starts: only where the next sum is close, then walk forward
    for i in np.flatnonzero(np.diff(s) < eps):
        j = i + 1
        while j < n_sub and s[j] - s[i] < eps:
            out.append((tuple(subsets[order[i]]), tuple(subsets[order[j]])))
            j += 1
    return out
