"""Bohr frequencies, the frequency-grouped operator basis, and energy-basis evolution.

A unit-norm operator (Tr(O^dag O)/d = 1) is split by Liouvillian frequency:
|O>> = sum_m N_m |w_m>>, where group m collects the pairs (a, b) with
E_a - E_b = w_m and N_m^2 = (1/d) sum_{(a,b) in I_m} |O_ab|^2.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ResonanceError


@dataclass
class OmegaGroup:
    omega: float
    pairs: np.ndarray  # (n, 2) int array of (a, b)
    norm: float        # N_m


@dataclass
class OmegaBasis:
    groups: list
    d: int
    operator: np.ndarray = field(repr=False)

    @property
    def K(self) -> int:
        return len(self.groups)

    def norms(self) -> np.ndarray:
        return np.array([g.norm for g in self.groups])

    def group_matrix(self, m: int) -> np.ndarray:
        """Energy-basis matrix of N_m |w_m>> (the operator restricted to group m)."""
        g = self.groups[m]
        out = np.zeros((self.d, self.d), dtype=complex)
        a, b = g.pairs.T
        out[a, b] = self.operator[a, b]
        return out

    def reconstruct(self) -> np.ndarray:
        return sum(self.group_matrix(m) for m in range(self.K))


def operator_norm2(O: np.ndarray) -> float:
    """Infinite-temperature norm squared, Tr(O^dag O)/d."""
    return float(np.sum(np.abs(O) ** 2).real / O.shape[0])


def normalize(O: np.ndarray) -> np.ndarray:
    n2 = operator_norm2(O)
    if n2 == 0:
        raise ValueError("operator has zero norm")
    return O / np.sqrt(n2)


def bohr_frequencies(eigs) -> np.ndarray:
    eigs = np.asarray(eigs, dtype=float)
    return np.subtract.outer(eigs, eigs)


def build_omega_basis(O: np.ndarray, eigs, group_tol: float | None = None,
                      assume_nonresonant: bool = True) -> OmegaBasis:
    """Group the non-vanishing components O_ab by Bohr frequency.

    ``group_tol`` defaults to 1e-9 times the spectral width. Elements with
    |O_ab| <= 1e-14 max|O| are dropped. With ``assume_nonresonant`` a group that
    mixes diagonal and off-diagonal pairs raises ResonanceError.
    """
    O = np.asarray(O)
    eigs = np.asarray(eigs, dtype=float)
    d = len(eigs)
    width = float(eigs.max() - eigs.min()) if d > 1 else 1.0
    if group_tol is None:
        group_tol = 1e-9 * width
    w = bohr_frequencies(eigs)
    mask = np.abs(O) > 1e-14 * np.abs(O).max()
    a, b = np.nonzero(mask)
    freqs = w[a, b]
    order = np.argsort(freqs, kind="stable")
    a, b, freqs = a[order], b[order], freqs[order]
    # single sweep: a new group starts whenever the gap to the previous frequency exceeds tol
    starts = np.flatnonzero(np.concatenate([[True], np.diff(freqs) > group_tol]))
    bounds = np.append(starts, len(freqs))
    groups = []
    for s, e in zip(bounds[:-1], bounds[1:]):
        pa, pb = a[s:e], b[s:e]
        diag = pa == pb
        if assume_nonresonant and diag.any() and not diag.all():
            raise ResonanceError(
                f"frequency group near {freqs[s]:.3e} mixes diagonal and off-diagonal pairs")
        n2 = np.sum(np.abs(O[pa, pb]) ** 2) / d
        omega = 0.0 if diag.all() else float(np.mean(freqs[s:e]))
        groups.append(OmegaGroup(omega, np.column_stack([pa, pb]), float(np.sqrt(n2))))
    return OmegaBasis(groups, d, O)


def evolve_in_energy_basis(O: np.ndarray, eigs, t: float) -> np.ndarray:
    """Heisenberg evolution O_ab(t) = exp(i (E_a - E_b) t) O_ab."""
    return np.exp(1j * bohr_frequencies(eigs) * t) * O
