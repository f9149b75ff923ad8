"""Dense spin-1/2 chain operators and the A|B bipartition geometry.

Site 0 is the leftmost Kronecker factor, i.e. the most significant bit of a
basis index, so subsystem A (sites 0..n_A-1) is the leading tensor factor.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import GeometryError

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}

BENCHMARK_PARAMS = (1.0, 1.1, 0.3, 0.25, -0.25)  # (J, hx, hz, g0, gl)


@dataclass(frozen=True)
class HilbertGeometry:
    """Chain of L qubits cut after the first n_A sites."""

    L: int
    n_A: int
    q: int = 2

    def __post_init__(self):
        if self.q != 2:
            raise GeometryError("only qubit chains (q=2) are supported")
        if self.L < 2:
            raise GeometryError(f"need L >= 2, got {self.L}")
        if not 1 <= self.n_A < self.L:
            raise GeometryError(f"need 1 <= n_A < L, got n_A={self.n_A}, L={self.L}")

    @property
    def d_A(self) -> int:
        return self.q**self.n_A

    @property
    def d_B(self) -> int:
        return self.q ** (self.L - self.n_A)

    @property
    def d(self) -> int:
        return self.q**self.L

    def index(self, j, alpha):
        """Site-basis index of the product state |j>_A |alpha>_B."""
        return np.asarray(j) * self.d_B + np.asarray(alpha)

    def split(self, idx):
        """Inverse of ``index``: returns (j, alpha)."""
        return np.divmod(np.asarray(idx), self.d_B)

    def swapped(self) -> "HilbertGeometry":
        """Same chain with the roles of A and B exchanged (sizes only)."""
        return HilbertGeometry(self.L, self.L - self.n_A, self.q)


def _check_L(L: int):
    if L < 2:
        raise GeometryError(f"chain length must be >= 2, got {L}")


def kron_all(ops):
    return reduce(np.kron, ops)


def local_op(L: int, site: int, op: np.ndarray) -> np.ndarray:
    if not 0 <= site < L:
        raise GeometryError(f"site {site} outside chain of length {L}")
    ops = [np.eye(2)] * L
    ops[site] = op
    return kron_all(ops)


def build_site_pauli(L: int, site: int, axis: str = "x") -> np.ndarray:
    """Pauli ``axis`` on ``site`` and identity elsewhere (traceless, Tr(O^2)/d = 1)."""
    _check_L(L)
    if axis not in PAULI:
        raise ValueError(f"axis must be one of x, y, z; got {axis!r}")
    return local_op(L, site, PAULI[axis])


def center_site(L: int) -> int:
    return L // 2 if L % 2 == 0 else (L - 1) // 2


def _diag_z(L: int, site: int) -> np.ndarray:
    # diagonal of sigma^z on `site` as a +-1 vector over the computational basis
    bits = (np.arange(2**L) >> (L - 1 - site)) & 1
    return 1.0 - 2.0 * bits


def build_mfim(L: int, params=BENCHMARK_PARAMS) -> np.ndarray:
    """Open mixed-field Ising chain with boundary longitudinal fields.

    H = J sum_j Z_j Z_{j+1} + sum_j (hz Z_j + hx X_j) + g0 Z_0 + gl Z_{L-1}
    """
    _check_L(L)
    J, hx, hz, g0, gl = map(float, params)
    d = 2**L
    z = [_diag_z(L, s) for s in range(L)]
    diag = sum(J * z[s] * z[s + 1] for s in range(L - 1)) + hz * sum(z)
    diag = diag + g0 * z[0] + gl * z[L - 1]
    H = np.diag(diag)
    idx = np.arange(d)
    for s in range(L):
        H[idx, idx ^ (1 << (L - 1 - s))] += hx
    return H


def is_hermitian(A: np.ndarray, rtol: float = 1e-12) -> bool:
    return np.linalg.norm(A - A.conj().T) <= rtol * max(np.linalg.norm(A), 1.0)
