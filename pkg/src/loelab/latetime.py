"""Infinite-time average of the operator purity from energy eigenstates.

Each eigenvector is reshaped into a d_A x d_B matrix E^a and all eigenstate
products are reduced to the pair overlaps M^{ac} = E^a E^c^dag. With
x_a = O_aa, W_ab = |O_ab|^2 (a != b) and n the trace normalisation (d for the
full space, d_w inside a window), the averaged purity splits into six parts:

    t1 = sum x_a x_b x_c x_d |Tr(M^ab M^cd)|^2 / n^2
    t2 = 2 sum x_a x_c W_ef Tr(M^ac rho_A^e) Tr(M^ca rho_A^f) / n^2
    t3 = sum W_ab W_cd Tr(rho_A^a rho_A^c) Tr(rho_A^b rho_A^d) / n^2
    t4 = 2 sum x_a x_g W_cd Tr(M^ac M^cg) Tr(M^gd M^da) / n^2
    t5 = sum W_ab W_cd Tr(rho_B^a rho_B^c) Tr(rho_B^d rho_B^b) / n^2
    t6 = -sum W_ab^2 Tr(rho_A^a^2) Tr(rho_A^b^2) / n^2

t2/t3 live on the A side and t4/t5 are their B-side mirror images. Everything
is evaluated on the smaller side of the cut, so no d^8 index loop is needed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import reshuffle
from .errors import ResonanceError, WindowError
from .liouville import OmegaBasis, build_omega_basis
from .spectral import EnergyWindow, SpectralData, check_nonresonance

TERM_NAMES = ("diag4", "diag2_offA", "off_A", "diag2_offB", "off_B", "off_repeat")


@dataclass
class PurityBreakdown:
    terms: np.ndarray                      # the six parts, t1..t6
    omega_terms: np.ndarray | None = None  # optional three-way split by frequency groups

    @property
    def total(self) -> float:
        return float(np.sum(self.terms))

    @property
    def F(self) -> float:
        return float(self.terms[0])

    @property
    def G(self) -> float:
        return float(self.terms[4])

    @property
    def s2(self) -> float:
        return -np.log(self.total)

    def as_dict(self) -> dict:
        out = {name: float(v) for name, v in zip(TERM_NAMES, self.terms)}
        out["total"] = self.total
        return out


# ---------------------------------------------------------------------------
# operator preparation


def operator_stats_input(Ob: np.ndarray):
    """Diagonal x_a and off-diagonal weights W_ab = |O_ab|^2 (zero diagonal)."""
    x = np.real(np.diagonal(Ob, axis1=-2, axis2=-1)).copy()
    W = np.abs(Ob) ** 2
    idx = np.arange(Ob.shape[-1])
    W[..., idx, idx] = 0.0
    return x, W


def window_operator(Oe: np.ndarray, window: EnergyWindow | None, window_norm: str = "renormalize"):
    """Operator block used by the late-time formulas and its trace normalisation n.

    Inside a window the block is P O P; with ``renormalize`` it is rescaled so
    that (1/d_w) sum |O_ab|^2 = 1. The prefactor is always 1/d_w^2.
    """
    if window is None:
        return Oe, Oe.shape[0]
    if window.d_w < 2:
        raise WindowError("window must contain at least two states")
    Ob = Oe[window.sl, window.sl]
    n2 = np.sum(np.abs(Ob) ** 2) / window.d_w
    if n2 == 0:
        raise WindowError("operator vanishes after window projection")
    if window_norm == "renormalize":
        Ob = Ob / np.sqrt(n2)
    elif window_norm != "raw":
        raise ValueError(f"unknown window_norm {window_norm!r}")
    return Ob, window.d_w


def frames_as_matrices(frames: np.ndarray, d_A: int, d_B: int) -> np.ndarray:
    """(..., d, n) column frames -> (..., n, d_A, d_B) eigenvector matrices E^a."""
    n = frames.shape[-1]
    Em = np.swapaxes(frames, -1, -2)
    return Em.reshape(frames.shape[:-2] + (n, d_A, d_B))


# ---------------------------------------------------------------------------
# factorised evaluator


def _herm(X):
    return np.conj(np.swapaxes(X, -1, -2))


class FrameTables:
    """Operator-independent tables for a batch of eigenvector frames.

    ``Em`` has shape (S, n, d_A, d_B). Internally the smaller side of the cut
    is moved to the front so all pair matrices are min(d_A, d_B) square.
    """

    def __init__(self, Em: np.ndarray):
        Em = np.asarray(Em, dtype=complex)
        if Em.ndim == 3:
            Em = Em[None]
        self.S, self.n, dA, dB = Em.shape
        self.flipped = dA > dB
        if self.flipped:
            Em = np.swapaxes(Em, -1, -2)
        self.Em = Em
        self.s, self.o = Em.shape[-2:]
        S, n, s, o = self.S, self.n, self.s, self.o
        # M[a, c] = E^a E^c^dag as one GEMM per frame
        flat = Em.reshape(S, n * s, o)
        M = flat @ _herm(flat)
        self.M = M.reshape(S, n, s, n, s).transpose(0, 1, 3, 2, 4)
        idx = np.arange(n)
        self.rho = self.M[:, idx, idx]  # (S, n, s, s) reduced states on the small side
        rv = self.rho.reshape(S, n, s * s)
        # Tr(rho^a rho^c) = sum_jk rho^a_jk conj(rho^c_jk) for Hermitian rho
        self.ov_small = np.real(rv @ _herm(rv))
        self.ov_large = np.sum(np.abs(self.M) ** 2, axis=(-2, -1))
        self.p = np.real(np.einsum("...aa->...a", self.ov_small))
        self._U = None

    # -- tables used by the cross term
    @property
    def U(self):
        """U[a, c, g] = Tr(M^ac M^cg), stored as (S, a, g, c)."""
        if self._U is None:
            S, n, s = self.S, self.n, self.s
            A = np.moveaxis(self.M, 2, 1).reshape(S, n, n, s * s)      # [c, a, (j k)]
            B = np.swapaxes(self.M, -1, -2).reshape(S, n, n, s * s)    # [c, g, (k j)]
            U = A @ np.swapaxes(B, -1, -2)                             # [c, a, g]
            self._U = np.ascontiguousarray(np.moveaxis(U, 1, 3))       # [a, g, c]
        return self._U

    def gram_small(self, x):
        """G[j, j', k, k'] = R_D R_D^dag on the small side, D = sum_a x_a |E_a><E_a|.

        ``x`` has shape (X, n); the result has shape (S, X, s, s, s, s).
        """
        S, n, s, o = self.S, self.n, self.s, self.o
        X = x.shape[0]
        d = s * o
        if n * n * s**4 <= d * d * (n + s * s):
            xx = (x[:, :, None] * x[:, None, :]).reshape(1, X, n * n, 1)
            Mv = self.M.reshape(S, 1, n * n, s * s)
            G = np.swapaxes(Mv, -1, -2) @ (xx * Mv.conj())  # [(j k), (j' k')]
            return G.reshape(S, X, s, s, s, s).transpose(0, 1, 2, 4, 3, 5)
        R = self.reshuffled_diag(x)
        return (R @ _herm(R)).reshape(S, X, s, s, s, s)

    def reshuffled_diag(self, x):
        S, n, s, o = self.S, self.n, self.s, self.o
        V = self.Em.reshape(S, 1, n, s * o)
        D = (np.swapaxes(V, -1, -2) * x[None, :, None, :]) @ V.conj()
        return reshuffle(D, s, o)

    def gram_large(self, x):
        S, s, o = self.S, self.s, self.o
        R = self.reshuffled_diag(x)
        return (np.swapaxes(R, -1, -2) @ R.conj()).reshape(S, x.shape[0], o, o, o, o)

    def rho_large(self):
        return np.einsum("...ajl,...ajm->...alm", self.Em, self.Em.conj())

    def mirror_by_cross(self) -> bool:
        n, s, o = self.n, self.s, self.o
        return n**4 + n**3 * s * s <= n * o**4 + (s * o) ** 2 * o * o

    def terms(self, Ob: np.ndarray, norm) -> np.ndarray:
        """Six parts for every frame and operator.

        ``Ob`` is one operator block (n, n) or a stack (X, n, n); ``norm`` is a
        scalar or one value per operator. Returns (S, 6) or (S, X, 6).
        """
        Ob = np.asarray(Ob)
        single = Ob.ndim == 2
        if single:
            Ob = Ob[None]
        norm = np.broadcast_to(np.asarray(norm, dtype=float), (Ob.shape[0],))
        x, W = operator_stats_input(Ob)
        G = self.gram_small(x)
        t1 = np.sum(np.abs(G) ** 2, axis=(2, 3, 4, 5))
        same_s = 2 * _same_side(G, self.rho, W)
        if self.mirror_by_cross():
            same_o = 2 * _cross_term(self.U, x, W)
        else:
            same_o = 2 * _same_side(self.gram_large(x), self.rho_large(), W)
        off_s = _pair_term(self.ov_small, W)
        off_o = _pair_term(self.ov_large, W)
        t6 = -np.einsum("xab,sa,sb->sx", W**2, self.p, self.p)
        if self.flipped:
            out = [t1, same_o, off_o, same_s, off_s, t6]
        else:
            out = [t1, same_s, off_s, same_o, off_o, t6]
        out = np.real(np.stack(out, axis=-1)) / norm[None, :, None] ** 2
        return out[:, 0] if single else out


def _same_side(G, rho, W):
    """sum G[j,j',k,k'] sum_ef W_ef rho^e[k,j] rho^f[j',k'] for each frame and operator."""
    S, n, s, _ = rho.shape
    rf = rho.reshape(S, 1, n, s * s)
    Z = W[None] @ rf                                   # [f, (k j)], W symmetric
    Y = np.swapaxes(Z, -1, -2) @ rf                    # [(k j), (j' k')]
    Y = Y.reshape(S, -1, s, s, s, s).transpose(0, 1, 3, 4, 2, 5)
    return np.real(np.sum(G * Y, axis=(2, 3, 4, 5)))


def _cross_term(U, x, W):
    """sum_ag x_a x_g sum_cd W_cd U[a,c,g] conj(U[a,d,g]), U stored as [a, g, c]."""
    S, n = U.shape[:2]
    X = W.shape[0]
    Wcat = np.moveaxis(W, 0, 1).reshape(n, X * n)      # columns (operator, d)
    Q = 0.0
    for part in (U.real, U.imag):
        P = np.ascontiguousarray(part).reshape(S * n * n, n)
        PW = (P @ Wcat).reshape(S * n * n, X, n)
        Q = Q + np.einsum("rxd,rd->rx", PW, P)
    Q = Q.reshape(S, n, n, X)
    return np.einsum("xa,xg,sagx->sx", x, x, Q)


def _pair_term(P, W):
    """sum_abcd W_ab W_cd P_ac P_bd = sum W o (P W P)."""
    P = P[:, None]
    return np.sum(W[None] * (P @ W[None] @ P), axis=(-2, -1))


# ---------------------------------------------------------------------------
# public API


def assert_nonresonant(eigs, tol: float = 1e-10):
    for k in (1, 2):
        bad = check_nonresonance(eigs, k, tol)
        if bad:
            raise ResonanceError(
                f"{len(bad)} near-degenerate {k}-sums (first {bad[0]}); the late-time formula "
                "assumes a non-degenerate spectrum and gaps")


def latetime_purity_ed(spec: SpectralData, Oe: np.ndarray, geom, window: EnergyWindow | None = None,
                       window_norm: str = "renormalize", check_resonance: bool = True,
                       resonance_tol: float = 1e-10) -> PurityBreakdown:
    Ob, norm = window_operator(Oe, window, window_norm)
    sl = slice(None) if window is None else window.sl
    if check_resonance:
        assert_nonresonant(spec.eigenvalues[sl], resonance_tol)
    Em = frames_as_matrices(spec.eigenvectors[:, sl], geom.d_A, geom.d_B)
    terms = FrameTables(Em).terms(Ob, norm)[0]
    return PurityBreakdown(terms)


def term_F(spec, Oe, geom, window=None, **kw) -> float:
    """All-diagonal part (t1)."""
    return latetime_purity_ed(spec, Oe, geom, window, **kw).F


def term_G(spec, Oe, geom, window=None, **kw) -> float:
    """Off-diagonal B-side pair part (t5)."""
    return latetime_purity_ed(spec, Oe, geom, window, **kw).G


# ---------------------------------------------------------------------------
# frequency-group form and the mutual-information-like identity


def _group_grams(basis: OmegaBasis, spec: SpectralData, geom):
    """Yield (A_m, B_m) = N_m^2 reduced grams of every frequency group."""
    V = spec.eigenvectors
    d = basis.d
    for g in basis.groups:
        a, b = g.pairs.T
        # site-basis matrix of sum_{(a,b) in I_m} O_ab |E_a><E_b|
        Om = (V[:, a] * basis.operator[a, b]) @ V[:, b].conj().T
        R = reshuffle(Om, geom.d_A, geom.d_B)
        yield R @ R.conj().T / d, R.conj().T @ R / d


def omega_purity(basis: OmegaBasis, spec: SpectralData, geom) -> np.ndarray:
    """Three-way split: same group, distinct groups traced over B, distinct groups traced over A."""
    if basis.d != spec.d:
        raise ValueError("frequency basis and spectrum have different dimensions")
    SA = np.zeros((geom.d_A**2,) * 2, dtype=complex)
    SB = np.zeros((geom.d_B**2,) * 2, dtype=complex)
    diag = 0.0
    for A, B in _group_grams(basis, spec, geom):
        SA += A
        SB += B
        diag += np.sum(np.abs(A) ** 2)
    tA = np.sum(np.abs(SA) ** 2) - diag
    tB = np.sum(np.abs(SB) ** 2) - diag
    return np.array([diag, tA, tB])


def mutual_info_identity(spec: SpectralData, Oe: np.ndarray, geom, basis: OmegaBasis | None = None) -> float:
    """Tr(rho_wA^2) + Tr(rho_wB^2) - sum_m Tr(rho_mB^2) minus the six-part total."""
    if basis is None:
        basis = build_omega_basis(Oe, spec.eigenvalues)
    SA = np.zeros((geom.d_A**2,) * 2, dtype=complex)
    SB = np.zeros((geom.d_B**2,) * 2, dtype=complex)
    single = 0.0
    for A, B in _group_grams(basis, spec, geom):
        SA += A
        SB += B
        single += np.sum(np.abs(B) ** 2)
    value = np.sum(np.abs(SA) ** 2) + np.sum(np.abs(SB) ** 2) - single
    return float(value - latetime_purity_ed(spec, Oe, geom).total)


# ---------------------------------------------------------------------------
# state-space counterpart


def state_latetime_purity(spec: SpectralData, psi: np.ndarray, geom, window: EnergyWindow | None = None) -> float:
    """Late-time average of Tr rho_A(t)^2 for a pure state psi."""
    psi = np.asarray(psi, dtype=complex)
    if abs(np.linalg.norm(psi) - 1) > 1e-10:
        raise ValueError("state must be normalised")
    V = spec.eigenvectors if window is None else spec.eigenvectors[:, window.sl]
    q = np.abs(V.conj().T @ psi) ** 2
    tab = FrameTables(frames_as_matrices(V, geom.d_A, geom.d_B))
    PA, PB = tab.ov_small[0], tab.ov_large[0]
    if tab.flipped:
        PA, PB = PB, PA
    qq = np.outer(q, q)
    np.fill_diagonal(qq, 0.0)
    return float(np.sum(q**2 * tab.p[0]) + np.sum(qq * (PA + PB)))


def page_weights(d_A: int, d: int):
    """Haar averages (DIA, SEMI, PERM) of the three partial-swap matrix elements."""
    if d_A > d or d % d_A:
        raise ValueError(f"d_A={d_A} must divide d={d}")
    dia = (d / d_A + d_A) / (d + 1)
    semi = (d * d / d_A - d_A) / (d * d - 1)
    perm = (d * d_A - d / d_A) / (d * d - 1)
    return dia, semi, perm


def page_s2(n_A: int, d: int) -> float:
    d_A = 2**n_A
    return n_A * np.log(2) - np.log((d + d_A * d_A) / (d + 1))


def assembled_state_s2(d_A: int, d: int, d_w: int | None = None, parts=("DIA", "SEMI", "PERM")) -> float:
    """-ln of the uniform-weight state purity built from a chosen subset of the three averages."""
    d_w = d if d_w is None else d_w
    dia, semi, perm = page_weights(d_A, d)
    val = 0.0
    if "DIA" in parts:
        val += dia / d_w
    if "SEMI" in parts:
        val += (d_w - 1) / d_w * semi
    if "PERM" in parts:
        val += (d_w - 1) / d_w * perm
    return -np.log(val)
