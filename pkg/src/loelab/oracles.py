"""Slow reference evaluators used to validate the fast code paths.

Only meant for small dimensions (d <= 16).
"""
from __future__ import annotations

import numpy as np

from .dynamics import reshuffle
from .haar import PARTS
from .latetime import operator_stats_input, window_operator
from .liouville import bohr_frequencies

# (A, B) index letters of the eight eigenvector slots; slots 1, 2, 5, 6 are conjugated
_SLOT_IDX = ["jp", "JP", "kp", "KP", "kq", "KQ", "jq", "JQ"]
_CONJ = (False, True, True, False, False, True, True, False)
_B_PAIRS = ((0, 2), (1, 3), (4, 6), (5, 7))


def literal_terms(spec, Oe, geom, window=None, window_norm: str = "renormalize") -> np.ndarray:
    """The six late-time parts as eight-eigenvector sums, one einsum each."""
    Ob, n = window_operator(np.asarray(Oe), window, window_norm)
    V = spec.eigenvectors if window is None else spec.eigenvectors[:, window.sl]
    E = V.T.reshape(V.shape[1], geom.d_A, geom.d_B)  # E[a, j, alpha]
    Ec = E.conj()
    x, W = operator_stats_input(Ob)
    out = []
    for pattern, pref, factors, _ in PARTS:
        ops = [lab + idx for lab, idx in zip(pattern, _SLOT_IDX)]
        # first sum the B index shared by each pair of slots, then the rest
        pair_ops, pair_vals = [], []
        for i, k in _B_PAIRS:
            shared = ops[i][2]
            res = "".join(dict.fromkeys(c for c in ops[i] + ops[k] if c != shared))
            pair_vals.append(np.einsum(f"{ops[i]},{ops[k]}->{res}",
                                       Ec if _CONJ[i] else E, Ec if _CONJ[k] else E))
            pair_ops.append(res)
        w_ops = ["".join(f[1:]) for f in factors]
        sub = ",".join(pair_ops + w_ops) + "->"
        args = pair_vals + [x if f[0] == "x" else W for f in factors]
        val = np.einsum(sub, *args, optimize="optimal")
        out.append(pref * val)
    return np.real(np.array(out)) / n**2


def infinite_time_purity(spec, Oe, geom, tol: float = 1e-9) -> float:
    """Exact infinite-time average of Tr rho_AA'(t)^2, all frequency coincidences kept.

    Tr rho^2 = sum_{mnpq} exp(i(w_m - w_n + w_p - w_q)t) Tr(R_m R_n^dag R_p R_q^dag) / d^2
    over the distinct Bohr frequencies w_m; the average keeps every quadruple with
    w_m - w_n = -(w_p - w_q). Frequencies closer than tol * width are merged.
    """
    Oe = np.asarray(Oe)
    d = Oe.shape[0]
    E = spec.eigenvalues
    V = spec.eigenvectors
    eps = tol * max(1.0, float(E[-1] - E[0]))
    w = bohr_frequencies(E)
    a, b = np.nonzero(np.abs(Oe) > 0)
    freqs = w[a, b]
    order = np.argsort(freqs)
    a, b, freqs = a[order], b[order], freqs[order]
    starts = np.flatnonzero(np.concatenate([[True], np.diff(freqs) > eps]))
    bounds = np.append(starts, len(freqs))
    R, om = [], []
    for s, e in zip(bounds[:-1], bounds[1:]):
        Om = (V[:, a[s:e]] * Oe[a[s:e], b[s:e]]) @ V[:, b[s:e]].conj().T
        R.append(reshuffle(Om, geom.d_A, geom.d_B))
        om.append(freqs[s:e].mean())
    R = np.array(R)
    if R.shape[1] > R.shape[2]:
        # Tr(R_m R_n^dag R_p R_q^dag) is unchanged by R -> R^dag up to a cyclic relabelling
        R = np.conj(np.swapaxes(R, 1, 2))
    om = np.array(om)
    K = len(om)
    # C_mn = R_m R_n^dag, grouped by the difference w_m - w_n
    C = np.einsum("mij,nkj->mnik", R, R.conj())
    delta = np.subtract.outer(om, om).ravel()
    C = C.reshape(K * K, *C.shape[2:])
    order = np.argsort(delta)
    delta, C = delta[order], C[order]
    starts = np.flatnonzero(np.concatenate([[True], np.diff(delta) > eps]))
    bounds = np.append(starts, len(delta))
    sums = [C[s:e].sum(axis=0) for s, e in zip(bounds[:-1], bounds[1:])]
    centers = np.array([delta[s:e].mean() for s, e in zip(bounds[:-1], bounds[1:])])
    total = 0.0
    for i, c in enumerate(centers):
        j = int(np.argmin(np.abs(centers + c)))
        if abs(centers[j] + c) < eps:
            total += np.real(np.trace(sums[i] @ sums[j]))
    return float(total / d**2)


def doubled_space_purity(Oe_site, geom) -> float:
    """Purity of the reduced state built from the explicit vectorised operator |O>>."""
    O = np.asarray(Oe_site)
    d = O.shape[0]
    dA, dB = geom.d_A, geom.d_B
    # |O>> = sum O_{(j a),(j' a')} |j a> |j' a'> / sqrt(d); order factors as (A, A', B, B')
    psi = O.reshape(dA, dB, dA, dB).transpose(0, 2, 1, 3).reshape(dA * dA, dB * dB) / np.sqrt(d)
    rho = psi @ psi.conj().T
    return float(np.real(np.trace(rho @ rho)))
