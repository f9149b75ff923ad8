"""Haar replacement of energy eigenstates.

The eigenvector components E^a_{j alpha} are replaced by columns of a Haar
unitary of dimension d = d_A d_B. The average of every late-time part becomes a
Weingarten sum over sigma, tau in S_4; the row deltas identify eigenstate labels
and the column deltas close loops over the A and B indices. Collecting the
resulting operator sums gives 13 statistics T_n with weights w_n(d_A, d_B).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

import numpy as np

from .errors import DomainError
from .latetime import FrameTables, frames_as_matrices, operator_stats_input, window_operator
from .weingarten import _Classes, compose, inverse, permutation_table, sample_haar_isometry, weingarten

N_STATS = 13

# Each part is described by the eight eigenstate labels entering the product of
# four U and four conj(U) factors, a prefactor, the operator weight (list of
# ("x", label) diagonal and ("W", l1, l2) off-diagonal factors) and the labels
# that must differ.
#   unconjugated rows: labels 0, 3, 4, 7    conjugated rows: labels 1, 2, 5, 6
PARTS = (
    ("aabbccdd", 1, [("x", "a"), ("x", "b"), ("x", "c"), ("x", "d")], []),
    ("aaccefef", 2,
     [("x", "a"), ("x", "c"), ("W", "e", "f")], [("e", "f")]),
    ("ababcdcd", 1, [("W", "a", "b"), ("W", "c", "d")], [("a", "b"), ("c", "d")]),
    ("aacdcdgg", 2, [("x", "a"), ("x", "g"), ("W", "c", "d")], [("c", "d")]),
    ("abcdcdab", 1, [("W", "a", "b"), ("W", "c", "d")], [("a", "b"), ("c", "d")]),
    ("abababab", -1, [("W", "a", "b"), ("W", "a", "b")], [("a", "b")]),
)

# Operator statistics in the same notation.
STATS = (
    ([("x", "a")] * 4, []),
    ([("x", "a")] * 3 + [("x", "b")], []),
    ([("x", "a")] * 2 + [("x", "b")] * 2, []),
    ([("x", "a")] * 2 + [("x", "b"), ("x", "c")], []),
    ([("x", "a"), ("x", "b"), ("x", "c"), ("x", "d")], []),
    ([("x", "a"), ("x", "c"), ("W", "a", "c")], [("a", "c")]),
    ([("x", "a"), ("x", "a"), ("W", "a", "c")], [("a", "c")]),
    ([("x", "a"), ("x", "a"), ("W", "e", "f")], [("e", "f")]),
    ([("x", "a"), ("x", "b"), ("W", "e", "f")], [("e", "f")]),
    ([("x", "c"), ("W", "c", "f"), ("x", "a")], [("c", "f")]),
    ([("W", "a", "b"), ("W", "a", "b")], [("a", "b")]),
    ([("W", "a", "b"), ("W", "c", "d")], [("a", "b"), ("c", "d")]),
    ([("W", "a", "b"), ("W", "b", "c")], [("a", "b"), ("b", "c"), ("a", "c")]),
)

STAT_LABELS = (
    "sum x^4", "sum x^3 Tr", "(sum x^2)^2", "sum x^2 Tr^2", "Tr^4",
    "sum x_a x_c W_ac", "sum x_a^2 W_ac", "sum x^2 sum W", "sum W Tr^2", "sum x_c W_cf Tr",
    "sum W^2", "(sum W)^2", "sum W_ab W_bc (distinct)",
)

# Column slots (A label, B label) in the same unconjugated / conjugated order.
_COLS = [("j", "p"), ("K", "P"), ("k", "q"), ("J", "Q")]
_CCOLS = [("J", "P"), ("k", "p"), ("K", "Q"), ("j", "q")]


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def _canonical(factors, block_of, nblocks):
    """Isomorphism-invariant key of a monomial over distinct block labels."""
    best = None
    for perm in permutations(range(nblocks)):
        xs = [0] * nblocks
        edges = []
        for f in factors:
            if f[0] == "x":
                xs[perm[block_of[f[1]]]] += 1
            else:
                u, v = perm[block_of[f[1]]], perm[block_of[f[2]]]
                edges.append((min(u, v), max(u, v)))
        key = (tuple(xs), tuple(sorted(edges)))
        if best is None or key < best:
            best = key
    return best


def expand_distinct(factors, constraints):
    """Write sum_{labels, constraints} prod(factors) as distinct-label monomials.

    Returns {canonical key: integer multiplicity}.
    """
    labels = sorted({l for f in factors for l in f[1:]})
    forbidden = {frozenset(c) for c in constraints}
    out = {}
    for part in _set_partitions(labels):
        block_of = {}
        for i, block in enumerate(part):
            for l in block:
                block_of[l] = i
        if any(block_of[a] == block_of[b] for a, b in (tuple(c) for c in forbidden)):
            continue
        key = _canonical(factors, block_of, len(part))
        out[key] = out.get(key, 0) + 1
    return out


@lru_cache(maxsize=None)
def _stat_basis():
    """Matrix expressing each statistic in the distinct-monomial basis."""
    expansions = [expand_distinct(f, c) for f, c in STATS]
    keys = sorted({k for e in expansions for k in e})
    C = np.zeros((N_STATS, len(keys)))
    for n, e in enumerate(expansions):
        for k, v in e.items():
            C[n, keys.index(k)] = v
    return keys, C


def _col_loops(tau):
    """Number of closed A loops and B loops for column matching tau."""
    cls = _Classes()
    for k in range(4):
        a, b = _COLS[k], _CCOLS[tau[k]]
        cls.union(("A", a[0]), ("A", b[0]))
        cls.union(("B", a[1]), ("B", b[1]))
    groups = cls.groups()
    nA = sum(1 for g in groups if g[0][0] == "A")
    return nA, len(groups) - nA


@lru_cache(maxsize=None)
def _row_reductions(part_index: int):
    """For every sigma: reduced monomial expansion of one part, or None if it vanishes."""
    pattern, _, factors, constraints = PARTS[part_index]
    urows = [pattern[i] for i in (0, 3, 4, 7)]
    crows = [pattern[i] for i in (1, 2, 5, 6)]
    out = {}
    for sigma in permutation_table(4).perms:
        cls = _Classes()
        for l in pattern:
            cls.find(l)
        for k in range(4):
            cls.union(urows[k], crows[sigma[k]])
        rep = {l: cls.find(l) for l in pattern}
        cons = [(rep[a], rep[b]) for a, b in constraints]
        if any(a == b for a, b in cons):
            out[sigma] = None
            continue
        fac = [(f[0],) + tuple(rep[l] for l in f[1:]) for f in factors]
        out[sigma] = expand_distinct(fac, cons)
    return out


@dataclass
class WeightTable:
    d_A: int
    d_B: int
    weights: np.ndarray       # w_0..w_12 for the total
    part_weights: np.ndarray  # (6, 13): weights of each late-time part

    @property
    def d(self) -> int:
        return self.d_A * self.d_B

    def to_json(self) -> str:
        return json.dumps({"d_A": self.d_A, "d_B": self.d_B, "d": self.d,
                           "weights": [float(w) for w in self.weights]})


@lru_cache(maxsize=None)
def derive_weights(d_A: int, d_B: int) -> WeightTable:
    d = d_A * d_B
    if d < 4:
        raise ValueError("need d = d_A d_B >= 4 for degree-4 Weingarten functions")
    keys, C = _stat_basis()
    wg = weingarten(4, d)
    perms = permutation_table(4).perms
    colf = {t: d_A ** _col_loops(t)[0] * d_B ** _col_loops(t)[1] for t in perms}
    part_w = np.zeros((len(PARTS), N_STATS))
    for i, (_, pref, _, _) in enumerate(PARTS):
        coeff = np.zeros(len(keys))
        for sigma, expansion in _row_reductions(i).items():
            if expansion is None:
                continue
            amp = sum(colf[t] * wg(compose(sigma, inverse(t))) for t in perms)
            for k, v in expansion.items():
                coeff[keys.index(k)] += pref * amp * v
        w, *_ = np.linalg.lstsq(C.T, coeff, rcond=None)
        if np.linalg.norm(C.T @ w - coeff) > 1e-9 * max(1.0, np.linalg.norm(coeff)):
            raise RuntimeError("Haar average of a part is not spanned by the 13 statistics")
        part_w[i] = w
    return WeightTable(d_A, d_B, part_w.sum(axis=0), part_w)


def operator_statistics(Ob: np.ndarray) -> np.ndarray:
    """T_0..T_12 of a Hermitian operator block."""
    x, W = operator_stats_input(np.asarray(Ob))
    tr = x.sum()
    s2 = np.sum(x**2)
    sW = W.sum()
    r = W.sum(axis=1)
    return np.array([
        np.sum(x**4),
        np.sum(x**3) * tr,
        s2**2,
        s2 * tr**2,
        tr**4,
        x @ W @ x,
        (x**2) @ r,
        s2 * sW,
        sW * tr**2,
        (x @ r) * tr,
        np.sum(W**2),
        sW**2,
        np.sum(r**2) - np.sum(W**2),
    ])


def haar_purity_exact(Oe: np.ndarray, geom, window=None, window_norm: str = "renormalize",
                      parts: bool = False):
    """Haar-averaged late-time purity (1/n^2) sum_n w_n T_n.

    With ``parts`` the six per-part averages are returned instead of the total.
    """
    Ob, norm = window_operator(Oe, window, window_norm)
    T = operator_statistics(Ob)
    wt = derive_weights(geom.d_A, geom.d_B)
    if parts:
        return wt.part_weights @ T / norm**2
    return float(wt.weights @ T / norm**2)


def asymptotic_s2(regime: str, var_diag: float, var_off: float, d: int, d_A: int) -> float:
    """Leading-order late-time LOE for a small subsystem or the half cut."""
    if regime == "small_A":
        arg = 1 + (d - 1) * var_off * (var_diag - 1)
        lead = 2 * np.log(d_A)
    elif regime == "half_cut":
        arg = 1 + var_diag * (1 + (d - 1) * var_off)
        lead = np.log(d)
    else:
        raise ValueError(f"unknown regime {regime!r}")
    if arg <= 0:
        raise DomainError(f"log argument {arg} <= 0")
    return float(lead - np.log(arg))


def monte_carlo_haar_purity_many(ops, geom, n_samples: int, seed=0, window=None,
                                 window_norm: str = "renormalize", batch: int | None = None,
                                 parts: bool = False):
    """Sample means and standard errors of the late-time purity with Haar frames.

    All operators share the same frames, drawn batch by batch from independent
    child streams of ``seed``. Returns arrays of shape (n_ops,) or, with
    ``parts``, (n_ops, 6).
    """
    if n_samples < 2:
        raise ValueError("need at least two samples")
    blocks = [window_operator(np.asarray(O), window, window_norm) for O in ops]
    Ob = np.stack([b[0] for b in blocks])
    norms = np.array([b[1] for b in blocks], dtype=float)
    n = Ob.shape[-1]
    d = geom.d
    if batch is None:
        # keep the largest intermediate around 2e7 numbers
        s = min(geom.d_A, geom.d_B)
        per = len(ops) * (n**3 + n * n + s**4 + d * d) + n * n * (s * s + n)
        batch = int(np.clip(2e7 // per, 8, 2000))
    children = np.random.SeedSequence(seed).spawn((n_samples + batch - 1) // batch)
    acc = []
    done = 0
    for child in children:
        m = min(batch, n_samples - done)
        rng = np.random.default_rng(child)
        frames = sample_haar_isometry(rng, d, n, size=m)
        vals = FrameTables(frames_as_matrices(frames, geom.d_A, geom.d_B)).terms(Ob, norms)
        acc.append(vals if parts else vals.sum(axis=-1))
        done += m
    data = np.concatenate(acc, axis=0)
    mean = data.mean(axis=0)
    err = data.std(axis=0, ddof=1) / np.sqrt(n_samples)
    return mean, err


def monte_carlo_haar_purity(Oe, geom, n_samples: int, seed=0, window=None, **kw):
    mean, err = monte_carlo_haar_purity_many([Oe], geom, n_samples, seed, window, **kw)
    return float(mean[0]), float(err[0])


def haar_state_entanglement(d_A: int, d: int, alpha: float = 2.0, n_samples: int = 1000, seed=0) -> float:
    """Mean Renyi-alpha entropy of the d_A factor of Haar random states in dimension d."""
    if d % d_A:
        raise ValueError("d_A must divide d")
    d_B = d // d_A
    rng = np.random.default_rng(seed)
    out = np.empty(n_samples)
    chunk = max(1, min(n_samples, 2**22 // d))
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        psi = rng.standard_normal((m, d)) + 1j * rng.standard_normal((m, d))
        psi /= np.linalg.norm(psi, axis=1, keepdims=True)
        lam = np.linalg.svd(psi.reshape(m, d_A, d_B), compute_uv=False) ** 2
        if alpha == 1:
            with np.errstate(divide="ignore", invalid="ignore"):
                s = -np.sum(np.where(lam > 0, lam * np.log(lam), 0.0), axis=1)
        else:
            s = np.log(np.sum(lam**alpha, axis=1)) / (1 - alpha)
        out[done:done + m] = s
        done += m
    return float(out.mean())


def haar_state_partial_swaps(d_A: int, d: int, n_samples: int, seed=0):
    """Monte Carlo means and stderrs of the (DIA, SEMI, PERM) matrix elements for Haar frames."""
    d_B = d // d_A
    rng = np.random.default_rng(seed)
    data = np.empty((n_samples, 3))
    chunk = max(1, min(n_samples, 2**21 // d))
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        U = sample_haar_isometry(rng, d, 2, size=m)
        E = np.swapaxes(U, -1, -2).reshape(m, 2, d_A, d_B)
        E0, E1 = E[:, 0], E[:, 1]
        # Tr(rho_A^0 rho_A^1) = ||E0^dag E1||^2 and Tr(rho_B^0 rho_B^1) = ||E0 E1^dag||^2
        small = E0 @ np.conj(np.swapaxes(E0, -1, -2)) if d_A <= d_B else np.conj(np.swapaxes(E0, -1, -2)) @ E0
        data[done:done + m, 0] = np.sum(np.abs(small) ** 2, axis=(-2, -1))
        data[done:done + m, 1] = np.sum(np.abs(np.conj(np.swapaxes(E0, -1, -2)) @ E1) ** 2, axis=(-2, -1)) \
            if d_B <= d_A else _overlap_trace(E0, E1)
        data[done:done + m, 2] = np.sum(np.abs(E0 @ np.conj(np.swapaxes(E1, -1, -2))) ** 2, axis=(-2, -1)) \
            if d_A <= d_B else _overlap_trace(np.swapaxes(E0, -1, -2), np.swapaxes(E1, -1, -2))
        done += m
    return data.mean(axis=0), data.std(axis=0, ddof=1) / np.sqrt(n_samples)


def _overlap_trace(E0, E1):
    """Tr(rho^0 rho^1) on the leading factor, with rho^m = E^m E^m^dag."""
    r0 = E0 @ np.conj(np.swapaxes(E0, -1, -2))
    r1 = E1 @ np.conj(np.swapaxes(E1, -1, -2))
    return np.real(np.einsum("sjk,skj->s", r0, r1))
