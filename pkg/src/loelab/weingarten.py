"""Permutation tables, Weingarten functions and Haar moments of degree <= 4.

For a d x d Haar unitary U,

    E[prod_k U_{i_k j_k} conj(U_{i'_k j'_k})]
        = sum_{sigma, tau in S_n} prod_k delta(i_k, i'_sigma(k)) delta(j_k, j'_tau(k)) Wg(sigma tau^-1, d)

with Wg the inverse of the Gram matrix G[s, t] = d^cycles(s t^-1).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations

import numpy as np


# ---------------------------------------------------------------------------
# permutations as tuples: p[i] is the image of i


def compose(p, q):
    """(p o q)(i) = p[q[i]]."""
    return tuple(p[i] for i in q)


def inverse(p):
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


def cycles(p) -> int:
    seen = [False] * len(p)
    count = 0
    for i in range(len(p)):
        if not seen[i]:
            count += 1
            while not seen[i]:
                seen[i] = True
                i = p[i]
    return count


def cycle_type(p) -> tuple:
    seen = [False] * len(p)
    lengths = []
    for i in range(len(p)):
        if not seen[i]:
            n = 0
            while not seen[i]:
                seen[i] = True
                i = p[i]
                n += 1
            lengths.append(n)
    return tuple(sorted(lengths, reverse=True))


@dataclass(frozen=True)
class PermutationTable:
    n: int
    perms: tuple = field(init=False)
    index: dict = field(init=False, repr=False)
    cycle_counts: np.ndarray = field(init=False, repr=False)
    product: np.ndarray = field(init=False, repr=False)  # product[i, k] = index of perms[i] o perms[k]

    def __post_init__(self):
        if not 1 <= self.n <= 4:
            raise ValueError("permutation tables are provided for n = 1..4")
        perms = tuple(permutations(range(self.n)))
        index = {p: i for i, p in enumerate(perms)}
        prod = np.array([[index[compose(p, q)] for q in perms] for p in perms])
        object.__setattr__(self, "perms", perms)
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "cycle_counts", np.array([cycles(p) for p in perms]))
        object.__setattr__(self, "product", prod)

    @property
    def identity(self):
        return tuple(range(self.n))


@lru_cache(maxsize=None)
def permutation_table(n: int) -> PermutationTable:
    return PermutationTable(n)


@dataclass(frozen=True)
class WeingartenTable:
    n: int
    d: int
    gram: np.ndarray
    matrix: np.ndarray  # inverse Gram, matrix[s, t] = Wg(s t^-1)
    values: dict        # permutation -> Wg

    def __call__(self, p) -> float:
        return self.values[tuple(p)]


@lru_cache(maxsize=None)
def weingarten(n: int, d: int) -> WeingartenTable:
    if d < n:
        raise np.linalg.LinAlgError(f"Gram matrix is singular for d={d} < n={n}")
    tab = permutation_table(n)
    inv_idx = [tab.index[inverse(p)] for p in tab.perms]
    G = np.empty((len(tab.perms),) * 2)
    for i, p in enumerate(tab.perms):
        for k in range(len(tab.perms)):
            G[i, k] = float(d) ** tab.cycle_counts[tab.product[i, inv_idx[k]]]
    Wg = np.linalg.inv(G)
    e = tab.index[tab.identity]
    values = {p: Wg[i, e] for i, p in enumerate(tab.perms)}
    return WeingartenTable(n, d, G, Wg, values)


# ---------------------------------------------------------------------------
# union-find over index labels


class _Classes:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[ry] = rx

    def groups(self):
        out = {}
        for x in list(self.parent):
            out.setdefault(self.find(x), []).append(x)
        return list(out.values())


@dataclass
class DeltaNetwork:
    """Product of U entries and conjugate entries with symbolic index sums.

    Each slot is a tuple of index components. A component is either an integer
    (a fixed index value) or a string naming a summed index whose range is
    given in ``dims``. Composite column slots such as (j, alpha) describe a
    product index of dimension d_A * d_B.
    """

    rows: list
    cols: list
    conj_rows: list
    conj_cols: list
    dims: dict = field(default_factory=dict)

    @property
    def degree(self) -> int:
        return len(self.rows)

    @property
    def balanced(self) -> bool:
        return len(self.rows) == len(self.conj_rows) == len(self.cols) == len(self.conj_cols)


def _match_factor(slots, conj_slots, perm, dims) -> float:
    """Sum over labels of prod_k delta(slot_k, conj_slot_perm(k))."""
    cls = _Classes()
    for s in list(slots) + list(conj_slots):
        for c in s:
            cls.find(("c", c) if isinstance(c, (int, np.integer)) else ("l", c))
    for k, s in enumerate(slots):
        t = conj_slots[perm[k]]
        if len(s) != len(t):
            raise ValueError("slot shapes differ")
        for a, b in zip(s, t):
            ka = ("c", a) if isinstance(a, (int, np.integer)) else ("l", a)
            kb = ("c", b) if isinstance(b, (int, np.integer)) else ("l", b)
            cls.union(ka, kb)
    value = 1.0
    for g in cls.groups():
        consts = {v for kind, v in g if kind == "c"}
        if len(consts) > 1:
            return 0.0
        if not consts:
            ds = {dims[v] for _, v in g}
            if len(ds) != 1:
                raise ValueError(f"labels {g} identified across different ranges")
            value *= ds.pop()
    return value


def haar_moment(net: DeltaNetwork, d: int) -> float:
    """Exact Haar average of the network for a d x d unitary."""
    if not net.balanced:
        warnings.warn("unbalanced moment: the Haar average vanishes", stacklevel=2)
        return 0.0
    n = net.degree
    if n == 0:
        return 1.0
    if d < n:
        raise ValueError(f"need d >= degree, got d={d}, degree={n}")
    tab = permutation_table(n)
    wg = weingarten(n, d)
    rowf = [_match_factor(net.rows, net.conj_rows, p, net.dims) for p in tab.perms]
    colf = [_match_factor(net.cols, net.conj_cols, p, net.dims) for p in tab.perms]
    total = 0.0
    for i, s in enumerate(tab.perms):
        if rowf[i] == 0:
            continue
        for k, t in enumerate(tab.perms):
            if colf[k] == 0:
                continue
            total += rowf[i] * colf[k] * wg(compose(s, inverse(t)))
    return total


def sample_haar_isometry(rng: np.random.Generator, d: int, n: int | None = None, size: int | None = None):
    """Haar-distributed d x n isometry (n = d gives a unitary) via QR with phase fixing."""
    n = d if n is None else n
    shape = (d, n) if size is None else (size, d, n)
    Z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    ph = np.diagonal(R, axis1=-2, axis2=-1)
    ph = ph / np.abs(ph)
    return Q * ph[..., None, :]
