"""Self-check suites run by ``loe-lab check``.

Each check returns (name, passed, detail). Suites are small enough to finish
in well under a minute.
"""
from __future__ import annotations

import numpy as np

from .haar import haar_purity_exact, monte_carlo_haar_purity_many
from .latetime import latetime_purity_ed, mutual_info_identity, omega_purity
from .liouville import build_omega_basis, normalize
from .oracles import literal_terms
from .spectral import check_nonresonance, eigendecompose, to_energy_basis
from .spin_chain import BENCHMARK_PARAMS, HilbertGeometry, build_mfim, build_site_pauli, center_site
from .weingarten import DeltaNetwork, haar_moment, weingarten


def random_hermitian(rng, d, scale=1.0):
    A = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return scale * (A + A.conj().T) / 2


def random_problem(rng, L, traceless=True):
    """Random H, its spectrum and a random unit-norm operator in the energy basis."""
    d = 2**L
    spec = eigendecompose(random_hermitian(rng, d))
    O = random_hermitian(rng, d)
    if traceless:
        O -= np.trace(O) / d * np.eye(d)
    return spec, to_energy_basis(normalize(O), spec)


def identities(seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for L, n_A in [(3, 1), (3, 2), (4, 1), (4, 2)]:
        spec, Oe = random_problem(rng, L)
        geom = HilbertGeometry(L, n_A)
        fast = latetime_purity_ed(spec, Oe, geom).terms
        slow = literal_terms(spec, Oe, geom)
        rel = float(np.max(np.abs(fast - slow)) / abs(slow.sum()))
        out.append((f"factorised vs literal L={L} n_A={n_A}", rel <= 1e-10, f"rel {rel:.2e}"))
        basis = build_omega_basis(Oe, spec.eigenvalues)
        diff = abs(omega_purity(basis, spec, geom).sum() - fast.sum())
        out.append((f"frequency-group form L={L} n_A={n_A}", diff <= 1e-10, f"abs {diff:.2e}"))
        res = abs(mutual_info_identity(spec, Oe, geom, basis))
        out.append((f"mutual-information identity L={L} n_A={n_A}", res <= 1e-10, f"abs {res:.2e}"))
    return out


def nonresonance(L=6, tol=1e-8):
    spec = eigendecompose(build_mfim(L, BENCHMARK_PARAMS))
    out = []
    for k in (1, 2):
        bad = check_nonresonance(spec.eigenvalues, k, tol)
        out.append((f"MFIM L={L} k={k} tol={tol:g}", not bad, f"{len(bad)} collisions"))
    Oe = to_energy_basis(build_site_pauli(L, center_site(L), "x"), spec)
    basis = build_omega_basis(Oe, spec.eigenvalues)
    zero = [g for g in basis.groups if g.omega == 0.0]
    ok = len(zero) == 1 and len(zero[0].pairs) == spec.d and np.all(zero[0].pairs[:, 0] == zero[0].pairs[:, 1])
    out.append((f"MFIM L={L} zero-frequency group holds exactly the diagonal", bool(ok), f"K={basis.K}"))
    return out


def oracle(seed=0, n_samples=4000):
    out = []
    # Weingarten closed forms
    for d in (4, 8):
        wg = weingarten(2, d)
        e1 = abs(wg((0, 1)) - 1 / (d * d - 1)) + abs(wg((1, 0)) + 1 / (d * (d * d - 1)))
        out.append((f"Wg n=2 d={d}", e1 <= 1e-12, f"abs {e1:.1e}"))
    net = DeltaNetwork(rows=[(0,), (0,)], cols=[(0,), (0,)], conj_rows=[(0,), (0,)], conj_cols=[(0,), (0,)])
    d = 6
    e = abs(haar_moment(net, d) - 2 / (d * (d + 1)))
    out.append(("E|U11|^4", e <= 1e-12, f"abs {e:.1e}"))
    # exact Haar purity against sampling
    rng = np.random.default_rng(seed)
    for L, n_A in [(2, 1), (3, 1)]:
        geom = HilbertGeometry(L, n_A)
        ops = [random_problem(rng, L, traceless=bool(i % 2))[1] for i in range(4)]
        exact = np.array([haar_purity_exact(O, geom) for O in ops])
        mean, err = monte_carlo_haar_purity_many(ops, geom, n_samples, seed=seed)
        z = float(np.max(np.abs(mean - exact) / err))
        out.append((f"Haar exact vs Monte Carlo d_A={geom.d_A} d_B={geom.d_B}", z <= 4.0, f"max |z| {z:.2f}"))
    return out


SUITES = {"identities": identities, "nonresonance": nonresonance, "oracle": oracle}
