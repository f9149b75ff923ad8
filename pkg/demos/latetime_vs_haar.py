"""Late-time operator entanglement of a local spin in the mixed-field Ising chain.

Walks through the full pipeline at L = 8: diagonalise the chain, rotate the
centre sigma_x into the energy basis, evaluate the late-time purity exactly,
and compare with the Haar (random-eigenbasis) prediction at every cut.

Run:  python3 demos/latetime_vs_haar.py
"""
# %%
import numpy as np

from loelab.eth import compute_stats
from loelab.haar import haar_purity_exact
from loelab.latetime import latetime_purity_ed
from loelab.spectral import eigendecompose, to_energy_basis
from loelab.spin_chain import BENCHMARK_PARAMS, HilbertGeometry, build_mfim, build_site_pauli, center_site

L = 8
spec = eigendecompose(build_mfim(L, BENCHMARK_PARAMS))
Oe = to_energy_basis(build_site_pauli(L, center_site(L), "x"), spec)

# %% matrix-element statistics: small off-diagonal variance, order-one diagonal one
st = compute_stats(Oe)
print(f"L={L}  d={spec.d}  sigma2_diag={st.diag_var:.4f}  sigma2_offdiag={st.offdiag_var:.3e}")

# %% late-time S2 from ED against the Haar average
print(f"{'n_A':>4} {'S2 ED':>9} {'S2 Haar':>9} {'rel':>8}")
for n_A in range(1, L // 2 + 1):
    geom = HilbertGeometry(L, n_A)
    ed = latetime_purity_ed(spec, Oe, geom)
    s_ed = -np.log(ed.total)
    s_h = -np.log(haar_purity_exact(Oe, geom))
    print(f"{n_A:>4} {s_ed:9.4f} {s_h:9.4f} {abs(s_ed - s_h) / s_ed:8.2e}")

# %% the six late-time parts at the half cut
geom = HilbertGeometry(L, L // 2)
for name, v in latetime_purity_ed(spec, Oe, geom).as_dict().items():
    print(f"  {name:>12}: {v: .4e}")
