"""Energy windows around the spectral median and the F and G parts of the purity.

Inside a narrow window the eigenvectors behave like Haar vectors, so the ED
value of the all-diagonal part F tracks the Haar prediction closely at small
cuts. -ln G rises with n_A and then dips towards the half cut.

Run:  python3 demos/window_sweep.py   (about half a minute at L = 10)
"""
# %%
import numpy as np

from loelab.haar import haar_purity_exact
from loelab.latetime import latetime_purity_ed
from loelab.spectral import eigendecompose, select_window, to_energy_basis
from loelab.spin_chain import BENCHMARK_PARAMS, HilbertGeometry, build_mfim, build_site_pauli, center_site

L = 10
spec = eigendecompose(build_mfim(L, BENCHMARK_PARAMS))
Oe = to_energy_basis(build_site_pauli(L, center_site(L), "x"), spec)

# %%
for d_w in (10, 20, 40):
    w = select_window(spec, d_w)
    print(f"d_w={d_w}")
    print(f"  {'n_A':>4} {'F err':>9} {'-ln G ED':>9} {'-ln G Haar':>10}")
    for n_A in range(1, L // 2 + 1):
        geom = HilbertGeometry(L, n_A)
        ed = latetime_purity_ed(spec, Oe, geom, w)
        hp = haar_purity_exact(Oe, geom, w, parts=True)
        print(f"  {n_A:>4} {abs(ed.F - hp[0]) / ed.F:9.2e} {-np.log(ed.G):9.4f} {-np.log(hp[4]):10.4f}")
