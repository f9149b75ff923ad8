"""Late-time entanglement of a state and the Page law.

The three partial-swap averages (DIA, SEMI, PERM) combine into the Page
value. Each one alone gives a curve with the wrong shape.

Run:  python3 demos/page_check.py
"""
# %%
import numpy as np

from loelab.haar import haar_state_partial_swaps
from loelab.latetime import assembled_state_s2, page_s2, page_weights

d = 16
for d_A in (2, 4, 8):
    mean, err = haar_state_partial_swaps(d_A, d, 20000, seed=0)
    exact = np.array(page_weights(d_A, d))
    print(f"d_A={d_A}: z =", np.round((mean - exact) / err, 2))

# %% volume law at L = 10
d = 1024
print(f"{'n_A':>4} {'Page':>7} {'Full':>7} {'DIA':>7} {'SEMI':>7} {'PERM':>7}")
for n_A in range(1, 6):
    row = [assembled_state_s2(2**n_A, d, parts=p) for p in (("DIA",), ("SEMI",), ("PERM",))]
    print(f"{n_A:>4} {page_s2(n_A, d):7.3f} {assembled_state_s2(2**n_A, d):7.3f}", *(f"{v:7.3f}" for v in row))
