"""The 13 Haar weights behind the late-time purity.

At small d_A only three statistics survive at leading order: the squared
diagonal norm, its product with the summed off-diagonal weight, and the
square of that sum.

Run:  python3 demos/weights.py
"""
# %%
import numpy as np

from loelab.haar import STAT_LABELS, derive_weights

for d_A, d_B in [(2, 2), (2, 512), (32, 32)]:
    wt = derive_weights(d_A, d_B)
    print(f"d_A={d_A} d_B={d_B}")
    for lab, w in zip(STAT_LABELS, wt.weights * d_A**2):
        if abs(w) > 1e-6:
            print(f"  {lab:>28}: {w: .6f}  (x 1/d_A^2)")
