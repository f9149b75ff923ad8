from functools import lru_cache

import numpy as np
import pytest

from loelab.spectral import eigendecompose, to_energy_basis
from loelab.spin_chain import BENCHMARK_PARAMS, build_mfim, build_site_pauli, center_site


@lru_cache(maxsize=None)
def mfim_problem(L):
    """Benchmark chain spectrum and the centre sigma_x in its energy basis (cached per session)."""
    spec = eigendecompose(build_mfim(L, BENCHMARK_PARAMS))
    Oe = to_energy_basis(build_site_pauli(L, center_site(L), "x"), spec)
    return spec, Oe


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
