"""Experiment configuration, orchestration and CSV / manifest output.

A run takes one JSON config, writes ``<experiment>.csv`` plus ``manifest.json``
into the output directory and returns the list of written paths.
"""
from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import logging
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import lru_cache
from pathlib import Path

import numpy as np
import scipy

from .dynamics import loe_timeseries, renyi
from .errors import SizeGuardError
from .eth import compute_stats
from .haar import (derive_weights, haar_purity_exact, haar_state_entanglement,
                   haar_state_partial_swaps)
from .latetime import assembled_state_s2, latetime_purity_ed, page_s2, page_weights
from .spectral import (eigendecompose, select_window, select_window_by_width,
                       to_energy_basis)
from .spin_chain import BENCHMARK_PARAMS, HilbertGeometry, build_mfim, build_site_pauli, center_site

log = logging.getLogger(__name__)

EXPERIMENTS = ("full_space", "window_sweep", "fg_terms", "timeseries", "eth_scaling",
               "page_check", "weights_dump", "eigenstate_entanglement")
METRICS = ("s2_relative", "purity_relative")
DEFAULT_WINDOWS = (10, 20, 40, 60, 100)
FULL_SPACE_MAX_L = 8

# figure counterparts recorded in the manifest
FIGURES = {
    "full_space": ["fig2", "fig3"],
    "window_sweep": ["fig4", "fig5", "fig6", "fig7", "fig9", "fig10", "fig11"],
    "fg_terms": ["fig7", "fig8"],
    "timeseries": [],
    "eth_scaling": ["fig19", "fig20"],
    "page_check": ["fig13"],
    "weights_dump": ["fig15"],
    "eigenstate_entanglement": ["fig12"],
}

LOE_COLUMNS = ("L", "n_A", "d_w", "window_norm", "metric", "purity_ed", "purity_haar", "s2_ed", "s2_haar",
               "F_ed", "F_haar", "G_ed", "G_haar", "rel_error", "rel_error_F", "rel_error_G",
               "sigma2_diag", "sigma2_offdiag", "runtime_ms")
COLUMNS = {
    "full_space": LOE_COLUMNS,
    "window_sweep": LOE_COLUMNS,
    "fg_terms": LOE_COLUMNS,
    "timeseries": ("L", "n_A", "d_w", "t", "purity", "s2"),
    "eth_scaling": ("L", "d", "d_w", "diag_mean", "sigma2_diag", "offdiag_mean", "sigma2_offdiag",
                    "runtime_ms"),
    "page_check": ("d", "n_A", "d_A", "page_s2", "assembled_s2", "mc_s2", "mc_stderr", "rel_error",
                   "DIA", "SEMI", "PERM", "mc_DIA", "mc_SEMI", "mc_PERM"),
    "weights_dump": ("d_A", "d_B", "d") + tuple(f"w{i}" for i in range(13)),
    "eigenstate_entanglement": ("L", "n_A", "d_w", "alpha", "s_eigenstates", "s_haar", "page"),
}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str
    L: int = 6
    params: tuple = BENCHMARK_PARAMS  # (J, h_x, h_z, g_0, g_l)
    site: int | None = None           # None -> centre of the chain
    axis: str = "x"
    n_A: list = field(default_factory=lambda: [1, 2, 3])
    windows: list | None = None       # d_w values; None -> full space or the default sweep
    delta_E: list | None = None       # alternative: energy widths
    L_list: list | None = None        # chain lengths for fg_terms / eth_scaling
    metric: str = "s2_relative"
    window_norm: str = "renormalize"
    seeds: list = field(default_factory=lambda: [0])
    n_samples: int = 4000             # Monte Carlo samples (page_check, eigenstate_entanglement)
    t_max: float | None = None
    n_times: int = 200
    alphas: list = field(default_factory=lambda: [1, 2, 3, 4])
    out: str | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "experiment" not in data:
            raise ConfigError("config needs an 'experiment' key")
        cfg = cls(**data)
        cfg.params = tuple(float(p) for p in cfg.params)
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["params"] = list(self.params)
        return out

    def hash(self) -> str:
        d = self.to_dict()
        d.pop("out", None)
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def lengths(self) -> list:
        return list(self.L_list) if self.L_list else [self.L]

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        if self.metric not in METRICS:
            raise ConfigError(f"unknown metric {self.metric!r}")
        if self.window_norm not in ("renormalize", "raw"):
            raise ConfigError(f"unknown window_norm {self.window_norm!r}")
        if len(self.params) != 5:
            raise ConfigError("params must be (J, h_x, h_z, g_0, g_l)")
        if self.axis not in ("x", "y", "z"):
            raise ConfigError(f"axis must be x, y or z, got {self.axis!r}")
        if not self.n_A:
            raise ConfigError("at least one bipartition is required")
        if self.windows is not None and self.delta_E is not None:
            raise ConfigError("give either windows or delta_E, not both")
        for L in self.lengths():
            if L < 2:
                raise ConfigError(f"L must be >= 2, got {L}")
            if self.experiment not in ("eth_scaling", "weights_dump", "page_check"):
                for n in self.n_A:
                    if not 1 <= n < L:
                        raise ConfigError(f"n_A={n} outside 1..{L - 1} for L={L}")
            if self.windows:
                for w in self.windows:
                    if not 2 <= w <= 2**L:
                        raise ConfigError(f"window d_w={w} outside 2..{2**L} for L={L}")
        if self.site is not None and not all(0 <= self.site < L for L in self.lengths()):
            raise ConfigError(f"site {self.site} outside the chain")
        if self.n_samples < 2:
            raise ConfigError("n_samples must be >= 2")


# ---------------------------------------------------------------------------
# output


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))  # shortest round-trip decimal
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None:
        return ""
    return str(v)


def emit_series(rows, path, columns=None):
    """Write rows (dicts) as UTF-8 CSV with LF endings and a fixed header."""
    rows = list(rows)
    if columns is None:
        if not rows:
            raise ValueError("columns are required for an empty row set")
        columns = list(rows[0])
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r.get(c)) for c in columns])
    return path


def read_series(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


# ---------------------------------------------------------------------------
# shared model pieces


@lru_cache(maxsize=4)
def _model(L: int, params: tuple, site, axis: str):
    H = build_mfim(L, params)
    spec = eigendecompose(H)
    s = center_site(L) if site is None else site
    Oe = to_energy_basis(build_site_pauli(L, s, axis), spec)
    return spec, Oe


def _windows(cfg, spec):
    if cfg.delta_E is not None:
        return [select_window_by_width(spec, dE) for dE in cfg.delta_E]
    sizes = cfg.windows
    if sizes is None:
        sizes = [w for w in DEFAULT_WINDOWS if w <= spec.d]
    return [select_window(spec, w) for w in sizes]


def _rel(a, b):
    return abs(a - b) / abs(a) if a != 0 else float("inf")


def loe_row(cfg, L, n_A, spec, Oe, window):
    t0 = time.perf_counter()
    geom = HilbertGeometry(L, n_A)
    ed = latetime_purity_ed(spec, Oe, geom, window, window_norm=cfg.window_norm)
    hp = haar_purity_exact(Oe, geom, window, window_norm=cfg.window_norm, parts=True)
    st = compute_stats(Oe, window)
    p_ed, p_h = ed.total, float(hp.sum())
    s_ed, s_h = -np.log(p_ed), -np.log(p_h)
    err = _rel(s_ed, s_h) if cfg.metric == "s2_relative" else _rel(p_ed, p_h)
    return {
        "L": L, "n_A": n_A, "d_w": spec.d if window is None else window.d_w,
        "window_norm": cfg.window_norm, "metric": cfg.metric,
        "purity_ed": p_ed, "purity_haar": p_h, "s2_ed": s_ed, "s2_haar": s_h,
        "F_ed": ed.F, "F_haar": float(hp[0]), "G_ed": ed.G, "G_haar": float(hp[4]),
        "rel_error": err, "rel_error_F": _rel(ed.F, hp[0]), "rel_error_G": _rel(ed.G, hp[4]),
        "sigma2_diag": st.diag_var, "sigma2_offdiag": st.offdiag_var,
        "runtime_ms": 1e3 * (time.perf_counter() - t0),
    }


def _map(fn, cells, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(fn, cells))  # map keeps submission order
    return [fn(c) for c in cells]


# ---------------------------------------------------------------------------
# experiments


def _exp_full_space(cfg, threads):
    rows = []
    for L in cfg.lengths():
        spec, Oe = _model(L, cfg.params, cfg.site, cfg.axis)
        rows += _map(lambda n: loe_row(cfg, L, n, spec, Oe, None), cfg.n_A, threads)
    return rows


def _exp_windowed(cfg, threads):
    rows = []
    for L in cfg.lengths():
        spec, Oe = _model(L, cfg.params, cfg.site, cfg.axis)
        cells = [(w, n) for w in _windows(cfg, spec) for n in cfg.n_A if n < L]
        rows += _map(lambda c: loe_row(cfg, L, c[1], spec, Oe, c[0]), cells, threads)
    return rows


def _exp_timeseries(cfg, threads):
    L = cfg.L
    spec, Oe = _model(L, cfg.params, cfg.site, cfg.axis)
    windows = _windows(cfg, spec) if (cfg.windows or cfg.delta_E) else [None]
    t_max = cfg.t_max if cfg.t_max is not None else 10.0
    times = np.linspace(0.0, t_max, cfg.n_times)
    rows = []
    for w in windows:
        for n in cfg.n_A:
            data = loe_timeseries(spec, Oe, HilbertGeometry(L, n), times, w)
            dw = spec.d if w is None else w.d_w
            rows += [{"L": L, "n_A": n, "d_w": dw, "t": t, "purity": p, "s2": s} for t, p, s in data]
    return rows


def _exp_eth_scaling(cfg, threads):
    rows = []
    for L in cfg.lengths():
        t0 = time.perf_counter()
        spec, Oe = _model(L, cfg.params, cfg.site, cfg.axis)
        windows = _windows(cfg, spec) if (cfg.windows or cfg.delta_E) else [None]
        for w in windows:
            st = compute_stats(Oe, w)
            rows.append({"L": L, "d": spec.d, "d_w": spec.d if w is None else w.d_w,
                         "diag_mean": st.diag_mean, "sigma2_diag": st.diag_var,
                         "offdiag_mean": float(np.real(st.offdiag_mean)), "sigma2_offdiag": st.offdiag_var,
                         "runtime_ms": 1e3 * (time.perf_counter() - t0)})
    return rows


def _exp_page_check(cfg, threads):
    rows = []
    seed = cfg.seeds[0]
    for L in cfg.lengths():
        d = 2**L
        for n in [n for n in cfg.n_A if 2**n <= d]:
            dA = 2**n
            mc, err = haar_state_partial_swaps(dA, d, cfg.n_samples, seed)
            # uniform weights over the whole space: purity = DIA/d + (d-1)/d (SEMI + PERM)
            coef = np.array([1 / d, (d - 1) / d, (d - 1) / d])
            p_mc = float(coef @ mc)
            p_err = float(np.sqrt(np.sum((coef * err) ** 2)))
            ref = page_s2(n, d)
            s_mc = -np.log(p_mc)
            dia, semi, perm = page_weights(dA, d)
            rows.append({"d": d, "n_A": n, "d_A": dA, "page_s2": ref,
                         "assembled_s2": assembled_state_s2(dA, d), "mc_s2": s_mc,
                         "mc_stderr": p_err / p_mc, "rel_error": _rel(ref, s_mc),
                         "DIA": dia, "SEMI": semi, "PERM": perm,
                         "mc_DIA": mc[0], "mc_SEMI": mc[1], "mc_PERM": mc[2]})
    return rows


def _exp_weights_dump(cfg, threads):
    rows = []
    for L in cfg.lengths():
        for n in [n for n in cfg.n_A if n < L]:
            geom = HilbertGeometry(L, n)
            wt = derive_weights(geom.d_A, geom.d_B)
            row = {"d_A": geom.d_A, "d_B": geom.d_B, "d": geom.d}
            row.update({f"w{i}": float(v) for i, v in enumerate(wt.weights)})
            rows.append(row)
    return rows


def _exp_eigenstate_entanglement(cfg, threads):
    rows = []
    seed = cfg.seeds[0]
    for L in cfg.lengths():
        spec, _ = _model(L, cfg.params, cfg.site, cfg.axis)
        windows = _windows(cfg, spec) if (cfg.windows or cfg.delta_E) else [select_window(spec, min(40, spec.d))]
        for w in windows:
            V = spec.eigenvectors[:, w.sl]
            for n in cfg.n_A:
                dA, dB = 2**n, 2 ** (L - n)
                psi = V.T.reshape(-1, dA, dB)
                rhos = psi @ np.conj(np.swapaxes(psi, -1, -2))
                for a in cfg.alphas:
                    s_eig = float(np.mean([renyi(r, a) for r in rhos]))
                    s_h = haar_state_entanglement(dA, spec.d, a, cfg.n_samples, seed)
                    page = (np.log(min(dA, dB)) - min(dA, dB) / (2 * max(dA, dB))) if a == 1 else \
                        -np.log((dA + dB) / (spec.d + 1)) if a == 2 else None
                    rows.append({"L": L, "n_A": n, "d_w": w.d_w, "alpha": a, "s_eigenstates": s_eig,
                                 "s_haar": s_h, "page": page})
    return rows


_RUNNERS = {
    "full_space": _exp_full_space,
    "window_sweep": _exp_windowed,
    "fg_terms": _exp_windowed,
    "timeseries": _exp_timeseries,
    "eth_scaling": _exp_eth_scaling,
    "page_check": _exp_page_check,
    "weights_dump": _exp_weights_dump,
    "eigenstate_entanglement": _exp_eigenstate_entanglement,
}


# ---------------------------------------------------------------------------
# planning and running


def size_guard(cfg, override: bool = False):
    if cfg.experiment == "full_space" and not override:
        big = [L for L in cfg.lengths() if L > FULL_SPACE_MAX_L]
        if big:
            raise SizeGuardError(
                f"full-space run with L={big} exceeds L={FULL_SPACE_MAX_L}; pass --override-size-guard")


def plan(cfg) -> list:
    """Human-readable plan lines with rough cost estimates."""
    lines = [f"experiment {cfg.experiment}  config {cfg.hash()[:12]}"]
    for L in cfg.lengths():
        d = 2**L
        eig_s = 0.4 * (d / 1024) ** 3
        line = f"  L={L} d={d}"
        if cfg.experiment not in ("page_check", "weights_dump"):
            line += f": eigendecomposition ~{eig_s:.2g}s"
        if cfg.experiment in ("full_space", "window_sweep", "fg_terms"):
            ws = [d] if cfg.experiment == "full_space" else (cfg.windows or [w for w in DEFAULT_WINDOWS if w <= d])
            cells = [(w, n) for w in ws for n in cfg.n_A if n < L]
            cost = sum(w * w * d * min(2**n, 2 ** (L - n)) ** 2 for w, n in cells) * 2e-9
            line += f", {len(cells)} cells ~{cost:.2g}s"
        lines.append(line)
    return lines


def run(cfg: ExperimentConfig, out_dir=None, threads: int = 1, seed=None, override_size_guard: bool = False):
    """Run one experiment; returns the written paths (CSV first, manifest last)."""
    if seed is not None:
        cfg = dataclasses.replace(cfg, seeds=[int(seed)])
    size_guard(cfg, override_size_guard)
    out = Path(out_dir or cfg.out or "results")
    out.mkdir(parents=True, exist_ok=True)
    started = datetime.now(timezone.utc).isoformat()
    t0 = time.perf_counter()
    log.info("running %s", cfg.experiment)
    rows = _RUNNERS[cfg.experiment](cfg, threads)
    csv_path = emit_series(rows, out / f"{cfg.experiment}.csv", COLUMNS[cfg.experiment])
    from . import __version__
    manifest = {
        "experiment": cfg.experiment,
        "config": cfg.to_dict(),
        "config_hash": cfg.hash(),
        "versions": {"loelab": __version__, "python": platform.python_version(),
                     "numpy": np.__version__, "scipy": scipy.__version__},
        "figures": FIGURES[cfg.experiment],
        "files": [csv_path.name],
        "rows": len(rows),
        "started": started,
        "wall_time_s": time.perf_counter() - t0,
    }
    man_path = out / "manifest.json"
    man_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return [csv_path, man_path]
