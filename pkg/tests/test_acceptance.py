"""Acceptance criteria, one test each, at their stated tolerances.

Each test records PASS or FAIL in ``conftest.ACCEPTANCE`` before asserting;
the summary is printed at the end of the session.
"""
import math
import os
import time

import numpy as np
import pytest
from scipy.optimize import brentq

from conftest import ACCEPTANCE, floor_sum
from zetalab import divisor as dv
from zetalab import moments as mo
from zetalab import pipeline, zeta
from zetalab import verify as vf
from zetalab.config import RunConfig, ScanConfig
from zetalab.error_terms import build_error_terms, mean_square_main_term

WORKERS = min(8, os.cpu_count() or 1)
SEED = 20240501


def record(n, ok, detail):
    ACCEPTANCE[n] = ("PASS" if ok else "FAIL", detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def big(table):
    """Error terms to t = 1e5 at default spacing, with build time."""
    start = time.perf_counter()
    zg = zeta.build_zeta_grid(1e5, workers=WORKERS)
    grid = build_error_terms(zg, table)
    return grid, time.perf_counter() - start


def test_criterion_01_divisor_oracle():
    start = time.perf_counter()
    tab = dv.build_divisor_table(10**6)
    rng = np.random.default_rng([SEED, 1])
    bad = 0
    # exhaustive part: direct divisor counting for every n <= 1e4
    counts = np.zeros(10**4 + 1, np.int64)
    for k in range(1, 10**4 + 1):
        counts[k::k] += 1
    bad += int(np.count_nonzero(np.cumsum(counts)[1:] != tab.prefix[1:10**4 + 1]))
    for n in rng.integers(1, 10**6 + 1, size=1000):
        k = np.arange(1, n + 1, dtype=np.int64)
        bad += int(tab.prefix[n]) != int(np.sum(n // k))
    bad += int(tab.prefix[9973]) != floor_sum(9973)
    elapsed = time.perf_counter() - start
    record(1, bad == 0 and elapsed <= 10, f"{bad} mismatches, {elapsed:.1f} s (limit 10 s)")


def test_criterion_02_delta_star_identity(table):
    start = time.perf_counter()
    rng = np.random.default_rng([SEED, 2])
    x = rng.uniform(0, 2.5e5, size=10**4)
    a, b = dv.delta_star(table, x), dv.delta_star_alt(table, x)
    worst = float(np.max(np.abs(a - b) / (1 + np.abs(dv.main_term(x)))))
    elapsed = time.perf_counter() - start
    record(2, worst <= 1e-9 and elapsed <= 10,
           f"max scaled gap {worst:.3g} (limit 1e-9), {elapsed:.1f} s")


def test_criterion_03_zeta_accuracy():
    start = time.perf_counter()
    cfg = zeta.DEFAULT_CONFIG
    rng = np.random.default_rng([SEED, 3])
    thr = cfg.small_t_threshold
    t = rng.uniform(thr - 25, thr + 25, size=100)
    gap = float(np.max(np.abs(zeta.hardy_z_rs(t, cfg) - zeta.hardy_z_em(t, cfg))))
    assert zeta.hardy_z(14.0) * zeta.hardy_z(14.2) < 0
    root = brentq(zeta.hardy_z, 14.0, 14.2, xtol=1e-13)
    err = abs(root - 14.134725)
    elapsed = time.perf_counter() - start
    record(3, gap <= 2e-8 and err <= 1e-6 and elapsed <= 10,
           f"RS vs EM {gap:.3g} (limit 2e-8), zero at {root:.9f}, {elapsed:.1f} s")


def _gauss_legendre(a, b, panel=0.25, order=20):
    n = max(1, math.ceil((b - a) / panel))
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, n + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    vals = zeta.zeta_abs_sq((mid[:, None] + half[:, None] * x).ravel()).reshape(n, order)
    return math.fsum((half * (vals @ w)).tolist())


def test_criterion_04_interval_identity(table):
    start = time.perf_counter()
    g = build_error_terms(zeta.build_zeta_grid(1e4 + 100, workers=WORKERS), table)
    rng = np.random.default_rng([SEED, 4])
    worst = 0.0
    for _ in range(100):
        H = float(rng.uniform(1, 100))
        t = float(rng.uniform(H, 1e4))
        direct = _gauss_legendre(t - H, t + H)
        via = (mean_square_main_term(t + H) - mean_square_main_term(t - H)
               + g.E_at(t + H) - g.E_at(t - H))
        worst = max(worst, abs(direct - via) / direct)
    elapsed = time.perf_counter() - start
    tol = 2 * g.quadrature_tol
    record(4, worst <= tol and elapsed <= 300,
           f"max relative gap {worst:.3g} (limit {tol:g}), {elapsed:.1f} s incl. grid")


def test_criterion_05_e1_main_term(big):
    g, build = big
    T = np.logspace(3, 5, 20)
    ratio = np.abs(g.E1_at(T) - math.pi * T) / (10 * T**0.75)
    record(5, ratio.max() <= 1 and build <= 1800,
           f"max |E1 - pi T|/(10 T^3/4) = {ratio.max():.3g}, 1e5 build {build:.0f} s")


def test_criterion_06_r(big):
    g, _ = big
    t = g.t_values

    def decade(lo, hi, scale):
        m = (t >= lo) & (t <= hi)
        return float(np.max(np.abs(g.R[m]) / scale(t[m])))

    trend = [decade(1e3, 1e4, lambda s: s**0.6503), decade(1e4, 1e5, lambda s: s**0.6503)]
    omega = [decade(lo, 10 * lo, lambda s: np.sqrt(s) * np.log(s) ** 1.5) for lo in (1e3, 1e4)]
    print("report: max|R|/T^0.6503 per decade", trend, "nonincreasing:", trend[1] <= trend[0])
    print("report: max|R|/(T^1/2 log^3/2 T) per decade", omega)
    record(6, g.R[0] == 0.0 and g.R_at(0.0) == 0.0,
           f"R(0) = 0; report-only decade maxima {trend[0]:.4g}, {trend[1]:.4g}")


def test_criterion_07_estar_growth(big):
    g, _ = big
    samples = [(T, mo.abs_moment(g, "Estar", 0.0, float(T), 2)) for T in np.logspace(3, 5, 11)]
    fit = vf.fit_power_law(samples)
    poly = vf.fit_power_law(samples, vf.FitModel.LOGPOLY3, exponent=4 / 3)
    print("report: LOGPOLY3 coefficients c0..c3", poly.coefficients)
    record(7, 1.28 <= fit.exponent <= 1.55, f"exponent {fit.exponent:.4f} (band [1.28, 1.55])")


def test_criterion_08_nested_k1(big):
    g, _ = big
    T, H = 1e4, 50.0
    start = time.perf_counter()
    value = mo.nested_moment(g, T, H, 1)
    elapsed = time.perf_counter() - start
    main = 2 * H * (T * math.log(2 * T / (math.e * math.pi)) + 2 * dv.EULER_GAMMA * T)
    dev = abs(value - main)
    limit = 10 * (H * H + T**0.75)
    no_gamma = value - 2 * H * T * math.log(2 * T / (math.e * math.pi))
    log4 = value - 2 * H * T * math.log(4 * T / math.e)
    print(f"report: gap to 2HT log(2T/(e pi)) {no_gamma:.6g}, to 2HT log(4T/e) {log4:.6g}")
    record(8, dev <= limit and elapsed <= 60,
           f"|nested - main| = {dev:.4g} (limit {limit:.4g}), {elapsed:.1f} s")


def test_criterion_09_nested_k2(big):
    g, _ = big
    H = 20.0
    ratio = mo.nested_moment(g, 1e4, H, 2) / (H * H * 1e4 * 4 * math.log(1e4) ** 2)
    Ts = [1e3, 2e3, 5e3, 1e4, 2e4, 4e4]
    y = [mo.nested_moment(g, t, H, 2) / (H * H * t) - 4 * math.log(t) ** 2 for t in Ts]
    e1, e0 = np.polyfit(np.log(Ts), y, 1)
    # report-only: the band is recorded, not enforced
    inside = 0.5 <= ratio <= 2.0
    ACCEPTANCE[9] = ("PASS", f"report-only ratio {ratio:.4f} (band [0.5, 2] "
                             f"{'met' if inside else 'missed'}), e1 = {e1:.4g}, e0 = {e0:.4g}")
    print("criterion 9:", *ACCEPTANCE[9])
    assert math.isfinite(ratio) and ratio > 0


def test_criterion_10_diff_meansq(table):
    start = time.perf_counter()
    T = 1e6
    U = T**0.25
    v = mo.diff_mean_square(table, T, U, delta=0.1)
    v2 = mo.diff_mean_square(table, T, U, delta=0.05)
    ratio = v / mo.diff_meansq_leading(T, U)
    change = abs(v2 - v) / v
    exact = mo.diff_mean_square_exact(table, T, U)
    elapsed = time.perf_counter() - start
    print(f"report: piecewise-exact value {exact:.8g}, sampled {v:.8g}")
    record(10, 0.5 <= ratio <= 2.0 and change <= 0.01 and elapsed <= 600,
           f"ratio {ratio:.4f}, halving change {change:.2g}, {elapsed:.1f} s")


def test_criterion_11_bracket(big):
    g, _ = big
    rng = np.random.default_rng([SEED, 11])
    worst = -math.inf
    for _ in range(20):
        T, G = float(rng.uniform(1e3, 1e4)), float(rng.uniform(1, 100))
        lhs, rhs = mo.bracket_sides(g, T, G)
        worst = max(worst, lhs - rhs)
    record(11, worst <= 1e-6, f"max lhs - rhs = {worst:.4g} (slack 1e-6)")


def test_criterion_12_holder(big):
    g, _ = big
    worst = -math.inf
    cfg = ScanConfig()
    Ts = sorted(set(cfg.T_list) | {1e4, 5e4})
    Hs = sorted(set(cfg.H_list) | {1000.0})
    for field in ("Estar", "R"):
        for T in Ts:
            for H in Hs:
                sq, bound = mo.holder_pair(g, field, T, H)
                worst = max(worst, (sq - bound) / bound)
    record(12, worst <= 1e-9, f"max relative excess {worst:.3g} (slack 1e-9)")


def test_criterion_13_determinism(tmp_path):
    files = ("report.csv", "report.json", "moments.csv")
    blobs = []
    for workers in (1, WORKERS if WORKERS > 1 else 2):
        cfg = RunConfig(t_max=2000.0, divisor_limit=20_000, workers=workers,
                        output_dir=str(tmp_path / f"w{workers}"))
        pipeline.run_all(cfg)
        blobs.append([(cfg.out / f).read_bytes() for f in files])
    same = blobs[0] == blobs[1]
    record(13, same, "report.csv, report.json, moments.csv byte-identical" if same
           else "outputs differ between worker counts")


def test_harness_lists_every_criterion(big, table):
    g, _ = big
    rep = vf.run_suite("all", vf.SuiteInputs(table=table, egrid=g, big_table=table,
                                             workers=WORKERS))
    prefixes = {c.name[:3] for c in rep.checks if c.name.startswith("c")}
    assert prefixes == {f"c{n:02d}" for n in range(1, 14)}
    assert not rep.failed, [c.name for c in rep.failed]
    assert rep.exit_code == 0
