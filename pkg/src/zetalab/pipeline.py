"""Pipeline commands: each reads its inputs from, and writes to, the output root.

Every output gets a JSON sidecar naming the sha256 digests of the files it
was computed from.  Rerunning a command whose output is already consistent
with its inputs is a no-op.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import divisor as dv
from . import moments as mo
from . import verify as vf
from . import zeta
from .error_terms import build_error_terms, load_error_grid, save_error_grid
from .errors import ProvenanceError
from .zlb import ZlbCheckpoint, dump_json, file_digest, read_sidecar, write_sidecar

log = logging.getLogger(__name__)

TABLE_FILE = "divisor_table.zlb"
GRID_FILE = "zeta_grid.zlb"
ERROR_FILE = "error_terms.zlb"
MOMENTS_FILE = "moments.csv"
REPORT_CSV = "report.csv"
REPORT_JSON = "report.json"
PLOT_FILE = "plot.csv"


def _paths(cfg):
    out = cfg.out
    out.mkdir(parents=True, exist_ok=True)
    return out


def _grid_key(cfg):
    return vf.config_digest({"t_max": cfg.t_max, "c_step": cfg.c_step,
                             "eval": cfg.eval.to_dict()})


def _need(path):
    if not Path(path).exists():
        raise FileNotFoundError(f"missing input {path}; run the producing command first")
    return path


def cmd_sieve(cfg):
    path = _paths(cfg) / TABLE_FILE
    if path.exists() and read_sidecar(path).get("limit") == cfg.divisor_limit:
        log.info("divisor table up to date: %s", path)
        return path
    table = dv.build_divisor_table(cfg.divisor_limit)
    dv.save_table(path, table, {"limit": cfg.divisor_limit, "algorithm": "pair sieve"})
    log.info("wrote divisor table to %d: %s", cfg.divisor_limit, path)
    return path


def cmd_grid(cfg):
    path = _paths(cfg) / GRID_FILE
    key = _grid_key(cfg)
    if path.exists() and read_sidecar(path).get("key") == key:
        log.info("zeta grid up to date: %s", path)
        return path
    ckpt = ZlbCheckpoint(path.with_name(path.name + ".ckpt"), key, cfg.checkpoint_every)
    grid = zeta.build_zeta_grid(cfg.t_max, cfg.eval, cfg.c_step, cfg.workers, checkpoint=ckpt)
    zeta.save_zeta_grid(path, grid, {"key": key})
    ckpt.clear()
    log.info("wrote zeta grid with %d points: %s", grid.t_values.size, path)
    return path


def _input_digests(out):
    return {"table": file_digest(_need(out / TABLE_FILE)),
            "zeta_grid": file_digest(_need(out / GRID_FILE))}


def cmd_error_terms(cfg):
    out = _paths(cfg)
    path = out / ERROR_FILE
    digests = _input_digests(out)
    meta = read_sidecar(path) if path.exists() else {}
    if meta.get("inputs") == digests:
        log.info("error terms up to date: %s", path)
        return path
    table = dv.load_table(out / TABLE_FILE)
    zgrid = zeta.load_zeta_grid(out / GRID_FILE)
    grid = build_error_terms(zgrid, table)
    save_error_grid(path, grid, {"inputs": digests})
    log.info("wrote error terms: %s", path)
    return path


def _checked_inputs(out):
    """Load the error-term grid and table, refusing stale provenance."""
    path = _need(out / ERROR_FILE)
    recorded = read_sidecar(path).get("inputs", {})
    current = _input_digests(out)
    for name, digest in current.items():
        if recorded.get(name) != digest:
            raise ProvenanceError(
                f"{ERROR_FILE} was built from a different {name} "
                f"({recorded.get(name)} != {digest}); rerun error-terms")
    current["error_terms"] = file_digest(path)
    return load_error_grid(path), dv.load_table(out / TABLE_FILE), current


def scan_rows(cfg, grid, table):
    """All (kind, T, H, k) rows the scan configuration asks for."""
    s = cfg.scan
    t_max = grid.t_max
    K = mo.MomentKind
    jobs = []
    for T in s.T_list:
        for H in s.H_list:
            for k in s.k_list:
                if T + H <= t_max:
                    jobs.append((K.ESTAR_ABS_MOMENT, T, H, k,
                                 lambda T=T, H=H, k=k: mo.abs_moment(grid, "Estar", T, H, k)))
                    jobs.append((K.R_ABS_MOMENT, T, H, k,
                                 lambda T=T, H=H, k=k: mo.abs_moment(grid, "R", T, H, k)))
                if 2 * T + H <= t_max and 1 <= k <= mo.NESTED_MAX_K and T > H:
                    jobs.append((K.ZETA_NESTED, T, H, k,
                                 lambda T=T, H=H, k=k: mo.nested_moment(grid, T, H, k)))
            if T + H <= t_max:
                jobs.append((K.ZETA_PLAIN, T, H, 1,
                             lambda T=T, H=H: mo.zeta_plain_moment(grid, T, H)))
        for G in s.G_list:
            cut = G * math.log(T)
            for k in s.k_list:
                if k in (1, 2) and T - cut >= 0 and T + cut <= t_max:
                    jobs.append((K.J_SMOOTHED, T, G, k,
                                 lambda T=T, G=G, k=k: mo.smoothed_moment_J(grid, k, T, G)))
        for U in s.U_list:
            if U > 0.5 * math.sqrt(T):
                continue
            if 2 * T + U <= table.limit:
                jobs.append((K.DIFF_MEANSQ_DELTA, T, U, 2,
                             lambda T=T, U=U: mo.diff_mean_square(table, T, U, "Delta")))
            if 2 * T + U <= t_max:
                jobs.append((K.DIFF_MEANSQ_E, T, U, 2,
                             lambda T=T, U=U: mo.diff_mean_square(None, T, U, "E", grid)))
    return jobs


def cmd_moments(cfg):
    out = _paths(cfg)
    grid, table, digests = _checked_inputs(out)
    jobs = scan_rows(cfg, grid, table)
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        values = list(pool.map(lambda job: job[4](), jobs))
    result = mo.MomentScanResult(config_digest=vf.config_digest(cfg.numeric_dict()))
    for (kind, T, H, k, _), v in zip(jobs, values):
        result.add(kind, T, H, k, v)
    path = out / MOMENTS_FILE
    result.to_csv(path)
    write_sidecar(path, {"inputs": digests, "config_digest": result.config_digest,
                         "rows": len(result.rows)})
    log.info("wrote %d moment rows: %s", len(result.rows), path)
    return path


def cmd_verify(cfg):
    out = _paths(cfg)
    try:
        grid, table, digests = _checked_inputs(out)
    except FileNotFoundError as exc:
        log.warning("%s", exc)
        grid, table, digests = None, None, {}
    inputs = vf.SuiteInputs(table=table, egrid=grid, big_table=table, cfg=cfg.eval,
                            workers=cfg.workers, digests=digests)
    report = vf.run_suite(cfg.suite, inputs, cfg.calibration)
    report.provenance["config_digest"] = vf.config_digest(cfg.numeric_dict())
    report.write(out / REPORT_CSV, out / REPORT_JSON)
    log.info("report: %d rows, %d failed", len(report.checks), len(report.failed))
    return report


def cmd_export_plot(cfg, stride=None):
    out = _paths(cfg)
    grid, _, digests = _checked_inputs(out)
    n = grid.t_values.size
    stride = stride or max(1, n // 200_000)
    idx = np.arange(0, n, stride)
    path = out / PLOT_FILE
    with open(path, "w") as fh:
        fh.write("t,E,Estar,R\n")
        for i in idx:
            fh.write(",".join(repr(float(a[i])) for a in (grid.t_values, grid.E, grid.Estar, grid.R)) + "\n")
    write_sidecar(path, {"inputs": digests, "stride": int(stride)})
    return path


def run_all(cfg):
    cmd_sieve(cfg)
    cmd_grid(cfg)
    cmd_error_terms(cfg)
    cmd_moments(cfg)
    return cmd_verify(cfg)


def describe(cfg):
    return dump_json(cfg.to_dict())
