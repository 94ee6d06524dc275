"""Hardy's Z-function on the critical line.

Two evaluators live here.  Below ``EvalConfig.small_t_threshold`` the zeta
value is summed with Euler-Maclaurin (cutoff chosen from the rigorous remainder
bound); above it the Riemann-Siegel main sum of ``floor(sqrt(t/2pi))`` terms is
used with up to five correction terms ``C_0 .. C_4``.  The correction
polynomials are derived once, in high precision, from the Taylor expansion of
``Psi(p) = cos(2pi(p^2 - p - 1/16)) / cos(2pi p)`` about ``p = 1/2``.
"""
from __future__ import annotations

import functools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import mpmath
import numpy as np
from numba import njit
from scipy.special import loggamma

from .errors import AccuracyError, CapacityError, ConfigError, DomainError
from .zlb import read_zlb, write_zlb

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

#: Gabcke's bounds |R_k(t)| <= GABCKE[k] * (t/2pi)^(-(2k+3)/4), valid for t >= 200.
GABCKE = (0.127, 0.053, 0.011, 0.031, 0.017)

#: Fixed evaluation chunk; results never depend on how chunks map to workers.
CHUNK = 4096

DEFAULT_MAX_POINTS = 60_000_000


@dataclass(frozen=True)
class EvalConfig:
    small_t_threshold: float = 1200.0
    rs_correction_terms: int = 4
    em_terms: int = 12
    target_abs_error: float = 1e-8

    def __post_init__(self):
        if not self.small_t_threshold >= 10:
            raise ConfigError("small_t_threshold", "must be >= 10")
        if not 0 <= self.rs_correction_terms <= 4:
            raise ConfigError("rs_correction_terms", "must lie in [0, 4]")
        if self.em_terms < 1:
            raise ConfigError("em_terms", "must be >= 1")
        if not self.target_abs_error > 0:
            raise ConfigError("target_abs_error", "must be positive")

    def to_dict(self):
        return asdict(self)


DEFAULT_CONFIG = EvalConfig()


@dataclass
class ZetaGrid:
    """Samples of |zeta(1/2+it)|^2 on the quadrature grid.

    Nodes come in Simpson pairs of equal step: every even-indexed node is the
    start of a pair, and the breakpoints ``k*pi/2`` (where the divisor error
    terms jump) and ``t = 2`` are always even-indexed nodes.
    """

    t_values: np.ndarray
    zsq_values: np.ndarray
    step_policy: str
    accuracy: float
    config: EvalConfig = field(default_factory=EvalConfig)
    c_step: float = 0.5

    def __post_init__(self):
        self.t_values = np.asarray(self.t_values, dtype=np.float64)
        self.zsq_values = np.asarray(self.zsq_values, dtype=np.float64)
        if self.t_values.shape != self.zsq_values.shape:
            raise ValueError("t_values and zsq_values must be aligned")
        if self.t_values.size < 3 or self.t_values.size % 2 == 0:
            raise ValueError("grid must hold an odd number (>= 3) of nodes")
        if self.t_values[0] != 0.0 or np.any(np.diff(self.t_values) <= 0):
            raise ValueError("t_values must start at 0 and increase strictly")

    @property
    def t_max(self):
        return float(self.t_values[-1])


# ---------------------------------------------------------------------------
# Riemann-Siegel correction polynomials


def _psi_taylor(degree, dps):
    """Taylor coefficients of Psi(1/2 + u) in u, as mpf."""
    with mpmath.workdps(dps):
        pi = mpmath.pi
        # Psi(1/2+u) = -cos(2pi u^2 - 5pi/8) / cos(2pi u)
        a, b = 2 * pi, 5 * pi / 8
        num = [mpmath.mpf(0)] * (degree + 1)
        for j in range(degree // 2 + 1):
            c = (-1) ** (j // 2) * a**j / mpmath.factorial(j)
            num[2 * j] = (mpmath.cos(b) if j % 2 == 0 else mpmath.sin(b)) * c
        den = [mpmath.mpf(0)] * (degree + 1)
        for j in range(degree // 2 + 1):
            den[2 * j] = (-1) ** j * (2 * pi) ** (2 * j) / mpmath.factorial(2 * j)
        q = []
        for n in range(degree + 1):
            s = num[n] - mpmath.fsum(q[k] * den[n - k] for k in range(n))
            q.append(s / den[0])
        return [-x for x in q]


@functools.lru_cache(maxsize=None)
def rs_correction_polynomials(degree=48):
    """Ascending coefficients in ``u = p - 1/2`` of C_0 .. C_4, shape (5, degree+1)."""
    dps, full = 120, degree + 16
    psi = _psi_taylor(full, dps)
    with mpmath.workdps(dps):
        pi = mpmath.pi

        def deriv(j):
            return [psi[m + j] * mpmath.factorial(m + j) / mpmath.factorial(m)
                    for m in range(degree + 1)]

        d = {j: deriv(j) for j in (0, 1, 2, 3, 4, 5, 6, 8, 9, 12)}

        def comb(*terms):
            return [mpmath.fsum(c * d[j][m] for c, j in terms) for m in range(degree + 1)]

        polys = [
            comb((1, 0)),
            comb((-1 / (96 * pi**2), 3)),
            comb((1 / (64 * pi**2), 2), (1 / (18432 * pi**4), 6)),
            comb((-1 / (64 * pi**2), 1), (-1 / (3840 * pi**4), 5),
                 (-1 / (5308416 * pi**6), 9)),
            comb((1 / (128 * pi**2), 0), (19 / (24576 * pi**4), 4),
                 (11 / (5898240 * pi**6), 8), (1 / (2038431744 * pi**8), 12)),
        ]
        return np.array([[float(c) for c in p] for p in polys])


def rs_error_bound(t, terms):
    """Bound on the Riemann-Siegel remainder after ``terms + 1`` corrections."""
    tau = np.asarray(t, dtype=np.float64) / TWO_PI
    return GABCKE[terms] * tau ** (-(2 * terms + 3) / 4)


# ---------------------------------------------------------------------------
# Phase


def rs_theta(t, cfg=DEFAULT_CONFIG):
    """Riemann-Siegel phase from its large-t asymptotic series."""
    arr = np.asarray(t, dtype=np.float64)
    if np.any(arr < cfg.small_t_threshold):
        raise DomainError(
            f"rs_theta needs t >= small_t_threshold ({cfg.small_t_threshold})")
    out = _theta_series_vec(arr)
    return float(out) if out.ndim == 0 else out


def siegel_theta(t):
    """Riemann-Siegel phase for any t >= 0, via log-gamma."""
    arr = np.asarray(t, dtype=np.float64)
    out = np.imag(loggamma(0.25 + 0.5j * arr)) - 0.5 * arr * math.log(math.pi)
    return float(out) if np.ndim(out) == 0 else out


@njit(cache=True, nogil=True)
def _theta_series(t):
    r = 1.0 / t
    r2 = r * r
    tail = r * (1.0 / 48.0 + r2 * (7.0 / 5760.0 + r2 * (31.0 / 80640.0
           + r2 * (127.0 / 430080.0 + r2 * (511.0 / 1216512.0)))))
    return 0.5 * t * math.log(t / 6.283185307179586) - 0.5 * t - 0.39269908169872414 + tail


@njit(cache=True)
def _theta_series_arr(t, out):
    for i in range(t.size):
        out[i] = _theta_series(t[i])


def _theta_series_vec(arr):
    flat = np.ascontiguousarray(arr, dtype=np.float64).ravel()
    out = np.empty_like(flat)
    _theta_series_arr(flat, out)
    return out.reshape(arr.shape)


# ---------------------------------------------------------------------------
# Kernels


@njit(cache=True, nogil=True)
def _rs_kernel(t, coeffs, nterms, out):
    for i in range(t.size):
        ti = t[i]
        a = math.sqrt(ti / 6.283185307179586)
        n_main = int(a)
        p = a - n_main
        th = _theta_series(ti)
        # Neumaier-compensated main sum
        s = 0.0
        comp = 0.0
        for n in range(1, n_main + 1):
            term = math.cos(th - ti * math.log(n)) / math.sqrt(n)
            tot = s + term
            if abs(s) >= abs(term):
                comp += (s - tot) + term
            else:
                comp += (term - tot) + s
            s = tot
        main = 2.0 * (s + comp)
        u = p - 0.5
        corr = 0.0
        scale = 1.0
        for k in range(nterms + 1):
            row = coeffs[k]
            val = 0.0
            for m in range(row.size - 1, -1, -1):
                val = val * u + row[m]
            corr += scale * val
            scale /= a
        sign = 1.0 if (n_main - 1) % 2 == 0 else -1.0
        out[i] = main + sign * corr / math.sqrt(a)


@njit(cache=True, nogil=True)
def _em_cutoff(t, m, log_bern_next, log_target):
    sigma = 0.5
    acc = log_bern_next - math.log(sigma + 2 * m + 1)
    for j in range(2 * m + 2):
        acc += 0.5 * math.log((sigma + j) ** 2 + t * t)
    n = math.exp((acc - log_target) / (sigma + 2 * m + 1))
    return max(int(math.ceil(n)), 2)


@njit(cache=True, nogil=True)
def _em_kernel(t, bern, log_bern_next, log_target, out):
    m = bern.size
    for i in range(t.size):
        s = complex(0.5, t[i])
        big_n = _em_cutoff(t[i], m, log_bern_next, log_target)
        total = 0j
        for n in range(1, big_n):
            total += np.exp(-s * math.log(n))
        ns = np.exp(-s * math.log(big_n))
        total += big_n * ns / (s - 1.0) + 0.5 * ns
        term = bern[0] * s * ns / big_n
        total += term
        for k in range(1, m):
            term *= (s + (2 * k - 1)) * (s + 2 * k) / (big_n * big_n) * (bern[k] / bern[k - 1])
            total += term
        out[i] = total


@functools.lru_cache(maxsize=None)
def _bernoulli_ratios(m):
    vals = [mpmath.bernoulli(2 * k) / mpmath.factorial(2 * k) for k in range(1, m + 2)]
    return (np.array([float(v) for v in vals[:m]]),
            float(mpmath.log(abs(vals[m]))))


def zeta_em(t, em_terms=12, target=1e-10):
    """zeta(1/2 + it) by Euler-Maclaurin; complex array."""
    arr = np.ascontiguousarray(np.atleast_1d(np.asarray(t, dtype=np.float64)))
    bern, log_next = _bernoulli_ratios(em_terms)
    out = np.empty(arr.size, dtype=np.complex128)
    _em_kernel(arr, bern, log_next, math.log(target), out)
    return out


def _z_em(arr, cfg):
    zeta = zeta_em(arr, cfg.em_terms, cfg.target_abs_error / 10)
    return np.real(np.exp(1j * siegel_theta(arr)) * zeta)


def _z_rs(arr, cfg):
    bound = rs_error_bound(arr.min(), cfg.rs_correction_terms)
    if bound > cfg.target_abs_error:
        raise AccuracyError(
            f"Riemann-Siegel with C_0..C_{cfg.rs_correction_terms} reaches only "
            f"{bound:.3g} at t={arr.min():.6g}; target {cfg.target_abs_error:.3g}",
            achievable=float(bound))
    coeffs = rs_correction_polynomials()
    out = np.empty(arr.size)
    _rs_kernel(np.ascontiguousarray(arr), coeffs, cfg.rs_correction_terms, out)
    return out


def _z_chunk(arr, cfg):
    out = np.empty(arr.size)
    small = arr < cfg.small_t_threshold
    if small.any():
        out[small] = _z_em(arr[small], cfg)
    if (~small).any():
        out[~small] = _z_rs(arr[~small], cfg)
    return out


def hardy_z_rs(t, cfg=DEFAULT_CONFIG):
    """Riemann-Siegel value regardless of the switch threshold (t >= 200)."""
    arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if np.any(arr < 200):
        raise DomainError("Riemann-Siegel evaluation needs t >= 200")
    out = _z_rs(arr, cfg)
    return float(out[0]) if np.ndim(t) == 0 else out


def hardy_z_em(t, cfg=DEFAULT_CONFIG):
    """Euler-Maclaurin value regardless of the switch threshold."""
    arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
    out = _z_em(arr, cfg)
    return float(out[0]) if np.ndim(t) == 0 else out


def hardy_z(t, cfg=DEFAULT_CONFIG, workers=1):
    """Z(t) for scalar or array ``t >= 0``; |Z(t)| = |zeta(1/2+it)|."""
    arr = np.asarray(t, dtype=np.float64)
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise DomainError("hardy_z needs finite t >= 0")
    flat = arr.ravel()
    out = np.empty_like(flat)
    starts = range(0, flat.size, CHUNK)

    def run(lo):
        out[lo:lo + CHUNK] = _z_chunk(flat[lo:lo + CHUNK], cfg)

    if workers > 1 and flat.size > CHUNK:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, starts))
    else:
        for lo in starts:
            run(lo)
    return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)


def zeta_abs_sq(t, cfg=DEFAULT_CONFIG, workers=1):
    z = hardy_z(t, cfg, workers)
    return z * z


# ---------------------------------------------------------------------------
# Grid


def breakpoints(t_max):
    """Sorted segment ends: multiples of pi/2 covering [0, t_max], plus t = 2."""
    k = int(math.ceil(t_max / (math.pi / 2)))
    pts = np.arange(k + 1, dtype=np.float64) * (math.pi / 2)
    return np.unique(np.append(pts, 2.0))


def _segment_steps(t_max, c_step):
    """Breakpoints and the even step count of each segment between them.

    One step size is used throughout (the finest the spacing rule asks for on
    [0, t_max]); only the two segments split by t = 2 deviate slightly.  A
    constant step keeps Simpson's leading error term telescoping, so the
    cumulative integral carries no persistent offset.
    """
    if t_max < 1:
        raise DomainError("t_max must be >= 1")
    b = breakpoints(t_max)
    h_max = min(0.25, c_step / math.log(2.0 + b[-1]))
    quarter = math.pi / 2
    m = 2 * math.ceil(quarter / (2 * h_max))
    lengths = np.diff(b)
    steps = np.full(lengths.size, m, dtype=np.int64)
    odd = np.abs(lengths - quarter) > 1e-9
    steps[odd] = 2 * np.ceil(lengths[odd] / (2 * quarter / m)).astype(np.int64)
    return b, steps


def grid_nodes(t_max, c_step=0.5):
    """Node positions obeying spacing <= min(0.25, c_step / log(2 + t))."""
    b, steps = _segment_steps(t_max, c_step)
    lo, hi = b[:-1], b[1:]
    owner = np.repeat(np.arange(lo.size), steps)
    offsets = np.arange(owner.size) - np.repeat(np.cumsum(steps) - steps, steps)
    nodes = lo[owner] + (hi - lo)[owner] * offsets / steps[owner]
    return np.append(nodes, hi[-1])


def grid_size(t_max, c_step=0.5):
    return int(_segment_steps(t_max, c_step)[1].sum()) + 1


def build_zeta_grid(t_max, cfg=DEFAULT_CONFIG, c_step=0.5, workers=1,
                    max_points=DEFAULT_MAX_POINTS, checkpoint=None):
    """Sample |zeta(1/2+it)|^2 on the deterministic grid covering [0, t_max].

    ``checkpoint`` (optional) is an object with ``load() -> ndarray | None`` and
    ``save(done: ndarray)`` used to resume long builds.
    """
    n = grid_size(t_max, c_step)
    if n > max_points:
        raise CapacityError(f"grid needs {n} points, cap is {max_points}")
    t = grid_nodes(t_max, c_step)
    done = checkpoint.load() if checkpoint is not None else None
    zsq = np.empty_like(t)
    start = 0
    if done is not None:
        start = done.size
        zsq[:start] = done
        log.info("resumed zeta grid at %d/%d points", start, t.size)
    block = checkpoint.every if checkpoint is not None else t.size
    for lo in range(start, t.size, block):
        hi = min(lo + block, t.size)
        zsq[lo:hi] = zeta_abs_sq(t[lo:hi], cfg, workers)
        if checkpoint is not None:
            checkpoint.save(zsq[:hi])
    policy = (f"uniform step (pi/2)/m <= min(0.25, {c_step}/log(2+t_max)) between "
              f"multiples of pi/2; t=2 splits one segment")
    return ZetaGrid(t, zsq, policy, cfg.target_abs_error, cfg, c_step)


def save_zeta_grid(path, grid, meta=None):
    meta = dict(meta or {})
    meta.update(kind="zeta_grid", t_max=grid.t_max, c_step=grid.c_step,
                eval_config=grid.config.to_dict(), step_policy=grid.step_policy,
                accuracy=grid.accuracy, points=int(grid.t_values.size))
    write_zlb(path, {"t_values": grid.t_values, "zsq_values": grid.zsq_values}, meta)


def load_zeta_grid(path):
    arrays, meta = read_zlb(path)
    cfg = EvalConfig(**meta.get("eval_config", {}))
    return ZetaGrid(arrays["t_values"], arrays["zsq_values"], meta.get("step_policy", ""),
                    float(meta.get("accuracy", cfg.target_abs_error)), cfg,
                    float(meta.get("c_step", 0.5)))
