"""Short-interval moment integrals of the zeta and divisor error terms.

All integrals run over the same pair grid as the error terms.  Whole pairs
use Simpson's rule and partial end pieces the trapezoid rule, so every
quadrature has nonnegative weights summing to the interval length.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

from . import divisor as dv
from .errors import DomainError, UnsupportedError
from .error_terms import ErrorTermGrid
from .quadrature import Antiderivatives, PairGrid, interval_integral

NESTED_MAX_K = 5
DEFAULT_DELTA = 0.1
_SAMPLE_CHUNK = 1 << 20


class MomentKind(str, enum.Enum):
    ESTAR_ABS_MOMENT = "ESTAR_ABS_MOMENT"
    R_ABS_MOMENT = "R_ABS_MOMENT"
    ZETA_NESTED = "ZETA_NESTED"
    ZETA_PLAIN = "ZETA_PLAIN"
    J_SMOOTHED = "J_SMOOTHED"
    DIFF_MEANSQ_DELTA = "DIFF_MEANSQ_DELTA"
    DIFF_MEANSQ_E = "DIFF_MEANSQ_E"


@dataclass(frozen=True, order=True)
class MomentRow:
    kind: MomentKind
    T: float
    H: float
    k: int
    value: float


@dataclass
class MomentScanResult:
    rows: list = field(default_factory=list)
    config_digest: str = ""

    def add(self, kind, T, H, k, value):
        self.rows.append(MomentRow(MomentKind(kind), float(T), float(H), int(k), float(value)))

    def sorted_rows(self):
        return sorted(self.rows, key=lambda r: (r.kind.value, r.T, r.H, r.k))

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("kind,T,H,k,value\n")
            for r in self.sorted_rows():
                fh.write(f"{r.kind.value},{r.T!r},{r.H!r},{r.k},{r.value!r}\n")


# ---------------------------------------------------------------------------
# grid plumbing


def _zeta_parts(grid):
    """(pairs, antiderivatives, zsq samples) for a zeta or error-term grid."""
    if isinstance(grid, ErrorTermGrid):
        return grid.pairs, grid.anti, grid.zsq
    cached = getattr(grid, "_moment_cache", None)
    if cached is None:
        pairs = PairGrid(grid.t_values)
        cached = (pairs, Antiderivatives(pairs, grid.zsq_values), grid.zsq_values)
        grid._moment_cache = cached
    return cached


def _require(pairs, a, b):
    if not (pairs.lo <= a and b <= pairs.hi):
        raise DomainError(f"[{a}, {b}] is outside the grid range [{pairs.lo}, {pairs.hi}]")


def _window(pairs, a, b):
    """Even node indices (ja, jb) with t[ja] <= a and b <= t[jb]."""
    i0 = max(0, int(np.searchsorted(pairs.x0, a, side="right")) - 1)
    i1 = min(pairs.npairs - 1, int(np.searchsorted(pairs.x2, b, side="left")))
    return 2 * i0, 2 * i1 + 2


def _windowed_integral(pairs, a, b, fn, left=None):
    """Integral of ``fn`` over [a, b] sampling only the nodes that matter.

    ``fn(x)`` is vectorised; ``left(ja, jb)`` optionally returns left limits
    at the window nodes for integrands with jumps at even nodes.
    """
    _require(pairs, a, b)
    if a == b:
        return 0.0
    ja, jb = _window(pairs, a, b)
    sub = PairGrid(pairs.t[ja:jb + 1])
    values = np.asarray(fn(sub.t), dtype=np.float64)
    lvals = None if left is None else left(ja, jb)
    return interval_integral(sub, values, a, b, lambda x, side="right": float(fn(np.float64(x))), lvals)


# ---------------------------------------------------------------------------
# moments of E* and R


_FIELD_KIND = {"Estar": MomentKind.ESTAR_ABS_MOMENT, "R": MomentKind.R_ABS_MOMENT}


def abs_moment(grid, field_name, T, H, k):
    """Integral of |field(t)|^k over [T, T + H]."""
    if k < 1:
        raise DomainError("k must be >= 1")
    if H <= 0:
        raise DomainError("H must be positive")
    if field_name not in ("Estar", "R", "E", "E1"):
        raise DomainError(f"unknown field {field_name!r}")
    _require(grid.pairs, T, T + H)
    if getattr(grid, field_name) is None:
        raise DomainError(f"{field_name} has not been computed on this grid")
    pairs = grid.pairs
    ja, jb = _window(pairs, T, T + H)
    sub = PairGrid(pairs.t[ja:jb + 1])
    raw = getattr(grid, field_name)[ja:jb + 1]
    left = grid.Estar_left[ja:jb + 1] if field_name == "Estar" else None

    def g(v):
        return np.abs(v) ** k

    def at(x, side="right"):
        return float(g(grid.field_at(field_name, x, side)))

    return interval_integral(sub, g(raw), T, T + H, at, None if left is None else g(left))


def holder_pair(grid, field_name, T, H):
    """((integral of |f|)^2, H * integral of f^2) on the same weights."""
    m1 = abs_moment(grid, field_name, T, H, 1)
    m2 = abs_moment(grid, field_name, T, H, 2)
    return m1 * m1, H * m2


# ---------------------------------------------------------------------------
# zeta moments


def inner_zeta_power(zgrid, t, H):
    """Integral of |zeta(1/2+iu)|^2 over [t - H, t + H]."""
    pairs, anti, _ = _zeta_parts(zgrid)
    t = np.asarray(t, dtype=np.float64)
    if H <= 0:
        raise DomainError("H must be positive")
    _require(pairs, float(np.min(t)) - H, float(np.max(t)) + H)
    out = anti.first_at(t + H) - anti.first_at(t - H)
    # the model integral can only dip below zero by rounding
    out = np.maximum(out, 0.0)
    return float(out) if out.ndim == 0 else out


def nested_moment(zgrid, T, H, k):
    """Integral over [T, 2T] of (integral of |zeta|^2 over [t-H, t+H])^k."""
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= NESTED_MAX_K:
        raise UnsupportedError(f"nested moments are supported for k in 1..{NESTED_MAX_K}")
    pairs, _, _ = _zeta_parts(zgrid)
    _require(pairs, T - H, 2 * T + H)
    return _windowed_integral(pairs, T, 2 * T, lambda x: inner_zeta_power(zgrid, x, H) ** k)


def nested_moment_swapped(zgrid, T, H):
    """k = 1 nested moment via the second antiderivative (summation order swapped)."""
    pairs, anti, _ = _zeta_parts(zgrid)
    _require(pairs, T - H, 2 * T + H)
    p2 = anti.second_at
    return float(p2(2 * T + H) - p2(T + H) - p2(2 * T - H) + p2(T - H))


def nested_main_term(T, H):
    """Integral over [T, 2T] of the main-term difference over [t-H, t+H].

    Exact for the main term x(log(x/2pi) + 2*gamma - 1) of the mean square.
    """
    def prim(x):
        # antiderivative of the main term
        return 0.5 * x * x * (math.log(x / (2 * math.pi)) - 0.5 + dv.MAIN_C)

    return prim(2 * T + H) - prim(T + H) - prim(2 * T - H) + prim(T - H)


def nested_leading_term(T, H):
    """2H(T log(2T/(e pi)) + 2 gamma T), the leading part of the exact main term."""
    return 2 * H * (T * math.log(2 * T / (math.e * math.pi)) + 2 * dv.EULER_GAMMA * T)


def zeta_plain_moment(zgrid, T, H):
    """Integral of |zeta|^2 over [T, T + H]."""
    pairs, anti, _ = _zeta_parts(zgrid)
    _require(pairs, T, T + H)
    return float(anti.first_at(T + H) - anti.first_at(T))


def truncation_bound(t):
    """Gaussian mass dropped by cutting the smoothing kernel at |u| = G log t."""
    return float(erfc(math.log(t)))


def smoothed_moment_J(zgrid, k, t, G):
    """Gaussian-smoothed moment (1/(sqrt(pi) G)) * int |zeta(1/2+i(t+u))|^(2k) e^{-(u/G)^2} du.

    The kernel is truncated at |u| <= G log t; see ``truncation_bound``.
    """
    if k not in (1, 2):
        raise UnsupportedError("J is available for k = 1 and k = 2 only")
    if G <= 0 or t <= 1:
        raise DomainError("need G > 0 and t > 1")
    pairs, anti, _ = _zeta_parts(zgrid)
    cut = G * math.log(t)
    norm = 1.0 / (math.sqrt(math.pi) * G)

    def fn(x):
        # the pair model reproduces the samples exactly at the nodes
        return norm * anti.value(x) ** k * np.exp(-((x - t) / G) ** 2)

    return _windowed_integral(pairs, t - cut, t + cut, fn)


def bracket_sides(zgrid, T, G):
    """(integral of |zeta|^2 over [T-G, T+G], sqrt(pi) e G J_1(T, G))."""
    lhs = inner_zeta_power(zgrid, T, G)
    return lhs, math.sqrt(math.pi) * math.e * G * smoothed_moment_J(zgrid, 1, T, G)


# ---------------------------------------------------------------------------
# divisor-difference mean square


def diff_mean_square(table, T, U, target="Delta", grid=None, delta=DEFAULT_DELTA):
    """Integral over [T, 2T] of (f(x+U) - f(x))^2 for f = Delta or E.

    Midpoint sampling with step ``delta``; Delta uses the exact prefix sums
    and E the grid's quadratic model.
    """
    if U < 0 or T <= 0 or delta <= 0:
        raise DomainError("need T > 0, U >= 0 and delta > 0")
    if U == 0:
        return 0.0
    if target == "Delta":
        if table is None or 2 * T + U > table.limit:
            need = int(math.ceil(2 * T + U))
            raise DomainError(f"diff_mean_square needs a divisor table up to {need}")
        if T < 1:
            raise DomainError("Delta target needs T >= 1")

        def f(x):
            return dv._delta_ext(table, x)
    elif target == "E":
        if grid is None:
            raise DomainError("E target needs an error-term grid")
        _require(grid.pairs, T, 2 * T + U)

        def f(x):
            return grid.E_at(x)
    else:
        raise DomainError(f"unknown target {target!r}")
    n = int(round(T / delta))
    step = T / n
    parts = []
    for lo in range(0, n, _SAMPLE_CHUNK):
        j = np.arange(lo, min(n, lo + _SAMPLE_CHUNK), dtype=np.float64)
        x = T + (j + 0.5) * step
        d = f(x + U) - f(x)
        parts.append(float(np.dot(d, d)))
    return math.fsum(parts) * step


def diff_mean_square_exact(table, T, U):
    """Delta-target mean square integrated piece by piece.

    Between consecutive points of Z and Z - U the count part of
    Delta(x+U) - Delta(x) is constant, and the smooth remainder is integrated
    by 3-point Gauss-Legendre.  Used to audit the sampled value.
    """
    if U == 0:
        return 0.0
    if 2 * T + U > table.limit or T < 1:
        raise DomainError(f"diff_mean_square needs a divisor table up to {int(math.ceil(2 * T + U))}")
    nodes, weights = np.polynomial.legendre.leggauss(3)
    parts = []
    lo = T
    while lo < 2 * T:
        hi = min(2 * T, math.floor(lo) + _SAMPLE_CHUNK)
        ints = np.arange(math.floor(lo) + 1, math.ceil(hi), dtype=np.float64)
        shifted = np.arange(math.floor(lo + U) + 1, math.ceil(hi + U), dtype=np.float64) - U
        cuts = np.union1d(np.concatenate(([lo, hi], ints, shifted)), [])
        cuts = cuts[(cuts >= lo) & (cuts <= hi)]
        a, b = cuts[:-1], cuts[1:]
        mid = 0.5 * (a + b)
        count = (table.prefix[np.floor(mid + U).astype(np.int64)]
                 - table.prefix[np.floor(mid).astype(np.int64)]).astype(np.float64)
        half = 0.5 * (b - a)
        acc = np.zeros_like(a)
        for xn, wn in zip(nodes, weights):
            x = mid + half * xn
            d = count - (dv.main_term(x + U) - dv.main_term(x))
            acc += wn * d * d
        parts.append(float(np.dot(half, acc)))
        lo = hi
    return math.fsum(parts)


def diff_meansq_leading(T, U):
    """T U (8/pi^2) log^3(sqrt(T)/U)."""
    return T * U * (8 / math.pi**2) * math.log(math.sqrt(T) / U) ** 3


# ---------------------------------------------------------------------------
# smoothed lower-bound diagnostic


@dataclass(frozen=True)
class Lemma1Record:
    T: float
    G: float
    lhs: float
    smoothed: float
    slack: float

    @property
    def slack_ratio(self):
        return self.slack / (self.G * math.log(self.T))


def lemma1_diagnostic(zgrid, grid, T, G):
    """Compare the short-interval mean square with the weighted E* integral.

    ``smoothed`` is (2e/G^2) * int_{-GL}^{GL} x E*(T+x) e^{-(x/G)^2} dx with
    L = log T; the slack is ``lhs - smoothed``.  No pass/fail is attached.
    """
    if G < 1:
        raise DomainError("G must be >= 1")
    if grid.Estar is None:
        raise DomainError("E* has not been computed on this grid")
    cut = G * math.log(T)
    pairs = grid.pairs
    _require(pairs, T - cut, T + cut)
    lhs = inner_zeta_power(zgrid, T, G)

    def weight(x):
        u = np.asarray(x, dtype=np.float64) - T
        return u * np.exp(-(u / G) ** 2)

    ja, jb = _window(pairs, T - cut, T + cut)
    sub = PairGrid(pairs.t[ja:jb + 1])
    w = weight(sub.t)
    vals = w * grid.Estar[ja:jb + 1]
    left = w * grid.Estar_left[ja:jb + 1]

    def at(x, side="right"):
        return float(weight(x) * grid.Estar_at(x, side))

    integral = interval_integral(sub, vals, T - cut, T + cut, at, left)
    smoothed = 2 * math.e / G**2 * integral
    return Lemma1Record(float(T), float(G), lhs, smoothed, lhs - smoothed)


__all__ = [
    "MomentKind", "MomentRow", "MomentScanResult", "abs_moment", "holder_pair",
    "inner_zeta_power", "nested_moment", "nested_moment_swapped", "nested_main_term",
    "nested_leading_term", "zeta_plain_moment", "smoothed_moment_J", "truncation_bound",
    "bracket_sides", "diff_mean_square", "diff_mean_square_exact", "diff_meansq_leading", "Lemma1Record",
    "lemma1_diagnostic",
]
