"""Divisor function table and the divisor-problem error terms.

``prefix`` is exact integer arithmetic; the main term ``x(log x + 2*gamma - 1)``
is the only floating-point part.  Arrays carry a zero slot at index 0 so that
``prefix[n]`` is the summatory function at ``n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DomainError
from .zlb import read_zlb, write_zlb

EULER_GAMMA = 0.57721566490153286060651209008240243
MAIN_C = 2.0 * EULER_GAMMA - 1.0

#: bytes per table entry: counts (u2) + three int64 prefix arrays
_BYTES_PER_ENTRY = 2 + 3 * 8
DEFAULT_MEMORY_CAP = 2 << 30


@dataclass(frozen=True)
class Constants:
    euler_gamma: float = EULER_GAMMA
    pi: float = math.pi


@dataclass(frozen=True, eq=False)
class DivisorTable:
    limit: int
    counts: np.ndarray
    prefix: np.ndarray
    alt_prefix: np.ndarray
    #: sum_{m<=n} (-1)^m m d(m); needed for the exact integral of Delta*
    alt_weighted_prefix: np.ndarray

    def __post_init__(self):
        for arr in (self.counts, self.prefix, self.alt_prefix, self.alt_weighted_prefix):
            arr.setflags(write=False)


def build_divisor_table(limit, memory_cap=DEFAULT_MEMORY_CAP):
    """Sieve d(n) for n <= limit.

    Every n >= k^2 that k divides gets the divisor pair (k, n/k); the square
    case counts once.  Cost is O(limit log sqrt(limit)).
    """
    limit = int(limit)
    if limit < 1:
        raise CapacityError("divisor table limit must be >= 1")
    if (limit + 1) * _BYTES_PER_ENTRY > memory_cap:
        raise CapacityError(
            f"limit {limit} needs {(limit + 1) * _BYTES_PER_ENTRY} bytes, cap {memory_cap}")
    counts = np.zeros(limit + 1, dtype=np.uint16)
    for k in range(1, math.isqrt(limit) + 1):
        counts[k * k::k] += 2
        counts[k * k] -= 1
    return _from_counts(counts)


def _from_counts(counts):
    d = counts.astype(np.int64)
    n = np.arange(d.size, dtype=np.int64)
    sign = np.where(n % 2 == 0, 1, -1)
    return DivisorTable(
        limit=d.size - 1,
        counts=counts,
        prefix=np.cumsum(d),
        alt_prefix=np.cumsum(sign * d),
        alt_weighted_prefix=np.cumsum(sign * n * d),
    )


def main_term(x):
    """x(log x + 2*gamma - 1), with the value 0 at x = 0."""
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(x > 0, x * (np.log(x) + MAIN_C), 0.0)
    return out[()] if out.ndim == 0 else out


def main_term_integral(x):
    """Integral of ``main_term`` over [0, x]."""
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(x > 0, 0.5 * x * x * (np.log(x) - 0.5 + MAIN_C), 0.0)
    return out[()] if out.ndim == 0 else out


def _scalar(out, x):
    return float(out) if np.ndim(x) == 0 else out


def _check_range(table, x, lo, what, scale=1):
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr < lo) or not np.all(np.isfinite(arr)):
        raise DomainError(f"{what} needs x >= {lo}")
    if np.any(scale * arr > table.limit):
        raise DomainError(
            f"{what} needs {scale}x <= table limit {table.limit}; "
            f"rebuild the table to at least {int(math.ceil(scale * arr.max()))}")
    return arr


def _delta_ext(table, x):
    """Delta(x) for any 0 <= x <= limit (empty sum below 1)."""
    n = np.floor(x).astype(np.int64)
    return table.prefix[n] - main_term(x)


def delta(table, x):
    """Dirichlet divisor problem error term; the sum includes n = x."""
    arr = _check_range(table, x, 1, "delta")
    return _scalar(_delta_ext(table, arr), x)


def delta_star(table, x):
    """-Delta(x) + 2 Delta(2x) - Delta(4x)/2 for 0 <= x, 4x <= limit."""
    arr = _check_range(table, x, 0, "delta_star", 4)
    out = -_delta_ext(table, arr) + 2 * _delta_ext(table, 2 * arr) - 0.5 * _delta_ext(table, 4 * arr)
    return _scalar(out, x)


def delta_star_alt(table, x):
    """Same quantity via (1/2) sum_{n<=4x} (-1)^n d(n) - x(log x + 2*gamma - 1)."""
    arr = _check_range(table, x, 0, "delta_star_alt", 4)
    n = np.floor(4 * arr).astype(np.int64)
    return _scalar(0.5 * table.alt_prefix[n] - main_term(arr), x)


def delta_star_at_index(table, x, n4):
    """Delta*(x) given the integer ``n4 = floor(4x)`` explicitly.

    Grid nodes sit on the jump points x = n/4 up to rounding; passing the
    index avoids an off-by-one from a floor that lands one ulp low.
    """
    return 0.5 * table.alt_prefix[n4] - main_term(x)


def delta_star_integral(table, x, n4=None):
    """Exact integral of Delta*(u) over [0, x].

    (1/2) sum_{n<=4x} (-1)^n d(n) (x - n/4) minus the integrated main term.
    """
    arr = np.asarray(x, dtype=np.float64)
    if n4 is None:
        n4 = np.floor(4 * arr).astype(np.int64)
    if np.any(n4 > table.limit):
        raise DomainError(f"delta_star_integral needs 4x <= {table.limit}")
    a = table.alt_prefix[n4].astype(np.float64)
    b = table.alt_weighted_prefix[n4].astype(np.float64)
    out = 0.5 * (arr * a - 0.25 * b) - main_term_integral(arr)
    return _scalar(out, x)


def short_interval_divisor_sum(table, x, h):
    """sum_{x < n <= x+h} d(n)."""
    if x < 2 or h <= 0:
        raise DomainError("short_interval_divisor_sum needs x >= 2 and h > 0")
    if x + h > table.limit:
        raise DomainError(f"x + h = {x + h} exceeds table limit {table.limit}")
    return int(table.prefix[int(math.floor(x + h))] - table.prefix[int(math.floor(x))])


def save_table(path, table, params=None):
    meta = {"kind": "divisor_table", "limit": table.limit, "build": params or {}}
    write_zlb(path, {
        "counts": table.counts,
        "prefix": table.prefix,
        "alt_prefix": table.alt_prefix,
        "alt_weighted_prefix": table.alt_weighted_prefix,
    }, meta)


def load_table(path):
    arrays, meta = read_zlb(path)
    return DivisorTable(
        limit=int(arrays["counts"].size - 1),
        counts=arrays["counts"],
        prefix=arrays["prefix"],
        alt_prefix=arrays["alt_prefix"],
        alt_weighted_prefix=arrays["alt_weighted_prefix"],
    )
