"""Composite Simpson machinery on grids made of equal-step node pairs.

A grid ``t[0] < t[1] < ... < t[2P]`` is split into P pairs
``(t[2i], t[2i+1], t[2i+2])`` with ``t[2i+1] - t[2i] == t[2i+2] - t[2i+1]``.
Sampled functions are modelled by the quadratic through each pair, which is
what composite Simpson integrates exactly.  Functions with jumps are allowed
at even nodes only; they carry a separate array of left limits.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

#: Fixed chunk for the compensated prefix; the reduction order never changes.
CUMSUM_CHUNK = 1 << 14


@njit(cache=True, nogil=True)
def _neumaier_prefix(x, out, offsets, chunk):
    n = x.size
    nchunks = (n + chunk - 1) // chunk
    totals = np.zeros(nchunks)
    comps = np.zeros(nchunks)
    for c in range(nchunks):
        s = 0.0
        comp = 0.0
        for i in range(c * chunk, min(n, (c + 1) * chunk)):
            v = x[i]
            tot = s + v
            if abs(s) >= abs(v):
                comp += (s - tot) + v
            else:
                comp += (v - tot) + s
            s = tot
            out[i] = s
            offsets[i] = comp
        totals[c] = s
        comps[c] = comp
    # chunk carries, summed left to right with compensation
    s = 0.0
    comp = 0.0
    for c in range(nchunks):
        lo = c * chunk
        for i in range(lo, min(n, lo + chunk)):
            out[i] = (s + out[i]) + (comp + offsets[i])
        v = totals[c]
        tot = s + v
        if abs(s) >= abs(v):
            comp += (s - tot) + v
        else:
            comp += (v - tot) + s
        s = tot
        comp += comps[c]


def compensated_cumsum(x):
    """Inclusive prefix sums with Neumaier compensation."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty_like(x)
    if x.size:
        _neumaier_prefix(x, out, np.empty_like(x), CUMSUM_CHUNK)
    return out


def exclusive_cumsum(x):
    return np.concatenate(([0.0], compensated_cumsum(x)))


class PairGrid:
    """Node positions with Simpson pair structure."""

    def __init__(self, t):
        t = np.asarray(t, dtype=np.float64)
        if t.size < 3 or t.size % 2 == 0:
            raise ValueError("a pair grid needs an odd number (>= 3) of nodes")
        self.t = t
        self.x0 = t[0:-1:2]
        self.x1 = t[1::2]
        self.x2 = t[2::2]
        self.h = self.x1 - self.x0
        if not np.allclose(self.x2 - self.x1, self.h, rtol=1e-9, atol=0):
            raise ValueError("each node pair must have equal steps")

    @property
    def npairs(self):
        return self.x0.size

    @property
    def lo(self):
        return float(self.t[0])

    @property
    def hi(self):
        return float(self.t[-1])

    def locate(self, x):
        """Pair index and local coordinate s = (x - x0)/h in [0, 2]."""
        x = np.asarray(x, dtype=np.float64)
        i = np.clip(np.searchsorted(self.x0, x, side="right") - 1, 0, self.npairs - 1)
        return i, (x - self.x0[i]) / self.h[i]

    def contains(self, a, b=None):
        b = a if b is None else b
        return self.lo <= a and b <= self.hi


def pair_values(values, left=None):
    """(f0, f1, f2) per pair; f2 uses left limits when given."""
    left = values if left is None else left
    return values[0:-1:2], values[1::2], left[2::2]


class Antiderivatives:
    """First and second antiderivatives of the pairwise quadratic interpolant.

    ``first[j]`` is the integral of f over [t0, t[j]]; ``second[j]`` the
    integral of ``first`` over the same range.  Both are exact for the
    piecewise-quadratic model and therefore consistent with Simpson.
    """

    def __init__(self, grid, values, left=None):
        self.grid = grid
        f0, f1, f2 = pair_values(np.asarray(values, dtype=np.float64), left)
        self.f0, self.f1, self.f2 = f0, f1, f2
        h = grid.h
        simpson = h * (f0 + 4 * f1 + f2) / 3
        c1 = exclusive_cumsum(simpson)
        # second antiderivative: pair increment 2h*C1 + h^2(2f0 + 4f1)/3
        c2 = exclusive_cumsum(2 * h * c1[:-1] + h * h * (2 * f0 + 4 * f1) / 3)
        first = np.empty(grid.t.size)
        second = np.empty(grid.t.size)
        first[0::2] = c1
        second[0::2] = c2
        first[1::2] = c1[:-1] + h * (5 * f0 + 8 * f1 - f2) / 12
        second[1::2] = c2[:-1] + h * c1[:-1] + h * h * (7 * f0 + 6 * f1 - f2) / 24
        self._c1, self._c2 = c1, c2
        self.first = first
        self.second = second

    def _coeffs(self, i):
        f0, f1, f2 = self.f0[i], self.f1[i], self.f2[i]
        return f0, (-3 * f0 + 4 * f1 - f2), (f0 - 2 * f1 + f2)

    def value(self, x):
        """The quadratic interpolant itself."""
        i, s = self.grid.locate(x)
        f0, b, c = self._coeffs(i)
        return f0 + s * b / 2 + s * s * c / 2

    def first_at(self, x):
        i, s = self.grid.locate(x)
        f0, b, c = self._coeffs(i)
        h = self.grid.h[i]
        return self._c1[i] + h * s * (f0 + s * (b / 4 + s * c / 6))

    def second_at(self, x):
        i, s = self.grid.locate(x)
        f0, b, c = self._coeffs(i)
        h = self.grid.h[i]
        return (self._c2[i] + h * s * self._c1[i]
                + h * h * s * s * (f0 / 2 + s * (b / 12 + s * c / 24)))


def interval_integral(grid, values, a, b, value_at, left=None):
    """Integral over [a, b] with nonnegative weights.

    Whole pairs inside [a, b] use Simpson; the partial pieces at either end
    use the trapezoid rule through the interior nodes, with ``value_at(a)``
    and ``value_at(b)`` supplying the endpoint samples.  The same weights are
    used whatever the sampled function, so discrete Cauchy-Schwarz holds.
    """
    if not (grid.lo <= a <= b <= grid.hi):
        raise ValueError(f"[{a}, {b}] outside grid [{grid.lo}, {grid.hi}]")
    if a == b:
        return 0.0
    values = np.asarray(values, dtype=np.float64)
    left = values if left is None else np.asarray(left, dtype=np.float64)
    t = grid.t
    ja = int(np.searchsorted(t, a, side="left"))
    jb = int(np.searchsorted(t, b, side="right")) - 1
    ea = ja + (ja % 2)
    eb = jb - (jb % 2)
    parts = []

    def trapezoid(xs, fs):
        for k in range(len(xs) - 1):
            parts.append(0.5 * (xs[k + 1] - xs[k]) * (fs[k] + fs[k + 1]))

    if ea < eb:
        p0, p1 = ea // 2, eb // 2
        h = grid.h[p0:p1]
        parts.extend((h * (values[ea:eb:2] + 4 * values[ea + 1:eb:2]
                           + left[ea + 2:eb + 1:2]) / 3).tolist())
        if a < t[ea]:
            xs, fs = [a], [value_at(a)]
            for j in range(ja, ea):
                xs.append(t[j])
                fs.append(values[j])
            xs.append(t[ea])
            fs.append(left[ea])
            trapezoid(xs, fs)
        if b > t[eb]:
            xs, fs = [t[eb]], [values[eb]]
            for j in range(eb + 1, jb + 1):
                xs.append(t[j])
                fs.append(values[j])
            xs.append(b)
            fs.append(value_at(b, side="left"))
            trapezoid(xs, fs)
    else:
        xs = [a]
        fs = [value_at(a)]
        for j in range(ja, jb + 1):
            if a < t[j] < b:
                xs.append(t[j])
                fs.append(left[j] if j % 2 == 0 else values[j])
                if j % 2 == 0 and left[j] != values[j]:
                    xs.append(t[j])
                    fs.append(values[j])
        xs.append(b)
        fs.append(value_at(b, side="left"))
        trapezoid(xs, fs)
    return math.fsum(parts)
