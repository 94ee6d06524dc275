"""E(T), E*(t), R(T) and E_1(T) on the zeta grid.

Everything is built from the pairwise-quadratic model of |zeta(1/2+it)|^2 and
exact closed forms for the smooth main terms and for the integral of the
divisor-sum step function, so the only quadrature error is the one in the
Simpson model of the zeta samples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import divisor as dv
from .errors import AccuracyError, DomainError
from .quadrature import Antiderivatives, PairGrid, interval_integral
from .zlb import read_zlb, write_zlb

TWO_PI = 2.0 * math.pi
R_SLOPE = 0.75 * math.pi
DEFAULT_QUADRATURE_TOL = 1e-4


def mean_square_main_term(T):
    """T(log(T/2pi) + 2*gamma - 1)."""
    arr = np.asarray(T, dtype=np.float64)
    if np.any(arr <= 0):
        raise DomainError("mean_square_main_term needs T > 0")
    out = arr * (np.log(arr / TWO_PI) + dv.MAIN_C)
    return float(out) if out.ndim == 0 else out


def _main(t):
    """Main term with the limit value 0 at t = 0."""
    t = np.asarray(t, dtype=np.float64)
    return TWO_PI * dv.main_term(t / TWO_PI)


def _main_integral(t):
    t = np.asarray(t, dtype=np.float64)
    return TWO_PI**2 * dv.main_term_integral(t / TWO_PI)


@dataclass
class ErrorTermGrid:
    t_values: np.ndarray
    zsq: np.ndarray
    cum1: np.ndarray
    cum2: np.ndarray
    E: np.ndarray
    Estar: np.ndarray | None = None
    #: left limits of E* (differs from Estar only at jump nodes t = n*pi/2)
    Estar_left: np.ndarray | None = None
    #: exact integral of 2pi*Delta*(u/2pi) over [0, t]
    dstar_int: np.ndarray | None = None
    R: np.ndarray | None = None
    E1: np.ndarray | None = None
    quadrature_tol: float = DEFAULT_QUADRATURE_TOL
    _pairs: PairGrid | None = field(default=None, repr=False)
    _anti: Antiderivatives | None = field(default=None, repr=False)

    @property
    def pairs(self):
        if self._pairs is None:
            self._pairs = PairGrid(self.t_values)
        return self._pairs

    @property
    def anti(self):
        if self._anti is None:
            self._anti = Antiderivatives(self.pairs, self.zsq)
        return self._anti

    @property
    def t_max(self):
        return float(self.t_values[-1])

    def index_of(self, t):
        i = int(np.searchsorted(self.t_values, t))
        if i >= self.t_values.size or self.t_values[i] != t:
            raise KeyError(f"t={t} is not a grid node")
        return i

    def _check(self, t, need):
        arr = np.asarray(t, dtype=np.float64)
        if np.any(arr < 0) or np.any(arr > self.t_max):
            raise DomainError(f"t outside grid range [0, {self.t_max}]")
        if need is not None and getattr(self, need) is None:
            raise DomainError(f"{need} has not been computed on this grid")
        return arr

    # evaluation at arbitrary t -------------------------------------------

    def E_at(self, t):
        arr = self._check(t, None)
        out = self.anti.first_at(arr) - _main(arr)
        return float(out) if out.ndim == 0 else out

    def _dstar_right(self, i):
        """2pi*Delta*(x0/2pi) (right limit) at the start node of pair i."""
        j = 2 * np.asarray(i)
        return self.E[j] - self.Estar[j]

    def Estar_at(self, t, side="right"):
        """E*(t); ``side='left'`` gives the left limit at jump nodes."""
        arr = self._check(t, "Estar")
        i, s = self.pairs.locate(arr)
        if side == "left":
            # a point sitting on a pair start belongs to the previous pair from the left
            on_start = (s == 0) & (i > 0)
            i = np.where(on_start, i - 1, i)
        x0 = self.pairs.x0[i]
        dstar = self._dstar_right(i) + _main(x0) - _main(arr)
        out = self.E_at(arr) - dstar
        return float(out) if np.ndim(out) == 0 else out

    def R_at(self, t):
        arr = self._check(t, "R")
        i, _ = self.pairs.locate(arr)
        x0 = self.pairs.x0[i]
        j = 2 * i
        # Delta* is main-term-smooth inside a pair: count part is constant
        count_part = self._dstar_right(i) + _main(x0)
        dstar_int = (self.dstar_int[j] + count_part * (arr - x0)
                     - (_main_integral(arr) - _main_integral(x0)))
        out = (self.anti.second_at(arr) - _main_integral(arr) - dstar_int
               - R_SLOPE * arr)
        return float(out) if np.ndim(out) == 0 else out

    def E1_at(self, t):
        arr = self._check(t, "E1")
        out = (self.anti.second_at(arr) - self.anti.second_at(2.0)
               - _main_integral(arr) + _main_integral(2.0))
        return float(out) if np.ndim(out) == 0 else out

    def field_at(self, name, t, side="right"):
        if name == "Estar":
            return self.Estar_at(t, side)
        if name == "R":
            return self.R_at(t)
        if name == "E":
            return self.E_at(t)
        if name == "E1":
            return self.E1_at(t)
        raise KeyError(name)

    def integral(self, name, a, b, power=1, absolute=True):
        """Integral of |field|^power (or field^power) over [a, b]."""
        values = getattr(self, name)
        left = self.Estar_left if name == "Estar" else None

        def g(v):
            v = np.abs(v) if absolute else v
            return v**power

        def at(x, side="right"):
            return float(g(self.field_at(name, x, side)))

        return interval_integral(self.pairs, g(values), a, b, at,
                                 None if left is None else g(left))


def compute_E_grid(zgrid, quadrature_tol=DEFAULT_QUADRATURE_TOL):
    """E(t_i) = integral of |zeta|^2 over [0, t_i] minus the main term."""
    pairs = PairGrid(zgrid.t_values)
    anti = Antiderivatives(pairs, zgrid.zsq_values)
    # trapezoid vs Simpson on the same nodes bounds the Simpson error from above
    z = zgrid.zsq_values
    trap = float(np.sum(0.5 * np.diff(zgrid.t_values) * (z[1:] + z[:-1])))
    simpson = float(anti.first[-1])
    drift = abs(trap - simpson) / max(abs(simpson), 1e-300)
    if drift > quadrature_tol:
        raise AccuracyError(
            f"grid too coarse: trapezoid/Simpson drift {drift:.3g} > {quadrature_tol}",
            achievable=drift)
    E = anti.first - _main(zgrid.t_values)
    E[0] = 0.0
    return ErrorTermGrid(
        t_values=zgrid.t_values, zsq=zgrid.zsq_values, cum1=anti.first,
        cum2=anti.second, E=E, quadrature_tol=quadrature_tol,
        _pairs=pairs, _anti=anti)


def _jump_index(t):
    """floor(4x) for x = t/2pi, robust at the breakpoints t = n*pi/2."""
    return np.floor(2.0 * t / math.pi + 1e-9).astype(np.int64)


def compute_Estar(grid, table):
    """E*(t_i) = E(t_i) - 2pi*Delta*(t_i/2pi), plus left limits at jumps."""
    t = grid.t_values
    need = int(math.ceil(4 * t[-1] / TWO_PI))
    if table.limit < need:
        raise DomainError(f"divisor table limit {table.limit} too small; need >= {need}")
    x = t / TWO_PI
    n4 = _jump_index(t)
    dstar = dv.delta_star_at_index(table, x, n4)
    grid.Estar = grid.E - TWO_PI * dstar
    grid.Estar[0] = 0.0
    # Delta* jumps up by (-1)^n d(n)/2 where 4x = n
    on_jump = np.abs(2.0 * t / math.pi - n4) < 1e-9
    on_jump[0] = False
    n = n4[on_jump]
    jump = 0.5 * np.where(n % 2 == 0, 1.0, -1.0) * table.counts[n]
    grid.Estar_left = grid.Estar.copy()
    grid.Estar_left[on_jump] += TWO_PI * jump
    grid.dstar_int = TWO_PI**2 * dv.delta_star_integral(table, x, n4)
    return grid


def compute_R_grid(grid):
    """R(t_i) = integral of E* over [0, t_i] minus 3pi t_i/4."""
    if grid.Estar is None:
        raise DomainError("compute_Estar must run before compute_R_grid")
    t = grid.t_values
    grid.R = grid.cum2 - _main_integral(t) - grid.dstar_int - R_SLOPE * t
    grid.R[0] = 0.0
    return grid


def compute_E1_grid(grid):
    """E_1(t_i) = integral of E over [2, t_i]."""
    i2 = grid.index_of(2.0)
    t = grid.t_values
    base = grid.cum2 - _main_integral(t)
    grid.E1 = base - base[i2]
    grid.E1[i2] = 0.0
    return grid


def build_error_terms(zgrid, table=None, quadrature_tol=DEFAULT_QUADRATURE_TOL):
    grid = compute_E_grid(zgrid, quadrature_tol)
    compute_E1_grid(grid)
    if table is not None:
        compute_Estar(grid, table)
        compute_R_grid(grid)
    return grid


_FIELDS = ("t_values", "zsq", "cum1", "cum2", "E", "Estar", "Estar_left",
           "dstar_int", "R", "E1")


def save_error_grid(path, grid, meta=None):
    arrays = {k: getattr(grid, k) for k in _FIELDS if getattr(grid, k) is not None}
    meta = dict(meta or {})
    meta.update(kind="error_term_grid", quadrature_tol=grid.quadrature_tol)
    write_zlb(path, arrays, meta)


def load_error_grid(path):
    arrays, meta = read_zlb(path)
    kw = {k: arrays.get(k) for k in _FIELDS}
    return ErrorTermGrid(quadrature_tol=meta.get("quadrature_tol", DEFAULT_QUADRATURE_TOL), **kw)


def export_csv(path, grid, stride=1):
    """CSV with header ``t,E,Estar,R,E1`` (missing fields left empty)."""
    cols = [grid.t_values, grid.E, grid.Estar, grid.R, grid.E1]
    idx = np.arange(0, grid.t_values.size, stride)
    with open(path, "w") as fh:
        fh.write("t,E,Estar,R,E1\n")
        for i in idx:
            fh.write(",".join("" if c is None else repr(float(c[i])) for c in cols) + "\n")
