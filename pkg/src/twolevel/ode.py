"""Adaptive Dormand-Prince 5(4) driver with dense output.

The stepping itself is scipy's ``RK45``; this module adds what the rest of
the package needs on top of it:

* backward integration done as forward integration of the time-reflected
  system ``dy/ds = -F(-s, y)`` with ``s = -t``,
* accepted-step statistics including the largest scaled local error estimate,
* terminal events located on the dense output (chart switching),
* a per-step hook that sees each step's interpolant (section crossings).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import RK45, OdeSolution
from scipy.optimize import brentq

from .errors import StepFailure

MIN_TOL = 1e-14
MAX_TOL = 1e-3
# RK45 refuses rtol below 100 machine epsilons
_RTOL_FLOOR = 100 * np.finfo(float).eps


def check_tolerance(tol: float) -> float:
    if not (MIN_TOL < tol < MAX_TOL):
        raise ValueError(f"tolerance must lie in ({MIN_TOL:g}, {MAX_TOL:g}), got {tol!r}")
    return float(tol)


@dataclass(frozen=True)
class StepStats:
    n_steps: int
    n_rhs: int
    max_error: float  # largest scaled error norm over accepted steps (< 1 by construction)

    def merged(self, other: StepStats) -> StepStats:
        return StepStats(
            self.n_steps + other.n_steps,
            self.n_rhs + other.n_rhs,
            max(self.max_error, other.max_error),
        )


class DenseSolution:
    """Continuous solution y(t) in physical time, built from per-step interpolants."""

    def __init__(self, s_nodes, interpolants, reflected: bool):
        self._sol = OdeSolution(np.asarray(s_nodes), interpolants)
        self.reflected = reflected
        ends = (s_nodes[0], s_nodes[-1])
        if reflected:
            ends = (-ends[0], -ends[1])
        self.t_min, self.t_max = min(ends), max(ends)

    def __call__(self, t):
        s = -np.asarray(t, dtype=float) if self.reflected else np.asarray(t, dtype=float)
        return self._sol(s)


@dataclass
class Integration:
    t_nodes: np.ndarray  # accepted step ends, in integration order
    y_nodes: np.ndarray  # shape (n_nodes, n)
    dense: DenseSolution
    stats: StepStats
    stopped_early: bool

    @property
    def t_final(self) -> float:
        return float(self.t_nodes[-1])

    @property
    def y_final(self) -> np.ndarray:
        return self.y_nodes[-1]


def _scaled_error_norm(solver: RK45, y_old: np.ndarray) -> float:
    # same norm RK45 uses internally, rebuilt from the accepted step's stages
    err = solver.h_previous * (solver.K.T @ solver.E)
    scale = solver.atol + solver.rtol * np.maximum(np.abs(y_old), np.abs(solver.y))
    return float(np.linalg.norm(err / scale) / math.sqrt(err.size))


def integrate(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    t0: float,
    t1: float,
    y0,
    tol: float,
    *,
    terminal: Optional[Callable[[float, np.ndarray], float]] = None,
    on_step: Optional[Callable[[float, float, Callable], bool]] = None,
    max_step: float = np.inf,
) -> Integration:
    """Integrate ``dy/dt = rhs(t, y)`` from ``t0`` to ``t1`` (either direction).

    ``terminal(t, y)`` stops the run where it changes sign; the root is located
    on the dense output.  ``on_step(t_a, t_b, interp)`` is called after every
    accepted step with physical end times and an interpolant in physical time;
    returning True stops the run at ``t_b``.
    """
    y0 = np.asarray(y0)
    if not np.issubdtype(y0.dtype, np.complexfloating):
        y0 = y0.astype(float)
    t0 = float(t0)
    t1 = float(t1)
    reflected = t1 < t0
    if reflected:
        def fun(s, y):
            return -rhs(-s, y)
        s0, s1 = -t0, -t1
    else:
        fun = rhs
        s0, s1 = t0, t1

    def phys(s):
        return -s if reflected else s

    rtol = max(tol, _RTOL_FLOOR)
    atol = tol
    s_nodes = [s0]
    y_nodes = [y0.copy()]
    interps = []
    max_err = 0.0
    stopped = False
    g_prev = terminal(t0, y0) if terminal is not None else None

    if s1 == s0:
        # zero-length span: a single degenerate node
        dense = _ConstantDense(t0, y0)
        return Integration(np.array([t0]), y0[None, :], dense, StepStats(0, 0, 0.0), False)

    solver = RK45(fun, s0, y0, s1, rtol=rtol, atol=atol, max_step=max_step)
    while solver.status == "running":
        y_old = solver.y.copy()
        s_old = solver.t
        message = solver.step()
        if solver.status == "failed":
            raise StepFailure(f"step control failed at t={phys(s_old):.17g}: {message}")
        max_err = max(max_err, _scaled_error_norm(solver, y_old))
        interp = solver.dense_output()
        s_new = solver.t
        y_new = solver.y.copy()

        if terminal is not None:
            g_new = terminal(phys(s_new), y_new)
            if g_prev != 0 and np.sign(g_new) != np.sign(g_prev):
                s_root = brentq(
                    lambda s: terminal(phys(s), interp(s)), s_old, s_new, xtol=1e-15, rtol=4 * np.finfo(float).eps
                )
                s_new = s_root
                y_new = interp(s_root)
                stopped = True
            g_prev = g_new

        s_nodes.append(s_new)
        y_nodes.append(y_new)
        interps.append(interp)
        if stopped:
            break
        if on_step is not None:
            def interp_phys(t, _interp=interp):
                return _interp(-np.asarray(t) if reflected else np.asarray(t))
            if on_step(phys(s_old), phys(s_new), interp_phys):
                stopped = True
                break

    dense = DenseSolution(s_nodes, interps, reflected)
    stats = StepStats(len(interps), solver.nfev, max_err)
    t_nodes = np.array([phys(s) for s in s_nodes])
    return Integration(t_nodes, np.array(y_nodes), dense, stats, stopped)


class _ConstantDense:
    def __init__(self, t, y):
        self.t_min = self.t_max = t
        self._y = np.asarray(y)
        self.reflected = False

    def __call__(self, t):
        t = np.asarray(t)
        if t.ndim == 0:
            return self._y.copy()
        return np.repeat(self._y[:, None], t.size, axis=1)
