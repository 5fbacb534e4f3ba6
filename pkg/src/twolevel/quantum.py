"""Schrodinger evolution of the two-component spinor.

With ``H(t) = -B(t).sigma / 2`` and the Z-drive layout B = (-2 eps, 0, -2 f),
each component separately obeys a second-order equation::

    psi1'' + ( i f' + f**2 + eps**2) psi1 = 0
    psi2'' + (-i f' + f**2 + eps**2) psi2 = 0

and the second component is recovered from the first as
``psi2 = (i psi1' - f psi1) / eps``.  The sign pairing (+ for psi1) follows
from eliminating psi2 from ``i psi1' = f psi1 + eps psi2``; the residual
tests in ``tests/test_quantum.py`` confirm it numerically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DegenerateCoupling
from .fields import FieldConfiguration, Layout
from .ode import DenseSolution, StepStats, check_tolerance, integrate

_FD_STEP = np.finfo(float).eps ** 0.2


@dataclass(frozen=True)
class Spinor:
    psi1: complex
    psi2: complex

    @classmethod
    def from_array(cls, arr) -> Spinor:
        a = np.asarray(arr, dtype=complex).reshape(2)
        return cls(complex(a[0]), complex(a[1]))

    def to_array(self) -> np.ndarray:
        return np.array([self.psi1, self.psi2], dtype=complex)

    @property
    def norm(self) -> float:
        return float(np.hypot(abs(self.psi1), abs(self.psi2)))

    def normalized(self) -> Spinor:
        n = self.norm
        return Spinor(self.psi1 / n, self.psi2 / n)


def as_spinor(psi) -> Spinor:
    return psi if isinstance(psi, Spinor) else Spinor.from_array(psi)


def hamiltonian_matrix(B: Sequence[float]) -> np.ndarray:
    """H = -(1/2) B.sigma as a 2x2 Hermitian, traceless matrix."""
    bx, by, bz = (float(b) for b in B)
    return -0.5 * np.array([[bz, bx - 1j * by], [bx + 1j * by, -bz]], dtype=complex)


def schrodinger_rhs(cfg: FieldConfiguration) -> Callable[[float, np.ndarray], np.ndarray]:
    def rhs(t, psi):
        bx, by, bz = cfg.field_at(t)
        p1, p2 = psi
        # -i H psi with H = -(1/2) B.sigma
        return 0.5j * np.array([bz * p1 + (bx - 1j * by) * p2, (bx + 1j * by) * p1 - bz * p2])

    return rhs


@dataclass(frozen=True, eq=False)
class SpinorTrajectory:
    """Sampled solution of the Schrodinger equation.

    ``times`` are ascending even for backward runs; ``t_start``/``t_end`` keep
    the direction of integration and ``final`` is the state at ``t_end``.
    """

    times: np.ndarray
    states: np.ndarray  # (n, 2) complex
    t_start: float
    t_end: float
    stats: StepStats
    dense: DenseSolution
    node_norm_drift: float

    @property
    def psi1(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def psi2(self) -> np.ndarray:
        return self.states[:, 1]

    @property
    def norms(self) -> np.ndarray:
        return np.sqrt(np.sum(np.abs(self.states) ** 2, axis=1))

    @property
    def norm_drift(self) -> float:
        """max | |psi| - 1 | over samples and accepted step ends."""
        return max(float(np.max(np.abs(self.norms - 1.0))), self.node_norm_drift)

    @property
    def final(self) -> Spinor:
        idx = -1 if self.t_end >= self.t_start else 0
        return Spinor.from_array(self.states[idx])

    def at(self, t) -> np.ndarray:
        """Dense-output state at time(s) ``t``; shape (2,) or (len(t), 2)."""
        y = self.dense(t)
        return y.T if np.ndim(t) else y


def sample_times(t0: float, t1: float, t_eval=None, n_samples: Optional[int] = None, nodes=None) -> np.ndarray:
    if t_eval is not None:
        ts = np.asarray(t_eval, dtype=float)
        lo, hi = min(t0, t1), max(t0, t1)
        if ts.size and (ts.min() < lo or ts.max() > hi):
            raise ValueError("t_eval lies outside the integration span")
    elif n_samples is not None:
        if n_samples < 2:
            raise ValueError("n_samples must be at least 2")
        ts = np.linspace(t0, t1, n_samples)
    else:
        ts = np.asarray(nodes, dtype=float)
    return np.sort(ts)


def sample_dense(result, ts: np.ndarray) -> np.ndarray:
    """Evaluate an integration result at ``ts`` using exact nodes at the endpoints."""
    out = result.dense(ts).T.copy() if ts.size else np.empty((0, result.y_final.size), result.y_final.dtype)
    t0, t1 = result.t_nodes[0], result.t_nodes[-1]
    out[ts == t1] = result.y_nodes[-1]
    out[ts == t0] = result.y_nodes[0]
    return out


def evolve_schrodinger(
    cfg: FieldConfiguration,
    psi0,
    t0: float,
    t1: float,
    tol: float = 1e-10,
    *,
    t_eval=None,
    n_samples: Optional[int] = None,
) -> SpinorTrajectory:
    """Integrate ``i dpsi/dt = H(t) psi`` from ``t0`` to ``t1`` (``t1 < t0`` allowed).

    Samples default to the accepted step ends.  No renormalisation is applied;
    ``norm_drift`` on the result reports how far the norm wandered.
    """
    check_tolerance(tol)
    y0 = as_spinor(psi0).to_array()
    result = integrate(schrodinger_rhs(cfg), t0, t1, y0, tol)
    ts = sample_times(t0, t1, t_eval, n_samples, result.t_nodes)
    states = sample_dense(result, ts)
    node_norms = np.sqrt(np.sum(np.abs(result.y_nodes) ** 2, axis=1))
    drift = float(np.max(np.abs(node_norms - np.linalg.norm(y0))))
    return SpinorTrajectory(ts, states, float(t0), float(t1), result.stats, result.dense, drift)


def restore_psi2(psi1: complex, dpsi1: complex, f_t: float, eps: float) -> complex:
    """psi2 = (i psi1' - f psi1) / eps for the Z-drive layout."""
    if eps == 0:
        raise DegenerateCoupling("psi2 cannot be restored from psi1 when epsilon = 0")
    return (1j * dpsi1 - f_t * psi1) / eps


def fd_second_derivative(fn: Callable[[float], complex], t: float, h: Optional[float] = None) -> complex:
    """Fourth-order central difference for fn''(t)."""
    if h is None:
        h = _FD_STEP * max(1.0, abs(t))
    f = [fn(t + k * h) for k in (-2, -1, 0, 1, 2)]
    return (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)


def second_order_residual(probe, cfg: FieldConfiguration, t: float, sign: int = 1) -> complex:
    """psi'' + (sign i f' + f**2 + eps**2) psi evaluated at ``t``.

    ``probe`` is either a plain callable ``t -> psi`` (second derivative by
    finite differences) or an object exposing ``derivatives(t)`` returning
    ``(psi, psi', psi'')``.
    """
    if cfg.layout is not Layout.Z_DRIVE:
        raise ValueError("the second-order reduction is written for the Z-drive layout")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    f = float(cfg.profile.value(t))
    fdot = float(cfg.profile.derivative(t))
    if hasattr(probe, "derivatives"):
        psi, _, psi_dd = probe.derivatives(t)
    else:
        psi = probe(t)
        psi_dd = fd_second_derivative(probe, t)
    return psi_dd + (sign * 1j * fdot + f * f + cfg.epsilon ** 2) * psi
