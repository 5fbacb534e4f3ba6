"""Density matrix, Bloch vector and the precession equation dQ/dt = -Omega x Q.

The Pauli decomposition ``rho = (Q0 + Q.sigma) / 2`` of ``rho = |psi><psi|``
gives::

    Q0 = |psi1|^2 + |psi2|^2
    Q1 = psi1 psi2* + psi2 psi1*
    Q2 = i (psi1 psi2* - psi2 psi1*)        (= -2 Im(psi1 psi2*))
    Q3 = |psi1|^2 - |psi2|^2

so Q is the expectation value of sigma.  The equivalence tests between
Schrodinger and precession trajectories confirm this Q2 sign.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NotNormalized, NotPure
from .fields import FieldConfiguration
from .ode import DenseSolution, StepStats, check_tolerance, integrate
from .quantum import Spinor, as_spinor, sample_dense, sample_times


@dataclass(frozen=True, eq=False)
class BlochState:
    q0: float
    q: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float).reshape(3))

    @classmethod
    def pure(cls, q) -> BlochState:
        return cls(1.0, q)

    def purity_defect(self) -> float:
        return abs(float(self.q @ self.q) - self.q0 ** 2)


def _check_norm(psi: Spinor, tol: float) -> None:
    n2 = abs(psi.psi1) ** 2 + abs(psi.psi2) ** 2
    if abs(n2 - 1.0) > tol:
        raise NotNormalized(f"spinor norm^2 = {n2!r} deviates from 1 by more than {tol:g}")


def density_from_spinor(psi, tol: float = 1e-12) -> np.ndarray:
    psi = as_spinor(psi)
    _check_norm(psi, tol)
    v = psi.to_array()
    return np.outer(v, v.conj())


def bloch_vectors(states: np.ndarray) -> np.ndarray:
    """Vectorised Q for an (n, 2) array of spinors; no normalisation check."""
    states = np.asarray(states, dtype=complex)
    p1, p2 = states[..., 0], states[..., 1]
    cross = p1 * np.conj(p2)
    q1 = (cross + p2 * np.conj(p1)).real
    q2 = (1j * (cross - p2 * np.conj(p1))).real
    q3 = np.abs(p1) ** 2 - np.abs(p2) ** 2
    return np.stack([q1, q2, q3], axis=-1)


def bloch_from_spinor(psi, tol: float = 1e-12) -> BlochState:
    psi = as_spinor(psi)
    _check_norm(psi, tol)
    q0 = abs(psi.psi1) ** 2 + abs(psi.psi2) ** 2
    return BlochState(q0, bloch_vectors(psi.to_array()))


def spinor_from_bloch(state, tol: float = 1e-9) -> Spinor:
    """Spinor with psi1 real and non-negative mapping to the given pure Q.

    At the south pole Q = (0, 0, -1) the convention degenerates and (0, 1)
    is returned.
    """
    q = state.q if isinstance(state, BlochState) else np.asarray(state, dtype=float)
    norm2 = float(q @ q)
    if abs(norm2 - 1.0) > tol:
        raise NotPure(f"|Q|^2 = {norm2!r} is not 1 within {tol:g}")
    q1, q2, q3 = q
    q3 = min(1.0, max(-1.0, q3))
    if q3 == -1.0:
        return Spinor(0.0j, 1.0 + 0.0j)
    psi1 = np.sqrt((1.0 + q3) / 2.0)
    psi2 = np.sqrt((1.0 - q3) / 2.0) * np.exp(1j * np.arctan2(q2, q1))
    return Spinor(complex(psi1), complex(psi2))


def precession_rhs(field):
    """dQ/dt = -Omega x Q = Q x Omega for a field callable t -> Omega."""

    def rhs(t, q):
        wx, wy, wz = field(t)
        x, y, z = q
        return np.array([y * wz - z * wy, z * wx - x * wz, x * wy - y * wx])

    return rhs


@dataclass(frozen=True, eq=False)
class BlochTrajectory:
    times: np.ndarray
    q: np.ndarray  # (n, 3)
    q0: float
    t_start: float
    t_end: float
    stats: StepStats
    dense: DenseSolution

    @property
    def purity_drift(self) -> float:
        return float(np.max(np.abs(np.sum(self.q ** 2, axis=1) - 1.0)))

    def at(self, t) -> np.ndarray:
        y = self.dense(t)
        return y.T if np.ndim(t) else y


def evolve_bloch(
    cfg: FieldConfiguration,
    state,
    t0: float,
    t1: float,
    tol: float = 1e-10,
    *,
    t_eval=None,
    n_samples: Optional[int] = None,
) -> BlochTrajectory:
    """Integrate the precession equation; Q0 is carried along unchanged."""
    check_tolerance(tol)
    if not isinstance(state, BlochState):
        state = BlochState.pure(state)
    if state.purity_defect() > 1e-9:
        raise NotPure("evolve_bloch needs a pure state (|Q| = Q0 = 1)")
    result = integrate(precession_rhs(cfg.field_at), t0, t1, state.q, tol)
    ts = sample_times(t0, t1, t_eval, n_samples, result.t_nodes)
    return BlochTrajectory(ts, sample_dense(result, ts), state.q0, float(t0), float(t1), result.stats, result.dense)
