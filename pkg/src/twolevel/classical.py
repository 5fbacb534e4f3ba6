"""Classical spin dynamics in canonical chart coordinates.

The unit spin vector S is parametrized by two canonical charts:

``Chart.ONE``   q = azimuth, p = cos(polar):  S = (r cos q, r sin q, p),   r = sqrt(1 - p**2)
``Chart.TWO``   q = -cos(polar), p = azimuth: S = (r cos p, r sin p, -q),  r = sqrt(1 - q**2)

With H = -B(t).S both give dq/dt = dH/dp, dp/dt = -dH/dq, equivalent to
dS/dt = S x B, and {S_x, S_y} = S_z for {F, G} = F_q G_p - F_p G_q.

The charts are singular where r = 0.  ``hamilton_flow`` leaves the chart
when the compact coordinate gets within 1e-6 of +-1, integrates the spin
vector directly, and returns to the chart once it is back below 1 - 1e-4.

For periodic and quasi-periodic drives the Howland extension treats the
drive phases theta as coordinates with conjugate actions I:
K = H(q, p, theta) + omega . I, theta' = omega, I' = (dB/dtheta) . S.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import ProfileNotAngular
from .fields import ANGULAR_PROFILES, FieldConfiguration
from .ode import StepStats, check_tolerance, integrate

TWO_PI = 2.0 * math.pi
POLE_ENTER = 1.0 - 1e-6
POLE_EXIT = 1.0 - 1e-4
_R_FLOOR = 1e-30
_PB_STEP = np.finfo(float).eps ** (1.0 / 3.0)


class Chart(enum.Enum):
    ONE = 1
    TWO = 2


class CouplingSplit(enum.Enum):
    """Which term of H plays the perturbation in the Howland extension.

    STRONG: H0 = f(theta) (-b_f . S), V = -b_eps . S, coupling eps.
    WEAK:   H0 = eps (-b_eps . S),    V = f~(theta) (-b_f . S), coupling eps~ with f = eps~ f~.
    """

    STRONG = "strong"
    WEAK = "weak"


def _compact_index(chart: Chart) -> int:
    return 1 if chart is Chart.ONE else 0


@dataclass(frozen=True)
class ChartState:
    chart: Chart
    q: float
    p: float

    def __post_init__(self):
        q, p = float(self.q), float(self.p)
        if self.chart is Chart.ONE:
            q %= TWO_PI
            compact = p
        else:
            p %= TWO_PI
            compact = q
        if not abs(compact) <= 1.0 + 1e-12:
            raise ValueError(f"compact coordinate {compact!r} outside [-1, 1]")
        compact = min(1.0, max(-1.0, compact))
        if self.chart is Chart.ONE:
            p = compact
        else:
            q = compact
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def compact(self) -> float:
        return self.p if self.chart is Chart.ONE else self.q


@dataclass(frozen=True)
class ExtendedState:
    base: ChartState
    theta: tuple[float, ...]
    action: tuple[float, ...] = ()

    def __post_init__(self):
        theta = tuple(float(x) % TWO_PI for x in self.theta)
        action = tuple(float(x) for x in self.action) or (0.0,) * len(theta)
        if len(action) != len(theta):
            raise ValueError("theta and action must have the same length")
        if not all(math.isfinite(a) for a in action):
            raise ValueError("actions must be finite")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "action", action)


def spin_from_coords(chart: Chart, q, p) -> np.ndarray:
    """S for scalar or array coordinates; shape (3,) or (3, n)."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    if chart is Chart.ONE:
        r = np.sqrt(np.maximum(1.0 - p * p, 0.0))
        return np.array([r * np.cos(q), r * np.sin(q), p])
    r = np.sqrt(np.maximum(1.0 - q * q, 0.0))
    return np.array([r * np.cos(p), r * np.sin(p), -q])


def spin_from_chart(s: ChartState) -> np.ndarray:
    return spin_from_coords(s.chart, s.q, s.p)


def coords_from_spin(chart: Chart, S) -> tuple:
    """Chart coordinates of unit vector(s) S (shape (3,) or (3, n)); angles in [0, 2 pi)."""
    S = np.asarray(S, dtype=float)
    sz = np.clip(S[2], -1.0, 1.0)
    phi = np.mod(np.arctan2(S[1], S[0]), TWO_PI)
    if chart is Chart.ONE:
        return phi, sz
    return -sz, phi


def chart_from_spin(S, chart: Chart) -> ChartState:
    S = np.asarray(S, dtype=float)
    S = S / np.linalg.norm(S)
    q, p = coords_from_spin(chart, S)
    return ChartState(chart, float(q), float(p))


def spin_partials(chart: Chart, q: float, p: float) -> tuple[np.ndarray, np.ndarray]:
    """(dS/dq, dS/dp) at a regular point of the chart."""
    if chart is Chart.ONE:
        r = math.sqrt(max(1.0 - p * p, _R_FLOOR))
        c, s = math.cos(q), math.sin(q)
        return np.array([-r * s, r * c, 0.0]), np.array([-p / r * c, -p / r * s, 1.0])
    r = math.sqrt(max(1.0 - q * q, _R_FLOOR))
    c, s = math.cos(p), math.sin(p)
    return np.array([-q / r * c, -q / r * s, -1.0]), np.array([-r * s, r * c, 0.0])


def hamiltonian_value(s: ChartState, B: Sequence[float]) -> float:
    """H = -B . S."""
    return -float(np.dot(np.asarray(B, dtype=float), spin_from_chart(s)))


def poisson_bracket_numeric(fa: Callable, fb: Callable, s: ChartState, h: Optional[float] = None) -> float:
    """{fa, fb} = fa_q fb_p - fa_p fb_q by central differences; fa, fb take (q, p)."""
    if h is None:
        h = _PB_STEP
    q, p = s.q, s.p

    def grad(fn):
        dq = (fn(q + h, p) - fn(q - h, p)) / (2 * h)
        dp = (fn(q, p + h) - fn(q, p - h)) / (2 * h)
        return dq, dp

    aq, ap = grad(fa)
    bq, bp = grad(fb)
    return float(aq * bp - ap * bq)


def spin_component(chart: Chart, index: int) -> Callable[[float, float], float]:
    """S_index as a function of (q, p) in the given chart."""
    return lambda q, p: float(spin_from_coords(chart, q, p)[index])


# ----------------------------------------------------------- hybrid driver


@dataclass
class _Segment:
    on_pole: bool
    t_lo: float
    t_hi: float
    dense: Callable
    t_nodes: np.ndarray


class _HybridFlow:
    """Chart integration with a Bloch-vector fallback near the chart poles.

    ``field_fn(t, extra)`` gives B; ``extra_rhs(t, extra, S, B)`` the
    derivative of the extra state (drive angles and actions), or None.
    """

    def __init__(self, chart: Chart, field_fn, n_extra: int = 0, extra_rhs=None):
        self.chart = chart
        self.field_fn = field_fn
        self.n_extra = n_extra
        self.extra_rhs = extra_rhs
        self.ci = _compact_index(chart)

    def chart_rhs(self, t, y):
        q, p = float(y[0]), float(y[1])
        extra = y[2:]
        Sq, Sp = spin_partials(self.chart, q, p)
        B = self.field_fn(t, extra)
        dq = -float(B @ Sp)
        dp = float(B @ Sq)
        if self.n_extra:
            S = spin_from_coords(self.chart, q, p)
            return np.concatenate([(dq, dp), self.extra_rhs(t, extra, S, B)])
        return np.array([dq, dp])

    def pole_rhs(self, t, y):
        S = y[:3]
        extra = y[3:]
        B = self.field_fn(t, extra)
        head = np.cross(S, B)
        if self.n_extra:
            return np.concatenate([head, self.extra_rhs(t, extra, S, B)])
        return head

    def unpack(self, y, on_pole: bool):
        """(q, p, S, extra) from a mode-specific state vector or (n, k) stack."""
        y = np.asarray(y)
        if on_pole:
            S = y[..., :3]
            S = S / np.linalg.norm(S, axis=-1, keepdims=True)
            q, p = coords_from_spin(self.chart, np.moveaxis(S, -1, 0))
            return q, p, S, y[..., 3:]
        q, p = y[..., 0], y[..., 1]
        S = np.moveaxis(spin_from_coords(self.chart, q, p), 0, -1)
        if self.chart is Chart.ONE:
            q = np.mod(q, TWO_PI)
        else:
            p = np.mod(p, TWO_PI)
        return q, p, S, y[..., 2:]

    def run(self, q0, p0, extra0, t0, t1, tol, on_step=None):
        check_tolerance(tol)
        extra0 = np.asarray(extra0, dtype=float)
        compact0 = (q0, p0)[self.ci]
        on_pole = abs(compact0) >= POLE_ENTER
        if on_pole:
            y = np.concatenate([spin_from_coords(self.chart, q0, p0), extra0])
        else:
            y = np.concatenate([[q0, p0], extra0])
        t = float(t0)
        segments: list[_Segment] = []
        stats = StepStats(0, 0, 0.0)
        stop = [False]
        ci = self.ci

        while True:
            if on_pole:
                rhs = self.pole_rhs
                terminal = lambda tt, yy: abs(yy[2]) - POLE_EXIT * math.sqrt(yy[0] ** 2 + yy[1] ** 2 + yy[2] ** 2)
            else:
                rhs = self.chart_rhs
                terminal = lambda tt, yy: POLE_ENTER - abs(yy[ci])

            hook = None
            if on_step is not None:
                mode = on_pole

                def hook(ta, tb, interp, _mode=mode):
                    if on_step(ta, tb, lambda tt: self.unpack(interp(tt), _mode)):
                        stop[0] = True
                        return True
                    return False

            res = integrate(rhs, t, t1, y, tol, terminal=terminal, on_step=hook)
            stats = stats.merged(res.stats)
            lo, hi = sorted((res.t_nodes[0], res.t_final))
            segments.append(_Segment(on_pole, lo, hi, res.dense, res.t_nodes))
            t = res.t_final
            if stop[0] or not res.stopped_early or t == t1:
                break
            q, p, S, extra = self.unpack(res.y_final, on_pole)
            on_pole = not on_pole
            if on_pole:
                y = np.concatenate([S, extra])
            else:
                y = np.concatenate([[q, p], extra])
        return segments, stats, t

    def sample(self, segments: list[_Segment], ts: np.ndarray):
        n = ts.size
        q = np.empty(n)
        p = np.empty(n)
        S = np.empty((n, 3))
        extra = np.empty((n, self.n_extra))
        flag = np.zeros(n, dtype=bool)
        done = np.zeros(n, dtype=bool)
        for seg in segments:
            mask = (~done) & (ts >= seg.t_lo) & (ts <= seg.t_hi)
            if not mask.any():
                continue
            y = np.atleast_2d(seg.dense(ts[mask]).T)
            qq, pp, ss, ee = self.unpack(y, seg.on_pole)
            q[mask], p[mask], S[mask], extra[mask] = qq, pp, ss, ee
            flag[mask] = seg.on_pole
            done |= mask
        if not done.all():
            raise ValueError("sample times outside the integrated span")
        return q, p, S, extra, flag


def _sample_grid(segments, t0, t1, t_eval, n_samples) -> np.ndarray:
    if t_eval is not None:
        ts = np.asarray(t_eval, dtype=float)
    elif n_samples is not None:
        if n_samples < 2:
            raise ValueError("n_samples must be at least 2")
        ts = np.linspace(t0, t1, n_samples)
    else:
        ts = np.unique(np.concatenate([s.t_nodes for s in segments]))
    return np.sort(ts)


# ---------------------------------------------------------- chart flow


@dataclass(frozen=True, eq=False)
class ChartTrajectory:
    """Sampled classical trajectory; ``times`` ascending, ``on_pole`` marks
    samples produced while integrating the spin vector near a chart pole."""

    chart: Chart
    times: np.ndarray
    q: np.ndarray
    p: np.ndarray
    energy: np.ndarray
    spins: np.ndarray  # (n, 3)
    on_pole: np.ndarray
    stats: StepStats
    n_switches: int

    @property
    def crossed_pole(self) -> bool:
        return self.n_switches > 0


def hamilton_flow(
    cfg: FieldConfiguration,
    chart: Chart,
    s0: ChartState,
    t0: float,
    t1: float,
    tol: float = 1e-10,
    *,
    t_eval=None,
    n_samples: Optional[int] = None,
) -> ChartTrajectory:
    """Integrate Hamilton's equations of H = -B(t).S in ``chart``."""
    if s0.chart is not chart:
        s0 = chart_from_spin(spin_from_chart(s0), chart)
    flow = _HybridFlow(chart, lambda t, extra: cfg.field_at(t))
    segments, stats, _ = flow.run(s0.q, s0.p, (), t0, t1, tol)
    ts = _sample_grid(segments, t0, t1, t_eval, n_samples)
    q, p, S, _, flag = flow.sample(segments, ts)
    energy = np.array([-float(cfg.field_at(t) @ s) for t, s in zip(ts, S)])
    return ChartTrajectory(chart, ts, q, p, energy, S, flag, stats, len(segments) - 1)


# ------------------------------------------------------------- Howland


@dataclass(frozen=True)
class HowlandHamiltonian:
    """K(q, p, theta, I) = H0 + coupling * V, with omega . I inside H0.

    ``config.profile`` is the periodic drive; for the weak split it is f~
    and the physical drive is coupling * f~.  ``with_coupling`` varies the
    split's coupling without touching anything else.
    """

    config: FieldConfiguration
    chart: Chart
    split: CouplingSplit
    coupling: float

    @property
    def profile(self):
        return self.config.profile

    @property
    def omegas(self) -> np.ndarray:
        return self.profile.frequencies

    @property
    def n_angles(self) -> int:
        return self.profile.n_angles

    @property
    def epsilon(self) -> float:
        return self.coupling if self.split is CouplingSplit.STRONG else self.config.epsilon

    def drive(self, theta) -> float:
        f = self.profile.value_at_angle(theta)
        return self.coupling * f if self.split is CouplingSplit.WEAK else f

    def drive_gradient(self, theta) -> np.ndarray:
        g = self.profile.angle_gradient(theta)
        return self.coupling * g if self.split is CouplingSplit.WEAK else g

    def field_at_angle(self, theta) -> np.ndarray:
        b_eps, b_f = self.config.field_basis()
        return self.epsilon * b_eps + self.drive(theta) * b_f

    def physical_config(self) -> FieldConfiguration:
        """Non-autonomous configuration with the same B(t) for theta = omega t."""
        if self.split is CouplingSplit.STRONG:
            return replace(self.config, epsilon=self.coupling)
        if self.coupling == 1.0:
            return self.config
        return replace(self.config, profile=_scaled(self.profile, self.coupling))

    def with_coupling(self, coupling: float) -> HowlandHamiltonian:
        return replace(self, coupling=float(coupling))

    def _spin(self, s: ChartState) -> np.ndarray:
        if s.chart is not self.chart:
            raise ValueError("state is in the wrong chart")
        return spin_from_chart(s)

    def h0(self, s: ChartState, theta, action) -> float:
        S = self._spin(s)
        b_eps, b_f = self.config.field_basis()
        rot = float(np.dot(self.omegas, action))
        if self.split is CouplingSplit.STRONG:
            return self.profile.value_at_angle(theta) * float(-b_f @ S) + rot
        return self.config.epsilon * float(-b_eps @ S) + rot

    def v(self, s: ChartState, theta) -> float:
        S = self._spin(s)
        b_eps, b_f = self.config.field_basis()
        if self.split is CouplingSplit.STRONG:
            return float(-b_eps @ S)
        return self.profile.value_at_angle(theta) * float(-b_f @ S)

    def k(self, s: ChartState, theta, action) -> float:
        return self.h0(s, theta, action) + self.coupling * self.v(s, theta)

    def k_from_spin(self, S, theta, action) -> float:
        return -float(self.field_at_angle(theta) @ S) + float(np.dot(self.omegas, action))


def _scaled(profile, factor: float):
    coeffs = tuple((n, factor * c) for n, c in profile.coefficients)
    return replace(profile, coefficients=coeffs)


def extend_howland(
    cfg: FieldConfiguration,
    chart: Chart,
    split: CouplingSplit = CouplingSplit.STRONG,
    coupling: Optional[float] = None,
) -> HowlandHamiltonian:
    """Autonomous descriptor for a periodic or quasi-periodic drive.

    ``coupling`` defaults to cfg.epsilon for the strong split and to 1 (f~ = f)
    for the weak split.
    """
    if not isinstance(cfg.profile, ANGULAR_PROFILES):
        raise ProfileNotAngular(f"{type(cfg.profile).__name__} drive has no angle variables")
    split = CouplingSplit(split)
    if coupling is None:
        coupling = cfg.epsilon if split is CouplingSplit.STRONG else 1.0
    return HowlandHamiltonian(cfg, chart, split, float(coupling))


@dataclass(frozen=True, eq=False)
class ExtendedTrajectory:
    times: np.ndarray
    q: np.ndarray
    p: np.ndarray
    theta: np.ndarray  # (n, k), unwrapped
    action: np.ndarray  # (n, k)
    spins: np.ndarray
    k_value: np.ndarray
    on_pole: np.ndarray
    stats: StepStats


def _extended_driver(desc: HowlandHamiltonian) -> _HybridFlow:
    k = desc.n_angles
    omegas = desc.omegas.astype(float)
    b_eps, b_f = desc.config.field_basis()
    static = desc.epsilon * b_eps

    def field_fn(t, extra):
        return static + desc.drive(extra[:k]) * b_f

    def extra_rhs(t, extra, S, B):
        # dI/dt = -dK/dtheta = (dB/dtheta) . S
        return np.concatenate([omegas, desc.drive_gradient(extra[:k]) * float(b_f @ S)])

    return _HybridFlow(desc.chart, field_fn, 2 * k, extra_rhs)


def extended_flow(
    desc: HowlandHamiltonian,
    s0: ExtendedState,
    duration: float,
    tol: float = 1e-10,
    *,
    t_eval=None,
    n_samples: Optional[int] = None,
) -> ExtendedTrajectory:
    """Integrate the autonomous flow of K for ``duration`` (time origin 0)."""
    flow = _extended_driver(desc)
    base = s0.base if s0.base.chart is desc.chart else chart_from_spin(spin_from_chart(s0.base), desc.chart)
    extra0 = np.concatenate([s0.theta, s0.action])
    segments, stats, _ = flow.run(base.q, base.p, extra0, 0.0, duration, tol)
    ts = _sample_grid(segments, 0.0, duration, t_eval, n_samples)
    q, p, S, extra, flag = flow.sample(segments, ts)
    k = desc.n_angles
    theta, action = extra[:, :k], extra[:, k:]
    kv = np.array([desc.k_from_spin(s, th, a) for s, th, a in zip(S, theta, action)])
    return ExtendedTrajectory(ts, q, p, theta, action, S, kv, flag, stats)


@dataclass(frozen=True)
class SectionPoint:
    q: float
    p: float
    theta2: float  # second drive angle mod 2 pi; NaN for a single-frequency drive
    crossing_index: int
    time: float


def poincare_section(
    desc: HowlandHamiltonian,
    s0: ExtendedState,
    n_crossings: int,
    section_angle_index: int = 0,
    tol: float = 1e-10,
) -> list[SectionPoint]:
    """Strobe the extended flow where theta[section_angle_index] passes 0 mod 2 pi.

    Crossings strictly after the start are recorded; each crossing time is
    located on the step interpolant to 1e-12.
    """
    if n_crossings < 1:
        raise ValueError("n_crossings must be at least 1")
    k = desc.n_angles
    if not 0 <= section_angle_index < k:
        raise ValueError(f"section_angle_index must be in [0, {k})")
    omega = float(desc.omegas[section_angle_index])
    flow = _extended_driver(desc)
    base = s0.base if s0.base.chart is desc.chart else chart_from_spin(spin_from_chart(s0.base), desc.chart)
    extra0 = np.concatenate([s0.theta, s0.action])
    theta_start = s0.theta[section_angle_index]
    other = [i for i in range(k) if i != section_angle_index]
    points: list[SectionPoint] = []

    def on_step(ta, tb, state_at):
        th_a = state_at(ta)[3][section_angle_index]
        th_b = state_at(tb)[3][section_angle_index]
        n_a = math.floor(th_a / TWO_PI)
        n_b = math.floor(th_b / TWO_PI)
        for n in range(n_a + 1, n_b + 1):
            target = n * TWO_PI
            tc = brentq(lambda tt: state_at(tt)[3][section_angle_index] - target, ta, tb, xtol=1e-12, rtol=4 * np.finfo(float).eps)
            q, p, _, extra = state_at(tc)
            th2 = float(np.mod(extra[other[0]], TWO_PI)) if other else math.nan
            points.append(SectionPoint(float(q), float(p), th2, len(points), float(tc)))
            if len(points) >= n_crossings:
                return True
        return False

    # a little more than enough time; on_step stops the run at the last crossing
    duration = (n_crossings + 1) * TWO_PI / omega + (TWO_PI - theta_start) / omega
    flow.run(base.q, base.p, extra0, 0.0, duration, tol, on_step=on_step)
    return points[:n_crossings]


def section_spread(points: Sequence[SectionPoint]) -> float:
    """max q - min q over the section."""
    qs = [pt.q for pt in points]
    return max(qs) - min(qs)
