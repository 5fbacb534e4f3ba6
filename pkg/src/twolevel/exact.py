"""Closed-form solutions of the Z-drive two-level problem.

Three drives are solvable:

* constant f: plane waves with frequency omega = sqrt(eps**2 + f**2);
* f = f0 tanh(t/T) + f1: hypergeometric functions of z = (1 + tanh(t/T)) / 2;
* f = f0 / cosh(t/T): hypergeometric functions of z = 2 / (1 - i sinh(t/T)).

In both pulse cases the first spinor component is written as
``psi1 = c1 phi(mu) + c2 phi(-mu)`` with ``phi(m) = (1-z)^nu z^m 2F1(...; z)``
and (c1, c2) always refer to the t -> -inf basis.  The second component
follows from ``quantum.restore_psi2``.

Along the sech path z runs from 0 through z = 2 (on the cut of 2F1) back to
0 and winds once around z = 1, so arg(1 - z) is tracked continuously from 0
to 2 pi and 2F1 is continued across the cut.  The continuation is written as
``F_cont = k1 F(m) + k2 z^(-2m) F(-m)`` with the k's fixed by matching value
and slope at z = 2.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Literal, Union

import numpy as np

from .bloch import BlochState
from .errors import BranchTrackingFailure, DegenerateFrequency
from .fields import Constant, FieldConfiguration, Layout, Sech, Tanh
from .quantum import Spinor, restore_psi2
from .special import HypParams, gamma_ratio, hyp2f1, hyp2f1_derivative, hyp2f1_second_derivative

InState = Literal["lower", "upper"]
_LN4 = math.log(4.0)
# beyond this |t/T| the pulse variables under/overflow
_MAX_TAU = 300.0


# ---------------------------------------------------------------- constant


@dataclass(frozen=True)
class ConstantFieldSolution:
    """Plane-wave solution for constant eps and f; (c_p, c_q) are the amplitudes
    of the lower (-omega) and upper (+omega) eigenstates."""

    epsilon: float
    f: float
    c_p: complex = 1.0
    c_q: complex = 0.0

    def __post_init__(self):
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "f", float(self.f))
        object.__setattr__(self, "c_p", complex(self.c_p))
        object.__setattr__(self, "c_q", complex(self.c_q))

    @property
    def omega(self) -> float:
        return math.hypot(self.epsilon, self.f)

    @property
    def gamma(self) -> float:
        """Mixing angle: eps = omega sin 2gamma, f = omega cos 2gamma."""
        return 0.5 * math.atan2(self.epsilon, self.f)

    @property
    def phi0(self) -> float:
        """Half the phase of c_p c_q*; zero when either amplitude vanishes."""
        prod = self.c_p * self.c_q.conjugate()
        return 0.5 * cmath.phase(prod) if prod != 0 else 0.0

    @property
    def r2(self) -> float:
        return abs(self.c_p) ** 2 + abs(self.c_q) ** 2

    def field(self) -> FieldConfiguration:
        return FieldConfiguration(self.epsilon, Constant(self.f), Layout.Z_DRIVE)


def constant_solution(sol: ConstantFieldSolution, t: float) -> Spinor:
    g, w = sol.gamma, sol.omega
    up = cmath.exp(1j * w * t)
    down = cmath.exp(-1j * w * t)
    psi1 = sol.c_p * math.sin(g) * up + sol.c_q * math.cos(g) * down
    psi2 = -sol.c_p * math.cos(g) * up + sol.c_q * math.sin(g) * down
    return Spinor(psi1, psi2)


def constant_q_components(sol: ConstantFieldSolution, t: float) -> BlochState:
    """Q0..Q3 of the plane-wave solution in closed form.

    Q2 carries a minus sign relative to the cos/sin pattern of Q1 and Q3; with
    the plus sign the result disagrees with ``bloch_from_spinor``.
    """
    g = sol.gamma
    ap2, aq2 = abs(sol.c_p) ** 2, abs(sol.c_q) ** 2
    pq = abs(sol.c_p) * abs(sol.c_q)
    psi = sol.omega * t + sol.phi0
    diff = aq2 - ap2
    q1 = diff * math.sin(2 * g) - 2 * pq * math.cos(2 * g) * math.cos(2 * psi)
    q2 = -2 * pq * math.sin(2 * psi)
    q3 = diff * math.cos(2 * g) + 2 * pq * math.sin(2 * g) * math.cos(2 * psi)
    return BlochState(ap2 + aq2, np.array([q1, q2, q3]))


# ------------------------------------------------------------ shared pieces


def _ansatz(hp: HypParams, m: complex, nu: complex, z, w, ln_z, ln_w, zdot, zddot, order: int):
    """phi = (1-z)^nu z^m F(z) and its first two time derivatives.

    ``w`` is 1 - z; ``ln_z``/``ln_w`` fix the branches of the two powers.
    Returns (phi,) for order 0, else (phi, phi', phi'').
    """
    F = hyp2f1(hp, z, w)
    W = cmath.exp(nu * ln_w)
    zm = cmath.exp(m * ln_z)
    if order == 0:
        return (W * zm * F,)
    F1 = hyp2f1_derivative(hp, z, w)
    F2 = hyp2f1_second_derivative(hp, z, F, F1)
    G = zm * F
    Gz = zm * (m * F / z + F1)
    Gzz = zm * (m * (m - 1) * F / z ** 2 + 2 * m * F1 / z + F2)
    Wz = -nu * W / w
    Wzz = nu * (nu - 1) * W / w ** 2
    phi_z = Wz * G + W * Gz
    phi_zz = Wzz * G + 2 * Wz * Gz + W * Gzz
    return W * G, zdot * phi_z, zddot * phi_z + zdot ** 2 * phi_zz


def _check_tau(tau: float) -> None:
    if not abs(tau) <= _MAX_TAU:
        raise ValueError(f"|t/T| = {abs(tau):g} is outside the representable range (<= {_MAX_TAU:g})")


def _vectorized(fn, params, t):
    if np.ndim(t) == 0:
        return fn(params, float(t))
    return np.array([fn(params, float(x)) for x in np.ravel(t)], dtype=complex).reshape(np.shape(t))


@dataclass(frozen=True)
class ScatteringAmplitudes:
    """Coefficients of psi1 ~ a_plus e^{+i w tau} + a_minus e^{-i w tau} as t -> +inf.

    ``gamma_out`` is the mixing angle of the outgoing constant field, so the
    outgoing lower/upper amplitudes are a_plus / sin(gamma_out) and
    a_minus / cos(gamma_out).
    """

    a_plus: complex
    a_minus: complex
    omega_out: float  # dimensionless: frequency in units of 1/T
    gamma_out: float

    @property
    def lower_out(self) -> complex:
        return self.a_plus / math.sin(self.gamma_out)

    @property
    def upper_out(self) -> complex:
        return self.a_minus / math.cos(self.gamma_out)


def fit_exponentials(tau: np.ndarray, psi: np.ndarray, omega: float) -> tuple[complex, complex]:
    """Least-squares (A+, A-) in psi ~ A+ e^{i omega tau} + A- e^{-i omega tau}."""
    tau = np.asarray(tau, dtype=float)
    M = np.stack([np.exp(1j * omega * tau), np.exp(-1j * omega * tau)], axis=1)
    coef = np.linalg.lstsq(M, np.asarray(psi, dtype=complex), rcond=None)[0]
    return complex(coef[0]), complex(coef[1])


# -------------------------------------------------------------------- tanh


@dataclass(frozen=True)
class TanhSolutionParams:
    """Drive f = f0 tanh(t/T) + f1 with coupling eps; c1, c2 weight phi(+mu), phi(-mu)."""

    f0: float
    f1: float
    T: float
    epsilon: float
    c1: complex = 1.0
    c2: complex = 0.0

    def __post_init__(self):
        for name in ("f0", "f1", "T", "epsilon"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "c1", complex(self.c1))
        object.__setattr__(self, "c2", complex(self.c2))
        if not self.T > 0:
            raise ValueError("T must be positive")

    @classmethod
    def dimensionless(cls, a: float, b: float, E: float, T: float = 1.0, c1=1.0, c2=0.0) -> TanhSolutionParams:
        """Build from a = T f0, b = T f1, E = eps T."""
        return cls(a / T, b / T, T, E / T, c1, c2)

    @classmethod
    def from_field(cls, cfg: FieldConfiguration, c1=1.0, c2=0.0) -> TanhSolutionParams:
        if cfg.layout is not Layout.Z_DRIVE or not isinstance(cfg.profile, Tanh):
            raise TypeError("a Z-drive field with a Tanh profile is required")
        p = cfg.profile
        return cls(p.f0, p.f1, p.T, cfg.epsilon, c1, c2)

    def with_coefficients(self, c1, c2) -> TanhSolutionParams:
        return replace(self, c1=complex(c1), c2=complex(c2))

    @property
    def a(self) -> float:
        return self.T * self.f0

    @property
    def b(self) -> float:
        return self.T * self.f1

    @property
    def E(self) -> float:
        return self.epsilon * self.T

    @property
    def omega_minus(self) -> float:
        return math.hypot(self.E, self.b - self.a)

    @property
    def omega_plus(self) -> float:
        return math.hypot(self.E, self.a + self.b)

    @property
    def mu(self) -> complex:
        return 0.5j * self.omega_minus

    @property
    def nu(self) -> complex:
        return 0.5j * self.omega_plus

    @property
    def gamma_minus(self) -> float:
        return 0.5 * math.atan2(self.E, self.b - self.a)

    @property
    def gamma_plus(self) -> float:
        return 0.5 * math.atan2(self.E, self.a + self.b)

    def hyp_params(self, m: complex) -> HypParams:
        nu, a = self.nu, self.a
        return HypParams(m + nu + 1 + 1j * a, m + nu - 1j * a, 1 + 2 * m)

    def field(self) -> FieldConfiguration:
        return FieldConfiguration(self.epsilon, Tanh(self.f0, self.f1, self.T), Layout.Z_DRIVE)


def _tanh_terms(params: TanhSolutionParams, t: float, order: int):
    tau = t / params.T
    _check_tau(tau)
    # z = 1/(1+e^{-2tau}), 1-z = 1/(1+e^{2tau}) without cancellation
    ln_z = -float(np.logaddexp(0.0, -2.0 * tau))
    ln_w = -float(np.logaddexp(0.0, 2.0 * tau))
    z, w = math.exp(ln_z), math.exp(ln_w)
    k = 2.0 / params.T
    zdot = k * z * w
    zddot = k * k * z * w * (w - z)
    out = []
    for m, c in ((params.mu, params.c1), (-params.mu, params.c2)):
        if c == 0:
            continue
        terms = _ansatz(params.hyp_params(m), m, params.nu, complex(z), complex(w), ln_z, ln_w, zdot, zddot, order)
        out.append(tuple(c * x for x in terms))
    if not out:
        return (0j,) * (1 if order == 0 else 3)
    return tuple(sum(parts) for parts in zip(*out))


def tanh_solution(params: TanhSolutionParams, t):
    """psi1(t) = c1 phi(mu) + c2 phi(-mu); scalar or array ``t``."""
    return _vectorized(lambda p, x: _tanh_terms(p, x, 0)[0], params, t)


def tanh_derivatives(params: TanhSolutionParams, t: float) -> tuple[complex, complex, complex]:
    """(psi1, dpsi1/dt, d2psi1/dt2) at a scalar time."""
    return _tanh_terms(params, float(t), 2)


def tanh_match_initial(params: TanhSolutionParams, c_p: complex, c_q: complex) -> tuple[complex, complex]:
    """(c1, c2) reproducing the constant-field state (c_p, c_q) of the t -> -inf field."""
    if params.omega_minus == 0:
        raise DegenerateFrequency("omega_minus = 0 (E = 0 and a = b): the incoming mixing angle is undefined")
    g = params.gamma_minus
    return complex(c_p) * math.sin(g), complex(c_q) * math.cos(g)


def tanh_out_amplitudes(params: TanhSolutionParams) -> ScatteringAmplitudes:
    """Outgoing coefficients of e^{+-i omega_plus tau} from the z -> 1 connection.

    A+- = G(+-2nu) [ G(1+2mu) c1 / (G(1+mu+-nu+ia) G(mu+-nu-ia))
                   + G(1-2mu) c2 / (G(1-mu+-nu+ia) G(-mu+-nu-ia)) ]

    A Gamma pole in a denominator zeroes its term; every product is formed in
    log space.
    """
    mu, nu, a = params.mu, params.nu, params.a
    c1, c2 = params.c1, params.c2

    def amp(n: complex) -> complex:
        total = 0j
        if c1 != 0:
            total += c1 * gamma_ratio([2 * n, 1 + 2 * mu], [1 + mu + n + 1j * a, mu + n - 1j * a])
        if c2 != 0:
            total += c2 * gamma_ratio([2 * n, 1 - 2 * mu], [1 - mu + n + 1j * a, -mu + n - 1j * a])
        return total

    if params.omega_plus == 0:
        raise DegenerateFrequency("omega_plus = 0: the outgoing mixing angle is undefined")
    return ScatteringAmplitudes(amp(nu), amp(-nu), params.omega_plus, params.gamma_plus)


# -------------------------------------------------------------------- sech


@dataclass(frozen=True)
class SechSolutionParams:
    """Drive f = f0 / cosh(t/T) with coupling eps; mu = i eps T, nu = -f0 T / 2."""

    f0: float
    T: float
    epsilon: float
    c1: complex = 1.0
    c2: complex = 0.0

    def __post_init__(self):
        for name in ("f0", "T", "epsilon"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "c1", complex(self.c1))
        object.__setattr__(self, "c2", complex(self.c2))
        if not self.T > 0:
            raise ValueError("T must be positive")

    @classmethod
    def dimensionless(cls, F0: float, E: float, T: float = 1.0, c1=1.0, c2=0.0) -> SechSolutionParams:
        """Build from F0 = f0 T and E = eps T."""
        return cls(F0 / T, T, E / T, c1, c2)

    @classmethod
    def from_field(cls, cfg: FieldConfiguration, c1=1.0, c2=0.0) -> SechSolutionParams:
        if cfg.layout is not Layout.Z_DRIVE or not isinstance(cfg.profile, Sech):
            raise TypeError("a Z-drive field with a Sech profile is required")
        return cls(cfg.profile.f0, cfg.profile.T, cfg.epsilon, c1, c2)

    def with_coefficients(self, c1, c2) -> SechSolutionParams:
        return replace(self, c1=complex(c1), c2=complex(c2))

    @property
    def F0(self) -> float:
        return self.f0 * self.T

    @property
    def E(self) -> float:
        return self.epsilon * self.T

    @property
    def mu(self) -> complex:
        return 1j * self.E

    @property
    def nu(self) -> complex:
        return complex(-0.5 * self.F0)

    def hyp_params(self, m: complex) -> HypParams:
        return sech_hyp_params(m, self.nu)

    def chi1(self, t) -> complex:
        """Incoming exponent: psi1 ~ c1 e^{chi1} + c2 e^{-chi1} as t -> -inf."""
        E = self.E
        return 1j * self.epsilon * np.asarray(t) + 0.5 * math.pi * E + 1j * E * _LN4

    def chi2(self, t) -> complex:
        """Outgoing exponent: e^{-chi2} is the t -> +inf limit of z^mu."""
        E = self.E
        return 1j * self.epsilon * np.asarray(t) + 0.5 * math.pi * E - 1j * E * _LN4

    def field(self) -> FieldConfiguration:
        return FieldConfiguration(self.epsilon, Sech(self.f0, self.T), Layout.Z_DRIVE)


def sech_hyp_params(m: complex, nu: complex) -> HypParams:
    """(m, 1/2 + 2nu + m; 1 + 2m): the triple that makes phi(m) solve the sech equation."""
    return HypParams(m, 0.5 + 2 * nu + m, 1 + 2 * m)


def sech_branch_arg(t, T: float):
    """Continuous arg(1 - z) along the real t axis: pi + 2 atan(sinh(t/T)), in (0, 2 pi)."""
    return math.pi + 2.0 * np.arctan(np.sinh(np.asarray(t, dtype=float) / T))


def track_branch(t, T: float) -> np.ndarray:
    """Follow arg(1 - z(t)) over ascending sample times by unwrapping principal values.

    The first point is anchored to the closed form; afterwards only the
    principal arguments are used.  arg(1 - z) increases monotonically in t,
    so a wrapped step that comes out negative means the grid is too coarse
    (true step > pi) and BranchTrackingFailure is raised.
    """
    t = np.asarray(t, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("track_branch expects a non-empty 1-d array of times")
    if np.any(np.diff(t) < 0):
        raise ValueError("times must be ascending")
    s = np.sinh(t / T)
    w = (-1.0 - 1j * s) / (1.0 - 1j * s)
    principal = np.angle(w)
    steps = np.angle(np.exp(1j * np.diff(principal)))
    if np.any(steps < -1e-12):
        k = int(np.argmax(steps < -1e-12))
        raise BranchTrackingFailure(
            f"arg(1 - z) step between t={t[k]:.6g} and t={t[k + 1]:.6g} exceeds pi; refine the grid"
        )
    start = float(sech_branch_arg(t[0], T))
    return start + np.concatenate([[0.0], np.cumsum(np.maximum(steps, 0.0))])


@lru_cache(maxsize=256)
def _sech_monodromy(m: complex, nu: complex) -> tuple[complex, complex]:
    """(k1, k2) with F(2 - i0 continued upward) = k1 F(m) + k2 z^(-2m) F(-m) in Im z > 0."""
    hp = sech_hyp_params(m, nu)
    hq = sech_hyp_params(-m, nu)
    below = complex(2.0, -0.0)
    above = complex(2.0, 0.0)
    f_b = hyp2f1(hp, below)
    d_b = hyp2f1_derivative(hp, below)
    u1 = hyp2f1(hp, above)
    du1 = hyp2f1_derivative(hp, above)
    g = cmath.exp(-2 * m * math.log(2.0))
    v = hyp2f1(hq, above)
    dv = hyp2f1_derivative(hq, above)
    u2 = g * v
    du2 = g * (dv - m * v)  # d/dz z^(-2m) = -2m z^(-2m-1), at z = 2 that is -m 2^(-2m)
    det = u1 * du2 - u2 * du1
    k1 = (f_b * du2 - u2 * d_b) / det
    k2 = (u1 * d_b - f_b * du1) / det
    return k1, k2


def sech_transfer(params: SechSolutionParams) -> np.ndarray:
    """Matrix taking (c1, c2) to the weights of (phi_p(mu), phi_p(-mu)) for t > 0.

    phi_p denotes the ansatz built from principal-branch 2F1 values.
    """
    mu, nu = params.mu, params.nu
    k1p, k2p = _sech_monodromy(mu, nu)
    k1m, k2m = _sech_monodromy(-mu, nu)
    return np.array([[k1p, k2m], [k2p, k1m]], dtype=complex)


def _sech_geometry(params: SechSolutionParams, t: float, arg_w: float | None = None):
    T = params.T
    tau = t / T
    _check_tau(tau)
    s, ch = math.sinh(tau), math.cosh(tau)
    den = complex(1.0, -s)
    z = 2.0 / den
    w = complex(-1.0, -s) / den
    if arg_w is None:
        arg_w = float(sech_branch_arg(t, T))
    upper = arg_w > math.pi
    if z.imag == 0:
        z = complex(z.real, 0.0 if upper else -0.0)
    ln_z = complex(math.log(2.0) - math.log(math.hypot(1.0, s)), math.atan(s))
    ln_w = complex(0.0, arg_w)  # |1 - z| = 1 on the whole path
    zdot = 0.5j * ch / T * z * z
    zddot = 0.5j / T * (s / T * z * z + ch * 2.0 * z * zdot)
    return z, w, ln_z, ln_w, zdot, zddot, upper


def _sech_terms(params: SechSolutionParams, t: float, order: int, arg_w: float | None = None):
    z, w, ln_z, ln_w, zdot, zddot, upper = _sech_geometry(params, t, arg_w)
    mu, nu = params.mu, params.nu
    if upper:
        d = sech_transfer(params) @ np.array([params.c1, params.c2])
        weights = ((mu, d[0]), (-mu, d[1]))
    else:
        weights = ((mu, params.c1), (-mu, params.c2))
    out = []
    for m, c in weights:
        if c == 0:
            continue
        terms = _ansatz(params.hyp_params(m), m, nu, z, w, ln_z, ln_w, zdot, zddot, order)
        out.append(tuple(c * x for x in terms))
    if not out:
        return (0j,) * (1 if order == 0 else 3)
    return tuple(sum(parts) for parts in zip(*out))


def sech_solution(params: SechSolutionParams, t):
    """psi1(t) on the continuously tracked branch; scalar or ascending array ``t``.

    Arrays are evaluated with ``track_branch`` so that each point's sheet is
    inherited from its predecessor; a scalar uses the closed-form arg(1 - z).
    """
    if np.ndim(t) == 0:
        return _sech_terms(params, float(t), 0)[0]
    ts = np.ravel(np.asarray(t, dtype=float))
    args = track_branch(ts, params.T)
    vals = [_sech_terms(params, float(x), 0, float(a))[0] for x, a in zip(ts, args)]
    return np.array(vals, dtype=complex).reshape(np.shape(t))


def sech_derivatives(params: SechSolutionParams, t: float) -> tuple[complex, complex, complex]:
    return _sech_terms(params, float(t), 2)


def sech_match_initial(params: SechSolutionParams, c_p: complex, c_q: complex) -> tuple[complex, complex]:
    """(c1, c2) reproducing the f = 0 plane-wave state (c_p, c_q) at t -> -inf.

    With f -> 0 the mixing angle is pi/4 and e^{+-chi1} = e^{+-i eps t} e^{+-(pi E/2 + i E ln 4)}.
    """
    E = params.E
    k = complex(0.5 * math.pi * E, E * _LN4)
    s = math.sqrt(0.5)
    return complex(c_p) * s * cmath.exp(-k), complex(c_q) * s * cmath.exp(k)


@dataclass(frozen=True)
class SechAsymptotics:
    """Outgoing form psi1 ~ phase [d_plus e^{chi2} + d_minus e^{-chi2}] as t -> +inf.

    ``transfer`` maps (c1, c2) to (d_plus, d_minus).  ``exchange`` is the
    coefficient swap (c2, c1), the outgoing structure one would get if phi(mu)
    turned into e^{-chi2} and phi(-mu) into e^{chi2}; ``exchange_defect``
    measures how far the actual coefficients are from it.
    """

    phase: complex
    transfer: np.ndarray
    coefficients: tuple[complex, complex]
    exchange: tuple[complex, complex]
    params: SechSolutionParams

    def chi2(self, t):
        return self.params.chi2(t)

    @property
    def exchange_defect(self) -> float:
        return float(max(abs(a - b) for a, b in zip(self.coefficients, self.exchange)))

    def psi1(self, t):
        """The asymptotic outgoing psi1 at (large positive) t."""
        chi = self.chi2(t)
        dp, dm = self.coefficients
        return self.phase * (dp * np.exp(chi) + dm * np.exp(-chi))


def sech_out_asymptotics(params: SechSolutionParams) -> SechAsymptotics:
    """Outgoing asymptotics of the sech solution.

    For t -> +inf, (1 - z)^nu -> e^{2 pi i nu} = e^{-i pi F0} (the common phase),
    z^mu -> e^{-chi2}, z^-mu -> e^{chi2}, and 2F1 -> 1, so the continued
    solution's weights on phi_p(-mu) and phi_p(mu) are the coefficients of
    e^{chi2} and e^{-chi2}.
    """
    M = sech_transfer(params)
    d = M @ np.array([params.c1, params.c2])
    # rows of M give the weights of (phi_p(mu), phi_p(-mu)); reorder to (e^{chi2}, e^{-chi2})
    transfer = np.array([M[1], M[0]])
    phase = cmath.exp(-1j * math.pi * params.F0)
    return SechAsymptotics(phase, transfer, (complex(d[1]), complex(d[0])), (params.c2, params.c1), params)


def sech_out_amplitudes(params: SechSolutionParams) -> ScatteringAmplitudes:
    """Outgoing e^{+-i E tau} coefficients of the sech solution (outgoing field f = 0)."""
    asy = sech_out_asymptotics(params)
    E = params.E
    k = complex(0.5 * math.pi * E, -E * _LN4)  # chi2 = i E tau + k
    d_plus, d_minus = asy.coefficients
    return ScatteringAmplitudes(asy.phase * d_plus * cmath.exp(k), asy.phase * d_minus * cmath.exp(-k), abs(E), math.pi / 4)


# ------------------------------------------------------ probes and spinors


PulseParams = Union[TanhSolutionParams, SechSolutionParams]


class ClosedForm:
    """psi1 of a pulse solution as a probe for ``quantum.second_order_residual``,
    plus the restored second component."""

    def __init__(self, params: PulseParams):
        self.params = params
        self.config = params.field()

    def __call__(self, t):
        if isinstance(self.params, TanhSolutionParams):
            return tanh_solution(self.params, t)
        return sech_solution(self.params, t)

    def derivatives(self, t: float) -> tuple[complex, complex, complex]:
        if isinstance(self.params, TanhSolutionParams):
            return tanh_derivatives(self.params, t)
        return sech_derivatives(self.params, t)

    def spinor(self, t: float) -> Spinor:
        psi1, dpsi1, _ = self.derivatives(t)
        f = float(self.config.profile.value(t))
        return Spinor(psi1, restore_psi2(psi1, dpsi1, f, self.params.epsilon))


def match_pulse(params: PulseParams, c_p: complex, c_q: complex) -> PulseParams:
    """Copy of ``params`` with (c1, c2) chosen for the incoming state (c_p, c_q)."""
    if isinstance(params, TanhSolutionParams):
        return params.with_coefficients(*tanh_match_initial(params, c_p, c_q))
    return params.with_coefficients(*sech_match_initial(params, c_p, c_q))


def out_amplitudes(params: PulseParams) -> ScatteringAmplitudes:
    if isinstance(params, TanhSolutionParams):
        return tanh_out_amplitudes(params)
    return sech_out_amplitudes(params)


def scattering_probabilities(params: PulseParams, in_state: InState = "lower") -> tuple[float, float]:
    """(transition, survival) for an incoming constant-field eigenstate.

    The in-state is prepared in the t -> -inf basis, evolved through the
    pulse, and projected on the t -> +inf eigenstates.  With eps = 0 the
    Hamiltonian is diagonal and nothing can scatter.
    """
    if in_state not in ("lower", "upper"):
        raise ValueError("in_state must be 'lower' or 'upper'")
    if params.epsilon == 0:
        return 0.0, 1.0
    c_p, c_q = (1.0, 0.0) if in_state == "lower" else (0.0, 1.0)
    amps = out_amplitudes(match_pulse(params, c_p, c_q))
    lower = abs(amps.lower_out) ** 2
    upper = abs(amps.upper_out) ** 2
    return (upper, lower) if in_state == "lower" else (lower, upper)


def transition_probability(params: PulseParams, in_state: InState = "lower") -> float:
    return scattering_probabilities(params, in_state)[0]


def survival_probability(params: PulseParams, in_state: InState = "lower") -> float:
    return scattering_probabilities(params, in_state)[1]
