"""Complex log-Gamma and the Gauss hypergeometric function 2F1(a, b; c; z).

Evaluation strategy for ``hyp2f1``:

* ``|z| <= 0.5``: the defining power series.
* otherwise the cheapest of the z -> 1 - z connection (when c - a - b is not an
  integer) and the Pfaff transformation z -> z / (z - 1), if its series
  variable has modulus <= 0.7;
* anything left (the region around z = 2, logarithmic cases) is reached by
  analytic continuation: Taylor re-expansion of the hypergeometric equation
  along a path that stays inside the cut plane.

The same continuation routine, driven along a caller-supplied path, follows
2F1 onto other sheets; ``exact.sech_solution`` relies on it.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence, Union

import numpy as np

from .errors import GammaDegenerate, LogarithmicCase, NoConvergence, PoleAtNonpositiveInteger

MAX_TERMS = 100_000
_SERIES_EPS = 1e-17
_DIRECT_RADIUS = 0.5
_TRANSFORM_RADIUS = 0.7
_STEP_FRACTION = 0.5  # Taylor step / distance to nearest singular point
_INTEGER_TOL = 1e-10

# Lanczos approximation, g = 607/128, 15 terms
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_COEF = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)


def _is_nonpositive_integer(z: complex, tol: float = 0.0) -> bool:
    if abs(z.imag) > tol:
        return False
    r = round(z.real)
    return r <= 0 and abs(z.real - r) <= tol


def _lngamma_right(z: complex) -> complex:
    zm = z - 1.0
    acc = _LANCZOS_COEF[0]
    for k in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[k] / (zm + k)
    t = zm + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (zm + 0.5) * cmath.log(t) - t + cmath.log(acc)


def _log_sinpi(z: complex) -> complex:
    if abs(z.imag) < 300:
        return cmath.log(cmath.sin(math.pi * z))
    # sin(pi z) ~ exp(-+ i pi z) / (+-2i) for large |Im z|
    if z.imag > 0:
        return -1j * math.pi * z - cmath.log(-2j)
    return 1j * math.pi * z - cmath.log(2j)


def lngamma(z) -> complex:
    """Principal branch of log Gamma(z).

    Lanczos for Re z >= 1/2, reflection with the 2 pi i branch correction
    otherwise, so that lngamma(z + 1) = lngamma(z) + log(z) holds.
    """
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise PoleAtNonpositiveInteger(f"Gamma has a pole at z = {z}")
    if z.real >= 0.5:
        return _lngamma_right(z)
    if abs(z) < 1e-3:
        # sin(pi z) loses precision for tiny (even subnormal) z; step up instead
        return _lngamma_right(1.0 + z) - cmath.log(z)
    shift = math.copysign(2 * math.pi, z.imag) * math.floor(0.5 * z.real + 0.25)
    return complex(_LOG_PI, shift) - _log_sinpi(z) - _lngamma_right(1.0 - z)


def gamma(z) -> complex:
    return cmath.exp(lngamma(z))


def gamma_ratio(numerator: Iterable, denominator: Iterable) -> complex:
    """prod Gamma(numerator) / prod Gamma(denominator), assembled in log space.

    A pole in the denominator makes the ratio exactly zero; a pole in the
    numerator raises GammaDegenerate.
    """
    log_sum = 0.0j
    for x in numerator:
        x = complex(x)
        if _is_nonpositive_integer(x, 1e-14):
            raise GammaDegenerate(f"Gamma({x}) in a numerator is infinite")
        log_sum += lngamma(x)
    for x in denominator:
        x = complex(x)
        if _is_nonpositive_integer(x, 1e-14):
            return 0.0j
        log_sum -= lngamma(x)
    return cmath.exp(log_sum)


@dataclass(frozen=True)
class HypParams:
    alpha: complex
    beta: complex
    gamma: complex

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if _is_nonpositive_integer(self.gamma, 1e-12):
            raise GammaDegenerate(f"2F1 undefined for gamma = {self.gamma}")

    @property
    def excess(self) -> complex:
        """gamma - alpha - beta."""
        return self.gamma - self.alpha - self.beta

    def shifted(self) -> HypParams:
        """Parameters of the derivative: (alpha+1, beta+1; gamma+1)."""
        return HypParams(self.alpha + 1, self.beta + 1, self.gamma + 1)

    def as_tuple(self) -> tuple[complex, complex, complex]:
        return self.alpha, self.beta, self.gamma


ParamLike = Union[HypParams, Sequence[complex]]


def as_params(p: ParamLike) -> HypParams:
    return p if isinstance(p, HypParams) else HypParams(*p)


def _series(a: complex, b: complex, c: complex, z: complex) -> complex:
    """Defining power series; converges for |z| < 1."""
    term = 1.0 + 0.0j
    total = 1.0 + 0.0j
    small_run = 0
    for n in range(MAX_TERMS):
        ratio = (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        term *= ratio
        if term == 0:
            return total
        total += term
        if abs(term) <= _SERIES_EPS * abs(total) and abs(ratio) < 1:
            small_run += 1
            if small_run >= 2:
                return total
        else:
            small_run = 0
        if n > 200 and abs(ratio) > 1.0:
            raise NoConvergence(f"2F1 series diverges at z = {z}")
    raise NoConvergence(f"2F1 series did not converge in {MAX_TERMS} terms at z = {z}")


def _is_terminating(p: HypParams) -> bool:
    return _is_nonpositive_integer(p.alpha) or _is_nonpositive_integer(p.beta)


def _is_log_case(p: HypParams) -> bool:
    e = p.excess
    return abs(e.imag) <= _INTEGER_TOL and abs(e.real - round(e.real)) <= _INTEGER_TOL


class ConnectionTerms(NamedTuple):
    """2F1(z) = first + second with both pieces expanded around z = 1."""

    first: complex
    second: complex

    @property
    def total(self) -> complex:
        return self.first + self.second


def connect_z_to_1mz(params: ParamLike, z, one_minus_z=None) -> ConnectionTerms:
    """Two-term z -> 1 - z connection of 2F1.

    first  = G(c)G(c-a-b)/(G(c-a)G(c-b)) F(a, b; a+b-c+1; 1-z)
    second = (1-z)^(c-a-b) G(c)G(a+b-c)/(G(a)G(b)) F(c-a, c-b; c-a-b+1; 1-z)

    ``one_minus_z`` may carry 1 - z to full relative precision when z is
    close to 1.
    """
    p = as_params(params)
    if _is_log_case(p):
        raise LogarithmicCase(f"gamma - alpha - beta = {p.excess} is an integer")
    a, b, c = p.as_tuple()
    z = complex(z)
    w = 1.0 - z if one_minus_z is None else complex(one_minus_z)
    e = p.excess
    k1 = gamma_ratio([c, e], [c - a, c - b])
    k2 = gamma_ratio([c, -e], [a, b])
    first = k1 * _series(a, b, 1.0 - e, w) if k1 != 0 else 0.0j
    if k2 == 0:
        second = 0.0j
    else:
        second = k2 * cmath.exp(e * cmath.log(w)) * _series(c - a, c - b, 1.0 + e, w)
    return ConnectionTerms(first, second)


def gauss_sum(params: ParamLike) -> complex:
    """2F1(a, b; c; 1) = G(c)G(c-a-b) / (G(c-a)G(c-b)) for Re(c-a-b) > 0."""
    p = as_params(params)
    if p.excess.real <= 0:
        raise NoConvergence("2F1 at z = 1 diverges unless Re(c - a - b) > 0")
    return gamma_ratio([p.gamma, p.excess], [p.gamma - p.alpha, p.gamma - p.beta])


def _taylor_step(p: HypParams, z0: complex, h: complex, f0: complex, d0: complex) -> tuple[complex, complex]:
    """Advance (F, F') from z0 to z0 + h with the local Taylor series of the ODE."""
    a, b, c = p.as_tuple()
    A0 = z0 * (1.0 - z0)
    A1 = 1.0 - 2.0 * z0
    B0 = c - (a + b + 1.0) * z0
    B1 = -(a + b + 1.0)
    C0 = -a * b
    c_prev, c_cur = f0, d0  # a_n, a_{n+1}
    value = f0 + d0 * h
    deriv = d0
    hp = h  # h**(n+1)
    small_run = 0
    for n in range(MAX_TERMS):
        c_next = -((A1 * n + B0) * (n + 1) * c_cur + ((-1.0) * n * (n - 1) + B1 * n + C0) * c_prev) / (
            A0 * (n + 2) * (n + 1)
        )
        dterm = (n + 2) * c_next * hp
        hp = hp * h
        vterm = c_next * hp
        value += vterm
        deriv += dterm
        scale = max(abs(value), abs(deriv) * abs(h), 1e-300)
        if abs(vterm) <= _SERIES_EPS * scale and abs(dterm) * abs(h) <= _SERIES_EPS * scale:
            small_run += 1
            if small_run >= 3:
                return value, deriv
        else:
            small_run = 0
        c_prev, c_cur = c_cur, c_next
    raise NoConvergence("Taylor continuation step did not converge")


def continue_hyp2f1(
    params: ParamLike, path: Sequence[complex], value: complex, derivative: complex
) -> tuple[complex, complex]:
    """Analytically continue (F, F') of a solution of the hypergeometric equation.

    Starting from ``value``/``derivative`` at ``path[0]`` the solution is carried
    along the polygon ``path`` by Taylor re-expansion; each step is at most
    half the distance to the nearer singular point 0 or 1.  Returns (F, F') at
    ``path[-1]``.  The branch reached is the one the path actually winds onto.
    """
    p = as_params(params)
    f, d = complex(value), complex(derivative)
    z = complex(path[0])
    for target in path[1:]:
        target = complex(target)
        while z != target:
            radius = min(abs(z), abs(1.0 - z))
            if radius == 0:
                raise NoConvergence("continuation path runs through a singular point")
            h = target - z
            limit = _STEP_FRACTION * radius
            if abs(h) > limit:
                h = h * (limit / abs(h))
                nxt = z + h
            else:
                nxt = target
            f, d = _taylor_step(p, z, nxt - z, f, d)
            z = nxt
    return f, d


def _side(z: complex) -> float:
    return math.copysign(1.0, z.imag)


def _continued_principal(p: HypParams, z: complex) -> tuple[complex, complex]:
    # path 0 -> start -> waypoint -> z, kept in the half-plane of z so that the
    # cut [1, inf) is never crossed; a signed-zero imaginary part picks the side
    waypoint = complex(0.5, 0.8 * _side(z))
    start = 0.4 * waypoint / abs(waypoint)
    f0 = _series(*p.as_tuple(), start)
    a, b, c = p.as_tuple()
    d0 = a * b / c * _series(a + 1, b + 1, c + 1, start)
    return continue_hyp2f1(p, [start, waypoint, z], f0, d0)


def hyp2f1(params: ParamLike, z, one_minus_z=None) -> complex:
    """Principal branch of 2F1(alpha, beta; gamma; z).

    On the cut [1, inf) the sign of a (possibly signed-zero) imaginary part
    selects the side the value is taken from.  ``one_minus_z`` optionally
    supplies 1 - z without cancellation.
    """
    p = as_params(params)
    z = complex(z)
    w = 1.0 - z if one_minus_z is None else complex(one_minus_z)
    if z == 0:
        return 1.0 + 0.0j
    a, b, c = p.as_tuple()
    if _is_terminating(p):
        return _series(a, b, c, z)
    if z == 1:
        return gauss_sum(p)
    r0 = abs(z)
    if r0 <= _DIRECT_RADIUS:
        return _series(a, b, c, z)
    candidates = []
    if not _is_log_case(p):
        candidates.append((abs(w), "connection"))
    candidates.append((abs(z / w), "pfaff"))
    r, how = min(candidates)
    if r <= _TRANSFORM_RADIUS:
        if how == "connection":
            return connect_z_to_1mz(p, z, w).total
        # F(a,b;c;z) = (1-z)^(-a) F(a, c-b; c; z/(z-1))
        return cmath.exp(-a * cmath.log(w)) * _series(a, c - b, c, -z / w)
    if r0 < 1.0 and r0 <= r:
        return _series(a, b, c, z)
    return _continued_principal(p, z)[0]


def hyp2f1_derivative(params: ParamLike, z, one_minus_z=None) -> complex:
    """dF/dz = (alpha beta / gamma) 2F1(alpha+1, beta+1; gamma+1; z)."""
    p = as_params(params)
    if p.alpha == 0 or p.beta == 0:
        return 0.0j
    return p.alpha * p.beta / p.gamma * hyp2f1(p.shifted(), z, one_minus_z)


def hyp2f1_second_derivative(params: ParamLike, z, value: complex, derivative: complex) -> complex:
    """F'' from the hypergeometric equation given F and F' at z (z not 0 or 1)."""
    p = as_params(params)
    z = complex(z)
    a, b, c = p.as_tuple()
    return (a * b * value - (c - (a + b + 1.0) * z) * derivative) / (z * (1.0 - z))


def hypergeometric_residual(params: ParamLike, z) -> complex:
    """z(1-z)F'' + [c - (a+b+1)z]F' - abF with every derivative from contiguous relations."""
    p = as_params(params)
    z = complex(z)
    a, b, c = p.as_tuple()
    f = hyp2f1(p, z)
    d1 = hyp2f1_derivative(p, z)
    d2 = (a * b / c) * hyp2f1_derivative(p.shifted(), z)
    return z * (1.0 - z) * d2 + (c - (a + b + 1.0) * z) * d1 - a * b * f


def hyp2f1_array(params: ParamLike, zs) -> np.ndarray:
    p = as_params(params)
    return np.array([hyp2f1(p, z) for z in np.ravel(zs)], dtype=complex).reshape(np.shape(zs))
