"""Drive profiles f(t) and the magnetic-field vector B(t) they produce.

Two field layouts are supported:

``Layout.Z_DRIVE``
    B = (-2 eps, 0, -2 f(t)), i.e. H = eps sigma_x + f(t) sigma_z.
``Layout.X_DRIVE``
    B = (2 f(t), 0, -2 eps), i.e. H = eps sigma_z - f(t) sigma_x.

Time is measured in units of 1/energy (hbar = 1).  Profiles are immutable
and every evaluation is a pure function of its arguments.

Quasi-periodic profiles are not checked for incommensurate frequencies;
that property cannot be decided in floating point.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Any, Mapping, Sequence, Union

import numpy as np

from .errors import ValidationError

ArrayLike = Union[float, np.ndarray]

# relative tolerance on the conjugate-symmetry constraint of Fourier data
_SYMMETRY_RTOL = 1e-12


class Layout(enum.Enum):
    Z_DRIVE = "z"
    X_DRIVE = "x"


@dataclass(frozen=True)
class Constant:
    f0: float

    kind = "constant"

    def value(self, t: ArrayLike) -> ArrayLike:
        return self.f0 + 0.0 * np.asarray(t, dtype=float) if np.ndim(t) else float(self.f0)

    def derivative(self, t: ArrayLike) -> ArrayLike:
        return 0.0 * np.asarray(t, dtype=float) if np.ndim(t) else 0.0

    def to_dict(self) -> dict:
        return {"kind": self.kind, "f0": self.f0}


@dataclass(frozen=True)
class Tanh:
    """f(t) = f0 tanh(t/T) + f1, with limits f1 -/+ f0 at t -> -/+ infinity."""

    f0: float
    f1: float
    T: float

    kind = "tanh"

    def __post_init__(self):
        if not self.T > 0:
            raise ValidationError(f"T must be positive, got {self.T!r}")

    def value(self, t: ArrayLike) -> ArrayLike:
        return self.f0 * np.tanh(np.asarray(t) / self.T) + self.f1

    def derivative(self, t: ArrayLike) -> ArrayLike:
        return (self.f0 / self.T) / np.cosh(np.asarray(t) / self.T) ** 2

    @property
    def f_minus(self) -> float:
        return self.f1 - self.f0

    @property
    def f_plus(self) -> float:
        return self.f1 + self.f0

    def to_dict(self) -> dict:
        return {"kind": self.kind, "f0": self.f0, "f1": self.f1, "T": self.T}


@dataclass(frozen=True)
class Sech:
    """f(t) = f0 / cosh(t/T)."""

    f0: float
    T: float

    kind = "sech"

    def __post_init__(self):
        if not self.T > 0:
            raise ValidationError(f"T must be positive, got {self.T!r}")

    def value(self, t: ArrayLike) -> ArrayLike:
        return self.f0 / np.cosh(np.asarray(t) / self.T)

    def derivative(self, t: ArrayLike) -> ArrayLike:
        tau = np.asarray(t) / self.T
        return -(self.f0 / self.T) * np.tanh(tau) / np.cosh(tau)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "f0": self.f0, "T": self.T}


def _check_conjugate_symmetry(coeffs: Mapping, negate) -> None:
    mass = sum(abs(c) for c in coeffs.values())
    for key, c in coeffs.items():
        partner = coeffs.get(negate(key), 0.0)
        if abs(partner - np.conj(c)) > _SYMMETRY_RTOL * max(mass, 1.0):
            raise ValidationError(
                f"Fourier coefficient {key} = {c} has no conjugate partner "
                f"(found {partner} at {negate(key)})"
            )


@dataclass(frozen=True)
class Periodic:
    """f(t) = sum_n c_n exp(i n omega t) with c_{-n} = conj(c_n).

    ``coefficients`` is a tuple of ``(n, c_n)`` pairs; absent harmonics are zero.
    """

    omega: float
    coefficients: tuple[tuple[int, complex], ...]

    kind = "periodic"

    def __post_init__(self):
        if not self.omega > 0:
            raise ValidationError(f"omega must be positive, got {self.omega!r}")
        table = {int(n): complex(c) for n, c in self.coefficients}
        if len(table) != len(self.coefficients):
            raise ValidationError("duplicate harmonic index in coefficients")
        _check_conjugate_symmetry(table, lambda n: -n)
        object.__setattr__(
            self, "coefficients", tuple(sorted(table.items()))
        )

    @classmethod
    def cosine(cls, omega: float, amplitude: float = 1.0, offset: float = 0.0) -> Periodic:
        """amplitude * cos(omega t) + offset."""
        coeffs = [(1, amplitude / 2), (-1, amplitude / 2)]
        if offset:
            coeffs.append((0, offset))
        return cls(omega, tuple(coeffs))

    @property
    def n_angles(self) -> int:
        return 1

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([self.omega])

    @property
    def coefficient_mass(self) -> float:
        return sum(abs(c) for _, c in self.coefficients)

    def angles(self, t: ArrayLike) -> np.ndarray:
        return np.array([self.omega * t])

    def _sum(self, theta, weight=None) -> ArrayLike:
        total = 0.0j
        for n, c in self.coefficients:
            term = c * np.exp(1j * n * theta)
            total = total + (term if weight is None else weight(n) * term)
        return total

    def value_at_angle(self, theta) -> float:
        # theta may be a scalar or a length-1 angle vector
        th = float(np.ravel(theta)[0])
        return sum((c * cmath.exp(1j * n * th)).real for n, c in self.coefficients)

    def angle_gradient(self, theta) -> np.ndarray:
        th = float(np.ravel(theta)[0])
        return np.array([sum((1j * n * c * cmath.exp(1j * n * th)).real for n, c in self.coefficients)])

    def complex_value(self, t: ArrayLike) -> ArrayLike:
        return self._sum(self.omega * np.asarray(t, dtype=float))

    def value(self, t: ArrayLike) -> ArrayLike:
        return np.real(self.complex_value(t))

    def derivative(self, t: ArrayLike) -> ArrayLike:
        theta = self.omega * np.asarray(t, dtype=float)
        return np.real(self._sum(theta, lambda n: 1j * n * self.omega))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "omega": self.omega,
            "coefficients": [[n, c.real, c.imag] for n, c in self.coefficients],
        }


@dataclass(frozen=True)
class QuasiPeriodic:
    """f(t) = sum c_{n1,n2} exp(i (n1 omega1 + n2 omega2) t), conjugate-symmetric."""

    omegas: tuple[float, float]
    coefficients: tuple[tuple[tuple[int, int], complex], ...]

    kind = "quasiperiodic"

    def __post_init__(self):
        omegas = tuple(float(w) for w in self.omegas)
        if len(omegas) != 2 or not all(w > 0 for w in omegas):
            raise ValidationError(f"need two positive frequencies, got {self.omegas!r}")
        table = {(int(k[0]), int(k[1])): complex(c) for k, c in self.coefficients}
        if len(table) != len(self.coefficients):
            raise ValidationError("duplicate harmonic index in coefficients")
        _check_conjugate_symmetry(table, lambda k: (-k[0], -k[1]))
        object.__setattr__(self, "omegas", omegas)
        object.__setattr__(self, "coefficients", tuple(sorted(table.items())))

    @property
    def n_angles(self) -> int:
        return 2

    @property
    def frequencies(self) -> np.ndarray:
        return np.array(self.omegas)

    @property
    def coefficient_mass(self) -> float:
        return sum(abs(c) for _, c in self.coefficients)

    def angles(self, t: ArrayLike) -> np.ndarray:
        return np.array([self.omegas[0] * t, self.omegas[1] * t])

    def _sum(self, th1, th2, weight=None) -> ArrayLike:
        total = 0.0j
        for (n1, n2), c in self.coefficients:
            term = c * np.exp(1j * (n1 * th1 + n2 * th2))
            if weight is not None:
                term = term * weight(n1, n2)
            total = total + term
        return total

    def value_at_angle(self, theta) -> float:
        th1, th2 = theta
        return float(np.real(self._sum(th1, th2)))

    def angle_gradient(self, theta) -> np.ndarray:
        th1, th2 = theta
        return np.array([
            np.real(self._sum(th1, th2, lambda n1, n2: 1j * n1)),
            np.real(self._sum(th1, th2, lambda n1, n2: 1j * n2)),
        ])

    def complex_value(self, t: ArrayLike) -> ArrayLike:
        t = np.asarray(t, dtype=float)
        return self._sum(self.omegas[0] * t, self.omegas[1] * t)

    def value(self, t: ArrayLike) -> ArrayLike:
        return np.real(self.complex_value(t))

    def derivative(self, t: ArrayLike) -> ArrayLike:
        t = np.asarray(t, dtype=float)
        w1, w2 = self.omegas
        return np.real(self._sum(w1 * t, w2 * t, lambda n1, n2: 1j * (n1 * w1 + n2 * w2)))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "omega": list(self.omegas),
            "coefficients": [[k[0], k[1], c.real, c.imag] for k, c in self.coefficients],
        }


DriveProfile = Union[Constant, Tanh, Sech, Periodic, QuasiPeriodic]
ANGULAR_PROFILES = (Periodic, QuasiPeriodic)


def drive_value(profile: DriveProfile, t: ArrayLike) -> ArrayLike:
    return profile.value(t)


@dataclass(frozen=True)
class FieldConfiguration:
    epsilon: float
    profile: DriveProfile
    layout: Layout = Layout.Z_DRIVE

    def field_basis(self) -> tuple[np.ndarray, np.ndarray]:
        """Vectors (b_eps, b_f) such that B = epsilon * b_eps + f * b_f."""
        if self.layout is Layout.Z_DRIVE:
            return np.array([-2.0, 0.0, 0.0]), np.array([0.0, 0.0, -2.0])
        return np.array([0.0, 0.0, -2.0]), np.array([2.0, 0.0, 0.0])

    def field_for_drive(self, f: float, epsilon: float | None = None) -> np.ndarray:
        eps = self.epsilon if epsilon is None else epsilon
        if self.layout is Layout.Z_DRIVE:
            return np.array([-2.0 * eps, 0.0, -2.0 * f])
        return np.array([2.0 * f, 0.0, -2.0 * eps])

    def field_at(self, t: float) -> np.ndarray:
        return self.field_for_drive(float(self.profile.value(t)))

    def to_dict(self) -> dict:
        return {"epsilon": self.epsilon, "layout": self.layout.value, "profile": self.profile.to_dict()}


def field_at(cfg: FieldConfiguration, t: float) -> np.ndarray:
    return cfg.field_at(t)


def omega_vector(cfg: FieldConfiguration, t: float) -> np.ndarray:
    """Precession vector of the Bloch equation; identical to B by convention."""
    return cfg.field_at(t)


def _coerce_float(doc: Mapping, key: str) -> float:
    try:
        value = doc[key]
    except KeyError:
        raise ValidationError(f"missing required key {key!r}") from None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"key {key!r} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ValidationError(f"key {key!r} must be finite")
    return float(value)


_PROFILE_KEYS = {
    "constant": {"kind", "f0"},
    "tanh": {"kind", "f0", "f1", "T"},
    "sech": {"kind", "f0", "T"},
    "periodic": {"kind", "omega", "coefficients"},
    "quasiperiodic": {"kind", "omega", "coefficients"},
}


def profile_from_dict(doc: Mapping[str, Any]) -> DriveProfile:
    """Build a profile from a configuration mapping (see the CLI documentation)."""
    kind = str(doc.get("kind", "")).lower()
    if kind not in _PROFILE_KEYS:
        raise ValidationError(f"unknown profile kind {doc.get('kind')!r}")
    unknown = set(doc) - _PROFILE_KEYS[kind]
    if unknown:
        raise ValidationError(f"unknown keys for {kind} profile: {sorted(unknown)}")
    if kind == "constant":
        return Constant(_coerce_float(doc, "f0"))
    if kind == "tanh":
        return Tanh(_coerce_float(doc, "f0"), _coerce_float(doc, "f1"), _coerce_float(doc, "T"))
    if kind == "sech":
        return Sech(_coerce_float(doc, "f0"), _coerce_float(doc, "T"))
    rows: Sequence = doc.get("coefficients") or []
    if kind == "periodic":
        try:
            coeffs = tuple((int(n), complex(re, im)) for n, re, im in rows)
        except (TypeError, ValueError):
            raise ValidationError("periodic coefficients must be rows [n, re, im]") from None
        return Periodic(_coerce_float(doc, "omega"), coeffs)
    omega = doc.get("omega")
    if not isinstance(omega, (list, tuple)) or len(omega) != 2:
        raise ValidationError("quasiperiodic omega must be a list of two frequencies")
    try:
        coeffs = tuple(((int(n1), int(n2)), complex(re, im)) for n1, n2, re, im in rows)
    except (TypeError, ValueError):
        raise ValidationError("quasiperiodic coefficients must be rows [n1, n2, re, im]") from None
    return QuasiPeriodic((float(omega[0]), float(omega[1])), coeffs)


def field_from_dict(doc: Mapping[str, Any]) -> FieldConfiguration:
    unknown = set(doc) - {"epsilon", "layout", "profile"}
    if unknown:
        raise ValidationError(f"unknown keys in field block: {sorted(unknown)}")
    layout = str(doc.get("layout", "z")).lower()
    try:
        layout_tag = Layout(layout)
    except ValueError:
        raise ValidationError(f"layout must be 'z' or 'x', got {layout!r}") from None
    if "profile" not in doc:
        raise ValidationError("field block needs a profile")
    return FieldConfiguration(_coerce_float(doc, "epsilon"), profile_from_dict(doc["profile"]), layout_tag)
