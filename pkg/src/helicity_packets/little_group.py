"""Wigner phases of massless momentum-helicity states.

A Lorentz transformation ``Lam`` takes ``|p, sigma>`` to
``exp(-i sigma angle) |Lam p, sigma>``.  The angle is the SO(2) part of the
little-group element ``W = L(Lam p)^-1 Lam L(p)`` which fixes the standard
momentum k = (1, 0, 0, 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kinematics as kin
from .errors import ConsistencyError, ExcludedDirectionError, SingularityError

SINGULAR_TOL = 1e-14
STABILIZER_TOL = 1e-10


def wrap_angle(angle):
    """Reduce into (-pi, pi]."""
    out = math.pi - np.mod(math.pi - np.asarray(angle, dtype=float), kin.TWO_PI)
    if np.ndim(out) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class WignerPhase:
    angle: float
    helicity_sign: int = 1

    def __post_init__(self):
        if self.helicity_sign not in (1, -1):
            raise ValueError("helicity_sign must be +1 or -1")
        object.__setattr__(self, "angle", wrap_angle(self.angle))

    @property
    def factor(self) -> complex:
        return complex(np.exp(-1j * self.helicity_sign * self.angle))


def ry_terms(varpi, theta, phi):
    """Numerator and denominator of tan(angle) for a rotation about y."""
    sw = np.sin(varpi)
    num = sw * np.sin(phi)
    den = sw * np.cos(theta) * np.cos(phi) + np.cos(varpi) * np.sin(theta)
    return num, den


def wigner_angle_ry(varpi: float, theta: float, phi: float) -> float:
    """Closed-form Wigner angle for Ry(varpi) acting on direction (theta, phi).

    Evaluated as ``atan2(num, den)``, which is the branch that agrees with
    :func:`wigner_angle_numeric`.
    """
    num, den = ry_terms(varpi, theta, phi)
    if abs(den) < SINGULAR_TOL and abs(num) >= SINGULAR_TOL:
        raise SingularityError(
            f"Wigner angle singular at varpi={varpi}, theta={theta}, phi={phi}",
            params=(varpi, theta, phi),
        )
    return wrap_angle(math.atan2(num, den))


def wigner_angle_rz(lam: float, p: kin.FourMomentum) -> float:
    if p.is_standard():
        raise ExcludedDirectionError("Rz phase is not zero along the standard direction k")
    return 0.0


def wigner_angle_bz(eta: float, p: kin.FourMomentum) -> float:
    return 0.0


def little_group_elements(m: np.ndarray, theta, phi) -> np.ndarray:
    """Stack of W = L(Lam p)^-1 Lam L(p) for directions ``(theta, phi)``."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    t2, p2, doppler = kin.apply_many(kin.LorentzTransform(m, None), theta, phi)
    # L(Lam p) carries the Doppler factor so that W k = k exactly
    return kin.standard_transform_inverse(t2, p2, doppler) @ m @ kin.standard_transform(theta, phi)


def wigner_angles_numeric(lorentz: kin.LorentzTransform, theta, phi, check: bool = True):
    """Vectorized stabilizer extraction; returns angles in (-pi, pi]."""
    w = little_group_elements(lorentz.m, theta, phi)
    if check:
        drift = np.abs(w @ kin.STANDARD_MOMENTUM - kin.STANDARD_MOMENTUM)
        scale = np.maximum(1.0, np.max(np.abs(lorentz.m)))
        if np.any(drift > STABILIZER_TOL * scale):
            raise ConsistencyError(f"little-group element moved k by {float(np.max(drift)):.3g}")
    # transverse block of an E(2) element is a pure rotation
    return wrap_angle(np.arctan2(w[..., 2, 1], w[..., 1, 1]))


def wigner_angle_numeric(lorentz: kin.LorentzTransform, p: kin.FourMomentum) -> float:
    return float(wigner_angles_numeric(lorentz, p.theta, p.phi))


def wigner_phase(lorentz: kin.LorentzTransform, p: kin.FourMomentum, sigma: int) -> WignerPhase:
    return WignerPhase(wigner_angle_numeric(lorentz, p), sigma)


def angle_distance(a, b):
    """Distance between angles modulo 2*pi."""
    return np.abs(wrap_angle(np.asarray(a) - np.asarray(b)))
