"""Helicity triads and the transverse (Peres-Terno) projection.

Polarization vectors are kept in the helicity basis of the standard
momentum: ``|+>_k = (1, 0, 0)``, ``|->_k = (0, 1, 0)``, third slot
longitudinal.  The fixed analyzer along z drops the third slot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kinematics as kin
from .errors import DomainError

SQRT2 = math.sqrt(2.0)
DEGENERATE_TOL = 1e-14


def s_matrix() -> np.ndarray:
    """Unitary taking linear-polarization components (x, y, z) to helicity components."""
    return np.array([[1.0, -1j, 0.0], [1.0, 1j, 0.0], [0.0, 0.0, SQRT2]]) / SQRT2


def s_inverse() -> np.ndarray:
    return s_matrix().conj().T


def helicity_rotation(theta: float, phi: float) -> np.ndarray:
    """Rotation Rz(phi) Ry(theta) written in the helicity basis."""
    c, s = math.cos(theta), math.sin(theta)
    em, ep = np.exp(-1j * phi), np.exp(1j * phi)
    return 0.5 * np.array(
        [
            [(c + 1) * em, (c - 1) * em, SQRT2 * s * em],
            [(c - 1) * ep, (c + 1) * ep, SQRT2 * s * ep],
            [-SQRT2 * s, -SQRT2 * s, 2 * c],
        ]
    )


def triad_components(theta, phi, sigma) -> np.ndarray:
    """Helicity-basis components of ``|p, sigma>``; broadcasts, shape ``(..., 3)``."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    sigma = np.asarray(sigma)
    c = np.cos(theta)
    em, ep = np.exp(-1j * phi), np.exp(1j * phi)
    first = np.where(sigma > 0, c + 1, c - 1) * em
    second = np.where(sigma > 0, c - 1, c + 1) * ep
    third = -SQRT2 * np.sin(theta) + 0j * (first + second)
    return 0.5 * np.stack(np.broadcast_arrays(first, second, third), axis=-1)


def _check_sigma(sigma: int) -> int:
    if sigma not in (1, -1):
        raise DomainError(f"helicity must be +1 or -1, got {sigma!r}")
    return sigma


@dataclass(frozen=True, eq=False)
class HelicityTriad:
    v: np.ndarray
    p: kin.FourMomentum
    sigma: int


@dataclass(frozen=True, eq=False)
class FlooredKet:
    """Normalized transverse part of a triad.

    ``weight`` is the squared norm that survived the projection.
    """

    v: np.ndarray
    p: kin.FourMomentum
    sigma: int
    weight: float


@dataclass(frozen=True, eq=False)
class PolarizationFourVector:
    eps: np.ndarray
    p: kin.FourMomentum


def triad(p: kin.FourMomentum, sigma: int) -> HelicityTriad:
    sigma = _check_sigma(sigma)
    return HelicityTriad(triad_components(p.theta, p.phi, sigma), p, sigma)


def to_linear(v: np.ndarray) -> np.ndarray:
    """Helicity-basis components -> Cartesian (x, y, z) components."""
    return np.asarray(v) @ s_inverse().T


def transverse_projector(p: kin.FourMomentum) -> np.ndarray:
    n = p.direction
    return np.eye(3) - np.outer(n, n) / float(n @ n)


def floor(t: HelicityTriad) -> FlooredKet:
    head = t.v[:2]
    weight = float(np.vdot(head, head).real)
    if weight < DEGENERATE_TOL:
        raise DomainError("transverse part of the triad vanishes")
    return FlooredKet(head / math.sqrt(weight), t.p, t.sigma, weight)


def detection_weight(theta) -> np.ndarray:
    """Squared transverse norm (1 + cos^2 theta) / 2 of either triad."""
    return 0.5 * (1.0 + np.cos(theta) ** 2)


def floored_overlap_formula(theta) -> np.ndarray:
    c2 = np.cos(theta) ** 2
    return (c2 - 1.0) / (1.0 + c2)


def polarization_four_vector(p: kin.FourMomentum, sigma: int) -> PolarizationFourVector:
    """Four-vector (0, eps) for a helicity state, eps in Cartesian components."""
    spatial = to_linear(triad(p, sigma).v)
    return PolarizationFourVector(np.concatenate([[0.0 + 0j], spatial]), p)


def transform_polarization(eps: PolarizationFourVector, lorentz: kin.LorentzTransform) -> PolarizationFourVector:
    """Push the four-vector through ``lorentz``; the momentum is renormalized."""
    return PolarizationFourVector(lorentz.m @ eps.eps, kin.apply(lorentz, eps.p))


def gauge_fix(eps: PolarizationFourVector) -> PolarizationFourVector:
    """Coulomb gauge: subtract (eps^0 / q^0) q so the vector is transverse to q."""
    q = eps.p.vector
    g = eps.eps[0] / q[0]
    return PolarizationFourVector(eps.eps - g * q, eps.p)
