"""Null four-momenta and proper orthochronous Lorentz matrices.

Momenta live on the future light cone with energy normalized to one, so a
direction ``(theta, phi)`` determines the four-vector
``(1, sin(theta) cos(phi), sin(theta) sin(phi), cos(theta))``.  Metric
signature is (-, +, +, +).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, RangeError

TOL = 1e-12
TWO_PI = 2.0 * math.pi
MAX_RAPIDITY = 50.0

METRIC = np.diag([-1.0, 1.0, 1.0, 1.0])
STANDARD_MOMENTUM = np.array([1.0, 0.0, 0.0, 1.0])

_ORDER = {"rz": 0, "ry": 1, "bz": 2}


def reduce_phi(phi):
    """Reduce an azimuth (scalar or array) into [0, 2*pi)."""
    out = np.mod(phi, TWO_PI)
    out = np.where(out >= TWO_PI, 0.0, out)
    if np.ndim(out) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class FourMomentum:
    """Unit-energy null momentum stored by its direction angles."""

    theta: float
    phi: float

    @property
    def vector(self) -> np.ndarray:
        return null_vectors(self.theta, self.phi)

    @property
    def direction(self) -> np.ndarray:
        return self.vector[1:]

    def is_standard(self, tol: float = TOL) -> bool:
        """True when the momentum points along k = (1, 0, 0, 1)."""
        return abs(self.theta) <= tol

    def __repr__(self):
        return f"FourMomentum(theta={self.theta!r}, phi={self.phi!r})"


def from_angles(theta: float, phi: float) -> FourMomentum:
    theta = float(theta)
    phi = float(phi)
    if not (math.isfinite(theta) and math.isfinite(phi)):
        raise DomainError(f"non-finite angles ({theta}, {phi})")
    if theta < -TOL or theta > math.pi + TOL:
        raise DomainError(f"theta={theta} outside [0, pi]")
    theta = min(max(theta, 0.0), math.pi)
    if theta == 0.0 or theta == math.pi:
        # azimuth is undefined at the poles; normal form is 0
        phi = 0.0
    return FourMomentum(theta, reduce_phi(phi))


def canonical_angles(theta, phi):
    """Map arbitrary real (theta, phi) onto the equivalent direction with theta in [0, pi].

    Works elementwise on arrays.  Used for partner angles such as ``-theta``
    or ``theta + pi`` that leave the standard range.
    """
    t = np.mod(theta, TWO_PI)
    flip = t > math.pi
    t = np.where(flip, TWO_PI - t, t)
    p = np.where(flip, np.asarray(phi) + math.pi, phi)
    p = np.where((t == 0.0) | (t == math.pi), 0.0, p)
    if np.ndim(t) == 0:
        return float(t), reduce_phi(float(p))
    return t, reduce_phi(p)


def null_vectors(theta, phi) -> np.ndarray:
    """Cartesian unit-energy null vectors, shape ``(..., 4)``."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack(
        [np.ones_like(theta * phi), st * np.cos(phi), st * np.sin(phi), np.cos(theta) + 0.0 * phi],
        axis=-1,
    )


def angles_of(vectors: np.ndarray):
    """Return ``(theta, phi, doppler)`` for future-pointing null vectors ``(..., 4)``.

    ``doppler`` is the zeroth component before renormalization.
    """
    v = np.asarray(vectors, dtype=float)
    doppler = v[..., 0]
    rho = np.hypot(v[..., 1], v[..., 2])
    theta = np.arctan2(rho, v[..., 3])
    phi = np.where(rho == 0.0, 0.0, np.arctan2(v[..., 2], v[..., 1]))
    return theta, reduce_phi(phi), doppler


def minkowski(a: np.ndarray, b: np.ndarray):
    """Bilinear product with signature (-, +, +, +); broadcasts over leading axes."""
    return -a[..., 0] * b[..., 0] + np.sum(a[..., 1:] * b[..., 1:], axis=-1)


# --- Lorentz matrices -------------------------------------------------------


def rz_matrix(lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    m = np.zeros(lam.shape + (4, 4))
    c, s = np.cos(lam), np.sin(lam)
    m[..., 0, 0] = 1.0
    m[..., 1, 1] = c
    m[..., 1, 2] = -s
    m[..., 2, 1] = s
    m[..., 2, 2] = c
    m[..., 3, 3] = 1.0
    return m


def ry_matrix(varpi) -> np.ndarray:
    varpi = np.asarray(varpi, dtype=float)
    m = np.zeros(varpi.shape + (4, 4))
    c, s = np.cos(varpi), np.sin(varpi)
    m[..., 0, 0] = 1.0
    m[..., 1, 1] = c
    m[..., 1, 3] = s
    m[..., 2, 2] = 1.0
    m[..., 3, 1] = -s
    m[..., 3, 3] = c
    return m


def bz_matrix(eta) -> np.ndarray:
    eta = np.asarray(eta, dtype=float)
    m = np.zeros(eta.shape + (4, 4))
    c, s = np.cosh(eta), np.sinh(eta)
    m[..., 0, 0] = c
    m[..., 0, 3] = s
    m[..., 1, 1] = 1.0
    m[..., 2, 2] = 1.0
    m[..., 3, 0] = s
    m[..., 3, 3] = c
    return m


def standard_transform(theta, phi, doppler=1.0) -> np.ndarray:
    """Matrices L(p) = Rz(phi) Ry(theta) Bz(log doppler) taking k to ``doppler * p``."""
    return rz_matrix(phi) @ ry_matrix(theta) @ bz_matrix(np.log(doppler))


def standard_transform_inverse(theta, phi, doppler=1.0) -> np.ndarray:
    return bz_matrix(-np.log(doppler)) @ ry_matrix(-np.asarray(theta)) @ rz_matrix(-np.asarray(phi))


@dataclass(frozen=True, eq=False)
class LorentzTransform:
    """A 4x4 proper orthochronous Lorentz matrix.

    ``factors`` records the generating sequence, leftmost factor first, as
    ``(kind, parameter)`` pairs with kind in {"rz", "ry", "bz"}.  It is empty
    for the identity and ``None`` when the origin is unknown (e.g. inverses
    of compositions are still tracked, raw matrices are not).
    """

    m: np.ndarray
    factors: tuple | None = field(default=())

    def __post_init__(self):
        m = np.array(self.m, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    def __matmul__(self, other: "LorentzTransform") -> "LorentzTransform":
        return compose(self, other)

    def describe(self) -> str:
        if self.factors is None:
            return "matrix"
        if not self.factors:
            return "identity"
        return "*".join(f"{kind}({value:.17g})" for kind, value in self.factors)

    def is_normal_form(self) -> bool:
        """True when the factors read rz... ry... bz... (the Rz Ry Bz ordering)."""
        if self.factors is None:
            return False
        ranks = [_ORDER[kind] for kind, _ in self.factors]
        return ranks == sorted(ranks)

    def __repr__(self):
        return f"LorentzTransform({self.describe()})"


def _finite(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"non-finite {name}: {value}")
    return value


def identity() -> LorentzTransform:
    return LorentzTransform(np.eye(4), ())


def rz(lam: float) -> LorentzTransform:
    lam = _finite(lam, "rotation angle")
    return LorentzTransform(rz_matrix(lam), (("rz", lam),))


def ry(varpi: float) -> LorentzTransform:
    varpi = _finite(varpi, "rotation angle")
    return LorentzTransform(ry_matrix(varpi), (("ry", varpi),))


def bz(eta: float) -> LorentzTransform:
    eta = _finite(eta, "rapidity")
    if abs(eta) > MAX_RAPIDITY:
        raise RangeError(f"|rapidity| = {abs(eta)} exceeds {MAX_RAPIDITY}")
    return LorentzTransform(bz_matrix(eta), (("bz", eta),))


def normal_form(lam: float = 0.0, varpi: float = 0.0, eta: float = 0.0) -> LorentzTransform:
    """Rz(lam) Ry(varpi) Bz(eta); the boost acts first."""
    return compose(rz(lam), compose(ry(varpi), bz(eta)))


def compose(a: LorentzTransform, b: LorentzTransform) -> LorentzTransform:
    """Matrix product ``a @ b`` (b acts first)."""
    with np.errstate(over="ignore", invalid="ignore"):
        m = a.m @ b.m
    if not np.all(np.isfinite(m)):
        raise RangeError("composition overflowed")
    if a.factors is None or b.factors is None:
        factors = None
    else:
        factors = a.factors + b.factors
    return LorentzTransform(m, factors)


def inverse(a: LorentzTransform) -> LorentzTransform:
    # Lorentz inverse: g m^T g, exact up to rounding
    m = METRIC @ a.m.T @ METRIC
    factors = None if a.factors is None else tuple((kind, -value) for kind, value in reversed(a.factors))
    return LorentzTransform(m, factors)


def is_lorentz(a: LorentzTransform, tol: float = TOL) -> bool:
    m = a.m
    scale = max(1.0, float(np.max(np.abs(m)))) ** 2
    return (
        np.allclose(m.T @ METRIC @ m, METRIC, rtol=0.0, atol=tol * scale)
        and abs(np.linalg.det(m) - 1.0) <= tol * scale * scale
        and m[0, 0] >= 1.0 - tol
    )


def apply_with_doppler(a: LorentzTransform, p: FourMomentum) -> tuple[FourMomentum, float]:
    """Transform ``p`` and renormalize to unit energy; also return the Doppler factor."""
    theta, phi, doppler = angles_of(a.m @ p.vector)
    return FourMomentum(float(theta), float(phi)), float(doppler)


def apply(a: LorentzTransform, p: FourMomentum) -> FourMomentum:
    return apply_with_doppler(a, p)[0]


def apply_many(a: LorentzTransform, theta, phi):
    """Vectorized :func:`apply`: returns ``(theta, phi, doppler)`` arrays."""
    v = null_vectors(theta, phi) @ a.m.T
    return angles_of(v)


def boosted_cos_theta(cos_theta, eta):
    """Closed-form polar update under Bz(eta)."""
    t = np.tanh(eta)
    return (cos_theta + t) / (1.0 + t * cos_theta)
