"""Two-mode helicity Bell states over correlated momentum pairs.

Full-form states hold the four helicity coefficients ``c[s1 s2]`` of
``|p1, s1>|p2, s2>`` in the order (++, +-, -+, --); the 9-component
helicity-basis vector is available through :meth:`TwoModeState.vector`.
Floored states hold the 4 transverse components left after the fixed
analyzer removes each mode's longitudinal slot, same ordering.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kinematics as kin
from . import little_group as lg
from .contour import zero_contours
from .errors import ConsistencyError, DomainError, ExcludedDirectionError, NullOutcomeError
from .helicity import triad_components

PHI_TAGS = ("Phi-a", "Phi-b", "Phi-c", "Phi-d")
PSI_TAGS = ("Psi-a", "Psi-b", "Psi-c", "Psi-d")
NO_TAG = "none"
# tags whose partner relation survives z-boosts (the antipodal ones do not)
BOOST_STABLE_TAGS = ("Phi-a", "Phi-b", "Psi-c", "Psi-d")

SQRT_HALF = math.sqrt(0.5)
BELL_COEFFS = {
    "Phi+": np.array([1, 0, 0, 1], dtype=complex) * SQRT_HALF,
    "Phi-": np.array([1, 0, 0, -1], dtype=complex) * SQRT_HALF,
    "Psi+": np.array([0, 1, 1, 0], dtype=complex) * SQRT_HALF,
    "Psi-": np.array([0, 1, -1, 0], dtype=complex) * SQRT_HALF,
}
SIGNS = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]])
NULL_TOL = 1e-14
PHASE_TOL = 1e-10
SINGULAR = math.nan


def raw_partner(theta1, phi1, tag):
    """Partner angles exactly as the fixed-point solutions state them (may leave [0, pi])."""
    pi = math.pi
    table = {
        "Phi-a": (theta1, -phi1),
        "Phi-b": (-theta1, pi - phi1),
        "Phi-c": (pi - theta1, pi + phi1),
        "Phi-d": (theta1 + pi, phi1),
        "Psi-a": (theta1 + pi, -phi1),
        "Psi-b": (pi - theta1, pi - phi1),
        "Psi-c": (-theta1, pi + phi1),
        "Psi-d": (theta1, phi1),
    }
    try:
        return table[tag]
    except KeyError:
        raise DomainError(f"unknown correlation tag {tag!r}") from None


def fixed_point_partner(theta1: float, phi1: float, tag: str) -> tuple[float, float]:
    """Partner direction in canonical form (theta in [0, pi], phi in [0, 2pi))."""
    t2, p2 = raw_partner(theta1, phi1, tag)
    return kin.canonical_angles(t2, p2)


def fixed_point_offsets(theta1: float, phi1: float, family: str) -> dict[str, tuple[float, float]]:
    """The four analytic fixed points (x, y) = (phi2 - phi1, theta2 - theta1), mod 2pi."""
    tags = _family_tags(family)
    out = {}
    for tag in tags:
        t2, p2 = raw_partner(theta1, phi1, tag)
        out[tag[-1]] = (kin.reduce_phi(p2 - phi1), kin.reduce_phi(t2 - theta1))
    return out


def _family_tags(family: str):
    if family in ("Phi", "Φ"):
        return PHI_TAGS
    if family in ("Psi", "Ψ"):
        return PSI_TAGS
    raise DomainError(f"family must be 'Phi' or 'Psi', got {family!r}")


def _same_direction(a: kin.FourMomentum, b: kin.FourMomentum, tol: float = kin.TOL) -> bool:
    return bool(np.max(np.abs(a.direction - b.direction)) <= tol)


@dataclass(frozen=True)
class MomentumPair:
    p1: kin.FourMomentum
    p2: kin.FourMomentum
    correlation: str = NO_TAG

    def __post_init__(self):
        tag = self.correlation
        if tag == NO_TAG:
            return
        partner = kin.from_angles(*fixed_point_partner(self.p1.theta, self.p1.phi, tag))
        if not _same_direction(partner, self.p2):
            raise DomainError(f"p2 does not satisfy the {tag} correlation with p1")
        if tag in PHI_TAGS and (self.p1.is_standard() or self.p2.is_standard()):
            raise ExcludedDirectionError("Phi-correlated pairs may not contain k")

    def matches(self, other: "MomentumPair", tol: float = kin.TOL) -> bool:
        return _same_direction(self.p1, other.p1, tol) and _same_direction(self.p2, other.p2, tol)


def correlated_pair(theta1: float, phi1: float, tag: str) -> MomentumPair:
    p1 = kin.from_angles(theta1, phi1)
    p2 = kin.from_angles(*fixed_point_partner(p1.theta, p1.phi, tag))
    return MomentumPair(p1, p2, tag)


@dataclass(frozen=True, eq=False)
class TwoModeState:
    amps: np.ndarray
    pair: MomentumPair
    form: str = "full"
    norm_weight: float = 1.0

    def vector(self) -> np.ndarray:
        """Helicity-basis components: 9 entries (full) or 4 (floored)."""
        if self.form == "floored":
            return self.amps
        return two_mode_vector(self.amps, self.pair, transverse=False)

    def normalized(self) -> np.ndarray:
        v = self.amps if self.form == "floored" else self.vector()
        return v / np.linalg.norm(v)


def two_mode_vector(coeffs, pair: MomentumPair, transverse: bool = False) -> np.ndarray:
    """Sum_c c[s1 s2] triad(p1, s1) (x) triad(p2, s2), optionally keeping only transverse slots."""
    dim = 2 if transverse else 3
    t1 = {s: triad_components(pair.p1.theta, pair.p1.phi, s)[:dim] for s in (1, -1)}
    t2 = {s: triad_components(pair.p2.theta, pair.p2.phi, s)[:dim] for s in (1, -1)}
    out = np.zeros(dim * dim, dtype=complex)
    for c, (s1, s2) in zip(coeffs, SIGNS):
        if c != 0:
            out += c * np.kron(t1[s1], t2[s2])
    return out


def bell(pair: MomentumPair, which: str) -> TwoModeState:
    if which not in BELL_COEFFS:
        raise DomainError(f"unknown Bell state {which!r}")
    if which.startswith("Phi") and (pair.p1.is_standard() or pair.p2.is_standard()):
        raise ExcludedDirectionError("Phi states are undefined with a mode along k")
    return TwoModeState(BELL_COEFFS[which].copy(), pair, "full")


# --- fixed-point equations --------------------------------------------------


def _sign(family: str) -> float:
    return 1.0 if _family_tags(family) is PHI_TAGS else -1.0


def fixed_point_residual(varpi, theta1, phi1, x, y, family: str, cleared: bool = False):
    """LHS - RHS of the Phi (conjugate phases) or Psi (equal phases) condition.

    The Phi family tests ``r1 + r2 = 0`` and Psi ``r1 - r2 = 0`` where
    ``r`` is the tangent of the Ry Wigner angle.  Where a denominator
    vanishes the ratio form returns NaN (:data:`SINGULAR`).  With
    ``cleared=True`` both sides are multiplied through by the
    denominators, which removes the poles.  Broadcasts over ``x``, ``y``.
    """
    sign = _sign(family)
    n1, d1 = lg.ry_terms(varpi, theta1, phi1)
    n2, d2 = lg.ry_terms(varpi, np.add(theta1, y), np.add(phi1, x))
    if cleared:
        out = n1 * d2 + sign * n2 * d1
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            out = n1 / d1 + sign * n2 / d2
        bad = (np.abs(d1) < lg.SINGULAR_TOL) | (np.abs(d2) < lg.SINGULAR_TOL)
        out = np.where(bad, SINGULAR, out)
    if np.ndim(out) == 0:
        return float(out)
    return out


def is_singular(value) -> bool:
    return bool(np.isnan(value))


@dataclass
class CurveSet:
    """Zero-level curves per rotation angle plus the analytic fixed points."""

    family: str
    theta1: float
    phi1: float
    grid: int
    curves: list = field(default_factory=list)  # (varpi, curve_id, (n, 2) array)
    points: dict = field(default_factory=dict)
    singular_cells: dict = field(default_factory=dict)  # varpi -> count

    @property
    def cell_size(self) -> float:
        return kin.TWO_PI / self.grid

    def curves_for(self, varpi: float):
        return [c for v, _, c in self.curves if v == varpi]


def _curves_one(varpi, theta1, phi1, family, grid):
    xs = np.linspace(0.0, kin.TWO_PI, grid + 1)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    field_values = fixed_point_residual(varpi, theta1, phi1, X, Y, family, cleared=True)
    # 0/0 points of the partner ratio: both numerator and denominator change sign in the cell
    n2, d2 = lg.ry_terms(varpi, theta1 + Y, phi1 + X)
    skip = _sign_change(n2) & _sign_change(d2)
    polylines, _ = zero_contours(field_values, xs, xs, skip_cells=skip)
    return polylines, int(skip.sum())


def _sign_change(a):
    s = a > 0
    c = np.stack([s[:-1, :-1], s[1:, :-1], s[1:, 1:], s[:-1, 1:]])
    return c.any(axis=0) & ~c.all(axis=0)


def fixed_point_curves(varpi_list, theta1, phi1, family, grid=128, threads=1) -> CurveSet:
    """Zero-level sets of the fixed-point residual over (x, y) in [0, 2pi]^2.

    One set of polylines per rotation angle; curves break at singular points
    of the partner's Wigner angle.  ``threads`` parallelizes over angles;
    results are merged in input order.
    """
    grid = int(grid)
    if grid < 2:
        raise DomainError("grid needs at least 2 points per axis")
    _family_tags(family)
    varpis = [float(v) for v in varpi_list]
    result = CurveSet(family, float(theta1), float(phi1), grid)
    result.points = fixed_point_offsets(theta1, phi1, family)

    def work(v):
        return _curves_one(v, theta1, phi1, family, grid)

    if threads > 1 and len(varpis) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outputs = list(pool.map(work, varpis))
    else:
        outputs = [work(v) for v in varpis]
    for v, (polylines, n_skip) in zip(varpis, outputs):
        for cid, line in enumerate(polylines):
            result.curves.append((v, cid, line))
        result.singular_cells[v] = n_skip
    return result


# --- Lorentz action ---------------------------------------------------------


def _phase_factors(theta1: float, theta2: float) -> np.ndarray:
    """exp(-i (s1 th1 + s2 th2)) for each helicity pair."""
    return np.exp(-1j * (SIGNS[:, 0] * theta1 + SIGNS[:, 1] * theta2))


def _expects_invariance(tag: str, lorentz: kin.LorentzTransform) -> bool:
    if tag == NO_TAG or not lorentz.is_normal_form():
        return False
    boosted = any(kind == "bz" and value != 0.0 for kind, value in lorentz.factors)
    return tag in BOOST_STABLE_TAGS or not boosted


def net_phase_deviation(tag: str, angle1: float, angle2: float) -> float:
    """|phase - 1| on the components a correlation is meant to protect."""
    if tag in PSI_TAGS:
        return float(abs(np.exp(-1j * (angle1 - angle2)) - 1.0))
    return float(abs(np.exp(-1j * (angle1 + angle2)) - 1.0))


def transform_bell(state: TwoModeState, lorentz: kin.LorentzTransform, check: bool = True) -> TwoModeState:
    """Apply a Lorentz transformation to a full-form two-mode state.

    Momenta move by :func:`kinematics.apply`; every component picks up the
    Wigner phases of both modes from the stabilizer oracle.  With ``check``
    set, a correlated pair under an Rz Ry Bz sequence must come out with
    unit net phase, otherwise :class:`ConsistencyError` is raised.
    """
    if state.form != "full":
        raise DomainError("transform_bell needs a full-form state")
    pair = state.pair
    a1 = lg.wigner_angle_numeric(lorentz, pair.p1)
    a2 = lg.wigner_angle_numeric(lorentz, pair.p2)
    if check and _expects_invariance(pair.correlation, lorentz):
        dev = net_phase_deviation(pair.correlation, a1, a2)
        if dev > PHASE_TOL:
            raise ConsistencyError(f"net Wigner phase off by {dev:.3g} for a {pair.correlation} pair")
    q1 = kin.apply(lorentz, pair.p1)
    q2 = kin.apply(lorentz, pair.p2)
    try:
        new_pair = MomentumPair(q1, q2, pair.correlation)
    except DomainError:
        # e.g. Rz moves the mirror plane of a Phi-a pair off the x-z plane
        new_pair = MomentumPair(q1, q2, NO_TAG)
    return TwoModeState(state.amps * _phase_factors(a1, a2), new_pair, "full", state.norm_weight)


# --- transverse projection --------------------------------------------------


def pt_project(state: TwoModeState) -> TwoModeState:
    """Apply the fixed transverse analyzer to both modes.

    ``norm_weight`` of the result is the squared norm of the projected
    vector, i.e. the probability that both photons pass.
    """
    if state.form != "full":
        raise DomainError("pt_project needs a full-form state")
    v = two_mode_vector(state.amps, state.pair, transverse=True)
    weight = float(np.vdot(v, v).real) * state.norm_weight
    if weight < NULL_TOL:
        raise NullOutcomeError("projection annihilates the state")
    return TwoModeState(v / np.linalg.norm(v), state.pair, "floored", weight)


def floored_overlap(a: TwoModeState, b: TwoModeState) -> complex:
    if a.form != "floored" or b.form != "floored":
        raise DomainError("floored_overlap needs floored states")
    if not a.pair.matches(b.pair):
        raise DomainError("states live on different momentum pairs")
    return complex(np.vdot(a.normalized(), b.normalized()))


def projected_bell_closed_form(which: str, theta1, phi1, theta2, phi2) -> np.ndarray:
    """Transverse projection of a Bell state from per-mode normalized floored kets.

    Scaled by 1 / sqrt((1 + cos^2 theta1)(1 + cos^2 theta2)) and without the
    Bell 1/sqrt(2).
    """
    c1, c2 = math.cos(theta1), math.cos(theta2)
    n = 1.0 / math.sqrt((1 + c1 * c1) * (1 + c2 * c2))
    e = np.exp
    s, d = phi1 + phi2, phi1 - phi2
    if which == "Phi+":
        v = [(c1 * c2 + 1) * e(-1j * s), (c1 * c2 - 1) * e(-1j * d), (c1 * c2 - 1) * e(1j * d), (c1 * c2 + 1) * e(1j * s)]
    elif which == "Phi-":
        v = [(c1 + c2) * e(-1j * s), -(c1 - c2) * e(-1j * d), (c1 - c2) * e(1j * d), -(c1 + c2) * e(1j * s)]
    elif which == "Psi+":
        v = [(c1 * c2 - 1) * e(-1j * s), (c1 * c2 + 1) * e(-1j * d), (c1 * c2 + 1) * e(1j * d), (c1 * c2 - 1) * e(1j * s)]
    elif which == "Psi-":
        v = [-(c1 - c2) * e(-1j * s), (c1 + c2) * e(-1j * d), -(c1 + c2) * e(1j * d), (c1 - c2) * e(1j * s)]
    else:
        raise DomainError(f"unknown Bell state {which!r}")
    return n * np.array(v, dtype=complex)


def correlated_projection(which: str, theta1: float, phi1: float) -> np.ndarray:
    """Projected Phi states for the mirror pair theta2 = theta1, phi2 = -phi1."""
    c2 = math.cos(theta1) ** 2
    if which == "Phi+":
        r = (c2 - 1) / (c2 + 1)
        return np.array([1, np.exp(-2j * phi1) * r, np.exp(2j * phi1) * r, 1], dtype=complex)
    if which == "Phi-":
        c = math.cos(theta1)
        return np.array([2 * c, 0, 0, -2 * c], dtype=complex) / (1 + c2)
    raise DomainError("only Phi+ and Phi- have a correlated closed form")


def correlated_normalization(which: str, theta1: float) -> float:
    """Factor that normalizes :func:`correlated_projection`."""
    c = math.cos(theta1)
    if which == "Phi+":
        return (1 + c * c) / (2 * math.sqrt(1 + c**4))
    if which == "Phi-":
        return (1 + c * c) / (math.sqrt(8) * c)
    raise DomainError("only Phi+ and Phi- have a correlated closed form")


FLOORED_BELL_BASIS = {
    "Phi+": np.array([1, 0, 0, 1], dtype=complex) * SQRT_HALF,
    "Phi-": np.array([1, 0, 0, -1], dtype=complex) * SQRT_HALF,
    "Psi+": np.array([0, 1, 1, 0], dtype=complex) * SQRT_HALF,
    "Psi-": np.array([0, 1, -1, 0], dtype=complex) * SQRT_HALF,
}


def triplet_coefficients(state: TwoModeState) -> tuple[complex, complex, complex]:
    """Coefficients (a1, a2, a3) of v = a1 |Phi+> + a2 |Psi+> + i a3 |Psi-> in the transverse space."""
    v = state.normalized()
    a1 = np.vdot(FLOORED_BELL_BASIS["Phi+"], v)
    a2 = np.vdot(FLOORED_BELL_BASIS["Psi+"], v)
    a3 = np.vdot(FLOORED_BELL_BASIS["Psi-"], v) / 1j
    return complex(a1), complex(a2), complex(a3)
