"""Discretized photonic wave packets.

Two encodings of a logical qubit (alpha, beta) are modelled:

* :class:`WavePacketQubit` -- alpha |Phi+> + beta |Phi-> over mirror-correlated
  momentum pairs (theta2 = theta1, phi2 = -phi1), weighted by an envelope.
* :class:`SingleModePacket` -- alpha |p,+> + beta |p,-> over single momenta,
  the baseline whose helicity matrix decoheres under rotations.

The momentum integral is replaced by a finite sample set whose weights
already include the measure, so ``sum |f|^2 = 1`` is the only normalization.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import bell as bl
from . import kinematics as kin
from . import little_group as lg
from .errors import ConsistencyError, DomainError, EmptyPacketError, NullOutcomeError
from .helicity import triad_components

NORM_TOL = 1e-12
WEIGHT_TOL = 1e-10
POLE_TOL = 1e-12
DEFAULT_EQUATOR_BAND = 1e-3
NULL_TOL = 1e-14
SQRT_HALF = math.sqrt(0.5)

SCHEMES = ("gaussian-cone", "uniform-cap", "ring")


@dataclass(frozen=True)
class Envelope:
    """Envelope over momentum directions.

    ``gaussian-cone``: theta ~ |N(theta0, width)| folded onto [0, pi], phi uniform.
    ``uniform-cap``: directions uniform on the cap theta <= theta_max.
    ``ring``: theta = theta0, phi evenly spaced with a seeded offset.
    ``sampling`` selects seeded pseudo-random or scrambled Sobol points.
    """

    scheme: str
    theta0: float = 0.0
    width: float = 0.0
    theta_max: float = 0.0
    sampling: str = "random"

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise DomainError(f"unknown envelope scheme {self.scheme!r}")
        if self.sampling not in ("random", "sobol"):
            raise DomainError(f"unknown sampling {self.sampling!r}")
        for name in ("theta0", "width", "theta_max"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"non-finite envelope parameter {name}")
        if self.width < 0 or not 0 <= self.theta_max <= math.pi:
            raise DomainError("envelope width must be >= 0 and theta_max in [0, pi]")

    def uniforms(self, n: int, seed) -> np.ndarray:
        if self.sampling == "sobol":
            from scipy.stats import qmc

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                return qmc.Sobol(d=2, scramble=True, seed=seed).random(n)
        return np.random.default_rng(seed).random((n, 2))

    def sample(self, n: int, seed) -> tuple[np.ndarray, np.ndarray]:
        u = self.uniforms(n, seed)
        if self.scheme == "gaussian-cone":
            from scipy.special import ndtri

            z = ndtri(np.clip(u[:, 0], 1e-300, 1 - 1e-16))
            theta = self.theta0 + self.width * z
            phi = kin.TWO_PI * u[:, 1]
        elif self.scheme == "uniform-cap":
            cos_t = 1.0 - u[:, 0] * (1.0 - math.cos(self.theta_max))
            theta = np.arccos(np.clip(cos_t, -1.0, 1.0))
            phi = kin.TWO_PI * u[:, 1]
        else:
            theta = np.full(n, float(self.theta0))
            phi = kin.TWO_PI * (np.arange(n) + u[0, 1]) / n
        return kin.canonical_angles(theta, phi)

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "theta0": self.theta0,
            "width": self.width,
            "theta_max": self.theta_max,
            "sampling": self.sampling,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Envelope":
        return cls(**d)


def gaussian_cone(theta0: float, width: float, sampling: str = "random") -> Envelope:
    return Envelope("gaussian-cone", theta0=theta0, width=width, sampling=sampling)


def uniform_cap(theta_max: float, sampling: str = "random") -> Envelope:
    return Envelope("uniform-cap", theta_max=theta_max, sampling=sampling)


def ring(theta0: float, sampling: str = "random") -> Envelope:
    return Envelope("ring", theta0=theta0, sampling=sampling)


def _check_amplitudes(alpha, beta) -> tuple[complex, complex]:
    alpha, beta = complex(alpha), complex(beta)
    if not (np.isfinite(alpha) and np.isfinite(beta)):
        raise DomainError("non-finite amplitudes")
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0) > NORM_TOL:
        raise DomainError("|alpha|^2 + |beta|^2 must equal 1")
    return alpha, beta


def _check_weights(f) -> np.ndarray:
    f = np.asarray(f, dtype=complex)
    if f.size == 0:
        raise EmptyPacketError("packet has no samples")
    if abs(float(np.sum(np.abs(f) ** 2)) - 1.0) > WEIGHT_TOL:
        raise DomainError("envelope weights must satisfy sum |f|^2 = 1")
    return f


def _floored_kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a[:, :, None] * b[:, None, :]).reshape(len(a), -1)


# --- Bell-encoded packet ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class WavePacketQubit:
    """Logical qubit carried by correlated Phi pairs.

    Per-sample arrays: pair angles, weights ``f`` and ``net_phase``, the
    accumulated Wigner factor exp(-i(th1 + th2)) multiplying the ++
    component (the -- component gets its conjugate).
    """

    alpha: complex
    beta: complex
    theta1: np.ndarray
    phi1: np.ndarray
    theta2: np.ndarray
    phi2: np.ndarray
    f: np.ndarray
    net_phase: np.ndarray
    correlation: str = "Phi-a"
    envelope: Envelope | None = None
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.f)

    @property
    def samples(self) -> list[tuple[bl.MomentumPair, complex]]:
        out = []
        for i in range(len(self)):
            p1 = kin.from_angles(self.theta1[i], self.phi1[i])
            p2 = kin.from_angles(self.theta2[i], self.phi2[i])
            tag = self.correlation if self.is_prepared else bl.NO_TAG
            out.append((bl.MomentumPair(p1, p2, tag), complex(self.f[i])))
        return out

    @property
    def is_prepared(self) -> bool:
        """True until a transformation has been applied."""
        return not self.meta.get("frame")

    def coefficients(self) -> np.ndarray:
        """Per-sample helicity coefficients (++, +-, -+, --), shape (n, 4)."""
        out = np.zeros((len(self), 4), dtype=complex)
        out[:, 0] = (self.alpha + self.beta) * SQRT_HALF * self.net_phase
        out[:, 3] = (self.alpha - self.beta) * SQRT_HALF * np.conj(self.net_phase)
        return out


def _partner_arrays(theta, phi, tag):
    t2, p2 = bl.raw_partner(theta, phi, tag)
    return kin.canonical_angles(np.asarray(t2, dtype=float), np.asarray(p2, dtype=float))


def packet_from_samples(alpha, beta, theta1, phi1, f, *, envelope=None, seed=None, meta=None) -> WavePacketQubit:
    """Assemble a Phi-a packet from explicit first-mode directions and weights."""
    alpha, beta = _check_amplitudes(alpha, beta)
    theta1, phi1 = kin.canonical_angles(np.atleast_1d(np.asarray(theta1, dtype=float)), np.atleast_1d(np.asarray(phi1, dtype=float)))
    f = _check_weights(np.atleast_1d(f))
    if np.any(theta1 <= POLE_TOL) or np.any(theta1 >= math.pi - POLE_TOL):
        raise DomainError("Phi pairs may not sit on the z axis")
    theta2, phi2 = _partner_arrays(theta1, phi1, "Phi-a")
    return WavePacketQubit(
        alpha, beta, theta1, phi1, theta2, phi2, f, np.ones(len(f), dtype=complex),
        "Phi-a", envelope, seed, dict(meta or {}),
    )


def build_packet(
    alpha,
    beta,
    envelope: Envelope,
    n_samples: int,
    seed: int | None = 0,
    *,
    equator_band: float = DEFAULT_EQUATOR_BAND,
    correlation: str = "Phi-a",
) -> WavePacketQubit:
    """Sample an envelope and pair every direction with its Phi-a partner.

    Directions on the z axis (p = k or -k) and within ``equator_band`` of
    theta = pi/2 (where the projected Phi- vanishes) are dropped and the
    remaining weights renormalized.  ``correlation="none"`` draws the second
    mode independently; that breaks invariance and is meant for audits.
    """
    alpha, beta = _check_amplitudes(alpha, beta)
    n_samples = int(n_samples)
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    if correlation not in ("Phi-a", bl.NO_TAG):
        raise DomainError("wave packets use the Phi-a correlation (or 'none' for audits)")
    theta1, phi1 = envelope.sample(n_samples, seed)
    if correlation == "Phi-a":
        theta2, phi2 = _partner_arrays(theta1, phi1, "Phi-a")
    else:
        rng_seed = None if seed is None else [int(seed), 1]
        theta2, phi2 = envelope.sample(n_samples, rng_seed)
    keep = np.ones(n_samples, dtype=bool)
    for t in (theta1, theta2):
        keep &= (t > POLE_TOL) & (t < math.pi - POLE_TOL)
        keep &= np.abs(t - math.pi / 2) >= equator_band
    n_kept = int(keep.sum())
    if n_kept == 0:
        raise EmptyPacketError("every sample fell on the z axis or in the theta = pi/2 band (Phi pairs need p != k)")
    f = np.full(n_kept, 1.0 / math.sqrt(n_kept), dtype=complex)
    meta = {
        "n_requested": n_samples,
        "n_excluded": n_samples - n_kept,
        "equator_band": equator_band,
        "frame": [],
    }
    return WavePacketQubit(
        alpha, beta, theta1[keep], phi1[keep], theta2[keep], phi2[keep], f,
        np.ones(n_kept, dtype=complex), correlation, envelope, seed, meta,
    )


def _move(lorentz: kin.LorentzTransform, theta, phi):
    """New angles, Doppler factors and Wigner angles; exact no-op for the identity matrix."""
    if np.array_equal(lorentz.m, np.eye(4)):
        ones = np.ones_like(theta)
        return theta, phi, ones, 0.0 * ones
    t, p, d = kin.apply_many(lorentz, theta, phi)
    return t, p, d, lg.wigner_angles_numeric(lorentz, theta, phi)


def transform_packet(packet: WavePacketQubit, lorentz: kin.LorentzTransform, verify: bool = False) -> WavePacketQubit:
    """Move every pair by ``lorentz`` and accumulate its Wigner phases.

    (alpha, beta) are never touched.  With ``verify`` every sample is pushed
    through :func:`bell.transform_bell` and, for correlated packets, its net
    phase must be 1 within 1e-10.
    """
    t1, p1, d1, a1 = _move(lorentz, packet.theta1, packet.phi1)
    t2, p2, d2, a2 = _move(lorentz, packet.theta2, packet.phi2)
    step = np.exp(-1j * (a1 + a2))
    band = packet.meta.get("equator_band", DEFAULT_EQUATOR_BAND)
    meta = dict(packet.meta)
    meta["frame"] = list(packet.meta.get("frame", [])) + [lorentz.describe()]
    meta["band_crossings"] = int(np.sum((np.abs(t1 - math.pi / 2) < band) | (np.abs(t2 - math.pi / 2) < band)))
    meta["doppler_range"] = [float(min(d1.min(), d2.min())), float(max(d1.max(), d2.max()))]
    meta["max_phase_step_deviation"] = float(np.max(np.abs(step - 1.0)))
    if verify:
        meta["max_phase_deviation"] = verify_phases(packet, lorentz, step)
    return replace(packet, theta1=t1, phi1=p1, theta2=t2, phi2=p2, net_phase=packet.net_phase * step, meta=meta)


def verify_phases(packet: WavePacketQubit, lorentz: kin.LorentzTransform, step=None) -> float:
    """Recompute per-sample phases through :func:`bell.transform_bell`.

    Returns the largest |net phase - 1|.  Raises :class:`ConsistencyError` if
    a correlated packet deviates by more than 1e-10 or the scalar and
    vectorized paths disagree.
    """
    worst = 0.0
    probe = np.array([1, 0, 0, 1], dtype=complex)
    for i in range(len(packet)):
        pair = bl.MomentumPair(kin.from_angles(packet.theta1[i], packet.phi1[i]), kin.from_angles(packet.theta2[i], packet.phi2[i]))
        moved = bl.transform_bell(bl.TwoModeState(probe, pair), lorentz, check=False)
        phase = moved.amps[0]
        if step is not None and abs(phase - step[i]) > bl.PHASE_TOL:
            raise ConsistencyError(f"sample {i}: scalar and batch Wigner phases disagree")
        worst = max(worst, float(abs(phase - 1.0)))
    if packet.correlation == "Phi-a" and lorentz.is_normal_form() and worst > bl.PHASE_TOL:
        raise ConsistencyError(f"net Wigner phase deviates by {worst:.3g}")
    return worst


@dataclass(frozen=True)
class MeasurementRecord:
    """Outcome statistics of the Gamma1 / Gamma2 measurement.

    ``conditional_probs`` are (P(Gamma1 | detect), P(Gamma2 | detect)) in the
    record's ``convention``; ``physical_conditional_probs`` always use the raw
    post-selected state.  ``outcome`` is set only when a shot was drawn.
    """

    conditional_probs: tuple[float, float]
    detect_prob: float
    physical_conditional_probs: tuple[float, float]
    convention: str = "logical"
    outcome: str | None = None

    def draw(self, rng: np.random.Generator) -> str:
        u = rng.random()
        if u >= self.detect_prob:
            return "null"
        return "Gamma1" if u < self.detect_prob * self.conditional_probs[0] else "Gamma2"


def _normalize_rows(v: np.ndarray, fallback: np.ndarray | None = None) -> np.ndarray:
    norms = np.linalg.norm(v, axis=1)
    small = norms < math.sqrt(NULL_TOL)
    out = v / np.where(small, 1.0, norms)[:, None]
    if fallback is not None and np.any(small):
        out[small] = fallback[small]
    return out


def _projected_bell_rows(packet: WavePacketQubit):
    """Per-sample transverse vectors of |++>, |-->, and the unit projected Phi+-."""
    tp1 = triad_components(packet.theta1, packet.phi1, 1)[:, :2]
    tm1 = triad_components(packet.theta1, packet.phi1, -1)[:, :2]
    tp2 = triad_components(packet.theta2, packet.phi2, 1)[:, :2]
    tm2 = triad_components(packet.theta2, packet.phi2, -1)[:, :2]
    vpp = _floored_kron(tp1, tp2)
    vmm = _floored_kron(tm1, tm2)
    # Phi- projects to zero at theta1 = theta2 = pi/2; use the limiting direction there
    s = packet.phi1 + packet.phi2
    limit = np.stack([np.exp(-1j * s), 0 * s, 0 * s, -np.exp(1j * s)], axis=1) * SQRT_HALF
    u_minus = _normalize_rows((vpp - vmm) * SQRT_HALF, limit)
    u_plus = _normalize_rows((vpp + vmm) * SQRT_HALF)
    return vpp, vmm, u_plus, u_minus


def _row_dot(a, b):
    return np.einsum("ij,ij->i", np.conj(a), b)


def measure_packet(packet: WavePacketQubit, convention: str = "logical", seed=None) -> MeasurementRecord:
    """Post-selected Gamma1 = |Phi-><Phi-| measurement on the projected packet.

    ``detect_prob`` is sum |f|^2 times the squared norm of the two-mode
    transverse projection.  Per sample, Gamma1 projects onto the projected
    Phi- state of that sample's pair.  In the ``logical`` convention each
    logical basis state is renormalized after projection before the
    superposition is formed; ``physical`` uses the raw projected vector, so
    superpositions are reweighted by the unequal pass probabilities of Phi+
    and Phi-.  If ``seed`` is given one outcome is drawn.
    """
    if convention not in ("logical", "physical"):
        raise DomainError(f"unknown convention {convention!r}")
    if len(packet) == 0:
        raise EmptyPacketError("packet has no samples")
    c = packet.coefficients()
    vpp, vmm, u_plus, u_minus = _projected_bell_rows(packet)
    projected = c[:, [0]] * vpp + c[:, [3]] * vmm
    weight = np.sum(np.abs(projected) ** 2, axis=1)
    fw = np.abs(packet.f) ** 2 * weight
    detect = float(np.sum(fw))
    if detect < NULL_TOL:
        raise NullOutcomeError("no sample survives the projection")

    safe = np.where(weight > NULL_TOL, weight, 1.0)
    p_phys = np.where(weight > NULL_TOL, np.abs(_row_dot(u_minus, projected)) ** 2 / safe, 0.0)
    a_plus = (c[:, 0] + c[:, 3]) * SQRT_HALF
    a_minus = (c[:, 0] - c[:, 3]) * SQRT_HALF
    logical = a_plus[:, None] * u_plus + a_minus[:, None] * u_minus
    lnorm = np.sum(np.abs(logical) ** 2, axis=1)
    p_log = np.abs(_row_dot(u_minus, logical)) ** 2 / np.where(lnorm > 0, lnorm, 1.0)

    phys1 = float(np.sum(fw * p_phys) / detect)
    log1 = float(np.sum(fw * p_log) / detect)
    g1 = log1 if convention == "logical" else phys1
    record = MeasurementRecord((g1, 1.0 - g1), detect, (phys1, 1.0 - phys1), convention)
    if seed is not None:
        record = replace(record, outcome=record.draw(np.random.default_rng(seed)))
    return record


def simulate_shots(record: MeasurementRecord, shots: int, seed) -> dict:
    """Draw ``shots`` detection attempts; returns outcome counts and frequencies."""
    shots = int(shots)
    if shots < 0:
        raise DomainError("shots must be >= 0")
    d = record.detect_prob
    probs = [1.0 - d, d * record.conditional_probs[0], d * record.conditional_probs[1]]
    probs = np.clip(probs, 0.0, 1.0)
    null, g1, g2 = (int(n) for n in np.random.default_rng(seed).multinomial(shots, probs / probs.sum()))
    detected = g1 + g2
    return {
        "shots": shots,
        "seed": seed,
        "null": null,
        "Gamma1": g1,
        "Gamma2": g2,
        "freq_Gamma1": g1 / detected if detected else None,
        "freq_Gamma2": g2 / detected if detected else None,
    }


def conditional_density(packet: WavePacketQubit, convention: str = "physical") -> tuple[np.ndarray, float]:
    """Detection-conditioned 4x4 density matrix of the projected packet and its detection probability."""
    c = packet.coefficients()
    vpp, vmm, u_plus, u_minus = _projected_bell_rows(packet)
    projected = c[:, [0]] * vpp + c[:, [3]] * vmm
    weight = np.sum(np.abs(projected) ** 2, axis=1)
    fw = np.abs(packet.f) ** 2 * weight
    detect = float(np.sum(fw))
    if detect < NULL_TOL:
        raise NullOutcomeError("no sample survives the projection")
    if convention == "physical":
        states = projected / np.sqrt(np.where(weight > 0, weight, 1.0))[:, None]
    else:
        a_plus = (c[:, 0] + c[:, 3]) * SQRT_HALF
        a_minus = (c[:, 0] - c[:, 3]) * SQRT_HALF
        states = _normalize_rows(a_plus[:, None] * u_plus + a_minus[:, None] * u_minus)
    rho = np.einsum("s,si,sj->ij", fw, states, np.conj(states)) / detect
    return rho, detect


# --- JSON ---------------------------------------------------------------------


def packet_to_dict(packet: WavePacketQubit) -> dict:
    """Serializable form of a prepared Phi-a packet; partner angles are not stored."""
    if not packet.is_prepared or packet.correlation != "Phi-a":
        raise DomainError("only prepared Phi-a packets can be serialized")
    return {
        "alpha": [packet.alpha.real, packet.alpha.imag],
        "beta": [packet.beta.real, packet.beta.imag],
        "samples": [
            {"theta1": float(t), "phi1": float(p), "f": [float(w.real), float(w.imag)]}
            for t, p, w in zip(packet.theta1, packet.phi1, packet.f)
        ],
        "envelope": None if packet.envelope is None else packet.envelope.to_dict(),
        "seed": packet.seed,
    }


def packet_from_dict(d: dict) -> WavePacketQubit:
    samples = d["samples"]
    env = d.get("envelope")
    return packet_from_samples(
        complex(*d["alpha"]),
        complex(*d["beta"]),
        [s["theta1"] for s in samples],
        [s["phi1"] for s in samples],
        [complex(*s["f"]) for s in samples],
        envelope=None if env is None else Envelope.from_dict(env),
        seed=d.get("seed"),
        meta={"frame": []},
    )


# --- single-mode baseline -----------------------------------------------------


@dataclass(frozen=True, eq=False)
class SingleModePacket:
    """alpha |p,+> + beta |p,-> over sampled momenta.

    ``phase`` holds the accumulated Wigner factor exp(-i theta) of the +
    helicity per sample; the - helicity carries its conjugate.
    """

    alpha: complex
    beta: complex
    theta: np.ndarray
    phi: np.ndarray
    f: np.ndarray
    phase: np.ndarray
    envelope: Envelope | None = None
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.f)


def single_mode_from_samples(alpha, beta, theta, phi, f, *, envelope=None, seed=None) -> SingleModePacket:
    alpha, beta = _check_amplitudes(alpha, beta)
    theta, phi = kin.canonical_angles(np.atleast_1d(np.asarray(theta, dtype=float)), np.atleast_1d(np.asarray(phi, dtype=float)))
    f = _check_weights(np.atleast_1d(f))
    return SingleModePacket(alpha, beta, theta, phi, f, np.ones(len(f), dtype=complex), envelope, seed, {"frame": []})


def build_single_mode(alpha, beta, envelope: Envelope, n_samples: int, seed: int | None = 0) -> SingleModePacket:
    n_samples = int(n_samples)
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    theta, phi = envelope.sample(n_samples, seed)
    f = np.full(n_samples, 1.0 / math.sqrt(n_samples), dtype=complex)
    return single_mode_from_samples(alpha, beta, theta, phi, f, envelope=envelope, seed=seed)


def transform_single_mode(packet: SingleModePacket, lorentz: kin.LorentzTransform) -> SingleModePacket:
    theta, phi, doppler, angle = _move(lorentz, packet.theta, packet.phi)
    meta = dict(packet.meta)
    meta["frame"] = list(packet.meta.get("frame", [])) + [lorentz.describe()]
    meta["doppler_range"] = [float(doppler.min()), float(doppler.max())]
    return replace(packet, theta=theta, phi=phi, phase=packet.phase * np.exp(-1j * angle), meta=meta)


@dataclass(frozen=True, eq=False)
class EffectiveDensityMatrix:
    """Renormalized 2x2 transverse helicity matrix; ``trace`` is the pre-normalization trace."""

    m: np.ndarray
    trace_deficit: float

    @property
    def trace(self) -> float:
        return 1.0 - self.trace_deficit

    def check(self, tol: float = 1e-12) -> bool:
        """Hermitian, positive semidefinite and subnormalized within ``tol``."""
        herm = np.max(np.abs(self.m - self.m.conj().T)) <= tol
        evals = np.linalg.eigvalsh(0.5 * (self.m + self.m.conj().T))
        return bool(herm and evals.min() >= -tol and self.trace <= 1.0 + tol and np.trace(self.m).real <= 1.0 + tol)


def single_mode_states(packet: SingleModePacket) -> np.ndarray:
    """Per-sample transverse (floored, unnormalized) helicity vectors, shape (n, 2)."""
    tp = triad_components(packet.theta, packet.phi, 1)[:, :2]
    tm = triad_components(packet.theta, packet.phi, -1)[:, :2]
    return packet.alpha * packet.phase[:, None] * tp + packet.beta * np.conj(packet.phase)[:, None] * tm


def effective_density_matrix(packet: SingleModePacket) -> EffectiveDensityMatrix:
    """Mixture over samples of the transverse projections, weighted by |f|^2."""
    if len(packet) == 0:
        raise EmptyPacketError("packet has no samples")
    v = single_mode_states(packet)
    rho = np.einsum("s,si,sj->ij", np.abs(packet.f) ** 2, v, np.conj(v))
    trace = float(np.trace(rho).real)
    if trace < NULL_TOL:
        raise NullOutcomeError("effective density matrix has zero trace")
    return EffectiveDensityMatrix(rho / trace, 1.0 - trace)


def helstrom_error(rho0: np.ndarray, rho1: np.ndarray, prior0: float = 0.5) -> float:
    """Minimum error probability for telling ``rho0`` from ``rho1``."""
    diff = prior0 * np.asarray(rho0) - (1.0 - prior0) * np.asarray(rho1)
    diff = 0.5 * (diff + diff.conj().T)
    trace_norm = float(np.sum(np.abs(np.linalg.eigvalsh(diff))))
    return max(0.0, 0.5 * (1.0 - trace_norm))


def orthogonal_partner(alpha, beta) -> tuple[complex, complex]:
    return -np.conj(complex(beta)), np.conj(complex(alpha))


def distinguishability_report(alpha_beta_list, lorentz_list, packet_params: dict, threads: int = 1) -> list[dict]:
    """Compare the Bell encoding with the single-mode baseline frame by frame.

    For each (alpha, beta) the orthogonal partner (-conj(beta), conj(alpha))
    is prepared too.  Bell rows give the Helstrom error between the two
    detection-conditioned projected packets; single-mode rows the Helstrom
    error between the two effective density matrices.  ``error_prob`` is the
    worst case over the list, ``detect_prob`` the mean detection probability.

    ``packet_params``: ``envelope`` (:class:`Envelope`), ``n_samples``,
    ``seed``, optional ``equator_band`` and ``label``.
    """
    pairs = [(complex(a), complex(b)) for a, b in alpha_beta_list]
    if not pairs or not lorentz_list:
        raise DomainError("need at least one amplitude pair and one transformation")
    env = packet_params["envelope"]
    n = packet_params.get("n_samples", 256)
    seed = packet_params.get("seed", 0)
    band = packet_params.get("equator_band", DEFAULT_EQUATOR_BAND)
    label = packet_params.get("label", "")
    bell_packets = [
        (build_packet(a, b, env, n, seed, equator_band=band), build_packet(*orthogonal_partner(a, b), env, n, seed, equator_band=band))
        for a, b in pairs
    ]
    single_packets = [
        (build_single_mode(a, b, env, n, seed), build_single_mode(*orthogonal_partner(a, b), env, n, seed)) for a, b in pairs
    ]

    def row(lorentz):
        bell_err, bell_det, sm_err, sm_det = [], [], [], []
        for p0, p1 in bell_packets:
            r0, d0 = conditional_density(transform_packet(p0, lorentz))
            r1, d1 = conditional_density(transform_packet(p1, lorentz))
            bell_err.append(helstrom_error(r0, r1))
            bell_det += [d0, d1]
        for s0, s1 in single_packets:
            e0 = effective_density_matrix(transform_single_mode(s0, lorentz))
            e1 = effective_density_matrix(transform_single_mode(s1, lorentz))
            sm_err.append(helstrom_error(e0.m, e1.m))
            sm_det += [e0.trace, e1.trace]
        desc = lorentz.describe()
        return [
            {"lambda_desc": desc, "encoding": "bell" + label, "error_prob": max(bell_err), "detect_prob": float(np.mean(bell_det))},
            {"lambda_desc": desc, "encoding": "single_mode" + label, "error_prob": max(sm_err), "detect_prob": float(np.mean(sm_det))},
        ]

    if threads > 1 and len(lorentz_list) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(row, lorentz_list))
    else:
        blocks = [row(lam) for lam in lorentz_list]
    return [r for block in blocks for r in block]
