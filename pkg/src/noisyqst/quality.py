"""Geometric quality of a tomography quorum and its noise-penalized variant.

The geometric quality Q is the Gram volume spanned by the traceless parts
of 15 nominal rank-1 projectors (three per measurement); for the standard
MUB quorum it equals 1/32.  Noise multiplies Q by per-effect penalties

    Q_N = Q * prod_{j,k} q_jk^(1.195/2)

whose exponent comes from the linear coefficient of the Haar-averaged
log-probability; when q is uniform within a measurement this reduces to
Q * prod_j q_j^s with s = 2.39 in dimension 4 (s = 3/2 for a qubit).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .core import (
    bloch_gram_volume,
    gram_volume,
    haar_random_unitaries,
    random_eigenvalues,
    traceless_part,
)
from .gates import QuorumParams, entangling_time
from .noise import NoiseModel, Povm, ideal_povm, quorum_povms

# Linear coefficient of the Haar-averaged log outcome probability and the
# per-measurement exponents derived from it.
LOG_COEFF_4D = 1.195
PER_EFFECT_EXPONENT = LOG_COEFF_4D / 2.0
NOISE_EXPONENT_4D = 4.0 * PER_EFFECT_EXPONENT  # s = 2.39
NOISE_EXPONENT_2D = 1.5


@dataclass(frozen=True)
class QualityReport:
    """Quality of one quorum under one noise model."""

    q_geometric: float
    q_noisy: float
    per_measurement_q: np.ndarray  # (5, 4)
    entangling_times: np.ndarray  # (5,)

    def to_dict(self) -> dict:
        return {
            "q_geometric": self.q_geometric,
            "q_noisy": self.q_noisy,
            "per_measurement_q": [[float(x) for x in row] for row in self.per_measurement_q],
            "entangling_times": [float(x) for x in self.entangling_times],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _as_povm(entry) -> Povm:
    if isinstance(entry, Povm):
        return entry
    return ideal_povm(np.asarray(entry))


def geometric_quality(quorum: list) -> float:
    """Gram volume of the first three nominal projectors of each measurement.

    Accepts five :class:`~noisyqst.noise.Povm` objects or five measurement
    unitaries (treated as noise-free).  The drop of the fourth projector is
    immaterial for orthonormal bases since the four traceless parts sum to
    zero.
    """
    povms = [_as_povm(p) for p in quorum]
    if len(povms) != 5:
        raise ValueError(f"expected 5 measurements, got {len(povms)}")
    vecs = [traceless_part(p.nominal_projectors[k]) for p in povms for k in range(3)]
    return gram_volume(vecs)


def noisy_quality(quorum: list) -> float:
    """Geometric quality times the per-effect noise penalty prod q_jk^(1.195/2)."""
    povms = [_as_povm(p) for p in quorum]
    penalty = 1.0
    for p in povms:
        penalty *= float(np.prod(p.qs ** PER_EFFECT_EXPONENT))
    return geometric_quality(povms) * penalty


def quality_report(quorum: QuorumParams, noise: NoiseModel) -> QualityReport:
    """Evaluate a parametrized quorum under a noise model."""
    povms = quorum_povms(quorum, noise)
    qg = geometric_quality(povms)
    qs = np.stack([p.qs for p in povms])
    qn = qg * float(np.prod(qs ** PER_EFFECT_EXPONENT))
    times = np.array([entangling_time(m) for m in quorum.measurements])
    return QualityReport(
        q_geometric=qg, q_noisy=qn, per_measurement_q=qs, entangling_times=times
    )


# ---------------------------------------------------------------------------
# averaged log-probability coefficient
# ---------------------------------------------------------------------------

def estimate_log_coefficient(
    d: int,
    n_samples: int,
    rng: np.random.Generator,
    q_min: float = 0.9,
    n_grid: int = 40,
    chunk: int = 50_000,
) -> float:
    """Monte-Carlo slope of <ln(p + (1-q)/(d q))> versus (1 - q).

    Random densities are drawn as U D U' with Haar U and gap-of-uniforms D;
    p runs over all d diagonal entries.  The same samples are reused across
    the 40-point grid on q in [q_min, 1] and the slope is obtained by linear
    regression.  Around 10^6 samples reproduce the d=4 coefficient 1.195 to
    within a few percent.
    """
    if n_samples < 100_000:
        raise ValueError("n_samples must be at least 10^5 for a stable slope")
    qs = np.linspace(q_min, 1.0, n_grid)
    cs = (1.0 - qs) / (d * qs)
    acc = np.zeros(n_grid)
    done = 0
    while done < n_samples:
        m = int(min(chunk, n_samples - done))
        ev = random_eigenvalues(d, m, rng)
        u = haar_random_unitaries(d, m, rng)
        p = np.einsum("nki,ni->nk", np.abs(u) ** 2, ev).ravel()
        for i, c in enumerate(cs):
            acc[i] += float(np.sum(np.log(p + c)))
        done += m
    means = acc / (done * d)
    slope = np.polyfit(1.0 - qs, means, 1)[0]
    return float(slope)


def log_average_qubit_exact(c: float) -> float:
    """Closed-form qubit average <ln(p + c)> over the uniform Bloch ball.

    Its expansion around c = 0 is -5/6 + 3c + O(c^2 log c); with
    c = (1-q)/(2q) the linear coefficient in (1-q) is exactly 3/2.
    """
    if c < 0:
        raise ValueError("c must be >= 0")
    if c == 0.0:
        return -5.0 / 6.0
    return float(
        -5.0 / 6.0
        + 2.0 * c * (1.0 + c)
        + c * c * (3.0 + 2.0 * c) * np.log(c)
        - (1.0 + c) ** 2 * (2.0 * c - 1.0) * np.log(1.0 + c)
    )


# ---------------------------------------------------------------------------
# single-qubit model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SingleQubitScheme:
    """Three equal-polar-angle Bloch measurements with phases 0, 2pi/3, 4pi/3."""

    theta: float
    r: float = 0.0
    phases: tuple[float, float, float] = (0.0, 2.0 * np.pi / 3.0, 4.0 * np.pi / 3.0)

    def bloch_vectors(self) -> np.ndarray:
        s, c = np.sin(self.theta), np.cos(self.theta)
        return np.array([[s * np.cos(p), s * np.sin(p), c] for p in self.phases])


def single_qubit_quality(theta: float, r: float) -> float:
    """(3 sqrt(3) / 2) exp(-9 r |theta| / 2) cos(theta) sin^2(theta)."""
    return float(
        1.5 * np.sqrt(3.0) * np.exp(-4.5 * r * abs(theta)) * np.cos(theta) * np.sin(theta) ** 2
    )


def single_qubit_quality_decomposed(theta: float, r: float) -> float:
    """Same quantity via the Bloch-convention Gram volume times three q^(3/2) factors."""
    scheme = SingleQubitScheme(theta, r)
    vol = bloch_gram_volume(scheme.bloch_vectors() / np.sqrt(2.0))
    q = np.exp(-r * abs(theta))
    return float(vol * q ** (3.0 * NOISE_EXPONENT_2D))


def single_qubit_optimal_angle(r: float) -> float:
    """Polar angle maximizing the single-qubit quality at noise strength r."""
    if r < 0:
        raise ValueError("r must be >= 0")
    return float(np.arctan(np.sqrt(81.0 * r * r / 16.0 + 2.0) - 9.0 * r / 4.0))


# ---------------------------------------------------------------------------
# closed-form optima, depolarizing channel
# ---------------------------------------------------------------------------

def analytic_alpha_max(zeta: float, s: float = NOISE_EXPONENT_4D) -> float:
    """Optimal SWAP^alpha duration arctan(1/(zeta s))/pi; 1/2 at zero noise."""
    if zeta < 0 or s <= 0:
        raise ValueError("zeta must be >= 0 and s > 0")
    if zeta == 0.0:
        return 0.5
    return float(np.arctan(1.0 / (zeta * s)) / np.pi)


def analytic_beta_max(zeta: float, s: float = NOISE_EXPONENT_4D) -> float:
    """Optimal Ising coupling arctan(4/(zeta s))/2; pi/4 at zero noise."""
    if zeta < 0 or s <= 0:
        raise ValueError("zeta must be >= 0 and s > 0")
    if zeta == 0.0:
        return float(np.pi / 4.0)
    return float(np.arctan(4.0 / (zeta * s)) / 2.0)


def analytic_heisenberg_qn(a41: float, a43: float, a51: float, a53: float, zeta: float,
                           s: float = NOISE_EXPONENT_4D) -> float:
    """Q_N of the MUB family with free SWAP^alpha durations on the two entangled bases.

    The exponent uses the survival probability q_j = exp(-zeta pi sum alpha),
    the convention consistent with the analytic optimum arctan(1/(zeta s))/pi.
    """
    geometric = (
        np.sin(a41 * np.pi)
        * np.sin(a43 * np.pi)
        / 32.0
        * np.cos((a51 - a53) * np.pi / 2.0) ** 4
        * np.sin((a51 + a53) * np.pi / 2.0) ** 2
    )
    return float(geometric * np.exp(-zeta * s * np.pi * (a41 + a43 + a51 + a53)))


def analytic_ising_qn(b4y: float, b5y: float, zeta: float,
                      s: float = NOISE_EXPONENT_4D) -> float:
    """Q_N of the MUB family with free beta_y couplings on the two entangled bases."""
    geometric = np.sin(2.0 * b4y) ** 2 * np.sin(2.0 * b5y) ** 2 / 32.0
    return float(geometric * np.exp(-zeta * s * (abs(b4y) + abs(b5y))))
