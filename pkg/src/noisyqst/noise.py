"""Noise channels for the entangling gate and the resulting effective POVMs.

Two channel families are supported.  The depolarizing channel shrinks the
traceless part of the state by q = exp(-zeta pi T), where T is the
normalized time the interaction is switched on.  Over-/under-rotation (OU)
models a Gaussian spread of each pulse angle: it dephases the state in the
Bell eigenframe of the entangler, with decay factors

    gamma_k = exp(-r alpha_k pi)     (Heisenberg pulses)
    gamma_k = exp(-2 r |beta_k|)     (Ising couplings)

Both channels commute with the ideal entangler, are unital and self-adjoint,
and have explicit diagonal Kraus sets which are used to cross-check the map
form and to evaluate average gate fidelities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PAULIS
from .gates import (
    BELL_CONVENTIONAL,
    BELL_SORTED,
    HEISENBERG,
    INTERACTIONS,
    ISING,
    CanonicalParams,
    HeisenbergTimes,
    MeasurementParams,
    entangler_matrix,
    entangling_time,
    measurement_unitary,
    single_qubit_gate,
)

DEPOLARIZING = "depolarizing"
OVER_UNDER_ROTATION = "ou"
CHANNELS = (DEPOLARIZING, OVER_UNDER_ROTATION)

KrausSet = list[np.ndarray]

_EYE4 = np.eye(4, dtype=complex)


class DegeneratePovmError(ValueError):
    """Raised when noise wipes out a measurement effect entirely."""


@dataclass(frozen=True)
class NoiseModel:
    """Channel family + interaction type + strength (zeta or r)."""

    channel: str
    interaction: str
    strength: float

    def __post_init__(self):
        if self.channel not in CHANNELS:
            raise ValueError(f"unknown channel {self.channel!r}")
        if self.interaction not in INTERACTIONS:
            raise ValueError(f"unknown interaction {self.interaction!r}")
        if not self.strength >= 0.0:
            raise ValueError(f"noise strength must be >= 0, got {self.strength}")

    def to_dict(self) -> dict:
        return {
            "channel": self.channel,
            "interaction": self.interaction,
            "strength": self.strength,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NoiseModel":
        return cls(
            channel=data["channel"],
            interaction=data["interaction"],
            strength=float(data["strength"]),
        )


# ---------------------------------------------------------------------------
# depolarizing channel
# ---------------------------------------------------------------------------

def depolarizing_q(zeta: float, entangling_time: float) -> float:
    """Survival probability exp(-zeta pi T) of the traceless part."""
    if zeta < 0 or entangling_time < 0:
        raise ValueError("zeta and entangling time must be >= 0")
    return float(np.exp(-zeta * np.pi * entangling_time))


def apply_depolarizing(rho: np.ndarray, q: float) -> np.ndarray:
    """q rho + (1 - q) Tr(rho) 1/4."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    d = rho.shape[0]
    return q * rho + (1.0 - q) * np.trace(rho) * np.eye(d) / d


def kraus_depolarizing(q: float) -> KrausSet:
    """16-operator Pauli-product Kraus set of the two-qubit depolarizing channel."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    ops = [np.sqrt(15.0 * q + 1.0) / 4.0 * _EYE4]
    w = np.sqrt(max(1.0 - q, 0.0)) / 4.0
    for a in range(4):
        for b in range(4):
            if (a, b) == (0, 0):
                continue
            ops.append(w * np.kron(PAULIS[a], PAULIS[b]))
    return ops


# ---------------------------------------------------------------------------
# over-/under-rotation channel
# ---------------------------------------------------------------------------

def ou_gammas_heisenberg(r: float, a: HeisenbergTimes) -> np.ndarray:
    """Per-pulse dephasing factors exp(-r alpha_k pi)."""
    return np.exp(-r * np.pi * np.array(a.as_tuple()))


def ou_gammas_ising(r: float, b: CanonicalParams) -> np.ndarray:
    """Per-coupling dephasing factors exp(-2 r |beta_k|)."""
    return np.exp(-2.0 * r * np.abs(np.array(b.as_tuple())))


def _gamma_pattern_heisenberg(g: np.ndarray) -> np.ndarray:
    """Entrywise decay pattern in the resorted Bell basis (Psi+, Phi+, Phi-, Psi-)."""
    g1, g2, g3 = g
    return np.array(
        [
            [1.0, g1, g2, g3],
            [g1, 1.0, g1 * g2, g1 * g3],
            [g2, g1 * g2, 1.0, g2 * g3],
            [g3, g1 * g3, g2 * g3, 1.0],
        ]
    )


def _gamma_pattern_ising(g: np.ndarray) -> np.ndarray:
    """Entrywise decay pattern in the conventional Bell basis (Phi+, Psi+, Phi-, Psi-)."""
    gx, gy, gz = g
    return np.array(
        [
            [1.0, gy * gz, gx * gy, gx * gz],
            [gy * gz, 1.0, gx * gz, gx * gy],
            [gx * gy, gx * gz, 1.0, gy * gz],
            [gx * gz, gx * gy, gy * gz, 1.0],
        ]
    )


def _apply_bell_dephasing(rho: np.ndarray, pattern: np.ndarray, frame: np.ndarray) -> np.ndarray:
    rb = frame.conj().T @ rho @ frame
    return frame @ (pattern * rb) @ frame.conj().T


def apply_ou_heisenberg(rho: np.ndarray, gammas: np.ndarray) -> np.ndarray:
    """Dephase off-diagonals in the resorted Bell frame; Bell-diagonal part is untouched."""
    return _apply_bell_dephasing(rho, _gamma_pattern_heisenberg(np.asarray(gammas)), BELL_SORTED)


def apply_ou_ising(rho: np.ndarray, gammas: np.ndarray) -> np.ndarray:
    """Dephase off-diagonals in the conventional Bell frame with the Ising gamma products."""
    return _apply_bell_dephasing(rho, _gamma_pattern_ising(np.asarray(gammas)), BELL_CONVENTIONAL)


def kraus_ou_heisenberg(gammas: np.ndarray) -> KrausSet:
    """Eight Bell-diagonal Kraus operators of the Heisenberg OU channel."""
    g1, g2, g3 = np.asarray(gammas, dtype=float)
    ops = []
    for m in (0, 1):
        for k in (0, 1):
            for l in (0, 1):
                w = (1 + (-1) ** m * g1) * (1 + (-1) ** k * g2) * (1 + (-1) ** l * g3) / 8.0
                signs = np.array([1.0, (-1.0) ** m, (-1.0) ** k, (-1.0) ** l])
                ops.append(np.sqrt(max(w, 0.0)) * (BELL_SORTED * signs) @ BELL_SORTED.conj().T)
    return ops


def kraus_ou_ising(gammas: np.ndarray) -> KrausSet:
    """Four Bell-diagonal Kraus operators of the Ising OU channel."""
    gx, gy, gz = np.asarray(gammas, dtype=float)
    ops = []
    for k in (0, 1):
        for l in (0, 1):
            w = (
                1
                + (-1) ** k * gy * gz
                + (-1) ** l * gx * gy
                + (-1) ** (k + l) * gx * gz
            ) / 4.0
            signs = np.array([1.0, (-1.0) ** k, (-1.0) ** l, (-1.0) ** (k + l)])
            ops.append(np.sqrt(max(w, 0.0)) * (BELL_CONVENTIONAL * signs) @ BELL_CONVENTIONAL.conj().T)
    return ops


def apply_kraus(rho: np.ndarray, ops: KrausSet) -> np.ndarray:
    """rho -> sum_k M_k rho M_k'."""
    out = np.zeros_like(rho, dtype=complex)
    for m in ops:
        out += m @ rho @ m.conj().T
    return out


def assert_kraus_complete(ops: KrausSet, tol: float = 1e-10) -> None:
    d = ops[0].shape[0]
    total = sum(m.conj().T @ m for m in ops)
    dev = np.max(np.abs(total - np.eye(d)))
    if not dev < tol:
        raise ValueError(f"Kraus set not complete (deviation {dev:.3e})")


def average_gate_fidelity(ops: KrausSet) -> float:
    """Haar-average fidelity (sum_k |Tr M_k|^2 + d) / (d^2 + d) of a residual channel."""
    assert_kraus_complete(ops)
    d = ops[0].shape[0]
    s = sum(abs(np.trace(m)) ** 2 for m in ops)
    return float((s + d) / (d * d + d))


# ---------------------------------------------------------------------------
# effective POVMs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Povm:
    """One measurement under noise: effects, extracted scales, nominal projectors.

    ``effects[k]`` is the operator whose trace against rho gives the outcome
    probability.  ``qs[k]`` and ``nominal_projectors[k]`` invert the
    decomposition F_k = q_k (P_k - 1/4) + 1/4.  For the depolarizing channel
    the nominal operators are exact rank-1 projectors; under OU noise they
    are only approximately so (see :meth:`projector_defect`).
    """

    effects: np.ndarray  # (4, 4, 4) complex
    qs: np.ndarray  # (4,) real in (0, 1]
    nominal_projectors: np.ndarray  # (4, 4, 4) complex, unit trace, Hermitian

    def projector_defect(self) -> float:
        """max_k ||P_k^2 - P_k||_max; zero iff the nominal operators are projectors."""
        return float(
            max(np.max(np.abs(p @ p - p)) for p in self.nominal_projectors)
        )


def ideal_povm(unitary: np.ndarray) -> Povm:
    """Noise-free POVM of a standard-basis readout after ``unitary``."""
    effects = np.stack([np.outer(unitary[k, :].conj(), unitary[k, :]) for k in range(4)])
    return Povm(effects=effects, qs=np.ones(4), nominal_projectors=effects.copy())


def _extract_q_and_nominal(effects: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    qs = np.empty(4)
    nominal = np.empty_like(effects)
    for k in range(4):
        t = effects[k] - _EYE4 / 4.0
        q = np.sqrt(max((4.0 / 3.0) * np.trace(t @ t).real, 0.0))
        if q <= 1e-12:
            raise DegeneratePovmError(f"effect {k} is fully depolarized (q={q:.3e})")
        qs[k] = q
        nominal[k] = t / q + _EYE4 / 4.0
    return qs, nominal


def effective_povm(m: MeasurementParams, noise: NoiseModel) -> Povm:
    """Heisenberg-picture POVM of a measurement with a noisy entangler.

    Readout projectors are pulled back through the pre-readout single-qubit
    layer, passed through the (self-adjoint) noise channel sitting at the
    entangler, then pulled back through the ideal entangler and the first
    single-qubit layer.  Single-qubit gates are taken error-free.
    """
    if m.interaction != noise.interaction:
        raise ValueError(
            f"measurement uses {m.interaction!r} but noise model is {noise.interaction!r}"
        )
    pre = np.kron(single_qubit_gate(m.pre1), single_qubit_gate(m.pre2))
    post = np.kron(single_qubit_gate(m.post1), single_qubit_gate(m.post2))
    tail = entangler_matrix(m.entangler) @ post

    if noise.channel == DEPOLARIZING:
        q = depolarizing_q(noise.strength, entangling_time(m))

        def channel(a: np.ndarray) -> np.ndarray:
            return apply_depolarizing(a, q)

    elif noise.interaction == HEISENBERG:
        pattern = _gamma_pattern_heisenberg(ou_gammas_heisenberg(noise.strength, m.entangler))

        def channel(a: np.ndarray) -> np.ndarray:
            return _apply_bell_dephasing(a, pattern, BELL_SORTED)

    else:
        pattern = _gamma_pattern_ising(ou_gammas_ising(noise.strength, m.entangler))

        def channel(a: np.ndarray) -> np.ndarray:
            return _apply_bell_dephasing(a, pattern, BELL_CONVENTIONAL)

    effects = np.empty((4, 4, 4), dtype=complex)
    for k in range(4):
        pulled = np.outer(pre[k, :].conj(), pre[k, :])
        effects[k] = tail.conj().T @ channel(pulled) @ tail
    qs, nominal = _extract_q_and_nominal(effects)
    return Povm(effects=effects, qs=qs, nominal_projectors=nominal)


def quorum_povms(quorum, noise: NoiseModel) -> list[Povm]:
    """Effective POVMs of all five measurements of a quorum."""
    return [effective_povm(m, noise) for m in quorum.measurements]
