"""Parametrized measurement circuits for two-qubit tomography.

A measurement is a unitary applied before a standard-basis readout.  Each
unitary factors as two single-qubit layers sandwiching one two-qubit
entangler:

    U = (pre1 x pre2) . U_tq . (post1 x post2)

where ``post`` acts first on the state and ``pre`` acts right before
readout.  The entangler is either the canonical 4x4 gate exp(-i sum_k
beta_k sigma_k x sigma_k), the Heisenberg-exchange realization built from
SWAP^alpha pulses, or the Ising realization built from conjugated ZZ
evolutions.  The corresponding parameter bundles carry the interaction tag.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .core import PAULI_I, PAULI_X, PAULI_Z

HEISENBERG = "heisenberg"
ISING = "ising"
INTERACTIONS = (HEISENBERG, ISING)

# Bell vectors; |Phi+-> = (|00> +- |11>)/sqrt2, |Psi+-> = (|01> +- |10>)/sqrt2.
_PHI_P = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2.0)
_PSI_P = np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2.0)
_PHI_M = np.array([1, 0, 0, -1], dtype=complex) / np.sqrt(2.0)
_PSI_M = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2.0)

# Conventional ordering diagonalizes the canonical gate; the resorted one
# diagonalizes the Heisenberg SWAP^alpha sequence.
BELL_CONVENTIONAL = np.column_stack([_PHI_P, _PSI_P, _PHI_M, _PSI_M])
BELL_SORTED = np.column_stack([_PSI_P, _PHI_P, _PHI_M, _PSI_M])


# ---------------------------------------------------------------------------
# parameter bundles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SingleQubitParams:
    """Angles (phi, psi, chi) of a general single-qubit gate."""

    phi: float = 0.0
    psi: float = 0.0
    chi: float = 0.0

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.phi, self.psi, self.chi)


@dataclass(frozen=True)
class CanonicalParams:
    """Canonical two-qubit couplings (beta_x, beta_y, beta_z); Ising-tagged."""

    beta_x: float = 0.0
    beta_y: float = 0.0
    beta_z: float = 0.0

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.beta_x, self.beta_y, self.beta_z)


@dataclass(frozen=True)
class HeisenbergTimes:
    """Normalized SWAP^alpha pulse durations, canonicalized into [0, 2).

    The Bell-diagonal phases e^(i alpha pi) are 2-periodic in each alpha,
    so the constructor reduces each component mod 2.
    """

    alpha1: float = 0.0
    alpha2: float = 0.0
    alpha3: float = 0.0

    def __post_init__(self):
        for name in ("alpha1", "alpha2", "alpha3"):
            object.__setattr__(self, name, float(getattr(self, name)) % 2.0)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.alpha1, self.alpha2, self.alpha3)


Entangler = CanonicalParams | HeisenbergTimes


@dataclass(frozen=True)
class MeasurementParams:
    """15 real parameters of one measurement unitary."""

    pre1: SingleQubitParams
    pre2: SingleQubitParams
    entangler: Entangler
    post1: SingleQubitParams
    post2: SingleQubitParams

    @property
    def interaction(self) -> str:
        return HEISENBERG if isinstance(self.entangler, HeisenbergTimes) else ISING


@dataclass(frozen=True)
class QuorumParams:
    """Five measurements forming a non-degenerate two-qubit quorum."""

    measurements: tuple[MeasurementParams, ...]

    def __post_init__(self):
        if len(self.measurements) != 5:
            raise ValueError(f"a quorum needs exactly 5 measurements, got {len(self.measurements)}")
        tags = {m.interaction for m in self.measurements}
        if len(tags) != 1:
            raise ValueError("all measurements in a quorum must share one interaction type")

    @property
    def interaction(self) -> str:
        return self.measurements[0].interaction

    def to_dict(self) -> dict:
        return {
            "interaction": self.interaction,
            "measurements": [
                {
                    "pre1": list(m.pre1.as_tuple()),
                    "pre2": list(m.pre2.as_tuple()),
                    "entangler": list(m.entangler.as_tuple()),
                    "post1": list(m.post1.as_tuple()),
                    "post2": list(m.post2.as_tuple()),
                }
                for m in self.measurements
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "QuorumParams":
        interaction = data["interaction"]
        if interaction not in INTERACTIONS:
            raise ValueError(f"unknown interaction {interaction!r}")
        entries = data["measurements"]
        if len(entries) != 5:
            raise ValueError(f"expected 5 measurements, got {len(entries)}")
        ms = []
        for e in entries:
            fields = {}
            for key in ("pre1", "pre2", "entangler", "post1", "post2"):
                vals = [float(x) for x in e[key]]
                if len(vals) != 3:
                    raise ValueError(f"field {key!r} must hold 3 reals")
                fields[key] = vals
            ent: Entangler
            if interaction == HEISENBERG:
                ent = HeisenbergTimes(*fields["entangler"])
            else:
                ent = CanonicalParams(*fields["entangler"])
            ms.append(
                MeasurementParams(
                    pre1=SingleQubitParams(*fields["pre1"]),
                    pre2=SingleQubitParams(*fields["pre2"]),
                    entangler=ent,
                    post1=SingleQubitParams(*fields["post1"]),
                    post2=SingleQubitParams(*fields["post2"]),
                )
            )
        return cls(measurements=tuple(ms))

    @classmethod
    def from_json(cls, text: str) -> "QuorumParams":
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# gate construction
# ---------------------------------------------------------------------------

def single_qubit_gate(p: SingleQubitParams) -> np.ndarray:
    """2x2 gate [[cos(phi) e^(i psi), sin(phi) e^(i chi)], [-sin(phi) e^(-i chi), cos(phi) e^(-i psi)]]."""
    c, s = np.cos(p.phi), np.sin(p.phi)
    return np.array(
        [
            [c * np.exp(1j * p.psi), s * np.exp(1j * p.chi)],
            [-s * np.exp(-1j * p.chi), c * np.exp(-1j * p.psi)],
        ]
    )


def canonical_two_qubit(b: CanonicalParams) -> np.ndarray:
    """exp(-i sum_k beta_k sigma_k x sigma_k), built spectrally in the Bell basis."""
    bx, by, bz = b.as_tuple()
    eta = np.array([bx - by + bz, bx + by - bz, -bx + by + bz, -bx - by - bz])
    return (BELL_CONVENTIONAL * np.exp(-1j * eta)) @ BELL_CONVENTIONAL.conj().T


def swap_alpha(alpha: float) -> np.ndarray:
    """Fractional SWAP: identity on the triplet space, phase e^(i alpha pi) on the singlet."""
    p = np.outer(_PSI_M, _PSI_M.conj())
    return np.eye(4, dtype=complex) + (np.exp(1j * alpha * np.pi) - 1.0) * p


def heisenberg_two_qubit(a: HeisenbergTimes) -> np.ndarray:
    """Heisenberg entangler diag(1, e^(i a1 pi), e^(i a2 pi), e^(i a3 pi)) in the resorted Bell basis."""
    phases = np.exp(1j * np.pi * np.array([0.0, a.alpha1, a.alpha2, a.alpha3]))
    return (BELL_SORTED * phases) @ BELL_SORTED.conj().T


def heisenberg_two_qubit_sequence(a: HeisenbergTimes) -> np.ndarray:
    """Same gate via the explicit pulse sequence zx . S^a1 . z1 . S^a2 . x2 . S^a3."""
    zx = np.kron(PAULI_Z, PAULI_X)
    z1 = np.kron(PAULI_Z, PAULI_I)
    x2 = np.kron(PAULI_I, PAULI_X)
    return zx @ swap_alpha(a.alpha1) @ z1 @ swap_alpha(a.alpha2) @ x2 @ swap_alpha(a.alpha3)


# Single-qubit frames that rotate each ZZ evolution onto XX, YY, ZZ; the
# three conjugated factors commute, so their product is the canonical gate.
_FRAME_X = np.array([[1, -1], [1, 1]], dtype=complex) / np.sqrt(2.0)  # exp(-i pi sigma_y / 4)
_FRAME_Y = np.array([[1, 1j], [1j, 1]], dtype=complex) / np.sqrt(2.0)  # exp(+i pi sigma_x / 4)
_FRAME_Z = PAULI_I
_ZZ_DIAG = np.array([1.0, -1.0, -1.0, 1.0])


def ising_two_qubit(b: CanonicalParams) -> np.ndarray:
    """Canonical gate realized as three conjugated ZZ evolutions."""
    out = np.eye(4, dtype=complex)
    for beta, frame in zip(b.as_tuple(), (_FRAME_X, _FRAME_Y, _FRAME_Z)):
        local = np.kron(frame, frame)
        zz = np.diag(np.exp(-1j * beta * _ZZ_DIAG))
        out = out @ (local.conj().T @ zz @ local)
    return out


def entangler_matrix(ent: Entangler) -> np.ndarray:
    if isinstance(ent, HeisenbergTimes):
        return heisenberg_two_qubit(ent)
    return ising_two_qubit(ent)


def measurement_unitary(m: MeasurementParams) -> np.ndarray:
    """Full measurement unitary (pre1 x pre2) . entangler . (post1 x post2)."""
    pre = np.kron(single_qubit_gate(m.pre1), single_qubit_gate(m.pre2))
    post = np.kron(single_qubit_gate(m.post1), single_qubit_gate(m.post2))
    return pre @ entangler_matrix(m.entangler) @ post


def entangling_time(m: MeasurementParams) -> float:
    """Normalized time the two-qubit interaction is on for this measurement.

    Heisenberg pulses contribute their alpha directly; each Ising coupling
    beta is a phase, so its normalized duration is |beta| / pi.
    """
    if isinstance(m.entangler, HeisenbergTimes):
        return float(sum(m.entangler.as_tuple()))
    return float(sum(abs(x) for x in m.entangler.as_tuple()) / np.pi)


# ---------------------------------------------------------------------------
# reference measurement sets
# ---------------------------------------------------------------------------

_ID = SingleQubitParams()


def standard_mub_params(interaction: str) -> QuorumParams:
    """The five-measurement MUB quorum with minimal entangling time.

    Three product-basis measurements plus two that use one CNOT-class
    entangler each: SWAP^(1/2) pulses (alpha = (1/2, 0, 1/2)) for the
    Heisenberg interaction, a single beta_y = pi/4 coupling for Ising.
    """
    if interaction not in INTERACTIONS:
        raise ValueError(f"unknown interaction {interaction!r}")
    if interaction == HEISENBERG:
        ent: Entangler = HeisenbergTimes(0.5, 0.0, 0.5)
        zero: Entangler = HeisenbergTimes()
    else:
        ent = CanonicalParams(0.0, np.pi / 4, 0.0)
        zero = CanonicalParams()
    q = np.pi / 4
    ms = (
        MeasurementParams(_ID, _ID, zero, _ID, _ID),
        MeasurementParams(SingleQubitParams(q), SingleQubitParams(q), zero, _ID, _ID),
        MeasurementParams(
            SingleQubitParams(q, 0.0, np.pi / 2),
            SingleQubitParams(q, 0.0, np.pi / 2),
            zero,
            _ID,
            _ID,
        ),
        MeasurementParams(
            SingleQubitParams(0.0, q, 0.0),
            SingleQubitParams(-np.pi / 2, 0.0, q),
            ent,
            _ID,
            SingleQubitParams(q, np.pi, -np.pi),
        ),
        MeasurementParams(
            SingleQubitParams(q, q, q),
            SingleQubitParams(0.0, q, 0.0),
            ent,
            _ID,
            _ID,
        ),
    )
    return QuorumParams(measurements=ms)


# Basis-change rotations: rows are the bras of the x/y/z eigenstates, so a
# standard-basis readout after the rotation measures that Pauli basis.
PAULI_BASIS_ROTATIONS = {
    "x": single_qubit_gate(SingleQubitParams(np.pi / 4, 0.0, 0.0)),
    "y": single_qubit_gate(SingleQubitParams(np.pi / 4, 0.0, -np.pi / 2)),
    "z": PAULI_I,
}


def nine_pauli_bases() -> list[np.ndarray]:
    """Entanglement-free reference set: all nine per-qubit x/y/z combinations."""
    order = ("x", "y", "z")
    return [
        np.kron(PAULI_BASIS_ROTATIONS[a], PAULI_BASIS_ROTATIONS[b])
        for a in order
        for b in order
    ]
