"""Finite-shot measurement simulation.

Turns an ideal statevector into per-setting outcome counts: enumerate the 3^n
Pauli measurement settings, rotate into the measured basis, optionally corrupt
the outcome distribution with independent per-qubit readout flips, and draw a
seeded multinomial.  Seeding uses numpy's SeedSequence with an entropy tuple
(master_seed, stream_index), so every setting owns its own stream and parallel
execution cannot change the counts.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .circuits import U1Q, Circuit, GateSpec
from .linalg import StateVector

BASES = "XYZ"
DEFAULT_SHOTS = 8192
DEFAULT_READOUT_FLIP = 0.02

_SQRT2_INV = 1.0 / math.sqrt(2.0)
# Pre-measurement rotations mapping the chosen basis onto Z: X needs H,
# Y needs S-dagger followed by H (their product, applied as one matrix).
_ROT_X = _SQRT2_INV * np.array([[1, 1], [1, -1]], dtype=complex)
_ROT_Y = _SQRT2_INV * np.array([[1, -1j], [1, 1j]], dtype=complex)
ROTATION_MATRICES = {"X": _ROT_X, "Y": _ROT_Y, "Z": None}


def bitstring_of(index: int, n_qubits: int) -> str:
    """Outcome label for a basis index; character 0 is qubit 0."""
    return format(index, f"0{n_qubits}b")


def index_of(bitstring: str) -> int:
    return int(bitstring, 2)


def enumerate_settings(n_qubits: int) -> list[str]:
    """All 3^n measurement settings as strings over XYZ, lexicographic."""
    if n_qubits < 1:
        raise ValueError("need at least one qubit")
    return ["".join(p) for p in itertools.product(BASES, repeat=n_qubits)]


def basis_rotation(setting: str) -> Circuit:
    """Circuit suffix rotating each qubit's basis onto Z before measurement.

    X positions get U(pi/2, 0, pi) (an exact Hadamard), Y positions get
    U(pi/2, 0, pi/2) (Hadamard after S-dagger), Z positions need no gate.
    """
    gates = []
    for q, basis in enumerate(setting):
        if basis == "X":
            gates.append(GateSpec(U1Q, theta=math.pi / 2, lam=math.pi, target=q))
        elif basis == "Y":
            gates.append(GateSpec(U1Q, theta=math.pi / 2, lam=math.pi / 2, target=q))
        elif basis != "Z":
            raise ValueError(f"unknown basis {basis!r} in setting {setting!r}")
    return Circuit(n_qubits=len(setting), gates=tuple(gates))


def exact_probabilities(psi: StateVector, setting: str) -> np.ndarray:
    """Infinite-shot outcome distribution for one measurement setting."""
    n = psi.n_qubits
    if len(setting) != n:
        raise ValueError(f"setting {setting!r} does not match {n} qubits")
    t = psi.amplitudes.reshape((2,) * n)
    for q, basis in enumerate(setting):
        rot = ROTATION_MATRICES[basis]
        if rot is not None:
            t = np.moveaxis(np.tensordot(rot, t, axes=([1], [q])), 0, q)
    return np.abs(t.reshape(-1)) ** 2


@dataclass(frozen=True)
class NoiseModel:
    """Independent per-qubit readout confusion, plus an optional depolarizing
    hook applied per two-qubit gate before measurement."""

    flip_0_to_1: tuple[float, ...]  # p(read 1 | true 0) per qubit
    flip_1_to_0: tuple[float, ...]  # p(read 0 | true 1) per qubit
    depolarizing: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "flip_0_to_1", tuple(float(p) for p in self.flip_0_to_1))
        object.__setattr__(self, "flip_1_to_0", tuple(float(p) for p in self.flip_1_to_0))
        if len(self.flip_0_to_1) != len(self.flip_1_to_0):
            raise ValueError("flip probability lists must have equal length")
        for p in self.flip_0_to_1 + self.flip_1_to_0:
            if not 0.0 <= p < 0.5:
                raise ValueError(f"readout flip probability {p} outside [0, 0.5)")
        if not 0.0 <= self.depolarizing < 1.0:
            raise ValueError("depolarizing strength must lie in [0, 1)")

    @classmethod
    def symmetric(cls, n_qubits: int, p: float, depolarizing: float = 0.0) -> "NoiseModel":
        return cls((p,) * n_qubits, (p,) * n_qubits, depolarizing)

    @property
    def n_qubits(self) -> int:
        return len(self.flip_0_to_1)

    def confusion_matrix(self, qubit: int) -> np.ndarray:
        """Column-stochastic 2x2: column = true bit, row = read bit."""
        a = self.flip_0_to_1[qubit]
        b = self.flip_1_to_0[qubit]
        return np.array([[1.0 - a, b], [a, 1.0 - b]])


def apply_readout_noise(dist: np.ndarray, noise: NoiseModel) -> np.ndarray:
    """Push a distribution through the tensor of per-qubit confusion matrices."""
    dist = np.asarray(dist, dtype=float)
    n = noise.n_qubits
    if dist.size != 2**n:
        raise ValueError(f"distribution size {dist.size} does not match {n} qubits")
    t = dist.reshape((2,) * n)
    for q in range(n):
        t = np.moveaxis(np.tensordot(noise.confusion_matrix(q), t, axes=([1], [q])), 0, q)
    return t.reshape(-1)


def depolarize_distribution(dist: np.ndarray, mix: float) -> np.ndarray:
    """Mix toward uniform: what a global depolarizing channel does to any
    measured distribution."""
    dist = np.asarray(dist, dtype=float)
    if not 0.0 <= mix <= 1.0:
        raise ValueError("mix must lie in [0, 1]")
    return (1.0 - mix) * dist + mix / dist.size


@dataclass(frozen=True)
class CountsTable:
    """Outcome counts for one measurement setting.

    Raw counts are integers summing exactly to ``shots``; mitigated
    quasi-counts are floats summing to ``shots`` within 1e-6.  Zero-count
    outcomes are omitted.
    """

    setting: str
    shots: int
    counts: dict[str, float]

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("shots must be positive")
        n = len(self.setting)
        total = 0.0
        for key, value in self.counts.items():
            if len(key) != n or set(key) - {"0", "1"}:
                raise ValueError(f"bad outcome key {key!r} for setting {self.setting!r}")
            if value < 0:
                raise ValueError(f"negative count for outcome {key!r}")
            total += value
        if abs(total - self.shots) > 1e-6:
            raise ValueError(f"counts sum to {total!r}, expected {self.shots}")

    @property
    def n_qubits(self) -> int:
        return len(self.setting)

    def vector(self) -> np.ndarray:
        """Counts as a dense vector indexed by outcome."""
        v = np.zeros(2**self.n_qubits)
        for key, value in self.counts.items():
            v[index_of(key)] = value
        return v

    def probabilities(self) -> np.ndarray:
        v = self.vector()
        return v / v.sum()

    def to_json_dict(self) -> dict:
        return {"setting": self.setting, "shots": self.shots, "counts": dict(self.counts)}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, doc: dict) -> "CountsTable":
        return cls(setting=doc["setting"], shots=doc["shots"], counts=dict(doc["counts"]))

    @classmethod
    def from_json(cls, text: str) -> "CountsTable":
        return cls.from_json_dict(json.loads(text))


def stream_rng(seed: int | Sequence[int], stream_index: int | None = None) -> np.random.Generator:
    """PCG64 generator for one sampling stream.

    The seed is SeedSequence entropy; appending the stream index derives a
    statistically independent stream per measurement setting, making results
    identical whether settings are sampled serially or in parallel.
    """
    entropy = [seed] if isinstance(seed, int) else list(seed)
    if stream_index is not None:
        entropy.append(int(stream_index))
    return np.random.default_rng(entropy)


def sample_counts(
    dist: np.ndarray,
    shots: int,
    seed: int | Sequence[int],
    setting: str,
    stream_index: int | None = None,
) -> CountsTable:
    """Multinomial draw from a distribution; deterministic in (seed, stream)."""
    if shots < 1:
        raise ValueError("shots must be positive")
    dist = np.asarray(dist, dtype=float)
    n = len(setting)
    if dist.size != 2**n:
        raise ValueError(f"distribution size {dist.size} does not match setting {setting!r}")
    p = np.clip(dist, 0.0, None)
    p /= p.sum()
    draws = stream_rng(seed, stream_index).multinomial(shots, p)
    counts = {bitstring_of(i, n): int(c) for i, c in enumerate(draws) if c > 0}
    return CountsTable(setting=setting, shots=shots, counts=counts)
