"""Gate set and circuit builder for the branching system-environment model.

The model uses two gates: a general single-qubit rotation U(theta, phi, lam)
and its controlled version cU(theta, phi, lam, gamma).  The state of interest
is prepared by rotating the system qubit (qubit 0) and then entangling it with
each environment qubit through one controlled rotation whose angle sets the
coupling strength.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .linalg import StateVector

SOFT_QUBIT_CAP = 7

U1Q = "u1q"
CU2Q = "cu2q"

# Coupling-angle presets, keyed by (total qubit count, variant).  Variant A
# couples every environment qubit at pi (perfect records, GHZ-like); variant B
# weakens the last two couplings to 2*pi/5 and 5*pi/9.
STRENGTH_PRESETS: dict[tuple[int, str], tuple[float, ...]] = {
    (2, "A"): (math.pi,),
    (3, "A"): (math.pi, math.pi),
    (4, "A"): (math.pi, math.pi, math.pi),
    (5, "A"): (math.pi, math.pi, math.pi, math.pi),
    (6, "A"): (math.pi, math.pi, math.pi, math.pi, math.pi),
    (2, "B"): (2 * math.pi / 5,),
    (3, "B"): (2 * math.pi / 5, 5 * math.pi / 9),
    (4, "B"): (math.pi, 2 * math.pi / 5, 5 * math.pi / 9),
    (5, "B"): (math.pi, math.pi, 2 * math.pi / 5, 5 * math.pi / 9),
    (6, "B"): (math.pi, math.pi, math.pi, 2 * math.pi / 5, 5 * math.pi / 9),
}


def u_gate_matrix(theta: float, phi: float = 0.0, lam: float = 0.0) -> np.ndarray:
    """2x2 rotation [[c, -e^{i lam} s], [e^{i phi} s, e^{i(phi+lam)} c]]."""
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    return np.array(
        [
            [c, -cmath.exp(1j * lam) * s],
            [cmath.exp(1j * phi) * s, cmath.exp(1j * (phi + lam)) * c],
        ],
        dtype=complex,
    )


def cu_gate_matrix(theta: float, phi: float = 0.0, lam: float = 0.0, gamma: float = 0.0) -> np.ndarray:
    """4x4 controlled rotation: identity on the |0> control block,
    e^{i gamma} U(theta, phi, lam) on the |1> block."""
    m = np.eye(4, dtype=complex)
    m[2:, 2:] = cmath.exp(1j * gamma) * u_gate_matrix(theta, phi, lam)
    return m


@dataclass(frozen=True)
class GateSpec:
    """One gate application; angles in radians."""

    kind: str
    theta: float
    phi: float = 0.0
    lam: float = 0.0
    gamma: float = 0.0
    target: int = 0
    control: int | None = None

    def __post_init__(self):
        if self.kind not in (U1Q, CU2Q):
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind == CU2Q:
            if self.control is None:
                raise ValueError("controlled gate needs a control qubit")
            if self.control == self.target:
                raise ValueError("control and target must differ")
        elif self.control is not None:
            raise ValueError("single-qubit gate must not carry a control qubit")

    def matrix(self) -> np.ndarray:
        if self.kind == U1Q:
            return u_gate_matrix(self.theta, self.phi, self.lam)
        return cu_gate_matrix(self.theta, self.phi, self.lam, self.gamma)


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[GateSpec, ...] = ()

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("circuit needs at least one qubit")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            indices = [g.target] if g.control is None else [g.target, g.control]
            if any(i < 0 or i >= self.n_qubits for i in indices):
                raise ValueError(f"gate {g} out of range for {self.n_qubits} qubits")

    def to_json_dict(self) -> dict:
        gates = []
        for g in self.gates:
            entry = {"kind": g.kind, "theta": g.theta, "phi": g.phi, "lam": g.lam, "target": g.target}
            if g.kind == CU2Q:
                entry["gamma"] = g.gamma
                entry["control"] = g.control
            gates.append(entry)
        return {"n_qubits": self.n_qubits, "gates": gates}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, doc: dict) -> "Circuit":
        gates = tuple(
            GateSpec(
                kind=g["kind"],
                theta=g["theta"],
                phi=g.get("phi", 0.0),
                lam=g.get("lam", 0.0),
                gamma=g.get("gamma", 0.0),
                target=g["target"],
                control=g.get("control"),
            )
            for g in doc["gates"]
        )
        return cls(n_qubits=doc["n_qubits"], gates=gates)

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        return cls.from_json_dict(json.loads(text))


@dataclass(frozen=True)
class DarwinismConfig:
    """One system qubit branching onto ``n_env`` environment qubits.

    The system amplitudes are alpha = cos(theta_system/2) on the |0> branch
    and beta = sin(theta_system/2) on the |1> branch; environment qubit i is
    rotated by interaction_strengths[i-1] on the |1> branch only.
    """

    n_env: int
    theta_system: float = math.pi / 2
    interaction_strengths: tuple[float, ...] = ()
    max_qubits: int = SOFT_QUBIT_CAP

    def __post_init__(self):
        object.__setattr__(self, "interaction_strengths", tuple(self.interaction_strengths))
        if self.n_env < 1:
            raise ValueError("need at least one environment qubit")
        if len(self.interaction_strengths) != self.n_env:
            raise ValueError(
                f"{self.n_env} environment qubits need {self.n_env} strengths, "
                f"got {len(self.interaction_strengths)}"
            )
        if self.n_env + 1 > self.max_qubits:
            raise ValueError(
                f"{self.n_env + 1} qubits exceeds the cap of {self.max_qubits}; "
                "raise max_qubits to override"
            )

    @property
    def n_qubits(self) -> int:
        return self.n_env + 1


def interaction_strengths(n_qubits: int, variant: str) -> tuple[float, ...]:
    """Preset coupling angles for a total register of 2..6 qubits, variant A or B."""
    key = (n_qubits, str(variant).upper())
    if key not in STRENGTH_PRESETS:
        raise ValueError(f"no preset for {n_qubits} qubits, variant {variant!r}")
    return STRENGTH_PRESETS[key]


def preset_config(n_qubits: int, variant: str, theta_system: float = math.pi / 2) -> DarwinismConfig:
    strengths = interaction_strengths(n_qubits, variant)
    return DarwinismConfig(
        n_env=n_qubits - 1, theta_system=theta_system, interaction_strengths=strengths
    )


def build_darwinism_circuit(cfg: DarwinismConfig) -> Circuit:
    """System rotation on qubit 0, then one controlled rotation per environment
    qubit (control 0, targets ascending)."""
    gates = [GateSpec(U1Q, theta=cfg.theta_system, target=0)]
    for i, theta_i in enumerate(cfg.interaction_strengths, start=1):
        gates.append(GateSpec(CU2Q, theta=theta_i, control=0, target=i))
    return Circuit(n_qubits=cfg.n_qubits, gates=tuple(gates))


def _apply_1q(state: np.ndarray, m: np.ndarray, q: int, n: int) -> np.ndarray:
    t = state.reshape((2,) * n)
    t = np.moveaxis(np.tensordot(m, t, axes=([1], [q])), 0, q)
    return t.reshape(-1)


def _apply_2q(state: np.ndarray, m4: np.ndarray, control: int, target: int, n: int) -> np.ndarray:
    t = state.reshape((2,) * n)
    g = m4.reshape(2, 2, 2, 2)  # (c_out, t_out, c_in, t_in)
    t = np.tensordot(g, t, axes=([2, 3], [control, target]))
    t = np.moveaxis(t, (0, 1), (control, target))
    return t.reshape(-1)


def evolve_statevector(psi: StateVector, circuit: Circuit) -> StateVector:
    """Apply the circuit's gates in order to an arbitrary initial state."""
    if psi.n_qubits != circuit.n_qubits:
        raise ValueError(f"state has {psi.n_qubits} qubits, circuit {circuit.n_qubits}")
    n = circuit.n_qubits
    state = psi.amplitudes.copy()
    for g in circuit.gates:
        if g.kind == U1Q:
            state = _apply_1q(state, g.matrix(), g.target, n)
        else:
            state = _apply_2q(state, g.matrix(), g.control, g.target, n)
    return StateVector(state)


def simulate_statevector(circuit: Circuit, max_qubits: int = SOFT_QUBIT_CAP) -> StateVector:
    """Evolve |0...0> through the circuit by exact dense updates."""
    if circuit.n_qubits > max_qubits:
        raise ValueError(
            f"{circuit.n_qubits} qubits exceeds the cap of {max_qubits}; "
            "raise max_qubits to override"
        )
    amps = np.zeros(2**circuit.n_qubits, dtype=complex)
    amps[0] = 1.0
    return evolve_statevector(StateVector(amps), circuit)


def theoretical_state(cfg: DarwinismConfig) -> StateVector:
    """Closed-form amplitudes of the branching state.

    alpha sits on |0...0>; the |1> branch carries
    beta * prod_i (cos(theta_i/2) if bit_i == 0 else sin(theta_i/2)).
    """
    big_n = cfg.n_env
    alpha = math.cos(cfg.theta_system / 2.0)
    beta = math.sin(cfg.theta_system / 2.0)
    amps = np.zeros(2**cfg.n_qubits, dtype=complex)
    amps[0] = alpha
    half = 2**big_n
    for b in range(half):
        w = beta
        for i in range(big_n):
            bit = (b >> (big_n - 1 - i)) & 1
            theta_i = cfg.interaction_strengths[i]
            w *= math.sin(theta_i / 2.0) if bit else math.cos(theta_i / 2.0)
        amps[half + b] = w
    return StateVector(amps)
