"""Density-matrix reconstruction from per-setting counts.

The reconstruction is plain linear inversion: estimate one expectation value
(Stokes parameter) per Pauli label, then sum label * Pauli-tensor / 2^n.
Labels containing I are never measured directly - the sign trick recovers them
from any setting that matches on the non-I positions (S_I = P0 + P1 instead of
P0 - P1), and every such setting is averaged to cut variance.

Readout mitigation inverts the tensored per-qubit confusion matrices estimated
from two calibration preparations (all-0 and all-1), then clips negative
quasi-counts and rescales.  Physical projection uses eigenvalue clipping with
mass redistribution (Smolin, Gambetta and Smith, PRL 108, 070502), the
Frobenius-nearest density matrix.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import DensityMatrix, fidelity, hermitian_eig, is_hermitian, purity
from .sampling import CountsTable, bitstring_of, enumerate_settings

PAULI_LABELS = "IXYZ"
_PAULI_STACK = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
_SIGN_KERNEL = np.array([[1.0, 1.0], [1.0, -1.0]])


def pauli_labels(n_qubits: int) -> list[str]:
    return ["".join(p) for p in itertools.product(PAULI_LABELS, repeat=n_qubits)]


def pauli_matrix(label: str) -> np.ndarray:
    m = _PAULI_STACK[PAULI_LABELS.index(label[0])]
    for ch in label[1:]:
        m = np.kron(m, _PAULI_STACK[PAULI_LABELS.index(ch)])
    return m


def _signed_sums(probs: np.ndarray, n: int) -> np.ndarray:
    """For every subset mask of qubits, sum probs with (-1)^(bits on the mask).

    Mask bit for qubit q sits at position n-1-q, matching outcome indexing.
    Entry 0 is the plain sum (the all-I normalization), entry with all bits set
    is the full-parity expectation.
    """
    t = probs.reshape((2,) * n)
    for q in range(n):
        t = np.moveaxis(np.tensordot(_SIGN_KERNEL, t, axes=([1], [q])), 0, q)
    return t.reshape(-1)


def stokes_from_counts(all_counts: Sequence[CountsTable], n_qubits: int) -> dict[str, float]:
    """Estimate all 4^n Pauli expectations from the 3^n measured settings.

    Every label is averaged over every setting that covers it (a setting
    covers a label when they agree on all non-I positions).  Settings are
    processed in lexicographic order, so the averages are reproducible.
    """
    expected = enumerate_settings(n_qubits)
    by_setting: dict[str, CountsTable] = {}
    for table in all_counts:
        if table.setting in by_setting:
            raise ValueError(f"duplicate counts for setting {table.setting!r}")
        by_setting[table.setting] = table
    missing = [s for s in expected if s not in by_setting]
    if missing:
        raise ValueError(f"missing {len(missing)} settings, first {missing[0]!r}")
    shot_values = {t.shots for t in by_setting.values()}
    if len(shot_values) != 1:
        raise ValueError(f"inconsistent shot counts across settings: {sorted(shot_values)}")

    sums: dict[str, float] = {}
    cover: dict[str, int] = {}
    size = 2**n_qubits
    for setting in expected:
        values = _signed_sums(by_setting[setting].probabilities(), n_qubits)
        for mask in range(size):
            label = "".join(
                setting[q] if mask & (1 << (n_qubits - 1 - q)) else "I"
                for q in range(n_qubits)
            )
            sums[label] = sums.get(label, 0.0) + float(values[mask])
            cover[label] = cover.get(label, 0) + 1
    return {label: sums[label] / cover[label] for label in sorted(sums)}


def reconstruct_linear_inversion(stokes: dict[str, float], n_qubits: int) -> np.ndarray:
    """rho = sum_labels S_label * (tensor of Paulis) / 2^n.

    Hermitian by construction; trace equals the all-I Stokes value.
    """
    labels = pauli_labels(n_qubits)
    try:
        flat = np.array([stokes[label] for label in labels], dtype=float)
    except KeyError as exc:
        raise ValueError(f"incomplete Stokes table, missing {exc.args[0]!r}") from None
    t = flat.reshape((4,) * n_qubits).astype(complex)
    for _ in range(n_qubits):
        # consume the leading Pauli axis, appending its (row, col) pair
        t = np.tensordot(t, _PAULI_STACK, axes=([0], [0]))
    perm = list(range(0, 2 * n_qubits, 2)) + list(range(1, 2 * n_qubits, 2))
    dim = 2**n_qubits
    return t.transpose(perm).reshape(dim, dim) / dim


def project_to_physical(raw: np.ndarray) -> DensityMatrix:
    """Nearest density matrix in Frobenius norm.

    Eigenvalue clipping with redistribution: walk the spectrum from the most
    negative up, zeroing eigenvalues and spreading the removed mass over the
    survivors, exactly preserving the (normalized) trace.
    """
    raw = np.asarray(raw, dtype=complex)
    if not is_hermitian(raw):
        raise ValueError("projection input must be Hermitian")
    tr = float(np.trace(raw).real)
    if abs(tr) < 1e-12:
        raise ValueError("projection input has vanishing trace")
    m = (raw + raw.conj().T) / (2.0 * tr)

    evals, vecs = hermitian_eig(m)
    if evals[0] >= 0.0:
        return DensityMatrix(m, physical=True)

    desc = evals[::-1].copy()
    vecs_desc = vecs[:, ::-1]
    dim = desc.size
    clipped = np.zeros(dim)
    acc = 0.0
    i = dim
    while i > 0 and desc[i - 1] + acc / i < 0.0:
        acc += desc[i - 1]
        i -= 1
    clipped[:i] = desc[:i] + acc / i
    projected = (vecs_desc[:, :i] * clipped[:i]) @ vecs_desc[:, :i].conj().T
    return DensityMatrix(projected, physical=True)


@dataclass(frozen=True)
class CalibrationData:
    """Per-qubit readout confusion matrices estimated from calibration counts."""

    matrices: tuple[np.ndarray, ...]

    def __post_init__(self):
        mats = tuple(np.asarray(m, dtype=float) for m in self.matrices)
        for m in mats:
            if m.shape != (2, 2):
                raise ValueError("confusion matrices must be 2x2")
            if np.max(np.abs(m.sum(axis=0) - 1.0)) > 1e-9:
                raise ValueError("confusion matrix columns must sum to 1")
        object.__setattr__(self, "matrices", mats)

    @property
    def n_qubits(self) -> int:
        return len(self.matrices)


def calibrate_readout(counts_all_zero: CountsTable, counts_all_one: CountsTable) -> CalibrationData:
    """Estimate per-qubit confusion matrices from the two calibration runs.

    Flip rates are marginal frequencies: p(read 1 | true 0) from the all-zero
    preparation, p(read 0 | true 1) from the all-one preparation.  A diagonal
    at or below 0.5 only triggers a warning; a singular estimate is an error.
    """
    n = counts_all_zero.n_qubits
    if counts_all_one.n_qubits != n:
        raise ValueError("calibration tables disagree on qubit count")
    if counts_all_zero.shots != counts_all_one.shots:
        raise ValueError("calibration tables disagree on shots")

    matrices = []
    for q in range(n):
        p10 = sum(v for k, v in counts_all_zero.counts.items() if k[q] == "1")
        p01 = sum(v for k, v in counts_all_one.counts.items() if k[q] == "0")
        a = p10 / counts_all_zero.shots
        b = p01 / counts_all_one.shots
        det = 1.0 - a - b
        if abs(det) < 1e-12:
            raise ValueError(f"degenerate calibration estimate on qubit {q}")
        if min(1.0 - a, 1.0 - b) <= 0.5:
            warnings.warn(
                f"readout calibration ill-conditioned on qubit {q} "
                f"(diagonal {min(1.0 - a, 1.0 - b):.3f})",
                stacklevel=2,
            )
        matrices.append(np.array([[1.0 - a, b], [a, 1.0 - b]]))
    return CalibrationData(tuple(matrices))


def _invert_counts(counts: CountsTable, calib: CalibrationData) -> np.ndarray:
    n = counts.n_qubits
    if calib.n_qubits != n:
        raise ValueError("calibration does not match the counts' qubit count")
    t = counts.vector().reshape((2,) * n)
    for q in range(n):
        m = calib.matrices[q]
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if abs(det) < 1e-12:
            raise ValueError(f"singular calibration matrix on qubit {q}")
        inv = np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]) / det
        t = np.moveaxis(np.tensordot(inv, t, axes=([1], [q])), 0, q)
    return t.reshape(-1)


def quasi_negativity(counts: CountsTable, calib: CalibrationData) -> float:
    """Total negative quasi-count mass the mitigation clip will remove."""
    quasi = _invert_counts(counts, calib)
    return float(-quasi[quasi < 0].sum())


def mitigate_counts(counts: CountsTable, calib: CalibrationData) -> CountsTable:
    """Invert the confusion tensor, clip negatives, rescale to the shot total."""
    quasi = np.clip(_invert_counts(counts, calib), 0.0, None)
    total = quasi.sum()
    if total <= 0.0:
        raise ValueError("mitigation removed all counts")
    quasi *= counts.shots / total
    n = counts.n_qubits
    mitigated = {bitstring_of(i, n): float(v) for i, v in enumerate(quasi) if v > 0.0}
    return CountsTable(setting=counts.setting, shots=counts.shots, counts=mitigated)


@dataclass(frozen=True)
class ReconstructionReport:
    """Raw and projected reconstructions of one run, with quality figures."""

    rho_raw: DensityMatrix
    rho_projected: DensityMatrix
    fidelity_vs_theory: float
    purity_raw: float
    purity_projected: float
    mitigated: bool
    clipped_mass: float = 0.0

    def __post_init__(self):
        lo = 1.0 / self.rho_projected.dim
        if not lo - 1e-9 <= self.purity_projected <= 1.0 + 1e-7:
            raise ValueError(f"projected purity {self.purity_projected!r} is unphysical")

    def to_json_dict(self) -> dict:
        return {
            "rho_raw": complex_matrix_to_json(self.rho_raw.mat),
            "rho_projected": complex_matrix_to_json(self.rho_projected.mat),
            "fidelity_vs_theory": self.fidelity_vs_theory,
            "purity_raw": self.purity_raw,
            "purity_projected": self.purity_projected,
            "purity_raw_unphysical": bool(self.purity_raw > 1.0 + 1e-7),
            "mitigated": self.mitigated,
            "clipped_mass": self.clipped_mass,
        }


def complex_matrix_to_json(mat: np.ndarray) -> list[list[list[float]]]:
    """Nested rows of [re, im] pairs."""
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(mat, dtype=complex)]


def complex_matrix_from_json(doc: list) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in doc])


def build_report(
    rho_raw_mat: np.ndarray,
    rho_theory: DensityMatrix,
    mitigated: bool,
    clipped_mass: float = 0.0,
) -> ReconstructionReport:
    """Bundle a raw reconstruction with its projection and quality figures."""
    raw = DensityMatrix(rho_raw_mat, physical=False)
    projected = project_to_physical(rho_raw_mat)
    return ReconstructionReport(
        rho_raw=raw,
        rho_projected=projected,
        fidelity_vs_theory=fidelity(rho_theory, projected),
        purity_raw=purity(raw),
        purity_projected=purity(projected),
        mitigated=mitigated,
        clipped_mass=clipped_mass,
    )
