"""Dense complex linear algebra for few-qubit states and density matrices.

Everything operates on plain numpy arrays (complex128, row-major) and is sized
for Hilbert-space dimensions up to 2**8.  Entropies are in bits.  Qubit 0 is
the leftmost tensor factor throughout the package, so basis index ``i``
carries qubit ``q`` in bit position ``n_qubits - 1 - q``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

HERMITIAN_ATOL = 1e-9
TRACE_ATOL = 1e-9
NORM_ATOL = 1e-12
ENTROPY_CUTOFF = 1e-12
# Spectrum below -NEGATIVE_EVAL_ERROR means the caller skipped projection.
NEGATIVE_EVAL_ERROR = 1e-6

_JACOBI_TOL = 1e-12
_JACOBI_MAX_SWEEPS = 100


def is_hermitian(mat: np.ndarray, atol: float = HERMITIAN_ATOL) -> bool:
    mat = np.asarray(mat)
    return bool(np.max(np.abs(mat - mat.conj().T)) <= atol)


def _qubit_count(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim <= 0 or 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


@dataclass(frozen=True)
class StateVector:
    """Pure n-qubit state as a flat amplitude vector, unit norm."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        _qubit_count(amps.size)
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"state norm**2 = {norm!r}, expected 1")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_qubits(self) -> int:
        return _qubit_count(self.amplitudes.size)

    def density_matrix(self) -> "DensityMatrix":
        amps = self.amplitudes
        return DensityMatrix(np.outer(amps, amps.conj()), physical=True)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian trace-one matrix.

    ``physical=True`` asserts the spectrum is non-negative (up to roundoff);
    only constructors that guarantee this (pure states, physical projection,
    partial traces and mixtures of physical states) may set it.
    """

    mat: np.ndarray
    physical: bool = False

    def __post_init__(self):
        m = np.asarray(self.mat, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {m.shape}")
        if not is_hermitian(m):
            raise ValueError("density matrix is not Hermitian within tolerance")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > TRACE_ATOL:
            raise ValueError(f"density matrix trace = {tr!r}, expected 1")
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def n_qubits(self) -> int:
        return _qubit_count(self.dim)


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; result[(i*db+k), (j*db+l)] = a[i,j] * b[k,l]."""
    return np.kron(np.asarray(a), np.asarray(b))


def partial_trace(rho: DensityMatrix, keep: Sequence[int], n_qubits: int) -> DensityMatrix:
    """Reduce ``rho`` to the qubits in ``keep``, in the order given.

    ``rho`` must act on exactly ``n_qubits`` qubits. Trace and Hermiticity are
    preserved; the ``physical`` flag carries over (a partial trace of a
    positive state is positive).
    """
    keep = list(keep)
    if not keep:
        raise ValueError("keep set must be non-empty")
    if len(set(keep)) != len(keep):
        raise ValueError(f"duplicate qubit indices in keep set: {keep}")
    if any(q < 0 or q >= n_qubits for q in keep):
        raise ValueError(f"keep set {keep} out of range for {n_qubits} qubits")
    if rho.dim != 2**n_qubits:
        raise ValueError(f"matrix dim {rho.dim} does not match {n_qubits} qubits")

    t = rho.mat.reshape((2,) * (2 * n_qubits))
    keepset = set(keep)
    # Row axis q is labelled q; column axis q gets its own label only if kept,
    # otherwise it shares the row label and einsum traces the pair out.
    labels = list(range(n_qubits))
    labels += [n_qubits + q if q in keepset else q for q in range(n_qubits)]
    out = [q for q in keep] + [n_qubits + q for q in keep]
    dk = 2 ** len(keep)
    reduced = np.einsum(t, labels, out).reshape(dk, dk)
    return DensityMatrix(reduced, physical=rho.physical)


def hermitian_eig(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and the
    matching eigenvectors as columns of a unitary matrix.  Each rotation
    dephases the (p, q) off-diagonal entry and applies a real Givens rotation
    to the resulting 2x2 symmetric block; sweeps repeat until the off-diagonal
    Frobenius norm drops below 1e-12 relative to the matrix scale.
    """
    a = np.asarray(h, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not is_hermitian(a):
        raise ValueError("matrix is not Hermitian within tolerance")
    d = a.shape[0]
    if d == 1:
        return np.array([a[0, 0].real]), np.eye(1, dtype=complex)

    a = (a + a.conj().T) / 2.0
    v = np.eye(d, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))
    skip = 1e-18 * scale

    for _ in range(_JACOBI_MAX_SWEEPS):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= _JACOBI_TOL * scale:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= skip:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                phase = apq / mag
                theta = 0.5 * math.atan2(2.0 * mag, aqq - app)
                c = math.cos(theta)
                s = math.sin(theta)
                # R = diag(1, conj(phase)) applied after the real rotation
                # zeroes a[p, q] exactly.
                r = np.array(
                    [[c, s], [-s * phase.conjugate(), c * phase.conjugate()]],
                    dtype=complex,
                )
                a[[p, q], :] = r.conj().T @ a[[p, q], :]
                a[:, [p, q]] = a[:, [p, q]] @ r
                v[:, [p, q]] = v[:, [p, q]] @ r
                a[p, q] = 0.0
                a[q, p] = 0.0
    else:
        raise ArithmeticError("Jacobi eigensolver failed to converge")

    evals = np.diag(a).real.copy()
    order = np.argsort(evals, kind="stable")
    return evals[order], v[:, order]


def matrix_sqrt_psd(rho: DensityMatrix) -> np.ndarray:
    """Hermitian PSD square root; eigenvalues in [-1e-6, 0) are clamped to 0."""
    evals, vecs = hermitian_eig(rho.mat)
    if evals[0] < -NEGATIVE_EVAL_ERROR:
        raise ValueError(
            f"matrix has eigenvalue {evals[0]:.3e}; project to the physical cone first"
        )
    root = np.sqrt(np.clip(evals, 0.0, None))
    return (vecs * root) @ vecs.conj().T


def von_neumann_entropy(rho: DensityMatrix, mode: str = "physical") -> float:
    """-sum(lam * log2 lam) over eigenvalues above the 1e-12 cutoff.

    ``physical`` mode insists on a projected input (``rho.physical`` set) and
    rejects spectra below -1e-6.  ``raw`` mode accepts any Hermitian trace-one
    matrix and silently drops negative eigenvalues, which is what lets noisy
    unprojected reconstructions report negative mutual information.
    """
    if mode not in ("physical", "raw"):
        raise ValueError(f"unknown entropy mode {mode!r}")
    if mode == "physical" and not rho.physical:
        raise ValueError("physical-mode entropy requires a projected density matrix")
    evals = hermitian_eig(rho.mat)[0]
    if mode == "physical" and evals[0] < -NEGATIVE_EVAL_ERROR:
        raise ValueError(f"physical-mode entropy got eigenvalue {evals[0]:.3e}")
    pos = evals[evals > ENTROPY_CUTOFF]
    if pos.size == 0:
        return 0.0
    return float(-np.sum(pos * np.log2(pos)))


def purity(rho: DensityMatrix) -> float:
    """Tr(rho^2), computed as the squared Frobenius norm of a Hermitian matrix."""
    return float(np.sum(np.abs(rho.mat) ** 2))


def fidelity(rho_t: DensityMatrix, rho_e: DensityMatrix) -> float:
    """Tr sqrt(sqrt(rho_t) rho_e sqrt(rho_t)), clamped into [0, 1].

    Both inputs must be projected (``physical=True``); for a pure ``rho_t``
    this reduces to sqrt(<psi|rho_e|psi>).
    """
    if rho_t.dim != rho_e.dim:
        raise ValueError(f"dimension mismatch: {rho_t.dim} vs {rho_e.dim}")
    if not (rho_t.physical and rho_e.physical):
        raise ValueError("fidelity requires projected (physical) inputs")
    s = matrix_sqrt_psd(rho_t)
    m = s @ rho_e.mat @ s
    m = (m + m.conj().T) / 2.0
    evals, _ = hermitian_eig(m)
    f = float(np.sum(np.sqrt(np.clip(evals, 0.0, None))))
    return min(max(f, 0.0), 1.0)
