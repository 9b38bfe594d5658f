"""End-to-end experiment orchestration.

One run: build the branching circuit, simulate the exact state, sample finite
shots for every measurement setting (optionally through readout noise),
reconstruct by linear inversion with and without mitigation, project, and
sweep the information quantities.  The reference state for fidelity is the
closed-form amplitude construction, while the sampled state comes from the
gate-by-gate simulator, so the two derivations cross-check each other on
every run.

Per-setting sampling streams are derived from (seed, setting_index), so the
counts are identical no matter how many workers split the settings.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuits import (
    CU2Q,
    DarwinismConfig,
    build_darwinism_circuit,
    preset_config,
    simulate_statevector,
    theoretical_state,
)
from .information import InfoReport, fragment_sweep
from .linalg import DensityMatrix, StateVector
from .sampling import (
    CountsTable,
    NoiseModel,
    apply_readout_noise,
    depolarize_distribution,
    enumerate_settings,
    exact_probabilities,
    sample_counts,
)
from .tomography import (
    CalibrationData,
    ReconstructionReport,
    build_report,
    calibrate_readout,
    mitigate_counts,
    quasi_negativity,
    reconstruct_linear_inversion,
    stokes_from_counts,
)

Seed = int | tuple[int, ...]


def config_label(qubits: int, variant: str) -> str:
    return f"{qubits}{variant.upper()}"


def _sample_stream(
    amplitudes: np.ndarray,
    settings: Sequence[str],
    first_index: int,
    shots: int,
    noise: NoiseModel | None,
    depolarize_mix: float,
    seed: Seed,
) -> list[CountsTable]:
    psi = StateVector(amplitudes)
    tables = []
    for offset, setting in enumerate(settings):
        dist = exact_probabilities(psi, setting)
        if depolarize_mix > 0.0:
            dist = depolarize_distribution(dist, depolarize_mix)
        if noise is not None:
            dist = apply_readout_noise(dist, noise)
        tables.append(
            sample_counts(dist, shots, seed, setting, stream_index=first_index + offset)
        )
    return tables


def sample_all_settings(
    psi: StateVector,
    shots: int,
    noise: NoiseModel | None,
    seed: Seed,
    workers: int = 1,
    depolarize_mix: float = 0.0,
) -> list[CountsTable]:
    """Sample every measurement setting; results independent of ``workers``."""
    settings = enumerate_settings(psi.n_qubits)
    if workers <= 1 or len(settings) < 2 * workers:
        return _sample_stream(psi.amplitudes, settings, 0, shots, noise, depolarize_mix, seed)

    bounds = np.linspace(0, len(settings), workers + 1).astype(int)
    chunks = [
        (psi.amplitudes, settings[lo:hi], int(lo), shots, noise, depolarize_mix, seed)
        for lo, hi in zip(bounds[:-1], bounds[1:])
        if hi > lo
    ]
    tables: list[CountsTable] = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_sample_stream_star, chunks):
            tables.extend(part)
    return tables


def _sample_stream_star(args) -> list[CountsTable]:
    return _sample_stream(*args)


def sample_calibration(
    n_qubits: int,
    shots: int,
    noise: NoiseModel | None,
    seed: Seed,
) -> tuple[CountsTable, CountsTable]:
    """Counts for the two calibration preparations, all-0 and all-1.

    Their sampling streams sit directly after the 3^n tomography streams.
    """
    base = 3**n_qubits
    dim = 2**n_qubits
    tables = []
    for j, hot in enumerate((0, dim - 1)):
        dist = np.zeros(dim)
        dist[hot] = 1.0
        if noise is not None:
            dist = apply_readout_noise(dist, noise)
        tables.append(sample_counts(dist, shots, seed, "Z" * n_qubits, stream_index=base + j))
    return tables[0], tables[1]


@dataclass(frozen=True)
class ExperimentResult:
    """Everything one sampled run produces, before any file is written."""

    config: DarwinismConfig
    label: str
    psi: StateVector
    rho_theory: DensityMatrix
    unmitigated: ReconstructionReport
    mitigated: ReconstructionReport | None
    info_reports: tuple[InfoReport, ...]
    n_settings: int


def _info_for(
    report: ReconstructionReport,
    source: str,
    mode: str,
    ordering: Sequence[int] | None,
    label: str,
    seed: int | None,
) -> InfoReport:
    state = report.rho_projected if mode == "physical" else report.rho_raw
    return fragment_sweep(
        state,
        ordering=ordering,
        mode=mode,
        source=source,
        config_label=label,
        seed=seed,
        fidelity=report.fidelity_vs_theory,
        purity=report.purity_projected if mode == "physical" else report.purity_raw,
        clipped_mass=report.clipped_mass,
    )


def run_theory(
    qubits: int,
    variant: str,
    theta_system: float = math.pi / 2,
    ordering: Sequence[int] | None = None,
) -> tuple[DarwinismConfig, DensityMatrix, InfoReport]:
    """Exact state and information sweep; no sampling involved."""
    cfg = preset_config(qubits, variant, theta_system)
    rho = theoretical_state(cfg).density_matrix()
    report = fragment_sweep(
        rho,
        ordering=ordering,
        mode="physical",
        source="theoretical",
        config_label=config_label(qubits, variant),
        fidelity=1.0,
        purity=1.0,
    )
    return cfg, rho, report


def run_experiment(
    qubits: int,
    variant: str,
    shots: int,
    seed: int,
    noise: NoiseModel | None,
    mitigation: bool = True,
    mode: str = "physical",
    ordering: Sequence[int] | None = None,
    theta_system: float = math.pi / 2,
    workers: int = 1,
    seed_prefix: tuple[int, ...] = (),
) -> ExperimentResult:
    """Full sampled pipeline for one configuration."""
    if mode not in ("physical", "raw"):
        raise ValueError(f"unknown mode {mode!r}")
    cfg = preset_config(qubits, variant, theta_system)
    label = config_label(qubits, variant)
    circuit = build_darwinism_circuit(cfg)
    psi = simulate_statevector(circuit)
    rho_theory = theoretical_state(cfg).density_matrix()

    mix = 0.0
    if noise is not None and noise.depolarizing > 0.0:
        n_cu = sum(1 for g in circuit.gates if g.kind == CU2Q)
        mix = 1.0 - (1.0 - noise.depolarizing) ** n_cu

    entropy: tuple[int, ...] = (*seed_prefix, seed)
    counts = sample_all_settings(psi, shots, noise, entropy, workers=workers, depolarize_mix=mix)

    stokes = stokes_from_counts(counts, qubits)
    unmitigated = build_report(
        reconstruct_linear_inversion(stokes, qubits), rho_theory, mitigated=False
    )

    mitigated: ReconstructionReport | None = None
    if mitigation:
        calib0, calib1 = sample_calibration(qubits, shots, noise, entropy)
        calibration = calibrate_readout(calib0, calib1)
        mit_counts = [mitigate_counts(t, calibration) for t in counts]
        clipped = sum(quasi_negativity(t, calibration) for t in counts)
        mit_stokes = stokes_from_counts(mit_counts, qubits)
        mitigated = build_report(
            reconstruct_linear_inversion(mit_stokes, qubits),
            rho_theory,
            mitigated=True,
            clipped_mass=clipped,
        )

    reports = [_info_for(unmitigated, "raw", mode, ordering, label, seed)]
    if mitigated is not None:
        reports.append(_info_for(mitigated, "mitigated", mode, ordering, label, seed))

    return ExperimentResult(
        config=cfg,
        label=label,
        psi=psi,
        rho_theory=rho_theory,
        unmitigated=unmitigated,
        mitigated=mitigated,
        info_reports=tuple(reports),
        n_settings=len(counts),
    )
