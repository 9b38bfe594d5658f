"""qdarwin: desk-scale toolkit for system-environment branching states.

Builds the one-control-qubit branching circuit, simulates it exactly, samples
finite-shot Pauli tomography with optional readout noise and mitigation, and
quantifies mutual information, Holevo information and discord between the
system qubit and environment fragments.
"""

__version__ = "0.1.0"

from .circuits import (
    Circuit,
    DarwinismConfig,
    GateSpec,
    build_darwinism_circuit,
    cu_gate_matrix,
    interaction_strengths,
    preset_config,
    simulate_statevector,
    theoretical_state,
    u_gate_matrix,
)
from .information import (
    InfoReport,
    conditional_env_states,
    discord,
    fragment_sweep,
    holevo,
    mutual_information,
)
from .linalg import (
    DensityMatrix,
    StateVector,
    fidelity,
    hermitian_eig,
    matrix_sqrt_psd,
    partial_trace,
    purity,
    tensor_product,
    von_neumann_entropy,
)
from .pipeline import ExperimentResult, run_experiment, run_theory
from .sampling import (
    CountsTable,
    NoiseModel,
    apply_readout_noise,
    basis_rotation,
    enumerate_settings,
    exact_probabilities,
    sample_counts,
)
from .tomography import (
    CalibrationData,
    ReconstructionReport,
    calibrate_readout,
    mitigate_counts,
    project_to_physical,
    reconstruct_linear_inversion,
    stokes_from_counts,
)
