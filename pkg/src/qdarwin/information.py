"""Mutual information, Holevo quantity and discord between the system qubit
and environment fragments.

Conventions: qubit 0 is always the system; fragments are subsets of the
environment indices 1..N.  The Holevo quantity conditions on a computational
(Z) measurement of the system qubit, so discord = MI - Holevo is the one-way,
basis-specific quantity rather than a minimum over measurements.  All values
are in bits.

``mode`` selects entropy handling: "physical" demands projected density
matrices and guarantees non-negative MI, "raw" accepts unprojected
reconstructions whose truncated negative eigenvalues can drive MI below zero.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .linalg import DensityMatrix, partial_trace, von_neumann_entropy

_MIN_BRANCH_WEIGHT = 1e-12


def _check_fragment(fragment: Sequence[int], n_env: int) -> tuple[int, ...]:
    fragment = tuple(fragment)
    if not fragment:
        raise ValueError("fragment must be non-empty")
    if len(set(fragment)) != len(fragment):
        raise ValueError(f"fragment {fragment} has duplicate indices")
    if any(q < 1 or q > n_env for q in fragment):
        raise ValueError(f"fragment {fragment} outside environment 1..{n_env}")
    return fragment


def mutual_information(rho: DensityMatrix, fragment: Sequence[int], mode: str = "physical") -> float:
    """H(S) + H(F) - H(SF) for the given environment fragment."""
    n = rho.n_qubits
    fragment = _check_fragment(fragment, n - 1)
    h_s = von_neumann_entropy(partial_trace(rho, [0], n), mode)
    h_f = von_neumann_entropy(partial_trace(rho, fragment, n), mode)
    h_sf = von_neumann_entropy(partial_trace(rho, (0, *fragment), n), mode)
    return h_s + h_f - h_sf


def conditional_env_states(
    rho: DensityMatrix, fragment: Sequence[int]
) -> tuple[float, float, DensityMatrix | None, DensityMatrix | None]:
    """Z-measure the system qubit and reduce each branch to the fragment.

    Returns (p0, p1, rho_F|0, rho_F|1); a branch with weight at or below 1e-12
    is dropped (its state is None).  Raises when both branches vanish.
    """
    n = rho.n_qubits
    fragment = _check_fragment(fragment, n - 1)
    half = 2 ** (n - 1)
    env_keep = [q - 1 for q in fragment]

    probs: list[float] = []
    conditionals: list[DensityMatrix | None] = []
    for s in (0, 1):
        block = rho.mat[s * half : (s + 1) * half, s * half : (s + 1) * half]
        p = float(np.trace(block).real)
        probs.append(p)
        if p <= _MIN_BRANCH_WEIGHT:
            conditionals.append(None)
            continue
        env_state = DensityMatrix(block / p, physical=rho.physical)
        conditionals.append(partial_trace(env_state, env_keep, n - 1))
    if conditionals[0] is None and conditionals[1] is None:
        raise ValueError("both measurement branches have vanishing weight")
    return probs[0], probs[1], conditionals[0], conditionals[1]


def holevo(rho: DensityMatrix, fragment: Sequence[int], mode: str = "physical") -> float:
    """H(sum_s p_s rho_F|s) - sum_s p_s H(rho_F|s)."""
    p0, p1, c0, c1 = conditional_env_states(rho, fragment)
    branches = [(p, c) for p, c in ((p0, c0), (p1, c1)) if c is not None]
    total = sum(p for p, _ in branches)
    mix = sum((p / total) * c.mat for p, c in branches)
    mix_dm = DensityMatrix(mix, physical=rho.physical)
    h_mix = von_neumann_entropy(mix_dm, mode)
    h_cond = sum((p / total) * von_neumann_entropy(c, mode) for p, c in branches)
    return h_mix - h_cond


def discord(rho: DensityMatrix, fragment: Sequence[int], mode: str = "physical") -> float:
    """Quantum remainder of the correlations: MI minus the Holevo quantity."""
    return mutual_information(rho, fragment, mode) - holevo(rho, fragment, mode)


@dataclass(frozen=True)
class FragmentInfo:
    """Information values for one cumulative fragment of the sweep."""

    fragment: tuple[int, ...]
    fraction: float
    mi: float
    holevo: float
    discord: float


@dataclass(frozen=True)
class InfoReport:
    """Fragment sweep of one state, plus provenance of that state."""

    rows: tuple[FragmentInfo, ...]
    source: str  # "theoretical" | "raw" | "mitigated"
    config_label: str
    seed: int | None
    mode: str
    fidelity: float | None = None
    purity: float | None = None
    clipped_mass: float = 0.0

    CSV_HEADER = ("fragment_fraction", "mi", "holevo", "discord", "source", "config", "seed")

    def to_json_dict(self) -> dict:
        return {
            "source": self.source,
            "config": self.config_label,
            "seed": self.seed,
            "mode": self.mode,
            "fidelity": self.fidelity,
            "purity": self.purity,
            "clipped_mass": self.clipped_mass,
            "rows": [
                {
                    "fragment": list(r.fragment),
                    "fragment_fraction": r.fraction,
                    "mi": r.mi,
                    "holevo": r.holevo,
                    "discord": r.discord,
                }
                for r in self.rows
            ],
        }

    def to_csv_rows(self) -> list[tuple]:
        seed = "" if self.seed is None else self.seed
        return [
            (r.fraction, r.mi, r.holevo, r.discord, self.source, self.config_label, seed)
            for r in self.rows
        ]


def reports_to_csv(reports: Sequence[InfoReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(InfoReport.CSV_HEADER)
    for report in reports:
        for row in report.to_csv_rows():
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def reports_to_json(reports: Sequence[InfoReport]) -> str:
    return json.dumps([r.to_json_dict() for r in reports], sort_keys=True, indent=2)


def fragment_sweep(
    rho: DensityMatrix,
    ordering: Sequence[int] | None = None,
    mode: str = "physical",
    source: str = "theoretical",
    config_label: str = "",
    seed: int | None = None,
    fidelity: float | None = None,
    purity: float | None = None,
    clipped_mass: float = 0.0,
) -> InfoReport:
    """Evaluate MI / Holevo / discord on cumulative prefixes of ``ordering``.

    The fragment at size f consists of the first f entries of the ordering
    (default: environment indices ascending), so a sweep over f = 1..N traces
    how information accumulates as an observer grabs more of the environment.
    """
    n_env = rho.n_qubits - 1
    if ordering is None:
        ordering = tuple(range(1, n_env + 1))
    else:
        ordering = tuple(ordering)
        if sorted(ordering) != list(range(1, n_env + 1)):
            raise ValueError(
                f"ordering {ordering} must be a permutation of 1..{n_env}"
            )
    rows = []
    for f in range(1, n_env + 1):
        fragment = ordering[:f]
        mi = mutual_information(rho, fragment, mode)
        chi = holevo(rho, fragment, mode)
        rows.append(
            FragmentInfo(
                fragment=fragment,
                fraction=f / n_env,
                mi=mi,
                holevo=chi,
                discord=mi - chi,
            )
        )
    return InfoReport(
        rows=tuple(rows),
        source=source,
        config_label=config_label,
        seed=seed,
        mode=mode,
        fidelity=fidelity,
        purity=purity,
        clipped_mass=clipped_mass,
    )
