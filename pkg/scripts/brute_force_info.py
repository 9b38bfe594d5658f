#!/usr/bin/env python3
"""Brute-force oracle for the information curves of the branching model.

Standalone on purpose: builds the state by direct enumeration of amplitudes,
reduces with an index-sum partial trace, and takes entropies with
numpy.linalg.eigvalsh.  It shares no code with the qdarwin package, so its
output can be frozen into the test suite as independent golden values.

Usage: python3 scripts/brute_force_info.py
"""

import itertools
import math

import numpy as np

PRESETS = {
    (2, "A"): (math.pi,),
    (3, "A"): (math.pi, math.pi),
    (4, "A"): (math.pi,) * 3,
    (5, "A"): (math.pi,) * 4,
    (6, "A"): (math.pi,) * 5,
    (2, "B"): (2 * math.pi / 5,),
    (3, "B"): (2 * math.pi / 5, 5 * math.pi / 9),
    (4, "B"): (math.pi, 2 * math.pi / 5, 5 * math.pi / 9),
    (5, "B"): (math.pi, math.pi, 2 * math.pi / 5, 5 * math.pi / 9),
    (6, "B"): (math.pi, math.pi, math.pi, 2 * math.pi / 5, 5 * math.pi / 9),
}


def branching_state(theta_s, strengths):
    n_env = len(strengths)
    n = n_env + 1
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = math.cos(theta_s / 2)
    beta = math.sin(theta_s / 2)
    for bits in itertools.product((0, 1), repeat=n_env):
        w = beta
        for theta, b in zip(strengths, bits):
            w *= math.sin(theta / 2) if b else math.cos(theta / 2)
        idx = 1
        for b in bits:
            idx = (idx << 1) | b
        amps[idx] = w
    assert abs(np.vdot(amps, amps) - 1) < 1e-12
    return amps


def ptrace(rho, keep, n):
    """Partial trace by explicit index summation (qubit 0 = most significant bit)."""
    keep = list(keep)
    traced = [q for q in range(n) if q not in keep]
    dk = 2 ** len(keep)
    out = np.zeros((dk, dk), dtype=complex)

    def full_index(keep_bits, traced_bits):
        idx = 0
        assign = {}
        for q, b in zip(keep, keep_bits):
            assign[q] = b
        for q, b in zip(traced, traced_bits):
            assign[q] = b
        for q in range(n):
            idx = (idx << 1) | assign[q]
        return idx

    for ib in itertools.product((0, 1), repeat=len(keep)):
        for jb in itertools.product((0, 1), repeat=len(keep)):
            acc = 0.0 + 0.0j
            for tb in itertools.product((0, 1), repeat=len(traced)):
                acc += rho[full_index(ib, tb), full_index(jb, tb)]
            i = int("".join(map(str, ib)) or "0", 2)
            j = int("".join(map(str, jb)) or "0", 2)
            out[i, j] = acc
    return out


def entropy_bits(rho):
    evals = np.linalg.eigvalsh(rho)
    evals = evals[evals > 1e-12]
    return float(-np.sum(evals * np.log2(evals)))


def info_row(amps, n, fragment):
    rho = np.outer(amps, amps.conj())
    h_s = entropy_bits(ptrace(rho, [0], n))
    h_f = entropy_bits(ptrace(rho, fragment, n))
    h_sf = entropy_bits(ptrace(rho, [0] + list(fragment), n))
    mi = h_s + h_f - h_sf

    # Holevo: condition on a Z measurement of qubit 0 (block-diagonal split).
    half = 2 ** (n - 1)
    blocks = [rho[:half, :half], rho[half:, half:]]
    probs = [float(np.trace(b).real) for b in blocks]
    env_keep = [q - 1 for q in fragment]
    mix = np.zeros((2 ** len(fragment),) * 2, dtype=complex)
    cond_entropy = 0.0
    for p, b in zip(probs, blocks):
        if p <= 1e-12:
            continue
        cond = ptrace(b / p, env_keep, n - 1)
        mix += p * cond
        cond_entropy += p * entropy_bits(cond)
    chi = entropy_bits(mix) - cond_entropy
    return mi, chi, mi - chi


def main():
    print("# golden information values: {(qubits, variant): [(mi, holevo, discord), ...]}")
    print("# fragment f = environment qubits (1, ..., f), ascending sweep")
    print("GOLDEN_INFO = {")
    for (nq, var), strengths in sorted(PRESETS.items()):
        amps = branching_state(math.pi / 2, strengths)
        rows = []
        for f in range(1, nq):
            fragment = list(range(1, f + 1))
            rows.append(info_row(amps, nq, fragment))
        body = ",\n        ".join(
            f"({mi:.15f}, {chi:.15f}, {d:.15f})" for mi, chi, d in rows
        )
        print(f'    ({nq}, "{var}"): [\n        {body},\n    ],')
    print("}")


if __name__ == "__main__":
    main()
