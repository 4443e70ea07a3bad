"""Brute-force oracles for the quantum primitives.

Everything here recomputes expected results by direct dense linear algebra
(kron products and explicit projections) without going through the register
operations in :mod:`qpv.quantum`, so the two routes stay independent. The
selftest command and the test suite compare the implementation against these.
"""

from __future__ import annotations

import numpy as np

from . import quantum
from .quantum import BellLabel, BsmOutcome, SQRT_HALF


def bell_state(a: int, b: int) -> np.ndarray:
    """(|0>|b> + (-1)^a |1>|1 xor b>)/sqrt(2) as a plain 4-vector."""
    vec = np.zeros(4, dtype=complex)
    vec[0 * 2 + b] = SQRT_HALF
    vec[1 * 2 + (1 - b)] = ((-1.0) ** a) * SQRT_HALF
    return vec


def equal_up_to_phase(u: np.ndarray, v: np.ndarray, tol: float = 1e-9) -> bool:
    u = np.asarray(u, dtype=complex).reshape(-1)
    v = np.asarray(v, dtype=complex).reshape(-1)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu < tol or nv < tol:
        return nu < tol and nv < tol
    return bool(abs(abs(np.vdot(u, v)) / (nu * nv) - 1.0) <= tol)


def bell_projection_norms(two_qubit_state: np.ndarray) -> np.ndarray:
    """Squared overlaps of a 2-qubit state with the four Bell states."""
    state = np.asarray(two_qubit_state, dtype=complex).reshape(4)
    return np.array([abs(np.vdot(bell_state(o >> 1, o & 1), state)) ** 2 for o in range(4)])


def bsm_norms_payload_with_bell_half(payload: np.ndarray, shared_a: int, shared_b: int) -> np.ndarray:
    """Projection norms for a BSM on (payload, first half of a Bell pair).

    Register layout: qubit 0 payload, qubits 1-2 the Bell pair; the BSM acts
    on qubits (0, 1).
    """
    full = np.kron(np.asarray(payload, dtype=complex), bell_state(shared_a, shared_b))
    tensor = full.reshape(2, 2, 2)
    norms = np.zeros(4)
    for o in range(4):
        bra = bell_state(o >> 1, o & 1).conj().reshape(2, 2)
        residual = np.einsum("ps,psr->r", bra, tensor)
        norms[o] = float(np.vdot(residual, residual).real)
    return norms


def teleport_receiver_oracle(payload: np.ndarray, shared: BellLabel, outcome: BsmOutcome) -> np.ndarray:
    """Receiver-half state after a forced BSM outcome, by dense projection.

    Layout: qubit 0 payload, qubit 1 sender half, qubit 2 receiver half; the
    pair (1, 2) starts in the shared Bell state and the BSM projects (0, 1).
    Returns the normalized 2-vector left on qubit 2 (defined up to phase).
    """
    full = np.kron(np.asarray(payload, dtype=complex), bell_state(shared.a, shared.b))
    tensor = full.reshape(2, 2, 2)
    bra = bell_state(outcome.first, outcome.second).conj().reshape(2, 2)
    receiver = np.einsum("ps,psr->r", bra, tensor)
    norm = np.linalg.norm(receiver)
    if norm < 1e-12:
        raise ValueError("forced outcome has zero probability")
    return receiver / norm


def expected_receiver_state(payload: np.ndarray, k: int, k_prime: int) -> np.ndarray:
    """sigma_z^k sigma_x^k' |payload>, computed with explicit matrices."""
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    z = np.array([[1, 0], [0, -1]], dtype=complex)
    mat = np.eye(2, dtype=complex)
    if k_prime:
        mat = x @ mat
    if k:
        mat = z @ mat
    return mat @ np.asarray(payload, dtype=complex)


def swap_outer_label_oracle(shared1: BellLabel, shared2: BellLabel, outcome: BsmOutcome) -> BellLabel:
    """Outer-pair Bell label after an inner BSM, by dense projection.

    Layout: qubits (0, 1) in the first Bell state, (2, 3) in the second;
    the BSM projects the inner pair (1, 2). The collapsed (0, 3) state is
    matched against the four Bell states up to global phase.
    """
    full = np.kron(bell_state(shared1.a, shared1.b), bell_state(shared2.a, shared2.b))
    tensor = full.reshape(2, 2, 2, 2)
    bra = bell_state(outcome.first, outcome.second).conj().reshape(2, 2)
    outer = np.einsum("mk,amkd->ad", bra, tensor).reshape(4)
    norm = np.linalg.norm(outer)
    if norm < 1e-12:
        raise ValueError("forced outcome has zero probability")
    outer /= norm
    for idx in range(4):
        if equal_up_to_phase(outer, bell_state(idx >> 1, idx & 1)):
            return BellLabel.from_index(idx)
    raise ValueError("outer pair did not collapse to a Bell state")


# The correction-exponent table, spelled out as data for the selftest's
# comparison against the live implementation.
FRAME_TABLE = {
    (0, 0): lambda b, bp: (b, bp),
    (0, 1): lambda b, bp: (b, 1 ^ bp),
    (1, 0): lambda b, bp: (1 ^ b, bp),
    (1, 1): lambda b, bp: (1 ^ b, 1 ^ bp),
}


def frame_oracle(shared: BellLabel, outcome: BsmOutcome) -> tuple[int, int]:
    return FRAME_TABLE[(shared.a, shared.b)](outcome.first, outcome.second)


def random_payloads(count: int, seed: int) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    return [quantum.random_qubit_state(rng) for _ in range(count)]
