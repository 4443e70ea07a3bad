#!/usr/bin/env python3
"""Walk through the teleportation primitive the protocol is built on.

A sender measures (payload, channel half) in the Bell basis; the receiver
half instantly carries the payload up to one of four Pauli corrections
determined by the shared Bell label and the 2-bit outcome. Without those two
bits the receiver sees pure noise.
"""

import numpy as np

from qpv import (
    BellLabel,
    BsmOutcome,
    PauliFrame,
    Register,
    apply_pauli,
    fidelity,
    pauli_frame_from,
)
from qpv.quantum import random_qubit_state

rng = np.random.default_rng(7)

print("== one teleportation, step by step ==")
payload_vec = random_qubit_state(rng)
print(f"payload amplitudes: {np.round(payload_vec, 4)}")

shared = BellLabel(1, 0)
reg = Register(rng=rng)
payload = reg.add_qubit(payload_vec, owner="sender")
sender_half, receiver_half = reg.add_bell(shared, owner_first="sender", owner_second="receiver")

outcome = reg.bsm(payload, sender_half)
frame = pauli_frame_from(shared, outcome)
print(f"shared label ({shared.a},{shared.b}), BSM outcome ({outcome.first},{outcome.second})"
      f" -> correction k={frame.k} k'={frame.k_prime}")

raw_fidelity = reg.fidelity(receiver_half, payload_vec)
print(f"receiver fidelity before correction: {raw_fidelity:.4f}")

# undo sigma_z^k sigma_x^k' by applying sigma_x^k' then sigma_z^k
reg.state = apply_pauli(reg.state, receiver_half, PauliFrame(0, frame.k_prime))
reg.state = apply_pauli(reg.state, receiver_half, PauliFrame(frame.k, 0))
print(f"receiver fidelity after correction:  {reg.fidelity(receiver_half, payload_vec):.6f}")

print()
print("== without the classical bits the receiver learns nothing ==")
counts = np.zeros(4, dtype=int)
for _ in range(2000):
    reg = Register(rng=rng)
    p = reg.add_qubit(payload_vec)
    s, r = reg.add_bell(BellLabel(0, 0))
    counts[reg.bsm(p, s).index] += 1
print(f"outcome frequencies over 2000 teleports: {counts / counts.sum()}")
print("each correction is equally likely, so the uncorrected half is maximally mixed")

print()
print("== the four-case correction table ==")
for label_index in range(4):
    shared = BellLabel.from_index(label_index)
    row = []
    for outcome_index in range(4):
        f = pauli_frame_from(shared, BsmOutcome.from_index(outcome_index))
        row.append(f"bb'={outcome_index:02b} -> (k={f.k}, k'={f.k_prime})")
    print(f"shared |{shared.a}{shared.b}>: " + "  ".join(row))
