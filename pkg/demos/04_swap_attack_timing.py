#!/usr/bin/env python3
"""The entanglement-swapping attack: perfect content, fatally late.

P1 swaps its intercepted channel half with a pre-shared pair so the
challenge lands on P2's qubit, and the colluders reconstruct exactly the
responses an honest prover would give. The classical relays still cost light
time: V1's correct copy cannot arrive before 2x + delta, past the deadline.
Disabling the timing check (diagnostic mode) shows the content alone would
always be accepted.
"""

from qpv import AttackConfig, ProtocolConfig, run_attack
from qpv.spacetime import format_event_log

x = 1.0
print(f"{'delta':>7} {'verdict':>16} {'complete at':>12} {'deadline':>9} {'diagnostic':>11}")
for delta in (0.05, 0.1, 0.25, 0.5):
    config = AttackConfig(strategy="swap_and_forward", delta=delta, protocol=ProtocolConfig(n=2, x=x))
    timed = run_attack(config, seed=1)
    content = run_attack(config, seed=1, diagnostic=True)
    verdict = f"REJECT({timed.verdict.reason})" if not timed.verdict.accepted else "ACCEPT"
    print(f"{delta:>7} {verdict:>16} {timed.earliest_complete_response_time:>12.4f} {2 * x:>9} "
          f"{'ACCEPT' if content.verdict.accepted else 'REJECT':>11}")

print()
print("== full event timeline for delta = 0.25 ==")
outcome = run_attack(AttackConfig(strategy="swap_and_forward", delta=0.25,
                                  protocol=ProtocolConfig(n=1, x=x)), seed=1)
print(format_event_log(outcome.events))
print()
print("== bounded-rounds variant: free local processing does not help ==")
for rounds in (1, 2, 4):
    config = AttackConfig(strategy="bounded_rounds", rounds=rounds, delta=0.1,
                          protocol=ProtocolConfig(n=1, x=x))
    outcome = run_attack(config, seed=2)
    print(f"r={rounds}: colluders agree at t={outcome.agreement_time:.4f} (= x + 2*delta), "
          f"complete at t={outcome.earliest_complete_response_time:.4f}, "
          f"verdict {'ACCEPT' if outcome.verdict.accepted else 'REJECT(' + outcome.verdict.reason + ')'}")
