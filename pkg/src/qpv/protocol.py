"""Verifier/prover state machines for the position-verification protocol.

Honest choreography (per entangled pair, prover at distance x from both
verifiers, c = 1):

1. t = 0:   V1 and V2 each secretly prepare a Bell pair and send one half
            toward the prover's position.
2. t = x:   V1 teleports the challenge eigenstate over its channel, keeping
            the BSM outcome ``w'`` secret.
3. t = x:   the prover measures its (now corrected) half in the agreed
            Hadamard basis, re-prepares the measured eigenstate, teleports it
            to V2 over the second channel, and simultaneously announces its
            BSM result and the state report to both verifiers.
4. t = 2x:  both verifiers check consistency and timing, then pool their
            verdicts at a zero-cost virtual meeting point.

The prover cannot clone its corrected half, so step 3 re-prepares the
measured Hadamard eigenstate; the physical state report is carried as the
measurement bit, which is lossless for |+>/|-> challenges. The verifiers'
checks and the verdict pooling are shared verbatim with the adversary runs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .quantum import BatchRegister, BellLabel, BsmOutcome, pauli_frame_from
from .spacetime import Actor, CausalityViolationError, Event, Timeline, verify_causality

SPEED_OF_LIGHT = 1.0

VARIANT_TWO_BIT = "two_bit"
VARIANT_SINGLE_BIT = "single_bit"
VARIANTS = (VARIANT_TWO_BIT, VARIANT_SINGLE_BIT)

REASON_OK = "ok"
REASON_TIMING = "timing"
REASON_V1 = "v1_inconsistent"
REASON_V2 = "v2_inconsistent"

_MISSING = -1
_TIME_EPS = 1e-12


@dataclass
class ProtocolConfig:
    """Parameters of one protocol instance."""

    n: int = 4
    x: float = 1.0
    challenge_states: Sequence[int] | None = None
    bell_labels_v1: Sequence[BellLabel] | None = None
    bell_labels_v2: Sequence[BellLabel] | None = None
    variant: str = VARIANT_TWO_BIT
    deadline_slack: float = 0.0
    strict_duplicates: bool = False
    prover_delay: float = 0.0  # fault injection: extra delay on the prover's response

    def validate(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not (self.x > 0):
            raise ValueError(f"x must be positive, got {self.x}")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.deadline_slack < 0:
            raise ValueError("deadline_slack must be >= 0")
        if self.prover_delay < 0:
            raise ValueError("prover_delay must be >= 0")
        for name in ("challenge_states", "bell_labels_v1", "bell_labels_v2"):
            seq = getattr(self, name)
            if seq is not None and len(seq) != self.n:
                raise ValueError(f"{name} must have length n={self.n}")
        if self.challenge_states is not None:
            for bit in self.challenge_states:
                if bit not in (0, 1):
                    raise ValueError("challenge states must be bits (0 = |+>, 1 = |->)")


def deadline(config: ProtocolConfig) -> float:
    """Latest acceptable arrival time for prover responses: 2x/c + slack."""
    return 2.0 * config.x / SPEED_OF_LIGHT + config.deadline_slack


@dataclass
class PairTranscript:
    """Per-pair record of all classical values and timestamps."""

    w_prime: BsmOutcome
    pp_prime: "BsmOutcome | int | None"
    prover_state_report: int | None
    v2_outcome: int | None
    timestamps: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        pp = self.pp_prime
        if isinstance(pp, BsmOutcome):
            pp = [pp.first, pp.second]
        return {
            "w_prime": [self.w_prime.first, self.w_prime.second],
            "pp_prime": pp,
            "prover_state_report": self.prover_state_report,
            "v2_outcome": self.v2_outcome,
            "timestamps": {k: self.timestamps[k] for k in sorted(self.timestamps)},
        }


def transcripts_to_json(transcripts: Sequence[PairTranscript]) -> str:
    """Stable structured-text serialization: one record per pair."""
    return json.dumps([t.to_dict() for t in transcripts], indent=2)


@dataclass
class Verdict:
    accepted: bool
    reason: str
    pair_passes: list[bool]


def verify_v1(psi: int, reported_state: int, w_prime: BsmOutcome, shared: BellLabel) -> bool:
    """V1's consistency check of the reported state against its own teleport.

    The corrected half is sigma_z^k sigma_x^k' |psi>, whose Hadamard value for
    |+>/|-> challenges is psi xor k.
    """
    frame = pauli_frame_from(shared, w_prime)
    return reported_state == (psi ^ frame.k)


def reduce_announcement(pp_prime: BsmOutcome, shared: BellLabel) -> int:
    """Single announcement bit that keeps the phase-flip exponent reconstructible.

    The verifier holding ``shared`` recovers k = shared.a xor p, which is all
    the Hadamard-basis check needs; the bit-flip half of the correction only
    changes |+>/|-> by an overall phase. Exhaustively consistent with
    ``pauli_frame_from`` on all 16 (shared, outcome) combinations.
    """
    del shared  # the first outcome bit suffices for every shared label
    return pp_prime.first


def verify_v2(
    reported_state: int,
    announcement: "BsmOutcome | int",
    v2_measured: int,
    shared: BellLabel,
    variant: str = VARIANT_TWO_BIT,
) -> bool:
    """V2's consistency check of its decoded measurement against the report."""
    if variant == VARIANT_TWO_BIT:
        if not isinstance(announcement, BsmOutcome):
            raise ValueError("two_bit variant requires a full BsmOutcome announcement")
        l = pauli_frame_from(shared, announcement).k
    elif variant == VARIANT_SINGLE_BIT:
        if isinstance(announcement, BsmOutcome) or announcement not in (0, 1):
            raise ValueError("single_bit variant requires a one-bit announcement")
        l = shared.a ^ announcement
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return v2_measured == (reported_state ^ l)


class MaterialStore:
    """Prover materials received by one verifier; first arrival of each kind wins."""

    def __init__(self, n: int):
        self.n = n
        self.report = np.full(n, _MISSING, dtype=np.int64)
        self.report_time = math.inf
        self.announcement = np.full(n, _MISSING, dtype=np.int64)
        self.announcement_time = math.inf

    def ingest_report(self, bits: np.ndarray, time: float) -> None:
        if time < self.report_time:
            self.report = np.asarray(bits, dtype=np.int64).copy()
            self.report_time = time

    def ingest_announcement(self, values: np.ndarray, time: float) -> None:
        if time < self.announcement_time:
            self.announcement = np.asarray(values, dtype=np.int64).copy()
            self.announcement_time = time

    def has_report(self) -> bool:
        return math.isfinite(self.report_time)


def _announcement_obj(value: int, variant: str) -> "BsmOutcome | int":
    return BsmOutcome.from_index(int(value)) if variant == VARIANT_TWO_BIT else int(value)


def judge(
    config: ProtocolConfig,
    challenges: np.ndarray,
    labels_v1: Sequence[BellLabel],
    labels_v2: Sequence[BellLabel],
    w_prime: Sequence[BsmOutcome],
    v2_measured: np.ndarray | None,
    materials_v1: MaterialStore,
    materials_v2: MaterialStore,
    enforce_deadline: bool = True,
) -> Verdict:
    """Pooled verdict over both verifiers' knowledge and received materials.

    Identical for honest runs and attacks. A report copy failing V1's
    expectation (either verifier's copy) is a v1 inconsistency; a decode
    failure at V2 or mismatching announcement duplicates is a v2
    inconsistency. Missing or late required materials fail on timing.
    Announcement duplicates are compared only when both copies are usable;
    a missing duplicate counts against the prover only under
    ``config.strict_duplicates``.
    """
    cutoff = deadline(config) + _TIME_EPS

    def usable(time: float) -> bool:
        return math.isfinite(time) and (not enforce_deadline or time <= cutoff)

    r1_ok_time = usable(materials_v1.report_time)
    r2_ok_time = usable(materials_v2.report_time)
    a1_ok_time = usable(materials_v1.announcement_time)
    a2_ok_time = usable(materials_v2.announcement_time)

    timing_fail = v1_fail = v2_fail = False
    pair_passes: list[bool] = []
    for i in range(config.n):
        timing_ok = r1_ok_time and r2_ok_time and a2_ok_time and (v2_measured is not None)
        if config.strict_duplicates:
            timing_ok = timing_ok and a1_ok_time

        v1_ok = False
        if r1_ok_time and r2_ok_time:
            psi = int(challenges[i])
            v1_ok = verify_v1(psi, int(materials_v1.report[i]), w_prime[i], labels_v1[i]) and verify_v1(
                psi, int(materials_v2.report[i]), w_prime[i], labels_v1[i]
            )

        v2_ok = False
        if r2_ok_time and a2_ok_time and v2_measured is not None:
            v2_ok = verify_v2(
                int(materials_v2.report[i]),
                _announcement_obj(materials_v2.announcement[i], config.variant),
                int(v2_measured[i]),
                labels_v2[i],
                config.variant,
            )

        if a1_ok_time and a2_ok_time:
            dup_ok = int(materials_v1.announcement[i]) == int(materials_v2.announcement[i])
        else:
            dup_ok = not config.strict_duplicates

        ok = timing_ok and v1_ok and v2_ok and dup_ok
        pair_passes.append(ok)
        timing_fail = timing_fail or not timing_ok
        v1_fail = v1_fail or not v1_ok
        v2_fail = v2_fail or not (v2_ok and dup_ok)

    if not any([timing_fail, v1_fail, v2_fail]):
        return Verdict(True, REASON_OK, pair_passes)
    if timing_fail:
        reason = REASON_TIMING
    elif v1_fail:
        reason = REASON_V1
    else:
        reason = REASON_V2
    return Verdict(False, reason, pair_passes)


class TrialCore:
    """Verifier-side machinery shared by honest runs and adversary runs.

    Owns the timeline, the two channel registers, the verifiers' secret
    choices and received materials, and the pooled verdicts. Each trial's
    generator is consumed in event order: challenge sampling first, then each
    quantum measurement as its event executes.

    With ``trial_seeds`` the core simulates many independent trials of the
    same configuration in one pass: the registers gain a trial dimension
    (``slots = trials * n`` rows) while the choreography, messages, and
    ledger run once, since message timing never depends on sampled values.
    Each trial keeps its own generator, so row outcomes are bit-identical to
    running the trials one at a time.
    """

    ACTOR_V1 = 0
    ACTOR_V2 = 1
    ACTOR_PROVER = 2
    ACTOR_P1 = 3
    ACTOR_P2 = 4
    ACTOR_POOL = 9

    def __init__(self, config: ProtocolConfig, seed: int | None = None,
                 trial_seeds: Sequence[int] | None = None):
        config.validate()
        self.config = config
        self.n = config.n
        self.x = config.x
        if trial_seeds is not None:
            self.trials = len(trial_seeds)
            self.rngs = [np.random.default_rng(s) for s in trial_seeds]
        else:
            self.trials = 1
            self.rngs = [np.random.default_rng(seed)]
        self.slots = self.n * self.trials
        self.v1 = Actor(self.ACTOR_V1, "V1", "verifier", 0.0)
        self.v2 = Actor(self.ACTOR_V2, "V2", "verifier", 2.0 * config.x)
        self.pool = Actor(self.ACTOR_POOL, "pool", "virtual", config.x)

        if config.challenge_states is not None:
            fixed = np.asarray(config.challenge_states, dtype=np.int64)
            self.challenges = np.tile(fixed, self.trials)
        else:
            self.challenges = self.sample_bits()
        self.labels_v1 = list(config.bell_labels_v1) if config.bell_labels_v1 is not None else [BellLabel(0, 0)] * self.n
        self.labels_v2 = list(config.bell_labels_v2) if config.bell_labels_v2 is not None else [BellLabel(0, 0)] * self.n

        self.reg_v1side = BatchRegister(self.slots)
        self.reg_v2side = BatchRegister(self.slots)
        self.q_v1 = self.q_p1 = None  # handles, filled at prepare
        self.q_v2 = self.q_p2 = None

        self.w_prime: np.ndarray | None = None  # outcome indices, V1's secret
        self.w_prime_value = None
        self.v2_measured: np.ndarray | None = None
        self.v2_measured_at = math.inf
        self.materials_v1 = MaterialStore(self.slots)
        self.materials_v2 = MaterialStore(self.slots)
        self.verdicts: list[Verdict] | None = None
        self.timeline: Timeline | None = None
        self.timestamps: dict[str, float] = {}

    # -- per-trial randomness ---------------------------------------------------

    def sample_uniforms(self) -> np.ndarray:
        """One uniform per register row, drawn from each trial's own generator."""
        if self.trials == 1:
            return self.rngs[0].random(self.n)
        return np.concatenate([rng.random(self.n) for rng in self.rngs])

    def sample_bits(self) -> np.ndarray:
        if self.trials == 1:
            return self.rngs[0].integers(0, 2, size=self.n)
        return np.concatenate([rng.integers(0, 2, size=self.n) for rng in self.rngs])

    def tile_labels(self, labels: Sequence[BellLabel]) -> np.ndarray:
        per_pair = np.array([lab.index for lab in labels], dtype=np.intp)
        return np.tile(per_pair, self.trials) if self.trials > 1 else per_pair

    # -- setup ----------------------------------------------------------------

    def setup_timeline(self, extra_actors: Sequence[Actor]) -> Timeline:
        self.timeline = Timeline([self.v1, self.v2, self.pool, *extra_actors])
        return self.timeline

    def schedule_verifier_prep(self, p1_receiver: Actor, p1_handler, p2_receiver: Actor, p2_handler) -> None:
        """t = 0: both verifiers prepare Bell pairs and launch the second halves."""
        tl = self.timeline

        def v1_prepare() -> None:
            labels = self.tile_labels(self.labels_v1)
            self.q_v1, self.q_p1 = self.reg_v1side.append_bell(labels, self.v1.id, self.v1.id)
            tl.new_value(self.v1, "bell_labels_v1", labels)
            tl.new_value(self.v1, "challenges", self.challenges)
            tl.send(self.v1, p1_receiver, "channel_half_v1", qubits=[self.q_p1], handler=p1_handler)

        def v2_prepare() -> None:
            labels = self.tile_labels(self.labels_v2)
            self.q_v2, self.q_p2 = self.reg_v2side.append_bell(labels, self.v2.id, self.v2.id)
            tl.new_value(self.v2, "bell_labels_v2", labels)
            tl.send(self.v2, p2_receiver, "channel_half_v2", qubits=[self.q_p2], handler=p2_handler)

        tl.schedule(0.0, self.v1, "prepare", v1_prepare, "prepare Bell pairs, send halves")
        tl.schedule(0.0, self.v2, "prepare", v2_prepare, "prepare Bell pairs, send halves")
        self.timestamps["halves_sent"] = 0.0

    def schedule_v1_teleport(self) -> None:
        """t = x: V1 teleports the challenge eigenstates, keeping w' secret."""
        tl = self.timeline

        def teleport() -> None:
            payload = self.reg_v1side.append_hadamard_eigenstates(self.challenges, self.v1.id)
            outcomes = self.reg_v1side.bsm(payload, self.q_v1, self.sample_uniforms())
            self.w_prime = outcomes
            self.w_prime_value = tl.new_value(self.v1, "w_prime", outcomes)
            tl.collapse_notice(self.v1, [self.q_p1], "challenge teleported onto far halves")
            self.timestamps["challenge_teleported"] = tl.now

        tl.schedule(self.x, self.v1, "teleport", teleport, "teleport challenges over channel 1")

    # -- verifier-side reception ----------------------------------------------

    def _ingest(self, store: MaterialStore, message) -> None:
        for value in message.values:
            if value.name == "state_report":
                store.ingest_report(value.payload, message.arrival_time)
            elif value.name == "announcement":
                store.ingest_announcement(value.payload, message.arrival_time)

    def v1_receive(self, message) -> None:
        self._ingest(self.materials_v1, message)

    def v2_receive(self, message) -> None:
        self._ingest(self.materials_v2, message)
        if self.v2_measured is None and self.materials_v2.has_report():
            bits = self.reg_v2side.hadamard_measure(self.q_v2, self.sample_uniforms())
            self.v2_measured = bits
            self.v2_measured_at = self.timeline.now
            self.timeline.new_value(self.v2, "v2_outcomes", bits)
            self.timeline.collapse_notice(self.v2, [self.q_v2], "decoded halves measured in Hadamard basis")

    # -- pooling ----------------------------------------------------------------

    def schedule_pool(self) -> None:
        tl = self.timeline

        def pool_event() -> None:
            self.verdicts = self.compute_verdicts(enforce_deadline=True)
            self.timestamps["pooled_at"] = tl.now

        tl.schedule(deadline(self.config), self.pool, "pool", pool_event, "verifiers exchange outcomes and decide")

    def _materials_slice(self, store: MaterialStore, trial: int) -> MaterialStore:
        view = MaterialStore.__new__(MaterialStore)
        view.n = self.n
        lo, hi = trial * self.n, (trial + 1) * self.n
        view.report = store.report[lo:hi]
        view.report_time = store.report_time
        view.announcement = store.announcement[lo:hi]
        view.announcement_time = store.announcement_time
        return view

    def compute_verdicts(self, enforce_deadline: bool = True) -> list[Verdict]:
        if self.w_prime is None:
            return [Verdict(False, REASON_TIMING, [False] * self.n) for _ in range(self.trials)]
        verdicts = []
        for trial in range(self.trials):
            lo, hi = trial * self.n, (trial + 1) * self.n
            w = [BsmOutcome.from_index(int(idx)) for idx in self.w_prime[lo:hi]]
            verdicts.append(judge(
                self.config,
                self.challenges[lo:hi],
                self.labels_v1,
                self.labels_v2,
                w,
                self.v2_measured[lo:hi] if self.v2_measured is not None else None,
                self._materials_slice(self.materials_v1, trial),
                self._materials_slice(self.materials_v2, trial),
                enforce_deadline=enforce_deadline,
            ))
        return verdicts

    def compute_verdict(self, enforce_deadline: bool = True) -> Verdict:
        return self.compute_verdicts(enforce_deadline=enforce_deadline)[0]

    # -- runner -----------------------------------------------------------------

    def run_events(self) -> list[Event]:
        events = self.timeline.run_until_quiescent()
        violations = verify_causality(self.timeline)
        if violations:
            raise CausalityViolationError("; ".join(violations))
        return events

    def build_transcripts(self) -> list[PairTranscript]:
        """Per-pair records; report is V1's copy, announcement is V2's copy."""
        if self.trials != 1:
            raise ValueError("transcripts are only assembled for single-trial runs")
        transcripts = []
        common = dict(self.timestamps)
        common["report_v1_arrived"] = self.materials_v1.report_time
        common["report_v2_arrived"] = self.materials_v2.report_time
        common["announcement_v1_arrived"] = self.materials_v1.announcement_time
        common["announcement_v2_arrived"] = self.materials_v2.announcement_time
        common["v2_measured_at"] = self.v2_measured_at
        for i in range(self.n):
            w = BsmOutcome.from_index(int(self.w_prime[i])) if self.w_prime is not None else BsmOutcome(0, 0)
            ann = None
            if math.isfinite(self.materials_v2.announcement_time):
                ann = _announcement_obj(self.materials_v2.announcement[i], self.config.variant)
            report = int(self.materials_v1.report[i]) if math.isfinite(self.materials_v1.report_time) else None
            v2_out = int(self.v2_measured[i]) if self.v2_measured is not None else None
            transcripts.append(PairTranscript(w, ann, report, v2_out, dict(common)))
        return transcripts


class _HonestProver:
    """Honest prover: measure, re-prepare, teleport onward, announce to both."""

    def __init__(self, core: TrialCore):
        self.core = core
        self.actor = Actor(TrialCore.ACTOR_PROVER, "P", "prover", core.x)
        self._halves = 0

    def on_half(self, message) -> None:
        self._halves += 1
        if self._halves == 2:
            self.core.timeline.schedule(self.core.timeline.now, self.actor, "respond", self.respond,
                                        "measure, re-prepare, teleport onward, announce")

    def respond(self) -> None:
        core, tl = self.core, self.core.timeline
        reports = core.reg_v1side.hadamard_measure(core.q_p1, core.sample_uniforms())
        tl.collapse_notice(self.actor, [core.q_p1], "corrected halves measured in Hadamard basis")
        fresh = core.reg_v2side.append_hadamard_eigenstates(reports, self.actor.id)
        pp = core.reg_v2side.bsm(fresh, core.q_p2, core.sample_uniforms())
        tl.collapse_notice(self.actor, [core.q_v2], "re-prepared eigenstates teleported to V2")
        core.timestamps["prover_measured"] = tl.now

        report_value = tl.new_value(self.actor, "state_report", reports)
        announced = pp if core.config.variant == VARIANT_TWO_BIT else (pp >> 1)
        ann_value = tl.new_value(self.actor, "announcement", announced)
        emit = tl.now + core.config.prover_delay
        core.timestamps["response_emitted"] = emit
        tl.send(self.actor, core.v1, "prover_response", values=[report_value, ann_value],
                handler=core.v1_receive, emit_time=emit)
        tl.send(self.actor, core.v2, "prover_response", values=[report_value, ann_value],
                handler=core.v2_receive, emit_time=emit)


def _execute_honest(core: TrialCore) -> list[Event]:
    prover = _HonestProver(core)
    core.setup_timeline([prover.actor])
    core.schedule_verifier_prep(prover.actor, prover.on_half, prover.actor, prover.on_half)
    core.schedule_v1_teleport()
    core.schedule_pool()
    return core.run_events()


def run_honest(
    config: ProtocolConfig,
    seed: int | None = None,
    collect_transcripts: bool = True,
) -> tuple[Verdict, list[PairTranscript], list[Event]]:
    """Execute one honest protocol instance; returns (verdict, transcripts, event log)."""
    core = TrialCore(config, seed)
    events = _execute_honest(core)
    transcripts = core.build_transcripts() if collect_transcripts else []
    return core.verdicts[0], transcripts, events


def run_honest_batch(config: ProtocolConfig, trial_seeds: Sequence[int]) -> list[Verdict]:
    """Many honest trials in one vectorized pass; row-identical to serial runs."""
    core = TrialCore(config, trial_seeds=trial_seeds)
    _execute_honest(core)
    return core.verdicts
