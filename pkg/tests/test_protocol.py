"""Tests for the honest protocol, verifier checks, and verdict pooling."""

import math

import numpy as np
import pytest

from qpv.protocol import (
    MaterialStore,
    ProtocolConfig,
    REASON_OK,
    REASON_TIMING,
    REASON_V1,
    REASON_V2,
    VARIANT_SINGLE_BIT,
    VARIANT_TWO_BIT,
    deadline,
    judge,
    reduce_announcement,
    run_honest,
    transcripts_to_json,
    verify_v1,
    verify_v2,
)
from qpv.quantum import BellLabel, BsmOutcome, pauli_frame_from
from qpv.spacetime import format_event_log

ALL_LABELS = [BellLabel.from_index(i) for i in range(4)]
ALL_OUTCOMES = [BsmOutcome.from_index(i) for i in range(4)]


def random_labels(rng, n):
    return [BellLabel.from_index(int(i)) for i in rng.integers(0, 4, size=n)]


class TestConfig:
    def test_defaults_valid(self):
        ProtocolConfig().validate()

    @pytest.mark.parametrize(
        "kwargs,match",
        [
            (dict(n=0), "n must be"),
            (dict(x=0.0), "x must be"),
            (dict(variant="three_bit"), "variant"),
            (dict(deadline_slack=-1.0), "slack"),
            (dict(n=2, challenge_states=[0]), "length"),
            (dict(n=1, challenge_states=[2]), "bits"),
        ],
    )
    def test_invalid(self, kwargs, match):
        with pytest.raises(ValueError, match=match):
            ProtocolConfig(**kwargs).validate()


class TestDeadline:
    @pytest.mark.parametrize(
        "x,slack,expected",
        [(1.0, 0.0, 2.0), (1.0, 0.1, 2.1), (2.5, 0.0, 5.0)],
    )
    def test_values(self, x, slack, expected):
        assert deadline(ProtocolConfig(x=x, deadline_slack=slack)) == expected


class TestVerifyV1:
    def test_identity_frame(self):
        assert verify_v1(0, 0, BsmOutcome(0, 0), BellLabel(0, 0)) is True

    def test_phase_flip_expected(self):
        assert verify_v1(0, 0, BsmOutcome(1, 0), BellLabel(0, 0)) is False

    def test_double_flip_cancels(self):
        # psi = -, shared (1,0), outcome (0,1): k = 1 flips - back to +
        assert verify_v1(1, 0, BsmOutcome(0, 1), BellLabel(1, 0)) is True

    def test_matches_frame_everywhere(self):
        for shared in ALL_LABELS:
            for outcome in ALL_OUTCOMES:
                k = pauli_frame_from(shared, outcome).k
                for psi in (0, 1):
                    assert verify_v1(psi, psi ^ k, outcome, shared)
                    assert not verify_v1(psi, psi ^ k ^ 1, outcome, shared)


class TestVerifyV2:
    def test_identity_frame(self):
        assert verify_v2(0, BsmOutcome(0, 0), 0, BellLabel(0, 0), VARIANT_TWO_BIT) is True

    def test_expected_flip_missing(self):
        assert verify_v2(0, BsmOutcome(1, 1), 0, BellLabel(0, 0), VARIANT_TWO_BIT) is False

    def test_single_bit_variant(self):
        assert verify_v2(0, 1, 1, BellLabel(0, 1), VARIANT_SINGLE_BIT) is True

    def test_malformed_announcements(self):
        with pytest.raises(ValueError, match="two_bit"):
            verify_v2(0, 1, 0, BellLabel(0, 0), VARIANT_TWO_BIT)
        with pytest.raises(ValueError, match="single_bit"):
            verify_v2(0, BsmOutcome(0, 0), 0, BellLabel(0, 0), VARIANT_SINGLE_BIT)
        with pytest.raises(ValueError, match="variant"):
            verify_v2(0, 1, 0, BellLabel(0, 0), "other")


class TestReduceAnnouncement:
    @pytest.mark.parametrize(
        "shared,pp,expected",
        [
            ((0, 0), (0, 1), 0),
            ((0, 0), (1, 0), 1),
            ((1, 0), (0, 0), 0),
        ],
    )
    def test_examples(self, shared, pp, expected):
        assert reduce_announcement(BsmOutcome(*pp), BellLabel(*shared)) == expected

    def test_reconstructs_phase_exponent_everywhere(self):
        for shared in ALL_LABELS:
            for pp in ALL_OUTCOMES:
                bit = reduce_announcement(pp, shared)
                assert (shared.a ^ bit) == pauli_frame_from(shared, pp).k

    def test_variants_agree_everywhere(self):
        for shared in ALL_LABELS:
            for pp in ALL_OUTCOMES:
                bit = reduce_announcement(pp, shared)
                for reported in (0, 1):
                    for measured in (0, 1):
                        assert verify_v2(reported, pp, measured, shared, VARIANT_TWO_BIT) == verify_v2(
                            reported, bit, measured, shared, VARIANT_SINGLE_BIT
                        )


class TestRunHonest:
    def test_single_pair_accepts_with_exact_arrivals(self):
        config = ProtocolConfig(n=1, x=1.0, challenge_states=[0])
        verdict, transcripts, events = run_honest(config, seed=7)
        assert verdict.accepted and verdict.reason == REASON_OK
        t = transcripts[0]
        assert t.timestamps["report_v1_arrived"] == 2.0
        assert t.timestamps["report_v2_arrived"] == 2.0
        assert t.timestamps["pooled_at"] == 2.0

    def test_many_configurations_always_accept(self):
        rng = np.random.default_rng(5)
        for seed in range(100):
            config = ProtocolConfig(
                n=16,
                x=3.5,
                bell_labels_v1=random_labels(rng, 16),
                bell_labels_v2=random_labels(rng, 16),
            )
            verdict, transcripts, _ = run_honest(config, seed=seed)
            assert verdict.accepted, f"seed {seed} rejected: {verdict.reason}"
            assert all(t.timestamps["report_v1_arrived"] == 7.0 for t in transcripts)

    def test_single_bit_variant_accepts(self):
        config = ProtocolConfig(n=4, x=1.0, variant=VARIANT_SINGLE_BIT)
        verdict, transcripts, _ = run_honest(config, seed=3)
        assert verdict.accepted
        assert all(t.pp_prime in (0, 1) for t in transcripts)

    def test_injected_delay_rejected_on_timing(self):
        config = ProtocolConfig(n=1, x=1.0, deadline_slack=0.0, prover_delay=0.1)
        verdict, _, _ = run_honest(config, seed=1)
        assert not verdict.accepted and verdict.reason == REASON_TIMING

    def test_slack_absorbs_delay(self):
        config = ProtocolConfig(n=1, x=1.0, deadline_slack=0.2, prover_delay=0.1)
        verdict, _, _ = run_honest(config, seed=1)
        assert verdict.accepted

    def test_variant_equivalence_on_transcripts(self):
        # two-bit transcripts re-checked under the single-bit reduction
        rng = np.random.default_rng(8)
        for seed in range(200):
            config = ProtocolConfig(n=2, bell_labels_v2=random_labels(rng, 2))
            _, transcripts, _ = run_honest(config, seed=seed)
            for i, t in enumerate(transcripts):
                shared = config.bell_labels_v2[i]
                full = verify_v2(t.prover_state_report, t.pp_prime, t.v2_outcome, shared, VARIANT_TWO_BIT)
                reduced = verify_v2(
                    t.prover_state_report,
                    reduce_announcement(t.pp_prime, shared),
                    t.v2_outcome,
                    shared,
                    VARIANT_SINGLE_BIT,
                )
                assert full is True and reduced is True

    def test_pooling_happens_at_deadline(self):
        config = ProtocolConfig(n=1, x=2.5)
        _, transcripts, events = run_honest(config, seed=0)
        assert transcripts[0].timestamps["pooled_at"] == 5.0
        pool_events = [e for e in events if e.kind == "pool"]
        assert len(pool_events) == 1 and pool_events[0].time == 5.0

    def test_event_log_serializes(self):
        _, _, events = run_honest(ProtocolConfig(n=1), seed=0)
        text = format_event_log(events)
        assert "teleport" in text and "prover_response" in text


class _JudgeFixture:
    """Synthetic honest-looking materials for direct judge() tests."""

    def __init__(self, n=1, variant=VARIANT_TWO_BIT, strict=False):
        self.config = ProtocolConfig(n=n, x=1.0, variant=variant, strict_duplicates=strict)
        self.challenges = np.zeros(n, dtype=np.int64)
        self.labels = [BellLabel(0, 0)] * n
        self.w = [BsmOutcome(0, 0)] * n
        self.v2_measured = np.zeros(n, dtype=np.int64)
        self.v1 = MaterialStore(n)
        self.v2 = MaterialStore(n)
        zeros = np.zeros(n, dtype=np.int64)
        self.v1.ingest_report(zeros, 2.0)
        self.v2.ingest_report(zeros, 2.0)
        self.v1.ingest_announcement(zeros, 2.0)
        self.v2.ingest_announcement(zeros, 2.0)

    def verdict(self, enforce_deadline=True):
        return judge(self.config, self.challenges, self.labels, self.labels, self.w,
                     self.v2_measured, self.v1, self.v2, enforce_deadline=enforce_deadline)


class TestJudge:
    def test_consistent_materials_accept(self):
        assert _JudgeFixture().verdict().accepted

    def test_mismatched_announcement_copies_rejected(self):
        fx = _JudgeFixture()
        fx.v1.announcement = np.array([2])  # differs from V2's copy
        verdict = fx.verdict()
        assert not verdict.accepted and verdict.reason == REASON_V2

    def test_report_copy_failing_v1_check(self):
        fx = _JudgeFixture()
        fx.v2.report = np.array([1])  # V2's copy contradicts V1's expectation
        verdict = fx.verdict()
        assert not verdict.accepted and verdict.reason == REASON_V1

    def test_late_material_is_timing(self):
        fx = _JudgeFixture()
        fx.v1.report_time = 2.5
        verdict = fx.verdict()
        assert not verdict.accepted and verdict.reason == REASON_TIMING
        assert fx.verdict(enforce_deadline=False).accepted

    def test_missing_duplicate_lenient_vs_strict(self):
        lenient = _JudgeFixture(strict=False)
        lenient.v1.announcement_time = math.inf
        assert lenient.verdict().accepted
        strict = _JudgeFixture(strict=True)
        strict.v1.announcement_time = math.inf
        verdict = strict.verdict()
        assert not verdict.accepted

    def test_timing_outranks_content_in_reason(self):
        fx = _JudgeFixture(n=2)
        fx.v1.report_time = 3.0
        fx.v2.report = np.array([1, 0])
        assert fx.verdict().reason == REASON_TIMING


class TestTranscriptSerialization:
    def test_round_trip_stability(self):
        config = ProtocolConfig(n=2, x=1.0)
        _, transcripts_a, _ = run_honest(config, seed=11)
        _, transcripts_b, _ = run_honest(config, seed=11)
        assert transcripts_to_json(transcripts_a) == transcripts_to_json(transcripts_b)

    def test_fields_present(self):
        _, transcripts, _ = run_honest(ProtocolConfig(n=1), seed=2)
        record = transcripts[0].to_dict()
        assert set(record) == {"w_prime", "pp_prime", "prover_state_report", "v2_outcome", "timestamps"}
