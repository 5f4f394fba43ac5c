import itertools

import numpy as np
import pytest

from cooplang import (
    DistanceConfig,
    ListenerPolicy,
    Message,
    NULL_MESSAGE,
    distribution_distance,
    enumerate_messages,
    enumerate_trajectories,
    listener_traj_dist,
    message_distance,
    optimal_message,
    positive_listening_test,
    positive_signalling_test,
    semantic_distance,
    trajectory_distance,
)
from cooplang.errors import (
    DistributionError,
    DomainMismatchError,
    SupportMismatchError,
    TooFewEpisodesError,
)


def point_mass(trajs, index):
    return {t: 1.0 if i == index else 0.0 for i, t in enumerate(trajs)}


class TestMessageDistance:
    def test_identity(self):
        assert message_distance(Message(("a", "b")), Message(("a", "b"))) == 0.0

    def test_single_substitution(self):
        assert message_distance(Message(("a",)), Message(("b",))) == 1.0

    def test_deletion_over_max_length(self):
        assert message_distance(Message(("a", "b")), Message(("a",))) == 0.5

    def test_null_message_distance(self):
        assert message_distance(NULL_MESSAGE, Message(("a",))) == 1.0
        assert message_distance(NULL_MESSAGE, NULL_MESSAGE) == 0.0

    def test_metric_axioms_on_random_triples(self, sm_2x2):
        msgs = enumerate_messages(sm_2x2, include_null=True)
        rng = np.random.default_rng(0)
        for _ in range(1000):
            x, y, z = (msgs[i] for i in rng.integers(len(msgs), size=3))
            dxy = message_distance(x, y)
            assert dxy == message_distance(y, x)
            assert (dxy == 0.0) == (x.tokens == y.tokens)
            assert message_distance(x, z) <= dxy + message_distance(y, z) + 1e-12


class TestTrajectoryDistance:
    def test_identity(self, lewis3):
        trajs = enumerate_trajectories(lewis3)
        assert trajectory_distance(trajs[0], trajs[0]) == 0.0

    def test_unit_for_different_picks(self, lewis3):
        trajs = enumerate_trajectories(lewis3)
        assert trajectory_distance(trajs[0], trajs[1]) == 1.0

    def test_one_edit_over_two_actions(self, sm_2x2):
        from cooplang import make_trajectory
        t1 = make_trajectory(sm_2x2, ["N", "E"])
        t2 = make_trajectory(sm_2x2, ["N", "W"])
        assert trajectory_distance(t1, t2) == 0.5

    def test_cross_game_rejected(self, lewis3, sm_2x2):
        t1 = enumerate_trajectories(lewis3)[0]
        t2 = enumerate_trajectories(sm_2x2)[0]
        with pytest.raises(DomainMismatchError):
            trajectory_distance(t1, t2)

    def test_metric_axioms_on_random_triples(self, sm_3x3):
        trajs = enumerate_trajectories(sm_3x3)
        rng = np.random.default_rng(1)
        for _ in range(1000):
            x, y, z = (trajs[i] for i in rng.integers(len(trajs), size=3))
            dxy = trajectory_distance(x, y)
            assert dxy == trajectory_distance(y, x)
            assert (dxy == 0.0) == (x.canonical_key == y.canonical_key)
            assert trajectory_distance(x, z) <= dxy + trajectory_distance(y, z) + 1e-12


class TestDistributionDistance:
    def test_point_masses_reduce_to_ground_metric(self, lewis3):
        trajs = enumerate_trajectories(lewis3)
        cfg = DistanceConfig()
        d = distribution_distance(point_mass(trajs, 0), point_mass(trajs, 1), cfg)
        assert d == trajectory_distance(trajs[0], trajs[1]) == 1.0

    def test_identical_distributions_are_zero(self, lewis3):
        trajs = enumerate_trajectories(lewis3)
        p = {t: 1 / 3 for t in trajs}
        for lift in ("wasserstein1", "total_variation"):
            assert distribution_distance(p, dict(p),
                                         DistanceConfig(dist_lift=lift)) == 0.0

    def test_half_mass_moves_at_unit_cost(self, lewis3):
        trajs = enumerate_trajectories(lewis3)
        p = {trajs[0]: 0.5, trajs[1]: 0.5, trajs[2]: 0.0}
        q = point_mass(trajs, 0)
        d = distribution_distance(p, q, DistanceConfig())
        assert d == pytest.approx(0.5, abs=1e-9)

    def test_support_mismatch_rejected(self, lewis3):
        trajs = enumerate_trajectories(lewis3)
        with pytest.raises(SupportMismatchError):
            distribution_distance(point_mass(trajs, 0),
                                  {trajs[0]: 1.0}, DistanceConfig())

    def test_non_normalized_rejected(self, lewis3):
        trajs = enumerate_trajectories(lewis3)
        bad = {t: 0.5 for t in trajs}
        with pytest.raises(DistributionError):
            distribution_distance(bad, bad, DistanceConfig())

    def test_support_cap_error_names_total_variation(self, lewis3):
        trajs = enumerate_trajectories(lewis3)
        cfg = DistanceConfig(wasserstein_support_cap=2)
        p = {t: 1 / 3 for t in trajs}
        q = {trajs[0]: 0.5, trajs[1]: 0.25, trajs[2]: 0.25}
        with pytest.raises(SupportMismatchError, match="total_variation"):
            distribution_distance(p, q, cfg)

    def test_zero_iff_equal_on_random_pairs(self, lewis3):
        trajs = enumerate_trajectories(lewis3)
        rng = np.random.default_rng(2)
        for _ in range(100):
            p = rng.dirichlet(np.ones(3))
            q = rng.dirichlet(np.ones(3))
            pd = dict(zip(trajs, p))
            qd = dict(zip(trajs, q))
            for lift in ("wasserstein1", "total_variation"):
                cfg = DistanceConfig(dist_lift=lift)
                assert distribution_distance(pd, dict(pd), cfg) == 0.0
                if not np.array_equal(p, q):
                    assert distribution_distance(pd, qd, cfg) > 0.0

    def test_wasserstein_symmetry_is_exact(self, lewis3):
        trajs = enumerate_trajectories(lewis3)
        rng = np.random.default_rng(3)
        cfg = DistanceConfig()
        for _ in range(50):
            pd = dict(zip(trajs, rng.dirichlet(np.ones(3))))
            qd = dict(zip(trajs, rng.dirichlet(np.ones(3))))
            assert (distribution_distance(pd, qd, cfg)
                    == distribution_distance(qd, pd, cfg))


class TestOptimalMessage:
    def test_codebook_lookup(self, lewis3, codebook_listener):
        trajs = enumerate_trajectories(lewis3)
        assert optimal_message(codebook_listener, lewis3,
                               trajs[1]).canonical() == "b"

    def test_message_blind_listener_returns_null(self, lewis3):
        blind = ListenerPolicy(codebook={}, epsilon=0.0)
        trajs = enumerate_trajectories(lewis3)
        assert optimal_message(blind, lewis3, trajs[0]).is_null()

    def test_supermarket_brute_force(self, sm_3x3):
        from cooplang import CommunityConfig, build_community, trajectory_return
        com = build_community(CommunityConfig(game=sm_3x3), 7)
        listener = com.listeners[0]
        best = max(
            com.trajectories(),
            key=lambda t: (trajectory_return(t, sm_3x3.gamma),
                           [-ord(c) for c in t.canonical_key]),
        )
        got = optimal_message(listener, sm_3x3, best)
        # brute force over every message incl. null
        scores = {}
        for msg in enumerate_messages(sm_3x3, include_null=True):
            dist = listener_traj_dist(listener, sm_3x3, msg)
            scores[msg.canonical()] = next(
                (p for t, p in dist.items()
                 if t.canonical_key == best.canonical_key), 0.0)
        assert scores[got.canonical()] == max(scores.values())
        assert got.canonical() in com.codebook
        assert com.codebook[got.canonical()] == best.actions


class TestSemanticDistance:
    def test_self_distance_zero(self, lewis3, codebook_listener):
        cfg = DistanceConfig()
        m = Message(("a",))
        assert semantic_distance(codebook_listener, lewis3, m, m, cfg) == 0.0

    def test_distinct_plans_at_unit_distance(self, lewis3, codebook_listener):
        cfg = DistanceConfig()
        assert semantic_distance(codebook_listener, lewis3, Message(("a",)),
                                 Message(("b",)), cfg) == 1.0

    def test_message_blind_listener_all_zero(self, lewis3):
        blind = ListenerPolicy(codebook={}, epsilon=0.0)
        cfg = DistanceConfig()
        msgs = enumerate_messages(lewis3, include_null=True)
        for m1, m2 in itertools.combinations(msgs, 2):
            assert semantic_distance(blind, lewis3, m1, m2, cfg) == 0.0

    @pytest.mark.parametrize("lift", ["wasserstein1", "total_variation"])
    def test_pseudo_metric_on_random_triples(self, lewis3, lift):
        listener = ListenerPolicy(
            codebook={"a": ("pick0",), "b": ("pick1",), "c": ("pick2",)},
            epsilon=0.3)
        cfg = DistanceConfig(dist_lift=lift)
        msgs = enumerate_messages(lewis3, include_null=True)
        rng = np.random.default_rng(4)
        for _ in range(200):
            x, y, z = (msgs[i] for i in rng.integers(len(msgs), size=3))
            dxy = semantic_distance(listener, lewis3, x, y, cfg)
            dyx = semantic_distance(listener, lewis3, y, x, cfg)
            assert dxy == dyx
            dxz = semantic_distance(listener, lewis3, x, z, cfg)
            dyz = semantic_distance(listener, lewis3, y, z, cfg)
            assert dxz <= dxy + dyz + 1e-12


class TestPositiveListening:
    def test_codebook_listener_detected(self, lewis3, codebook_listener):
        report = positive_listening_test(
            codebook_listener, lewis3, [()],
            enumerate_messages(lewis3), DistanceConfig())
        assert report.detected
        assert report.statistic == 1.0
        assert report.witness is not None

    def test_message_blind_listener_statistic_exactly_zero(self, lewis3):
        blind = ListenerPolicy(codebook={}, epsilon=0.0)
        report = positive_listening_test(
            blind, lewis3, [()], enumerate_messages(lewis3), DistanceConfig())
        assert not report.detected
        assert report.statistic == 0.0

    def test_half_noise_total_variation_statistic(self, lewis3):
        listener = ListenerPolicy(
            codebook={"a": ("pick0",), "b": ("pick1",), "c": ("pick2",)},
            epsilon=0.5)
        cfg = DistanceConfig(dist_lift="total_variation")
        report = positive_listening_test(
            listener, lewis3, [()], enumerate_messages(lewis3), cfg)
        assert report.statistic == pytest.approx(0.5, abs=1e-12)


def _episodes_from_dataset(dataset):
    return [((), rec.trajectory.actions, (rec.message.canonical(),))
            for rec in dataset.records]


class TestPositiveSignalling:
    def test_codebook_speaker_detected(self, lewis_community):
        from cooplang import collect
        dataset = collect(lewis_community, 300, master_seed=5)
        report = positive_signalling_test(
            _episodes_from_dataset(dataset), DistanceConfig(permutations=1000))
        assert report.detected
        assert report.p_value <= 0.01

    def test_constant_message_speaker_not_detected(self):
        episodes = [((), ("pick0",), ("a",)) for _ in range(60)]
        report = positive_signalling_test(episodes, DistanceConfig())
        assert report.statistic == 0.0
        assert not report.detected

    def test_too_few_episodes_rejected(self):
        with pytest.raises(TooFewEpisodesError):
            positive_signalling_test([((), ("x",), ("a",))] * 10,
                                     DistanceConfig())

    def test_random_speaker_false_positive_rate(self, lewis3):
        # quick null calibration; the full 200-run version is in acceptance
        rng = np.random.default_rng(6)
        cfg = DistanceConfig(permutations=200)
        detections = 0
        runs = 40
        for run in range(runs):
            episodes = [
                ((), (f"pick{rng.integers(3)}",), (rng.choice(["a", "b", "c"]),))
                for _ in range(50)
            ]
            report = positive_signalling_test(episodes, cfg, seed=run)
            detections += report.detected
        assert detections / runs <= 0.15

    def test_deterministic_given_seed(self, lewis_community):
        from cooplang import collect
        dataset = collect(lewis_community, 60, master_seed=9)
        episodes = _episodes_from_dataset(dataset)
        cfg = DistanceConfig(permutations=200)
        a = positive_signalling_test(episodes, cfg, seed=3)
        b = positive_signalling_test(episodes, cfg, seed=3)
        assert (a.statistic, a.p_value) == (b.statistic, b.p_value)
