import json

import numpy as np
import pytest

from cooplang import (
    GameSpec,
    ListenerPolicy,
    Message,
    enumerate_trajectories,
    game_fingerprint,
    lewis_game,
    make_trajectory,
    rollout,
    step,
    supermarket_game,
    trajectory_return,
)
from cooplang.errors import (
    ConfigError,
    EnumerationCapError,
    InvalidActionError,
    TerminalStateError,
)
from cooplang.games import state_digest


class TestStep:
    def test_wall_clamp_keeps_agent_in_place(self, sm_2x2):
        out = step(sm_2x2, (0, 0, frozenset()), "W")
        assert out.next_state == (0, 0, frozenset())
        assert out.reward == -0.05

    def test_pick_on_listed_item_cell_collects(self, sm_2x2):
        out = step(sm_2x2, (1, 1, frozenset()), "pick")
        assert out.next_state == (1, 1, frozenset({"milk"}))
        assert out.reward == 1.0

    def test_pick_off_item_cell_is_a_penalty_step(self, sm_2x2):
        out = step(sm_2x2, (0, 1, frozenset()), "pick")
        assert out.next_state == (0, 1, frozenset())
        assert out.reward == -0.05

    def test_lewis_correct_pick_rewards(self, lewis3):
        out = step(lewis3, ("start",), "pick0")
        assert out.reward == 1.0
        assert out.next_state == ("picked", 0)

    def test_lewis_wrong_pick_rewards_zero(self, lewis3):
        assert step(lewis3, ("start",), "pick2").reward == 0.0

    def test_unknown_action_rejected(self, lewis3):
        with pytest.raises(InvalidActionError):
            step(lewis3, ("start",), "jump")

    def test_terminal_state_rejected(self, lewis3):
        with pytest.raises(TerminalStateError):
            step(lewis3, ("picked", 1), "pick0")


class TestEnumerate:
    def test_lewis_has_one_trajectory_per_candidate(self, lewis3):
        trajs = enumerate_trajectories(lewis3)
        assert [t.actions for t in trajs] == [("pick0",), ("pick1",), ("pick2",)]

    def test_horizon_one_supermarket_has_five(self, sm_2x2):
        game = supermarket_game(
            2, 2, {"milk": (1, 1)}, ["milk"], (0, 0), 1, tuple("abcd"))
        assert len(enumerate_trajectories(game)) == 5

    def test_horizon_two_no_early_termination_is_25(self, sm_2x2):
        assert len(enumerate_trajectories(sm_2x2)) == 25

    def test_early_termination_truncates_branches(self):
        game = supermarket_game(
            2, 2, {"milk": (0, 0)}, ["milk"], (0, 0), 2, tuple("abcd"))
        trajs = enumerate_trajectories(game)
        # "pick" at the start collects immediately and ends the episode
        assert any(t.actions == ("pick",) for t in trajs)
        assert len(trajs) < 25

    def test_cap_exceeded_names_the_bound(self, sm_2x2):
        with pytest.raises(EnumerationCapError, match="cap is 10"):
            enumerate_trajectories(sm_2x2, cap=10)

    def test_deterministic_ordering(self, sm_2x2):
        a = enumerate_trajectories(sm_2x2)
        b = enumerate_trajectories(sm_2x2)
        assert a == b
        assert [t.canonical_key for t in a] == sorted(t.canonical_key for t in a)


class TestReturns:
    def test_discounted_sum(self, lewis3):
        tau = make_trajectory(lewis3, ["pick0"])
        fake = tau.__class__(
            steps=(("s", "x", 1.0), ("s", "x", 1.0), ("s", "x", 1.0)),
            canonical_key="k", game_fingerprint="f")
        assert trajectory_return(fake, 0.5) == pytest.approx(1.75, abs=1e-15)

    def test_empty_trajectory_is_zero(self):
        from cooplang import Trajectory
        empty = Trajectory(steps=(), canonical_key="k", game_fingerprint="f")
        assert trajectory_return(empty, 0.9) == 0.0

    def test_gamma_zero_keeps_first_reward(self):
        from cooplang import Trajectory
        tau = Trajectory(steps=(("s", "x", 2.0), ("s", "x", 9.0)),
                         canonical_key="k", game_fingerprint="f")
        assert trajectory_return(tau, 0.0) == 2.0

    def test_linearity_in_rewards(self, sm_2x2):
        from cooplang import Trajectory
        rng = np.random.default_rng(7)
        for _ in range(50):
            rewards = rng.normal(size=4)
            c = rng.uniform(0.5, 3.0)
            steps = tuple(("s", "x", float(r)) for r in rewards)
            scaled = tuple(("s", "x", float(c * r)) for r in rewards)
            t1 = Trajectory(steps=steps, canonical_key="k", game_fingerprint="f")
            t2 = Trajectory(steps=scaled, canonical_key="k", game_fingerprint="f")
            g = float(rng.uniform(0, 1))
            assert abs(c * trajectory_return(t1, g)
                       - trajectory_return(t2, g)) < 1e-12

    def test_lewis_exactly_one_rewarding_trajectory(self, lewis3):
        returns = [trajectory_return(t, lewis3.gamma)
                   for t in enumerate_trajectories(lewis3)]
        assert sorted(returns) == [0.0, 0.0, 1.0]


class TestRollout:
    def test_codebook_listener_follows_plan(self, lewis3, codebook_listener):
        tau = rollout(lewis3, codebook_listener, Message(("b",)),
                      np.random.default_rng(0))
        assert tau.actions == ("pick1",)

    def test_horizon_zero_yields_empty_trajectory(self):
        game = supermarket_game(
            2, 2, {"milk": (1, 1)}, ["milk"], (0, 0), 0, tuple("abcd"))
        listener = ListenerPolicy(codebook={}, epsilon=0.0)
        tau = rollout(game, listener, Message(("a",)), np.random.default_rng(0))
        assert len(tau) == 0

    def test_rng_determinism(self, lewis3):
        listener = ListenerPolicy(
            codebook={"b": ("pick1",)}, epsilon=0.1)
        t1 = rollout(lewis3, listener, Message(("b",)), np.random.default_rng(3))
        t2 = rollout(lewis3, listener, Message(("b",)), np.random.default_rng(3))
        assert t1 == t2

    def test_rollouts_land_in_enumeration(self, sm_2x2):
        listener = ListenerPolicy(
            codebook={"a": ("E", "S")}, epsilon=0.3)
        keys = {t.canonical_key for t in enumerate_trajectories(sm_2x2)}
        rng = np.random.default_rng(11)
        for _ in range(1000):
            tau = rollout(sm_2x2, listener, Message(("a",)), rng)
            assert tau.canonical_key in keys


class TestGameJson:
    def test_round_trip(self, sm_3x3, lewis3):
        for game in (sm_3x3, lewis3):
            doc = json.loads(json.dumps(game.to_json_dict()))
            back = GameSpec.from_json_dict(doc)
            assert back.to_json_dict() == game.to_json_dict()
            assert game_fingerprint(back) == game_fingerprint(game)

    def test_unknown_fields_rejected(self, lewis3):
        doc = lewis3.to_json_dict()
        doc["surprise"] = 1
        with pytest.raises(ConfigError, match="surprise"):
            GameSpec.from_json_dict(doc)

    def test_missing_fields_rejected(self, lewis3):
        doc = lewis3.to_json_dict()
        del doc["gamma"]
        with pytest.raises(ConfigError, match="gamma"):
            GameSpec.from_json_dict(doc)

    def test_invalid_layout_rejected(self):
        with pytest.raises(ConfigError):
            supermarket_game(2, 2, {"milk": (5, 5)}, ["milk"], (0, 0), 2,
                             tuple("ab"))
        with pytest.raises(ConfigError):
            lewis_game(n_candidates=3, target=7)

    def test_digest_injective_over_reachable_states(self, sm_2x2):
        seen = {}
        for tau in enumerate_trajectories(sm_2x2):
            state = sm_2x2.initial_state()
            for digest, action, _ in tau.steps:
                assert state_digest(sm_2x2, state) == digest
                state = step(sm_2x2, state, action).next_state
            seen.setdefault(state_digest(sm_2x2, state), state)
        for digest, state in seen.items():
            assert state_digest(sm_2x2, state) == digest
