"""Synthetic communities of speakers and listeners sharing a seeded codebook.

The harness builds agents whose language is known by construction: a
codebook maps distinct messages to action plans covering the useful
trajectories of a game. Listeners execute plans with optional uniform
action noise; speakers emit messages Boltzmann-distributed around the
optimal message for their intended trajectory.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConfigError,
    EnumerationCapError,
    VocabularyTooSmallError,
)
from .games import (
    DEFAULT_ENUMERATION_CAP,
    GameSpec,
    Trajectory,
    enumerate_trajectories,
    game_fingerprint,
    is_terminal,
    make_trajectory,
    state_digest,
    step,
    trajectory_return,
)


@dataclass(frozen=True)
class Message:
    """A bounded token sequence; the empty sequence is the null message."""

    tokens: tuple[str, ...]

    def canonical(self) -> str:
        return " ".join(self.tokens)

    def is_null(self) -> bool:
        return not self.tokens

    @classmethod
    def from_canonical(cls, text: str) -> "Message":
        return cls(tuple(text.split())) if text else NULL_MESSAGE


NULL_MESSAGE = Message(())


def validate_message(game: GameSpec, message: Message) -> None:
    if len(message.tokens) > game.max_msg_len:
        raise ConfigError(
            f"message length {len(message.tokens)} exceeds L={game.max_msg_len}"
        )
    bad = [t for t in message.tokens if t not in game.vocab]
    if bad:
        raise ConfigError(f"tokens {bad} not in vocab")


def enumerate_messages(
    game: GameSpec, include_null: bool = False,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> list[Message]:
    """All messages of length 1..L in (length, lexicographic) order."""
    toks = sorted(game.vocab)
    total = sum(len(toks) ** n for n in range(1, game.max_msg_len + 1))
    if total > cap:
        raise EnumerationCapError(total, cap, what="messages")
    msgs: list[Message] = [NULL_MESSAGE] if include_null else []
    for length in range(1, game.max_msg_len + 1):
        msgs.extend(Message(combo) for combo in itertools.product(toks, repeat=length))
    return msgs


def pad_action(game: GameSpec) -> str:
    # "pick" off an item cell is a stay-in-place step in the supermarket
    return "pick" if game.kind == "supermarket" else game.env_actions[0]


@dataclass(eq=False)
class ListenerPolicy:
    """Executes the plan assigned to a message, with uniform action noise.

    Unknown and null messages fall back to default_plan. Plans shorter
    than the realized episode are padded with the game's pad action.
    """

    codebook: dict[str, tuple[str, ...]]
    epsilon: float = 0.0
    default_plan: tuple[str, ...] = ()
    _dist_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ConfigError("epsilon must lie in [0, 1]")

    def plan_for(self, message: Message) -> tuple[str, ...]:
        return self.codebook.get(message.canonical(), self.default_plan)

    def planned_action(self, game: GameSpec, plan: tuple[str, ...], k: int) -> str:
        return plan[k] if k < len(plan) else pad_action(game)

    def step_action_prob(self, game: GameSpec, plan, k: int, action: str) -> float:
        planned = self.planned_action(game, plan, k)
        n = len(game.env_actions)
        return (1.0 - self.epsilon) * (action == planned) + self.epsilon / n


@dataclass(eq=False)
class SpeakerPolicy:
    """Boltzmann message emitter calibrated to a reference listener."""

    listener_ref: ListenerPolicy
    temp_msg: float = 1.0
    temp_target: float = 1.0
    greedy_msg: bool = False
    greedy_target: bool = False
    _dist_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.temp_msg <= 0 or self.temp_target <= 0:
            raise ConfigError("temperatures must be positive")


def rollout(game: GameSpec, listener: ListenerPolicy, message: Message,
            rng: np.random.Generator) -> Trajectory:
    """Sample one listener trajectory given a message."""
    validate_message(game, message)
    plan = listener.plan_for(message)
    state = game.initial_state()
    actions: list[str] = []
    for k in range(game.horizon):
        if is_terminal(game, state):
            break
        if listener.epsilon > 0 and rng.random() < listener.epsilon:
            a = game.env_actions[rng.integers(len(game.env_actions))]
        else:
            a = listener.planned_action(game, plan, k)
        state = step(game, state, a).next_state
        actions.append(a)
    return make_trajectory(game, actions)


def listener_traj_dist(
    listener: ListenerPolicy, game: GameSpec, message: Message,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> dict[Trajectory, float]:
    """Exact trajectory distribution of the listener's noised plan execution.

    The enumerated trajectory set is prefix-free, so per-step action
    probabilities multiply out to a distribution summing to 1.
    """
    validate_message(game, message)
    key = (game_fingerprint(game), message.canonical())
    cached = listener._dist_cache.get(key)
    if cached is not None:
        return cached
    plan = listener.plan_for(message)
    dist: dict[Trajectory, float] = {}
    for tau in enumerate_trajectories(game, cap):
        p = 1.0
        for k, a in enumerate(tau.actions):
            p *= listener.step_action_prob(game, plan, k, a)
        dist[tau] = p
    listener._dist_cache[key] = dist
    return dist


@dataclass
class CommunityConfig:
    """Knobs for building a synthetic community around one game."""

    game: GameSpec
    n_speakers: int = 1
    n_listeners: int = 1
    epsilon: float = 0.0
    temp_msg: float = 1.0
    temp_target: float = 1.0
    greedy_msg: bool = False
    greedy_target: bool = False
    codebook_k: int = 64

    def to_dict(self) -> dict:
        return {
            "game": self.game.to_json_dict(),
            "n_speakers": self.n_speakers,
            "n_listeners": self.n_listeners,
            "epsilon": self.epsilon,
            "temp_msg": self.temp_msg,
            "temp_target": self.temp_target,
            "greedy_msg": self.greedy_msg,
            "greedy_target": self.greedy_target,
            "codebook_k": self.codebook_k,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "CommunityConfig":
        doc = dict(doc)
        doc["game"] = GameSpec.from_json_dict(doc["game"])
        return cls(**doc)


@dataclass(eq=False)
class Community:
    game: GameSpec
    speakers: list[SpeakerPolicy]
    listeners: list[ListenerPolicy]
    seed: int
    config: CommunityConfig
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def codebook(self) -> dict[str, tuple[str, ...]]:
        return self.listeners[0].codebook

    def trajectories(self) -> list[Trajectory]:
        if "trajs" not in self._cache:
            self._cache["trajs"] = enumerate_trajectories(self.game)
        return self._cache["trajs"]

    def trajectory_values(self) -> np.ndarray:
        if "values" not in self._cache:
            self._cache["values"] = np.array(
                [trajectory_return(t, self.game.gamma) for t in self.trajectories()]
            )
        return self._cache["values"]

    def prior_probs(self) -> np.ndarray:
        """Boltzmann prior over enumerated trajectories, exp(V / temp_target)."""
        if "prior" not in self._cache:
            v = self.trajectory_values() / self.config.temp_target
            w = np.exp(v - v.max())
            self._cache["prior"] = w / w.sum()
        return self._cache["prior"]


def build_community(config: CommunityConfig, seed: int) -> Community:
    """Deterministically instantiate a community from (config, seed).

    A covering set of trajectories (all for lewis, top-K by return for the
    supermarket) gets distinct messages assigned by a seeded permutation.
    """
    game = config.game
    trajs = enumerate_trajectories(game)
    if game.kind == "lewis":
        cover = list(trajs)
    else:
        ranked = sorted(
            trajs,
            key=lambda t: (-trajectory_return(t, game.gamma), t.canonical_key),
        )
        cover = ranked[: min(config.codebook_k, len(ranked))]

    messages = enumerate_messages(game)
    if len(messages) < len(cover):
        raise VocabularyTooSmallError(
            f"{len(messages)} messages available but {len(cover)} plans need "
            f"distinct messages"
        )

    rng = np.random.default_rng([seed])
    perm = rng.permutation(len(messages))
    codebook = {
        messages[perm[i]].canonical(): cover[i].actions
        for i in range(len(cover))
    }

    listeners = [
        ListenerPolicy(codebook=dict(codebook), epsilon=config.epsilon)
        for _ in range(config.n_listeners)
    ]
    speakers = [
        SpeakerPolicy(
            listener_ref=listeners[0],
            temp_msg=config.temp_msg,
            temp_target=config.temp_target,
            greedy_msg=config.greedy_msg,
            greedy_target=config.greedy_target,
        )
        for _ in range(config.n_speakers)
    ]
    return Community(game=game, speakers=speakers, listeners=listeners,
                     seed=seed, config=config)


def target_prior_sample(community: Community,
                        rng: np.random.Generator) -> Trajectory:
    """Sample an intended trajectory from the Boltzmann prior over returns."""
    trajs = community.trajectories()
    if community.config.greedy_target:
        values = community.trajectory_values()
        return trajs[int(np.argmax(values))]
    probs = community.prior_probs()
    return trajs[int(rng.choice(len(trajs), p=probs))]


def _speaker_table(
    speaker: SpeakerPolicy, game: GameSpec, target: Trajectory,
) -> tuple[list[Message], np.ndarray]:
    """Semantic distances S(m*(target), m) over the emission space (length 1..L)."""
    from . import semantics  # deferred: semantics imports this module

    key = target.canonical_key
    cached = speaker._dist_cache.get(key)
    if cached is not None:
        return cached
    listener = speaker.listener_ref
    msgs = enumerate_messages(game)
    mstar = semantics.optimal_message(listener, game, target)
    cfg = semantics.DistanceConfig()
    dists = np.array([
        semantics.semantic_distance(listener, game, mstar, m, cfg) for m in msgs
    ])
    speaker._dist_cache[key] = (msgs, dists)
    return msgs, dists


def speaker_message_dist(
    speaker: SpeakerPolicy, game: GameSpec, target: Trajectory,
) -> tuple[list[Message], np.ndarray]:
    """Message distribution exp(-S(m*, m)/temp) over messages of length 1..L."""
    msgs, dists = _speaker_table(speaker, game, target)
    scaled = -dists / speaker.temp_msg
    w = np.exp(scaled - scaled.max())
    return msgs, w / w.sum()


def speaker_sample(speaker: SpeakerPolicy, game: GameSpec, target: Trajectory,
                   rng: np.random.Generator) -> Message:
    """Sample a message for a target trajectory from the Boltzmann emitter.

    The zero-temperature flag takes the Boltzmann limit over the emission
    space: the first message (shortest, then lexicographic) at minimal
    semantic distance from the optimal message, which is the optimal
    message itself whenever that message is emittable.
    """
    if speaker.greedy_msg:
        msgs, dists = _speaker_table(speaker, game, target)
        return msgs[int(np.argmin(dists))]
    msgs, probs = speaker_message_dist(speaker, game, target)
    return msgs[int(rng.choice(len(msgs), p=probs))]


COMMUNITY_FORMAT_VERSION = 1


def save_community(community: Community, path) -> None:
    doc = {
        "format_version": COMMUNITY_FORMAT_VERSION,
        "seed": community.seed,
        "config": community.config.to_dict(),
        "codebook": {m: list(plan) for m, plan in community.codebook.items()},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_community(path) -> Community:
    """Rebuild from (config, seed); the stored codebook is an integrity check."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format_version") != COMMUNITY_FORMAT_VERSION:
        raise ConfigError(f"unsupported community format {doc.get('format_version')}")
    config = CommunityConfig.from_dict(doc["config"])
    community = build_community(config, doc["seed"])
    stored = {m: tuple(plan) for m, plan in doc["codebook"].items()}
    if stored != community.codebook:
        raise ConfigError("stored codebook does not match rebuilt community")
    return community
