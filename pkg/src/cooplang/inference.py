"""Tabular estimators for the forward (signalling) and backward (listening)
problems.

The forward fit maps observed trajectories to the messages that caused
them. The backward fit first pseudo-labels each observed (message,
trajectory) pair with a MAP estimate of the intended trajectory under a
Boltzmann-rational speaker model, then maps messages to pseudo-labels.
Both models are count tables with explicit backoff rules, so their argmax
decoders can be checked exactly against brute force.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .community import (
    ListenerPolicy,
    Message,
    enumerate_messages,
    listener_traj_dist,
)
from .errors import (
    ConfigError,
    EmptyDatasetError,
    FingerprintMismatchError,
    ForeignGameRecordError,
)
from .games import (
    GameSpec,
    Trajectory,
    enumerate_trajectories,
    final_state,
    game_fingerprint,
    trajectory_return,
)
from .semantics import DistanceConfig, semantic_distance, optimal_message, \
    message_distance, trajectory_distance

MODEL_FORMAT_VERSION = 1


@dataclass
class MapConfig:
    """Hyperparameters of the MAP intended-trajectory estimator."""

    alpha: float = 1.0
    variant: str = "literal"

    def __post_init__(self):
        if self.alpha <= 0:
            raise ConfigError("alpha must be > 0")
        if self.variant not in ("literal", "expected"):
            raise ConfigError(f"unknown variant {self.variant!r}")


def boltzmann_message_likelihood(
    listener: ListenerPolicy, game: GameSpec, message: Message,
    target: Trajectory, cfg: DistanceConfig,
) -> float:
    """exp(-S(m*, m)) normalized over all messages of length 1..L."""
    msgs = enumerate_messages(game)
    canon = message.canonical()
    if all(m.canonical() != canon for m in msgs):
        raise ConfigError(f"message {canon!r} not in the emission space")
    mstar = optimal_message(listener, game, target)
    weights = np.exp(np.array([
        -semantic_distance(listener, game, mstar, m, cfg) for m in msgs
    ]))
    probs = weights / weights.sum()
    return float(probs[[m.canonical() for m in msgs].index(canon)])


def exact_listener_model(listener: ListenerPolicy, game: GameSpec):
    """An exact pi_B(.|m) suitable as listener_model for variant=expected."""

    def model(message: Message) -> dict[Trajectory, float]:
        return listener_traj_dist(listener, game, message)

    return model


def map_target(record, game: GameSpec, cfg: MapConfig,
               listener_model=None) -> Trajectory:
    """MAP estimate of the intended trajectory for one interaction.

    Scores every feasible candidate as V minus alpha times its distance
    from the observed trajectory (literal) or its expected distance under
    the listener model given the message (expected). Ties go to higher V,
    then canonical-key order.
    """
    if cfg.variant == "expected" and listener_model is None:
        raise ConfigError("variant=expected requires a listener_model")

    candidates = enumerate_trajectories(game)
    gamma = game.gamma
    if cfg.variant == "expected":
        behaviour = listener_model(record.message)

    best = None
    for cand in candidates:
        if cfg.variant == "literal":
            dist = trajectory_distance(cand, record.trajectory)
        else:
            dist = sum(p * trajectory_distance(cand, tau)
                       for tau, p in behaviour.items() if p > 0)
        value = trajectory_return(cand, gamma)
        score = value - cfg.alpha * dist
        entry = (score, value, cand)
        if best is None or score > best[0] or (
            score == best[0] and (value > best[1] or (
                value == best[1] and cand.canonical_key < best[2].canonical_key))
        ):
            best = entry
    return best[2]


def coarse_feature(game: GameSpec, tau: Trajectory) -> str:
    """Backoff feature: picked candidate (lewis) or collected item set."""
    state = final_state(game, tau)
    if game.kind == "lewis":
        return "none" if state[0] == "start" else f"picked:{state[1]}"
    return "+".join(sorted(state[2]))


def _msg_sort_key(canonical: str):
    tokens = tuple(canonical.split())
    return (len(tokens), tokens)


def _argmax_message(hist: dict[str, float]) -> str:
    """Highest count, ties to the shortest then lexicographic message."""
    return min(hist, key=lambda m: (-hist[m], _msg_sort_key(m)))


@dataclass(eq=False)
class BrocaModel:
    """Trajectory -> message count tables with a coarse-feature backoff."""

    game: GameSpec
    table: dict[str, dict[str, int]]
    backoff_table: dict[str, dict[str, int]]
    smoothing: float = 0.0
    game_fp: str = ""

    def __post_init__(self):
        if not self.game_fp:
            self.game_fp = game_fingerprint(self.game)

    def to_json_dict(self) -> dict:
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "kind": "broca",
            "game_fingerprint": self.game_fp,
            "smoothing": self.smoothing,
            "table": self.table,
            "backoff_table": self.backoff_table,
        }

    @classmethod
    def from_json_dict(cls, doc: dict, game: GameSpec) -> "BrocaModel":
        _check_model_doc(doc, "broca", game)
        return cls(game=game, table=doc["table"],
                   backoff_table=doc["backoff_table"],
                   smoothing=doc["smoothing"])


def _check_model_doc(doc: dict, kind: str, game: GameSpec) -> None:
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise ConfigError(f"unsupported model format {doc.get('format_version')}")
    if doc.get("kind") != kind:
        raise ConfigError(f"expected a {kind} model, got {doc.get('kind')!r}")
    if doc.get("game_fingerprint") != game_fingerprint(game):
        raise FingerprintMismatchError(
            f"model was fitted on game {doc.get('game_fingerprint')}, "
            f"got {game_fingerprint(game)}"
        )


def _public_records(dataset, game: GameSpec):
    fp = game_fingerprint(game)
    public = dataset.public()
    if not public.records:
        raise EmptyDatasetError("cannot fit on an empty dataset")
    if public.game_fingerprint != fp:
        raise ForeignGameRecordError(
            f"dataset game {public.game_fingerprint} does not match {fp}"
        )
    for rec in public.records:
        if rec.trajectory.game_fingerprint != fp:
            raise ForeignGameRecordError(
                f"record trajectory from game {rec.trajectory.game_fingerprint}"
            )
    return public.records


def fit_broca(dataset, game: GameSpec, smoothing: float = 0.0) -> BrocaModel:
    """Count messages per observed trajectory, exact key plus backoff."""
    if smoothing < 0:
        raise ConfigError("smoothing must be >= 0")
    table: dict[str, dict[str, int]] = {}
    backoff: dict[str, dict[str, int]] = {}
    for rec in _public_records(dataset, game):
        msg = rec.message.canonical()
        key = rec.trajectory.canonical_key
        table.setdefault(key, {})
        table[key][msg] = table[key].get(msg, 0) + 1
        feat = coarse_feature(game, rec.trajectory)
        backoff.setdefault(feat, {})
        backoff[feat][msg] = backoff[feat].get(msg, 0) + 1
    return BrocaModel(game=game, table=table, backoff_table=backoff,
                      smoothing=smoothing)


def broca_emit(model: BrocaModel, target: Trajectory) -> Message:
    """Exact-key argmax, else backoff-feature argmax, else global majority."""
    hist = model.table.get(target.canonical_key)
    if hist is None:
        hist = model.backoff_table.get(coarse_feature(model.game, target))
    if hist is None:
        merged: dict[str, int] = {}
        for h in model.table.values():
            for msg, count in h.items():
                merged[msg] = merged.get(msg, 0) + count
        hist = merged
    return Message.from_canonical(_argmax_message(hist))


@dataclass(eq=False)
class WernickeModel:
    """Message -> pseudo-label count tables with nearest-message backoff."""

    game: GameSpec
    table: dict[str, dict[str, int]]
    alpha: float
    backoff: float = 0.5
    game_fp: str = ""
    _traj_index: dict[str, Trajectory] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.alpha <= 0:
            raise ConfigError("alpha must be > 0")
        if not 0.0 <= self.backoff <= 1.0:
            raise ConfigError("backoff threshold must lie in [0, 1]")
        if not self.game_fp:
            self.game_fp = game_fingerprint(self.game)
        if not self._traj_index:
            self._traj_index = {
                t.canonical_key: t for t in enumerate_trajectories(self.game)
            }

    def value_of(self, key: str) -> float:
        return trajectory_return(self._traj_index[key], self.game.gamma)

    def to_json_dict(self) -> dict:
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "kind": "wernicke",
            "game_fingerprint": self.game_fp,
            "alpha": self.alpha,
            "backoff": self.backoff,
            "table": self.table,
        }

    @classmethod
    def from_json_dict(cls, doc: dict, game: GameSpec) -> "WernickeModel":
        _check_model_doc(doc, "wernicke", game)
        return cls(game=game, table=doc["table"], alpha=doc["alpha"],
                   backoff=doc["backoff"])


def fit_wernicke(dataset, game: GameSpec, cfg: MapConfig,
                 backoff: float = 0.5, listener_model=None) -> WernickeModel:
    """Pseudo-label every record via MAP, then count labels per message."""
    table: dict[str, dict[str, int]] = {}
    label_cache: dict[tuple[str, str], str] = {}
    for rec in _public_records(dataset, game):
        msg = rec.message.canonical()
        cache_key = (msg, rec.trajectory.canonical_key)
        label = label_cache.get(cache_key)
        if label is None:
            label = map_target(rec, game, cfg, listener_model).canonical_key
            label_cache[cache_key] = label
        table.setdefault(msg, {})
        table[msg][label] = table[msg].get(label, 0) + 1
    return WernickeModel(game=game, table=table, alpha=cfg.alpha,
                         backoff=backoff)


def _argmax_label(model: WernickeModel, hist: dict[str, int]) -> str:
    """Highest count; ties to higher return, then canonical-key order."""
    return min(hist, key=lambda k: (-hist[k], -model.value_of(k), k))


def wernicke_decode(model: WernickeModel, message: Message) -> Trajectory:
    """Decode a message to its most plausible intended trajectory."""
    canon = message.canonical()
    hist = model.table.get(canon)
    if hist is None and model.table:
        known = sorted(model.table, key=_msg_sort_key)
        nearest = min(
            known,
            key=lambda m: (message_distance(message, Message.from_canonical(m)),
                           _msg_sort_key(m)),
        )
        if message_distance(message, Message.from_canonical(nearest)) <= model.backoff:
            hist = model.table[nearest]
    if hist is None:
        # beyond the backoff threshold: global argmax-return pseudo-label
        merged: dict[str, int] = {}
        for h in model.table.values():
            for key, count in h.items():
                merged[key] = merged.get(key, 0) + count
        key = min(merged, key=lambda k: (-model.value_of(k), k))
        return model._traj_index[key]
    return model._traj_index[_argmax_label(model, hist)]
