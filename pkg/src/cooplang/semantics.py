"""Distances over messages, trajectories, and trajectory distributions,
plus detectors for positive signalling and positive listening.

Message and trajectory distances are normalized token-level edit
distances. Distribution distances lift the trajectory metric either by
exact Wasserstein-1 transport on the finite support or by total
variation. Semantic distance between two messages is the lifted distance
between the listener behaviours they induce.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .community import (
    ListenerPolicy,
    Message,
    NULL_MESSAGE,
    enumerate_messages,
    listener_traj_dist,
)
from .errors import (
    ConfigError,
    DistributionError,
    DomainMismatchError,
    SupportMismatchError,
    TooFewEpisodesError,
)
from .games import GameSpec, Trajectory

DEFAULT_WASSERSTEIN_SUPPORT_CAP = 512


@dataclass
class DistanceConfig:
    traj_metric: str = "action_edit"
    dist_lift: str = "wasserstein1"
    listening_epsilon: float = 1e-6
    signalling_alpha: float = 0.05
    permutations: int = 1000
    wasserstein_support_cap: int = DEFAULT_WASSERSTEIN_SUPPORT_CAP

    def __post_init__(self):
        if self.traj_metric != "action_edit":
            raise ConfigError(f"unknown traj_metric {self.traj_metric!r}")
        if self.dist_lift not in ("wasserstein1", "total_variation"):
            raise ConfigError(f"unknown dist_lift {self.dist_lift!r}")
        if self.listening_epsilon <= 0:
            raise ConfigError("listening_epsilon must be > 0")
        if not 0.0 < self.signalling_alpha < 1.0:
            raise ConfigError("signalling_alpha must lie in (0, 1)")
        if self.permutations < 100:
            raise ConfigError("permutations must be >= 100")


@dataclass
class DetectorReport:
    detected: bool
    statistic: float
    p_value: float | None = None
    witness: tuple | None = None

    def to_json_dict(self) -> dict:
        return {
            "detected": self.detected,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "witness": list(self.witness) if self.witness is not None else None,
        }


def _levenshtein(a, b) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, start=1):
        cur = [i]
        for j, y in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def message_distance(m1: Message, m2: Message) -> float:
    """Token edit distance normalized by the longer message length."""
    if m1.tokens == m2.tokens:
        return 0.0
    return _levenshtein(m1.tokens, m2.tokens) / max(len(m1.tokens), len(m2.tokens), 1)


def trajectory_distance(t1: Trajectory, t2: Trajectory) -> float:
    """Normalized edit distance over action-id sequences."""
    if t1.game_fingerprint != t2.game_fingerprint:
        raise DomainMismatchError("trajectories belong to different games")
    if t1.actions == t2.actions:
        return 0.0
    return _levenshtein(t1.actions, t2.actions) / max(len(t1), len(t2), 1)


def _check_normalized(p: dict[Trajectory, float], name: str) -> None:
    total = sum(p.values())
    if abs(total - 1.0) > 1e-9:
        raise DistributionError(f"{name} sums to {total}, expected 1")


def distribution_distance(
    p: dict[Trajectory, float], q: dict[Trajectory, float], cfg: DistanceConfig,
) -> float:
    """Lift the trajectory metric to distributions on a shared finite support."""
    if set(t.canonical_key for t in p) != set(t.canonical_key for t in q):
        raise SupportMismatchError("distributions have different supports")
    _check_normalized(p, "p")
    _check_normalized(q, "q")

    support = sorted(p, key=lambda t: t.canonical_key)
    pv = np.array([p[t] for t in support])
    qv = np.array([q[t] for t in support])

    if cfg.dist_lift == "total_variation":
        return 0.5 * float(np.abs(pv - qv).sum())
    return _wasserstein1(support, pv, qv, cfg)


def _wasserstein1(support, pv, qv, cfg: DistanceConfig) -> float:
    if np.array_equal(pv, qv):
        return 0.0
    if tuple(qv) < tuple(pv):  # canonical order makes the result symmetric
        pv, qv = qv, pv
    p_idx = np.flatnonzero(pv > 0)
    q_idx = np.flatnonzero(qv > 0)
    if max(len(p_idx), len(q_idx)) > cfg.wasserstein_support_cap:
        raise SupportMismatchError(
            f"support of {max(len(p_idx), len(q_idx))} atoms exceeds the "
            f"Wasserstein cap ({cfg.wasserstein_support_cap}); use the "
            f"total_variation lift"
        )
    if len(p_idx) == 1 and len(q_idx) == 1:
        return trajectory_distance(support[p_idx[0]], support[q_idx[0]])

    cost = np.array([
        [trajectory_distance(support[i], support[j]) for j in q_idx]
        for i in p_idx
    ])
    n, m = cost.shape
    # exact transport LP: rows ship p mass, columns receive q mass
    row = sp.kron(sp.eye(n), np.ones((1, m)))
    col = sp.kron(np.ones((1, n)), sp.eye(m))
    a_eq = sp.vstack([row, col]).tocsr()[:-1]  # drop one redundant constraint
    b_eq = np.concatenate([pv[p_idx], qv[q_idx]])[:-1]
    res = linprog(cost.reshape(-1), A_eq=a_eq, b_eq=b_eq, method="highs")
    if not res.success:
        raise DistributionError(f"transport LP failed: {res.message}")
    return max(float(res.fun), 0.0)


def optimal_message(
    listener: ListenerPolicy, game: GameSpec, target: Trajectory,
) -> Message:
    """The message maximizing the listener's probability of the target.

    Candidates include the null message; ties go to the shortest message
    and then lexicographic token order (the enumeration order).
    """
    from .games import game_fingerprint

    cache_key = ("mstar", game_fingerprint(game), target.canonical_key)
    cached = listener._dist_cache.get(cache_key)
    if cached is not None:
        return cached
    best_msg, best_score = None, -1.0
    for msg in enumerate_messages(game, include_null=True):
        dist = listener_traj_dist(listener, game, msg)
        score = 0.0
        for tau, prob in dist.items():
            if tau.canonical_key == target.canonical_key:
                score = prob
                break
        if score > best_score:
            best_msg, best_score = msg, score
    listener._dist_cache[cache_key] = best_msg
    return best_msg


def semantic_distance(
    listener: ListenerPolicy, game: GameSpec,
    m1: Message, m2: Message, cfg: DistanceConfig,
) -> float:
    """Distance between the listener behaviours two messages induce."""
    if m1.canonical() == m2.canonical():
        return 0.0
    p = listener_traj_dist(listener, game, m1)
    q = listener_traj_dist(listener, game, m2)
    return distribution_distance(p, q, cfg)


def positive_listening_test(
    listener: ListenerPolicy, game: GameSpec,
    contexts: list, messages: list[Message], cfg: DistanceConfig,
) -> DetectorReport:
    """Does any message move the listener away from null-message behaviour?

    Contexts are conditioning variables (observation-history prefixes);
    plan-executing listeners here are context-invariant, but the witness
    reports the achieving (context, message) pair either way.
    """
    if not messages:
        raise ConfigError("positive_listening_test needs a non-empty message list")
    if not contexts:
        contexts = [()]
    null_dist = listener_traj_dist(listener, game, NULL_MESSAGE)
    best, witness = 0.0, (contexts[0], messages[0].canonical())
    for z in contexts:
        for msg in messages:
            d = distribution_distance(
                null_dist, listener_traj_dist(listener, game, msg), cfg
            )
            if d > best:
                best, witness = d, (z, msg.canonical())
    return DetectorReport(detected=best > cfg.listening_epsilon,
                          statistic=best, witness=witness)


def _mutual_information(x: np.ndarray, y: np.ndarray) -> float:
    """Empirical MI (nats) between two integer-coded samples."""
    nx, ny = x.max() + 1, y.max() + 1
    joint = np.bincount(x * ny + y, minlength=nx * ny).reshape(nx, ny) / len(x)
    px = joint.sum(axis=1)
    py = joint.sum(axis=0)
    nz = joint > 0
    return float((joint[nz] * np.log(joint[nz] / np.outer(px, py)[nz])).sum())


def _encode(labels) -> np.ndarray:
    index: dict = {}
    return np.array([index.setdefault(lbl, len(index)) for lbl in labels])


def positive_signalling_test(
    episodes: list[tuple], cfg: DistanceConfig, seed: int = 0,
) -> DetectorReport:
    """Permutation test of dependence between messages and behaviour.

    Each episode is an (observation sequence, action sequence, message
    sequence) triple, encoded canonically per episode. The statistic is
    the empirical mutual information between the message encoding and the
    (observation, action) encoding; the p-value comes from shuffling the
    message column.
    """
    if len(episodes) < 30:
        raise TooFewEpisodesError(
            f"need at least 30 episodes, got {len(episodes)}"
        )
    x = _encode([(tuple(obs), tuple(act)) for obs, act, _ in episodes])
    y = _encode([tuple(msg) for _, _, msg in episodes])
    stat = _mutual_information(x, y)

    rng = np.random.default_rng(seed)
    exceed = 0
    for _ in range(cfg.permutations):
        if _mutual_information(x, rng.permutation(y)) >= stat:
            exceed += 1
    p_value = (1 + exceed) / (1 + cfg.permutations)
    return DetectorReport(detected=p_value < cfg.signalling_alpha,
                          statistic=stat, p_value=p_value)
