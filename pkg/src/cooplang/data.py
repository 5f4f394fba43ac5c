"""Generation and JSONL persistence of interaction datasets.

Each record stores the observable pair (message, trajectory) plus the
harness-only ground-truth intended trajectory. Inference code only ever
sees the public view, with ground truth stripped.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .community import (
    Community,
    Message,
    rollout,
    speaker_sample,
    target_prior_sample,
)
from .errors import (
    ConfigError,
    DatasetParseError,
    FingerprintMismatchError,
)
from .games import GameSpec, Trajectory, game_fingerprint

DATASET_FORMAT_VERSION = 1


@dataclass(frozen=True)
class InteractionRecord:
    message: Message
    trajectory: Trajectory
    hidden_target: Trajectory | None
    episode_seed: int
    speaker_id: str
    listener_id: str


@dataclass
class InteractionDataset:
    game_fingerprint: str
    records: list[InteractionRecord]
    meta: dict

    def public(self) -> "InteractionDataset":
        """The observer's view: ground-truth intended trajectories removed."""
        return InteractionDataset(
            game_fingerprint=self.game_fingerprint,
            records=[replace(r, hidden_target=None) for r in self.records],
            meta=dict(self.meta),
        )


def collect(community: Community, n_episodes: int, master_seed: int,
            timestamp: str = "") -> InteractionDataset:
    """Generate n_episodes interactions; deterministic given master_seed.

    Per episode the rng stream is derived from (master_seed, index), so
    episodes are independent and reproducible individually.
    """
    if n_episodes < 1:
        raise ConfigError("n_episodes must be >= 1")
    game = community.game
    records = []
    for i in range(n_episodes):
        rng = np.random.default_rng([master_seed, i])
        target = target_prior_sample(community, rng)
        s_idx = int(rng.integers(len(community.speakers)))
        l_idx = int(rng.integers(len(community.listeners)))
        message = speaker_sample(community.speakers[s_idx], game, target, rng)
        tau = rollout(game, community.listeners[l_idx], message, rng)
        records.append(InteractionRecord(
            message=message,
            trajectory=tau,
            hidden_target=target,
            episode_seed=i,
            speaker_id=f"speaker{s_idx}",
            listener_id=f"listener{l_idx}",
        ))
    meta = {
        "community_seed": community.seed,
        "epsilon": community.config.epsilon,
        "temp_msg": community.config.temp_msg,
        "temp_target": community.config.temp_target,
        "master_seed": master_seed,
        "created": timestamp,
    }
    return InteractionDataset(
        game_fingerprint=game_fingerprint(game), records=records, meta=meta,
    )


def _traj_to_json(tau: Trajectory | None):
    if tau is None:
        return None
    return {
        "steps": [[s, a, r] for s, a, r in tau.steps],
        "canonical_key": tau.canonical_key,
    }


def _traj_from_json(doc, fp: str) -> Trajectory | None:
    if doc is None:
        return None
    return Trajectory(
        steps=tuple((s, a, r) for s, a, r in doc["steps"]),
        canonical_key=doc["canonical_key"],
        game_fingerprint=fp,
    )


def _dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def save(dataset: InteractionDataset, path) -> None:
    """JSONL: one header line, then one record per line."""
    header = {
        "format_version": DATASET_FORMAT_VERSION,
        "game_fingerprint": dataset.game_fingerprint,
        "meta": dataset.meta,
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_dumps(header) + "\n")
        for rec in dataset.records:
            fh.write(_dumps({
                "message": list(rec.message.tokens),
                "trajectory": _traj_to_json(rec.trajectory),
                "hidden_target": _traj_to_json(rec.hidden_target),
                "episode_seed": rec.episode_seed,
                "speaker_id": rec.speaker_id,
                "listener_id": rec.listener_id,
            }) + "\n")


def load(path, game: GameSpec | None = None) -> InteractionDataset:
    """Parse a JSONL dataset; optionally check it against a game."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise DatasetParseError(1, "empty file, header line missing")

    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise DatasetParseError(1, f"bad header: {exc}") from exc
    if header.get("format_version") != DATASET_FORMAT_VERSION:
        raise DatasetParseError(
            1, f"unsupported format_version {header.get('format_version')}"
        )
    fp = header["game_fingerprint"]
    if game is not None and fp != game_fingerprint(game):
        raise FingerprintMismatchError(
            f"dataset game {fp} does not match provided game "
            f"{game_fingerprint(game)}"
        )

    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            doc = json.loads(line)
            records.append(InteractionRecord(
                message=Message(tuple(doc["message"])),
                trajectory=_traj_from_json(doc["trajectory"], fp),
                hidden_target=_traj_from_json(doc["hidden_target"], fp),
                episode_seed=doc["episode_seed"],
                speaker_id=doc["speaker_id"],
                listener_id=doc["listener_id"],
            ))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise DatasetParseError(lineno, str(exc)) from exc
    return InteractionDataset(game_fingerprint=fp, records=records,
                              meta=header.get("meta", {}))
