"""Scoring the observer in both roles against a community, with baselines.

All evaluations use a paired-seed design: the model and its baselines
consume identical per-episode rng streams, so reported differences are
not sampling artifacts.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .community import (
    Community,
    enumerate_messages,
    rollout,
    speaker_sample,
    target_prior_sample,
)
from .errors import ConfigError
from .games import trajectory_return
from .inference import BrocaModel, WernickeModel, broca_emit, wernicke_decode
from .semantics import optimal_message, trajectory_distance


@dataclass
class SpeakerReport:
    success_rate: float
    mean_return: float
    baselines: dict
    n: int

    def to_json_dict(self) -> dict:
        return {
            "success_rate": self.success_rate,
            "mean_return": self.mean_return,
            "baselines": self.baselines,
            "n": self.n,
        }


@dataclass
class ListenerReport:
    recovery_rate: float
    mean_distance: float
    mean_target_value: float
    literal_baseline: dict
    n: int

    def to_json_dict(self) -> dict:
        return {
            "recovery_rate": self.recovery_rate,
            "mean_distance": self.mean_distance,
            "mean_target_value": self.mean_target_value,
            "literal_baseline": self.literal_baseline,
            "n": self.n,
        }


SPEAKER_CSV_COLUMNS = [
    "n", "success_rate", "mean_return",
    "oracle_success_rate", "oracle_mean_return",
    "random_success_rate", "random_mean_return",
]

LISTENER_CSV_COLUMNS = [
    "n", "recovery_rate", "mean_distance", "mean_target_value",
    "literal_recovery_rate", "literal_mean_distance",
    "literal_mean_target_value",
]


def report_csv(report) -> str:
    """One header line plus one flat data row, stable column order."""
    if isinstance(report, SpeakerReport):
        columns = SPEAKER_CSV_COLUMNS
        row = [report.n, report.success_rate, report.mean_return,
               report.baselines["oracle"]["success_rate"],
               report.baselines["oracle"]["mean_return"],
               report.baselines["random"]["success_rate"],
               report.baselines["random"]["mean_return"]]
    else:
        columns = LISTENER_CSV_COLUMNS
        row = [report.n, report.recovery_rate, report.mean_distance,
               report.mean_target_value,
               report.literal_baseline["recovery_rate"],
               report.literal_baseline["mean_distance"],
               report.literal_baseline["mean_target_value"]]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerow(row)
    return buf.getvalue()


def eval_speaker(broca: BrocaModel, community: Community, n: int,
                 seed: int) -> SpeakerReport:
    """Monte Carlo forward-problem evaluation with oracle/random baselines."""
    if n < 1:
        raise ConfigError("n must be >= 1")
    game = community.game
    msgs = enumerate_messages(game)
    listener0 = community.listeners[0]

    hits = {"model": 0, "oracle": 0, "random": 0}
    returns = {"model": 0.0, "oracle": 0.0, "random": 0.0}
    for i in range(n):
        rng = np.random.default_rng([seed, i])
        target = target_prior_sample(community, rng)
        listener = community.listeners[int(rng.integers(len(community.listeners)))]
        random_msg = msgs[int(rng.integers(len(msgs)))]
        arms = {
            "model": broca_emit(broca, target),
            "oracle": optimal_message(listener0, game, target),
            "random": random_msg,
        }
        for arm, message in arms.items():
            tau = rollout(game, listener, message,
                          np.random.default_rng([seed, i, 1]))
            hits[arm] += tau.canonical_key == target.canonical_key
            returns[arm] += trajectory_return(tau, game.gamma)

    def metrics(arm):
        return {"success_rate": hits[arm] / n, "mean_return": returns[arm] / n}

    model = metrics("model")
    return SpeakerReport(
        success_rate=model["success_rate"],
        mean_return=model["mean_return"],
        baselines={"oracle": metrics("oracle"), "random": metrics("random")},
        n=n,
    )


def eval_listener(wernicke: WernickeModel, community: Community, n: int,
                  seed: int) -> ListenerReport:
    """Monte Carlo backward-problem evaluation against ground-truth targets."""
    if n < 1:
        raise ConfigError("n must be >= 1")
    game = community.game

    hits = {"model": 0, "literal": 0}
    dists = {"model": 0.0, "literal": 0.0}
    values = {"model": 0.0, "literal": 0.0}
    for i in range(n):
        rng = np.random.default_rng([seed, i])
        target = target_prior_sample(community, rng)
        speaker = community.speakers[int(rng.integers(len(community.speakers)))]
        listener = community.listeners[int(rng.integers(len(community.listeners)))]
        message = speaker_sample(speaker, game, target, rng)
        observed = rollout(game, listener, message,
                           np.random.default_rng([seed, i, 1]))
        estimates = {
            "model": wernicke_decode(wernicke, message),
            "literal": observed,
        }
        for arm, est in estimates.items():
            hits[arm] += est.canonical_key == target.canonical_key
            dists[arm] += trajectory_distance(est, target)
            values[arm] += trajectory_return(est, game.gamma)

    def metrics(arm):
        return {
            "recovery_rate": hits[arm] / n,
            "mean_distance": dists[arm] / n,
            "mean_target_value": values[arm] / n,
        }

    model = metrics("model")
    return ListenerReport(
        recovery_rate=model["recovery_rate"],
        mean_distance=model["mean_distance"],
        mean_target_value=model["mean_target_value"],
        literal_baseline=metrics("literal"),
        n=n,
    )
