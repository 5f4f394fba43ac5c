"""Build a synthetic community and inspect its conventions.

A community pairs Boltzmann speakers with codebook listeners. The seeded
builder permutes which message stands for which plan, so two communities
with different seeds speak different private languages about the same game.
"""

import numpy as np

from cooplang import (
    CommunityConfig,
    build_community,
    lewis_game,
    rollout,
    target_prior_sample,
)
from cooplang.community import speaker_message_dist, speaker_sample


def main():
    game = lewis_game()
    cfg = CommunityConfig(game=game, temp_msg=0.5, epsilon=0.1)

    for seed in (0, 1):
        com = build_community(cfg, seed)
        print(f"community seed {seed}: codebook "
              f"{com.listeners[0].codebook}")

    com = build_community(cfg, 0)
    speaker = com.speakers[0]
    listener = com.listeners[0]

    print()
    print("speaker message distribution per target:")
    for tau in com.trajectories():
        msgs, probs = speaker_message_dist(speaker, game, tau)
        shown = ", ".join(f"{m.canonical() or '(null)'}:{p:.3f}"
                          for m, p in zip(msgs, probs))
        print(f"  {tau.canonical_key:24s} -> {shown}")

    print()
    print("one noisy episode:")
    rng = np.random.default_rng(7)
    target = target_prior_sample(com, rng)
    message = speaker_sample(speaker, game, target, rng)
    realized = rollout(game, listener, message, rng)
    print(f"  target   {target.canonical_key}")
    print(f"  message  {message.canonical()!r}")
    print(f"  realized {realized.canonical_key}")


if __name__ == "__main__":
    main()
