"""Walk through the two referential games and their trajectory spaces.

Builds a Lewis signalling game and a small gridworld supermarket, steps
through them by hand, and enumerates every feasible trajectory.
"""

import numpy as np

from cooplang import (
    enumerate_trajectories,
    lewis_game,
    make_trajectory,
    supermarket_game,
    trajectory_return,
)


def main():
    print("=== Lewis signalling game ===")
    lewis = lewis_game(n_candidates=3)
    print(f"actions: {lewis.env_actions}")
    for tau in enumerate_trajectories(lewis):
        print(f"  {tau.canonical_key}  return={trajectory_return(tau, 1.0)}")

    print()
    print("=== 2x2 supermarket, milk on the far corner ===")
    sm = supermarket_game(
        width=2, height=2, items={"milk": (1, 1)}, shopping_list=["milk"],
        start=(0, 0), horizon=2, vocab=tuple("abcd"), max_msg_len=2)
    trajs = enumerate_trajectories(sm)
    print(f"{len(trajs)} trajectories of horizon {sm.horizon}")

    tau = make_trajectory(sm, ("S", "pick"))
    print(f"walking south then picking: rewards {tau.rewards}")

    print()
    print("=== 3x3 supermarket with a two-item shopping list ===")
    sm3 = supermarket_game(
        width=3, height=3, items={"milk": (0, 1), "bread": (2, 2)},
        shopping_list=["milk", "bread"], start=(0, 0), horizon=3,
        vocab=tuple("abcdefgh"), max_msg_len=2)
    trajs = enumerate_trajectories(sm3)
    values = np.array([trajectory_return(t, sm3.gamma) for t in trajs])
    best = trajs[int(np.argmax(values))]
    print(f"{len(trajs)} trajectories; best return {values.max():.2f} "
          f"via actions {best.actions}")


if __name__ == "__main__":
    main()
