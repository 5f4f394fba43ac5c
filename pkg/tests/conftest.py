import pytest

from cooplang import (
    CommunityConfig,
    ListenerPolicy,
    build_community,
    lewis_game,
    supermarket_game,
)


@pytest.fixture
def lewis3():
    return lewis_game()


@pytest.fixture
def codebook_listener():
    # a -> candidate 0, b -> candidate 1, c -> candidate 2
    return ListenerPolicy(
        codebook={"a": ("pick0",), "b": ("pick1",), "c": ("pick2",)},
        epsilon=0.0,
    )


@pytest.fixture
def sm_2x2():
    # the listed item needs two moves, so no branch terminates early
    return supermarket_game(
        width=2, height=2,
        items={"milk": (1, 1)},
        shopping_list=["milk"],
        start=(0, 0),
        horizon=2,
        vocab=tuple("abcdefgh"),
        max_msg_len=2,
    )


@pytest.fixture
def sm_3x3():
    return supermarket_game(
        width=3, height=3,
        items={"milk": (0, 1), "bread": (2, 2)},
        shopping_list=["milk", "bread"],
        start=(0, 0),
        horizon=3,
        vocab=tuple("abcdefgh"),
        max_msg_len=2,
    )


@pytest.fixture
def lewis_community(lewis3):
    return build_community(CommunityConfig(game=lewis3), 0)


@pytest.fixture
def noiseless_lewis_community(lewis3):
    cfg = CommunityConfig(game=lewis3, epsilon=0.0, greedy_msg=True)
    return build_community(cfg, 0)
