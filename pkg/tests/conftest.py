import random

import pytest

from setsat.hfset import EMPTY, HFSet


def random_hfset(rng: random.Random, max_rank: int, max_width: int = 3) -> HFSet:
    if max_rank <= 0 or rng.random() < 0.25:
        return EMPTY
    width = rng.randint(0, max_width)
    return HFSet(
        random_hfset(rng, max_rank - 1, max_width) for _ in range(width)
    )


def distinct_hfsets(rng: random.Random, count: int, max_rank: int = 3) -> list[HFSet]:
    seen: set[HFSet] = set()
    attempts = 0
    while len(seen) < count:
        attempts += 1
        if attempts > 10_000:
            raise RuntimeError("generator stuck")
        seen.add(random_hfset(rng, max_rank))
    return sorted(seen)


def random_partition_blocks(
    rng: random.Random, max_blocks: int = 4, max_rank: int = 3
) -> list[HFSet]:
    """Pairwise disjoint nonempty blocks built from distinct elements."""
    block_count = rng.randint(1, max_blocks)
    pool = distinct_hfsets(rng, block_count + rng.randint(0, 4), max_rank)
    rng.shuffle(pool)
    blocks = [[pool.pop()] for _ in range(block_count)]
    while pool:
        blocks[rng.randrange(block_count)].append(pool.pop())
    return [HFSet(b) for b in blocks]


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xC0FFEE)
