import numpy as np
import pytest

from travmarch import GridMap, parse_ascii


def random_walled_map(rng, width=30, height=30, resolution=0.1, keep_free=((0, 0),)):
    """Random map with axis-aligned wall bars and blocks; selected cells stay free."""
    occ = np.zeros((height, width), bool)
    for _ in range(int(rng.integers(3, 8))):
        if rng.random() < 0.5:
            # horizontal bar
            r = int(rng.integers(0, height))
            c0 = int(rng.integers(0, width - 2))
            length = int(rng.integers(2, max(3, width // 2)))
            occ[r, c0 : min(width, c0 + length)] = True
        else:
            c = int(rng.integers(0, width))
            r0 = int(rng.integers(0, height - 2))
            length = int(rng.integers(2, max(3, height // 2)))
            occ[r0 : min(height, r0 + length), c] = True
    for _ in range(int(rng.integers(0, 4))):
        r = int(rng.integers(0, height - 3))
        c = int(rng.integers(0, width - 3))
        occ[r : r + int(rng.integers(2, 4)), c : c + int(rng.integers(2, 4))] = True
    for col, row in keep_free:
        occ[row, col] = False
    return GridMap(occ, resolution)


ROOM_9X7 = """\
9 7 0.5
#########
#.......#
#.......#
#.......#
#.......#
#.......#
#########
"""

# Two rooms joined by a single-cell door in the central wall.
TWO_ROOMS = """\
15 9 0.5
###############
#......#......#
#......#......#
#......#......#
#.............#
#......#......#
#......#......#
#......#......#
###############
"""


@pytest.fixture
def room():
    return parse_ascii(ROOM_9X7)


@pytest.fixture
def empty_100(scope="session"):
    return GridMap(np.zeros((100, 100), bool), 0.1)
