from __future__ import annotations

import numpy as np
from numba import njit  # type: ignore

BITS = 32
SCALE = 2.0**-BITS

# Primitive polynomials and initial direction numbers (s, a, m_1..m_s) for dimensions 2..40,
# from the Joe-Kuo "new-joe-kuo-6.21201" table. Dimension 1 is the van der Corput sequence.
_INITIAL_NUMBERS: list[tuple[int, int, tuple[int, ...]]] = [
    (1, 0, (1,)),
    (2, 1, (1, 3)),
    (3, 1, (1, 3, 1)),
    (3, 2, (1, 1, 1)),
    (4, 1, (1, 1, 3, 3)),
    (4, 4, (1, 3, 5, 13)),
    (5, 2, (1, 1, 5, 5, 17)),
    (5, 4, (1, 1, 5, 5, 5)),
    (5, 7, (1, 1, 7, 11, 19)),
    (5, 11, (1, 1, 5, 1, 1)),
    (5, 13, (1, 1, 1, 3, 11)),
    (5, 14, (1, 3, 5, 5, 31)),
    (6, 1, (1, 3, 3, 9, 7, 49)),
    (6, 13, (1, 1, 1, 15, 21, 21)),
    (6, 16, (1, 3, 1, 13, 27, 49)),
    (6, 19, (1, 1, 1, 15, 7, 5)),
    (6, 22, (1, 3, 1, 15, 13, 25)),
    (6, 25, (1, 1, 5, 5, 19, 61)),
    (7, 1, (1, 3, 7, 11, 23, 15, 103)),
    (7, 4, (1, 3, 7, 13, 13, 15, 69)),
    (7, 7, (1, 1, 3, 13, 7, 35, 63)),
    (7, 8, (1, 3, 5, 9, 1, 25, 53)),
    (7, 14, (1, 3, 1, 13, 9, 35, 107)),
    (7, 19, (1, 3, 1, 5, 27, 61, 31)),
    (7, 21, (1, 1, 5, 11, 19, 41, 61)),
    (7, 28, (1, 3, 5, 3, 3, 13, 69)),
    (7, 31, (1, 1, 7, 13, 1, 19, 1)),
    (7, 32, (1, 3, 7, 5, 13, 19, 59)),
    (7, 37, (1, 1, 3, 9, 25, 29, 41)),
    (7, 41, (1, 3, 5, 13, 23, 1, 55)),
    (7, 42, (1, 3, 7, 3, 13, 59, 17)),
    (7, 50, (1, 3, 1, 3, 5, 53, 69)),
    (7, 55, (1, 1, 5, 5, 23, 33, 13)),
    (7, 56, (1, 1, 7, 7, 1, 61, 123)),
    (7, 59, (1, 1, 7, 9, 13, 61, 49)),
    (7, 62, (1, 3, 3, 5, 3, 55, 33)),
    (8, 14, (1, 3, 1, 15, 31, 13, 49, 245)),
    (8, 21, (1, 3, 5, 15, 31, 59, 63, 97)),
    (8, 22, (1, 3, 1, 11, 11, 11, 77, 249)),
]

MAX_DIMENSION = len(_INITIAL_NUMBERS) + 1


def build_direction_numbers(dimension: int = MAX_DIMENSION) -> np.ndarray:
    """Builds the 32-bit direction numbers V[j, k] = m_k * 2^(32-k) of each dimension.

    Args:
        dimension (int, optional): Number of dimensions. Defaults to MAX_DIMENSION.

    Returns:
        np.ndarray: An int64 array of shape (dimension, 32).
    """
    directions = np.zeros((dimension, BITS), dtype=np.int64)
    for k in range(BITS):
        directions[0, k] = 1 << (BITS - 1 - k)

    for j in range(1, dimension):
        s, a, m = _INITIAL_NUMBERS[j - 1]
        v = [0] * BITS
        for k in range(min(s, BITS)):
            v[k] = m[k] << (BITS - 1 - k)
        for k in range(s, BITS):
            value = v[k - s] ^ (v[k - s] >> s)
            for i in range(1, s):
                if (a >> (s - 1 - i)) & 1:
                    value ^= v[k - i]
            v[k] = value
        directions[j, :] = v

    return directions


DIRECTIONS = build_direction_numbers()


@njit(cache=True)
def _sobol_into(directions: np.ndarray, shift: np.ndarray, index: int, out: np.ndarray) -> None:
    """Writes the Gray-code ordered Sobol point `index`, XOR-shifted by `shift`, into `out`."""
    gray = index ^ (index >> 1)
    for j in range(out.shape[0]):
        x = shift[j]
        g = gray
        k = 0
        while g > 0:
            if g & 1:
                x ^= directions[j, k]
            g >>= 1
            k += 1
        out[j] = x * SCALE
