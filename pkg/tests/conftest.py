import math
import random
from itertools import product

import pytest

from torquot import TorusActionS3

# the three reference actions used throughout: the unit-tangent-bundle
# action, Hopf x Hopf x trivial, and the mixed action with anisotropic pencil
T1_ROWS = ((1, 1, 0, 0), (0, 0, 1, 1), (2, 0, 0, 2))
HOPF_ROWS = ((1, 1, 0, 0), (0, 0, 1, 1), (0, 0, 0, 0))
CP2_ROWS = ((1, 0, 0, 1), (1, 1, 1, -1), (0, 0, 0, 0))


@pytest.fixture
def t1_action():
    return TorusActionS3(T1_ROWS)


@pytest.fixture
def hopf_action():
    return TorusActionS3(HOPF_ROWS)


@pytest.fixture
def cp2_action():
    return TorusActionS3(CP2_ROWS)


def lattice_spans_z2(pairs) -> bool:
    """Independent freeness oracle: do the (c, m) pairs generate all of Z^2?

    Folds the pairs into a triangular lattice basis [[g, x], [0, y]] by
    Euclidean steps; the pairs generate Z^2 iff |g * y| = 1.  Deliberately a
    different algorithm from the gcd-of-minors criterion in the package.
    """
    g, x = 0, 0
    y = 0
    for a, b in pairs:
        while a:
            if g == 0:
                g, x, a, b = a, b, 0, 0
                break
            q = a // g
            a, b = a - q * g, b - q * x
            if a:
                g, x, a, b = a, b, g, x
        y = math.gcd(y, b)
    return abs(g * y) == 1


def oracle_is_free(rows) -> bool:
    """Freeness by direct isotropy reasoning: every selection of one
    exponent pair per factor must generate the full weight lattice."""
    choices = [((a, k), (b, l)) for (a, b, k, l) in rows]
    return all(lattice_spans_z2(sel) for sel in product(*choices))


def random_action(rng: random.Random, n_factors: int, bound: int) -> TorusActionS3:
    return TorusActionS3(
        tuple(
            tuple(rng.randint(-bound, bound) for _ in range(4))
            for _ in range(n_factors)
        )
    )


def random_unimodular(rng: random.Random, steps: int = 4):
    """Random determinant +-1 integer 2x2 matrix from shears and swaps."""
    m = [[1, 0], [0, 1]]
    for _ in range(steps):
        t = rng.randint(-3, 3)
        if rng.random() < 0.5:
            m = [[m[0][0] + t * m[1][0], m[0][1] + t * m[1][1]], m[1]]
        else:
            m = [m[0], [m[1][0] + t * m[0][0], m[1][1] + t * m[0][1]]]
        if rng.random() < 0.3:
            m = [m[1], m[0]]
        if rng.random() < 0.3:
            m = [[-m[0][0], -m[0][1]], m[1]]
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    assert abs(det) == 1
    return m


def reparametrized(act: TorusActionS3, m) -> TorusActionS3:
    """Action after the torus substitution (x, y) = (z^m00 w^m01, z^m10 w^m11)."""
    (p, q), (r, s) = m
    det = p * s - q * r
    rows = []
    for a, b, k, l in act.rows:
        # (a', k') solves (a, k) = a'(p, q) + k'(r, s); inverse has det +-1
        rows.append(
            (
                (a * s - k * r) * det,
                (b * s - l * r) * det,
                (-a * q + k * p) * det,
                (-b * q + l * p) * det,
            )
        )
    return TorusActionS3(tuple(rows))
