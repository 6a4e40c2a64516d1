"""Independent reference computations used to check the package.

Everything here works on plain tuples of Fractions and is written straight
from the defining formulas, without importing the package's algebra.
"""

from fractions import Fraction as Fr
import math


def q(*values):
    return tuple(Fr(v) for v in values)


def product_literal(a, b):
    """Four-point product approximation, term by term as published."""
    a1, a2, a3, a4 = a
    b1, b2, b3, b4 = b
    c1 = (Fr(3, 2) * (a2 - a1) * (b2 - b1)
          + 2 * ((a2 - a1) * b1 + (b2 - b1) * a1)
          + 3 * a1 * b1 - 2 * a2 * b2)
    c4 = (Fr(3, 2) * (a4 - a3) * (b4 - b3)
          - 2 * ((a4 - a3) * b4 + (b4 - b3) * a4)
          + 3 * a4 * b4 - 2 * a3 * b3)
    return (c1, a2 * b2, a3 * b3, c4)


def add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def reciprocal(a):
    return (1 / a[3], 1 / a[2], 1 / a[1], 1 / a[0])


def centroid(a):
    return sum(a) / 4


def extent_weights(matrix):
    rows = [tuple(sum(c) for c in zip(*row)) for row in matrix]
    grand = tuple(sum(c) for c in zip(*rows))
    g = reciprocal(grand)
    return [product_literal(r, g) for r in rows]


def full_matrix(upper, diag=(1, 1, 1, 1)):
    """Square matrix from its strict upper triangle, reciprocals below."""
    n = len(upper) + 1
    m = [[q(*diag) for _ in range(n)] for _ in range(n)]
    for i, row in enumerate(upper):
        for k, entry in enumerate(row):
            j = i + 1 + k
            m[i][j] = entry
            m[j][i] = reciprocal(entry)
    return m


def offer_value(ratings, weights):
    total = (Fr(0),) * 4
    for p, w in zip(ratings, weights):
        total = add(total, product_literal(p, w))
    return total


# reputation update, written with natural logs rather than a power
def eta(x, lam=0.001):
    return -math.expm1(-lam * x * math.log(1.01))


def increased(or_t, x, beta, lam=0.001):
    return or_t + eta(x, lam) / (1 + beta) * (1 - or_t)


def decreased(or_t, x, beta, gamma, lam=0.001):
    return max(0.0, or_t - gamma * eta(x, lam) / (1 + beta) * (1 - or_t))


def blended(r, shared, alpha):
    return alpha * r + (1 - alpha) * shared
