"""Shared generators for the test suite.

The random builders reuse the library's public generators where sharing an
instance source is harmless; every asserted value is still recomputed by an
independent oracle or a frozen expected constant.
"""

from __future__ import annotations

import random
from fractions import Fraction

from ghlab import pointed, validate_metric
from ghlab.gluing import GluedSpace, correspondence, glue_from_correspondence
from ghlab.verify import random_pointed_space


def random_correspondence_pairs(rng: random.Random, nx: int, ny: int) -> set:
    pairs = {(i, j) for i in range(nx) for j in range(ny) if rng.random() < 0.6}
    pairs |= {(i, rng.randrange(ny)) for i in range(nx)}
    pairs |= {(rng.randrange(nx), j) for j in range(ny)}
    return pairs


def random_glued(rng: random.Random, nx_hi: int = 4, ny_hi: int = 3) -> GluedSpace:
    """Random correspondence gluing of two random rational pointed spaces."""
    px = random_pointed_space(rng, 1, nx_hi)
    py = random_pointed_space(rng, 1, ny_hi)
    rel = correspondence(random_correspondence_pairs(rng, px.n, py.n), px.n, py.n)
    return glue_from_correspondence(px, py, rel)


def _sup_host(points: list, labels: list):
    rows = [
        [max(abs(a0 - b0), abs(a1 - b1)) for (b0, b1) in points] for (a0, a1) in points
    ]
    return validate_metric(tuple(labels), rows)


def ball_only_embedding(eps: Fraction = Fraction(1, 4)):
    """A pseudo-embedding of a bent line that preserves distances on the unit
    ball around the basepoint but contracts far pairs.

    X is a six-point line; its three far points are folded back over the
    plane so their images sit just above the unit square Y.  Returns
    (host, X pointed at 0, embed_x, Y pointed at (0,0), embed_y).
    """
    if not 0 < eps < Fraction(1, 2):
        raise ValueError("the fold needs 0 < eps < 1/2")
    far = [-6 + 2 * eps, -5 + 2 * eps, -4 + 2 * eps]
    near = [Fraction(-1), Fraction(0), Fraction(1)]
    xs = far + near
    x_rows = [[abs(a - b) for b in xs] for a in xs]
    X = pointed(validate_metric(tuple(str(v) for v in xs), x_rows), 4)
    # far points fold to ((-5+2eps) - x, 1-eps); near points drop to (x, eps)
    images = [((-5 + 2 * eps) - x, 1 - eps) for x in far] + [(x, eps) for x in near]
    grid = [(x, y) for y in (Fraction(0), Fraction(1)) for x in near]
    y_rows = [
        [max(abs(a0 - b0), abs(a1 - b1)) for (b0, b1) in grid] for (a0, a1) in grid
    ]
    Y = pointed(validate_metric(tuple(str(p) for p in grid), y_rows), 1)
    pts = images + grid
    host = _sup_host(pts, [f"h{k}" for k in range(len(pts))])
    return host, X, tuple(range(6)), Y, tuple(range(6, 12))


def ball_only_glued_unchecked(eps: Fraction) -> GluedSpace:
    """The same instance assembled without the distance-preservation check."""
    host, X, ex, Y, ey = ball_only_embedding(eps)
    return GluedSpace(host=host, embed_x=ex, embed_y=ey, origin_x=X, origin_y=Y)
