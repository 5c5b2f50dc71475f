"""Spaces, validation, balls, Hausdorff distance, and serialization."""

from __future__ import annotations

import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghlab import (
    AxiomViolation,
    EmptySet,
    MetricError,
    closed_ball,
    diameter,
    eps_contained,
    hausdorff,
    line_space,
    min_plus_closure,
    pointed,
    pointed_from_json,
    space_from_csv,
    space_from_json,
    space_to_json,
    subspace,
    validate_metric,
)
from ghlab.metric_core import NotSquare, dist_to_set
from ghlab.numerics import INF
from ghlab.verify import random_pointed_space


def test_validate_metric_accepts_a_line():
    s = validate_metric(("a", "b", "c"), [[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    assert s.n == 3
    assert s.d(0, 2) == 2


@pytest.mark.parametrize(
    "rows",
    [
        [[0, 1], [2, 0]],  # asymmetric
        [[0, -1], [-1, 0]],  # negative
        [[1, 1], [1, 0]],  # nonzero diagonal
        [[0, 5, 1], [5, 0, 1], [1, 1, 0]],  # triangle violation
    ],
)
def test_validate_metric_rejects_axiom_violations(rows):
    labels = tuple(str(i) for i in range(len(rows)))
    with pytest.raises(AxiomViolation):
        validate_metric(labels, rows)


def test_validate_metric_rejects_non_square():
    with pytest.raises(NotSquare):
        validate_metric(("a", "b"), [[0, 1]])
    with pytest.raises(AxiomViolation):
        validate_metric(("a", "a"), [[0, 1], [1, 0]])  # duplicate labels


def test_empty_inputs_raise_where_points_are_needed():
    empty = validate_metric((), [])
    with pytest.raises(EmptySet):
        diameter(empty)
    s = line_space([F(0), F(1)])
    with pytest.raises(EmptySet):
        hausdorff(s, [], [0])


def test_zero_distance_pairs_are_allowed():
    # gluings at bridge width 0 produce such hosts; they must validate
    s = validate_metric(("a", "b"), [[0, 0], [0, 0]])
    assert s.d(0, 1) == 0


def test_pointed_accepts_index_and_label():
    s = line_space([F(0), F(2)], labels=("p", "q"))
    assert pointed(s, 1).base == pointed(s, "q").base == 1


def test_closed_ball_and_dist_to_set():
    s = line_space([F(0), F(1), F(3)])
    assert sorted(closed_ball(s, 0, F(1))) == [0, 1]
    assert sorted(closed_ball(s, 0, F(3))) == [0, 1, 2]
    assert dist_to_set(s, 0, [2]) == 3
    assert dist_to_set(s, 0, []) == INF


def test_hausdorff_matches_brute_force():
    rng = random.Random(3)
    for _ in range(50):
        s = random_pointed_space(rng, 2, 6).space
        a = [i for i in range(s.n) if rng.random() < 0.5] or [0]
        b = [i for i in range(s.n) if rng.random() < 0.5] or [s.n - 1]
        expected = max(
            max(min(s.d(i, j) for j in b) for i in a),
            max(min(s.d(i, j) for i in a) for j in b),
        )
        assert hausdorff(s, a, b) == expected
        assert hausdorff(s, b, a) == expected


def test_hausdorff_is_the_least_two_sided_inclusion_threshold():
    s = line_space([F(0), F(1), F(5)])
    a, b = [0, 2], [1]
    h = hausdorff(s, a, b)
    assert eps_contained(s, a, b, h) and eps_contained(s, b, a, h)
    shave = h - F(1, 7)
    assert not (eps_contained(s, a, b, shave) and eps_contained(s, b, a, shave))


@given(
    st.integers(2, 5).flatmap(
        lambda n: st.lists(
            st.lists(st.integers(0, 9), min_size=n, max_size=n),
            min_size=n,
            max_size=n,
        )
    )
)
@settings(max_examples=120, deadline=None)
def test_min_plus_closure_yields_triangle_valid_rows(raw):
    n = len(raw)
    rows = [[0 if i == j else raw[i][j] + raw[j][i] for j in range(n)] for i in range(n)]
    out = min_plus_closure(rows)
    for i in range(n):
        for j in range(n):
            assert out[i][j] <= rows[i][j]
            assert out[i][j] == out[j][i]
            for k in range(n):
                assert out[i][j] <= out[i][k] + out[k][j]
    validate_metric(tuple(str(i) for i in range(n)), out)


def test_subspace_restricts_distances():
    s = line_space([F(0), F(1), F(4), F(9)])
    t = subspace(s, [0, 2, 3])
    assert t.n == 3
    assert t.d(0, 1) == 4 and t.d(1, 2) == 5


def test_diameter():
    assert diameter(line_space([F(0), F(2), F(7)])) == 7
    assert diameter(line_space([F(1)])) == 0


def test_json_round_trip_keeps_basepoint_index():
    s = line_space([F(0), F(1, 3)], labels=("p", "q"))
    obj = space_to_json(s, 1)
    assert obj["basepoint"] == 1
    back = pointed_from_json(obj)
    assert back.base == 1
    assert back.space.dist == s.dist
    assert space_from_json(space_to_json(s)).points == s.points


def test_json_accepts_label_basepoint_and_rejects_unknown():
    s = line_space([F(0), F(1)], labels=("p", "q"))
    obj = space_to_json(s, 0)
    obj["basepoint"] = "q"
    assert pointed_from_json(obj).base == 1
    obj["basepoint"] = "nope"
    with pytest.raises(MetricError):
        pointed_from_json(obj)


def test_csv_parses_square_matrix_with_header():
    s = space_from_csv("a,b\n0,1\n1,0\n")
    assert s.points == ("a", "b")
    assert s.d(0, 1) == F(1)
    sf = space_from_csv("a,b\n0,0.5\n0.5,0\n", backend="float")
    assert sf.d(0, 1) == 0.5


def test_float_backend_accepts_float_rows():
    s = validate_metric(("a", "b"), [[0.0, 1.5], [1.5, 0.0]])
    assert s.d(0, 1) == 1.5
