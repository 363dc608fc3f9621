import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from uniformgeom import (
    DomainError,
    FiniteMetricSpace,
    MetricValidationError,
    StructuralInputError,
    ball_inclusion_map,
    closed_ball,
    diameter,
    dist_to_set,
    validate_metric,
)
from uniformgeom.spaces import sqrt_interval

from conftest import grid_points, space_of


class TestValidateMetric:
    def test_triangle_violation(self):
        table = [[0, 1, 3], [1, 0, 1], [3, 1, 0]]
        report = validate_metric(table)
        assert report.triangle_violations == [(0, 2, 1, 1.0)]
        assert not report.symmetry_violations and not report.diagonal_violations

    def test_zero_one_metric_is_clean(self):
        table = 1 - np.eye(6)
        report = validate_metric(table)
        assert report.ok
        assert not report

    def test_symmetry_violation(self):
        report = validate_metric([[0, 1], [2, 0]])
        assert report.symmetry_violations == [(0, 1, 1.0, 2.0)]

    def test_diagonal_and_duplicates(self):
        report = validate_metric([[0.5, 0.0], [0.0, 0.0]])
        assert report.diagonal_violations == [(0, 0.5)]
        assert report.positivity_violations == [(0, 1)]

    @pytest.mark.parametrize("bad", [[[0, 1, 2], [1, 0, 1]], [[0, np.nan], [np.nan, 0]], [[0, np.inf], [np.inf, 0]]])
    def test_structural_errors(self, bad):
        with pytest.raises(StructuralInputError):
            validate_metric(bad)

    def test_within_tolerance_is_accepted(self):
        table = np.array([[0, 1, 2 + 5e-10], [1, 0, 1], [2 + 5e-10, 1, 0]])
        assert validate_metric(table).ok

    def test_from_matrix_rejects(self):
        with pytest.raises(MetricValidationError) as info:
            FiniteMetricSpace.from_matrix([[0, 1, 3], [1, 0, 1], [3, 1, 0]])
        assert info.value.report.triangle_violations


def test_duplicate_points_rejected():
    with pytest.raises(MetricValidationError):
        FiniteMetricSpace.from_points([[0.0, 0.0], [0.0, 0.0]])


class TestDistToSet:
    def test_line(self, half_line):
        assert dist_to_set(half_line, 0, [1, 2]) == 0.5

    def test_member(self, half_line):
        assert dist_to_set(half_line, 1, [1, 2]) == 0.0

    def test_empty(self, half_line):
        with pytest.raises(DomainError):
            dist_to_set(half_line, 0, [])

    def test_matches_scan(self, rng):
        space = FiniteMetricSpace.from_points(rng.random((10, 2)))
        for _ in range(20):
            A = sorted(rng.choice(10, size=int(rng.integers(1, 10)), replace=False).tolist())
            x = int(rng.integers(10))
            expect = min(float(np.hypot(*(space.coords[x] - space.coords[a]))) for a in A)
            assert dist_to_set(space, x, A) == pytest.approx(expect, abs=1e-12)

    @given(grid_points, st.data())
    def test_one_lipschitz(self, pts, data):
        space = space_of(pts)
        A = data.draw(st.lists(st.integers(0, space.n - 1), min_size=1, unique=True))
        g = np.array([dist_to_set(space, x, A) for x in range(space.n)])
        assert np.all(np.abs(g[:, None] - g[None, :]) <= space.dist + 1e-9)
        for x in range(space.n):
            assert dist_to_set(space, x, sorted(set(A) | {x})) == 0


class TestClosedBall:
    def test_line(self, line5):
        assert closed_ball(line5, 2, 1).indices == (1, 2, 3)

    def test_radius_zero(self, line5):
        assert closed_ball(line5, 3, 0).indices == (3,)

    def test_covers_all(self, line5):
        assert closed_ball(line5, 0, 4).indices == tuple(range(5))

    def test_negative(self, line5):
        with pytest.raises(DomainError):
            closed_ball(line5, 0, -0.1)

    @given(grid_points, st.floats(0, 20), st.floats(0, 20))
    def test_monotone(self, pts, r1, r2):
        space = space_of(pts)
        lo, hi = sorted((r1, r2))
        assert set(closed_ball(space, 0, lo)) <= set(closed_ball(space, 0, hi))


class TestDiameter:
    def test_singleton(self, line5):
        assert diameter(line5, [3]) == 0

    def test_line(self, line5):
        assert diameter(line5, range(5)) == 4

    def test_empty(self, line5):
        with pytest.raises(DomainError):
            diameter(line5, [])

    def test_matches_pair_scan(self, rng):
        space = FiniteMetricSpace.from_points(rng.random((15, 3)))
        B = [0, 3, 4, 9, 14]
        expect = max(np.linalg.norm(space.coords[i] - space.coords[j]) for i, j in itertools.combinations(B, 2))
        assert diameter(space, B) == pytest.approx(expect, abs=1e-12)

    @given(grid_points, st.data())
    def test_monotone_under_inclusion(self, pts, data):
        space = space_of(pts)
        B = data.draw(st.lists(st.integers(0, space.n - 1), min_size=1, unique=True))
        sub = B[: max(1, len(B) // 2)]
        assert diameter(space, sub) <= diameter(space, B)


class TestBallInclusion:
    def test_identical_metrics(self, rng):
        space = FiniteMetricSpace.from_points(rng.random((12, 2)))
        for r, R in ball_inclusion_map(space, space, 0, [0.1, 0.3, 0.5, 1.0]):
            assert R <= r + 1e-9

    def test_sqrt_example(self):
        d, rho = sqrt_interval(100, 0.25)
        ((r, R),) = ball_inclusion_map(d, rho, 0, [2.0])
        assert R == 4.0

    def test_matches_brute_force(self, rng):
        a = FiniteMetricSpace.from_points(rng.random((12, 2)))
        b = FiniteMetricSpace.from_points(rng.random((12, 3)), metric="l1")
        radii = [0.2, 0.5, 0.9, 1.4]
        out = ball_inclusion_map(a, b, 5, radii)
        for (r, R) in out:
            members = [y for y in range(12) if b.d(5, y) <= r + 1e-9]
            assert R == max(a.d(5, y) for y in members)
            # exactness: any smaller radius misses a member
            assert not all(a.d(5, y) <= R - 1e-6 for y in members)
        Rs = [R for _, R in out]
        assert Rs == sorted(Rs)

    def test_size_mismatch(self, line5, half_line):
        with pytest.raises(StructuralInputError):
            ball_inclusion_map(line5, half_line, 0, [1.0])


def test_lazy_space_matches_dense(rng):
    pts = rng.random((30, 2))
    dense = FiniteMetricSpace.from_points(pts)
    lazy = FiniteMetricSpace.from_points(pts, dense_limit=10)
    assert dense.is_dense and not lazy.is_dense
    for i in (0, 7, 29):
        np.testing.assert_allclose(lazy.row(i), dense.row(i), atol=1e-15)
    assert lazy.d(3, 4) == pytest.approx(dense.d(3, 4))
    assert diameter(lazy, range(30)) == pytest.approx(diameter(dense, range(30)))


def test_tables_are_read_only(line5):
    with pytest.raises(ValueError):
        line5.dist[0, 1] = 7.0


def test_index_checks(line5):
    with pytest.raises(DomainError):
        closed_ball(line5, 5, 1.0)
    with pytest.raises(DomainError):
        line5.subset([1, 1])
