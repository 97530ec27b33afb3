"""Distance oracle, hyperbolicity measurement and thinness checking."""

from fractions import Fraction

import numpy as np
import pytest

from hypschur import (
    Graph,
    GraphError,
    enumerate_geodesics,
    gromov_product,
    hyperbolicity_profile,
    thinness_check,
)


def test_line_distances_closed_form(line12):
    for i in line12.vertices():
        d = line12.distances(i)
        for j in line12.vertices():
            assert d[j] == abs(i - j)


def test_cycle_distances_closed_form(cycle12):
    n = cycle12.vertex_count
    for i in cycle12.vertices():
        d = cycle12.distances(i)
        for j in cycle12.vertices():
            assert d[j] == min(abs(i - j), n - abs(i - j))


def test_distance_matrix_consistent(tree34):
    D = tree34.distance_matrix()
    assert D.shape == (46, 46)
    assert (D == D.T).all()
    assert (np.diag(D) == 0).all()
    for v in (0, 1, 45):
        assert (D[v] == tree34.distances(v)).all()


def test_gromov_product_values(cycle12):
    # (x|y)_w = (d(x,w) + d(y,w) - d(x,y)) / 2, exact rational
    for (x, y, w) in [(0, 6, 3), (0, 1, 7), (2, 9, 4)]:
        d = cycle12.distance
        expected = Fraction(d(x, w) + d(y, w) - d(x, y), 2)
        got = gromov_product(cycle12, x, y, w)
        assert got == expected
        assert isinstance(got, Fraction)


def test_geodesic_enumeration_line(line12):
    geos = enumerate_geodesics(line12, 2, 9)
    assert len(geos.paths) == 1
    assert geos.paths[0] == tuple(range(2, 10))


def test_geodesic_enumeration_cycle_antipodes(cycle12):
    # between antipodes both arcs are geodesics; otherwise just one
    assert len(enumerate_geodesics(cycle12, 0, 6).paths) == 2
    assert len(enumerate_geodesics(cycle12, 0, 4).paths) == 1


def test_tree_is_zero_hyperbolic(tree34):
    prof = hyperbolicity_profile(tree34, mode="exact")
    assert prof.delta_thin == 0
    assert prof.delta_four_point == 0
    assert not prof.sampled


def test_free_group_ball_is_zero_hyperbolic(f23):
    prof = hyperbolicity_profile(f23, mode="exact")
    assert prof.delta_thin == 0
    assert prof.delta_four_point == 0


def test_cycle_twelve_profile(cycle12):
    prof = hyperbolicity_profile(cycle12, mode="exact")
    assert prof.delta_thin == 3
    assert prof.delta_four_point == 3
    assert prof.quadruples_checked == 12 ** 4


def test_delta_impl_floor():
    # the implementation constant never drops below 1 even on trees
    g = Graph([(1,), (0, 2), (1,)], base_point=0)
    prof = hyperbolicity_profile(g, mode="exact")
    assert prof.delta_thin == 0
    assert prof.delta_impl == 1


def test_sampled_profile_is_seeded(f24):
    a = hyperbolicity_profile(f24, mode="sampled", sample_budget=2000, seed=7)
    b = hyperbolicity_profile(f24, mode="sampled", sample_budget=2000, seed=7)
    assert a.sampled
    assert (a.delta_thin, a.delta_four_point) == (b.delta_thin, b.delta_four_point)
    # the ball of a free group is a tree, so any sample reports zero
    assert a.delta_thin == 0 and a.delta_four_point == 0


def test_sampled_profile_bounded_by_exact(cycle12):
    exact = hyperbolicity_profile(cycle12, mode="exact")
    samp = hyperbolicity_profile(cycle12, mode="sampled", sample_budget=3000, seed=3)
    # a sample maximum can only undershoot the true maximum
    assert samp.sampled
    assert samp.delta_thin <= exact.delta_thin
    assert samp.delta_four_point <= exact.delta_four_point


def test_thinness_passes_at_measured_delta(cycle12):
    prof = hyperbolicity_profile(cycle12, mode="exact")
    rep = thinness_check(cycle12, prof.delta_impl)
    assert rep.passed
    assert rep.checked > 0
    assert rep.worst_slack >= 0


def test_thinness_fails_below_measured_delta(cycle12):
    rep = thinness_check(cycle12, 0)
    assert not rep.passed
    assert rep.violations
    assert rep.worst_slack < 0


def test_base_ray_is_geodesic(f24):
    path = f24.base_ray
    assert path[0] == f24.base_point
    d = f24.distances(f24.base_point)
    for i, v in enumerate(path):
        assert d[v] == i
    for a, b in zip(path, path[1:]):
        assert b in f24.neighbors(a)


def test_vertex_rays_merge_into_base_ray(f24):
    for x in (0, 5, 100, 160):
        ray = f24.ray(x)
        assert ray.path[0] == x
        d = f24.distances(x)
        for i, v in enumerate(ray.path):
            assert d[v] == i


def test_labels_round_trip(f23):
    for v in (0, 1, 25, 52):
        assert f23.vertex_by_label(f23.label(v)) == v


def test_disconnected_input_rejected():
    with pytest.raises(GraphError):
        Graph([(1,), (0,), (3,), (2,)], base_point=0)
