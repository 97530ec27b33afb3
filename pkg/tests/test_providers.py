"""Snapshot providers: closed-form sizes, degrees, file loading."""

import warnings

import pytest

from hypschur import (
    EdgeListParseError,
    GraphError,
    ProviderSpec,
    build_graph,
    gen_cycle,
    gen_free_group_ball,
    gen_line,
    gen_regular_tree,
    load_edge_list,
)


def free_ball_size(rank, radius):
    # 1 + 2r * sum_{i<R} (2r-1)^i vertices in the radius-R Cayley ball
    total, layer = 1, 1
    for i in range(radius):
        layer = layer * (2 * rank - 1) if i else 2 * rank
        total += layer
    return total


def tree_size(branching, depth):
    total, layer = 1, 1
    for i in range(depth):
        layer = layer * (branching - 1) if i else branching
        total += layer
    return total


@pytest.mark.parametrize("rank,radius", [(2, 2), (2, 3), (2, 4), (2, 5), (3, 2)])
def test_free_group_ball_sizes(rank, radius):
    g = gen_free_group_ball(rank, radius)
    assert g.vertex_count == free_ball_size(rank, radius)
    assert g.core_radius == radius


def test_free_group_ball_degrees():
    g = gen_free_group_ball(2, 3)
    d0 = g.distances(g.base_point)
    for v in g.vertices():
        if d0[v] < 3:
            assert g.degree(v) == 4
        else:
            assert g.degree(v) == 1


@pytest.mark.parametrize("b,d", [(3, 4), (3, 5), (2, 5), (4, 3)])
def test_regular_tree_sizes(b, d):
    g = gen_regular_tree(b, d)
    assert g.vertex_count == tree_size(b, d)
    assert g.edge_count() == g.vertex_count - 1
    assert g.core_radius == d


def test_regular_tree_degrees():
    g = gen_regular_tree(3, 4)
    d0 = g.distances(g.base_point)
    for v in g.vertices():
        assert g.degree(v) == (3 if d0[v] < 4 else 1)


def test_line_and_cycle_shapes():
    line = gen_line(17)
    assert line.vertex_count == 18
    assert line.edge_count() == 17
    cyc = gen_cycle(9)
    assert cyc.vertex_count == 9
    assert cyc.edge_count() == 9
    assert all(cyc.degree(v) == 2 for v in cyc.vertices())


def test_build_graph_dispatch(f23):
    g = build_graph(ProviderSpec("free_group", {"rank": 2, "radius": 3}))
    assert g.vertex_count == f23.vertex_count
    assert g.provider == f23.provider
    with pytest.raises((GraphError, ValueError)):
        build_graph(ProviderSpec("moebius_strip", {}))


def test_vertex_cap_enforced():
    with pytest.raises(GraphError):
        build_graph(ProviderSpec("free_group", {"rank": 2, "radius": 4}),
                    vertex_cap=50)


def test_base_ray_reaches_boundary():
    g = gen_free_group_ball(2, 4)
    assert len(g.base_ray) == 5  # radius + 1 vertices
    g2 = gen_regular_tree(3, 5)
    assert len(g2.base_ray) == 6


def test_load_edge_list_round_trip(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text(
        "# a path with a spur\n"
        "0 1\n"
        "1 2\n"
        "2 3\n"
        "1 4\n"
        "base 0\n"
        "ray 0 1 2 3\n")
    g = load_edge_list(p)
    assert g.vertex_count == 5
    assert g.base_point == 0
    assert g.base_ray == (0, 1, 2, 3)
    assert g.distance(0, 3) == 3
    assert g.distance(4, 3) == 3


def test_load_edge_list_defaults(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("5 6\n6 7\n")
    g = load_edge_list(p)
    assert g.vertex_count == 3
    assert g.base_point == 0  # smallest declared id, compacted


def test_load_edge_list_duplicate_warns(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("0 1\n1 0\n1 2\n")
    with pytest.warns(UserWarning):
        g = load_edge_list(p)
    assert g.edge_count() == 2


def test_load_edge_list_keeps_base_component(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("0 1\n1 2\n7 8\nbase 0\n")
    with pytest.warns(UserWarning, match="outside the base component"):
        g = load_edge_list(p)
    assert g.vertex_count == 3


def test_load_edge_list_rejects_garbage(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("0 1\npotato\n")
    with pytest.raises(EdgeListParseError):
        load_edge_list(p)


def test_load_edge_list_require_ray(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("0 1\n1 2\n")
    with pytest.raises(GraphError):
        load_edge_list(p, require_ray=True)


def test_load_edge_list_bad_ray_rejected(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("0 1\n1 2\nray 0 2\n")
    with pytest.raises((EdgeListParseError, GraphError)):
        load_edge_list(p)
