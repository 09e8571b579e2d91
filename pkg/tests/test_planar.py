from realign.planar import convex_hull, hulls_disjoint, point_in_hull


def test_square_hull():
    pts = [(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5)]
    hull = convex_hull(pts)
    assert len(hull) == 4
    assert set(hull) == {(0, 0), (1, 0), (1, 1), (0, 1)}


def test_collinear_hull_degenerates_to_segment():
    hull = convex_hull([(0, 0), (1, 0), (2, 0), (3, 0)])
    assert hull == [(0, 0), (3, 0)]


def test_single_and_pair():
    assert convex_hull([(2, 3)]) == [(2, 3)]
    assert convex_hull([(2, 3), (2, 3)]) == [(2, 3)]
    assert len(convex_hull([(0, 0), (1, 1)])) == 2


def test_point_in_hull():
    hull = convex_hull([(0, 0), (4, 0), (4, 4), (0, 4)])
    assert point_in_hull((2, 2), hull)
    assert point_in_hull((0, 0), hull)  # boundary counts
    assert not point_in_hull((5, 2), hull)


def test_disjoint_separated():
    a = [(0, 0), (1, 0), (0.5, 1)]
    b = [(3, 0), (4, 0), (3.5, 1)]
    assert hulls_disjoint(a, b)


def test_overlapping_not_disjoint():
    a = [(0, 0), (2, 0), (1, 2)]
    b = [(1, 1), (3, 1), (2, 3)]
    assert not hulls_disjoint(a, b)


def test_containment_not_disjoint():
    outer = [(0, 0), (10, 0), (10, 10), (0, 10)]
    inner = [(4, 4), (5, 4), (4.5, 5)]
    assert not hulls_disjoint(outer, inner)


def test_touching_counts_as_overlap():
    a = [(0, 0), (1, 0), (1, 1), (0, 1)]
    b = [(1, 0), (2, 0), (2, 1), (1, 1)]  # shared edge
    assert not hulls_disjoint(a, b)
    c = [(1, 1), (2, 2), (2, 1)]  # shared corner with a
    assert not hulls_disjoint(a, c)


def test_point_vs_polygon():
    tri = [(0, 0), (2, 0), (1, 2)]
    assert not hulls_disjoint(tri, [(1, 1)])
    assert hulls_disjoint(tri, [(5, 5)])


def test_segment_cases():
    seg = [(0, 0), (2, 2)]
    crossing = [(0, 2), (2, 0)]
    assert not hulls_disjoint(seg, crossing)
    assert hulls_disjoint(seg, [(3, 0), (4, 0)])
