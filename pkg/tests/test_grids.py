import numpy as np
import pytest

from mdsolve.grids import (
    BoundaryConfig,
    Segment,
    build_cross_2d,
    build_network_2d,
    build_random_network_2d,
    build_regular_network_3d,
)


def dims_of(grid):
    return sorted((s.dim for s in grid.subdomains), reverse=True)


# -- cross geometry -----------------------------------------------------------


def test_cross_n2_structure():
    g = build_cross_2d(2)
    assert dims_of(g) == [2, 1, 1, 0]
    assert g.subdomain(0).cell_count == 4
    assert [s.cell_count for s in g.subdomains if s.dim == 1] == [2, 2]


@pytest.mark.parametrize("n", [2, 4, 6, 16])
def test_cross_gamma_dof_count(n):
    # enumeration oracle: each fracture is coupled on both sides over all n
    # cells, and the crossing point couples all four incident branches
    expected = 2 * 2 * n + 4
    g = build_cross_2d(n)
    assert g.dof_partition.n_gamma == expected
    assert sum(len(i.cell_pairs) for i in g.interfaces) == expected


def test_cross_n4_matches_frozen_count():
    assert build_cross_2d(4).dof_partition.n_gamma == 20


@pytest.mark.parametrize("n", [2, 4, 8])
def test_partition_disjoint_and_exhaustive(n):
    g = build_cross_2d(n)
    part = g.dof_partition
    covered = []
    for _, start, stop in part.omega_ranges + part.gamma_ranges:
        covered.extend(range(start, stop))
    assert covered == list(range(part.n_total))
    assert part.omega_ranges[-1][2] <= part.gamma_ranges[0][1]


def test_cross_rejects_bad_n():
    with pytest.raises(ValueError):
        build_cross_2d(1)
    with pytest.raises(ValueError):
        build_cross_2d(5)  # center not on a lattice line


# -- general / random 2d networks ---------------------------------------------


def test_no_fractures_single_subdomain():
    g = build_random_network_2d(4, 0)
    assert len(g.subdomains) == 1
    assert len(g.interfaces) == 0
    assert g.subdomain(0).cell_count == 16


def test_single_horizontal_fracture():
    g = build_network_2d(4, [Segment(0, 2, 0, 4)])
    assert dims_of(g) == [2, 1]
    assert len(g.interfaces) == 2
    assert all(len(i.cell_pairs) == 4 for i in g.interfaces)


def test_random_network_is_deterministic():
    a = build_random_network_2d(8, 5, seed=42)
    b = build_random_network_2d(8, 5, seed=42)
    assert a.summary() == b.summary()
    for sa, sb in zip(a.subdomains, b.subdomains):
        assert np.array_equal(sa.cell_centers, sb.cell_centers)
        assert sa.internal_faces == sb.internal_faces


def test_collinear_overlapping_fractures_merge():
    g = build_network_2d(8, [Segment(0, 4, 0, 5), Segment(0, 4, 3, 8)])
    ones = [s for s in g.subdomains if s.dim == 1]
    assert len(ones) == 1
    assert ones[0].cell_count == 8


def test_collinear_touching_fractures_merge():
    g = build_network_2d(8, [Segment(0, 4, 0, 4), Segment(0, 4, 4, 8)])
    assert len([s for s in g.subdomains if s.dim == 1]) == 1


def test_degenerate_segment_rejected():
    with pytest.raises(ValueError):
        build_network_2d(8, [Segment(0, 4, 3, 3)])
    with pytest.raises(ValueError):
        build_network_2d(8, [Segment(0, 0, 0, 8)])  # line on the boundary


def test_immersed_tip_gets_no_coupling():
    # fracture ends mid-domain: its tip cell has no boundary face there
    g = build_network_2d(8, [Segment(0, 4, 2, 6)])
    frac = [s for s in g.subdomains if s.dim == 1][0]
    assert frac.cell_count == 4
    assert frac.boundary_faces == ()


def test_t_junction_couples_single_branch():
    # vertical fracture ends exactly on the horizontal one
    g = build_network_2d(8, [Segment(0, 4, 0, 8), Segment(1, 4, 4, 8)])
    assert dims_of(g) == [2, 1, 1, 0]
    point_ifaces = [i for i in g.interfaces if i.dim == 0]
    pair_counts = sorted(len(i.cell_pairs) for i in point_ifaces)
    assert pair_counts == [1, 2]  # one branch from the vertical, two from the horizontal


# -- 3d networks ---------------------------------------------------------------


def test_one_plane_dims():
    g = build_regular_network_3d(4, 1)
    assert dims_of(g) == [3, 2]
    assert len(g.interfaces) == 2


def test_two_planes_have_a_line():
    g = build_regular_network_3d(4, 2)
    assert dims_of(g) == [3, 2, 2, 1]


def test_three_orthogonal_planes_enumeration():
    n = 4
    g = build_regular_network_3d(n, 3)
    by_dim = {d: sum(1 for s in g.subdomains if s.dim == d) for d in range(4)}
    assert by_dim == {3: 1, 2: 3, 1: 3, 0: 1}
    # combinatorial oracle for mortar counts: every plane is coupled on two
    # sides over n*n cells; each of the three lines lies in two planes and is
    # coupled from both in-plane sides over n cells; the triple point couples
    # two branches of each line
    expected_gamma = 3 * 2 * n * n + 3 * 2 * 2 * n + 3 * 2
    assert g.dof_partition.n_gamma == expected_gamma
    # omega count: matrix plus plane/line/point cells
    assert g.dof_partition.n_omega == n**3 + 3 * n**2 + 3 * n + 1


def test_plane_grids_disconnect_along_lines():
    n = 4
    g = build_regular_network_3d(n, 3)
    for s in g.subdomains:
        if s.dim == 2:
            # a quartered plane loses 2n of its 2n(n-1) internal faces
            assert len(s.internal_faces) == 2 * n * (n - 1) - 2 * n
        if s.dim == 1:
            assert len(s.internal_faces) == n - 2  # split at the center


def test_interface_dimension_chain():
    for grid in (build_cross_2d(4), build_regular_network_3d(4, 3)):
        for itf in grid.interfaces:
            hi = grid.subdomain(itf.higher_id)
            lo = grid.subdomain(itf.lower_id)
            assert hi.dim == lo.dim + 1 == itf.dim + 1


def test_codim_one_cells_are_coupled_twice():
    for grid in (
        build_cross_2d(4),
        build_random_network_2d(8, 4, seed=1),
        build_regular_network_3d(4, 3),
    ):
        nd = grid.ambient_dim
        for s in grid.subdomains:
            if s.dim != nd - 1:
                continue
            seen = np.zeros(s.cell_count, dtype=int)
            for itf in grid.interfaces:
                if itf.lower_id == s.id and grid.subdomain(itf.higher_id).dim == nd:
                    for _, _, lc, _ in itf.cell_pairs:
                        seen[lc] += 1
            assert np.all(seen == 2)


def test_two_sided_interfaces_have_opposite_orientation():
    g = build_cross_2d(4)
    for s in g.subdomains:
        if s.dim != 1:
            continue
        sides = [i for i in g.interfaces if i.lower_id == s.id and i.dim == 1]
        assert len(sides) == 2
        assert {i.orientation[0] for i in sides} == {-1, 1}


def test_3d_rejects_bad_inputs():
    with pytest.raises(ValueError):
        build_regular_network_3d(1, 1)
    with pytest.raises(ValueError):
        build_regular_network_3d(5, 1)  # odd n cannot host the center plane
    with pytest.raises(ValueError):
        build_regular_network_3d(6, 4)  # quarter positions need n % 4 == 0
    with pytest.raises(ValueError):
        build_regular_network_3d(8, 10)


def test_nine_planes_desk_analog():
    g = build_regular_network_3d(8, 9)
    by_dim = {d: sum(1 for s in g.subdomains if s.dim == d) for d in range(4)}
    assert by_dim == {3: 1, 2: 9, 1: 27, 0: 27}


def test_summary_fields():
    g = build_cross_2d(4)
    s = g.summary()
    assert s["n_omega"] + s["n_gamma"] == s["n_total"] == g.dof_partition.n_total
    assert s["mortar_cells"] == s["n_gamma"]
    assert "subdomains_by_dim" in s and s["subdomains_by_dim"][2] == 1
    assert isinstance(g.describe(), str)


def test_pure_neumann_config():
    g = build_cross_2d(2, bc=BoundaryConfig(dirichlet_axis=None))
    tags = {
        tag[0]
        for s in g.subdomains
        for (_, _, tag) in s.boundary_faces
    }
    assert tags == {"neumann"}
