"""
Tests for domains, fibre layouts, structured meshes and the crack seam.
"""

import math
import warnings

import numpy as np
import pytest

from src.geometry import (
    BILINEAR,
    SERENDIPITY,
    CrackAlignmentError,
    Domain2D,
    FibreOverlapError,
    MeshError,
    PackingError,
    build_rect_mesh,
    classify_regions,
    dump_mesh_text,
    insert_edge_crack,
    min_center_distance,
    place_fibre_strips,
    place_fibres_random,
    place_fibres_square_array,
)
from src.geometry.domain import FibreLayout


class TestDomain:
    def test_bounds_and_area(self):
        domain = Domain2D(0.1, 0.2, origin=(1.0, 2.0))
        assert domain.x_max == pytest.approx(1.1)
        assert domain.y_max == pytest.approx(2.2)
        assert domain.area == pytest.approx(0.02)
        assert domain.center == pytest.approx((1.05, 2.1))

    @pytest.mark.parametrize("width,height", [(0.0, 1.0), (1.0, -1.0)])
    def test_non_positive_size_rejected(self, width, height):
        with pytest.raises(MeshError):
            Domain2D(width, height)


class TestBuildRectMesh:
    def test_single_bilinear_element(self):
        mesh = build_rect_mesh(Domain2D(1.0, 1.0), 1.0)
        assert mesh.n_elements == 1
        assert mesh.n_nodes == 4
        assert mesh.order == BILINEAR
        assert mesh.h == pytest.approx(1.0)

    def test_single_fibre_serendipity_grid(self):
        mesh = build_rect_mesh(Domain2D(0.02, 0.02), 0.0005, order=SERENDIPITY)
        assert mesh.n_elements == 40 * 40
        assert mesh.nen == 8
        assert mesh.h == pytest.approx(0.0005)
        # corner lattice plus one mid-side node per edge
        assert mesh.n_nodes == 41 * 41 + 2 * 40 * 41

    def test_plate_element_count_from_grid_arithmetic(self):
        mesh = build_rect_mesh(Domain2D(0.1, 0.2), 0.00045)
        nx, ny = math.ceil(0.1 / 0.00045), math.ceil(0.2 / 0.00045)
        assert mesh.n_elements == nx * ny
        assert mesh.n_elements == pytest.approx(98_568, rel=0.05)
        assert mesh.h <= 0.00045 + 1e-15

    def test_degenerate_target_rejected(self):
        with pytest.raises(MeshError):
            build_rect_mesh(Domain2D(1.0, 0.5), 0.6)
        with pytest.raises(MeshError):
            build_rect_mesh(Domain2D(1.0, 1.0), 0.0)

    def test_unknown_order_rejected(self):
        with pytest.raises(MeshError):
            build_rect_mesh(Domain2D(1.0, 1.0), 0.5, order="triangle")

    @pytest.mark.parametrize("order", [BILINEAR, SERENDIPITY])
    def test_boundary_sets_lie_on_their_sides(self, order):
        mesh = build_rect_mesh(Domain2D(2.0, 1.0), 0.25, order=order)
        x, y = mesh.nodes[:, 0], mesh.nodes[:, 1]
        assert np.allclose(x[mesh.node_set("left")], 0.0)
        assert np.allclose(x[mesh.node_set("right")], 2.0)
        assert np.allclose(y[mesh.node_set("bottom")], 0.0)
        assert np.allclose(y[mesh.node_set("top")], 1.0)
        assert len(mesh.node_set("center")) == 1
        assert mesh.node_set("interface").size == 0

    @pytest.mark.parametrize("order", [BILINEAR, SERENDIPITY])
    def test_quadrature_weights_sum_to_area(self, order):
        mesh = build_rect_mesh(Domain2D(0.3, 0.2), 0.05, order=order)
        assert mesh.geometry.wdet.sum() == pytest.approx(0.06)

    def test_edge_nodes_cover_side(self):
        mesh = build_rect_mesh(Domain2D(1.0, 1.0), 0.25, order=SERENDIPITY)
        edges = mesh.edge_nodes("top")
        assert edges.shape == (4, 3)
        assert np.allclose(mesh.nodes[edges.ravel(), 1], 1.0)
        with pytest.raises(MeshError):
            mesh.edge_nodes("front")

    def test_coarse_mesh_warns_against_length_scale(self):
        with pytest.warns(UserWarning, match="length scale"):
            build_rect_mesh(Domain2D(1.0, 1.0), 0.5, length_scale=0.1)

    def test_fine_mesh_does_not_warn(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            build_rect_mesh(Domain2D(1.0, 1.0), 0.05, length_scale=0.1)

    def test_unknown_node_set(self):
        mesh = build_rect_mesh(Domain2D(1.0, 1.0), 0.5)
        with pytest.raises(MeshError, match="crack_upper"):
            mesh.node_set("crack_upper")


class TestSquareArray:
    def test_six_by_six(self):
        domain = Domain2D(0.1, 0.1)
        layout = place_fibres_square_array(6, 6, 0.01, domain)
        assert layout.n_fibres == 36
        assert min_center_distance(layout) == pytest.approx(0.1 / 6)

    def test_single_centered_fibre(self):
        layout = place_fibres_square_array(1, 1, 0.01, Domain2D(0.02, 0.02))
        assert layout.n_fibres == 1
        assert layout.circles[0].x == pytest.approx(0.01)
        assert layout.circles[0].y == pytest.approx(0.01)

    def test_overlap_rejected(self):
        with pytest.raises(FibreOverlapError):
            place_fibres_square_array(2, 2, 0.06, Domain2D(0.1, 0.1))


class TestRandomPlacement:
    def test_valid_non_overlapping_circles(self):
        domain = Domain2D(0.1, 0.1)
        layout = place_fibres_random(36, 0.01, domain, seed=1, min_gap=0.0005)
        assert layout.n_fibres == 36
        assert min_center_distance(layout) >= 0.01 + 0.0005 - 1e-12
        centers = layout.centers()
        assert np.all(centers - 0.005 >= -1e-12)
        assert np.all(centers + 0.005 <= 0.1 + 1e-12)

    def test_empty_layout(self):
        layout = place_fibres_random(0, 0.01, Domain2D(0.1, 0.1), seed=1)
        assert layout.n_fibres == 0

    def test_same_seed_same_layout(self):
        domain = Domain2D(0.1, 0.1)
        first = place_fibres_random(36, 0.01, domain, seed=1)
        second = place_fibres_random(36, 0.01, domain, seed=1)
        assert first.centers().tobytes() == second.centers().tobytes()

    def test_different_seed_different_layout(self):
        domain = Domain2D(0.1, 0.1)
        first = place_fibres_random(10, 0.01, domain, seed=1)
        second = place_fibres_random(10, 0.01, domain, seed=2)
        assert not np.allclose(first.centers(), second.centers())

    def test_infeasible_fraction(self):
        with pytest.raises(PackingError) as excinfo:
            place_fibres_random(100, 0.01, Domain2D(0.1, 0.1), seed=1)
        assert excinfo.value.achieved == 0

    def test_exhausted_retries_report_achieved(self):
        with pytest.raises(PackingError) as excinfo:
            place_fibres_random(10, 0.01, Domain2D(0.1, 0.1), seed=1, min_gap=0.05, max_attempts_per_fibre=50)
        assert 0 < excinfo.value.achieved < 10


class TestFibreStrips:
    def test_orientations_default_to_zero(self):
        layout = place_fibre_strips([(0.1, 0.2), (0.5, 0.6)])
        assert [s.orientation for s in layout.strips] == [0.0, 0.0]

    def test_overlapping_strips_rejected(self):
        with pytest.raises(FibreOverlapError):
            place_fibre_strips([(0.1, 0.3), (0.2, 0.4)])

    def test_orientation_count_must_match(self):
        with pytest.raises(MeshError):
            place_fibre_strips([(0.1, 0.2)], orientations=[0.0, 90.0])


class TestClassifyRegions:
    def test_fibre_area_matches_circle(self):
        domain = Domain2D(0.02, 0.02)
        mesh = build_rect_mesh(domain, 0.0005)
        tagged = classify_regions(mesh, place_fibres_square_array(1, 1, 0.01, domain))
        area = tagged.geometry.wdet[tagged.fibre_mask()].sum()
        assert area == pytest.approx(math.pi * 0.01**2 / 4, rel=0.03)
        assert tagged.node_set("interface").size > 0

    def test_empty_layout_all_matrix(self):
        mesh = build_rect_mesh(Domain2D(1.0, 1.0), 0.25)
        tagged = classify_regions(mesh, FibreLayout())
        assert not tagged.fibre_mask().any()
        assert tagged.node_set("interface").size == 0

    def test_fibre_covering_domain(self):
        mesh = build_rect_mesh(Domain2D(1.0, 1.0), 0.25)
        tagged = classify_regions(mesh, place_fibre_strips([(-0.5, 1.5)], orientations=[90.0]))
        assert tagged.fibre_mask().all()
        assert np.allclose(tagged.orientations, 90.0)
        assert tagged.node_set("interface").size == 0

    def test_interface_nodes_lie_between_phases(self):
        domain = Domain2D(1.0, 1.0)
        mesh = build_rect_mesh(domain, 0.1)
        tagged = classify_regions(mesh, place_fibre_strips([(0.4, 0.6)]))
        y = tagged.nodes[tagged.node_set("interface"), 1]
        assert np.allclose(np.sort(np.unique(np.round(y, 9))), [0.4, 0.6])

    def test_idempotent(self):
        domain = Domain2D(0.02, 0.02)
        layout = place_fibres_square_array(1, 1, 0.01, domain)
        once = classify_regions(build_rect_mesh(domain, 0.001), layout)
        twice = classify_regions(once, layout)
        assert np.array_equal(once.regions, twice.regions)
        assert np.array_equal(once.node_set("interface"), twice.node_set("interface"))


class TestEdgeCrack:
    @pytest.fixture
    def plate(self):
        return build_rect_mesh(Domain2D(0.1, 0.1), 0.01)

    def test_half_width_seam(self, plate):
        cracked, seam = insert_edge_crack(plate, 0.05, 0.05)
        assert seam.length == pytest.approx(0.05)
        on_seam = (np.abs(plate.nodes[:, 1] - 0.05) < 1e-9) & (plate.nodes[:, 0] < 0.05 - 1e-9)
        assert seam.n_duplicated == int(on_seam.sum())
        assert cracked.n_nodes == plate.n_nodes + seam.n_duplicated
        assert np.allclose(cracked.nodes[seam.pairs[:, 0]], cracked.nodes[seam.pairs[:, 1]])

    def test_faces_are_disconnected(self, plate):
        cracked, seam = insert_edge_crack(plate, 0.05, 0.05)
        for original, copy in seam.pairs:
            sharing = np.any(cracked.elements == original, axis=1) & np.any(cracked.elements == copy, axis=1)
            assert not sharing.any()
        assert set(cracked.node_set("crack_lower")) == set(seam.pairs[:, 0])
        assert set(cracked.node_set("crack_upper")) == set(seam.pairs[:, 1])

    def test_tip_node_is_shared(self, plate):
        cracked, _ = insert_edge_crack(plate, 0.05, 0.05)
        tip = plate.nearest_node(0.05, 0.05)
        assert np.any(cracked.elements == tip, axis=1).sum() == 4

    def test_zero_length_leaves_mesh_unchanged(self, plate):
        cracked, seam = insert_edge_crack(plate, 0.0, 0.05)
        assert cracked is plate
        assert seam.n_duplicated == 0

    def test_left_edge_copy_joins_left_set(self, plate):
        cracked, _ = insert_edge_crack(plate, 0.05, 0.05)
        assert len(cracked.node_set("left")) == len(plate.node_set("left")) + 1

    def test_misaligned_crack_rejected(self, plate):
        with pytest.raises(CrackAlignmentError):
            insert_edge_crack(plate, 0.05, 0.055)
        with pytest.raises(CrackAlignmentError):
            insert_edge_crack(plate, 0.045, 0.05)

    def test_crack_longer_than_width_rejected(self, plate):
        with pytest.raises(MeshError):
            insert_edge_crack(plate, 0.1, 0.05)


def test_dump_mesh_text(tmp_path):
    mesh = build_rect_mesh(Domain2D(1.0, 1.0), 0.5)
    path = dump_mesh_text(mesh, tmp_path / "mesh.txt")
    text = path.read_text()
    assert "# nodes 9" in text
    assert "# elements 4 order=bilinear" in text
