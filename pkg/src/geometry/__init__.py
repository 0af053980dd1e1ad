"""Composite domains, fibre layouts and quadrilateral meshes."""

from .domain import (
    Circle,
    Domain2D,
    FibreLayout,
    FibreOverlapError,
    FibreStrip,
    LayoutKind,
    MeshError,
    PackingError,
    min_center_distance,
    place_fibre_strips,
    place_fibres_random,
    place_fibres_square_array,
)
from .elements import BILINEAR, SERENDIPITY, ElementGeometry, gauss_rule, shape_functions
from .mesh import (
    MATRIX_REGION,
    CrackAlignmentError,
    CrackSeam,
    Mesh,
    build_rect_mesh,
    classify_regions,
    dump_mesh_text,
    insert_edge_crack,
)

__all__ = [
    "BILINEAR",
    "SERENDIPITY",
    "MATRIX_REGION",
    "Circle",
    "CrackAlignmentError",
    "CrackSeam",
    "Domain2D",
    "ElementGeometry",
    "FibreLayout",
    "FibreOverlapError",
    "FibreStrip",
    "LayoutKind",
    "Mesh",
    "MeshError",
    "PackingError",
    "build_rect_mesh",
    "classify_regions",
    "dump_mesh_text",
    "gauss_rule",
    "insert_edge_crack",
    "min_center_distance",
    "place_fibre_strips",
    "place_fibres_random",
    "place_fibres_square_array",
    "shape_functions",
]
