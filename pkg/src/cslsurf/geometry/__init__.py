from .creation import box_mesh, icosphere, mesh_to_obj, mesh_to_stl
from .mesh import TriangleMesh, load_mesh
from .patches import MassProperties, SurfacePatches, rotation_to_z, unit_vector
from .shapes import (
    ANALYTIC_SHAPES,
    DEFAULT_RESOLUTION,
    Box,
    ConeCappedCylinder,
    Cylinder,
    EllipticCylinder,
    GappedCylinder,
    Mesh,
    Shape,
    Sphere,
    bounding_box,
    build_shape,
    contains,
    local_frame,
    mass_properties,
    quadrature,
    signed_distance,
)

__all__ = [
    "ANALYTIC_SHAPES",
    "DEFAULT_RESOLUTION",
    "Box",
    "ConeCappedCylinder",
    "Cylinder",
    "EllipticCylinder",
    "GappedCylinder",
    "MassProperties",
    "Mesh",
    "Shape",
    "Sphere",
    "SurfacePatches",
    "TriangleMesh",
    "bounding_box",
    "box_mesh",
    "build_shape",
    "contains",
    "icosphere",
    "load_mesh",
    "local_frame",
    "mass_properties",
    "mesh_to_obj",
    "mesh_to_stl",
    "quadrature",
    "rotation_to_z",
    "signed_distance",
    "unit_vector",
]
