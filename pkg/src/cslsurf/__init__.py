"""Surface-tensor toolkit for collapse-model decoherence of rigid bodies.

Computes the two geometry-invariant surface tensors that determine CSL
positional and rotational dephasing of homogeneous solids, the resulting
dephasing and heating rates, and brute-force volume/Fourier oracles that
cross-validate the surface reduction.
"""

__version__ = "0.1.0"

from .csl import (
    CslParams,
    DephasingMatrix,
    RateReport,
    angular_dephasing_coefficient,
    com_heating_rate,
    dephasing_matrix,
    dephasing_prefactor,
    rate_report,
    rotational_heating_rate,
    superposition_dephasing_rate,
    total_heating_rate,
)
from .geometry import (
    Box,
    ConeCappedCylinder,
    Cylinder,
    EllipticCylinder,
    GappedCylinder,
    MassProperties,
    Mesh,
    Sphere,
    SurfacePatches,
    TriangleMesh,
    box_mesh,
    build_shape,
    contains,
    icosphere,
    load_mesh,
    mass_properties,
    quadrature,
    signed_distance,
)
from .oracle import (
    EdgeProfile,
    VoxelGrid,
    decoherence_function,
    edge_layer_factor,
    form_factor,
    gradient_outer_integral,
    kspace_outer_integral,
    rasterize_smoothed_density,
    smoothed_density,
    surface_formula_outer_integral,
)
from .tensors import (
    axial_rotational_strength,
    clamp_psd,
    is_psd,
    principal_axes,
    rotational_surface_tensor,
    surface_tensor,
)

__all__ = [
    "Box",
    "ConeCappedCylinder",
    "CslParams",
    "Cylinder",
    "DephasingMatrix",
    "EdgeProfile",
    "EllipticCylinder",
    "GappedCylinder",
    "MassProperties",
    "Mesh",
    "RateReport",
    "Sphere",
    "SurfacePatches",
    "TriangleMesh",
    "VoxelGrid",
    "angular_dephasing_coefficient",
    "axial_rotational_strength",
    "box_mesh",
    "build_shape",
    "clamp_psd",
    "com_heating_rate",
    "contains",
    "decoherence_function",
    "dephasing_matrix",
    "dephasing_prefactor",
    "edge_layer_factor",
    "form_factor",
    "gradient_outer_integral",
    "icosphere",
    "is_psd",
    "kspace_outer_integral",
    "load_mesh",
    "mass_properties",
    "principal_axes",
    "quadrature",
    "rasterize_smoothed_density",
    "rate_report",
    "rotational_heating_rate",
    "rotational_surface_tensor",
    "signed_distance",
    "smoothed_density",
    "superposition_dephasing_rate",
    "surface_formula_outer_integral",
    "surface_tensor",
    "total_heating_rate",
]
