from .integrals import (
    decoherence_function,
    form_factor,
    gradient_outer_integral,
    kspace_outer_integral,
    surface_formula_outer_integral,
)
from .profiles import EdgeProfile, edge_layer_factor
from .voxel import (
    DEFAULT_MAX_VOXELS,
    VoxelGrid,
    rasterize_smoothed_density,
    read_grid,
    smoothed_density,
    write_grid,
)

__all__ = [
    "DEFAULT_MAX_VOXELS",
    "EdgeProfile",
    "VoxelGrid",
    "decoherence_function",
    "edge_layer_factor",
    "form_factor",
    "gradient_outer_integral",
    "kspace_outer_integral",
    "rasterize_smoothed_density",
    "read_grid",
    "smoothed_density",
    "surface_formula_outer_integral",
    "write_grid",
]
