"""Coarse-to-fine point cloud registration and SPECT/CTA volume fusion."""

from ._core import (
    CardioregError,
    Mask,
    RegistrationResult,
    SpatialReference,
    Volume,
    apply_transform,
    coarse_register,
    dice,
    extract_isosurface,
    generate_lv_shell,
    map_values_to_vertices,
    mask_to_point_cloud,
    mean_distance_error,
    nearest_neighbors,
    perturb_cloud,
    random_similarity,
    read_landmarks,
    read_mask,
    read_point_cloud,
    read_transform,
    read_volume,
    region_grow,
    register,
    umeyama,
    warp_volume,
    write_landmarks,
    write_mask,
    write_point_cloud,
    write_transform,
    write_volume,
)

METHODS = ("icp", "sicp", "cpd-rigid", "cpd-affine")

__all__ = [name for name in dir() if not name.startswith("_")]
