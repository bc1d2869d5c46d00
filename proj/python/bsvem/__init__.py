"""Lowest-order bulk-surface virtual element solver."""

from ._bsvem import (
    BsvemError,
    InvalidArgument,
    IoError,
    Mesh,
    MeshGenerationError,
    assemble,
    build_mesh,
    convergence_study,
    eoc,
    generate_cartesian_cut,
    load_mesh,
    local_projector,
    solve_elliptic,
    solve_parabolic,
    structured_disc_triangulation,
    validate_mesh,
)

__all__ = [
    "BsvemError",
    "InvalidArgument",
    "IoError",
    "Mesh",
    "MeshGenerationError",
    "assemble",
    "build_mesh",
    "convergence_study",
    "eoc",
    "generate_cartesian_cut",
    "load_mesh",
    "local_projector",
    "solve_elliptic",
    "solve_parabolic",
    "structured_disc_triangulation",
    "validate_mesh",
]
