"""Planar N=2 supersymmetric quantum mechanics on curvilinear grids.

Builds the supercharges Q, Q+ and the Hamiltonian H = (QQ+ + Q+Q)/2 for a
four-component spinor on discretized two-dimensional charts, verifies the
superalgebra numerically, computes sector spectra and their pairing, and
carries the closed-form zero modes and norms of the two-fixed-center
Coulomb problem together with its single-center limits.
"""
__version__ = "0.1.0"

from .geometry import (
    Chart,
    DomainError,
    DegeneratePointError,
    cartesian,
    polar,
    parabolic,
    elliptic_algebraic,
    elliptic_trig,
    metric,
    connection,
    curvature_scalar,
    to_cartesian,
    from_cartesian,
    spinor_change,
)
from .superpotential import (
    PhysicalParams,
    TwoCenterConstants,
    Superpotential,
    two_center_general,
    two_center_simple,
    kepler_polar,
    kepler_parabolic,
    oscillator,
    two_center_potential,
    poisson_residual,
)
from .operators import (
    Grid,
    GridError,
    UnsupportedBlockError,
    SpinorField,
    build_grid,
    inner_product,
    weighted_norm,
    interior_slices,
    supercharge,
    supercharge_dag,
    hamiltonian_composed,
    hamiltonian_explicit,
    fermi_matrices,
    fermi_number_matrix,
    AlgebraReport,
    algebra_report,
    random_smooth_field,
    export_coo,
)

__all__ = [
    "__version__",
    "Chart",
    "DomainError",
    "DegeneratePointError",
    "cartesian",
    "polar",
    "parabolic",
    "elliptic_algebraic",
    "elliptic_trig",
    "metric",
    "connection",
    "curvature_scalar",
    "to_cartesian",
    "from_cartesian",
    "spinor_change",
    "PhysicalParams",
    "TwoCenterConstants",
    "Superpotential",
    "two_center_general",
    "two_center_simple",
    "kepler_polar",
    "kepler_parabolic",
    "oscillator",
    "two_center_potential",
    "poisson_residual",
    "Grid",
    "GridError",
    "UnsupportedBlockError",
    "SpinorField",
    "build_grid",
    "inner_product",
    "weighted_norm",
    "interior_slices",
    "supercharge",
    "supercharge_dag",
    "hamiltonian_composed",
    "hamiltonian_explicit",
    "fermi_matrices",
    "fermi_number_matrix",
    "AlgebraReport",
    "algebra_report",
    "random_smooth_field",
    "export_coo",
]
