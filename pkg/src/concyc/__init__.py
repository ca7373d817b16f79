"""Stationary connecting cycles for concentric circles.

Closed polygons with one vertex per circle, visited in a fixed cyclic
order, are critical points of the perimeter exactly when every vertex obeys
the reflection/refraction rule.  This package evaluates the perimeter and
its derivatives exactly, builds the closed-form circuit families (parades,
Snellius circuits, partially aligned insertions), catalogues all critical
points with Morse indices, and tracks branches and bifurcations while one
radius varies.
"""

__version__ = "0.1.0"

from .closedform import (
    DegenerateParadeError,
    InconsistentSocleError,
    ParadeHessianReport,
    PartiallyAlignedResult,
    convex_quad_inradius,
    fermat_triangle_inradius,
    parade_config,
    parade_hessian,
    parade_perimeter,
    parade_sign_patterns,
    partially_aligned_circuits,
    pentagram_config,
    snellius_from_socle,
    snellius_perimeter,
    socle_residual,
    socle_roots,
    three_cc_catalogue,
)
from .continuation import (
    DegeneracyRoot,
    EventKind,
    RadiusSweep,
    SweepBranch,
    SweepEvent,
    SweepPlan,
    SweepResult,
    parade_degeneracy_locus,
    sweep,
)
from .geometry import (
    Circuit,
    ShapeClass,
    SingularConfigurationError,
    VertexEvent,
    VertexKind,
    classify_vertices,
    gradient,
    gradient_full,
    hessian,
    hessian_full,
    mirror_config,
    perimeter,
    reduce_angles,
    shape_of,
    shape_of_config,
    side_lengths,
    tangential_distances,
    torus_distance,
    vertex_turns,
    vertices,
)
from .solver import (
    CriticalCatalogue,
    CriticalPoint,
    CriticalPointFinder,
    NoConvergenceError,
    SolverSettings,
    brute_force_oracle,
    catalogues_match,
    find_all,
    morse_index,
    newton_refine,
    sylvester_index,
)
from .validation import check_config, check_radii, is_generic

__all__ = [name for name in dir() if not name.startswith("_")]
