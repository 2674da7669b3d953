"""Numerical toolkit for geodesic geometry, convergence diagnostics and
steepest descent on Hadamard (complete CAT(0)) spaces."""

__version__ = "0.1.0"

from .errors import (ConstructionError, DomainError, HadamardError, ParseError, PreconditionError,
                     SolverError, SpaceMismatchError, UnsupportedRepresentationError)
from .geometry import (AngleEstimate, Geodesic, alexandrov_angle, cat0_quadratic_residual, combine,
                       comparison_angle, constant_speed_defect, distance, dyadic_schedule, geodesic,
                       quasilinearization)
from .spaces import (DirectionFan, Euclidean, Hyperbolic2, MetricTree, MonodTree, Product, ProductPoint,
                     Sampler, TreePoint, TwoQuadrant, direction_fan, sample_point, tripod, validate)
from .projections import (Ball, Segment, TreeHull, contains, geodesic_monotonicity_check,
                          normal_cone_contains, project_to_convex, project_to_geodesic,
                          projection_inequality_residual)
from .convergence import (ElementarySet, SequenceTrace, Verdict, WitnessBudget, asymptotic_center,
                          asymptotic_radius, boundedness, default_competitors, delta_converges,
                          elementary_set_contains, kakavandi_converges,
                          trace_fan, weak_converges, weakly_proper_witness_search)
from .fields import (Affine1D, Constant, Coordinate, DistanceTo, Frechet, QuadrantNorm, Scaled, Sum)
from .descent import (DerivativeEstimate, DescentOptions, DescentReport, descent_minimize,
                      geodesic_derivative, steepest_direction, trivial_derivative)
from .dual import (DualFunction, dual_distance_estimate, dual_function, exact_dual_distance_euclidean,
                   phi_eval, weak_star_nbhd_contains)
from .segments import d1, psi, psi_inverse, segment_combine, trivial_segment, weak_gamma_converges
