"""poinlab: Poincare-Wirtinger constants on singular planar domains.

The package builds a catalog of model domains (squares, disks, power
cusps, dumbbells, rooms and passages), realizes explicit conic-structure
maps and contraction/arc families on them with measured constants, and
brackets each domain's Poincare constant three ways: a spectral p=2
oracle, a variational lower bound for general p, and the constructive
upper bound assembled from the arc constants.
"""

__version__ = "0.1.0"

from .arcs import (ArcConstants, ArcFamily, arc_jacobian, arc_point,
                   arc_velocity, build_arc_family, estimate_constants,
                   injectivity_spot_check, measure_arc_family)
from .conic import (ConicMap, certify_conic, cusp_H, cusp_H_inv, cusp_t,
                    lipschitz_estimate, paper_cusp_map, power_cusp_map,
                    power_map, retraction, sample_cone)
from .domains import (DomainSpec, PointSample, area, boundary_distance,
                      catalog_names, connectivity_check, contains,
                      contains_closure, instantiate, monte_carlo_area,
                      sample_interior)
from .errors import (CatalogError, DegeneracyError, DegenerateDomainError,
                     EstimationError, MapDomainError, OptimizerError,
                     PoinlabError, ResolutionError, SolverError,
                     ValidationError)
from .estimators import (EstimateResult, constructive_bound,
                         holder_conjugate, neumann_optimal_constant,
                         rayleigh_maximize, witness_ratio)
from .grid import (DiscreteFunction, Grid, assemble_forms, build_grid,
                   cell_gradients, cell_values, from_callable, lp_seminorms,
                   mean_value)
from .homotopy import (Homotopy, build_homotopy, homotopy_h,
                       homotopy_jac_det, homotopy_velocity)
from .suite import TestFunctionSuite, default_suite, generate_suite
from .verify import (SweepAborted, neck_scaling_check, sweep_family,
                     verify_inequality)
