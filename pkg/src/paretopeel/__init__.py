"""Pareto hull peeling of planar point clouds under polygonal and mixed norms."""
from .geometry import Cone2, ConvexPolygon, convex_hull, cone_contains, cross
from .hull import MembershipVerdict, flattened_membership, pareto_membership, sampled_definition_oracle
from .norm import NormModel, build_norm, dual_eval, hamiltonian, norm_eval, preset
from .peel import PeelResult, convex_peel, dpp_check, height_at, height_field, peel, weak_l1_peel
from .reference import GridField, reference_solution, residual_check, sweep_solver
from .sampling import (BilinearGrid, Constant, ConvexPolygonShape, Rectangle, RectilinearUnion,
                       domain_efficiency_probe, sample_poisson)
from .sorting import longest_chain, nds_depth, q_transform

__version__ = "0.1.0"
