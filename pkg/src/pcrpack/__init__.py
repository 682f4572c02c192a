"""Pack DNA sample groups onto temperature-constrained PCR plates."""

__version__ = "0.1.0"

from .annealing import SAParams, anneal, anneal_restarts
from .constructive import build_initial
from .generator import GeneratorParams, gen_instance
from .ilp import build_ilp, compute_gap, import_solution, model_size, write_lp
from .io import dump_instance, dump_solution, parse_instance, parse_solution
from .model import (
    DEFAULT_GEOMETRY,
    CostVector,
    Group,
    Instance,
    ObjectiveWeights,
    Plate,
    PlateGeometry,
    Solution,
    Strip,
    compare_cost,
    cost_lower_bound,
    cost_vector,
    occupancy_rates,
    validate_solution,
    weighted_objective,
)
from .neighborhood import apply_movement
from .oracle import OracleLimits, exact_solve
from .placement import place_wells
from .report import make_report

__all__ = [
    "__version__",
    "SAParams",
    "anneal",
    "anneal_restarts",
    "build_initial",
    "GeneratorParams",
    "gen_instance",
    "build_ilp",
    "compute_gap",
    "import_solution",
    "model_size",
    "write_lp",
    "dump_instance",
    "dump_solution",
    "parse_instance",
    "parse_solution",
    "DEFAULT_GEOMETRY",
    "CostVector",
    "Group",
    "Instance",
    "ObjectiveWeights",
    "Plate",
    "PlateGeometry",
    "Solution",
    "Strip",
    "compare_cost",
    "cost_lower_bound",
    "cost_vector",
    "occupancy_rates",
    "validate_solution",
    "weighted_objective",
    "apply_movement",
    "OracleLimits",
    "exact_solve",
    "place_wells",
    "make_report",
]
