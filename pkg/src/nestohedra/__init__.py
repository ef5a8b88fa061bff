"""Nestohedra from building sets: face lattices, gamma-vectors, shaving plans
and exact cubical realizations."""

from .building_sets import BuildingSet, Graph, closure, connectify, graphical, is_flag, preset
from .errors import (
    CapacityError,
    ConsistencyError,
    InputError,
    NestoError,
    NotFlagError,
    NotSimpleError,
    PlanError,
    PreconditionError,
    RealizationError,
)
from .face_lattice import FacetSystem, facet_system_from_building_set, gamma_vector, polynomial_bundle, shave
from .geometry import cubical_realization, delzant_check, enumerate_vertices, standard_realization
from .shaving_plan import direct_gamma, gamma_via_plan, plan_flag, plan_general

__all__ = [
    "BuildingSet", "Graph", "closure", "connectify", "graphical", "is_flag", "preset",
    "CapacityError", "ConsistencyError", "InputError", "NestoError", "NotFlagError",
    "NotSimpleError", "PlanError", "PreconditionError", "RealizationError",
    "FacetSystem", "facet_system_from_building_set", "gamma_vector", "polynomial_bundle", "shave",
    "cubical_realization", "delzant_check", "enumerate_vertices", "standard_realization",
    "direct_gamma", "gamma_via_plan", "plan_flag", "plan_general",
]
