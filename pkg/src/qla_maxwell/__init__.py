"""Qubit lattice algorithm for 2D Maxwell scattering in inhomogeneous dielectrics."""
from .lattice import LatticeGrid, QubitField, new_field, pointwise_apply, shift, zeros
from .media import Cone, Cylinder, Homogeneous, MediumSpec, Raster, RefractiveField, sample_medium, vacuum
from .evolution import EvolutionPlan, advance, make_plan, step

__all__ = [
    "LatticeGrid", "QubitField", "new_field", "pointwise_apply", "shift", "zeros",
    "Cone", "Cylinder", "Homogeneous", "MediumSpec", "Raster", "RefractiveField",
    "sample_medium", "vacuum", "EvolutionPlan", "advance", "make_plan", "step",
]
__version__ = "0.1.0"
