"""Exact lattice models for split abelian surfaces with one CM factor,
together with the height, reduction and congruence tools used to study
their complexity."""

from .lattice import Lattice
from .orders import ImaginaryQuadraticOrder, ProductOrder
from .surfaces import SplitSurfaceModel, generate_surface, minimal_product_isogeny
from .symplectic import SymplecticLattice

__version__ = "0.1.0"

__all__ = [
    "Lattice",
    "SymplecticLattice",
    "SplitSurfaceModel",
    "ImaginaryQuadraticOrder",
    "ProductOrder",
    "generate_surface",
    "minimal_product_isogeny",
]
