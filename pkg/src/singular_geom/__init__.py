"""Toolkit for singular minimal (Euclidean) and singular maximal (Lorentzian) surfaces.

Subpackages:

* :mod:`singular_geom.algebra` -- signature-generic 3-vector algebra.
* :mod:`singular_geom.surface` -- jets, fundamental forms, curvature residuals,
  potential energy and its first variation.
* :mod:`singular_geom.ruled` -- normalized ruled surfaces, frame invariants,
  residual-polynomial coefficients, and the falsification sweep.
* :mod:`singular_geom.catenary` -- planar alpha-catenaries and catenary cylinders.
* :mod:`singular_geom.variational` -- height-field energies and gradient descent.
* :mod:`singular_geom.cli` -- command-line front end.
"""

from .algebra import (
    CausalCharacter,
    Metric,
    Vec3,
    causal_character,
    causal_character_tol,
    cross,
    hyperbolic_angle,
    inner,
    norm,
    same_timelike_cone,
    triple,
)
from .curves import Curve
from .surface import (
    FundamentalForms,
    Jet2,
    ParamSurface,
    first_variation,
    fundamental_forms,
    jet,
    mean_curvature,
    potential_energy,
    singular_residual,
    unit_normal,
)

__all__ = [
    "CausalCharacter",
    "Curve",
    "FundamentalForms",
    "Jet2",
    "Metric",
    "ParamSurface",
    "Vec3",
    "causal_character",
    "causal_character_tol",
    "cross",
    "first_variation",
    "fundamental_forms",
    "hyperbolic_angle",
    "inner",
    "jet",
    "mean_curvature",
    "norm",
    "potential_energy",
    "same_timelike_cone",
    "singular_residual",
    "triple",
    "unit_normal",
]

__version__ = "0.1.0"
