"""Observer-based realizations of linear, singular and polynomial control systems.

The submodules build on each other:

``exact``     rational linear algebra over ``Fraction``
``xspace``    vectors of mixed dimension and the projection matrices between them
``dkstp``     the dimension-keeping semi-tensor product and its analytic functions
``subspace``  exact subspaces, invariance tests and invariant-subspace algorithms
``orsys``     OR-system constructions for linear and singular systems
``sim``       simulation, comparison and trajectory CSV files
``poly``      sparse rational polynomials
``nonlin``    codistributions and exact OR-systems for polynomial systems
``io``        JSON system files
"""

from .dkstp import Bridge, dk_mul, pi_A
from .orsys import (LinearSystem, ORSystem, SingularSystem, or_exact, or_extended,
                    or_feedback, or_projection, or_pseudoinverse, or_singular)
from .xspace import DimVector, projection_matrix

__version__ = "0.1.0"

__all__ = [
    "Bridge", "DimVector", "LinearSystem", "ORSystem", "SingularSystem", "dk_mul",
    "or_exact", "or_extended", "or_feedback", "or_projection", "or_pseudoinverse",
    "or_singular", "pi_A", "projection_matrix",
]
