"""Even lattices, Weil representations, and indefinite theta functions.

The package computes with even integral lattices (discriminant forms,
Grassmannian frames, hyperbolic splittings), the genus-2 Weil representation
and its Jacobi restriction, exact matrix polynomials, and truncated genus-2 /
Jacobi theta series, and ships verification suites for the transformation and
splitting identities connecting them.
"""

from .exact import smith_normal_form, rat_inverse, gram_of_sublist
from .lattice import EvenLattice, DiscriminantGroup, Frame

__all__ = [
    "smith_normal_form",
    "rat_inverse",
    "gram_of_sublist",
    "EvenLattice",
    "DiscriminantGroup",
    "Frame",
]
