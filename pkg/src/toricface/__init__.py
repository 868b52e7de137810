"""Exact toolkit for embedded toric face rings over a field.

Subpackages cover integer lattice arithmetic, rational pointed fans and
their cellular chain complexes, affine monoids (normalization and
seminormalization), monoidal complexes with ring presentations, graded
local cohomology, a Cech-style oracle, and Frobenius-theoretic tests.
"""

__version__ = "0.1.0"
