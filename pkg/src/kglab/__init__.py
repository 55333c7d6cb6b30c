"""kglab: desk-scale numerical and symbolic laboratory for Klein-Gordon
equations in 3+1 dimensions.

The package couples an exact symbolic algebra of the ten Poincare
generators with finite-difference solvers, generalized energy norms,
hyperboloidal decay diagnostics and inequality audits.
"""

__version__ = "0.1.0"
