"""Self-concordance toolkit for geodesically convex optimization on hyperbolic space.

Modules
-------
manifolds   hyperboloid model, Euclidean factors and their products
fields      scalar fields with closed-form jets (value, gradient, Hessian, its derivative)
oracles     finite-difference and ODE routes to the same quantities
analyzer    self-concordance certification, Dikin and transport checks
newton      Newton directions, damped and full steps, two-phase minimizer
pathfollow  short-step path-following for self-concordant barriers
meb         minimum enclosing ball by path-following, plus a farthest-point oracle
io, cli     file formats and the ``hypersc`` command
"""

__version__ = "0.1.0"
