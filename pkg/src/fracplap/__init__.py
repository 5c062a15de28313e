"""
fracplap: weighted fractional p-Laplacian toolkit.

Weight classes, Gagliardo discretization, eigenpairs, De Giorgi bounds,
nonlinear solvers and bifurcation continuation on 1-D grids.
"""

__version__ = "0.1.0"
