"""Computations on top of the data model: m-functions, kappa, solvers, spanning elements, the sec6 family."""
