"""
DetMax Lab

Exact-rational solvers, reductions and verification suites for
determinant maximization, Grid Tiling and binary CSPs.
"""

__version__ = "1.0.0"
__author__ = "DetMax Lab Team"
