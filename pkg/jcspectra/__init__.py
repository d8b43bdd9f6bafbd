"""
jcspectra - Numerical checks of eigenvalue asymptotics for Jaynes-Cummings type Jacobi matrices

This package builds finite, exactly decoupled realisations of the Jacobi
operators, computes their spectra by Sturm-sequence bisection, and turns
every asymptotic remainder into a fitted log-log rate that experiments can
pass or fail.
"""

__version__ = "0.1.0"
__author__ = "lsimons"
