"""
pshlab - Core Numerical Modules
Residual Monge-Ampere mass, Lelong numbers and fiber functionals of
S1-invariant plurisubharmonic functions on the unit ball of C^2.
"""

__version__ = "0.1.0"
