"""Symbolic derivation and numerical experiments for 2-D nonlinear elastic waves.

The package splits into an exact symbolic layer (:mod:`elastic2d.poly`,
:mod:`elastic2d.material`, :mod:`elastic2d.nullcond`) and a double-precision
simulation layer (:mod:`elastic2d.simkernel`, :mod:`elastic2d.lab`), glued
together by the ``elastic2d`` command line tool (:mod:`elastic2d.cli`).
"""

__version__ = "0.1.0"
