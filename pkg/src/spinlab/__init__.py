"""Harmonic spinors on metric Lie algebras and the G-structures they induce.

Modules: forms (exterior algebra), clifford (real representations), algebra
(structure equations and catalogs), dirac (Dirac matrices and kernels),
gstruct (SU(2)/SU(3) data from spinors), spin7 (torus lifts and Spin(7)
torsion), scan (grid scans and the reproduction report), cli.
"""

from .algebra import JacobiError, MetricLieAlgebra, family
from .dirac import assemble_dirac, harmonic_spinors, kernel
from .forms import Form

__version__ = "0.1.0"

__all__ = ["Form", "MetricLieAlgebra", "JacobiError", "family", "assemble_dirac", "kernel",
           "harmonic_spinors", "__version__"]
