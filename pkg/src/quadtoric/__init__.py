"""Quantum cohomology, Gelfand-Zeitlin geometry and spectral-invariant models for quadrics.

Subpackages and modules:

* :mod:`quadtoric.scalars`        Novikov scalars with rational exponents
* :mod:`quadtoric.algebra`        table algebras, QH(Q^n), idempotent splittings
* :mod:`quadtoric.superpotential` GZ-torus superpotential and its critical points
* :mod:`quadtoric.geometry`       GZ map, Biran lift, torus and sphere samplers
* :mod:`quadtoric.flow`           gradient-Hamiltonian flow of the toric degeneration
* :mod:`quadtoric.spectral`       constancy-rule model of asymptotic spectral invariants
* :mod:`quadtoric.suite`          verification suite behind the ``quadtoric`` CLI
"""

__version__ = "0.1.0"
