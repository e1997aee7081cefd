"""Desk-scale laboratory for random real plane curves on the projective plane.

Subpackages and modules:

- ``geometry``: charts, weights, quadrature, curvature density
- ``ensemble``: monomial bases, Gram matrices, orthonormal bases, sampling
- ``topology``: certified component counts of real zero curves
- ``spectral``: Bergman function, Toeplitz matrices, mass functionals
- ``envelope``: equilibrium envelopes of toric-radial weights
- ``concentration``: sub-Gaussian samplers and Hanson-Wright experiments
- ``harness``: experiment configs, Monte Carlo drivers, persistence
- ``cli``: the ``harnack-lab`` command line
"""

__version__ = "0.1.0"
