"""Coin-betting potentials, parameter-free bettors, and the experts reduction.

The package is organized bottom-up:

- :mod:`coinbet.numerics` — special functions and stable log-domain quadrature
- :mod:`coinbet.priors` — symmetric priors over betting fractions
- :mod:`coinbet.potentials` — closed-form wealth potentials, floors, bound formulas
- :mod:`coinbet.betting` — online bettor state machines and the doubling wrapper
- :mod:`coinbet.experts` — reduction to learning with expert advice
- :mod:`coinbet.harness` — verification/simulation CLI with CSV output

Hot numeric loops run on a compiled Cython backend when available, with a
numpy fallback selected at import time (see :mod:`coinbet._kernels`).
"""

__version__ = "0.1.0"
