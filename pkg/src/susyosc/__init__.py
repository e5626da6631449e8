"""Exact four-step rational extension of the truncated harmonic oscillator.

Modules:
    exactfn   exact polynomial / rational-function / Gaussian-weight arithmetic
    susy      adding and deleting chains, ladder operators, exact verification
    hilbert   half-line quadrature, normalization, matrix elements, Wigner kernel
    coherent  lowering-operator coherent states and their observables
    cli       dataset and verification commands
"""

__version__ = "0.1.0"
