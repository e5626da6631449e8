"""Grid kernels for basis-state and Wigner sweeps.

A compiled core is preferred when the extension built; otherwise a numpy
fallback with the same interface and the same floating-point formulas is
used.  Set SUSYOSC_FORCE_FALLBACK=1 to skip the compiled module, which is
how the benchmark and the cross-backend tests pin both paths.
"""

import os

import numpy as np


def _load_backend():
    if os.environ.get("SUSYOSC_FORCE_FALLBACK") != "1":
        try:
            from . import _core
            return _core, "cython"
        except ImportError:
            pass
    from . import _fallback
    return _fallback, "numpy"


_impl, _BACKEND_NAME = _load_backend()

eval_states = _impl.eval_states
eval_packet = _impl.eval_packet
wigner_grid = _impl.wigner_grid


def backend_name() -> str:
    return _BACKEND_NAME


def gauss_legendre_base(n: int = 64):
    """Float64 Gauss-Legendre nodes and weights on [-1, 1]."""
    from numpy.polynomial.legendre import leggauss
    return leggauss(n)


def basis_arrays(K: int):
    """Padded (herm, resid, den) coefficient arrays for the tower states.

    Row k carries the Hermite-function and residual coefficients of the
    normalized state 5+6k; all rows share the chain denominator.
    """
    from .. import hilbert
    exps = [hilbert.hermite_expansion(5 + 6 * k) for k in range(K)]
    width = max(len(e.coeffs) for e in exps)
    herm = np.zeros((K, width))
    resid = np.zeros((K, 8))
    for k, e in enumerate(exps):
        herm[k, :len(e.coeffs)] = e.coeffs
        resid[k, :len(e.residual)] = e.residual
    den = np.asarray(exps[0].denominator, dtype=np.float64)
    return herm, resid, den


def packet_arrays(state, t: float = 0.0, K: int | None = None):
    """Fold coherent coefficients at time t into one complex packet.

    K truncates the superposition below the state's own adaptive cutoff.
    """
    kept = state.K if K is None else min(K, state.K)
    herm, resid, den = basis_arrays(kept)
    coeff = np.array([state.alpha_complex(k) * np.exp(-12j * k * t)
                      for k in range(kept)])
    return coeff @ herm, coeff @ resid, den
