"""Pure numpy implementations of the grid kernels.

Each state is a finite Hermite-function series plus a residual correction
r(x) e^{-x^2/2} / p(x); both backends evaluate exactly this split so their
results agree to rounding.
"""

import numpy as np

_H0 = np.pi ** -0.25


def _hermite_matrix(nrows: int, xs: np.ndarray) -> np.ndarray:
    """Orthonormal Hermite functions h_j(x), rows j = 0..nrows-1."""
    H = np.empty((nrows, xs.shape[0]))
    H[0] = _H0 * np.exp(-xs * xs / 2.0)
    if nrows > 1:
        H[1] = np.sqrt(2.0) * xs * H[0]
    for j in range(2, nrows):
        H[j] = xs * np.sqrt(2.0 / j) * H[j - 1] - np.sqrt((j - 1.0) / j) * H[j - 2]
    return H


def _residual_values(resid: np.ndarray, den: np.ndarray, xs: np.ndarray):
    from numpy.polynomial import polynomial as P
    gauss = np.exp(-xs * xs / 2.0)
    denv = P.polyval(xs, den)
    if resid.ndim == 1:
        return P.polyval(xs, resid) * gauss / denv
    rows = np.vstack([P.polyval(xs, row) for row in resid])
    return rows * (gauss / denv)


def eval_states(herm, resid, den, xs):
    """Evaluate K basis states on a grid; returns a (K, N) float array."""
    herm = np.ascontiguousarray(herm, dtype=np.float64)
    resid = np.ascontiguousarray(resid, dtype=np.float64)
    den = np.ascontiguousarray(den, dtype=np.float64)
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    V = herm @ _hermite_matrix(herm.shape[1], xs)
    V += _residual_values(resid, den, xs)
    return V


def eval_packet(B, R, den, xs):
    """Evaluate one complex packet on a grid; returns an (N,) complex array."""
    B = np.ascontiguousarray(B, dtype=np.complex128)
    R = np.ascontiguousarray(R, dtype=np.complex128)
    den = np.ascontiguousarray(den, dtype=np.float64)
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    vals = B @ _hermite_matrix(B.shape[0], xs)
    vals += _residual_values(R, den, xs)
    return vals


def wigner_grid(B, R, den, xs, ps, base_nodes, base_weights, min_panels=6):
    """Wigner function of a packet on an (x, p) grid.

    The y-integral runs over (-x, x) because the packet vanishes on the
    negative half-line; the panel count grows with |p| x so each panel sees
    a bounded number of phase oscillations.
    """
    B = np.ascontiguousarray(B, dtype=np.complex128)
    R = np.ascontiguousarray(R, dtype=np.complex128)
    den = np.ascontiguousarray(den, dtype=np.float64)
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    ps = np.ascontiguousarray(ps, dtype=np.float64)
    base_nodes = np.ascontiguousarray(base_nodes, dtype=np.float64)
    base_weights = np.ascontiguousarray(base_weights, dtype=np.float64)

    W = np.zeros((xs.shape[0], ps.shape[0]))
    pmax = float(np.max(np.abs(ps))) if ps.size else 0.0
    for ix, x in enumerate(xs):
        if x <= 0.0:
            continue
        n_panels = max(int(min_panels), int(np.ceil(pmax * x / np.pi / 6.0)) + 6)
        width = 2.0 * x / n_panels
        starts = -x + width * np.arange(n_panels)
        y = (starts[:, None] + 0.5 * width * (base_nodes + 1.0)).ravel()
        wy = np.tile(0.5 * width * base_weights, n_panels)
        f = np.conj(eval_packet(B, R, den, x - y)) * eval_packet(B, R, den, x + y) * wy
        phases = np.exp(np.outer(y, -2j * ps))
        W[ix] = (f @ phases).real / np.pi
    return W
