"""Half-line numerics over the truncated-sector basis.

Everything downstream of the exact layer that needs a number rather than a
rational function lives here: composite Gauss-Legendre quadrature on
[0, x_max], normalization constants, ladder matrix elements, moment tables
of x, x^2, p, p^2, and the two-index Wigner kernel.  All integration is done
in mpmath at a configurable working precision so that results can be pinned
and re-derived at doubled precision.

The basis states carry polynomial degrees past 80 at the default cutoffs.
Evaluating those numerators by Horner in float64 loses too much near the
interior zeros, so the module also provides an exact Hermite-function
splitting of each state (hermite_expansion) whose coefficients are O(1)
after normalization; the compiled grid kernels consume that form.
"""

import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional

import mpmath as mp

from .exactfn import GaussRational, Polynomial, hermite
from . import susy


DEFAULT_X_MAX = 15
DEFAULT_NODES_PER_PANEL = 64
DEFAULT_PRECISION_BITS = 192


class QuadratureError(RuntimeError):
    """Refinement levels failed to agree within the rule's tolerance."""


def precision_bits() -> int:
    """Working precision in bits; override with SUSYOSC_PRECISION."""
    raw = os.environ.get("SUSYOSC_PRECISION")
    if raw is None:
        return DEFAULT_PRECISION_BITS
    bits = int(raw)
    if bits < 64:
        raise ValueError("SUSYOSC_PRECISION must be at least 64 bits")
    return bits


def _legendre_pair(n: int, x):
    # P_n(x) and P_n'(x) by the three-term recurrence
    p0, p1 = mp.mpf(1), x
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = n * (x * p1 - p0) / (x * x - 1)
    return p1, dp


@lru_cache(maxsize=None)
def _legendre_nodes(n: int, prec: int):
    """Gauss-Legendre nodes and weights on [-1, 1] at `prec` bits."""
    import numpy.polynomial.legendre as npleg

    seeds = npleg.leggauss(n)[0]
    nodes, weights = [], []
    with mp.workprec(prec + 32):
        for seed in seeds:
            x = mp.mpf(float(seed))
            for _ in range(60):
                p, dp = _legendre_pair(n, x)
                dx = p / dp
                x -= dx
                if abs(dx) < mp.eps * (abs(x) + 1):
                    break
            else:
                raise RuntimeError("Legendre node refinement did not converge")
            _, dp = _legendre_pair(n, x)
            nodes.append(+x)
            weights.append(2 / ((1 - x * x) * dp * dp))
    return tuple(nodes), tuple(weights)


@dataclass(frozen=True)
class QuadratureRule:
    """Composite Gauss-Legendre rule on [0, x_max].

    panels holds (a, b, nodes, weights) per subinterval; the tail beyond
    x_max is dropped, bounded by the e^{-x^2} envelope of every integrand
    this package feeds the rule.
    """

    panels: tuple
    x_max: float
    target_tol: float

    def points(self):
        for _a, _b, nodes, weights in self.panels:
            yield from zip(nodes, weights)

    def node_count(self) -> int:
        return sum(len(p[2]) for p in self.panels)

    def refined(self) -> "QuadratureRule":
        """Same order with every panel split in half."""
        panels = []
        for a, b, nodes, _w in self.panels:
            mid = (a + b) / 2
            n = len(nodes)
            panels.extend(_gl_panel(a, mid, n) + _gl_panel(mid, b, n))
        return QuadratureRule(tuple(panels), self.x_max, self.target_tol)


def _gl_panel(a, b, n: int):
    base_nodes, base_weights = _legendre_nodes(n, mp.mp.prec)
    half = (mp.mpf(b) - mp.mpf(a)) / 2
    mid = (mp.mpf(b) + mp.mpf(a)) / 2
    nodes = tuple(mid + half * t for t in base_nodes)
    weights = tuple(half * w for w in base_weights)
    return [(mp.mpf(a), mp.mpf(b), nodes, weights)]


_RULE_CACHE: dict = {}


def build_rule(x_max: int = DEFAULT_X_MAX,
               nodes_per_panel: int = DEFAULT_NODES_PER_PANEL,
               target_tol: float = 1e-14) -> QuadratureRule:
    """Unit panels [k, k+1] over [0, x_max], nodes_per_panel points each."""
    key = (x_max, nodes_per_panel, mp.mp.prec)
    rule = _RULE_CACHE.get(key)
    if rule is None:
        panels = []
        for k in range(x_max):
            panels.extend(_gl_panel(k, k + 1, nodes_per_panel))
        rule = QuadratureRule(tuple(panels), float(x_max), target_tol)
        _RULE_CACHE[key] = rule
    return rule


def default_rule() -> QuadratureRule:
    with mp.workprec(precision_bits()):
        return build_rule()


def integrate_halfline(f: Callable, rule: Optional[QuadratureRule] = None,
                       check: bool = False):
    """Integrate f over [0, x_max] by the composite rule.

    With check=True the value is recomputed on the half-split refinement and
    a QuadratureError is raised if the two levels disagree beyond
    target_tol (absolute, scaled by the magnitude of the result).
    """
    rule = rule or default_rule()
    total = mp.fsum(w * f(x) for x, w in rule.points())
    if check:
        fine = mp.fsum(w * f(x) for x, w in rule.refined().points())
        tol = mp.mpf(rule.target_tol) * max(1, abs(fine))
        if abs(total - fine) > tol:
            raise QuadratureError(
                f"refinement moved the integral by {mp.nstr(abs(total - fine), 3)}"
            )
        return fine
    return total


# -- normalized basis states -------------------------------------------------

@dataclass(frozen=True)
class NormalizedState:
    """A truncated-sector eigenstate divided by its half-line norm."""

    base: susy.EigenState
    norm_constant: mp.mpf  # sqrt of the half-line norm integral
    k_index: Optional[int]

    @property
    def nu(self) -> int:
        return self.base.nu

    @property
    def energy(self):
        return self.base.energy

    def __call__(self, x):
        return self.base.wavefunction(x) / self.norm_constant

    def derivative(self, x):
        return self.base.wavefunction.derivative()(x) / self.norm_constant


@lru_cache(maxsize=None)
def _state_node_values(nu: int, rule: QuadratureRule):
    """(values, derivative values) of the unnormalized state on the rule."""
    wf = susy.partner_state(nu).wavefunction
    dwf = wf.derivative()
    xs = [x for x, _w in rule.points()]
    return (tuple(wf(x) for x in xs), tuple(dwf(x) for x in xs))


def normalize(nu: int, rule: Optional[QuadratureRule] = None) -> NormalizedState:
    """Unit-norm truncated eigenstate; sign follows the exact-layer scaling."""
    return _normalize(nu, rule or default_rule())


@lru_cache(maxsize=None)
def _normalize(nu: int, rule: QuadratureRule) -> NormalizedState:
    state = susy.partner_state(nu)
    if not state.physical:
        raise ValueError(f"nu={nu} is not in the truncated physical spectrum")
    with mp.workprec(precision_bits()):
        vals, _ = _state_node_values(nu, rule)
        weights = [w for _x, w in rule.points()]
        norm_sq = mp.fsum(w * v * v for w, v in zip(weights, vals))
        if norm_sq <= 0:
            raise QuadratureError(f"non-positive norm for nu={nu}")
        k = (nu - 5) // 6 if nu >= 5 and (nu - 5) % 6 == 0 else None
        return NormalizedState(state, mp.sqrt(norm_sq), k)


# -- ladder matrix elements --------------------------------------------------

def ladder_radicand(i: int) -> Fraction:
    """Exact radicand of the tower coefficient a_{5+6i}; always an integer."""
    if i < 1:
        raise ValueError("i must be a positive integer")
    value = Fraction(2 ** 6) * (11 + 6 * i)
    value *= Fraction(math.factorial(4 + 6 * i), math.factorial(6 * i - 1))
    value *= Fraction(8 + 6 * i, 2 + 6 * i)
    value *= Fraction(9 + 6 * i, 3 + 6 * i)
    value *= Fraction(10 + 6 * i, 4 + 6 * i)
    return value


def _mpf_fraction(q: Fraction):
    return mp.mpf(q.numerator) / q.denominator


def ladder_coefficient_closed(i: int):
    """a_{5+6i} from the closed radicand, as a positive real."""
    with mp.workprec(precision_bits()):
        return mp.sqrt(_mpf_fraction(ladder_radicand(i)))


def ladder_coefficient_quadrature(i: int,
                                  rule: Optional[QuadratureRule] = None,
                                  adjoint: bool = False):
    """|<5+6i-6| Ctilde |5+6i>| on the half line, by quadrature.

    The closed form fixes only the modulus; the sign of the overlap depends
    on the scaling convention of the exact layer, so the magnitude is
    returned.  adjoint=True probes the reverse matrix element instead.
    """
    if i < 1:
        raise ValueError("i must be a positive integer")
    rule = rule or default_rule()
    upper, lower = 5 + 6 * i, 5 + 6 * i - 6
    with mp.workprec(precision_bits()):
        bra, ket = (upper, lower) if adjoint else (lower, upper)
        op = susy.build_ladder("Ctildedag" if adjoint else "Ctilde")
        image = op(susy.partner_state(ket).wavefunction)
        bra_state = normalize(bra, rule)
        ket_norm = normalize(ket, rule).norm_constant
        overlap = integrate_halfline(
            lambda x: bra_state(x) * image(x) / ket_norm, rule)
        return abs(overlap)


# -- moment tables -----------------------------------------------------------

@dataclass(frozen=True)
class MomentTables:
    """Half-line matrix elements of x, x^2, p, p^2 over the 5+6k tower.

    Mx, Mx2, Mp2 are real symmetric; Mp is stored as its imaginary part
    (the full element is -i times the real integral of psi_1 psi_2'), an
    anti-symmetric real table.
    """

    K: int
    Mx: tuple
    Mx2: tuple
    Mp_imag: tuple
    Mp2: tuple
    a_coeffs: tuple

    def mp_element(self, k1: int, k2: int):
        with mp.workprec(precision_bits()):
            return mp.mpc(0, self.Mp_imag[k1][k2])

    def to_json(self) -> str:
        def table(rows):
            return [[float(v) for v in row] for row in rows]

        payload = {
            "K": self.K,
            "Mx": table(self.Mx),
            "Mx2": table(self.Mx2),
            "Mp_imag": table(self.Mp_imag),
            "Mp2": table(self.Mp2),
            "a_coeffs": [float(a) for a in self.a_coeffs],
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def moment_tables(K: int = 7, rule: Optional[QuadratureRule] = None) -> MomentTables:
    """Integrals are restricted to x > 0; symmetry is enforced by sharing
    each computed upper-triangle entry with its transpose."""
    rule = rule or default_rule()
    with mp.workprec(precision_bits()):
        weights = [w for _x, w in rule.points()]
        xs = [x for x, _w in rule.points()]
        states = [normalize(5 + 6 * k, rule) for k in range(K)]
        vals, dvals = [], []
        for st in states:
            raw_v, raw_d = _state_node_values(st.nu, rule)
            vals.append([v / st.norm_constant for v in raw_v])
            dvals.append([d / st.norm_constant for d in raw_d])

        def dot(u, v, extra=None):
            if extra is None:
                return mp.fsum(w * a * b for w, a, b in zip(weights, u, v))
            return mp.fsum(w * a * b * e for w, a, b, e in zip(weights, u, v, extra))

        x2s = [x * x for x in xs]
        Mx = [[mp.mpf(0)] * K for _ in range(K)]
        Mx2 = [[mp.mpf(0)] * K for _ in range(K)]
        Mp_imag = [[mp.mpf(0)] * K for _ in range(K)]
        Mp2 = [[mp.mpf(0)] * K for _ in range(K)]
        for k1 in range(K):
            for k2 in range(k1, K):
                # the x-weighted integrands are literally symmetric, so the
                # shared entry is exact, not a symmetrization
                Mx[k1][k2] = Mx[k2][k1] = dot(vals[k1], vals[k2], xs)
                Mx2[k1][k2] = Mx2[k2][k1] = dot(vals[k1], vals[k2], x2s)
                # <p^2> via first derivatives keeps the table symmetric
                Mp2[k1][k2] = Mp2[k2][k1] = dot(dvals[k1], dvals[k2])
        for k1 in range(K):
            for k2 in range(K):
                # p = -i d/dx; both triangles are integrated independently so
                # the anti-symmetry (by parts, states vanish at 0) stays a
                # measured property of the quadrature
                Mp_imag[k1][k2] = -dot(vals[k1], dvals[k2])
        a_coeffs = tuple(ladder_coefficient_closed(i) for i in range(1, K))

        def freeze(rows):
            return tuple(tuple(r) for r in rows)

        return MomentTables(K, freeze(Mx), freeze(Mx2), freeze(Mp_imag),
                            freeze(Mp2), a_coeffs)


# -- Wigner kernel -----------------------------------------------------------

def wigner_kernel(k1: int, k2: int, x, p,
                  rule: Optional[QuadratureRule] = None):
    """w_{k1 k2}(x, p) over the truncated tower; identically 0 for x <= 0.

    The y-integral runs over [-x, x]; outside that window one of the two
    half-line wavefunctions has a non-positive argument.  Panel count grows
    with |p| x so the oscillatory phase stays resolved.
    """
    with mp.workprec(precision_bits()):
        x = mp.mpf(x)
        p = mp.mpf(p)
        if x <= 0:
            return mp.mpc(0)
        bra = normalize(5 + 6 * k1, rule)
        ket = normalize(5 + 6 * k2, rule)
        periods = abs(p) * x / mp.pi
        n_panels = max(6, int(mp.ceil(periods / 6)) + 6)
        panels = []
        width = 2 * x / n_panels
        for j in range(n_panels):
            panels.extend(_gl_panel(-x + j * width, -x + (j + 1) * width,
                                    DEFAULT_NODES_PER_PANEL))
        total = mp.mpc(0)
        for _a, _b, nodes, wts in panels:
            for y, w in zip(nodes, wts):
                f = bra(x - y) * ket(x + y)
                total += w * f * mp.expj(-2 * p * y)
        return total / mp.pi


# -- invariant reports -------------------------------------------------------

def orthonormality_residual(K: int = 7,
                            rule: Optional[QuadratureRule] = None):
    """max_{k1,k2 < K} |<k1|k2> - delta| on the half line."""
    rule = rule or default_rule()
    with mp.workprec(precision_bits()):
        weights = [w for _x, w in rule.points()]
        vals = []
        for k in range(K):
            st = normalize(5 + 6 * k, rule)
            raw, _ = _state_node_values(st.nu, rule)
            vals.append([v / st.norm_constant for v in raw])
        worst = mp.mpf(0)
        for k1 in range(K):
            for k2 in range(k1, K):
                g = mp.fsum(w * a * b
                            for w, a, b in zip(weights, vals[k1], vals[k2]))
                worst = max(worst, abs(g - (1 if k1 == k2 else 0)))
        return worst


def energy_residual(k: int, rule: Optional[QuadratureRule] = None):
    """|<psi|H|psi> - (11 + 12k)| using <p^2> = int psi'^2."""
    rule = rule or default_rule()
    with mp.workprec(precision_bits()):
        st = normalize(5 + 6 * k, rule)
        raw_v, raw_d = _state_node_values(st.nu, rule)
        weights = [w for _x, w in rule.points()]
        xs = [x for x, _w in rule.points()]
        potential = susy.standard_system().potential()
        nc2 = st.norm_constant ** 2
        kin = mp.fsum(w * d * d for w, d in zip(weights, raw_d)) / nc2
        pot = mp.fsum(w * v * v * potential(x)
                      for w, v, x in zip(weights, raw_v, xs)) / nc2
        return abs(kin + pot - (11 + 12 * k))


def normalization_json(K: int = 12) -> str:
    """Norm constants of the tower states, for regression pinning."""
    payload = {str(5 + 6 * k): float(normalize(5 + 6 * k).norm_constant ** 2)
               for k in range(K)}
    return json.dumps(payload, indent=2, sort_keys=True)


# -- float-stable Hermite splitting ------------------------------------------

@dataclass(frozen=True)
class HermiteExpansion:
    """Exact rewrite psi_hat = sum_j b_j h_j + (r(x)/p(x)) e^{-x^2/2}.

    h_j are L^2(R)-orthonormal Hermite functions, p is the degree-8 chain
    denominator, r has degree < 8, and every stored coefficient is O(1)
    after division by the half-line norm.  Evaluating through this form is
    stable in float64 where Horner on the raw numerator is not.
    """

    nu: int
    coeffs: tuple      # b_j, ascending j
    residual: tuple    # r coefficients, ascending
    denominator: tuple  # p coefficients, ascending

    def __call__(self, x: float) -> float:
        g = math.exp(-x * x / 2.0)
        h_prev = 0.0
        h = math.pi ** -0.25 * g
        acc = self.coeffs[0] * h if self.coeffs else 0.0
        for j in range(1, len(self.coeffs)):
            h_prev, h = h, (x * math.sqrt(2.0 / j) * h
                            - math.sqrt((j - 1) / j) * h_prev)
            acc += self.coeffs[j] * h
        num = 0.0
        for c in reversed(self.residual):
            num = num * x + c
        den = 0.0
        for c in reversed(self.denominator):
            den = den * x + c
        return acc + (num / den) * g


@lru_cache(maxsize=None)
def hermite_expansion(nu: int) -> HermiteExpansion:
    """Split the normalized state exactly, then round once to float64."""
    state = susy.partner_state(nu)
    wf = state.wavefunction
    den = wf.rat.den
    quotient, residual = divmod(wf.rat.num, den)
    # exact Hermite expansion of the quotient by leading-term stripping
    herm_coeffs = [Fraction(0)] * (quotient.degree + 1 if not quotient.is_zero() else 0)
    rest = quotient
    while not rest.is_zero():
        n = rest.degree
        c = rest.leading / (2 ** n)
        herm_coeffs[n] = c
        rest = rest - hermite(n) * c
    with mp.workprec(precision_bits()):
        norm = normalize(nu).norm_constant
        coeffs = tuple(
            float(_mpf_fraction(c)
                  * mp.sqrt(2 ** j * mp.factorial(j) * mp.sqrt(mp.pi)) / norm)
            for j, c in enumerate(herm_coeffs))
        res = tuple(float(_mpf_fraction(c) / norm) for c in residual.coeffs)
    return HermiteExpansion(nu, coeffs, res,
                            tuple(float(c) for c in den.coeffs))
