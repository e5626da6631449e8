"""Darboux chains over the oscillator and the exact spectral machinery built
on them: the rational partner system for seed set {2,3,4,5}, its eigenstates,
twelve ladder operators, and exact verification sweeps (eigen-identities, zero
modes, polynomial Heisenberg algebras, intertwining).

Wavefunctions are GaussRational with weight -1.  Verification reports are
lists of plain dicts (str/int values only) so they serialize to JSON as-is.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from .exactfn import (
    FirstOrderOperator,
    GaussRational,
    LOWERING,
    ONE,
    Polynomial,
    RAISING,
    RationalFunction,
    X,
    oscillator_state,
    seed_function,
    wronskian,
)

SEEDS = (2, 3, 4, 5)
DELETING_BASE = 4

UNTRUNCATED_RANGE = (-6, -5, -4, -3) + tuple(range(0, 12))
TRUNCATED_RANGE = (-5, -3, 1, 3, 5, 7, 9, 11)


def log_derivative(g: GaussRational) -> RationalFunction:
    """g'/g as an exact rational function; the weight contributes s*x."""
    if g.is_zero():
        raise ZeroDivisionError("log derivative of the zero function")
    return g.rat.derivative() / g.rat + g.weight * RationalFunction(X)


# -- chains ------------------------------------------------------------------

@dataclass(frozen=True)
class ChainData:
    seeds: tuple[int, ...]
    q_functions: tuple[GaussRational, ...]
    superpotentials: tuple[RationalFunction, ...]
    supercharges: tuple[FirstOrderOperator, ...]
    energy_shift: Fraction


def _build_chain(seeds: tuple[int, ...], seed_fns) -> ChainData:
    prev = GaussRational(RationalFunction(ONE), 0)
    qs, pots, charges = [], [], []
    for i in range(len(seed_fns)):
        w = wronskian(seed_fns[: i + 1])
        if w.is_zero():
            raise ValueError(
                f"degenerate Wronskian for seeds {seeds[: i + 1]}: invalid seed set")
        q = w / prev
        pot = -log_derivative(q)
        qs.append(q)
        pots.append(pot)
        charges.append(FirstOrderOperator(pot, +1))
        prev = w
    shift = Fraction(-2 * sum(f.weight for f in seed_fns))
    return ChainData(seeds, tuple(qs), tuple(pots), tuple(charges), shift)


def build_adding_chain(seeds: Sequence[int]) -> ChainData:
    """State-adding chain from seeds phi_m at energies -(2m+1)."""
    seeds = tuple(int(m) for m in seeds)
    if any(m < 0 for m in seeds):
        raise ValueError("seed indices must be nonnegative")
    return _build_chain(seeds, [seed_function(m) for m in seeds])


def build_deleting_chain(k: int) -> ChainData:
    """State-deleting chain from the bound-state pair psi_k, psi_{k+1}."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return _build_chain((k, k + 1), [oscillator_state(k), oscillator_state(k + 1)])


# -- partner system ----------------------------------------------------------

@dataclass(frozen=True)
class PartnerSystem:
    potential_extension: RationalFunction  # V - x^2
    energy_shift: Fraction
    denominator_poly: Polynomial           # weight-stripped chain Wronskian, primitive

    def potential(self) -> RationalFunction:
        return self.potential_extension + RationalFunction(Polynomial([0, 0, 1]))


def partner_potential(chain: ChainData) -> PartnerSystem:
    if not chain.q_functions:
        return PartnerSystem(RationalFunction(0), Fraction(0), ONE)
    full = chain.q_functions[0]
    for q in chain.q_functions[1:]:
        full = full * q
    if not full.rat.is_polynomial():
        raise ValueError("chain Wronskian is not a polynomial: invalid seed set")
    den = full.rat.num.primitive()
    # V - x^2 = shift - 2 (ln den)''; the weight's quadratic absorbs into shift
    ext = chain.energy_shift - 2 * RationalFunction(den.derivative(), den).derivative()
    return PartnerSystem(ext, chain.energy_shift, den)


@lru_cache(maxsize=None)
def standard_chains() -> tuple[ChainData, ChainData]:
    return build_adding_chain(SEEDS), build_deleting_chain(DELETING_BASE)


@lru_cache(maxsize=None)
def standard_system() -> PartnerSystem:
    return partner_potential(standard_chains()[0])


def reference_extension() -> RationalFunction:
    """Tabulated closed form of V - x^2 for the standard seed set."""
    den = Polynomial((45, 0, 0, 0, 120, 0, -64, 0, 16))
    return (RationalFunction(Polynomial((-8,)))
            - RationalFunction(1024 * Polynomial((-315, 0, 90, 0, -1020, 0, 328)),
                               den * den)
            + RationalFunction(64 * Polynomial((-112, 0, -13, 0, -4, 0, 4)), den))


def verify_potential() -> dict:
    """Exact comparison of the constructed potential with its closed form."""
    sysm = standard_system()
    ok = (sysm.potential_extension == reference_extension()
          and sysm.energy_shift == Fraction(-8)
          and sysm.denominator_poly == Polynomial((45, 0, 0, 0, 120, 0, -64, 0, 16)))
    return {
        "check": "potential_closed_form", "operator": None, "nu": None,
        "status": "ok" if ok else "fail",
        "residual_description": "constant -8, denominator 45+120x^4-64x^6+16x^8, "
                                "full rational form compared exactly",
    }


def apply_hamiltonian(system: PartnerSystem, f: GaussRational) -> GaussRational:
    """-f'' + V f, exactly."""
    kinetic = -f.derivative().derivative()
    return kinetic + GaussRational(system.potential() * f.rat, f.weight)


def oscillator_hamiltonian(f: GaussRational) -> GaussRational:
    """-f'' + x^2 f, exactly."""
    return -f.derivative().derivative() + GaussRational(
        RationalFunction(Polynomial([0, 0, 1])) * f.rat, f.weight)


# -- eigenstates -------------------------------------------------------------

@dataclass(frozen=True)
class EigenState:
    nu: int
    energy: Fraction
    wavefunction: GaussRational

    @property
    def physical(self) -> bool:
        """Odd-sector states survive the truncation to x >= 0."""
        return self.nu % 2 != 0


@lru_cache(maxsize=None)
def _full_wronskian() -> GaussRational:
    return wronskian([seed_function(m) for m in SEEDS])


@lru_cache(maxsize=None)
def partner_state(nu: int) -> EigenState:
    """Exact eigenstate of the partner system at energy 2 nu + 1.

    nu >= 0 appends psi_nu to the seed Wronskian; nu in {-6..-3} drops the
    seed with m = -nu - 1 instead.  The result is scaled so its numerator is
    integer-primitive with positive leading coefficient.
    """
    if nu in (-2, -1) or nu < -6:
        raise ValueError(f"no level at nu={nu}")
    if nu < 0:
        missing = -nu - 1
        num = wronskian([seed_function(m) for m in SEEDS if m != missing])
    else:
        num = wronskian([seed_function(m) for m in SEEDS] + [oscillator_state(nu)])
    w = num / _full_wronskian()
    c = w.rat.num.content()
    if w.rat.num.leading < 0:
        c = -c
    return EigenState(nu, Fraction(2 * nu + 1), w.scaled(1 / c))


def eigen_residual(system: PartnerSystem, state: EigenState) -> GaussRational:
    return apply_hamiltonian(system, state.wavefunction) - state.wavefunction.scaled(state.energy)


def proportionality_constant(f: GaussRational, g: GaussRational) -> Optional[Fraction]:
    """c with f = c*g exactly, or None if f is not a constant multiple of g."""
    if g.is_zero():
        return None
    if f.is_zero():
        return Fraction(0)
    if f.weight != g.weight:
        return None
    q = f.rat / g.rat
    if q.is_polynomial() and q.num.degree == 0:
        return q.num[0]
    return None


# -- ladder operators ---------------------------------------------------------

@dataclass(frozen=True)
class LadderOperator:
    name: str
    factors: tuple[FirstOrderOperator, ...]       # application order
    energy_step: Fraction                         # lambda > 0
    direction: int                                # -1 lowering, +1 raising
    factor_kinds: tuple[tuple[str, int], ...]     # (family, seed index) per factor

    def __call__(self, f: GaussRational) -> GaussRational:
        for op in self.factors:
            f = op(f)
        return f

    def adjoint(self) -> "LadderOperator":
        return build_ladder(_ADJOINT_NAME[self.name])


_ADJOINT_NAME = {}
for _base in ("C", "L", "Lbar", "Ctilde", "Ltilde", "Lbartilde"):
    _ADJOINT_NAME[_base] = _base + "dag"
    _ADJOINT_NAME[_base + "dag"] = _base

# accepted spellings for build_ladder
_NAME_ALIASES = {
    "C†": "Cdag",
    "L†": "Ldag",
    "L̄": "Lbar",
    "L̄†": "Lbardag",
    "C̃": "Ctilde",
    "C̃†": "Ctildedag",
    "L̃": "Ltilde",
    "L̃†": "Ltildedag",
    "L̄̃": "Lbartilde",
    "L̄̃†": "Lbartildedag",
}


def _signed_step(kinds: tuple[tuple[str, int], ...]) -> int:
    # the deleting-chain frame sits 12 above the partner frame; entering or
    # leaving through it shifts the bookkeeping energy accordingly
    s = 12 if kinds[0][0].startswith("Abar") else 0
    for kind, _ in kinds:
        if kind == "a":
            s -= 2
        elif kind == "adag":
            s += 2
    if kinds[-1][0] == "Abar":
        s -= 12
    return s


@lru_cache(maxsize=None)
def build_ladder(name: str) -> LadderOperator:
    key = _NAME_ALIASES.get(name, name)
    adding, deleting = standard_chains()
    A, Ab = adding.supercharges, deleting.supercharges
    a_down = [(LOWERING, ("a", 0))]
    a_up = [(RAISING, ("adag", 0))]
    down_add = [(A[i].adjoint(), ("Adag", SEEDS[i])) for i in (3, 2, 1, 0)]
    up_add = [(A[i], ("A", SEEDS[i])) for i in (0, 1, 2, 3)]
    down_del = [(Ab[i].adjoint(), ("Abardag", DELETING_BASE + i)) for i in (1, 0)]
    up_del = [(Ab[i], ("Abar", DELETING_BASE + i)) for i in (0, 1)]

    table = {
        "C": down_add + up_del,
        "Cdag": down_del + up_add,
        "L": down_add + a_down + up_add,
        "Ldag": down_add + a_up + up_add,
        "Lbar": down_del + a_down + up_del,
        "Lbardag": down_del + a_up + up_del,
        "Ltilde": down_add + a_down + a_down + up_add,
        "Ltildedag": down_add + a_up + a_up + up_add,
        "Lbartilde": down_del + a_down + a_down + up_del,
        "Lbartildedag": down_del + a_up + a_up + up_del,
    }
    table["Ctilde"] = table["C"]
    table["Ctildedag"] = table["Cdag"]
    if key not in table:
        raise ValueError(f"unknown ladder operator {name!r}")
    factors = tuple(f for f, _ in table[key])
    kinds = tuple(k for _, k in table[key])
    signed = _signed_step(kinds)
    return LadderOperator(key, factors, Fraction(abs(signed)),
                          1 if signed > 0 else -1, kinds)


def product_polynomial(op: LadderOperator) -> Polynomial:
    """P with adjoint(op)(op(psi_E)) = P(E) psi_E on exact eigenstates.

    Each first-order factor contributes one linear factor at its
    factorization energy, tracked in the frame the state currently occupies.
    """
    s = 12 if op.factor_kinds[0][0].startswith("Abar") else 0
    poly = ONE
    for kind, m in op.factor_kinds:
        if kind in ("A", "Adag"):
            poly = poly * Polynomial([2 * m + 1 + s, 1])
        elif kind in ("Abar", "Abardag"):
            poly = poly * Polynomial([s - (2 * m + 1), 1])
        elif kind == "a":
            poly = poly * Polynomial([s - 1, 1])
            s -= 2
        else:
            poly = poly * Polynomial([s + 1, 1])
            s += 2
    return poly


# tabulated factorizations of the five lowering products, as constants c in
# prod (H + c); the audit compares these against the derived polynomials and
# flags (never fixes) any mismatch
REFERENCE_PRODUCT_FACTORS = {
    "C": (-11, -9, 5, 7, 9, 11),
    "Ctilde": (-11, -9, 5, 7, 9, 11),
    "L": (3, 5, 7, 9, -1, 5, 7, 9, 11),
    "Lbar": (11, 1, -1, 3, 1),
    "Ltilde": (1, 3, 5, 7, -5, -3, 5, 7, 9, 11),
    "Lbartilde": (9, -1, 11, -3, 3, 1),
}


def reference_product_polynomial(name: str) -> Optional[Polynomial]:
    facs = REFERENCE_PRODUCT_FACTORS.get(name)
    if facs is None:
        return None
    poly = ONE
    for c in facs:
        poly = poly * Polynomial([c, 1])
    return poly


def _sweep_range(name: str) -> tuple[int, ...]:
    return TRUNCATED_RANGE if "tilde" in name else UNTRUNCATED_RANGE


def audit_product_polynomials() -> list[dict]:
    """Compare derived product polynomials against the tabulated reference.

    Any mismatch is confirmed by exact double application at a witness level
    and reported as a flagged finding; the reference table is never altered.
    """
    findings = []
    for name, ref_facs in REFERENCE_PRODUCT_FACTORS.items():
        op = build_ladder(name)
        derived = product_polynomial(op)
        ref = reference_product_polynomial(name)
        if derived == ref:
            findings.append({
                "check": "product_polynomial_reference", "operator": name,
                "nu": None, "status": "ok",
                "residual_description": "derived factorization matches the reference table",
            })
            continue
        from collections import Counter
        der_facs = _linear_factor_constants(derived)
        extra_ref = Counter(ref_facs) - Counter(der_facs)
        extra_der = Counter(der_facs) - Counter(ref_facs)
        witness = _product_witness(op, derived, ref)
        desc = (
            "reference factor(s) "
            + ", ".join(f"(H{c:+d})" for c in sorted(extra_ref.elements()))
            + " disagree with derived "
            + ", ".join(f"(H{c:+d})" for c in sorted(extra_der.elements()))
            + f"; exact double application at nu={witness} matches the derived form"
        )
        findings.append({
            "check": "product_polynomial_reference", "operator": name,
            "nu": witness, "status": "flagged", "residual_description": desc,
        })
    return findings


def _linear_factor_constants(poly: Polynomial) -> list[int]:
    # derived products are built as prod (X + c); recover the c's by root peeling
    out = []
    p = poly
    while p.degree > 0:
        # all roots are integers by construction; trial-divide around -c
        for c in range(-30, 31):
            q, r = divmod(p, Polynomial([c, 1]))
            if r.is_zero():
                out.append(c)
                p = q
                break
        else:
            raise ArithmeticError("non-integer factor in product polynomial")
    return out


def _product_witness(op: LadderOperator, derived: Polynomial, ref: Polynomial):
    low = op if op.direction < 0 else op.adjoint()
    for nu in _sweep_range(low.name):
        st = partner_state(nu)
        if derived(st.energy) == ref(st.energy):
            continue
        image = low.adjoint()(low(st.wavefunction))
        if image == st.wavefunction.scaled(derived(st.energy)):
            return nu
    return None


# -- verification sweeps ------------------------------------------------------

ZERO_MODE_TABLE = {
    "C": frozenset({-6, -5, -4, -3, 4, 5}),
    "Cdag": frozenset(),
    "L": frozenset({-6, -5, -4, -3, 0}),
    "Ldag": frozenset({-6, -5, -4, -3}),
    "Lbar": frozenset({-6, 0}),
    "Lbardag": frozenset({-3}),
}

TRUNCATED_ZERO_MODE_TABLE = {
    "Ctilde": frozenset({-5, -3, 5}),
    "Ctildedag": frozenset(),
    "Ltilde": frozenset({-5, -3, 1}),
    "Ltildedag": frozenset({-5, -3}),
    "Lbartilde": frozenset({-5, 1}),
    "Lbartildedag": frozenset({-3}),
}


def verify_zero_modes() -> list[dict]:
    """Exact sweep of both zero-mode tables over their index ranges.

    Listed pairs must map to the exact zero function, unlisted pairs must
    not; any mismatch is reported as a failing entry.
    """
    report = []
    sweeps = [(ZERO_MODE_TABLE, UNTRUNCATED_RANGE),
              (TRUNCATED_ZERO_MODE_TABLE, TRUNCATED_RANGE)]
    for table, nus in sweeps:
        for name, zeros in table.items():
            op = build_ladder(name)
            for nu in nus:
                image = op(partner_state(nu).wavefunction)
                expected = nu in zeros
                ok = image.is_zero() == expected
                desc = ("exact zero" if image.is_zero() else "nonzero image")
                desc += ", as tabulated" if ok else (
                    ", but the table %s a zero mode" % ("lists" if expected else "does not list"))
                report.append({
                    "check": "zero_mode", "operator": name, "nu": nu,
                    "status": "ok" if ok else "fail",
                    "residual_description": desc,
                })
    return report


def verify_heisenberg_algebra(name: str, nus: Optional[Sequence[int]] = None) -> list[dict]:
    """Exact checks of the product, commutator, and Hamiltonian commutation
    identities for the (lowering, raising) pair containing `name`.

    The commutator is compared against the tabulated reference polynomial
    where one exists; a reference mismatch with a passing derived form is
    reported as 'flagged', never silently corrected.
    """
    op = build_ladder(name)
    low = op if op.direction < 0 else op.adjoint()
    raise_ = low.adjoint()
    lam = low.energy_step
    derived = product_polynomial(low)
    ref = reference_product_polynomial(low.name)
    system = standard_system()
    if nus is None:
        nus = _sweep_range(low.name)
    report = []
    for nu in nus:
        st = partner_state(nu)
        psi, E = st.wavefunction, st.energy
        down_img = low(psi)
        up_img = raise_(psi)
        lhs_down = raise_(down_img)
        lhs_up = low(up_img)
        entries = [
            ("product_raise_lower", lhs_down == psi.scaled(derived(E)),
             f"adjoint(l)(l(psi)) vs P({E}) psi"),
            ("product_lower_raise", lhs_up == psi.scaled(derived(E + lam)),
             f"l(adjoint(l)(psi)) vs P({E + lam}) psi"),
            ("hamiltonian_commutator",
             apply_hamiltonian(system, up_img) == up_img.scaled(E + lam),
             f"H(adjoint(l)(psi)) vs ({E + lam}) adjoint(l)(psi)"),
        ]
        for check, ok, desc in entries:
            report.append({
                "check": check, "operator": low.name, "nu": nu,
                "status": "ok" if ok else "fail",
                "residual_description": desc + (": exact match" if ok else ": MISMATCH"),
            })
        comm = lhs_up - lhs_down
        derived_ok = comm == psi.scaled(derived(E + lam) - derived(E))
        if ref is None:
            status = "ok" if derived_ok else "fail"
            desc = "commutator vs derived polynomial"
        else:
            ref_ok = comm == psi.scaled(ref(E + lam) - ref(E))
            if ref_ok:
                status, desc = "ok", "commutator matches the reference polynomial"
            elif derived_ok:
                status = "flagged"
                desc = ("commutator disagrees with the reference polynomial "
                        "but matches the derived one")
            else:
                status, desc = "fail", "commutator matches neither polynomial"
        report.append({
            "check": "heisenberg_commutator", "operator": low.name, "nu": nu,
            "status": status, "residual_description": desc,
        })
    return report


def verify_eigenstates(nus: Optional[Sequence[int]] = None) -> list[dict]:
    """Exact eigen-identity sweep; physical states must vanish at the origin."""
    system = standard_system()
    report = []
    for nu in (UNTRUNCATED_RANGE if nus is None else nus):
        st = partner_state(nu)
        res = eigen_residual(system, st)
        ok = res.is_zero()
        report.append({
            "check": "eigen_identity", "operator": None, "nu": nu,
            "status": "ok" if ok else "fail",
            "residual_description": "exact zero residual" if ok else "nonzero residual",
        })
        if st.physical:
            vanishes = st.wavefunction.rat.num[0] == 0
            report.append({
                "check": "origin_vanishing", "operator": None, "nu": nu,
                "status": "ok" if vanishes else "fail",
                "residual_description": "numerator constant term is zero"
                if vanishes else "physical state does not vanish at x=0",
            })
    return report


def verify_intertwining() -> list[dict]:
    """A H^(1) = H^(2) A, checked exactly on eigenstates and generic probes."""
    adding, _ = standard_chains()
    system = standard_system()
    probes = [(f"psi_{nu}", oscillator_state(nu)) for nu in range(0, 12)]
    probes.append(("cubic", GaussRational(RationalFunction(Polynomial([-2, 0, 0, 1])), -1)))
    probes.append(("rational", GaussRational(
        RationalFunction(ONE, Polynomial([1, 0, 1])), -1)))
    report = []
    for label, f in probes:
        lhs = oscillator_hamiltonian(f)
        for opr in adding.supercharges:
            lhs = opr(lhs)
        rhs = f
        for opr in adding.supercharges:
            rhs = opr(rhs)
        rhs = apply_hamiltonian(system, rhs)
        ok = lhs == rhs
        report.append({
            "check": "intertwining", "operator": "A", "nu": label,
            "status": "ok" if ok else "fail",
            "residual_description": "A H1 f = H2 A f exactly" if ok else "MISMATCH",
        })
    return report


def regularity_report(system: Optional[PartnerSystem] = None,
                      x_max: int = 20, step: Fraction = Fraction(1, 8)) -> dict:
    """Sturm root count plus rational grid positivity for the denominator."""
    sysm = standard_system() if system is None else system
    den = sysm.denominator_poly
    roots = den.count_real_roots()
    n = int(Fraction(x_max) / step)
    grid_positive = all(den(k * step) > 0 for k in range(n + 1))
    ok = roots == 0 and grid_positive
    return {
        "check": "denominator_regularity", "operator": None, "nu": None,
        "status": "ok" if ok else "fail",
        "residual_description": f"Sturm real-root count {roots}; "
        f"grid positive on [0, {x_max}]: {grid_positive}",
    }
