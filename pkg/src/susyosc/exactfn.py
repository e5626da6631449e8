"""Exact arithmetic layer: rational polynomials, rational functions,
Gaussian-weighted rational functions, and first-order differential operators.

Representation invariants:

- Polynomial stores an ascending tuple of Fractions with no trailing zeros;
  the zero polynomial is the empty tuple and has degree -1.
- RationalFunction is stored reduced (numerator and denominator coprime) with
  an integer-primitive, positive-leading denominator, so equality is
  structural.
- GaussRational is rat(x) * exp(weight * x^2 / 2) with integer weight; the
  family is closed under differentiation, products, and first-order operators.

Everything here is immutable and exact; floats enter only through evaluate().
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence, Union

import mpmath as mp

Scalar = Union[int, Fraction]


def _to_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"exact coefficient expected, got {type(c).__name__}")


class Polynomial:
    """Dense univariate polynomial over arbitrary-precision rationals."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        cs = [_to_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, *a):
        raise AttributeError("Polynomial is immutable")

    # -- basic structure -------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial([other])
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    # -- ring operations --------------------------------------------------
    def __add__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            other = Polynomial([other])
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial([self[i] + other[i] for i in range(n)])

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other if isinstance(other, Polynomial) else Polynomial([-other]))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return Polynomial([c * other for c in self.coeffs])
        if not isinstance(other, Polynomial):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return Polynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __divmod__(self, other: "Polynomial"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q = [Fraction(0)] * max(len(self.coeffs) - len(other.coeffs) + 1, 0)
        r = list(self.coeffs)
        db, lb = other.degree, other.leading
        while len(r) > db and any(r):
            while r and r[-1] == 0:
                r.pop()
            if len(r) - 1 < db:
                break
            c = r[-1] / lb
            d = len(r) - 1 - db
            q[d] = c
            for i, bc in enumerate(other.coeffs):
                r[i + d] -= c * bc
            r.pop()
        return Polynomial(q), Polynomial(r)

    def exact_div(self, other: "Polynomial") -> "Polynomial":
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError("division is not exact")
        return q

    def derivative(self) -> "Polynomial":
        return Polynomial([i * c for i, c in enumerate(self.coeffs)][1:])

    # -- content and gcd --------------------------------------------------
    def content(self) -> Fraction:
        """Positive rational c with self/c integer-primitive; 0 for zero."""
        if self.is_zero():
            return Fraction(0)
        num = 0
        den = 1
        for c in self.coeffs:
            num = math.gcd(num, c.numerator)
            den = den * c.denominator // math.gcd(den, c.denominator)
        return Fraction(num, den)

    def primitive(self) -> "Polynomial":
        if self.is_zero():
            return self
        c = self.content()
        if self.leading < 0:
            c = -c
        return self * (1 / c)

    @staticmethod
    def gcd(a: "Polynomial", b: "Polynomial") -> "Polynomial":
        """Primitive gcd, normalized integer-primitive with positive leading."""
        a, b = a.primitive(), b.primitive()
        while not b.is_zero():
            _, r = divmod(a, b)
            a, b = b, r.primitive()
        return a

    def _content_scaled(self) -> "Polynomial":
        # divide by the (positive) content, keeping the sign
        return self if self.is_zero() else self * (1 / self.content())

    # -- real-root counting ------------------------------------------------
    def sturm_sequence(self) -> list["Polynomial"]:
        # content scaling keeps coefficients small; sign must be preserved
        seq = [self._content_scaled(), self.derivative()._content_scaled()]
        while not seq[-1].is_zero():
            _, r = divmod(seq[-2], seq[-1])
            seq.append((-r)._content_scaled())
        seq.pop()
        return seq

    def count_real_roots(self) -> int:
        """Number of distinct real roots, by Sturm sign variations at -inf/+inf."""
        if self.degree <= 0:
            return 0
        seq = self.sturm_sequence()

        def variations(signs):
            signs = [s for s in signs if s]
            return sum(1 for u, v in zip(signs, signs[1:]) if u != v)

        at_plus = [1 if p.leading > 0 else -1 if p.leading < 0 else 0 for p in seq]
        at_minus = [s * (-1) ** (p.degree % 2) for s, p in zip(at_plus, seq)]
        return variations(at_minus) - variations(at_plus)

    # -- evaluation ---------------------------------------------------------
    def __call__(self, x):
        acc = x * 0  # inherits the numeric type of x
        for c in reversed(self.coeffs):
            acc = acc * x + (c if isinstance(x, (Fraction, int)) else _coerce(c, x))
        return acc

    def __repr__(self):
        if self.is_zero():
            return "Polynomial(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*x")
            else:
                terms.append(f"{c}*x^{i}")
        return "Polynomial(" + " + ".join(terms) + ")"


def _coerce(c: Fraction, like):
    if isinstance(like, (mp.mpf, mp.mpc)):
        return mp.mpf(c.numerator) / c.denominator
    return c.numerator / c.denominator


ONE = Polynomial([1])
X = Polynomial([0, 1])


class RationalFunction:
    """Quotient of two Polynomials, stored reduced and canonical."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=ONE):
        if isinstance(num, (int, Fraction)):
            num = Polynomial([num])
        if isinstance(den, (int, Fraction)):
            den = Polynomial([den])
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            num, den = Polynomial(), ONE
        else:
            g = Polynomial.gcd(num, den)
            num, den = num.exact_div(g), den.exact_div(g)
            c = den.content()
            if den.leading < 0:
                c = -c
            num, den = num * (1 / c), den * (1 / c)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *a):
        raise AttributeError("RationalFunction is immutable")

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den == ONE

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, Polynomial)):
            other = RationalFunction(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        other = _as_rational(other)
        return RationalFunction(self.num * other.den + other.num * self.den,
                                self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-_as_rational(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_rational(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_rational(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return _as_rational(other) / self

    def derivative(self) -> "RationalFunction":
        return RationalFunction(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def __call__(self, x):
        d = self.den(x)
        if d == 0:
            raise ZeroDivisionError(f"evaluation at a pole, x={x}")
        return self.num(x) / d

    def __repr__(self):
        if self.is_polynomial():
            return f"RationalFunction({self.num!r})"
        return f"RationalFunction({self.num!r} / {self.den!r})"


def _as_rational(v) -> RationalFunction:
    if isinstance(v, RationalFunction):
        return v
    if isinstance(v, (int, Fraction, Polynomial)):
        return RationalFunction(v)
    raise TypeError(f"cannot interpret {type(v).__name__} as RationalFunction")


class GaussRational:
    """rat(x) * exp(weight * x^2 / 2) with integer weight."""

    __slots__ = ("rat", "weight")

    def __init__(self, rat, weight: int = 0):
        rat = _as_rational(rat)
        if rat.is_zero():
            weight = 0
        object.__setattr__(self, "rat", rat)
        object.__setattr__(self, "weight", int(weight))

    def __setattr__(self, *a):
        raise AttributeError("GaussRational is immutable")

    def is_zero(self) -> bool:
        return self.rat.is_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, GaussRational):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        return self.weight == other.weight and self.rat == other.rat

    def __hash__(self):
        return hash((self.rat, self.weight))

    def __add__(self, other: "GaussRational") -> "GaussRational":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.weight != other.weight:
            raise ValueError("cannot add GaussRationals of different weight")
        return GaussRational(self.rat + other.rat, self.weight)

    def __neg__(self):
        return GaussRational(-self.rat, self.weight)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, GaussRational):
            return GaussRational(self.rat * other.rat, self.weight + other.weight)
        return GaussRational(self.rat * _as_rational(other), self.weight)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, GaussRational):
            return GaussRational(self.rat / other.rat, self.weight - other.weight)
        return GaussRational(self.rat / _as_rational(other), self.weight)

    def derivative(self) -> "GaussRational":
        # d/dx [r e^{s x^2/2}] = (r' + s x r) e^{s x^2/2}
        return GaussRational(self.rat.derivative() + RationalFunction(X) * self.weight * self.rat,
                             self.weight)

    def scaled(self, c) -> "GaussRational":
        return GaussRational(self.rat * c, self.weight)

    def __call__(self, x):
        v = self.rat(x)
        if self.weight == 0:
            return v
        if isinstance(x, (mp.mpf, mp.mpc)):
            return v * mp.exp(self.weight * x * x / 2)
        return v * math.exp(self.weight * x * x / 2.0)

    def __repr__(self):
        return f"GaussRational({self.rat!r}, weight={self.weight})"


class FirstOrderOperator:
    """derivative_sign * d/dx + superpotential, acting on GaussRational."""

    __slots__ = ("superpotential", "sign")

    def __init__(self, superpotential, sign: int):
        if sign not in (1, -1):
            raise ValueError("derivative sign must be +1 or -1")
        object.__setattr__(self, "superpotential", _as_rational(superpotential))
        object.__setattr__(self, "sign", sign)

    def __setattr__(self, *a):
        raise AttributeError("FirstOrderOperator is immutable")

    def adjoint(self) -> "FirstOrderOperator":
        # formal adjoint on the line: (s d/dx + W)^+ = -s d/dx + W
        return FirstOrderOperator(self.superpotential, -self.sign)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FirstOrderOperator):
            return NotImplemented
        return self.sign == other.sign and self.superpotential == other.superpotential

    def __hash__(self):
        return hash((self.sign, self.superpotential))

    def __call__(self, f: GaussRational) -> GaussRational:
        df = f.derivative()
        if self.sign < 0:
            df = -df
        return df + GaussRational(self.superpotential * f.rat, f.weight)

    def __repr__(self):
        s = "+d/dx" if self.sign > 0 else "-d/dx"
        return f"FirstOrderOperator({s} + {self.superpotential!r})"


# -- named constructors -----------------------------------------------------

def hermite(n: int) -> Polynomial:
    """Physicists' Hermite polynomial H_n."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    h0, h1 = ONE, Polynomial([0, 2])
    if n == 0:
        return h0
    for k in range(1, n):
        h0, h1 = h1, Polynomial([0, 2]) * h1 - (2 * k) * h0
    return h1

def modified_hermite(m: int) -> Polynomial:
    """H_m with the sign flips removed; all present coefficients positive.

    Same recurrence as hermite() with +2k in place of -2k, which realizes
    the (-i)^m H_m(ix) bookkeeping without complex arithmetic.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    h0, h1 = ONE, Polynomial([0, 2])
    if m == 0:
        return h0
    for k in range(1, m):
        h0, h1 = h1, Polynomial([0, 2]) * h1 + (2 * k) * h0
    return h1


def oscillator_state(n: int) -> GaussRational:
    """Unnormalized H_n(x) e^{-x^2/2}."""
    return GaussRational(hermite(n), -1)


def seed_function(m: int) -> GaussRational:
    """Non-normalizable seed at energy -(2m+1)."""
    return GaussRational(modified_hermite(m), +1)


LOWERING = FirstOrderOperator(RationalFunction(X), +1)   # a  = d/dx + x
RAISING = FirstOrderOperator(RationalFunction(X), -1)    # a+ = -d/dx + x


def differentiate(f: GaussRational) -> GaussRational:
    return f.derivative()


def apply_operator(op: FirstOrderOperator, f: GaussRational) -> GaussRational:
    return op(f)


def wronskian(fs: Sequence[GaussRational]) -> GaussRational:
    """Wronskian determinant of GaussRationals with polynomial rational parts.

    The Gaussian weight of each column is factored out first: with
    f = p e^{s x^2/2}, the i-th derivative row entry is D^i p where
    D p = p' + s x p. The determinant of the resulting polynomial matrix is
    taken by fraction-free Bareiss elimination, and the factored weight
    exp(sum(s) x^2/2) is restored at the end.
    """
    if not fs:
        raise ValueError("wronskian of an empty list")
    for f in fs:
        if not f.rat.is_polynomial():
            raise ValueError("wronskian columns must have polynomial rational parts")
    n = len(fs)
    cols = []
    for f in fs:
        p, s = f.rat.num, f.weight
        col = [p]
        for _ in range(n - 1):
            p = p.derivative() + Polynomial([0, s]) * p
            col.append(p)
        cols.append(col)
    rows = [[cols[j][i] for j in range(n)] for i in range(n)]
    det = _bareiss_det(rows)
    return GaussRational(det, sum(f.weight for f in fs))


def _bareiss_det(m: list[list[Polynomial]]) -> Polynomial:
    n = len(m)
    if n == 1:
        return m[0][0]
    m = [row[:] for row in m]
    sign = 1
    prev = ONE
    for k in range(n - 1):
        if m[k][k].is_zero():
            for s in range(k + 1, n):
                if not m[s][k].is_zero():
                    m[k], m[s] = m[s], m[k]
                    sign = -sign
                    break
            else:
                return Polynomial()
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                # exact by the Bareiss identity
                m[i][j] = num.exact_div(prev)
        prev = m[k][k]
    return m[n - 1][n - 1] if sign > 0 else -m[n - 1][n - 1]


def evaluate(f: GaussRational, x) -> mp.mpf:
    """High-precision evaluation at the current mpmath working precision."""
    if not isinstance(x, (mp.mpf, mp.mpc)):
        x = mp.mpf(x)
    return f(x)
