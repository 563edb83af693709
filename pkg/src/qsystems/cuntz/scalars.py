"""Exact arithmetic in Q(zeta_16, 2^(1/4)).

Elements are ``a + b * 2^(1/4)`` with a, b in the cyclotomic field
Q(zeta_16) over the power basis ``zeta^0 .. zeta^7`` (``zeta = exp(i pi/8)``,
``zeta^8 = -1``).  This field contains every scalar in the concrete Ising
computations: sqrt(2) = zeta^2 - zeta^6, i = zeta^4, the statistics phase
kappa = zeta, and the normalization 2^(1/4) of the chiral Fermi field.

Internally an element is 16 integer numerators over one positive integer
denominator, normalized by their gcd; this keeps the bulk arithmetic in
machine integers.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

__all__ = ["Ex", "ZERO", "ONE", "I", "SQRT2", "INV_SQRT2", "ZETA", "ROOT4_2"]

_Z16 = (0,) * 16


def _conv8(x, y, out, off):
    """out[off:off+8] += x * y in Z[zeta16] (zeta^8 = -1)."""
    for i in range(8):
        xi = x[i]
        if not xi:
            continue
        for j in range(8):
            yj = y[j]
            if not yj:
                continue
            k = i + j
            if k < 8:
                out[off + k] += xi * yj
            else:
                out[off + k - 8] -= xi * yj


def _mul_sqrt2(x, out, off):
    """out[off:off+8] += sqrt(2) * x, with sqrt(2) = zeta^2 - zeta^6."""
    for j in range(8):
        xj = x[j]
        if not xj:
            continue
        k = j + 2
        if k < 8:
            out[off + k] += xj
        else:
            out[off + k - 8] -= xj
        k = j + 6
        if k < 8:
            out[off + k] -= xj
        else:
            out[off + k - 8] += xj


class Ex:
    """An exact scalar ``(sum_k n_k zeta^k + 2^(1/4) sum_k n_{8+k} zeta^k)/den``."""

    __slots__ = ("n", "den")

    def __init__(self, n=_Z16, den: int = 1):
        if den < 0:
            n = tuple(-v for v in n)
            den = -den
        if den > 1:
            g = den
            for v in n:
                if v:
                    g = math.gcd(g, v)
                if g == 1:
                    break
            if g > 1:
                n = tuple(v // g for v in n)
                den //= g
        self.n = tuple(n)
        self.den = den

    # -- constructors ------------------------------------------------------

    @classmethod
    def rational(cls, p, q=1) -> "Ex":
        if isinstance(p, Fraction):
            p, q = p.numerator * q, p.denominator
        vec = [0] * 16
        vec[0] = p
        return cls(tuple(vec), q)

    @classmethod
    def zeta_pow(cls, k: int) -> "Ex":
        k = k % 16
        vec = [0] * 16
        if k < 8:
            vec[k] = 1
        else:
            vec[k - 8] = -1
        return cls(tuple(vec))

    @classmethod
    def _from_parts(cls, a_fracs, b_fracs) -> "Ex":
        den = 1
        for f in (*a_fracs, *b_fracs):
            den = den * f.denominator // math.gcd(den, f.denominator)
        vec = [int(f * den) for f in (*a_fracs, *b_fracs)]
        return cls(tuple(vec), den)

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        other = _try_coerce(other)
        if other is None:
            return NotImplemented
        if other.den == self.den:
            return Ex(tuple(x + y for x, y in zip(self.n, other.n)), self.den)
        return Ex(tuple(x * other.den + y * self.den
                        for x, y in zip(self.n, other.n)),
                  self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return Ex(tuple(-v for v in self.n), self.den)

    def __sub__(self, other):
        other = _try_coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _try_coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _try_coerce(other)
        if other is None:
            return NotImplemented
        a1, b1 = self.n[:8], self.n[8:]
        a2, b2 = other.n[:8], other.n[8:]
        out = [0] * 16
        any_a1, any_b1 = any(a1), any(b1)
        any_a2, any_b2 = any(a2), any(b2)
        if any_a1 and any_a2:
            _conv8(a1, a2, out, 0)
        if any_b1 and any_b2:
            bb = [0] * 16
            _conv8(b1, b2, bb, 0)
            _mul_sqrt2(bb[:8], out, 0)
        if any_a1 and any_b2:
            _conv8(a1, b2, out, 8)
        if any_b1 and any_a2:
            _conv8(b1, a2, out, 8)
        return Ex(tuple(out), self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "Ex":
        a = [Fraction(v, self.den) for v in self.n[:8]]
        b = [Fraction(v, self.den) for v in self.n[8:]]
        if not any(b):
            return Ex._from_parts(_inv8_frac(a), [Fraction(0)] * 8)
        # (a + b u)^-1 = (a - b u) / (a^2 - b^2 sqrt2)
        a2 = _conv8_frac(a, a)
        b2 = _conv8_frac(b, b)
        denom = [x - y for x, y in zip(a2, _sqrt2_frac(b2))]
        inv = _inv8_frac(denom)
        return Ex._from_parts(_conv8_frac(inv, a),
                              [-v for v in _conv8_frac(inv, b)])

    def __truediv__(self, other):
        other = _try_coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _try_coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def conj(self) -> "Ex":
        out = [0] * 16
        for off in (0, 8):
            x = self.n[off:off + 8]
            out[off] = x[0]
            for k in range(1, 8):
                out[off + 8 - k] -= x[k]
        return Ex(tuple(out), self.den)

    # -- predicates and conversions -----------------------------------------

    @property
    def is_zero(self) -> bool:
        return not any(self.n)

    def __eq__(self, other):
        other = _try_coerce(other)
        if other is None:
            return NotImplemented
        return self.n == other.n and self.den == other.den

    def __hash__(self):
        return hash((self.n, self.den))

    def __complex__(self) -> complex:
        zeta = cmath.exp(1j * cmath.pi / 8)
        val = sum(v * zeta ** k for k, v in enumerate(self.n[:8]) if v)
        val += 2 ** 0.25 * sum(v * zeta ** k
                               for k, v in enumerate(self.n[8:]) if v)
        return complex(val) / self.den

    def __repr__(self):
        parts = []
        for off, unit in ((0, ""), (8, "*2^(1/4)")):
            for k in range(8):
                c = self.n[off + k]
                if c:
                    frac = str(Fraction(c, self.den))
                    base = frac if k == 0 else (f"{frac}*z{k}" if c != self.den
                                                else f"z{k}")
                    parts.append(base + unit)
        return "Ex(" + (" + ".join(parts) if parts else "0") + ")"


def _try_coerce(v):
    if isinstance(v, Ex):
        return v
    if isinstance(v, int):
        return Ex.rational(v)
    if isinstance(v, Fraction):
        return Ex.rational(v)
    return None


# Fraction-based helpers for the (rare) field inversions


def _conv8_frac(x, y):
    out = [Fraction(0)] * 8
    for i, xi in enumerate(x):
        if not xi:
            continue
        for j, yj in enumerate(y):
            if not yj:
                continue
            q, r = divmod(i + j, 8)
            out[r] += -xi * yj if q % 2 else xi * yj
    return out


def _sqrt2_frac(x):
    s2 = [Fraction(v) for v in (0, 0, 1, 0, 0, 0, -1, 0)]
    return _conv8_frac(s2, x)


def _inv8_frac(x):
    cols = []
    for k in range(8):
        e = [Fraction(0)] * 8
        e[k] = Fraction(1)
        cols.append(_conv8_frac(x, e))
    M = [[cols[k][r] for k in range(8)] for r in range(8)]
    rhs = [Fraction(1 if r == 0 else 0) for r in range(8)]
    piv_cols = []
    row = 0
    for col in range(8):
        p = next((r for r in range(row, 8) if M[r][col]), None)
        if p is None:
            continue
        M[row], M[p] = M[p], M[row]
        rhs[row], rhs[p] = rhs[p], rhs[row]
        inv = 1 / M[row][col]
        M[row] = [v * inv for v in M[row]]
        rhs[row] *= inv
        for r in range(8):
            if r != row and M[r][col]:
                f = M[r][col]
                M[r] = [v - f * w for v, w in zip(M[r], M[row])]
                rhs[r] -= f * rhs[row]
        piv_cols.append(col)
        row += 1
    if row < 8:
        raise ZeroDivisionError("element is not invertible")
    y = [Fraction(0)] * 8
    for r, col in enumerate(piv_cols):
        y[col] = rhs[r]
    return y


ZERO = Ex()
ONE = Ex.rational(1)
I = Ex.zeta_pow(4)
ZETA = Ex.zeta_pow(1)                    # exp(i pi / 8)
SQRT2 = Ex.zeta_pow(2) + Ex.zeta_pow(-2)
INV_SQRT2 = SQRT2 * Ex.rational(1, 2)
ROOT4_2 = Ex((0,) * 8 + (1,) + (0,) * 7)
