"""Graded coefficient rings and truncated power series in divisor variables.

ZetaPoly is the ring Q[gamma, zeta(2), zeta(3), ...] with weight grading
w(zeta(k)) = k, w(gamma) = 1.  ISymbol is a formal local-integral symbol
I_{l;m} of weight l + |m| + dim(m).  MixedPoly allows products of both.
SymSeries is a truncated multivariate series whose coefficients live in any
of these rings (or are plain numbers, in numeric mode).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .zetas import euler_gamma_float, zeta_float
from .linalg import frac


def _is_number(c):
    return isinstance(c, (int, float, complex, Fraction))


def coeff_is_zero(c):
    if _is_number(c):
        return c == 0
    return c.is_zero()


def coeff_to_number(c):
    """Collapse any coefficient to float/complex."""
    if isinstance(c, Fraction):
        return float(c)
    if _is_number(c):
        return c
    return c.to_float()


# ---------------------------------------------------------------------------
# ZetaPoly

class ZetaPoly:
    """Polynomial in gamma and zeta(k), k >= 2, over the rationals.

    Monomial keys are (gamma_exponent, zetas) with zetas a descending tuple
    of arguments; e.g. gamma^2 * zeta(3) * zeta(2)^2 -> (2, (3, 2, 2)).
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        for k, v in (terms or {}).items():
            v = frac(v)
            if v:
                self.terms[k] = v

    # constructors
    @classmethod
    def const(cls, x):
        return cls({(0, ()): frac(x)})

    @classmethod
    def zeta(cls, k, coeff=1):
        return cls({(0, (int(k),)): frac(coeff)})

    @classmethod
    def gamma(cls, coeff=1):
        return cls({(1, ()): frac(coeff)})

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if _is_number(other):
            other = ZetaPoly.const(other)
        if not isinstance(other, ZetaPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        if _is_number(other):
            other = ZetaPoly.const(other)
        if not isinstance(other, ZetaPoly):
            return NotImplemented
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return ZetaPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return ZetaPoly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        if _is_number(other):
            other = ZetaPoly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_number(other):
            other = frac(other)
            return ZetaPoly({k: v * other for k, v in self.terms.items()})
        if not isinstance(other, ZetaPoly):
            return NotImplemented
        out = {}
        for (g1, z1), v1 in self.terms.items():
            for (g2, z2), v2 in other.terms.items():
                key = (g1 + g2, tuple(sorted(z1 + z2, reverse=True)))
                out[key] = out.get(key, Fraction(0)) + v1 * v2
        return ZetaPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * (1 / frac(other))

    def weight_parts(self):
        out = {}
        for (g, zs), v in self.terms.items():
            w = g + sum(zs)
            out.setdefault(w, {})[(g, zs)] = v
        return {w: ZetaPoly(t) for w, t in out.items()}

    def to_float(self) -> float:
        total = 0.0
        for (g, zs), v in self.terms.items():
            x = float(v) * euler_gamma_float() ** g
            for k in zs:
                x *= zeta_float(k)
            total += x
        return total

    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for (g, zs), v in sorted(self.terms.items()):
            factors = []
            if v != 1 or (g == 0 and not zs):
                factors.append(str(v))
            if g:
                factors.append("gamma" + (f"^{g}" if g > 1 else ""))
            for k in sorted(set(zs), reverse=True):
                e = zs.count(k)
                factors.append(f"zeta({k})" + (f"^{e}" if e > 1 else ""))
            bits.append("*".join(factors))
        return " + ".join(bits)

    __repr__ = __str__


# ---------------------------------------------------------------------------
# ISymbol

@dataclass(frozen=True, order=True)
class ISymbol:
    """Formal local integral I_{l; m1,...,mp}; m kept in descending order."""

    ell: int
    m: tuple

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(sorted((int(x) for x in self.m), reverse=True)))
        if self.ell < 1 or len(self.m) < 1:
            raise ValueError("need ell >= 1 and dim(m) >= 1")

    @property
    def weight(self):
        return self.ell + sum(self.m) + len(self.m)

    def __str__(self):
        return f"I[{self.ell};{','.join(map(str, self.m))}]"

    __repr__ = __str__


# ---------------------------------------------------------------------------
# MixedPoly

class MixedPoly:
    """Polynomial over Q in ZetaPoly monomials and products of ISymbols.

    Keys are ((gamma_exp, zetas), isyms) with isyms a sorted tuple of
    (ell, m) pairs.  Weight adds across all factors.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        for k, v in (terms or {}).items():
            v = frac(v)
            if v:
                self.terms[k] = v

    @classmethod
    def const(cls, x):
        return cls({((0, ()), ()): frac(x)})

    @classmethod
    def from_zeta(cls, zp: ZetaPoly):
        return cls({(zmon, ()): v for zmon, v in zp.terms.items()})

    @classmethod
    def from_isymbol(cls, sym: ISymbol, coeff=1):
        return cls({((0, ()), ((sym.ell, sym.m),)): frac(coeff)})

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        other = _as_mixed(other)
        if other is None:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        other = _as_mixed(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return MixedPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return MixedPoly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        other = _as_mixed(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + _as_mixed(other)

    def __mul__(self, other):
        if _is_number(other):
            other = frac(other)
            return MixedPoly({k: v * other for k, v in self.terms.items()})
        other = _as_mixed(other)
        if other is None:
            return NotImplemented
        out = {}
        for ((g1, z1), i1), v1 in self.terms.items():
            for ((g2, z2), i2), v2 in other.terms.items():
                key = ((g1 + g2, tuple(sorted(z1 + z2, reverse=True))),
                       tuple(sorted(i1 + i2)))
                out[key] = out.get(key, Fraction(0)) + v1 * v2
        return MixedPoly(out)

    __rmul__ = __mul__

    def weight(self):
        """Weight if homogeneous, else None."""
        ws = {_key_weight(k) for k in self.terms}
        return ws.pop() if len(ws) == 1 else None

    def isymbols(self):
        out = set()
        for (_, isyms) in self.terms:
            for ell, m in isyms:
                out.add(ISymbol(ell, m))
        return out

    def evaluate(self, iprovider) -> float:
        """Numeric value using iprovider: ISymbol -> float."""
        total = 0.0
        for ((g, zs), isyms), v in self.terms.items():
            x = float(v) * euler_gamma_float() ** g
            for k in zs:
                x *= zeta_float(k)
            for ell, m in isyms:
                x *= iprovider(ISymbol(ell, m))
            total += x
        return total

    def zeta_part(self) -> ZetaPoly:
        return ZetaPoly({zmon: v for (zmon, isyms), v in self.terms.items() if not isyms})

    def to_float(self) -> float:
        if any(isyms for (_, isyms) in self.terms):
            raise TypeError("symbolic I-terms present; use evaluate(iprovider)")
        return self.zeta_part().to_float()

    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for ((g, zs), isyms), v in sorted(self.terms.items()):
            factors = []
            zp = ZetaPoly({(g, zs): 1})
            if v != 1 or (not isyms and (g, zs) == (0, ())):
                factors.append(str(v))
            if (g, zs) != (0, ()):
                factors.append(str(zp))
            for ell, m in isyms:
                factors.append(str(ISymbol(ell, m)))
            bits.append("*".join(factors))
        return " + ".join(bits)

    __repr__ = __str__


def _key_weight(key):
    (g, zs), isyms = key
    w = g + sum(zs)
    for ell, m in isyms:
        w += ell + sum(m) + len(m)
    return w


def _as_mixed(x):
    if isinstance(x, MixedPoly):
        return x
    if isinstance(x, ZetaPoly):
        return MixedPoly.from_zeta(x)
    if _is_number(x):
        return MixedPoly.const(x)
    return None


# ---------------------------------------------------------------------------
# SymSeries

class SymSeries:
    """Truncated power series in nvars variables, coefficients in any ring.

    Keys are exponent tuples of total degree <= trunc; zero coefficients are
    never stored.  Arithmetic truncates on the fly.
    """

    __slots__ = ("nvars", "trunc", "coeffs")

    def __init__(self, nvars, trunc, coeffs=None):
        self.nvars = nvars
        self.trunc = trunc
        self.coeffs = {}
        for e, c in (coeffs or {}).items():
            if sum(e) <= trunc and not coeff_is_zero(c):
                self.coeffs[tuple(e)] = c

    @classmethod
    def zero(cls, nvars, trunc):
        return cls(nvars, trunc)

    @classmethod
    def one(cls, nvars, trunc):
        return cls(nvars, trunc, {(0,) * nvars: Fraction(1)})

    @classmethod
    def variable(cls, i, nvars, trunc):
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, trunc, {tuple(e): Fraction(1)})

    @classmethod
    def from_linear(cls, coeffs, trunc):
        nvars = len(coeffs)
        data = {}
        for i, c in enumerate(coeffs):
            e = [0] * nvars
            e[i] = 1
            data[tuple(e)] = c
        return cls(nvars, trunc, data)

    def copy(self, trunc=None):
        return SymSeries(self.nvars, self.trunc if trunc is None else trunc,
                         dict(self.coeffs))

    def constant_term(self):
        return self.coeffs.get((0,) * self.nvars, Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, SymSeries):
            return NotImplemented
        if self.nvars != other.nvars or self.trunc != other.trunc:
            return False
        keys = set(self.coeffs) | set(other.coeffs)
        for k in keys:
            a = self.coeffs.get(k, 0)
            b = other.coeffs.get(k, 0)
            if not coeff_is_zero(a - b):
                return False
        return True

    def __add__(self, other):
        if not isinstance(other, SymSeries):
            other = SymSeries.one(self.nvars, self.trunc) * other
        if self.nvars != other.nvars:
            raise ValueError("nvars mismatch")
        trunc = min(self.trunc, other.trunc)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out[e] + c if e in out else c
        return SymSeries(self.nvars, trunc, out)

    __radd__ = __add__

    def __neg__(self):
        return SymSeries(self.nvars, self.trunc, {e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, SymSeries):
            other = SymSeries.one(self.nvars, self.trunc) * other
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, SymSeries):
            return SymSeries(self.nvars, self.trunc,
                             {e: c * other for e, c in self.coeffs.items()})
        if self.nvars != other.nvars:
            raise ValueError("nvars mismatch")
        trunc = min(self.trunc, other.trunc)
        out = {}
        for e1, c1 in self.coeffs.items():
            d1 = sum(e1)
            for e2, c2 in other.coeffs.items():
                if d1 + sum(e2) > trunc:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                prod = c1 * c2
                out[e] = out[e] + prod if e in out else prod
        return SymSeries(self.nvars, trunc, out)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n):
        out = SymSeries.one(self.nvars, self.trunc)
        base = self
        n = int(n)
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def exp(self):
        """exp of a series with zero constant term."""
        if not coeff_is_zero(self.constant_term()):
            raise ValueError("exp needs zero constant term")
        out = SymSeries.one(self.nvars, self.trunc)
        term = SymSeries.one(self.nvars, self.trunc)
        for k in range(1, self.trunc + 1):
            term = term * self * Fraction(1, k)
            if not term.coeffs:
                break
            out = out + term
        return out

    def log(self):
        """log of a series with constant term 1."""
        c0 = self.constant_term()
        if not (c0 == 1 or (not _is_number(c0) and c0 == ZetaPoly.const(1))):
            if coeff_to_number(c0) != 1:
                raise ValueError("log needs constant term 1")
        s = self - SymSeries.one(self.nvars, self.trunc)
        out = SymSeries.zero(self.nvars, self.trunc)
        power = SymSeries.one(self.nvars, self.trunc)
        for j in range(1, self.trunc + 1):
            power = power * s
            if not power.coeffs:
                break
            out = out + power * Fraction((-1) ** (j + 1), j)
        return out

    def degree_part(self, k):
        return SymSeries(self.nvars, self.trunc,
                         {e: c for e, c in self.coeffs.items() if sum(e) == k})

    def map_coeffs(self, f):
        return SymSeries(self.nvars, self.trunc,
                         {e: f(c) for e, c in self.coeffs.items()})

    def to_float(self):
        return self.map_coeffs(coeff_to_number)

    def eval_at(self, values):
        """Substitute numbers for the variables (full truncated sum)."""
        total = 0.0
        for e, c in self.coeffs.items():
            x = coeff_to_number(c)
            for xi, ei in zip(values, e):
                if ei:
                    x *= xi ** ei
            total += x
        return total

    def collapse_equal(self):
        """Coefficients of H^k after setting all variables equal to H."""
        out = {}
        for e, c in self.coeffs.items():
            d = sum(e)
            out[d] = out[d] + c if d in out else c
        return out

    def __str__(self):
        bits = []
        for e, c in sorted(self.coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0])):
            mono = "*".join(f"D{i}^{x}" if x > 1 else f"D{i}"
                            for i, x in enumerate(e) if x)
            cs = str(c)
            if "+" in cs or "-" in cs[1:]:
                cs = f"({cs})"
            bits.append(f"{cs}*{mono}" if mono else cs)
        return " + ".join(bits) if bits else "0"

    __repr__ = __str__


@lru_cache(maxsize=None)
def factorial(n):
    return math.factorial(n)
