"""The Gamma class, its local-integral counterpart, and their pairings.

Two expansions of the Gamma class of an anticanonical hypersurface are
built and compared exactly:

  * the exponential form  exp( sum_{k>=2} (-1)^k zeta(k)/k (sum_j D_j^k - sigma^k) )
  * the product form      prod_j Gamma(1+D_j) / Gamma(1+sigma)

via log Gamma(1+z) = -gamma z + sum_{k>=2} (-1)^k zeta(k) z^k / k.

The local-integral class is

  1 + sum_{q, J, l, m}  I_{l;m}/(l! prod m_j!) (-D_q)(-sigma)^{l-1}
                        prod_{j in J} (-D_j)^{m_j+1}

with q in V, J a nonempty subset avoiding q, l >= 1.  Comparing the two
class logarithms coefficient-by-coefficient on symmetric monomials (pure
powers excluded; those coefficients vanish on both sides) yields the
weight-graded linear relations between local integrals and zeta values.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DegreeMismatch, IProviderFailure, QuadratureNotConverged
from .series import ISymbol, MixedPoly, SymSeries, ZetaPoly, factorial
from .linalg import frac


# ---------------------------------------------------------------------------
# Gamma class

def _log_gamma1p(z: SymSeries) -> SymSeries:
    """log Gamma(1 + z) for a series z with zero constant term."""
    out = z * ZetaPoly.gamma(-1)
    power = z
    for k in range(2, z.trunc + 1):
        power = power * z
        if not power.coeffs:
            break
        out = out + power * ZetaPoly.zeta(k, Fraction((-1) ** k, k))
    return out


def gamma_class(nvars: int, trunc: int) -> SymSeries:
    """Gamma class series with ZetaPoly coefficients.

    Both the exponential and product forms are expanded and compared; the
    gamma-constant terms of the product form cancel since sigma = sum_j D_j.
    """
    sigma = SymSeries.from_linear([Fraction(1)] * nvars, trunc)
    arg = SymSeries.zero(nvars, trunc)
    for k in range(2, trunc + 1):
        pk = SymSeries(nvars, trunc,
                       {tuple(k if i == j else 0 for i in range(nvars)): Fraction(1)
                        for j in range(nvars)})
        arg = arg + (pk - sigma ** k) * ZetaPoly.zeta(k, Fraction((-1) ** k, k))
    exp_form = arg.map_coeffs(_to_zeta).exp()

    log_prod = SymSeries.zero(nvars, trunc)
    for j in range(nvars):
        log_prod = log_prod + _log_gamma1p(SymSeries.variable(j, nvars, trunc))
    log_prod = log_prod - _log_gamma1p(sigma)
    prod_form = log_prod.map_coeffs(_to_zeta).exp()

    if exp_form != prod_form:
        raise AssertionError("Gamma class expansions disagree")
    return exp_form


def _to_zeta(c):
    if isinstance(c, ZetaPoly):
        return c
    return ZetaPoly.const(c)


# ---------------------------------------------------------------------------
# The local-integral class

def _iter_ghat_terms(nvars, trunc):
    """Yield (q, J, m, ell, sym) over all admissible index data."""
    for q in range(nvars):
        others = [j for j in range(nvars) if j != q]
        for size in range(1, min(len(others), trunc - 1) + 1):
            for J in itertools.combinations(others, size):
                # ell + |m| + |J| <= trunc
                for m in _bounded_tuples(size, trunc - 1 - size):
                    mm = sum(m)
                    for ell in range(1, trunc - size - mm + 1):
                        yield q, J, m, ell, ISymbol(ell, m)


def _bounded_tuples(length, total):
    if length == 0:
        yield ()
        return
    for first in range(total + 1):
        for rest in _bounded_tuples(length - 1, total - first):
            yield (first,) + rest


def g_hat(nvars: int, trunc: int, iprovider=None) -> SymSeries:
    """The local-integral class; symbolic (MixedPoly) or numeric coefficients.

    In numeric mode `iprovider` maps each ISymbol of weight <= trunc to a
    float.
    """
    numeric = iprovider is not None
    one = 1.0 if numeric else MixedPoly.const(1)
    out = {(0,) * nvars: one}
    sigma_pows = [SymSeries.one(nvars, trunc)]
    sigma = SymSeries.from_linear([Fraction(1)] * nvars, trunc)
    for _ in range(trunc):
        sigma_pows.append(sigma_pows[-1] * sigma)

    cache = {}
    for q, J, m, ell, sym in _iter_ghat_terms(nvars, trunc):
        if numeric:
            try:
                ival = cache.get(sym)
                if ival is None:
                    ival = float(iprovider(sym))
                    cache[sym] = ival
            except Exception as exc:
                raise IProviderFailure(f"I-provider failed on {sym}: {exc}") from exc
            scale = ival / (factorial(ell) * math.prod(factorial(x) for x in m))
        else:
            scale = MixedPoly.from_isymbol(
                sym, Fraction(1, factorial(ell) * math.prod(factorial(x) for x in m)))
        sign = (-1) ** (ell + sum(m) + len(J))
        base = [0] * nvars
        base[q] += 1
        for j, mj in zip(J, m):
            base[j] += mj + 1
        base = tuple(base)
        deg0 = sum(base)
        for e, c in sigma_pows[ell - 1].coeffs.items():
            if deg0 + sum(e) > trunc:
                continue
            key = tuple(a + b for a, b in zip(base, e))
            term = scale * float(c) * sign if numeric else scale * (c * sign)
            out[key] = out[key] + term if key in out else term
    return SymSeries(nvars, trunc, out)


# ---------------------------------------------------------------------------
# Targeted coefficients and relation extraction
#
# Relations live at a fixed weight k and only need coefficients on partition
# monomials, so instead of full series products we extract single
# coefficients of log G on demand.

@lru_cache(maxsize=None)
def _ghat_coeff(e: tuple) -> MixedPoly:
    """Coefficient of the monomial D^e in the local-integral class (degree>=2)."""
    w = sum(e)
    supp = [i for i, x in enumerate(e) if x]
    acc = {}
    for q in supp:
        others = [j for j in supp if j != q]
        for size in range(1, len(others) + 1):
            for J in itertools.combinations(others, size):
                for m in itertools.product(*[range(e[j]) for j in J]):
                    # D_q sigma^{ell-1} prod D_j^{m_j+1} hits D^e when the
                    # leftover exponent gamma_exp is spread by sigma^{ell-1}
                    gamma_exp = list(e)
                    gamma_exp[q] -= 1
                    for j, mj in zip(J, m):
                        gamma_exp[j] -= mj + 1
                    ell = sum(gamma_exp) + 1
                    if ell < 1:
                        continue
                    denom = ell * math.prod(factorial(x) for x in m)
                    for g in gamma_exp:
                        denom *= factorial(g)
                    sym = ISymbol(ell, m)
                    key = ((0, ()), ((sym.ell, sym.m),))
                    acc[key] = acc.get(key, Fraction(0)) + Fraction(1, denom)
    sign = (-1) ** w
    return MixedPoly({k: sign * v for k, v in acc.items()})


@lru_cache(maxsize=None)
def _prod_coeff(ws: tuple, e: tuple) -> MixedPoly:
    """Coefficient of D^e in the product of graded pieces Ghat'_{w} for w in ws."""
    if len(ws) == 1:
        return _ghat_coeff(e) if sum(e) == ws[0] else MixedPoly()
    first = ws[0]
    acc = {}
    for e1 in _sub_exponents(e, first):
        c1 = _ghat_coeff(e1)
        if c1.is_zero():
            continue
        e2 = tuple(a - b for a, b in zip(e, e1))
        c2 = _prod_coeff(ws[1:], e2)
        if c2.is_zero():
            continue
        for k, v in (c1 * c2).terms.items():
            acc[k] = acc.get(k, 0) + v
    return MixedPoly(acc)


def _sub_exponents(e, total):
    """All f <= e componentwise with sum(f) == total."""
    out = []

    def rec(i, remaining, prefix):
        if i == len(e):
            if remaining == 0:
                out.append(tuple(prefix))
            return
        lo = max(0, remaining - sum(e[i + 1:]))
        for x in range(lo, min(e[i], remaining) + 1):
            rec(i + 1, remaining - x, prefix + [x])

    rec(0, total, [])
    return out


def _log_ghat_coeff(e: tuple) -> MixedPoly:
    """Coefficient of D^e in log of the local-integral class.

    log(1 + S) expands over ordered tuples of graded pieces; pieces commute,
    so each weight multiset is computed once and scaled by its ordering
    count.
    """
    w = sum(e)
    acc = {}
    for j in range(1, w // 2 + 1):
        for ws in _weight_multisets(w, j):
            orderings = factorial(j)
            for mult in _multiplicities(ws):
                orderings //= factorial(mult)
            term = _prod_coeff(ws, e)
            if term.is_zero():
                continue
            scale = Fraction((-1) ** (j + 1) * orderings, j)
            for k, v in term.terms.items():
                acc[k] = acc.get(k, 0) + scale * v
    return MixedPoly(acc)


def _weight_multisets(total, parts, max_part=None):
    """Descending tuples of `parts` weights >= 2 summing to `total`."""
    if max_part is None:
        max_part = total
    if parts == 1:
        if 2 <= total <= max_part:
            yield (total,)
        return
    for first in range(min(total - 2 * (parts - 1), max_part), 1, -1):
        for rest in _weight_multisets(total - first, parts - 1, first):
            yield (first,) + rest


def _multiplicities(ws):
    return [ws.count(x) for x in set(ws)]


def _log_gamma_coeff(e: tuple) -> ZetaPoly:
    """Coefficient of D^e in log of the Gamma class (degree >= 2)."""
    w = sum(e)
    nonzero = [x for x in e if x]
    multinom = factorial(w)
    for x in nonzero:
        multinom //= factorial(x)
    pw = 1 if len(nonzero) == 1 else 0
    coeff = Fraction((-1) ** w, w) * (pw - multinom)
    return ZetaPoly.zeta(w, coeff)


def partitions(n, max_part=None):
    """Partitions of n as descending tuples."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def isymbols_of_weight(k):
    """All ISymbols of weight k: ell + |m| + dim(m) = k."""
    out = []
    for p in range(1, k):          # dim(m)
        for ell in range(1, k - p + 1):
            s = k - ell - p        # |m|
            if s < 0:
                continue
            for part in partitions(s, s if s else 1):
                if len(part) > p:
                    continue
                m = tuple(part) + (0,) * (p - len(part))
                out.append(ISymbol(ell, m))
    return sorted(set(out), key=lambda s: (s.ell, s.m))


@dataclass
class Relation:
    """A weight-homogeneous linear relation among I-monomials and zetas.

    poly == 0 is the statement; normalized so the leading coefficient is 1.
    """

    weight: int
    partition: tuple
    poly: MixedPoly

    def residual(self, iprovider) -> float:
        return self.poly.evaluate(iprovider)

    def to_json(self):
        terms = {}
        for ((g, zs), isyms), v in sorted(self.poly.terms.items()):
            key = "*".join(str(ISymbol(ell, m)) for ell, m in isyms) or "1"
            zp = ZetaPoly({(g, zs): v})
            if key in terms:
                terms[key] += " + " + str(zp)
            else:
                terms[key] = str(zp)
        return {"weight": self.weight,
                "monomial": ",".join(map(str, self.partition)),
                "relation": terms}

    def __str__(self):
        return f"[w={self.weight} m_{self.partition}]  {self.poly} = 0"


def extract_relations(max_weight: int):
    """All relations from log Ghat = log Gamma through the given weight.

    Returns {weight: {"relations": [Relation], "symbols": [ISymbol]}}; at
    weight k there are pi(k)-1 relations (pure-power monomial excluded) and
    sum_{j<k} pi(j) symbols.
    """
    out = {}
    for k in range(2, max_weight + 1):
        rels = []
        for part in partitions(k):
            if len(part) == 1:
                continue  # pure power: both logs have vanishing coefficient
            e = tuple(part)
            poly = _log_ghat_coeff(e) - MixedPoly.from_zeta(_log_gamma_coeff(e))
            lead = poly.terms[sorted(poly.terms)[0]]
            poly = poly * (1 / lead)
            rels.append(Relation(weight=k, partition=part, poly=poly))
        out[k] = {"relations": rels, "symbols": isymbols_of_weight(k)}
    return out


# ---------------------------------------------------------------------------
# Pairing with an intersection table

def evaluate_on_X(series: SymSeries, table, datum, logt: float, theta=None) -> complex:
    """Pair sigma * t^{-omega} * exp(-i theta . D) * series with the table.

    The hypersurface class is sigma = sum_q D_q; only total degree d pairs.
    """
    nv = table.nvars
    if series.nvars != nv:
        raise DegreeMismatch(f"series has {series.nvars} vars, table {nv}")
    if theta is None:
        theta = datum.theta
    d = table.dim
    lam = [float(x) for x in datum.lam]
    lin = [(-logt) * lam[q] - 1j * float(theta[q]) for q in range(nv)]
    expo = SymSeries.from_linear(lin, d).exp()
    sigma = SymSeries.from_linear([1.0] * nv, d)
    prod = sigma * expo * series.to_float().copy(trunc=d)
    total = 0j
    for e, c in prod.degree_part(d).coeffs.items():
        w = table.entries.get(e)
        if w is not None:
            total += complex(c) * float(w)
    return total


def chern_euler(table):
    """Euler characteristic of the hypersurface and Chern classes of TX.

    c(TX) = prod_j (1 + D_j) / (1 + sigma) by adjunction; chi pairs the top
    Chern class with sigma.
    """
    nv, d = table.nvars, table.dim
    n = d - 1
    c = SymSeries.one(nv, n)
    for j in range(nv):
        c = c * (SymSeries.one(nv, n) + SymSeries.variable(j, nv, n))
    sigma = SymSeries.from_linear([Fraction(1)] * nv, n)
    inv = SymSeries.one(nv, n)
    power = SymSeries.one(nv, n)
    for k in range(1, n + 1):
        power = power * sigma
        inv = inv + power * Fraction((-1) ** k)
    c = c * inv
    chi = Fraction(0)
    for e, coeff in c.degree_part(n).coeffs.items():
        for q in range(nv):
            e2 = list(e)
            e2[q] += 1
            w = table.entries.get(tuple(e2))
            if w is not None:
                chi += frac(coeff) * w
    classes = [c.degree_part(k) for k in range(n + 1)]
    return chi, classes


# ---------------------------------------------------------------------------
# Function-level G_X and Gamma_X

def Gamma_X_numeric(D) -> float:
    """prod_j Gamma(1+D_j) / Gamma(1+sigma) via log-Gamma."""
    D = [float(x) for x in D]
    sigma = sum(D)
    return math.exp(sum(math.lgamma(1 + x) for x in D) - math.lgamma(1 + sigma))


def G_X_numeric(D, rel_tol=1e-9) -> float:
    """The tropical-projective-space integral form of the Gamma function ratio.

    G_X(D) = (prod D_j / sigma) * sum over splittings {q} u K = V of
    int_{[0,oo)^K} exp(-sum D_k s_k) (1 + sum e^{-s_k})^{-sigma} ds.

    After u = e^{-s} each factor carries the Jacobi weight u^{D_k - 1}, so a
    tensor Gauss-Jacobi rule converges geometrically; two resolutions give
    the error estimate.
    """
    from scipy.special import roots_jacobi

    D = [float(x) for x in D]
    if any(x <= 0 for x in D):
        raise ValueError("need all D_q > 0")
    if len(D) > 4:
        raise ValueError("quadrature feasible only for |V| <= 4")
    sigma = sum(D)

    def estimate(npts):
        total = 0.0
        for q in range(len(D)):
            K = [j for j in range(len(D)) if j != q]
            nodes, weights = [], []
            for k in K:
                x, w = roots_jacobi(npts, 0.0, D[k] - 1.0)
                u = (1.0 + x) / 2.0
                w = w / 2.0 ** D[k]
                nodes.append(u)
                weights.append(w)
            if not K:
                total += 1.0
                continue
            grids = np.meshgrid(*nodes, indexing="ij")
            wgrid = np.ones_like(grids[0])
            for axis, w in enumerate(weights):
                shape = [1] * len(K)
                shape[axis] = -1
                wgrid = wgrid * w.reshape(shape)
            s = 1.0 + sum(grids)
            total += float(np.sum(wgrid * s ** (-sigma)))
        return math.prod(D) / sigma * total

    coarse, fine = estimate(40), estimate(64)
    err = abs(fine - coarse)
    tol = rel_tol * max(1.0, abs(fine))
    if err > tol:
        raise QuadratureNotConverged("G_X_numeric", fine, err, tol)
    return fine
