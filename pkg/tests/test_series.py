import random
from fractions import Fraction as F

import pytest

from tropgamma.series import ISymbol, MixedPoly, SymSeries, ZetaPoly
from tropgamma.zetas import zeta_float


def test_zetapoly_arithmetic():
    z2 = ZetaPoly.zeta(2)
    z3 = ZetaPoly.zeta(3)
    p = 2 * z2 * z3 + ZetaPoly.gamma() - 1
    q = z3 * z2 * 2 + ZetaPoly.gamma() - 1
    assert p == q
    assert (p - q).is_zero()
    assert (z2 * z2).terms == {(0, (2, 2)): F(1)}


def test_zetapoly_numeric_consistency():
    # term-wise float evaluation agrees with high-precision constants
    p = ZetaPoly.zeta(2, F(3, 2)) + ZetaPoly.zeta(5, -2) * ZetaPoly.zeta(3)
    expect = 1.5 * zeta_float(2) - 2 * zeta_float(5) * zeta_float(3)
    assert abs(p.to_float() - expect) < 1e-15


def test_zeta_weight_grading():
    p = ZetaPoly.zeta(2) * ZetaPoly.zeta(3) + ZetaPoly.gamma() + ZetaPoly.zeta(4)
    parts = p.weight_parts()
    assert set(parts) == {1, 4, 5}
    assert parts[5] == ZetaPoly.zeta(2) * ZetaPoly.zeta(3)


def test_isymbol_canonical():
    s = ISymbol(2, (0, 3, 1))
    assert s.m == (3, 1, 0)
    assert s.weight == 2 + 4 + 3
    assert s == ISymbol(2, (3, 0, 1))
    with pytest.raises(ValueError):
        ISymbol(0, (1,))
    with pytest.raises(ValueError):
        ISymbol(1, ())


def test_mixedpoly_products():
    s = ISymbol(1, (0,))
    p = MixedPoly.from_isymbol(s, 2)
    sq = p * p
    key = ((0, ()), ((1, (0,)), (1, (0,))))
    assert sq.terms == {key: F(4)}
    mixed = p * ZetaPoly.zeta(3) + MixedPoly.const(1)
    assert mixed.weight() is None  # inhomogeneous
    assert (p * ZetaPoly.zeta(3)).weight() == 2 + 3


def test_mixedpoly_evaluate():
    s = ISymbol(1, (0,))
    rel = 4 * MixedPoly.from_isymbol(s) * MixedPoly.from_isymbol(s) \
        + 2 * MixedPoly.from_zeta(ZetaPoly.zeta(4, F(-7, 4))) \
        + MixedPoly.from_zeta(ZetaPoly.zeta(4))
    # 4 I[1;0]^2 + 2 I[1;2] + zeta(4) with I[1;0] = -zeta(2)/2, I[1;2] = -7/4 zeta(4)
    val = rel.evaluate(lambda sym: -zeta_float(2) / 2)
    assert abs(val) < 1e-14


def test_symseries_mul_truncation():
    x = SymSeries.variable(0, 2, 3)
    y = SymSeries.variable(1, 2, 3)
    s = (1 + x + y) * (1 + x * y)
    assert s.coeffs[(1, 1)] == 1
    assert (2, 1) in s.coeffs and (2, 2) not in s.coeffs  # degree 4 truncated


def test_exp_log_inverse_exact():
    rng = random.Random(3)
    for nvars, W in ((2, 8), (3, 6)):
        coeffs = {}
        for _ in range(8):
            e = tuple(rng.randrange(0, 3) for _ in range(nvars))
            if 0 < sum(e) <= W:
                coeffs[e] = F(rng.randrange(-5, 6), rng.randrange(1, 7))
        s = SymSeries.one(nvars, W) + SymSeries(nvars, W, coeffs)
        assert s.log().exp() == s
        t = SymSeries(nvars, W, coeffs)
        assert t.exp().log() == t


def test_eval_at_and_collapse():
    s = SymSeries(2, 3, {(1, 0): F(2), (0, 2): F(1), (1, 1): F(-3)})
    assert s.eval_at([0.5, 2.0]) == 2 * 0.5 + 4.0 - 3.0
    assert s.collapse_equal() == {1: F(2), 2: F(-2)}


def test_series_scalar_ring_mix():
    # ZetaPoly coefficients flow through exp/mul without losing exactness
    z = SymSeries.variable(0, 1, 4) * ZetaPoly.zeta(2)
    e = z.exp()
    assert e.coeffs[(2,)] == ZetaPoly.zeta(2) * ZetaPoly.zeta(2) * F(1, 2)
