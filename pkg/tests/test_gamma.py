import math
from fractions import Fraction as F

import pytest

from tropgamma import linalg
from tropgamma.errors import DegreeMismatch
from tropgamma.gamma import (G_X_numeric, Gamma_X_numeric, chern_euler,
                             evaluate_on_X, extract_relations, g_hat,
                             gamma_class, isymbols_of_weight)
from tropgamma.lattice import MirrorDatum, intersection_table
from tropgamma.localints import make_iprovider
from tropgamma.series import ISymbol, MixedPoly, ZetaPoly
from tropgamma.zetas import zeta_float

P2 = MirrorDatum(dim=2, V=[(1, 0), (0, 1), (-1, -1)], lam=[1, 1, 1])
QUARTIC = MirrorDatum(dim=3, V=[(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1)],
                      lam=[1, 1, 1, 1])
QUINTIC = MirrorDatum(dim=4,
                      V=[(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0),
                         (0, 0, 0, 1), (-1, -1, -1, -1)],
                      lam=[1, 1, 1, 1, 1])


def partition_count(n):
    ps = [1] + [0] * n
    for k in range(1, n + 1):
        for j in range(k, n + 1):
            ps[j] += ps[j - k]
    return ps[n]


def test_gamma_class_equal_variable_collapse():
    g = gamma_class(5, 3)
    parts = g.collapse_equal()
    assert parts[3] == ZetaPoly.zeta(3, 40)
    assert 1 not in parts  # gamma-constant terms cancel
    g4 = gamma_class(4, 2)
    assert g4.collapse_equal()[2] == ZetaPoly.zeta(2, -6)


def test_gamma_class_constant_and_symmetry():
    g = gamma_class(3, 4)
    assert g.constant_term() == ZetaPoly.const(1)
    # symmetric: coefficient depends only on the sorted exponent
    for e, c in g.coeffs.items():
        pi = tuple(sorted(e, reverse=True)) + (0,) * 0
        for other, c2 in g.coeffs.items():
            if tuple(sorted(other, reverse=True)) == tuple(sorted(e, reverse=True)):
                assert c == c2


def test_g_hat_symbolic_small():
    gh = g_hat(2, 2)
    assert gh.coeffs[(1, 1)] == 2 * MixedPoly.from_isymbol(ISymbol(1, (0,)))
    # pure powers never appear
    assert (2, 0) not in gh.coeffs and (0, 2) not in gh.coeffs


def test_g_hat_pure_powers_vanish():
    gh = g_hat(3, 4)
    for e in gh.coeffs:
        if sum(e) >= 1:
            assert sum(1 for x in e if x) >= 2


def test_g_hat_d1d2d3_coefficient():
    gh = g_hat(3, 3)
    c = gh.coeffs[(1, 1, 1)]
    expect = -3 * (MixedPoly.from_isymbol(ISymbol(1, (0, 0)))
                   + MixedPoly.from_isymbol(ISymbol(2, (0,))))
    assert c == expect
    # numeric value matches the Gamma-class coefficient 2 zeta(3)
    val = c.evaluate(make_iprovider())
    assert abs(val - 2 * zeta_float(3)) < 1e-9


def test_g_hat_numeric_matches_gamma_weight3():
    prov = make_iprovider()
    gh = g_hat(3, 3, iprovider=prov)
    g = gamma_class(3, 3)
    for e, c in g.coeffs.items():
        if sum(e) < 2:
            continue
        got = gh.coeffs.get(e, 0.0)
        assert abs(got - c.to_float()) < 1e-9


def test_relation_counts_match_partition_table():
    expected_symbols = {2: 1, 3: 3, 4: 6, 5: 11, 6: 18, 7: 29, 8: 44, 9: 66,
                        10: 96, 11: 138, 12: 194, 13: 271}
    for k, count in expected_symbols.items():
        assert len(isymbols_of_weight(k)) == count
    rels = extract_relations(6)
    for k in rels:
        assert len(rels[k]["relations"]) == partition_count(k) - 1
        assert len(rels[k]["symbols"]) == sum(partition_count(j)
                                              for j in range(1, k))


def _relation_vectors(polys):
    keys = sorted({k for p in polys for k in p.terms})
    return [[p.terms.get(k, F(0)) for k in keys] for p in polys], keys


def test_weight4_relations_span_the_literature_block():
    """The four weight-4 relations generate the familiar identities,
    including 4 I[1;0]^2 + 2 I[1;2] + zeta(4) = 0."""
    rels = [r.poly for r in extract_relations(4)[4]["relations"]]
    i = lambda ell, m: MixedPoly.from_isymbol(ISymbol(ell, m))
    z4 = MixedPoly.from_zeta(ZetaPoly.zeta(4))
    known = [
        F(1, 2) * i(1, (2,)) + F(1, 2) * i(2, (1,)) + F(1, 3) * i(3, (0,)) + z4,
        4 * i(1, (0,)) * i(1, (0,)) + 2 * i(1, (2,)) + z4,
        F(1, 2) * i(1, (2,)) + F(3, 2) * i(2, (1,)) - 2 * i(1, (1, 0))
        - F(3, 2) * i(2, (0, 0)) + z4,
        2 * i(1, (2,)) - 8 * i(1, (1, 0)) + 4 * i(1, (0, 0, 0)) + z4,
    ]
    base, keys = _relation_vectors(rels)
    rank0 = linalg.rank(base)
    assert rank0 == 4
    for rel in known:
        vecs, _ = _relation_vectors(rels + [rel])
        assert linalg.rank(vecs) == rank0  # lies in the span


def test_weight3_relations_give_closed_forms():
    # combining the two weight-3 relations with I[1;1] = -3/4 zeta(3)
    rels = extract_relations(3)[3]["relations"]
    closed = {ISymbol(1, (1,)): -F(3, 4), ISymbol(2, (0,)): -F(1, 4),
              ISymbol(1, (0, 0)): -F(5, 12)}
    z3 = zeta_float(3)
    prov = lambda s: float(closed[s]) * z3
    for r in rels:
        assert abs(r.residual(prov)) < 1e-14


def test_evaluate_on_x_quintic():
    table = intersection_table(QUINTIC)
    g = gamma_class(5, 4)
    logt = math.log(1e-3)
    L = -logt
    val = evaluate_on_X(g, table, QUINTIC, logt)
    expect = 625 / 6 * L ** 3 - 250 * zeta_float(2) * L + 200 * zeta_float(3)
    assert abs(val - expect) < 1e-8 * abs(expect)
    assert abs(val.imag) < 1e-12


def test_evaluate_on_x_trivial_series():
    table = intersection_table(P2)
    one = gamma_class(3, 2) * 0 + 1
    L = 5.0
    val = evaluate_on_X(one, table, P2, -L)
    # sigma . exp(L omega) pairs to L * <sigma omega> = 9 L
    assert abs(val - 9 * L) < 1e-10


def test_evaluate_on_x_theta():
    table = intersection_table(P2)
    g = gamma_class(3, 2)
    L = -math.log(1e-4)
    val = evaluate_on_X(g, table, P2, math.log(1e-4),
                        theta=(2 * math.pi, 0, 0))
    assert abs(val - (9 * L - 6j * math.pi)) < 1e-10


def test_evaluate_on_x_degree_mismatch():
    table = intersection_table(P2)
    with pytest.raises(DegreeMismatch):
        evaluate_on_X(gamma_class(4, 2), table, P2, -5.0)


def test_chern_euler_values():
    assert chern_euler(intersection_table(QUINTIC))[0] == -200
    assert chern_euler(intersection_table(QUARTIC))[0] == 24
    assert chern_euler(intersection_table(P2))[0] == 0


def test_gamma_x_closed_values():
    assert abs(Gamma_X_numeric((1.0, 1.0)) - 0.5) < 1e-14


def test_g_x_equals_gamma_x():
    assert abs(G_X_numeric((1.0, 1.0)) - 0.5) < 1e-8
    for D in ((0.3, 0.7, 1.1), (0.2, 0.5, 0.9), (0.9, 0.8, 0.1)):
        assert abs(G_X_numeric(D) - Gamma_X_numeric(D)) < 1e-6


def test_ghat_asymptotic_expansion_order():
    """G_X(yD) - trunc(Ghat)(yD) shrinks like y^{W+1}: ratio test across
    three y values confirms the order within 20%."""
    D = (0.4, 0.7, 0.9)
    W = 4
    gh = g_hat(3, W, iprovider=make_iprovider())
    ys = (0.1, 0.05, 0.025)
    errs = [abs(G_X_numeric(tuple(y * x for x in D))
                - gh.eval_at([y * x for x in D])) for y in ys]
    orders = [math.log(errs[i] / errs[i + 1]) / math.log(2) for i in range(2)]
    for order in orders:
        assert abs(order - (W + 1)) < 0.2 * (W + 1)
