import math
from collections import Counter
from fractions import Fraction as F

import numpy as np
import pytest

from tropgamma.engine import (FiberSolve, build_charts, default_epsilon,
                              fit_asymptotics, period, period_arc, solve_fiber)
from tropgamma.errors import ValidationError
from tropgamma.lattice import MirrorDatum, face_volume
from tropgamma.quadrature import QuadratureSpec
from tropgamma.zetas import zeta_float

P2 = MirrorDatum(dim=2, V=[(1, 0), (0, 1), (-1, -1)], lam=[1, 1, 1])
P1XP1 = MirrorDatum(dim=2, V=[(1, 0), (-1, 0), (0, 1), (0, -1)],
                    lam=[1, 1, 1, 1])
QUARTIC = MirrorDatum(dim=3, V=[(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1)],
                      lam=[1, 1, 1, 1])


def test_build_charts_p2():
    charts = build_charts(P2, 0.2)
    assert len(charts) == 9
    assert Counter(len(c.K) for c in charts) == Counter({0: 3, 1: 6})
    ch = next(c for c in charts if c.q == 0 and c.K == (1,))
    assert ch.r == 1  # det[(1,0),(-1,1)] = 1


def test_build_charts_quartic_counts():
    charts = build_charts(QUARTIC, 0.2)
    assert len(charts) == 28
    assert Counter(len(c.K) for c in charts) == Counter({0: 4, 1: 12, 2: 12})


def test_build_charts_counts_match_incidence_oracle():
    # combinatorial oracle: (q, K) is a chart iff {q} u K lies in some
    # vertex's active set
    from tropgamma.lattice import build_delta_lambda
    import itertools

    for datum in (P2, P1XP1, QUARTIC):
        _, P, _ = build_delta_lambda(datum)
        nv, d = datum.nvars, datum.dim
        expected = 0
        for q in range(nv):
            others = [m for m in range(nv) if m != q]
            for size in range(0, d):
                for K in itertools.combinations(others, size):
                    idx = {q, *K}
                    if any(idx <= act for act in P.incidence):
                        expected += 1
        assert len(build_charts(datum, 0.1)) == expected


def test_default_epsilon_clamped():
    eps = default_epsilon(P2)
    assert 0.02 <= eps <= 0.3


def test_solve_fiber_examples():
    charts = build_charts(P2, 0.2)
    t = 1e-4
    L = -math.log(t)
    corner = next(c for c in charts if c.q == 0 and c.K == (1,))
    fs = FiberSolve(t=t, theta=(0.0, 0.0, 0.0))
    a = solve_fiber(corner, [0.0], [], fs)
    assert abs(a - math.log(2) / L) < 1e-12

    strip = next(c for c in charts if c.q == 0 and c.K == ())
    # deep inside the facet all other monomials are tiny: a ~ 0
    a = solve_fiber(strip, [], [0.5], fs)
    assert abs(a) < 1e-3

    fs_pi = FiberSolve(t=t, theta=(math.pi, 0.0, 0.0))
    a = solve_fiber(strip, [], [0.5], fs_pi)
    assert abs(a - (-1j * math.pi / math.log(t))) < 1e-3


def test_piece_sum_matches_arc_oracle():
    res = period(P2, 1e-4)
    arc = period_arc(P2, 1e-4)
    assert abs(res.value.real - arc) / arc < 1e-10
    assert res.value.imag == 0.0


def test_period_p2_leading():
    t = 1e-4
    res = period(P2, t)
    assert abs(res.value.real - 9 * (-math.log(t))) < 1e-2


def test_epsilon_independence():
    vals = [period(P2, 1e-4, epsilon=eps) for eps in (0.05, 0.1, 0.2)]
    tol = 2 * max(v.quadrature_error for v in vals) + 1e-9
    base = vals[-1].value.real
    for v in vals:
        assert abs(v.value.real - base) <= tol


def test_leading_order_is_boundary_volume():
    # value/(-log t)^n -> residual-normalized facet volume sum
    for datum in (P2, P1XP1):
        boundary = sum(face_volume(datum, (q,)) for q in range(datum.nvars))
        t = 1e-5
        res = period(datum, t)
        lead = res.value.real / (-math.log(t))
        assert abs(lead - float(boundary)) / float(boundary) < 2e-2


def test_theta_period_and_conjugation():
    t = 1e-4
    L = -math.log(t)
    theta = (2 * math.pi, 0.0, 0.0)
    res = period(P2, t, theta=theta)
    expect = 9 * L - 6j * math.pi
    assert abs(res.value - expect) / abs(expect) < 1e-6
    conj = period(P2, t, theta=tuple(-x for x in theta))
    assert abs(conj.value - res.value.conjugate()) < 1e-10


def test_theta_zero_same_code_path():
    a = period(P2, 1e-3)
    b = period(P2, 1e-3, theta=(0.0, 0.0, 0.0))
    assert a.value == b.value


def test_theta_continuity_along_path():
    t = 1e-3
    vals = [period(P2, t, theta=(2 * math.pi * s, 0, 0)).value
            for s in (0.0, 0.25, 0.5, 0.75, 1.0)]
    jumps = [abs(b - a) for a, b in zip(vals[:-1], vals[1:])]
    # steps of pi/2 in theta move the value by ~ 3 pi/2 in the imaginary
    # direction; continuity means no step jumps wildly beyond that scale
    for j in jumps:
        assert j < 2.5 * math.pi
    assert abs(vals[0] - period(P2, t).value) == 0.0


def test_theta_unsupported_dimension():
    with pytest.raises(ValidationError):
        period(QUARTIC, 1e-3, theta=(2 * math.pi, 0, 0, 0))


def test_fit_asymptotics_p2():
    rep = fit_asymptotics(P2, [1e-3, 1e-4, 1e-5])
    assert rep.success
    assert rep.eps_hat > 0.5
    defects = [r["defect"] for r in rep.rows]
    assert defects[0] >= defects[1] >= defects[2]


def test_fit_asymptotics_floor_flag():
    # equal t values twice would be invalid; a floor shows as eps_hat noise
    rep = fit_asymptotics(P2, [1e-4, 1e-5], quad=QuadratureSpec(
        rel_tol=1e-5, abs_tol=1e-6))
    assert rep.rows[0]["defect"] >= 0
    assert isinstance(rep.at_floor, bool)


def test_period_validation():
    with pytest.raises(ValidationError):
        period(P2, 1e-3, theta=(0.0,))
    with pytest.raises(ValidationError):
        FiberSolve(t=1.5)
