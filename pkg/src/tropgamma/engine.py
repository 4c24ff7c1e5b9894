"""Period integrals over the tropical cycle by (q, K)-chart decomposition.

The real cycle is B_t = { sum_q t^{beta_q(p)} = 1 } with beta_q = <q, .> +
lambda_q.  It is partitioned (up to measure zero) into pieces indexed by a
dominant index q and the set K of tropical monomials within epsilon of it:

    b_k = beta_k - beta_q in [0, epsilon]   for k in K,
    beta_m - beta_q >= epsilon              for m outside {q} u K.

Per chart, affine coordinates (a, b_k, c_j) with a = beta_q and integral
complement c_j turn the piece integral into

    int  r (-log t)^n / (w df/dw)  db dc,
    w df/dw = sum_m (d beta_m / d a) e^{i theta_m} t^{beta_m(a, b, c)},

evaluated at the fiber solution a(b, c) of sum_m e^{i theta_m} t^{beta_m} = 1.
Nothing is dropped: summing the pieces reproduces the period exactly (up to
quadrature), for any epsilon.  Phases are handled by continuing the
a-coordinate from the real solution along a straight path in theta while the
(b, c) domain stays the real one.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg
from .errors import HomotopyStuck, NewtonDiverged, ValidationError
from .lattice import MirrorDatum, build_delta_lambda, _min_gap
from .linalg import frac
from .quadrature import (DEFAULT_SPEC, QuadratureSpec, gauss_legendre,
                         sobol_points, two_sided_edges)

_EXP_CLIP = 200.0  # caps log t * beta during Newton to avoid overflow


@dataclass
class PieceChart:
    """One (q, K) integration chart with floatified affine data."""

    q: int
    K: tuple
    r: Fraction                  # residual normalization r_{q,K}
    epsilon: float
    alpha: np.ndarray            # (|V|, d): beta_m = alpha[m] . coords + kappa[m]
    kappa: np.ndarray
    c_box: tuple                 # ((lo, hi), ...) per c axis
    covectors: dict = field(default_factory=dict)

    @property
    def nb(self):
        return len(self.K)

    @property
    def nc(self):
        return len(self.c_box)

    @property
    def outside(self):
        inside = {self.q, *self.K}
        return [m for m in range(self.alpha.shape[0]) if m not in inside]


@dataclass
class FiberSolve:
    t: float
    theta: tuple = None
    newton_tol: float = 1e-12
    newton_max_iter: int = 50
    damping: float = 0.5
    homotopy_steps: int = 32
    homotopy_halvings: int = 8

    def __post_init__(self):
        if not (0 < self.t < 1):
            raise ValidationError("need t in (0, 1)")


@dataclass
class PeriodResult:
    value: complex
    per_piece: dict
    quadrature_error: float
    solver_stats: dict


def default_epsilon(datum: MirrorDatum, P=None) -> float:
    """0.1 x the minimal positive facet distance at vertices, clamped."""
    if P is None:
        _, P, _ = build_delta_lambda(datum)
    gap = float(_min_gap(datum, P))
    return min(max(0.1 * gap, 0.02), 0.3)


def build_charts(datum: MirrorDatum, epsilon: float = None):
    """One chart per (q, K) whose facets share a vertex of Delta_lambda."""
    H, P, report = build_delta_lambda(datum)
    if epsilon is None:
        epsilon = default_epsilon(datum, P)
    d = datum.dim
    nv = datum.nvars
    charts = []
    for q in range(nv):
        others = [m for m in range(nv) if m != q]
        for size in range(0, d):
            for K in itertools.combinations(others, size):
                idx = {q, *K}
                if not any(idx <= act for act in P.incidence):
                    continue
                rows = [[frac(x) for x in datum.V[q]]]
                for k in K:
                    rows.append([frac(a - b) for a, b in zip(datum.V[k], datum.V[q])])
                chosen = linalg.complete_basis(rows, d)
                cov = [[Fraction(int(i == j)) for i in range(d)] for j in chosen]
                M = rows + cov
                detM = linalg.det(M)
                r = 1 / abs(detM)
                Minv = linalg.inverse(M)
                off = [datum.lam[q]] + [datum.lam[k] - datum.lam[q] for k in K] \
                    + [Fraction(0)] * len(cov)
                # beta_m(coords) = V[m] . Minv . (coords - off) + lam_m
                alpha = []
                kappa = []
                for m in range(nv):
                    qm = [frac(x) for x in datum.V[m]]
                    row = [linalg.dot(qm, [Minv[i][j] for i in range(d)])
                           for j in range(d)]
                    alpha.append([float(x) for x in row])
                    kappa.append(float(datum.lam[m] - linalg.dot(row, off)))
                c_box = []
                for j, cv in enumerate(cov):
                    vals = [linalg.dot(cv, v) for v in P.vertices]
                    c_box.append((float(min(vals)), float(max(vals))))
                charts.append(PieceChart(
                    q=q, K=K, r=r, epsilon=float(epsilon),
                    alpha=np.array(alpha), kappa=np.array(kappa),
                    c_box=tuple(c_box),
                    covectors={"a": tuple(datum.V[q]),
                               "b": tuple(tuple(a - b for a, b in zip(datum.V[k], datum.V[q]))
                                          for k in K),
                               "c": tuple(chosen)}))
    return charts


# ---------------------------------------------------------------------------
# Fiber solving (vectorized over sample points)

def _solve_real_batch(chart: PieceChart, pts: np.ndarray, fs: FiberSolve):
    """Real fiber solutions a(b, c) of sum_m t^{beta_m} = 1 at theta = 0.

    pts has shape (nb + nc, N).  Returns (a, converged mask).
    """
    lt = math.log(fs.t)
    a_coef = chart.alpha[:, 0]
    base = chart.alpha[:, 1:] @ pts + chart.kappa[:, None]   # (nv, N)
    nb = chart.nb
    if nb:
        tb = np.exp(lt * pts[:nb])
        a = np.log1p(tb.sum(axis=0)) / (-lt)
    else:
        a = np.zeros(pts.shape[1])

    def G_and_dG(a):
        expo = lt * (np.outer(a_coef, a) + base)
        E = np.exp(np.minimum(expo, _EXP_CLIP))
        G = E.sum(axis=0) - 1.0
        dG = lt * (a_coef[:, None] * E).sum(axis=0)
        return G, dG

    G, dG = G_and_dG(a)
    active = np.abs(G) > fs.newton_tol
    for _ in range(fs.newton_max_iter):
        if not active.any():
            break
        step = np.zeros_like(a)
        safe = active & (np.abs(dG) > 1e-300)
        np.divide(G, dG, out=step, where=safe)
        scale = np.ones_like(a)
        for _damp in range(20):
            a_try = a - scale * step
            G_try, dG_try = G_and_dG(a_try)
            worse = active & (np.abs(G_try) > np.abs(G)) & (np.abs(G) > fs.newton_tol)
            if not worse.any():
                break
            scale[worse] *= fs.damping
        moved = active
        a = np.where(moved, a_try, a)
        G = np.where(moved, G_try, G)
        dG = np.where(moved, dG_try, dG)
        active = np.abs(G) > fs.newton_tol
    return a, np.abs(G) <= fs.newton_tol


def _continue_theta_batch(chart: PieceChart, pts: np.ndarray, a0: np.ndarray,
                          fs: FiberSolve, imag_pts=None, stats=None):
    """Continue the real solutions to the target phases along a straight path.

    Both the coefficient phases and the imaginary coordinate offsets
    `imag_pts` (same shape as pts; the contour-shift of the b/c variables)
    are scaled by the path parameter, so the branch is tracked from the real
    cycle all the way to the shifted contour.
    """
    theta = np.array(fs.theta, dtype=float)
    if not theta.any() and imag_pts is None:
        return a0.astype(complex), np.ones(a0.shape, dtype=bool)
    lt = math.log(fs.t)
    a_coef = chart.alpha[:, 0]
    base_re = chart.alpha[:, 1:] @ pts + chart.kappa[:, None]
    base_im = chart.alpha[:, 1:] @ imag_pts if imag_pts is not None else 0.0

    def newton(a, tau):
        phase = np.exp(1j * tau * theta)[:, None]
        base = base_re + 1j * tau * base_im
        ok = np.zeros(a.shape, dtype=bool)
        for _ in range(fs.newton_max_iter):
            expo = lt * (a_coef[:, None] * a[None, :] + base)
            expo = np.minimum(expo.real, _EXP_CLIP) + 1j * expo.imag
            E = phase * np.exp(expo)
            G = E.sum(axis=0) - 1.0
            ok = np.abs(G) <= fs.newton_tol
            if ok.all():
                break
            dG = lt * (a_coef[:, None] * E).sum(axis=0)
            bad = np.abs(dG) < 1e-300
            dG[bad] = 1.0
            a = np.where(ok, a, a - G / dG)
        return a, ok

    a = a0.astype(complex)
    tau = 0.0
    step = 1.0 / fs.homotopy_steps
    halvings = 0
    while tau < 1.0 - 1e-12:
        target = min(1.0, tau + step)
        a_try, ok = newton(a.copy(), target)
        if ok.all():
            a, tau = a_try, target
            if stats is not None:
                stats["homotopy_steps"] = stats.get("homotopy_steps", 0) + 1
        else:
            halvings += 1
            step /= 2
            if halvings > fs.homotopy_halvings:
                raise HomotopyStuck(
                    f"chart (q={chart.q}, K={chart.K}): {np.count_nonzero(~ok)} "
                    f"points stuck at tau={tau:.4f}")
    return a, np.ones(a.shape, dtype=bool)


def solve_fiber(chart: PieceChart, b, c, fs: FiberSolve) -> complex:
    """Fiber solution at a single (b, c) point, continued to fs.theta."""
    pts = np.array([list(b) + list(c)], dtype=float).T
    a0, ok = _solve_real_batch(chart, pts, fs)
    if not ok.all():
        raise NewtonDiverged(f"real solve failed at b={b}, c={c}")
    a, _ = _continue_theta_batch(chart, pts, a0, fs)
    return complex(a[0])


def _integrand_batch(chart: PieceChart, pts, a, fs: FiberSolve):
    """r (-log t)^n / (w df/dw) at solved fiber points (complex-ready)."""
    lt = math.log(fs.t)
    n = chart.alpha.shape[1] - 1
    a_coef = chart.alpha[:, 0]
    base = chart.alpha[:, 1:] @ pts + chart.kappa[:, None]
    theta = np.array(fs.theta, dtype=float)
    expo = lt * (a_coef[:, None] * a[None, :] + base)
    if np.iscomplexobj(expo):
        expo = np.minimum(expo.real, _EXP_CLIP) + 1j * expo.imag
        E = np.exp(expo)
    else:
        E = np.exp(np.minimum(expo, _EXP_CLIP))
    if theta.any():
        E = np.exp(1j * theta)[:, None] * E
    denom = (a_coef[:, None] * E).sum(axis=0)
    return float(chart.r) * (-lt) ** n / denom


def _axis_imag_shifts(chart: PieceChart, fs: FiberSolve):
    """Rigid imaginary contour shifts per (b, c) axis.

    Dominant monomials k carry b_k -> b_k + i (theta_k - theta_q)/(-log t);
    complement coordinates are shifted only at wall endpoints (see
    _solve_wall_eta), so their rigid part is zero.
    """
    L = -math.log(fs.t)
    th = fs.theta
    return np.array([(th[k] - th[chart.q]) / L for k in chart.K]
                    + [0.0] * chart.nc)


def _solve_wall_eta(chart: PieceChart, outer_vals, s_end, m_idx, fs: FiberSolve,
                    shifts):
    """Imaginary offset of the inner coordinate at a margin wall.

    The wall of the piece cut by monomial m sits on the complexified
    hyperplane Im(beta_m - beta_q) = (theta_m - theta_q)/(-log t); its
    counterpart in the adjacent chart (rigid b_m shift) is at exactly the
    same place, so the pieces glue.  Solved by fixed point in the inner
    imaginary offset, with the branch-tracked a recomputed each round.
    """
    L = -math.log(fs.t)
    th = fs.theta
    ndim = chart.nb + chart.nc
    inner = ndim - 1
    target = (th[m_idx] - th[chart.q]) / L
    alpha_m = chart.alpha[m_idx]
    coef_inner = alpha_m[1 + inner]
    if abs(coef_inner) < 1e-9:
        return shifts[inner]
    rigid = sum(alpha_m[1 + j] * shifts[j] for j in range(ndim) if j != inner)
    eta = (target - (alpha_m[0] - 1.0) * th[chart.q] / L - rigid) / coef_inner
    pts = np.array(list(outer_vals) + [s_end], dtype=float)[:, None]
    a0, ok = _solve_real_batch(chart, pts, fs)
    if not ok.all():
        return eta
    for _ in range(6):
        imag = shifts.copy()
        imag[inner] = eta
        a, _ = _continue_theta_batch(chart, pts, a0, fs, imag_pts=imag[:, None])
        im_beta = ((alpha_m[0] - 1.0) * float(a[0].imag)
                   + float(np.dot(alpha_m[1:], imag)))
        eta += (target - im_beta) / coef_inner
    return eta


def _margins_batch(chart: PieceChart, pts, a_real):
    """min over outside m of beta_m - a - epsilon at the real solution."""
    out = chart.outside
    if not out:
        return np.full(pts.shape[1], np.inf)
    alpha = chart.alpha[out]
    kappa = chart.kappa[out]
    beta = alpha[:, 0][:, None] * a_real[None, :] + alpha[:, 1:] @ pts + kappa[:, None]
    return (beta - a_real[None, :]).min(axis=0) - chart.epsilon


# ---------------------------------------------------------------------------
# Piece integration

def _inner_axis_values(chart, outer_vals, axis_lo, axis_hi, fs, n_scan=65,
                       n_gl=24):
    """Integrate the fiber integrand over the innermost axis.

    outer_vals fixes all other coordinates; the admissible set on the axis
    is located by a sign scan of the margin function plus batched bisection,
    then all intervals share one Gauss-Legendre evaluation.
    """
    def eval_at(svals):
        svals = np.asarray(svals, dtype=float)
        if outer_vals.size:
            pts = np.tile(outer_vals[:, None], (1, len(svals)))
            pts = np.vstack([pts, svals[None, :]])
        else:
            pts = svals[None, :]
        a, ok = _solve_real_batch(chart, pts, fs)
        marg = _margins_batch(chart, pts, a)
        marg[~ok] = -np.inf
        return pts, a, marg

    scan = np.linspace(axis_lo, axis_hi, n_scan)
    _, _, marg = eval_at(scan)
    inside = marg >= 0
    if not inside.any():
        return 0.0 + 0.0j

    flips = np.nonzero(inside[:-1] != inside[1:])[0]
    lows = scan[flips]
    highs = scan[flips + 1]
    low_in = inside[flips]
    for _ in range(35):
        if len(lows) == 0:
            break
        mids = 0.5 * (lows + highs)
        _, _, m = eval_at(mids)
        take_low = (m >= 0) == low_in
        lows = np.where(take_low, mids, lows)
        highs = np.where(take_low, highs, mids)
    edges = list(0.5 * (lows + highs))
    breaks = np.array([axis_lo] + sorted(edges) + [axis_hi])

    mids = 0.5 * (breaks[:-1] + breaks[1:])
    _, _, m = eval_at(mids)
    live = m >= 0
    if not live.any():
        return 0.0 + 0.0j

    theta_on = bool(np.array(fs.theta, dtype=float).any())
    shifts = _axis_imag_shifts(chart, fs) if theta_on else None
    ndim = chart.nb + chart.nc
    edge_set = {round(e, 12) for e in edges}

    def endpoint_eta(s_end):
        """Inner imaginary offset at an interval endpoint."""
        if round(s_end, 12) not in edge_set:
            return shifts[ndim - 1]        # box edge: rigid shift
        pts_e, a_e, _ = eval_at(np.array([s_end]))
        out = chart.outside
        alpha = chart.alpha[out]
        kappa = chart.kappa[out]
        beta = (alpha[:, 0] * a_e[0] + alpha[:, 1:] @ pts_e[:, 0] + kappa)
        m_idx = out[int(np.argmin(beta - a_e[0]))]
        return _solve_wall_eta(chart, outer_vals, s_end, m_idx, fs, shifts)

    # the integrand has boundary layers of width ~ 1/(-log t) at interval
    # ends (there the suppressed monomials reach t^epsilon); refine there
    x0, w0 = gauss_legendre(n_gl)
    scale = 2.5 / (-math.log(fs.t))
    nodes, weights, etas, slopes = [], [], [], []
    for a_, b_, ok in zip(breaks[:-1], breaks[1:], live):
        if not ok:
            continue
        if theta_on:
            eta_lo = endpoint_eta(a_)
            eta_hi = endpoint_eta(b_)
            slope = (eta_hi - eta_lo) / (b_ - a_)
        first = max(min((b_ - a_) / 4, scale), (b_ - a_) / 64)
        edges_q = two_sided_edges(a_, b_, first=first)
        for e0, e1 in zip(edges_q[:-1], edges_q[1:]):
            h = 0.5 * (e1 - e0)
            xs = 0.5 * (e0 + e1) + h * x0
            nodes.append(xs)
            weights.append(h * w0)
            if theta_on:
                etas.append(eta_lo + slope * (xs - a_))
                slopes.append(np.full_like(xs, slope))
    nodes = np.concatenate(nodes)
    weights = np.concatenate(weights)
    pts, a, marg = eval_at(nodes)
    if theta_on:
        etas = np.concatenate(etas)
        slopes = np.concatenate(slopes)
        imag_pts = np.tile(shifts[:, None], (1, len(nodes)))
        imag_pts[ndim - 1] = etas
        ac, _ = _continue_theta_batch(chart, pts, a, fs, imag_pts=imag_pts)
        vals = _integrand_batch(chart, pts + 1j * imag_pts, ac, fs)
        vals = vals * (1.0 + 1j * slopes)
    else:
        vals = _integrand_batch(chart, pts, a, fs)
    vals = np.where(marg >= -1e-12, vals, 0.0)
    return complex(np.dot(weights, vals))


def _inner_axis_batch(chart, outer_nodes, axis_lo, axis_hi, fs, n_scan=49,
                      n_gl=20):
    """Inner-axis integrals for a whole batch of outer values at once.

    outer_nodes has shape (n_outer_axes, M); returns an array of M inner
    integrals.  All scans, bisections and rules are fused into a handful of
    vectorized fiber solves.  theta-free path (phases only reach dimension-1
    pieces).
    """
    M = outer_nodes.shape[1]
    scan = np.linspace(axis_lo, axis_hi, n_scan)

    def eval_at(svals_per_node):
        """svals_per_node: (M, S) inner values; returns margins (M, S)."""
        S = svals_per_node.shape[1]
        pts = np.repeat(outer_nodes, S, axis=1)
        pts = np.vstack([pts, svals_per_node.reshape(-1)[None, :]])
        a, ok = _solve_real_batch(chart, pts, fs)
        marg = _margins_batch(chart, pts, a)
        marg[~ok] = -np.inf
        return pts, a, marg.reshape(M, S)

    _, _, marg = eval_at(np.tile(scan, (M, 1)))
    inside = marg >= 0

    # all transitions across the whole batch, bisected together
    node_idx, cell_idx = np.nonzero(inside[:, :-1] != inside[:, 1:])
    lows = scan[cell_idx]
    highs = scan[cell_idx + 1]
    low_in = inside[node_idx, cell_idx]
    for _ in range(30):
        if len(lows) == 0:
            break
        mids = 0.5 * (lows + highs)
        pts = np.vstack([outer_nodes[:, node_idx], mids[None, :]])
        a, ok = _solve_real_batch(chart, pts, fs)
        mg = _margins_batch(chart, pts, a)
        mg[~ok] = -np.inf
        take_low = (mg >= 0) == low_in
        lows = np.where(take_low, mids, lows)
        highs = np.where(take_low, highs, mids)
    cuts = 0.5 * (lows + highs)

    # per outer node: interval breakpoints and composite GL nodes
    x0, w0 = gauss_legendre(n_gl)
    scale = 2.5 / (-math.log(fs.t))
    all_nodes, all_weights, owner = [], [], []
    probe_mids, probe_owner, probe_span = [], [], []
    for i in range(M):
        edges = sorted(cuts[node_idx == i])
        breaks = [axis_lo] + edges + [axis_hi]
        for a_, b_ in zip(breaks[:-1], breaks[1:]):
            if b_ - a_ < 1e-14:
                continue
            probe_mids.append(0.5 * (a_ + b_))
            probe_owner.append(i)
            probe_span.append((a_, b_))
    if not probe_mids:
        return np.zeros(M, dtype=complex)
    pm = np.array(probe_mids)
    po = np.array(probe_owner)
    pts = np.vstack([outer_nodes[:, po], pm[None, :]])
    a, ok = _solve_real_batch(chart, pts, fs)
    mg = _margins_batch(chart, pts, a)
    mg[~ok] = -np.inf
    for j in np.nonzero(mg >= 0)[0]:
        a_, b_ = probe_span[j]
        first = max(min((b_ - a_) / 4, scale), (b_ - a_) / 64)
        for e0, e1 in zip(*(lambda e: (e[:-1], e[1:]))(two_sided_edges(a_, b_, first))):
            h = 0.5 * (e1 - e0)
            all_nodes.append(0.5 * (e0 + e1) + h * x0)
            all_weights.append(h * w0)
            owner.extend([probe_owner[j]] * n_gl)
    if not all_nodes:
        return np.zeros(M, dtype=complex)
    nodes = np.concatenate(all_nodes)
    weights = np.concatenate(all_weights)
    owner = np.array(owner)
    pts = np.vstack([outer_nodes[:, owner], nodes[None, :]])
    a, ok = _solve_real_batch(chart, pts, fs)
    mg = _margins_batch(chart, pts, a)
    vals = _integrand_batch(chart, pts, a, fs)
    vals = np.where(ok & (mg >= -1e-12), vals, 0.0)
    out = np.zeros(M, dtype=complex)
    np.add.at(out, owner, weights * vals)
    return out


def _integrate_nested(chart, fs, quad, stats):
    """Nested rule for pieces of total dimension 1 or 2."""
    axes = [(0.0, chart.epsilon)] * chart.nb + list(chart.c_box)
    ndim = len(axes)
    if ndim == 1:
        lo, hi = axes[0]
        val = _inner_axis_values(chart, np.zeros((0,)), lo, hi, fs)
        val2 = _inner_axis_values(chart, np.zeros((0,)), lo, hi, fs, n_gl=16)
        return val, abs(val - val2)
    # ndim == 2: adaptive panels on the outer axis, inner axis as above
    (olo, ohi), (ilo, ihi) = axes

    def panel(a, b, n):
        x, w = gauss_legendre(n)
        h = 0.5 * (b - a)
        inner = _inner_axis_batch(chart, (a + h * (x + 1.0))[None, :], ilo, ihi, fs)
        return complex(np.dot(h * w, inner))

    scale = 2.5 / (-math.log(fs.t))
    first = max(min((ohi - olo) / 4, scale), (ohi - olo) / 64)
    edges = two_sided_edges(olo, ohi, first=first)
    seeds = [(a, b) for a, b in zip(edges[:-1], edges[1:])]
    rough = sum(panel(a, b, 6) for a, b in seeds)
    tol = max(quad.abs_tol, quad.rel_tol * abs(rough), 1e-10)
    total = 0.0 + 0.0j
    err = 0.0
    stack = [(a, b, 0) for a, b in seeds]
    while stack:
        a, b, depth = stack.pop()
        coarse = panel(a, b, 8)
        fine = panel(a, b, 16)
        delta = abs(fine - coarse)
        if delta <= tol * max((b - a) / (ohi - olo), 0.05) or depth >= 7:
            total += fine
            err += delta
        else:
            mid = 0.5 * (a + b)
            stack.append((a, mid, depth + 1))
            stack.append((mid, b, depth + 1))
    return total, err


def _integrate_qmc(chart, fs, quad, stats):
    """Sobol indicator rule for pieces of dimension >= 3."""
    if np.array(fs.theta, dtype=float).any():
        raise ValidationError(
            "phase-shifted periods need charts with at most one complement "
            "coordinate; this piece is integrated by QMC")
    axes = [(0.0, chart.epsilon)] * chart.nb + list(chart.c_box)
    ndim = len(axes)
    n = 1 << 14
    u = sobol_points(ndim, n, quad.seed)
    lo = np.array([a for a, _ in axes])
    hi = np.array([b for _, b in axes])
    pts = (lo[None, :] + u * (hi - lo)[None, :]).T     # (ndim, N)
    vol = float(np.prod(hi - lo))
    a, ok = _solve_real_batch(chart, pts, fs)
    marg = _margins_batch(chart, pts, a)
    inside = ok & (marg >= 0)
    stats["solves"] = stats.get("solves", 0) + n
    stats["failures"] = stats.get("failures", 0) + int(np.count_nonzero(~ok))
    if not inside.any():
        return 0.0 + 0.0j, 0.0
    idx = np.nonzero(inside)[0]
    if np.array(fs.theta, dtype=float).any():
        ac, _ = _continue_theta_batch(chart, pts[:, idx], a[idx], fs)
    else:
        ac = a[idx]
    vals = np.zeros(n, dtype=complex)
    vals[idx] = _integrand_batch(chart, pts[:, idx], ac, fs)
    total = vol * complex(vals.mean())
    half = vol * complex(vals[: n // 2].mean())
    return total, abs(total - half)


def integrate_piece(chart: PieceChart, fs: FiberSolve,
                    quad: QuadratureSpec = None, stats=None):
    """Integral of the exact pulled-back volume form over one piece."""
    quad = quad or DEFAULT_SPEC
    stats = stats if stats is not None else {}
    ndim = chart.nb + chart.nc
    if ndim <= 2:
        return _integrate_nested(chart, fs, quad, stats)
    return _integrate_qmc(chart, fs, quad, stats)


def period(datum: MirrorDatum, t: float, theta=None,
           quad: QuadratureSpec = None, epsilon: float = None) -> PeriodResult:
    """Full period: sum of the piece integrals over all (q, K) charts."""
    quad = quad or DEFAULT_SPEC
    theta = tuple(theta) if theta is not None else datum.theta
    if len(theta) != datum.nvars:
        raise ValidationError("theta length must match |V|")
    charts = build_charts(datum, epsilon)
    if any(abs(x) > 0 for x in theta) and any(c.nc >= 2 for c in charts):
        raise ValidationError(
            "phase-shifted periods are implemented for charts with at most "
            "one complement coordinate (all n = 1 data); use theta = 0 here")
    fs = FiberSolve(t=t, theta=theta)
    per_piece = {}
    stats = {}
    total = 0.0 + 0.0j
    err = 0.0
    for chart in charts:
        try:
            val, piece_err = integrate_piece(chart, fs, quad, stats)
        except (NewtonDiverged, HomotopyStuck) as exc:
            raise type(exc)(f"piece (q={chart.q}, K={chart.K}): {exc}") from exc
        per_piece[(chart.q, chart.K)] = val
        total += val
        err += piece_err
    return PeriodResult(value=total, per_piece=per_piece,
                        quadrature_error=err, solver_stats=stats)


# ---------------------------------------------------------------------------
# Independent 1D oracle: arc-length integration of the whole curve

def period_arc(datum: MirrorDatum, t: float, npts: int = 4096) -> float:
    """Undecomposed period for n = 1 by angular parametrization of B_t.

    Independent of the chart machinery: traces the closed curve
    sum_q t^{beta_q} = 1 by bisection along rays from an interior point and
    integrates (log t)^2 / |grad F| with respect to arc length.
    """
    if datum.dim != 2:
        raise ValidationError("arc oracle is for dim == 2 only")
    _, P, _ = build_delta_lambda(datum)
    x0 = np.array([[float(sum(v[i] for v in P.vertices)) / len(P.vertices)]
                   for i in range(2)]).ravel()
    lt = math.log(t)
    V = np.array([[float(x) for x in q] for q in datum.V])     # (nv, 2)
    lam = np.array([float(x) for x in datum.lam])

    def F_and_grad(pts):
        beta = pts @ V.T + lam[None, :]
        E = np.exp(np.minimum(lt * beta, _EXP_CLIP))
        F = E.sum(axis=1) - 1.0
        grad = lt * (E @ V)
        return F, grad

    phis = np.linspace(0.0, 2 * math.pi, npts, endpoint=False)
    u = np.stack([np.cos(phis), np.sin(phis)], axis=1)
    lo = np.zeros(npts)
    hi = np.full(npts, 1.0)
    # bracket: expand hi until F > 0
    for _ in range(60):
        F, _ = F_and_grad(x0[None, :] + hi[:, None] * u)
        mask = F <= 0
        if not mask.any():
            break
        hi[mask] *= 1.5
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        F, _ = F_and_grad(x0[None, :] + mid[:, None] * u)
        pos = F > 0
        hi = np.where(pos, mid, hi)
        lo = np.where(pos, lo, mid)
    rho = 0.5 * (lo + hi)
    pts = x0[None, :] + rho[:, None] * u
    F, grad = F_and_grad(pts)
    uperp = np.stack([-u[:, 1], u[:, 0]], axis=1)
    gu = (grad * u).sum(axis=1)
    gup = (grad * uperp).sum(axis=1)
    rho_prime = -rho * gup / gu
    speed = np.sqrt(rho_prime ** 2 + rho ** 2)
    gnorm = np.linalg.norm(grad, axis=1)
    vals = lt ** 2 * speed / gnorm
    return float(vals.mean() * 2 * math.pi)


# ---------------------------------------------------------------------------
# LHS vs RHS comparison

@dataclass
class AsymptoticsReport:
    rows: list                # dicts: t, lhs, rhs, defect
    eps_hat: float
    monotone: bool
    at_floor: bool
    success: bool


def fit_asymptotics(datum: MirrorDatum, t_list, theta=None,
                    quad: QuadratureSpec = None, table=None,
                    epsilon: float = None) -> AsymptoticsReport:
    """Defect |LHS - RHS| across a decreasing t-list and its fitted decay rate."""
    from .gamma import evaluate_on_X, gamma_class
    from .lattice import intersection_table

    if len(t_list) < 2:
        raise ValidationError("need at least two t values")
    t_list = sorted(float(t) for t in t_list)[::-1]
    quad = quad or DEFAULT_SPEC
    theta = tuple(theta) if theta is not None else datum.theta
    if table is None:
        table = intersection_table(datum)
    gklass = gamma_class(datum.nvars, datum.dim)
    rows = []
    for t in t_list:
        lhs = period(datum, t, theta, quad, epsilon=epsilon)
        rhs = evaluate_on_X(gklass, table, datum, math.log(t), theta)
        rows.append({"t": t, "lhs": lhs.value, "rhs": rhs,
                     "defect": abs(lhs.value - rhs),
                     "quadrature_error": lhs.quadrature_error})
    floor = 10 * max(r["quadrature_error"] for r in rows)
    at_floor = any(r["defect"] <= floor for r in rows)
    xs = np.log([r["t"] for r in rows])
    ys = np.log([max(r["defect"], 1e-300) for r in rows])
    eps_hat = float(np.polyfit(xs, ys, 1)[0])
    defects = [r["defect"] for r in rows]
    monotone = all(a >= b for a, b in zip(defects[:-1], defects[1:]))
    return AsymptoticsReport(rows=rows, eps_hat=eps_hat, monotone=monotone,
                             at_floor=at_floor,
                             success=(eps_hat > 0 and (monotone or at_floor)))
