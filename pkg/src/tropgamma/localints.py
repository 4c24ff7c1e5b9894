"""Local period integrals and tropicalization-defect integrals.

The kernel is the alternating-log function

    g_l(X_1..X_k) = sum_{K subset {1..k}} (-1)^|K| log(1 + sum_{j in K} X_j)^l,

which vanishes to first order along every coordinate hyperplane, so the
moments

    I_{l;m} = int_{[0,oo)^k} prod s_j^{m_j} g_l(e^{-s}) ds

converge with exponentially decaying tails.  The 2D defect integrals and
the 1D collision models reduce to the same machinery after rescaling by
-log t.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (NonTransverseBoundary, QuadratureNotConverged,
                     ValidationError)
from .quadrature import (DEFAULT_SPEC, QuadratureSpec, composite_gl,
                         gauss_legendre, line_rule, panel_edges, sobol_points,
                         tensor_rule)
from .series import ISymbol, ZetaPoly


# ---------------------------------------------------------------------------
# The kernel

def eval_g(ell: int, X) -> float:
    """g_l at a single point, with compensated summation.

    When the alternating sum cancels more than ~1e6-fold the value is
    recomputed in extended precision; the integrators use the vectorized
    path where plain doubles keep the absolute error below tolerance.
    """
    if ell == 0:
        return 0.0
    X = [float(x) for x in X]
    if any(x < 0 for x in X):
        raise ValidationError("g_l needs nonnegative arguments")
    terms = []
    for K in itertools.chain.from_iterable(
            itertools.combinations(range(len(X)), r) for r in range(len(X) + 1)):
        s = sum(X[j] for j in K)
        terms.append((-1) ** len(K) * math.log1p(s) ** ell)
    val = math.fsum(terms)
    peak = max(abs(t) for t in terms)
    if val != 0 and peak > 1e6 * abs(val):
        import mpmath

        with mpmath.workdps(40):
            acc = mpmath.mpf(0)
            for K in itertools.chain.from_iterable(
                    itertools.combinations(range(len(X)), r)
                    for r in range(len(X) + 1)):
                s = mpmath.fsum(mpmath.mpf(X[j]) for j in K)
                acc += (-1) ** len(K) * mpmath.log1p(s) ** ell
            val = float(acc)
    return val


def _g_array(ell: int, X: np.ndarray) -> np.ndarray:
    """Vectorized g_l; X has shape (k, N)."""
    k = X.shape[0]
    out = np.zeros(X.shape[1])
    for K in itertools.chain.from_iterable(
            itertools.combinations(range(k), r) for r in range(k + 1)):
        if not K:
            continue  # log(1)^l = 0
        s = X[list(K)].sum(axis=0)
        out += (-1) ** len(K) * np.log1p(s) ** ell
    return out


# ---------------------------------------------------------------------------
# Closed forms

def I_known(ell: int, m):
    """Tabulated closed form of I_{l;m} as a ZetaPoly, or None."""
    m = tuple(sorted((int(x) for x in m), reverse=True))
    if ell == 1 and len(m) == 1:
        mm = m[0]
        # -m! (1 - 2^{-(m+1)}) zeta(m+2)
        return ZetaPoly.zeta(mm + 2, -Fraction(math.factorial(mm))
                             * (1 - Fraction(1, 2 ** (mm + 1))))
    table = {
        (2, (0,)): ZetaPoly.zeta(3, Fraction(-1, 4)),
        (1, (0, 0)): ZetaPoly.zeta(3, Fraction(-5, 12)),
        (2, (2,)): ZetaPoly.zeta(5, Fraction(29, 8))
        + ZetaPoly({(0, (3, 2)): Fraction(-2)}),
        (2, (4,)): ZetaPoly.zeta(7, Fraction(753, 8))
        + ZetaPoly({(0, (4, 3)): Fraction(-42)})
        + ZetaPoly({(0, (5, 2)): Fraction(-24)}),
    }
    return table.get((ell, m))


# ---------------------------------------------------------------------------
# Numeric local integrals

def I_numeric(ell: int, m, spec: QuadratureSpec = None, with_error=False):
    """I_{l;m} by quadrature; tensor GL (dim<=2), Genz-Malik (dim 3),
    Sobol QMC (dim 4..5).  Returns the value, or (value, error_estimate)."""
    spec = spec or DEFAULT_SPEC
    m = tuple(sorted((int(x) for x in m), reverse=True))
    k = len(m)
    if ell < 1 or k < 1:
        raise ValidationError("need ell >= 1 and dim(m) >= 1")
    S = spec.cutoff

    def integrand(pts):
        # pts shape (N, k)
        vals = _g_array(ell, np.exp(-pts.T))
        for j in range(k):
            if m[j]:
                vals = vals * pts[:, j] ** m[j]
        return vals

    scheme = spec.scheme
    if scheme == "auto":
        scheme = "gauss" if k <= 2 else ("adaptive" if k == 3 else "qmc")
    if scheme == "gauss" and k > 3:
        scheme = "qmc"

    if scheme == "gauss" or (scheme == "adaptive" and k <= 2):
        edges = panel_edges(0.0, S)

        def run(n):
            axes = [composite_gl(edges, n)] * k
            pts, w = tensor_rule(axes)
            return float(np.dot(w, integrand(pts)))

        coarse, fine = run(16), run(24)
        val, err = fine, abs(fine - coarse)
    elif scheme == "adaptive":
        from scipy.integrate import cubature

        res = cubature(integrand, [0.0] * k, [S] * k, rule="genz-malik",
                       rtol=spec.rel_tol, atol=spec.abs_tol,
                       max_subdivisions=2000)
        val, err = float(res.estimate), float(res.error)
    else:  # qmc
        if k > 5:
            raise ValidationError("QMC path supports dim(m) <= 5")
        n = 1 << 16
        u = sobol_points(k, n, spec.seed)
        u = np.clip(u, math.exp(-S), 1.0)
        s = -np.log(u)
        lam = np.prod(u, axis=1)
        good = lam > 1e-30
        vals = np.zeros(n)
        # integrand * du/ds jacobian: g(u)/prod(u) stays bounded
        vals[good] = _g_array(ell, u[good].T) / lam[good]
        for j in range(k):
            if m[j]:
                vals = vals * s[:, j] ** m[j]
        half = float(np.mean(vals[: n // 2]))
        val = float(np.mean(vals))
        err = abs(val - half) + 1e-12
    tol = max(spec.abs_tol, spec.rel_tol * abs(val)) * 100
    if err > tol and scheme != "qmc":
        raise QuadratureNotConverged(f"I[{ell};{m}]", val, err, tol)
    return (val, err) if with_error else val


def make_iprovider(spec: QuadratureSpec = None, prefer_known=True):
    """ISymbol -> float, using closed forms where tabulated."""
    spec = spec or DEFAULT_SPEC
    cache = {}

    def provider(sym: ISymbol) -> float:
        if sym not in cache:
            closed = I_known(sym.ell, sym.m) if prefer_known else None
            cache[sym] = closed.to_float() if closed is not None \
                else I_numeric(sym.ell, sym.m, spec)
        return cache[sym]

    return provider


def zeta_via_boundary(n: int, spec: QuadratureSpec = None) -> float:
    """zeta(n) = 1/(n-1)! int (log(1+e^s))^{n-1} - max(0,s)^{n-1} ds."""
    spec = spec or DEFAULT_SPEC
    if n < 2:
        raise ValidationError("need n >= 2")
    S = spec.cutoff

    def f(s):
        # stable: log(1+e^s) = max(0,s) + log1p(e^{-|s|})
        mx = np.maximum(s, 0.0)
        soft = mx + np.log1p(np.exp(-np.abs(s)))
        return soft ** (n - 1) - mx ** (n - 1)

    def run(npts):
        x, w = line_rule(-S, S, n=npts, breaks=(0.0,))
        return float(np.dot(w, f(x)))

    coarse, fine = run(16), run(24)
    err = abs(fine - coarse)
    val = fine / math.factorial(n - 1)
    err /= math.factorial(n - 1)
    tol = max(spec.abs_tol, spec.rel_tol * abs(val)) * 100
    if err > tol:
        raise QuadratureNotConverged(f"zeta({n}) boundary", val, err, tol)
    return val


# ---------------------------------------------------------------------------
# 2D tropicalization defect

@dataclass(frozen=True)
class PolygonRegion:
    """Closed simple polygon in the (b1, b2)-plane, listed once around."""

    vertices: tuple

    def __post_init__(self):
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 3:
            raise ValidationError("polygon needs >= 3 vertices")
        if _self_intersects(verts):
            raise ValidationError("polygon is self-intersecting")

    def signed_area(self):
        v = self.vertices
        return 0.5 * sum(v[i][0] * v[(i + 1) % len(v)][1]
                         - v[(i + 1) % len(v)][0] * v[i][1]
                         for i in range(len(v)))

    def contains(self, x, y):
        v = self.vertices
        inside = False
        for i in range(len(v)):
            (x1, y1), (x2, y2) = v[i], v[(i + 1) % len(v)]
            if (y1 > y) != (y2 > y):
                t = (y - y1) / (y2 - y1)
                if x < x1 + t * (x2 - x1):
                    inside = not inside
        return inside

    def scaled(self, factor):
        return PolygonRegion(tuple((factor * x, factor * y)
                                   for x, y in self.vertices))


def _segments_cross(p1, p2, p3, p4):
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(p3, p4, p1), orient(p3, p4, p2)
    d3, d4 = orient(p1, p2, p3), orient(p1, p2, p4)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))


def _self_intersects(verts):
    n = len(verts)
    for i in range(n):
        for j in range(i + 1, n):
            if abs(i - j) in (0, 1) or (i == 0 and j == n - 1):
                continue
            if _segments_cross(verts[i], verts[(i + 1) % n],
                               verts[j], verts[(j + 1) % n]):
                return True
    return False


_LEG_DIRS = ((-1.0, 0.0), (0.0, -1.0), (1.0, 1.0))  # primitive leg directions


def _dist_to_tropical_line(x, y):
    """Euclidean distance to Sing(max(0, b1, b2))."""
    best = math.inf
    for ux, uy in _LEG_DIRS:
        nrm2 = ux * ux + uy * uy
        t = max(0.0, (x * ux + y * uy) / nrm2)
        best = min(best, math.hypot(x - t * ux, y - t * uy))
    return best


def affine_length(region: PolygonRegion) -> float:
    """Lattice-affine length of the tropical line inside the region.

    Each leg direction is primitive, so the affine length along a leg is the
    primitive-parameter extent; on the diagonal leg this is 1/sqrt(2) times
    the Euclidean length.
    """
    total = 0.0
    tmax = 3.0 * max(abs(c) for v in region.vertices for c in v) + 1.0
    verts = region.vertices
    n = len(verts)
    for ux, uy in _LEG_DIRS:
        taus = {0.0, tmax}
        for i in range(n):
            (x1, y1), (x2, y2) = verts[i], verts[(i + 1) % n]
            ex, ey = x2 - x1, y2 - y1
            det = ex * uy - ey * ux
            if abs(det) < 1e-14:
                continue
            # x1 + s e = tau u
            s = (x1 * uy - y1 * ux) / -det
            tau = (x1 * ey - y1 * ex) / -det
            if -1e-12 <= s <= 1 + 1e-12 and tau > 1e-12:
                taus.add(tau)
        taus = sorted(taus)
        for a, b in zip(taus[:-1], taus[1:]):
            if b - a < 1e-12:
                continue
            mid = 0.5 * (a + b)
            if region.contains(mid * ux, mid * uy):
                total += b - a
    return total


def _defect_integrand(pts):
    x, y = pts[:, 0], pts[:, 1]
    mx = np.maximum(0.0, np.maximum(x, y))
    return np.log(np.exp(-mx) + np.exp(x - mx) + np.exp(y - mx))


def _triangulate_polygon(verts):
    """Ear clipping; returns triangles as coordinate triples (CCW input)."""
    verts = list(verts)
    if len(verts) == 3:
        return [tuple(verts)]
    area2 = sum(verts[i][0] * verts[(i + 1) % len(verts)][1]
                - verts[(i + 1) % len(verts)][0] * verts[i][1]
                for i in range(len(verts)))
    if area2 < 0:
        verts.reverse()
    tris = []
    idx = list(range(len(verts)))
    guard = 0
    while len(idx) > 3 and guard < 10000:
        guard += 1
        n = len(idx)
        for pos in range(n):
            i0, i1, i2 = idx[pos - 1], idx[pos], idx[(pos + 1) % n]
            a, b, c = verts[i0], verts[i1], verts[i2]
            cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if cross <= 1e-14:
                continue
            ok = True
            for j in idx:
                if j in (i0, i1, i2):
                    continue
                if _point_in_triangle(verts[j], a, b, c):
                    ok = False
                    break
            if ok:
                tris.append((a, b, c))
                idx.pop(pos)
                break
        else:
            break
    if len(idx) == 3:
        tris.append(tuple(verts[i] for i in idx))
    else:  # emergency fan; only reachable on degenerate input
        for i in range(1, len(idx) - 1):
            tris.append((verts[idx[0]], verts[idx[i]], verts[idx[i + 1]]))
    return tris


def _point_in_triangle(p, a, b, c):
    def s(u, v, w):
        return (v[0] - u[0]) * (w[1] - u[1]) - (v[1] - u[1]) * (w[0] - u[0])

    d1, d2, d3 = s(a, b, p), s(b, c, p), s(c, a, p)
    neg = (d1 < 0) or (d2 < 0) or (d3 < 0)
    pos = (d1 > 0) or (d2 > 0) or (d3 > 0)
    return not (neg and pos)


def _clip_convex(poly, a, b, c, side):
    """Clip a convex polygon against side*(a x + b y + c) >= 0."""
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        fp = side * (a * p[0] + b * p[1] + c)
        fq = side * (a * q[0] + b * q[1] + c)
        if fp >= 0:
            out.append(p)
        if (fp > 0) != (fq > 0) and fp != fq:
            t = fp / (fp - fq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return [p for i, p in enumerate(out)
            if math.hypot(p[0] - out[i - 1][0], p[1] - out[i - 1][1]) > 1e-12]


def _tri_rule(n=8):
    x, w = gauss_legendre(n)
    xi = 0.5 * (x + 1.0)
    wi = 0.5 * w
    P, W = [], []
    for i in range(n):
        for j in range(n):
            P.append((xi[i], xi[j]))
            W.append(wi[i] * wi[j] * 2.0 * xi[i])  # Duffy jacobian 2*Area*xi
    return np.array(P), np.array(W)


_TRI_PTS, _TRI_W = None, None


def _tri_integrate(f, tris):
    """Batched Duffy-GL rule: one integrand call for all triangles."""
    global _TRI_PTS, _TRI_W
    if _TRI_PTS is None:
        _TRI_PTS, _TRI_W = _tri_rule(8)
    if not tris:
        return np.zeros(0)
    A = np.array([t[0] for t in tris])                    # (T, 2)
    B = np.array([t[1] for t in tris])
    C = np.array([t[2] for t in tris])
    e1 = B - A
    e2 = C - B
    xi, eta = _TRI_PTS[:, 0], _TRI_PTS[:, 1]
    pts = (A[:, None, :] + xi[None, :, None] * e1[:, None, :]
           + (xi * eta)[None, :, None] * e2[:, None, :])   # (T, P, 2)
    area = 0.5 * np.abs(e1[:, 0] * (C[:, 1] - A[:, 1])
                        - e1[:, 1] * (C[:, 0] - A[:, 0]))
    vals = f(pts.reshape(-1, 2)).reshape(len(tris), -1)
    return (vals @ _TRI_W) * area


def _adaptive_polygon_integral(f, polygon_verts, abs_tol, max_diam=25.0,
                               max_depth=16):
    """Adaptive triangle subdivision of a polygon integral.

    Triangles are pre-split along the creases of max(0,x,y) (the integrand
    is analytic between them) and refined until the 1-vs-4 Duffy estimates
    agree within the per-area tolerance budget.
    """
    tris = []
    for t in _triangulate_polygon(polygon_verts):
        pieces = [list(t)]
        for (a, b, c) in ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (1.0, -1.0, 0.0)):
            nxt = []
            for poly in pieces:
                lo = _clip_convex(poly, a, b, c, +1)
                hi = _clip_convex(poly, a, b, c, -1)
                nxt.extend(p for p in (lo, hi) if len(p) >= 3)
            pieces = nxt
        for poly in pieces:
            for i in range(1, len(poly) - 1):
                tris.append((poly[0], poly[i], poly[i + 1]))

    def diam(t):
        (ax, ay), (bx, by), (cx, cy) = t
        return max(math.hypot(ax - bx, ay - by), math.hypot(bx - cx, by - cy),
                   math.hypot(cx - ax, cy - ay))

    def split(t):
        (a, b, c) = t
        ab = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
        bc = ((b[0] + c[0]) / 2, (b[1] + c[1]) / 2)
        ca = ((c[0] + a[0]) / 2, (c[1] + a[1]) / 2)
        return [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]

    work = []
    for t in tris:
        stack = [t]
        while stack:
            s = stack.pop()
            if diam(s) > max_diam:
                stack.extend(split(s))
            else:
                work.append(s)

    total_area = sum(0.5 * abs((b[0] - a[0]) * (c[1] - a[1])
                               - (b[1] - a[1]) * (c[0] - a[0]))
                     for a, b, c in work) or 1.0
    total = 0.0
    queue = [(t, 0) for t in work]
    while queue:
        batch = queue
        queue = []
        coarse = _tri_integrate(f, [t for t, _ in batch])
        children = [split(t) for t, _ in batch]
        flat = [c for group in children for c in group]
        fine = _tri_integrate(f, flat)
        for i, (t, depth) in enumerate(batch):
            fine_sum = float(fine[4 * i: 4 * i + 4].sum())
            area = 0.5 * abs((t[1][0] - t[0][0]) * (t[2][1] - t[0][1])
                             - (t[1][1] - t[0][1]) * (t[2][0] - t[0][0]))
            tol_t = abs_tol * max(area / total_area, 1e-6)
            if abs(fine_sum - coarse[i]) <= tol_t or depth >= max_depth:
                total += fine_sum
            else:
                queue.extend((c, depth + 1) for c in children[i])
    return total


@dataclass
class TropDefectResult:
    value: float
    length_coeff: float
    constant: float
    affine_len: float
    t_pair: tuple


def trop_defect_2d(region: PolygonRegion, t: float,
                   spec: QuadratureSpec = None, transverse_margin=0.5,
                   t_pair=(1e-3, 1e-5)) -> TropDefectResult:
    """Scaled tropicalization defect over a polygon, with its asymptotic split.

    value = (-log t)^3 int_V (-log_t(1 + t^{-b1} + t^{-b2}) - max(0,b1,b2));
    after s = (-log t) b this is the defect integral over the scaled polygon.
    The decomposition solves value(t_i) = coeff * (-log t_i) + constant at
    the two t_pair values; for a transverse region coeff -> zeta(2) * L.

    A polygon vertex within `transverse_margin` of the tropical line flags a
    non-transverse boundary; pass 0 to allow kinked regions deliberately.
    """
    spec = spec or DEFAULT_SPEC
    if not (0 < t <= 0.1):
        raise ValidationError("need t in (0, 0.1]")
    if transverse_margin > 0:
        for (x, y) in region.vertices:
            if _dist_to_tropical_line(x, y) < transverse_margin:
                raise NonTransverseBoundary(
                    f"vertex ({x}, {y}) is within {transverse_margin} of the tropical line")

    def value_at(tv):
        L = -math.log(tv)
        scaled = region.scaled(L)
        return _adaptive_polygon_integral(_defect_integrand, scaled.vertices,
                                          abs_tol=spec.abs_tol * 10 + 1e-7)

    value = value_at(t)
    v1, v2 = value_at(t_pair[0]), value_at(t_pair[1])
    L1, L2 = -math.log(t_pair[0]), -math.log(t_pair[1])
    coeff = (v2 - v1) / (L2 - L1)
    constant = v1 - coeff * L1
    return TropDefectResult(value=value, length_coeff=coeff, constant=constant,
                            affine_len=affine_length(region), t_pair=t_pair)


# ---------------------------------------------------------------------------
# 1D collision / conifold models

def conifold_closed_form(c: float) -> float:
    """arcsin^2(c/2) - pi arcsin(c/2) - pi^2/12."""
    a = math.asin(c / 2.0)
    return a * a - math.pi * a - math.pi ** 2 / 12.0


def collision_model(kind: str, params: dict, t: float,
                    spec: QuadratureSpec = None) -> float:
    """1D local models: value = (-log t)^2 int (tropical - smooth) db.

    two_sided: f_a(b) = max(-b, a, b) against log_t(t^b + t^{-a} + t^{-b});
    slope:     max(0, k b) against log_t(1 + t^{-kb});
    conifold:  a = 0 with middle coefficient c in [-2, 2].
    After s = (-log t) b everything is a fixed integral over [-LB, LB].
    """
    spec = spec or DEFAULT_SPEC
    if not (0 < t <= 0.1):
        raise ValidationError("need t in (0, 0.1]")
    L = -math.log(t)
    B = float(params.get("B", 10.0))
    S = L * B

    if kind == "two_sided":
        alpha = L * float(params["a"])

        def f(s):
            trop = np.maximum(np.maximum(-s, s), alpha)
            m = np.maximum(np.abs(s), alpha)
            smooth = m + np.log(np.exp(-s - m) + np.exp(alpha - m) + np.exp(s - m))
            return trop - smooth

        breaks = (-abs(alpha), 0.0, abs(alpha))
    elif kind == "slope":
        kk = float(params["k"])

        def f(s):
            ks = kk * s
            trop = np.maximum(0.0, ks)
            smooth = trop + np.log1p(np.exp(-np.abs(ks)))
            return trop - smooth

        breaks = (0.0,)
    elif kind == "conifold":
        c = float(params["c"])
        if abs(c) > 2:
            raise ValidationError("conifold needs |c| <= 2")

        def f(s):
            trop = np.abs(s)
            m = np.abs(s)
            inner = np.exp(-s - m) + np.exp(s - m)
            if c:
                inner = inner + c * np.exp(-m)
            return trop - (m + np.log(inner))

        breaks = (0.0,)
    else:
        raise ValidationError(f"unknown collision kind {kind!r}")

    def run(n):
        x, w = line_rule(-S, S, n=n, breaks=breaks)
        return float(np.dot(w, f(x)))

    coarse, fine = run(16), run(24)
    err = abs(fine - coarse)
    tol = max(spec.abs_tol, spec.rel_tol * abs(fine)) * 100 + 1e-9
    if err > tol:
        raise QuadratureNotConverged(f"collision {kind}", fine, err, tol)
    return fine
