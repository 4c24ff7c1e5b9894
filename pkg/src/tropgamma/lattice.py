"""Exact rational polyhedral geometry for mirror data.

A mirror datum is a finite set V of integer covectors with positive
rational weights lambda.  The polytope

    Delta_lambda = { p : <q, p> + lambda_q >= 0  for all q in V }

drives everything downstream: its faces, measured with the residual
(lattice-normalized) volume form, encode toric intersection numbers via
the Duistermaat-Heckman polynomial.  All geometry here is exact over the
rationals; floats never enter.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from . import linalg
from .errors import (ChamberCrossed, DegenerateWeight, EmptyPolytope,
                     FacetsDisjoint, NotSimplicial, OriginNotInterior,
                     UnboundedPolytope, ValidationError)
from .linalg import frac


@dataclass(frozen=True)
class MirrorDatum:
    """Lattice points V with positive weights lambda and optional phases."""

    dim: int
    V: tuple
    lam: tuple
    theta: tuple = None

    def __post_init__(self):
        d = self.dim
        V = tuple(tuple(int(x) for x in q) for q in self.V)
        lam = tuple(frac(x) for x in self.lam)
        theta = self.theta
        if theta is None:
            theta = (0.0,) * len(V)
        theta = tuple(float(x) for x in theta)
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "theta", theta)
        if d < 2:
            raise ValidationError("dim must be >= 2")
        if any(len(q) != d for q in V):
            raise ValidationError("all lattice vectors must have length dim")
        if len(set(V)) != len(V):
            raise ValidationError("lattice vectors must be distinct")
        if len(V) < d + 1:
            raise ValidationError("need at least dim+1 lattice vectors")
        if len(lam) != len(V) or len(theta) != len(V):
            raise ValidationError("lambda/theta length must match V")
        if any(l <= 0 for l in lam):
            raise ValidationError("all weights must be positive")
        if _recession_direction([[frac(x) for x in q] for q in V]) is not None:
            raise ValidationError("0 is not interior to conv(V); Delta_lambda unbounded")

    @property
    def nvars(self):
        return len(self.V)

    def fingerprint(self):
        """Canonical hash of (V, lambda) with denominators cleared."""
        lcm = 1
        for l in self.lam:
            lcm = lcm * l.denominator // _gcd(lcm, l.denominator)
        cleared = [int(l * lcm) for l in self.lam]
        key = json.dumps([self.dim, [list(q) for q in self.V], cleared, lcm])
        return hashlib.sha256(key.encode()).hexdigest()[:16]


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


@dataclass(frozen=True)
class HPolytope:
    """Intersection of half-spaces { p : <q, p> + c >= 0 }."""

    constraints: tuple  # of (normal tuple, offset Fraction)

    @property
    def dim(self):
        return len(self.constraints[0][0])

    def value(self, i, p):
        q, c = self.constraints[i]
        return linalg.dot([frac(x) for x in q], p) + c

    def contains(self, p):
        return all(self.value(i, p) >= 0 for i in range(len(self.constraints)))


@dataclass(frozen=True)
class VPolytope:
    vertices: tuple          # of rational points
    incidence: tuple         # per vertex: frozenset of active constraint indices

    @property
    def dim(self):
        return len(self.vertices[0])

    def is_integral(self):
        return all(x.denominator == 1 for v in self.vertices for x in v)


@dataclass(frozen=True)
class SimplicialReport:
    is_simplicial: bool
    vertex_active: tuple      # per vertex: frozenset of active constraints
    vertex_dets: tuple        # per vertex: det of active normals (None if not d of them)
    facets_supported: tuple   # per constraint: True if it supports a facet


def _recession_direction(normals):
    """A nonzero v with <q, v> >= 0 for all q, or None if the cone is {0}.

    The recession cone is pointed unless the normals have a common kernel;
    a pointed nonzero cone has an extreme ray lying on dim-1 independent
    active constraints, so scanning (dim-1)-subsets is exhaustive.
    """
    if not normals:
        return None
    dim = len(normals[0])
    ker = linalg.kernel(normals, ncols=dim)
    if ker:
        return ker[0]
    for subset in itertools.combinations(range(len(normals)), dim - 1):
        rows = [normals[i] for i in subset]
        if rows and linalg.rank(rows) != dim - 1:
            continue
        for v in linalg.kernel(rows, ncols=dim):
            if all(linalg.dot(q, v) >= 0 for q in normals):
                return v
            w = [-x for x in v]
            if all(linalg.dot(q, w) >= 0 for q in normals):
                return w
    return None


def enumerate_vertices(H: HPolytope) -> VPolytope:
    """All vertices of a bounded H-polytope, with constraint incidence.

    Exhaustive d-subset intersection with feasibility filtering; exact and
    simple, which is all desk-scale inputs need.
    """
    cons = [( [frac(x) for x in q], frac(c) ) for q, c in H.constraints]
    dim = H.dim
    normals = [q for q, _ in cons]
    v = _recession_direction(normals)
    if v is not None:
        raise UnboundedPolytope(f"recession direction {v}")
    found = {}
    for subset in itertools.combinations(range(len(cons)), dim):
        a = [cons[i][0] for i in subset]
        b = [-cons[i][1] for i in subset]
        p = linalg.solve(a, b)
        if p is None:
            continue
        if not all(linalg.dot(q, p) + c >= 0 for q, c in cons):
            continue
        key = tuple(p)
        if key not in found:
            active = frozenset(i for i, (q, c) in enumerate(cons)
                               if linalg.dot(q, p) + c == 0)
            found[key] = active
    if not found:
        raise EmptyPolytope("no feasible vertex")
    verts = sorted(found)
    return VPolytope(vertices=tuple(verts),
                     incidence=tuple(found[v] for v in verts))


def polar_dual(P: VPolytope):
    """Polar dual { q : <q, p> >= -1 for all p in P }, plus a reflexivity flag.

    The dual is bounded iff 0 is strictly interior to P, so an unbounded
    enumeration signals OriginNotInterior.
    """
    cons = tuple((tuple(v), Fraction(1)) for v in P.vertices)
    try:
        dual = enumerate_vertices(HPolytope(cons))
    except UnboundedPolytope as exc:
        raise OriginNotInterior(str(exc)) from exc
    reflexive = P.is_integral() and dual.is_integral()
    return dual, reflexive


def datum_hpolytope(datum: MirrorDatum, lam=None) -> HPolytope:
    lam = datum.lam if lam is None else lam
    return HPolytope(tuple((q, frac(l)) for q, l in zip(datum.V, lam)))


def _facet_support(P: VPolytope, ncons, dim):
    """Per constraint: does its active vertex set span an affine (dim-1)-flat?"""
    out = []
    for i in range(ncons):
        pts = [v for v, act in zip(P.vertices, P.incidence) if i in act]
        out.append(len(pts) >= dim and linalg.affine_rank(pts) == dim - 1)
    return tuple(out)


def simplicial_report(datum: MirrorDatum, P: VPolytope) -> SimplicialReport:
    dim = datum.dim
    dets = []
    simplicial = True
    for act in P.incidence:
        if len(act) != dim:
            dets.append(None)
            simplicial = False
            continue
        d = linalg.det([[frac(x) for x in datum.V[i]] for i in sorted(act)])
        dets.append(d)
        if d == 0:
            simplicial = False
    supported = _facet_support(P, len(datum.V), dim)
    return SimplicialReport(is_simplicial=simplicial,
                            vertex_active=P.incidence,
                            vertex_dets=tuple(dets),
                            facets_supported=supported)


def build_delta_lambda(datum: MirrorDatum):
    """H- and V-representations of Delta_lambda plus its simpliciality report.

    Fails if some weight supports no facet (lambda cannot then restrict a
    strictly convex PL function with the prescribed rays) or if some vertex
    is not simple.
    """
    H = datum_hpolytope(datum)
    P = enumerate_vertices(H)
    report = simplicial_report(datum, P)
    for i, ok in enumerate(report.facets_supported):
        if not ok:
            raise DegenerateWeight(i, datum.V[i])
    if not report.is_simplicial:
        bad = next(i for i, d in enumerate(report.vertex_dets) if d is None or d == 0)
        raise NotSimplicial(P.vertices[bad], report.vertex_active[bad])
    return H, P, report


# ---------------------------------------------------------------------------
# Exact volumes

def _parametrize_flat(rows, dim):
    """Affine chart of the flat cut out by `rows`: returns (cov, r, M, Minv).

    cov are integral unit covectors completing `rows` to a rational basis;
    r is the factor making (rows, cov) unimodular in the residual sense,
    i.e. the standard volume form equals r * d(rows) ^ d(cov).
    """
    chosen = linalg.complete_basis(rows, dim)
    cov = [[Fraction(int(i == j)) for i in range(dim)] for j in chosen]
    M = [row[:] for row in rows] + [c[:] for c in cov]
    r = 1 / abs(linalg.det(M))
    Minv = linalg.inverse(M)
    return cov, r, M, Minv


def _volume(vertices, cons, k):
    """Exact Lebesgue volume of conv(vertices) in Q^k.

    cons: list of (normal, offset) with the polytope = {u : <n,u>+c >= 0};
    every facet must appear among cons.  Recursive boundary decomposition:
    vol = (1/k) * sum over facets of  beta_i(x0) * residual_vol(facet),
    with beta_i primitive-normalized so the height is a lattice height.
    """
    if not vertices:
        return Fraction(0)
    if k == 0:
        return Fraction(1)
    if linalg.affine_rank(list(vertices)) < k:
        return Fraction(0)
    if k == 1:
        xs = [v[0] for v in vertices]
        return max(xs) - min(xs)
    x0 = vertices[0]
    total = Fraction(0)
    seen = set()
    for q, c in cons:
        qn = [frac(x) for x in q]
        prim, scale = linalg.primitivize(qn)
        if scale == 0:
            continue
        cprim = frac(c) / scale
        key = (tuple(prim), cprim)
        if key in seen:
            continue
        seen.add(key)
        face_pts = [v for v in vertices
                    if linalg.dot([frac(x) for x in prim], v) + cprim == 0]
        if len(face_pts) < k or linalg.affine_rank(face_pts) != k - 1:
            continue
        height = linalg.dot([frac(x) for x in prim], x0) + cprim
        if height == 0:
            continue
        prim_f = [frac(x) for x in prim]
        cov, r, M, Minv = _parametrize_flat([prim_f], k)
        u_pts = [tuple(linalg.dot(cv, p) for cv in cov) for p in face_pts]
        # rewrite the other constraints in chart coordinates u:
        # p = Minv . (value_of_prim_row; u); the first coordinate is fixed.
        fixed0 = -cprim
        sub_cons = []
        col_vecs = [[Minv[i][j] for i in range(k)] for j in range(k)]
        for q2, c2 in cons:
            q2v = [frac(x) for x in q2]
            # coefficient of u_j is <q2, Minv e_{1+j}>; constant picks up the fixed row
            coeffs = [linalg.dot(q2v, col) for col in col_vecs]
            const = coeffs[0] * fixed0 + frac(c2)
            sub_cons.append((coeffs[1:], const))
        total += abs(height) * r * _volume(u_pts, sub_cons, k - 1)
    return total / k


def polytope_volume(H: HPolytope, P: VPolytope = None):
    """Standard affine volume of a bounded H-polytope, exact."""
    if P is None:
        P = enumerate_vertices(H)
    cons = [(q, frac(c)) for q, c in H.constraints]
    return _volume(list(P.vertices), cons, H.dim)


def face_volume(datum: MirrorDatum, S, shifts=None) -> Fraction:
    """Residual-normalized volume of the face of the shifted polytope where
    the constraints in S are active.

    `shifts` maps constraint indices to rationals b_q and "*" to a global a;
    the shifted weights are lambda' = lambda - a (everywhere) and an extra
    -b_q per shifted constraint, following the Duistermaat-Heckman shift
    direction.  The combinatorial type must be preserved (ChamberCrossed
    otherwise).

    The residual measure divides the affine measure by the factor that
    makes (covectors of S, integral complement) unimodular; via the Smith
    index this is exactly the generic-stabilizer correction.
    """
    S = tuple(sorted(S))
    shifts = dict(shifts or {})
    a = frac(shifts.pop("*", 0))
    b = {i: frac(shifts.pop(i)) for i in list(shifts)}
    dim = datum.dim
    base = enumerate_vertices(datum_hpolytope(datum))
    base_pattern = frozenset(base.incidence)
    lam2 = list(datum.lam)
    for i in range(len(lam2)):
        lam2[i] = lam2[i] - a - b.get(i, Fraction(0))
    try:
        shifted = enumerate_vertices(datum_hpolytope(datum, lam2))
    except EmptyPolytope as exc:
        raise ChamberCrossed(f"shift a={a}, b={b} emptied the polytope") from exc
    if frozenset(shifted.incidence) != base_pattern:
        raise ChamberCrossed(f"shift a={a}, b={b} changed the combinatorial type")

    cons = [( [frac(x) for x in q], frac(l) ) for q, l in zip(datum.V, lam2)]
    if not S:
        return _volume(list(shifted.vertices), cons, dim)

    face_pts = [v for v, act in zip(shifted.vertices, shifted.incidence)
                if set(S) <= act]
    if not face_pts:
        raise FacetsDisjoint(f"facets {S} do not intersect")
    k = dim - len(S)
    rows = [[frac(x) for x in datum.V[i]] for i in S]
    if linalg.rank(rows) != len(S):
        raise FacetsDisjoint(f"facet normals {S} are dependent")
    cov, r, M, Minv = _parametrize_flat(rows, dim)
    if k == 0:
        return r
    u_pts = [tuple(linalg.dot(c, p) for c in cov) for p in face_pts]
    fixed = [-cons[i][1] for i in S]
    col_vecs = [[Minv[i][j] for i in range(dim)] for j in range(dim)]
    sub_cons = []
    for j, (qv, c) in enumerate(cons):
        if j in S:
            continue
        coeffs = [linalg.dot(qv, col) for col in col_vecs]
        const = sum(cf * fx for cf, fx in zip(coeffs[: len(S)], fixed)) + c
        sub_cons.append((coeffs[len(S):], const))
    return r * _volume(u_pts, sub_cons, k)


# ---------------------------------------------------------------------------
# Triangulation oracle (randomized; used by tests as an independent check)

def triangulate(P: VPolytope, cons, rng=None):
    """Triangulate a full-dimensional polytope into vertex-index simplices.

    Randomized apex choice at every recursion level; any seed must yield the
    same total volume.  Independent of the Lasserre recursion above.
    """
    import random

    rng = rng or random.Random(0)
    dim = P.dim
    verts = list(P.vertices)

    def facets_of(point_ids, flat_dim):
        """Split a face (given by vertex ids) into its codim-1 faces using
        the global constraint list."""
        out = []
        seen = set()
        for j, (q, c) in enumerate(cons):
            qv = [frac(x) for x in q]
            sub = [i for i in point_ids
                   if linalg.dot(qv, verts[i]) + frac(c) == 0]
            if len(sub) < flat_dim:
                continue
            pts = [verts[i] for i in sub]
            if linalg.affine_rank(pts) != flat_dim - 1:
                continue
            key = frozenset(sub)
            if key in seen or key == frozenset(point_ids):
                continue
            seen.add(key)
            out.append(sub)
        return out

    def rec(point_ids, flat_dim):
        pts = [verts[i] for i in point_ids]
        if len(point_ids) == flat_dim + 1:
            return [tuple(point_ids)]
        apex = rng.choice(point_ids)
        simplices = []
        for facet in facets_of(point_ids, flat_dim):
            if apex in facet:
                continue
            for s in rec(facet, flat_dim - 1):
                simplices.append(s + (apex,))
        return simplices

    return rec(list(range(len(verts))), dim)


def simplex_volume_sum(P: VPolytope, simplices):
    total = Fraction(0)
    for s in simplices:
        v0 = P.vertices[s[0]]
        rows = [[x - y for x, y in zip(P.vertices[i], v0)] for i in s[1:]]
        total += abs(linalg.det(rows))
    k = P.dim
    fact = 1
    for i in range(2, k + 1):
        fact *= i
    return total / fact


# ---------------------------------------------------------------------------
# Intersection numbers

@dataclass
class IntersectionTable:
    """Degree-d monomials in the toric divisors paired against Y_{Delta}."""

    dim: int
    nvars: int
    entries: dict            # exponent tuple -> Fraction
    fingerprint: str = ""

    def pair(self, e):
        e = tuple(int(x) for x in e)
        if sum(e) != self.dim or len(e) != self.nvars:
            raise KeyError(f"exponent {e} is not degree {self.dim} in {self.nvars} vars")
        return self.entries.get(e, Fraction(0))

    def to_json(self):
        return {
            "fingerprint": self.fingerprint,
            "dim": self.dim,
            "nvars": self.nvars,
            "entries": {",".join(map(str, e)): str(v) for e, v in self.entries.items()},
        }

    @classmethod
    def from_json(cls, obj):
        entries = {tuple(int(x) for x in k.split(",")): frac(v)
                   for k, v in obj["entries"].items()}
        return cls(dim=obj["dim"], nvars=obj["nvars"], entries=entries,
                   fingerprint=obj.get("fingerprint", ""))

    def save(self, path):
        tmp = tempfile.NamedTemporaryFile("w", dir=os.path.dirname(path) or ".",
                                          delete=False, suffix=".tmp")
        try:
            json.dump(self.to_json(), tmp, indent=1)
            tmp.close()
            os.replace(tmp.name, path)
        finally:
            if os.path.exists(tmp.name):
                os.unlink(tmp.name)

    @classmethod
    def load(cls, path):
        with open(path) as f:
            return cls.from_json(json.load(f))


def _min_gap(datum, P: VPolytope):
    """Smallest positive value of any constraint over the vertex set."""
    gap = None
    for v in P.vertices:
        for q, l in zip(datum.V, datum.lam):
            val = linalg.dot([frac(x) for x in q], v) + l
            if val > 0 and (gap is None or val < gap):
                gap = val
    return gap


def intersection_table(datum: MirrorDatum, cache_dir=None) -> IntersectionTable:
    """All degree-d intersection numbers by exact finite differences.

    vol(Delta_{lambda+x}) equals the degree-d polynomial
    int exp(omega + sum x_q D_q), so the pure d-th order forward difference
    at a chamber-safe step recovers int prod D^e exactly.
    """
    fp = datum.fingerprint()
    cache_path = None
    if cache_dir:
        cache_path = os.path.join(cache_dir, f"itable-{fp}.json")
        if os.path.exists(cache_path):
            table = IntersectionTable.load(cache_path)
            if table.fingerprint == fp:
                return table

    H, P, report = build_delta_lambda(datum)
    d = datum.dim
    nv = datum.nvars
    h = _min_gap(datum, P) / (4 * d)

    vol_cache = {}

    def vol_at(k):
        if k not in vol_cache:
            shifts = {"*": 0}
            for i, ki in enumerate(k):
                if ki:
                    shifts[i] = -h * ki   # negative b enlarges: lambda + k*h
            vol_cache[k] = face_volume(datum, (), shifts)
        return vol_cache[k]

    def supports_intersect(e):
        S = frozenset(i for i, x in enumerate(e) if x)
        return any(S <= act for act in P.incidence)

    entries = {}
    for e in _degree_monomials(nv, d):
        if not supports_intersect(e):
            continue
        attempts = 0
        while True:
            try:
                acc = Fraction(0)
                for k in itertools.product(*[range(x + 1) for x in e]):
                    sign = (-1) ** (sum(e) - sum(k))
                    coeff = 1
                    for ei, ki in zip(e, k):
                        coeff *= comb(ei, ki)
                    acc += sign * coeff * vol_at(k)
                entries[e] = acc / h ** d
                break
            except ChamberCrossed:
                attempts += 1
                if attempts > 8:
                    raise
                h = h / 2
                vol_cache.clear()
    entries = {e: v for e, v in entries.items() if v != 0}
    table = IntersectionTable(dim=d, nvars=nv, entries=entries, fingerprint=fp)
    if cache_path:
        os.makedirs(cache_dir, exist_ok=True)
        table.save(cache_path)
    return table


def _degree_monomials(nvars, degree):
    """All exponent tuples of the given total degree."""
    if nvars == 1:
        yield (degree,)
        return
    for first in range(degree + 1):
        for rest in _degree_monomials(nvars - 1, degree - first):
            yield (first,) + rest
