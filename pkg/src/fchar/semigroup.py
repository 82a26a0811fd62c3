"""Affine semigroups C ⊆ ℤ^d_{≥0} and F-coherence of their semigroup rings k[C].

All geometry is done in coordinates of a Hermite-normal-form basis of the
group generated by C, where that group is the full lattice ℤ^r.  There the
saturation of C is just ``cone ∩ ℤ^r`` and its Hilbert basis is found
exactly, by triangulating the cone and collecting the lattice points of the
closed fundamental parallelepipeds.

Classification of k[C] in characteristic p:

* certificate: if ``p^e·e_i ∈ C`` for every unit vector then
  ``k[x^(p^e)] ⊆ k[C] ⊆ k[x]`` is purely inseparable, so k[C] is F-coherent;
* obstruction: F-coherence forces the normalization to be purely
  inseparable, i.e. every Hilbert basis element ``h`` of the saturation has
  some ``p^e·h`` in C.  For ``h`` on a ray of the cone this is a congruence
  on the ray's one-dimensional semigroup, which can fail for every ``e`` at
  once.
"""

from __future__ import annotations

import heapq
import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from typing import Sequence

from .errors import PreconditionError, ResourceCapError, UnsupportedDimensionError

Vector = tuple[int, ...]

FCOHERENT = "FCoherent"
NOT_FCOHERENT = "NotFCoherent"
UNKNOWN = "Unknown"

DEFAULT_ECAP = 16
MAX_BOX = 2_000_000


# --------------------------------------------------------------------------
# integer linear algebra


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style HNF: the nonzero rows of the echelon basis of the row lattice.

    Pivots are positive and entries above a pivot lie in ``[0, pivot)``.
    """
    A = [list(r) for r in rows if any(r)]
    if not A:
        return []
    ncols = len(A[0])
    out: list[list[int]] = []
    for col in range(ncols):
        nz = [r for r in A if r[col]]
        if not nz:
            continue
        rest = [r for r in A if not r[col]]
        piv = nz[0]
        for r in nz[1:]:
            g, s, t = _xgcd(piv[col], r[col])
            a, b = piv[col] // g, r[col] // g
            new_piv = [s * x + t * y for x, y in zip(piv, r)]
            new_r = [b * x - a * y for x, y in zip(piv, r)]
            piv = new_piv
            if any(new_r):
                rest.append(new_r)
        if piv[col] < 0:
            piv = [-x for x in piv]
        for prev in out:
            k = prev[col] // piv[col]
            if k:
                for i in range(ncols):
                    prev[i] -= k * piv[i]
        out.append(piv)
        A = rest
    return out


def _primitive(v: Sequence[int]) -> Vector:
    g = reduce(math.gcd, v, 0)
    return tuple(x // g for x in v) if g else tuple(v)


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _rank(vectors) -> int:
    return len(hermite_normal_form(vectors))


def _solve_rows(V: Sequence[Sequence[int]], x: Sequence[int]) -> list[Fraction]:
    """Solve ``λ V = x`` for square invertible ``V`` (rows are the basis)."""
    n = len(V)
    # augmented system on the transpose: V^T λ^T = x^T
    M = [[Fraction(V[j][i]) for j in range(n)] + [Fraction(x[i])] for i in range(n)]
    for c in range(n):
        piv = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[piv] = M[piv], M[c]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c] / M[c][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return [M[i][n] / M[i][i] for i in range(n)]


# --------------------------------------------------------------------------
# numerical (one-dimensional) semigroups


class AperySolver:
    """Membership and representations in the numerical monoid ``⟨ks⟩ ⊆ ℕ``.

    Uses shortest paths on residues modulo the smallest generator, so each
    query costs O(1) after setup regardless of the size of the number.
    """

    def __init__(self, ks: Sequence[int]):
        ks = [int(k) for k in ks]
        if not ks or any(k <= 0 for k in ks):
            raise PreconditionError("numerical semigroup generators must be positive")
        self.ks = ks
        self.gcd = reduce(math.gcd, ks)
        reduced = [k // self.gcd for k in ks]
        self.m = min(reduced)
        self.mi = reduced.index(self.m)
        self._reduced = reduced
        dist = [None] * self.m
        pred: list = [None] * self.m
        dist[0] = 0
        heap = [(0, 0)]
        while heap:
            d, r = heapq.heappop(heap)
            if d != dist[r]:
                continue
            for i, k in enumerate(reduced):
                nd, nr = d + k, (r + k) % self.m
                if dist[nr] is None or nd < dist[nr]:
                    dist[nr] = nd
                    pred[nr] = (r, i)
                    heapq.heappush(heap, (nd, nr))
        self.apery = dist
        self._pred = pred

    @property
    def frobenius_number(self) -> int:
        """Largest gap of ``⟨ks⟩ / gcd`` (``-1`` if there is none)."""
        return max(self.apery) - self.m

    def contains(self, n: int) -> bool:
        if n < 0 or n % self.gcd:
            return False
        n //= self.gcd
        return n >= self.apery[n % self.m]

    def representation(self, n: int) -> list[int] | None:
        if not self.contains(n):
            return None
        n //= self.gcd
        mult = [0] * len(self.ks)
        r = n % self.m
        base = self.apery[r]
        while r:
            prev, i = self._pred[r]
            mult[i] += 1
            r = prev
        mult[self.mi] += (n - base) // self.m
        return mult


# --------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class LatticeGroup:
    """Subgroup of ℤ^d given by an HNF basis."""

    basis: tuple[Vector, ...]
    dim: int

    @property
    def rank(self) -> int:
        return len(self.basis)

    @cached_property
    def _pivots(self) -> list[int]:
        return [next(i for i, x in enumerate(row) if x) for row in self.basis]

    def rational_coords(self, v: Sequence[int]) -> tuple[Fraction, ...] | None:
        """Coordinates of ``v`` in the basis, or ``None`` if ``v`` is outside its rational span."""
        x: list[Fraction] = []
        for i, (row, c) in enumerate(zip(self.basis, self._pivots)):
            s = Fraction(v[c]) - sum(x[j] * self.basis[j][c] for j in range(i))
            x.append(s / row[c])
        for k in range(self.dim):
            if sum(x[j] * self.basis[j][k] for j in range(len(x))) != v[k]:
                return None
        return tuple(x)

    def coords(self, v: Sequence[int]) -> Vector | None:
        """Integer coordinates if ``v`` lies in the group, else ``None``."""
        x = self.rational_coords(v)
        if x is None or any(c.denominator != 1 for c in x):
            return None
        return tuple(int(c) for c in x)

    def contains(self, v: Sequence[int]) -> bool:
        return self.coords(v) is not None

    def vector(self, coords: Sequence[int]) -> Vector:
        return tuple(sum(c * row[k] for c, row in zip(coords, self.basis)) for k in range(self.dim))

    def to_json(self):
        return {"basis": [[str(x) for x in row] for row in self.basis], "rank": self.rank}


@dataclass(frozen=True)
class RationalCone:
    rays: tuple[Vector, ...]
    dim: int

    def to_json(self):
        return {"rays": [[str(x) for x in r] for r in self.rays], "dim": self.dim}


@dataclass(frozen=True)
class Face:
    """A face of the cone, identified by the facet inequalities that are tight on it."""

    tight: frozenset
    rays: tuple[Vector, ...]
    dim: int

    def describe(self) -> str:
        if self.dim == 0:
            return "origin"
        return "cone(" + ", ".join(str(list(r)) for r in self.rays) + ")"

    def to_json(self):
        return {"dim": self.dim, "rays": [[str(x) for x in r] for r in self.rays], "description": self.describe()}


@dataclass
class FCoherenceVerdict:
    status: str
    certificate: int | None = None
    witness: object = None
    obstruction: dict | None = None
    evidence: str = ""
    transcript: list = field(default_factory=list)

    def __post_init__(self):
        if self.status == FCOHERENT and self.certificate is None:
            raise ValueError("an FCoherent verdict needs a certificate")
        if self.status == NOT_FCOHERENT and (self.witness is None or self.obstruction is None):
            raise ValueError("a NotFCoherent verdict needs a witness and an obstruction")

    def to_json(self) -> dict:
        out = {
            "status": self.status,
            "certificate": {"e": self.certificate} if self.certificate is not None else None,
            "witness": _jsonable(self.witness),
            "evidence": self.evidence,
        }
        if self.obstruction is not None:
            out["obstruction"] = _jsonable(self.obstruction)
        if self.transcript:
            out["transcript"] = _jsonable(self.transcript)
        return out


def _jsonable(obj):
    # exponent vectors go out as decimal strings
    if isinstance(obj, tuple) and all(isinstance(x, int) for x in obj):
        return [str(x) for x in obj]
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_jsonable(v) for v in obj]
    if obj is None or isinstance(obj, (bool, int, str, float)):
        return obj
    return str(obj)


def _desc(vectors):
    return sorted(vectors, reverse=True)


class _Geometry:
    """Lattice coordinates, facet normals and extreme rays (in coordinates) for C."""

    def __init__(self, C: "AffineSemigroup"):
        self.lattice = LatticeGroup(tuple(tuple(r) for r in hermite_normal_form(C.gens)), C.dim)
        self.r = self.lattice.rank
        self.gen_coords = [self.lattice.coords(g) for g in C.gens]
        self.normals: list[Vector] | None = None
        self.rays: list[Vector] | None = None
        if self.r <= 3:
            self._cone()

    def _cone(self):
        G = self.gen_coords
        r = self.r
        if r == 1:
            self.normals = [(1,)]
            self.rays = [(1,)]
            return
        if r == 2:
            def cross(a, b):
                return a[0] * b[1] - a[1] * b[0]

            a = next(g for g in G if all(cross(g, h) >= 0 for h in G))
            b = next(g for g in G if all(cross(h, g) >= 0 for h in G))
            self.normals = [_primitive((-a[1], a[0])), _primitive((b[1], -b[0]))]
            self.rays = [_primitive(a), _primitive(b)]
            return
        normals = []
        for g, h in itertools.combinations(G, 2):
            n = _cross(g, h)
            if not any(n):
                continue
            vals = [_dot(n, x) for x in G]
            if all(v >= 0 for v in vals):
                pass
            elif all(v <= 0 for v in vals):
                n = tuple(-x for x in n)
            else:
                continue
            n = _primitive(n)
            if n not in normals:
                normals.append(n)
        rays = []
        for g in G:
            d = _primitive(g)
            if d in rays:
                continue
            if sum(1 for n in normals if _dot(n, d) == 0) >= 2:
                rays.append(d)
        self.normals = normals
        self.rays = rays

    def require_cone(self):
        if self.normals is None:
            raise UnsupportedDimensionError(f"cone computations need rank <= 3 (rank is {self.r})")

    def in_cone(self, x) -> bool:
        return all(_dot(n, x) >= 0 for n in self.normals)

    def tight(self, x) -> frozenset:
        return frozenset(j for j, n in enumerate(self.normals) if _dot(n, x) == 0)

    def ray_vector(self, coords) -> Vector:
        return _primitive(self.lattice.vector(coords))

    # -- Hilbert basis ------------------------------------------------------
    def simplicial_pieces(self) -> list[list[Vector]]:
        if self.r <= 2:
            return [list(self.rays)]
        # cyclic order of rays: consecutive rays share a facet
        rays = list(self.rays)
        if len(rays) == 3:
            return [rays]
        adj = {i: [] for i in range(len(rays))}
        for n in self.normals:
            on = [i for i, v in enumerate(rays) if _dot(n, v) == 0]
            if len(on) == 2:
                a, b = on
                adj[a].append(b)
                adj[b].append(a)
        cycle = [0]
        prev = None
        while len(cycle) < len(rays):
            cur = cycle[-1]
            nxt = next(j for j in adj[cur] if j != prev and j not in cycle)
            prev = cur
            cycle.append(nxt)
        return [[rays[cycle[0]], rays[cycle[i]], rays[cycle[i + 1]]] for i in range(1, len(cycle) - 1)]

    def hilbert_basis_coords(self) -> list[Vector]:
        self.require_cone()
        cands: set[Vector] = set()
        for V in self.simplicial_pieces():
            lo = [sum(min(0, v[k]) for v in V) for k in range(self.r)]
            hi = [sum(max(0, v[k]) for v in V) for k in range(self.r)]
            size = math.prod(h - l + 1 for l, h in zip(lo, hi))
            if size > MAX_BOX:
                raise ResourceCapError(f"fundamental parallelepiped box has {size} points")
            for x in itertools.product(*(range(l, h + 1) for l, h in zip(lo, hi))):
                if not any(x):
                    continue
                lam = _solve_rows(V, x)
                if all(0 <= t <= 1 for t in lam):
                    cands.add(x)
        hb = []
        for x in cands:
            if not any(y != x and self.in_cone(tuple(a - b for a, b in zip(x, y))) for y in cands):
                hb.append(x)
        return hb


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AffineSemigroup:
    """The semigroup generated by finitely many nonzero vectors of ℤ^d_{≥0}."""

    dim: int
    gens: tuple[Vector, ...]

    def __post_init__(self):
        if not isinstance(self.dim, int) or self.dim < 1:
            raise PreconditionError("semigroup dimension must be >= 1")
        gens = tuple(tuple(int(x) for x in g) for g in self.gens)
        if not gens:
            raise PreconditionError("a semigroup needs at least one generator")
        for g in gens:
            if len(g) != self.dim:
                raise PreconditionError(f"generator {list(g)} does not have dimension {self.dim}")
            if any(x < 0 for x in g) or not any(g):
                raise PreconditionError(f"generator {list(g)} must be nonzero with non-negative entries")
        if len(set(gens)) != len(gens):
            raise PreconditionError("semigroup generators must be distinct")
        object.__setattr__(self, "gens", gens)

    @classmethod
    def from_json(cls, data) -> "AffineSemigroup":
        try:
            gens = tuple(tuple(int(x) for x in g) for g in data["gens"])
            dim = int(data.get("dim", len(gens[0]) if gens else 0))
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise PreconditionError(f"bad semigroup description: {exc!r}") from None
        return cls(dim, gens)

    def to_json(self):
        return {"dim": self.dim, "gens": [list(g) for g in self.gens]}

    @cached_property
    def _geo(self) -> _Geometry:
        return _Geometry(self)

    def __contains__(self, v):
        return sg_member(v, self)[0]


# --------------------------------------------------------------------------
# operations


def _check_vector(v, C: AffineSemigroup) -> Vector:
    v = tuple(int(x) for x in v)
    if len(v) != C.dim:
        raise PreconditionError(f"vector {list(v)} does not have dimension {C.dim}")
    if any(x < 0 for x in v):
        raise PreconditionError(f"vector {list(v)} has negative entries")
    return v


def _box_dp(v: Vector, gens: list[Vector]) -> list[int] | None:
    size = math.prod(x + 1 for x in v)
    if size > MAX_BOX:
        raise ResourceCapError(f"membership search box has {size} points")
    how: dict[Vector, int] = {tuple(0 for _ in v): -1}
    for w in itertools.product(*(range(x + 1) for x in v)):
        if w in how:
            continue
        for i, g in enumerate(gens):
            prev = tuple(a - b for a, b in zip(w, g))
            if min(prev) >= 0 and prev in how:
                how[w] = i
                break
    if v not in how:
        return None
    mult = [0] * len(gens)
    w = v
    while any(w):
        i = how[w]
        mult[i] += 1
        w = tuple(a - b for a, b in zip(w, gens[i]))
    return mult


def sg_member(v, C: AffineSemigroup) -> tuple[bool, list[int] | None]:
    """Decide ``v ∈ C``; on success also return multiplicities of the generators.

    Vectors on a ray of the cone reduce to a one-dimensional semigroup (any
    representation may only use generators of the smallest face containing
    ``v``), which is answered in constant time.  Otherwise a bounded dynamic
    programme over the box ``[0, v]`` decides.
    """
    v = _check_vector(v, C)
    n = len(C.gens)
    if not any(v):
        return True, [0] * n
    geo = C._geo
    x = geo.lattice.coords(v)
    if x is None:
        return False, None
    idx = list(range(n))
    if geo.normals is not None:
        if not geo.in_cone(x):
            return False, None
        T = geo.tight(x)
        idx = [i for i in idx if all(_dot(geo.normals[j], geo.gen_coords[i]) == 0 for j in T)]
    face_coords = [geo.gen_coords[i] for i in idx]
    if _rank(face_coords) == 1:
        ray = _primitive(face_coords[0])
        if ray != _primitive(x):
            return False, None
        k = next(i for i, c in enumerate(ray) if c)
        solver = AperySolver([c[k] // ray[k] for c in face_coords])
        rep = solver.representation(x[k] // ray[k])
        if rep is None:
            return False, None
        mult = [0] * n
        for i, m in zip(idx, rep):
            mult[i] = m
        return True, mult
    rep = _box_dp(v, [C.gens[i] for i in idx])
    if rep is None:
        return False, None
    mult = [0] * n
    for i, m in zip(idx, rep):
        mult[i] = m
    return True, mult


def sg_group(C: AffineSemigroup) -> LatticeGroup:
    return C._geo.lattice


def _require_small(C: AffineSemigroup, limit: int = 3):
    if C.dim > limit:
        raise UnsupportedDimensionError(f"dimension {C.dim} > {limit} is not supported")


def sg_cone(C: AffineSemigroup) -> RationalCone:
    """Extreme rays (primitive in ℤ^d) of the cone spanned by C."""
    _require_small(C)
    geo = C._geo
    geo.require_cone()
    return RationalCone(tuple(_desc(geo.ray_vector(r) for r in geo.rays)), geo.r)


def sg_hilbert_basis(C: AffineSemigroup) -> list[Vector]:
    """Hilbert basis of the saturation ``group(C) ∩ cone(C)``, descending lexicographic."""
    _require_small(C)
    geo = C._geo
    return _desc(geo.lattice.vector(x) for x in geo.hilbert_basis_coords())


def sg_saturation(C: AffineSemigroup) -> AffineSemigroup:
    return AffineSemigroup(C.dim, tuple(sg_hilbert_basis(C)))


def sg_is_normal(C: AffineSemigroup) -> tuple[bool, Vector | None]:
    """``C == C_sat``; otherwise the first Hilbert basis element missing from C."""
    for h in sg_hilbert_basis(C):
        if not sg_member(h, C)[0]:
            return False, h
    return True, None


def sg_pi_sandwich_certificate(C: AffineSemigroup, p: int, e_cap: int = DEFAULT_ECAP) -> int | None:
    """Smallest ``e <= e_cap`` with ``p^e e_i ∈ C`` for every unit vector ``e_i``."""
    best = 0
    for i in range(C.dim):
        unit = tuple(int(j == i) for j in range(C.dim))
        for e in range(e_cap + 1):
            if sg_member(tuple(p**e * x for x in unit), C)[0]:
                best = max(best, e)
                break
        else:
            return None
    return best


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@dataclass
class PIItem:
    """Outcome for one Hilbert basis element ``h``: ``e`` with ``p^e h ∈ C``, or an obstruction."""

    h: Vector
    passed: bool
    location: str
    e: int | None = None
    obstruction: dict | None = None

    def to_json(self):
        return _jsonable({"h": self.h, "passed": self.passed, "location": self.location,
                          "e": self.e, "obstruction": self.obstruction})


@dataclass
class PITestReport:
    p: int
    items: list[PIItem]

    @property
    def passed(self) -> bool:
        return all(i.passed for i in self.items)

    @property
    def failures(self) -> list[PIItem]:
        return [i for i in self.items if not i.passed]

    def to_json(self):
        return {"p": self.p, "passed": self.passed, "items": [i.to_json() for i in self.items]}


def _face_congruence(C: AffineSemigroup, h: Vector, x: Vector, p: int) -> PIItem:
    geo = C._geo
    T = geo.tight(x)
    idx = [i for i in range(len(C.gens)) if all(_dot(geo.normals[j], geo.gen_coords[i]) == 0 for j in T)]
    ray = _primitive(x)
    k = next(i for i, c in enumerate(ray) if c)
    ks = [geo.gen_coords[i][k] // ray[k] for i in idx]
    m = x[k] // ray[k]
    step = reduce(math.gcd, ks)
    modulus = step // math.gcd(step, m)
    bad = [ell for ell in _prime_factors(modulus) if ell != p]
    ray_vec = geo.lattice.vector(ray)
    if bad:
        ell = bad[0]
        return PIItem(h, False, "face", obstruction={
            "face_ray": ray_vec,
            "face_generators": [C.gens[i] for i in idx],
            "face_generator_multiples": ks,
            "step": step,
            "h_multiple": m,
            "modulus": modulus,
            "prime": ell,
            "statement": (
                f"p^e*h lies in C only if it lies in the face semigroup, whose elements are "
                f"n*{step}*{list(ray_vec)}; this needs {step}*n = {p}^e*{m}, impossible for every e "
                f"because the prime {ell} divides {modulus} = {step}/gcd({step},{m}) but not {p}^e"
            ),
        })
    solver = AperySolver(ks)
    e = 0
    while not solver.contains(p**e * m):
        e += 1
    return PIItem(h, True, "face", e=e)


def sg_normalization_pi_test(C: AffineSemigroup, p: int, e_search: int = 64) -> PITestReport:
    """For each Hilbert basis element ``h`` of C_sat decide whether some ``p^e h`` lies in C.

    Interior elements always pass (deep lattice points of the cone lie in C),
    and the smallest such ``e`` is found by search.  Elements on a ray are
    decided by a congruence on the ray's one-dimensional semigroup.
    """
    _require_small(C, 2)
    geo = C._geo
    items = []
    for h in sg_hilbert_basis(C):
        if sg_member(h, C)[0]:
            items.append(PIItem(h, True, "member", e=0))
            continue
        x = geo.lattice.coords(h)
        if geo.tight(x):
            items.append(_face_congruence(C, h, x, p))
            continue
        for e in range(1, e_search + 1):
            if sg_member(tuple(p**e * a for a in h), C)[0]:
                items.append(PIItem(h, True, "interior", e=e))
                break
        else:  # pragma: no cover - interior points always reach C
            raise ResourceCapError(f"no e <= {e_search} with p^e*{list(h)} in C")
    return PITestReport(p, items)


def sg_classify_fcoherent(C: AffineSemigroup, p: int, e_cap: int = DEFAULT_ECAP) -> FCoherenceVerdict:
    from .polyring import PrimeChar

    PrimeChar(p)
    e = sg_pi_sandwich_certificate(C, p, e_cap)
    if e is not None:
        return FCoherenceVerdict(
            FCOHERENT, certificate=e,
            evidence=(f"p^e*e_i in C for all i with e={e}: k[x_i^{p**e}] ⊆ k[C] ⊆ k[x] is a purely "
                      f"inseparable tower inside a polynomial ring"),
        )
    if C.dim > 2:
        return FCoherenceVerdict(
            UNKNOWN,
            evidence=f"no sandwich certificate with e <= {e_cap}; normalization test needs d <= 2",
        )
    report = sg_normalization_pi_test(C, p)
    if not report.passed:
        bad = report.failures[0]
        return FCoherenceVerdict(
            NOT_FCOHERENT, witness=bad.h, obstruction=bad.obstruction,
            evidence="the normalization is not purely inseparable over k[C], which F-coherence requires",
            transcript=[i.to_json() for i in report.items],
        )
    if C.dim == 1:
        e = max(i.e for i in report.items)
        return FCoherenceVerdict(
            FCOHERENT, certificate=e,
            evidence=("one-dimensional: the normalization is purely inseparable over k[C] "
                      f"(p^{e} times each Hilbert basis element lies in C)"),
            transcript=[i.to_json() for i in report.items],
        )
    return FCoherenceVerdict(
        UNKNOWN,
        evidence=(f"no sandwich certificate with e <= {e_cap}, yet the normalization is purely "
                  "inseparable over k[C]; neither criterion decides"),
        transcript=[i.to_json() for i in report.items],
    )


# --------------------------------------------------------------------------
# faces and retracts


def sg_faces(C: AffineSemigroup) -> list[Face]:
    """Faces of cone(C): origin, rays, two-dimensional faces (rank 3) and the cone itself."""
    _require_small(C)
    geo = C._geo
    geo.require_cone()
    every = frozenset(range(len(geo.normals)))

    def rays_on(T):
        return tuple(_desc(geo.ray_vector(r) for r in geo.rays if all(_dot(geo.normals[j], r) == 0 for j in T)))

    faces = [Face(every, (), 0)]
    if geo.r == 1:
        faces.append(Face(frozenset(), rays_on(frozenset()), 1))
        return faces
    for r in sorted(geo.rays, key=geo.ray_vector, reverse=True):
        faces.append(Face(geo.tight(r), (geo.ray_vector(r),), 1))
    if geo.r == 3:
        for j in range(len(geo.normals)):
            faces.append(Face(frozenset([j]), rays_on(frozenset([j])), 2))
    faces.append(Face(frozenset(), rays_on(frozenset()), geo.r))
    return faces


def face_from_rays(C: AffineSemigroup, rays: Sequence[Sequence[int]]) -> Face:
    want = tuple(_desc(_primitive(tuple(r)) for r in rays))
    for F in sg_faces(C):
        if F.rays == want:
            return F
    raise PreconditionError(f"no face of the cone has rays {[list(r) for r in want]}")


def in_face(v, C: AffineSemigroup, F: Face) -> bool:
    geo = C._geo
    x = geo.lattice.rational_coords(v)
    if x is None or not geo.in_cone(x):
        return False
    return all(_dot(geo.normals[j], x) == 0 for j in F.tight)


@dataclass
class RetractReport:
    face: Face
    kept: list[Vector]
    killed: list[Vector]
    pairs_checked: int
    multiplicative: bool
    idempotent: bool
    identity_on_face: bool

    @property
    def ok(self) -> bool:
        return self.multiplicative and self.idempotent and self.identity_on_face

    def to_json(self):
        return _jsonable({
            "face": self.face.to_json(),
            "kept_generators": self.kept,
            "killed_generators": self.killed,
            "pairs_checked": self.pairs_checked,
            "multiplicative": self.multiplicative,
            "idempotent": self.idempotent,
            "identity_on_face": self.identity_on_face,
        })


def retraction(v, C: AffineSemigroup, F: Face) -> Vector | None:
    """Image of the monomial ``x^v`` under ``k[C] → k[C ∩ F]``: itself or ``None`` (zero)."""
    v = tuple(v)
    return v if in_face(v, C, F) else None


def sg_retract(C: AffineSemigroup, F: Face, samples: int = 100, seed: int = 0) -> RetractReport:
    """Describe the retraction onto ``k[C ∩ F]`` and self-check it on sampled monomials."""
    if F not in sg_faces(C):
        raise PreconditionError("F is not a face of cone(C)")
    kept = [g for g in C.gens if in_face(g, C, F)]
    killed = [g for g in C.gens if not in_face(g, C, F)]
    rng = random.Random(seed)

    def sample(pool):
        v = [0] * C.dim
        for g in pool:
            k = rng.randint(0, 3)
            v = [a + k * b for a, b in zip(v, g)]
        return tuple(v)

    mult = idem = ident = True
    for i in range(samples):
        # every third pair stays inside the face to exercise the identity branch
        pool = kept if (i % 3 == 0 and kept) else C.gens
        a, b = sample(pool), sample(C.gens if i % 2 else pool)
        ra, rb = retraction(a, C, F), retraction(b, C, F)
        rab = retraction(tuple(x + y for x, y in zip(a, b)), C, F)
        expected = None if ra is None or rb is None else tuple(x + y for x, y in zip(ra, rb))
        mult &= rab == expected
        for v, rv in ((a, ra), (b, rb)):
            if rv is not None:
                idem &= retraction(rv, C, F) == rv
                ident &= rv == v
    for g in kept:
        ident &= retraction(g, C, F) == g
    return RetractReport(F, kept, killed, samples, mult, idem, ident)
