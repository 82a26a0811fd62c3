"""Buchberger's algorithm over F_p and the ideal operations built on it.

Everything here works on ideals of a polynomial ring.  Ideals of a quotient
``R = S/J`` are handled through their preimages ``I + J`` in ``S``
(see :class:`QuotientRing`).

The engine is the textbook one: normal selection strategy, the coprime
leading term criterion and the chain criterion, and a final
inter-reduction so that the returned basis is the unique reduced one.
Resource caps are enforced as hard errors.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from operator import add, sub
from typing import Iterable, Sequence

from .errors import AmbientMismatchError, PreconditionError, ResourceCapError
from .polyring import GREVLEX, MonomialOrder, Polynomial, PolynomialRing


@dataclass(frozen=True)
class Caps:
    """Limits for one Gröbner basis run."""

    max_pairs: int = 10_000
    max_degree: int = 60

    def scaled(self, q: int) -> "Caps":
        """Caps for data whose degrees have been multiplied by ``q``."""
        return Caps(self.max_pairs, self.max_degree * q)


DEFAULT_CAPS = Caps()


# --------------------------------------------------------------------------
# raw engine on {exponent: coeff} dicts


def _negkey(order: MonomialOrder):
    cache: dict = {}
    key = order.key

    def nk(e):
        try:
            return cache[e]
        except KeyError:
            v = cache[e] = tuple(-k for k in key(e))
            return v

    return nk


def _divides(a, b) -> bool:
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


class _Engine:
    """State shared by one Buchberger run: the field, the order and the basis."""

    def __init__(self, p: int, order: MonomialOrder):
        self.p = p
        self.order = order
        self.nkey = _negkey(order)
        self.leads: list[tuple] = []
        self.tails: list[list] = []  # terms of each monic element except the lead
        self.polys: list[dict] = []

    def lead(self, f: dict):
        return min(f, key=self.nkey)

    def monic(self, f: dict) -> dict:
        lead = self.lead(f)
        inv = pow(f[lead], -1, self.p)
        if inv == 1:
            return f
        p = self.p
        return {e: c * inv % p for e, c in f.items()}

    def add(self, f: dict) -> int:
        lead = self.lead(f)
        self.leads.append(lead)
        self.tails.append([(e, c) for e, c in f.items() if e != lead])
        self.polys.append(f)
        return len(self.polys) - 1

    def _find_divisor(self, m, active):
        for i in active:
            if _divides(self.leads[i], m):
                return i
        return None

    def reduce(self, f: dict, active: Sequence[int] | None = None, top_only: bool = False) -> dict:
        """Full reduction of ``f`` modulo the (monic) basis elements in ``active``."""
        if active is None:
            active = range(len(self.polys))
        p, nkey = self.p, self.nkey
        f = dict(f)
        heap = [(nkey(e), e) for e in f]
        heapq.heapify(heap)
        rem: dict = {}
        while heap:
            _, m = heapq.heappop(heap)
            c = f.pop(m, 0)
            if not c:
                continue
            i = self._find_divisor(m, active)
            if i is None:
                rem[m] = c
                if top_only:
                    rem.update(f)
                    return rem
                continue
            shift = tuple(map(sub, m, self.leads[i]))
            for e, a in self.tails[i]:
                e2 = tuple(map(add, e, shift))
                v = (f.get(e2, 0) - c * a) % p
                if v:
                    if e2 not in f:
                        heapq.heappush(heap, (nkey(e2), e2))
                    f[e2] = v
                else:
                    f.pop(e2, None)
        return rem

    def spoly(self, i: int, j: int, lcm) -> dict:
        p = self.p
        out: dict = {}
        for idx, sign in ((i, 1), (j, -1)):
            shift = tuple(map(sub, lcm, self.leads[idx]))
            for e, a in self.tails[idx]:
                e2 = tuple(map(add, e, shift))
                v = (out.get(e2, 0) + sign * a) % p
                if v:
                    out[e2] = v
                else:
                    out.pop(e2, None)
        return out


def _buchberger(polys: Iterable[dict], p: int, order: MonomialOrder, caps: Caps) -> list[dict]:
    eng = _Engine(p, order)
    pending: set = set()
    heap: list = []

    def insert(f):
        idx = eng.add(eng.monic(f))
        for i in range(idx):
            lcm = tuple(map(max, eng.leads[i], eng.leads[idx]))
            pending.add((i, idx))
            heapq.heappush(heap, (order.key(lcm), i, idx, lcm))

    inputs = [f for f in polys if f]
    inputs.sort(key=lambda f: order.key(eng.lead(f)))
    for f in inputs:
        h = eng.reduce(f)
        if h:
            insert(h)

    npairs = 0
    while heap:
        _, i, j, lcm = heapq.heappop(heap)
        pending.discard((i, j))
        li, lj = eng.leads[i], eng.leads[j]
        if all(a == 0 or b == 0 for a, b in zip(li, lj)):
            continue
        skip = False
        for k in range(len(eng.leads)):
            if k == i or k == j:
                continue
            if _divides(eng.leads[k], lcm):
                if (min(i, k), max(i, k)) not in pending and (min(j, k), max(j, k)) not in pending:
                    skip = True
                    break
        if skip:
            continue
        npairs += 1
        if npairs > caps.max_pairs:
            raise ResourceCapError(f"Gröbner basis exceeded the cap of {caps.max_pairs} S-pairs")
        if sum(lcm) > caps.max_degree:
            raise ResourceCapError(
                f"Gröbner basis exceeded the degree cap {caps.max_degree} (S-pair of degree {sum(lcm)})"
            )
        h = eng.reduce(eng.spoly(i, j, lcm))
        if h:
            insert(h)

    # minimalize, then inter-reduce
    n = len(eng.leads)
    keep = []
    for i in range(n):
        li = eng.leads[i]
        if any(j != i and _divides(eng.leads[j], li) and (eng.leads[j] != li or j < i) for j in range(n)):
            continue
        keep.append(i)
    reduced = []
    for i in keep:
        others = [j for j in keep if j != i]
        lead = eng.leads[i]
        tail = {e: c for e, c in eng.tails[i]}
        tail = eng.reduce(tail, others)
        tail[lead] = 1
        reduced.append(tail)
    reduced.sort(key=lambda f: order.key(max(f, key=order.key)))
    return reduced


# --------------------------------------------------------------------------
# ideals


def _same_ring(polys: Sequence[Polynomial]) -> PolynomialRing:
    ring = polys[0].ring
    for f in polys[1:]:
        if f.ring != ring:
            raise AmbientMismatchError(f"generators live in {ring} and {f.ring}")
    return ring


class Ideal:
    """A finitely generated ideal of a polynomial ring with cached Gröbner bases."""

    def __init__(self, generators: Iterable[Polynomial], ring: PolynomialRing | None = None):
        gens = tuple(generators)
        if not gens:
            raise PreconditionError("an ideal needs at least one generator (use 0 for the zero ideal)")
        for g in gens:
            if not isinstance(g, Polynomial):
                raise PreconditionError(f"ideal generator {g!r} is not a polynomial")
        r = _same_ring(gens)
        if ring is not None and ring != r:
            raise AmbientMismatchError(f"generators live in {r}, not {ring}")
        self.ring = r
        self.generators = gens
        self._gb: dict[MonomialOrder, tuple[Polynomial, ...]] = {}

    @classmethod
    def parse(cls, texts: Iterable[str], ring: PolynomialRing) -> "Ideal":
        return cls([ring.parse(t) for t in texts], ring)

    @classmethod
    def zero(cls, ring: PolynomialRing) -> "Ideal":
        return cls([ring.zero()], ring)

    @classmethod
    def unit(cls, ring: PolynomialRing) -> "Ideal":
        return cls([ring.one()], ring)

    def groebner_basis(self, order: MonomialOrder = GREVLEX, caps: Caps = DEFAULT_CAPS) -> tuple[Polynomial, ...]:
        gb = self._gb.get(order)
        if gb is None:
            raw = _buchberger((g._terms for g in self.generators), self.ring.p, order, caps)
            gb = tuple(Polynomial._raw(self.ring, f) for f in raw)
            self._gb[order] = gb
        return gb

    def is_zero(self) -> bool:
        return all(g.is_zero() for g in self.generators)

    def is_unit(self, caps: Caps = DEFAULT_CAPS) -> bool:
        gb = self.groebner_basis(GREVLEX, caps)
        return len(gb) == 1 and gb[0].is_constant()

    def __add__(self, other: "Ideal") -> "Ideal":
        if other.ring != self.ring:
            raise AmbientMismatchError(f"{self.ring} vs {other.ring}")
        return Ideal(self.generators + other.generators, self.ring)

    def __mul__(self, other: "Ideal") -> "Ideal":
        return Ideal([f * g for f in self.generators for g in other.generators], self.ring)

    def equals(self, other: "Ideal", order: MonomialOrder = GREVLEX, caps: Caps = DEFAULT_CAPS) -> bool:
        if other.ring != self.ring:
            return False
        return self.groebner_basis(order, caps) == other.groebner_basis(order, caps)

    def __eq__(self, other):
        if not isinstance(other, Ideal):
            return NotImplemented
        return self.equals(other)

    __hash__ = None

    def contains(self, f: Polynomial, caps: Caps = DEFAULT_CAPS) -> bool:
        return normal_form(f, self, GREVLEX, caps).is_zero()

    def __contains__(self, f):
        return self.contains(f)

    def to_json(self) -> list[str]:
        return [str(g) for g in self.generators]

    def __repr__(self):
        return f"Ideal([{', '.join(map(str, self.generators))}], {self.ring})"


@dataclass(frozen=True)
class QuotientRing:
    """``R = ambient / modulus``.  The reduced/domain flags are caller assertions."""

    ambient: PolynomialRing
    modulus: Ideal | None = None
    reduced: bool = False
    domain: bool = False

    def __post_init__(self):
        if self.modulus is not None and self.modulus.ring != self.ambient:
            raise AmbientMismatchError("modulus does not live in the ambient ring")

    @classmethod
    def polynomial(cls, ring: PolynomialRing) -> "QuotientRing":
        return cls(ring, None, reduced=True, domain=True)

    @property
    def is_polynomial(self) -> bool:
        return self.modulus is None or self.modulus.is_zero()

    def lift(self, I: Ideal) -> Ideal:
        """Preimage of ``I R`` in the ambient ring."""
        if I.ring != self.ambient:
            raise AmbientMismatchError(f"{I.ring} vs {self.ambient}")
        if self.is_polynomial:
            return I
        return I + self.modulus

    def to_json(self) -> dict:
        d = self.ambient.to_json()
        d["modulus"] = self.modulus.to_json() if self.modulus is not None else []
        d["asserted_reduced"] = self.reduced
        d["asserted_domain"] = self.domain
        return d


def _as_quotient(ring, ambient: PolynomialRing) -> QuotientRing:
    if ring is None:
        return QuotientRing.polynomial(ambient)
    if isinstance(ring, PolynomialRing):
        return QuotientRing.polynomial(ring)
    return ring


# --------------------------------------------------------------------------
# operations


def groebner_basis(I: Ideal, order: MonomialOrder = GREVLEX, caps: Caps = DEFAULT_CAPS) -> Ideal:
    """Return a new :class:`Ideal` whose generators are the reduced Gröbner basis of ``I``."""
    gb = I.groebner_basis(order, caps)
    out = Ideal(gb or (I.ring.zero(),), I.ring)
    out._gb[order] = gb
    return out


def normal_form(f: Polynomial, I: Ideal, order: MonomialOrder = GREVLEX, caps: Caps = DEFAULT_CAPS) -> Polynomial:
    if f.ring != I.ring:
        raise AmbientMismatchError(f"{f.ring} vs {I.ring}")
    gb = I.groebner_basis(order, caps)
    eng = _Engine(I.ring.p, order)
    for g in gb:
        eng.add(g._terms)
    return Polynomial._raw(f.ring, eng.reduce(f._terms))


def ideal_member(f: Polynomial, I: Ideal, ring: QuotientRing | None = None, caps: Caps = DEFAULT_CAPS) -> bool:
    R = _as_quotient(ring, I.ring)
    return normal_form(f, R.lift(I), GREVLEX, caps).is_zero()


def _divide_exact(h: Polynomial, f: Polynomial) -> Polynomial:
    eng = _Engine(h.ring.p, GREVLEX)
    lead, lc = f.leading_term(GREVLEX)
    inv = pow(lc, -1, h.ring.p)
    eng.add({e: c * inv % h.ring.p for e, c in f._terms.items()})
    p = h.ring.p
    r = dict(h._terms)
    q: dict = {}
    while r:
        m = eng.lead(r)
        if not _divides(lead, m):
            raise ArithmeticError(f"{f} does not divide {h}")
        c = r[m]
        shift = tuple(map(sub, m, lead))
        q[shift] = c * inv % p
        for e, a in f._terms.items():
            e2 = tuple(map(add, e, shift))
            v = (r.get(e2, 0) - q[shift] * a) % p
            if v:
                r[e2] = v
            else:
                r.pop(e2, None)
    return Polynomial._raw(h.ring, q)


def ideal_intersect(I: Ideal, J: Ideal, caps: Caps = DEFAULT_CAPS) -> Ideal:
    """``I ∩ J`` via ``T*I + (1-T)*J`` and elimination of the tag variable ``T``."""
    if I.ring != J.ring:
        raise AmbientMismatchError(f"{I.ring} vs {J.ring}")
    ring = I.ring
    if I.is_zero() or J.is_zero():
        return Ideal.zero(ring)
    (tag,) = ring.fresh_names("T", 1)
    big = ring.extend([tag], front=True)
    T = big.gen(tag)
    gens = [T * g.to_ring(big) for g in I.generators if g]
    gens += [(1 - T) * h.to_ring(big) for h in J.generators if h]
    K = eliminate(Ideal(gens, big), [tag], caps)
    return Ideal([g.to_ring(ring) for g in K.generators], ring)


def eliminate(I: Ideal, drop: Iterable[str], caps: Caps = DEFAULT_CAPS) -> Ideal:
    """``I ∩ F_p[remaining variables]``, returned as an ideal of the same ring."""
    ring = I.ring
    drop = list(drop)
    idx = [ring.index(v) for v in drop]
    if len(set(idx)) != len(idx):
        raise PreconditionError("duplicate variables in elimination set")
    if not idx:
        return groebner_basis(I, GREVLEX, caps)
    perm = idx + [i for i in range(ring.nvars) if i not in idx]
    order = MonomialOrder.elimination(len(idx), perm)
    gb = I.groebner_basis(order, caps)
    kept = [g for g in gb if not any(any(e[i] for i in idx) for e in g._terms)]
    if not kept:
        return Ideal.zero(ring)
    # re-key to the default order so the result is canonical
    return groebner_basis(Ideal(kept, ring), GREVLEX, caps)


def ideal_colon(I: Ideal, f, ring: QuotientRing | None = None, caps: Caps = DEFAULT_CAPS) -> Ideal:
    """``(I : f)``; ``f`` may be a polynomial or an ideal.

    In a quotient ring the result is the preimage ``(I + J : f)``.
    """
    R = _as_quotient(ring, I.ring)
    base = R.lift(I)
    if isinstance(f, Ideal):
        gens = [g for g in f.generators if g]
        if not gens:
            return Ideal.unit(I.ring)
        result = ideal_colon(base, gens[0], None, caps)
        for g in gens[1:]:
            result = ideal_intersect(result, ideal_colon(base, g, None, caps), caps)
        return groebner_basis(result, GREVLEX, caps)
    if f.ring != I.ring:
        raise AmbientMismatchError(f"{f.ring} vs {I.ring}")
    if f.is_zero():
        raise PreconditionError("colon by the zero polynomial")
    if normal_form(f, base, GREVLEX, caps).is_zero():
        return Ideal.unit(I.ring)
    if base.is_zero():
        return Ideal.zero(I.ring)
    K = ideal_intersect(base, Ideal([f], I.ring), caps)
    if K.is_zero():
        return Ideal.zero(I.ring)
    return groebner_basis(Ideal([_divide_exact(h, f) for h in K.generators], I.ring), GREVLEX, caps)


# --------------------------------------------------------------------------
# subalgebras


class Subalgebra:
    """The subalgebra ``k[g_1, ..., g_m]`` of a polynomial ring.

    Membership uses tag variables ``y_i`` and the ideal ``(y_i - g_i)`` in an
    elimination order where the original variables are greatest: ``f`` is a
    member iff its normal form involves only the tags, and that normal form
    is then a representation of ``f`` in the ``g_i``.
    """

    def __init__(self, gens: Sequence[Polynomial], caps: Caps = DEFAULT_CAPS, tag: str = "y"):
        gens = list(gens)
        if not gens:
            raise PreconditionError("a subalgebra needs at least one generator")
        ring = _same_ring(gens)
        for g in gens:
            if g.is_constant():
                raise PreconditionError(f"subalgebra generator {g} is constant")
        self.ring = ring
        self.gens = tuple(gens)
        names = [f"{tag}{i + 1}" for i in range(len(gens))]
        if any(n in ring for n in names):
            names = ring.fresh_names(tag + "_", len(gens))
        self.tag_ring = PolynomialRing(ring.p, tuple(names))
        self.big = ring.extend(names)
        self.order = MonomialOrder.elimination(ring.nvars)
        ideal = Ideal([self.big.gen(n) - g.to_ring(self.big) for n, g in zip(names, gens)], self.big)
        gb = ideal.groebner_basis(self.order, caps)
        self._eng = _Engine(ring.p, self.order)
        for g in gb:
            self._eng.add(g._terms)
        self._n = ring.nvars

    def lift(self, f: Polynomial) -> Polynomial:
        return f.to_ring(self.big)

    def normal_form(self, f: Polynomial) -> Polynomial:
        """Normal form of a polynomial of the big ring (original variables + tags)."""
        if f.ring != self.big:
            f = f.to_ring(self.big)
        return Polynomial._raw(self.big, self._eng.reduce(f._terms))

    def representation(self, nf: Polynomial) -> Polynomial | None:
        """The tag-ring polynomial for a normal form, or ``None`` if it involves original variables."""
        n = self._n
        if any(any(e[:n]) for e in nf._terms):
            return None
        return Polynomial._raw(self.tag_ring, {e[n:]: c for e, c in nf._terms.items()})

    def member(self, f: Polynomial) -> tuple[bool, Polynomial | None]:
        if f.ring != self.ring:
            raise AmbientMismatchError(f"{f.ring} vs {self.ring}")
        rep = self.representation(self.normal_form(f))
        return rep is not None, rep

    def evaluate(self, rep: Polynomial) -> Polynomial:
        """Substitute the generators back into a representation."""
        return rep.substitute(dict(zip(self.tag_ring.vars, self.gens)), self.ring)


def subalgebra_member(f: Polynomial, gens: Sequence[Polynomial], caps: Caps = DEFAULT_CAPS) -> tuple[bool, Polynomial | None]:
    """Decide ``f ∈ k[gens]``; on success also return the representation in tags ``y1, y2, ...``."""
    return Subalgebra(gens, caps).member(f)
