"""Bracket powers, Frobenius roots and closure membership in characteristic p.

Closure membership is only ever decided on a finite window of exponents
``e``, so the verdicts are bounded evidence:

* Frobenius closure: ``x`` is reported a member as soon as
  ``x^q ∈ I^[q] + J`` for one ``q = p^e``.  In a reduced ring this persists
  for every larger ``q``; the next exponent is spot-checked.
* Tight closure: a witness ``c`` must satisfy ``c x^q ∈ I^[q] + J`` for
  *every* exponent in the window.  Failing to find one is not a disproof.

Witnesses are trusted to avoid every minimal prime; that status is the
caller's assertion and is echoed in the verdict.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import AmbientMismatchError, PreconditionError, UnsupportedAmbientError
from .groebner import (
    DEFAULT_CAPS,
    Caps,
    Ideal,
    QuotientRing,
    _as_quotient,
    groebner_basis,
    ideal_colon,
    normal_form,
)
from .polyring import GREVLEX, Polynomial, PolynomialRing, _grevlex_key, frobenius_power

MEMBER = "Member"
NOT_MEMBER = "NotMemberUpToBound"
NO_WITNESS = "NoWitnessFoundUpToBound"
INCONCLUSIVE = "Inconclusive"

TIGHT_CAVEAT = (
    "bounded evidence only: Member means one witness worked for every exponent "
    "in the tested window, not for all large q; NoWitnessFoundUpToBound is not "
    "a proof of non-membership"
)
WITNESS_ASSERTION = "witnesses are caller-asserted to lie outside every minimal prime (not verified)"

DEFAULT_EMAX = 4


@dataclass(frozen=True)
class TranscriptEntry:
    e: int
    condition: str
    result: bool

    def to_json(self):
        return {"e": self.e, "condition": self.condition, "result": self.result}


@dataclass
class ClosureVerdict:
    status: str
    kind: str
    e_max: int
    e_min: int = 0
    exponent: int | None = None
    witness: Polynomial | None = None
    transcript: list[TranscriptEntry] = field(default_factory=list)
    caveat: str | None = None
    assertions: list[str] = field(default_factory=list)

    @property
    def is_member(self) -> bool:
        return self.status == MEMBER

    def to_json(self) -> dict:
        out = {
            "status": self.status,
            "closure": self.kind,
            "e_max": self.e_max,
            "witness": None,
            "transcript": [t.to_json() for t in self.transcript],
        }
        if self.kind == "frobenius":
            out["exponent"] = self.exponent
        else:
            out["e_min"] = self.e_min
            if self.witness is not None:
                out["witness"] = {"c": str(self.witness), "e_min": self.e_min}
        if self.caveat:
            out["caveat"] = self.caveat
        if self.assertions:
            out["assertions"] = list(self.assertions)
        return out


@dataclass(frozen=True)
class WitnessSet:
    """Candidate test elements, asserted by the caller to lie in R⁰."""

    candidates: tuple[Polynomial, ...]

    def __post_init__(self):
        cands = tuple(self.candidates)
        if not cands:
            raise PreconditionError("the witness set is empty")
        for c in cands:
            if c.is_zero():
                raise PreconditionError("the zero polynomial cannot be a witness")
        if len({c.ring for c in cands}) != 1:
            raise AmbientMismatchError("witnesses live in different rings")
        object.__setattr__(self, "candidates", cands)

    @classmethod
    def default(cls, I: Ideal, extras: Iterable[Polynomial] = ()) -> "WitnessSet":
        """``{1} ∪ generators of I ∪ extras``, deduplicated, zeros dropped."""
        seen, out = set(), []
        for c in itertools.chain([I.ring.one()], I.generators, extras):
            if c and c not in seen:
                seen.add(c)
                out.append(c)
        return cls(tuple(out))

    def __iter__(self):
        return iter(self.candidates)


# --------------------------------------------------------------------------


def bracket_power(I: Ideal, e: int, ring: QuotientRing | None = None) -> Ideal:
    """``I^[q]`` with ``q = p^e``: the ideal of ``q``-th powers of the generators."""
    if not isinstance(e, int) or e < 0:
        raise PreconditionError("bracket exponent must be a non-negative integer")
    if ring is not None:
        _as_quotient(ring, I.ring).lift(I)  # ambient check
    if e == 0:
        return I
    return Ideal([frobenius_power(g, e) for g in I.generators], I.ring)


def frobenius_root(I: Ideal, e: int, ring: QuotientRing | None = None, caps: Caps = DEFAULT_CAPS) -> Ideal:
    """Smallest ideal ``K`` with ``I ⊆ K^[q]``, in a polynomial ambient.

    Each generator is split as ``f = Σ_μ f_μ^q x^μ`` over ``μ ∈ [0, q)^n``;
    over F_p the ``q``-th root of a coefficient is the coefficient itself, so
    a term ``c x^a`` contributes ``c x^(a div q)`` to ``f_(a mod q)``.
    """
    R = _as_quotient(ring, I.ring)
    if not R.is_polynomial:
        raise UnsupportedAmbientError("Frobenius roots are only available in polynomial rings")
    if not isinstance(e, int) or e < 1:
        raise PreconditionError("root exponent must be an integer >= 1")
    q = I.ring.p**e
    gens = []
    for g in I.generators:
        pieces: dict[tuple, dict] = {}
        for a, c in g._terms.items():
            mu = tuple(x % q for x in a)
            pieces.setdefault(mu, {})[tuple(x // q for x in a)] = c
        gens.extend(Polynomial._raw(I.ring, t) for t in pieces.values())
    gens = gens or [I.ring.zero()]
    return groebner_basis(Ideal(gens, I.ring), GREVLEX, caps)


def frobenius_closure_ideal(I: Ideal, e: int = 1, caps: Caps = DEFAULT_CAPS) -> Ideal:
    """Frobenius closure of ``I`` in a polynomial ring, as ``root_q(I^[q])``.

    Frobenius is flat on regular rings, so this returns ``I`` itself; it is
    offered for symmetry with the quotient-ring membership test.
    """
    return frobenius_root(bracket_power(I, e), e, None, caps)


class _BracketCache:
    """Preimages ``I^[q] + J`` per exponent, so each Gröbner basis is built once."""

    def __init__(self, I: Ideal, R: QuotientRing, caps: Caps):
        self.I, self.R, self.caps = I, R, caps
        self._ideals: dict[int, Ideal] = {}

    def contains(self, f: Polynomial, e: int) -> bool:
        if e not in self._ideals:
            self._ideals[e] = self.R.lift(bracket_power(self.I, e))
        q = self.I.ring.p**e
        return normal_form(f, self._ideals[e], GREVLEX, self.caps.scaled(q)).is_zero()


def _check_inputs(x: Polynomial, I: Ideal, R: QuotientRing):
    if x.ring != I.ring:
        raise AmbientMismatchError(f"{x.ring} vs {I.ring}")
    R.lift(I)


def _ring_assertions(R: QuotientRing) -> list[str]:
    if R.is_polynomial:
        return []
    return [f"ring asserted reduced: {R.reduced}"]


def frobenius_closure_member(
    x: Polynomial,
    I: Ideal,
    ring: QuotientRing | None = None,
    e_max: int = DEFAULT_EMAX,
    caps: Caps = DEFAULT_CAPS,
) -> ClosureVerdict:
    """Test ``x ∈ I^F`` by checking ``x^q ∈ I^[q] + J`` for ``e = 0 .. e_max``."""
    R = _as_quotient(ring, I.ring)
    _check_inputs(x, I, R)
    if e_max < 1:
        raise PreconditionError("e_max must be >= 1")
    cache = _BracketCache(I, R, caps)
    transcript = []
    for e in range(e_max + 1):
        ok = cache.contains(frobenius_power(x, e), e)
        transcript.append(TranscriptEntry(e, f"x^(p^{e}) in I^[p^{e}]", ok))
        if ok:
            again = cache.contains(frobenius_power(x, e + 1), e + 1)
            transcript.append(TranscriptEntry(e + 1, f"spot-check x^(p^{e + 1}) in I^[p^{e + 1}]", again))
            status = MEMBER if again else INCONCLUSIVE
            return ClosureVerdict(status, "frobenius", e_max, exponent=e, transcript=transcript,
                                  assertions=_ring_assertions(R))
    return ClosureVerdict(NOT_MEMBER, "frobenius", e_max, transcript=transcript, assertions=_ring_assertions(R))


def tight_closure_member_bounded(
    x: Polynomial,
    I: Ideal,
    ring: QuotientRing | None = None,
    witnesses: WitnessSet | Sequence[Polynomial] | None = None,
    e_min: int = 1,
    e_max: int = DEFAULT_EMAX,
    caps: Caps = DEFAULT_CAPS,
) -> ClosureVerdict:
    """Look for ``c`` in the witness set with ``c x^q ∈ I^[q] + J`` for all ``e`` in ``[e_min, e_max]``."""
    R = _as_quotient(ring, I.ring)
    _check_inputs(x, I, R)
    if not 0 <= e_min <= e_max:
        raise PreconditionError("need 0 <= e_min <= e_max")
    if witnesses is None:
        W = WitnessSet.default(I)
    elif isinstance(witnesses, WitnessSet):
        W = witnesses
    else:
        W = WitnessSet(tuple(witnesses))
    if W.candidates[0].ring != I.ring:
        raise AmbientMismatchError("witnesses do not live in the ideal's ring")
    cache = _BracketCache(I, R, caps)
    powers = {e: frobenius_power(x, e) for e in range(e_min, e_max + 1)}
    transcript = []
    assertions = _ring_assertions(R) + [WITNESS_ASSERTION]
    for c in W:
        good = True
        for e in range(e_min, e_max + 1):
            ok = cache.contains(c * powers[e], e)
            transcript.append(TranscriptEntry(e, f"({c})*x^(p^{e}) in I^[p^{e}]", ok))
            if not ok:
                good = False
                break
        if good:
            return ClosureVerdict(MEMBER, "tight", e_max, e_min, witness=c, transcript=transcript,
                                  caveat=TIGHT_CAVEAT, assertions=assertions)
    return ClosureVerdict(NO_WITNESS, "tight", e_max, e_min, transcript=transcript,
                          caveat=TIGHT_CAVEAT, assertions=assertions)


# --------------------------------------------------------------------------


def _in_frobenius_power_of_max(f: Polynomial, p: int) -> bool:
    # m^[p] = (x_1^p, ..., x_n^p) is monomial: test termwise
    return all(any(a >= p for a in e) for e in f._terms)


def fedder_colon(J: Ideal, caps: Caps = DEFAULT_CAPS) -> Ideal:
    """``(J^[p] : J)`` in the ambient polynomial ring."""
    p = J.ring.p
    gens = [g for g in J.generators if g]
    if not gens:
        return Ideal.unit(J.ring)
    return ideal_colon(bracket_power(J, 1), Ideal(gens, J.ring), None, caps.scaled(p))


def fedder_is_fpure(J: Ideal, p: int | None = None, caps: Caps = DEFAULT_CAPS) -> bool:
    """Fedder's criterion at the origin: ``F_p[x]/J`` is F-pure iff ``(J^[p] : J) ⊄ m^[p]``."""
    if p is not None and p != J.ring.p:
        raise PreconditionError(f"characteristic {p} does not match the ring's {J.ring.p}")
    for g in J.generators:
        if g.constant_term():
            raise PreconditionError(f"generator {g} is not in the maximal ideal at the origin")
    colon = fedder_colon(J, caps)
    return not all(_in_frobenius_power_of_max(g, J.ring.p) for g in colon.generators)


def colon_bracket_sides(I: Ideal, z: Polynomial, e: int, caps: Caps = DEFAULT_CAPS) -> tuple[Ideal, Ideal]:
    """Both sides of ``(I : z)^[q] = (I^[q] : z^q)``, each as a reduced Gröbner basis."""
    if z.ring != I.ring:
        raise AmbientMismatchError(f"{z.ring} vs {I.ring}")
    q = I.ring.p**e
    left = groebner_basis(bracket_power(ideal_colon(I, z, None, caps), e), GREVLEX, caps.scaled(q))
    right = groebner_basis(
        ideal_colon(bracket_power(I, e), frobenius_power(z, e), None, caps.scaled(q)), GREVLEX, caps.scaled(q)
    )
    return left, right


def colon_bracket_identity_check(
    I: Ideal, z: Polynomial, e: int, ring: QuotientRing | None = None, caps: Caps = DEFAULT_CAPS
) -> bool:
    """Compute both sides independently and compare reduced Gröbner bases (polynomial ambients only)."""
    R = _as_quotient(ring, I.ring)
    if not R.is_polynomial:
        raise UnsupportedAmbientError("the identity check needs a polynomial (regular) ambient")
    left, right = colon_bracket_sides(I, z, e, caps)
    return left.generators == right.generators


# --------------------------------------------------------------------------


@dataclass
class ProbeRow:
    probe: Polynomial
    frobenius: ClosureVerdict
    tight: ClosureVerdict

    @property
    def tension(self) -> bool:
        return self.tight.status == MEMBER and self.frobenius.status == NOT_MEMBER

    def to_json(self):
        return {
            "probe": str(self.probe),
            "frobenius": self.frobenius.status,
            "frobenius_exponent": self.frobenius.exponent,
            "tight": self.tight.status,
            "tight_witness": str(self.tight.witness) if self.tight.witness is not None else None,
            "tension": self.tension,
        }


@dataclass
class ComparisonReport:
    rows: list[ProbeRow]
    e_max: int

    @property
    def tensions(self) -> list[ProbeRow]:
        return [r for r in self.rows if r.tension]

    def to_json(self):
        return {
            "e_max": self.e_max,
            "probes": [r.to_json() for r in self.rows],
            "tensions": [str(r.probe) for r in self.tensions],
            "note": "a tension is bounded evidence only (tight Member while Frobenius NotMemberUpToBound), never a refutation",
        }


def probe_monomials(ring: PolynomialRing, degree: int) -> list[Polynomial]:
    """All monomials of total degree ``<= degree``, by degree then grevlex descending."""
    out = []
    for d in range(degree + 1):
        exps = [e for e in itertools.product(range(d + 1), repeat=ring.nvars) if sum(e) == d]
        exps.sort(key=_grevlex_key, reverse=True)
        out.extend(ring.monomial(e) for e in exps)
    return out


def closure_comparison(
    I: Ideal,
    ring: QuotientRing | None = None,
    witnesses: WitnessSet | Sequence[Polynomial] | None = None,
    e_max: int = DEFAULT_EMAX,
    probe_degree: int = 2,
    probes: Sequence[Polynomial] | None = None,
    caps: Caps = DEFAULT_CAPS,
) -> ComparisonReport:
    """Compare Frobenius and tight closure verdicts on probe elements.

    Intended for rings the caller believes F-coherent, where the two closures
    agree; any probe that is a tight member but not a Frobenius member within
    the window is flagged.
    """
    R = _as_quotient(ring, I.ring)
    if probes is None:
        probes = probe_monomials(I.ring, probe_degree)
    rows = []
    for x in probes:
        fv = frobenius_closure_member(x, I, R, e_max, caps)
        tv = tight_closure_member_bounded(x, I, R, witnesses, 1, e_max, caps)
        rows.append(ProbeRow(x, fv, tv))
    return ComparisonReport(rows, e_max)
