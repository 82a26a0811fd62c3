"""One-dimensional rings: numerical semigroup rings and curve algebras k[g_1(u), ..., g_m(u)].

A one-dimensional reduced excellent ring is F-coherent exactly when its
normalization is purely inseparable over it.  For a numerical semigroup
ring the normalization is k[t] and ``t^(p^e)`` lands in the ring as soon as
``p^e`` passes the Frobenius number, so the answer is always yes.  For a
curve algebra A with normalization k[u] it suffices to find one ``e`` with
``u^(p^e) ∈ A``; only a bounded window of ``e`` is searched.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property, reduce

from .errors import NormalizationUnvalidatedError, PreconditionError
from .groebner import DEFAULT_CAPS, Caps, Subalgebra
from .polyring import Polynomial, PolynomialRing, PrimeChar, frobenius_power
from .semigroup import FCOHERENT, NOT_FCOHERENT, UNKNOWN, AperySolver, FCoherenceVerdict

PURELY_INSEPARABLE = "PurelyInseparable"
NO_CERTIFICATE = "NoCertificateUpToBound"
DEFAULT_CURVE_EMAX = 5


@dataclass(frozen=True)
class NumericalSemigroup:
    gens: tuple[int, ...]

    def __post_init__(self):
        gens = tuple(sorted(set(int(g) for g in self.gens)))
        if not gens or gens[0] <= 0:
            raise PreconditionError("numerical semigroup generators must be positive integers")
        if reduce(math.gcd, gens) != 1:
            raise PreconditionError(f"generators {list(gens)} have gcd {reduce(math.gcd, gens)} != 1")
        object.__setattr__(self, "gens", gens)

    @cached_property
    def _solver(self) -> AperySolver:
        return AperySolver(self.gens)

    @property
    def frobenius_number(self) -> int:
        return self._solver.frobenius_number

    @cached_property
    def gaps(self) -> tuple[int, ...]:
        return tuple(n for n in range(self.frobenius_number + 1) if not self._solver.contains(n))

    def __contains__(self, n: int) -> bool:
        return self._solver.contains(n)

    def representation(self, n: int) -> list[int] | None:
        return self._solver.representation(n)

    def to_json(self):
        return {"gens": list(self.gens), "frobenius_number": self.frobenius_number, "gaps": list(self.gaps)}


def ns_classify_fcoherent(S: NumericalSemigroup, p: int) -> FCoherenceVerdict:
    """Always FCoherent: ``e`` is the least exponent with ``p^e ∈ S``."""
    PrimeChar(p)
    e = 0
    while p**e not in S:
        e += 1
    return FCoherenceVerdict(
        FCOHERENT,
        certificate=e,
        evidence=(
            f"t^{p**e} lies in k[S], so the normalization k[t] is purely inseparable over k[S]; "
            "a numerical semigroup ring is never NotFCoherent since p^e eventually exceeds "
            f"the Frobenius number {S.frobenius_number}"
        ),
    )


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CurvePresentation:
    """``A = k[g_1(u), ..., g_m(u)] ⊆ k[u]`` with k[u] asserted to be its normalization."""

    p: int
    gens: tuple[Polynomial, ...]
    normalization_assertion: bool = True

    def __post_init__(self):
        PrimeChar(self.p)
        gens = tuple(self.gens)
        if not gens:
            raise PreconditionError("a curve presentation needs at least one generator")
        ring = gens[0].ring
        if ring.nvars != 1 or ring.p != self.p:
            raise PreconditionError(f"curve generators must live in F_{self.p}[u] (one variable)")
        for g in gens:
            if g.ring != ring:
                raise PreconditionError("curve generators live in different rings")
            if g.is_constant():
                raise PreconditionError(f"curve generator {g} is constant")
        object.__setattr__(self, "gens", gens)

    @classmethod
    def from_json(cls, data, p: int | None = None) -> "CurvePresentation":
        try:
            char = int(p if p is not None else data["char"])
            var = data.get("var", "u")
            ring = PolynomialRing(char, (var,))
            gens = tuple(ring.parse(t) for t in data["gens_in_u"])
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, PreconditionError):
                raise
            raise PreconditionError(f"bad curve description: {exc!r}") from None
        return cls(char, gens, bool(data.get("normalization", True)))

    @property
    def ring(self) -> PolynomialRing:
        return self.gens[0].ring

    @property
    def u(self) -> Polynomial:
        return self.ring.gen(self.ring.vars[0])

    def to_json(self):
        return {"char": self.p, "gens_in_u": [str(g) for g in self.gens], "var": self.ring.vars[0]}


def validate_normalization(Cv: CurvePresentation, algebra: Subalgebra | None = None, max_degree: int = 3) -> Polynomial:
    """Check that k[u] is the normalization of A by finding ``c ∈ A`` with ``c u ∈ A``.

    ``u`` is integral over A (any nonconstant generator gives a monic
    equation), so ``u ∈ Frac(A)`` is what remains; the candidates ``c`` are
    products of at most ``max_degree`` generators (1 included).
    """
    if not Cv.normalization_assertion:
        raise NormalizationUnvalidatedError("k[u] is not asserted to be the normalization")
    A = algebra or Subalgebra(Cv.gens)
    u = Cv.u
    for d in range(max_degree + 1):
        for combo in itertools.combinations_with_replacement(Cv.gens, d):
            c = Cv.ring.one()
            for g in combo:
                c = c * g
            if A.member(c * u)[0]:
                return c
    raise NormalizationUnvalidatedError(
        f"no product of <= {max_degree} generators c with c*u in A: k[u] is not confirmed as the normalization"
    )


@dataclass
class CurvePIResult:
    status: str
    e_max: int
    e: int | None = None
    representation: Polynomial | None = None
    conductor_witness: Polynomial | None = None
    regular: bool = False
    transcript: list[dict] = field(default_factory=list)

    def to_json(self):
        return {
            "status": self.status,
            "e_max": self.e_max,
            "e": self.e,
            "representation": str(self.representation) if self.representation is not None else None,
            "conductor_witness": str(self.conductor_witness) if self.conductor_witness is not None else None,
            "regular": self.regular,
            "transcript": self.transcript,
        }


def curve_pi_normalization_test(
    Cv: CurvePresentation, e_max: int = DEFAULT_CURVE_EMAX, caps: Caps = DEFAULT_CAPS
) -> CurvePIResult:
    """Search ``e <= e_max`` with ``u^(p^e) ∈ A``.

    Since Frobenius is a ring map, ``u^(p^e) ∈ A`` for the single algebra
    generator ``u`` makes all of k[u] purely inseparable over A.  Normal forms
    are propagated as ``NF(u^(p^e)) = NF(NF(u^(p^(e-1)))^p)`` with the
    ``p``-th power taken termwise.
    """
    if e_max < 1:
        raise PreconditionError("e_max must be >= 1")
    A = Subalgebra(Cv.gens, caps)
    c = validate_normalization(Cv, A)
    nf = A.normal_form(A.lift(Cv.u))
    rep = A.representation(nf)
    if rep is not None:
        return CurvePIResult(PURELY_INSEPARABLE, e_max, 0, rep, c, regular=True,
                             transcript=[{"e": 0, "member": True}])
    transcript = []
    for e in range(1, e_max + 1):
        nf = A.normal_form(frobenius_power(nf, 1))
        rep = A.representation(nf)
        transcript.append({"e": e, "member": rep is not None})
        if rep is not None:
            target = frobenius_power(Cv.u, e)
            if A.evaluate(rep) != target:  # pragma: no cover - engine invariant
                raise AssertionError(f"representation {rep} does not evaluate to {target}")
            nxt = A.representation(A.normal_form(frobenius_power(nf, 1)))
            transcript.append({"e": e + 1, "member": nxt is not None, "spot_check": True})
            return CurvePIResult(PURELY_INSEPARABLE, e_max, e, rep, c, transcript=transcript)
    return CurvePIResult(NO_CERTIFICATE, e_max, conductor_witness=c, transcript=transcript)


def curve_classify_fcoherent(
    Cv: CurvePresentation,
    e_max: int = DEFAULT_CURVE_EMAX,
    obstruction: dict | None = None,
    caps: Caps = DEFAULT_CAPS,
) -> FCoherenceVerdict:
    """FCoherent on a purely inseparable certificate; otherwise Unknown.

    The bounded search cannot rule out every ``e``, so NotFCoherent is only
    returned when the caller hands in a finite obstruction argument, which is
    recorded verbatim and not checked.
    """
    res = curve_pi_normalization_test(Cv, e_max, caps)
    if res.status == PURELY_INSEPARABLE:
        return FCoherenceVerdict(
            FCOHERENT,
            certificate=res.e,
            evidence=f"u^{Cv.p ** res.e} = {res.representation} in the generators y_i",
            transcript=res.transcript,
        )
    if obstruction is not None:
        return FCoherenceVerdict(
            NOT_FCOHERENT,
            witness="u",
            obstruction={"caller_supplied": True, **obstruction},
            evidence="caller-supplied obstruction: the normalization k[u] is not purely inseparable over A",
            transcript=res.transcript,
        )
    return FCoherenceVerdict(
        UNKNOWN,
        evidence=f"u^(p^e) not in A for e = 1..{e_max}; a bounded search cannot exclude larger e",
        transcript=res.transcript,
    )
