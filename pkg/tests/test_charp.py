import random

import pytest

from fchar.charp import (
    INCONCLUSIVE,
    MEMBER,
    NO_WITNESS,
    NOT_MEMBER,
    TIGHT_CAVEAT,
    WitnessSet,
    bracket_power,
    closure_comparison,
    colon_bracket_identity_check,
    colon_bracket_sides,
    fedder_is_fpure,
    frobenius_closure_ideal,
    frobenius_closure_member,
    frobenius_root,
    probe_monomials,
    tight_closure_member_bounded,
)
from fchar.errors import AmbientMismatchError, PreconditionError, UnsupportedAmbientError
from fchar.groebner import Ideal, QuotientRing, groebner_basis, ideal_member
from fchar.polyring import PolynomialRing
from fchar.verify import identity_instances


def cusp(p=2):
    """k[t^2, t^3] as F_p[a,b]/(a^3 - b^2) with a = t^2, b = t^3."""
    S = PolynomialRing(p, ("a", "b"))
    return S, QuotientRing(S, Ideal.parse(["a^3-b^2"], S), reduced=True, domain=True)


def root_oracle(exps, q):
    """Root of a monomial ideal: each x^a contributes x^(a // q)."""
    return [tuple(x // q for x in a) for a in exps]


def fedder_hypersurface_oracle(f):
    """For a principal J = (f): F-pure iff f^(p-1) has a term outside m^[p]."""
    p = f.ring.p
    g = f ** (p - 1)
    return any(all(a < p for a in e) for e in g.terms())


# --------------------------------------------------------------------------
# bracket powers and roots


def test_bracket_power():
    S = PolynomialRing(3, ("x", "y"))
    I = Ideal.parse(["x+y", "x*y"], S)
    assert [str(g) for g in bracket_power(I, 1).generators] == ["x^3+y^3", "x^3*y^3"]
    assert bracket_power(I, 0) is I
    with pytest.raises(PreconditionError):
        bracket_power(I, -1)


def test_frobenius_root_floors_exponents():
    S = PolynomialRing(2, ("x", "y"))
    # x^2 y^3 = (x y)^2 * y, so the root is (x y), not (x y^2)
    assert [str(g) for g in frobenius_root(Ideal.parse(["x^2*y^3"], S), 1).generators] == ["x*y"]
    # x^2 + x y^2 splits as (x)^2 * 1 + (y)^2 * x
    assert [str(g) for g in frobenius_root(Ideal.parse(["x^2+x*y^2"], S), 1).generators] == ["y", "x"]


@pytest.mark.parametrize("p, e", [(2, 1), (2, 2), (3, 1), (5, 1)])
def test_frobenius_root_monomial_oracle_and_round_trip(p, e):
    S = PolynomialRing(p, ("x", "y", "z"))
    q = p**e
    rng = random.Random(p * 10 + e)
    for _ in range(50 // 4 + 1):
        exps = [tuple(rng.randint(0, 2 * q) for _ in range(3)) for _ in range(rng.randint(1, 3))]
        I = Ideal([S.monomial(a) for a in exps], S)
        root = frobenius_root(I, e)
        assert root.equals(Ideal([S.monomial(b) for b in root_oracle(exps, q)], S))
        # I ⊆ root^[q] and root of a bracket power is the ideal itself
        big = bracket_power(root, e)
        assert all(ideal_member(g, big) for g in I.generators)
        assert frobenius_root(bracket_power(I, e), e).equals(I)


def test_frobenius_root_rejects_quotients():
    S, Q = cusp()
    with pytest.raises(UnsupportedAmbientError):
        frobenius_root(Ideal.parse(["a"], S), 1, Q)
    with pytest.raises(PreconditionError):
        frobenius_root(Ideal.parse(["a"], S), 0)


def test_frobenius_closure_ideal_is_identity_on_polynomial_rings():
    S = PolynomialRing(3, ("x", "y"))
    I = Ideal.parse(["x^2+y", "x*y^2"], S)
    assert frobenius_closure_ideal(I).equals(I)


# --------------------------------------------------------------------------
# closures


def test_cusp_frobenius_member():
    S, Q = cusp()
    v = frobenius_closure_member(S.parse("b"), Ideal.parse(["a"], S), Q, 3)
    assert v.status == MEMBER and v.exponent == 1
    assert [t.result for t in v.transcript] == [False, True, True]
    assert v.to_json()["exponent"] == 1


def test_cusp_tight_member_with_witness():
    S, Q = cusp()
    v = tight_closure_member_bounded(S.parse("b"), Ideal.parse(["a"], S), Q, [S.parse("a")], 1, 4)
    assert v.status == MEMBER
    assert str(v.witness) == "a"
    out = v.to_json()
    assert out["witness"] == {"c": "a", "e_min": 1}
    assert out["caveat"] == TIGHT_CAVEAT


def test_regular_ring_closures_bounded():
    S = PolynomialRing(2, ("x", "y"))
    I = Ideal.parse(["x^2", "y^2"], S)
    xy = S.parse("x*y")
    f = frobenius_closure_member(xy, I, None, 4)
    assert f.status == NOT_MEMBER
    assert len(f.transcript) == 5
    t = tight_closure_member_bounded(xy, I, None, None, 1, 4)
    assert t.status == NO_WITNESS
    assert "witness" in t.to_json() and t.to_json()["witness"] is None


def test_frobenius_closure_on_polynomial_ring_is_membership():
    # Frobenius is flat on a regular ring, so I^F = I
    S = PolynomialRing(3, ("x", "y"))
    rng = random.Random(1)
    for _ in range(15):
        I = Ideal([S.monomial([rng.randint(0, 3), rng.randint(0, 3)]) for _ in range(2)], S)
        x = S.monomial([rng.randint(0, 3), rng.randint(0, 3)])
        v = frobenius_closure_member(x, I, None, 2)
        assert (v.status == MEMBER) == ideal_member(x, I)


def test_non_reduced_quotient_can_be_inconclusive_or_member():
    # nilpotent y: y^p = 0 in F_p[x,y]/(y^2), so y is in the Frobenius closure of (0)
    S = PolynomialRing(2, ("x", "y"))
    Q = QuotientRing(S, Ideal.parse(["y^2"], S))
    v = frobenius_closure_member(S.parse("y"), Ideal.zero(S), Q, 2)
    assert v.status in (MEMBER, INCONCLUSIVE)
    assert v.exponent == 1
    assert v.to_json()["assertions"] == ["ring asserted reduced: False"]


def test_witness_set_default_and_validation():
    S = PolynomialRing(3, ("x", "y"))
    I = Ideal.parse(["x", "y", "x"], S)
    W = WitnessSet.default(I, [S.parse("x*y"), S.zero()])
    assert [str(c) for c in W] == ["1", "x", "y", "x*y"]
    with pytest.raises(PreconditionError):
        WitnessSet(())
    with pytest.raises(PreconditionError):
        WitnessSet((S.zero(),))
    T = PolynomialRing(3, ("z",))
    with pytest.raises(AmbientMismatchError):
        tight_closure_member_bounded(S.parse("x"), I, None, [T.parse("z")])


def test_closure_input_checks():
    S, Q = cusp()
    with pytest.raises(PreconditionError):
        frobenius_closure_member(S.parse("b"), Ideal.parse(["a"], S), Q, 0)
    with pytest.raises(PreconditionError):
        tight_closure_member_bounded(S.parse("b"), Ideal.parse(["a"], S), Q, None, 3, 2)
    T = PolynomialRing(2, ("x",))
    with pytest.raises(AmbientMismatchError):
        frobenius_closure_member(T.parse("x"), Ideal.parse(["a"], S), Q)


def test_closure_comparison_on_cusp():
    S, Q = cusp()
    rep = closure_comparison(Ideal.parse(["a"], S), Q, None, 4, 2)
    assert rep.tensions == []
    assert [str(r.probe) for r in rep.rows] == ["1", "a", "b", "a^2", "a*b", "b^2"]
    statuses = {str(r.probe): (r.frobenius.status, r.tight.status) for r in rep.rows}
    assert statuses["b"] == (MEMBER, MEMBER)
    assert statuses["1"] == (NOT_MEMBER, NO_WITNESS)
    assert rep.to_json()["tensions"] == []


def test_probe_monomials_order():
    S = PolynomialRing(2, ("x", "y", "z"))
    assert [str(m) for m in probe_monomials(S, 1)] == ["1", "x", "y", "z"]
    assert len(probe_monomials(S, 2)) == 10


# --------------------------------------------------------------------------
# Fedder


@pytest.mark.parametrize(
    "p, f, expected",
    [
        (2, "y^2-x^3", False),
        (3, "y^2-x^3", False),
        (5, "y^2-x^3", False),
        (3, "y^2-x^3-x^2", True),
        (2, "y^2-x^3-x^2", False),
        (5, "x*y", True),
        (2, "x^2+y^3+z^5", False),
    ],
)
def test_fedder_hypersurfaces(p, f, expected):
    S = PolynomialRing(p, ("x", "y", "z"))
    g = S.parse(f)
    assert fedder_hypersurface_oracle(g) == expected
    assert fedder_is_fpure(Ideal([g], S)) == expected


def test_fedder_random_hypersurfaces_match_oracle():
    rng = random.Random(9)
    for p in (2, 3, 5):
        S = PolynomialRing(p, ("x", "y"))
        for _ in range(8):
            terms = {}
            for _ in range(rng.randint(1, 3)):
                terms[(rng.randint(0, 3), rng.randint(0, 3))] = rng.randint(1, p - 1)
            terms.pop((0, 0), None)
            f = S.poly(terms)
            if not f:
                continue
            assert fedder_is_fpure(Ideal([f], S)) == fedder_hypersurface_oracle(f)


def test_fedder_complete_intersection():
    # the coordinate axes in 3-space: F_p[x,y,z]/(xy, xz, yz) is Stanley-Reisner, hence F-pure
    S = PolynomialRing(3, ("x", "y", "z"))
    assert fedder_is_fpure(Ideal.parse(["x*y", "x*z", "y*z"], S))


def test_fedder_preconditions():
    S = PolynomialRing(3, ("x",))
    with pytest.raises(PreconditionError):
        fedder_is_fpure(Ideal.parse(["x+1"], S))
    with pytest.raises(PreconditionError):
        fedder_is_fpure(Ideal.parse(["x"], S), p=5)


# --------------------------------------------------------------------------
# flatness identity


def test_identity_hand_case():
    S = PolynomialRing(2, ("x", "y"))
    left, right = colon_bracket_sides(Ideal.parse(["x^2", "x*y"], S), S.parse("y"), 1)
    assert [str(g) for g in left.generators] == ["x^2"]
    assert [str(g) for g in right.generators] == ["x^2"]


def test_identity_random_instances():
    for I, z, e in identity_instances(25, 77):
        assert colon_bracket_identity_check(I, z, e)


def test_identity_with_monomial_data():
    rng = random.Random(4)
    for p in (2, 3):
        S = PolynomialRing(p, ("x", "y"))
        for _ in range(6):
            I = Ideal([S.monomial([rng.randint(0, 3), rng.randint(0, 3)]) for _ in range(2)], S)
            z = S.monomial([rng.randint(0, 2), rng.randint(0, 2)])
            left, right = colon_bracket_sides(I, z, rng.choice([1, 2]))
            assert left.generators == right.generators
            assert groebner_basis(left).generators == left.generators


def test_identity_rejects_quotients():
    S, Q = cusp()
    with pytest.raises(UnsupportedAmbientError):
        colon_bracket_identity_check(Ideal.parse(["a"], S), S.parse("b"), 1, Q)
