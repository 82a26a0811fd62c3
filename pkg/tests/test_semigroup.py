import itertools
import math
import random
from functools import reduce

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fchar.errors import PreconditionError, ResourceCapError, UnsupportedDimensionError
from fchar.semigroup import (
    FCOHERENT,
    NOT_FCOHERENT,
    UNKNOWN,
    AffineSemigroup,
    AperySolver,
    FCoherenceVerdict,
    face_from_rays,
    hermite_normal_form,
    retraction,
    sg_classify_fcoherent,
    sg_cone,
    sg_faces,
    sg_group,
    sg_hilbert_basis,
    sg_is_normal,
    sg_member,
    sg_normalization_pi_test,
    sg_pi_sandwich_certificate,
    sg_retract,
    sg_saturation,
)

QUARTIC_GAP = AffineSemigroup(2, ((4, 0), (3, 1), (1, 3), (0, 4)))
QUARTIC_21 = AffineSemigroup(2, ((4, 0), (2, 1), (1, 2), (0, 4)))
SAMPLES = [
    QUARTIC_GAP,
    QUARTIC_21,
    AffineSemigroup(2, ((2, 0), (1, 1), (0, 2))),
    AffineSemigroup(2, ((3, 0), (1, 1), (0, 5))),
    AffineSemigroup(2, ((2, 1), (1, 3))),
    AffineSemigroup(2, ((1, 0), (1, 2), (1, 5))),
    AffineSemigroup(1, ((2,), (3,))),
    AffineSemigroup(1, ((4,), (6,))),
    AffineSemigroup(3, ((2, 0, 0), (0, 2, 0), (0, 0, 2), (1, 1, 1))),
    AffineSemigroup(3, ((1, 1, 0), (0, 1, 1), (2, 2, 0))),
    AffineSemigroup(3, ((3, 0, 0), (0, 3, 0), (0, 0, 3), (1, 1, 1), (2, 1, 0))),
]


def enumerate_semigroup(C, bound):
    """All elements of C with coordinate sum <= bound, by breadth-first closure."""
    seen = {tuple(0 for _ in range(C.dim))}
    frontier = list(seen)
    while frontier:
        nxt = []
        for v in frontier:
            for g in C.gens:
                w = tuple(a + b for a, b in zip(v, g))
                if sum(w) <= bound and w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return seen


def box(dim, bound):
    return [v for v in itertools.product(range(bound + 1), repeat=dim) if sum(v) <= bound]


def saturation_oracle(C, small, big):
    """Points of C_sat with coordinate sum <= small: differences in C, with a multiple in C."""
    E = enumerate_semigroup(C, big)
    out = set()
    for v in box(C.dim, small):
        if not any(v):
            continue
        in_group = any(tuple(a + b for a, b in zip(v, w)) in E for w in E if sum(w) <= big - sum(v))
        in_cone = any(tuple(k * a for a in v) in E for k in range(1, big // sum(v) + 1))
        if in_group and in_cone:
            out.add(v)
    return out


def irreducibles(S):
    return sorted(
        (v for v in S if not any(
            tuple(a - b for a, b in zip(v, w)) in S for w in S if w != v and all(b <= a for a, b in zip(v, w))
        )),
        reverse=True,
    )


# --------------------------------------------------------------------------
# integer lattices


def test_hnf_shape_and_lattice():
    rng = random.Random(2)
    for _ in range(40):
        n = rng.randint(1, 3)
        rows = [[rng.randint(-6, 6) for _ in range(n)] for _ in range(rng.randint(1, 4))]
        H = hermite_normal_form(rows)
        pivots = [next(i for i, x in enumerate(r) if x) for r in H]
        assert pivots == sorted(set(pivots))
        for i, (r, c) in enumerate(zip(H, pivots)):
            assert r[c] > 0
            assert all(0 <= H[j][c] < r[c] for j in range(i))
        # every input row is an integer combination of H (back substitution)
        for r in rows:
            rest = list(r)
            for h, c in zip(H, pivots):
                k, m = divmod(rest[c], h[c])
                assert m == 0
                rest = [a - k * b for a, b in zip(rest, h)]
            assert not any(rest)
        # same index: for full rank, |det| matches the gcd of the maximal minors
        if len(H) == n:
            minors = [abs(_det([rows[i] for i in idx])) for idx in itertools.combinations(range(len(rows)), n)]
            assert reduce(math.gcd, minors) == math.prod(h[c] for h, c in zip(H, pivots))


def _det(M):
    if len(M) == 1:
        return M[0][0]
    return sum((-1) ** j * M[0][j] * _det([r[:j] + r[j + 1:] for r in M[1:]]) for j in range(len(M)))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 30), min_size=1, max_size=4))
def test_apery_solver_against_dynamic_programme(ks):
    S = AperySolver(ks)
    reach = [True] + [False] * 150
    for n in range(1, 151):
        reach[n] = any(n >= k and reach[n - k] for k in ks)
    for n in range(151):
        assert S.contains(n) == reach[n]
        rep = S.representation(n)
        assert (rep is not None) == reach[n]
        if rep is not None:
            assert sum(m * k for m, k in zip(rep, ks)) == n


def test_apery_frobenius_number():
    assert AperySolver([3, 5]).frobenius_number == 7
    assert AperySolver([6, 9, 20]).frobenius_number == 43
    assert AperySolver([1]).frobenius_number == -1


# --------------------------------------------------------------------------
# membership and saturation


@pytest.mark.parametrize("C", SAMPLES, ids=lambda C: str([list(g) for g in C.gens]))
def test_member_against_enumeration(C):
    bound = 40 if C.dim <= 2 else 14
    E = enumerate_semigroup(C, bound)
    for v in box(C.dim, bound):
        ok, mult = sg_member(v, C)
        assert ok == (v in E), v
        if ok:
            assert tuple(sum(m * g[k] for m, g in zip(mult, C.gens)) for k in range(C.dim)) == v


@pytest.mark.parametrize("C", [C for C in SAMPLES if C.dim <= 2] + SAMPLES[8:9],
                         ids=lambda C: str([list(g) for g in C.gens]))
def test_hilbert_basis_against_oracle(C):
    small, big = (8, 40) if C.dim <= 2 else (4, 16)
    assert sorted(sg_hilbert_basis(C), reverse=True) == [
        h for h in irreducibles(saturation_oracle(C, small, big))
    ]


def test_worked_semigroups():
    assert sg_member((2, 2), QUARTIC_GAP) == (False, None)
    assert sg_is_normal(QUARTIC_GAP) == (False, (2, 2))
    assert sg_hilbert_basis(QUARTIC_GAP) == [(4, 0), (3, 1), (2, 2), (1, 3), (0, 4)]
    assert sg_hilbert_basis(QUARTIC_21) == [(1, 0), (0, 1)]
    assert sg_pi_sandwich_certificate(QUARTIC_GAP, 2) == 2


@pytest.mark.parametrize("C", SAMPLES[:6] + SAMPLES[8:], ids=lambda C: str([list(g) for g in C.gens]))
def test_saturation_is_normal(C):
    S = sg_saturation(C)
    assert sg_is_normal(S) == (True, None)
    assert sg_hilbert_basis(S) == sg_hilbert_basis(C)
    assert all(sg_member(g, S)[0] for g in C.gens)


def test_group_and_cone():
    G = sg_group(QUARTIC_GAP)
    assert G.rank == 2
    assert G.contains((1, 3)) and G.contains((-1, 1)) and not G.contains((1, 0))
    assert sg_cone(QUARTIC_GAP).rays == ((1, 0), (0, 1))
    low = AffineSemigroup(3, ((1, 1, 0), (0, 1, 1), (2, 2, 0)))
    assert sg_group(low).rank == 2
    assert not sg_member((1, 0, 0), low)[0]


def test_sandwich_certificate_against_enumeration():
    for C in SAMPLES[:6]:
        for p in (2, 3, 5):
            E = enumerate_semigroup(C, 200)
            want = 0
            for i in range(C.dim):
                unit = [int(j == i) for j in range(C.dim)]
                es = [e for e in range(5) if tuple(p**e * x for x in unit) in E]
                want = None if not es or want is None else max(want, es[0])
            got = sg_pi_sandwich_certificate(C, p, 4)
            assert got == want, (C, p)


# --------------------------------------------------------------------------
# classification


@pytest.mark.parametrize("p", [3, 5, 7])
def test_quartic_gap_unknown_odd_p(p):
    v = sg_classify_fcoherent(QUARTIC_GAP, p)
    assert v.status == UNKNOWN
    assert sg_normalization_pi_test(QUARTIC_GAP, p).passed


@pytest.mark.parametrize("p", [3, 5, 7])
def test_quartic_21_obstruction(p):
    v = sg_classify_fcoherent(QUARTIC_21, p)
    assert v.status == NOT_FCOHERENT
    assert v.witness == (1, 0)
    ob = v.obstruction
    assert (ob["prime"], ob["step"], ob["h_multiple"]) == (2, 4, 1)
    assert "2" in ob["statement"] and "impossible for every e" in ob["statement"]
    # brute force: p^e * (1,0) never lies in C
    for e in range(6):
        assert not sg_member((p**e, 0), QUARTIC_21)[0]


@pytest.mark.parametrize("C", [QUARTIC_GAP, QUARTIC_21])
def test_char_two_certificate(C):
    v = sg_classify_fcoherent(C, 2)
    assert (v.status, v.certificate) == (FCOHERENT, 2)
    assert v.to_json()["certificate"] == {"e": 2}


def test_one_dimensional_and_high_dimensional():
    v = sg_classify_fcoherent(AffineSemigroup(1, ((4,), (6,))), 3)
    assert v.status == FCOHERENT
    w = sg_classify_fcoherent(AffineSemigroup(3, ((2, 0, 0), (0, 2, 0), (0, 0, 2), (1, 1, 1))), 3)
    assert w.status == UNKNOWN
    with pytest.raises(UnsupportedDimensionError):
        sg_normalization_pi_test(SAMPLES[8], 3)


def test_verdict_invariants():
    with pytest.raises(ValueError):
        FCoherenceVerdict(FCOHERENT)
    with pytest.raises(ValueError):
        FCoherenceVerdict(NOT_FCOHERENT, witness=(1, 0))


# --------------------------------------------------------------------------
# faces and retractions


def test_faces_of_plane_cone():
    faces = sg_faces(QUARTIC_GAP)
    assert [(F.dim, F.rays) for F in faces] == [(0, ()), (1, ((1, 0),)), (1, ((0, 1),)), (2, ((1, 0), (0, 1)))]


def test_faces_of_three_dim_cone():
    faces = sg_faces(SAMPLES[8])
    assert [F.dim for F in faces].count(1) == 3
    assert [F.dim for F in faces].count(2) == 3


@pytest.mark.parametrize("C", [QUARTIC_GAP, QUARTIC_21, SAMPLES[4], SAMPLES[8]],
                         ids=lambda C: str([list(g) for g in C.gens]))
def test_retractions_are_idempotent_and_multiplicative(C):
    for F in sg_faces(C):
        rep = sg_retract(C, F, samples=100)
        assert rep.ok, F.describe()
        assert rep.pairs_checked == 100
        assert sorted(rep.kept + rep.killed) == sorted(C.gens)


def test_retraction_values():
    F = face_from_rays(QUARTIC_GAP, [(1, 0)])
    assert retraction((8, 0), QUARTIC_GAP, F) == (8, 0)
    assert retraction((7, 1), QUARTIC_GAP, F) is None
    with pytest.raises(PreconditionError):
        face_from_rays(QUARTIC_GAP, [(1, 1)])


def test_bad_inputs():
    with pytest.raises(PreconditionError):
        AffineSemigroup(2, ())
    with pytest.raises(PreconditionError):
        AffineSemigroup(2, ((1, -1),))
    with pytest.raises(PreconditionError):
        AffineSemigroup(2, ((1, 0), (1, 0)))
    with pytest.raises(PreconditionError):
        AffineSemigroup.from_json({"gens": "nope"})
    with pytest.raises(PreconditionError):
        sg_member((1, 2, 3), QUARTIC_GAP)
    with pytest.raises(UnsupportedDimensionError):
        sg_hilbert_basis(AffineSemigroup(4, ((1, 0, 0, 0), (0, 1, 0, 0))))


def test_member_box_cap():
    C = AffineSemigroup(3, ((2, 0, 0), (0, 2, 0), (0, 0, 2), (1, 1, 1)))
    with pytest.raises(ResourceCapError):
        sg_member((401, 401, 401), C)
