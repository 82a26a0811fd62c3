"""Fixture table runner behind ``fchar verify-paper``.

Fixtures live in a JSON file (``data/worked_examples.json`` by default), one
record per check::

    {"id": "...", "group": "semigroup", "op": "sg_classify",
     "input": {...}, "expect": {...}}

Each ``op`` maps to a handler that computes a dict; a fixture passes when
every key of ``expect`` matches the computed value exactly.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .charp import (
    WitnessSet,
    closure_comparison,
    colon_bracket_identity_check,
    colon_bracket_sides,
    fedder_is_fpure,
    frobenius_closure_member,
    tight_closure_member_bounded,
)
from .errors import PreconditionError
from .groebner import Ideal, QuotientRing, ideal_member
from .onedim import (
    CurvePresentation,
    NumericalSemigroup,
    curve_classify_fcoherent,
    curve_pi_normalization_test,
    ns_classify_fcoherent,
)
from .polyring import PolynomialRing
from .semigroup import (
    AffineSemigroup,
    sg_classify_fcoherent,
    sg_hilbert_basis,
    sg_is_normal,
    sg_member,
    sg_pi_sandwich_certificate,
)

GROUPS = ("polyring", "semigroup", "curve", "closure", "fedder", "identity", "brenner-monsky")


class FixtureFileError(PreconditionError):
    def __init__(self, path, reason):
        self.path = str(path)
        super().__init__(f"{path}: {reason}")


def default_fixture_path():
    return resources.files("fchar") / "data" / "worked_examples.json"


def load_fixtures(path=None) -> list[dict]:
    path = default_fixture_path() if path is None else Path(path)
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FixtureFileError(path, f"cannot read fixtures ({exc})") from None
    if not isinstance(data, list):
        raise FixtureFileError(path, "top level must be a list of fixtures")
    for i, fx in enumerate(data):
        if not isinstance(fx, dict) or not {"id", "group", "op", "input", "expect"} <= fx.keys():
            raise FixtureFileError(path, f"fixture #{i} lacks id/group/op/input/expect")
        if fx["op"] not in HANDLERS:
            raise FixtureFileError(path, f"fixture {fx['id']!r} has unknown op {fx['op']!r}")
    return data


# --------------------------------------------------------------------------
# input helpers


def _ring(inp) -> PolynomialRing:
    return PolynomialRing(int(inp["char"]), tuple(inp["vars"]))


def _quotient(inp, ring) -> QuotientRing:
    mod = inp.get("modulus") or []
    if not mod:
        return QuotientRing.polynomial(ring)
    return QuotientRing(ring, Ideal.parse(mod, ring), reduced=True, domain=True)


def _sg(inp) -> AffineSemigroup:
    return AffineSemigroup.from_json(inp)


def _vec(v):
    return [int(x) for x in v] if v is not None else None


# --------------------------------------------------------------------------
# handlers


def _h_parse(inp):
    f = _ring(inp).parse(inp["poly"])
    return {"terms": len(f), "text": str(f)}


def _h_sg_classify(inp):
    v = sg_classify_fcoherent(_sg(inp), int(inp["p"]))
    out = {"status": v.status, "certificate": v.certificate, "witness": _vec(v.witness)}
    if v.obstruction:
        out["obstruction_prime"] = v.obstruction["prime"]
        out["obstruction_step"] = v.obstruction["step"]
    return out


def _h_sg_normal(inp):
    ok, w = sg_is_normal(_sg(inp))
    return {"normal": ok, "witness": _vec(w)}


def _h_sg_hilbert(inp):
    return {"hilbert_basis": [list(h) for h in sg_hilbert_basis(_sg(inp))]}


def _h_sg_member(inp):
    ok, _ = sg_member(inp["vector"], _sg(inp))
    return {"member": ok}


def _h_sg_sandwich(inp):
    return {"e": sg_pi_sandwich_certificate(_sg(inp), int(inp["p"]))}


def _h_ns_classify(inp):
    v = ns_classify_fcoherent(NumericalSemigroup(tuple(inp["gens"])), int(inp["p"]))
    return {"status": v.status, "certificate": v.certificate}


def _h_curve_classify(inp):
    v = curve_classify_fcoherent(CurvePresentation.from_json(inp), int(inp.get("emax", 5)))
    failed = [t["e"] for t in v.transcript if not t["member"]]
    return {"status": v.status, "certificate": v.certificate, "failed_exponents": failed}


def _h_curve_pi(inp):
    r = curve_pi_normalization_test(CurvePresentation.from_json(inp), int(inp.get("emax", 5)))
    return {"status": r.status, "e": r.e, "representation": str(r.representation) if r.representation else None}


def _h_fclosure(inp):
    ring = _ring(inp)
    v = frobenius_closure_member(ring.parse(inp["x"]), Ideal.parse(inp["ideal"], ring), _quotient(inp, ring),
                                 int(inp["emax"]))
    return {"status": v.status, "exponent": v.exponent}


def _h_tclosure(inp):
    ring = _ring(inp)
    I = Ideal.parse(inp["ideal"], ring)
    W = WitnessSet(tuple(ring.parse(c) for c in inp["witnesses"])) if inp.get("witnesses") else None
    v = tight_closure_member_bounded(ring.parse(inp["x"]), I, _quotient(inp, ring), W,
                                     int(inp.get("emin", 1)), int(inp["emax"]))
    return {"status": v.status, "witness": str(v.witness) if v.witness is not None else None}


def _h_comparison(inp):
    ring = _ring(inp)
    I = Ideal.parse(inp["ideal"], ring)
    probes = [ring.parse(t) for t in inp["probes"]] if inp.get("probes") else None
    rep = closure_comparison(I, _quotient(inp, ring), None, int(inp["emax"]), int(inp.get("probe_degree", 2)), probes)
    return {
        "tensions": len(rep.tensions),
        "frobenius": [r.frobenius.status for r in rep.rows],
        "tight": [r.tight.status for r in rep.rows],
    }


def _h_member(inp):
    ring = _ring(inp)
    return {"member": ideal_member(ring.parse(inp["poly"]), Ideal.parse(inp["ideal"], ring), _quotient(inp, ring))}


def _h_fedder(inp):
    ring = _ring(inp)
    return {"f_pure": fedder_is_fpure(Ideal.parse(inp["ideal"], ring))}


def _h_identity(inp):
    ring = _ring(inp)
    I = Ideal.parse(inp["ideal"], ring)
    z = ring.parse(inp["z"])
    left, right = colon_bracket_sides(I, z, int(inp["e"]))
    return {"holds": left.generators == right.generators,
            "left": [str(g) for g in left.generators], "right": [str(g) for g in right.generators]}


def random_polynomial(rng: random.Random, ring: PolynomialRing, max_degree: int, max_terms: int):
    """A random polynomial without constant term (may be zero after reduction)."""
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        e = [0] * ring.nvars
        for _ in range(rng.randint(1, max_degree)):
            e[rng.randrange(ring.nvars)] += 1
        terms[tuple(e)] = rng.randint(1, ring.p - 1)
    return ring.poly(terms)


def identity_instances(n: int, seed: int):
    """Random ``(I, z, e)`` with p in {2,3,5}, <= 3 variables, <= 3 generators of degree <= 4."""
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        p = rng.choice([2, 3, 5])
        ring = PolynomialRing(p, ("x", "y", "z")[: rng.randint(1, 3)])
        gens = [random_polynomial(rng, ring, 4, 4) for _ in range(rng.randint(1, 3))]
        z = random_polynomial(rng, ring, 3, 2)
        if z.is_zero():
            continue
        gens = [g for g in gens if g] or [ring.zero()]
        out.append((Ideal(gens, ring), z, rng.choice([1, 2])))
    return out


def _h_identity_battery(inp):
    failures = []
    for k, (I, z, e) in enumerate(identity_instances(int(inp["count"]), int(inp["seed"]))):
        if not colon_bracket_identity_check(I, z, e):
            failures.append(k)
    return {"count": int(inp["count"]), "failures": failures}


HANDLERS = {
    "parse": _h_parse,
    "sg_classify": _h_sg_classify,
    "sg_normal": _h_sg_normal,
    "sg_hilbert": _h_sg_hilbert,
    "sg_member": _h_sg_member,
    "sg_sandwich": _h_sg_sandwich,
    "ns_classify": _h_ns_classify,
    "curve_classify": _h_curve_classify,
    "curve_pi": _h_curve_pi,
    "fclosure": _h_fclosure,
    "tclosure": _h_tclosure,
    "comparison": _h_comparison,
    "member": _h_member,
    "fedder": _h_fedder,
    "identity": _h_identity,
    "identity_battery": _h_identity_battery,
}


@dataclass
class FixtureResult:
    id: str
    group: str
    passed: bool
    diff: dict

    def to_json(self):
        out = {"id": self.id, "group": self.group, "passed": self.passed}
        if self.diff:
            out["diff"] = self.diff
        return out


def run_fixture(fx: dict) -> FixtureResult:
    try:
        got = HANDLERS[fx["op"]](fx["input"])
    except PreconditionError as exc:
        got = {"error": str(exc)}
    diff = {k: {"expected": v, "got": got.get(k)} for k, v in fx["expect"].items() if got.get(k) != v}
    return FixtureResult(fx["id"], fx["group"], not diff, diff)


def verify_paper(only: str | None = None, path=None) -> list[FixtureResult]:
    fixtures = load_fixtures(path)
    if only is not None:
        if only not in GROUPS:
            raise PreconditionError(f"unknown fixture group {only!r}; choose from {', '.join(GROUPS)}")
        fixtures = [fx for fx in fixtures if fx["group"] == only]
    return [run_fixture(fx) for fx in fixtures]
