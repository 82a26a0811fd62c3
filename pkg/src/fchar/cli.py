"""``fchar`` command line front end.

Every command prints one JSON report on stdout::

    {"command": ..., "input_digest": ..., "result": {...},
     "tool_version": ..., "timing_ms": ...}

Exit status: 0 success, 1 verify-paper mismatch, 2 precondition error,
3 resource cap exceeded, 64 usage error (unknown subcommand, bad flags).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import re
import sys
import time
from pathlib import Path

from . import __version__
from .charp import (
    WitnessSet,
    bracket_power,
    colon_bracket_sides,
    fedder_colon,
    fedder_is_fpure,
    frobenius_closure_member,
    frobenius_root,
    tight_closure_member_bounded,
)
from .errors import FcharError, PreconditionError, ResourceCapError
from .groebner import (
    Ideal,
    QuotientRing,
    eliminate,
    groebner_basis,
    ideal_colon,
    ideal_intersect,
    normal_form,
)
from .onedim import (
    CurvePresentation,
    NumericalSemigroup,
    curve_classify_fcoherent,
    curve_pi_normalization_test,
    ns_classify_fcoherent,
)
from .polyring import GREVLEX, MonomialOrder, PolynomialRing
from .semigroup import (
    AffineSemigroup,
    face_from_rays,
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
from .verify import GROUPS, FixtureFileError, verify_paper

EXIT_OK, EXIT_MISMATCH, EXIT_PRECONDITION, EXIT_CAP, EXIT_USAGE = 0, 1, 2, 3, 64

SUBCOMMANDS = ("gb", "member", "colon", "intersect", "eliminate", "bracket", "froot", "fclosure",
               "tclosure", "fedder", "identity-check", "sg", "curve", "ns", "verify-paper")
SG_ACTIONS = ("member", "group", "cone", "saturation", "normal", "certificate", "pi-test", "classify",
              "faces", "retract")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


# --------------------------------------------------------------------------
# input resolution


def _load_file(path):
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise PreconditionError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise PreconditionError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise PreconditionError(f"{path}: expected a JSON object")
    return data


def _split(text):
    if text is None:
        return None
    return [t.strip() for t in text.split(",") if t.strip()]


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class _Inputs:
    """Merges ``--file`` JSON with command-line flags (flags win)."""

    def __init__(self, args):
        self.args = args
        self.file = _load_file(getattr(args, "file", None))

    def get(self, key, flag=None):
        v = getattr(self.args, flag or key, None)
        return v if v is not None else self.file.get(key)

    def texts(self, key, flag=None):
        v = getattr(self.args, flag or key, None)
        if v is not None:
            return _split(v)
        v = self.file.get(key)
        if v is None:
            return None
        return [v] if isinstance(v, str) else list(v)

    def char(self):
        c = self.get("char")
        if c is None:
            raise PreconditionError("the characteristic is required (--char or \"char\" in --file)")
        try:
            return int(c)
        except (TypeError, ValueError):
            raise PreconditionError(f"bad characteristic {c!r}") from None

    def ring(self, *text_keys):
        vars_ = _split(self.args.vars) if getattr(self.args, "vars", None) else self.file.get("vars")
        if not vars_:
            seen = []
            for key in text_keys:
                for t in self.texts(key) or []:
                    for name in _IDENT.findall(t):
                        if name not in seen:
                            seen.append(name)
            vars_ = seen or ["x"]
        return PolynomialRing(self.char(), tuple(vars_))

    def ideal(self, ring, key="ideal", flag=None):
        texts = self.texts(key, flag)
        if not texts:
            raise PreconditionError(f"an ideal needs at least one generator (--{(flag or key).replace('_', '-')})")
        return Ideal.parse(texts, ring)

    def quotient(self, ring):
        mod = self.texts("modulus")
        if not mod:
            return QuotientRing.polynomial(ring)
        return QuotientRing(ring, Ideal.parse(mod, ring), reduced=True)

    def poly(self, ring, key="poly"):
        t = self.get(key)
        if t is None:
            raise PreconditionError(f"--{key} is required")
        return ring.parse(t)

    def order(self):
        name = self.get("order") or "grevlex"
        return MonomialOrder.from_name(name)


def _gens(I):
    return [str(g) for g in I.generators]


# --------------------------------------------------------------------------
# commands


def _cmd_gb(inp):
    ring = inp.ring("ideal")
    order = inp.order()
    G = groebner_basis(inp.ideal(ring), order)
    return {"ring": ring.to_json(), "order": order.describe(), "gb": _gens(G)}


def _cmd_member(inp):
    ring = inp.ring("ideal", "poly", "modulus")
    R = inp.quotient(ring)
    I = inp.ideal(ring)
    f = inp.poly(ring)
    nf = normal_form(f, R.lift(I))
    return {"ring": R.to_json(), "member": nf.is_zero(), "normal_form": str(nf)}


def _cmd_colon(inp):
    ring = inp.ring("ideal", "poly", "modulus")
    R = inp.quotient(ring)
    K = ideal_colon(inp.ideal(ring), inp.poly(ring), R)
    return {"ring": R.to_json(), "colon": _gens(K)}


def _cmd_intersect(inp):
    ring = inp.ring("ideal", "ideal2")
    K = ideal_intersect(inp.ideal(ring), inp.ideal(ring, "ideal2"))
    return {"ring": ring.to_json(), "intersection": _gens(groebner_basis(K))}


def _cmd_eliminate(inp):
    ring = inp.ring("ideal")
    drop = inp.texts("drop") or []
    K = eliminate(inp.ideal(ring), drop)
    return {"ring": ring.to_json(), "drop": drop, "eliminated": _gens(K)}


def _exponent(inp, default=1):
    e = inp.get("e")
    return default if e is None else int(e)


def _cmd_bracket(inp):
    ring = inp.ring("ideal")
    e = _exponent(inp)
    K = bracket_power(inp.ideal(ring), e)
    return {"ring": ring.to_json(), "e": e, "q": ring.p**e, "bracket": _gens(K)}


def _cmd_froot(inp):
    ring = inp.ring("ideal", "modulus")
    e = _exponent(inp)
    K = frobenius_root(inp.ideal(ring), e, inp.quotient(ring))
    return {"ring": ring.to_json(), "e": e, "root": _gens(K)}


def _emax(inp, default=4):
    v = inp.get("emax")
    return default if v is None else int(v)


def _cmd_fclosure(inp):
    ring = inp.ring("ideal", "poly", "modulus")
    v = frobenius_closure_member(inp.poly(ring), inp.ideal(ring), inp.quotient(ring), _emax(inp))
    return v.to_json()


def _cmd_tclosure(inp):
    ring = inp.ring("ideal", "poly", "modulus", "witnesses")
    I = inp.ideal(ring)
    extras = [ring.parse(t) for t in inp.texts("witnesses") or []]
    W = WitnessSet.default(I, extras)
    emin = inp.get("emin")
    v = tight_closure_member_bounded(inp.poly(ring), I, inp.quotient(ring), W,
                                     1 if emin is None else int(emin), _emax(inp))
    return v.to_json()


def _cmd_fedder(inp):
    ring = inp.ring("ideal")
    J = inp.ideal(ring)
    return {"ring": ring.to_json(), "f_pure": fedder_is_fpure(J), "colon": _gens(fedder_colon(J))}


def _cmd_identity(inp):
    ring = inp.ring("ideal", "poly")
    e = _exponent(inp)
    left, right = colon_bracket_sides(inp.ideal(ring), inp.poly(ring), e)
    return {"ring": ring.to_json(), "e": e, "holds": left.generators == right.generators,
            "left": _gens(left), "right": _gens(right)}


def _semigroup(inp):
    if inp.args.gens is not None:
        gens = [[int(x) for x in _split(g.replace(" ", ","))] for g in inp.args.gens.split(";")]
        return AffineSemigroup(len(gens[0]), tuple(map(tuple, gens)))
    if not inp.file:
        raise PreconditionError("a semigroup is required (--file or --gens)")
    return AffineSemigroup.from_json(inp.file)


def _vector(text, what="--vector"):
    if text is None:
        raise PreconditionError(f"{what} is required")
    try:
        return tuple(int(x) for x in _split(text))
    except ValueError:
        raise PreconditionError(f"bad vector {text!r}") from None


def _cmd_sg(inp):
    C = _semigroup(inp)
    action = inp.args.action
    out = {"semigroup": C.to_json(), "action": action}
    if action == "member":
        ok, mult = sg_member(_vector(inp.args.vector), C)
        out.update(member=ok, multiplicities=mult)
    elif action == "group":
        out.update(sg_group(C).to_json())
    elif action == "cone":
        out.update(sg_cone(C).to_json())
    elif action == "saturation":
        out["saturation"] = sg_saturation(C).to_json()
        out["hilbert_basis"] = [[str(x) for x in h] for h in sg_hilbert_basis(C)]
    elif action == "normal":
        ok, w = sg_is_normal(C)
        out.update(normal=ok, witness=[str(x) for x in w] if w else None)
    elif action == "certificate":
        out["e"] = sg_pi_sandwich_certificate(C, inp.char(), _emax(inp, 16))
    elif action == "pi-test":
        out.update(sg_normalization_pi_test(C, inp.char()).to_json())
    elif action == "classify":
        return sg_classify_fcoherent(C, inp.char(), _emax(inp, 16)).to_json()
    elif action == "faces":
        out["faces"] = [F.to_json() for F in sg_faces(C)]
    elif action == "retract":
        if inp.args.face_rays is None:
            raise PreconditionError("--face-rays is required (use '' for the origin)")
        rays = [_vector(r, "--face-rays") for r in inp.args.face_rays.split(";") if r.strip()]
        out.update(sg_retract(C, face_from_rays(C, rays)).to_json())
    return out


def _curve(inp):
    data = dict(inp.file)
    if inp.args.gens is not None:
        data["gens_in_u"] = _split(inp.args.gens)
    if "gens_in_u" not in data:
        raise PreconditionError("curve generators are required (--gens or \"gens_in_u\" in --file)")
    return CurvePresentation.from_json(data, inp.char())


def _cmd_curve(inp):
    Cv = _curve(inp)
    e_max = _emax(inp, 5)
    if inp.args.action == "pi-test":
        return curve_pi_normalization_test(Cv, e_max).to_json()
    return curve_classify_fcoherent(Cv, e_max).to_json()


def _cmd_ns(inp):
    gens = inp.texts("gens") if inp.args.gens is not None else inp.file.get("gens")
    if not gens:
        raise PreconditionError("numerical semigroup generators are required (--gens)")
    S = NumericalSemigroup(tuple(int(g) for g in gens))
    if inp.args.action == "info":
        return S.to_json()
    return ns_classify_fcoherent(S, inp.char()).to_json()


COMMANDS = {
    "gb": _cmd_gb,
    "member": _cmd_member,
    "colon": _cmd_colon,
    "intersect": _cmd_intersect,
    "eliminate": _cmd_eliminate,
    "bracket": _cmd_bracket,
    "froot": _cmd_froot,
    "fclosure": _cmd_fclosure,
    "tclosure": _cmd_tclosure,
    "fedder": _cmd_fedder,
    "identity-check": _cmd_identity,
    "sg": _cmd_sg,
    "curve": _cmd_curve,
    "ns": _cmd_ns,
}


# --------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser, algebra=True):
    p.add_argument("--char", help="prime characteristic p")
    p.add_argument("--file", help="JSON input file")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
    fmt.add_argument("--text", dest="fmt", action="store_const", const="text")
    p.add_argument("--emax", help="largest Frobenius exponent tested")
    if algebra:
        p.add_argument("--vars", help="comma-separated variable names")
        p.add_argument("--ideal", help="comma-separated ideal generators")
        p.add_argument("--modulus", help="comma-separated generators of the quotient modulus")
        p.add_argument("--poly", help="a polynomial")
        p.add_argument("--order", choices=("lex", "grevlex"))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fchar", description="Characteristic-p commutative algebra toolkit")
    parser.add_argument("--version", action="version", version=f"fchar {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND", parser_class=_Parser)
    helps = {
        "gb": "reduced Gröbner basis", "member": "ideal membership", "colon": "ideal quotient (I : f)",
        "intersect": "ideal intersection", "eliminate": "elimination ideal", "bracket": "Frobenius bracket power",
        "froot": "Frobenius root of an ideal", "fclosure": "bounded Frobenius closure membership",
        "tclosure": "bounded tight closure membership", "fedder": "Fedder F-purity test at the origin",
        "identity-check": "(I:z)^[q] = (I^[q]:z^q)", "sg": "affine semigroup operations",
        "curve": "curve algebra classification", "ns": "numerical semigroup classification",
        "verify-paper": "run the worked-example fixture table",
    }
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=helps[name])
        if name in ("sg", "curve", "ns"):
            actions = {"sg": SG_ACTIONS, "curve": ("pi-test", "classify"), "ns": ("classify", "info")}[name]
            p.add_argument("action", choices=actions)
            _common(p, algebra=False)
            p.add_argument("--gens", help="generators (sg: '4,0;3,1', curve: 'u^2,u^3', ns: '2,3')")
            if name == "sg":
                p.add_argument("--vector", help="vector for 'member', e.g. '2,2'")
                p.add_argument("--face-rays", help="rays of the face for 'retract', e.g. '1,0'")
        elif name == "verify-paper":
            fmt = p.add_mutually_exclusive_group()
            fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
            fmt.add_argument("--text", dest="fmt", action="store_const", const="text")
            p.add_argument("--only", choices=GROUPS, help="run one fixture group")
            p.add_argument("--fixtures", help="alternative fixture file")
        else:
            _common(p)
            if name == "intersect":
                p.add_argument("--ideal2", help="second ideal")
            if name == "eliminate":
                p.add_argument("--drop", help="comma-separated variables to eliminate")
            if name in ("bracket", "froot", "identity-check"):
                p.add_argument("--e", help="Frobenius exponent e (q = p^e)")
            if name == "tclosure":
                p.add_argument("--witnesses", help="extra witnesses c (asserted in R^0)")
                p.add_argument("--emin", help="smallest exponent in the window")
    return parser


# --------------------------------------------------------------------------


def _digest(command, argv, inp_file):
    payload = json.dumps({"command": command, "argv": argv, "file": inp_file}, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()


def _emit(report, fmt, out):
    if fmt == "text":
        for k, v in report["result"].items():
            out.write(f"{k}: {json.dumps(v) if not isinstance(v, str) else v}\n")
    else:
        out.write(json.dumps(report, sort_keys=True) + "\n")


def run(argv=None, out=None, err=None) -> int:
    """Run the CLI on ``argv`` and return the exit status."""
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        err.write(f"{exc}\n{parser.format_help()}")
        return EXIT_USAGE
    if args.command is None:
        err.write(parser.format_help())
        return EXIT_USAGE
    start = time.perf_counter()
    try:
        if args.command == "verify-paper":
            results = verify_paper(args.only, args.fixtures)
            failed = [r for r in results if not r.passed]
            result = {"total": len(results), "passed": len(results) - len(failed), "failed": len(failed),
                      "fixtures": [r.to_json() for r in results]}
            digest = _digest(args.command, argv, None)
            code = EXIT_MISMATCH if failed else EXIT_OK
        else:
            inp = _Inputs(args)
            result = COMMANDS[args.command](inp)
            digest = _digest(args.command, argv, inp.file)
            code = EXIT_OK
    except FixtureFileError as exc:
        err.write(json.dumps({"error": str(exc), "path": exc.path}) + "\n")
        return EXIT_PRECONDITION
    except PreconditionError as exc:
        err.write(json.dumps({"error": str(exc), "kind": type(exc).__name__}) + "\n")
        return EXIT_PRECONDITION
    except ResourceCapError as exc:
        err.write(json.dumps({"error": str(exc), "kind": type(exc).__name__}) + "\n")
        return EXIT_CAP
    except FcharError as exc:  # pragma: no cover - every subclass is handled above
        err.write(json.dumps({"error": str(exc)}) + "\n")
        return EXIT_PRECONDITION
    report = {
        "command": args.command,
        "input_digest": digest,
        "result": result,
        "tool_version": __version__,
        "timing_ms": round((time.perf_counter() - start) * 1000, 3),
    }
    _emit(report, args.fmt, out)
    return code


def main():  # pragma: no cover
    sys.exit(run())
