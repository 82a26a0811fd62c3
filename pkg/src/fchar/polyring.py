"""Sparse multivariate polynomials over prime fields F_p.

Polynomials are immutable.  Terms are kept in a dict keyed by exponent
tuples, with coefficients stored as residues in ``[0, p)``.  Printing uses
grevlex-descending order, so the text form of a polynomial is canonical and
``parse(str(f)) == f`` always holds.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from operator import add
from typing import Iterable, Mapping

from .errors import (
    AmbientMismatchError,
    ExponentOverflowError,
    ParseError,
    PreconditionError,
    UnknownVariableError,
)

MAX_EXPONENT = 2**20
MAX_CHAR = 2**31

Exponent = tuple[int, ...]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class PrimeChar:
    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not 2 <= self.p < MAX_CHAR:
            raise PreconditionError(f"characteristic must be an integer in [2, 2^31), got {self.p!r}")
        if not is_prime(self.p):
            raise PreconditionError(f"characteristic {self.p} is not prime")


# --------------------------------------------------------------------------
# monomial orders


def _grevlex_key(e: Exponent) -> tuple[int, ...]:
    return (sum(e),) + tuple(-x for x in reversed(e))


@dataclass(frozen=True)
class MonomialOrder:
    """A monomial order, usable as a sort key via :meth:`key`.

    ``kind`` is ``"lex"``, ``"grevlex"`` or ``"elim"``; the latter is the
    block order that compares the first ``block`` variables by grevlex and
    breaks ties with grevlex on the rest.  ``perm`` optionally reorders the
    variables before comparison (``perm[i]`` is the ring index of the
    variable ranked ``i``-th).
    """

    kind: str = "grevlex"
    block: int = 0
    perm: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("lex", "grevlex", "elim"):
            raise PreconditionError(f"unknown monomial order {self.kind!r}")
        if self.kind == "elim" and self.block < 0:
            raise PreconditionError("elimination block size must be >= 0")

    @classmethod
    def lex(cls, perm=None):
        return cls("lex", 0, tuple(perm) if perm is not None else None)

    @classmethod
    def grevlex(cls, perm=None):
        return cls("grevlex", 0, tuple(perm) if perm is not None else None)

    @classmethod
    def elimination(cls, block, perm=None):
        return cls("elim", block, tuple(perm) if perm is not None else None)

    @classmethod
    def from_name(cls, name: str) -> "MonomialOrder":
        if name not in ("lex", "grevlex"):
            raise PreconditionError(f"unknown monomial order {name!r}")
        return cls(name)

    def key(self, e: Exponent) -> tuple[int, ...]:
        if self.perm is not None:
            e = tuple(e[i] for i in self.perm)
        if self.kind == "lex":
            return e
        if self.kind == "grevlex":
            return _grevlex_key(e)
        k = self.block
        return _grevlex_key(e[:k]) + _grevlex_key(e[k:])

    def keyfunc(self):
        """Memoized key function; cheap to call repeatedly on the same monomials."""
        cache: dict[Exponent, tuple[int, ...]] = {}
        key = self.key

        def k(e):
            try:
                return cache[e]
            except KeyError:
                v = cache[e] = key(e)
                return v

        return k

    def describe(self) -> str:
        s = self.kind if self.kind != "elim" else f"elim({self.block})"
        if self.perm is not None:
            s += f"[perm={list(self.perm)}]"
        return s


GREVLEX = MonomialOrder.grevlex()
_VARNAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


# --------------------------------------------------------------------------
# rings


@dataclass(frozen=True)
class PolynomialRing:
    """F_p[x_1, ..., x_n] with named variables."""

    p: int
    vars: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        PrimeChar(self.p)
        object.__setattr__(self, "vars", tuple(self.vars))
        if not self.vars:
            raise PreconditionError("a ring needs at least one variable")
        for v in self.vars:
            if not isinstance(v, str) or not _VARNAME.match(v):
                raise PreconditionError(f"invalid variable name {v!r}")
        if len(set(self.vars)) != len(self.vars):
            raise PreconditionError("variable names must be distinct")
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(self.vars)})

    @classmethod
    def from_json(cls, data) -> "PolynomialRing":
        """Build from ``{"char": p, "vars": [...]}`` (a dict or a JSON string)."""
        if isinstance(data, str):
            data = json.loads(data)
        try:
            return cls(int(data["char"]), tuple(data["vars"]))
        except (KeyError, TypeError) as exc:
            raise PreconditionError(f"bad ring description: {exc}") from None

    def to_json(self) -> dict:
        return {"char": self.p, "vars": list(self.vars)}

    @property
    def nvars(self) -> int:
        return len(self.vars)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise PreconditionError(f"unknown variable {name!r}") from None

    def __contains__(self, name) -> bool:
        return name in self._index

    def __str__(self):
        return f"F_{self.p}[{','.join(self.vars)}]"

    # constructors
    def poly(self, terms: Mapping[Exponent, int] | None = None) -> "Polynomial":
        return Polynomial(self, terms)

    def zero(self) -> "Polynomial":
        return Polynomial._raw(self, {})

    def one(self) -> "Polynomial":
        return self.constant(1)

    def constant(self, c: int) -> "Polynomial":
        return Polynomial(self, {(0,) * self.nvars: c})

    def monomial(self, exp: Iterable[int], coeff: int = 1) -> "Polynomial":
        exp = tuple(exp)
        if len(exp) != self.nvars or any(a < 0 for a in exp):
            raise PreconditionError(f"bad exponent vector {exp} for {self}")
        _check_exponent(max(exp, default=0))
        return Polynomial(self, {exp: coeff})

    def gen(self, name: str) -> "Polynomial":
        e = [0] * self.nvars
        e[self.index(name)] = 1
        return Polynomial._raw(self, {tuple(e): 1})

    def gens(self) -> list["Polynomial"]:
        return [self.gen(v) for v in self.vars]

    def parse(self, text: str) -> "Polynomial":
        return parse_polynomial(text, self)

    def extend(self, names: Iterable[str], front: bool = False) -> "PolynomialRing":
        names = tuple(names)
        return PolynomialRing(self.p, names + self.vars if front else self.vars + names)

    def fresh_names(self, base: str, count: int) -> list[str]:
        """``count`` variable names starting with ``base`` that are not in this ring."""
        out, i = [], 0
        while len(out) < count:
            cand = f"{base}{i}" if count > 1 or i else base
            if cand not in self._index:
                out.append(cand)
            i += 1
        return out


def _check_exponent(m: int):
    if m > MAX_EXPONENT:
        raise ExponentOverflowError(f"exponent {m} exceeds the cap 2^20")


# --------------------------------------------------------------------------
# polynomials


class Polynomial:
    """An immutable polynomial in a :class:`PolynomialRing`."""

    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, ring: PolynomialRing, terms: Mapping[Exponent, int] | None = None):
        p, n = ring.p, ring.nvars
        clean: dict[Exponent, int] = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != n or any(a < 0 for a in e):
                raise PreconditionError(f"bad exponent vector {e} for {ring}")
            c %= p
            if c:
                clean[e] = (clean.get(e, 0) + c) % p
                if not clean[e]:
                    del clean[e]
        self.ring = ring
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ring, terms):
        """Trusted constructor: ``terms`` must already be reduced and zero-free."""
        obj = cls.__new__(cls)
        obj.ring = ring
        obj._terms = terms
        obj._hash = None
        return obj

    # -- inspection --------------------------------------------------------
    def terms(self) -> dict[Exponent, int]:
        return dict(self._terms)

    def items(self):
        """Terms in canonical (grevlex descending) order."""
        return sorted(self._terms.items(), key=lambda t: _grevlex_key(t[0]), reverse=True)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_term(self) -> int:
        return self._terms.get((0,) * self.ring.nvars, 0)

    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def degree_in(self, name: str) -> int:
        i = self.ring.index(name)
        return max((e[i] for e in self._terms), default=-1)

    def max_exponent(self) -> int:
        return max((max(e, default=0) for e in self._terms), default=0)

    def variables(self) -> list[str]:
        used = set()
        for e in self._terms:
            used.update(i for i, a in enumerate(e) if a)
        return [self.ring.vars[i] for i in sorted(used)]

    def leading_term(self, order: MonomialOrder = GREVLEX) -> tuple[Exponent, int]:
        if not self._terms:
            raise PreconditionError("the zero polynomial has no leading term")
        e = max(self._terms, key=order.key)
        return e, self._terms[e]

    def monic(self, order: MonomialOrder = GREVLEX) -> "Polynomial":
        if not self._terms:
            return self
        _, c = self.leading_term(order)
        return self * pow(c, -1, self.ring.p)

    # -- arithmetic --------------------------------------------------------
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise AmbientMismatchError(f"{self.ring} vs {other.ring}")
            return other
        if isinstance(other, int):
            return self.ring.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.ring.p
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = (out.get(e, 0) + c) % p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Polynomial._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.p
        return Polynomial._raw(self.ring, {e: p - c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, int):
            c0 = other % self.ring.p
            if not c0:
                return self.ring.zero()
            return Polynomial._raw(self.ring, {e: c * c0 % self.ring.p for e, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self._terms or not other._terms:
            return self.ring.zero()
        if self.max_exponent() + other.max_exponent() > MAX_EXPONENT:
            _check_exponent(
                max(max(map(add, a, b)) for a in self._terms for b in other._terms)
            )
        p = self.ring.p
        out: dict[Exponent, int] = {}
        for a, ca in self._terms.items():
            for b, cb in other._terms.items():
                e = tuple(map(add, a, b))
                out[e] = (out.get(e, 0) + ca * cb) % p
        return Polynomial._raw(self.ring, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise PreconditionError("polynomial powers need a non-negative integer exponent")
        # n = sum d_i p^i, and f^(p^i) is a termwise Frobenius image
        result = self.ring.one()
        i = 0
        p = self.ring.p
        while n:
            n, d = divmod(n, p)
            if d:
                base = frobenius_power(self, i)
                for _ in range(d):
                    result = result * base
            i += 1
        return result

    def frobenius(self, e: int = 1) -> "Polynomial":
        return frobenius_power(self, e)

    # -- comparison / hashing ---------------------------------------------
    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self._terms.items())))
        return self._hash

    # -- conversions -------------------------------------------------------
    def to_ring(self, ring: PolynomialRing) -> "Polynomial":
        """Reinterpret in ``ring`` by variable name; used variables must exist there."""
        if ring == self.ring:
            return self
        if ring.p != self.ring.p:
            raise AmbientMismatchError(f"characteristic {self.ring.p} vs {ring.p}")
        idx = []
        for i, v in enumerate(self.ring.vars):
            idx.append(ring._index.get(v))
        out = {}
        for e, c in self._terms.items():
            ne = [0] * ring.nvars
            for i, a in enumerate(e):
                if a:
                    if idx[i] is None:
                        raise AmbientMismatchError(
                            f"variable {self.ring.vars[i]!r} does not exist in {ring}"
                        )
                    ne[idx[i]] = a
            out[tuple(ne)] = c
        return Polynomial._raw(ring, out)

    def substitute(self, values: Mapping[str, "Polynomial"], target: PolynomialRing | None = None) -> "Polynomial":
        """Substitute polynomials (all in ``target``) for the named variables.

        Variables not listed are carried over by name into ``target``.
        """
        target = target or self.ring
        images = []
        for v in self.ring.vars:
            if v in values:
                img = values[v]
                if img.ring != target:
                    raise AmbientMismatchError(f"substitution value for {v} is not in {target}")
            else:
                img = target.gen(v)
            images.append(img)
        result = target.zero()
        powers: dict[tuple[int, int], Polynomial] = {}
        for e, c in self._terms.items():
            term = target.constant(c)
            for i, a in enumerate(e):
                if a:
                    key = (i, a)
                    if key not in powers:
                        powers[key] = images[i] ** a
                    term = term * powers[key]
            result = result + term
        return result

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({str(self)!r}, {self.ring})"


# --------------------------------------------------------------------------
# Frobenius and arithmetic helpers


def frobenius_power(f: Polynomial, e: int) -> Polynomial:
    """Return ``f^(p^e)``, computed termwise.

    In characteristic p the map is additive and fixes F_p, so each term
    ``c*x^a`` goes to ``c*x^(p^e * a)``.
    """
    if not isinstance(e, int) or e < 0:
        raise PreconditionError("Frobenius exponent must be a non-negative integer")
    if e == 0 or not f._terms:
        return f
    q = f.ring.p**e
    _check_exponent(f.max_exponent() * q)
    return Polynomial._raw(f.ring, {tuple(a * q for a in ex): c for ex, c in f._terms.items()})


def poly_arith(op: str, f: Polynomial, g: Polynomial) -> Polynomial:
    if f.ring != g.ring:
        raise AmbientMismatchError(f"{f.ring} vs {g.ring}")
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    raise PreconditionError(f"unknown arithmetic operation {op!r}")


def format_polynomial(f: Polynomial) -> str:
    if not f._terms:
        return "0"
    names = f.ring.vars
    parts = []
    for e, c in f.items():
        mono = "*".join(
            (v if a == 1 else f"{v}^{a}") for v, a in zip(names, e) if a
        )
        if not mono:
            parts.append(str(c))
        elif c == 1:
            parts.append(mono)
        else:
            parts.append(f"{c}*{mono}")
    return "+".join(parts)


# --------------------------------------------------------------------------
# parser

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|([-+*^()]))")


class _Parser:
    def __init__(self, text: str, ring: PolynomialRing):
        self.text = text
        self.ring = ring
        self.tokens = self._tokenize()
        self.i = 0

    def _tokenize(self):
        toks, pos, text = [], 0, self.text
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos >= len(text):
                break
            m = _TOKEN.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
            start = m.start(m.lastindex)
            if m.group(1) is not None:
                toks.append(("int", int(m.group(1)), start))
            elif m.group(2) is not None:
                toks.append(("var", m.group(2), start))
            else:
                toks.append((m.group(3), m.group(3), start))
            pos = m.end()
        toks.append(("end", None, len(text)))
        return toks

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ParseError(f"expected {kind!r}, found {what}", tok[2], self.text)
        self.i += 1
        return tok

    def parse(self) -> Polynomial:
        if self.peek()[0] == "end":
            raise ParseError("empty polynomial", 0, self.text)
        f = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected token {tok[1]!r}", tok[2], self.text)
        return f

    def expr(self) -> Polynomial:
        sign = 1
        if self.peek()[0] in "+-":
            sign = -1 if self.take()[0] == "-" else 1
        f = self.term() * sign
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            t = self.term()
            f = f + t if op == "+" else f - t
        return f

    def term(self) -> Polynomial:
        f = self.factor()
        while self.peek()[0] == "*":
            self.take()
            f = f * self.factor()
        return f

    def factor(self) -> Polynomial:
        tok = self.peek()
        if tok[0] == "int":
            self.take()
            base = self.ring.constant(tok[1])
        elif tok[0] == "var":
            self.take()
            if tok[1] not in self.ring:
                raise UnknownVariableError(f"unknown variable {tok[1]!r}", tok[2], self.text)
            base = self.ring.gen(tok[1])
        elif tok[0] == "(":
            self.take()
            base = self.expr()
            self.take(")")
        elif tok[0] == "-":
            self.take()
            return -self.factor()
        else:
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ParseError(f"unexpected {what}", tok[2], self.text)
        if self.peek()[0] == "^":
            self.take()
            ntok = self.take("int")
            n = ntok[1]
            if tok[0] == "var":
                _check_exponent(n)
                e = [0] * self.ring.nvars
                e[self.ring.index(tok[1])] = n
                return self.ring.monomial(e)
            return base**n
        return base


def parse_polynomial(text: str, ring: PolynomialRing) -> Polynomial:
    """Parse ``+ - * ^`` text with integer coefficients into a polynomial of ``ring``.

    Coefficients are reduced mod p.  Parentheses are accepted.  Raises
    :class:`ParseError` (with a 0-based ``position``) on malformed text and
    :class:`UnknownVariableError` for names not declared by the ring.
    """
    if not isinstance(text, str):
        raise ParseError("polynomial text must be a string", 0, str(text))
    return _Parser(text, ring).parse()


def parse_polynomials(texts: Iterable[str], ring: PolynomialRing) -> list[Polynomial]:
    return [parse_polynomial(t, ring) for t in texts]
