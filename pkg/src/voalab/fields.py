"""Formal fields and the modes of their normally ordered products.

For fields ``A`` (weight ``D_A``) and ``B`` the normally ordered product has
modes

    (:AB:)_m = sum_{n <= -D_A} A_n B_{m-n} + s(A,B) sum_{n > -D_A} B_{m-n} A_n

which is the residue-indexed formula
``(:AB:)_(k) = sum_{n>=0} A_(-1-n) B_(k+n) + s sum_{n>=0} B_(k-1-n) A_(n)``
rewritten with ``X_(n) = X_{n+1-D_X}``. On a state of level ``l`` in a module
whose lowest level is ``l0`` only ``n`` with ``m - (l - l0) <= n`` in the first
sum and ``n <= l - l0`` in the second contribute, so both sums are finite.

Products of more than two factors are right-nested: ``:a b c: = :a :b c::``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .algebra import AlgebraSpec
from .exact import rat, rat_str
from .fock import FockState, ModuleSpec, vec_add


def falling(x: int, d: int) -> int:
    out = 1
    for i in range(d):
        out *= x - i
    return out


class FieldExpr:
    """Base class; subclasses are immutable and hashable."""

    weight: int
    parity: int

    def mode_on_state(self, m: int, state: FockState, mod: ModuleSpec) -> dict:
        cache = mod.__dict__.setdefault("_field_cache", {})
        key = (self, m, state)
        hit = cache.get(key)
        if hit is None:
            if mod.level(state) - m < mod.min_level:
                hit = {}
            else:
                hit = self._mode(m, state, mod)
            cache[key] = hit
        return hit

    def _mode(self, m: int, state: FockState, mod: ModuleSpec) -> dict:
        raise NotImplementedError

    def apply(self, m: int, vec: Mapping, mod: ModuleSpec) -> dict:
        out: dict = {}
        for s, c in vec.items():
            vec_add(out, self.mode_on_state(m, s, mod), c)
        return out

    # -- algebra of expressions ----------------------------------------

    def __add__(self, other: "FieldExpr") -> "FieldExpr":
        return Sum.of([(Fraction(1), self), (Fraction(1), other)])

    def __sub__(self, other: "FieldExpr") -> "FieldExpr":
        return Sum.of([(Fraction(1), self), (Fraction(-1), other)])

    def __rmul__(self, c) -> "FieldExpr":
        return Sum.of([(rat(c), self)])

    def __neg__(self) -> "FieldExpr":
        return Sum.of([(Fraction(-1), self)])

    def terms(self) -> list[tuple[Fraction, "FieldExpr"]]:
        return [(Fraction(1), self)]

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((type(self).__name__, self._key()))
            object.__setattr__(self, "_hash", h)
        return h

    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def __setattr__(self, name, value):
        raise AttributeError("fields are immutable")


class Unit(FieldExpr):
    weight = 0
    parity = 0

    def _key(self):
        return ()

    def _mode(self, m, state, mod):
        return {state: Fraction(1)} if m == 0 else {}

    def __str__(self):
        return "1"


class Gen(FieldExpr):
    """A generator or one of its derivatives."""

    def __init__(self, alg: AlgebraSpec, name: str, deriv: int = 0):
        g = alg[name]
        if deriv < 0:
            raise ValueError("derivative order must be non-negative")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "deriv", deriv)
        object.__setattr__(self, "base_weight", g.weight)
        object.__setattr__(self, "weight", g.weight + deriv)
        object.__setattr__(self, "parity", g.parity)

    def _key(self):
        return (self.name, self.deriv, self.base_weight, self.parity)

    def _mode(self, m, state, mod):
        f = falling(-m - self.base_weight, self.deriv)
        if not f:
            return {}
        res = mod.act(self.name, m, state)
        return res if f == 1 else {s: f * c for s, c in res.items()}

    def __str__(self):
        return f"d{self.deriv} {self.name}" if self.deriv else self.name


class Deriv(FieldExpr):
    def __init__(self, inner: FieldExpr, order: int = 1):
        if isinstance(inner, Deriv):
            inner, order = inner.inner, inner.order + order
        object.__setattr__(self, "inner", inner)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "weight", inner.weight + order)
        object.__setattr__(self, "parity", inner.parity)

    def _key(self):
        return (self.inner, self.order)

    def _mode(self, m, state, mod):
        f = falling(-m - self.inner.weight, self.order)
        if not f:
            return {}
        return {s: f * c for s, c in self.inner.mode_on_state(m, state, mod).items()}

    def __str__(self):
        return f"d{self.order}({self.inner})"


class NormalOrder(FieldExpr):
    def __init__(self, left: FieldExpr, right: FieldExpr):
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "weight", left.weight + right.weight)
        object.__setattr__(self, "parity", (left.parity + right.parity) % 2)

    def _key(self):
        return (self.left, self.right)

    def _mode(self, m, state, mod):
        A, B = self.left, self.right
        depth = mod.level(state) - mod.min_level
        s = -1 if A.parity and B.parity else 1
        out: dict = {}
        for n in range(m - depth, -A.weight + 1):
            inner = B.mode_on_state(m - n, state, mod)
            for st, c in inner.items():
                vec_add(out, A.mode_on_state(n, st, mod), c)
        for n in range(-A.weight + 1, depth + 1):
            inner = A.mode_on_state(n, state, mod)
            for st, c in inner.items():
                vec_add(out, B.mode_on_state(m - n, st, mod), s * c)
        return out

    def factors(self) -> list[FieldExpr]:
        out = [self.left]
        r = self.right
        while isinstance(r, NormalOrder):
            out.append(r.left)
            r = r.right
        out.append(r)
        return out

    def __str__(self):
        inner = " ".join(str(f) if isinstance(f, Gen) else f"({f})" for f in self.factors())
        return f":{inner}:"


class Sum(FieldExpr):
    def __init__(self, terms: Sequence[tuple[Fraction, FieldExpr]]):
        ws = {f.weight for _, f in terms}
        ps = {f.parity for _, f in terms}
        if len(ws) > 1:
            raise ValueError(f"inhomogeneous field: weights {sorted(ws)}")
        if len(ps) > 1:
            raise ValueError("field mixes parities")
        object.__setattr__(self, "_terms", tuple(terms))
        object.__setattr__(self, "weight", ws.pop() if ws else 0)
        object.__setattr__(self, "parity", ps.pop() if ps else 0)

    @classmethod
    def of(cls, terms: Iterable[tuple[object, FieldExpr]]) -> FieldExpr:
        acc: dict[FieldExpr, Fraction] = {}
        order: list[FieldExpr] = []
        for c, f in terms:
            for c2, f2 in f.terms():
                if f2 not in acc:
                    order.append(f2)
                    acc[f2] = Fraction(0)
                acc[f2] += rat(c) * c2
        return cls([(acc[f], f) for f in order if acc[f]])

    def terms(self):
        return list(self._terms)

    def _key(self):
        return self._terms

    def _mode(self, m, state, mod):
        out: dict = {}
        for c, f in self._terms:
            vec_add(out, f.mode_on_state(m, state, mod), c)
        return out

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for i, (c, f) in enumerate(self._terms):
            body = str(f) if isinstance(f, NormalOrder) else f":{f}:" if isinstance(f, Gen) else str(f)
            sign = "-" if c < 0 else "+"
            mag = rat_str(abs(c))
            if i == 0:
                parts.append(f"{'-' if c < 0 else ''}({mag}){body}")
            else:
                parts.append(f" {sign} ({mag}){body}")
        return "".join(parts)


def nop(*factors: FieldExpr) -> FieldExpr:
    """Right-nested normally ordered product :f1 f2 ... fn:."""
    if not factors:
        return Unit()
    out = factors[-1]
    for f in reversed(factors[:-1]):
        out = NormalOrder(f, out)
    return out


def product_field(alg: AlgebraSpec, spec: Sequence[tuple[str, int] | str]) -> FieldExpr:
    """:d^{d1} g1 d^{d2} g2 ...: from (generator, derivative order) pairs."""
    fs = [Gen(alg, s) if isinstance(s, str) else Gen(alg, s[0], s[1]) for s in spec]
    return nop(*fs)


def field_from_terms(alg: AlgebraSpec, terms: Iterable[tuple[object, Sequence]]) -> FieldExpr:
    return Sum.of([(rat(c), product_field(alg, spec)) for c, spec in terms])


_TERM = re.compile(r"\s*([+-]?)\s*\(([^)]*)\)\s*:([^:]*):")


def parse_field(text: str, alg: AlgebraSpec) -> FieldExpr:
    """Inverse of ``str`` for generator-level sums such as "(1/2):a a: - (3/2):d1 a:"."""
    pos = 0
    terms = []
    text = text.strip()
    if text == "0":
        return Sum([])
    while pos < len(text):
        mt = _TERM.match(text, pos)
        if not mt:
            raise ValueError(f"cannot parse field at {text[pos:]!r}")
        sign, coef, body = mt.groups()
        c = rat(coef) * (-1 if sign == "-" else 1)
        toks = body.split()
        spec = []
        i = 0
        while i < len(toks):
            t = toks[i]
            if re.fullmatch(r"d\d+", t) and i + 1 < len(toks):
                spec.append((toks[i + 1], int(t[1:])))
                i += 2
            else:
                spec.append((t, 0))
                i += 1
        terms.append((c, spec))
        pos = mt.end()
    return field_from_terms(alg, terms)


def nop_mode(a: FieldExpr, b: FieldExpr, k: int, vec: Mapping, mod: ModuleSpec) -> dict:
    """k-th mode of :ab: applied to a state vector."""
    return NormalOrder(a, b).apply(k, vec, mod)


def nop_mode_truncated(a: FieldExpr, b: FieldExpr, k: int, vec: Mapping, mod: ModuleSpec, cutoff: int) -> dict:
    """Same sums cut at |n| <= cutoff with no level-based pruning (brute-force reference)."""
    s = -1 if a.parity and b.parity else 1
    out: dict = {}
    for n in range(-cutoff, cutoff + 1):
        if n <= -a.weight:
            vec_add(out, a.apply(n, b.apply(k - n, vec, mod), mod))
        else:
            vec_add(out, b.apply(k - n, a.apply(n, vec, mod), mod), s)
    return out
