"""Mode algebras: generators, bracket tables and normal-ordered rewriting.

Conventions
-----------
A generator ``a`` of conformal weight ``D`` is a field
``a(z) = sum_m a_m z^(-m-D)``, so ``a_m`` lowers the L_0 eigenvalue by ``m``.
In the residue indexing ``a_(n) = Res_z z^n a(z)`` used for chiral-algebra
operations the same operator is ``a_(n) = a_{n+1-D}``.

A bracket rule for the ordered pair (a, b) gives the super-commutator
``[a_m, b_k} = sum_t p_t(m, k) t_{m+k+shift_t} + central(m) delta_{m+k,0}``
where every ``p_t`` and ``central`` are polynomials with rational
coefficients. The rule for (b, a) is derived by super-skew-symmetry unless it
is given explicitly, in which case the two are checked for consistency.

The Virasoro bracket is ``[L_m, L_k] = (m-k) L_{m+k} + c/12 (m^3-m) delta``
(the physics sign). Heisenberg-type pairings are ``[a_m, b_k] = m Q(a,b)
delta_{m+k,0}``; pairing ``f(z)dz = z^m dz`` against ``g(z)dz = z^k dz`` with
the kernel ``Q dz1 dz2 / (z1-z2)^2`` by iterated residues gives exactly
``m Q delta_{m+k,0}``, which fixes the normalization of the central term.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping

from .exact import rat

Mode = tuple[str, int]
# A mode monomial is an ordered tuple of modes; in normal form the factors are
# sorted by (mode index, generator name), most negative index leftmost.
ModeMonomial = tuple[Mode, ...]


class UnknownGenerator(KeyError):
    def __str__(self):
        return f"unknown generator {self.args[0]!r}"


# ---------------------------------------------------------------------------
# polynomials in (m, k)


@dataclass(frozen=True)
class Poly:
    """Polynomial in the left mode index m and right mode index k."""

    coeffs: tuple[tuple[tuple[int, int], Fraction], ...] = ()

    @classmethod
    def of(cls, terms: Mapping[tuple[int, int], object] | None = None) -> "Poly":
        terms = terms or {}
        items = tuple(sorted(((d, rat(c)) for d, c in terms.items() if rat(c)), key=lambda t: t[0]))
        return cls(items)

    @classmethod
    def const(cls, c) -> "Poly":
        return cls.of({(0, 0): c})

    @classmethod
    def in_m(cls, *coeffs) -> "Poly":
        """Polynomial sum_i coeffs[i] m^i."""
        return cls.of({(i, 0): c for i, c in enumerate(coeffs)})

    def __call__(self, m: int, k: int = 0) -> Fraction:
        return sum((c * m**i * k**j for (i, j), c in self.coeffs), Fraction(0))

    def swapped(self) -> "Poly":
        return Poly.of({(j, i): c for (i, j), c in self.coeffs})

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for (i, j), c in self.coeffs:
            mon = "".join(
                s for s in (
                    "" if i == 0 else ("m" if i == 1 else f"m^{i}"),
                    "" if j == 0 else ("k" if j == 1 else f"k^{j}"),
                )
            )
            parts.append(f"({c}){mon}" if mon else f"({c})")
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# generators and rules


@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    weight: int
    parity: int = 0  # 0 even, 1 odd
    charge: tuple[int, ...] | None = None
    ghost: int = 0

    def __post_init__(self):
        if not self.name.isidentifier():
            raise ValueError(f"generator name {self.name!r} is not an identifier")
        if self.parity not in (0, 1):
            raise ValueError("parity must be 0 (even) or 1 (odd)")


@dataclass(frozen=True)
class BracketTerm:
    coeff: Poly
    target: str
    shift: int = 0


@dataclass(frozen=True)
class BracketRule:
    left: str
    right: str
    terms: tuple[BracketTerm, ...] = ()
    central: Poly = field(default_factory=Poly)


@dataclass(frozen=True)
class BracketResult:
    """Value of a super-commutator of two modes: modes plus a central scalar."""

    modes: tuple[tuple[Mode, Fraction], ...]
    central: Fraction = Fraction(0)

    @classmethod
    def build(cls, modes: Mapping[Mode, Fraction], central=Fraction(0)) -> "BracketResult":
        return cls(tuple(sorted(((k, v) for k, v in modes.items() if v), key=lambda t: (t[0][1], t[0][0]))), rat(central))

    def as_dict(self) -> dict[Mode, Fraction]:
        return dict(self.modes)

    def is_zero(self) -> bool:
        return not self.modes and not self.central

    def __neg__(self) -> "BracketResult":
        return BracketResult(tuple((k, -v) for k, v in self.modes), -self.central)

    def __add__(self, other: "BracketResult") -> "BracketResult":
        d = self.as_dict()
        for k, v in other.modes:
            d[k] = d.get(k, Fraction(0)) + v
        return BracketResult.build(d, self.central + other.central)

    def scale(self, c) -> "BracketResult":
        c = rat(c)
        return BracketResult.build({k: c * v for k, v in self.modes}, c * self.central)

    def __str__(self) -> str:
        parts = [f"({v}) {g}_{{{n}}}" for (g, n), v in self.modes]
        if self.central:
            parts.append(f"({self.central})")
        return " + ".join(parts) or "0"


ZERO = BracketResult(())


class AlgebraSpec:
    """A finitely generated mode (super)algebra with polynomial structure functions."""

    def __init__(
        self,
        generators: Iterable[GeneratorSpec],
        rules: Iterable[BracketRule] = (),
        *,
        super: bool = False,
        central_charge: Fraction | None = None,
        name: str = "",
        meta: Mapping[str, object] | None = None,
    ):
        self.generators: tuple[GeneratorSpec, ...] = tuple(generators)
        self.gen: dict[str, GeneratorSpec] = {}
        for g in self.generators:
            if g.name in self.gen:
                raise ValueError(f"duplicate generator name {g.name!r}")
            if g.parity and not super:
                raise ValueError(f"odd generator {g.name!r} in an algebra not declared super")
            self.gen[g.name] = g
        self.super = super
        self.central_charge = None if central_charge is None else rat(central_charge)
        self.name = name
        self.meta = dict(meta or {})
        self.rules: dict[tuple[str, str], BracketRule] = {}
        for r in rules:
            for nm in (r.left, r.right, *(t.target for t in r.terms)):
                if nm not in self.gen:
                    raise UnknownGenerator(nm)
            key = (r.left, r.right)
            if key in self.rules:
                raise ValueError(f"two rules for the pair {key}")
            self.rules[key] = r
        self.order = {nm: i for i, nm in enumerate(sorted(self.gen))}
        bad = skew_violations(self, 2)
        if bad:
            raise ValueError(f"bracket table is not super-skew-symmetric: {bad[0]}")

    def __repr__(self):
        return f"AlgebraSpec({self.name or ', '.join(self.gen)})"

    def parity(self, name: str) -> int:
        return self[name].parity

    def __getitem__(self, name: str) -> GeneratorSpec:
        try:
            return self.gen[name]
        except KeyError:
            raise UnknownGenerator(name) from None

    def sign(self, a: str, b: str) -> int:
        return -1 if self[a].parity and self[b].parity else 1

    def mode_key(self, mode: Mode) -> tuple[int, str]:
        return (mode[1], mode[0])

    def bracket_table(self) -> dict[tuple[str, str], BracketRule]:
        return dict(self.rules)

    def direct_sum(self, other: "AlgebraSpec", name: str = "") -> "AlgebraSpec":
        """Mutually (super)commuting union of two algebras."""
        return AlgebraSpec(
            self.generators + other.generators,
            list(self.rules.values()) + list(other.rules.values()),
            super=self.super or other.super,
            name=name or f"{self.name}+{other.name}",
            meta={**self.meta, **other.meta},
        )

    def same_brackets(self, other: "AlgebraSpec", window: int = 4) -> bool:
        if set(self.gen) != set(other.gen):
            return False
        if any(self[g] != other[g] for g in self.gen):
            return False
        for a, b in product(self.gen, repeat=2):
            for m, k in product(range(-window, window + 1), repeat=2):
                if bracket_modes(a, m, b, k, self) != bracket_modes(a, m, b, k, other):
                    return False
        return True


def _eval_rule(rule: BracketRule, m: int, k: int) -> BracketResult:
    modes: dict[Mode, Fraction] = {}
    for t in rule.terms:
        c = t.coeff(m, k)
        if c:
            key = (t.target, m + k + t.shift)
            modes[key] = modes.get(key, Fraction(0)) + c
    central = rule.central(m, k) if m + k == 0 else Fraction(0)
    return BracketResult.build(modes, central)


def bracket_modes(a: str, m: int, b: str, k: int, alg: AlgebraSpec) -> BracketResult:
    """Super-commutator [a_m, b_k} (anticommutator when both are odd)."""
    alg[a], alg[b]
    rule = alg.rules.get((a, b))
    if rule is not None:
        return _eval_rule(rule, m, k)
    rule = alg.rules.get((b, a))
    if rule is not None:
        return _eval_rule(rule, k, m).scale(-alg.sign(a, b))
    return ZERO


def skew_violations(alg: AlgebraSpec, window: int) -> list[str]:
    out = []
    rng = range(-window, window + 1)
    for (a, b) in list(alg.rules):
        for m, k in product(rng, repeat=2):
            x = bracket_modes(a, m, b, k, alg)
            y = bracket_modes(b, k, a, m, alg)
            if not (x + y.scale(alg.sign(a, b))).is_zero():
                out.append(f"[{a}_{m},{b}_{k}] = {x} but [{b}_{k},{a}_{m}] = {y}")
    return out


# ---------------------------------------------------------------------------
# normal ordering in the mode algebra


def normal_order_rewrite(mono: Iterable[Mode], alg: AlgebraSpec, coeff=1) -> dict[ModeMonomial, Fraction]:
    """Rewrite a product of modes as a combination of normal-form monomials.

    Adjacent out-of-order factors are swapped using the bracket table; each
    swap removes one inversion and each bracket term removes one factor, so
    the rewriting terminates. A repeated odd factor ``x x`` is replaced by
    ``[x, x}/2``.
    """
    out: dict[ModeMonomial, Fraction] = {}
    work: list[tuple[ModeMonomial, Fraction]] = [(tuple(mono), rat(coeff))]
    for g, _ in work[0][0]:
        alg[g]
    key = alg.mode_key
    while work:
        mon, c = work.pop()
        if not c:
            continue
        for i in range(len(mon) - 1):
            x, y = mon[i], mon[i + 1]
            kx, ky = key(x), key(y)
            if kx > ky:
                pre, post = mon[:i], mon[i + 2:]
                work.append((pre + (y, x) + post, c * alg.sign(x[0], y[0])))
                br = bracket_modes(x[0], x[1], y[0], y[1], alg)
                for z, v in br.modes:
                    work.append((pre + (z,) + post, c * v))
                if br.central:
                    work.append((pre + post, c * br.central))
                break
            if kx == ky and alg.parity(x[0]):
                pre, post = mon[:i], mon[i + 2:]
                br = bracket_modes(x[0], x[1], y[0], y[1], alg)
                for z, v in br.modes:
                    work.append((pre + (z,) + post, c * v / 2))
                if br.central:
                    work.append((pre + post, c * br.central / 2))
                break
        else:
            out[mon] = out.get(mon, Fraction(0)) + c
            if not out[mon]:
                del out[mon]
    return out


# ---------------------------------------------------------------------------
# axiom checks


@dataclass(frozen=True)
class Violation:
    kind: str  # "skew", "jacobi" or "representation"
    witness: tuple
    detail: str

    def __str__(self):
        return f"{self.kind} violation at {self.witness}: {self.detail}"


def _bracket_comb(comb: Mapping[Mode, Fraction], b: str, k: int, alg: AlgebraSpec, left: bool) -> BracketResult:
    acc = ZERO
    for (g, n), c in comb.items():
        br = bracket_modes(g, n, b, k, alg) if left else bracket_modes(b, k, g, n, alg)
        acc = acc + br.scale(c)
    return acc


def jacobi_defect(alg: AlgebraSpec, a: str, m: int, b: str, k: int, c: str, l: int) -> BracketResult:
    """[a_m,[b_k,c_l}} - [[a_m,b_k},c_l} - s(a,b) [b_k,[a_m,c_l}} in the mode algebra."""
    bc = bracket_modes(b, k, c, l, alg).as_dict()
    ab = bracket_modes(a, m, b, k, alg).as_dict()
    ac = bracket_modes(a, m, c, l, alg).as_dict()
    t1 = _bracket_comb(bc, a, m, alg, left=False)
    t2 = _bracket_comb(ab, c, l, alg, left=True)
    t3 = _bracket_comb(ac, b, k, alg, left=False)
    return t1 + (-t2) + t3.scale(-alg.sign(a, b))


def check_axioms(alg: AlgebraSpec, index_window: int = 2, *, module_level: int = 2) -> list[Violation]:
    """Every violated identity with its witness; an empty list means pass.

    Three families are checked over all modes with |index| <= index_window:
    super-skew-symmetry, the super-Jacobi identity in the mode algebra, and
    (when ``module_level`` >= 0) that the operators realized on the vacuum
    module up to that level obey the bracket table. The last check catches
    central terms that are consistent as a Lie algebra but incompatible with
    a vacuum annihilated by the modes of nonnegative residue degree.
    """
    if index_window < 2:
        raise ValueError("index_window must be at least 2")
    report: list[Violation] = []
    rng = range(-index_window, index_window + 1)
    names = sorted(alg.gen)
    for a, b in product(names, repeat=2):
        for m, k in product(rng, repeat=2):
            x = bracket_modes(a, m, b, k, alg)
            y = bracket_modes(b, k, a, m, alg)
            d = x + y.scale(alg.sign(a, b))
            if not d.is_zero():
                report.append(Violation("skew", (a, m, b, k), f"sum is {d}"))
    for a, b, c in product(names, repeat=3):
        for m, k, l in product(rng, repeat=3):
            d = jacobi_defect(alg, a, m, b, k, c, l)
            if not d.is_zero():
                report.append(Violation("jacobi", (a, m, b, k, c, l), f"defect {d}"))
    if module_level >= 0 and not report:
        from .fock import ModuleSpec, representation_defects

        mod = ModuleSpec.vacuum(alg)
        report.extend(representation_defects(mod, index_window, module_level))
    return report
