"""Genus-0 coinvariants, correlation functions and characters.

Correlators are rational functions of insertion points z1..zn with poles
only on diagonals, stored as sums of factored terms
``scalar * prod_{i<j} (zi - zj)^e_ij``. Each closed form is matched against
the mode expansion

    <X1(z1) ... Xn(zn)> = sum_m phi(X1_{m1} ... Xn_{mn} |0>) prod zi^(-mi-Di)

in the region |z1| > ... > |zn|, where phi is the normalized functional on
genus-0 coinvariants of the vacuum module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb
from typing import Iterable, Mapping, Sequence

from .algebra import AlgebraSpec, bracket_modes
from .constructors import LatticeVOA, bc_system
from .exact import QSeries, RatMatrix, matrix_rank_kernel, partition_series, rat
from .fock import FockState, ModuleSpec, build_basis


# ---------------------------------------------------------------------------
# rational functions in factored form


def gen_binom(e: int, r: int) -> Fraction:
    """Binomial coefficient C(e, r) for any integer e and r >= 0."""
    if r < 0:
        return Fraction(0)
    if e >= 0:
        return Fraction(comb(e, r)) if r <= e else Fraction(0)
    out = Fraction(1)
    for i in range(r):
        out = out * (e - i) / (i + 1)
    return out


@dataclass(frozen=True)
class FactoredTerm:
    scalar: Fraction
    exponents: tuple[tuple[tuple[int, int], int], ...]  # ((i, j), e) with i < j, 1-based, e != 0

    @classmethod
    def of(cls, scalar, exps: Mapping[tuple[int, int], int]) -> "FactoredTerm":
        norm: dict[tuple[int, int], int] = {}
        sign = 1
        for (i, j), e in exps.items():
            if i == j:
                raise ValueError("a factor (zi - zi) is not allowed")
            if i > j:
                i, j = j, i
                sign *= (-1) ** (e % 2)
            norm[i, j] = norm.get((i, j), 0) + e
        return cls(sign * rat(scalar), tuple(sorted((p, e) for p, e in norm.items() if e)))

    def __str__(self):
        parts = [f"(z{i}-z{j})^{e}" for (i, j), e in self.exponents]
        s = self.scalar
        parts.append(f"({s.numerator}/{s.denominator})")
        return " * ".join(parts)

    def evaluate(self, z: Sequence) -> Fraction:
        out = Fraction(self.scalar)
        for (i, j), e in self.exponents:
            d = rat(z[i - 1]) - rat(z[j - 1])
            if not d and e < 0:
                raise ZeroDivisionError(f"pole at z{i} = z{j}")
            out *= d**e
        return out

    def degree(self) -> int:
        return sum(e for _, e in self.exponents)

    def expansion_coefficient(self, powers: Sequence[int]) -> Fraction:
        """Coefficient of prod zi^powers[i] in the expansion for |z1| > ... > |zn|."""
        n = len(powers)
        e = {p: x for p, x in self.exponents}
        if any(j > n for (_, j) in e):
            raise ValueError("term mentions more points than the exponent vector")
        if sum(powers) != self.degree():
            return Fraction(0)
        total = Fraction(0)
        r: dict[tuple[int, int], int] = {}

        def rec(j: int, acc: Fraction):
            nonlocal total
            if j == 0:
                total += acc
                return
            need = powers[j - 1] - sum(e.get((j, l), 0) - r[j, l] for l in range(j + 1, n + 1))
            lefts = [i for i in range(1, j)]
            if not lefts:
                if need == 0:
                    rec(j - 1, acc)
                return
            if need < 0:
                return
            for parts in _compositions(need, len(lefts)):
                c = acc
                for i, ri in zip(lefts, parts):
                    ex = e.get((i, j), 0)
                    c *= gen_binom(ex, ri) * (-1) ** ri
                    if not c:
                        break
                if c:
                    for i, ri in zip(lefts, parts):
                        r[i, j] = ri
                    rec(j - 1, c)

        rec(n, self.scalar)
        return total


def _compositions(total: int, k: int):
    if k == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, k - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class RationalFunction:
    npoints: int
    terms: tuple[FactoredTerm, ...] = ()

    @classmethod
    def of(cls, npoints: int, terms: Iterable[FactoredTerm]) -> "RationalFunction":
        acc: dict = {}
        for t in terms:
            acc[t.exponents] = acc.get(t.exponents, Fraction(0)) + t.scalar
        return cls(npoints, tuple(FactoredTerm(c, ex) for ex, c in sorted(acc.items()) if c))

    @classmethod
    def zero(cls, npoints: int) -> "RationalFunction":
        return cls(npoints, ())

    def is_zero(self) -> bool:
        return not self.terms

    def __str__(self):
        return " + ".join(str(t) for t in self.terms) if self.terms else "0"

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction.of(max(self.npoints, other.npoints), self.terms + other.terms)

    def scale(self, c) -> "RationalFunction":
        return RationalFunction.of(self.npoints, [FactoredTerm(rat(c) * t.scalar, t.exponents) for t in self.terms])

    def evaluate(self, z: Sequence) -> Fraction:
        return sum((t.evaluate(z) for t in self.terms), Fraction(0))

    def expansion_coefficient(self, powers: Sequence[int]) -> Fraction:
        return sum((t.expansion_coefficient(powers) for t in self.terms), Fraction(0))

    def exponents(self) -> dict[tuple[int, int], int]:
        if len(self.terms) != 1:
            raise ValueError("exponents are defined for a single factored term")
        return dict(self.terms[0].exponents)

    def permute(self, perm: Sequence[int]) -> "RationalFunction":
        """Relabel point i as perm[i-1]."""
        terms = []
        for t in self.terms:
            exps = {(perm[i - 1], perm[j - 1]): e for (i, j), e in t.exponents}
            terms.append(FactoredTerm.of(t.scalar, exps))
        return RationalFunction.of(self.npoints, terms)


# ---------------------------------------------------------------------------
# coinvariants


class UnstableTruncation(ValueError):
    def __init__(self, msg: str, values):
        super().__init__(msg)
        self.values = values


def global_modes(alg: AlgebraSpec, cutoff: int) -> list[tuple[str, int]]:
    """Modes g_m, -cutoff <= m <= weight(g) - 1, of fields regular away from the insertion."""
    return [(g.name, m) for g in alg.generators for m in range(-cutoff, g.weight)]


@dataclass
class Coinvariants:
    dims: dict[int, int]
    functionals: dict[int, list[dict]]  # level -> functionals on that graded piece, each state -> coefficient

    @property
    def dimension(self) -> int:
        return sum(self.dims.values())


def coinvariants(mod: ModuleSpec, cutoff: int) -> Coinvariants:
    """Per-level cokernel of the global modes acting on the vacuum module, levels <= cutoff."""
    alg = mod.algebra
    # deep enough that every source state of level >= min_level is reached
    modes = global_modes(alg, cutoff - mod.min_level)
    reach = max((m for _, m in modes), default=0)
    basis = build_basis(mod, cutoff + max(reach, 0))
    dims, funcs = {}, {}
    for L in range(mod.min_level, cutoff + 1):
        target = basis.get(L, [])
        if not target:
            continue
        index = {s: i for i, s in enumerate(target)}
        # rows: images; the cokernel functionals are the kernel of the transpose
        rows = []
        for g, m in modes:
            for s in basis.get(L + m, []):
                img = mod.act(g, m, s)
                if img:
                    rows.append({index[t]: c for t, c in img.items()})
        M = RatMatrix(len(rows), len(target), {(r, c): v for r, row in enumerate(rows) for c, v in row.items()})
        _, ker = matrix_rank_kernel(M)
        # ker spans the annihilator of the image inside the dual of the piece
        dims[L] = len(ker)
        funcs[L] = [{target[i]: x for i, x in enumerate(v) if x} for v in ker]
    return Coinvariants({L: d for L, d in dims.items() if d}, {L: f for L, f in funcs.items() if f})


def _stable(compute, cutoff: int, what: str) -> int:
    a, b = compute(cutoff), compute(cutoff + 1)
    if a != b:
        raise UnstableTruncation(f"{what}: dimension {a} at cutoff {cutoff} but {b} at cutoff {cutoff + 1}", (a, b))
    return a


def genus0_blocks_dim(mod: ModuleSpec, cutoff: int = 4) -> int:
    """Dimension of genus-0 one-point coinvariants, asserted equal at cutoff and cutoff + 1."""
    return _stable(lambda k: coinvariants(mod, k).dimension, cutoff, repr(mod))


def lattice_coinvariant_dim(voa: LatticeVOA, window: int, cutoff: int) -> int:
    """Coinvariants of the sum of sectors |lam| <= window truncated at L_0 <= cutoff.

    The global operators are the Heisenberg modes a_m (m <= 0) and the vertex
    operator modes Gamma_{lam,k} (k <= Q(lam,lam)/2 - 1) for lam = +-e_i.
    """
    sectors = voa.sectors(window)
    # states graded by conformal weight h = Q(mu,mu)/2 + level
    graded: dict[Fraction, list] = {}
    top = cutoff + 2
    for mu, mod in sectors.items():
        h0 = voa.conformal_weight(mu)
        if h0 > top:
            continue
        for L, states in build_basis(mod, int(top - h0)).items():
            for s in states:
                graded.setdefault(h0 + L, []).append((mu, s))
    roots = []
    for i in range(voa.rank):
        e = [0] * voa.rank
        e[i] = 1
        roots += [tuple(e), tuple(-x for x in e)]
    total = 0
    for h in sorted(graded):
        if h > cutoff:
            continue
        target = graded[h]
        index = {x: i for i, x in enumerate(target)}
        rows = []
        for g in voa.names:
            for m in range(-cutoff - 1, 1):
                for mu, s in graded.get(h + m, []):
                    img = sectors[mu].act(g, m, s)
                    if img:
                        rows.append({index[(mu, t)]: c for t, c in img.items()})
        for lam in roots:
            D = voa.conformal_weight(lam)
            for k in range(-cutoff - 1, int(D)):
                for mu, s in graded.get(h + k, []):
                    nu = tuple(a + b for a, b in zip(lam, mu))
                    if nu not in sectors:
                        continue
                    img = voa.vertex_operator_mode(lam, k, mu, s)
                    if img:
                        rows.append({index[x]: c for x, c in img.items()})
        M = RatMatrix(len(rows), len(target), {(r, c): v for r, row in enumerate(rows) for c, v in row.items()})
        rank, _ = matrix_rank_kernel(M)
        total += len(target) - rank
    return total


def lattice_blocks_dim(voa: LatticeVOA, window: int = 2, cutoff: int = 3) -> int:
    return _stable(lambda k: lattice_coinvariant_dim(voa, window, k), cutoff, "lattice sectors")


# ---------------------------------------------------------------------------
# the vacuum functional and mode-sum oracles


class VacuumFunctional:
    """The normalized coinvariant functional phi on a vacuum module.

    phi is 1 on the normalizing state: the vacuum when it survives,
    otherwise the product of all zero-mode-type creation modes below level
    cutoff in normal form (c(-1) c(0) c(1) |0> for the weight (2, -1) ghosts).
    """

    def __init__(self, mod: ModuleSpec, cutoff: int = 3, normalize_at: FockState | None = None):
        co = coinvariants(mod, cutoff)
        if co.dimension != 1:
            raise ValueError(f"coinvariants have dimension {co.dimension}; the functional is not unique")
        (self.level, (f,)), = co.functionals.items()
        if normalize_at is None:
            normalize_at = () if () in f else min(f, key=lambda s: (len(s), mod.state_key(s)))
        if normalize_at not in f:
            raise ValueError(f"the functional vanishes on {mod.format_state(normalize_at)}")
        k = f[normalize_at]
        self.values = {s: c / k for s, c in f.items()}
        self.normalized_at = normalize_at
        self.mod = mod

    def __call__(self, vec: Mapping) -> Fraction:
        return sum((c * self.values.get(s, 0) for s, c in vec.items()), Fraction(0))


def mode_correlator_coefficient(mod: ModuleSpec, phi: VacuumFunctional, fields: Sequence[str], modes: Sequence[int]) -> Fraction:
    """phi(X1_{m1} ... Xn_{mn} |0>)."""
    v = {(): Fraction(1)}
    for g, m in reversed(list(zip(fields, modes))):
        v = mod.apply(g, m, v)
        if not v:
            return Fraction(0)
    return phi(v)


def mode_oracle_mismatches(rf: RationalFunction, mod: ModuleSpec, fields: Sequence[str], cutoff: int, phi=None) -> list:
    """Mode tuples with |mi| <= cutoff where the closed form and the mode sum disagree."""
    phi = phi or VacuumFunctional(mod)
    alg = mod.algebra
    n = len(fields)
    bad = []
    weights = [alg[g].weight for g in fields]
    for head in product(range(-cutoff, cutoff + 1), repeat=n - 1):
        last = -phi.level - sum(head)
        if abs(last) > cutoff:
            continue
        ms = head + (last,)
        got = mode_correlator_coefficient(mod, phi, fields, ms)
        want = rf.expansion_coefficient([-m - w for m, w in zip(ms, weights)])
        if got != want:
            bad.append((ms, got, want))
    return bad


# ---------------------------------------------------------------------------
# closed forms


def perfect_matchings(items: Sequence[int]):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for i, other in enumerate(rest):
        for m in perfect_matchings(rest[:i] + rest[i + 1:]):
            yield [(first, other)] + m


def heisenberg_correlator(alg: AlgebraSpec, currents: Sequence[str]) -> RationalFunction:
    """Sum over perfect matchings of prod Q(ai, aj) / (zi - zj)^2."""
    n = len(currents)
    terms = []
    for match in perfect_matchings(list(range(1, n + 1))):
        c = Fraction(1)
        for i, j in match:
            c *= bracket_modes(currents[i - 1], 1, currents[j - 1], -1, alg).central
        if c:
            terms.append(FactoredTerm.of(c, {(i, j): -2 for i, j in match}))
    return RationalFunction.of(n, terms)


def lattice_correlator(voa: LatticeVOA, charges: Sequence) -> RationalFunction:
    """prod_{i<j} eps(li, lj) (zi - zj)^Q(li, lj), and 0 unless the charges sum to 0."""
    lams = [tuple(l) if not isinstance(l, int) else (l,) for l in charges]
    n = len(lams)
    if any(sum(l[i] for l in lams) for i in range(voa.rank)):
        return RationalFunction.zero(n)
    sign = 1
    exps = {}
    for i in range(n):
        for j in range(i + 1, n):
            sign *= voa.spec.eps(lams[i], lams[j])
            exps[i + 1, j + 1] = voa.spec.form(lams[i], lams[j])
    return RationalFunction.of(n, [FactoredTerm.of(sign, exps)])


def lattice_mode_mismatches(voa: LatticeVOA, charges: Sequence, cutoff: int) -> list:
    """Compare lattice_correlator with <0| Gamma_{l1,k1} ... Gamma_{ln,kn} |0>."""
    lams = [tuple(l) if not isinstance(l, int) else (l,) for l in charges]
    rf = lattice_correlator(voa, lams)
    zero = tuple([0] * voa.rank)
    ws = [voa.conformal_weight(l) for l in lams]
    bad = []
    for head in product(range(-cutoff, cutoff + 1), repeat=len(lams) - 1):
        ks = head + (-sum(head),)
        if abs(ks[-1]) > cutoff:
            continue
        v = {(zero, ()): Fraction(1)}
        for l, k in reversed(list(zip(lams, ks))):
            v = voa.vertex_operator_apply(l, k, v)
        got = v.get((zero, ()), Fraction(0))
        powers = [-k - w for k, w in zip(ks, ws)]
        if any(p != int(p) for p in powers):
            continue
        want = rf.expansion_coefficient([int(p) for p in powers])
        if got != want:
            bad.append((ks, got, want))
    return bad


def bc_zero_mode_balance(n: int) -> int:
    """Required (number of c insertions) - (number of b insertions) at genus 0."""
    return 2 * n - 1


def _perm_sign(seq: Sequence[int]) -> int:
    s = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                s = -s
    return s


def bc_correlator(n: int, kinds: Sequence[str]) -> RationalFunction:
    """<X1(z1) ... Xk(zk)> for Xi in {"b", "c"}, normalized by the vacuum functional.

    Zero unless #c - #b = 2n - 1. Otherwise, with the b-points x and
    c-points y in their order of appearance,

        sign * prod_{b pairs}(x - x') prod_{c pairs}(y - y') / prod_{b, c}(x - y)

    where sign is the sign of the permutation that moves every b in front of
    every c. The functional is normalized to 1 on the product of zero modes
    in normal form; with that choice no further sign appears (checked against
    the mode expansion for up to five insertions).
    """
    kinds = list(kinds)
    if any(k not in ("b", "c") for k in kinds):
        raise ValueError("insertions must be 'b' or 'c'")
    nb, nc = kinds.count("b"), kinds.count("c")
    npts = len(kinds)
    if nc - nb != bc_zero_mode_balance(n):
        return RationalFunction.zero(npts)
    bs = [i + 1 for i, k in enumerate(kinds) if k == "b"]
    cs = [i + 1 for i, k in enumerate(kinds) if k == "c"]
    sign = _perm_sign(bs + cs)
    exps: dict[tuple[int, int], int] = {}
    for grp in (bs, cs):
        for a in range(len(grp)):
            for b in range(a + 1, len(grp)):
                exps[grp[a], grp[b]] = 1
    for x in bs:
        for y in cs:
            exps[x, y] = exps.get((x, y), 0) - 1
    return RationalFunction.of(npts, [FactoredTerm.of(sign, exps)])


def bc_vacuum_functional(n: int, cutoff: int = 3) -> VacuumFunctional:
    mod = ModuleSpec.vacuum(bc_system(n))
    # zero modes of the field with nonpositive weight, in normal form
    if n >= 1:
        zm = tuple(("c", m) for m in range(-(n - 1), n))
    else:
        zm = tuple(("b", m) for m in range(n, 1 - n))
    return VacuumFunctional(mod, cutoff, zm)


# ---------------------------------------------------------------------------
# characters


def character(mod: ModuleSpec, cutoff: int, ghost: bool = False):
    """Graded dimensions sum dim V_L q^L up to q^cutoff; with ghost=True a dict y-power -> QSeries."""
    basis = build_basis(mod, cutoff)
    if not ghost:
        return QSeries.from_dict({L: len(s) for L, s in basis.items() if s}, cutoff)
    out: dict[int, dict[int, int]] = {}
    for L, states in basis.items():
        for s in states:
            g = mod.ghost_number(s)
            out.setdefault(g, {})
            out[g][L] = out[g].get(L, 0) + 1
    return {g: QSeries.from_dict(d, cutoff) for g, d in sorted(out.items())}


def fermionic_character(n: int, cutoff: int) -> dict[int, QSeries]:
    """prod_{k >= 1-n} (1 + y q^k) prod_{k >= n} (1 + y^-1 q^k), truncated at q^cutoff."""
    factors = [(1, k) for k in range(1 - n, 0)] + [(-1, k) for k in range(n, 0)]
    floor = sum(k for _, k in factors)
    factors += [(1, k) for k in range(max(1 - n, 0), cutoff - floor + 1)]
    factors += [(-1, k) for k in range(max(n, 0), cutoff - floor + 1)]
    acc: dict[tuple[int, int], int] = {(0, 0): 1}
    # the nonpositive powers come first, so afterwards exponents only grow
    for y, k in factors:
        nxt = dict(acc)
        for (g, e), c in acc.items():
            if k <= 0 or e + k <= cutoff:
                nxt[g + y, e + k] = nxt.get((g + y, e + k), 0) + c
        acc = nxt
    out: dict[int, dict[int, int]] = {}
    for (g, e), c in acc.items():
        if e <= cutoff and c:
            out.setdefault(g, {})[e] = c
    return {g: QSeries.from_dict(d, cutoff) for g, d in sorted(out.items())}


def bosonic_character(n: int, cutoff: int) -> dict[int, QSeries]:
    """sum_g y^g q^{g(g-2n+1)/2} / prod_{m >= 1}(1 - q^m), truncated at q^cutoff."""
    P = partition_series(max(cutoff, 0) + 2 * n * n + 2)
    out = {}
    span = 2 * abs(n) + 2 * abs(cutoff) + 4
    for g in range(-span, span + 1):
        e = g * (g - 2 * n + 1) // 2
        if e > cutoff:
            continue
        coeffs = {e + k: c for k, c in P.items() if e + k <= cutoff}
        out[g] = QSeries.from_dict(coeffs, cutoff)
    return dict(sorted(out.items()))


def series_equal(a: Mapping[int, QSeries], b: Mapping[int, QSeries], cutoff: int) -> bool:
    keys = set(a) | set(b)
    for g in keys:
        da = {e: c for e, c in (a[g].items() if g in a else []) if e <= cutoff and c}
        db = {e: c for e, c in (b[g].items() if g in b else []) if e <= cutoff and c}
        if da != db:
            return False
    return True


def vacuum_character_oracle(alg: AlgebraSpec, cutoff: int) -> QSeries:
    """prod over even g of prod_{k >= wt g} (1 - q^k)^-1 times prod over odd g of prod_{k >= wt g} (1 + q^k).

    Built from the generator weights alone, so it is independent of the
    PBW basis enumeration it is compared with.
    """
    odd = [g.weight for g in alg.generators if g.parity]
    even = [g.weight for g in alg.generators if not g.parity]
    if any(w <= 0 for w in even):
        raise ValueError("an even generator of weight <= 0 gives infinite graded pieces")
    floor = sum(k for w in odd for k in range(w, 0))
    acc: dict[int, int] = {0: 1}
    fermi = sorted(k for w in odd for k in range(w, cutoff - floor + 1))
    for k in fermi:
        nxt = dict(acc)
        for e, c in acc.items():
            if k <= 0 or e + k <= cutoff:
                nxt[e + k] = nxt.get(e + k, 0) + c
        acc = nxt
    for w in even:
        for k in range(w, cutoff - floor + 1):
            # multiply by 1/(1 - q^k): running sum in steps of k
            nxt = dict(acc)
            for e in range(min(acc), cutoff + 1):
                if e - k in nxt:
                    nxt[e] = nxt.get(e, 0) + nxt[e - k]
            acc = nxt
    return QSeries.from_dict({e: c for e, c in acc.items() if e <= cutoff and c}, cutoff)
