"""Factories for the example algebras and the lattice vertex algebra."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from .algebra import AlgebraSpec, BracketRule, BracketTerm, GeneratorSpec, Poly
from .exact import rat
from .fock import FockState, ModuleSpec, vec_add


def _matrix(Q, n: int | None = None) -> tuple[tuple[Fraction, ...], ...]:
    if not isinstance(Q, (list, tuple)) or not Q:
        # a scalar stands for that multiple of the identity
        k = n or 1
        Q = [[Q if i == j else 0 for j in range(k)] for i in range(k)]
    M = tuple(tuple(rat(x) for x in row) for row in Q)
    if any(len(r) != len(M) for r in M):
        raise ValueError("form matrix must be square")
    if n is not None and len(M) != n:
        raise ValueError(f"form matrix is {len(M)}x{len(M)}, expected {n}x{n}")
    return M


def _check_symmetric(M) -> None:
    n = len(M)
    for i, j in product(range(n), repeat=2):
        if M[i][j] != M[j][i]:
            raise ValueError(f"Q is not symmetric: Q[{i}][{j}] = {M[i][j]} but Q[{j}][{i}] = {M[j][i]}")


def heisenberg_names(rank: int) -> list[str]:
    return ["a"] if rank == 1 else [f"a{i + 1}" for i in range(rank)]


def heisenberg(rank: int, Q=1, names: Sequence[str] | None = None) -> AlgebraSpec:
    """Weight-one currents with [a^i_m, a^j_k] = m Q_ij delta_{m+k,0}."""
    M = _matrix(Q, rank)
    _check_symmetric(M)
    names = list(names or heisenberg_names(rank))
    gens = [GeneratorSpec(nm, 1) for nm in names]
    rules = [
        BracketRule(names[i], names[j], (), Poly.in_m(0, M[i][j]))
        for i in range(rank)
        for j in range(i, rank)
        if M[i][j]
    ]
    return AlgebraSpec(gens, rules, name=f"heisenberg({rank})", meta={"Q": M})


# ---------------------------------------------------------------------------
# Lie algebras with invariant forms


class InvalidLieData(ValueError):
    pass


@dataclass(frozen=True)
class LieAlgebraData:
    """Structure constants [u_i, u_j] = sum_k f[i][j][k] u_k and a symmetric form Q."""

    dimension: int
    structure_constants: Mapping[tuple[int, int], Mapping[int, Fraction]]
    Q: tuple[tuple[Fraction, ...], ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        sc = {}
        for (i, j), row in self.structure_constants.items():
            r = {k: rat(v) for k, v in row.items() if rat(v)}
            if r:
                sc[i, j] = r
        object.__setattr__(self, "structure_constants", sc)
        object.__setattr__(self, "Q", _matrix(self.Q, self.dimension))
        if not self.names:
            object.__setattr__(self, "names", tuple(f"u{i + 1}" for i in range(self.dimension)))
        if len(self.names) != self.dimension:
            raise InvalidLieData("wrong number of basis names")
        self.validate()

    def f(self, i: int, j: int) -> Mapping[int, Fraction]:
        return self.structure_constants.get((i, j), {})

    def bracket_vec(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> list[Fraction]:
        out = [Fraction(0)] * self.dimension
        for (i, j), row in self.structure_constants.items():
            c = x[i] * y[j]
            if c:
                for k, v in row.items():
                    out[k] += c * v
        return out

    def form(self, x, y) -> Fraction:
        n = self.dimension
        return sum((x[i] * self.Q[i][j] * y[j] for i in range(n) for j in range(n)), Fraction(0))

    def unit(self, i: int) -> list[Fraction]:
        v = [Fraction(0)] * self.dimension
        v[i] = Fraction(1)
        return v

    def validate(self) -> None:
        n = self.dimension
        E = [self.unit(i) for i in range(n)]
        for i, j in product(range(n), repeat=2):
            a = self.bracket_vec(E[i], E[j])
            b = self.bracket_vec(E[j], E[i])
            if any(x + y for x, y in zip(a, b)):
                raise InvalidLieData(f"antisymmetry fails for ({self.names[i]}, {self.names[j]})")
        for i, j, k in product(range(n), repeat=3):
            t1 = self.bracket_vec(E[i], self.bracket_vec(E[j], E[k]))
            t2 = self.bracket_vec(E[j], self.bracket_vec(E[k], E[i]))
            t3 = self.bracket_vec(E[k], self.bracket_vec(E[i], E[j]))
            if any(x + y + z for x, y, z in zip(t1, t2, t3)):
                raise InvalidLieData(
                    f"Jacobi fails for ({self.names[i]}, {self.names[j]}, {self.names[k]})"
                )
        _check_symmetric(self.Q)
        for i, j, k in product(range(n), repeat=3):
            v = self.form(self.bracket_vec(E[i], E[j]), E[k]) + self.form(E[j], self.bracket_vec(E[i], E[k]))
            if v:
                raise InvalidLieData(
                    f"Q is not ad-invariant: Q([{self.names[i]},{self.names[j]}],{self.names[k]}) "
                    f"+ Q({self.names[j]},[{self.names[i]},{self.names[k]}]) = {v}"
                )

    def killing(self) -> tuple[tuple[Fraction, ...], ...]:
        n = self.dimension
        ad = []
        for i in range(n):
            # ad(u_i) as a matrix: column j = [u_i, u_j]
            cols = [self.bracket_vec(self.unit(i), self.unit(j)) for j in range(n)]
            ad.append([[cols[c][r] for c in range(n)] for r in range(n)])
        K = [[Fraction(0)] * n for _ in range(n)]
        for i, j in product(range(n), repeat=2):
            K[i][j] = sum((ad[i][r][s] * ad[j][s][r] for r in range(n) for s in range(n)), Fraction(0))
        return tuple(tuple(r) for r in K)

    def with_form(self, Q) -> "LieAlgebraData":
        return LieAlgebraData(self.dimension, self.structure_constants, Q, self.names)

    def is_abelian(self) -> bool:
        return not self.structure_constants


def abelian(dimension: int, Q) -> LieAlgebraData:
    return LieAlgebraData(dimension, {}, _matrix(Q, dimension), tuple(heisenberg_names(dimension)))


def sl2(q=1) -> LieAlgebraData:
    """sl2 in the basis (e, h, f) with Q = q times the Killing form."""
    sc = {
        (1, 0): {0: 2}, (0, 1): {0: -2},
        (1, 2): {2: -2}, (2, 1): {2: 2},
        (0, 2): {1: 1}, (2, 0): {1: -1},
    }
    zero = ((0, 0, 0),) * 3
    g = LieAlgebraData(3, sc, zero, ("e", "h", "f"))
    K = g.killing()
    q = rat(q)
    return g.with_form([[q * x for x in row] for row in K])


def kac_moody(g: LieAlgebraData) -> AlgebraSpec:
    """[x^i_m, x^j_k] = sum_l f_ij^l x^l_{m+k} + m Q_ij delta_{m+k,0}."""
    n = g.dimension
    gens = [GeneratorSpec(nm, 1) for nm in g.names]
    rules = []
    for i in range(n):
        for j in range(i, n):
            terms = tuple(
                BracketTerm(Poly.const(v), g.names[l]) for l, v in sorted(g.f(i, j).items())
            )
            central = Poly.in_m(0, g.Q[i][j]) if g.Q[i][j] else Poly()
            if terms or central:
                rules.append(BracketRule(g.names[i], g.names[j], terms, central))
    return AlgebraSpec(gens, rules, name=f"kac_moody({','.join(g.names)})", meta={"lie": g})


def virasoro(c=0) -> AlgebraSpec:
    c = rat(c)
    rule = BracketRule(
        "L", "L",
        (BracketTerm(Poly.of({(1, 0): 1, (0, 1): -1}), "L"),),
        Poly.in_m(0, -c / 12, 0, c / 12),
    )
    return AlgebraSpec([GeneratorSpec("L", 2)], [rule], central_charge=c, name=f"virasoro({c})")


def virasoro_with_central(poly: Poly, c=0) -> AlgebraSpec:
    """Virasoro-type algebra with an arbitrary central polynomial (for negative controls)."""
    rule = BracketRule("L", "L", (BracketTerm(Poly.of({(1, 0): 1, (0, 1): -1}), "L"),), poly)
    return AlgebraSpec([GeneratorSpec("L", 2)], [rule], central_charge=rat(c), name="virasoro*")


def bc_system(n: int) -> AlgebraSpec:
    """Odd b (weight n, ghost number -1) and c (weight 1-n, ghost number +1), {b_m, c_k} = delta_{m+k,0}."""
    gens = [GeneratorSpec("b", n, 1, ghost=-1), GeneratorSpec("c", 1 - n, 1, ghost=1)]
    rules = [BracketRule("b", "c", (), Poly.const(1))]
    return AlgebraSpec(gens, rules, super=True, name=f"bc({n})", meta={"n": n})


@dataclass(frozen=True)
class DilatonSpec:
    lam: Fraction
    Q: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lam", rat(self.lam))
        object.__setattr__(self, "Q", rat(self.Q))
        if not self.Q:
            raise ValueError("the dilaton form Q must be nonzero")


def dilaton(spec: DilatonSpec) -> AlgebraSpec:
    """Twisted Heisenberg algebra A(lambda, Q) on one current a.

    The twist does not touch the brackets; lambda only enters the stress
    tensor. The mode pairing is [a_m, a_k] = -m Q delta_{m+k,0}: this is the
    sign for which the stress tensor of the twisted algebra is rational with
    central charge 1 + 3 lambda^2 / Q, and for which the fermion-number
    current of bc(n) realizes A(2n-1, -1).
    """
    alg = heisenberg(1, -spec.Q)
    return AlgebraSpec(
        alg.generators,
        alg.rules.values(),
        name=f"dilaton({spec.lam},{spec.Q})",
        meta={"lambda": spec.lam, "Q": spec.Q},
    )


# ---------------------------------------------------------------------------
# lattice vertex algebra


class InvalidLattice(ValueError):
    pass


@dataclass(frozen=True)
class LatticeSpec:
    gram: tuple[tuple[int, ...], ...]
    cocycle: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        G = tuple(tuple(int(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", G)
        r = len(G)
        if any(len(row) != r for row in G):
            raise InvalidLattice("Gram matrix must be square")
        for i, j in product(range(r), repeat=2):
            if G[i][j] != G[j][i]:
                raise InvalidLattice(f"Gram matrix is not symmetric at ({i}, {j})")
        for i in range(r):
            if G[i][i] % 2:
                raise InvalidLattice(f"odd lattice: Q(e{i + 1}, e{i + 1}) = {G[i][i]} is odd")
        if self.cocycle is None:
            eps = tuple(
                tuple((-1) ** G[i][j] if i > j else 1 for j in range(r)) for i in range(r)
            )
            object.__setattr__(self, "cocycle", eps)
        else:
            eps = tuple(tuple(int(x) for x in row) for row in self.cocycle)
            object.__setattr__(self, "cocycle", eps)
        for i, j in product(range(r), repeat=2):
            e = self.cocycle[i][j]
            if e not in (1, -1):
                raise InvalidLattice("cocycle values must be +1 or -1")
            if e * self.cocycle[j][i] != (-1) ** G[i][j]:
                raise InvalidLattice(
                    f"cocycle violates eps(e{i + 1},e{j + 1}) eps(e{j + 1},e{i + 1}) = (-1)^Q(e{i + 1},e{j + 1})"
                )

    @property
    def rank(self) -> int:
        return len(self.gram)

    def form(self, x: Sequence[int], y: Sequence[int]) -> int:
        r = self.rank
        return sum(x[i] * self.gram[i][j] * y[j] for i in range(r) for j in range(r))

    def eps(self, x: Sequence[int], y: Sequence[int]) -> int:
        s = 1
        for i in range(self.rank):
            for j in range(self.rank):
                if self.cocycle[i][j] == -1 and (x[i] * y[j]) % 2:
                    s = -s
        return s


def _vec(lam, rank: int) -> tuple[int, ...]:
    if isinstance(lam, int):
        lam = (lam,)
    lam = tuple(int(x) for x in lam)
    if len(lam) != rank:
        raise ValueError(f"lattice vector {lam} has wrong rank")
    return lam


class LatticeVOA:
    """Sectors (Heisenberg Weyl modules) and FLM vertex operators of an even lattice.

    Sector ``lam`` is the rank-r Heisenberg module with zero modes
    ``a^i_0 = Q(lam, e_i)``. A combined state is a pair (sector, Fock state).
    The vertex operator is

        Gamma_lam(z) = e^lam z^{lam_0} exp(sum_{n>0} lam_{-n} z^n / n)
                                       exp(-sum_{n>0} lam_n z^{-n} / n)

    with ``e^lam |mu; s> = eps(lam, mu) |lam + mu; s>`` and modes
    ``Gamma_lam(z) = sum_k Gamma_{lam,k} z^{-k - Q(lam,lam)/2}``.
    """

    def __init__(self, spec: LatticeSpec):
        self.spec = spec
        self.rank = spec.rank
        self.names = heisenberg_names(spec.rank)
        self.heisenberg = heisenberg(spec.rank, [list(r) for r in spec.gram], self.names)
        self._sectors: dict[tuple[int, ...], ModuleSpec] = {}

    def sector(self, lam) -> ModuleSpec:
        lam = _vec(lam, self.rank)
        mod = self._sectors.get(lam)
        if mod is None:
            hw = {self.names[i]: self.spec.form(lam, [int(i == j) for j in range(self.rank)])
                  for i in range(self.rank)}
            label = str(lam[0]) if self.rank == 1 else ",".join(map(str, lam))
            mod = ModuleSpec(self.heisenberg, hw, label=label)
            self._sectors[lam] = mod
        return mod

    def sectors(self, window: int) -> dict[tuple[int, ...], ModuleSpec]:
        rng = range(-window, window + 1)
        return {lam: self.sector(lam) for lam in product(rng, repeat=self.rank)}

    def conformal_weight(self, lam) -> Fraction:
        lam = _vec(lam, self.rank)
        return Fraction(self.spec.form(lam, lam), 2)

    def _h_mode(self, lam, n: int, vec, mod: ModuleSpec) -> dict:
        out: dict = {}
        for i, x in enumerate(lam):
            if x:
                vec_add(out, mod.apply(self.names[i], n, vec), x)
        return out

    def vertex_operator_mode(self, lam, k: int, mu, state: FockState) -> dict:
        """Gamma_{lam,k} on |mu; state>; returns {(lam+mu, state'): coefficient}."""
        lam = _vec(lam, self.rank)
        mu = _vec(mu, self.rank)
        src = self.sector(mu)
        nu = tuple(a + b for a, b in zip(lam, mu))
        delta = self.conformal_weight(lam)
        qlm = self.spec.form(lam, mu)
        level = src.level(state)
        # E^+ expansion: v[d] is the z^{-d} coefficient
        v = [{state: Fraction(1)}]
        for d in range(1, level + 1):
            acc: dict = {}
            for j in range(1, d + 1):
                vec_add(acc, self._h_mode(lam, j, v[d - j], src), Fraction(-1, d))
            v.append(acc)
        out: dict = {}
        for d, vd in enumerate(v):
            if not vd:
                continue
            e = d - k - delta - qlm
            if e < 0 or e != int(e):
                continue
            e = int(e)
            w = [vd]
            for ee in range(1, e + 1):
                acc = {}
                for j in range(1, ee + 1):
                    vec_add(acc, self._h_mode(lam, -j, w[ee - j], src), Fraction(1, ee))
                w.append(acc)
            vec_add(out, w[e])
        sign = self.spec.eps(lam, mu)
        return {(nu, s): sign * c for s, c in out.items()}

    def vertex_operator_apply(self, lam, k: int, vec: Mapping) -> dict:
        out: dict = {}
        for (mu, s), c in vec.items():
            vec_add(out, self.vertex_operator_mode(lam, k, mu, s), c)
        return out

    def heisenberg_apply(self, g: str, m: int, vec: Mapping) -> dict:
        out: dict = {}
        for (mu, s), c in vec.items():
            for t, x in self.sector(mu).act(g, m, s).items():
                vec_add(out, {(mu, t): x}, c)
        return out


def lattice_voa(spec: LatticeSpec) -> LatticeVOA:
    return LatticeVOA(spec)
