"""Energy-momentum tensors, central charges and primary-field checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Mapping, Sequence

from .algebra import AlgebraSpec, bracket_modes
from .constructors import DilatonSpec, LieAlgebraData, bc_system, dilaton, kac_moody
from .exact import RatMatrix, matrix_rank_kernel, rat
from .fields import Deriv, FieldExpr, Gen, Sum, field_from_terms, nop
from .fock import ModuleSpec, build_basis, vec_add, vec_sub


class NoAdmissibleTensor(ValueError):
    """No Sugawara tensor B satisfies the required conditions.

    ``condition`` names the violated condition; ``witness`` is a tensor B
    satisfying every other condition (None if there is none).
    """

    def __init__(self, msg: str, condition: str, witness=None):
        super().__init__(msg)
        self.condition = condition
        self.witness = witness


class NotVirasoro(ValueError):
    """The modes of a field fail the Virasoro relations; ``witness`` is (m, k)."""

    def __init__(self, msg: str, witness=None):
        super().__init__(msg)
        self.witness = witness


# ---------------------------------------------------------------------------
# Sugawara


@dataclass(frozen=True)
class SugawaraTensor:
    B: tuple[tuple[Fraction, ...], ...]
    kappa: Fraction
    scalar: Fraction  # B o Q = scalar * Id
    c: Fraction


def _sugawara_system(g: LieAlgebraData, normalize: bool) -> tuple[RatMatrix, list[tuple[int, int]]]:
    n = g.dimension
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    idx = {p: t for t, p in enumerate(pairs)}
    KAPPA, SCAL, ONE = len(pairs), len(pairs) + 1, len(pairs) + 2

    def var(i, j):
        return idx[(i, j) if i <= j else (j, i)]

    rows: list[dict[int, Fraction]] = []

    def add(row):
        row = {k: v for k, v in row.items() if v}
        if row:
            rows.append(row)

    # invariance: sum_i b_is f_pi^r + sum_j b_rj f_pj^s = 0
    for p, r, s in product(range(n), repeat=3):
        row: dict[int, Fraction] = {}
        for i in range(n):
            c = g.f(p, i).get(r, 0)
            if c:
                row[var(i, s)] = row.get(var(i, s), 0) + c
        for j in range(n):
            c = g.f(p, j).get(s, 0)
            if c:
                row[var(r, j)] = row.get(var(r, j), 0) + c
        add(row)
    # sum_ij b_ij [u_i, [u_j, u_p]] = kappa u_p
    for p, r in product(range(n), repeat=2):
        row = {}
        for i, j in product(range(n), repeat=2):
            c = sum((v * g.f(i, q).get(r, 0) for q, v in g.f(j, p).items()), Fraction(0))
            if c:
                row[var(i, j)] = row.get(var(i, j), 0) + c
        if p == r:
            row[KAPPA] = Fraction(-1)
        add(row)
    # (B Q)_{il} = scalar delta_il
    for i, l in product(range(n), repeat=2):
        row = {}
        for j in range(n):
            if g.Q[j][l]:
                row[var(i, j)] = row.get(var(i, j), 0) + g.Q[j][l]
        if i == l:
            row[SCAL] = Fraction(-1)
        add(row)
    if normalize:
        add({SCAL: Fraction(2), KAPPA: Fraction(1), ONE: Fraction(-1)})
    ent = {(r, c): v for r, row in enumerate(rows) for c, v in row.items()}
    return RatMatrix(len(rows), ONE + 1, ent), pairs


def solve_sugawara_tensor(g: LieAlgebraData) -> SugawaraTensor:
    """The unique B with B ad-invariant, B o Q and kappa(B) scalar, 2(B o Q) + kappa(B) = Id."""
    M, pairs = _sugawara_system(g, normalize=True)
    ONE = M.cols - 1
    _, ker = matrix_rank_kernel(M)
    anchored = [v for v in ker if v[ONE]]
    n = g.dimension
    if not anchored:
        _, free = matrix_rank_kernel(_sugawara_system(g, normalize=False)[0])
        free = [v for v in free if any(v[: len(pairs)])]
        witness = _symmetric(free[0], pairs, n) if free else None
        detail = (
            "every symmetric ad-invariant B with B o Q and kappa(B) scalar "
            "has 2(B o Q) + kappa(B) = 0" if free
            else "no nonzero symmetric ad-invariant B has B o Q and kappa(B) scalar"
        )
        raise NoAdmissibleTensor(
            f"condition 2(B o Q) + kappa(B) = Id cannot be satisfied: {detail}",
            "2(B o Q) + kappa(B) = Id",
            witness,
        )
    if len(ker) > 1:
        raise NoAdmissibleTensor(
            f"the Sugawara conditions leave a {len(ker) - 1}-dimensional family of tensors B; refusing to choose",
            "uniqueness of B",
        )
    v = anchored[0]
    v = [x / v[ONE] for x in v]
    kappa, scalar = v[len(pairs)], v[len(pairs) + 1]
    return SugawaraTensor(_symmetric(v, pairs, n), kappa, scalar, 2 * scalar * n)


def _symmetric(v, pairs, n) -> tuple[tuple[Fraction, ...], ...]:
    B = [[Fraction(0)] * n for _ in range(n)]
    for t, (i, j) in enumerate(pairs):
        B[i][j] = B[j][i] = v[t]
    return tuple(map(tuple, B))


def sugawara(g: LieAlgebraData, alg: AlgebraSpec | None = None) -> tuple[SugawaraTensor, FieldExpr]:
    """Sugawara tensor and T = sum_ij b_ij :u_i u_j: for the Kac-Moody algebra of g."""
    tensor = solve_sugawara_tensor(g)
    alg = alg or kac_moody(g)
    terms = []
    for i, j in product(range(g.dimension), repeat=2):
        if tensor.B[i][j]:
            terms.append((tensor.B[i][j], [g.names[i], g.names[j]]))
    return tensor, field_from_terms(alg, terms)


def sugawara_trace_c(tensor: SugawaraTensor, g: LieAlgebraData) -> Fraction:
    n = g.dimension
    return 2 * sum((tensor.B[i][j] * g.Q[j][i] for i in range(n) for j in range(n)), Fraction(0))


# ---------------------------------------------------------------------------
# dilaton and bc


def dilaton_stress(current: FieldExpr, lam, Q) -> FieldExpr:
    """-(1/2Q) :J J: - (lam/2Q) dJ for a current J of the twisted algebra A(lam, Q)."""
    lam, Q = rat(lam), rat(Q)
    if not Q:
        raise ValueError("Q must be nonzero")
    return Sum.of([(-1 / (2 * Q), nop(current, current)), (-lam / (2 * Q), Deriv(current, 1))])


def dilaton_T(spec: DilatonSpec, alg: AlgebraSpec | None = None) -> FieldExpr:
    alg = alg or dilaton(spec)
    return dilaton_stress(Gen(alg, "a"), spec.lam, spec.Q)


def dilaton_central_charge(spec: DilatonSpec) -> Fraction:
    return 1 + 3 * spec.lam**2 / spec.Q


def bc_T(n: int, alg: AlgebraSpec | None = None, b: str = "b", c: str = "c") -> FieldExpr:
    """T = -n :b dc: - (n-1) :(db) c:.

    With {b_m, c_k} = delta_{m+k,0} this makes b primary of weight n and c
    primary of weight 1-n, with central charge -2(6n^2 - 6n + 1).
    """
    alg = alg or bc_system(n)
    return field_from_terms(alg, [(-n, [(b, 0), (c, 1)]), (-(n - 1), [(b, 1), (c, 0)])])


def bc_central_charge(n: int) -> Fraction:
    return Fraction(-2 * (6 * n * n - 6 * n + 1))


def fermion_current(alg: AlgebraSpec, b: str = "b", c: str = "c") -> FieldExpr:
    """j = -:b c: (so that j_0 counts c minus b quanta)."""
    return -nop(Gen(alg, b), Gen(alg, c))


# ---------------------------------------------------------------------------
# Virasoro checks


def _states(mod: ModuleSpec, max_level: int) -> list:
    basis = build_basis(mod, max_level)
    return [s for L in sorted(basis) for s in basis[L]]


def _op(T) -> Callable[[int, Mapping, ModuleSpec], dict]:
    if isinstance(T, FieldExpr):
        return lambda m, v, mod: T.apply(m, v, mod)
    return T


def virasoro_scalars(T, mod: ModuleSpec, window: int = 3, max_level: int = 4) -> dict[tuple[int, int], Fraction]:
    """x[m,k] with [L_m, L_k] - (m-k) L_{m+k} = x[m,k] * Id on all states of level <= max_level.

    Raises NotVirasoro when the left side is not a scalar multiple of the
    identity or is nonzero off m + k = 0.
    """
    L = _op(T)
    states = _states(mod, max_level)
    out = {}
    for m, k in product(range(-window, window + 1), repeat=2):
        x = None
        for s in states:
            v = {s: Fraction(1)}
            d = vec_sub(L(m, L(k, v, mod), mod), L(k, L(m, v, mod), mod))
            vec_add(d, L(m + k, v, mod), -(m - k))
            coeff = d.get(s, Fraction(0))
            if len(d) > (1 if s in d else 0):
                raise NotVirasoro(
                    f"[L_{m}, L_{k}] - ({m - k}) L_{m + k} is not a scalar on {mod.format_state(s)}: "
                    f"{mod.format_vector(d)}",
                    (m, k),
                )
            if x is None:
                x = coeff
            elif coeff != x:
                raise NotVirasoro(
                    f"[L_{m}, L_{k}] - ({m - k}) L_{m + k} acts by different scalars ({x} vs {coeff})",
                    (m, k),
                )
        x = x or Fraction(0)
        if m + k != 0 and x:
            raise NotVirasoro(f"central term {x} appears in [L_{m}, L_{k}] with m + k != 0", (m, k))
        out[m, k] = x
    return out


def extract_central_charge(T, mod: ModuleSpec, window: int = 3, max_level: int = 4) -> Fraction:
    """The unique c with [L_m, L_k] = (m-k) L_{m+k} + c/12 (m^3-m) delta_{m+k,0} on the window.

    Fitted from every 2 <= m <= window, required to vanish for m in {-1, 0, 1},
    and cross-checked against <hw| L_2 L_{-2} |hw> = 4h + c/2 when the
    highest-weight vector is an L_0 eigenvector killed by L_2.
    """
    if window < 2:
        raise ValueError("window must be at least 2")
    xs = virasoro_scalars(T, mod, window, max_level)
    c = None
    for m in range(-window, window + 1):
        x = xs[m, -m]
        poly = Fraction(m**3 - m, 12)
        if not poly:
            if x:
                raise NotVirasoro(f"[L_{m}, L_{-m}] carries a central term {x} where none is allowed", (m, -m))
            continue
        fit = x / poly
        if c is None:
            c = fit
        elif fit != c:
            raise NotVirasoro(f"inconsistent central charge: {c} from one mode, {fit} at m = {m}", (m, -m))
    L = _op(T)
    hw = {(): Fraction(1)}
    l0 = L(0, hw, mod)
    if set(l0) <= {()} and not L(2, hw, mod):
        h = l0.get((), Fraction(0))
        got = L(2, L(-2, hw, mod), mod).get((), Fraction(0))
        if got != 4 * h + c / 2:
            raise NotVirasoro(f"<hw|L_2 L_-2|hw> = {got} but 4h + c/2 = {4 * h + c / 2}", (2, -2))
    return c


def virasoro_defects(T, mod: ModuleSpec, c, window: int = 3, max_level: int = 4) -> list[tuple[int, int, str]]:
    """Every (m, k) where the full Virasoro relation with central charge c fails on levels <= max_level."""
    L = _op(T)
    c = rat(c)
    out = []
    states = _states(mod, max_level)
    for m, k in product(range(-window, window + 1), repeat=2):
        for s in states:
            v = {s: Fraction(1)}
            d = vec_sub(L(m, L(k, v, mod), mod), L(k, L(m, v, mod), mod))
            vec_add(d, L(m + k, v, mod), -(m - k))
            if m + k == 0:
                vec_add(d, v, -c * Fraction(m**3 - m, 12))
            if d:
                out.append((m, k, mod.format_state(s)))
                break
    return out


def verify_primary(T, g, weight: int, mod: ModuleSpec, window: int = 3) -> list[tuple[int, int]]:
    """(m, k) with [L_m, g_k] != ((weight-1) m - k) g_{m+k} on some state of level <= window."""
    L = _op(T)
    G = _op(Gen(mod.algebra, g) if isinstance(g, str) else g)
    states = _states(mod, window)
    bad = []
    for m, k in product(range(-window, window + 1), repeat=2):
        for s in states:
            v = {s: Fraction(1)}
            d = vec_sub(L(m, G(k, v, mod), mod), G(k, L(m, v, mod), mod))
            vec_add(d, G(m + k, v, mod), -((weight - 1) * m - k))
            if d:
                bad.append((m, k))
                break
    return bad


# ---------------------------------------------------------------------------
# Bose-Fermi


def field_matrices_equal(A, B, mod: ModuleSpec, modes: Sequence[int], max_level: int) -> list[tuple[int, str]]:
    """Modes and states where two fields act differently (levels <= max_level)."""
    FA, FB = _op(A), _op(B)
    out = []
    for m in modes:
        for s in _states(mod, max_level):
            v = {s: Fraction(1)}
            if vec_sub(FA(m, v, mod), FB(m, v, mod)):
                out.append((m, mod.format_state(s)))
                break
    return out


@dataclass
class BoseFermiReport:
    n: int
    cutoff: int
    heisenberg_failures: list = field(default_factory=list)
    ghost_number_failures: list = field(default_factory=list)
    stress_failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not (self.heisenberg_failures or self.ghost_number_failures or self.stress_failures)


def bose_fermi_check(n: int, cutoff: int = 3) -> BoseFermiReport:
    """Check that j = -:bc: realizes the twisted Heisenberg algebra A(2n-1, -1) inside bc(n).

    (i) j-modes obey the bracket table of dilaton(2n-1, -1);
    (ii) j_0 acts on every basis state by its ghost number;
    (iii) the dilaton stress tensor rebuilt from j equals bc_T(n) mode by mode.
    All on states of level <= cutoff and modes |m|, |k| <= cutoff.
    """
    alg = bc_system(n)
    mod = ModuleSpec.vacuum(alg)
    j = fermion_current(alg)
    spec = DilatonSpec(2 * n - 1, -1)
    target = dilaton(spec)
    rep = BoseFermiReport(n, cutoff)
    states = _states(mod, cutoff)
    rng = range(-cutoff, cutoff + 1)
    for m, k in product(rng, repeat=2):
        br = bracket_modes("a", m, "a", k, target)
        for s in states:
            v = {s: Fraction(1)}
            d = vec_sub(j.apply(m, j.apply(k, v, mod), mod), j.apply(k, j.apply(m, v, mod), mod))
            for (_, nn), c in br.modes:
                vec_add(d, j.apply(nn, v, mod), -c)
            vec_add(d, v, -br.central)
            if d:
                rep.heisenberg_failures.append((m, k, mod.format_state(s)))
                break
    for s in states:
        got = j.apply(0, {s: Fraction(1)}, mod)
        if got != ({s: Fraction(mod.ghost_number(s))} if mod.ghost_number(s) else {}):
            rep.ghost_number_failures.append(mod.format_state(s))
    t_from_j = dilaton_stress(j, spec.lam, spec.Q)
    rep.stress_failures = field_matrices_equal(t_from_j, bc_T(n, alg), mod, rng, cutoff)
    return rep


def heisenberg_stress(alg: AlgebraSpec, names: Sequence[str] | None = None) -> FieldExpr:
    """T = (1/2) sum_ij (Q^-1)_ij :a_i a_j: read off the pairing [a_i(1), a_j(-1)] = Q_ij."""
    names = list(names or [g.name for g in alg.generators])
    n = len(names)
    Q = [[bracket_modes(a, 1, b, -1, alg).central for b in names] for a in names]
    inv = _inverse(Q)
    terms = [(inv[i][j] / 2, [names[i], names[j]]) for i in range(n) for j in range(n) if inv[i][j]]
    return field_from_terms(alg, terms)


def _inverse(Q: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    n = len(Q)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(Q)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise ValueError("the pairing form is degenerate")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]
