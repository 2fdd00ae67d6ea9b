"""BRST charge for Virasoro matter coupled to the weight (2, -1) ghost system.

The ghost vacuum is the state killed by b_m (m >= -1) and c_m (m >= 2), so
c_1, c_0, c_{-1} are creation modes and the lowest level is -1. Gradings are
reported relative to it. To pass to the symmetric convention with the two
vacua |down> = c_1|0> and |up> = c_0 c_1|0>, shift the ghost number by -1
(|down> then has ghost number 0) and the level by +1.

The charge is not transcribed from a closed formula. It is the unique
combination

    delta = x (:c T_matter:)_0 + y (:b c dc:)_0 + alpha c_0

satisfying {delta, b_m} = L^total_m on a window of modes and states; the
remaining properties ([delta, L^total_m] = 0, delta^2 = 0) are then checked.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .algebra import AlgebraSpec
from .constructors import bc_system, heisenberg, virasoro
from .exact import RatMatrix, matrix_rank_kernel, rat
from .fields import Deriv, FieldExpr, Gen, nop
from .fock import FockState, ModuleSpec, build_basis, operator_matrix, vec_add, vec_sub
from .stress import bc_T, extract_central_charge, heisenberg_stress, verify_primary

GHOST_C = bc_system(2)


class BrstError(ValueError):
    def __init__(self, msg: str, witness=None):
        super().__init__(msg)
        self.witness = witness


# ---------------------------------------------------------------------------
# ghosts


@dataclass
class GhostReport:
    n: int
    central_charge: Fraction
    b_primary_failures: list
    c_primary_failures: list

    @property
    def passed(self) -> bool:
        return self.central_charge == -2 * (6 * self.n**2 - 6 * self.n + 1) and not (
            self.b_primary_failures or self.c_primary_failures
        )


def ghost_virasoro_check(window: int = 3, n: int = 2, max_level: int = 4) -> GhostReport:
    """Central charge of the ghost stress tensor and primarity of b and c under it."""
    alg = bc_system(n)
    mod = ModuleSpec.vacuum(alg)
    T = bc_T(n, alg)
    c = extract_central_charge(T, mod, window, max_level)
    return GhostReport(n, c, verify_primary(T, "b", n, mod, window), verify_primary(T, "c", 1 - n, mod, window))


def composite_central_charge(matter_c, window: int = 3, max_level: int = 3) -> Fraction:
    """c_matter - 26, confirmed by measuring T_matter + T_ghost on virasoro(c_matter) + bc(2)."""
    matter_c = rat(matter_c)
    alg = virasoro(matter_c).direct_sum(bc_system(2), name="virasoro+bc(2)")
    T = Gen(alg, "L") + bc_T(2, alg)
    measured = extract_central_charge(T, ModuleSpec.vacuum(alg), window, max_level)
    if measured != matter_c - 26:
        raise BrstError(f"measured composite central charge {measured} differs from {matter_c} - 26")
    return measured


# ---------------------------------------------------------------------------
# complex


class BrstComplex:
    """Matter (algebra + stress tensor) tensored with the bc(2) ghosts, graded by (level, ghost number)."""

    def __init__(self, matter: AlgebraSpec, T_matter: FieldExpr, level_window: int = 2, name: str = ""):
        if set(matter.gen) & set(GHOST_C.gen):
            raise ValueError("matter generators must not be called b or c")
        self.matter = matter
        self.algebra = matter.direct_sum(GHOST_C, name=f"{matter.name}+bc(2)")
        self.module = ModuleSpec.vacuum(self.algebra)
        self.level_window = level_window
        self.name = name or self.algebra.name
        alg = self.algebra
        # fields only remember generator names and weights, so a field built
        # over the matter algebra acts unchanged on the combined module
        self.T_matter = T_matter
        self.T_ghost = bc_T(2, alg)
        self.T_total = self.T_matter + self.T_ghost
        b, c = Gen(alg, "b"), Gen(alg, "c")
        self.pieces = (nop(c, self.T_matter), nop(b, c, Deriv(c, 1)))
        self._basis = build_basis(self.module, level_window)
        self._coeffs: tuple[Fraction, Fraction, Fraction] | None = None
        self._delta_cache: dict[FockState, dict] = {}

    @property
    def min_level(self) -> int:
        return self.module.min_level

    def basis(self, level: int, ghost: int | None = None) -> list[FockState]:
        if level > self.level_window:
            self._basis = build_basis(self.module, level)
            self.level_window = level
        states = self._basis.get(level, [])
        if ghost is None:
            return states
        return [s for s in states if self.module.ghost_number(s) == ghost]

    def ghost_numbers(self, level: int) -> list[int]:
        return sorted({self.module.ghost_number(s) for s in self.basis(level)})

    def dimension_table(self) -> dict[tuple[int, int], int]:
        out = {}
        for L in range(self.min_level, self.level_window + 1):
            for s in self.basis(L):
                k = (L, self.module.ghost_number(s))
                out[k] = out.get(k, 0) + 1
        return dict(sorted(out.items()))

    # -- the charge -----------------------------------------------------

    def _piece(self, i: int, vec: Mapping) -> dict:
        mod = self.module
        if i == 0:
            return self._c_T_zero_mode(vec)
        if i == 1:
            return self.pieces[1].apply(0, vec, mod)
        return mod.apply("c", 0, vec)

    def _c_T_zero_mode(self, vec: Mapping) -> dict:
        """(:c T_matter:)_0 = sum_j c_j T_{-j}, exact because matter and ghost modes commute.

        On a basis state T_{-j} vanishes once -j exceeds the matter level, and
        c_j (j >= 2) vanishes unless b_{-j} is present, so the sum is finite.
        """
        mod = self.module
        out: dict = {}
        for s, coef in vec.items():
            matter_level = -sum(m for g, m in s if g not in ("b", "c"))
            top = max([1] + [-m for g, m in s if g == "b"])
            for j in range(-matter_level, top + 1):
                w = self.T_matter.apply(-j, {s: coef}, mod)
                if w:
                    vec_add(out, mod.apply("c", j, w))
        return out

    @property
    def coefficients(self) -> tuple[Fraction, Fraction, Fraction]:
        if self._coeffs is None:
            self._coeffs = fit_brst_coefficients(self)
        return self._coeffs

    def delta_state(self, s: FockState) -> dict:
        hit = self._delta_cache.get(s)
        if hit is None:
            hit = {}
            for coef, i in zip(self.coefficients, range(3)):
                if coef:
                    vec_add(hit, self._piece(i, {s: Fraction(1)}), coef)
            self._delta_cache[s] = hit
        return hit

    def delta(self, vec: Mapping) -> dict:
        out: dict = {}
        for s, c in vec.items():
            vec_add(out, self.delta_state(s), c)
        return out

    def delta_squared(self, vec: Mapping) -> dict:
        return self.delta(self.delta(vec))


def heisenberg_matter(rank: int) -> BrstComplex:
    alg = heisenberg(rank)
    return BrstComplex(alg, heisenberg_stress(alg), name=f"heisenberg({rank})+bc(2)")


def virasoro_matter(c) -> BrstComplex:
    alg = virasoro(c)
    return BrstComplex(alg, Gen(alg, "L"), name=f"virasoro({rat(c)})+bc(2)")


def fit_brst_coefficients(cx: BrstComplex, window: int = 2, max_level: int = 1) -> tuple[Fraction, Fraction, Fraction]:
    """Solve {delta, b_m} = L^total_m for (x, y, alpha) on |m| <= window and levels <= max_level."""
    mod = cx.module
    states = [s for L in range(cx.min_level, max_level + 1) for s in build_basis(mod, max_level).get(L, [])]
    rows: list[dict[int, Fraction]] = []
    for m in range(-window, window + 1):
        for s in states:
            v = {s: Fraction(1)}
            bv = mod.apply("b", m, v)
            cols = []
            for i in range(3):
                cols.append(vec_add(cx._piece(i, bv), mod.apply("b", m, cx._piece(i, v))))
            rhs = cx.T_total.apply(m, v, mod)
            keys = set(rhs).union(*cols)
            for k in keys:
                row = {i: col[k] for i, col in enumerate(cols) if k in col}
                if k in rhs:
                    row[3] = -rhs[k]
                rows.append(row)
    M = RatMatrix(len(rows), 4, {(r, c): v for r, row in enumerate(rows) for c, v in row.items()})
    _, ker = matrix_rank_kernel(M)
    if len(ker) != 1 or not ker[0][3]:
        raise BrstError(
            f"{{delta, b_m}} = L_m does not determine a unique charge in the ansatz (kernel dimension {len(ker)})"
        )
    v = ker[0]
    return tuple(x / v[3] for x in v[:3])


# ---------------------------------------------------------------------------
# matrices and checks


def brst_operator(cx: BrstComplex) -> dict[tuple[int, int], RatMatrix]:
    """Matrix of delta from (level, g) to (level, g + 1) for every nonempty source piece."""
    mod = cx.module
    out = {}
    for L in range(cx.min_level, cx.level_window + 1):
        for g in cx.ghost_numbers(L):
            src, dst = cx.basis(L, g), cx.basis(L, g + 1)
            for s in src:
                for t in cx.delta_state(s):
                    if mod.level(t) != L or mod.ghost_number(t) != g + 1:
                        raise BrstError(
                            f"delta maps {mod.format_state(s)} outside (level {L}, ghost {g + 1})",
                            (mod.format_state(s), mod.format_state(t)),
                        )
            out[L, g] = operator_matrix(cx.delta_state, None, mod, L, L, from_states=src, to_states=dst)
    return out


def brst_square(cx: BrstComplex, states=None) -> dict[tuple[int, int], RatMatrix]:
    """Matrix of delta^2 from (level, g) to (level, g + 2); ``states`` restricts the columns."""
    mod = cx.module
    out = {}
    for L in range(cx.min_level, cx.level_window + 1):
        for g in cx.ghost_numbers(L):
            src = cx.basis(L, g)
            if states is not None:
                src = [s for s in src if s in states]
            dst = cx.basis(L, g + 2)
            out[L, g] = operator_matrix(
                lambda s: cx.delta_squared({s: Fraction(1)}), None, mod, L, L, from_states=src, to_states=dst
            )
    return out


def square_is_zero(cx: BrstComplex) -> tuple[bool, tuple | None]:
    """Whether delta^2 vanishes on every state of level <= level_window, with a witness if not."""
    mod = cx.module
    for L in range(cx.min_level, cx.level_window + 1):
        for s in cx.basis(L):
            d = cx.delta_squared({s: Fraction(1)})
            if d:
                return False, (mod.format_state(s), mod.format_vector(d))
    return True, None


@dataclass
class PropertyReport:
    b_anticommutator_failures: list = field(default_factory=list)
    virasoro_commutator_failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not (self.b_anticommutator_failures or self.virasoro_commutator_failures)


def brst_properties(cx: BrstComplex, window: int = 3, max_level: int | None = None) -> PropertyReport:
    """{delta, b_m} = L^total_m and [delta, L^total_m] = 0 for |m| <= window on levels <= max_level."""
    mod = cx.module
    top = cx.level_window if max_level is None else max_level
    states = [s for L in range(cx.min_level, top + 1) for s in cx.basis(L)]
    rep = PropertyReport()
    T = cx.T_total
    for m in range(-window, window + 1):
        for s in states:
            v = {s: Fraction(1)}
            lhs = vec_add(cx.delta(mod.apply("b", m, v)), mod.apply("b", m, cx.delta(v)))
            if vec_sub(lhs, T.apply(m, v, mod)):
                rep.b_anticommutator_failures.append((m, mod.format_state(s)))
                break
        for s in states:
            v = {s: Fraction(1)}
            d = vec_sub(cx.delta(T.apply(m, v, mod)), T.apply(m, cx.delta(v), mod))
            if d:
                rep.virasoro_commutator_failures.append((m, mod.format_state(s)))
                break
    return rep


def brst_cohomology(cx: BrstComplex, level: int, ghost: int) -> int:
    """dim ker(delta on (level, ghost)) - rank(delta into it); refuses if delta^2 != 0 nearby."""
    mod = cx.module
    src, mid, dst = cx.basis(level, ghost - 1), cx.basis(level, ghost), cx.basis(level, ghost + 1)
    for s in src + mid:
        d = cx.delta_squared({s: Fraction(1)})
        if d:
            raise BrstError(
                f"delta^2 is nonzero on {mod.format_state(s)}: {mod.format_vector(d)}",
                (mod.format_state(s), mod.format_vector(d)),
            )
    if not mid:
        return 0
    out_m = operator_matrix(cx.delta_state, None, mod, level, level, from_states=mid, to_states=dst)
    in_m = operator_matrix(cx.delta_state, None, mod, level, level, from_states=src, to_states=mid)
    rank_out, _ = matrix_rank_kernel(out_m)
    rank_in, _ = matrix_rank_kernel(in_m)
    return len(mid) - rank_out - rank_in


def cohomology_table(cx: BrstComplex, levels=None) -> list[tuple[int, int, int]]:
    levels = range(cx.min_level, cx.level_window + 1) if levels is None else levels
    return [(L, g, brst_cohomology(cx, L, g)) for L in levels for g in cx.ghost_numbers(L)]


def euler_characteristic(cx: BrstComplex, level: int, from_cohomology: bool = False) -> int:
    if from_cohomology:
        return sum((-1) ** (g % 2) * brst_cohomology(cx, level, g) for g in cx.ghost_numbers(level))
    return sum((-1) ** (g % 2) * len(cx.basis(level, g)) for g in cx.ghost_numbers(level))


def square_linear_in_rank(ranks=(24, 25, 27), level: int = 2, probe_rank: int = 1) -> tuple[bool, dict]:
    """Check that delta^2 at rank r equals (r - 26) times a fixed operator.

    Compared on the states of the given level that involve only the first
    ``probe_rank`` matter currents and the ghosts, a sub-basis shared by all
    the ranks.
    """
    per_rank = {}
    for r in ranks:
        cx = heisenberg_matter(r)
        keep = {f"a{i + 1}" for i in range(probe_rank)} | {"b", "c"} if r > 1 else {"a", "b", "c"}
        states = [s for s in cx.basis(level) if all(g in keep for g, _ in s)]
        per_rank[r] = {s: cx.delta_squared({s: Fraction(1)}) for s in states}
    ref_rank = ranks[0]
    ref = {s: {t: c / (ref_rank - 26) for t, c in d.items()} for s, d in per_rank[ref_rank].items()}
    ok = any(ref.values())
    for r, table in per_rank.items():
        for s, d in table.items():
            expect = {t: (r - 26) * c for t, c in ref[s].items()}
            if vec_sub(d, expect):
                ok = False
    return ok, {"reference": ref, "per_rank": per_rank}
