"""Highest-weight Fock modules built from PBW monomials of creation modes.

A state is a tuple of creation modes in normal form applied to the
highest-weight vector ``|hw>``. Whether a mode annihilates ``|hw>`` is decided
by a per-generator threshold: ``g_m |hw> = 0`` for ``m >= threshold[g]``
except that the zero mode acts by ``highest_weight[g]``. The vacuum default
is ``threshold = 1 - weight``, i.e. ``a_(n) |0> = 0`` for residue degree
``n >= 0``.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Callable, Mapping

from .algebra import AlgebraSpec, Mode, Violation, bracket_modes
from .exact import RatMatrix, rat

FockState = tuple[Mode, ...]
StateVector = dict  # FockState -> Fraction, zero coefficients never stored


def vec_add(acc: dict, vec: Mapping, coeff=1) -> dict:
    """acc += coeff * vec, in place, dropping zeros."""
    if not coeff:
        return acc
    for s, c in vec.items():
        v = acc.get(s, 0) + coeff * c
        if v:
            acc[s] = v
        else:
            acc.pop(s, None)
    return acc


def vec_scale(vec: Mapping, coeff) -> dict:
    coeff = rat(coeff)
    if not coeff:
        return {}
    return {s: coeff * c for s, c in vec.items()}


def vec_sub(a: Mapping, b: Mapping) -> dict:
    return vec_add(dict(a), b, -1)


class ModuleSpec:
    """Highest-weight module of a mode algebra, realized on PBW monomials."""

    def __init__(
        self,
        algebra: AlgebraSpec,
        highest_weight: Mapping[str, object] | None = None,
        thresholds: Mapping[str, int] | None = None,
        label: str = "0",
    ):
        self.algebra = algebra
        self.highest_weight = {g: rat(v) for g, v in (highest_weight or {}).items() if rat(v)}
        for g in self.highest_weight:
            algebra[g]
        self.thresholds = {g.name: 1 - g.weight for g in algebra.generators}
        for g, t in (thresholds or {}).items():
            algebra[g]
            self.thresholds[g] = int(t)
        self.label = label
        for g in algebra.generators:
            if not g.parity and self.thresholds[g.name] > 0:
                raise ValueError(
                    f"even generator {g.name} would create at level <= 0; graded pieces would be infinite"
                )
            if g.name in self.highest_weight and self.thresholds[g.name] > 0:
                raise ValueError(f"zero mode of {g.name} is a creation mode; it cannot carry a weight")
        self.min_level = sum(
            -m for g in algebra.generators if g.parity for m in range(1, self.thresholds[g.name])
        )
        self._cache: dict[tuple[str, int, FockState], dict] = {}

    @classmethod
    def vacuum(cls, algebra: AlgebraSpec) -> "ModuleSpec":
        return cls(algebra)

    def __repr__(self):
        return f"ModuleSpec({self.algebra!r}, |{self.label}>)"

    # -- bookkeeping ----------------------------------------------------

    def is_creation(self, g: str, m: int) -> bool:
        return m < self.thresholds[g]

    def level(self, state: FockState) -> int:
        return -sum(m for _, m in state)

    def ghost_number(self, state: FockState) -> int:
        return sum(self.algebra[g].ghost for g, _ in state)

    def creation_modes(self, max_level: int) -> list[Mode]:
        """Creation modes whose own level is at most ``max_level - min_level``."""
        top = max_level - self.min_level
        out = []
        for g in self.algebra.generators:
            t = self.thresholds[g.name]
            for m in range(t - 1, -top - 1, -1):
                out.append((g.name, m))
        out.sort(key=self.algebra.mode_key)
        return out

    def state_key(self, state: FockState):
        return tuple(self.algebra.mode_key(f) for f in state)

    def format_state(self, state: FockState) -> str:
        parts = []
        i = 0
        while i < len(state):
            j = i
            while j < len(state) and state[j] == state[i]:
                j += 1
            g, m = state[i]
            p = j - i
            parts.append(f"{g}({m})" + (f"^{p}" if p > 1 else ""))
            i = j
        parts.append(f"|{self.label}>")
        return " ".join(parts)

    def format_vector(self, vec: Mapping) -> str:
        if not vec:
            return "0"
        items = sorted(vec.items(), key=lambda t: (self.level(t[0]), self.state_key(t[0])))
        return " + ".join(f"({c}) {self.format_state(s)}" for s, c in items)

    # -- action ---------------------------------------------------------

    def act(self, g: str, m: int, state: FockState) -> dict:
        """g_m applied to a single basis state (memoized; the result must not be mutated)."""
        key = (g, m, state)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        res = self._act(g, m, state)
        self._cache[key] = res
        return res

    def _act(self, g: str, m: int, state: FockState) -> dict:
        alg = self.algebra
        if self.level(state) - m < self.min_level:
            return {}
        x = (g, m)
        if self.is_creation(g, m):
            if not state:
                return {(x,): Fraction(1)}
            f1 = state[0]
            kx, kf = alg.mode_key(x), alg.mode_key(f1)
            if kx < kf:
                return {(x,) + state: Fraction(1)}
            if kx == kf:
                if alg[g].parity:
                    return {}
                return {(x,) + state: Fraction(1)}
        elif not state:
            if m == 0 and g in self.highest_weight:
                return {(): self.highest_weight[g]}
            return {}
        # x f1 R = [x, f1} R + s f1 (x R)
        f1, rest = state[0], state[1:]
        out: dict = {}
        br = bracket_modes(g, m, f1[0], f1[1], alg)
        for (h, n), c in br.modes:
            vec_add(out, self.act(h, n, rest), c)
        if br.central:
            vec_add(out, {rest: Fraction(1)}, br.central)
        s = alg.sign(g, f1[0])
        for st, c in self.act(g, m, rest).items():
            vec_add(out, self.act(f1[0], f1[1], st), s * c)
        return out

    def apply(self, g: str, m: int, vec: Mapping) -> dict:
        self.algebra[g]
        out: dict = {}
        for s, c in vec.items():
            vec_add(out, self.act(g, m, s), c)
        return out


def apply_mode(g: str, m: int, v: Mapping, mod: ModuleSpec) -> dict:
    """g_m applied to a state vector."""
    return mod.apply(g, m, v)


def hw_vector() -> dict:
    return {(): Fraction(1)}


# ---------------------------------------------------------------------------
# bases


def build_basis(mod: ModuleSpec, max_level: int, min_level: int | None = None) -> dict[int, list[FockState]]:
    """Ordered PBW basis of every graded piece with level in [min_level, max_level]."""
    if max_level < mod.min_level:
        return {}
    lo = mod.min_level if min_level is None else max(min_level, mod.min_level)
    modes = mod.creation_modes(max_level)
    alg = mod.algebra
    lv = [-m for _, m in modes]
    odd = [alg[g].parity for g, _ in modes]
    # smallest level still reachable from position i onward
    tail_min = [0] * (len(modes) + 1)
    for i in range(len(modes) - 1, -1, -1):
        tail_min[i] = tail_min[i + 1] + min(lv[i], 0)
    out: dict[int, list[FockState]] = {L: [] for L in range(lo, max_level + 1)}

    def rec(i: int, acc: list, total: int):
        if i == len(modes):
            if lo <= total <= max_level:
                out[total].append(tuple(acc))
            return
        if total + tail_min[i] > max_level:
            return
        rec(i + 1, acc, total)
        cap = 1 if odd[i] else None
        n = 0
        while cap is None or n < cap:
            n += 1
            t = total + n * lv[i]
            if t + tail_min[i + 1] > max_level:
                break
            acc.extend([modes[i]] * n)
            rec(i + 1, acc, t)
            del acc[len(acc) - n:]

    rec(0, [], 0)
    for L in out:
        out[L].sort(key=mod.state_key)
    return out


def graded_dimensions(mod: ModuleSpec, max_level: int) -> dict[int, int]:
    return {L: len(b) for L, b in build_basis(mod, max_level).items()}


def dump_basis(mod: ModuleSpec, max_level: int) -> list[str]:
    out = []
    for L, states in build_basis(mod, max_level).items():
        out.extend(mod.format_state(s) for s in states)
    return out


# ---------------------------------------------------------------------------
# matrices


def _as_operator(op, k, mod: ModuleSpec) -> Callable[[FockState], Mapping]:
    if callable(op) and not hasattr(op, "mode_on_state"):
        return op
    if hasattr(op, "mode_on_state"):
        if k is None:
            raise ValueError("a mode index is required for a field")
        return lambda s: op.mode_on_state(k, s, mod)
    if isinstance(op, str):
        if k is None:
            raise ValueError("a mode index is required for a generator")
        return lambda s: mod.act(op, k, s)
    raise TypeError(f"cannot use {op!r} as an operator")


def operator_matrix(
    op,
    k: int | None,
    mod: ModuleSpec,
    from_level: int,
    to_level: int,
    basis: Mapping[int, list[FockState]] | None = None,
    *,
    from_states: list[FockState] | None = None,
    to_states: list[FockState] | None = None,
) -> RatMatrix:
    """Matrix of an operator between two graded pieces (columns = source basis order).

    ``op`` is a field (its k-th mode is used), a generator name (its k-th
    mode), or any callable mapping a basis state to a state vector.
    """
    if basis is None and (from_states is None or to_states is None):
        basis = build_basis(mod, max(from_level, to_level))
    src = from_states if from_states is not None else basis.get(from_level, [])
    dst = to_states if to_states is not None else basis.get(to_level, [])
    index = {s: i for i, s in enumerate(dst)}
    f = _as_operator(op, k, mod)
    ent = {}
    for j, s in enumerate(src):
        for t, c in f(s).items():
            i = index.get(t)
            if i is None:
                raise ValueError(
                    f"dimension mismatch: image {mod.format_state(t)} of {mod.format_state(s)} "
                    f"is not in the target piece"
                )
            ent[i, j] = c
    return RatMatrix(len(dst), len(src), ent)


# ---------------------------------------------------------------------------
# realized brackets


def supercommutator_on(mod: ModuleSpec, a: str, m: int, b: str, k: int, vec: Mapping) -> dict:
    ab = mod.apply(a, m, mod.apply(b, k, vec))
    ba = mod.apply(b, k, mod.apply(a, m, vec))
    return vec_add(ab, ba, -mod.algebra.sign(a, b))


def bracket_on(mod: ModuleSpec, a: str, m: int, b: str, k: int, vec: Mapping) -> dict:
    br = bracket_modes(a, m, b, k, mod.algebra)
    out: dict = {}
    for (h, n), c in br.modes:
        vec_add(out, mod.apply(h, n, vec), c)
    if br.central:
        vec_add(out, vec, br.central)
    return out


def representation_defects(mod: ModuleSpec, window: int, max_level: int) -> list[Violation]:
    """(a_m, b_k, state) where the realized super-commutator differs from the bracket."""
    basis = build_basis(mod, max_level)
    states = [s for L in sorted(basis) for s in basis[L]]
    names = sorted(mod.algebra.gen)
    rng = range(-window, window + 1)
    out = []
    for a, b in product(names, repeat=2):
        for m, k in product(rng, repeat=2):
            for s in states:
                v = {s: Fraction(1)}
                d = vec_sub(supercommutator_on(mod, a, m, b, k, v), bracket_on(mod, a, m, b, k, v))
                if d:
                    out.append(
                        Violation(
                            "representation",
                            (a, m, b, k, mod.format_state(s)),
                            f"realized minus bracket = {mod.format_vector(d)}",
                        )
                    )
                    break
    return out
