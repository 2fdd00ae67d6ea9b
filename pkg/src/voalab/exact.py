"""Exact rational linear algebra, partitions and truncated q-series.

Everything here works over ``fractions.Fraction``; nothing is ever rounded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

Rational = Fraction


def rat(x) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to a Fraction. Floats are refused."""
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {type(x).__name__} {x!r} to an exact rational")


def rat_str(x: Fraction) -> str:
    return str(Fraction(x))


# ---------------------------------------------------------------------------
# sparse matrices


@dataclass(frozen=True)
class RatMatrix:
    rows: int
    cols: int
    entries: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (i, j), v in self.entries.items():
            if not (0 <= i < self.rows and 0 <= j < self.cols):
                raise IndexError(f"entry ({i}, {j}) outside {self.rows}x{self.cols}")
            v = rat(v)
            if v:
                clean[i, j] = v
        object.__setattr__(self, "entries", clean)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "RatMatrix":
        nr = len(rows)
        nc = len(rows[0]) if nr else 0
        ent = {}
        for i, row in enumerate(rows):
            if len(row) != nc:
                raise ValueError("ragged rows")
            for j, v in enumerate(row):
                if v:
                    ent[i, j] = rat(v)
        return cls(nr, nc, ent)

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls(n, n, {(i, i): Fraction(1) for i in range(n)})

    def __getitem__(self, key):
        return self.entries.get(key, Fraction(0))

    def is_zero(self) -> bool:
        return not self.entries

    def to_rows(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def apply(self, vec: Sequence) -> list[Fraction]:
        if len(vec) != self.cols:
            raise ValueError("dimension mismatch")
        out = [Fraction(0)] * self.rows
        for (i, j), v in self.entries.items():
            out[i] += v * vec[j]
        return out

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise ValueError(f"dimension mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        by_row: dict[int, list[tuple[int, Fraction]]] = {}
        for (k, j), v in other.entries.items():
            by_row.setdefault(k, []).append((j, v))
        out: dict[tuple[int, int], Fraction] = {}
        for (i, k), v in self.entries.items():
            for j, w in by_row.get(k, ()):
                out[i, j] = out.get((i, j), Fraction(0)) + v * w
        return RatMatrix(self.rows, other.cols, out)

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("dimension mismatch")
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, Fraction(0)) + v
        return RatMatrix(self.rows, self.cols, out)

    def __neg__(self) -> "RatMatrix":
        return RatMatrix(self.rows, self.cols, {k: -v for k, v in self.entries.items()})

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        return self + (-other)

    def scale(self, c) -> "RatMatrix":
        c = rat(c)
        return RatMatrix(self.rows, self.cols, {k: c * v for k, v in self.entries.items()})


def _bitsize(x: Fraction) -> int:
    return x.numerator.bit_length() + x.denominator.bit_length()


def rref(m: RatMatrix) -> tuple[list[dict[int, Fraction]], list[int]]:
    """Reduced row echelon form of ``m``.

    Returns the nonzero rows (sparse, col -> value, pivot entry 1) and their
    pivot columns. Among the rows that can supply the pivot of a column, the
    one with the smallest total bit-size is used; the reduced form itself is
    unique, so the choice only affects speed.
    """
    rows: list[dict[int, Fraction]] = [dict() for _ in range(m.rows)]
    for (i, j), v in m.entries.items():
        rows[i][j] = v
    active = [r for r in rows if r]
    pivots: list[tuple[int, dict[int, Fraction]]] = []
    for col in range(m.cols):
        cands = [r for r in active if col in r]
        if not cands:
            continue
        best = min(cands, key=lambda r: (sum(_bitsize(v) for v in r.values()), len(r)))
        inv = 1 / best[col]
        prow = {c: v * inv for c, v in best.items()}
        nxt = []
        for r in active:
            if r is best:
                continue
            f = r.get(col)
            if f:
                for c, v in prow.items():
                    nv = r.get(c, Fraction(0)) - f * v
                    if nv:
                        r[c] = nv
                    else:
                        r.pop(c, None)
            if r:
                nxt.append(r)
        active = nxt
        # back-substitute into earlier pivot rows
        for _, r in pivots:
            f = r.get(col)
            if f:
                for c, v in prow.items():
                    nv = r.get(c, Fraction(0)) - f * v
                    if nv:
                        r[c] = nv
                    else:
                        r.pop(c, None)
        pivots.append((col, prow))
    return [r for _, r in pivots], [c for c, _ in pivots]


def matrix_rank_kernel(m: RatMatrix) -> tuple[int, list[list[Fraction]]]:
    """Rank of ``m`` and a basis of its right kernel.

    Kernel vectors are indexed by the free columns in increasing order; each
    has a 1 in its free column and zeros in the other free columns.
    """
    red, piv = rref(m)
    pivset = set(piv)
    kernel = []
    for f in range(m.cols):
        if f in pivset:
            continue
        v = [Fraction(0)] * m.cols
        v[f] = Fraction(1)
        for c, r in zip(piv, red):
            x = r.get(f)
            if x:
                v[c] = -x
        kernel.append(v)
    return len(piv), kernel


def matrix_rank(m: RatMatrix) -> int:
    return len(rref(m)[1])


# ---------------------------------------------------------------------------
# partitions


def partitions(n: int, max_part: int | None = None) -> list[tuple[int, ...]]:
    """All partitions of ``n`` in reverse lexicographic order."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return list(_partitions(n, n if max_part is None else max_part))


def _partitions(n: int, max_part: int) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first,) + rest


# ---------------------------------------------------------------------------
# truncated q-series


@dataclass(frozen=True)
class QSeries:
    """Laurent series sum_{e >= min_exponent} c_e q^e known exactly up to q^cutoff."""

    min_exponent: int
    coefficients: tuple[Fraction, ...]
    cutoff: int

    def __post_init__(self):
        coeffs = tuple(rat(c) for c in self.coefficients)
        keep = max(0, self.cutoff - self.min_exponent + 1)
        coeffs = coeffs[:keep]
        coeffs = coeffs + (Fraction(0),) * (keep - len(coeffs))
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def from_dict(cls, coeffs: Mapping[int, object], cutoff: int) -> "QSeries":
        if not coeffs:
            return cls(0, (), cutoff)
        lo = min(coeffs)
        lst = [Fraction(0)] * max(0, cutoff - lo + 1)
        for e, c in coeffs.items():
            if e <= cutoff:
                lst[e - lo] = rat(c)
        return cls(lo, tuple(lst), cutoff)

    @classmethod
    def constant(cls, c, cutoff: int) -> "QSeries":
        return cls.from_dict({0: c}, cutoff)

    @classmethod
    def monomial(cls, e: int, c, cutoff: int) -> "QSeries":
        return cls.from_dict({e: c}, cutoff)

    def __getitem__(self, e: int) -> Fraction:
        if e > self.cutoff:
            raise IndexError(f"q^{e} is beyond the cutoff {self.cutoff}")
        i = e - self.min_exponent
        if i < 0:
            return Fraction(0)
        return self.coefficients[i]

    def items(self) -> list[tuple[int, Fraction]]:
        return [(self.min_exponent + i, c) for i, c in enumerate(self.coefficients) if c]

    def to_dict(self) -> dict[int, Fraction]:
        return dict(self.items())

    def __add__(self, other: "QSeries") -> "QSeries":
        cut = min(self.cutoff, other.cutoff)
        d = self.to_dict()
        for e, c in other.items():
            d[e] = d.get(e, Fraction(0)) + c
        return QSeries.from_dict({e: c for e, c in d.items() if e <= cut}, cut)

    def __neg__(self) -> "QSeries":
        return QSeries(self.min_exponent, tuple(-c for c in self.coefficients), self.cutoff)

    def __sub__(self, other: "QSeries") -> "QSeries":
        return self + (-other)

    def scale(self, c) -> "QSeries":
        c = rat(c)
        return QSeries(self.min_exponent, tuple(c * x for x in self.coefficients), self.cutoff)

    def __mul__(self, other: "QSeries") -> "QSeries":
        return qseries_mul(self, other)

    def valuation(self) -> int | None:
        for e, c in self.items():
            return e
        return None

    def inverse(self) -> "QSeries":
        """Multiplicative inverse; requires a nonzero leading coefficient."""
        v = self.valuation()
        if v is None:
            raise ZeroDivisionError("series is zero up to its cutoff")
        a0 = self[v]
        # precision: if self known to cutoff N with valuation v, inverse known to N - 2v
        cut = self.cutoff - 2 * v
        n = cut + v + 1
        a = [self[v + i] if v + i <= self.cutoff else Fraction(0) for i in range(max(n, 1))]
        b = [Fraction(0)] * max(n, 1)
        b[0] = 1 / a0
        for i in range(1, n):
            s = sum(a[j] * b[i - j] for j in range(1, i + 1))
            b[i] = -s / a0
        return QSeries(-v, tuple(b), cut)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.cutoff == other.cutoff and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash((self.cutoff, tuple(self.items())))

    def serialize(self) -> list[tuple[int, str]]:
        return [(e, rat_str(c)) for e, c in self.items()]

    def __repr__(self) -> str:
        terms = " + ".join(f"({c})q^{e}" for e, c in self.items()) or "0"
        return f"QSeries({terms} + O(q^{self.cutoff + 1}))"


def qseries_mul(a: QSeries, b: QSeries) -> QSeries:
    """Product up to the smaller cutoff (lowered further by negative valuations)."""
    va = a.valuation() or 0
    vb = b.valuation() or 0
    cut = min(a.cutoff + min(vb, 0), b.cutoff + min(va, 0))
    out: dict[int, Fraction] = {}
    bi = b.items()
    for e1, c1 in a.items():
        for e2, c2 in bi:
            e = e1 + e2
            if e > cut:
                break
            out[e] = out.get(e, Fraction(0)) + c1 * c2
    return QSeries.from_dict(out, cut)


def qseries_product(factors: Iterable[QSeries], cutoff: int) -> QSeries:
    acc = QSeries.constant(1, cutoff)
    for f in factors:
        acc = acc * f
    return acc


def partition_series(cutoff: int, colors: int = 1, start: int = 1) -> QSeries:
    """prod_{m >= start} (1 - q^m)^{-colors}, exact to q^cutoff."""
    acc = QSeries.constant(1, cutoff)
    for m in range(start, cutoff + 1):
        geo = QSeries.from_dict({m * k: 1 for k in range(cutoff // m + 1)}, cutoff)
        for _ in range(colors):
            acc = acc * geo
    return acc
