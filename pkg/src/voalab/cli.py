"""Batch front end: read a JSON job, run one computation, write an exact report.

Example job::

    {"algebra": "bc", "n": 2, "command": "cc"}

Rationals are written as strings "p/q" (or JSON integers); floats are
rejected. The command may also be given on the command line.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from . import blocks, brst, stress
from .algebra import bracket_modes, check_axioms
from .constructors import (
    DilatonSpec,
    InvalidLattice,
    InvalidLieData,
    LatticeSpec,
    LieAlgebraData,
    abelian,
    bc_system,
    dilaton,
    heisenberg,
    kac_moody,
    lattice_voa,
    sl2,
    virasoro,
)
from .exact import rat_str
from .fields import Gen
from .fock import ModuleSpec, graded_dimensions

VERSION = "0.1.0"
ALGEBRAS = ("heisenberg", "kac_moody", "virasoro", "dilaton", "bc", "lattice")
COMMANDS = ("check", "dims", "cc", "ope", "primary", "brst", "cohomology", "correlator", "character", "blocks")

PARAMS: dict[str, dict[str, bool]] = {
    # parameter -> required
    "heisenberg": {"rank": True, "Q": False},
    "kac_moody": {"lie": True, "q": False, "dimension": False, "structure_constants": False, "Q": False, "names": False},
    "virasoro": {"c": True},
    "dilaton": {"lambda": True, "Q": True},
    "bc": {"n": True},
    "lattice": {"gram": True, "cocycle": False, "charge_window": False},
}
COMMAND_ARGS: dict[str, set[str]] = {
    "primary": {"generator", "weight"},
    "cohomology": {"level", "ghost"},
    "correlator": {"insertions"},
}
COMMON = {"algebra", "command", "cutoff", "window", "output"}

CONVENTIONS = (
    "fields a(z) = sum a_m z^(-m-wt); "
    "[a_m, b_k] = [a,b]_(m+k) + m Q(a,b) delta; "
    "[L_m, L_k] = (m-k) L_(m+k) + c/12 (m^3-m) delta; "
    "{b_m, c_k} = delta, ghost(b) = -1, ghost(c) = +1; "
    "dilaton pairing -m Q delta, T = -(1/2Q) :aa: - (lambda/2Q) da; "
    "ghost vacuum killed by b_m (m >= -1), c_m (m >= 2); "
    "lattice cocycle eps(e_i, e_j) = (-1)^Q_ij for i > j; "
    "correlators expanded in |z1| > ... > |zn|"
)


def conventions_fingerprint() -> str:
    return hashlib.sha256(CONVENTIONS.encode()).hexdigest()[:16]


class SpecError(ValueError):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


@dataclass(frozen=True)
class JobSpec:
    algebra: str
    command: str
    params: tuple = ()  # sorted (key, value) pairs, values JSON-compatible
    args: tuple = ()
    cutoff: int = 4
    window: int = 3
    output: str | None = None

    def param(self, key, default=None):
        return dict(self.params).get(key, default)

    def arg(self, key, default=None):
        return dict(self.args).get(key, default)


# ---------------------------------------------------------------------------
# parsing


def _freeze(x):
    if isinstance(x, list):
        return tuple(_freeze(v) for v in x)
    if isinstance(x, dict):
        return tuple(sorted((k, _freeze(v)) for k, v in x.items()))
    return x


def _thaw(x):
    if isinstance(x, tuple):
        return [_thaw(v) for v in x]
    return x


class _Checker:
    def __init__(self):
        self.problems: list[str] = []

    def err(self, path: str, msg: str):
        self.problems.append(f"{path}: {msg}")

    def rational(self, path: str, v) -> Fraction | None:
        if isinstance(v, bool) or isinstance(v, float):
            self.err(path, "floats are not allowed; write rationals as strings like \"3/2\"")
            return None
        if isinstance(v, int):
            return Fraction(v)
        if isinstance(v, str):
            try:
                return Fraction(v.strip())
            except (ValueError, ZeroDivisionError):
                self.err(path, f"not a rational number: {v!r}")
                return None
        self.err(path, f"expected a rational string, got {type(v).__name__}")
        return None

    def integer(self, path: str, v, minimum: int | None = None) -> int | None:
        if isinstance(v, bool) or not isinstance(v, int):
            self.err(path, f"expected an integer, got {v!r}")
            return None
        if minimum is not None and v < minimum:
            self.err(path, f"must be >= {minimum}")
            return None
        return v

    def matrix(self, path: str, v, n: int | None, kind: str = "rational"):
        if not isinstance(v, list) or not all(isinstance(r, list) for r in v):
            self.err(path, "expected a list of rows")
            return None
        if n is not None and len(v) != n:
            self.err(path, f"expected {n} rows, got {len(v)}")
            return None
        out = []
        ok = True
        for i, row in enumerate(v):
            if len(row) != len(v):
                self.err(f"{path}[{i}]", f"row has {len(row)} entries, expected {len(v)}")
                ok = False
                continue
            r = []
            for j, x in enumerate(row):
                y = self.rational(f"{path}[{i}][{j}]", x) if kind == "rational" else self.integer(f"{path}[{i}][{j}]", x)
                ok = ok and y is not None
                r.append(y)
            out.append(r)
        if not ok:
            return None
        for i in range(len(out)):
            for j in range(i + 1, len(out)):
                if out[i][j] != out[j][i]:
                    self.err(f"{path}[{i}][{j}]", f"asymmetric: {out[i][j]} but {path}[{j}][{i}] is {out[j][i]}")
                    ok = False
        return out if ok else None


def parse_spec(document: str) -> JobSpec:
    """Validate a JSON job document; raises SpecError listing every problem found."""
    ck = _Checker()
    try:
        raw = json.loads(document, parse_float=lambda s: float(s))
    except json.JSONDecodeError as e:
        raise SpecError([f"$: not valid JSON ({e.msg} at line {e.lineno})"]) from None
    if not isinstance(raw, dict):
        raise SpecError(["$: the job must be a JSON object"])
    alg = raw.get("algebra")
    cmd = raw.get("command", "check")
    if alg is None:
        ck.err("$.algebra", "missing")
    elif alg not in ALGEBRAS:
        ck.err("$.algebra", f"unknown algebra {alg!r}; expected one of {', '.join(ALGEBRAS)}")
    if cmd not in COMMANDS:
        ck.err("$.command", f"unknown command {cmd!r}; expected one of {', '.join(COMMANDS)}")
    allowed = set(COMMON)
    if alg in PARAMS:
        allowed |= set(PARAMS[alg])
    if cmd in COMMAND_ARGS:
        allowed |= COMMAND_ARGS[cmd]
    for k in sorted(raw):
        if k not in allowed:
            ck.err(f"$.{k}", "unknown field")
    cutoff = ck.integer("$.cutoff", raw.get("cutoff", 4), 0)
    window = ck.integer("$.window", raw.get("window", 3), 0)
    output = raw.get("output")
    if output is not None and not isinstance(output, str):
        ck.err("$.output", "expected a path string")
    params = {}
    if alg in PARAMS:
        for k, req in PARAMS[alg].items():
            if k in raw:
                params[k] = raw[k]
            elif req:
                ck.err(f"$.{k}", f"missing parameter for {alg}")
        _check_params(ck, alg, params)
    args = {k: raw[k] for k in COMMAND_ARGS.get(cmd, ()) if k in raw}
    _check_args(ck, cmd, alg, args)
    if ck.problems:
        raise SpecError(ck.problems)
    return JobSpec(alg, cmd, _freeze(params), _freeze(args), cutoff, window, output)


def _check_params(ck: _Checker, alg: str, p: dict):
    if alg == "heisenberg":
        r = ck.integer("$.rank", p["rank"], 1) if "rank" in p else None
        if "Q" in p:
            if isinstance(p["Q"], list):
                ck.matrix("$.Q", p["Q"], r)
            else:
                q = ck.rational("$.Q", p["Q"])
                if q == 0:
                    ck.err("$.Q", "the form must be nonzero")
    elif alg == "kac_moody":
        lie = p.get("lie")
        if lie == "sl2":
            ck.rational("$.q", p.get("q", "1"))
        elif lie == "abelian":
            d = ck.integer("$.dimension", p.get("dimension"), 1)
            if "Q" in p:
                ck.matrix("$.Q", p["Q"], d)
        elif lie == "custom":
            d = ck.integer("$.dimension", p.get("dimension"), 1)
            if "Q" not in p:
                ck.err("$.Q", "missing parameter for a custom Lie algebra")
            else:
                ck.matrix("$.Q", p["Q"], d)
            sc = p.get("structure_constants", [])
            if not isinstance(sc, list):
                ck.err("$.structure_constants", "expected a list of [i, j, k, f]")
            else:
                for t, e in enumerate(sc):
                    if not (isinstance(e, list) and len(e) == 4):
                        ck.err(f"$.structure_constants[{t}]", "expected [i, j, k, f]")
                        continue
                    for u in range(3):
                        ck.integer(f"$.structure_constants[{t}][{u}]", e[u], 0)
                    ck.rational(f"$.structure_constants[{t}][3]", e[3])
        elif lie is not None:
            ck.err("$.lie", f"expected 'sl2', 'abelian' or 'custom', got {lie!r}")
    elif alg == "virasoro":
        if "c" in p:
            ck.rational("$.c", p["c"])
    elif alg == "dilaton":
        if "lambda" in p:
            ck.rational("$.lambda", p["lambda"])
        if "Q" in p:
            q = ck.rational("$.Q", p["Q"])
            if q == 0:
                ck.err("$.Q", "must be nonzero")
    elif alg == "bc":
        if "n" in p:
            ck.integer("$.n", p["n"])
    elif alg == "lattice":
        G = ck.matrix("$.gram", p["gram"], None, kind="integer") if "gram" in p else None
        if G is not None:
            for i in range(len(G)):
                if G[i][i] % 2:
                    ck.err(f"$.gram[{i}][{i}]", f"odd diagonal entry {G[i][i]}; the lattice must be even")
            if "cocycle" in p and not ck.problems:
                try:
                    LatticeSpec(tuple(map(tuple, G)), tuple(map(tuple, p["cocycle"])))
                except (InvalidLattice, TypeError, ValueError) as e:
                    ck.err("$.cocycle", str(e))
        if "charge_window" in p:
            ck.integer("$.charge_window", p["charge_window"], 0)


def _check_args(ck: _Checker, cmd: str, alg, a: dict):
    if cmd == "primary":
        if "generator" in a and not isinstance(a["generator"], str):
            ck.err("$.generator", "expected a generator name")
        if "weight" in a:
            ck.integer("$.weight", a["weight"])
    elif cmd == "cohomology":
        for k in ("level", "ghost"):
            if k in a:
                ck.integer(f"$.{k}", a[k])
    elif cmd == "correlator":
        ins = a.get("insertions")
        if ins is None:
            ck.err("$.insertions", "missing list of insertions")
        elif not isinstance(ins, list) or not ins:
            ck.err("$.insertions", "expected a nonempty list")
        elif alg == "lattice":
            for i, x in enumerate(ins):
                if isinstance(x, list):
                    for j, y in enumerate(x):
                        ck.integer(f"$.insertions[{i}][{j}]", y)
                else:
                    ck.integer(f"$.insertions[{i}]", x)
        else:
            for i, x in enumerate(ins):
                if not isinstance(x, str):
                    ck.err(f"$.insertions[{i}]", "expected a generator name")
    if cmd in ("brst", "cohomology") and alg not in (None, "heisenberg", "virasoro"):
        ck.err("$.algebra", f"{cmd} needs heisenberg or virasoro matter")


def serialize(job: JobSpec) -> str:
    doc: dict[str, Any] = {"algebra": job.algebra, "command": job.command, "cutoff": job.cutoff, "window": job.window}
    for k, v in job.params + job.args:
        doc[k] = _thaw(v)
    if job.output is not None:
        doc["output"] = job.output
    return json.dumps(doc, sort_keys=True)


# ---------------------------------------------------------------------------
# building objects


def _q(x) -> Fraction:
    return Fraction(x) if not isinstance(x, str) else Fraction(x.strip())


def _qmatrix(m):
    return [[_q(x) for x in row] for row in m]


def build_algebra(job: JobSpec):
    a, p = job.algebra, dict((k, _thaw(v)) for k, v in job.params)
    if a == "heisenberg":
        Q = p.get("Q", 1)
        Q = _qmatrix(Q) if isinstance(Q, list) else _q(Q)
        return heisenberg(p["rank"], Q)
    if a == "kac_moody":
        return kac_moody(lie_data(job))
    if a == "virasoro":
        return virasoro(_q(p["c"]))
    if a == "dilaton":
        return dilaton(DilatonSpec(_q(p["lambda"]), _q(p["Q"])))
    if a == "bc":
        return bc_system(p["n"])
    if a == "lattice":
        return lattice(job).heisenberg
    raise ValueError(a)


def lie_data(job: JobSpec) -> LieAlgebraData:
    p = dict((k, _thaw(v)) for k, v in job.params)
    if p["lie"] == "sl2":
        return sl2(_q(p.get("q", "1")))
    d = p["dimension"]
    Q = _qmatrix(p["Q"]) if "Q" in p else [[int(i == j) for j in range(d)] for i in range(d)]
    if p["lie"] == "abelian":
        return abelian(d, Q)
    sc: dict = {}
    for i, j, k, f in p.get("structure_constants", []):
        sc.setdefault((i, j), {})[k] = _q(f)
    names = tuple(p.get("names", ())) or ()
    return LieAlgebraData(d, sc, Q, names)


def lattice(job: JobSpec):
    p = dict((k, _thaw(v)) for k, v in job.params)
    coc = p.get("cocycle")
    return lattice_voa(LatticeSpec(tuple(map(tuple, p["gram"])), tuple(map(tuple, coc)) if coc else None))


def stress_tensor(job: JobSpec, alg):
    """(T, expected central charge or None)."""
    a, p = job.algebra, dict((k, _thaw(v)) for k, v in job.params)
    if a in ("heisenberg", "lattice"):
        return stress.heisenberg_stress(alg), Fraction(len(alg.generators))
    if a == "kac_moody":
        tensor, T = stress.sugawara(lie_data(job), alg)
        return T, tensor.c
    if a == "virasoro":
        return Gen(alg, "L"), _q(p["c"])
    if a == "dilaton":
        spec = DilatonSpec(_q(p["lambda"]), _q(p["Q"]))
        return stress.dilaton_T(spec, alg), stress.dilaton_central_charge(spec)
    if a == "bc":
        return stress.bc_T(p["n"], alg), stress.bc_central_charge(p["n"])
    raise ValueError(a)


# ---------------------------------------------------------------------------
# running


@dataclass
class Report:
    job: JobSpec
    results: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)  # (name, passed, detail)

    def check(self, name: str, ok: bool, detail: str = ""):
        self.checks.append((name, bool(ok), detail))

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def as_dict(self) -> dict:
        return {
            "job": json.loads(serialize(self.job)),
            "results": self.results,
            "checks": [
                {"name": n, "status": "PASS" if ok else "FAIL", **({"detail": d} if d else {})}
                for n, ok, d in self.checks
            ],
            "provenance": {
                "package": "voalab",
                "version": VERSION,
                "cutoff": self.job.cutoff,
                "window": self.job.window,
                "conventions": conventions_fingerprint(),
            },
        }

    def render(self, fmt: str = "text") -> str:
        if fmt == "structured":
            return json.dumps(self.as_dict(), sort_keys=True, indent=2) + "\n"
        lines = [f"job: {serialize(self.job)}"]
        for k, v in self.results.items():
            lines.append(f"{k}: {json.dumps(v, sort_keys=True) if not isinstance(v, str) else v}")
        for n, ok, d in self.checks:
            lines.append(f"{n}: {'PASS' if ok else 'FAIL'}" + (f" ({d})" if d else ""))
        lines.append(f"conventions: {conventions_fingerprint()}")
        return "\n".join(lines) + "\n"


def _series(s) -> list:
    return [[e, rat_str(c)] for e, c in s.items()]


def run(job: JobSpec) -> Report:
    rep = Report(job)
    try:
        _DISPATCH[job.command](job, rep)
    except (stress.NotVirasoro, stress.NoAdmissibleTensor, brst.BrstError, blocks.UnstableTruncation,
            InvalidLieData, InvalidLattice, ValueError) as e:
        rep.check(job.command, False, f"{type(e).__name__}: {e}")
    return rep


def _check(job, rep):
    if job.algebra == "lattice":
        voa = lattice(job)
        w = job.param("charge_window", 2)
        bad = [lam for lam in voa.sectors(w) if voa.conformal_weight(lam) != Fraction(voa.spec.form(lam, lam), 2)]
        rep.check("lattice sector weights", not bad)
    alg = build_algebra(job)
    vio = check_axioms(alg, max(job.window, 2), module_level=min(job.cutoff, 2))
    rep.results["violations"] = [str(v) for v in vio[:20]]
    rep.check("axioms", not vio)


def _dims(job, rep):
    alg = build_algebra(job)
    dims = graded_dimensions(ModuleSpec.vacuum(alg), job.cutoff)
    rep.results["dimensions"] = {str(k): v for k, v in dims.items()}
    oracle = blocks.vacuum_character_oracle(alg, job.cutoff).to_dict()
    rep.check("generating function", {k: v for k, v in dims.items() if v} == oracle)


def _cc(job, rep):
    alg = build_algebra(job)
    T, expected = stress_tensor(job, alg)
    c = stress.extract_central_charge(T, ModuleSpec.vacuum(alg), max(job.window, 2), job.cutoff)
    rep.results["T"] = str(T)
    rep.results["central_charge"] = rat_str(c)
    if expected is not None:
        rep.check("central charge formula", c == expected, f"expected {rat_str(expected)}")


def _ope(job, rep):
    alg = build_algebra(job)
    table = {}
    w = job.window
    for a in sorted(alg.gen):
        for b in sorted(alg.gen):
            for m in range(-w, w + 1):
                for k in range(-w, w + 1):
                    br = bracket_modes(a, m, b, k, alg)
                    if not br.is_zero():
                        table[f"[{a}_{m}, {b}_{k}]"] = str(br)
    rep.results["brackets"] = table
    rep.check("skew symmetry", not [v for v in check_axioms(alg, max(w, 2), module_level=-1) if v.kind == "skew"])


def _primary(job, rep):
    alg = build_algebra(job)
    T, _ = stress_tensor(job, alg)
    mod = ModuleSpec.vacuum(alg)
    gens = [job.arg("generator")] if job.arg("generator") else sorted(alg.gen)
    for g in gens:
        wt = job.arg("weight", alg[g].weight)
        bad = stress.verify_primary(T, g, wt, mod, job.window)
        rep.results[f"failures[{g}]"] = [list(x) for x in bad]
        rep.check(f"{g} primary of weight {wt}", not bad)


def _complex(job):
    p = dict(job.params)
    if job.algebra == "heisenberg":
        if p.get("Q", 1) not in (1, "1"):
            raise ValueError("BRST matter must be the standard Heisenberg algebra (Q = identity)")
        cx = brst.heisenberg_matter(p["rank"])
    else:
        cx = brst.virasoro_matter(_q(p["c"]))
    cx.level_window = min(cx.level_window, job.cutoff)
    cx.basis(job.cutoff)
    return cx


def _brst(job, rep):
    cx = _complex(job)
    x, y, alpha = cx.coefficients
    rep.results["charge"] = {"c T": rat_str(x), "b c dc": rat_str(y), "c_0": rat_str(alpha)}
    ok, witness = brst.square_is_zero(cx)
    rep.check("delta^2 = 0", ok, "" if ok else f"delta^2 {witness[0]} = {witness[1]}")
    props = brst.brst_properties(cx, window=2, max_level=min(job.cutoff, 1))
    rep.check("{delta, b_m} = L_m", not props.b_anticommutator_failures)
    rep.check("[delta, L_m] = 0", not props.virasoro_commutator_failures)


def _cohomology(job, rep):
    cx = _complex(job)
    lv = job.arg("level")
    levels = [lv] if lv is not None else list(range(cx.min_level, job.cutoff + 1))
    gh = job.arg("ghost")
    table = []
    for L in levels:
        for g in ([gh] if gh is not None else cx.ghost_numbers(L)):
            table.append([L, g, brst.brst_cohomology(cx, L, g)])
    rep.results["cohomology"] = table
    rep.check("cohomology", True)


def _correlator(job, rep):
    ins = [_thaw(x) for x in job.arg("insertions")]
    w = job.window
    if job.algebra == "lattice":
        voa = lattice(job)
        rf = blocks.lattice_correlator(voa, ins)
        bad = blocks.lattice_mode_mismatches(voa, ins, w)
    elif job.algebra == "bc":
        n = job.param("n")
        rf = blocks.bc_correlator(n, ins)
        phi = blocks.bc_vacuum_functional(n)
        bad = blocks.mode_oracle_mismatches(rf, phi.mod, ins, w, phi)
    elif job.algebra in ("heisenberg", "kac_moody") and (
        job.algebra == "heisenberg" or lie_data(job).is_abelian()
    ):
        alg = build_algebra(job)
        rf = blocks.heisenberg_correlator(alg, ins)
        bad = blocks.mode_oracle_mismatches(rf, ModuleSpec.vacuum(alg), ins, w)
    else:
        raise ValueError(f"no closed-form correlator for {job.algebra}")
    rep.results["correlator"] = str(rf)
    rep.check("mode expansion agrees", not bad, "" if not bad else f"first mismatch at modes {bad[0][0]}")


def _character(job, rep):
    if job.algebra == "bc":
        n = job.param("n")
        ch = blocks.character(ModuleSpec.vacuum(bc_system(n)), job.cutoff, ghost=True)
        rep.results["character"] = {str(g): _series(s) for g, s in ch.items()}
        fermi = blocks.fermionic_character(n, job.cutoff)
        bose = blocks.bosonic_character(n, job.cutoff)
        rep.check("module = fermionic product", blocks.series_equal(ch, fermi, job.cutoff))
        rep.check("fermionic product = bosonic sum", blocks.series_equal(fermi, bose, job.cutoff))
        return
    alg = build_algebra(job)
    ch = blocks.character(ModuleSpec.vacuum(alg), job.cutoff)
    rep.results["character"] = _series(ch)
    rep.check("generating function", ch.to_dict() == blocks.vacuum_character_oracle(alg, job.cutoff).to_dict())


def _blocks(job, rep):
    if job.algebra == "lattice":
        d = blocks.lattice_blocks_dim(lattice(job), job.param("charge_window", 2), job.cutoff)
    else:
        d = blocks.genus0_blocks_dim(ModuleSpec.vacuum(build_algebra(job)), job.cutoff)
    rep.results["dimension"] = d
    rep.check("stable across cutoffs", True)


_DISPATCH = {
    "check": _check, "dims": _dims, "cc": _cc, "ope": _ope, "primary": _primary, "brst": _brst,
    "cohomology": _cohomology, "correlator": _correlator, "character": _character, "blocks": _blocks,
}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="voalab", description=__doc__.splitlines()[0])
    ap.add_argument("command", nargs="?", choices=COMMANDS, help="overrides the command field of the job")
    ap.add_argument("--spec", required=True, help="job file (JSON); '-' reads standard input")
    ap.add_argument("--cutoff", type=int)
    ap.add_argument("--window", type=int)
    ap.add_argument("--out", help="write the report here instead of standard output")
    ap.add_argument("--format", choices=("text", "structured"), default="text")
    ns = ap.parse_args(argv)
    text = sys.stdin.read() if ns.spec == "-" else open(ns.spec, encoding="utf-8").read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        print(f"$: not valid JSON ({e.msg})", file=sys.stderr)
        return 2
    if isinstance(doc, dict):
        for key, val in (("command", ns.command), ("cutoff", ns.cutoff), ("window", ns.window)):
            if val is not None:
                doc[key] = val
    try:
        job = parse_spec(json.dumps(doc))
    except SpecError as e:
        for p in e.problems:
            print(p, file=sys.stderr)
        return 2
    rep = run(job)
    out = rep.render(ns.format)
    target = ns.out or job.output
    if target:
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return 0 if rep.passed else 1
