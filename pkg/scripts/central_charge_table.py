"""Measure the central charge of every stress tensor the package builds and compare with the closed formulas."""

import argparse
from fractions import Fraction

from voalab import stress
from voalab.constructors import DilatonSpec, abelian, bc_system, dilaton, kac_moody, sl2
from voalab.fock import ModuleSpec


def cases():
    for d in (1, 2, 3):
        g = abelian(d, [[int(i == j) for j in range(d)] for i in range(d)])
        yield f"heisenberg({d})", stress.sugawara(g)[1], kac_moody(g), Fraction(d)
    for q in (1, 2):
        g = sl2(q)
        yield f"sl2, Q = {q}K", stress.sugawara(g)[1], kac_moody(g), Fraction(3 * q) / (q + Fraction(1, 2))
    for lam, Q in ((0, 1), (2, 1), (1, -1)):
        spec = DilatonSpec(lam, Q)
        alg = dilaton(spec)
        yield f"dilaton({lam}, {Q})", stress.dilaton_T(spec, alg), alg, stress.dilaton_central_charge(spec)
    for n in (-1, 0, 1, 2):
        alg = bc_system(n)
        yield f"bc({n})", stress.bc_T(n, alg), alg, stress.bc_central_charge(n)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--window", type=int, default=3)
    ap.add_argument("--max-level", type=int, default=4)
    ns = ap.parse_args()
    failures = 0
    print(f"{'system':<18} {'measured':>9} {'formula':>9}")
    for name, T, alg, formula in cases():
        got = stress.extract_central_charge(T, ModuleSpec.vacuum(alg), ns.window, ns.max_level)
        mark = "" if got == formula else "  MISMATCH"
        failures += got != formula
        print(f"{name:<18} {str(got):>9} {str(formula):>9}{mark}")
    try:
        stress.sugawara(sl2(Fraction(-1, 2)))
        print("sl2, Q = -K/2: accepted (unexpected)")
        failures += 1
    except stress.NoAdmissibleTensor as e:
        print(f"sl2, Q = -K/2: rejected, {e.condition}")
    raise SystemExit(1 if failures else 0)


if __name__ == "__main__":
    main()
