"""The fermion current of bc(n) against the dilaton field it should realize, and the character identity."""

import argparse

from voalab import blocks, stress


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[-1, 0, 1, 2])
    ap.add_argument("--cutoff", type=int, default=3)
    ap.add_argument("--order", type=int, default=8, help="compare characters up to this power of q")
    ns = ap.parse_args()
    bad = 0
    for n in ns.n:
        rep = stress.bose_fermi_check(n, cutoff=ns.cutoff)
        same = blocks.series_equal(blocks.fermionic_character(n, ns.order), blocks.bosonic_character(n, ns.order), ns.order)
        print(
            f"n = {n:>2}: j brackets {'ok' if not rep.heisenberg_failures else rep.heisenberg_failures[0]}, "
            f"j_0 = ghost number {'ok' if not rep.ghost_number_failures else rep.ghost_number_failures[0]}, "
            f"T(j) = bc_T {'ok' if not rep.stress_failures else rep.stress_failures[0]}, "
            f"characters to q^{ns.order} {'agree' if same else 'DIFFER'}"
        )
        bad += (not rep.passed) + (not same)
    raise SystemExit(1 if bad else 0)


if __name__ == "__main__":
    main()
