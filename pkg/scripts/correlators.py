"""Closed-form correlators printed in factored form, each checked against a truncated mode sum."""

from voalab import blocks
from voalab.constructors import LatticeSpec, heisenberg, lattice_voa
from voalab.fock import ModuleSpec


def main():
    h = heisenberg(1)
    for k in (2, 3, 4):
        rf = blocks.heisenberg_correlator(h, ["a"] * k)
        bad = blocks.mode_oracle_mismatches(rf, ModuleSpec.vacuum(h), ["a"] * k, 3)
        print(f"<{' '.join(['a'] * k)}> = {rf}   [{'FAIL' if bad else 'mode sums agree'}]")
    voa = lattice_voa(LatticeSpec(((2,),)))
    for charges in ([1, -1], [1, 1, -2], [1, -1, 1, -1], [1, 1]):
        rf = blocks.lattice_correlator(voa, charges)
        bad = blocks.lattice_mode_mismatches(voa, charges, 3)
        print(f"A1 charges {charges}: {rf}   [{'FAIL' if bad else 'mode sums agree'}]")
    for n, kinds in ((2, "ccc"), (2, "bcccc"), (1, "bcc"), (0, "bbc"), (-1, "bbb")):
        phi = blocks.bc_vacuum_functional(n)
        rf = blocks.bc_correlator(n, list(kinds))
        bad = blocks.mode_oracle_mismatches(rf, phi.mod, list(kinds), 3, phi)
        print(f"bc({n}) <{' '.join(kinds)}> = {rf}   [{'FAIL' if bad else 'mode sums agree'}]")


if __name__ == "__main__":
    main()
