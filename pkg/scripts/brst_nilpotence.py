"""delta^2 on free-boson matter of several ranks, tensored with the weight (2, -1) ghosts.

Prints the fitted charge coefficients, whether delta^2 vanishes, and the
ratio of delta^2 to (rank - 26) on a probe block shared by all ranks.
"""

import argparse
from voalab import brst


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ranks", type=int, nargs="+", default=[24, 25, 26, 27])
    ap.add_argument("--level", type=int, default=2)
    ns = ap.parse_args()
    for r in ns.ranks:
        cx = brst.heisenberg_matter(r)
        cx.basis(ns.level)
        ok, witness = brst.square_is_zero(cx)
        x, y, alpha = cx.coefficients
        line = f"rank {r:>3}: charge (x, y, alpha) = ({x}, {y}, {alpha}); delta^2 = 0: {ok}"
        if not ok:
            line += f"; first witness {witness[0]}"
        print(line)
    off = [r for r in ns.ranks if r != 26]
    if len(off) >= 2:
        linear, data = brst.square_linear_in_rank(tuple(off), level=ns.level)
        print(f"delta^2 = (rank - 26) * fixed operator on the probe block: {linear}")
        ref = data["reference"]
        fmt = brst.heisenberg_matter(1).module
        for s, d in list(ref.items())[:3]:
            if d:
                print(f"  delta^2 / (rank - 26) on {fmt.format_state(s)}: {fmt.format_vector(d)}")
    ghosts = brst.ghost_virasoro_check(window=3)
    print(f"ghost central charge {ghosts.central_charge}; b, c primary: {ghosts.passed}")
    print(f"composite central charge with c = 26 matter: {brst.composite_central_charge(26)}")


if __name__ == "__main__":
    main()
