#!/usr/bin/env python3
"""Writes tests/reference_values.hpp from mpmath at 40 digits."""
import sys
from pathlib import Path

import mpmath as mp

mp.mp.dps = 40

ZETA_POINTS = [
    (2, 0), (0, 0), (-2, 0), (0.5, 14), (0.5, 10), (3, 0), (-3.5, 2.25),
    (0.3, 5), (1.5, 0), (1.25, 0), (0.7, 0.3), (4, 25), (-1.2, 33.3),
    (0.5, 100), (0.25, 250), (2.5, 390),
]


def d17(x):
    return mp.nstr(x, 17, min_fixed=-30, max_fixed=30, strip_zeros=False)


def main(out):
    lines = ["#pragma once", "", "// Generated by oracles/gen_reference.py (mpmath, 40 digits).", "",
             "#include <array>", "", "namespace ref {", "",
             "struct ZetaRef {", "  double sigma, t, zeta_re, zeta_im, dzeta_re, dzeta_im;", "};", ""]
    lines.append(f"inline constexpr std::array<ZetaRef, {len(ZETA_POINTS)}> kZeta{{{{")
    for sg, t in ZETA_POINTS:
        s = mp.mpc(sg, t)
        z = mp.zeta(s)
        dz = mp.zeta(s, derivative=1)
        lines.append(f"    {{{sg}, {t}, {d17(z.real)}, {d17(z.imag)}, {d17(dz.real)}, {d17(dz.imag)}}},")
    lines.append("}};")
    lines.append("")

    zeros = []
    n = 1
    while True:
        z = mp.zetazero(n)
        if z.imag > 300:
            break
        zeros.append(z.imag)
        n += 1
    lines.append("// Ordinates of the non-trivial zeros with 0 < t < 300.")
    lines.append(f"inline constexpr std::array<double, {len(zeros)}> kZeroOrdinates{{{{")
    for z in zeros:
        lines.append(f"    {d17(z)},")
    lines.append("}};")
    lines.append("")

    gam = [mp.stieltjes(k) for k in range(9)]
    lines.append("inline constexpr std::array<double, 9> kStieltjes{{")
    for g in gam:
        lines.append(f"    {d17(g)},")
    lines.append("}};")
    lines.append("")

    root = mp.findroot(lambda x: mp.zeta(x, derivative=1), -2.7)
    lines.append(f"// Real zero of zeta' in (-4, -2).")
    lines.append(f"inline constexpr double kZetaPrimeRoot = {d17(root)};")
    lines.append("")
    lines.append("}  // namespace ref")
    Path(out).write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "reference_values.hpp")
