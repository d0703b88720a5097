"""Regenerate the shipped echelon bases (needs cypari2; offline tool only)."""
import sys
from fractions import Fraction
from pathlib import Path

import cypari2

pari = cypari2.Pari()
PREC = 200
# weight-2 forms also feed the Mellin evaluator, which needs ~2000 terms per unit height
PREC_K2 = 6000
OUT = Path(__file__).resolve().parents[1] / "src" / "rhexplore" / "data"


def echelon(level, weight, prec):
    mf = pari(f"mfinit([{level},{weight}],1)")
    rows = []
    for f in pari("mfbasis")(mf):
        c = pari("mfcoefs")(f, prec)
        rows.append([Fraction(int(x.numerator()), int(x.denominator())) for x in c])
    g = len(rows)
    for i in range(g):
        col = i + 1
        piv = next(r for r in range(i, g) if rows[r][col] != 0)
        rows[i], rows[piv] = rows[piv], rows[i]
        inv = 1 / rows[i][col]
        rows[i] = [x * inv for x in rows[i]]
        for r in range(g):
            if r != i and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[i])]
    return rows


def write(name, level, weight, rows):
    lines = [f"weight={weight}", f"level={level}", f"dim={len(rows)}"]
    for r in rows:
        lines.append("coeffs: " + " ".join(str(x) for x in r))
    (OUT / name).write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    for N in (37, 38, 43):
        write(f"basis_N{N}_k2.txt", N, 2, echelon(N, 2, PREC_K2))
    write("basis_N1_k12.txt", 1, 12, echelon(1, 12, PREC))
    print("ok", file=sys.stderr)
