"""Regenerate the committed benchmark fixtures under data/instances/.

Run from the repository root:

    python3 scripts/make_instances.py

The n=20 set is uniform random at the m/n ~ 4.55 ratio, kept only if the
brute-force oracle certifies satisfiability. The larger sets are planted
(satisfiable by construction) because exhaustive filtering is infeasible
there. Seeds are fixed; output is deterministic.
"""

from pathlib import Path

from hopfim.cnf_io import serialize_dimacs
from hopfim.instances import planted_formula, satisfiable_uniform_formula

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "data" / "instances"

SETS = [
    ("uniform", 20, 91, 20, 20250601),
    ("planted", 50, 218, 10, 20250602),
    ("planted", 100, 430, 10, 20250603),
]


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    for family, n, m, count, base_seed in SETS:
        for i in range(count):
            if family == "uniform":
                formula = satisfiable_uniform_formula(n, m, base_seed + i)
            else:
                formula = planted_formula(n, m, base_seed + i)
            name = f"n{n:03d}-m{m:03d}-{i:02d}.cnf"
            path = OUT / name
            path.write_text(serialize_dimacs(formula))
            print(f"wrote {path.relative_to(ROOT)} ({family})")


if __name__ == "__main__":
    main()
