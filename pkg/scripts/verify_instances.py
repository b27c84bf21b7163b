#!/usr/bin/env python3
"""Full desk verification across a grid of instances.

For each (d, l1, l2) builds the minimal n = d+1 system (one stripe per
level), then runs the exhaustive secrecy audit, every inequality suite,
and the permutation-symmetry check, printing one summary line per
instance.  Exits nonzero if anything is violated.

Usage:
    python scripts/verify_instances.py [--max-d 4]
"""

import argparse
import sys
from time import perf_counter

from mdcsr import entropy as ent
from mdcsr.bounds import level_capacity, mbr_point
from mdcsr.secrecy import audit_all
from mdcsr.system import SystemParams, build_system


def build_grid_system(d, l1, l2):
    l = l1 + l2
    sizes = {j: level_capacity(d, j, l) for j in range(l + 1, d + 1)}
    return build_system(SystemParams.create(d + 1, d, l1, l2, sizes))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-d", type=int, default=4)
    args = ap.parse_args()

    failures = 0
    for d in range(2, args.max_d + 1):
        for l in range(d):
            for l1 in range(l + 1):
                t0 = perf_counter()
                system = build_grid_system(d, l1, l - l1)
                point, rates = system.achieved_point()
                assert point == mbr_point(rates)
                audit = audit_all(system)
                checks = ent.run_suite(system, "all")
                bad = [c for c in checks if not c.satisfied]
                ok = audit.secure and not bad
                failures += 0 if ok else 1
                print(
                    f"(d={d}, l1={l1}, l2={l - l1}) "
                    f"audits={len(audit.entries):3d} secure={audit.secure} "
                    f"checks={len(checks):3d} violations={len(bad)} "
                    f"[{perf_counter() - t0:.2f}s]"
                )
                for c in bad:
                    print(f"    VIOLATION {c.name} {c.params}: {c.lhs} < {c.rhs}")
    if failures:
        print(f"{failures} instance(s) FAILED")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
