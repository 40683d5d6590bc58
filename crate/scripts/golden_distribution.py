#!/usr/bin/env python3
"""Brute-force tables of R(f) over monic irreducible f of degree n over F_p.

Shares no code with the Rust crate: irreducibility is plain trial division by
every monic polynomial of degree 1..n//2, and R(f) = sum_{i=1}^{n-1} f_i f_{i-1}
is evaluated straight from the coefficient list.

    python3 scripts/golden_distribution.py --p 3 --n 2 7 --out crates/core/tests/golden
"""

import argparse
import itertools
import json
import os


def poly_mod(a, b, p):
    """Remainder of a by monic b; coefficient lists, constant term first."""
    a = list(a)
    db = len(b) - 1
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] % p
        if c:
            for j in range(db + 1):
                a[i - db + j] = (a[i - db + j] - c * b[j]) % p
    r = [x % p for x in a[:db]]
    while r and r[-1] == 0:
        r.pop()
    return r


def monic(d, p):
    for low in itertools.product(range(p), repeat=d):
        yield list(low) + [1]


def irreducible(f, p):
    n = len(f) - 1
    for d in range(1, n // 2 + 1):
        for g in monic(d, p):
            if not poly_mod(f, g, p):
                return False
    return True


def rs(f, p):
    n = len(f) - 1
    return sum(f[i] * f[i - 1] for i in range(1, n)) % p


def table(p, n):
    counts = {str(g): 0 for g in range(p)}
    for f in monic(n, p):
        if irreducible(f, p):
            counts[str(rs(f, p))] += 1
    return {"q": p, "n": n, "total": sum(counts.values()), "counts": counts}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--n", type=int, nargs=2, default=[2, 7], metavar=("MIN", "MAX"))
    ap.add_argument("--out", default="crates/core/tests/golden")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    for n in range(args.n[0], args.n[1] + 1):
        t = table(args.p, n)
        path = os.path.join(args.out, f"dist_q{args.p}_n{n}.json")
        with open(path, "w") as fh:
            json.dump(t, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(path, t["total"], t["counts"])


if __name__ == "__main__":
    main()
