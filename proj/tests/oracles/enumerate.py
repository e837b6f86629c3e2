"""Independent brute-force reference values for the exact-probability tests.

Written directly from the hop rule, without sharing code with the C++ library.
Run: python3 tests/oracles/enumerate.py
"""
from fractions import Fraction
from itertools import permutations


def hop(chans, pi1, u, n):
    return min(chans, key=lambda c: (pi1[c] - u) % n)


def prob_lsh2(n, c1, c2):
    hits = total = 0
    for pi1 in permutations(range(n)):
        for v in range(n):
            total += 1
            hits += hop(c1, pi1, v, n) == hop(c2, pi1, v, n)
    return Fraction(hits, total)


def prob_lsh3_independent(n, c1, c2):
    hits = total = 0
    for pi1 in permutations(range(n)):
        for u1 in range(n):
            for u2 in range(n):
                total += 1
                hits += hop(c1, pi1, u1, n) == hop(c2, pi1, u2, n)
    return Fraction(hits, total)


def ettr_sync_lsh2(n, c1, c2):
    perms = list(permutations(range(n)))
    acc = Fraction(0)
    for pi1 in perms:
        for pi2 in perms:
            t = next(t for t in range(n) if hop(c1, pi1, pi2[t], n) == hop(c2, pi1, pi2[t], n))
            acc += t + 1
    return acc / (len(perms) ** 2)


def lsh3_approx(n1, n2, n12):
    u = n1 + n2 - n12
    return 2 * n12 / (u * (u + 1)) + n12 / u**2 * ((n1 - n12) / n2 + (n2 - n12) / n1)


if __name__ == "__main__":
    print("lsh2 N=5 {0,1},{1,2}:", prob_lsh2(5, [0, 1], [1, 2]))
    print("lsh3 N=4 full:", prob_lsh3_independent(4, [0, 1, 2, 3], [0, 1, 2, 3]))
    print("lsh3 N=6 {0,1,2},{1,2,3}:", prob_lsh3_independent(6, [0, 1, 2], [1, 2, 3]),
          "approx", lsh3_approx(3, 3, 2))
    print("lsh3 N=5 {0,2},{2,4}:", prob_lsh3_independent(5, [0, 2], [2, 4]))
    print("ettr lsh2 N=4 {0,1},{1,2}:", ettr_sync_lsh2(4, [0, 1], [1, 2]))
    print("ettr lsh2 N=5 {0,3},{3}:", ettr_sync_lsh2(5, [0, 3], [3]))
    print("lsh3 approx (60,60,60):", lsh3_approx(60, 60, 60), "(60,60,30):", lsh3_approx(60, 60, 30))
    print("lsh4 approx (60,60,60) t0=20 p=.75:", 1 / (0.4375 / 60 + 0.5625 / 20))
