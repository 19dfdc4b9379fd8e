"""Independent reference implementations the tests check the package against.

Everything here is written as plain loops over matrix cells, deliberately
ignoring how the package itself computes things.
"""

from __future__ import annotations

import itertools
import statistics


def is_irreflexive(m) -> bool:
    n = len(m)
    return all(not m[i][i] for i in range(n))


def is_asymmetric(m) -> bool:
    n = len(m)
    return all(not (m[i][j] and m[j][i]) for i in range(n) for j in range(n) if i != j)


def is_transitive(m) -> bool:
    n = len(m)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if m[i][j] and m[j][k] and not m[i][k]:
                    return False
    return True


def is_ferrers(m) -> bool:
    # iPj and kPl imply iPl or kPj
    n = len(m)
    for i in range(n):
        for j in range(n):
            if not m[i][j]:
                continue
            for k in range(n):
                for l in range(n):
                    if m[k][l] and not (m[i][l] or m[k][j]):
                        return False
    return True


def brute_hamming(m1, m2) -> float:
    n = len(m1)
    diff = 0
    for i in range(n):
        for j in range(n):
            if i != j and bool(m1[i][j]) != bool(m2[i][j]):
                diff += 1
    return diff / (n * (n - 1))


def exhaustive_kmeans_wcss(values, k) -> float:
    """Minimum within-cluster sum of squares over all contiguous partitions."""
    sv = sorted(values)
    n = len(sv)

    def seg(i, j):
        chunk = sv[i:j]
        mu = statistics.fmean(chunk)
        return sum((v - mu) ** 2 for v in chunk)

    best = None
    for cuts in itertools.combinations(range(1, n), k - 1):
        edges = (0,) + cuts + (n,)
        wcss = sum(seg(a, b) for a, b in zip(edges, edges[1:]))
        if best is None or wcss < best:
            best = wcss
    return best


