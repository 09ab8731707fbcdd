"""Shared brute-force oracles and small builders used across the test suite."""

import itertools

from lionshopf.forest import LionsForest, canonical_key
from lionshopf.partitions import SetPartition


def all_parent_maps(n):
    """Every acyclic parent map on nodes 0..n-1 (edges toward roots)."""
    choices = [(-1,) + tuple(x for x in range(n) if x != y) for y in range(n)]
    for combo in itertools.product(*choices):
        parent = {i: (None if p == -1 else p) for i, p in enumerate(combo)}
        # acyclicity: follow parents, must terminate
        ok = True
        for start in range(n):
            seen = set()
            x = start
            while x is not None:
                if x in seen:
                    ok = False
                    break
                seen.add(x)
                x = parent[x]
            if not ok:
                break
        if ok:
            yield parent


def hyperedge_configs(n):
    """Every (h0, H) with h0 a subset of 0..n-1 and H a partition of the rest."""
    nodes = list(range(n))
    for r in range(n + 1):
        for h0 in itertools.combinations(nodes, r):
            rest = [x for x in nodes if x not in h0]
            for P in SetPartition.all_partitions(rest):
                yield h0, [list(b) for b in P.blocks]


def oracle_forest_classes(n, d):
    """All valid classes with exactly n nodes: parent maps x labels x
    hyperedge assignments, filtered by validation, deduplicated by key.

    Bare labelled forests are deduplicated first; this is sound because a
    label-preserving isomorphism of bare forests puts their hyperedge
    configurations in bijection.
    """
    if n == 0:
        return {canonical_key(LionsForest.unit()): LionsForest.unit()}
    bare = {}
    for parent in all_parent_maps(n):
        for labels in itertools.product(range(1, d + 1), repeat=n):
            label = dict(enumerate(labels))
            T = LionsForest(range(n), parent, label, range(n), ())
            bare.setdefault(canonical_key(T), (parent, label))
    classes = {}
    for parent, label in bare.values():
        for h0, blocks in hyperedge_configs(n):
            T = LionsForest(range(n), parent, label, h0, blocks)
            if T.validate().ok:
                classes.setdefault(canonical_key(T), T)
    return classes


def oracle_classes_up_to(nmax, d):
    out = {}
    for n in range(0, nmax + 1):
        out.update(oracle_forest_classes(n, d))
    return out


def ladder(labels, h0_positions=(), block_groups=None):
    """A chain whose root carries the LAST label; position k (1-based,
    reading the label sequence) is node k-1 and hangs below position k+1."""
    n = len(labels)
    parent = {k: (k + 1 if k + 1 < n else None) for k in range(n)}
    label = {k: labels[k] for k in range(n)}
    h0 = [p - 1 for p in h0_positions]
    if block_groups is None:
        blocks = [[x] for x in range(n) if x not in set(h0)]
    else:
        blocks = [[p - 1 for p in g] for g in block_groups]
    return LionsForest(range(n), parent, label, h0, blocks)


def paper_coproduct_tree():
    """Root labelled 3 in h0; children: a node labelled 2 in its own
    hyperedge and a 2-chain (1 below the root, 3 above) forming one
    hyperedge."""
    return LionsForest(
        range(4),
        {0: None, 1: 0, 2: 0, 3: 2},
        {0: 3, 1: 2, 2: 1, 3: 3},
        [0],
        [[1], [2, 3]],
    )


def paper_dual_tree():
    """Root 3 tagged; a red 2-chain on one side, a blue node carrying a
    green leaf on the other: dual edges {0,r},{0,b},{r,b},{b,g}."""
    return LionsForest(
        range(5),
        {0: None, 1: 0, 2: 0, 3: 1, 4: 2},
        {0: 3, 1: 1, 2: 2, 3: 2, 4: 1},
        [0],
        [[1, 3], [2], [4]],
    )
