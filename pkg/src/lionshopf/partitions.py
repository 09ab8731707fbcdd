"""Set partitions, partition sequences and couplings between partitions.

A partition sequence is an integer sequence whose positive entries, read in
order, start at 1 and never jump by more than one above the running maximum
(a "1-Lip sup-envelope").  These sequences are in bijection with set
partitions of {0, ..., n}, and couplings between two partitions describe all
ways of matching up some of their blocks.
"""

from __future__ import annotations

import itertools
from math import comb, factorial


class PartitionError(ValueError):
    pass


def bell_number(n):
    """Bell number B(n) via the recurrence B(n+1) = sum C(n,k) B(k)."""
    if n < 0:
        raise PartitionError("bell_number needs n >= 0")
    table = [1]
    for m in range(n):
        table.append(sum(comb(m, k) * table[k] for k in range(m + 1)))
    return table[n]


class SetPartition:
    """A partition of a finite set of integers into nonempty blocks.

    Canonical form: the ground is stored sorted, and blocks are stored as
    sorted tuples ordered by their minimum element.  Two partitions compare
    equal iff they have the same ground and the same blocks.
    """

    __slots__ = ("ground", "blocks")

    def __init__(self, ground, blocks):
        ground = tuple(sorted(set(ground)))
        norm = []
        seen = set()
        for b in blocks:
            b = tuple(sorted(set(b)))
            if not b:
                raise PartitionError("empty block in partition")
            if seen.intersection(b):
                raise PartitionError("blocks are not pairwise disjoint")
            seen.update(b)
            norm.append(b)
        if seen != set(ground):
            raise PartitionError("blocks do not cover the ground set")
        self.ground = ground
        self.blocks = tuple(sorted(norm, key=lambda b: b[0]))

    def __eq__(self, other):
        return (
            isinstance(other, SetPartition)
            and self.ground == other.ground
            and self.blocks == other.blocks
        )

    def __hash__(self):
        return hash((self.ground, self.blocks))

    def __repr__(self):
        inner = ", ".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)
        return f"SetPartition[{inner}]"

    def __len__(self):
        return len(self.blocks)

    def block_of(self, x):
        for b in self.blocks:
            if x in b:
                return b
        raise PartitionError(f"{x} is not in the ground set")

    def restrict(self, subset):
        """Restriction to a subset of the ground, dropping empty traces."""
        subset = set(subset)
        blocks = [tuple(x for x in b if x in subset) for b in self.blocks]
        return SetPartition(subset & set(self.ground), [b for b in blocks if b])

    def to_lists(self):
        return [list(b) for b in self.blocks]

    @staticmethod
    def from_lists(blocks):
        ground = [x for b in blocks for x in b]
        return SetPartition(ground, blocks)

    @staticmethod
    def all_partitions(ground):
        """Every partition of `ground`, by assigning elements to blocks."""
        ground = sorted(set(ground))
        if not ground:
            yield SetPartition([], [])
            return

        def rec(i, blocks):
            if i == len(ground):
                yield SetPartition(ground, blocks)
                return
            x = ground[i]
            for j in range(len(blocks)):
                yield from rec(i + 1, blocks[:j] + [blocks[j] + [x]] + blocks[j + 1:])
            yield from rec(i + 1, blocks + [[x]])

        yield from rec(1, [[ground[0]]])


class PartitionSequence:
    """An integer sequence indexing iterated mean-field derivatives.

    Entries are in {0, ..., n}; the subsequence of positive entries must
    start at 1 and each positive entry may exceed the running positive
    maximum by at most one.  ``m`` is the largest entry and ``l[i]`` counts
    occurrences of the value i for i = 0, ..., m.
    """

    __slots__ = ("entries", "m", "l")

    def __init__(self, entries):
        entries = tuple(int(a) for a in entries)
        if not entries:
            raise PartitionError("empty sequence")
        if any(a < 0 for a in entries):
            raise PartitionError("entries must be nonnegative")
        running_max = 0
        for a in entries:
            if a > 0:
                if a > running_max + 1:
                    raise PartitionError(
                        f"{entries}: positive part breaks the 1-Lip envelope"
                    )
                running_max = max(running_max, a)
        if any(a > len(entries) for a in entries):
            raise PartitionError("entries exceed the sequence length")
        self.entries = entries
        self.m = max(entries)
        self.l = tuple(entries.count(i) for i in range(self.m + 1))

    def __eq__(self, other):
        return isinstance(other, PartitionSequence) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __len__(self):
        return len(self.entries)

    def __repr__(self):
        return f"PartitionSequence{self.entries}"

    @property
    def zero_count(self):
        return self.l[0] if self.m >= 0 else len(self.entries)


def enumerate_sequences(n, k=None):
    """All partition sequences of length n, optionally with exactly k zeros.

    Returned in lexicographic order, generated directly from the 1-Lip
    envelope constraint (no post-filtering).
    """
    if n < 1:
        raise PartitionError("sequence length must be >= 1")
    if k is not None and not 0 <= k <= n:
        raise PartitionError("zero count must satisfy 0 <= k <= n")
    out = []

    def rec(prefix, running_max, zeros):
        if len(prefix) == n:
            if k is None or zeros == k:
                out.append(PartitionSequence(prefix))
            return
        remaining = n - len(prefix) - 1
        if k is None or zeros < k:
            rec(prefix + (0,), running_max, zeros + 1)
        if k is None or zeros + remaining >= k:
            for v in range(1, running_max + 2):
                rec(prefix + (v,), max(running_max, v), zeros)

    rec((), 0, 0)
    return out


def sequence_to_partition(a):
    """Partition of {0,...,n} grouping equal values of a, with a_0 = 0."""
    if not isinstance(a, PartitionSequence):
        a = PartitionSequence(a)
    n = len(a)
    values = (0,) + a.entries
    blocks = {}
    for idx, v in enumerate(values):
        blocks.setdefault(v, []).append(idx)
    return SetPartition(range(n + 1), list(blocks.values()))


def partition_to_sequence(P):
    """Inverse of :func:`sequence_to_partition`.

    Blocks are numbered 0, 1, 2, ... in order of their minimum element
    (block 0 contains 0); entry i is the number of the block containing i.
    """
    ground = P.ground
    n = len(ground) - 1
    if ground != tuple(range(n + 1)):
        raise PartitionError("ground must be {0, ..., n}")
    order = sorted(P.blocks, key=lambda b: b[0])
    number = {}
    for j, b in enumerate(order):
        for x in b:
            number[x] = j
    return PartitionSequence(tuple(number[i] for i in range(1, n + 1)))


class Coupling:
    """A joint partition of two disjoint grounds restricting to each side."""

    __slots__ = ("left", "right", "joint")

    def __init__(self, left, right, joint):
        if set(left.ground) & set(right.ground):
            raise PartitionError("coupled partitions need disjoint grounds")
        if joint.restrict(left.ground) != left or joint.restrict(right.ground) != right:
            raise PartitionError("joint partition does not restrict to the sides")
        self.left = left
        self.right = right
        self.joint = joint

    def __eq__(self, other):
        return isinstance(other, Coupling) and self.joint == other.joint \
            and self.left == other.left and self.right == other.right

    def __hash__(self):
        return hash((self.left, self.right, self.joint))

    def __repr__(self):
        return f"Coupling({self.joint!r})"


def enumerate_couplings(P, Q):
    """All couplings of P and Q, via partial injections block-of-P -> block-of-Q.

    Exponentially cheaper than filtering every partition of the union: a
    coupling is exactly a choice of matched block pairs (merged) plus the
    unmatched blocks kept as they are.
    """
    if not P.ground or not Q.ground:
        raise PartitionError("coupling requires nonempty grounds")
    if set(P.ground) & set(Q.ground):
        raise PartitionError("coupling requires disjoint grounds")
    ground = P.ground + Q.ground
    out = []
    pb, qb = list(P.blocks), list(Q.blocks)
    for k in range(min(len(pb), len(qb)) + 1):
        for chosen_p in itertools.combinations(range(len(pb)), k):
            rest_p = [pb[i] for i in range(len(pb)) if i not in chosen_p]
            for chosen_q in itertools.permutations(range(len(qb)), k):
                merged = [pb[i] + qb[j] for i, j in zip(chosen_p, chosen_q)]
                rest_q = [qb[j] for j in range(len(qb)) if j not in chosen_q]
                joint = SetPartition(ground, merged + rest_p + rest_q)
                out.append(Coupling(P, Q, joint))
    out.sort(key=lambda c: c.joint.blocks)
    return out


def coupling_count(P, Q):
    """Closed form sum_k C(|P|,k) C(|Q|,k) k! for |P union-couple Q|."""
    a, b = len(P), len(Q)
    return sum(comb(a, k) * comb(b, k) * factorial(k) for k in range(min(a, b) + 1))


def psi_map(P, G):
    """Map each block of P to the unique joint block of G containing it."""
    joint = G.joint if isinstance(G, Coupling) else G
    out = {}
    for p in P.blocks:
        hits = [g for g in joint.blocks if set(p) <= set(g)]
        if len(hits) != 1:
            raise PartitionError(f"block {p} not contained in a unique joint block")
        out[p] = hits[0]
    return out


def enumerate_iterated_couplings(parts):
    """All partitions of the union restricting to every P_i.

    Computed by folding pairwise couplings, which matches the associativity
    of the iterated-coupling definition.
    """
    parts = list(parts)
    grounds = [set(p.ground) for p in parts]
    for g1, g2 in itertools.combinations(grounds, 2):
        if g1 & g2:
            raise PartitionError("iterated coupling requires disjoint grounds")
    if not parts:
        return [SetPartition([], [])]
    acc = [parts[0]]
    for nxt in parts[1:]:
        acc = [c.joint for g in acc for c in enumerate_couplings(g, nxt)]
    # dedupe and order canonically
    return sorted(set(acc), key=lambda p: p.blocks)
