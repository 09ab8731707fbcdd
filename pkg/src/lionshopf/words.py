"""Lions words: the coupled shuffle / deconcatenation bialgebra.

A Lions word is a letter sequence together with a tagged subset of its
positions and a partition of the remaining positions.  Shuffling riffles two
words and unions their position structures; deconcatenation splits at every
gap, the two pieces staying coupled through the original partition.  This
mirrors the forest algebra with linear trees: a word embeds as a ladder
whose root carries the last letter.
"""

from __future__ import annotations

import itertools
from collections import Counter

import numpy as np

from .forest import ForestError, LionsForest
from .hopf import outer_aligned
from .pathlift import tree_integral


class WordError(ValueError):
    pass


class LionsWord:
    """Letters over {1,...,d} with a tagged position set and a partition of
    the remaining positions.  Positions are 1-based and always normalized."""

    __slots__ = ("letters", "p0", "blocks")

    def __init__(self, letters, p0, blocks):
        letters = tuple(int(x) for x in letters)
        if any(x < 1 for x in letters):
            raise WordError("letters must be >= 1")
        n = len(letters)
        p0 = frozenset(int(x) for x in p0)
        blocks = tuple(sorted((frozenset(int(x) for x in b) for b in blocks),
                              key=min))
        covered = set(p0)
        for b in blocks:
            if not b:
                raise WordError("empty block")
            if b & covered:
                raise WordError("blocks must be disjoint from each other and p0")
            covered |= b
        if covered != set(range(1, n + 1)):
            raise WordError("p0 and the blocks must partition the positions")
        self.letters = letters
        self.p0 = p0
        self.blocks = blocks

    def __eq__(self, other):
        return (isinstance(other, LionsWord) and self.letters == other.letters
                and self.p0 == other.p0 and self.blocks == other.blocks)

    def __hash__(self):
        return hash((self.letters, self.p0, self.blocks))

    def __len__(self):
        return len(self.letters)

    def __repr__(self):
        return (f"LionsWord({self.letters}, p0={sorted(self.p0)}, "
                f"P={[sorted(b) for b in self.blocks]})")

    @property
    def is_empty(self):
        return not self.letters

    @staticmethod
    def unit():
        return LionsWord((), (), ())

    @staticmethod
    def letter(i, tagged=True):
        if tagged:
            return LionsWord((i,), (1,), ())
        return LionsWord((i,), (), ((1,),))

    def grading(self):
        return (len(self.p0), len(self.letters) - len(self.p0))

    def subword(self, positions):
        """The subsequence on a position subset, renormalized to 1..k,
        with p0 and blocks restricted."""
        positions = sorted(positions)
        renum = {p: i + 1 for i, p in enumerate(positions)}
        letters = tuple(self.letters[p - 1] for p in positions)
        p0 = [renum[p] for p in self.p0 if p in renum]
        blocks = [[renum[p] for p in b if p in renum] for b in self.blocks]
        return LionsWord(letters, p0, [b for b in blocks if b])

    def untagged(self):
        """Move the tagged positions into the partition (empty p0 kept)."""
        if not self.p0:
            return self
        return LionsWord(self.letters, (), self.blocks + (self.p0,))

    def to_json(self):
        return {"letters": list(self.letters), "p0": sorted(self.p0),
                "P": sorted(sorted(b) for b in self.blocks)}

    @staticmethod
    def from_json(payload):
        return LionsWord(payload["letters"], payload.get("p0", []),
                         payload.get("P", []))


class ShuffleTerm:
    """One riffle of two words, remembering where each position went."""

    __slots__ = ("word", "embed1", "embed2")

    def __init__(self, word, embed1, embed2):
        self.word = word
        self.embed1 = embed1
        self.embed2 = embed2


def shuffle_terms(W1, W2):
    """All (m, n)-riffles with the position structures carried along."""
    m, n = len(W1), len(W2)
    out = []
    for spots in itertools.combinations(range(1, m + n + 1), m):
        embed1 = {i + 1: spots[i] for i in range(m)}
        rest = [p for p in range(1, m + n + 1) if p not in spots]
        embed2 = {j + 1: rest[j] for j in range(n)}
        letters = [0] * (m + n)
        for i, p in embed1.items():
            letters[p - 1] = W1.letters[i - 1]
        for j, p in embed2.items():
            letters[p - 1] = W2.letters[j - 1]
        p0 = [embed1[i] for i in W1.p0] + [embed2[j] for j in W2.p0]
        blocks = [[embed1[i] for i in b] for b in W1.blocks] + \
                 [[embed2[j] for j in b] for b in W2.blocks]
        out.append(ShuffleTerm(LionsWord(letters, p0, blocks), embed1, embed2))
    return out


def coupled_shuffle(W1, W2):
    """Formal sum of the riffle shuffles as a word -> coefficient counter."""
    if W1.is_empty:
        return Counter({W2: 1})
    if W2.is_empty:
        return Counter({W1: 1})
    return Counter(term.word for term in shuffle_terms(W1, W2))


def shuffle_sum(counter1, counter2):
    """Shuffle of two formal sums."""
    out = Counter()
    for a, ca in counter1.items():
        for b, cb in counter2.items():
            for w, c in coupled_shuffle(a, b).items():
                out[w] += ca * cb * c
    return out


def deconcat_splits(W):
    """Prefix/suffix position sets of the deconcatenation coproduct,
    including the two trivial terms."""
    n = len(W)
    full = frozenset(range(1, n + 1))
    out = [(frozenset(), full), (full, frozenset())]
    for i in range(1, n):
        out.append((frozenset(range(1, i + 1)), frozenset(range(i + 1, n + 1))))
    return out


def deconcat(W):
    """Coupled pairs (prefix, suffix) with the original partition as the
    coupling; |W| + 1 terms."""
    return [(W.subword(P), W.subword(S), W.blocks)
            for P, S in deconcat_splits(W)]


def check_deconcat_coassociative(W):
    """Both iterated splits produce the same triples of position sets."""
    n = len(W)
    left = Counter()
    right = Counter()
    for P, S in deconcat_splits(W):
        for a, b in _splits_of(sorted(S)):
            left[(P, a, b)] += 1
        for a, b in _splits_of(sorted(P)):
            right[(a, b, S)] += 1
    return left == right


def _splits_of(positions):
    positions = list(positions)
    out = []
    for i in range(len(positions) + 1):
        out.append((frozenset(positions[:i]), frozenset(positions[i:])))
    return out


def check_shuffle_grading(W1, W2):
    k, n = W1.grading()
    k2, n2 = W2.grading()
    return all(w.grading() == (k + k2, n + n2)
               for w in coupled_shuffle(W1, W2))


# -- embedding into forests ------------------------------------------------------


def word_to_ladder(W):
    """The |W|-node chain whose root carries the last letter; position k
    becomes node k-1.  Raises when the transferred hyperedges violate the
    forest admissibility conditions."""
    n = len(W)
    if n == 0:
        return LionsForest.unit()
    parent = {k: (k + 1 if k + 1 < n else None) for k in range(n)}
    label = {k: W.letters[k] for k in range(n)}
    T = LionsForest(range(n), parent, label,
                    [p - 1 for p in W.p0],
                    [[p - 1 for p in b] for b in W.blocks])
    rep = T.validate()
    if not rep.ok:
        raise ForestError(
            f"word does not transfer to a valid forest ({rep.condition}): "
            f"{rep.message}")
    return T


def _ladder_structure(W):
    """The chain as a forest object without admissibility filtering."""
    n = len(W)
    parent = {k: (k + 1 if k + 1 < n else None) for k in range(n)}
    label = {k: W.letters[k] for k in range(n)}
    blocks = [[p - 1 for p in b] for b in W.blocks]
    return LionsForest(range(n), parent, label, [p - 1 for p in W.p0], blocks)


# -- word integrals and characters ------------------------------------------------


class WordAssignment:
    """One path for the tagged slot and one per block of a word."""

    __slots__ = ("tagged", "blocks")

    def __init__(self, tagged, blocks):
        self.tagged = tagged
        self.blocks = tuple(blocks)

    @staticmethod
    def draw(word, sampler, rng):
        return WordAssignment(sampler(rng), [sampler(rng) for _ in word.blocks])


def _position_paths(W, assignment):
    paths = {}
    for b, path in zip(W.blocks, assignment.blocks):
        for p in b:
            paths[p] = path
    for p in W.p0:
        paths[p] = assignment.tagged
    return paths


def word_integral(W, assignment, s, t, max_order=None):
    """Iterated integral of a word; slot k is position k.

    Equals the tree integral of the transferred ladder by construction; the
    recursion is defined for every word, valid ladder or not.
    """
    if W.is_empty:
        return np.asarray(1.0)
    pos_paths = _position_paths(W, assignment)
    T = _ladder_structure(W)
    node_paths = {p - 1: path for p, path in pos_paths.items()}
    return tree_integral(T, node_paths, s, t, max_order)


class WordContext:
    __slots__ = ("pos_paths", "dim", "memo")

    def __init__(self, W, assignment, dim):
        self.pos_paths = _position_paths(W, assignment)
        self.dim = dim
        self.memo = {}


class WordFunctional:
    """Linear functional on the word module, evaluated through position
    routing relative to a top word."""

    def evaluate(self, W, assignment, dim):
        ctx = WordContext(W, assignment, dim)
        return self._eval(ctx, W, frozenset(range(1, len(W) + 1)))

    def _eval(self, ctx, W, positions):
        key = (id(self), positions)
        if key in ctx.memo:
            return ctx.memo[key]
        val = self._eval_raw(ctx, W, positions)
        ctx.memo[key] = val
        return val

    def _eval_raw(self, ctx, W, positions):
        raise NotImplementedError


class WordCounit(WordFunctional):
    def _eval_raw(self, ctx, W, positions):
        if not positions:
            return np.asarray(1.0)
        return np.zeros((ctx.dim,) * len(positions))


word_epsilon = WordCounit()


class WordLift(WordFunctional):
    """Iterated integrals of a time interval on sub-words (kept at their
    original positions so couplings route correctly)."""

    def __init__(self, s, t, max_order=None):
        self.s = float(s)
        self.t = float(t)
        self.max_order = max_order

    def _eval_raw(self, ctx, W, positions):
        if not positions:
            return np.asarray(1.0)
        order = sorted(positions)
        n = len(order)
        parent = {p: (order[i + 1] if i + 1 < n else None)
                  for i, p in enumerate(order)}
        label = {p: W.letters[p - 1] for p in order}
        chain = LionsForest(order, parent, label, order, ())
        node_paths = {p: ctx.pos_paths[p] for p in order}
        return tree_integral(chain, node_paths, self.s, self.t, self.max_order)


def word_lift(s, t, max_order=None):
    return WordLift(s, t, max_order)


class WordConvolve(WordFunctional):
    """Deconcatenation convolution with coupling-respecting routing."""

    def __init__(self, f, g):
        self.f = f
        self.g = g

    def _eval_raw(self, ctx, W, positions):
        if not positions:
            return np.asarray(
                self.f._eval(ctx, W, positions) * self.g._eval(ctx, W, positions))
        order = sorted(positions)
        total = np.zeros((ctx.dim,) * len(order))
        for i in range(len(order) + 1):
            P = frozenset(order[:i])
            S = frozenset(order[i:])
            fote = self.f._eval(ctx, W, P)
            gote = self.g._eval(ctx, W, S)
            total = total + outer_aligned(sorted(P), fote, sorted(S), gote)
        return total


def word_convolve(f, g):
    return WordConvolve(f, g)


class WordAntipode(WordFunctional):
    """Convolution inverse by recursion over proper prefix splits; a single
    letter is negated."""

    def __init__(self, f):
        self.f = f

    def _eval_raw(self, ctx, W, positions):
        if not positions:
            return np.asarray(1.0)
        order = sorted(positions)
        val = -np.asarray(self.f._eval(ctx, W, positions))
        for i in range(1, len(order)):
            P = frozenset(order[:i])
            S = frozenset(order[i:])
            a = self._eval(ctx, W, P)
            b = self.f._eval(ctx, W, S)
            val = val - outer_aligned(sorted(P), a, sorted(S), b)
        return val


def word_antipode(f):
    return WordAntipode(f)
