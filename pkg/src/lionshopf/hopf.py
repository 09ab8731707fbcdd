"""The coupled bialgebra: coproduct, antipodes, characters and convolution.

The coproduct of a tree is the sum of its admissible-cut splittings plus the
two trivial terms; every term carries the tree's own hyperedge partition as
the coupling between the two sides.  Working with concrete node subsets of a
fixed forest therefore makes all algebraic identities exact set-level
statements; canonicalization only enters when terms are collapsed to
isomorphism classes (the counting function and exported tables).

Characters are evaluator-backed linear functionals: evaluating on a forest
routes one sample per hyperedge (plus the tagged sample) into the nodes of
that hyperedge; convolution re-routes the samples of a splitting through the
shared coupling, which is automatic here because sub-forests keep their
node ids.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .forest import (
    LionsForest,
    canonical_key,
    expectation,
    e_a,
    grading,
    _candidate_colorings,
    _coded,
)


class HopfError(ValueError):
    pass


# -- concrete coproduct on node subsets --------------------------------------


def _components_of(T, S):
    """Component node-sets of the restriction of T to S."""
    S = frozenset(S)
    kids = {x: [] for x in S}
    roots = []
    for x in S:
        p = T.parent[x]
        if p is not None and p in S:
            kids[p].append(x)
        else:
            roots.append(x)
    comps = []
    for r in roots:
        stack, seen = [r], []
        while stack:
            x = stack.pop()
            seen.append(x)
            stack.extend(kids[x])
        comps.append(frozenset(seen))
    return comps


def _cut_prunes(T, comp):
    """Prune node-sets of all admissible cuts of one tree component.

    A cut is a nonempty antichain of edges (at most one per root path); the
    prune collects everything separated from the component root.
    """
    comp = frozenset(comp)
    ancestors = {}
    for x in comp:
        acc = set()
        p = T.parent[x]
        while p is not None and p in comp:
            acc.add(p)
            p = T.parent[p]
        ancestors[x] = frozenset(acc)
    cuttable = sorted(x for x in comp if T.parent[x] is not None
                      and T.parent[x] in comp)
    descendants = {x: [] for x in comp}
    for x in comp:
        for a in ancestors[x]:
            descendants[a].append(x)
    out = []
    for r in range(1, len(cuttable) + 1):
        for combo in itertools.combinations(cuttable, r):
            chosen = set(combo)
            if any(ancestors[x] & chosen for x in combo):
                continue
            prune = set(combo)
            for x in combo:
                prune.update(descendants[x])
            out.append(frozenset(prune))
    return out


def coproduct_pairs(T, S=None, _cache=None):
    """Concrete coproduct terms of the restriction of T to S.

    Returns a list of (prune_nodes, root_nodes) pairs, including the two
    trivial splittings; the implicit coupling of every pair is the original
    hyperedge partition of T.  Forests multiply out componentwise (the
    twisted product rule).
    """
    if S is None:
        if T._cop is not None:
            return T._cop
        S = frozenset(T.nodes)
        if not S:
            out = [(frozenset(), frozenset())]
            object.__setattr__(T, "_cop", out)
            return out
        out = coproduct_pairs(T, S, _cache)
        object.__setattr__(T, "_cop", out)
        return out
    S = frozenset(S)
    if not S:
        return [(frozenset(), frozenset())]
    comps = _components_of(T, S)
    per_comp = []
    for comp in comps:
        if _cache is not None and comp in _cache:
            choices = _cache[comp]
        else:
            choices = [(frozenset(), comp), (comp, frozenset())]
            choices += [(p, comp - p) for p in _cut_prunes(T, comp)]
            if _cache is not None:
                _cache[comp] = choices
        per_comp.append(choices)
    out = []
    for combo in itertools.product(*per_comp):
        P = frozenset().union(*(c[0] for c in combo))
        R = frozenset().union(*(c[1] for c in combo))
        out.append((P, R))
    return out


def reduced_pairs(T, S=None, _cache=None):
    """Coproduct terms with both sides nonempty."""
    return [(P, R) for P, R in coproduct_pairs(T, S, _cache) if P and R]


def reduced_coproduct(T):
    """The coproduct with the two trivial terms removed."""
    return reduced_pairs(T)


def iterated_reduced(T, p):
    """p-fold reduced coproduct: tuples of p+1 disjoint nonempty node sets.

    Conilpotency: the result is empty as soon as p+1 exceeds the node count.
    """
    if p < 1:
        raise HopfError("iterated reduced coproduct needs p >= 1")
    cache = {}
    rcache = {}

    def red(S):
        got = rcache.get(S)
        if got is None:
            got = [(P, R) for P, R in coproduct_pairs(T, S, cache) if P and R]
            rcache[S] = got
        return got

    tuples = [tuple(pr) for pr in red(frozenset(T.nodes))]
    for _ in range(p - 1):
        nxt = []
        for tup in tuples:
            for P, R in red(tup[-1]):
                nxt.append(tup[:-1] + (P, R))
        tuples = nxt
        if not tuples:
            break
    return tuples


def check_coassociativity(T):
    """(I x Delta) Delta = (Delta x I) Delta as multisets of concrete triples."""
    cache = {}
    pairs = coproduct_pairs(T, None, cache)
    left = Counter()
    for P, R in pairs:
        for R1, R2 in coproduct_pairs(T, R, cache):
            left[(P, R1, R2)] += 1
    right = Counter()
    for P, R in pairs:
        for P1, P2 in coproduct_pairs(T, P, cache):
            right[(P1, P2, R)] += 1
    return left == right


def check_counit(T):
    """Both counit contractions give back the identity."""
    pairs = coproduct_pairs(T)
    left = Counter(R for P, R in pairs if not P)
    right = Counter(P for P, R in pairs if not R)
    full = frozenset(T.nodes)
    return left == Counter({full: 1}) == right


def check_product_rule(T1, T2):
    """Delta(T1 * T2) equals the twisted product of the two coproducts."""
    from .forest import product

    T = product(T1, T2)
    offset = (max(T1.nodes) + 1 - min(T2.nodes)) if T1.nodes and T2.nodes else 0
    direct = Counter(coproduct_pairs(T))
    combined = Counter()
    for P1, R1 in coproduct_pairs(T1):
        for P2, R2 in coproduct_pairs(T2):
            P = P1 | frozenset(x + offset for x in P2)
            R = R1 | frozenset(x + offset for x in R2)
            combined[(P, R)] += 1
    return direct == combined


def check_grading_additivity(T):
    k, n = grading(T)
    for P, R in coproduct_pairs(T):
        kp = len(P & T.h0)
        kr = len(R & T.h0)
        np_ = len(P) - kp
        nr = len(R) - kr
        if (kp + kr, np_ + nr) != (k, n):
            return False
    return True


def check_conilpotent(T):
    """The (k+n)-fold reduced coproduct of a (k, n)-graded forest vanishes."""
    if T.is_empty:
        return True
    return iterated_reduced(T, len(T.nodes)) == []


def check_expectation_morphism(T):
    """Delta(E T) = (E x E) Delta(T) as coupled-pair multisets.

    Untagging commutes with cutting, so the node-subset terms must agree and
    each restricted sub-forest of E(T) must equal the untagged restriction of
    the corresponding sub-forest of T; the couplings then match because both
    carry the full hyperedge family of E(T).
    """
    ET = expectation(T)
    if Counter(coproduct_pairs(ET)) != Counter(coproduct_pairs(T)):
        return False
    for P, R in coproduct_pairs(T):
        if ET.restrict(P) != expectation(T.restrict(P)):
            return False
        if ET.restrict(R) != expectation(T.restrict(R)):
            return False
    return True


# -- canonical coupled pairs ---------------------------------------------------


@dataclass(frozen=True)
class CoupledPair:
    """A splitting (left, right) with the block-level coupling between their
    hyperedge partitions, canonicalized jointly."""
    left: LionsForest
    right: LionsForest
    coupling: tuple  # blocks of pairs (side, block index)
    key: bytes


def _pair_code(A, B, coupling_blocks):
    """Minimal joint encoding over hyperedge renamings of both sides.

    coupling_blocks: iterable of sets of (side, block_index) tags referring
    to A.hyperedges / B.hyperedges positions.
    """
    best = None
    for order_a, color_a in _candidate_colorings(A):
        code_a, _ = _coded(A, color_a)
        pos_a = {A.hyperedges.index(b): i for i, b in enumerate(order_a, start=1)}
        for order_b, color_b in _candidate_colorings(B):
            code_b, _ = _coded(B, color_b)
            pos_b = {B.hyperedges.index(b): i
                     for i, b in enumerate(order_b, start=1)}
            blocks = []
            for blk in coupling_blocks:
                tagged = tuple(sorted(
                    (side, (pos_a if side == 0 else pos_b)[idx])
                    for side, idx in blk))
                blocks.append(tagged)
            code = (code_a, code_b, tuple(sorted(blocks)))
            if best is None or code < best:
                best = code
    return best


def coupled_pair_from_split(T, P, R):
    """Canonical coupled pair of a concrete splitting of T."""
    A = T.restrict(P)
    B = T.restrict(R)
    blocks = []
    for h in T.hyperedges:
        entry = []
        hp, hr = h & P, h & R
        if hp:
            entry.append((0, A.hyperedges.index(hp)))
        if hr:
            entry.append((1, B.hyperedges.index(hr)))
        if entry:
            blocks.append(tuple(entry))
    code = _pair_code(A, B, blocks)
    key = repr(code).encode()
    return CoupledPair(A, B, tuple(sorted(blocks)), key)


class CoproductResult:
    """Coproduct of one forest collapsed to canonical coupled-pair classes."""

    def __init__(self, T):
        self.forest = T
        self.term_count = 0
        self.pairs = {}
        self.multiplicity = Counter()
        self.collapsed = Counter()  # (left key, right key) -> multiplicity
        for P, R in coproduct_pairs(T):
            cp = coupled_pair_from_split(T, P, R)
            self.term_count += 1
            self.pairs.setdefault(cp.key, cp)
            self.multiplicity[cp.key] += 1
            self.collapsed[(canonical_key(cp.left), canonical_key(cp.right))] += 1

    def items(self):
        for key, mult in sorted(self.multiplicity.items()):
            yield self.pairs[key], mult


def coproduct(T):
    return CoproductResult(T)


def counting(T, T1, T2):
    """Multiplicity of the class pair (T1, T2) in the coproduct of T,
    couplings collapsed."""
    want = (canonical_key(T1), canonical_key(T2))
    total = 0
    for P, R in coproduct_pairs(T):
        got = (canonical_key(T.restrict(P)), canonical_key(T.restrict(R)))
        if got == want:
            total += 1
    return total


class CoproductTable:
    """Collapsed coproduct data for a fixed list of canonical forests."""

    def __init__(self, forests):
        self.forests = {canonical_key(T): T for T in forests}
        self.collapsed = {}
        for key, T in self.forests.items():
            if T.is_empty:
                unit_key = canonical_key(LionsForest.unit())
                self.collapsed[key] = Counter({(unit_key, unit_key): 1})
            else:
                self.collapsed[key] = CoproductResult(T).collapsed

    def counting(self, key, key1, key2):
        return self.collapsed.get(key, Counter()).get((key1, key2), 0)

    def rows(self):
        for key in sorted(self.collapsed):
            for (k1, k2), mult in sorted(self.collapsed[key].items()):
                yield key, k1, k2, mult

    def export_json(self):
        """Rows (T-key, left-key, right-key, coupling blocks, multiplicity),
        hex keys; coupling blocks tag (side, hyperedge position)."""
        out = []
        for key in sorted(self.forests):
            T = self.forests[key]
            if T.is_empty:
                continue
            for cp, mult in CoproductResult(T).items():
                out.append({
                    "forest": key.hex(),
                    "left": canonical_key(cp.left).hex(),
                    "right": canonical_key(cp.right).hex(),
                    "coupling": [[list(tag) for tag in block]
                                 for block in cp.coupling],
                    "multiplicity": mult,
                })
        return out


# -- structural antipode -------------------------------------------------------


def antipode_terms(T, side="left"):
    """Formal antipode expansion on the forest basis.

    Each term is a partition of the node set into disjoint nonempty pieces
    (the forests whose character values get multiplied); the coefficient of
    a term with k pieces is (-1)^k.  The left and right Bogoliubov
    recursions must produce identical expansions.
    """
    if side not in ("left", "right"):
        raise HopfError("side must be 'left' or 'right'")
    cache = {}
    cuts_cache = {}

    def on_forest(S):
        S = frozenset(S)
        if S in cache:
            return cache[S]
        comps = _components_of(T, S)
        if len(comps) == 1:
            out = on_tree(comps[0])
        else:
            out = Counter({frozenset(): 1})
            for comp in comps:
                nxt = Counter()
                for parts1, c1 in out.items():
                    for parts2, c2 in on_tree(comp).items():
                        nxt[parts1 | parts2] += c1 * c2
                out = nxt
        cache[S] = out
        return out

    def on_tree(comp):
        out = Counter({frozenset({comp}): -1})
        if comp not in cuts_cache:
            cuts_cache[comp] = _cut_prunes(T, comp)
        for prune in cuts_cache[comp]:
            rest = comp - prune
            if side == "left":
                rec, plain = on_forest(prune), rest
            else:
                rec, plain = on_forest(rest), prune
            # character values multiply over components, so a plain factor
            # normalizes to its component trees
            plain_parts = frozenset(_components_of(T, plain))
            for parts, c in rec.items():
                out[parts | plain_parts] -= c
        return out

    if T.is_empty:
        return Counter({frozenset(): 1})
    return on_forest(frozenset(T.nodes))


def check_antipode_left_right(T):
    return antipode_terms(T, "left") == antipode_terms(T, "right")


# -- evaluator-backed dual elements -------------------------------------------


class SampleAssignment:
    """One sample path for the tagged slot and one per hyperedge of a forest."""

    __slots__ = ("tagged", "blocks")

    def __init__(self, tagged, blocks):
        self.tagged = tagged
        self.blocks = tuple(blocks)

    @staticmethod
    def draw(forest, sampler, rng):
        return SampleAssignment(sampler(rng),
                                [sampler(rng) for _ in forest.hyperedges])


class EvalContext:
    """Node-level sample routing for one top-level evaluation.

    Every node is mapped to the sample of its hyperedge (tagged nodes to the
    tagged sample); restrictions inherit the map, which realizes the
    coupling-respecting routing of convolution automatically.
    """

    __slots__ = ("node_paths", "tagged", "dim", "memo", "_restrictions")

    def __init__(self, forest, assignment, dim):
        if len(assignment.blocks) != len(forest.hyperedges):
            raise HopfError("assignment does not match the hyperedges")
        node_paths = {}
        for block, path in zip(forest.hyperedges, assignment.blocks):
            for x in block:
                node_paths[x] = path
        for x in forest.h0:
            node_paths[x] = assignment.tagged
        self.node_paths = node_paths
        self.tagged = assignment.tagged
        self.dim = dim
        self.memo = {}
        self._restrictions = {frozenset(forest.nodes): forest}

    def path_of(self, forest, node):
        if node in forest.h0:
            return self.tagged
        return self.node_paths[node]

    def restrict(self, forest, subset):
        """Cached sub-forest lookup; within one context every restriction of
        a sub-forest equals the restriction of the top forest."""
        subset = frozenset(subset)
        got = self._restrictions.get(subset)
        if got is None:
            got = forest.restrict(subset)
            self._restrictions[subset] = got
        return got


def outer_aligned(nodes_a, A, nodes_b, B):
    """Tensor product of two values with slots re-sorted by node id."""
    nodes_a, nodes_b = sorted(nodes_a), sorted(nodes_b)
    out = np.multiply.outer(np.asarray(A), np.asarray(B))
    order = nodes_a + nodes_b
    perm = sorted(range(len(order)), key=lambda i: order[i])
    if len(perm) <= 1:
        return out
    return np.transpose(out, perm)


class DualElement:
    """A linear functional on the span of Lions forests, given by evaluators."""

    def evaluate(self, forest, assignment, dim=None):
        if dim is None:
            dim = getattr(assignment.tagged, "dim", None)
            if dim is None:
                raise HopfError("tensor dimension could not be inferred")
        ctx = EvalContext(forest, assignment, dim)
        return self._eval(ctx, forest)

    def _eval(self, ctx, forest):
        key = (id(self), frozenset(forest.nodes))
        if key in ctx.memo:
            return ctx.memo[key]
        val = self._eval_raw(ctx, forest)
        ctx.memo[key] = val
        return val

    def _eval_raw(self, ctx, forest):
        raise NotImplementedError


class Counit(DualElement):
    def _eval_raw(self, ctx, forest):
        if forest.is_empty:
            return np.asarray(1.0)
        return np.zeros((ctx.dim,) * len(forest.nodes))


epsilon = Counit()


class Character(DualElement):
    """Multiplicative functional: forests evaluate as products of components."""

    def _eval_raw(self, ctx, forest):
        if forest.is_empty:
            return np.asarray(1.0)
        comps = _components_of(T=forest, S=forest.nodes)
        if len(comps) == 1:
            return self._eval_tree(ctx, forest)
        val = np.asarray(1.0)
        done = []
        for comp in comps:
            piece = self._eval(ctx, ctx.restrict(forest, comp))
            val = outer_aligned(done, val, sorted(comp), piece)
            done = sorted(done + sorted(comp))
        return val

    def _eval_tree(self, ctx, tree):
        raise NotImplementedError


class Convolve(DualElement):
    """f * g: expand the coproduct and route samples through the coupling."""

    def __init__(self, f, g):
        self.f = f
        self.g = g

    def _eval_raw(self, ctx, forest):
        if forest.is_empty:
            fv = self.f._eval(ctx, forest)
            gv = self.g._eval(ctx, forest)
            return np.asarray(fv * gv)
        total = np.zeros((ctx.dim,) * len(forest.nodes))
        for P, R in coproduct_pairs(forest):
            fv = self.f._eval(ctx, ctx.restrict(forest, P))
            gv = self.g._eval(ctx, ctx.restrict(forest, R))
            total = total + outer_aligned(sorted(P), fv, sorted(R), gv)
        return total


def convolve(f, g):
    return Convolve(f, g)


def convolve_many(elements):
    out = None
    for e in elements:
        out = e if out is None else Convolve(out, e)
    return out if out is not None else epsilon


class LinearCombination(DualElement):
    def __init__(self, terms):
        self.terms = tuple(terms)  # (coefficient, element)

    def _eval_raw(self, ctx, forest):
        vals = [c * e._eval(ctx, forest) for c, e in self.terms]
        out = vals[0]
        for v in vals[1:]:
            out = out + v
        return np.asarray(out)


class BogoliubovAntipode(Character):
    """Convolution inverse by the cut recursion, extended multiplicatively."""

    def __init__(self, f, side="left"):
        if side not in ("left", "right"):
            raise HopfError("side must be 'left' or 'right'")
        self.f = f
        self.side = side

    def _eval_tree(self, ctx, tree):
        val = -np.asarray(self.f._eval(ctx, tree))
        comp = frozenset(tree.nodes)
        for prune in _cut_prunes(tree, comp):
            rest = comp - prune
        # note: _cut_prunes works on the tree's own parent map
            if self.side == "left":
                a = self._eval(ctx, ctx.restrict(tree, prune))
                b = self.f._eval(ctx, ctx.restrict(tree, rest))
            else:
                a = self.f._eval(ctx, ctx.restrict(tree, prune))
                b = self._eval(ctx, ctx.restrict(tree, rest))
            val = val - outer_aligned(sorted(prune), a, sorted(rest), b)
        return val


def antipode_bogoliubov(f, side="left"):
    return BogoliubovAntipode(f, side)


class GeometricAntipode(DualElement):
    """epsilon + sum of convolution powers of (epsilon - f); the series
    terminates by conilpotency after as many steps as there are nodes."""

    def __init__(self, f):
        self.f = f
        self.u = LinearCombination([(1.0, epsilon), (-1.0, f)])
        self._powers = [self.u]

    def _eval_raw(self, ctx, forest):
        if forest.is_empty:
            return np.asarray(1.0)
        n = len(forest.nodes)
        while len(self._powers) < n:
            self._powers.append(Convolve(self._powers[-1], self.u))
        total = np.zeros((ctx.dim,) * n)
        for i in range(n):
            total = total + self._powers[i]._eval(ctx, forest)
        return total


def antipode_geometric(f):
    return GeometricAntipode(f)


class ExpStar(DualElement):
    """exp of a functional vanishing on the unit; terminating series."""

    def __init__(self, xi):
        self.xi = xi
        self._powers = [xi]

    def _eval_raw(self, ctx, forest):
        if forest.is_empty:
            return np.asarray(1.0)
        n = len(forest.nodes)
        while len(self._powers) < n:
            self._powers.append(Convolve(self._powers[-1], self.xi))
        total = np.zeros((ctx.dim,) * n)
        for i in range(n):
            total = total + self._powers[i]._eval(ctx, forest) / math.factorial(i + 1)
        return total


class LogStar(DualElement):
    """log of a character; terminating alternating series."""

    def __init__(self, f):
        self.f = f
        self.u = LinearCombination([(1.0, f), (-1.0, epsilon)])
        self._powers = [self.u]

    def _eval_raw(self, ctx, forest):
        if forest.is_empty:
            return np.asarray(0.0)
        n = len(forest.nodes)
        while len(self._powers) < n:
            self._powers.append(Convolve(self._powers[-1], self.u))
        total = np.zeros((ctx.dim,) * n)
        for i in range(n):
            total = total + ((-1) ** i) * self._powers[i]._eval(ctx, forest) / (i + 1)
        return total


def exp_star(xi):
    return ExpStar(xi)


def log_star(f):
    return LogStar(f)


class Dilation(DualElement):
    """Scale a graded functional by eps^(node count)."""

    def __init__(self, f, eps):
        self.f = f
        self.eps = float(eps)

    def _eval_raw(self, ctx, forest):
        return (self.eps ** len(forest.nodes)) * np.asarray(
            self.f._eval(ctx, forest))


def dilate_derivation(xi, eps):
    return Dilation(xi, eps)


def dilate(f, eps):
    """Group dilation of a character: exp of the scaled logarithm."""
    return ExpStar(Dilation(LogStar(f), eps))


# -- McKean-Vlasov checks -------------------------------------------------------


def assignment_for(forest, block_paths, tagged):
    """Assignment from a mapping hyperedge-frozenset -> path."""
    return SampleAssignment(tagged, [block_paths[b] for b in forest.hyperedges])


def mkv_check(f, forests, sampler, dim, trials=5, rng=None, atol=0.0):
    """Tag-independence: evaluating T must agree with evaluating E(T) when
    the old tagged sample is moved into the fresh hyperedge slot, whatever
    sample fills the now-empty tagged slot.  Reports the max deviation."""
    rng = np.random.default_rng(rng)
    worst = 0.0
    worst_case = None
    for T in forests:
        if not T.h0 or T.is_empty:
            continue
        ET = expectation(T)
        for _ in range(trials):
            tagged = sampler(rng)
            blocks = {b: sampler(rng) for b in T.hyperedges}
            base = f.evaluate(T, assignment_for(T, blocks, tagged), dim)
            blocks_e = dict(blocks)
            blocks_e[T.h0] = tagged
            fresh = sampler(rng)
            other = f.evaluate(ET, assignment_for(ET, blocks_e, fresh), dim)
            dev = float(np.max(np.abs(np.asarray(base) - np.asarray(other))))
            if dev > worst:
                worst, worst_case = dev, canonical_key(T)
    return {"max_deviation": worst, "worst_forest": worst_case,
            "ok": worst <= atol}


def ghost_slots(a, forests):
    """Indices j >= 1 of value groups whose tagged parts are all empty."""
    entries = tuple(a.entries) if hasattr(a, "entries") else tuple(a)
    m = max(entries) if entries else 0
    out = []
    for j in range(1, m + 1):
        members = [forests[i] for i in range(len(entries)) if entries[i] == j]
        if members and not any(F.h0 for F in members):
            out.append(j)
    return out


def _contract(a, b):
    return float(np.sum(np.asarray(a) * np.asarray(b)))


def fubini_e_a(f, X, a, forests, g, sampler, dim, samples=2000, rng=None):
    """Monte-Carlo check of the grouped-expectation exchange identity.

    Left side: the groups' tagged slots are shared through the sequence a
    and each forest keeps private hyperedge samples.  Right side: the same
    functional evaluated on the grouped forest, with ghost slots (groups
    whose tagged parts vanish) integrated alongside.  Returns both
    estimates with standard errors.
    """
    rng = np.random.default_rng(rng)
    entries = tuple(a.entries) if hasattr(a, "entries") else tuple(a)
    if len(entries) != len(forests):
        raise HopfError("sequence length must match the number of forests")
    m = max(entries) if entries else 0
    T = e_a(entries, forests)
    omega0 = sampler(rng)

    # node-id offsets used by e_a (concatenation order)
    offsets = []
    off = 0
    for F in forests:
        offsets.append(off)
        off += (max(F.nodes) - min(F.nodes) + 1) if F.nodes else 0

    lhs = np.empty(samples)
    rhs = np.empty(samples)
    for it in range(samples):
        group_paths = {0: omega0}
        for j in range(1, m + 1):
            group_paths[j] = sampler(rng)
        # left side
        prod = 1.0
        for F, a_i in zip(forests, entries):
            blocks = {b: sampler(rng) for b in F.hyperedges}
            asg = assignment_for(F, blocks, group_paths[a_i])
            prod *= _contract(X.evaluate(F, asg, dim), f.evaluate(F, asg, dim))
        lhs[it] = g(*[group_paths[j] for j in range(m + 1)]) * prod

        # right side: fresh draws, grouped forest
        rgroup = {0: omega0}
        for j in range(1, m + 1):
            rgroup[j] = sampler(rng)
        per_forest_blocks = []
        for F, off_i in zip(forests, offsets):
            blocks = {frozenset(x + off_i for x in b): sampler(rng)
                      for b in F.hyperedges}
            per_forest_blocks.append(blocks)
        block_paths = {}
        for blocks in per_forest_blocks:
            block_paths.update(blocks)
        for j in range(1, m + 1):
            merged = frozenset().union(
                *(frozenset(x + offsets[i] for x in forests[i].h0)
                  for i in range(len(forests)) if entries[i] == j)) \
                if any(entries[i] == j for i in range(len(forests))) \
                else frozenset()
            if merged:
                block_paths[merged] = rgroup[j]
        f_val = f.evaluate(T, assignment_for(T, block_paths, rgroup[0]), dim)
        xs = None
        done = []
        for i, (F, off_i) in enumerate(zip(forests, offsets)):
            shifted = F.relabelled({x: x - min(F.nodes) + off_i for x in F.nodes}) \
                if F.nodes else F
            blocks = per_forest_blocks[i]
            asg = assignment_for(shifted, blocks, rgroup[entries[i]])
            val = X.evaluate(shifted, asg, dim)
            if xs is None:
                xs, done = np.asarray(val), sorted(shifted.nodes)
            else:
                xs = outer_aligned(done, xs, sorted(shifted.nodes), val)
                done = sorted(done + sorted(shifted.nodes))
        rhs[it] = g(*[rgroup[j] for j in range(m + 1)]) * _contract(xs, f_val)

    def stats(v):
        return float(np.mean(v)), float(np.std(v, ddof=1) / math.sqrt(len(v)))

    lm, ls = stats(lhs)
    rm, rs = stats(rhs)
    gap = abs(lm - rm)
    sigma = math.hypot(ls, rs)
    return {
        "left": lm, "left_stderr": ls,
        "right": rm, "right_stderr": rs,
        "gap": gap, "gap_sigma": sigma,
        "ghost_slots": ghost_slots(entries, forests),
        "ok": gap <= 3.0 * max(sigma, 1e-300),
    }
