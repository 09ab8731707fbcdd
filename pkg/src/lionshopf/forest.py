"""Labelled rooted forests carrying a tagged hyperedge and a hyperedge partition.

A forest here is (N, E, h0, H, L): a rooted forest on node set N with edges
pointing toward the roots, a distinguished (possibly empty) node subset h0,
a partition H of the remaining nodes, and node labels L in {1, ..., d}.
Hyperedges group the nodes that carry the same particle; h0 carries the
tagged particle.  Admissibility of (h0, H) is what `validate` checks:

  (2.1) a nonempty h0 contains a root;
  (2.2) inside one hyperedge, any node strictly deeper than another member
        has its parent in the hyperedge;
  (2.3) inside one hyperedge, two equal-depth members with distinct parents
        have both parents in the hyperedge.

Everything in the algebra is generated from single tagged nodes by three
operations: disjoint product (merging the tagged hyperedges), `expectation`
(untagging h0 into H) and `graft` (a new tagged root below everything).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from math import floor

from .partitions import PartitionError, SetPartition


class ForestError(ValueError):
    pass


@dataclass(frozen=True)
class ValidityReport:
    ok: bool
    condition: str = ""
    message: str = ""


class LionsForest:
    """Immutable rooted labelled forest with a tagged hyperedge structure.

    Node ids are arbitrary ints (restrictions keep the original ids).
    `hyperedges` is kept sorted by minimum element; h0 is a frozenset.
    """

    __slots__ = ("nodes", "parent", "label", "h0", "hyperedges", "_key", "_hash",
                 "_cop", "_kids")

    def __init__(self, nodes, parent, label, h0, hyperedges):
        nodes = tuple(sorted(nodes))
        node_set = set(nodes)
        if len(node_set) != len(nodes):
            raise ForestError("duplicate node ids")
        parent = {int(k): (None if v is None else int(v)) for k, v in parent.items()}
        label = {int(k): int(v) for k, v in label.items()}
        if set(parent) != node_set or set(label) != node_set:
            raise ForestError("parent/label maps must cover the node set exactly")
        for x, p in parent.items():
            if p is not None and p not in node_set:
                raise ForestError(f"parent of {x} outside the node set")
        h0 = frozenset(int(x) for x in h0)
        if not h0 <= node_set:
            raise ForestError("h0 must be a subset of the nodes")
        blocks = tuple(sorted((frozenset(int(x) for x in b) for b in hyperedges),
                              key=lambda b: min(b)))
        covered = set()
        for b in blocks:
            if not b:
                raise ForestError("empty hyperedge")
            if b & covered or b & h0:
                raise ForestError("hyperedges must partition the nodes outside h0")
            covered |= b
        if covered | h0 != node_set:
            raise ForestError("hyperedges must partition the nodes outside h0")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "parent", parent)
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "h0", h0)
        object.__setattr__(self, "hyperedges", blocks)
        object.__setattr__(self, "_key", None)
        object.__setattr__(self, "_hash", None)
        object.__setattr__(self, "_cop", None)
        object.__setattr__(self, "_kids", None)

    def __setattr__(self, name, value):
        raise AttributeError("LionsForest is immutable")

    # -- basic structure -------------------------------------------------

    @staticmethod
    def unit():
        return LionsForest((), {}, {}, (), ())

    @staticmethod
    def single(i, tagged=True, node=0):
        """One node labelled i, either in h0 or in its own hyperedge."""
        if tagged:
            return LionsForest((node,), {node: None}, {node: i}, (node,), ())
        return LionsForest((node,), {node: None}, {node: i}, (), ((node,),))

    def __len__(self):
        return len(self.nodes)

    @property
    def is_empty(self):
        return not self.nodes

    def __eq__(self, other):
        return (
            isinstance(other, LionsForest)
            and self.nodes == other.nodes
            and self.parent == other.parent
            and self.label == other.label
            and self.h0 == other.h0
            and self.hyperedges == other.hyperedges
        )

    def __hash__(self):
        if self._hash is None:
            h = hash((self.nodes, tuple(sorted(self.parent.items(),
                                               key=lambda kv: kv[0])),
                      tuple(sorted(self.label.items())), self.h0, self.hyperedges))
            object.__setattr__(self, "_hash", h)
        return self._hash

    def __repr__(self):
        return (f"LionsForest(n={len(self.nodes)}, h0={sorted(self.h0)}, "
                f"H={[sorted(b) for b in self.hyperedges]})")

    def roots(self):
        return [x for x in self.nodes if self.parent[x] is None]

    def children(self):
        if self._kids is None:
            ch = {x: [] for x in self.nodes}
            for x, p in self.parent.items():
                if p is not None:
                    ch[p].append(x)
            object.__setattr__(self, "_kids", ch)
        return self._kids

    def depths(self):
        """Distance to the root of the own component, or None on a cycle."""
        depth = {}

        def walk(x, trail):
            if x in depth:
                return depth[x]
            if x in trail:
                return None
            trail.add(x)
            p = self.parent[x]
            if p is None:
                depth[x] = 0
            else:
                dp = walk(p, trail)
                if dp is None:
                    return None
                depth[x] = dp + 1
            return depth[x]

        for x in self.nodes:
            if walk(x, set()) is None:
                return None
        return depth

    def components(self):
        """Node sets of the connected components, each a rooted tree."""
        ch = self.children()
        comps = []
        for r in self.roots():
            stack, seen = [r], []
            while stack:
                x = stack.pop()
                seen.append(x)
                stack.extend(ch[x])
            comps.append(frozenset(seen))
        return comps

    @property
    def is_tree(self):
        return len(self.roots()) == 1 and self.validate().ok

    def hyperedge_family(self):
        """H' = {h0} union H without the empty set, h0 first when present."""
        out = []
        if self.h0:
            out.append(self.h0)
        out.extend(self.hyperedges)
        return out

    # -- admissibility ----------------------------------------------------

    def validate(self):
        depth = self.depths()
        if depth is None:
            return ValidityReport(False, "forest-shape", "parent relation has a cycle")
        if any(not 1 <= v for v in self.label.values()):
            return ValidityReport(False, "forest-shape", "labels must be >= 1")
        if self.h0 and not any(self.parent[x] is None for x in self.h0):
            return ValidityReport(False, "2.1", "h0 does not contain a root")
        for h in self.hyperedge_family():
            dmin = min(depth[x] for x in h)
            for y in h:
                if depth[y] > dmin and self.parent[y] not in h:
                    return ValidityReport(
                        False, "2.2",
                        f"node {y} is deeper than other members of its "
                        f"hyperedge but its parent is outside")
            by_depth = {}
            for y in h:
                by_depth.setdefault(depth[y], []).append(y)
            for members in by_depth.values():
                parents = {self.parent[y] for y in members
                           if self.parent[y] is not None}
                if len(parents) >= 2 and not parents <= h:
                    return ValidityReport(
                        False, "2.3",
                        "equal-depth members have distinct parents outside "
                        "the hyperedge")
        return ValidityReport(True)

    # -- restriction ------------------------------------------------------

    def restrict(self, subset):
        """Sub-forest on `subset`: parents falling outside become roots,
        h0 and hyperedges are intersected (empty traces dropped)."""
        subset = frozenset(subset)
        if not subset <= set(self.nodes):
            raise ForestError("restriction outside the node set")
        parent = {x: (self.parent[x] if self.parent[x] in subset else None)
                  for x in subset}
        label = {x: self.label[x] for x in subset}
        blocks = [b & subset for b in self.hyperedges]
        return LionsForest(subset, parent, label, self.h0 & subset,
                           [b for b in blocks if b])

    def relabelled(self, node_map):
        """Apply an injective node-id relabelling."""
        return LionsForest(
            [node_map[x] for x in self.nodes],
            {node_map[x]: (None if p is None else node_map[p])
             for x, p in self.parent.items()},
            {node_map[x]: l for x, l in self.label.items()},
            [node_map[x] for x in self.h0],
            [[node_map[x] for x in b] for b in self.hyperedges],
        )

    def shifted(self, offset):
        return self.relabelled({x: x + offset for x in self.nodes})


# -- generators ------------------------------------------------------------


def product(T1, T2):
    """Disjoint union merging the tagged hyperedges; all other hyperedges
    stay distinct.  Node ids of the right factor are shifted clear."""
    if T1.is_empty:
        return T2
    if T2.is_empty:
        return T1
    offset = max(T1.nodes) + 1 - min(T2.nodes)
    S = T2.shifted(offset)
    return LionsForest(
        T1.nodes + S.nodes,
        {**T1.parent, **S.parent},
        {**T1.label, **S.label},
        T1.h0 | S.h0,
        T1.hyperedges + S.hyperedges,
    )


def product_many(forests):
    out = LionsForest.unit()
    for T in forests:
        out = product(out, T)
    return out


def expectation(T):
    """Untag: move h0 into the hyperedge partition.  Idempotent."""
    if not T.h0:
        return T
    return LionsForest(T.nodes, T.parent, T.label, (),
                       T.hyperedges + (T.h0,))


def graft(T, i):
    """Attach every root of T to a fresh tagged root labelled i."""
    x0 = max(T.nodes) + 1 if T.nodes else 0
    parent = dict(T.parent)
    for r in T.roots():
        parent[r] = x0
    parent[x0] = None
    label = dict(T.label)
    label[x0] = i
    return LionsForest(T.nodes + (x0,), parent, label,
                       T.h0 | {x0}, T.hyperedges)


def e_a(a, forests):
    """Group the forests by the values of the sequence a: the 0-group is a
    plain product, every positive group is untagged as one block.

    Node ids are preserved from the concatenation order of the inputs so
    callers can align tensor slots with the inputs.
    """
    entries = tuple(a.entries) if hasattr(a, "entries") else tuple(a)
    forests = list(forests)
    if len(entries) != len(forests):
        raise ForestError("sequence length must match the number of forests")
    shifted = []
    offset = 0
    for T in forests:
        span = (max(T.nodes) - min(T.nodes) + 1) if T.nodes else 0
        S = T.relabelled({x: x - min(T.nodes) + offset for x in T.nodes}) \
            if T.nodes else T
        shifted.append(S)
        offset += span
    nodes = tuple(x for S in shifted for x in S.nodes)
    parent = {x: p for S in shifted for x, p in S.parent.items()}
    label = {x: l for S in shifted for x, l in S.label.items()}
    blocks = [b for S in shifted for b in S.hyperedges]
    m = max(entries) if entries else 0
    h0 = frozenset().union(*(shifted[i].h0 for i in range(len(entries))
                             if entries[i] == 0)) if 0 in entries else frozenset()
    for j in range(1, m + 1):
        merged = frozenset().union(*(shifted[i].h0 for i in range(len(entries))
                                     if entries[i] == j))
        if merged:
            blocks.append(merged)
    return LionsForest(nodes, parent, label, h0, blocks)


def grading(T):
    """(tagged node count, untagged node count)."""
    return (len(T.h0), len(T.nodes) - len(T.h0))


def weight(T, alpha, beta):
    k, n = grading(T)
    return alpha * k + beta * n


# -- canonical form ---------------------------------------------------------


def _bare_codes(T):
    """Label-only AHU codes per node (hyperedges ignored)."""
    ch = T.children()
    codes = {}

    def rec(x):
        kids = tuple(sorted(rec(y) for y in ch[x]))
        codes[x] = (T.label[x], kids)
        return codes[x]

    for r in T.roots():
        rec(r)
    return codes


def _coded(T, color):
    """Full per-node codes given a hyperedge colouring, plus root codes."""
    ch = T.children()
    codes = {}

    def rec(x):
        kids = tuple(sorted(rec(y) for y in ch[x]))
        codes[x] = (T.label[x], color[x], kids)
        return codes[x]

    roots = tuple(sorted(rec(r) for r in T.roots()))
    return roots, codes


def _candidate_colorings(T):
    """Hyperedge numberings compatible with isomorphism invariants.

    Blocks with distinct invariants can never be exchanged by an
    isomorphism, so only permutations within equal-invariant groups are
    tried;  usually that leaves a single candidate.
    """
    depth = T.depths()
    bare = _bare_codes(T)
    inv = {}
    for b in T.hyperedges:
        inv[b] = (len(b), tuple(sorted((depth[x], T.label[x], bare[x]) for x in b)))
    groups = {}
    for b in T.hyperedges:
        groups.setdefault(inv[b], []).append(b)
    ordered_groups = [groups[key] for key in sorted(groups)]
    per_group = [list(itertools.permutations(g)) for g in ordered_groups]
    for choice in itertools.product(*per_group):
        order = [b for g in choice for b in g]
        color = {}
        for x in T.h0:
            color[x] = 0
        for idx, b in enumerate(order, start=1):
            for x in b:
                color[x] = idx
        yield order, color


def canonicalize(T):
    """Canonical representative and the node map onto it.

    Returns (C, node_map) with C a LionsForest on nodes 0..n-1 numbered in a
    canonical preorder traversal, and node_map[x] the new id of node x.  Two
    forests have equal representatives iff some label-preserving rooted
    forest isomorphism matches their h0 sets and hyperedge partitions.
    """
    if T.is_empty:
        return T, {}
    best = None
    for order, color in _candidate_colorings(T):
        roots_code, codes = _coded(T, color)
        if best is None or roots_code < best[0]:
            best = (roots_code, codes, color)
    _, codes, color = best

    ch = T.children()
    node_map = {}
    counter = itertools.count()

    def assign(x):
        node_map[x] = next(counter)
        for y in sorted(ch[x], key=lambda y: (codes[y], y)):
            assign(y)

    for r in sorted(T.roots(), key=lambda r: (codes[r], r)):
        assign(r)
    C = T.relabelled(node_map)
    return C, node_map


def canonical_key(T):
    """Stable byte encoding of the isomorphism class."""
    if T._key is not None:
        return T._key
    C, _ = canonicalize(T)
    payload = {
        "parent": [-1 if C.parent[x] is None else C.parent[x] for x in C.nodes],
        "label": [C.label[x] for x in C.nodes],
        "h0": sorted(C.h0),
        "H": [sorted(b) for b in C.hyperedges],
    }
    key = json.dumps(payload, separators=(",", ":")).encode()
    object.__setattr__(T, "_key", key)
    return key


def key_hex(T):
    return canonical_key(T).hex()


def forest_from_key(key):
    """Rebuild the canonical representative from a key produced above."""
    payload = json.loads(bytes.fromhex(key) if isinstance(key, str) else key)
    n = len(payload["parent"])
    return LionsForest(
        range(n),
        {i: (None if p == -1 else p) for i, p in enumerate(payload["parent"])},
        {i: l for i, l in enumerate(payload["label"])},
        payload["h0"],
        payload["H"],
    )


# -- decomposition into generators ------------------------------------------


def decompose(T):
    """Expression over {("one",), ("gen", i), ("E", e), ("graft", e, i),
    ("prod", (e, ...))} whose evaluation reproduces T's class."""
    rep = T.validate()
    if not rep.ok:
        raise ForestError(f"cannot decompose an invalid forest: {rep.condition}")
    if T.is_empty:
        return ("one",)
    if not T.h0:
        candidates = [b for b in T.hyperedges
                      if any(T.parent[x] is None for x in b)]
        h = min(candidates, key=min)
        retagged = LionsForest(T.nodes, T.parent, T.label, h,
                               [b for b in T.hyperedges if b != h])
        return ("E", decompose(retagged))
    comps = T.components()
    tagged = [c for c in comps if any(T.parent[x] is None and x in T.h0
                                      for x in c)]
    untagged = [c for c in comps if c not in tagged]
    if untagged:
        n1 = frozenset().union(*tagged)
        rest = frozenset().union(*untagged)
        return ("prod", (decompose(T.restrict(n1)), decompose(T.restrict(rest))))
    if len(comps) > 1:
        return ("prod", tuple(decompose(T.restrict(c)) for c in comps))
    root = T.roots()[0]
    body = T.restrict(set(T.nodes) - {root})
    return ("graft", decompose(body), T.label[root])


def evaluate_expression(expr):
    kind = expr[0]
    if kind == "one":
        return LionsForest.unit()
    if kind == "gen":
        return LionsForest.single(expr[1])
    if kind == "E":
        return expectation(evaluate_expression(expr[1]))
    if kind == "graft":
        return graft(evaluate_expression(expr[1]), expr[2])
    if kind == "prod":
        return product_many(evaluate_expression(e) for e in expr[1])
    raise ForestError(f"unknown expression node {kind!r}")


def _normalize_gen(expr):
    """Single tagged nodes decompose to ("graft", ("one",), i); expose them
    as generators for readability."""
    if expr[0] == "graft" and expr[1] == ("one",):
        return ("gen", expr[2])
    if expr[0] in ("E",):
        return (expr[0], _normalize_gen(expr[1]))
    if expr[0] == "graft":
        return ("graft", _normalize_gen(expr[1]), expr[2])
    if expr[0] == "prod":
        return ("prod", tuple(_normalize_gen(e) for e in expr[1]))
    return expr


def decompose_pretty(T):
    return _normalize_gen(decompose(T))


# -- enumeration -------------------------------------------------------------


def enumerate_forests(gamma, alpha, beta, d, include_unit=True):
    """One canonical representative per isomorphism class of weight <= gamma.

    Classes are produced by closing the single-node generators under
    product, expectation and grafting, then deduplicated by canonical key.
    """
    if alpha <= 0 or beta <= 0:
        raise ForestError("weight bound needs alpha, beta > 0")
    if d < 1:
        raise ForestError("label alphabet must be nonempty")
    nmax = floor(gamma / min(alpha, beta))
    classes = {}
    by_size = {}

    def add(T):
        key = canonical_key(T)
        if key not in classes:
            C, _ = canonicalize(T)
            object.__setattr__(C, "_key", key)
            classes[key] = C
            by_size.setdefault(len(C.nodes), []).append(C)
            return C
        return None

    queue = []
    if nmax >= 1:
        for i in range(1, d + 1):
            C = add(LionsForest.single(i))
            if C is not None:
                queue.append(C)
    while queue:
        T = queue.pop()
        size = len(T.nodes)
        grown = [expectation(T)]
        if size + 1 <= nmax:
            grown.extend(graft(T, i) for i in range(1, d + 1))
        for other_size in range(1, nmax - size + 1):
            for other in list(by_size.get(other_size, ())):
                grown.append(product(T, other))
        for G in grown:
            C = add(G)
            if C is not None:
                queue.append(C)
    out = [T for T in classes.values() if weight(T, alpha, beta) <= gamma]
    if include_unit:
        out.append(LionsForest.unit())
    out.sort(key=lambda T: (len(T), canonical_key(T)))
    return out


def enumerate_forests_by_nodes(nmax, d, include_unit=False):
    """All classes with at most nmax nodes (weight bound 1 per node)."""
    return enumerate_forests(nmax, 1.0, 1.0, d, include_unit=include_unit)


# -- admissible cuts ---------------------------------------------------------


@dataclass(frozen=True)
class Cut:
    """An admissible cut of a tree: `edges` lists the child endpoint of each
    removed edge; prune keeps the pieces cut away, root keeps the piece
    containing the original root.  Hyperedges restrict to both sides and the
    original hyperedge partition couples them."""
    edges: frozenset
    prune: LionsForest
    root: LionsForest

    @property
    def prune_nodes(self):
        return frozenset(self.prune.nodes)

    @property
    def root_nodes(self):
        return frozenset(self.root.nodes)


def admissible_cuts(T):
    """All nonempty edge subsets with at most one edge per root path."""
    if len(T.roots()) != 1:
        raise ForestError("cuts are defined for a single tree; "
                          "use the product rule for forests")
    ancestors = {}
    for x in T.nodes:
        acc, p = set(), T.parent[x]
        while p is not None:
            acc.add(p)
            p = T.parent[p]
        ancestors[x] = acc
    cuttable = [x for x in T.nodes if T.parent[x] is not None]
    out = []
    for r in range(1, len(cuttable) + 1):
        for combo in itertools.combinations(cuttable, r):
            chosen = set(combo)
            if any(ancestors[x] & chosen for x in combo):
                continue
            prune_nodes = {x for x in T.nodes
                           if (x in chosen or ancestors[x] & chosen)}
            root_nodes = set(T.nodes) - prune_nodes
            out.append(Cut(frozenset(combo), T.restrict(prune_nodes),
                           T.restrict(root_nodes)))
    return out


# -- dual forest -------------------------------------------------------------


@dataclass(frozen=True)
class DualForest:
    """Graph on the hyperedges of a forest; an edge marks a mergeable pair."""
    vertices: tuple          # hyperedges as frozensets, h0 first if present
    edges: tuple             # pairs of vertex indices (i < j)
    h0_index: int            # index of h0 among vertices, or -1

    def neighbours(self, i):
        out = []
        for a, b in self.edges:
            if a == i:
                out.append(b)
            elif b == i:
                out.append(a)
        return out

    def is_connected(self):
        if not self.vertices:
            return True
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in self.neighbours(x):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(self.vertices)


def _union_is_admissible(T, h1, h2, depth):
    """Conditions (2.2)/(2.3) for the union of two hyperedges."""
    h = h1 | h2
    dmin = min(depth[x] for x in h)
    for y in h:
        if depth[y] > dmin and T.parent[y] not in h:
            return False
    by_depth = {}
    for y in h:
        by_depth.setdefault(depth[y], []).append(y)
    for members in by_depth.values():
        parents = {T.parent[y] for y in members if T.parent[y] is not None}
        if len(parents) >= 2 and not parents <= h:
            return False
    return True


def dual_forest(T):
    if T.is_empty:
        return DualForest((), (), -1)
    depth = T.depths()
    verts = tuple(T.hyperedge_family())
    edges = []
    for i, j in itertools.combinations(range(len(verts)), 2):
        if _union_is_admissible(T, verts[i], verts[j], depth):
            edges.append((i, j))
    return DualForest(verts, tuple(edges), 0 if T.h0 else -1)


def merge_hyperedges(T, pair):
    """Union two hyperedges joined by a dual edge; h0 absorbs when involved."""
    h1, h2 = (frozenset(h) for h in pair)
    dual = dual_forest(T)
    try:
        i, j = dual.vertices.index(h1), dual.vertices.index(h2)
    except ValueError as exc:
        raise ForestError("pair does not consist of hyperedges of the forest") \
            from exc
    if (min(i, j), max(i, j)) not in dual.edges:
        raise ForestError("pair is not an edge of the dual forest")
    if T.h0 in (h1, h2):
        other = h2 if T.h0 == h1 else h1
        return LionsForest(T.nodes, T.parent, T.label, T.h0 | other,
                           [b for b in T.hyperedges if b != other])
    blocks = [b for b in T.hyperedges if b not in (h1, h2)]
    return LionsForest(T.nodes, T.parent, T.label, T.h0, blocks + [h1 | h2])


def level_partition(T):
    """Layers H^(0), H^(1), ... of the dual by distance from the roots."""
    dual = dual_forest(T)
    if not dual.vertices:
        return []
    root_nodes = set(T.roots())
    current = [i for i, h in enumerate(dual.vertices) if h & root_nodes]
    layers = [sorted(current)]
    seen = set(current)
    while len(seen) < len(dual.vertices):
        nxt = sorted({j for i in layers[-1] for j in dual.neighbours(i)
                      if j not in seen})
        if not nxt:
            break
        layers.append(nxt)
        seen.update(nxt)
    return [[dual.vertices[i] for i in layer] for layer in layers]


# -- JSON interchange ---------------------------------------------------------


def forest_to_json(T):
    index = {x: i for i, x in enumerate(T.nodes)}
    return {
        "parent": [-1 if T.parent[x] is None else index[T.parent[x]]
                   for x in T.nodes],
        "label": [T.label[x] for x in T.nodes],
        "h0": sorted(index[x] for x in T.h0),
        "H": sorted((sorted(index[x] for x in b) for b in T.hyperedges)),
    }


def forest_from_json(payload):
    n = len(payload["parent"])
    T = LionsForest(
        range(n),
        {i: (None if p in (-1, None) else int(p))
         for i, p in enumerate(payload["parent"])},
        {i: int(l) for i, l in enumerate(payload["label"])},
        [int(x) for x in payload.get("h0", [])],
        [[int(x) for x in b] for b in payload.get("H", [])],
    )
    rep = T.validate()
    if not rep.ok:
        raise ForestError(f"invalid forest ({rep.condition}): {rep.message}")
    return T


def hyperedges_as_partition(T):
    """The hyperedge partition of the untagged nodes as a SetPartition."""
    rest = [x for x in T.nodes if x not in T.h0]
    try:
        return SetPartition(rest, [list(b) for b in T.hyperedges])
    except PartitionError as exc:
        raise ForestError(str(exc)) from exc
