"""Random hyperedge labelings, empirical lifts and convergence experiments.

An n-particle empirical lift samples one particle index per hyperedge slot
(the tagged slot is conditioned to a fixed index) and evaluates the iterated
integral with the indexed paths; slots that draw the same index share a path,
which collapses the forest exactly as merging its hyperedges would.  As the
population grows the empirical lift approaches the lift of the theoretical
path distribution; the experiment below tracks that trend through the
permutation-coupling metric.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .forest import LionsForest
from .metrics import DualPair, rho_estimate
from .partitions import SetPartition
from .pathlift import (
    LiftCharacter,
    PiecewiseLinearPath,
    brownian_path,
    tree_integral,
)


class EmpiricalError(ValueError):
    pass


@dataclass(frozen=True)
class Labeling:
    """Uniform particle indices per hyperedge slot, the tagged slot pinned."""

    n: int
    tagged_index: int
    assignment: tuple  # index per hyperedge, aligned with forest.hyperedges

    def index_of_node(self, forest, node):
        if node in forest.h0:
            return self.tagged_index
        for block, idx in zip(forest.hyperedges, self.assignment):
            if node in block:
                return idx
        raise EmpiricalError(f"node {node} not covered by the labeling")


def random_labeling(T, i, n, rng):
    if n < 1 or not 1 <= i <= n:
        raise EmpiricalError("need n >= 1 and 1 <= i <= n")
    rng = np.random.default_rng(rng)
    return Labeling(n, i, tuple(int(rng.integers(1, n + 1))
                                for _ in T.hyperedges))


@dataclass(frozen=True)
class CollapsedForest:
    """The bare labelled forest plus the partition of its nodes by shared
    particle index; not a Lions forest in general."""

    forest: LionsForest
    partition: SetPartition
    indices: tuple  # particle index per partition block

    @property
    def merged_anything(self):
        base = len(self.forest.hyperedge_family())
        return len(self.partition.blocks) < base


def collapse(T, labeling):
    by_index = {}
    for x in T.nodes:
        by_index.setdefault(labeling.index_of_node(T, x), []).append(x)
    partition = SetPartition(T.nodes, list(by_index.values()))
    # the partition stores blocks sorted by minimum; align the indices
    index_of = {min(block): idx for idx, block in by_index.items()}
    indices = tuple(index_of[b[0]] for b in partition.blocks)
    return CollapsedForest(T, partition, indices)


def collapse_probability_two_slots(n):
    """Exact chance that a tagged slot plus two hyperedge slots collide
    somewhere: 1 - (n-1)(n-2)/n^2."""
    return 1.0 - (n - 1) * (n - 2) / n ** 2


def evaluate_collapsed(collapsed, paths, s, t, max_order=None):
    """Integral of the collapsed forest: every node reads the path of its
    particle index (1-based indexing into `paths`)."""
    T = collapsed.forest
    node_paths = {}
    for block, idx in zip(collapsed.partition.blocks, collapsed.indices):
        for x in block:
            node_paths[x] = paths[idx - 1]
    return tree_integral(T, node_paths, s, t, max_order)


class EmpiricalLift(LiftCharacter):
    """Lift over an n-atom empirical path family with a pinned tagged index.

    Drawing an assignment samples one uniform index per hyperedge slot; equal
    draws share the identical path object, so the evaluation coincides
    exactly with the integral of the collapsed forest.
    """

    def __init__(self, paths, tagged_index, s, t, max_order=None):
        if not paths:
            raise EmpiricalError("need at least one path atom")
        if not 1 <= tagged_index <= len(paths):
            raise EmpiricalError("tagged index out of range")
        self.paths = list(paths)
        self.tagged_index = int(tagged_index)

        def sampler(rng):
            return self.paths[int(rng.integers(0, len(self.paths)))]

        super().__init__(s, t, sampler=sampler, max_order=max_order)

    @property
    def n(self):
        return len(self.paths)

    @property
    def tagged_path(self):
        return self.paths[self.tagged_index - 1]

    def draw_labeling(self, forest, rng):
        return random_labeling(forest, self.tagged_index, self.n, rng)

    def assignment_from_labeling(self, forest, labeling):
        from .hopf import SampleAssignment

        return SampleAssignment(self.tagged_path,
                                [self.paths[i - 1] for i in labeling.assignment])

    def evaluate_with_labeling(self, forest, labeling, dim):
        return self.evaluate(
            forest, self.assignment_from_labeling(forest, labeling), dim)


def empirical_lift(paths, tagged_index, s, t, alpha=None, max_order=None):
    """The n-atom empirical lift; requires enough atoms for the regularity
    bracket when alpha is supplied."""
    if alpha is not None and len(paths) <= floor_inv(alpha):
        raise EmpiricalError(
            f"need more than {floor_inv(alpha)} paths at regularity {alpha}")
    return EmpiricalLift(paths, tagged_index, s, t, max_order)


def floor_inv(alpha):
    return int(math.floor(1.0 / alpha))


def lln_experiment(sampler, trees, tagged_index, n_grid, replications,
                   dual_pair=None, atoms=None, atom_cap=64, grid_level=2,
                   dim=None, seed=0, method="auto", max_order=None,
                   threads=1):
    """Monte-Carlo trend of the empirical-to-mean-field discrepancy.

    For each population size n: draw the n paths, build the empirical lift
    conditioned on the tagged index, and estimate the permutation-coupling
    metric against the lift of the theoretical distribution.  The empirical
    side is represented by its own atoms and the mean-field side by as many
    fresh draws (uniform atom families of equal size are exactly the setting
    where permutation couplings realize the infimum), so the estimate decays
    as the population grows.  Reports per-n means, standard errors and the
    endpoint comparison.

    Every replicate runs on its own RNG substream keyed by (seed, n-index,
    replicate), so the table is bit-identical for a fixed seed whatever the
    thread count.
    """
    if replications < 2:
        raise EmpiricalError("need at least two replications for a "
                             "standard error")
    if dual_pair is None:
        # a small q' keeps the metric's q-th root from flattening the decay
        dual_pair = DualPair(p1=1.0, qprime=2.5, gamma=2.0, alpha=1.0, beta=1.0)
    if dim is None:
        dim = sampler(np.random.default_rng(0)).dim

    def replicate(n, m, n_idx, r):
        rng = np.random.default_rng([int(seed), n_idx, r])
        population = [sampler(rng) for _ in range(n)]
        emp = EmpiricalLift(population, tagged_index, 0.0, 1.0,
                            max_order=max_order)
        tagged = emp.tagged_path
        atoms_v = [sampler(rng) for _ in range(m)]
        if m == n:
            atoms_w = list(population)
        else:
            atoms_w = [population[int(k)] for k in rng.integers(0, n, size=m)]
        out = rho_estimate(
            lambda s, t: LiftCharacter(s, t, max_order=max_order),
            atoms_v, atoms_w, tagged, trees, dual_pair,
            grid_level=grid_level, method=method, dim=dim, rng=rng,
            restarts=1)
        return out["value"], out["identity_value"]

    rows = []
    per_n_values = {}
    for n_idx, n in enumerate(n_grid):
        if tagged_index > n:
            raise EmpiricalError("tagged index exceeds the population size")
        m = min(n, atom_cap) if atoms is None else min(atoms, n)
        if threads > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(
                    lambda r: replicate(n, m, n_idx, r), range(replications)))
        else:
            results = [replicate(n, m, n_idx, r) for r in range(replications)]
        vals = np.array([v for v, _ in results])
        id_vals = np.array([iv for _, iv in results])
        mean = float(np.mean(vals))
        se = float(np.std(vals, ddof=1) / math.sqrt(replications))
        rows.append({"n": int(n), "mean": mean, "stderr": se,
                     "identity_mean": float(np.mean(id_vals))})
        per_n_values[int(n)] = vals
    first, last = rows[0], rows[-1]
    gap = first["mean"] - last["mean"]
    gap_se = math.hypot(first["stderr"], last["stderr"])
    decreasing = all(rows[i]["mean"] >= rows[i + 1]["mean"] -
                     2 * math.hypot(rows[i]["stderr"], rows[i + 1]["stderr"])
                     for i in range(len(rows) - 1))
    return {
        "rows": rows,
        "endpoint_gap": gap,
        "endpoint_gap_stderr": gap_se,
        "endpoint_confident": gap > 1.6449 * gap_se,  # one-sided 95%
        "monotone_trend": decreasing,
    }


def make_sampler(spec):
    """Path distribution from a declarative spec.

    kinds:
      atoms     -- finite support: {"paths": [rows...], "probs": optional}
      brownian  -- dyadic Brownian truncation: {"level": int, "dim": int}
      two_atom  -- +/- linear paths: {"vector": [..]}
    """
    kind = spec.get("kind")
    if kind == "atoms":
        paths = [PiecewiseLinearPath.from_rows(rows) for rows in spec["paths"]]
        probs = spec.get("probs")
        if probs is not None:
            probs = np.asarray(probs, dtype=float)
            probs = probs / probs.sum()

        def sampler(rng):
            i = int(rng.choice(len(paths), p=probs))
            return paths[i]

        return sampler
    if kind == "brownian":
        level = int(spec.get("level", 5))
        dim = int(spec.get("dim", 1))
        return lambda rng: brownian_path(rng, dim, level)
    if kind == "two_atom":
        vec = spec.get("vector", [1.0])
        up = PiecewiseLinearPath.linear(vec)
        down = PiecewiseLinearPath.linear([-v for v in vec])
        return lambda rng: up if rng.random() < 0.5 else down
    raise EmpiricalError(f"unknown path distribution kind {kind!r}")


# -- empirical means with and without index repetitions ---------------------------


def ustat_distinct(f, samples, ell):
    """(1/n^ell) sum of f over all distinct index tuples."""
    samples = np.asarray(samples)
    n = len(samples)
    if ell < 1:
        raise EmpiricalError("order must be >= 1")
    if n < ell:
        raise EmpiricalError("need at least as many samples as the order")
    if ell == 1:
        return float(np.mean(f(samples)))
    if ell == 2:
        x = samples[:, None]
        y = samples[None, :]
        total = float(np.sum(f(x, y))) - float(np.sum(f(samples, samples)))
        return total / n ** 2
    total = 0.0
    for combo in itertools.permutations(range(n), ell):
        total += float(f(*[samples[i] for i in combo]))
    return total / n ** ell


def ustat_all(f, samples, ell):
    """(1/n^ell) sum of f over all index tuples, repetitions included."""
    samples = np.asarray(samples)
    n = len(samples)
    if ell < 1:
        raise EmpiricalError("order must be >= 1")
    if ell == 1:
        return float(np.mean(f(samples)))
    if ell == 2:
        x = samples[:, None]
        y = samples[None, :]
        return float(np.sum(f(x, y))) / n ** 2
    total = 0.0
    for combo in itertools.product(range(n), repeat=ell):
        total += float(f(*[samples[i] for i in combo]))
    return total / n ** ell


def symmetrize_phi(f, ell, sampler, inner_samples=2000, rng=None):
    """The centering functions of the order-ell empirical mean.

    phi_j integrates out the last ell - j arguments against the sampling
    law, with the alternating sign (-1)^(ell-1-j); subtracting every
    phi_k(X_I) from f centers all proper conditional expectations.  The
    integrals are Monte Carlo with a deterministic stream per function.
    """
    if ell < 1:
        raise EmpiricalError("order must be >= 1")
    if ell > 4:
        raise EmpiricalError("orders above 4 are not supported (cost guard)")
    seed = np.random.default_rng(rng).integers(2 ** 32)

    def make_phi(j):
        sign = (-1.0) ** (ell - 1 - j)

        def phi(*args):
            if len(args) != j:
                raise EmpiricalError(f"phi_{j} takes {j} arguments")
            local = np.random.default_rng([int(seed), j])
            total = 0.0
            for _ in range(inner_samples):
                tail = [sampler(local) for _ in range(ell - j)]
                total += float(f(*args, *tail))
            return sign * total / inner_samples

        return phi

    return [make_phi(j) for j in range(ell)]


def centering_residual(f, phis, ell, sampler, cond_size, outer=200,
                       inner=200, rng=None):
    """Monte-Carlo residual of the conditional-centering identity given a
    fixed conditioning block of size cond_size < ell."""
    if not 0 <= cond_size < ell:
        raise EmpiricalError("conditioning block must be a proper subset")
    rng = np.random.default_rng(rng)
    fixed = [sampler(rng) for _ in range(cond_size)]
    vals = np.empty(outer)
    for o in range(outer):
        free = [sampler(rng) for _ in range(ell - cond_size)]
        xs = fixed + free
        total = float(f(*xs))
        for k in range(ell):
            for subset in itertools.combinations(range(ell), k):
                total -= phis[k](*[xs[i] for i in subset])
        vals[o] = total
    mean = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / math.sqrt(outer))
    return {"mean": mean, "stderr": se, "ok": abs(mean) <= 3 * max(se, 1e-12)}
