"""Integrability exponents, graded norms, the group metric and the coupling
pseudo-metric between empirical rough paths.

Exponents follow the graded rule q[T] = q' / |nodes|, which makes the dual
conditions hold with equality across the whole coproduct table.  Norm
estimates are Monte Carlo with standard errors; the coupling metric is
estimated from above by restricting the infimum to permutation couplings of
the path atoms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from math import floor

import numpy as np

from .forest import canonical_key, weight
from .hopf import (
    BogoliubovAntipode,
    CoproductTable,
    SampleAssignment,
    antipode_bogoliubov,
    convolve,
    log_star,
)


class MetricError(ValueError):
    pass


def tensor_norm(x):
    return float(np.sqrt(np.sum(np.asarray(x, dtype=float) ** 2)))


@dataclass(frozen=True)
class DualPair:
    """Graded integrability exponents q[T] = q'/|N| and the conjugate p."""

    p1: float
    qprime: float
    gamma: float
    alpha: float
    beta: float

    def __post_init__(self):
        if self.p1 < 1:
            raise MetricError("p[1] must be at least 1")
        if self.alpha <= 0 or self.beta <= 0 or self.gamma < min(self.alpha,
                                                                 self.beta):
            raise MetricError("invalid grading parameters")
        if self.p1 >= self.qprime / self.kmax:
            raise MetricError(
                f"need p1 < q'/{self.kmax} for finite conjugate exponents")

    @property
    def kmax(self):
        return max(1, floor(self.gamma / min(self.alpha, self.beta)))

    def q_of_nodes(self, n):
        if n == 0:
            return math.inf
        return self.qprime / n

    def q(self, T):
        return self.q_of_nodes(len(T.nodes))

    def p(self, T):
        n = len(T.nodes)
        if n == 0:
            return self.p1
        return self.qprime * self.p1 / (self.qprime - n * self.p1)

    def holder_weight(self, T):
        return weight(T, self.alpha, self.beta)


def make_dual_pair(p1, qprime, gamma, alpha=1.0, beta=1.0):
    return DualPair(p1=p1, qprime=qprime, gamma=gamma, alpha=alpha, beta=beta)


def check_dual_conditions(dual_pair, table):
    """Verify the conjugacy relation and the coproduct compatibility rules
    over a full coproduct table; in the graded case the splitting rule holds
    with equality."""
    dp = dual_pair
    report = {"conjugacy": True, "splitting": True, "splitting_equality": True,
              "untagging": True, "product": True, "violations": []}
    qp = Fraction(dp.qprime).limit_denominator(10 ** 9)
    node_count = {key: len(T.nodes) for key, T in table.forests.items()}
    for key, T in table.forests.items():
        n = len(T.nodes)
        if n == 0:
            continue
        p_T = dp.p(T)
        if not (p_T >= 1 and math.isfinite(p_T)):
            report["conjugacy"] = False
            report["violations"].append(("p-range", key))
        lhs = 1.0 / dp.p1
        rhs = 1.0 / p_T + 1.0 / dp.q(T)
        if abs(lhs - rhs) > 1e-12:
            report["conjugacy"] = False
            report["violations"].append(("conjugacy", key))
        # untagging keeps the node count, hence the exponent
        from .forest import expectation

        if dp.q(expectation(T)) != dp.q(T):
            report["untagging"] = False
            report["violations"].append(("untagging", key))
    for key, collapsed in table.collapsed.items():
        n = node_count[key]
        if n == 0:
            continue
        for (k1, k2), mult in collapsed.items():
            n1, n2 = node_count.get(k1), node_count.get(k2)
            if n1 is None or n2 is None:
                continue
            # 1/q[T] >= 1/q[T1] + 1/q[T2] with exact fractions
            lhs = Fraction(n, 1) / qp
            rhs = Fraction(n1 + n2, 1) / qp
            if lhs < rhs:
                report["splitting"] = False
                report["violations"].append(("splitting", key, k1, k2))
            if lhs != rhs:
                report["splitting_equality"] = False
    report["ok"] = (report["conjugacy"] and report["splitting"]
                    and report["untagging"])
    return report


def convolution_constant(table, dual_pair):
    """The normalization built from the counting function: for every forest,
    the number of contributing splittings and the q-power sum of their
    multiplicities; at least 1 on any truncation containing a tree."""
    best = 0.0
    for key, T in table.forests.items():
        if T.is_empty:
            continue
        q = dual_pair.q(T)
        collapsed = table.collapsed[key]
        support = len(collapsed)
        power_sum = float(sum(int(m) ** q for m in collapsed.values()))
        val = (support ** (q - 1.0) * power_sum) ** (1.0 / q)
        best = max(best, val)
    return max(best, 1.0)


def _moment_estimate(f, T, sampler, M, q, dim, rng):
    """Monte-Carlo q-moment^(1/q) of the tensor norm with a delta-method
    standard error."""
    vals = np.empty(M)
    for i in range(M):
        asg = SampleAssignment.draw(T, sampler, rng)
        vals[i] = tensor_norm(f.evaluate(T, asg, dim)) ** q
    mean = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / math.sqrt(M)) if M > 1 else 0.0
    if mean <= 0:
        return 0.0, 0.0
    est = mean ** (1.0 / q)
    return est, est / (q * mean) * se


def bnorm(f, level, forests, dual_pair, sampler, M, dim, rng=None):
    """Level-wise graded norm: the convolution constant times the supremum
    over forests with `level` nodes of the q[T]-moment of |<f, T>|."""
    rng = np.random.default_rng(rng)
    table = CoproductTable(forests)
    K = convolution_constant(table, dual_pair)
    best, best_se, arg = 0.0, 0.0, None
    for T in forests:
        if len(T.nodes) != level:
            continue
        est, se = _moment_estimate(f, T, sampler, M, dual_pair.q(T), dim, rng)
        if est > best:
            best, best_se, arg = est, se, canonical_key(T)
    return {"value": K * best, "stderr": K * best_se, "argmax": arg,
            "constant": K, "level": level}


def _cc_half(f, forests, dual_pair, sampler, M, dim, rng, K):
    best = 0.0
    se_at_best = 0.0
    for k in range(1, dual_pair.kmax + 1):
        lvl_best, lvl_se = 0.0, 0.0
        for T in forests:
            if len(T.nodes) != k:
                continue
            est, se = _moment_estimate(f, T, sampler, M, dual_pair.q(T), dim,
                                       rng)
            if est > lvl_best:
                lvl_best, lvl_se = est, se
        scaled = (math.factorial(k) * K * lvl_best) ** (1.0 / k) \
            if lvl_best > 0 else 0.0
        if scaled > best:
            best = scaled
            se_at_best = (scaled / (k * max(K * lvl_best, 1e-300))) * K * lvl_se
    return best, se_at_best


def _inverse_of(f):
    # the antipode is an involution on characters
    if isinstance(f, BogoliubovAntipode):
        return f.f
    return antipode_bogoliubov(f)


def cc_norm(f, forests, dual_pair, sampler, M, dim, rng=None):
    """Homogeneous group norm: level-maxima of the graded norms of f and of
    its convolution inverse."""
    rng = np.random.default_rng(rng)
    table = CoproductTable(forests)
    K = convolution_constant(table, dual_pair)
    a, sa = _cc_half(f, forests, dual_pair, sampler, M, dim, rng, K)
    b, sb = _cc_half(_inverse_of(f), forests, dual_pair, sampler, M, dim,
                     rng, K)
    return {"value": a + b, "stderr": math.hypot(sa, sb), "constant": K}


def cc_dist(f, g, forests, dual_pair, sampler, M, dim, rng=None):
    return cc_norm(convolve(_inverse_of(g), f), forests, dual_pair, sampler,
                   M, dim, rng)


def triple_norm(f, forests, dual_pair, sampler, M, dim, rng=None):
    """Logarithm-based homogeneous norm: sup over trees of the q[T]-moment
    of the log coefficients, raised to 1/(q[T] |N|)."""
    rng = np.random.default_rng(rng)
    lf = log_star(f)
    best, best_se, arg = 0.0, 0.0, None
    for T in forests:
        if T.is_empty or len(T.roots()) != 1:
            continue
        q = dual_pair.q(T)
        n = len(T.nodes)
        vals = np.empty(M)
        for i in range(M):
            asg = SampleAssignment.draw(T, sampler, rng)
            vals[i] = tensor_norm(lf.evaluate(T, asg, dim)) ** q
        mean = float(np.mean(vals))
        if mean <= 0:
            continue
        est = mean ** (1.0 / (q * n))
        se = est / (q * n * mean) * float(np.std(vals, ddof=1) / math.sqrt(M))
        if est > best:
            best, best_se, arg = est, se, canonical_key(T)
    return {"value": best, "stderr": best_se, "argmax": arg}


def equivalence_check(f, forests, dual_pair, sampler, M, dim, rng=None):
    """Both norms plus the explicit two-sided comparison constants."""
    rng = np.random.default_rng(rng)
    table = CoproductTable(forests)
    K = convolution_constant(table, dual_pair)
    kmax = dual_pair.kmax
    cc = cc_norm(f, forests, dual_pair, sampler, M, dim, rng)
    tn = triple_norm(f, forests, dual_pair, sampler, M, dim, rng)
    upper_cc = 2.0 * (math.exp(kmax) - 1.0) * K          # cc <= C * triple
    upper_triple = max((math.exp(k) - 1.0) ** (1.0 / k)
                       for k in range(1, kmax + 1))       # triple <= c * cc
    out = {"cc": cc["value"], "triple": tn["value"],
           "cc_over_triple": (cc["value"] / tn["value"]
                              if tn["value"] > 0 else float("nan")),
           "triple_over_cc": (tn["value"] / cc["value"]
                              if cc["value"] > 0 else float("nan")),
           "constant_cc_over_triple": upper_cc,
           "constant_triple_over_cc": upper_triple}
    out["within_constants"] = (
        (tn["value"] == 0.0 and cc["value"] == 0.0)
        or (out["cc_over_triple"] <= upper_cc
            and out["triple_over_cc"] <= upper_triple))
    return out


# -- coupling pseudo-metric between empirical rough paths ------------------------


def dyadic_pairs(level):
    times = [k / 2 ** level for k in range(2 ** level + 1)]
    return [(s, t) for i, s in enumerate(times) for t in times[i + 1:]]


class _TreeCost:
    """Per-tree permutation cost: precomputes the lift values of both sides
    on every atom tuple and every grid pair."""

    def __init__(self, T, lift_factory, atoms_v, atoms_w, tagged, pairs, q,
                 hoelder, dim):
        self.q = q
        self.weights = np.array([(t - s) ** hoelder for s, t in pairs])
        self.slots = len(T.hyperedges)
        M = len(atoms_v)
        if self.slots > 2:
            raise MetricError("permutation cost supports at most two "
                              "hyperedge slots per tree")
        vals_v, vals_w = [], []
        for s, t in pairs:
            lift = lift_factory(s, t)

            def value(atoms, combo):
                asg = SampleAssignment(tagged, [atoms[c] for c in combo])
                return np.asarray(lift.evaluate(T, asg, dim)).ravel()

            if self.slots == 0:
                vals_v.append(value(atoms_v, ()))
                vals_w.append(value(atoms_w, ()))
            elif self.slots == 1:
                vals_v.append(np.stack([value(atoms_v, (a,)) for a in range(M)]))
                vals_w.append(np.stack([value(atoms_w, (a,)) for a in range(M)]))
            else:
                vals_v.append(np.stack(
                    [[value(atoms_v, (a, b)) for b in range(M)]
                     for a in range(M)]))
                vals_w.append(np.stack(
                    [[value(atoms_w, (a, b)) for b in range(M)]
                     for a in range(M)]))
        if self.slots == 0:
            self.base = np.array([
                np.linalg.norm(v - w) for v, w in zip(vals_v, vals_w)])
        elif self.slots == 1:
            self.D = np.stack([
                np.linalg.norm(v[:, None, :] - w[None, :, :], axis=2) ** q
                for v, w in zip(vals_v, vals_w)])  # (pairs, M, M)
        else:
            self.D = np.stack([
                np.linalg.norm(
                    v[:, None, :, None, :] - w[None, :, None, :, :],
                    axis=4) ** q
                for v, w in zip(vals_v, vals_w)])  # (pairs, M, M, M, M)

    def cost(self, perms):
        """Vector of costs for an array of permutations (n_perms, M)."""
        perms = np.asarray(perms)
        if self.slots == 0:
            return np.full(len(perms), float(np.max(self.base / self.weights)))
        M = perms.shape[1]
        idx = np.arange(M)
        per_pair = []
        for k in range(self.D.shape[0]):
            if self.slots == 1:
                gathered = self.D[k][idx[None, :], perms]          # (n, M)
                mean = gathered.mean(axis=1)
            else:
                gathered = self.D[k][idx[None, :, None], perms[:, :, None],
                                     idx[None, None, :], perms[:, None, :]]
                mean = gathered.reshape(len(perms), -1).mean(axis=1)
            per_pair.append(mean ** (1.0 / self.q) / self.weights[k])
        return np.max(np.stack(per_pair, axis=1), axis=1)


def rho_estimate(lift_factory, atoms_v, atoms_w, tagged, trees, dual_pair,
                 grid_level=5, method="auto", dim=None, rng=None,
                 restarts=4, max_perms_exhaustive=40320):
    """Upper bound on the coupling pseudo-metric between the lifts of two
    atom families, the infimum restricted to permutation couplings.

    Returns the best found value, the identity-coupling value and the
    permutation realizing the bound.  Exhaustive search for small atom
    counts, greedy 2-swap descent above.
    """
    if len(atoms_v) != len(atoms_w):
        raise MetricError("both sides need the same number of atoms")
    M = len(atoms_v)
    if dim is None:
        dim = atoms_v[0].dim
    rng = np.random.default_rng(rng)
    pairs = dyadic_pairs(grid_level)
    costs = [
        _TreeCost(T, lift_factory, atoms_v, atoms_w, tagged, pairs,
                  dual_pair.q(T), dual_pair.holder_weight(T), dim)
        for T in trees
    ]

    def total(perms):
        perms = np.atleast_2d(perms)
        return sum(c.cost(perms) for c in costs)

    identity = np.arange(M)
    id_value = float(total(identity)[0])
    if method == "auto":
        method = "exhaustive" if math.factorial(M) <= max_perms_exhaustive \
            else "greedy"
    if method == "exhaustive":
        best_val, best_perm = id_value, tuple(identity)
        chunk = []
        for perm in itertools.permutations(range(M)):
            chunk.append(perm)
            if len(chunk) == 4096:
                vals = total(np.array(chunk))
                j = int(np.argmin(vals))
                if vals[j] < best_val:
                    best_val, best_perm = float(vals[j]), chunk[j]
                chunk = []
        if chunk:
            vals = total(np.array(chunk))
            j = int(np.argmin(vals))
            if vals[j] < best_val:
                best_val, best_perm = float(vals[j]), chunk[j]
    elif method == "greedy":
        best_val, best_perm = id_value, tuple(identity)
        swaps = [(i, j) for i in range(M) for j in range(i + 1, M)]
        for start in range(restarts):
            perm = identity.copy() if start == 0 else rng.permutation(M)
            val = float(total(perm)[0])
            improved = True
            while improved and swaps:
                cands = np.tile(perm, (len(swaps), 1))
                for row, (i, j) in enumerate(swaps):
                    cands[row, i], cands[row, j] = cands[row, j], cands[row, i]
                vals = total(cands)
                j = int(np.argmin(vals))
                if vals[j] < val - 1e-15:
                    perm, val = cands[j], float(vals[j])
                else:
                    improved = False
            if val < best_val:
                best_val, best_perm = val, tuple(int(x) for x in perm)
    else:
        raise MetricError(f"unknown method {method!r}")
    return {"value": min(best_val, id_value),
            "identity_value": id_value,
            "permutation": [int(x) for x in best_perm],
            "method": method, "grid_level": grid_level, "atoms": M}
