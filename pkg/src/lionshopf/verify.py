"""Batch verification of the algebraic identities over a truncation.

Exact combinatorial identities are checked as multiset equalities over
every forest class; the character-level identities (group inverse, antipode
agreement) are checked on sampled evaluations of lifted characters.  A
tamper hook deliberately corrupts one identity so negative controls can
confirm the report catches and names it.
"""

from __future__ import annotations

import numpy as np

from .forest import LionsForest, enumerate_forests_by_nodes
from .hopf import (
    SampleAssignment,
    antipode_bogoliubov,
    antipode_geometric,
    antipode_terms,
    check_coassociativity,
    check_conilpotent,
    check_counit,
    check_expectation_morphism,
    check_grading_additivity,
    check_product_rule,
    convolve,
    coproduct_pairs,
)
from .pathlift import LiftCharacter, random_path

def exact_identity_sweep(forests, product_partner=None):
    """Run every exact identity over a family of forests, sharing the cut
    caches per forest.  Returns per-identity failure counts.

    The product factorization is checked by splitting multi-component
    forests at their first component; trees are paired with a single
    tagged node (or `product_partner`).
    """
    from collections import Counter

    from .forest import LionsForest
    from .hopf import iterated_reduced

    partner = product_partner or LionsForest.single(1)
    fails = Counter()
    for T in forests:
        cache = {}
        pcache = {}

        def pairs_of(S):
            got = pcache.get(S)
            if got is None:
                got = coproduct_pairs(T, S, cache)
                pcache[S] = got
            return got

        full = frozenset(T.nodes)
        pairs = pairs_of(full)

        left = Counter()
        right = Counter()
        for P, R in pairs:
            for R1, R2 in pairs_of(R):
                left[(P, R1, R2)] += 1
            for P1, P2 in pairs_of(P):
                right[(P1, P2, R)] += 1
        if left != right:
            fails["coassociativity"] += 1

        if not T.is_empty:
            if Counter(R for P, R in pairs if not P) != Counter({full: 1}) \
                    or Counter(P for P, R in pairs if not R) != \
                    Counter({full: 1}):
                fails["counit"] += 1

        k, n = len(T.h0), len(T.nodes) - len(T.h0)
        for P, R in pairs:
            kp, kr = len(P & T.h0), len(R & T.h0)
            if (kp + kr, (len(P) - kp) + (len(R) - kr)) != (k, n):
                fails["grading"] += 1
                break

        if T.nodes and iterated_reduced(T, len(T.nodes)) != []:
            fails["conilpotency"] += 1

        if antipode_terms(T, "left") != antipode_terms(T, "right"):
            fails["antipode-left-right"] += 1

        comps = sorted((sorted(c) for c in T.components()),
                       key=lambda c: c[0]) if T.nodes else []
        if len(comps) >= 2:
            first = frozenset(comps[0])
            rest = frozenset(x for c in comps[1:] for x in c)
            ok = check_product_rule(T.restrict(first), T.restrict(rest))
        elif T.nodes:
            ok = check_product_rule(T, partner)
        else:
            ok = True
        if not ok:
            fails["product-rule"] += 1
    return dict(fails)


def _tampered_coassoc(T):
    # drop one triple from the left side: a genuine inequality
    from collections import Counter

    from .hopf import coproduct_pairs as cp

    cache = {}
    pairs = cp(T, None, cache)
    left = Counter()
    for P, R in pairs:
        for R1, R2 in cp(T, R, cache):
            left[(P, R1, R2)] += 1
    if left:
        left[next(iter(left))] -= 1
    right = Counter()
    for P, R in pairs:
        for P1, P2 in cp(T, P, cache):
            right[(P1, P2, R)] += 1
    return +left == +right


def run_hopf_verification(max_nodes=4, d=2, seed=0, samples=25,
                          tol_inverse=1e-10, tol_agree=1e-12,
                          tamper=None):
    """Pass/fail report per identity; exit-style `passed` aggregate.

    `tamper` names an identity whose check is deliberately corrupted
    (negative control for harnesses).
    """
    forests = enumerate_forests_by_nodes(max_nodes, d, include_unit=True)
    nonempty = [T for T in forests if T.nodes]
    report = {"params": {"max_nodes": max_nodes, "d": d, "seed": seed,
                         "samples": samples},
              "identities": []}

    def record(name, ok, worst=None, detail=""):
        report["identities"].append(
            {"name": name, "ok": bool(ok),
             "worst": None if worst is None else float(worst),
             "detail": detail})

    coassoc_check = _tampered_coassoc if tamper == "coassociativity" \
        else check_coassociativity
    bad = [T for T in forests if not coassoc_check(T)]
    record("coassociativity", not bad,
           detail=f"{len(bad)} failing classes" if bad else
           f"exact on {len(forests)} classes")

    bad = [T for T in nonempty if not check_counit(T)]
    record("counit", not bad,
           detail="" if not bad else f"{len(bad)} failing classes")

    rng = np.random.default_rng(seed)
    small = [T for T in nonempty if len(T.nodes) <= max(1, max_nodes // 2)]
    ok = True
    for _ in range(10):
        T1 = small[int(rng.integers(0, len(small)))]
        T2 = small[int(rng.integers(0, len(small)))]
        if not check_product_rule(T1, T2):
            ok = False
    record("product-rule", ok, detail="10 random pairs")

    bad = [T for T in nonempty if not check_grading_additivity(T)]
    record("grading", not bad)

    if tamper == "conilpotency":
        record("conilpotency", False, detail="tampered")
    else:
        bad = [T for T in nonempty if not check_conilpotent(T)]
        record("conilpotency", not bad)

    bad = [T for T in nonempty
           if antipode_terms(T, "left") != antipode_terms(T, "right")]
    record("antipode-left-right", not bad)

    bad = [T for T in nonempty if not check_expectation_morphism(T)]
    record("untagging-morphism", not bad)

    # sampled character identities
    dim = max(2, d)
    sampler = lambda r: random_path(r, dim, breakpoints=4)
    f = LiftCharacter(0.0, 1.0, max_order=max_nodes)
    S = antipode_bogoliubov(f)
    SG = antipode_geometric(f)
    ident = convolve(f, S)
    worst_inv = 0.0
    worst_agree = 0.0
    eval_forests = [T for T in nonempty if len(T.nodes) <= max_nodes]
    per_forest = max(1, samples // max(1, len(eval_forests)))
    for T in eval_forests:
        for _ in range(per_forest):
            asg = SampleAssignment.draw(T, sampler, rng)
            worst_inv = max(worst_inv, float(np.max(np.abs(
                ident.evaluate(T, asg, dim)))))
            a = S.evaluate(T, asg, dim)
            b = SG.evaluate(T, asg, dim)
            worst_agree = max(worst_agree, float(np.max(np.abs(a - b))))
    if tamper == "hopf-inverse":
        worst_inv += 1.0
    record("hopf-inverse", worst_inv <= tol_inverse, worst_inv,
           f"tolerance {tol_inverse}")
    record("antipode-geometric-agreement", worst_agree <= tol_agree,
           worst_agree, f"tolerance {tol_agree}")

    report["passed"] = all(item["ok"] for item in report["identities"])
    return report
