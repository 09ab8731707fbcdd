import math

import numpy as np
import pytest
from scipy import stats

from lionshopf.empirical import (
    EmpiricalError,
    EmpiricalLift,
    Labeling,
    centering_residual,
    collapse,
    collapse_probability_two_slots,
    empirical_lift,
    evaluate_collapsed,
    lln_experiment,
    random_labeling,
    symmetrize_phi,
    ustat_all,
    ustat_distinct,
)
from lionshopf.forest import LionsForest, graft, product
from lionshopf.hopf import convolve
from lionshopf.pathlift import LiftCharacter, PiecewiseLinearPath, random_path

DIM = 1


def sampler(rng):
    return random_path(rng, DIM, breakpoints=3)


def two_atom_sampler(rng):
    up = PiecewiseLinearPath.linear([1.0])
    down = PiecewiseLinearPath.linear([-1.0])
    return up if rng.random() < 0.5 else down


def mixed_tree():
    """One tagged node carrying one untagged child."""
    return LionsForest(range(2), {0: None, 1: 0}, {0: 1, 1: 1}, [0], [[1]])


class TestLabeling:
    def test_bounds(self):
        T = mixed_tree()
        with pytest.raises(EmpiricalError):
            random_labeling(T, 3, 2, 0)

    def test_n_one_collapses_everything(self):
        T = mixed_tree()
        lab = random_labeling(T, 1, 1, 0)
        col = collapse(T, lab)
        assert len(col.partition.blocks) == 1
        assert col.merged_anything

    def test_distinct_indices_keep_structure(self):
        T = mixed_tree()
        lab = Labeling(5, 1, (2,))
        col = collapse(T, lab)
        assert len(col.partition.blocks) == len(T.hyperedge_family())
        assert not col.merged_anything

    def test_collision_probability(self):
        # tagged slot plus two hyperedge slots over n = 4 particles
        n = 4
        assert collapse_probability_two_slots(n) == pytest.approx(0.625)
        T = graft(product(LionsForest.single(1, tagged=False),
                          LionsForest.single(1, tagged=False)), 1)
        assert len(T.hyperedges) == 2
        rng = np.random.default_rng(0)
        hits = 0
        trials = 4000
        for _ in range(trials):
            col = collapse(T, random_labeling(T, 1, n, rng))
            hits += col.merged_anything
        rate = hits / trials
        se = math.sqrt(rate * (1 - rate) / trials)
        assert abs(rate - 0.625) <= 3 * se


class TestEmpiricalLift:
    def test_single_path_population(self):
        rng = np.random.default_rng(1)
        path = sampler(rng)
        emp = EmpiricalLift([path], 1, 0.0, 1.0)
        T = mixed_tree()
        lab = emp.draw_labeling(T, rng)
        assert lab.assignment == (1,)
        val = emp.evaluate_with_labeling(T, lab, DIM)
        col = collapse(T, lab)
        assert np.array_equal(val, evaluate_collapsed(col, [path], 0.0, 1.0))

    def test_labeling_route_matches_collapsed_route(self):
        rng = np.random.default_rng(2)
        paths = [sampler(rng) for _ in range(5)]
        emp = EmpiricalLift(paths, 2, 0.0, 1.0)
        T = graft(product(LionsForest.single(1, tagged=False),
                          LionsForest.single(1, tagged=False)), 1)
        for _ in range(10):
            lab = emp.draw_labeling(T, rng)
            direct = emp.evaluate_with_labeling(T, lab, DIM)
            collapsed = evaluate_collapsed(collapse(T, lab), paths, 0.0, 1.0)
            assert np.array_equal(direct, collapsed)

    def test_chen_per_realized_labeling(self):
        rng = np.random.default_rng(3)
        paths = [sampler(rng) for _ in range(4)]
        T = mixed_tree()
        for _ in range(5):
            lab = random_labeling(T, 1, 4, rng)
            emp_su = EmpiricalLift(paths, 1, 0.0, 1.0)
            asg = emp_su.assignment_from_labeling(T, lab)
            whole = LiftCharacter(0.0, 1.0).evaluate(T, asg, DIM)
            split = convolve(LiftCharacter(0.0, 0.4),
                             LiftCharacter(0.4, 1.0)).evaluate(T, asg, DIM)
            assert np.max(np.abs(whole - split)) <= 1e-9

    def test_population_guard(self):
        rng = np.random.default_rng(4)
        paths = [sampler(rng)]
        with pytest.raises(EmpiricalError):
            empirical_lift(paths, 1, 0.0, 1.0, alpha=0.4)  # needs n > 2


class TestLln:
    def test_deterministic_path_zero_discrepancy(self):
        det = PiecewiseLinearPath.linear([1.0])
        out = lln_experiment(lambda rng: det, [mixed_tree()], 1,
                             n_grid=[2, 4], replications=3, atoms=3,
                             grid_level=2, seed=5)
        for row in out["rows"]:
            assert row["mean"] == 0.0

    def test_first_level_zero(self):
        T = LionsForest.single(1)
        out = lln_experiment(two_atom_sampler, [T], 1, n_grid=[2, 4],
                             replications=3, atoms=3, grid_level=2, seed=6)
        for row in out["rows"]:
            assert row["mean"] == 0.0

    def test_trend_two_atoms(self):
        out = lln_experiment(two_atom_sampler, [mixed_tree()], 1,
                             n_grid=[4, 16, 64], replications=24,
                             grid_level=2, seed=7)
        means = [row["mean"] for row in out["rows"]]
        assert means[0] > means[-1]
        assert out["endpoint_confident"]

    def test_replication_guard(self):
        with pytest.raises(EmpiricalError):
            lln_experiment(two_atom_sampler, [mixed_tree()], 1,
                           n_grid=[2], replications=1)


class TestUStatistics:
    def test_counting_identity(self):
        rng = np.random.default_rng(8)
        xs = rng.uniform(size=50)
        for ell in (1, 2, 3):
            ones = lambda *a: sum(np.asarray(t) * 0.0 for t in a) + 1.0
            got = ustat_distinct(ones, xs[:12], ell)
            n = 12
            expect = math.perm(n, ell) / n ** ell
            assert got == pytest.approx(expect)

    def test_product_uniform(self):
        rng = np.random.default_rng(9)
        xs = rng.uniform(size=2000)
        f = lambda x, y: x * y
        a = ustat_all(f, xs, 2)
        d = ustat_distinct(f, xs, 2)
        se = 2 * np.std(xs) / math.sqrt(len(xs))  # rough scale
        assert abs(a - 0.25) <= 4 * se
        assert abs(d - 0.25) <= 4 * se

    def test_gap_slope(self):
        rng = np.random.default_rng(10)
        ns = [250, 500, 1000, 2000]
        gaps = []
        for n in ns:
            reps = []
            for _ in range(10):
                xs = rng.uniform(size=n)
                reps.append(ustat_all(lambda x, y: x * y, xs, 2)
                            - ustat_distinct(lambda x, y: x * y, xs, 2))
            gaps.append(np.mean(reps))
        fit = stats.linregress(np.log(ns), np.log(gaps))
        assert -1.2 <= fit.slope <= -0.8

    def test_distinct_needs_enough_samples(self):
        with pytest.raises(EmpiricalError):
            ustat_distinct(lambda x, y: x * y, np.array([1.0]), 2)


class TestSymmetrize:
    def scalar_sampler(self, rng):
        return float(rng.uniform())

    def test_ell_one_is_mean(self):
        phis = symmetrize_phi(lambda x: x, 1, self.scalar_sampler,
                              inner_samples=4000, rng=11)
        assert phis[0]() == pytest.approx(0.5, abs=0.02)

    def test_constant_f_telescopes(self):
        c = 2.5
        ell = 3
        phis = symmetrize_phi(lambda *a: c, ell, self.scalar_sampler,
                              inner_samples=10, rng=12)
        # phi_j = (-1)^(ell-1-j) c, and the double sum telescopes to c
        total = 0.0
        for j in range(ell):
            expect = ((-1.0) ** (ell - 1 - j)) * c
            assert phis[j](*([0.0] * j)) == pytest.approx(expect)
            total += math.comb(ell, j) * expect
        assert total == pytest.approx(c)

    def test_centering_product(self):
        f = lambda x, y: x * y
        phis = symmetrize_phi(f, 2, self.scalar_sampler,
                              inner_samples=3000, rng=13)
        out = centering_residual(f, phis, 2, self.scalar_sampler,
                                 cond_size=1, outer=400, rng=14)
        assert out["ok"]

    def test_cost_guard(self):
        with pytest.raises(EmpiricalError):
            symmetrize_phi(lambda *a: 1.0, 5, self.scalar_sampler)


def test_thread_count_invariance():
    # per-replicate RNG substreams make the table independent of threading
    a = lln_experiment(two_atom_sampler, [mixed_tree()], 1, n_grid=[2, 4],
                       replications=4, grid_level=2, seed=11, threads=1)
    b = lln_experiment(two_atom_sampler, [mixed_tree()], 1, n_grid=[2, 4],
                       replications=4, grid_level=2, seed=11, threads=3)
    assert a["rows"] == b["rows"]


def test_distinct_mode_exactly_unbiased_on_finite_support():
    # enumerate every {0,1}-valued sample vector of length 4: the mean of
    # the estimator, rescaled by n^2 / (n (n-1)), equals E[xy] = 1/4 exactly
    import itertools
    from fractions import Fraction

    n = 4
    f = lambda x, y: x * y
    total = Fraction(0)
    for xs in itertools.product((0, 1), repeat=n):
        est = sum(f(xs[i], xs[j]) for i in range(n) for j in range(n)
                  if i != j)
        total += Fraction(est, n * (n - 1))
    assert total / 2 ** n == Fraction(1, 4)
    # and the implementation matches the raw definition on one vector
    xs = np.array([1.0, 0.0, 1.0, 1.0])
    raw = sum(xs[i] * xs[j] for i in range(n) for j in range(n) if i != j)
    assert ustat_distinct(f, xs, 2) == pytest.approx(raw / n ** 2)
