from math import comb

import numpy as np
import pytest

from lionshopf.forest import ForestError, LionsForest, canonical_key
from lionshopf.hopf import SampleAssignment
from lionshopf.pathlift import (
    PiecewiseLinearPath,
    random_path,
    tree_integral_from_assignment,
)
from lionshopf.words import (
    LionsWord,
    WordAssignment,
    WordError,
    check_deconcat_coassociative,
    check_shuffle_grading,
    coupled_shuffle,
    deconcat,
    shuffle_sum,
    shuffle_terms,
    word_antipode,
    word_convolve,
    word_epsilon,
    word_integral,
    word_lift,
    word_to_ladder,
)

DIM = 2


def sampler(rng):
    return random_path(rng, DIM, breakpoints=4)


def random_word(rng, nmax=4, d=DIM):
    n = rng.integers(1, nmax + 1)
    letters = [int(rng.integers(1, d + 1)) for _ in range(n)]
    p0 = [p for p in range(1, n + 1) if rng.random() < 0.4]
    rest = [p for p in range(1, n + 1) if p not in p0]
    blocks = []
    for p in rest:
        if blocks and rng.random() < 0.5:
            blocks[int(rng.integers(0, len(blocks)))].append(p)
        else:
            blocks.append([p])
    return LionsWord(letters, p0, blocks)


class TestWordType:
    def test_validation(self):
        with pytest.raises(WordError):
            LionsWord((1, 2), (1,), ())        # position 2 uncovered
        with pytest.raises(WordError):
            LionsWord((1, 2), (1,), ((1, 2),))  # overlap with p0

    def test_json_roundtrip(self):
        W = LionsWord((1, 2, 1), (2,), ((1,), (3,)))
        assert LionsWord.from_json(W.to_json()) == W

    def test_grading(self):
        W = LionsWord((1, 2, 1), (2,), ((1, 3),))
        assert W.grading() == (1, 2)


class TestShuffle:
    def test_two_letters(self):
        W1 = LionsWord.letter(1)
        W2 = LionsWord.letter(2)
        got = coupled_shuffle(W1, W2)
        expect = {
            LionsWord((1, 2), (1, 2), ()): 1,
            LionsWord((2, 1), (1, 2), ()): 1,
        }
        assert got == expect

    def test_unit(self):
        W = LionsWord((1, 2), (1,), ((2,),))
        assert coupled_shuffle(W, LionsWord.unit()) == {W: 1}
        assert coupled_shuffle(LionsWord.unit(), W) == {W: 1}

    def test_term_count(self):
        rng = np.random.default_rng(0)
        for _ in range(8):
            W1, W2 = random_word(rng, 3), random_word(rng, 3)
            terms = shuffle_terms(W1, W2)
            assert len(terms) == comb(len(W1) + len(W2), len(W1))

    def test_commutative_and_associative(self):
        rng = np.random.default_rng(1)
        for _ in range(6):
            a, b, c = (random_word(rng, 2) for _ in range(3))
            ca, cb, cc = ({a: 1}, {b: 1}, {c: 1})
            assert shuffle_sum(ca, cb) == shuffle_sum(cb, ca)
            left = shuffle_sum(shuffle_sum(ca, cb), cc)
            right = shuffle_sum(ca, shuffle_sum(cb, cc))
            assert left == right

    def test_grading_respected(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            assert check_shuffle_grading(random_word(rng, 3), random_word(rng, 3))


class TestDeconcat:
    def test_term_count(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            W = random_word(rng)
            assert len(deconcat(W)) == len(W) + 1

    def test_pieces(self):
        W = LionsWord((1, 2, 1), (1,), ((2, 3),))
        terms = deconcat(W)
        prefix, suffix, coupling = terms[2]  # split after position 1
        assert prefix == LionsWord((1,), (1,), ())
        assert suffix == LionsWord((2, 1), (), ((1, 2),))
        assert coupling == W.blocks

    def test_coassociative(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            assert check_deconcat_coassociative(random_word(rng))


class TestLadder:
    def test_single_tagged_letter(self):
        T = word_to_ladder(LionsWord.letter(3))
        assert canonical_key(T) == canonical_key(LionsForest.single(3))

    def test_two_letter_tagged(self):
        W = LionsWord((1, 2), (1, 2), ())
        T = word_to_ladder(W)
        assert len(T) == 2 and len(T.roots()) == 1
        root = T.roots()[0]
        assert T.label[root] == 2  # root carries the last letter

    def test_invalid_transfer_rejected(self):
        # deep position tagged, root untagged: condition 2.1 fails
        W = LionsWord((1, 2), (1,), ((2,),))
        with pytest.raises(ForestError) as err:
            word_to_ladder(W)
        assert "2.1" in str(err.value)


class TestWordIntegral:
    def test_single_letter_increment(self):
        rng = np.random.default_rng(5)
        W = LionsWord.letter(1)
        path = sampler(rng)
        asg = WordAssignment(path, ())
        got = word_integral(W, asg, 0.2, 0.7)
        assert np.allclose(got[0], path.increment(0.2, 0.7)[0])
        assert got[1] == 0.0

    def test_two_letter_closed_form(self):
        # x(t) = (t, t^2) approximated by a fine piecewise-linear path would
        # not be exact, so use x(t) = (t, t) instead: int x1 dx2 = (t^2-s^2)/2
        # shifted by -x1(s)(t-s)
        x = PiecewiseLinearPath.linear([1.0, 1.0])
        W = LionsWord((1, 2), (1, 2), ())
        s, t = 0.2, 0.9
        got = word_integral(W, WordAssignment(x, ()), s, t)
        expect = (t * t - s * s) / 2 - s * (t - s)
        assert abs(got[0, 1] - expect) < 1e-14

    def test_matches_ladder_tree(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            W = random_word(rng, 4)
            try:
                T = word_to_ladder(W)
            except ForestError:
                continue
            asg = WordAssignment.draw(W, sampler, rng)
            wv = word_integral(W, asg, 0.1, 0.8)
            tv = tree_integral_from_assignment(
                T, SampleAssignment(asg.tagged, asg.blocks), 0.1, 0.8)
            assert np.max(np.abs(wv - tv)) <= 1e-12

    def test_shuffle_identity(self):
        rng = np.random.default_rng(7)
        for _ in range(6):
            W1, W2 = random_word(rng, 2), random_word(rng, 2)
            tagged = sampler(rng)
            b1 = [sampler(rng) for _ in W1.blocks]
            b2 = [sampler(rng) for _ in W2.blocks]
            a = word_integral(W1, WordAssignment(tagged, b1), 0.0, 1.0)
            b = word_integral(W2, WordAssignment(tagged, b2), 0.0, 1.0)
            lhs = np.multiply.outer(a, b)
            m = len(W1)
            rhs = np.zeros_like(lhs)
            for term in shuffle_terms(W1, W2):
                blocks = []
                for blk in term.word.blocks:
                    p = min(blk)
                    inv1 = {v: k for k, v in term.embed1.items()}
                    inv2 = {v: k for k, v in term.embed2.items()}
                    if p in term.embed1.values():
                        src = b1[[i for i, bb in enumerate(W1.blocks)
                                  if inv1[p] in bb][0]]
                    else:
                        src = b2[[i for i, bb in enumerate(W2.blocks)
                                  if inv2[p] in bb][0]]
                    blocks.append(src)
                val = word_integral(term.word, WordAssignment(tagged, blocks),
                                    0.0, 1.0)
                # permute slots back: axis embed(k)-1 of val is factor slot
                perm = [0] * (len(W1) + len(W2))
                for i, p in term.embed1.items():
                    perm[i - 1] = p - 1
                for j, p in term.embed2.items():
                    perm[m + j - 1] = p - 1
                rhs = rhs + np.transpose(val, perm)
            assert np.max(np.abs(lhs - rhs)) <= 1e-10


class TestWordCharacters:
    def test_antipode_single_letter_negates(self):
        rng = np.random.default_rng(8)
        f = word_lift(0.0, 1.0)
        for W in (LionsWord.letter(1), LionsWord.letter(2, tagged=False)):
            asg = WordAssignment.draw(W, sampler, rng)
            a = f.evaluate(W, asg, DIM)
            b = word_antipode(f).evaluate(W, asg, DIM)
            assert np.allclose(a, -b)

    def test_group_inverse(self):
        rng = np.random.default_rng(9)
        f = word_lift(0.0, 1.0)
        ident = word_convolve(f, word_antipode(f))
        for _ in range(10):
            W = random_word(rng, 4)
            asg = WordAssignment.draw(W, sampler, rng)
            val = ident.evaluate(W, asg, DIM)
            assert np.max(np.abs(val)) <= 1e-10

    def test_counit_neutral(self):
        rng = np.random.default_rng(10)
        f = word_lift(0.0, 1.0)
        for _ in range(5):
            W = random_word(rng, 3)
            asg = WordAssignment.draw(W, sampler, rng)
            a = f.evaluate(W, asg, DIM)
            b = word_convolve(f, word_epsilon).evaluate(W, asg, DIM)
            assert np.allclose(a, b)

    def test_chen_for_words(self):
        rng = np.random.default_rng(11)
        for _ in range(5):
            W = random_word(rng, 3)
            asg = WordAssignment.draw(W, sampler, rng)
            whole = word_lift(0.0, 1.0).evaluate(W, asg, DIM)
            split = word_convolve(word_lift(0.0, 0.4),
                                  word_lift(0.4, 1.0)).evaluate(W, asg, DIM)
            assert np.max(np.abs(whole - split)) <= 1e-10


def test_untagged_moves_positions_into_partition():
    W = LionsWord((1, 2, 1), (1, 3), ((2,),))
    E = W.untagged()
    assert E.p0 == frozenset()
    assert frozenset((1, 3)) in set(E.blocks)
    assert E.untagged() == E
