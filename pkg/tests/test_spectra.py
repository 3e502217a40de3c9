import math
import random

import pytest
from hypothesis import given, settings, strategies as st

import assocspectra as a
from assocspectra import ParseError, Partition, SpectrumPrefix


def delta_by_trees(pi):
    """Independent push-up oracle: tree-level operators plus a dict union-find."""
    n, p = pi.level, pi.arity
    src = a.enumerate_bracketings(n, p)
    dst = a.enumerate_bracketings(n + 1, p)
    rank = {t: i for i, t in enumerate(dst)}
    parent = list(range(len(dst)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    ops = [lambda t, i=i: a.gamma(t, i) for i in range(1, p + 1)]
    ops += [lambda t, i=i: a.beta(t, i) for i in range(1, (p - 1) * n + 2)]
    for op in ops:
        anchor = {}
        for r, t in enumerate(src):
            ir = rank[op(t)]
            c = pi.class_of[r]
            if c in anchor:
                ra, rb = find(anchor[c]), find(ir)
                if ra != rb:
                    parent[rb] = ra
            else:
                anchor[c] = ir
    return Partition(n + 1, p, [find(r) for r in range(len(dst))])


def random_partition(level, arity, rng):
    size = a.catalan(level, arity)
    return Partition(level, arity, [rng.randrange(max(1, size // 2)) for _ in range(size)])


class TestPartition:
    def test_totality_enforced(self):
        with pytest.raises(ValueError):
            Partition(3, 2, [0, 0, 0])  # level 3 has five bracketings

    def test_normalization(self):
        pi = Partition(2, 2, ["b", "a"])
        assert pi.class_of == (0, 1) and pi.num_classes == 2
        assert pi == Partition(2, 2, [7, 3])

    def test_equality_and_full(self):
        assert Partition.equality(3, 2).num_classes == 5
        assert Partition.full(3, 2).num_classes == 1
        assert Partition.equality(0, 2) == Partition.full(0, 2)

    def test_classes(self):
        pi = Partition(3, 2, [0, 1, 0, 1, 2])
        assert pi.classes() == ((0, 2), (1, 3), (4,))

    def test_refines(self):
        fine = Partition.equality(3, 2)
        coarse = Partition.full(3, 2)
        assert fine.refines(coarse)
        assert not coarse.refines(fine)
        assert fine.refines(fine)

    def test_level_mismatch(self):
        with pytest.raises(ValueError):
            Partition.full(2, 2).refines(Partition.full(3, 2))

    def test_from_key(self):
        pi = Partition.from_key(3, 2, lambda u: u[-1])
        assert pi.num_classes == 3  # last entries 1, 2, 3


class TestGammaBeta:
    def test_gamma_examples(self):
        xx = a.parse_bracketing("wxx", 2)
        assert a.gamma(xx, 1) is a.parse_bracketing("wwxxx", 2)
        assert a.gamma(a.leaf(2), 2) is xx
        with pytest.raises(ValueError):
            a.gamma(xx, 2, p=3)  # binary bracketing cannot feed a ternary wrap

    def test_gamma_position_checked(self):
        with pytest.raises(ValueError):
            a.gamma(a.leaf(2), 3)
        assert a.render_bracketing(a.gamma(a.leaf(3), 2)) == "wxxx"

    def test_beta_examples(self):
        xx = a.parse_bracketing("wxx", 2)
        assert a.beta(xx, 1) is a.parse_bracketing("wwxxx", 2)
        assert a.beta(a.leaf(2), 1) is xx
        got = a.beta(a.parse_bracketing("(x(xx))", 2, "infix"), 1)
        assert got is a.parse_bracketing("((xx)(xx))", 2, "infix")

    def test_beta_matches_manual_substitution(self):
        # replacing the second variable of (x((xx)x)) grows (xx) in its place
        t = a.parse_bracketing("(x((xx)x))", 2, "infix")
        got = a.beta(t, 2)
        assert a.render_bracketing(got, "infix") == "(x(((xx)x)x))"

    def test_beta_position_checked(self):
        with pytest.raises(ValueError):
            a.beta(a.leaf(2), 2)
        with pytest.raises(ValueError):
            a.beta(a.leaf(2), 0)

    def test_operators_raise_occurrence(self):
        for n in range(4):
            for t in a.enumerate_bracketings(n, 3):
                assert a.gamma(t, 1).occ == n + 1
                assert a.beta(t, t.length).occ == n + 1


class TestDelta:
    def test_full_stays_full(self):
        assert a.delta(Partition.full(2, 2)) == Partition.full(3, 2)

    def test_equality_stays_equality(self):
        for n in range(5):
            assert a.delta(Partition.equality(n, 2)) == Partition.equality(n + 1, 2)

    def test_matches_tree_oracle_on_named_partitions(self):
        cases = [
            Partition.full(2, 2),
            Partition.full(3, 2),
            a.tau(4),
            a.tau(5),
            a.left_factor_sigma(3, 1),
            a.dldr_sigma(4),
            Partition.full(2, 3),
            a.tail_tuple_sigma(3, 1, 3),
        ]
        for pi in cases:
            assert a.delta(pi) == delta_by_trees(pi)

    def test_matches_tree_oracle_on_random_partitions(self):
        rng = random.Random(7)
        for _ in range(20):
            pi = random_partition(rng.randrange(1, 5), 2, rng)
            assert a.delta(pi) == delta_by_trees(pi)

    def test_total_output(self):
        for n in range(5):
            out = a.delta(a.tau(n))
            assert out.size == a.catalan(n + 1, 2)

    def test_tau_gap_at_five(self):
        pushed = a.delta(a.tau(4))
        assert pushed == Partition.equality(5, 2)
        assert pushed.refines(a.tau(5))
        assert pushed != a.tau(5)

    @settings(max_examples=40)
    @given(st.data())
    def test_monotone(self, data):
        level = data.draw(st.integers(1, 4))
        size = a.catalan(level, 2)
        fine_labels = data.draw(
            st.lists(st.integers(0, size - 1), min_size=size, max_size=size))
        merge = {c: data.draw(st.integers(0, 2)) for c in set(fine_labels)}
        fine = Partition(level, 2, fine_labels)
        coarse = Partition(level, 2, [merge[c] for c in fine_labels])
        assert a.delta(fine).refines(a.delta(coarse))


class TestVerifyClosed:
    def test_left_factor_prefixes_closed(self):
        for k in (1, 2, 3):
            sigma = a.build_prefix(lambda n, k=k: a.left_factor_sigma(n, k), 6)
            assert a.verify_closed(sigma).closed

    def test_coatom_prefix_closed(self):
        sigma = SpectrumPrefix(
            [Partition.full(0, 2), Partition.full(1, 2), Partition.equality(2, 2),
             Partition.full(3, 2), Partition.full(4, 2)])
        assert a.verify_closed(sigma).closed

    def test_equality_after_full_violates(self):
        parts = [Partition.full(n, 2) for n in range(5)] + [Partition.equality(5, 2)]
        report = a.verify_closed(SpectrumPrefix(parts))
        assert not report.closed and report.level == 4
        s, t = report.witness
        assert s != t and len(s) == len(t) == 5

    def test_full_island_violates_at_its_level(self):
        parts = [Partition.equality(n, 2) for n in range(7)]
        parts[5] = Partition.full(5, 2)
        report = a.verify_closed(SpectrumPrefix(parts))
        assert not report.closed and report.level == 5

    def test_witness_pair_is_really_required(self):
        parts = [Partition.full(n, 2) for n in range(5)] + [Partition.equality(5, 2)]
        report = a.verify_closed(SpectrumPrefix(parts))
        s, t = report.witness
        pushed = a.delta(Partition.full(4, 2))
        from assocspectra.insertion import _level_rank
        rank = _level_rank(5, 2)
        assert pushed.class_of[rank[s]] == pushed.class_of[rank[t]]


class TestMeet:
    def test_identity_and_absorbing(self):
        for x in (a.tau(5), a.left_factor_sigma(5, 2), a.dldr_sigma(5)):
            assert a.partition_meet(Partition.full(5, 2), x) == x
            assert a.partition_meet(Partition.equality(5, 2), x) == Partition.equality(5, 2)

    def test_left_meets_right_factor(self):
        trees = a.enumerate_bracketings(3, 2)

        def right_lengths(t, k):
            out = []
            s = t
            for _ in range(k):
                if not s.is_leaf:
                    s = s.children[-1]
                out.append(s.length)
            return tuple(out)

        # single factor lengths leave the two outer combs paired up
        right1 = Partition(3, 2, [right_lengths(t, 1) for t in trees])
        met1 = a.partition_meet(a.left_factor_sigma(3, 1), right1)
        brute = Partition(
            3, 2, [(a.left_lengths(t, 1), right_lengths(t, 1)) for t in trees])
        assert met1 == brute
        assert met1.num_classes == 3
        # two iterated factors on both sides separate the whole level
        right2 = Partition(3, 2, [right_lengths(t, 2) for t in trees])
        met2 = a.partition_meet(a.left_factor_sigma(3, 2), right2)
        assert met2 == Partition.equality(3, 2)

    def test_mismatch(self):
        with pytest.raises(ValueError):
            a.partition_meet(Partition.full(2, 2), Partition.full(2, 3))


class TestCovers:
    def _top(self, horizon, p=2):
        return SpectrumPrefix([Partition.full(n, p) for n in range(horizon + 1)])

    def _coatom(self, horizon):
        parts = [Partition.full(n, 2) for n in range(horizon + 1)]
        parts[2] = Partition.equality(2, 2)
        return SpectrumPrefix(parts)

    def test_coatom_is_covered_by_top(self):
        assert a.covers(self._coatom(4), self._top(4)) is True

    def test_no_difference_no_cover(self):
        top = self._top(4)
        assert a.covers(top, top) is False

    def test_two_level_difference_no_cover(self):
        lower = a.build_prefix(lambda n: a.left_factor_sigma(n, 1), 4)
        assert a.covers(lower, self._top(4)) is False

    def test_precondition_errors(self):
        with pytest.raises(ValueError):
            a.covers(self._coatom(4), self._top(5))
        # not levelwise finer: coatom vs a prefix that is equality at level 3
        other = SpectrumPrefix(
            [Partition.full(0, 2), Partition.full(1, 2), Partition.full(2, 2),
             Partition.equality(3, 2), Partition.full(4, 2)])
        with pytest.raises(ValueError):
            a.covers(self._coatom(4), other)


class TestTau:
    def test_small_levels_are_equality(self):
        assert a.tau(1) == Partition.equality(1, 2)
        assert a.tau(4) == Partition.equality(4, 2)
        assert a.tau(4).num_classes == 14

    def test_level_five(self):
        pi = a.tau(5)
        assert pi.num_classes == 41
        big = [ranks for ranks in pi.classes() if len(ranks) > 1]
        assert len(big) == 1
        trees = a.enumerate_bracketings(5, 2)
        members = {a.render_bracketing(trees[r], "infix") for r in big[0]}
        assert members == {"((xx)((xx)(xx)))", "(((xx)(xx))(xx))"}

    def test_word_oracle(self):
        for n in range(7):
            trees = a.enumerate_bracketings(n, 2)
            labels = [
                -1 if a.render_bracketing(t).count("wxx") >= 3 else r
                for r, t in enumerate(trees)]
            assert a.tau(n) == Partition(n, 2, labels)

    def test_threshold_parameter(self):
        lowered = a.tau(2, min_eggs=1)
        assert lowered == Partition.full(2, 2)

    def test_prefix_closed(self):
        assert a.verify_closed(a.build_prefix(a.tau, 6)).closed

    def test_gap_with_witness_singleton(self):
        for n in (5, 6):
            witness = a.parse_bracketing(
                "(" * (n - 4) + "((xx)(xx))" + "x)" * (n - 5) + "(xx))", 2, "infix")
            assert witness.occ == n and a.egg_pairs(witness) == 3
            pushed = a.delta(a.tau(n - 1))
            assert pushed.refines(a.tau(n))
            assert pushed != a.tau(n)
            rank = a.enumerate_bracketings(n, 2).index(witness)
            assert pushed.classes()[pushed.class_of[rank]] == (rank,)
            assert len(a.tau(n).classes()[a.tau(n).class_of[rank]]) > 1


class TestSigmaA:
    def test_all_zero(self):
        sigma = a.sigma_a("000000")
        assert sigma.horizon == 5
        assert all(sigma[n] == Partition.equality(n, 2) for n in range(6))

    def test_single_one(self):
        sigma = a.sigma_a("0000010")
        assert sigma[5] == a.tau(5)
        assert sigma[6] == a.delta(a.tau(5))

    def test_closed_for_all_short_strings(self):
        for bits in ("00000", "000001", "0000010", "00000110", "00000101"):
            assert a.verify_closed(a.sigma_a(bits)).closed

    def test_divergence_at_first_difference(self):
        lo = a.sigma_a("0000000")
        hi = a.sigma_a("0000010")
        assert lo[5].refines(hi[5])
        assert lo[5].num_classes > hi[5].num_classes

    def test_refines_tau_levelwise(self):
        for bits in ("0000011", "00000101"):
            sigma = a.sigma_a(bits)
            for n in range(sigma.horizon + 1):
                assert sigma[n].refines(a.tau(n))

    @pytest.mark.parametrize("bad", ["0000", "10000", "00001", "00000a"])
    def test_validation(self, bad):
        with pytest.raises(ValueError):
            a.sigma_a(bad)


class TestLeftFactorSigma:
    def test_examples(self):
        assert a.left_factor_sigma(3, 1).num_classes == 3
        assert a.left_factor_sigma(1, 2).num_classes == 1
        assert a.left_factor_sigma(4, 2).num_classes == 7

    def test_count_formula(self):
        for k in (1, 2, 3):
            for n in range(1, 9):
                want = sum(math.comb(n - 1, i) for i in range(k + 1))
                assert a.left_factor_sigma(n, k).num_classes == want


class TestTailTupleSigma:
    def test_examples(self):
        assert a.tail_tuple_sigma(4, 1, 2).num_classes == 4
        assert a.tail_tuple_sigma(2, 5, 2) == Partition.equality(2, 2)
        # brute force: the last-two slices of the five level-3 tuples are distinct
        slices = {u[1:] for u in a.enumerate_m(3, 1, 2)}
        assert a.tail_tuple_sigma(3, 2, 2).num_classes == len(slices) == 5

    def test_count_formula(self):
        for p in (2, 3):
            for k in (1, 2, 3):
                for n in range(9):
                    got = a.tail_tuple_sigma(n, k, p).num_classes
                    if n < k:
                        assert got == a.catalan(n, p)
                    else:
                        num = ((p - 1) * (n - k) + 1) * math.comb((p - 1) * n + k, k)
                        den = (p - 1) * n + 1
                        assert num % den == 0
                        assert got == num // den

    def test_tail_slices_equal_relaxed_family(self):
        # the last k entries of level tuples sweep M(k, (p-1)(n-k)+1, p) shifted nowhere
        n, k, p = 5, 2, 2
        slices = {u[n - k:] for u in a.enumerate_m(n, 1, p)}
        assert slices == set(a.enumerate_m(k, (p - 1) * (n - k) + 1, p))


class TestDldrSigma:
    def test_level_three(self):
        pi = a.dldr_sigma(3)
        assert pi.num_classes == 5
        trees = a.enumerate_bracketings(3, 2)
        keys = {a.left_right_depth(t) for t in trees}
        assert keys == {(3, 1), (2, 1), (2, 2), (1, 2), (1, 3)}

    def test_small_levels(self):
        assert a.dldr_sigma(0).num_classes == 1
        assert a.dldr_sigma(1).num_classes == 1
        assert a.dldr_sigma(2).num_classes == 2

    def test_count_formula(self):
        for n in range(2, 11):
            assert a.dldr_sigma(n).num_classes == (n * n + n - 2) // 2

    def test_matches_tree_depths(self):
        for n in range(7):
            trees = a.enumerate_bracketings(n, 2)
            assert a.dldr_sigma(n) == Partition(n, 2, [a.left_right_depth(t) for t in trees])

    def test_prefix_closed(self):
        assert a.verify_closed(a.build_prefix(a.dldr_sigma, 6)).closed


class TestCoatomCensus:
    @pytest.mark.parametrize("p,want", [(2, 1), (3, 3), (4, 7)])
    def test_counts(self, p, want):
        assert a.coatom_census(p) == want

    def test_arity_range(self):
        with pytest.raises(ValueError):
            a.coatom_census(7)


class TestCongruenceBound:
    def test_class_counts_bounded_by_composition_sum(self):
        def bound(counts, p):
            total = 0
            n = len(counts)

            def rec(parts_left, remaining, acc):
                nonlocal total
                if parts_left == 1:
                    total += acc * counts[remaining]
                    return
                for i in range(remaining + 1):
                    rec(parts_left - 1, remaining - i, acc * counts[i])

            rec(p, n - 1, 1)
            return total

        for sigma in (a.build_prefix(lambda n: a.left_factor_sigma(n, 2), 6),
                      a.build_prefix(a.tau, 6),
                      a.build_prefix(a.dldr_sigma, 6)):
            counts = [pi.num_classes for pi in sigma.partitions]
            for n in range(1, len(counts)):
                assert counts[n] <= bound(counts[:n], 2)


class TestTextFormats:
    def test_partition_block(self):
        pi = Partition(2, 2, [0, 1])
        assert a.format_partition(pi) == (
            "level=2 p=2 classes=2\nclass 0: (1,1)\nclass 1: (1,2)")

    def test_roundtrip(self):
        for pi in (a.tau(5), a.left_factor_sigma(4, 2), Partition.full(3, 2),
                   a.tail_tuple_sigma(3, 1, 3)):
            assert a.parse_partition(a.format_partition(pi)) == pi

    def test_prefix_roundtrip(self):
        sigma = a.build_prefix(lambda n: a.left_factor_sigma(n, 1), 4)
        text = a.format_spectrum_prefix(sigma)
        assert a.parse_spectrum_prefix(text) == sigma

    @pytest.mark.parametrize("bad", [
        "",
        "level=x p=2 classes=1",
        "level=2 p=2 classes=2\nclass 0: (1,1)",
        "level=2 p=2 classes=1\nclass 0: (1,1)",
        "level=2 p=2 classes=2\nclass 0: (1,1)\nclass 2: (1,2)",
        "level=2 p=2 classes=2\nclass 0: (1,1) (1,1)\nclass 1: (1,2)",
        "level=2 p=2 classes=2\nclass 0: (1,1)\nclass 1: (9,9)",
    ])
    def test_parse_errors(self, bad):
        with pytest.raises(ParseError):
            a.parse_partition(bad)

    def test_prefix_needs_blocks(self):
        with pytest.raises(ParseError):
            a.parse_spectrum_prefix("  \n ")


class TestSpectrumPrefix:
    def test_levels_checked(self):
        with pytest.raises(ValueError):
            SpectrumPrefix([Partition.full(1, 2)])
        with pytest.raises(ValueError):
            SpectrumPrefix([Partition.full(0, 2), Partition.full(2, 2)])

    def test_arity_checked(self):
        with pytest.raises(ValueError):
            SpectrumPrefix([Partition.full(0, 2), Partition.full(1, 3)])

    def test_full_level_forces_full_tail_in_closed_prefixes(self):
        # closed prefixes that reach the one-class partition stay there
        sigma = SpectrumPrefix(
            [Partition.equality(n, 2) for n in range(2)]
            + [Partition.full(n, 2) for n in range(2, 7)])
        assert a.verify_closed(sigma).closed
        for n in range(2, 7):
            assert sigma[n].num_classes == 1
