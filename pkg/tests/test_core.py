import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abmv import core
from abmv.core import (
    ABCCV,
    AV,
    MAV,
    NSAV,
    PAV,
    SAV,
    ConfigurationError,
    DomainError,
    Election,
    UnsupportedRuleError,
    thiele,
)


def election(votes, m=None, prefix="c"):
    cands = sorted({c for v in votes for c in v})
    if m is not None:
        cands = [f"{prefix}{i}" for i in range(m)]
    return Election(cands, votes)


@st.composite
def elections(draw, m_max=6, n_max=6):
    m = draw(st.integers(1, m_max))
    cands = [f"c{i}" for i in range(m)]
    votes = draw(st.lists(st.sets(st.sampled_from(cands)), min_size=0, max_size=n_max))
    return Election(cands, votes)


class TestAdditiveScores:
    def test_sav_example1(self, example1_full):
        scores = core.additive_scores(SAV, example1_full)
        assert scores["x"] == scores["y"] == scores["z"] == Fraction(7, 4)
        assert scores["a"] == Fraction(5, 3)
        assert scores["b"] == scores["c"] == Fraction(5, 6)
        assert all(scores[d] < 1 for d in ("d1", "d2", "d3"))

    def test_av_zero_votes(self):
        e = Election(["a", "b"], [])
        assert core.additive_candidate_score(AV, e, "a") == 0

    def test_nsav_hand_oracle(self):
        e = Election(["a", "b", "c", "d"], [{"a"}, {"a", "b"}])
        assert core.additive_candidate_score(NSAV, e, "a") == Fraction(3, 2)
        # b: 1/2 from the second vote, minus 1/(4-1) from the first
        assert core.additive_candidate_score(NSAV, e, "b") == Fraction(1, 2) - Fraction(1, 3)

    def test_unknown_candidate(self, example1_full):
        with pytest.raises(DomainError):
            core.additive_candidate_score(SAV, example1_full, "nobody")

    def test_nonadditive_rule_rejected(self, example1_full):
        with pytest.raises(UnsupportedRuleError):
            core.additive_candidate_score(PAV, example1_full, "x")

    def test_empty_ballot_contributes_nothing_under_sav(self):
        e = Election(["a"], [set(), {"a"}])
        assert core.additive_candidate_score(SAV, e, "a") == 1

    def test_full_ballot_penalizes_nobody_under_nsav(self):
        e = Election(["a", "b"], [{"a", "b"}])
        assert core.additive_candidate_score(NSAV, e, "a") == Fraction(1, 2)


class TestCommitteeScore:
    def test_mav_example2(self):
        e = Election(["a", "b", "c", "d"], [{"b"}, {"a", "c"}, {"a", "d"}])
        assert core.committee_score(MAV, e, {"a"}) == 2

    def test_thiele_all_empty_votes(self):
        e = Election(["a", "b"], [set(), set()])
        for rule in (PAV, ABCCV, thiele([0, 1, 1])):
            assert core.committee_score(rule, e, {"a", "b"}) == 0

    def test_abccv_example3(self):
        e = Election(["a", "b", "c", "d"], [{"a"}, {"b", "d"}, {"b", "d"}, {"c", "d"}, {"c", "d"}])
        assert core.committee_score(ABCCV, e, {"b", "c"}) == 4

    def test_short_omega_table_rejected(self):
        e = Election(["a", "b", "c"], [{"a", "b", "c"}])
        with pytest.raises(ConfigurationError):
            core.committee_score(thiele([0, 1]), e, {"a", "b", "c"})

    def test_mav_empty_vote_multiset_scores_zero(self):
        e = Election(["a", "b"], [])
        assert core.committee_score(MAV, e, {"a"}) == 0


class TestHamming:
    @pytest.mark.parametrize(
        "a,b,expected",
        [({"a"}, {"a"}, 0), ({"a"}, {"b"}, 2), ({"p", "d1"}, {"p", "d3", "d4"}, 3)],
    )
    def test_examples(self, a, b, expected):
        assert core.hamming_distance(a, b) == expected


class TestThresholdAndPartition:
    def test_example1_threshold(self, example1_full):
        assert core.k_winning_threshold(SAV, example1_full, 2) == Fraction(7, 4)

    def test_single_candidate(self):
        e = Election(["a"], [{"a"}, {"a"}])
        assert core.k_winning_threshold(AV, e, 1) == 2

    def test_out_of_range(self, example1_full):
        with pytest.raises(DomainError):
            core.k_winning_threshold(SAV, example1_full, 0)
        with pytest.raises(DomainError):
            core.k_winning_threshold(SAV, example1_full, 10)

    def test_example1_partition(self, example1_full):
        part = core.partition_candidates(SAV, example1_full, 2)
        assert part.swin == frozenset()
        assert part.pwin == {"x", "y", "z"}
        assert part.slose == {"a", "b", "c", "d1", "d2", "d3"}

    def test_distinct_scores_fill_swin(self):
        e = Election(["a", "b", "c"], [{"a"}, {"a"}, {"a", "b"}])
        part = core.partition_candidates(AV, e, 2)
        assert part.swin == {"a", "b"} and part.pwin == frozenset()

    def test_nonadditive_rejected(self, example1_full):
        with pytest.raises(UnsupportedRuleError):
            core.partition_candidates(MAV, example1_full, 2)

    @settings(max_examples=120, deadline=None)
    @given(elections(m_max=6, n_max=6), st.randoms(use_true_random=False))
    def test_partition_matches_bruteforce_argmax(self, e, rnd):
        k = rnd.randint(1, e.m)
        for rule in (AV, SAV, NSAV):
            part = core.partition_candidates(rule, e, k)
            scores = core.additive_scores(rule, e)
            best = None
            arg = set()
            for combo in combinations(e.candidates, k):
                s = sum((scores[c] for c in combo), Fraction(0))
                if best is None or s > best:
                    best, arg = s, {frozenset(combo)}
                elif s == best:
                    arg.add(frozenset(combo))
            family = {
                frozenset(part.swin | set(extra))
                for extra in combinations(sorted(part.pwin), k - len(part.swin))
            }
            assert family == arg
            # partition invariants
            assert part.swin | part.pwin | part.slose == set(e.candidates)
            at = [c for c in e.candidates if scores[c] == part.threshold]
            assert (part.pwin == frozenset()) == (len(at) == 1)
            assert len(part.swin) <= k <= len(part.swin) + len(part.pwin)

    def test_tie_break_never_moves_threshold(self):
        # permuting the roster permutes only labels, never the partition
        votes = [{"a", "b"}, {"b"}, {"c"}, {"a", "c", "d"}]
        base = Election(["a", "b", "c", "d"], votes)
        part = core.partition_candidates(SAV, base, 2)
        shuffled = Election(["d", "c", "b", "a"], votes)
        part2 = core.partition_candidates(SAV, shuffled, 2)
        assert part.threshold == part2.threshold
        assert part.swin == part2.swin and part.pwin == part2.pwin


class TestRestrictAndPad:
    def test_restrict_identity(self, example1_full):
        assert core.restrict(example1_full, example1_full.candidates) == example1_full

    def test_restrict_projection(self):
        e = Election(["a", "b"], [{"a", "b"}])
        r = core.restrict(e, {"a"})
        assert r.candidates == ("a",) and r.votes == (frozenset({"a"}),)

    def test_restrict_preserves_vote_indices(self):
        e = Election(["a", "b"], [{"b"}, {"a"}])
        r = core.restrict(e, {"a"})
        assert r.votes == (frozenset(), frozenset({"a"}))

    def test_pad_zero_is_identity(self, example1_full):
        assert core.pad_with_dummies(example1_full, 0) == example1_full

    def test_pad_adds_unapproved(self):
        e = Election(["a"], [{"a"}])
        p = core.pad_with_dummies(e, 3)
        assert p.m == 4 and all(len(v) == 1 for v in p.votes)

    @settings(max_examples=60, deadline=None)
    @given(elections(m_max=5, n_max=5))
    def test_lemma2_order_preservation(self, e):
        if e.m < 2:
            return
        padded = core.pad_with_dummies(e, max(1, e.n) * e.m * e.m)
        sav = core.additive_scores(SAV, e)
        nsav = core.additive_scores(NSAV, padded)
        for a in e.candidates:
            for b in e.candidates:
                if sav[a] != sav[b]:
                    assert (sav[a] > sav[b]) == (nsav[a] > nsav[b])


class TestRules:
    def test_orientation(self):
        assert MAV.orientation == "minimize"
        assert all(r.orientation == "maximize" for r in (AV, SAV, NSAV, PAV, ABCCV))

    def test_thiele_validation(self):
        with pytest.raises(ConfigurationError):
            thiele([1, 2])
        with pytest.raises(ConfigurationError):
            thiele([0, 2, 1])

    @settings(max_examples=60, deadline=None)
    @given(elections(m_max=5, n_max=5), st.randoms(use_true_random=False))
    def test_thiele_encodings_score_identically(self, e, rnd):
        k = rnd.randint(1, e.m)
        tables = {
            AV: [Fraction(i) for i in range(e.m + 1)],
            ABCCV: [Fraction(min(i, 1)) for i in range(e.m + 1)],
            PAV: [sum((Fraction(1, j) for j in range(1, i + 1)), Fraction(0)) for i in range(e.m + 1)],
        }
        for rule, table in tables.items():
            encoded = thiele(table)
            for combo in combinations(e.candidates, k):
                assert core.committee_score(rule, e, combo) == core.committee_score(encoded, e, combo)


@settings(max_examples=80, deadline=None)
@given(elections(m_max=6, n_max=6))
def test_scores_are_exact_rationals(e):
    for rule in (AV, SAV, NSAV):
        scores = core.additive_scores(rule, e)
        for a in e.candidates:
            assert isinstance(scores[a], Fraction)
            for b in e.candidates:
                # equality is decided by cross-multiplied integers, nothing fuzzier
                cross = scores[a].numerator * scores[b].denominator == (
                    scores[b].numerator * scores[a].denominator
                )
                assert (scores[a] == scores[b]) == cross
