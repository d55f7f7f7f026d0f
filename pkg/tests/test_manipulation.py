import random

import pytest

from abmv import core, manipulation as man, reductions as red, winners
from abmv.core import ABCCV, AV, MAV, NSAV, PAV, SAV, Election, UnsupportedRuleError
from abmv.manipulation import (
    ManipulationInstance,
    certify_manipulation,
    prefers,
    sd_dominates,
    solve_av_const_manipulators,
    solve_manipulation_bruteforce,
    solve_manipulation_fpt_m_additive,
    solve_manipulation_fpt_m_av,
    solve_savnsav_const_manipulators,
    solve_sdcm_fpt_m,
)


def random_instance(rng, rule, variant, m_max=5, n_max=4, t_max=2):
    m = rng.randint(2, m_max)
    cands = [f"c{i}" for i in range(m)]
    honest = [frozenset(rng.sample(cands, rng.randint(0, m))) for _ in range(rng.randint(0, n_max))]
    manip = [frozenset(rng.sample(cands, rng.randint(1, m))) for _ in range(rng.randint(1, t_max))]
    k = rng.randint(1, m)
    committee = None
    if variant != "SDCM":
        ws = winners.winning_committees(rule, Election(cands, honest + manip), k, "exhaustive")
        committee = frozenset(rng.choice(ws.committees))
    return ManipulationInstance(rule, variant, cands, honest, manip, k, committee)


class TestPreferences:
    def test_cardinality(self):
        assert prefers("cardinality", {"a", "b"}, {"a", "b", "c"}, {"a", "x", "y"})

    def test_subset_loses_a_winner(self):
        assert not prefers("subset", {"a", "b"}, {"b", "c", "d"}, {"a", "c", "d"})

    def test_subset_proper_gain(self):
        assert prefers("subset", {"a", "b"}, {"a", "b", "c"}, {"a", "c", "d"})


class TestStochasticDomination:
    def test_strict_at_level_one(self):
        verdict = sd_dominates([{"a"}], [{"a"}, {"b"}], {"a"})
        assert verdict.dominates and verdict.witness_levels == (1,)

    def test_identical_collections(self):
        assert not sd_dominates([{"a"}, {"b"}], [{"a"}, {"b"}], {"a"}).dominates

    def test_plain_loss(self):
        assert not sd_dominates([{"b"}], [{"a"}], {"a"}).dominates


class TestBruteForce:
    def test_example1_split_yes(self, example1_election):
        cands, honest, manip = example1_election
        inst = ManipulationInstance(SAV, "CBCM", cands, honest, manip, 2, {"x", "y"})
        verdict = solve_manipulation_bruteforce(inst)
        assert verdict.yes
        assert len(set(verdict.witness)) > 1  # a genuinely split profile
        assert certify_manipulation(inst, verdict.witness)

    def test_example1_common_no(self, example1_election):
        cands, honest, manip = example1_election
        inst = ManipulationInstance(SAV, "CBCM", cands, honest, manip, 2, {"x", "y"})
        assert not solve_manipulation_bruteforce(inst, profile_mode="common").yes

    def test_fully_satisfied_manipulator_blocks(self):
        # v inside w can never strictly gain
        e_c = ["a", "b"]
        inst = ManipulationInstance(AV, "CBCM", e_c, [{"a"}], [{"a"}], 1, {"a"})
        assert not solve_manipulation_bruteforce(inst).yes

    def test_path_graph_instance_is_hopeless(self):
        # path u1-u2-u3 under the four-supporting-votes shape: the filler
        # holds score 4 and two manipulators can raise a vertex to at most
        # 2, so no recast profile can displace it
        cands = ["u1", "u2", "u3", "c1"]
        inst = ManipulationInstance(
            AV, "CBCM", cands, [{"c1"}] * 4, [{"u1", "u2"}, {"u2", "u3"}], 1, {"c1"}
        )
        assert not solve_manipulation_bruteforce(inst).yes

    def test_three_manipulators_elevate_a_cover(self):
        # triangle edges versus two supporting votes: recasting every edge
        # ballot to the cover {u1,u2} makes it the unique winner
        cands = ["u1", "u2", "u3", "f1", "f2"]
        inst = ManipulationInstance(
            AV, "CBCM", cands, [{"f1", "f2"}] * 2,
            [{"u1", "u2"}, {"u2", "u3"}, {"u1", "u3"}], 2, {"f1", "f2"},
        )
        verdict = solve_manipulation_bruteforce(inst, profile_mode="common")
        assert verdict.yes
        assert all(b == {"u1", "u2"} or b == {"u1", "u3"} or b == {"u2", "u3"} for b in verdict.witness)

    def test_unrestricted_pool_matches_default(self):
        rng = random.Random(3)
        for _ in range(60):
            rule = rng.choice([AV, SAV, NSAV, PAV, ABCCV, MAV])
            variant = rng.choice(["CBCM", "SBCM", "SDCM"])
            inst = random_instance(rng, rule, variant, m_max=4, n_max=3, t_max=2)
            assert (
                solve_manipulation_bruteforce(inst).yes
                == solve_manipulation_bruteforce(inst, pool="unrestricted").yes
            )


class TestAvConstManipulators:
    def test_k3_triangle_construction(self):
        graph = red.GraphInstance(["u1", "u2", "u3"], [("u1", "u2"), ("u2", "u3"), ("u1", "u3")], 2)
        # hand-built triangle instance: one supporting vote keeps the
        # filler committee on top until the manipulators move
        cands = ["u1", "u2", "u3", "f1", "f2"]
        inst = ManipulationInstance(
            AV, "CBCM", cands, [{"f1", "f2"}] * 2,
            [frozenset(e) for e in sorted(map(sorted, graph.edges))], 2, {"f1", "f2"},
        )
        verdict = solve_av_const_manipulators(inst)
        assert verdict.yes == solve_manipulation_bruteforce(inst).yes

    def test_requires_av(self, example1_election):
        cands, honest, manip = example1_election
        inst = ManipulationInstance(SAV, "CBCM", cands, honest, manip, 2, {"x", "y"})
        with pytest.raises(UnsupportedRuleError):
            solve_av_const_manipulators(inst)

    def test_agrees_with_bruteforce(self):
        rng = random.Random(41)
        for _ in range(80):
            variant = rng.choice(["CBCM", "SBCM"])
            inst = random_instance(rng, AV, variant, m_max=5, n_max=4, t_max=3)
            assert solve_av_const_manipulators(inst).yes == solve_manipulation_bruteforce(inst).yes


class TestSavNsavConstManipulators:
    def test_example1_yes(self, example1_election):
        cands, honest, manip = example1_election
        inst = ManipulationInstance(SAV, "CBCM", cands, honest, manip, 2, {"x", "y"})
        verdict = solve_savnsav_const_manipulators(inst)
        assert verdict.yes and certify_manipulation(inst, verdict.witness)

    def test_example1_nsav_padded_yes(self, example1_election):
        cands, honest, manip = example1_election
        padded = core.pad_with_dummies(Election(cands, []), 9 * 10 * 10).candidates
        inst = ManipulationInstance(NSAV, "CBCM", padded, honest, manip, 2, {"x", "y"})
        verdict = solve_savnsav_const_manipulators(inst)
        assert verdict.yes and certify_manipulation(inst, verdict.witness)

    def test_agrees_with_bruteforce(self):
        rng = random.Random(43)
        for _ in range(60):
            rule = rng.choice([SAV, NSAV])
            variant = rng.choice(["CBCM", "SBCM"])
            inst = random_instance(rng, rule, variant, m_max=4, n_max=4, t_max=2)
            assert (
                solve_savnsav_const_manipulators(inst).yes
                == solve_manipulation_bruteforce(inst).yes
            )

    def test_single_manipulator_all_tied(self):
        inst = ManipulationInstance(SAV, "CBCM", ["a", "b"], [], [{"a"}], 1, {"a"})
        assert (
            solve_savnsav_const_manipulators(inst).yes
            == solve_manipulation_bruteforce(inst).yes
        )


class TestFptCandidates:
    def test_av_agrees(self):
        rng = random.Random(47)
        for _ in range(60):
            variant = rng.choice(["CBCM", "SBCM"])
            inst = random_instance(rng, AV, variant, m_max=5, n_max=4, t_max=3)
            assert solve_manipulation_fpt_m_av(inst).yes == solve_manipulation_bruteforce(inst).yes

    def test_additive_agrees(self):
        rng = random.Random(53)
        for _ in range(50):
            rule = rng.choice([AV, SAV, NSAV])
            variant = rng.choice(["CBCM", "SBCM"])
            inst = random_instance(rng, rule, variant, m_max=4, n_max=4, t_max=2)
            assert (
                solve_manipulation_fpt_m_additive(inst).yes
                == solve_manipulation_bruteforce(inst).yes
            )

    def test_sdcm_agrees(self):
        rng = random.Random(59)
        for _ in range(40):
            rule = rng.choice([AV, SAV, NSAV])
            inst = random_instance(rng, rule, "SDCM", m_max=4, n_max=4, t_max=2)
            assert solve_sdcm_fpt_m(inst).yes == solve_manipulation_bruteforce(inst).yes


class TestClaimProperties:
    def test_common_ballot_inside_pool_suffices_for_av(self):
        # whenever split search says YES under AV, a common ballot drawn
        # from the truthfully approved pool also works
        rng = random.Random(61)
        for _ in range(60):
            inst = random_instance(rng, AV, "CBCM", m_max=4, n_max=3, t_max=2)
            split = solve_manipulation_bruteforce(inst)
            if split.yes:
                common = solve_manipulation_bruteforce(inst, profile_mode="common")
                assert common.yes
                assert all(b <= inst.approved_union for b in common.witness)

    def test_two_blocks_suffice_for_av(self):
        # the block-structured search must find a YES whenever one exists
        rng = random.Random(67)
        for _ in range(60):
            variant = rng.choice(["CBCM", "SBCM"])
            inst = random_instance(rng, AV, variant, m_max=5, n_max=4, t_max=2)
            if solve_manipulation_bruteforce(inst).yes:
                assert solve_av_const_manipulators(inst).yes


class TestHardnessEquivalence:
    def test_vertex_cover_equivalences_on_k4(self, k4):
        for kappa, expected in [(1, False), (2, False), (3, True)]:
            for kind in ("ManipAvVc", "ManipSavVc", "ManipNsavVc", "ManipMavVc"):
                assert red.roundtrip_check(kind, k4(kappa), variant="CBCM"), (kind, kappa)
            assert red.solve_source(k4(kappa), "VERTEX_COVER") == expected

    def test_sdcm_is_not_instance_equivalent(self, k4):
        # documented gap: a recast tie can dominate subject to every
        # manipulator without any single committee covering them all
        inst = red.generate("ManipAvVc", k4(1), variant="SDCM")
        verdict = solve_manipulation_bruteforce(
            inst, profile_mode="common", pool_override=sorted(inst.approved_union)
        )
        assert verdict.yes and not red.solve_source(k4(1), "VERTEX_COVER")
        with pytest.raises(red.GenerationError):
            red.roundtrip_check("ManipAvVc", k4(1), variant="SDCM")


def test_witness_soundness_across_solvers():
    rng = random.Random(71)
    solvers = [
        solve_manipulation_bruteforce,
        solve_av_const_manipulators,
        solve_manipulation_fpt_m_av,
        solve_manipulation_fpt_m_additive,
    ]
    for _ in range(40):
        inst = random_instance(rng, AV, rng.choice(["CBCM", "SBCM"]), m_max=4, n_max=3, t_max=2)
        for solver in solvers:
            verdict = solver(inst)
            if verdict.yes:
                assert certify_manipulation(inst, verdict.witness)


def test_example1_rescored_under_av_matches_bruteforce(example1_election):
    cands, honest, manip = example1_election
    ws = winners.winning_committees(AV, Election(cands, honest + manip), 2, "exhaustive")
    inst = ManipulationInstance(AV, "CBCM", cands, honest, manip, 2, frozenset(ws.committees[0]))
    assert solve_av_const_manipulators(inst).yes == solve_manipulation_bruteforce(inst).yes
