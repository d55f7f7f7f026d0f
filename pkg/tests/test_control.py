import random

import pytest

from abmv import core, control as ctl, winners
from abmv.core import ABCCV, AV, MAV, NSAV, PAV, SAV, Election, UnsupportedRuleError, ValidationError
from abmv.control import (
    ControlInstance,
    ControlSolution,
    EMPTY_SOLUTION,
    apply_control,
    build_perfect_hash_family,
    control_succeeds,
    immunity_verdict,
    solve_ccadc_colorcoding,
    solve_ccadv_additive_fpt,
    solve_ccadv_thiele_fpt,
    solve_ccav_mav_fpt,
    solve_ccdv_mav_poly,
    solve_control_bruteforce,
    verify_perfect,
)
from abmv.verification import random_control_instance


class TestApplyControl:
    def test_empty_solution_is_identity(self):
        inst = ControlInstance("CCDV", AV, ["a", "b"], [{"a"}, {"b"}], 1, {"a"}, budget_delete=1)
        assert apply_control(inst, EMPTY_SOLUTION).votes == (frozenset({"a"}), frozenset({"b"}))

    def test_example3_addition_flips_the_committee(self):
        inst = ControlInstance(
            "CCAC", ABCCV, ["a", "b", "c"],
            [{"a"}, {"b", "d"}, {"b", "d"}, {"c", "d"}, {"c", "d"}],
            2, {"a"}, unregistered_candidates=["d"], budget_add=1,
        )
        before = winners.winning_committees(ABCCV, inst.base_election, 2)
        assert before.committees == (("b", "c"),)
        after = apply_control(inst, ControlSolution(added_candidates=("d",)))
        assert winners.winning_committees(ABCCV, after, 2).committees == (("a", "d"),)

    def test_example3_pav_variant(self):
        inst = ControlInstance(
            "CCAC", PAV, ["a", "b", "c"],
            [{"a"}, {"a"}] + [{"b", "d"}] * 3 + [{"c", "d"}] * 3,
            2, {"a"}, unregistered_candidates=["d"], budget_add=1,
        )
        assert winners.winning_committees(PAV, inst.base_election, 2).committees == (("b", "c"),)
        after = apply_control(inst, ControlSolution(added_candidates=("d",)))
        assert winners.winning_committees(PAV, after, 2).committees == (("a", "d"),)

    def test_budget_violation_rejected(self):
        inst = ControlInstance("CCDV", AV, ["a", "b"], [{"a"}, {"b"}], 1, {"a"}, budget_delete=1)
        with pytest.raises(ValidationError):
            apply_control(inst, ControlSolution(deleted_votes=(0, 1)))

    def test_deleting_distinguished_rejected(self):
        inst = ControlInstance("CCDC", AV, ["a", "b", "c"], [{"a"}], 1, {"a"}, budget_delete=1)
        with pytest.raises(ValidationError):
            apply_control(inst, ControlSolution(deleted_candidates=("a",)))

    def test_must_leave_k_candidates(self):
        inst = ControlInstance("CCDC", AV, ["a", "b"], [{"a"}], 2, {"a"}, budget_delete=1)
        with pytest.raises(ValidationError):
            apply_control(inst, ControlSolution(deleted_candidates=("b",)))


class TestBruteForce:
    def test_budget_zero_reduces_to_jcc(self):
        e_votes = [{"a"}, {"a"}, {"b"}]
        inst = ControlInstance("CCAV", AV, ["a", "b"], e_votes, 1, {"a"},
                               unregistered_votes=[{"b"}], budget_add=0)
        assert solve_control_bruteforce(inst).yes
        inst2 = ControlInstance("CCAV", AV, ["a", "b"], e_votes, 1, {"b"},
                                unregistered_votes=[{"b"}], budget_add=0)
        assert not solve_control_bruteforce(inst2).yes

    def test_minimal_witness_first(self):
        inst = ControlInstance("CCAV", AV, ["a", "b"], [{"b"}], 1, {"a"},
                               unregistered_votes=[{"a"}, {"a"}], budget_add=2)
        verdict = solve_control_bruteforce(inst)
        assert verdict.yes and len(verdict.witness.added_votes) == 2
        inst2 = ControlInstance("CCAV", AV, ["a", "b"], [], 1, {"a"},
                                unregistered_votes=[{"a"}, {"a"}], budget_add=2)
        verdict2 = solve_control_bruteforce(inst2)
        assert verdict2.yes and len(verdict2.witness.added_votes) == 1

    def test_monotone_budget(self):
        rng = random.Random(73)
        for _ in range(50):
            ctype = rng.choice(["CCAV", "CCDV", "CCAC"])
            rule = rng.choice([AV, SAV, NSAV, ABCCV, MAV])
            inst = random_control_instance(rng, rule, ctype, m_max=4, n_max=4, u_max=3, d_max=2, b_max=1)
            bigger = ControlInstance(
                inst.ctype, inst.rule, inst.registered_candidates, inst.registered_votes,
                inst.k, inst.distinguished, inst.unregistered_candidates, inst.unregistered_votes,
                None if inst.budget_add is None else min(
                    inst.budget_add + 1,
                    len(inst.unregistered_votes if ctype == "CCAV" else inst.unregistered_candidates),
                ),
                None if inst.budget_delete is None else min(
                    inst.budget_delete + 1, len(inst.registered_votes)
                ),
            )
            if solve_control_bruteforce(inst).yes:
                assert solve_control_bruteforce(bigger).yes


class TestCcdvMavPoly:
    def test_rejects_other_problems(self):
        inst = ControlInstance("CCAV", MAV, ["a", "b"], [{"a"}], 1, {"a"},
                               unregistered_votes=[{"a"}], budget_add=1)
        with pytest.raises(UnsupportedRuleError):
            solve_ccdv_mav_poly(inst)

    def test_delete_everything_boundary(self):
        # an emptied election ties every committee, so J is universally
        # winning only when every k-committee contains it (k = m here)
        inst = ControlInstance("CCDV", MAV, ["a", "b"], [{"a"}, {"b"}], 2, {"a", "b"},
                               budget_delete=2)
        assert solve_ccdv_mav_poly(inst).yes
        strict = ControlInstance("CCDV", MAV, ["a", "b"], [{"b"}, {"b"}], 1, {"a"},
                                 budget_delete=2)
        assert not solve_ccdv_mav_poly(strict).yes

    def test_agrees_with_bruteforce(self):
        rng = random.Random(79)
        for _ in range(80):
            inst = random_control_instance(rng, MAV, "CCDV", m_max=6, n_max=5)
            assert solve_ccdv_mav_poly(inst).yes == solve_control_bruteforce(inst).yes


class TestImmunity:
    @pytest.mark.parametrize(
        "rule,ctype,k,j,status",
        [
            (AV, "CCAC", 3, 2, "immune"),
            (PAV, "CCAC", 2, 2, "immune"),
            (ABCCV, "CCAC", 2, 1, "susceptible"),
            (MAV, "CCAC", 1, 1, "susceptible"),
            (SAV, "CCAC", 2, 1, "undetermined"),
            (SAV, "CCAV", 2, 1, "susceptible"),
            (PAV, "CCDC", 2, 2, "susceptible"),
        ],
    )
    def test_table(self, rule, ctype, k, j, status):
        assert immunity_verdict(rule, ctype, k, j).status == status

    def test_brute_force_never_contradicts_immunity(self):
        rng = random.Random(83)
        trials = 0
        while trials < 60:
            rule = rng.choice([AV, PAV, ABCCV])
            m = rng.randint(2, 4)
            C = [f"c{i}" for i in range(m)]
            D = [f"d{i}" for i in range(rng.randint(1, 2))]
            V = [frozenset(rng.sample(C + D, rng.randint(0, m + 1))) for _ in range(rng.randint(1, 4))]
            k = rng.randint(1, m)
            j_size = k if rule is not AV else rng.randint(1, k)
            J = frozenset(rng.sample(C, j_size))
            inst = ControlInstance("CCAC", rule, C, V, k, J, D, budget_add=len(D))
            if immunity_verdict(rule, "CCAC", k, j_size).status != "immune":
                continue
            if control_succeeds(inst, EMPTY_SOLUTION):
                continue
            trials += 1
            assert not solve_control_bruteforce(inst).yes


class TestFptControl:
    def test_additive_agrees(self):
        rng = random.Random(89)
        for _ in range(60):
            rule = rng.choice([AV, SAV, NSAV])
            ctype = rng.choice(["CCAV", "CCDV", "CCADV"])
            inst = random_control_instance(rng, rule, ctype, m_max=5, n_max=4, u_max=4)
            assert solve_ccadv_additive_fpt(inst).yes == solve_control_bruteforce(inst).yes

    def test_thiele_agrees(self):
        rng = random.Random(97)
        for _ in range(40):
            rule = rng.choice([ABCCV, PAV])
            ctype = rng.choice(["CCAV", "CCDV", "CCADV"])
            inst = random_control_instance(rng, rule, ctype, m_max=4, n_max=4, u_max=3)
            assert solve_ccadv_thiele_fpt(inst).yes == solve_control_bruteforce(inst).yes

    def test_ccav_mav_agrees(self):
        rng = random.Random(101)
        for _ in range(60):
            inst = random_control_instance(rng, MAV, "CCAV", m_max=5, n_max=4, u_max=5)
            assert solve_ccav_mav_fpt(inst).yes == solve_control_bruteforce(inst).yes

    def test_duplicate_unregistered_votes_collapse(self):
        rng = random.Random(103)
        for _ in range(30):
            inst = random_control_instance(rng, MAV, "CCAV", m_max=4, n_max=3, u_max=3)
            cloned = ControlInstance(
                "CCAV", MAV, inst.registered_candidates, inst.registered_votes,
                inst.k, inst.distinguished,
                unregistered_votes=inst.unregistered_votes + inst.unregistered_votes,
                budget_add=inst.budget_add,
            )
            assert solve_ccav_mav_fpt(inst).yes == solve_ccav_mav_fpt(cloned).yes


class TestPerfectHashFamilies:
    def test_kappa_one_single_constant(self):
        family = build_perfect_hash_family(["x", "y"], 1)
        assert len(family.functions) == 1
        ok, coverage = verify_perfect(family)
        assert ok and coverage == 1

    def test_exhaustive_covers_all_pairs(self):
        family = build_perfect_hash_family(list("abcd"), 2, "exhaustive")
        ok, coverage = verify_perfect(family)
        assert ok and coverage == 1

    def test_randomized_reports_coverage(self):
        family = build_perfect_hash_family(list("abcdef"), 2, "randomized", seed=7, repetitions=64)
        ok, coverage = verify_perfect(family)
        assert 0 <= coverage <= 1
        assert family.mode == "randomized"

    def test_kappa_too_large(self):
        with pytest.raises(ValidationError):
            build_perfect_hash_family(["x"], 2)


class TestColorCoding:
    def test_agrees_with_bruteforce(self):
        rng = random.Random(107)
        for _ in range(50):
            rule = rng.choice([SAV, NSAV, ABCCV, PAV, MAV])
            ctype = rng.choice(["CCAC", "CCDC", "CCADC"])
            inst = random_control_instance(rng, rule, ctype, m_max=5, n_max=4, d_max=3)
            assert solve_ccadc_colorcoding(inst).yes == solve_control_bruteforce(inst).yes

    def test_randomized_mode_is_one_sided(self):
        rng = random.Random(109)
        for _ in range(20):
            rule = rng.choice([SAV, ABCCV])
            inst = random_control_instance(rng, rule, "CCDC", m_max=4, n_max=3)
            randomized = solve_ccadc_colorcoding(inst, hash_mode="randomized", seed=5, repetitions=8)
            assert randomized.details["hash_mode"] == "randomized"
            if randomized.yes:
                assert control_succeeds(inst, randomized.witness)

    def test_within_clone_swap_keeps_verdict(self):
        # swapping two candidates with identical approver sets inside a
        # guessed class never changes the decision
        votes = [{"a", "b"}, {"a", "b", "p"}, {"c"}]
        inst = ControlInstance("CCDC", SAV, ["p", "a", "b", "c"], votes, 1, {"p"}, budget_delete=2)
        base = solve_ccadc_colorcoding(inst)
        swapped_votes = [frozenset({"b", "a"}), frozenset({"b", "a", "p"}), frozenset({"c"})]
        swapped = ControlInstance("CCDC", SAV, ["p", "b", "a", "c"], swapped_votes, 1, {"p"}, budget_delete=2)
        assert base.yes == solve_ccadc_colorcoding(swapped).yes


def test_witness_soundness_across_solvers():
    rng = random.Random(113)
    for _ in range(40):
        ctype = rng.choice(["CCAV", "CCDV", "CCADV"])
        rule = rng.choice([AV, SAV, NSAV])
        inst = random_control_instance(rng, rule, ctype, m_max=4, n_max=4, u_max=3)
        for solver in (solve_control_bruteforce, solve_ccadv_additive_fpt):
            verdict = solver(inst)
            if verdict.yes:
                assert control_succeeds(inst, verdict.witness)


def test_thm7_construction_kappa1_is_yes(trivial_rx3c):
    from abmv import reductions as red

    inst = red.generate("CcavMavRx3c", trivial_rx3c)
    fpt = solve_ccav_mav_fpt(inst)
    brute = solve_control_bruteforce(inst)
    assert fpt.yes and brute.yes
    assert control_succeeds(inst, fpt.witness)
