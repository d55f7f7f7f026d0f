"""Election control: CCAV, CCDV, CCAC, CCDC, and the combined variants.

An external agent adds or deletes a budgeted number of voters or
candidates so that a distinguished set J lands in every winning
k-committee. Verdicts are tie-breaking-free (J must be in *all* winning
committees) and every YES ships an add/delete selection that is
re-verified by applying it and deciding J-CC on the result.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Optional, Sequence

from abmv import core, ipcore, winners
from abmv.caps import GUESS_CAP, SUBSET_CAP, effective_cap
from abmv.core import (
    Election,
    ResourceCapError,
    Rule,
    UnsupportedRuleError,
    ValidationError,
    Verdict,
)

CONTROL_TYPES = ("CCAV", "CCDV", "CCAC", "CCDC", "CCADV", "CCADC", "JCC")
_VOTER_TYPES = ("CCAV", "CCDV", "CCADV")
_CANDIDATE_TYPES = ("CCAC", "CCDC", "CCADC")


@dataclass(frozen=True)
class ControlInstance:
    ctype: str
    rule: Rule
    registered_candidates: tuple
    registered_votes: tuple
    k: int
    distinguished: frozenset
    unregistered_candidates: tuple = ()
    unregistered_votes: tuple = ()
    budget_add: Optional[int] = None
    budget_delete: Optional[int] = None

    def __init__(
        self,
        ctype,
        rule,
        registered_candidates,
        registered_votes,
        k,
        distinguished,
        unregistered_candidates=(),
        unregistered_votes=(),
        budget_add=None,
        budget_delete=None,
    ):
        object.__setattr__(self, "ctype", ctype)
        object.__setattr__(self, "rule", rule)
        object.__setattr__(self, "registered_candidates", tuple(registered_candidates))
        object.__setattr__(self, "registered_votes", tuple(frozenset(v) for v in registered_votes))
        object.__setattr__(self, "k", int(k))
        object.__setattr__(self, "distinguished", frozenset(distinguished))
        object.__setattr__(self, "unregistered_candidates", tuple(unregistered_candidates))
        object.__setattr__(
            self, "unregistered_votes", tuple(frozenset(v) for v in unregistered_votes)
        )
        object.__setattr__(self, "budget_add", budget_add)
        object.__setattr__(self, "budget_delete", budget_delete)
        self._validate()

    def _validate(self):
        if self.ctype not in CONTROL_TYPES:
            raise ValidationError(f"unknown control type {self.ctype!r}")
        C = self.registered_candidates
        D = self.unregistered_candidates
        if set(C) & set(D):
            raise ValidationError("registered and unregistered candidates overlap")
        if not 1 <= len(self.distinguished) <= self.k <= len(C):
            raise ValidationError("need 1 <= |J| <= k <= |C|")
        if not self.distinguished <= set(C):
            raise ValidationError("distinguished candidates must be registered")
        pool = set(C) | set(D)
        for i, v in enumerate(self.registered_votes + self.unregistered_votes):
            if not v <= pool:
                raise ValidationError(f"vote {i} leaves the candidate pool")
        if self.ctype in _VOTER_TYPES:
            if D:
                raise ValidationError("voter control takes no unregistered candidates")
        if self.ctype in _CANDIDATE_TYPES and self.unregistered_votes:
            raise ValidationError("candidate control takes no unregistered votes")
        needs_add = {"CCAV": "votes", "CCAC": "candidates", "CCADV": "votes", "CCADC": "candidates"}
        needs_delete = {"CCDV", "CCDC", "CCADV", "CCADC"}
        if self.ctype in needs_add:
            if self.budget_add is None or self.budget_add < 0:
                raise ValidationError(f"{self.ctype} needs a nonnegative addition budget")
            pool_size = len(self.unregistered_votes if needs_add[self.ctype] == "votes" else D)
            if self.budget_add > pool_size:
                raise ValidationError("addition budget exceeds its pool")
        if self.ctype in needs_delete:
            if self.budget_delete is None or self.budget_delete < 0:
                raise ValidationError(f"{self.ctype} needs a nonnegative deletion budget")
            pool_size = len(self.registered_votes) if self.ctype in _VOTER_TYPES else len(C)
            if self.budget_delete > pool_size:
                raise ValidationError("deletion budget exceeds its pool")

    @property
    def base_election(self) -> Election:
        """The election before any control action (restricted to registered candidates)."""
        if self.ctype in _CANDIDATE_TYPES:
            keep = set(self.registered_candidates)
            return Election(self.registered_candidates, [v & keep for v in self.registered_votes])
        return Election(self.registered_candidates, self.registered_votes)


@dataclass(frozen=True)
class ControlSolution:
    added_votes: tuple = ()
    deleted_votes: tuple = ()
    added_candidates: tuple = ()
    deleted_candidates: tuple = ()

    @property
    def size(self) -> int:
        return (
            len(self.added_votes)
            + len(self.deleted_votes)
            + len(self.added_candidates)
            + len(self.deleted_candidates)
        )


EMPTY_SOLUTION = ControlSolution()


def apply_control(instance: ControlInstance, solution: ControlSolution) -> Election:
    """The election after performing a control action; validates budgets."""
    ctype = instance.ctype
    added_votes = tuple(solution.added_votes)
    deleted_votes = tuple(solution.deleted_votes)
    added_cands = tuple(solution.added_candidates)
    deleted_cands = tuple(solution.deleted_candidates)
    if added_votes and ctype not in ("CCAV", "CCADV"):
        raise ValidationError(f"{ctype} cannot add votes")
    if deleted_votes and ctype not in ("CCDV", "CCADV"):
        raise ValidationError(f"{ctype} cannot delete votes")
    if added_cands and ctype not in ("CCAC", "CCADC"):
        raise ValidationError(f"{ctype} cannot add candidates")
    if deleted_cands and ctype not in ("CCDC", "CCADC"):
        raise ValidationError(f"{ctype} cannot delete candidates")
    if added_votes:
        if len(set(added_votes)) != len(added_votes) or not all(
            0 <= i < len(instance.unregistered_votes) for i in added_votes
        ):
            raise ValidationError("bad unregistered vote indices")
        if len(added_votes) > instance.budget_add:
            raise ValidationError("addition budget violated")
    if deleted_votes:
        if len(set(deleted_votes)) != len(deleted_votes) or not all(
            0 <= i < len(instance.registered_votes) for i in deleted_votes
        ):
            raise ValidationError("bad registered vote indices")
        if len(deleted_votes) > instance.budget_delete:
            raise ValidationError("deletion budget violated")
    if added_cands:
        if len(set(added_cands)) != len(added_cands) or not set(added_cands) <= set(
            instance.unregistered_candidates
        ):
            raise ValidationError("bad unregistered candidates")
        if len(added_cands) > instance.budget_add:
            raise ValidationError("addition budget violated")
    if deleted_cands:
        if len(set(deleted_cands)) != len(deleted_cands) or not set(deleted_cands) <= set(
            instance.registered_candidates
        ):
            raise ValidationError("bad deleted candidates")
        if set(deleted_cands) & instance.distinguished:
            raise ValidationError("distinguished candidates cannot be deleted")
        if len(deleted_cands) > instance.budget_delete:
            raise ValidationError("deletion budget violated")
    if ctype in _VOTER_TYPES or ctype == "JCC":
        votes = [v for i, v in enumerate(instance.registered_votes) if i not in set(deleted_votes)]
        votes += [instance.unregistered_votes[i] for i in added_votes]
        return Election(instance.registered_candidates, votes)
    removed = set(deleted_cands)
    added_order = [c for c in instance.unregistered_candidates if c in set(added_cands)]
    roster = [c for c in instance.registered_candidates if c not in removed] + added_order
    if len(roster) < instance.k:
        raise ValidationError("fewer than k candidates would remain")
    keep = set(roster)
    return Election(tuple(roster), [v & keep for v in instance.registered_votes])


def control_succeeds(
    instance: ControlInstance, solution: ControlSolution, jcc_algo: str = "auto"
) -> bool:
    """Apply the solution and decide whether J is in all winning committees."""
    election = apply_control(instance, solution)
    jcc = winners.JccInstance(election, instance.k, instance.distinguished)
    return winners.j_cc(instance.rule, jcc, algo=jcc_algo)


def _solution_stream(instance: ControlInstance, deletion_pool=None):
    """All budget-respecting solutions in increasing-cardinality order."""
    ctype = instance.ctype
    la = instance.budget_add or 0
    ld = instance.budget_delete or 0
    if ctype == "JCC":
        yield EMPTY_SOLUTION
        return
    if ctype in ("CCAV", "CCDV", "CCADV"):
        add_ids = range(len(instance.unregistered_votes))
        del_ids = range(len(instance.registered_votes))
        for total in range(la + ld + 1):
            for ra in range(min(la, total), -1, -1):
                rd = total - ra
                if rd > ld:
                    continue
                for added in combinations(add_ids, ra):
                    for deleted in combinations(del_ids, rd):
                        yield ControlSolution(added_votes=added, deleted_votes=deleted)
        return
    election_order = instance.registered_candidates
    if deletion_pool is None:
        pool = [c for c in election_order if c not in instance.distinguished]
    else:
        pool = [c for c in election_order if c in set(deletion_pool)]
    addable = instance.unregistered_candidates
    for total in range(la + ld + 1):
        for ra in range(min(la, total), -1, -1):
            rd = total - ra
            if rd > ld:
                continue
            if len(instance.registered_candidates) - rd + ra < instance.k:
                continue
            for added in combinations(addable, ra):
                for deleted in combinations(pool, rd):
                    yield ControlSolution(added_candidates=added, deleted_candidates=deleted)


class _AdditiveDeletionOracle:
    """J-CC under candidate deletion without rebuilding the election.

    Recomputes approval-class scores from cached vote sizes, so padded
    rosters with hundreds of thousands of never-approved clones stay
    cheap: their class is scored once per deletion set.
    """

    def __init__(self, rule: Rule, election: Election, k: int, wanted: frozenset):
        self.rule = rule
        self.k = k
        self.wanted = wanted
        self.sizes = [len(v) for v in election.votes]
        self.m = election.m
        self.approvers = election.approver_sets
        self.classes = []
        for key, members in election.approval_classes.items():
            by_size = {}
            for i in key:
                by_size[self.sizes[i]] = by_size.get(self.sizes[i], 0) + 1
            self.classes.append((key, members, frozenset(members), by_size))
        self.size_counter = {}
        for s in self.sizes:
            self.size_counter[s] = self.size_counter.get(s, 0) + 1

    def jcc_after_deleting(self, deleted: frozenset) -> bool:
        m = self.m - len(deleted)
        affected = {}
        for c in deleted:
            for vid in self.approvers[c]:
                affected[vid] = affected.get(vid, 0) + 1
        sizes = dict(self.size_counter)
        for vid, drop in affected.items():
            old = self.sizes[vid]
            sizes[old] -= 1
            sizes[old - drop] = sizes.get(old - drop, 0) + 1
        penalty = Fraction(0)
        if self.rule.kind == "NSAV":
            penalty = sum(
                (Fraction(cnt, m - s) for s, cnt in sizes.items() if cnt and s != m),
                Fraction(0),
            )

        def class_score(key, by_size):
            if self.rule.kind == "AV":
                return Fraction(len(key))
            local = by_size
            if affected:
                local = dict(by_size)
                for vid, drop in affected.items():
                    if vid in key:
                        local[self.sizes[vid]] -= 1
                        new = self.sizes[vid] - drop
                        local[new] = local.get(new, 0) + 1
            score = sum((Fraction(cnt, s) for s, cnt in local.items() if cnt and s), Fraction(0))
            if self.rule.kind == "NSAV":
                regained = sum(
                    (Fraction(cnt, m - s) for s, cnt in local.items() if cnt and s and s != m),
                    Fraction(0),
                )
                score += regained - penalty
            return score

        weighted = []
        score_of = {}
        for key, members, member_set, by_size in self.classes:
            count = len(members) - sum(1 for c in deleted if c in member_set)
            if not count and not (self.wanted & member_set):
                continue
            score = class_score(key, by_size)
            if count:
                weighted.append((score, count))
            for c in self.wanted & member_set:
                if c not in deleted:
                    score_of[c] = score
        if len(self.wanted & set(score_of)) != len(self.wanted):
            return False
        weighted.sort(reverse=True)
        seen = 0
        threshold = None
        for score, count in weighted:
            seen += count
            if seen >= self.k:
                threshold = score
                break
        at_threshold = sum(count for score, count in weighted if score == threshold)
        pool = sum(count for score, count in weighted if score >= threshold)
        for c in self.wanted:
            if score_of[c] > threshold:
                continue
            if score_of[c] < threshold:
                return False
            if at_threshold != 1 and pool != self.k:
                return False
        return True


def solve_control_bruteforce(
    instance: ControlInstance,
    jcc_algo: str = "auto",
    cap: Optional[int] = None,
    deletion_pool=None,
) -> Verdict:
    """Search all budget-respecting actions; minimal-cardinality witness.

    `deletion_pool` narrows candidate deletion to a subset of the roster
    when deletions outside it are provably irrelevant (score padding).
    """
    limit = effective_cap(cap if cap is not None else SUBSET_CAP)
    oracle = None
    if instance.ctype == "CCDC" and instance.rule.is_additive and jcc_algo == "auto":
        oracle = _AdditiveDeletionOracle(
            instance.rule, instance.base_election, instance.k, instance.distinguished
        )
    tried = 0
    for solution in _solution_stream(instance, deletion_pool):
        tried += 1
        if tried > limit:
            raise ResourceCapError(f"control search exceeded the cap {limit}")
        if oracle is not None:
            if oracle.jcc_after_deleting(frozenset(solution.deleted_candidates)):
                if control_succeeds(instance, solution, jcc_algo):
                    return Verdict(True, solution)
        elif control_succeeds(instance, solution, jcc_algo):
            return Verdict(True, solution)
    return Verdict(False)


# ---------------------------------------------------------------------------
# CCDV under MAV, polynomial for constant k


def solve_ccdv_mav_poly(instance: ControlInstance, cap: Optional[int] = None) -> Verdict:
    """Guess a target committee containing J and a score bound x; delete the
    votes too far from the committee and demand every J-missing committee
    scores worse than x."""
    if instance.rule.kind != "MAV" or instance.ctype != "CCDV":
        raise UnsupportedRuleError("this solver handles CCDV under MAV")
    election = instance.base_election
    m, k = election.m, instance.k
    limit = effective_cap(cap if cap is not None else GUESS_CAP)
    if math.comb(m, k) > limit:
        raise ResourceCapError("committee space exceeds the cap")
    budget = instance.budget_delete
    wanted = instance.distinguished
    roster = list(election.candidates)
    with_j = [w for w in combinations(roster, k) if wanted <= frozenset(w)]
    without_j = [frozenset(w) for w in combinations(roster, k) if not wanted <= frozenset(w)]
    for x in range(0, m + k + 1):
        for w in with_j:
            members = frozenset(w)
            deleted = tuple(
                i for i, v in enumerate(election.votes) if core.hamming_distance(members, v) > x
            )
            if len(deleted) > budget:
                continue
            kept = [v for i, v in enumerate(election.votes) if i not in set(deleted)]
            if all(
                (max((core.hamming_distance(other, v) for v in kept), default=0)) >= x + 1
                for other in without_j
            ):
                solution = ControlSolution(deleted_votes=deleted)
                if control_succeeds(instance, solution):
                    return Verdict(True, solution)
    return Verdict(False)


# ---------------------------------------------------------------------------
# Immunity


@dataclass(frozen=True)
class ImmunityVerdict:
    status: str  # immune | susceptible | undetermined
    justification: str


def immunity_verdict(rule: Rule, ctype: str, k: int, j_size: int) -> ImmunityVerdict:
    """Rule-level immunity to a control type; immune only on a proved fact."""
    if ctype not in CONTROL_TYPES or ctype == "JCC":
        raise ValidationError(f"{ctype!r} is not a control type")
    if ctype != "CCAC":
        # adding/deleting voters and deleting candidates can always move
        # scores of registered candidates for every rule built here
        return ImmunityVerdict("susceptible", "vote-or-deletion-control-moves-scores")
    if rule.kind == "AV":
        return ImmunityVerdict("immune", "candidate-additions-never-change-av-scores")
    if rule.is_thiele_family and j_size == k:
        return ImmunityVerdict("immune", "non-unique-committees-stay-non-unique")
    if rule.kind in ("ABCCV", "PAV") and j_size < k:
        return ImmunityVerdict("susceptible", "witnessed-by-candidate-addition")
    if rule.kind == "MAV":
        return ImmunityVerdict("susceptible", "distance-floor-moves-with-additions")
    return ImmunityVerdict("undetermined", "no-proved-fact-applies")


# ---------------------------------------------------------------------------
# Combined voter control, FPT in the candidate count (additive rules)


def _ballot_groups(votes: Sequence[frozenset]):
    groups = {}
    for i, v in enumerate(votes):
        groups.setdefault(v, []).append(i)
    return sorted(groups.items(), key=lambda kv: sorted(kv[0]))


def _per_vote_score(rule, ballot, candidate, m):
    if rule.kind == "AV":
        return Fraction(1) if candidate in ballot else Fraction(0)
    if rule.kind == "SAV":
        return Fraction(1, len(ballot)) if candidate in ballot else Fraction(0)
    if rule.kind == "NSAV":
        if candidate in ballot:
            return Fraction(1, len(ballot))
        if len(ballot) != m:
            return -Fraction(1, m - len(ballot))
        return Fraction(0)
    raise UnsupportedRuleError(f"{rule.kind} is not additive")


def solve_ccadv_additive_fpt(instance: ControlInstance, cap: Optional[int] = None) -> Verdict:
    """CCAV/CCDV/CCADV for additive rules: guess the weakest distinguished
    candidate and which rivals must end strictly below it, then solve the
    add/delete counting program."""
    if not instance.rule.is_additive:
        raise UnsupportedRuleError("additive rules only")
    if instance.ctype not in _VOTER_TYPES:
        raise UnsupportedRuleError("this solver handles voter control")
    rule = instance.rule
    election = instance.base_election
    m, k = election.m, instance.k
    la = instance.budget_add or 0
    ld = instance.budget_delete or 0
    wanted = sorted(instance.distinguished, key=election.index)
    others = [c for c in election.candidates if c not in instance.distinguished]
    base = core.additive_scores(rule, election)
    v_groups = _ballot_groups(instance.registered_votes)
    u_groups = _ballot_groups(instance.unregistered_votes)
    for weakest in wanted:
        for keep_size in range(0, k - len(wanted) + 1):
            for keep in combinations(others, keep_size):
                below = [c for c in others if c not in keep]
                program = ipcore.IntegerProgram()
                dels, adds = [], []
                for g, (ballot, ids) in enumerate(v_groups):
                    dels.append((ballot, program.add_variable(f"d{g}", 0, len(ids))))
                for g, (ballot, ids) in enumerate(u_groups):
                    adds.append((ballot, program.add_variable(f"a{g}", 0, len(ids))))
                if dels:
                    program.add_constraint([(name, 1) for _, name in dels], "<=", ld)
                if adds:
                    program.add_constraint([(name, 1) for _, name in adds], "<=", la)

                def score_delta(c):
                    coeffs = {}
                    for ballot, name in dels:
                        coeffs[name] = coeffs.get(name, Fraction(0)) - _per_vote_score(
                            rule, ballot, c, m
                        )
                    for ballot, name in adds:
                        coeffs[name] = coeffs.get(name, Fraction(0)) + _per_vote_score(
                            rule, ballot, c, m
                        )
                    return coeffs

                anchor = score_delta(weakest)
                for c in wanted:
                    if c == weakest:
                        continue
                    coeffs = score_delta(c)
                    for name, val in anchor.items():
                        coeffs[name] = coeffs.get(name, Fraction(0)) - val
                    program.add_constraint(list(coeffs.items()), ">=", base[weakest] - base[c])
                for c in below:
                    coeffs = score_delta(c)
                    for name, val in anchor.items():
                        coeffs[name] = coeffs.get(name, Fraction(0)) - val
                    program.add_constraint(list(coeffs.items()), "<", base[weakest] - base[c])
                result = ipcore.solve_ip(program, cap)
                if result.status == ipcore.CAP_EXCEEDED:
                    raise ResourceCapError("control program exceeded the IP node cap")
                if result.feasible:
                    solution = _decode_vote_solution(
                        instance, v_groups, u_groups, dels, adds, result.assignment
                    )
                    if control_succeeds(instance, solution):
                        return Verdict(True, solution)
    return Verdict(False)


def _decode_vote_solution(instance, v_groups, u_groups, dels, adds, assignment):
    deleted = []
    for (ballot, ids), (_, name) in zip(v_groups, dels):
        deleted.extend(ids[: assignment[name]])
    added = []
    for (ballot, ids), (_, name) in zip(u_groups, adds):
        added.extend(ids[: assignment[name]])
    return ControlSolution(added_votes=tuple(sorted(added)), deleted_votes=tuple(sorted(deleted)))


# ---------------------------------------------------------------------------
# Combined voter control for Thiele rules: guess the exact winning collection


def solve_ccadv_thiele_fpt(instance: ControlInstance, cap: Optional[int] = None) -> Verdict:
    if not instance.rule.is_thiele_family:
        raise UnsupportedRuleError("Thiele-family rules only")
    if instance.ctype not in _VOTER_TYPES:
        raise UnsupportedRuleError("this solver handles voter control")
    rule = instance.rule
    election = instance.base_election
    k = instance.k
    la = instance.budget_add or 0
    ld = instance.budget_delete or 0
    limit = effective_cap(cap if cap is not None else GUESS_CAP)
    roster = list(election.candidates)
    if math.comb(election.m, k) > 40:
        raise ResourceCapError("committee space too large for collection guessing")
    all_committees = [frozenset(w) for w in combinations(roster, k)]
    with_j = [w for w in all_committees if instance.distinguished <= w]
    if 2 ** len(with_j) > limit:
        raise ResourceCapError("collection guess space exceeds the cap")
    v_groups = _ballot_groups(instance.registered_votes)
    u_groups = _ballot_groups(instance.unregistered_votes)
    base_scores = {w: core.committee_score(rule, election, w) for w in all_committees}
    for r in range(1, len(with_j) + 1):
        for family in combinations(with_j, r):
            chosen = set(family)
            program = ipcore.IntegerProgram()
            dels, adds = [], []
            for g, (ballot, ids) in enumerate(v_groups):
                dels.append((ballot, program.add_variable(f"d{g}", 0, len(ids))))
            for g, (ballot, ids) in enumerate(u_groups):
                adds.append((ballot, program.add_variable(f"a{g}", 0, len(ids))))
            if dels:
                program.add_constraint([(name, 1) for _, name in dels], "<=", ld)
            if adds:
                program.add_constraint([(name, 1) for _, name in adds], "<=", la)

            def delta(w):
                coeffs = {}
                for ballot, name in dels:
                    weight = rule.omega_value(len(ballot & w))
                    if weight:
                        coeffs[name] = coeffs.get(name, Fraction(0)) - weight
                for ballot, name in adds:
                    weight = rule.omega_value(len(ballot & w))
                    if weight:
                        coeffs[name] = coeffs.get(name, Fraction(0)) + weight
                return coeffs

            anchor = family[0]
            a_delta = delta(anchor)
            for w in family[1:]:
                coeffs = delta(w)
                for name, val in a_delta.items():
                    coeffs[name] = coeffs.get(name, Fraction(0)) - val
                program.add_constraint(
                    list(coeffs.items()), "=", base_scores[anchor] - base_scores[w]
                )
            for w in all_committees:
                if w in chosen:
                    continue
                coeffs = dict(a_delta)
                for name, val in delta(w).items():
                    coeffs[name] = coeffs.get(name, Fraction(0)) - val
                program.add_constraint(
                    list(coeffs.items()), ">", base_scores[w] - base_scores[anchor]
                )
            result = ipcore.solve_ip(program, cap)
            if result.status == ipcore.CAP_EXCEEDED:
                raise ResourceCapError("control program exceeded the IP node cap")
            if result.feasible:
                solution = _decode_vote_solution(
                    instance, v_groups, u_groups, dels, adds, result.assignment
                )
                if control_succeeds(instance, solution):
                    return Verdict(True, solution)
    return Verdict(False)


# ---------------------------------------------------------------------------
# CCAV under MAV, FPT in the candidate count


def solve_ccav_mav_fpt(instance: ControlInstance, cap: Optional[int] = None) -> Verdict:
    """Duplicate unregistered votes never help MAV (scores are maxima), so
    dedup first and enumerate the at-most-2^m distinct additions."""
    if instance.rule.kind != "MAV" or instance.ctype != "CCAV":
        raise UnsupportedRuleError("this solver handles CCAV under MAV")
    limit = effective_cap(cap if cap is not None else SUBSET_CAP)
    budget = instance.budget_add or 0
    representatives = []
    seen = set()
    for i, v in enumerate(instance.unregistered_votes):
        if v not in seen:
            seen.add(v)
            representatives.append(i)
    total = sum(math.comb(len(representatives), r) for r in range(min(budget, len(representatives)) + 1))
    if total > limit:
        raise ResourceCapError("dedup subset space exceeds the cap")
    for r in range(0, min(budget, len(representatives)) + 1):
        for chosen in combinations(representatives, r):
            solution = ControlSolution(added_votes=chosen)
            if control_succeeds(instance, solution):
                return Verdict(True, solution)
    return Verdict(False)


# ---------------------------------------------------------------------------
# Perfect hash families and color-coding candidate control


@dataclass(frozen=True)
class PerfectHashFamily:
    universe: tuple
    colors: int
    functions: tuple  # tuple of dicts element -> color in [0, colors)
    mode: str


def verify_perfect(family: PerfectHashFamily) -> tuple:
    """(is_perfect, covered_fraction): every |colors|-subset must be rainbow
    under at least one member function."""
    kappa = family.colors
    universe = family.universe
    total = 0
    covered = 0
    for subset in combinations(universe, kappa):
        total += 1
        for f in family.functions:
            if len({f[x] for x in subset}) == kappa:
                covered += 1
                break
    if total == 0:
        return True, Fraction(1)
    return covered == total, Fraction(covered, total)


def build_perfect_hash_family(
    universe: Sequence,
    kappa: int,
    mode: str = "exhaustive",
    seed: int = 0,
    repetitions: int = 1,
    cap: Optional[int] = None,
) -> PerfectHashFamily:
    """Colorings of the universe with kappa colors covering every kappa-subset.

    Exhaustive mode walks all kappa^|X| colorings and greedily keeps a
    verified perfect subfamily (deterministic). Randomized mode draws
    about e^kappa * kappa * ln|X| colorings per repetition; the result is
    one-sided and should be checked with `verify_perfect`.
    """
    universe = tuple(universe)
    if kappa > len(universe):
        raise ValidationError("kappa exceeds the universe size")
    if kappa <= 0:
        raise ValidationError("kappa must be positive")
    limit = effective_cap(cap if cap is not None else GUESS_CAP)
    if mode == "exhaustive":
        if kappa ** len(universe) > limit:
            raise ResourceCapError("coloring space exceeds the cap")
        uncovered = set(combinations(universe, kappa))
        chosen = []
        for values in product(range(kappa), repeat=len(universe)):
            if not uncovered:
                break
            f = dict(zip(universe, values))
            hits = [s for s in uncovered if len({f[x] for x in s}) == kappa]
            if hits:
                chosen.append(f)
                uncovered.difference_update(hits)
        family = PerfectHashFamily(universe, kappa, tuple(chosen), "exhaustive")
        ok, _ = verify_perfect(family)
        if not ok:
            raise AssertionError("exhaustive family failed verification")
        return family
    if mode != "randomized":
        raise ValueError(f"unknown mode {mode!r}")
    rng = random.Random(seed)
    draws = max(1, math.ceil(math.e**kappa * kappa * max(1.0, math.log(len(universe)))))
    functions = []
    for _ in range(draws * max(1, repetitions)):
        functions.append({x: rng.randrange(kappa) for x in universe})
    return PerfectHashFamily(universe, kappa, tuple(functions), "randomized")


def solve_ccadc_colorcoding(
    instance: ControlInstance,
    hash_mode: str = "exhaustive",
    seed: int = 0,
    repetitions: int = 1,
    cap: Optional[int] = None,
    jcc_algo: Optional[str] = None,
) -> Verdict:
    """CCAC/CCDC/CCADC by color coding over added and deleted candidates.

    For each exact budget pair, hash the deletable and addable candidates
    into that many color classes; a solution picks one candidate per
    class, and within a class only the approver set of the pick matters,
    so distinct approver sets are tried through representatives. With an
    exhaustive (verified) family the verdict is deterministic and equals
    brute force; the randomized family gives a one-sided answer (YES is
    certain, NO may be wrong) and says so in the verdict details.
    """
    if instance.ctype not in _CANDIDATE_TYPES:
        raise UnsupportedRuleError("this solver handles candidate control")
    if instance.rule.kind not in ("SAV", "NSAV", "ABCCV", "PAV", "MAV", "THIELE", "AV"):
        raise UnsupportedRuleError(f"unsupported rule {instance.rule.kind}")
    if jcc_algo is None:
        jcc_algo = "auto" if instance.rule.is_additive else "fptn"
    la = instance.budget_add or 0
    ld = instance.budget_delete or 0
    deletable = [c for c in instance.registered_candidates if c not in instance.distinguished]
    addable = list(instance.unregistered_candidates)
    approvers = {}
    all_votes = instance.registered_votes
    for c in list(instance.registered_candidates) + addable:
        approvers[c] = frozenset(i for i, v in enumerate(all_votes) if c in v)
    details = {"hash_mode": hash_mode}
    for exact_delete in range(0, ld + 1):
        for exact_add in range(0, la + 1):
            if len(instance.registered_candidates) - exact_delete + exact_add < instance.k:
                continue
            if exact_delete > len(deletable) or exact_add > len(addable):
                continue
            del_family = (
                [None]
                if exact_delete == 0
                else build_perfect_hash_family(
                    deletable, exact_delete, hash_mode, seed, repetitions, cap
                ).functions
            )
            add_family = (
                [None]
                if exact_add == 0
                else build_perfect_hash_family(
                    addable, exact_add, hash_mode, seed + 1, repetitions, cap
                ).functions
            )
            for f, g in product(del_family, add_family):
                del_classes = _color_class_representatives(deletable, f, exact_delete, approvers)
                add_classes = _color_class_representatives(addable, g, exact_add, approvers)
                if del_classes is None or add_classes is None:
                    continue
                for deleted in product(*del_classes):
                    for added in product(*add_classes):
                        solution = ControlSolution(
                            added_candidates=tuple(added), deleted_candidates=tuple(deleted)
                        )
                        if control_succeeds(instance, solution, jcc_algo):
                            return Verdict(True, solution, details)
    return Verdict(False, None, details)


def _color_class_representatives(pool, coloring, classes, approvers):
    """Per color class, one representative per distinct approver set."""
    if classes == 0:
        return []
    buckets = [[] for _ in range(classes)]
    if coloring is None:
        return None
    for c in pool:
        buckets[coloring[c]].append(c)
    reps = []
    for bucket in buckets:
        if not bucket:
            return None  # this coloring cannot host an exact-size solution
        seen = {}
        for c in bucket:
            seen.setdefault(approvers[c], c)
        reps.append(sorted(seen.values()))
    return reps
