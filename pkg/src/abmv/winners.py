"""Winning-committee enumeration and the J-CC decision problem.

`winning_committees` is the ground truth the strategic solvers are
checked against: exhaustive search over all k-committees, with an
additive shortcut through the threshold partition that must agree with
it. `j_cc` decides whether a candidate set J is contained in every
winning k-committee, either by brute force or by the per-approval-class
integer programs that are fixed-parameter tractable in the number of
votes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional

from abmv import core
from abmv.caps import COMMITTEE_ENUMERATION_CAP, GUESS_CAP, effective_cap
from abmv.core import (
    Election,
    ResourceCapError,
    Rule,
    UnsupportedRuleError,
    ValidationError,
    committee_score,
)
from abmv import ipcore


@dataclass(frozen=True)
class WinningSet:
    """All optimal k-committees, colexicographically ordered, plus the optimum."""

    committees: tuple
    optimum: Fraction

    def __contains__(self, members) -> bool:
        return tuple(members) in self.committees


@dataclass(frozen=True)
class JccInstance:
    election: Election
    k: int
    distinguished: frozenset

    def __post_init__(self):
        object.__setattr__(self, "distinguished", frozenset(self.distinguished))
        if not 1 <= len(self.distinguished) <= self.k <= self.election.m:
            raise ValidationError("need 1 <= |J| <= k <= |C|")
        for c in self.distinguished:
            self.election.index(c)


@dataclass(frozen=True)
class StarPartition:
    """Candidates grouped by their exact approver set."""

    groups: dict  # frozenset of vote indices -> tuple of candidates

    def m_star(self, key: frozenset) -> int:
        return len(self.groups.get(key, ()))


def star_partition(election: Election) -> StarPartition:
    return StarPartition(dict(election.approval_classes))


def _colex_key(election: Election, committee) -> tuple:
    return tuple(reversed([election.index(c) for c in committee]))


def _sorted_committees(election: Election, committees) -> tuple:
    canon = [election.sort_candidates(w) for w in committees]
    return tuple(sorted(canon, key=lambda w: _colex_key(election, w)))


def winning_committees(
    rule: Rule,
    election: Election,
    k: int,
    strategy: str = "auto",
    cap: Optional[int] = None,
) -> WinningSet:
    """Exactly the argmax (argmin for MAV) k-committees.

    The partition strategy is legal only for additive rules and must
    return the same set as exhaustive search. Exhaustive search refuses
    to enumerate past its cap rather than truncate.
    """
    if not 0 < k <= election.m:
        raise core.DomainError(f"k={k} out of range")
    if strategy == "auto":
        strategy = "partition" if rule.is_additive else "exhaustive"
    if strategy == "partition":
        if not rule.is_additive:
            raise UnsupportedRuleError("partition strategy needs an additive rule")
        return _winning_by_partition(rule, election, k, cap)
    if strategy != "exhaustive":
        raise ValueError(f"unknown strategy {strategy!r}")
    limit = effective_cap(cap if cap is not None else COMMITTEE_ENUMERATION_CAP)
    if math.comb(election.m, k) > limit:
        raise ResourceCapError(
            f"{math.comb(election.m, k)} committees exceed the enumeration cap {limit}"
        )
    best = None
    winners = []
    minimizing = rule.orientation == "minimize"
    for combo in combinations(election.candidates, k):
        score = committee_score(rule, election, combo)
        if best is None or (score < best if minimizing else score > best):
            best = score
            winners = [combo]
        elif score == best:
            winners.append(combo)
    return WinningSet(_sorted_committees(election, winners), best)


def _winning_by_partition(rule, election, k, cap):
    part = core.partition_candidates(rule, election, k)
    scores = core.additive_scores(rule, election)
    need = k - len(part.swin)
    limit = effective_cap(cap if cap is not None else COMMITTEE_ENUMERATION_CAP)
    if math.comb(len(part.pwin), need) > limit:
        raise ResourceCapError("possible-winner pool too large to enumerate")
    base = sum((scores[c] for c in part.swin), Fraction(0))
    optimum = base + need * part.threshold
    swin = tuple(part.swin)
    committees = [swin + extra for extra in combinations(tuple(part.pwin), need)]
    return WinningSet(_sorted_committees(election, committees), optimum)


def mav_single_winners(election: Election) -> frozenset:
    """The tied MAV winners at k=1, computed in closed form.

    Intersect the votes of maximum size x: candidates outside that
    intersection are at distance x+1 from some largest vote, members at
    most x, so winners come from the intersection when it is nonempty
    (otherwise everybody ties at x+1). Within the intersection only
    votes of size x-1 can still discriminate: a member they all approve
    sits at the floor distance x-1; if no member is approved by all of
    them, the whole intersection ties at x. Matches exhaustive search
    at k=1; an empty vote multiset ties everyone.
    """
    if election.m < 1:
        raise core.DomainError("no candidates")
    if not election.votes:
        return frozenset(election.candidates)
    top = max(len(v) for v in election.votes)
    shared = None
    for v in election.votes:
        if len(v) == top:
            shared = v if shared is None else shared & v
    if not shared:
        return frozenset(election.candidates)
    floor_winners = set(shared)
    for v in election.votes:
        if len(v) == top - 1:
            floor_winners &= v
    return frozenset(floor_winners or shared)


# ---------------------------------------------------------------------------
# Optimal committee score through approval classes (FPT in the vote count)


def _class_layout(election: Election):
    """Stable list of (approver-index-set, size) plus per-vote class ids."""
    classes = list(election.approval_classes.items())
    per_vote = [[] for _ in range(election.n)]
    for g, (key, members) in enumerate(classes):
        for vid in key:
            per_vote[vid].append(g)
    return classes, per_vote


def optimal_score_by_classes(rule: Rule, election: Election, k: int, cap: Optional[int] = None) -> Fraction:
    """Optimum committee score found by enumerating per-class member counts.

    Candidates with the same approver set are interchangeable, so a
    committee's score depends only on how many members it takes from
    each class; this stays feasible when the roster is huge but the vote
    multiset is small.
    """
    classes, per_vote = _class_layout(election)
    sizes = [len(members) for _, members in classes]
    vote_sizes = [len(v) for v in election.votes]
    limit = effective_cap(cap if cap is not None else GUESS_CAP)
    minimizing = rule.orientation == "minimize"
    best = None
    counts = [0] * len(classes)
    visited = 0
    class_scores = None
    if rule.is_additive:
        per_class = {members[0]: s for s, members in core.additive_class_scores(rule, election)}
        class_scores = [per_class[members[0]] for _, members in classes]

    def score_counts():
        if class_scores is not None:
            return sum((counts[g] * class_scores[g] for g in range(len(classes))), Fraction(0))
        overlaps = [sum(counts[g] for g in per_vote[vid]) for vid in range(election.n)]
        if rule.kind == "MAV":
            if not election.votes:
                return Fraction(0)
            return Fraction(max(vote_sizes[v] + k - 2 * overlaps[v] for v in range(election.n)))
        return sum((rule.omega_value(o) for o in overlaps), Fraction(0))

    def walk(g, remaining):
        nonlocal best, visited
        visited += 1
        if visited > limit:
            raise ResourceCapError("class-count enumeration exceeded its cap")
        if g == len(classes):
            if remaining == 0:
                s = score_counts()
                if best is None or (s < best if minimizing else s > best):
                    best = s
            return
        tail = sum(sizes[g:])
        if remaining > tail:
            return
        for c in range(min(sizes[g], remaining) + 1):
            counts[g] = c
            walk(g + 1, remaining - c)
        counts[g] = 0

    walk(0, k)
    if best is None:
        raise core.DomainError("k exceeds the number of candidates")
    return best


# ---------------------------------------------------------------------------
# J-CC


def j_cc(rule: Rule, instance: JccInstance, algo: str = "auto", cap: Optional[int] = None) -> bool:
    """True iff J is contained in every winning k-committee.

    `bruteforce` enumerates winners; `fptn` runs the per-approval-class
    optimality programs (ABCCV through residual elections, Thiele rules
    through the omega-sum program, MAV through per-vote distance rows)
    and is only defined for those rules — additive rules are answered
    from the threshold partition in constant extra work.
    """
    election, k, wanted = instance.election, instance.k, instance.distinguished
    if algo == "auto":
        if rule.is_additive:
            return core.additive_jcc(rule, election, k, wanted)
        if math.comb(election.m, k) <= 200_000:
            algo = "bruteforce"
        else:
            algo = "fptn"
    if algo == "bruteforce":
        ws = winning_committees(rule, election, k, strategy="exhaustive", cap=cap)
        return all(wanted <= frozenset(w) for w in ws.committees)
    if algo != "fptn":
        raise ValueError(f"unknown algorithm {algo!r}")
    if rule.is_additive:
        raise UnsupportedRuleError(
            "fptn is not defined for additive rules; the partition answers them directly"
        )
    return _jcc_fptn(rule, instance, cap)


def _jcc_fptn(rule: Rule, instance: JccInstance, cap) -> bool:
    election, k, wanted = instance.election, instance.k, instance.distinguished
    limit = effective_cap(cap if cap is not None else GUESS_CAP)
    classes, _ = _class_layout(election)
    if len(classes) > limit or 2 ** election.n > limit:
        raise ResourceCapError("too many approval classes for the fptn path")
    optimum = optimal_score_by_classes(rule, election, k, cap)
    by_key = dict(classes)
    tagged = [key for key, members in classes if wanted & frozenset(members)]
    if rule.kind == "ABCCV":
        if sum(len(by_key[key]) for key in tagged) > k:
            return False
    for key in tagged:
        if _optimal_committee_shorting_class(rule, instance, key, optimum):
            return False
    return True


def _optimal_committee_shorting_class(rule, instance, short_key, optimum) -> bool:
    """Is there an optimal k-committee taking fewer than all of one class?

    If the shorted class holds a distinguished candidate, clone-swapping
    turns such a committee into an optimal one missing part of J.
    """
    election, k = instance.election, instance.k
    if rule.kind == "ABCCV":
        return _abccv_short_check(election, k, short_key, optimum)
    if rule.kind == "MAV":
        program = _mav_short_program(election, k, short_key, optimum)
    else:
        program = _thiele_short_program(rule, election, k, short_key, optimum)
    result = ipcore.solve_ip(program)
    if result.status == ipcore.CAP_EXCEEDED:
        raise ResourceCapError("class program exceeded the IP node cap")
    return result.feasible


def _short_class_variables(election, k, short_key):
    classes, per_vote = _class_layout(election)
    program = ipcore.IntegerProgram()
    names = []
    for g, (key, members) in enumerate(classes):
        upper = len(members) - 1 if key == short_key else len(members)
        names.append(program.add_variable(f"x{g}", 0, upper))
    program.add_constraint([(x, 1) for x in names], "=", k)
    return program, names, classes, per_vote


def _mav_short_program(election, k, short_key, optimum):
    program, names, classes, per_vote = _short_class_variables(election, k, short_key)
    for vid, vote in enumerate(election.votes):
        inside = set(per_vote[vid])
        coeffs = [(names[g], -1 if g in inside else 1) for g in range(len(classes))]
        program.add_constraint(coeffs, "<=", optimum - len(vote))
    return program


def _thiele_short_program(rule, election, k, short_key, optimum):
    """Omega-sum formulation: prefix indicators expand omega over integer overlaps."""
    program, names, classes, per_vote = _short_class_variables(election, k, short_key)
    total = []
    for vid in range(election.n):
        xv = program.add_variable(f"v{vid}", 0, k)
        coeffs = [(names[g], 1) for g in per_vote[vid]] + [(xv, -1)]
        program.add_constraint(coeffs, "=", 0)
        prev = None
        zs = []
        for i in range(1, k + 1):
            z = program.add_variable(f"z{vid}_{i}", 0, 1)
            zs.append(z)
            if prev is not None:
                program.add_constraint([(z, 1), (prev, -1)], "<=", 0)
            total.append((z, rule.omega_value(i) - rule.omega_value(i - 1)))
            prev = z
        program.add_constraint([(z, 1) for z in zs] + [(xv, -1)], "=", 0)
    program.add_constraint(total, "=", optimum)
    return program


def _abccv_short_check(election, k, short_key, optimum) -> bool:
    """Residual-election feasibility for every shortfall size of one class."""
    short_members = set(election.approval_classes[short_key])
    size = len(short_members)
    rest = [c for c in election.candidates if c not in short_members]
    for taken in range(size):
        if taken == 0:
            vote_ids = range(election.n)
            target = optimum
        else:
            vote_ids = [i for i in range(election.n) if i not in short_key]
            target = optimum - len(short_key)
        seats = k - taken
        if seats < 0 or seats > len(rest) or target < 0 or target > len(list(vote_ids)):
            continue
        residual = Election(rest, [election.votes[i] & set(rest) for i in vote_ids])
        if _abccv_exact_cover_program(residual, seats, target):
            return True
    return False


def _abccv_exact_cover_program(election, seats, target) -> bool:
    classes, per_vote = _class_layout(election)
    program = ipcore.IntegerProgram()
    names = []
    for g, (key, members) in enumerate(classes):
        names.append(program.add_variable(f"x{g}", 0, len(members)))
    program.add_constraint([(x, 1) for x in names], "=", seats)
    satisfied = []
    for vid in range(election.n):
        y = program.add_variable(f"y{vid}", 0, 1)
        satisfied.append(y)
        coeffs = [(y, 1)] + [(names[g], -1) for g in per_vote[vid]]
        program.add_constraint(coeffs, "<=", 0)
    program.add_constraint([(y, 1) for y in satisfied], "=", target)
    result = ipcore.solve_ip(program)
    if result.status == ipcore.CAP_EXCEEDED:
        raise ResourceCapError("residual program exceeded the IP node cap")
    return result.feasible
