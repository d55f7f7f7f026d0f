"""Coalition manipulation: CBCM, SBCM, and SDCM.

Three preference extensions are supported: a manipulator prefers a new
committee by cardinality (strictly more approved members), by subset
(keeps every approved member and gains one), or compares whole winning
collections by stochastic domination. Every solver returns a verdict
with a machine-checkable ballot profile on YES, and every specialized
algorithm must agree with `solve_manipulation_bruteforce` on its
applicability domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Optional, Sequence

from abmv import core, winners
from abmv.caps import GUESS_CAP, MANIPULATOR_CAP, PROFILE_CAP, effective_cap
from abmv.core import (
    Election,
    ResourceCapError,
    Rule,
    UnsupportedRuleError,
    ValidationError,
    Verdict,
)
from abmv import ipcore

VARIANTS = ("CBCM", "SBCM", "SDCM")


@dataclass(frozen=True)
class ManipulationInstance:
    rule: Rule
    variant: str
    candidates: tuple
    honest_votes: tuple
    manipulative_votes: tuple
    k: int
    current_committee: Optional[frozenset] = None
    # optional per-manipulator private blocks for structured searches
    ballot_blocks: tuple = ()

    def __init__(
        self,
        rule,
        variant,
        candidates,
        honest_votes,
        manipulative_votes,
        k,
        current_committee=None,
        ballot_blocks=(),
        validate_committee=True,
    ):
        object.__setattr__(self, "rule", rule)
        object.__setattr__(self, "variant", variant)
        object.__setattr__(self, "candidates", tuple(candidates))
        object.__setattr__(self, "honest_votes", tuple(frozenset(v) for v in honest_votes))
        object.__setattr__(
            self, "manipulative_votes", tuple(frozenset(v) for v in manipulative_votes)
        )
        object.__setattr__(self, "k", int(k))
        object.__setattr__(
            self,
            "current_committee",
            None if current_committee is None else frozenset(current_committee),
        )
        object.__setattr__(
            self, "ballot_blocks", tuple(tuple(frozenset(b) for b in bs) for bs in ballot_blocks)
        )
        if variant not in VARIANTS:
            raise ValidationError(f"unknown manipulation variant {variant!r}")
        if not self.manipulative_votes:
            raise ValidationError("need at least one manipulator")
        if (self.current_committee is None) != (variant == "SDCM"):
            raise ValidationError("a current committee is required exactly when variant is not SDCM")
        if self.ballot_blocks and len(self.ballot_blocks) != len(self.manipulative_votes):
            raise ValidationError("ballot_blocks must align with the manipulators")
        election = self.full_election  # validates ballots against the roster
        if self.current_committee is not None:
            if len(self.current_committee) != self.k:
                raise ValidationError("current committee has the wrong size")
            if validate_committee and not _is_winning(self.rule, election, self.k, self.current_committee):
                raise ValidationError("current committee is not winning in the truthful election")

    @property
    def t(self) -> int:
        return len(self.manipulative_votes)

    @property
    def full_election(self) -> Election:
        return Election(self.candidates, self.honest_votes + self.manipulative_votes)

    @property
    def base_election(self) -> Election:
        return Election(self.candidates, self.honest_votes)

    def election_with(self, profile: Sequence[frozenset]) -> Election:
        return Election(self.candidates, self.honest_votes + tuple(frozenset(b) for b in profile))

    @property
    def approved_union(self) -> frozenset:
        out = frozenset()
        for v in self.manipulative_votes:
            out |= v
        return out


def _is_winning(rule, election, k, committee) -> bool:
    score = core.committee_score(rule, election, committee)
    optimum = winners.optimal_score_by_classes(rule, election, k)
    return score == optimum


NO = Verdict(False)


@dataclass(frozen=True)
class SdVerdict:
    dominates: bool
    witness_levels: tuple = ()


def prefers(variant: str, voter: Iterable[str], new_committee, old_committee) -> bool:
    """Does this ballot strictly prefer the new committee to the old one?"""
    v = frozenset(voter)
    new = v & frozenset(new_committee)
    old = v & frozenset(old_committee)
    if variant.lower() in ("cardinality", "cbcm"):
        return len(new) > len(old)
    if variant.lower() in ("subset", "sbcm"):
        return old < new
    raise ValueError(f"unknown preference variant {variant!r}")


def sd_dominates(coll_a, coll_b, subject: Iterable[str]) -> SdVerdict:
    """Stochastic domination of committee collection A over B subject to one ballot.

    For every overlap level i the fraction of committees meeting it must
    be at least as large in A as in B, and strictly larger somewhere.
    """
    a = [frozenset(w) for w in coll_a]
    b = [frozenset(w) for w in coll_b]
    if not a or not b:
        raise ValueError("both collections must be nonempty")
    s = frozenset(subject)
    top = max(len(w) for w in a + b)
    strict = []
    for i in range(0, top + 1):
        count_a = sum(1 for w in a if len(w & s) >= i)
        count_b = sum(1 for w in b if len(w & s) >= i)
        lhs = count_a * len(b)
        rhs = count_b * len(a)
        if lhs < rhs:
            return SdVerdict(False)
        if lhs > rhs:
            strict.append(i)
    return SdVerdict(bool(strict), tuple(strict))


# ---------------------------------------------------------------------------
# Acceptance checks
#
# The additive path reads everything off the threshold partition. The
# general path groups candidates into clone classes of the manipulated
# election (refined so that truthful ballots and the displaced committee
# are unions of classes) and enumerates committees as per-class counts;
# scores and all acceptance predicates are then count-determined.


def _partition_sets(scores: dict, k: int):
    """(swin, pwin) from a candidate->score map."""
    ordered = sorted(scores.values(), reverse=True)
    threshold = ordered[k - 1]
    eq = [c for c, s in scores.items() if s == threshold]
    gt = frozenset(c for c, s in scores.items() if s > threshold)
    if len(eq) == 1:
        return gt | frozenset(eq), frozenset()
    return gt, frozenset(eq)


def _min_overlap(swin, pwin, k, v) -> int:
    """Fewest v-approved members any winning committee can have."""
    return len(swin & v) + max(0, (k - len(swin)) - len(pwin - v))


def _all_winning_contain(swin, pwin, k, members) -> bool:
    if members <= swin:
        return True
    return len(swin) + len(pwin) == k and members <= (swin | pwin)


def _additive_accepts(instance, swin, pwin) -> bool:
    k, w = instance.k, instance.current_committee
    for v in instance.manipulative_votes:
        gained = _min_overlap(swin, pwin, k, v)
        if instance.variant == "CBCM":
            if gained <= len(v & w):
                return False
        else:  # SBCM: keep every approved winner, then gain strictly
            if not _all_winning_contain(swin, pwin, k, v & w):
                return False
            if gained <= len(v & w):
                return False
    return True


def _refined_classes(election: Election, references: Sequence[frozenset]):
    """Clone classes refined so each reference set is a union of classes.

    Returns (sizes, per_vote_classes, in_reference, class_members):
    per_vote_classes[vid] lists the classes the vote approves entirely;
    in_reference[r] is the set of classes inside reference r.
    """
    keys = {}
    for c in election.candidates:
        key = (election.approver_sets[c],) + tuple(c in r for r in references)
        keys.setdefault(key, []).append(c)
    ordered = sorted(keys.items(), key=lambda kv: election.index(kv[1][0]))
    sizes = [len(members) for _, members in ordered]
    per_vote = [[] for _ in range(election.n)]
    for g, (key, _) in enumerate(ordered):
        for vid in key[0]:
            per_vote[vid].append(g)
    in_ref = []
    for r_i in range(len(references)):
        in_ref.append(frozenset(g for g, (key, _) in enumerate(ordered) if key[1 + r_i]))
    members = [tuple(m) for _, m in ordered]
    return sizes, per_vote, in_ref, members


def _optimal_count_vectors(rule, election, k, sizes, per_vote, members, cap):
    """(best_score, list of count vectors achieving it)."""
    limit = effective_cap(cap if cap is not None else GUESS_CAP)
    vote_sizes = [len(v) for v in election.votes]
    minimizing = rule.orientation == "minimize"
    best = None
    best_vectors = []
    counts = [0] * len(sizes)
    visited = 0
    suffix = [0] * (len(sizes) + 1)
    for g in range(len(sizes) - 1, -1, -1):
        suffix[g] = suffix[g + 1] + sizes[g]
    class_scores = None
    if rule.is_additive:
        scores = core.additive_scores(rule, election)
        class_scores = [scores[members[g][0]] for g in range(len(sizes))]

    def score_counts():
        if class_scores is not None:
            return sum((counts[g] * class_scores[g] for g in range(len(sizes))), Fraction(0))
        overlaps = [sum(counts[g] for g in per_vote[vid]) for vid in range(election.n)]
        if rule.kind == "MAV":
            if not election.votes:
                return Fraction(0)
            return Fraction(max(vote_sizes[v] + k - 2 * overlaps[v] for v in range(election.n)))
        return sum((rule.omega_value(o) for o in overlaps), Fraction(0))

    def walk(g, remaining):
        nonlocal best, best_vectors, visited
        visited += 1
        if visited > limit:
            raise ResourceCapError("committee-count enumeration exceeded its cap")
        if remaining > suffix[g]:
            return
        if g == len(sizes):
            s = score_counts()
            if best is None or (s < best if minimizing else s > best):
                best = s
                best_vectors = [tuple(counts)]
            elif s == best:
                best_vectors.append(tuple(counts))
            return
        for c in range(min(sizes[g], remaining) + 1):
            counts[g] = c
            walk(g + 1, remaining - c)
        counts[g] = 0

    walk(0, k)
    return best, best_vectors


def _vector_overlap(vector, class_set) -> int:
    return sum(vector[g] for g in class_set)


def _winning_profile_by_classes(rule, election, k, references, cap):
    """Optimal count vectors plus reference-class layout for one election."""
    sizes, per_vote, in_ref, members = _refined_classes(election, references)
    best, vectors = _optimal_count_vectors(rule, election, k, sizes, per_vote, members, cap)
    return sizes, in_ref, members, best, vectors


def _distribution(sizes, in_ref_sets, vectors, subjects_idx, k):
    """Per subject: how many winning committees meet each overlap level.

    Committees are counted through their count vectors; a vector stands
    for prod(C(size, count)) distinct committees.
    """
    total = 0
    per_level = {s: [0] * (k + 2) for s in subjects_idx}
    for vec in vectors:
        weight = 1
        for sz, c in zip(sizes, vec):
            weight *= math.comb(sz, c)
        total += weight
        for s in subjects_idx:
            o = _vector_overlap(vec, in_ref_sets[s])
            per_level[s][min(o, k + 1)] += weight
    cumulative = {}
    for s in subjects_idx:
        counts = per_level[s]
        cum = [0] * (k + 2)
        running = 0
        for i in range(k + 1, -1, -1):
            running += counts[i]
            cum[i] = running
        cumulative[s] = cum
    return total, cumulative


def _sd_dominates_distribution(new_total, new_cum, old_total, old_cum, k) -> bool:
    strict = False
    for i in range(0, k + 2):
        lhs = new_cum[i] * old_total
        rhs = old_cum[i] * new_total
        if lhs < rhs:
            return False
        if lhs > rhs:
            strict = True
    return strict


class _ProfileChecker:
    """Evaluates acceptance of candidate ballot profiles for one instance.

    Additive rules run on integer-scaled scores (denominators divide
    lcm(1..m), so scaling is exact); other rules go through the clone
    class evaluator. For SDCM the truthful winning distribution is
    computed once up front.
    """

    def __init__(self, instance: ManipulationInstance, cap=None):
        self.instance = instance
        self.cap = cap
        self.rule = instance.rule
        self.election = instance.base_election
        self._ballot_cache = {}
        if self.rule.is_additive:
            m = len(instance.candidates)
            self.scale = math.lcm(*range(1, m + 1))
            base = core.additive_scores(self.rule, self.election)
            self.base_int = {c: int(base[c] * self.scale) for c in instance.candidates}
        if instance.variant == "SDCM":
            refs = list(instance.manipulative_votes)
            sizes, in_ref, _, _, vectors = _winning_profile_by_classes(
                self.rule, instance.full_election, instance.k, refs, cap
            )
            self.old_distribution = _distribution(
                sizes, in_ref, vectors, range(len(refs)), instance.k
            )

    def _ballot_weight(self, ballot: frozenset) -> int:
        cached = self._ballot_cache.get(ballot)
        if cached is not None:
            return cached
        m = len(self.instance.candidates)
        size = len(ballot)
        if self.rule.kind == "AV":
            weight = self.scale
        elif self.rule.kind == "SAV":
            weight = self.scale // size if size else 0
        else:  # NSAV: members gain the approval and dodge the penalty
            weight = self.scale // size if size else 0
            if size < m:
                weight += self.scale // (m - size)
        self._ballot_cache[ballot] = weight
        return weight

    def accepts(self, profile: Sequence[frozenset]) -> bool:
        inst = self.instance
        if self.rule.is_additive and inst.variant != "SDCM":
            scores = dict(self.base_int)
            for ballot in profile:
                weight = self._ballot_weight(ballot)
                for c in ballot:
                    scores[c] += weight
            swin, pwin = _partition_sets(scores, inst.k)
            return _additive_accepts(inst, swin, pwin)
        return self._general_accepts(profile)

    def _general_accepts(self, profile) -> bool:
        inst = self.instance
        election = inst.election_with(profile)
        refs = list(inst.manipulative_votes)
        if inst.current_committee is not None:
            refs.append(inst.current_committee)
        sizes, in_ref, _, _, vectors = _winning_profile_by_classes(
            self.rule, election, inst.k, refs, self.cap
        )
        if inst.variant == "SDCM":
            new = _distribution(sizes, in_ref, vectors, range(inst.t), inst.k)
            old_total, old_cum = self.old_distribution
            for i in range(inst.t):
                if not _sd_dominates_distribution(
                    new[0], new[1][i], old_total, old_cum[i], inst.k
                ):
                    return False
            return True
        w_classes = in_ref[-1]
        for i, v in enumerate(inst.manipulative_votes):
            v_classes = in_ref[i]
            old_overlap = len(v & inst.current_committee)
            shared = v_classes & w_classes
            for vec in vectors:
                gained = _vector_overlap(vec, v_classes)
                if gained <= old_overlap:
                    return False
                if inst.variant == "SBCM":
                    # every member of v ∩ w must appear in every winning committee
                    if any(vec[g] != sizes[g] for g in shared):
                        return False
        return True


def certify_manipulation(instance: ManipulationInstance, profile: Sequence[frozenset]) -> bool:
    """Re-verify a YES witness by applying it and checking every winner.

    Runs the plain definition (enumerate winning committees, test every
    manipulator) whenever the committee space is enumerable; otherwise
    falls back to the clone-class evaluation.
    """
    if len(profile) != instance.t:
        return False
    roster = set(instance.candidates)
    if any(not frozenset(b) <= roster for b in profile):
        return False
    election = instance.election_with(profile)
    if math.comb(election.m, instance.k) <= 100_000:
        new = winners.winning_committees(instance.rule, election, instance.k, strategy="exhaustive")
        if instance.variant == "SDCM":
            old = winners.winning_committees(
                instance.rule, instance.full_election, instance.k, strategy="exhaustive"
            )
            return all(
                sd_dominates(new.committees, old.committees, v).dominates
                for v in instance.manipulative_votes
            )
        which = "cardinality" if instance.variant == "CBCM" else "subset"
        return all(
            prefers(which, v, frozenset(wc), instance.current_committee)
            for v in instance.manipulative_votes
            for wc in new.committees
        )
    return _ProfileChecker(instance).accepts(tuple(frozenset(b) for b in profile))


# ---------------------------------------------------------------------------
# Brute force


def _sorted_ballots(election: Election, pool) -> list:
    subsets = []
    pool = sorted(pool, key=election.index)
    for r in range(len(pool) + 1):
        for combo in combinations(pool, r):
            subsets.append(frozenset(combo))
    return subsets


def _ballot_options(instance: ManipulationInstance, pool_kind: str, pool_override):
    """Per-manipulator candidate ballot lists (base pool plus private blocks)."""
    election = instance.full_election
    if pool_override is not None:
        base_pool = frozenset(pool_override)
    elif pool_kind == "unrestricted":
        base_pool = frozenset(instance.candidates)
    elif pool_kind == "with_committee":
        base_pool = instance.approved_union | (instance.current_committee or frozenset())
    elif pool_kind == "auto":
        # additive rules: recasting outside the truthful pool never helps;
        # for the other rules no such normalization is sound (padding a
        # ballot with unapproved candidates can reshape MAV distances),
        # so the full roster is searched
        if instance.rule.is_additive:
            base_pool = instance.approved_union
        else:
            base_pool = frozenset(instance.candidates)
    else:
        raise ValueError(f"unknown pool {pool_kind!r}")
    bases = _sorted_ballots(election, base_pool)
    per_manipulator = []
    for i in range(instance.t):
        blocks = instance.ballot_blocks[i] if instance.ballot_blocks else ()
        extras = [frozenset()]
        for r in range(1, len(blocks) + 1):
            for combo in combinations(blocks, r):
                extras.append(frozenset().union(*combo))
        per_manipulator.append(extras)
    return bases, per_manipulator


def solve_manipulation_bruteforce(
    instance: ManipulationInstance,
    profile_mode: str = "split",
    pool: str = "auto",
    pool_override=None,
    cap: Optional[int] = None,
) -> Verdict:
    """Exhaustive search over ballot profiles; YES verdicts carry a witness.

    `split` lets every manipulator pick independently; `common` assigns
    one shared base ballot (each manipulator may still add its private
    blocks, which is how the structured constructions are searched).
    The default pool restricts ballots to candidates some manipulator
    truthfully approves — exact for additive rules — joined with the
    displaced committee for the other rules; `unrestricted` is the
    escape hatch.
    """
    limit = effective_cap(cap if cap is not None else PROFILE_CAP)
    bases, extras = _ballot_options(instance, pool, pool_override)
    checker = _ProfileChecker(instance, cap)
    extra_count = 1
    for ex in extras:
        extra_count *= len(ex)
    if profile_mode == "split":
        total = extra_count * len(bases) ** instance.t
        if total > limit:
            raise ResourceCapError(f"{total} ballot profiles exceed the cap {limit}")
        pools = []
        for i in range(instance.t):
            seen, options = set(), []
            for b in bases:
                for e in extras[i]:
                    ballot = b | e
                    if ballot not in seen:
                        seen.add(ballot)
                        options.append(ballot)
            pools.append(options)
        for profile in product(*pools):
            if checker.accepts(profile):
                if certify_manipulation(instance, profile):
                    return Verdict(True, tuple(profile))
        return NO
    if profile_mode != "common":
        raise ValueError(f"unknown profile mode {profile_mode!r}")
    total = len(bases) * extra_count
    if total > limit:
        raise ResourceCapError(f"{total} ballot profiles exceed the cap {limit}")
    for base in bases:
        for chosen in product(*extras):
            profile = tuple(base | chosen[i] for i in range(instance.t))
            if checker.accepts(profile):
                if certify_manipulation(instance, profile):
                    return Verdict(True, profile)
    return NO


# ---------------------------------------------------------------------------
# AV with a constant number of manipulators: common ballots built from at
# most two score-consecutive blocks per approval class.


def _manipulator_classes(instance: ManipulationInstance):
    """Candidates grouped by the exact set of manipulators approving them."""
    groups = {}
    for c in sorted(instance.approved_union, key=instance.full_election.index):
        key = frozenset(i for i, v in enumerate(instance.manipulative_votes) if c in v)
        groups.setdefault(key, []).append(c)
    return groups


def _block_selections(ordered: Sequence[str]):
    """Every choice of at most two disjoint index intervals, as candidate tuples."""
    z = len(ordered)
    yield ()
    for i in range(z):
        for j in range(i, z):
            yield tuple(ordered[i : j + 1])
    for i1 in range(z):
        for j1 in range(i1, z):
            for i2 in range(j1 + 2, z):
                for j2 in range(i2, z):
                    yield tuple(ordered[i1 : j1 + 1]) + tuple(ordered[i2 : j2 + 1])


def solve_av_const_manipulators(instance: ManipulationInstance, cap: Optional[int] = None) -> Verdict:
    """CBCM/SBCM under AV, polynomial for a fixed number of manipulators.

    A feasible manipulation can be normalized so all manipulators cast
    one common ballot inside the truthfully approved pool whose trace on
    every approval class is at most two blocks of the class's
    base-score order; those ballots are enumerated and tested against
    the closed-form acceptance conditions.
    """
    if instance.rule.kind != "AV":
        raise UnsupportedRuleError("this solver handles AV only")
    if instance.variant not in ("CBCM", "SBCM"):
        raise UnsupportedRuleError("this solver handles CBCM and SBCM")
    base_scores = core.additive_scores(core.AV, instance.base_election)
    election = instance.full_election
    groups = _manipulator_classes(instance)
    w = instance.current_committee
    forced = frozenset()
    if instance.variant == "SBCM":
        forced = instance.approved_union & w
    ordered_groups = []
    for key in sorted(groups, key=sorted):
        members = [c for c in groups[key] if not (instance.variant == "SBCM" and c in w)]
        members.sort(key=lambda c: (-base_scores[c], election.index(c)))
        if members:
            ordered_groups.append(members)
    checker = _ProfileChecker(instance, cap)
    limit = effective_cap(cap if cap is not None else GUESS_CAP)
    selections = [list(_block_selections(g)) for g in ordered_groups]
    total = 1
    for sel in selections:
        total *= len(sel)
    if total > limit:
        raise ResourceCapError("block guess space exceeds the cap")
    for choice in product(*selections):
        ballot = frozenset(forced)
        for part in choice:
            ballot |= frozenset(part)
        profile = (ballot,) * instance.t
        if checker.accepts(profile):
            if certify_manipulation(instance, profile):
                return Verdict(True, profile)
    return NO


# ---------------------------------------------------------------------------
# AV manipulation in O*(2^m): every common ballot of at most k candidates.


def solve_manipulation_fpt_m_av(instance: ManipulationInstance, cap: Optional[int] = None) -> Verdict:
    if instance.rule.kind != "AV":
        raise UnsupportedRuleError("this solver handles AV only")
    if instance.variant not in ("CBCM", "SBCM"):
        raise UnsupportedRuleError("this solver handles CBCM and SBCM")
    m = len(instance.candidates)
    if m > 22:
        raise ResourceCapError(f"m={m} exceeds the 2^m enumeration bound")
    checker = _ProfileChecker(instance, cap)
    election = instance.full_election
    roster = sorted(instance.candidates, key=election.index)
    for r in range(0, instance.k + 1):
        for combo in combinations(roster, r):
            profile = (frozenset(combo),) * instance.t
            if checker.accepts(profile):
                if certify_manipulation(instance, profile):
                    return Verdict(True, profile)
    return NO


# ---------------------------------------------------------------------------
# Additive rules, FPT in m: guess the final score partition, then decide
# reachability with an integer program over ballot reassignments.


def _score_partitions(candidates, k):
    """All (sure, tied) splits a final additive election could realize."""
    roster = list(candidates)
    for sure_size in range(0, k + 1):
        for sure in combinations(roster, sure_size):
            rest = [c for c in roster if c not in sure]
            if sure_size == k:
                yield frozenset(sure), frozenset()
                continue
            need = k - sure_size
            for tied_size in range(max(2, need), len(rest) + 1):
                for tied in combinations(rest, tied_size):
                    yield frozenset(sure), frozenset(tied)


def _per_vote_score(rule, ballot: frozenset, candidate: str, m: int) -> Fraction:
    if rule.kind == "AV":
        return Fraction(1) if candidate in ballot else Fraction(0)
    if rule.kind == "SAV":
        if candidate in ballot:
            return Fraction(1, len(ballot))
        return Fraction(0)
    if rule.kind == "NSAV":
        if candidate in ballot:
            return Fraction(1, len(ballot))
        if len(ballot) != m:
            return -Fraction(1, m - len(ballot))
        return Fraction(0)
    raise UnsupportedRuleError(f"{rule.kind} is not additive")


def _reassignment_program(instance, swin, pwin):
    """Variables count manipulators moving from each truthful ballot to each
    new ballot; constraints pin the guessed winning collection exactly."""
    rule = instance.rule
    m = len(instance.candidates)
    election = instance.full_election
    base = core.additive_scores(rule, instance.base_election)
    truthful = {}
    for v in instance.manipulative_votes:
        truthful[v] = truthful.get(v, 0) + 1
    # recast ballots stay inside the truthfully approved pool; feasible
    # solutions outside it can always be normalized into it
    targets = _sorted_ballots(election, instance.approved_union)
    program = ipcore.IntegerProgram()
    names = {}
    for s_i, (src, count) in enumerate(sorted(truthful.items(), key=lambda kv: sorted(kv[0]))):
        row = []
        for t_i, dst in enumerate(targets):
            name = program.add_variable(f"x_{s_i}_{t_i}", 0, count)
            names[(src, dst)] = name
            row.append((name, 1))
        program.add_constraint(row, "=", count)

    def committee_expr(committee):
        members = frozenset(committee)
        const = sum((base[c] for c in members), Fraction(0))
        coeffs = {}
        for (src, dst), name in names.items():
            contribution = sum(
                (_per_vote_score(rule, dst, c, m) for c in members), Fraction(0)
            )
            if contribution:
                coeffs[name] = coeffs.get(name, Fraction(0)) + contribution
        return const, coeffs

    pool = frozenset(swin) | frozenset(pwin)
    family = [frozenset(swin) | frozenset(extra) for extra in combinations(sorted(pwin), instance.k - len(swin))]
    outside = [
        frozenset(c)
        for c in combinations(sorted(instance.candidates, key=election.index), instance.k)
        if not (frozenset(swin) <= frozenset(c) <= pool)
    ]
    exprs = {}

    def expr(wc):
        if wc not in exprs:
            exprs[wc] = committee_expr(wc)
        return exprs[wc]

    anchor = family[0]
    a_const, a_coeffs = expr(anchor)
    for other in family[1:]:
        o_const, o_coeffs = expr(other)
        coeffs = dict(a_coeffs)
        for name, c in o_coeffs.items():
            coeffs[name] = coeffs.get(name, Fraction(0)) - c
        program.add_constraint(list(coeffs.items()), "=", o_const - a_const)
    for other in outside:
        o_const, o_coeffs = expr(other)
        coeffs = dict(a_coeffs)
        for name, c in o_coeffs.items():
            coeffs[name] = coeffs.get(name, Fraction(0)) - c
        program.add_constraint(list(coeffs.items()), ">", o_const - a_const)
    return program, names, targets


def _decode_reassignment(instance, names, assignment):
    remaining = {}
    order = {}
    for i, v in enumerate(instance.manipulative_votes):
        order.setdefault(v, []).append(i)
    profile = [None] * instance.t
    moves = {}
    for (src, dst), name in names.items():
        count = assignment[name]
        if count:
            moves.setdefault(src, []).extend([dst] * count)
    for src, dsts in moves.items():
        for slot, dst in zip(order[src], dsts):
            profile[slot] = dst
    for i in range(instance.t):
        if profile[i] is None:
            profile[i] = instance.manipulative_votes[i]
    return tuple(profile)


def solve_manipulation_fpt_m_additive(instance: ManipulationInstance, cap: Optional[int] = None) -> Verdict:
    """CBCM/SBCM for polynomial-computable additive rules, FPT in m.

    Enumerates the score-consistent candidate winning collections (every
    additive winning set is `sure ∪ (choices from tied)`), discards
    collections some manipulator dislikes, and asks the integer program
    whether the manipulators can realize the collection exactly.
    """
    if not instance.rule.is_additive:
        raise UnsupportedRuleError("additive rules only")
    if instance.variant not in ("CBCM", "SBCM"):
        raise UnsupportedRuleError("this solver handles CBCM and SBCM")
    m = len(instance.candidates)
    if m > 8:
        raise ResourceCapError(f"m={m} exceeds the collection-enumeration bound")
    for swin, pwin in _score_partitions(instance.candidates, instance.k):
        if not _additive_accepts(instance, swin, pwin):
            continue
        program, names, _ = _reassignment_program(instance, swin, pwin)
        result = ipcore.solve_ip(program, cap)
        if result.status == ipcore.CAP_EXCEEDED:
            raise ResourceCapError("reassignment program exceeded the IP node cap")
        if result.feasible:
            profile = _decode_reassignment(instance, names, result.assignment)
            if certify_manipulation(instance, profile):
                return Verdict(True, profile)
    return NO


def solve_sdcm_fpt_m(instance: ManipulationInstance, cap: Optional[int] = None) -> Verdict:
    """SDCM for additive rules: a winning collection must stochastically
    dominate the truthful one for every manipulator and be exactly
    realizable by recast ballots."""
    if instance.variant != "SDCM":
        raise UnsupportedRuleError("this solver handles SDCM")
    if not instance.rule.is_additive:
        raise UnsupportedRuleError("additive rules only")
    m = len(instance.candidates)
    if m > 8:
        raise ResourceCapError(f"m={m} exceeds the collection-enumeration bound")
    old = winners.winning_committees(instance.rule, instance.full_election, instance.k)
    for swin, pwin in _score_partitions(instance.candidates, instance.k):
        family = [
            tuple(sorted(frozenset(swin) | frozenset(extra)))
            for extra in combinations(sorted(pwin), instance.k - len(swin))
        ]
        if not all(
            sd_dominates(family, old.committees, v).dominates
            for v in instance.manipulative_votes
        ):
            continue
        program, names, _ = _reassignment_program(instance, swin, pwin)
        result = ipcore.solve_ip(program, cap)
        if result.status == ipcore.CAP_EXCEEDED:
            raise ResourceCapError("reassignment program exceeded the IP node cap")
        if result.feasible:
            profile = _decode_reassignment(instance, names, result.assignment)
            if certify_manipulation(instance, profile):
                return Verdict(True, profile)
    return NO


# ---------------------------------------------------------------------------
# SAV/NSAV with a constant number of manipulators.
#
# Manipulators need not share a ballot under these rules, so the search
# guesses, per approval class and manipulator, how many class members the
# manipulator will approve, plus the final winning threshold; a per-class
# binary table then decides which score side each member can land on, and
# the class tables are aggregated into the acceptance inequalities.


def _threshold_gains(rule, m, m_sum, subset):
    """Score shift of a candidate approved by exactly the manipulators in
    `subset`, given every manipulator's final ballot size."""
    gain = Fraction(0)
    for i in subset:
        if m_sum[i] > 0:
            gain += Fraction(1, m_sum[i])
    if rule.kind == "NSAV":
        for i in range(len(m_sum)):
            if i not in subset and m_sum[i] < m:
                gain -= Fraction(1, m - m_sum[i])
    return gain


def _class_table(members, quota, approver_options, h_of, s, w_members, mode):
    """Reachable (above, at, per-manipulator-used) states for one class.

    Transitions follow the candidate order: each member is assigned the
    manipulator subset approving it, lands strictly above / at / below
    the threshold accordingly, and displaced-committee members are barred
    from falling below (at, for the multi-winner branch)."""
    t = len(quota)
    start = (0, 0, (0,) * t)
    states = {start: None}
    trace = []
    for c in members:
        in_w = c in w_members
        nxt = {}
        for (above, at, used) in states:
            for subset in approver_options:
                if any(used[i] + 1 > quota[i] for i in subset):
                    continue
                value = h_of(subset, c)
                if value > s:
                    step = (above + 1, at)
                elif value == s:
                    if mode == "sbcm_multi" and in_w:
                        continue
                    step = (above, at + 1)
                else:
                    if in_w and mode != "cbcm":
                        continue
                    step = (above, at)
                new_used = tuple(used[i] + 1 if i in subset else used[i] for i in range(t))
                state = (step[0], step[1], new_used)
                if state not in nxt:
                    nxt[state] = ((above, at, used), subset)
        trace.append(nxt)
        states = nxt
        if not states:
            break
    final = {}
    for state in states:
        above, at, used = state
        if used == quota:
            final.setdefault((above, at), state)
    return final, trace


def _replay_class(members, trace, final_state, t):
    """Walk a class table backwards to the per-manipulator approvals."""
    approvals = [[] for _ in range(t)]
    state = final_state
    for x in range(len(members) - 1, -1, -1):
        prev, subset = trace[x][state]
        for i in subset:
            approvals[i].append(members[x])
        state = prev
    return approvals


def solve_savnsav_const_manipulators(
    instance: ManipulationInstance,
    manipulator_cap: Optional[int] = None,
    cap: Optional[int] = None,
) -> Verdict:
    """CBCM/SBCM under SAV or NSAV, polynomial for fixed manipulator count."""
    rule = instance.rule
    if rule.kind not in ("SAV", "NSAV"):
        raise UnsupportedRuleError("this solver handles SAV and NSAV")
    if instance.variant not in ("CBCM", "SBCM"):
        raise UnsupportedRuleError("this solver handles CBCM and SBCM")
    t = instance.t
    t_cap = manipulator_cap if manipulator_cap is not None else MANIPULATOR_CAP
    if t > t_cap:
        raise ResourceCapError(f"{t} manipulators exceed the parameter cap {t_cap}")
    limit = effective_cap(cap if cap is not None else GUESS_CAP)
    w = instance.current_committee
    if any(v <= w for v in instance.manipulative_votes):
        return NO  # that manipulator can never strictly gain
    m = len(instance.candidates)
    election = instance.full_election
    base = core.additive_scores(rule, instance.base_election)
    groups = _manipulator_classes(instance)
    group_keys = sorted(groups, key=sorted)
    group_members = [groups[key] for key in group_keys]
    group_sizes = [len(ms) for ms in group_members]
    outside = [c for c in instance.candidates if c not in instance.approved_union]
    old_overlap = [len(v & w) for v in instance.manipulative_votes]
    k = instance.k

    total_guesses = 1
    for size in group_sizes:
        total_guesses *= (size + 1) ** t
    if total_guesses > limit:
        raise ResourceCapError(f"{total_guesses} approval-count guesses exceed the cap {limit}")

    modes = ["cbcm"] if instance.variant == "CBCM" else ["sbcm_unique", "sbcm_multi"]
    count_choices = [list(product(range(size + 1), repeat=t)) for size in group_sizes]

    for chosen in product(*count_choices):
        m_sum = [sum(counts[i] for counts in chosen) for i in range(t)]
        active = [i for i in range(t) if m_sum[i] > 0]
        subsets = []
        for r in range(len(active) + 1):
            for combo in combinations(active, r):
                subsets.append(frozenset(combo))
        gain = {subset: _threshold_gains(rule, m, m_sum, subset) for subset in subsets}
        nothing = gain[frozenset()]

        def h_of(subset, c):
            return base[c] + gain[subset]

        s_values = {base[c] + nothing for c in instance.candidates}
        for c in instance.approved_union:
            for subset in subsets:
                s_values.add(base[c] + gain[subset])
        outside_scores = [base[c] + nothing for c in outside]
        for s in sorted(s_values):
            out_gt = sum(1 for v in outside_scores if v > s)
            out_eq = sum(1 for v in outside_scores if v == s)
            for mode in modes:
                tables = []
                feasible = True
                for g, members in enumerate(group_members):
                    final, trace = _class_table(
                        members, chosen[g], subsets, h_of, s, w, mode
                    )
                    if not final:
                        feasible = False
                        break
                    tables.append((final, trace))
                if not feasible:
                    continue
                pick = _aggregate_classes(
                    instance, mode, group_keys, tables, out_gt, out_eq, old_overlap
                )
                if pick is None:
                    continue
                ballots = [set() for _ in range(t)]
                for g, (final, trace) in enumerate(tables):
                    state = final[pick[g]]
                    for i, names in enumerate(_replay_class(group_members[g], trace, state, t)):
                        ballots[i].update(names)
                profile = tuple(frozenset(b) for b in ballots)
                if certify_manipulation(instance, profile):
                    return Verdict(True, profile)
    return NO


def _aggregate_classes(instance, mode, group_keys, tables, out_gt, out_eq, old_overlap):
    """Pick one (above, at) option per class satisfying the acceptance
    inequalities; returns the chosen options or None."""
    t = instance.t
    k = instance.k
    options = [sorted(final.keys()) for final, _ in tables]

    def accept(i_tot, j_tot, iv, jv):
        n_gt = i_tot + out_gt
        n_eq = j_tot + out_eq
        if mode == "cbcm":
            if n_gt > k - 1 or n_eq < 1 or n_gt + n_eq < k:
                return False
            return all(
                iv[i] + max(0, k + jv[i] - (n_gt + n_eq)) > old_overlap[i] for i in range(t)
            )
        if mode == "sbcm_unique":
            if n_gt + n_eq != k:
                return False
            return all(iv[i] + jv[i] > old_overlap[i] for i in range(t))
        # sbcm_multi: displaced-committee approvals sit strictly above the
        # threshold, and every winning committee still adds a new approval
        if n_gt > k - 1 or n_eq < 1 or n_gt + n_eq < k + 1:
            return False
        for i in range(t):
            if iv[i] > old_overlap[i]:
                continue
            if iv[i] == old_overlap[i] and k + jv[i] - (n_gt + n_eq) > 0:
                continue
            return False
        return True

    chosen = [None] * len(tables)

    def walk(g, i_tot, j_tot, iv, jv):
        if mode == "sbcm_unique":
            if i_tot + j_tot + out_gt + out_eq > k:
                return None
        elif i_tot + out_gt > k - 1:
            return None
        if g == len(tables):
            return list(chosen) if accept(i_tot, j_tot, iv, jv) else None
        for above, at in options[g]:
            chosen[g] = (above, at)
            iv2 = list(iv)
            jv2 = list(jv)
            for i in group_keys[g]:
                iv2[i] += above
                jv2[i] += at
            found = walk(g + 1, i_tot + above, j_tot + at, iv2, jv2)
            if found is not None:
                return found
        return None

    return walk(0, 0, 0, [0] * t, [0] * t)
