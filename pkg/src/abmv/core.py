"""Elections, ballots, rules, and exact scoring.

Every score in this module is a `fractions.Fraction`; comparisons are
therefore decided by cross-multiplied integer arithmetic and ties are
exact. The additive rules (AV, SAV, NSAV) expose the k-winning-threshold
machinery (`k_winning_threshold`, `partition_candidates`) that the
strategic solvers build on: a k-committee wins under an additive rule
iff it contains every sure winner and nothing outside the sure/possible
winner pool.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence

ZERO = Fraction(0)


class DomainError(ValueError):
    """A candidate, vote, or committee is not part of the election."""


class ConfigurationError(ValueError):
    """A rule is internally inconsistent (bad omega table, etc.)."""


class UnsupportedRuleError(ValueError):
    """The requested operation is not defined for this rule."""


class ResourceCapError(RuntimeError):
    """An exact search would exceed its configured cap; never truncated silently."""


class ValidationError(ValueError):
    """An instance or solution violates its problem-type invariants."""


Ballot = frozenset


def _as_ballot(members: Iterable[str]) -> frozenset:
    return members if isinstance(members, frozenset) else frozenset(members)


@dataclass(frozen=True)
class Election:
    """A candidate roster plus a multiset of approval ballots.

    Votes keep their position, so witnesses can reference them by index.
    Instances are immutable after construction and safe to share.
    """

    candidates: tuple
    votes: tuple

    def __init__(self, candidates: Iterable[str], votes: Iterable[Iterable[str]]):
        object.__setattr__(self, "candidates", tuple(candidates))
        object.__setattr__(self, "votes", tuple(_as_ballot(v) for v in votes))
        if len(set(self.candidates)) != len(self.candidates):
            raise DomainError("duplicate candidate labels")
        roster = set(self.candidates)
        for i, vote in enumerate(self.votes):
            if not vote <= roster:
                raise DomainError(f"vote {i} approves candidates outside the roster")

    @property
    def m(self) -> int:
        return len(self.candidates)

    @property
    def n(self) -> int:
        return len(self.votes)

    @cached_property
    def _index(self) -> dict:
        return {c: i for i, c in enumerate(self.candidates)}

    def index(self, candidate: str) -> int:
        try:
            return self._index[candidate]
        except KeyError:
            raise DomainError(f"unknown candidate {candidate!r}") from None

    def sort_candidates(self, members: Iterable[str]) -> tuple:
        """Canonical committee form: members ordered by roster index."""
        return tuple(sorted(members, key=self.index))

    @cached_property
    def approver_sets(self) -> dict:
        """Candidate -> frozenset of indices of the votes approving it."""
        approvers = {c: set() for c in self.candidates}
        for i, vote in enumerate(self.votes):
            for c in vote:
                approvers[c].add(i)
        return {c: frozenset(ids) for c, ids in approvers.items()}

    @cached_property
    def approval_classes(self) -> dict:
        """Group candidates by their approver set (clones land together).

        Keys are frozensets of vote indices (the empty key collects
        candidates approved by nobody); values are roster-ordered tuples.
        The groups partition the roster.
        """
        groups: dict = {}
        for c in self.candidates:
            groups.setdefault(self.approver_sets[c], []).append(c)
        return {key: tuple(members) for key, members in groups.items()}


def restrict(election: Election, keep: Iterable[str]) -> Election:
    """Project the election onto a candidate subset; vote indices survive."""
    keep_set = set(keep)
    for c in keep_set:
        election.index(c)
    candidates = tuple(c for c in election.candidates if c in keep_set)
    votes = tuple(vote & keep_set for vote in election.votes)
    return Election(candidates, votes)


def pad_with_dummies(election: Election, count: int, prefix: str = "~dummy") -> Election:
    """Append `count` fresh candidates approved by no vote.

    This ports SAV constructions to NSAV: with at least n*m^2 dummies the
    strict NSAV order of the original candidates matches their strict SAV
    order in the unpadded election.
    """
    if count < 0:
        raise DomainError("dummy count must be nonnegative")
    if count == 0:
        return election
    existing = set(election.candidates)
    dummies = []
    i = 0
    while len(dummies) < count:
        name = f"{prefix}{i}"
        if name not in existing:
            dummies.append(name)
        i += 1
    return Election(election.candidates + tuple(dummies), election.votes)


# ---------------------------------------------------------------------------
# Rules


_ADDITIVE = ("AV", "SAV", "NSAV")
_THIELE_BUILTIN = ("AV", "PAV", "ABCCV")


@dataclass(frozen=True)
class Rule:
    """A committee-selection rule identifier.

    kind is one of AV, SAV, NSAV, PAV, ABCCV, MAV, or THIELE; a THIELE
    rule carries its weight table omega (omega[0] = 0, nondecreasing).
    MAV minimizes its score; every other rule maximizes.
    """

    kind: str
    omega: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in ("AV", "SAV", "NSAV", "PAV", "ABCCV", "MAV", "THIELE"):
            raise ConfigurationError(f"unknown rule kind {self.kind!r}")
        if self.kind == "THIELE":
            if not self.omega:
                raise ConfigurationError("THIELE rule needs an omega table")
            table = tuple(Fraction(w) for w in self.omega)
            if table[0] != 0:
                raise ConfigurationError("omega[0] must be 0")
            if any(a > b for a, b in zip(table, table[1:])):
                raise ConfigurationError("omega must be nondecreasing")
            object.__setattr__(self, "omega", table)
        elif self.omega is not None:
            raise ConfigurationError(f"{self.kind} does not take an omega table")

    @property
    def orientation(self) -> str:
        return "minimize" if self.kind == "MAV" else "maximize"

    @property
    def is_additive(self) -> bool:
        return self.kind in _ADDITIVE

    @property
    def is_thiele_family(self) -> bool:
        """True when scoring is omega(|vote ∩ committee|) summed over votes."""
        return self.kind in ("AV", "PAV", "ABCCV", "THIELE")

    def omega_value(self, i: int) -> Fraction:
        if self.kind == "AV":
            return Fraction(i)
        if self.kind == "ABCCV":
            return Fraction(1) if i > 0 else ZERO
        if self.kind == "PAV":
            return sum((Fraction(1, j) for j in range(1, i + 1)), ZERO)
        if self.kind == "THIELE":
            if i >= len(self.omega):
                raise ConfigurationError(
                    f"omega table of length {len(self.omega)} is too short for overlap {i}"
                )
            return self.omega[i]
        raise UnsupportedRuleError(f"{self.kind} has no omega weights")

    def __str__(self):
        return self.kind.lower()


AV = Rule("AV")
SAV = Rule("SAV")
NSAV = Rule("NSAV")
PAV = Rule("PAV")
ABCCV = Rule("ABCCV")
MAV = Rule("MAV")


def thiele(omega: Sequence) -> Rule:
    return Rule("THIELE", tuple(Fraction(w) for w in omega))


def rule_from_name(name: str, omega: Optional[Sequence] = None) -> Rule:
    name = name.upper()
    if name == "THIELE":
        return thiele(omega or ())
    return Rule(name)


# ---------------------------------------------------------------------------
# Scoring


def hamming_distance(a: Iterable[str], b: Iterable[str]) -> int:
    return len(frozenset(a) ^ frozenset(b))


def _sav_score(election: Election, candidate: str) -> Fraction:
    total = ZERO
    for i in election.approver_sets[candidate]:
        total += Fraction(1, len(election.votes[i]))
    return total


def _nsav_score(election: Election, candidate: str) -> Fraction:
    m = election.m
    total = ZERO
    for i, vote in enumerate(election.votes):
        if candidate in vote:
            total += Fraction(1, len(vote))
        elif len(vote) != m:
            # a vote approving the whole roster penalizes nobody
            total -= Fraction(1, m - len(vote))
    return total


def additive_candidate_score(rule: Rule, election: Election, candidate: str) -> Fraction:
    """Score one candidate under AV, SAV, or NSAV."""
    election.index(candidate)
    if rule.kind == "AV":
        return Fraction(len(election.approver_sets[candidate]))
    if rule.kind == "SAV":
        return _sav_score(election, candidate)
    if rule.kind == "NSAV":
        return _nsav_score(election, candidate)
    raise UnsupportedRuleError(f"{rule.kind} is not additive")


def additive_class_scores(rule: Rule, election: Election) -> list:
    """Per approval-class scores: a list of (score, members) pairs.

    Clones share a score, so scoring by class keeps elections with huge
    padded rosters cheap; members are roster-ordered tuples.
    """
    if not rule.is_additive:
        raise UnsupportedRuleError(f"{rule.kind} is not additive")
    m = election.m
    sizes = [len(v) for v in election.votes]
    penalty_total = ZERO
    if rule.kind == "NSAV":
        by_size: dict = {}
        for s in sizes:
            if s != m:
                by_size[s] = by_size.get(s, 0) + 1
        penalty_total = sum((Fraction(cnt, m - s) for s, cnt in by_size.items()), ZERO)
    out = []
    for approvers, members in election.approval_classes.items():
        if rule.kind == "AV":
            score = Fraction(len(approvers))
        else:
            positive = sum((Fraction(1, sizes[i]) for i in approvers), ZERO)
            if rule.kind == "SAV":
                score = positive
            else:
                # add back the penalties the approving votes do not charge
                regained = sum(
                    (Fraction(1, m - sizes[i]) for i in approvers if sizes[i] != m), ZERO
                )
                score = positive - penalty_total + regained
        out.append((score, members))
    return out


def additive_scores(rule: Rule, election: Election) -> dict:
    scores = {}
    for score, members in additive_class_scores(rule, election):
        for c in members:
            scores[c] = score
    return scores


def committee_score(rule: Rule, election: Election, committee: Iterable[str]) -> Fraction:
    """Exact score of a committee; MAV scores are distances (minimized)."""
    members = frozenset(committee)
    for c in members:
        election.index(c)
    if rule.is_additive:
        return sum((additive_candidate_score(rule, election, c) for c in members), ZERO)
    if rule.kind == "MAV":
        if not election.votes:
            return ZERO  # empty vote multiset: every committee ties at 0
        return Fraction(max(hamming_distance(members, v) for v in election.votes))
    if rule.is_thiele_family:
        return sum((rule.omega_value(len(v & members)) for v in election.votes), ZERO)
    raise UnsupportedRuleError(f"cannot score committees under {rule.kind}")


# ---------------------------------------------------------------------------
# Winning threshold and candidate partition (additive rules)


@dataclass(frozen=True)
class ThresholdPartition:
    """Sure winners / possible winners / sure losers at committee size k.

    swin are the candidates in every winning k-committee, slose those in
    none, pwin the rest; a k-committee wins iff swin ⊆ w ⊆ swin ∪ pwin.
    """

    threshold: Fraction
    swin: frozenset
    pwin: frozenset
    slose: frozenset

    @property
    def pool(self) -> frozenset:
        return self.swin | self.pwin


def _class_threshold(class_scores: list, k: int):
    """(threshold, count_at_threshold) for the k-th largest candidate score."""
    weighted = sorted(((score, len(members)) for score, members in class_scores), reverse=True)
    seen = 0
    threshold = None
    for score, count in weighted:
        seen += count
        if seen >= k:
            threshold = score
            break
    at_threshold = sum(count for score, count in weighted if score == threshold)
    return threshold, at_threshold


def k_winning_threshold(rule: Rule, election: Election, k: int) -> Fraction:
    """The k-th largest candidate score, ties counted with multiplicity."""
    if not 1 <= k <= election.m:
        raise DomainError(f"k={k} out of range for {election.m} candidates")
    threshold, _ = _class_threshold(additive_class_scores(rule, election), k)
    return threshold


def partition_candidates(rule: Rule, election: Election, k: int) -> ThresholdPartition:
    if not 1 <= k <= election.m:
        raise DomainError(f"k={k} out of range for {election.m} candidates")
    class_scores = additive_class_scores(rule, election)
    threshold, at_threshold = _class_threshold(class_scores, k)
    swin, pwin, slose = [], [], []
    for score, members in class_scores:
        if score > threshold:
            swin.extend(members)
        elif score == threshold:
            # a uniquely attained threshold leaves no room for ties
            (swin if at_threshold == 1 else pwin).extend(members)
        else:
            slose.extend(members)
    return ThresholdPartition(threshold, frozenset(swin), frozenset(pwin), frozenset(slose))


def additive_jcc(rule: Rule, election: Election, k: int, distinguished: Iterable[str]) -> bool:
    """Is every distinguished candidate in all winning k-committees?

    Works from class scores only, so it stays fast on padded elections.
    """
    wanted = frozenset(distinguished)
    for c in wanted:
        election.index(c)
    class_scores = additive_class_scores(rule, election)
    threshold, at_threshold = _class_threshold(class_scores, k)
    score_of = {}
    for score, members in class_scores:
        for c in members:
            if c in wanted:
                score_of[c] = score
    pool_size = sum(len(members) for score, members in class_scores if score >= threshold)
    for c in wanted:
        if score_of[c] > threshold:
            continue
        if score_of[c] < threshold:
            return False
        # threshold-score candidate: in every winning committee only when
        # the committee is forced (unique attainment or pool of exactly k)
        if at_threshold != 1 and pool_size != k:
            return False
    return True


@dataclass(frozen=True)
class Verdict:
    """YES/NO answer to a strategic decision problem.

    YES verdicts carry a machine-checkable witness (a ballot profile for
    manipulation, an add/delete selection for control) that callers
    re-verify by applying it and recomputing the winners.
    """

    yes: bool
    witness: object = None
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.yes
