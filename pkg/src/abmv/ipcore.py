"""A small exact integer-program representation and solver.

All the fixed-parameter formulations in this package bound every
variable by a multiset size, so a depth-first branch-and-bound with
bound-tightening propagation decides them exactly. Strict inequalities
are first-class: constraints are scaled to integer coefficients, after
which `a < b` over integer-valued expressions becomes `a <= b - 1`.
There is no LP relaxation and no floating point anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from abmv.caps import IP_NODE_CAP, effective_cap

RELATIONS = ("<=", "<", "=", ">=", ">")

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
CAP_EXCEEDED = "cap_exceeded"


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple  # ((variable_name, Fraction), ...)
    relation: str
    rhs: Fraction

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}")


@dataclass
class IntegerProgram:
    """Integer variables with finite bounds plus rational linear constraints."""

    variables: list = field(default_factory=list)  # (name, lower, upper)
    constraints: list = field(default_factory=list)

    def add_variable(self, name: str, lower: int, upper: int) -> str:
        if lower is None or upper is None:
            raise ValueError(f"variable {name!r} must have finite bounds")
        self.variables.append((name, int(lower), int(upper)))
        return name

    def add_constraint(self, coeffs, relation: str, rhs) -> None:
        pairs = tuple((name, Fraction(c)) for name, c in coeffs if Fraction(c) != 0)
        self.constraints.append(Constraint(pairs, relation, Fraction(rhs)))

    def variable_names(self):
        return [name for name, _, _ in self.variables]

    def to_lp_text(self) -> str:
        """LP-format export for external study; the internal solver is authoritative."""
        lines = ["\\ exported integer program", "Minimize", " obj: 0", "Subject To"]
        for i, con in enumerate(self.constraints):
            terms = " + ".join(f"{c} {name}" for name, c in con.coeffs) or "0"
            rel = {"<=": "<=", "<": "<", "=": "=", ">=": ">=", ">": ">"}[con.relation]
            lines.append(f" c{i}: {terms} {rel} {con.rhs}")
        lines.append("Bounds")
        for name, lo, hi in self.variables:
            lines.append(f" {lo} <= {name} <= {hi}")
        lines.append("General")
        lines.append(" " + " ".join(self.variable_names()))
        lines.append("End")
        return "\n".join(lines)


@dataclass(frozen=True)
class IpResult:
    status: str
    assignment: Optional[dict] = None

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE


def check_solution(program: IntegerProgram, assignment: dict) -> bool:
    """Exact re-evaluation of every constraint; certifies solver output."""
    for name, lo, hi in program.variables:
        if name not in assignment:
            raise KeyError(f"assignment is missing variable {name!r}")
        value = assignment[name]
        if value != int(value) or not lo <= value <= hi:
            return False
    for con in program.constraints:
        lhs = sum((Fraction(assignment[name]) * c for name, c in con.coeffs), Fraction(0))
        ok = {
            "<=": lhs <= con.rhs,
            "<": lhs < con.rhs,
            "=": lhs == con.rhs,
            ">=": lhs >= con.rhs,
            ">": lhs > con.rhs,
        }[con.relation]
        if not ok:
            return False
    return True


def _normalized(program: IntegerProgram):
    """Rewrite constraints as integer-coefficient `sum <= bound` rows.

    Scaling by the lcm of denominators preserves the solution set, and
    strict relations tighten by one because both sides are integers.
    """
    index = {name: i for i, (name, _, _) in enumerate(program.variables)}
    rows = []

    def add_row(pairs, bound):
        rows.append((tuple((index[name], c) for name, c in pairs if c != 0), bound))

    for con in program.constraints:
        for name, _ in con.coeffs:
            if name not in index:
                raise ValueError(f"constraint references unknown variable {name!r}")
        denoms = [c.denominator for _, c in con.coeffs] + [con.rhs.denominator]
        scale = math.lcm(*denoms) if denoms else 1
        pairs = [(name, int(c * scale)) for name, c in con.coeffs]
        rhs = int(con.rhs * scale)
        if con.relation == "<=":
            add_row(pairs, rhs)
        elif con.relation == "<":
            add_row(pairs, rhs - 1)
        elif con.relation == ">=":
            add_row([(n, -c) for n, c in pairs], -rhs)
        elif con.relation == ">":
            add_row([(n, -c) for n, c in pairs], -rhs - 1)
        else:  # equality: a pair of <= rows
            add_row(pairs, rhs)
            add_row([(n, -c) for n, c in pairs], -rhs)
    return rows


def _propagate(rows, lower, upper):
    """Tighten variable bounds until fixpoint; False on wipeout."""
    changed = True
    while changed:
        changed = False
        for pairs, bound in rows:
            min_sum = 0
            for j, c in pairs:
                min_sum += c * (lower[j] if c > 0 else upper[j])
            if min_sum > bound:
                return False
            slack = bound - min_sum
            for j, c in pairs:
                if c > 0:
                    new_upper = lower[j] + slack // c
                    if new_upper < upper[j]:
                        upper[j] = new_upper
                        changed = True
                else:
                    new_lower = upper[j] - slack // (-c)
                    if new_lower > lower[j]:
                        lower[j] = new_lower
                        changed = True
                if lower[j] > upper[j]:
                    return False
    return True


def solve_ip(program: IntegerProgram, node_cap: Optional[int] = None) -> IpResult:
    """Depth-first search over variable domains with propagation.

    Complete within the node cap; a cap hit is reported as CAP_EXCEEDED,
    distinguishable from infeasibility. Feasible results are certified
    with `check_solution` before being returned.
    """
    cap = effective_cap(node_cap if node_cap is not None else IP_NODE_CAP)
    names = program.variable_names()
    if len(set(names)) != len(names):
        raise ValueError("duplicate variable names")
    rows = _normalized(program)
    lower = [lo for _, lo, _ in program.variables]
    upper = [hi for _, _, hi in program.variables]
    for (name, lo, hi) in program.variables:
        if lo > hi:
            return IpResult(INFEASIBLE)

    nodes = 0

    def search(lower, upper):
        nonlocal nodes
        if not _propagate(rows, lower, upper):
            return None
        branch = None
        for j in range(len(lower)):
            if lower[j] < upper[j]:
                branch = j
                break
        if branch is None:
            return dict(zip(names, lower))
        for value in range(lower[branch], upper[branch] + 1):
            nodes += 1
            if nodes > cap:
                raise _CapHit
            lo2, up2 = list(lower), list(upper)
            lo2[branch] = up2[branch] = value
            found = search(lo2, up2)
            if found is not None:
                return found
        return None

    try:
        assignment = search(list(lower), list(upper))
    except _CapHit:
        return IpResult(CAP_EXCEEDED)
    if assignment is None:
        return IpResult(INFEASIBLE)
    if not check_solution(program, assignment):
        raise AssertionError("solver produced an uncertified assignment")
    return IpResult(FEASIBLE, assignment)


class _CapHit(Exception):
    pass
