"""JSON formats for elections, strategic instances, sources, and verdicts.

An election object carries "candidates" (array of strings) and "votes"
(array of arrays of strings); instance loaders additionally consume
"k", "J", "manipulators", "variant", "baseline_committee",
"unregistered_votes", "unregistered_candidates", and the budget keys.
Scores serialize as exact "numerator/denominator" strings.
"""

from __future__ import annotations

import json
from fractions import Fraction

from abmv import control as ctl
from abmv import manipulation as man
from abmv import reductions as red
from abmv.core import Election, Rule, ValidationError, Verdict


def fraction_str(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def load_election(obj: dict) -> Election:
    if "candidates" not in obj or "votes" not in obj:
        raise ValidationError("an election needs 'candidates' and 'votes'")
    return Election(obj["candidates"], [frozenset(v) for v in obj["votes"]])


def election_to_obj(election: Election) -> dict:
    return {
        "candidates": list(election.candidates),
        "votes": [sorted(v, key=election.index) for v in election.votes],
    }


def load_manipulation_instance(obj: dict, rule: Rule, variant=None) -> man.ManipulationInstance:
    variant = (variant or obj.get("variant", "CBCM")).upper()
    committee = obj.get("baseline_committee")
    return man.ManipulationInstance(
        rule,
        variant,
        obj["candidates"],
        [frozenset(v) for v in obj.get("votes", [])],
        [frozenset(v) for v in obj["manipulators"]],
        obj["k"],
        None if committee is None else frozenset(committee),
        ballot_blocks=tuple(
            tuple(frozenset(b) for b in blocks) for blocks in obj.get("ballot_blocks", [])
        ),
    )


def manipulation_instance_to_obj(instance: man.ManipulationInstance) -> dict:
    order = {c: i for i, c in enumerate(instance.candidates)}
    out = {
        "candidates": list(instance.candidates),
        "votes": [sorted(v, key=order.get) for v in instance.honest_votes],
        "manipulators": [sorted(v, key=order.get) for v in instance.manipulative_votes],
        "k": instance.k,
        "variant": instance.variant,
    }
    if instance.current_committee is not None:
        out["baseline_committee"] = sorted(instance.current_committee, key=order.get)
    if instance.ballot_blocks:
        out["ballot_blocks"] = [
            [sorted(b, key=order.get) for b in blocks] for blocks in instance.ballot_blocks
        ]
    return out


def load_control_instance(obj: dict, rule: Rule, ctype=None) -> ctl.ControlInstance:
    ctype = (ctype or obj.get("type", "JCC")).upper()
    budget_add = obj.get("budget_add")
    budget_delete = obj.get("budget_delete")
    if "budget" in obj:
        if ctype in ("CCAV", "CCAC"):
            budget_add = obj["budget"]
        elif ctype in ("CCDV", "CCDC"):
            budget_delete = obj["budget"]
        else:
            raise ValidationError(f"{ctype} needs budget_add/budget_delete, not 'budget'")
    return ctl.ControlInstance(
        ctype,
        rule,
        obj["candidates"],
        [frozenset(v) for v in obj.get("votes", [])],
        obj["k"],
        frozenset(obj["J"]),
        unregistered_candidates=obj.get("unregistered_candidates", ()),
        unregistered_votes=[frozenset(v) for v in obj.get("unregistered_votes", [])],
        budget_add=budget_add,
        budget_delete=budget_delete,
    )


def control_instance_to_obj(instance: ctl.ControlInstance) -> dict:
    order = {c: i for i, c in enumerate(instance.registered_candidates)}
    for i, c in enumerate(instance.unregistered_candidates):
        order[c] = len(order) + i

    def ballot(v):
        return sorted(v, key=order.get)

    out = {
        "type": instance.ctype,
        "candidates": list(instance.registered_candidates),
        "votes": [ballot(v) for v in instance.registered_votes],
        "k": instance.k,
        "J": sorted(instance.distinguished, key=order.get),
    }
    if instance.unregistered_candidates:
        out["unregistered_candidates"] = list(instance.unregistered_candidates)
    if instance.unregistered_votes:
        out["unregistered_votes"] = [ballot(v) for v in instance.unregistered_votes]
    if instance.budget_add is not None:
        out["budget_add"] = instance.budget_add
    if instance.budget_delete is not None:
        out["budget_delete"] = instance.budget_delete
    return out


def instance_to_obj(instance) -> dict:
    if isinstance(instance, man.ManipulationInstance):
        return manipulation_instance_to_obj(instance)
    return control_instance_to_obj(instance)


def load_source(obj: dict):
    if "universe" in obj:
        return red.Rx3cInstance(obj["universe"], [tuple(s) for s in obj["sets"]])
    if "vertices" in obj:
        return red.GraphInstance(obj["vertices"], [tuple(e) for e in obj["edges"]], obj.get("kappa", 0))
    raise ValidationError("a source is a graph ('vertices'/'edges') or an RX3C system ('universe'/'sets')")


def source_to_obj(source) -> dict:
    if isinstance(source, red.Rx3cInstance):
        return {"universe": list(source.universe), "sets": [list(s) for s in source.sets]}
    return {
        "vertices": list(source.vertices),
        "edges": [sorted(e) for e in sorted(source.edges, key=sorted)],
        "kappa": source.kappa,
    }


def witness_to_obj(witness) -> object:
    if witness is None:
        return None
    if isinstance(witness, ctl.ControlSolution):
        return {
            "added_votes": list(witness.added_votes),
            "deleted_votes": list(witness.deleted_votes),
            "added_candidates": list(witness.added_candidates),
            "deleted_candidates": list(witness.deleted_candidates),
        }
    return [sorted(b) for b in witness]


def verdict_to_obj(verdict: Verdict) -> dict:
    out = {"answer": "YES" if verdict.yes else "NO"}
    if verdict.witness is not None:
        out["witness"] = witness_to_obj(verdict.witness)
    if verdict.details:
        out["details"] = {k: v for k, v in sorted(verdict.details.items())}
    return out


def dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"
