"""Forward-chaining inference of abstract codes.

Many iconographic meanings (justice, hunting) have no single detectable
object but follow from objects occurring together.  Rules are kept in a
plain JSON file so curators can audit them; each rule adds codes when its
label and code antecedents are all present.  Rules only ever add codes;
shrinking a code set is the reducers' job.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Union

from .errors import MalformedNotation, RuleFormatError
from .notation import parse

log = logging.getLogger(__name__)

Source = Union[str, Path, IO[str]]


@dataclass(frozen=True)
class Rule:
    """One implication: when every label in ``if_labels`` and every code
    in ``if_codes`` is present, all of ``then_codes`` are inferred."""

    id: str
    if_labels: frozenset[str] = frozenset()
    if_codes: frozenset[str] = frozenset()
    then_codes: frozenset[str] = frozenset()
    note: str = ""


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[Rule, ...] = ()

    def __len__(self) -> int:
        return len(self.rules)


def load_rules(source: Source) -> RuleSet:
    """Load and validate a JSON array of rule objects.

    Each object needs ``id`` and a non-empty ``then_codes``; ``if_labels``
    and ``if_codes`` default to empty but at least one of them must be
    non-empty (no unconditional rules).  Labels are lowercased to match
    the matcher's normalized label sets.  Raises
    :class:`RuleFormatError` on structural problems, duplicate ids, or
    consequent codes that do not parse.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            data = _load_json(fh)
    else:
        data = _load_json(source)
    if not isinstance(data, list):
        raise RuleFormatError("rule file must be a JSON array")

    rules: list[Rule] = []
    seen_ids: set[str] = set()
    for idx, obj in enumerate(data):
        if not isinstance(obj, dict):
            raise RuleFormatError(f"rule #{idx}: not an object")
        rule_id = obj.get("id")
        if not isinstance(rule_id, str) or not rule_id:
            raise RuleFormatError(f"rule #{idx}: missing or empty 'id'")
        if rule_id in seen_ids:
            raise RuleFormatError(f"duplicate rule id {rule_id!r}")
        seen_ids.add(rule_id)

        if_labels = _string_set(obj.get("if_labels", []), rule_id, "if_labels")
        if_codes = _string_set(obj.get("if_codes", []), rule_id, "if_codes")
        then_codes = _string_set(obj.get("then_codes", []), rule_id, "then_codes")
        if not then_codes:
            raise RuleFormatError(f"rule {rule_id!r}: 'then_codes' must be non-empty")
        if not if_labels and not if_codes:
            raise RuleFormatError(
                f"rule {rule_id!r}: needs at least one label or code antecedent"
            )
        for code in then_codes:
            try:
                parse(code)
            except MalformedNotation as exc:
                raise RuleFormatError(
                    f"rule {rule_id!r}: invalid consequent code {code!r}: {exc}"
                ) from exc
        note = obj.get("note", "")
        if not isinstance(note, str):
            raise RuleFormatError(f"rule {rule_id!r}: 'note' must be a string")
        rules.append(
            Rule(
                id=rule_id,
                if_labels=frozenset(l.strip().lower() for l in if_labels),
                if_codes=frozenset(if_codes),
                then_codes=frozenset(then_codes),
                note=note,
            )
        )
    return RuleSet(rules=tuple(rules))


def infer(codes: set[str], labels: set[str], ruleset: RuleSet) -> set[str]:
    """Forward-chain to fixpoint and return ``codes`` plus everything
    inferred.

    A rule fires when its labels are all among ``labels`` and its codes
    all among the current code set (exact notation equality).  Firing
    unions the consequents in; iteration stops when no rule adds a new
    code.  The result only ever grows, so termination is bounded by the
    number of distinct consequent codes.
    """
    result = set(codes)
    changed = True
    while changed:
        changed = False
        for rule in ruleset.rules:
            if (
                rule.if_labels <= labels
                and rule.if_codes <= result
                and not rule.then_codes <= result
            ):
                result |= rule.then_codes
                changed = True
    return result


def _load_json(stream: IO[str]):
    try:
        return json.load(stream)
    except json.JSONDecodeError as exc:
        raise RuleFormatError(f"invalid JSON: {exc}") from exc


def _string_set(value, rule_id, field_name) -> frozenset[str]:
    if not isinstance(value, list) or any(not isinstance(v, str) for v in value):
        raise RuleFormatError(
            f"rule {rule_id!r}: {field_name!r} must be a list of strings"
        )
    return frozenset(value)
