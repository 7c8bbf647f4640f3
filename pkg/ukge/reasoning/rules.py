"""
Rule DSL
--------
One length-2 implication per line:

    (A, synonym, B) & (B, synonym, C) => (A, synonym, C) : 1.0

The two body atoms must share exactly one variable (the middle); the head
joins the two remaining endpoint variables. This covers path rules and the
shared-subject form (A, r1, B) & (A, r2, C) => (B, r3, C). The weight is
optional and defaults to 1.0. Lines starting with '#' are comments.
"""

import re
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ukge.core.errors import RuleShapeError, RuleSyntaxError, UnknownRelationError
from ukge.ingestion.parser import Vocabulary

VARIABLE = re.compile(r"^[A-Z][A-Za-z0-9_]*$")


class Atom(BaseModel):
    model_config = ConfigDict(frozen=True)

    subject: str
    relation: str
    object: str

    def variables(self) -> Tuple[str, str]:
        return (self.subject, self.object)

    def __str__(self) -> str:
        return f"({self.subject}, {self.relation}, {self.object})"


class LogicalRule(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    body: Tuple[Atom, Atom]
    head: Atom
    weight: float = Field(default=1.0, gt=0.0)

    @model_validator(mode="after")
    def _check_chain_shape(self) -> "LogicalRule":
        check_chain_shape(self.body, self.head)
        return self

    @property
    def middle(self) -> str:
        shared = set(self.body[0].variables()) & set(self.body[1].variables())
        return next(iter(shared))

    def endpoint(self, position: int) -> str:
        atom = self.body[position]
        return atom.object if atom.subject == self.middle else atom.subject

    def __str__(self) -> str:
        return format_rule(self)


def check_chain_shape(body: Sequence[Atom], head: Atom) -> None:
    if len(body) != 2:
        raise RuleShapeError(f"rule body must have exactly two atoms, got {len(body)}")
    for atom in (*body, head):
        if atom.subject == atom.object:
            raise RuleShapeError(f"atom {atom} repeats a variable")
    shared = set(body[0].variables()) & set(body[1].variables())
    if len(shared) != 1:
        raise RuleShapeError(f"body atoms must share exactly one variable, share {sorted(shared)}")
    (middle,) = shared
    endpoints = {v for atom in body for v in atom.variables() if v != middle}
    if len(endpoints) != 2:
        raise RuleShapeError("body endpoints must be two distinct variables")
    if set(head.variables()) != endpoints:
        raise RuleShapeError(
            f"head {head} must connect the body endpoints {sorted(endpoints)}"
        )


@dataclass(frozen=True)
class BoundRule:
    """A LogicalRule with relation names resolved to vocabulary ids."""
    rule: LogicalRule
    body_relations: Tuple[int, int]
    head_relation: int
    # per body atom: True when the middle variable sits in the subject slot
    middle_is_subject: Tuple[bool, bool]
    # per body atom: 0 if its endpoint binds to the head's subject, 1 for the head's object
    endpoint_slot: Tuple[int, int]

    @property
    def id(self) -> str:
        return self.rule.id

    @property
    def weight(self) -> float:
        return self.rule.weight


def bind_rule(rule: LogicalRule, vocab: Vocabulary) -> BoundRule:
    ids = []
    for atom in (*rule.body, rule.head):
        rid = vocab.relation_id(atom.relation)
        if rid is None:
            raise UnknownRelationError(atom.relation)
        ids.append(rid)
    middle = rule.middle
    head_vars = rule.head.variables()
    return BoundRule(
        rule=rule,
        body_relations=(ids[0], ids[1]),
        head_relation=ids[2],
        middle_is_subject=tuple(atom.subject == middle for atom in rule.body),
        endpoint_slot=tuple(head_vars.index(rule.endpoint(i)) for i in range(2)),
    )


def bind_rules(rules: Sequence[LogicalRule], vocab: Vocabulary) -> List[BoundRule]:
    return [bind_rule(rule, vocab) for rule in rules]


class _Cursor:
    def __init__(self, text: str, line_number: int):
        self.text = text
        self.pos = 0
        self.line_number = line_number

    def error(self, message: str) -> RuleSyntaxError:
        return RuleSyntaxError(message, self.line_number, self.pos + 1)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, token: str) -> bool:
        self.skip_ws()
        return self.text.startswith(token, self.pos)

    def expect(self, token: str) -> None:
        if not self.peek(token):
            raise self.error(f"expected '{token}'")
        self.pos += len(token)

    def read_until(self, stops: str) -> str:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in stops:
            self.pos += 1
        if self.pos >= len(self.text):
            raise self.error(f"unterminated atom, expected one of {list(stops)}")
        return self.text[start:self.pos].strip()

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)


def _parse_variable(cursor: _Cursor, stops: str) -> str:
    cursor.skip_ws()
    column_cursor = cursor.pos
    name = cursor.read_until(stops)
    if not VARIABLE.match(name):
        cursor.pos = column_cursor
        raise cursor.error(f"'{name}' is not a variable (capitalized identifier)")
    return name


def _parse_atom(cursor: _Cursor) -> Atom:
    cursor.expect("(")
    subject = _parse_variable(cursor, ",)")
    cursor.expect(",")
    cursor.skip_ws()
    relation = cursor.read_until(",)")
    if not relation:
        raise cursor.error("empty relation name")
    cursor.expect(",")
    obj = _parse_variable(cursor, ",)")
    cursor.expect(")")
    return Atom(subject=subject, relation=relation, object=obj)


def parse_rule_line(text: str, line_number: int, rule_id: str) -> LogicalRule:
    cursor = _Cursor(text, line_number)
    body = [_parse_atom(cursor)]
    while cursor.peek("&"):
        cursor.expect("&")
        body.append(_parse_atom(cursor))
    cursor.expect("=>")
    head = _parse_atom(cursor)

    weight = 1.0
    if cursor.peek(":"):
        cursor.expect(":")
        cursor.skip_ws()
        raw = cursor.text[cursor.pos:].strip()
        try:
            weight = float(raw)
        except ValueError:
            raise cursor.error(f"invalid weight '{raw}'")
        if not weight > 0:
            raise cursor.error(f"rule weight must be positive, got {weight}")
        cursor.pos = len(cursor.text)
    if not cursor.at_end():
        raise cursor.error("unexpected trailing text")

    check_chain_shape(body, head)
    return LogicalRule(id=rule_id, body=(body[0], body[1]), head=head, weight=weight)


def parse_rules(text: str, vocab: Optional[Vocabulary] = None) -> List[LogicalRule]:
    """
    Parse a rule document. With a vocabulary, every relation must already exist in it.
    """
    rules: List[LogicalRule] = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        rule = parse_rule_line(line, line_number, rule_id=f"rule{len(rules) + 1}")
        if vocab is not None:
            bind_rule(rule, vocab)
        rules.append(rule)
    return rules


def read_rules(path: Path, vocab: Optional[Vocabulary] = None) -> List[LogicalRule]:
    data = Path(path).read_bytes()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        line_start = data.rfind(b"\n", 0, e.start) + 1
        raise RuleSyntaxError("invalid UTF-8", data.count(b"\n", 0, e.start) + 1, e.start - line_start + 1)
    return parse_rules(text, vocab)


def format_rule(rule: LogicalRule) -> str:
    return f"{rule.body[0]} & {rule.body[1]} => {rule.head} : {rule.weight!r}"


def write_rules(path: Path, rules: Sequence[LogicalRule]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        for rule in rules:
            f.write(format_rule(rule) + "\n")
