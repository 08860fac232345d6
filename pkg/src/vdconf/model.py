"""Configuration models: variables over finite domains plus propositional rules.

A model is parsed from a small JSON format (see `parse_model`) into an
immutable AST. This module also carries the brute-force oracles used for
differential testing: they enumerate the Cartesian product of the domains
and are deliberately capped, never a production path.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterator, Mapping, Union

DEFAULT_ENUM_CAP = 10_000_000

Assignment = Mapping[int, int]


class ModelError(Exception):
    """Invalid model file, rule text, or assignment."""


class RuleSyntaxError(ModelError):
    """Rule text failed to lex or parse."""

    def __init__(self, message: str, rule_index: int, position: int):
        super().__init__(f"rule {rule_index}, position {position}: {message}")
        self.rule_index = rule_index
        self.position = position


class EnumerationCapError(ModelError):
    """Brute-force enumeration would exceed the configured cap."""


@dataclass(frozen=True)
class Domain:
    """A finite domain; values are canonically 0..size-1, labels are display-only."""

    size: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.size < 1:
            raise ModelError(f"domain size must be >= 1, got {self.size}")
        if self.labels is not None:
            if len(self.labels) != self.size:
                raise ModelError(
                    f"domain has {self.size} values but {len(self.labels)} labels"
                )
            if len(set(self.labels)) != self.size:
                raise ModelError("domain labels must be unique")

    def label_of(self, value: int) -> str:
        if self.labels is not None:
            return self.labels[value]
        return str(value)


@dataclass(frozen=True)
class Variable:
    name: str
    domain: Domain
    index: int


# Rule AST. NotEqual from the rule grammar is desugared to Not(Atom) at parse
# time, so these five shapes are the whole algebra.

@dataclass(frozen=True)
class Atom:
    var: int
    value: int


@dataclass(frozen=True)
class Not:
    operand: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


Formula = Union[Atom, Not, And, Or, Implies, Iff]


@dataclass(frozen=True)
class ConfigModel:
    variables: tuple[Variable, ...]
    rules: tuple[Formula, ...]

    def __post_init__(self):
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ModelError("duplicate variable name")
        for i, v in enumerate(self.variables):
            if v.index != i:
                raise ModelError(f"variable {v.name!r} has index {v.index}, expected {i}")
        for rule in self.rules:
            _check_formula(rule, self.variables)

    @property
    def n(self) -> int:
        return len(self.variables)

    def domain_sizes(self) -> tuple[int, ...]:
        return tuple(v.domain.size for v in self.variables)

    def var_index(self, name: str) -> int:
        for v in self.variables:
            if v.name == name:
                return v.index
        raise ModelError(f"unknown variable {name!r}")

    def value_index(self, var: int, label: str) -> int:
        domain = self.variables[var].domain
        if domain.labels is not None:
            try:
                return domain.labels.index(label)
            except ValueError:
                pass
        else:
            try:
                value = int(label)
            except ValueError:
                value = -1
            if 0 <= value < domain.size:
                return value
        raise ModelError(
            f"unknown value {label!r} for variable {self.variables[var].name!r}"
        )


def _check_formula(f: Formula, variables: tuple[Variable, ...]) -> None:
    if isinstance(f, Atom):
        if not 0 <= f.var < len(variables):
            raise ModelError(f"atom references variable index {f.var} out of range")
        if not 0 <= f.value < variables[f.var].domain.size:
            raise ModelError(
                f"atom value {f.value} out of domain for variable "
                f"{variables[f.var].name!r}"
            )
    elif isinstance(f, Not):
        _check_formula(f.operand, variables)
    elif isinstance(f, (And, Or, Implies, Iff)):
        _check_formula(f.left, variables)
        _check_formula(f.right, variables)
    else:
        raise ModelError(f"not a formula node: {f!r}")


# ---------------------------------------------------------------------------
# Rule text: lexer and recursive-descent parser.
#
# Precedence, lowest to highest:  <=>  =>  |  &  !
# `=>` and `<=>` associate to the right; atoms are `name=value` and
# `name!=value`; identifiers are [A-Za-z_][A-Za-z0-9_-]*.

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_IDENT_CONT = _IDENT_START | set("0123456789-")


def _lex_rule(text: str, rule_index: int) -> list[tuple[str, str, int]]:
    """Tokenize one rule into (kind, text, position) triples."""
    tokens = []
    pos = 0
    while pos < len(text):
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch in _IDENT_START:
            end = pos + 1
            while end < len(text) and text[end] in _IDENT_CONT:
                end += 1
            tokens.append(("ident", text[pos:end], pos))
            pos = end
        elif text.startswith("<=>", pos):
            tokens.append(("iff", "<=>", pos))
            pos += 3
        elif text.startswith("=>", pos):
            tokens.append(("implies", "=>", pos))
            pos += 2
        elif text.startswith("!=", pos):
            tokens.append(("neq", "!=", pos))
            pos += 2
        elif ch == "=":
            tokens.append(("eq", "=", pos))
            pos += 1
        elif ch == "!":
            tokens.append(("not", "!", pos))
            pos += 1
        elif ch == "&":
            tokens.append(("and", "&", pos))
            pos += 1
        elif ch == "|":
            tokens.append(("or", "|", pos))
            pos += 1
        elif ch == "(":
            tokens.append(("lparen", "(", pos))
            pos += 1
        elif ch == ")":
            tokens.append(("rparen", ")", pos))
            pos += 1
        else:
            raise RuleSyntaxError(f"unexpected character {ch!r}", rule_index, pos)
    tokens.append(("eof", "", len(text)))
    return tokens


class _RuleParser:
    def __init__(self, text: str, rule_index: int, model_vars: tuple[Variable, ...]):
        self.tokens = _lex_rule(text, rule_index)
        self.rule_index = rule_index
        self.vars_by_name = {v.name: v for v in model_vars}
        self.at = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.at]

    def take(self, kind: str) -> tuple[str, str, int]:
        tok = self.tokens[self.at]
        if tok[0] != kind:
            raise RuleSyntaxError(
                f"expected {kind}, found {tok[1] or 'end of rule'!r}",
                self.rule_index,
                tok[2],
            )
        self.at += 1
        return tok

    def parse(self) -> Formula:
        f = self.parse_iff()
        tok = self.peek()
        if tok[0] != "eof":
            raise RuleSyntaxError(
                f"unexpected {tok[1]!r} after formula", self.rule_index, tok[2]
            )
        return f

    def parse_iff(self) -> Formula:
        left = self.parse_implies()
        if self.peek()[0] == "iff":
            self.take("iff")
            return Iff(left, self.parse_iff())
        return left

    def parse_implies(self) -> Formula:
        left = self.parse_or()
        if self.peek()[0] == "implies":
            self.take("implies")
            return Implies(left, self.parse_implies())
        return left

    def parse_or(self) -> Formula:
        f = self.parse_and()
        while self.peek()[0] == "or":
            self.take("or")
            f = Or(f, self.parse_and())
        return f

    def parse_and(self) -> Formula:
        f = self.parse_unary()
        while self.peek()[0] == "and":
            self.take("and")
            f = And(f, self.parse_unary())
        return f

    def parse_unary(self) -> Formula:
        tok = self.peek()
        if tok[0] == "not":
            self.take("not")
            return Not(self.parse_unary())
        if tok[0] == "lparen":
            self.take("lparen")
            f = self.parse_iff()
            self.take("rparen")
            return f
        return self.parse_atom()

    def parse_atom(self) -> Formula:
        kind, name, pos = self.take("ident")
        var = self.vars_by_name.get(name)
        if var is None:
            raise RuleSyntaxError(f"unknown variable {name!r}", self.rule_index, pos)
        negated = False
        if self.peek()[0] == "neq":
            self.take("neq")
            negated = True
        else:
            self.take("eq")
        _, label, vpos = self.take("ident")
        if var.domain.labels is None or label not in var.domain.labels:
            raise RuleSyntaxError(
                f"unknown value {label!r} for variable {name!r}",
                self.rule_index,
                vpos,
            )
        atom = Atom(var.index, var.domain.labels.index(label))
        return Not(atom) if negated else atom


def parse_rule(text: str, variables: tuple[Variable, ...], rule_index: int = 0) -> Formula:
    return _RuleParser(text, rule_index, variables).parse()


def parse_model(text: str) -> ConfigModel:
    """Parse the JSON model format into a validated ConfigModel.

    Format: {"variables": [{"name": str, "values": [str, ...]}, ...],
             "rules": [str, ...]}
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"model is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ModelError("model must be a JSON object")
    raw_vars = raw.get("variables")
    if not isinstance(raw_vars, list) or not raw_vars:
        raise ModelError("model needs a nonempty 'variables' list")
    variables = []
    for i, entry in enumerate(raw_vars):
        if not isinstance(entry, dict) or "name" not in entry:
            raise ModelError(f"variable {i} must be an object with a 'name'")
        name = entry["name"]
        values = entry.get("values")
        if not isinstance(name, str) or not _is_identifier(name):
            raise ModelError(f"variable {i} name {name!r} is not an identifier")
        if not isinstance(values, list) or not values:
            raise ModelError(f"variable {name!r} needs a nonempty 'values' list")
        for label in values:
            if not isinstance(label, str) or not _is_identifier(label):
                raise ModelError(
                    f"value {label!r} of variable {name!r} is not an identifier"
                )
        variables.append(Variable(name, Domain(len(values), tuple(values)), i))
    variables = tuple(variables)
    raw_rules = raw.get("rules", [])
    if not isinstance(raw_rules, list):
        raise ModelError("'rules' must be a list of strings")
    rules = []
    for i, rule_text in enumerate(raw_rules):
        if not isinstance(rule_text, str):
            raise ModelError(f"rule {i} must be a string")
        rules.append(parse_rule(rule_text, variables, i))
    return ConfigModel(variables, tuple(rules))


def _is_identifier(text: str) -> bool:
    return (
        bool(text)
        and text[0] in _IDENT_START
        and all(c in _IDENT_CONT for c in text[1:])
    )


def serialize_model(model: ConfigModel) -> str:
    """Render a model back to the JSON file format (inverse of parse_model)."""
    return json.dumps(
        {
            "variables": [
                {
                    "name": v.name,
                    "values": [v.domain.label_of(j) for j in range(v.domain.size)],
                }
                for v in model.variables
            ],
            "rules": [format_formula(r, model) for r in model.rules],
        }
    )


_PRECEDENCE = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5, Atom: 6}


def format_formula(f: Formula, model: ConfigModel) -> str:
    """Print a formula in the rule grammar with minimal parentheses."""

    def wrap(child: Formula, parent_level: int) -> str:
        text = fmt(child)
        if _PRECEDENCE[type(child)] < parent_level:
            return f"({text})"
        return text

    def fmt(g: Formula) -> str:
        if isinstance(g, Atom):
            v = model.variables[g.var]
            return f"{v.name}={v.domain.label_of(g.value)}"
        if isinstance(g, Not):
            if isinstance(g.operand, Atom):
                a = g.operand
                v = model.variables[a.var]
                return f"{v.name}!={v.domain.label_of(a.value)}"
            return f"!{wrap(g.operand, _PRECEDENCE[Not] + 1)}"
        # & and | parse left-associative, so a right child at the same level
        # needs parentheses for the tree to survive a round-trip.
        if isinstance(g, And):
            return f"{wrap(g.left, 4)} & {wrap(g.right, 5)}"
        if isinstance(g, Or):
            return f"{wrap(g.left, 3)} | {wrap(g.right, 4)}"
        # The right operand of => and <=> reassociates to the right, so it
        # may sit at the parent's own level; the left operand must bind tighter.
        if isinstance(g, Implies):
            return f"{wrap(g.left, 3)} => {wrap(g.right, 2)}"
        if isinstance(g, Iff):
            return f"{wrap(g.left, 2)} <=> {wrap(g.right, 1)}"
        raise ModelError(f"not a formula node: {g!r}")

    return fmt(f)


# ---------------------------------------------------------------------------
# Semantics and brute-force oracles.

def eval_formula(f: Formula, assignment: Assignment, num_vars: int) -> bool:
    """Evaluate a formula under a total assignment (standard propositional semantics)."""
    if len(assignment) != num_vars:
        raise ModelError(
            f"assignment binds {len(assignment)} of {num_vars} variables, must be total"
        )
    return _eval(f, assignment)


def _eval(f: Formula, a: Assignment) -> bool:
    if isinstance(f, Atom):
        return a[f.var] == f.value
    if isinstance(f, Not):
        return not _eval(f.operand, a)
    if isinstance(f, And):
        return _eval(f.left, a) and _eval(f.right, a)
    if isinstance(f, Or):
        return _eval(f.left, a) or _eval(f.right, a)
    if isinstance(f, Implies):
        return (not _eval(f.left, a)) or _eval(f.right, a)
    if isinstance(f, Iff):
        return _eval(f.left, a) == _eval(f.right, a)
    raise ModelError(f"not a formula node: {f!r}")


def satisfies(model: ConfigModel, assignment: Assignment) -> bool:
    """True iff the total assignment satisfies every rule."""
    return all(eval_formula(r, assignment, model.n) for r in model.rules)


def _check_cap(model: ConfigModel, cap: int) -> None:
    product = 1
    for size in model.domain_sizes():
        product *= size
        if product > cap:
            raise EnumerationCapError(
                f"domain product exceeds enumeration cap {cap}"
            )


def _iter_total(model: ConfigModel) -> Iterator[tuple[int, ...]]:
    return itertools.product(*(range(s) for s in model.domain_sizes()))


def oracle_solutions(
    model: ConfigModel, cap: int = DEFAULT_ENUM_CAP
) -> set[tuple[int, ...]]:
    """Enumerate every valid total assignment, as value tuples in variable order."""
    _check_cap(model, cap)
    out = set()
    for values in _iter_total(model):
        assignment = dict(enumerate(values))
        if satisfies(model, assignment):
            out.add(values)
    return out


def oracle_valid_domains(
    model: ConfigModel, partial: Assignment, cap: int = DEFAULT_ENUM_CAP
) -> list[set[int]]:
    """Exact valid domains under a partial assignment, by enumeration.

    Reports a set for every variable, assigned ones included: an assigned
    variable yields a singleton when the partial assignment can still be
    completed and an empty set otherwise.
    """
    for var, value in partial.items():
        if not 0 <= var < model.n:
            raise ModelError(f"assignment references variable index {var} out of range")
        if not 0 <= value < model.variables[var].domain.size:
            raise ModelError(
                f"assigned value {value} out of domain for variable "
                f"{model.variables[var].name!r}"
            )
    _check_cap(model, cap)
    domains: list[set[int]] = [set() for _ in range(model.n)]
    for values in _iter_total(model):
        if any(values[var] != bound for var, bound in partial.items()):
            continue
        assignment = dict(enumerate(values))
        if satisfies(model, assignment):
            for i, v in enumerate(values):
                domains[i].add(v)
    return domains
