"""Differential testing: random models checked against the brute-force oracles.

Every trial compiles a random small model, then compares the BDD pipeline
against plain enumeration: solution counts, valid domains under random valid
partial assignments, soundness of the skip certification, and the traversal
visit budget. Any disagreement is reported as a reproducer holding the full
model, the assignment, and the seed.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .bdd import TERM0, BddStore
from .cvd import DomainEngine
from .encode import compile_model, restrict_value
from .model import (
    DEFAULT_ENUM_CAP,
    Atom,
    ConfigModel,
    Domain,
    Formula,
    Implies,
    Not,
    Or,
    Variable,
    oracle_solutions,
    parse_model,
    serialize_model,
)


@dataclass
class Mismatch:
    kind: str
    seed: int
    trial: int
    model_json: str
    assignment: dict[str, str]
    expected: str
    actual: str

    def reproducer(self) -> str:
        return json.dumps(
            {
                "kind": self.kind,
                "seed": self.seed,
                "trial": self.trial,
                "model": json.loads(self.model_json),
                "assignment": self.assignment,
                "expected": self.expected,
                "actual": self.actual,
            },
            indent=2,
        )


@dataclass
class FuzzReport:
    trials: int
    checks: int = 0
    mismatches: list[Mismatch] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def random_model(
    rng: random.Random, max_vars: int, max_domain: int, max_rules: int
) -> ConfigModel:
    n = rng.randint(1, max_vars)
    variables = tuple(
        Variable(
            f"x{i}",
            Domain(size, tuple(f"v{j}" for j in range(size))),
            i,
        )
        for i, size in enumerate(rng.randint(1, max_domain) for _ in range(n))
    )
    rules = tuple(
        _random_rule(rng, variables) for _ in range(rng.randint(0, max_rules))
    )
    return ConfigModel(variables, rules)


def _random_literal(rng: random.Random, variables: tuple[Variable, ...]) -> Formula:
    var = rng.randrange(len(variables))
    atom = Atom(var, rng.randrange(variables[var].domain.size))
    return Not(atom) if rng.random() < 0.4 else atom


def _random_rule(rng: random.Random, variables: tuple[Variable, ...]) -> Formula:
    # Implications and disjunctions over up to three literals.
    lit = lambda: _random_literal(rng, variables)
    shape = rng.randrange(5)
    if shape == 0:
        return lit()
    if shape == 1:
        return Or(lit(), lit())
    if shape == 2:
        return Or(lit(), Or(lit(), lit()))
    if shape == 3:
        return Implies(lit(), lit())
    return Implies(lit(), Or(lit(), lit()))


def random_valid_partial(
    rng: random.Random, model: ConfigModel, solutions: set[tuple[int, ...]]
) -> dict[int, int]:
    """A partial assignment that provably extends to a solution (or {} when
    none exist): a random subset of a randomly drawn solution."""
    if not solutions:
        return {}
    chosen = rng.choice(sorted(solutions))
    picked = rng.sample(range(model.n), rng.randint(0, model.n))
    return {var: chosen[var] for var in picked}


def domains_from_solutions(
    solutions: set[tuple[int, ...]], n: int, partial: dict[int, int]
) -> list[set[int]]:
    """Valid domains read straight off the enumerated solution set."""
    domains: list[set[int]] = [set() for _ in range(n)]
    for sol in solutions:
        if all(sol[var] == value for var, value in partial.items()):
            for i, v in enumerate(sol):
                domains[i].add(v)
    return domains


def _fmt_domains(domains: list[set[int]]) -> str:
    return json.dumps([sorted(d) for d in domains])


@dataclass
class Problem:
    kind: str
    expected: str
    actual: str
    partial: dict[int, int]


def check_model(
    model: ConfigModel,
    partials: list[dict[int, int]],
    cap: int = DEFAULT_ENUM_CAP,
) -> list[Problem]:
    """Run every differential check for one model; empty when all agree."""
    problems: list[Problem] = []
    solutions = oracle_solutions(model, cap)
    space = compile_model(model)
    got_count = space.solution_count()
    if got_count != len(solutions):
        problems.append(
            Problem("solution-count", str(len(solutions)), str(got_count), {})
        )
    for partial in partials:
        overlay = BddStore(space.layout.num_bool_vars, base=space.store)
        engine = DomainEngine(overlay, space.layout, model.domain_sizes())
        root = space.root
        for var in sorted(partial):
            root = restrict_value(
                overlay,
                space.layout,
                root,
                var,
                partial[var],
                model.variables[var].domain.size,
            )
        want_domains = domains_from_solutions(solutions, model.n, partial)
        got_domains = engine.valid_domains(root)
        if got_domains != want_domains:
            problems.append(
                Problem(
                    "valid-domains",
                    _fmt_domains(want_domains),
                    _fmt_domains(got_domains),
                    partial,
                )
            )
        want_restricted = sum(
            1
            for sol in solutions
            if all(sol[var] == value for var, value in partial.items())
        )
        got_restricted = overlay.sat_count(root)
        if got_restricted != want_restricted:
            problems.append(
                Problem(
                    "restricted-count",
                    str(want_restricted),
                    str(got_restricted),
                    partial,
                )
            )
        visits = engine.visit_report()
        if root != TERM0:
            layers = engine.build_layers(root)
            bounds = engine.visit_bounds(layers)
            for i in range(model.n):
                if visits[i] > bounds[i]:
                    problems.append(
                        Problem(
                            f"visit-bound var={i}",
                            f"<= {bounds[i]}",
                            str(visits[i]),
                            partial,
                        )
                    )
            certified = engine.skipped_full_variables(root, layers)
            for i in sorted(certified):
                full = set(range(model.variables[i].domain.size))
                traversed = engine.traversal_domain(root, i, layers)
                if traversed != full:
                    problems.append(
                        Problem(
                            f"skip-soundness var={i}",
                            json.dumps(sorted(full)),
                            json.dumps(sorted(traversed)),
                            partial,
                        )
                    )
    return problems


def run_fuzz(
    seed: int,
    trials: int,
    max_vars: int = 5,
    max_domain: int = 5,
    max_rules: int = 4,
    cap: int = DEFAULT_ENUM_CAP,
    checks_per_model: int = 3,
    stop_at_first: bool = False,
) -> FuzzReport:
    rng = random.Random(seed)
    report = FuzzReport(trials=trials)
    for trial in range(trials):
        model = random_model(rng, max_vars, max_domain, max_rules)
        solutions = oracle_solutions(model, cap)
        partials = [
            random_valid_partial(rng, model, solutions)
            for _ in range(checks_per_model)
        ]
        for problem in check_model(model, partials, cap):
            report.mismatches.append(
                Mismatch(
                    kind=problem.kind,
                    seed=seed,
                    trial=trial,
                    model_json=serialize_model(model),
                    assignment=_label_assignment(model, problem.partial),
                    expected=problem.expected,
                    actual=problem.actual,
                )
            )
        report.checks += 1 + len(partials)
        if report.mismatches and stop_at_first:
            break
    return report


def _label_assignment(model: ConfigModel, partial: dict[int, int]) -> dict[str, str]:
    return {
        model.variables[var].name: model.variables[var].domain.label_of(value)
        for var, value in sorted(partial.items())
    }


def replay(reproducer_json: str, cap: int = DEFAULT_ENUM_CAP) -> list[Problem]:
    """Re-run the checks for a serialized reproducer; nonempty means the
    failure still triggers."""
    data = json.loads(reproducer_json)
    model = parse_model(json.dumps(data["model"]))
    partial = {
        model.var_index(name): model.value_index(model.var_index(name), label)
        for name, label in data.get("assignment", {}).items()
    }
    return check_model(model, [partial], cap)
