"""End-to-end acceptance checks, one test per shipping criterion.

Each test prints a `criterion <name>: PASS/FAIL` line (visible with -s or in
the failure report). Tolerances are exact comparisons unless a wall-clock
budget is stated inline.
"""

import random
import time
from contextlib import contextmanager

import pytest

from conftest import TSHIRT_JSON, TSHIRT_SOLUTIONS
from vdconf.bdd import TERM0, BddStore
from vdconf.cvd import DomainEngine
from vdconf.encode import compile_model, read_artifact, restrict_value, write_artifact
from vdconf.fuzz import random_model, random_valid_partial, run_fuzz
from vdconf.model import (
    ConfigModel,
    oracle_solutions,
    oracle_valid_domains,
    parse_model,
    satisfies,
)
from vdconf.session import start


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"criterion {name}: FAIL")
        raise
    print(f"criterion {name}: PASS")


def test_tshirt_golden_suite():
    with criterion("tshirt-golden-suite"):
        began = time.perf_counter()
        model = parse_model(TSHIRT_JSON)
        space = compile_model(model)
        assert space.solution_count() == 11
        assert oracle_solutions(model) == TSHIRT_SOLUTIONS
        elapsed = time.perf_counter() - began
        assert elapsed < 1.0, f"golden suite took {elapsed:.3f}s"


def test_tshirt_domain_tables(tshirt_space):
    with criterion("tshirt-domain-tables"):
        model = tshirt_space.model

        def domains_after(partial):
            store = BddStore(5, base=tshirt_space.store)
            engine = DomainEngine(store, tshirt_space.layout, model.domain_sizes())
            root = tshirt_space.root
            for var, value in partial.items():
                root = restrict_value(
                    store, tshirt_space.layout, root, var, value,
                    model.variables[var].domain.size,
                )
            return engine.valid_domains(root)

        unrestricted = domains_after({})
        assert unrestricted == [{0, 1, 2, 3}, {0, 1, 2}, {0, 1}]

        small = domains_after({1: 0})
        assert small[0] == {0}, "size=small must pin color to black"
        assert small[2] == {0}, "size=small must pin print to MIB"

        stw = domains_after({2: 1})
        assert stw[1] == {1, 2}, "print=STW must drop small"

        mib = domains_after({2: 0})
        assert mib[0] == {0}, "print=MIB must pin color to black"

        for partial in ({}, {1: 0}, {2: 1}, {2: 0}):
            assert domains_after(partial) == oracle_valid_domains(model, partial)


def test_differential_fuzz():
    with criterion("differential-fuzz"):
        began = time.perf_counter()
        report = run_fuzz(
            seed=20260809,
            trials=1000,
            max_vars=5,
            max_domain=5,
            max_rules=4,
            checks_per_model=3,
        )
        elapsed = time.perf_counter() - began
        details = "; ".join(
            f"{m.kind}: expected {m.expected} got {m.actual}"
            for m in report.mismatches[:5]
        )
        assert report.trials == 1000
        assert not report.mismatches, f"{len(report.mismatches)} mismatches: {details}"
        assert elapsed < 60.0, f"fuzz took {elapsed:.1f}s"


def _fuzz_instances(seed, count):
    rng = random.Random(seed)
    for _ in range(count):
        model = random_model(rng, max_vars=5, max_domain=5, max_rules=4)
        space = compile_model(model)
        solutions = oracle_solutions(model)
        partials = [{}] + [
            random_valid_partial(rng, model, solutions) for _ in range(2)
        ]
        for partial in partials:
            store = BddStore(space.layout.num_bool_vars, base=space.store)
            root = space.root
            for var in sorted(partial):
                root = restrict_value(
                    store, space.layout, root, var, partial[var],
                    model.variables[var].domain.size,
                )
            yield model, space, store, root


def test_cvd_skipped_soundness():
    with criterion("cvd-skipped-soundness"):
        violations = []
        for model, space, store, root in _fuzz_instances(seed=31337, count=500):
            if root == TERM0:
                continue
            engine = DomainEngine(store, space.layout, model.domain_sizes())
            layers = engine.build_layers(root)
            certified = engine.skipped_full_variables(root, layers)
            engine.marks.new_generation()
            for i in sorted(certified):
                full = set(range(model.variables[i].domain.size))
                if engine.traversal_domain(root, i, layers) != full:
                    violations.append((model, i))
        assert not violations, f"{len(violations)} unsound certifications"


def test_complexity_instrumentation(tshirt_space):
    with criterion("complexity-instrumentation"):
        violations = 0

        def check(engine, root):
            nonlocal violations
            engine.valid_domains(root)
            visits = engine.visit_report()
            layers = engine.build_layers(root)
            for got, bound in zip(visits, engine.visit_bounds(layers)):
                if got > bound:
                    violations += 1

        check(
            DomainEngine(
                tshirt_space.store,
                tshirt_space.layout,
                tshirt_space.model.domain_sizes(),
            ),
            tshirt_space.root,
        )
        for model, space, store, root in _fuzz_instances(seed=90210, count=500):
            if root == TERM0:
                continue
            check(DomainEngine(store, space.layout, model.domain_sizes()), root)
        assert violations == 0


def test_canonicity_under_rule_permutation(tshirt_model):
    with criterion("canonicity-rule-permutation"):
        forward = compile_model(tshirt_model)
        backward = compile_model(
            ConfigModel(tshirt_model.variables, tshirt_model.rules[::-1])
        )
        assert forward.root == backward.root
        rng = random.Random(424242)
        for _ in range(20):
            model = random_model(rng, max_vars=5, max_domain=5, max_rules=4)
            baseline = compile_model(model).root
            for _ in range(20):
                rules = list(model.rules)
                rng.shuffle(rules)
                permuted = ConfigModel(model.variables, tuple(rules))
                assert compile_model(permuted).root == baseline


def test_backtrack_free_walks():
    with criterion("backtrack-free-walks"):
        rng = random.Random(5150)
        walks = 0
        while walks < 500:
            model = random_model(rng, max_vars=5, max_domain=5, max_rules=4)
            space = compile_model(model)
            if space.root == TERM0:
                continue
            walks += 1
            session = start(space)
            while not session.status().complete:
                unassigned = [
                    i for i in range(model.n) if i not in session.assigned_vars()
                ]
                var = rng.choice(unassigned)
                choices = sorted(session.domains[var])
                assert choices, "valid domain empty mid-session: dead end"
                status = session.assign(var, rng.choice(choices))
                assert status.solution_count >= 1
            final = dict(session.assignments)
            final.update(dict(session.status().forced))
            assert len(final) == model.n
            assert satisfies(model, final)


def test_assign_cycle_latency_soft(tshirt_space, capsys):
    with criterion("assign-cycle-latency-soft"):
        artifact = write_artifact(tshirt_space)
        space = read_artifact(artifact)
        # warm once, then time a fresh session's assign+domains cycle
        start(space).assign(2, 1)
        session = start(space)
        began = time.perf_counter()
        session.assign(2, 1)
        session.status()
        elapsed_ms = (time.perf_counter() - began) * 1000
        print(f"assign+domains cycle: {elapsed_ms:.2f} ms (budget 250 ms)")
        if elapsed_ms >= 250:
            print("warning: latency budget exceeded on this hardware")
