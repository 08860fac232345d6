"""Interactive configuration sessions over a compiled solution space.

A session owns the partial assignment and a stack of restricted roots; every
user choice conjoins one value chain onto the current root, every undo pops
one. New nodes land in a session-private overlay store, so many sessions can
share one frozen compiled space. Choices are only accepted from the current
valid domains, which is what makes the interaction backtrack-free: the
solution count can never hit zero.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bdd import TERM0, BddStore, NodeId
from .cvd import DomainEngine
from .encode import CompiledSpace, restrict_value


class SessionError(Exception):
    pass


class ModelUnsatisfiableError(SessionError):
    """The compiled space has no solutions; no session can start."""


class AlreadyAssignedError(SessionError):
    def __init__(self, name: str):
        super().__init__(f"variable {name!r} is already assigned")
        self.variable = name


class InvalidChoiceError(SessionError):
    def __init__(self, name: str, label: str):
        super().__init__(f"value {label!r} is not in the current valid domain of {name!r}")
        self.variable = name
        self.value = label


class NothingToUndoError(SessionError):
    pass


@dataclass(frozen=True)
class Step:
    """One accepted assignment with the state snapshot it produced."""

    var: int
    value: int
    root: NodeId
    domains: tuple[frozenset[int], ...]
    count: int


@dataclass(frozen=True)
class Status:
    assignments: tuple[tuple[int, int], ...]
    domains: tuple[frozenset[int], ...]
    solution_count: int
    complete: bool
    forced: tuple[tuple[int, int], ...]


class Session:
    """Mutable interaction state: apply choices, undo them, read domains."""

    def __init__(self, space: CompiledSpace):
        if space.root == TERM0:
            raise ModelUnsatisfiableError("model has no valid configurations")
        if not space.store.frozen:
            raise SessionError("compiled space must be frozen before sessions start")
        self.space = space
        self.store = BddStore(space.layout.num_bool_vars, base=space.store)
        self._engine = DomainEngine(
            self.store, space.layout, space.model.domain_sizes()
        )
        self._initial = self._snapshot_for(space.root)
        self._steps: list[Step] = []

    def _snapshot_for(self, root: NodeId) -> tuple[NodeId, tuple[frozenset[int], ...], int]:
        domains = tuple(frozenset(d) for d in self._engine.valid_domains(root))
        return root, domains, self.store.sat_count(root)

    # -- observable state ---------------------------------------------------

    @property
    def root(self) -> NodeId:
        return self._steps[-1].root if self._steps else self._initial[0]

    @property
    def domains(self) -> tuple[frozenset[int], ...]:
        return self._steps[-1].domains if self._steps else self._initial[1]

    @property
    def solution_count(self) -> int:
        return self._steps[-1].count if self._steps else self._initial[2]

    @property
    def assignments(self) -> tuple[tuple[int, int], ...]:
        return tuple((s.var, s.value) for s in self._steps)

    def assigned_vars(self) -> set[int]:
        return {s.var for s in self._steps}

    # -- transitions ----------------------------------------------------------

    def assign(self, var: int, value: int) -> Status:
        """Apply one choice; rejected without state change if it is not valid."""
        model = self.space.model
        if not 0 <= var < model.n:
            raise SessionError(f"variable index {var} out of range")
        name = model.variables[var].name
        if var in self.assigned_vars():
            raise AlreadyAssignedError(name)
        if value not in self.domains[var]:
            raise InvalidChoiceError(name, model.variables[var].domain.label_of(value))
        root = restrict_value(
            self.store,
            self.space.layout,
            self.root,
            var,
            value,
            model.variables[var].domain.size,
        )
        root, domains, count = self._snapshot_for(root)
        if count < 1:
            raise SessionError(
                "a choice from the reported valid domain emptied the solution "
                "space; the domains were wrong"
            )
        self._steps.append(Step(var, value, root, domains, count))
        return self.status()

    def undo(self) -> Status:
        """Retract the most recent choice; state reverts to the prior snapshot."""
        if not self._steps:
            raise NothingToUndoError("no assignment to undo")
        self._steps.pop()
        return self.status()

    def status(self) -> Status:
        assigned = self.assigned_vars()
        domains = self.domains
        forced = tuple(
            (i, next(iter(domains[i])))
            for i in range(self.space.model.n)
            if i not in assigned and len(domains[i]) == 1
        )
        return Status(
            assignments=self.assignments,
            domains=domains,
            solution_count=self.solution_count,
            complete=self.solution_count == 1,
            forced=forced,
        )

    def visit_report(self) -> list[int]:
        return self._engine.visit_report()


def start(space: CompiledSpace) -> Session:
    """Open a session on a compiled space; fails if it is unsatisfiable."""
    return Session(space)
