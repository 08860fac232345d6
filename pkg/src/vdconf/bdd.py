"""Reduced ordered binary decision diagrams over a fixed variable order.

Nodes are hash-consed through a unique table, so structural equality of two
functions is identity of their root ids; the two reduction rules (merge
duplicate nodes, drop redundant tests) are applied on the fly by `mk_node`.
Terminals are the fixed ids TERM0 and TERM1 and carry the virtual variable
index `num_bool_vars`, one past the last real variable.

A store can be frozen after construction and then shared read-only; further
construction happens in overlay stores created with `BddStore(n, base=...)`,
which see every node of the frozen base and allocate new ids above it.
"""

from __future__ import annotations

from typing import Iterable, Iterator

NodeId = int

TERM0: NodeId = 0
TERM1: NodeId = 1

OPS = ("and", "or", "xor", "imp", "iff")
_COMMUTATIVE = {"and", "or", "xor", "iff"}


class BddError(Exception):
    pass


class OrderingError(BddError):
    """mk_node called with a child above the new node in the variable order."""


class StoreFrozenError(BddError):
    """Construction attempted on a frozen store."""


class BddStore:
    """Hash-consed node table for one variable order.

    `base` layers this store over a frozen parent: all parent ids stay valid
    here, new nodes get ids starting at the parent's high-water mark, and the
    parent is never mutated.
    """

    def __init__(self, num_bool_vars: int, base: "BddStore | None" = None):
        if num_bool_vars < 0:
            raise BddError("num_bool_vars must be >= 0")
        if base is not None:
            if not base._frozen:
                raise BddError("overlay base store must be frozen")
            if base.num_bool_vars != num_bool_vars:
                raise BddError("overlay must keep the base variable count")
        self.num_bool_vars = num_bool_vars
        self._base = base
        self._first_id: NodeId = base._next_id() if base is not None else 2
        # Local nodes: id = _first_id + list index, entry = (var, low, high).
        self._nodes: list[tuple[int, NodeId, NodeId]] = []
        self._unique: dict[tuple[int, NodeId, NodeId], NodeId] = {}
        self._cache: dict[tuple, NodeId] = {}
        self._frozen = False

    # -- node access --------------------------------------------------------

    def _next_id(self) -> NodeId:
        return self._first_id + len(self._nodes)

    def __len__(self) -> int:
        """Total node count including the two terminals."""
        return self._next_id()

    def is_terminal(self, u: NodeId) -> bool:
        return u == TERM0 or u == TERM1

    def node(self, u: NodeId) -> tuple[int, NodeId, NodeId]:
        """(var, low, high) of a non-terminal node."""
        if self.is_terminal(u):
            raise BddError(f"terminal {u} has no successors")
        if u < self._first_id:
            assert self._base is not None
            return self._base.node(u)
        try:
            return self._nodes[u - self._first_id]
        except IndexError:
            raise BddError(f"unknown node id {u}") from None

    def var_of(self, u: NodeId) -> int:
        """Variable index of a node; terminals carry num_bool_vars."""
        if self.is_terminal(u):
            return self.num_bool_vars
        return self.node(u)[0]

    def _check_valid(self, u: NodeId) -> None:
        if not 0 <= u < self._next_id():
            raise BddError(f"node id {u} is not valid in this store")

    # -- construction -------------------------------------------------------

    def freeze(self) -> "BddStore":
        self._frozen = True
        return self

    @property
    def frozen(self) -> bool:
        return self._frozen

    def _unique_find(self, key: tuple[int, NodeId, NodeId]) -> NodeId | None:
        hit = self._unique.get(key)
        if hit is None and self._base is not None:
            return self._base._unique_find(key)
        return hit

    def _cache_find(self, key: tuple) -> NodeId | None:
        hit = self._cache.get(key)
        if hit is None and self._base is not None:
            return self._base._cache_find(key)
        return hit

    def mk_node(self, var: int, low: NodeId, high: NodeId) -> NodeId:
        """Unique, reduced node for (var, low, high).

        Applies both reduction rules: identical children collapse to the
        child, and an existing node with the same triple is reused.
        """
        if low == high:
            return low
        if self._frozen:
            raise StoreFrozenError("store is frozen")
        self._check_valid(low)
        self._check_valid(high)
        if not 0 <= var < self.num_bool_vars:
            raise OrderingError(f"variable index {var} out of range")
        if var >= self.var_of(low) or var >= self.var_of(high):
            raise OrderingError(
                f"node on variable {var} would sit below its children "
                f"({self.var_of(low)}, {self.var_of(high)})"
            )
        key = (var, low, high)
        found = self._unique_find(key)
        if found is not None:
            return found
        fresh = self._next_id()
        self._nodes.append(key)
        self._unique[key] = fresh
        return fresh

    def literal(self, var: int, bit: int) -> NodeId:
        """BDD of a single variable test: true iff var takes the given bit."""
        if bit:
            return self.mk_node(var, TERM0, TERM1)
        return self.mk_node(var, TERM1, TERM0)

    # -- Boolean operations --------------------------------------------------

    def apply(self, op: str, a: NodeId, b: NodeId) -> NodeId:
        """Canonical BDD of (a op b); op is one of OPS. Memoized."""
        if op not in OPS:
            raise BddError(f"unknown operation {op!r}")
        self._check_valid(a)
        self._check_valid(b)
        return self._apply(op, a, b)

    def _apply(self, op: str, a: NodeId, b: NodeId) -> NodeId:
        shortcut = self._apply_terminal(op, a, b)
        if shortcut is not None:
            return shortcut
        if op in _COMMUTATIVE and a > b:
            a, b = b, a
        key = (op, a, b)
        hit = self._cache_find(key)
        if hit is not None:
            return hit
        va, vb = self.var_of(a), self.var_of(b)
        v = min(va, vb)
        a0, a1 = self._cofactors(a, va, v)
        b0, b1 = self._cofactors(b, vb, v)
        result = self.mk_node(v, self._apply(op, a0, b0), self._apply(op, a1, b1))
        self._cache[key] = result
        return result

    def _cofactors(self, u: NodeId, var_u: int, v: int) -> tuple[NodeId, NodeId]:
        if var_u == v:
            _, low, high = self.node(u)
            return low, high
        return u, u

    def _apply_terminal(self, op: str, a: NodeId, b: NodeId) -> NodeId | None:
        if op == "and":
            if a == TERM0 or b == TERM0:
                return TERM0
            if a == TERM1:
                return b
            if b == TERM1:
                return a
            if a == b:
                return a
        elif op == "or":
            if a == TERM1 or b == TERM1:
                return TERM1
            if a == TERM0:
                return b
            if b == TERM0:
                return a
            if a == b:
                return a
        elif op == "xor":
            if a == b:
                return TERM0
            if a == TERM0:
                return b
            if b == TERM0:
                return a
            if a == TERM1:
                return self.negate(b)
            if b == TERM1:
                return self.negate(a)
        elif op == "imp":
            if a == TERM0 or b == TERM1 or a == b:
                return TERM1
            if a == TERM1:
                return b
            if b == TERM0:
                return self.negate(a)
        elif op == "iff":
            if a == b:
                return TERM1
            if a == TERM1:
                return b
            if b == TERM1:
                return a
            if a == TERM0:
                return self.negate(b)
            if b == TERM0:
                return self.negate(a)
        return None

    def negate(self, a: NodeId) -> NodeId:
        """BDD of the complement; an involution."""
        self._check_valid(a)
        return self._negate(a)

    def _negate(self, a: NodeId) -> NodeId:
        if a == TERM0:
            return TERM1
        if a == TERM1:
            return TERM0
        key = ("not", a)
        hit = self._cache_find(key)
        if hit is not None:
            return hit
        var, low, high = self.node(a)
        result = self.mk_node(var, self._negate(low), self._negate(high))
        self._cache[key] = result
        return result

    def restrict(self, a: NodeId, var: int, bit: int) -> NodeId:
        """Cofactor of a with the Boolean variable fixed; never tests var."""
        self._check_valid(a)
        if not 0 <= var < self.num_bool_vars:
            raise BddError(f"variable index {var} out of range")
        if bit not in (0, 1):
            raise BddError(f"bit must be 0 or 1, got {bit!r}")
        return self._restrict(a, var, bit)

    def _restrict(self, a: NodeId, var: int, bit: int) -> NodeId:
        # Ordering means nothing below level `var` can test it again.
        if self.var_of(a) > var:
            return a
        v, low, high = self.node(a)
        if v == var:
            return high if bit else low
        key = ("res", a, var, bit)
        hit = self._cache_find(key)
        if hit is not None:
            return hit
        result = self.mk_node(
            v, self._restrict(low, var, bit), self._restrict(high, var, bit)
        )
        self._cache[key] = result
        return result

    # -- analysis ------------------------------------------------------------

    def sat_count(self, a: NodeId) -> int:
        """Number of total assignments to all num_bool_vars variables satisfying a.

        Skipped levels weigh in as a factor of two each. Exact: Python ints
        do not overflow. Uses a per-call memo, so it is safe on frozen stores.
        """
        self._check_valid(a)
        memo: dict[NodeId, int] = {TERM0: 0, TERM1: 1}

        def below(u: NodeId) -> int:
            # assignments to variables var_of(u).. that satisfy u
            if u in memo:
                return memo[u]
            var, low, high = self.node(u)
            total = (below(low) << (self.var_of(low) - var - 1)) + (
                below(high) << (self.var_of(high) - var - 1)
            )
            memo[u] = total
            return total

        return below(a) << self.var_of(a)

    def reachable_nodes(self, roots: Iterable[NodeId]) -> list[NodeId]:
        """Non-terminal node ids reachable from the roots, ascending."""
        seen: set[NodeId] = set()
        stack = [r for r in roots]
        for r in stack:
            self._check_valid(r)
        while stack:
            u = stack.pop()
            if u in seen or self.is_terminal(u):
                continue
            seen.add(u)
            _, low, high = self.node(u)
            stack.append(low)
            stack.append(high)
        return sorted(seen)

    def iter_edges(self, roots: Iterable[NodeId]) -> Iterator[tuple[NodeId, NodeId]]:
        """All (parent, child) edges reachable from the roots; low then high."""
        for u in self.reachable_nodes(roots):
            _, low, high = self.node(u)
            yield u, low
            yield u, high


def compact(store: BddStore, roots: list[NodeId]) -> tuple[BddStore, list[NodeId]]:
    """Copy the graphs under `roots` into a fresh store, dropping dead nodes.

    Nodes are renumbered in depth-first postorder (low before high, roots in
    order), so the numbering depends only on graph structure: two stores
    holding the same function compact to identical ids.
    """
    fresh = BddStore(store.num_bool_vars)
    mapping: dict[NodeId, NodeId] = {TERM0: TERM0, TERM1: TERM1}

    def copy(u: NodeId) -> NodeId:
        mapped = mapping.get(u)
        if mapped is not None:
            return mapped
        var, low, high = store.node(u)
        mapped = fresh.mk_node(var, copy(low), copy(high))
        mapping[u] = mapped
        return mapped

    return fresh, [copy(r) for r in roots]


def export_dot(
    store: BddStore,
    roots: list[tuple[str, NodeId]],
    var_labels: list[str] | None = None,
) -> str:
    """Deterministic DOT text for the graphs under the labelled roots.

    High edges are solid, low edges dashed; nodes of one variable share a
    rank so layers line up; shared subgraphs are emitted once.
    """
    if var_labels is not None and len(var_labels) != store.num_bool_vars:
        raise BddError("need one label per Boolean variable")

    def name(v: int) -> str:
        return var_labels[v] if var_labels is not None else f"b{v}"

    nodes = store.reachable_nodes(r for _, r in roots)
    lines = ["digraph bdd {"]
    terminals = {r for _, r in roots if store.is_terminal(r)}
    terminals.update(
        child for u in nodes for child in store.node(u)[1:]
        if store.is_terminal(child)
    )
    for t in sorted(terminals):
        lines.append(f'  n{t} [label="{t}", shape=box];')
    by_var: dict[int, list[NodeId]] = {}
    for u in nodes:
        by_var.setdefault(store.node(u)[0], []).append(u)
    for v in sorted(by_var):
        members = by_var[v]
        for u in members:
            lines.append(f'  n{u} [label="{name(v)}", shape=circle];')
        same = " ".join(f"n{u};" for u in members)
        lines.append(f"  {{ rank=same; {same} }}")
    for u in nodes:
        _, low, high = store.node(u)
        lines.append(f"  n{u} -> n{low} [style=dashed];")
        lines.append(f"  n{u} -> n{high} [style=solid];")
    for i, (label, r) in enumerate(roots):
        lines.append(f'  root{i} [label="{label}", shape=plaintext];')
        lines.append(f"  root{i} -> n{r};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def serialize_store(store: BddStore) -> str:
    """Text dump of every node: header `bdd v1 <vars>`, then `id var low high`.

    Ids ascend, children before parents, so the listing is topological and a
    deserialize/serialize round-trip reproduces the text byte for byte.
    """
    lines = [f"bdd v1 {store.num_bool_vars}"]
    for u in range(2, len(store)):
        var, low, high = store.node(u)
        lines.append(f"{u} {var} {low} {high}")
    return "\n".join(lines) + "\n"


def deserialize_store(text: str) -> BddStore:
    """Rebuild a store from `serialize_store` output; ids are preserved."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise BddError("empty store serialization")
    header = lines[0].split()
    if len(header) != 3 or header[0] != "bdd" or header[1] != "v1":
        raise BddError(f"bad store header {lines[0]!r}")
    try:
        num_bool_vars = int(header[2])
    except ValueError:
        raise BddError(f"bad variable count in header {lines[0]!r}") from None
    store = BddStore(num_bool_vars)
    for line in lines[1:]:
        parts = line.split()
        if len(parts) != 4:
            raise BddError(f"bad node line {line!r}")
        try:
            u, var, low, high = (int(p) for p in parts)
        except ValueError:
            raise BddError(f"bad node line {line!r}") from None
        made = store.mk_node(var, low, high)
        if made != u:
            raise BddError(
                f"node line {line!r} is out of order or duplicated "
                f"(expected id {made})"
            )
    return store
