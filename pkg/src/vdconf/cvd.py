"""Online valid-domains computation over a compiled solution space.

Two cooperating algorithms:

* Long-edge certification: any edge that jumps clean over a layer proves
  every value of that layer's variable is valid, because the skipped block
  is don't-care on a satisfying path. Overlapping skipped spans are merged
  in one linear pass; variables strictly inside a merged span get their full
  domain without any traversal.

* Per-value traversal: for the remaining variables, walk each candidate
  value's bit encoding through the layer from each entry node. Reaching any
  node beyond the layer other than the false terminal proves the value
  extends to a solution. Nodes are marked per (variable, value) so repeated
  walks short-circuit, which bounds total work per layer by
  (|layer| + |entries|) * domain size.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bdd import TERM0, TERM1, BddStore, NodeId
from .encode import BoolLayout, CompiledSpace, enc


class CvdError(Exception):
    pass


@dataclass
class Layers:
    """Reachable non-terminal nodes grouped by finite variable.

    `nodes_by_var[i]` holds the layer of variable i in ascending id order;
    `entries[i]` the subset reachable by an edge from an earlier layer (the
    root counts as an entry of its own layer). `single_edge_reach[i]` is the
    furthest layer any one edge out of layer i reaches without dying in the
    false terminal; it stays at i+1 when no edge skips anything.
    """

    nodes_by_var: list[list[NodeId]]
    entries: list[list[NodeId]]
    single_edge_reach: list[int]
    terminal_layer_index: int

    def is_crossed(self, i: int) -> bool:
        """True when some single live edge jumps clean over layer i, leaving
        the whole block don't-care on a satisfying path."""
        return any(self.single_edge_reach[a] > i for a in range(i))


@dataclass
class LongEdgeSummary:
    """Merged skip spans: furthest[i] is the last layer reachable by one edge
    leaving layer i toward a non-false target; segment_starts holds the start
    of each merged span that actually skips something."""

    furthest: list[int]
    segment_starts: list[int]


class MarkTable:
    """Per-node marks recording the last (variable, value) traversal.

    A generation counter makes resetting all marks O(1): stale entries from
    earlier computations simply stop matching.
    """

    def __init__(self):
        self._marks: dict[NodeId, tuple[int, int, int]] = {}
        self._generation = 0

    def new_generation(self) -> None:
        self._generation += 1

    def is_marked(self, u: NodeId, var: int, value: int) -> bool:
        return self._marks.get(u) == (self._generation, var, value)

    def mark(self, u: NodeId, var: int, value: int) -> None:
        self._marks[u] = (self._generation, var, value)


def _merge_skip_spans(furthest: list[int]) -> tuple[list[int], list[int]]:
    """Merge overlapping skip spans in one pass.

    Extends the open span while the next layer starts inside it, then closes
    it, keeping only spans that skip at least one whole layer. The final open
    span is flushed too.
    """
    n = len(furthest)
    furthest = list(furthest)
    starts: list[int] = []
    s = 0
    for i in range(n - 1):
        if i + 1 < furthest[s]:
            furthest[s] = max(furthest[s], furthest[i + 1])
        else:
            if s + 1 < furthest[s]:
                starts.append(s)
            s = i + 1
    if n and s + 1 < furthest[s]:
        starts.append(s)
    return furthest, starts


class DomainEngine:
    """Valid-domains computation bound to one store, layout, and domain sizes.

    One engine serves many roots over the same store (one per interaction
    step); the mark table is recycled across calls via its generation
    counter. Not thread-safe: share the store, not the engine.
    """

    def __init__(
        self,
        store: BddStore,
        layout: BoolLayout,
        sizes: tuple[int, ...],
        marking: bool = True,
    ):
        if layout.n != len(sizes):
            raise CvdError("layout and domain sizes disagree")
        self.store = store
        self.layout = layout
        self.sizes = sizes
        self.marks = MarkTable()
        self.marking = marking
        self.visits = [0] * layout.n

    # -- structure extraction ------------------------------------------------

    def build_layers(self, root: NodeId) -> Layers:
        """Group reachable nodes by layer; record entries and skip reach.

        Edges into the false terminal do not count toward the reach: they
        lie on no satisfying path, so they witness nothing.
        """
        store, layout = self.store, self.layout
        nodes_by_var: list[list[NodeId]] = [[] for _ in range(layout.n)]
        entries: list[set[NodeId]] = [set() for _ in range(layout.n)]
        reach = [i + 1 for i in range(layout.n)]
        reachable = store.reachable_nodes([root])
        for u in reachable:
            nodes_by_var[layout.var1(store.node(u)[0])].append(u)
        if not store.is_terminal(root):
            entries[layout.var1(store.var_of(root))].add(root)
        for u in reachable:
            layer_u = layout.var1(store.node(u)[0])
            for child in store.node(u)[1:]:
                if child == TERM0:
                    continue
                layer_child = layout.var1(store.var_of(child))
                if layer_child > reach[layer_u]:
                    reach[layer_u] = layer_child
                if not store.is_terminal(child) and layer_child > layer_u:
                    entries[layer_child].add(child)
        return Layers(nodes_by_var, [sorted(s) for s in entries], reach, layout.n)

    def long_edge_summary(self, root: NodeId, layers: Layers) -> LongEdgeSummary:
        """Skip spans merged over the per-layer single-edge reach.

        An edge into the true terminal reaches the virtual terminal layer
        and so spans everything below its source layer.
        """
        merged, starts = _merge_skip_spans(layers.single_edge_reach)
        return LongEdgeSummary(merged, starts)

    def skipped_full_variables(self, root: NodeId, layers: Layers) -> set[int]:
        """Variables certified full because a merged skip span strictly
        contains their layer. Span endpoints are tested layers and stay with
        the traversal pass. A bare true root certifies every variable."""
        if root == TERM0:
            raise CvdError("no valid domains exist for an empty solution space")
        if root == TERM1:
            return set(range(self.layout.n))
        summary = self.long_edge_summary(root, layers)
        certified: set[int] = set()
        for s in summary.segment_starts:
            certified.update(range(s + 1, summary.furthest[s]))
        return certified

    # -- per-value traversal ---------------------------------------------------

    def traverse(self, u: NodeId, i: int, j: int) -> NodeId:
        """Walk value j's encoding through layer i starting at u.

        Returns the first node past the layer (the false terminal means the
        value fails on this entry). Nodes already marked for (i, j) are known
        dead ends from an earlier failed walk; every visited node is marked.
        Entry below the block's first bit starts mid-encoding: the skipped
        leading bits are don't-care on the path that got here.
        """
        store, layout = self.store, self.layout
        bits = enc(j, layout.k[i])
        self.visits[i] += 1
        if self.marking and not store.is_terminal(u):
            if self.marks.is_marked(u, i, j):
                return TERM0
            self.marks.mark(u, i, j)
        while True:
            var = store.var_of(u)
            if layout.var1(var) > i:
                return u
            _, low, high = store.node(u)
            u = high if bits[layout.var2(var)] else low
            self.visits[i] += 1
            if u == TERM0:
                return TERM0
            if store.is_terminal(u):
                return u
            if self.marking:
                if self.marks.is_marked(u, i, j):
                    return TERM0
                self.marks.mark(u, i, j)

    def traversal_domain(self, root: NodeId, i: int, layers: Layers) -> set[int]:
        """Valid values of variable i found by traversing its layer.

        An empty layer means no satisfying path constrains the block, so with
        a nonempty solution space every value extends; likewise a single edge
        crossing the whole layer makes the block don't-care on one satisfying
        path and witnesses every value at once. Otherwise every satisfying
        path runs through the layer, and per value the search stops at the
        first entry node that escapes the layer alive.
        """
        if root == TERM0:
            raise CvdError("no valid domains exist for an empty solution space")
        size = self.sizes[i]
        if not layers.nodes_by_var[i] or layers.is_crossed(i):
            return set(range(size))
        found: set[int] = set()
        for j in range(size):
            for u in layers.entries[i]:
                if self.traverse(u, i, j) != TERM0:
                    found.add(j)
                    break
        return found

    # -- driver ------------------------------------------------------------------

    def valid_domains(self, root: NodeId) -> list[set[int]]:
        """Exact valid domains for every variable under the given root.

        An empty solution space yields all-empty sets. Otherwise skip-span
        certification runs first and traversal covers the remaining
        variables. Visit counters reset on every call.
        """
        n = self.layout.n
        self.visits = [0] * n
        if root == TERM0:
            return [set() for _ in range(n)]
        self.marks.new_generation()
        layers = self.build_layers(root)
        certified = self.skipped_full_variables(root, layers)
        domains: list[set[int]] = []
        for i in range(n):
            if i in certified:
                domains.append(set(range(self.sizes[i])))
            else:
                domains.append(self.traversal_domain(root, i, layers))
        return domains

    def visit_report(self) -> list[int]:
        """Node visits per variable from the last valid_domains call."""
        return list(self.visits)

    def visit_bounds(self, layers: Layers) -> list[int]:
        """Worst-case visit budget per variable: (|layer| + |entries|) * |D_i|."""
        return [
            (len(layers.nodes_by_var[i]) + len(layers.entries[i])) * self.sizes[i]
            for i in range(self.layout.n)
        ]


def engine_for(space: CompiledSpace, store: BddStore | None = None) -> DomainEngine:
    """Engine over a compiled space; pass an overlay store to cover restricted
    roots that live outside the frozen base."""
    return DomainEngine(
        store if store is not None else space.store,
        space.layout,
        space.model.domain_sizes(),
    )


def valid_domains(space: CompiledSpace, root: NodeId | None = None) -> list[set[int]]:
    """One-shot valid domains for a root of a compiled space."""
    return engine_for(space).valid_domains(space.root if root is None else root)
