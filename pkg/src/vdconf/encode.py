"""Log-encoding of finite domains into Boolean variables, and compilation.

Each finite variable i gets a block of ceil(log2 |D_i|) Boolean variables
(one when |D_i| = 1), most significant bit first, blocks laid out in model
declaration order. Domain constraints forbid the bit patterns that decode to
values outside the domain, so satisfying assignments of the compiled space
correspond one-to-one to valid configurations.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bdd import TERM0, TERM1, BddStore, NodeId, compact, serialize_store, deserialize_store
from .model import ConfigModel, Formula, Atom, Not, And, Or, Implies, Iff, ModelError
from . import model as model_mod


class EncodeError(Exception):
    pass


def bits_for(size: int) -> int:
    """Boolean variables needed for a domain of the given size; 1 when size is 1."""
    return max(1, (size - 1).bit_length())


def enc(j: int, kbits: int) -> tuple[int, ...]:
    """MSB-first binary encoding of j into kbits bits."""
    if not 0 <= j < (1 << kbits):
        raise EncodeError(f"value {j} does not fit in {kbits} bits")
    return tuple((j >> (kbits - 1 - b)) & 1 for b in range(kbits))


def dec(bits: tuple[int, ...] | list[int]) -> int:
    """Integer value of MSB-first bits; inverse of enc on its range."""
    if not bits:
        raise EncodeError("dec needs at least one bit")
    value = 0
    for b in bits:
        value = (value << 1) | (1 if b else 0)
    return value


@dataclass(frozen=True)
class BoolLayout:
    """Block layout mapping finite variables to Boolean variable indexes."""

    n: int
    k: tuple[int, ...]
    offset: tuple[int, ...]
    num_bool_vars: int
    _var1: tuple[int, ...]
    _var2: tuple[int, ...]

    @classmethod
    def for_sizes(cls, sizes: tuple[int, ...]) -> "BoolLayout":
        k = tuple(bits_for(s) for s in sizes)
        offset = []
        total = 0
        for ki in k:
            offset.append(total)
            total += ki
        var1 = tuple(i for i, ki in enumerate(k) for _ in range(ki))
        var2 = tuple(j for ki in k for j in range(ki))
        return cls(len(sizes), k, tuple(offset), total, var1, var2)

    @classmethod
    def for_model(cls, model: ConfigModel) -> "BoolLayout":
        return cls.for_sizes(model.domain_sizes())

    def var1(self, bool_index: int) -> int:
        """Finite variable owning a Boolean index; num_bool_vars maps to n."""
        if bool_index == self.num_bool_vars:
            return self.n
        return self._var1[bool_index]

    def var2(self, bool_index: int) -> int:
        """Bit position of a Boolean index within its block."""
        if bool_index == self.num_bool_vars:
            return 0
        return self._var2[bool_index]


@dataclass
class CompiledSpace:
    """A compiled solution space: frozen store, layout, and the root of Sol."""

    model: ConfigModel
    layout: BoolLayout
    store: BddStore
    root: NodeId

    def solution_count(self) -> int:
        return self.store.sat_count(self.root)


def atom_bdd(store: BddStore, layout: BoolLayout, i: int, v: int) -> NodeId:
    """BDD true exactly where block i spells enc(v); the single-path chain."""
    ki = layout.k[i]
    if not 0 <= v < (1 << ki):
        raise EncodeError(f"value {v} does not fit block {i}")
    bits = enc(v, ki)
    acc = TERM1
    for j in reversed(range(ki)):
        var = layout.offset[i] + j
        if bits[j]:
            acc = store.mk_node(var, TERM0, acc)
        else:
            acc = store.mk_node(var, acc, TERM0)
    return acc


def domain_constraint_bdd(
    store: BddStore, layout: BoolLayout, i: int, size: int
) -> NodeId:
    """BDD of dec(block i) < size; TERM1 when size fills the block."""
    ki = layout.k[i]
    if size >= (1 << ki):
        return TERM1
    # Build "bits <= enc(size-1)" bottom-up from the least significant bit.
    limit = enc(size - 1, ki)
    acc = TERM1
    for j in reversed(range(ki)):
        var = layout.offset[i] + j
        if limit[j]:
            acc = store.mk_node(var, TERM1, acc)
        else:
            acc = store.mk_node(var, acc, TERM0)
    return acc


def formula_bdd(store: BddStore, layout: BoolLayout, f: Formula) -> NodeId:
    if isinstance(f, Atom):
        return atom_bdd(store, layout, f.var, f.value)
    if isinstance(f, Not):
        return store.negate(formula_bdd(store, layout, f.operand))
    if isinstance(f, And):
        return store.apply(
            "and", formula_bdd(store, layout, f.left), formula_bdd(store, layout, f.right)
        )
    if isinstance(f, Or):
        return store.apply(
            "or", formula_bdd(store, layout, f.left), formula_bdd(store, layout, f.right)
        )
    if isinstance(f, Implies):
        return store.apply(
            "imp", formula_bdd(store, layout, f.left), formula_bdd(store, layout, f.right)
        )
    if isinstance(f, Iff):
        return store.apply(
            "iff", formula_bdd(store, layout, f.left), formula_bdd(store, layout, f.right)
        )
    raise ModelError(f"not a formula node: {f!r}")


def compile_model(model: ConfigModel) -> CompiledSpace:
    """Compile the full solution space into a frozen, compacted store.

    The root conjoins every rule BDD with every domain constraint. Folding
    is balanced over parts sorted by size (small intermediates first); the
    final compaction renumbers nodes structurally, so the resulting root id
    does not depend on rule order.
    """
    layout = BoolLayout.for_model(model)
    work = BddStore(layout.num_bool_vars)
    parts = [formula_bdd(work, layout, rule) for rule in model.rules]
    for i, v in enumerate(model.variables):
        parts.append(domain_constraint_bdd(work, layout, i, v.domain.size))
    parts.sort(key=lambda u: (len(work.reachable_nodes([u])), u))
    if not parts:
        parts = [TERM1]
    while len(parts) > 1:
        merged = [
            work.apply("and", parts[at], parts[at + 1])
            if at + 1 < len(parts)
            else parts[at]
            for at in range(0, len(parts), 2)
        ]
        parts = merged
    store, (root,) = compact(work, [parts[0]])
    store.freeze()
    return CompiledSpace(model, layout, store, root)


def restrict_value(
    store: BddStore, layout: BoolLayout, root: NodeId, i: int, v: int, size: int
) -> NodeId:
    """Root with finite variable i pinned to v: conjoin the encoding chain.

    The result still tests block i along the single path enc(v), so its
    sat_count is exactly the number of solutions taking x_i = v.
    """
    if not 0 <= v < size:
        raise EncodeError(f"value {v} out of domain for variable {i}")
    return store.apply("and", root, atom_bdd(store, layout, i, v))


# ---------------------------------------------------------------------------
# Compiled artifact file: store dump + layout header + root + embedded model.

def write_artifact(space: CompiledSpace) -> str:
    lines = [serialize_store(space.store).rstrip("\n")]
    lines.append("layout " + " ".join(str(x) for x in (space.layout.n, *space.layout.k)))
    lines.append(f"root {space.root}")
    lines.append("model " + model_mod.serialize_model(space.model))
    return "\n".join(lines) + "\n"


def read_artifact(text: str) -> CompiledSpace:
    store_lines = []
    layout_line = None
    root_line = None
    model_line = None
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("layout "):
            layout_line = stripped
        elif stripped.startswith("root "):
            root_line = stripped
        elif stripped.startswith("model "):
            model_line = stripped
        else:
            store_lines.append(stripped)
    if layout_line is None or root_line is None or model_line is None:
        raise EncodeError("artifact is missing a layout, root, or model section")
    store = deserialize_store("\n".join(store_lines) + "\n")
    model = model_mod.parse_model(model_line[len("model "):])
    layout = BoolLayout.for_model(model)
    declared = tuple(int(x) for x in layout_line.split()[1:])
    if declared != (layout.n, *layout.k):
        raise EncodeError(
            f"artifact layout {declared} does not match the embedded model"
        )
    if layout.num_bool_vars != store.num_bool_vars:
        raise EncodeError("artifact store variable count does not match the layout")
    try:
        root = int(root_line.split()[1])
    except (IndexError, ValueError):
        raise EncodeError(f"bad root line {root_line!r}") from None
    if not 0 <= root < len(store):
        raise EncodeError(f"artifact root {root} is not a valid node")
    store.freeze()
    return CompiledSpace(model, layout, store, root)
