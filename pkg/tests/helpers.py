"""Shared brute-force helpers kept independent of the code paths they check."""

from __future__ import annotations

import itertools

from vdconf.bdd import TERM1, BddStore, NodeId


def eval_node(store: BddStore, root: NodeId, bits: tuple[int, ...]) -> bool:
    """Evaluate a BDD the slow way: walk the chosen branch at every node."""
    u = root
    while not store.is_terminal(u):
        var, low, high = store.node(u)
        u = high if bits[var] else low
    return u == TERM1


def brute_sat_count(store: BddStore, root: NodeId) -> int:
    return sum(
        1
        for bits in itertools.product((0, 1), repeat=store.num_bool_vars)
        if eval_node(store, root, bits)
    )


def brute_value_domains(
    store: BddStore, root: NodeId, layout, sizes
) -> list[set[int]]:
    """Per-variable valid values by enumerating every Boolean assignment."""
    domains: list[set[int]] = [set() for _ in sizes]
    for bits in itertools.product((0, 1), repeat=store.num_bool_vars):
        if not eval_node(store, root, bits):
            continue
        for i, size in enumerate(sizes):
            value = 0
            for j in range(layout.k[i]):
                value = (value << 1) | bits[layout.offset[i] + j]
            if value < size:
                domains[i].add(value)
    return domains
