"""Cut enumeration against a naive recursive oracle.

The oracle recomputes the cut semantics from the definition: the cut set
of a gate is every union of one choice per fanin, where a choice is the
fanin net itself or, for non-terminal fanins, any cut of its driver;
unions over k leaves are discarded. It recurses top-down from the root
over plain frozensets with no caps, no streaming, and no volume math, so
it shares nothing with the production enumerator but the definition.
"""

import functools
import random

import pytest

from cutsig.benchgen import generate
from cutsig.cuts import (
    Cut,
    CutConfig,
    CutEnumerator,
    enumerate_cuts,
    enumerate_design,
    select_top_cuts,
)
from cutsig.netlist import CONST_KINDS, GateGraph, GraphBuilder, parse_bench


def oracle_cut_sets(g: GateGraph, root: int, k: int) -> set[frozenset[int]]:
    """All k-feasible leaf sets of ``root``, from the definition."""
    n_in = g.n_inputs
    driver = {n_in + j: j for j in range(g.n_gates)}

    def terminal(net: int) -> bool:
        j = driver.get(net)
        if j is None:
            return True
        gate = g.gates[j]
        return gate.kind in CONST_KINDS or gate.name in g.lock_gates

    @functools.cache
    def cuts_of_gate(j: int) -> frozenset[frozenset[int]]:
        partial = {frozenset()}
        for f in g.gates[j].fanins:
            choices = [frozenset({f})]
            if not terminal(f):
                choices.extend(cuts_of_gate(driver[f]))
            partial = {base | c
                       for base in partial
                       for c in choices
                       if len(base | c) <= k}
        return frozenset(partial)

    return set(cuts_of_gate(root))


def mask_sets(g: GateGraph, root: int, k: int) -> set[frozenset[int]]:
    cfg = CutConfig(k=k, max_search=10**9)
    out = set()
    for m in CutEnumerator(g, cfg).cut_masks(root):
        leaves = set()
        while m:
            low = m & -m
            leaves.add(low.bit_length() - 1)
            m ^= low
        out.add(frozenset(leaves))
    return out


def random_reconvergent(rng: random.Random, n_in=5, n_gates=36) -> GateGraph:
    """Dense sharing plus NOT/BUF chains, the hard case for enumeration."""
    b = GraphBuilder()
    pool = [b.add_input(f"i{i}") for i in range(n_in)]
    for j in range(n_gates):
        r = rng.random()
        if r < 0.2:
            b.add_gate(f"g{j}", rng.choice(["NOT", "BUF"]), [rng.choice(pool)])
        else:
            # bias toward recently created nets to force reconvergence
            x = pool[-rng.randint(1, min(6, len(pool)))]
            y = rng.choice(pool)
            b.add_gate(f"g{j}", rng.choice(["AND", "OR", "XOR", "NAND"]), [x, y])
        pool.append(f"g{j}")
    b.outputs = pool[-3:]
    return b.build()


def test_oracle_equivalence_random_graphs():
    rng = random.Random(61)
    for trial in range(12):
        g = random_reconvergent(rng)
        enum = CutEnumerator(g, CutConfig(k=4, max_search=10**9))
        for k in (3, 4):
            for root in CutEnumerator(g, CutConfig(k=k)).roots():
                assert mask_sets(g, root, k) == oracle_cut_sets(g, root, k), \
                    (trial, k, g.gates[root].name)


def test_oracle_equivalence_c17():
    g = generate("c17")
    for k in (2, 3, 4):
        for root in CutEnumerator(g, CutConfig(k=k)).roots():
            assert mask_sets(g, root, k) == oracle_cut_sets(g, root, k)


def test_merge_finds_collapsed_union():
    # both fanin cones sit on the same two nets: the only way to reach the
    # 2-leaf cut is through per-fanin choices that overlap entirely
    g = parse_bench(
        "INPUT(x1)\nINPUT(x2)\nOUTPUT(r)\n"
        "a = AND(x1, x2)\n"
        "b = OR(x1, x2)\n"
        "r = AND(a, b)\n"
    )
    sets = mask_sets(g, 2, 2)
    x1, x2, a, b = (g.net_id(n) for n in ("x1", "x2", "a", "b"))
    assert sets == {frozenset({a, b}), frozenset({x1, x2})}


def test_merge_keeps_shadowed_leaf_union():
    # choice {u,v} for fanin a unions with choice {u,a} for fanin b; the
    # result keeps v even though leaf a cuts off the only path to it
    g = parse_bench(
        "INPUT(u)\nINPUT(v)\nOUTPUT(r)\n"
        "a = AND(u, v)\n"
        "b = AND(u, a)\n"
        "r = AND(a, b)\n"
    )
    u, v, a, b = (g.net_id(n) for n in ("u", "v", "a", "b"))
    sets = mask_sets(g, 2, 3)
    assert frozenset({u, v, a}) in sets
    assert sets == oracle_cut_sets(g, 2, 3)


def test_cut_interior_and_volume():
    g = parse_bench(
        "INPUT(p)\nINPUT(q)\nINPUT(s)\nOUTPUT(y)\n"
        "t = AND(p, q)\n"
        "n = NOT(t)\n"
        "y = OR(n, s)\n"
    )
    cuts = enumerate_cuts(g, 2, CutConfig(k=3))
    by_leaves = {c.leaves: c for c in cuts}
    p, q, s = g.net_id("p"), g.net_id("q"), g.net_id("s")
    full = by_leaves[(p, q, s)]
    # NOT is interior but contributes nothing to volume
    assert full.interior == {0, 1, 2}
    assert full.volume == 2
    trivial = by_leaves[(s, g.net_id("n"))]
    assert trivial.volume == 1


def test_select_top_cuts_order_and_determinism():
    cuts = [
        Cut(root=9, leaves=(1, 2), interior=frozenset({9}), volume=1),
        Cut(root=9, leaves=(0, 3), interior=frozenset({9, 5}), volume=2),
        Cut(root=9, leaves=(0, 2), interior=frozenset({9, 4}), volume=2),
    ]
    rng = random.Random(67)
    for _ in range(5):
        shuffled = cuts[:]
        rng.shuffle(shuffled)
        top = select_top_cuts(shuffled, CutConfig(k=4, n_select=5))
        assert [c.leaves for c in top] == [(0, 2), (0, 3), (1, 2)]
    top1 = select_top_cuts(cuts, CutConfig(k=4, n_select=1))
    assert len(top1) == 1 and top1[0].leaves == (0, 2)


def test_capped_enumeration_is_subset_and_deterministic():
    rng = random.Random(71)
    g = random_reconvergent(rng, n_in=6, n_gates=40)
    enum_full = CutEnumerator(g, CutConfig(k=4, max_search=10**9))
    enum_capped = CutEnumerator(g, CutConfig(k=4, max_search=40))
    enum_capped2 = CutEnumerator(g, CutConfig(k=4, max_search=40))
    for root in enum_full.roots():
        full = set(enum_full.cut_masks(root))
        capped = enum_capped.cut_masks(root)
        assert set(capped) <= full
        assert capped == enum_capped2.cut_masks(root)


def test_lock_gates_are_terminals():
    g = parse_bench(
        "INPUT(a)\nINPUT(b)\nINPUT(keyinput0)\nOUTPUT(y)\n"
        "t = AND(a, b)\n"
        "kx = XOR(t, keyinput0)\n"
        "y = OR(kx, a)\n"
        "# LOCKGATE kx\n"
    )
    enum = CutEnumerator(g, CutConfig(k=4))
    names = {g.gates[j].name for j in enum.roots()}
    assert names == {"t", "y"}
    kx_net = g.net_id("kx")
    for root in enum.roots():
        for cut in enum.cuts_of(root):
            assert all(g.gates[i].name != "kx" for i in cut.interior)
    # the lock gate's own net still serves as a leaf
    y_cuts = mask_sets(g, 2, 2)
    assert frozenset({kx_net, g.net_id("a")}) in y_cuts


def test_enumerate_design_matches_per_root_selection():
    rng = random.Random(73)
    g = random_reconvergent(rng)
    cfg = CutConfig(k=4, n_select=5)
    design = enumerate_design(g, cfg)
    enum = CutEnumerator(g, cfg)
    assert sorted(design) == sorted(enum.roots())
    for root in design:
        assert design[root] == select_top_cuts(enum.cuts_of(root), cfg)


def test_cut_config_validation():
    with pytest.raises(ValueError):
        CutConfig(k=1)
    with pytest.raises(ValueError):
        CutConfig(k=9)
    with pytest.raises(ValueError):
        CutConfig(max_search=0)
    with pytest.raises(ValueError):
        CutConfig(n_select=7)
