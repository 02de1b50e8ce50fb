"""k-feasible cut enumeration over gate graphs.

A cut of a root gate is a set of nets (leaves) such that every path from
a primary input to the root crosses a leaf, together with the interior:
the gates on the root side of the leaves, reachable backward from the
root. Enumeration is the usual bottom-up merge: the cut set of a gate is
every union of one cut per fanin that stays within k leaves, where a
fanin contributes either itself (as a leaf) or any cut of its driver.
Primary inputs, constants, and lock-labeled gates are terminals: they
only ever appear as leaves. BUF and NOT gates are expanded through like
any other driver but count nothing toward a cut's volume (the number of
non-BUF/NOT interior gates).

Completeness of the merge (before capping): any k-feasible cut L of a
root restricts, on each fanin, to the leaves backward-reachable from that
fanin stopping at L. That restriction is itself a k-feasible cut of the
fanin (a path into the fanin that crossed L only above the fanin would
have to cross at the fanin's own net, making the fanin a leaf), so L is
one of the merged unions. The per-root search cap counts every examined
fanin-cut combination, feasible or not, which bounds the work a
pathological root can consume; capped enumeration is still deterministic.

Leaf sets are bitmask ints over net ids. Design-wide enumeration streams
in topological order and drops a node's mask list once its last consumer
has merged, keeping memory proportional to the live band of the graph
rather than the whole design.
"""

from __future__ import annotations

from dataclasses import dataclass

from .netlist import BUF, CONST_KINDS, NOT, GateGraph


@dataclass(frozen=True)
class CutConfig:
    """k: max leaves (2..8); max_search: merge candidates examined per
    root; n_select: cuts kept per root by select_top_cuts."""

    k: int = 4
    max_search: int = 10000
    n_select: int = 10

    def __post_init__(self):
        if not 2 <= self.k <= 8:
            raise ValueError("cut size k must be in 2..8")
        if self.max_search < 1:
            raise ValueError("max_search must be positive")
        if self.n_select not in (1, 5, 10, 20):
            raise ValueError("n_select must be one of 1, 5, 10, 20")


@dataclass(frozen=True)
class Cut:
    """root: gate id; leaves: net ids ascending; interior: gate ids on the
    root side of the leaves (always includes the root); volume: interior
    gates that are not BUF/NOT."""

    root: int
    leaves: tuple[int, ...]
    interior: frozenset[int]
    volume: int


class CutEnumerator:
    """Shared per-design state for cut enumeration."""

    def __init__(self, g: GateGraph, config: CutConfig):
        self.g = g
        self.config = config
        n_in = g.n_inputs
        self._driver = [-1] * g.n_nets
        self._terminal = [True] * g.n_nets
        self._nonvol = [False] * g.n_gates
        for j, gate in enumerate(g.gates):
            net = n_in + j
            self._driver[net] = j
            self._nonvol[j] = gate.kind in (BUF, NOT)
            self._terminal[net] = (gate.kind in CONST_KINDS
                                   or gate.name in g.lock_gates)
        self._memo: list[list[int] | None] | None = None

    def _node_masks(self, j: int, memo) -> list[int]:
        """Merge the fanin cut sets of gate j under the k and cap limits."""
        g = self.g
        k = self.config.k
        cap = self.config.max_search
        gate = g.gates[j]
        if self._terminal[g.n_inputs + j]:
            return []
        option_lists = []
        for f in gate.fanins:
            opts = [1 << f]
            if not self._terminal[f]:
                d = self._driver[f]
                if d >= 0:
                    opts.extend(memo[d])
            option_lists.append(opts)
        if not option_lists:
            return []
        examined = 0
        partial = [0]
        for opts in option_lists:
            nxt: dict[int, None] = {}
            stop = False
            for base in partial:
                for m in opts:
                    examined += 1
                    if examined > cap:
                        stop = True
                        break
                    mm = base | m
                    if mm.bit_count() <= k and mm not in nxt:
                        nxt[mm] = None
                if stop:
                    break
            partial = list(nxt)
            if stop:
                break
        return partial

    def _compute_all(self):
        if self._memo is None:
            memo: list[list[int] | None] = [None] * self.g.n_gates
            for j in self.g.topo_order():
                memo[j] = self._node_masks(j, memo)
            self._memo = memo
        return self._memo

    def cut_masks(self, root: int) -> list[int]:
        """Leaf bitmasks of the root's cuts, in discovery order."""
        memo = self._compute_all()
        return list(memo[root])

    def interior_of(self, root: int, leafmask: int) -> frozenset[int]:
        """Gates backward-reachable from the root, stopping at leaves."""
        g = self.g
        seen = {root}
        stack = [root]
        while stack:
            gate = g.gates[stack.pop()]
            for f in gate.fanins:
                if (leafmask >> f) & 1:
                    continue
                d = self._driver[f]
                if d >= 0 and d not in seen:
                    seen.add(d)
                    stack.append(d)
        return frozenset(seen)

    def materialize(self, root: int, leafmask: int) -> Cut:
        interior = self.interior_of(root, leafmask)
        volume = sum(1 for gid in interior if not self._nonvol[gid])
        leaves = []
        m = leafmask
        while m:
            low = m & -m
            leaves.append(low.bit_length() - 1)
            m ^= low
        return Cut(root, tuple(leaves), interior, volume)

    def cuts_of(self, root: int) -> list[Cut]:
        return [self.materialize(root, m) for m in self.cut_masks(root)]

    def is_root(self, j: int) -> bool:
        gate = self.g.gates[j]
        return (gate.kind not in (BUF, NOT)
                and gate.kind not in CONST_KINDS
                and gate.name not in self.g.lock_gates)

    def roots(self) -> list[int]:
        """Gate ids cuts are reported for: everything except lock gates,
        BUF/NOT pass-throughs, and constants."""
        return [j for j in range(self.g.n_gates) if self.is_root(j)]

    def iter_selected(self):
        """Yield (root, top cuts) in topological order, streaming.

        Equivalent to select_top_cuts over cuts_of for every root, but a
        node's mask list is freed as soon as its last consumer has merged,
        so design-wide enumeration does not hold every cut set at once.
        """
        g = self.g
        n_in = g.n_inputs
        fanouts = g.fanouts()
        remaining = [len(fanouts[n_in + j]) for j in range(g.n_gates)]
        memo: list[list[int] | None] = [None] * g.n_gates
        for j in g.topo_order():
            memo[j] = self._node_masks(j, memo)
            if self.is_root(j):
                cuts = [self.materialize(j, m) for m in memo[j]]
                yield j, select_top_cuts(cuts, self.config)
            for f in g.gates[j].fanins:
                d = self._driver[f]
                if d >= 0:
                    remaining[d] -= 1
                    if remaining[d] == 0:
                        memo[d] = None
            if remaining[j] == 0:
                memo[j] = None


def enumerate_cuts(g: GateGraph, root: int, config: CutConfig) -> list[Cut]:
    """All (capped) cuts of one root gate, in discovery order."""
    return CutEnumerator(g, config).cuts_of(root)


def select_top_cuts(cuts: list[Cut], config: CutConfig) -> list[Cut]:
    """The n_select best cuts: volume descending, then leaf set ascending
    lexicographically."""
    return sorted(cuts, key=lambda c: (-c.volume, c.leaves))[:config.n_select]


def enumerate_design(g: GateGraph, config: CutConfig,
                     enumerator: CutEnumerator | None = None) -> dict[int, list[Cut]]:
    """Selected top cuts for every root in the design, keyed by gate id."""
    enum = enumerator if enumerator is not None else CutEnumerator(g, config)
    return dict(enum.iter_selected())


def cuts_debug_rows(g: GateGraph, selected: dict[int, list[Cut]]) -> list[str]:
    """CSV rows (root, leaves, interior, volume) with names, for debugging."""
    rows = ["root,leaves,interior,volume"]
    for root in sorted(selected):
        for c in selected[root]:
            leaves = " ".join(g.net_name(x) for x in c.leaves)
            interior = " ".join(g.gates[i].name for i in sorted(c.interior))
            rows.append(f"{g.gates[root].name},{leaves},{interior},{c.volume}")
    return rows
