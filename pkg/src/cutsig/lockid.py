"""Lock-gate identification by functional template matching.

Starting from the key inputs, small cuts rooted in their fanout are
matched against per-scheme template functions (NPN classes with
leaf-binding constraints): a cut whose function falls in a template's
class and whose designated leaves bind to key inputs (or, for cascaded
templates, to already-labeled lock nets) has its whole interior labeled
as lock logic. Labeling runs to a fixpoint, so comparator trees that
reference keys only at their leaves are climbed one cell at a time.

Matching is functional rather than structural: a template constrains the
cut's NPN class plus which canonical variable positions must be fed by
key-bound leaves, which survives normalization-induced restructuring.

The Hamming-distance scheme needs one extra, position-based phase: its
strip-side predicate tree is hard-wired (no key anchors anywhere), so it
is recovered by mirroring the already-labeled restore tree around the
final pair of merge XORs. Those merge gates sit in the key fanout; the
strip cone behind them is the one place labeling reaches outside it,
and the recovery is deliberately conservative (the cone must be
dedicated to the merge, match the restore root's kind, and have a
restore-like gate count, else only the merge XORs are labeled).
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass

from .netlist import (
    BUF, CONST_KINDS, GateGraph, GraphBuilder, KeyRecord, NOT, XOR,
)
from .cuts import Cut, CutConfig, CutEnumerator
from .npn import NpnClass, TruthTable, cut_truth_table, npn_achieving, npn_canonical

BIND_KEY = "key"      # designated leaves must be key inputs
BIND_BOUND = "bound"  # key inputs or outputs of already-labeled gates

_NO_DEPTH_LIMIT = 1 << 30


@dataclass(frozen=True)
class LockTemplate:
    """One entry of a scheme's template database.

    ``cls`` is the canonical class of the template function;
    ``key_position_sets`` lists, for each way the defining function maps
    onto its canonical form, the canonical variable positions its
    key-designated leaves occupy. A cut matches when its function reaches
    the same canonical form under some transform that puts key-bound
    leaves onto one of those position sets. ``max_depth`` bounds how far
    from a key input (in gate levels) a matching root may sit.
    """

    scheme: str
    name: str
    cls: NpnClass
    arity: int
    key_position_sets: tuple[frozenset[int], ...]
    bind: str
    max_depth: int

    @property
    def min_keys(self) -> int:
        return min(len(s) for s in self.key_position_sets)

    @property
    def weights(self) -> frozenset[int]:
        """Truth-table one-counts compatible with this class (the count
        is preserved by input transforms and complemented by output
        negation, so it prunes candidates before canonicalization)."""
        w = self.cls.canonical.bits.bit_count()
        return frozenset({w, (1 << self.arity) - w})


@dataclass(frozen=True)
class LabelReport:
    """Labeling outcome; precision/recall are None without ground truth
    (or with an empty denominator)."""

    labeled_gates: tuple[str, ...]
    precision: float | None
    recall: float | None

    def to_json(self) -> str:
        obj = {
            "labeled_gates": list(self.labeled_gates),
            "n_labeled": len(self.labeled_gates),
            "precision": self.precision,
            "recall": self.recall,
        }
        return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _template(scheme: str, name: str, k: int, bits: int, key_leaves,
              bind: str, max_depth: int) -> LockTemplate:
    if not key_leaves:
        raise ValueError("template needs at least one key-bound leaf")
    if k > 6:
        raise ValueError("template arity is capped at 6")
    cls, tfs = npn_achieving(TruthTable(k, bits))
    possets = {frozenset(t.perm[j] for j in key_leaves) for t in tfs}
    ordered = tuple(sorted(possets, key=sorted))
    return LockTemplate(scheme, name, cls, k, ordered, bind, max_depth)


def _xor2_bits() -> int:
    return 0b0110


def _mux3_bits() -> int:
    # leaves (s, a, b): minterm bit 0 = s; f = a when s else b
    bits = 0
    for m in range(8):
        s, a, b = m & 1, (m >> 1) & 1, (m >> 2) & 1
        if (a if s else b):
            bits |= 1 << m
    return bits


def _lut2_bits() -> int:
    # leaves (k0, k1, k2, k3, a, b): f = k[2b + a]
    bits = 0
    for m in range(64):
        cfg = [(m >> i) & 1 for i in range(4)]
        a, b = (m >> 4) & 1, (m >> 5) & 1
        if cfg[2 * b + a]:
            bits |= 1 << m
    return bits


@functools.lru_cache(maxsize=None)
def builtin_templates(scheme: str) -> tuple[LockTemplate, ...]:
    """The template database for one locking scheme."""
    if scheme == "trll":
        return (_template("trll", "key-xor", 2, _xor2_bits(), (0,),
                          BIND_KEY, 2),)
    if scheme == "mux":
        return (_template("mux", "key-mux", 3, _mux3_bits(), (0,),
                          BIND_KEY, 4),)
    if scheme == "lut":
        return (_template("lut", "lut-cell", 6, _lut2_bits(), (0, 1, 2, 3),
                          BIND_KEY, 6),)
    if scheme == "sfllhd":
        return (
            _template("sfllhd", "key-diff", 2, _xor2_bits(), (0,),
                      BIND_KEY, _NO_DEPTH_LIMIT),
            _template("sfllhd", "adder-xor", 2, 0b0110, (0, 1),
                      BIND_BOUND, _NO_DEPTH_LIMIT),
            _template("sfllhd", "adder-and", 2, 0b1000, (0, 1),
                      BIND_BOUND, _NO_DEPTH_LIMIT),
            _template("sfllhd", "adder-or", 2, 0b1110, (0, 1),
                      BIND_BOUND, _NO_DEPTH_LIMIT),
        )
    raise ValueError(f"unknown scheme '{scheme}'")


@functools.lru_cache(maxsize=8192)
def _achieving_cached(k: int, bits: int):
    return npn_achieving(TruthTable(k, bits))[1]


def _key_depths(g: GateGraph, key_nets: frozenset[int]) -> list[float]:
    """Per gate, 1 + shortest gate distance to a key input (inf outside
    the keys' transitive fanout)."""
    inf = float("inf")
    depth: list[float] = [inf] * g.n_gates
    for j in g.topo_order():
        d = inf
        for f in g.gates[j].fanins:
            if f in key_nets:
                d = min(d, 0.0)
            else:
                dj = g.gate_id_of_net(f)
                if dj is not None:
                    d = min(d, depth[dj])
        depth[j] = d + 1
    return depth


def _tfi_gids(g: GateGraph, gid: int) -> set[int]:
    seen = {gid}
    stack = [gid]
    while stack:
        for f in g.gates[stack.pop()].fanins:
            d = g.gate_id_of_net(f)
            if d is not None and d not in seen:
                seen.add(d)
                stack.append(d)
    return seen


def _escape_gids(g: GateGraph, blocked: int) -> set[int]:
    """Gates with some path to a primary output that avoids gate
    ``blocked``."""
    esc: set[int] = set()
    stack = []
    for o in g.outputs:
        d = g.gate_id_of_net(o)
        if d is not None and d != blocked and d not in esc:
            esc.add(d)
            stack.append(d)
    while stack:
        for f in g.gates[stack.pop()].fanins:
            d = g.gate_id_of_net(f)
            if d is not None and d != blocked and d not in esc:
                esc.add(d)
                stack.append(d)
    return esc


class _Labeler:
    def __init__(self, g: GateGraph, templates, key_nets: frozenset[int]):
        self.g = g
        self.templates = tuple(templates)
        self.key_nets = key_nets
        self.labeled: set[str] = set(g.lock_gates)
        arity = max((t.arity for t in self.templates), default=2)
        self.enum = CutEnumerator(g, CutConfig(k=max(2, arity)))
        self.depth = _key_depths(g, key_nets)
        self._cuts_cache: dict[int, list[Cut]] = {}

    def _keyish(self, net: int, bind: str) -> bool:
        if net in self.key_nets:
            return True
        if bind == BIND_BOUND:
            d = self.g.driver(net)
            return d is not None and d.name in self.labeled
        return False

    def _cuts(self, j: int) -> list[Cut]:
        cached = self._cuts_cache.get(j)
        if cached is None:
            # smallest interior first, so a match labels the minimal cone
            cached = sorted(
                self.enum.cuts_of(j),
                key=lambda c: (len(c.interior), c.volume, c.leaves))
            self._cuts_cache[j] = cached
        return cached

    def _match_root(self, j: int) -> frozenset[int] | None:
        """Smallest matching cut's interior for gate j, or None."""
        dj = self.depth[j]
        live = [t for t in self.templates if dj <= t.max_depth]
        if not live:
            return None
        for cut in self._cuts(j):
            k = len(cut.leaves)
            n_key = sum(1 for lf in cut.leaves
                        if self._keyish(lf, BIND_KEY))
            n_bound = sum(1 for lf in cut.leaves
                          if self._keyish(lf, BIND_BOUND))
            cand = [t for t in live if t.arity == k and t.min_keys <=
                    (n_key if t.bind == BIND_KEY else n_bound)]
            if not cand:
                continue
            tt = cut_truth_table(self.g, cut)
            ones = tt.bits.bit_count()
            cand = [t for t in cand if ones in t.weights]
            if not cand:
                continue
            canon = npn_canonical(tt)
            tfs = None
            for t in cand:
                if canon.canonical.bits != t.cls.canonical.bits:
                    continue
                if tfs is None:
                    tfs = _achieving_cached(tt.k, tt.bits)
                for tr in tfs:
                    kpos = {tr.perm[i] for i, lf in enumerate(cut.leaves)
                            if self._keyish(lf, t.bind)}
                    if any(s <= kpos for s in t.key_position_sets):
                        return cut.interior
        return None

    def forward_fixpoint(self) -> None:
        n_in = self.g.n_inputs
        order = self.g.topo_order()
        while True:
            changed = False
            for j in order:
                gate = self.g.gates[j]
                if (gate.name in self.labeled or gate.kind in (BUF, NOT)
                        or gate.kind in CONST_KINDS):
                    continue
                if self.depth[j] == float("inf"):
                    continue
                interior = self._match_root(j)
                if interior is not None:
                    for gid in interior:
                        name = self.g.gates[gid].name
                        if name not in self.labeled:
                            self.labeled.add(name)
                            changed = True
            if not changed:
                return

    def strip_recovery(self) -> bool:
        """Mirror-based recovery of hard-wired strip predicates.

        For each primary output driven by an unlabeled XOR with exactly
        one labeled fanin (the restore predicate) and one unlabeled XOR
        fanin (the strip merge), label the two merge XORs; then label the
        strip cone behind the merge when exactly one side looks like the
        restore tree's key-free mirror image.
        """
        g = self.g
        key_size = len(self.key_nets)
        added = False
        for o in g.outputs:
            outer_id = g.gate_id_of_net(o)
            if outer_id is None:
                continue
            outer = g.gates[outer_id]
            if (outer.name in self.labeled or outer.kind != XOR
                    or len(outer.fanins) != 2):
                continue
            lab = [f for f in outer.fanins if self._keyish(f, BIND_BOUND)
                   and f not in self.key_nets]
            unl = [f for f in outer.fanins if not self._keyish(f, BIND_BOUND)]
            if len(lab) != 1 or len(unl) != 1:
                continue
            r_id = g.gate_id_of_net(lab[0])
            inner_id = g.gate_id_of_net(unl[0])
            if r_id is None or inner_id is None:
                continue
            inner = g.gates[inner_id]
            if inner.kind != XOR or len(inner.fanins) != 2:
                continue
            self.labeled.add(outer.name)
            self.labeled.add(inner.name)
            added = True

            n_restore = sum(1 for gid in _tfi_gids(g, r_id)
                            if g.gates[gid].name in self.labeled)
            r_kind = g.gates[r_id].kind
            escape = _escape_gids(g, inner_id)
            sides = []
            for f in inner.fanins:
                sid = g.gate_id_of_net(f)
                if sid is None or g.gates[sid].kind != r_kind:
                    continue
                if g.gates[sid].name in self.labeled:
                    continue
                cone = _tfi_gids(g, sid)
                if any(fn in self.key_nets for gid in cone
                       for fn in g.gates[gid].fanins):
                    continue
                body = {gid for gid in cone if gid not in escape
                        and g.gates[gid].name not in self.labeled}
                if n_restore - 2 * key_size <= len(body) <= n_restore:
                    sides.append(body)
            if len(sides) == 1:
                for gid in sides[0]:
                    self.labeled.add(g.gates[gid].name)
        return added


def label_lock_gates(g: GateGraph, templates, key_inputs=None,
                     record: KeyRecord | None = None
                     ) -> tuple[GateGraph, LabelReport]:
    """Label lock gates in ``g`` and report against optional ground truth.

    ``key_inputs`` overrides the graph's flagged key inputs. Existing
    lock marks are honored as a starting point, which makes relabeling an
    already-labeled graph a no-op. The returned graph is ``g`` with the
    found labels added (structure untouched).
    """
    names = tuple(key_inputs) if key_inputs is not None else g.key_inputs
    key_nets = frozenset(g.net_id(n) for n in names)
    templates = tuple(templates)
    if key_nets and templates:
        lab = _Labeler(g, templates, key_nets)
        lab.forward_fixpoint()
        if any(t.scheme == "sfllhd" for t in templates):
            while lab.strip_recovery():
                lab.forward_fixpoint()
        labeled = lab.labeled
    else:
        labeled = set(g.lock_gates)

    b = GraphBuilder.from_graph(g)
    for name in sorted(labeled):
        b.mark_lock(name)
    out = b.build()

    precision = recall = None
    if record is not None:
        truth = set(record.lock_gates)
        hit = len(labeled & truth)
        if labeled:
            precision = hit / len(labeled)
        if truth:
            recall = hit / len(truth)
    report = LabelReport(tuple(sorted(labeled)), precision, recall)
    return out, report


def strip_lock_marks(g: GateGraph) -> GateGraph:
    """The same graph with all lock labels removed (the attacker's view
    of a freshly locked design)."""
    return GateGraph(
        g.inputs,
        [(gt.name, gt.kind, tuple(g.net_name(f) for f in gt.fanins))
         for gt in g.gates],
        g.output_names,
        key_inputs=g.key_inputs,
        lock_gates=(),
    )
