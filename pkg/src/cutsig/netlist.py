"""Gate-level netlist model with ISCAS-style bench I/O.

Combinational gate graphs over a small cell library: 2- to 16-input
AND/NAND/OR/NOR/XOR/XNOR, 1-input BUF/NOT, 3-input MUX2 (select, then,
else), and fanin-free CONST0/CONST1. Nets are identified by name;
internally every net gets a dense integer id (primary inputs first, then
one per gate output) so passes can work with flat arrays and bitmasks.

Bench format accepted here is the usual line-oriented one::

    # comment
    INPUT(a)
    OUTPUT(y)
    y = NAND(a, b)

plus one extension: a comment line ``# LOCKGATE <name>`` marks gate
<name> as lock logic, and such marks survive a parse/write round trip.
"""

from __future__ import annotations

import heapq
import json
import re
from dataclasses import dataclass

AND = "AND"
NAND = "NAND"
OR = "OR"
NOR = "NOR"
XOR = "XOR"
XNOR = "XNOR"
BUF = "BUF"
NOT = "NOT"
MUX2 = "MUX2"
CONST0 = "CONST0"
CONST1 = "CONST1"

BINARY_KINDS = frozenset((AND, NAND, OR, NOR, XOR, XNOR))
UNARY_KINDS = frozenset((BUF, NOT))
CONST_KINDS = frozenset((CONST0, CONST1))
GATE_KINDS = BINARY_KINDS | UNARY_KINDS | CONST_KINDS | {MUX2}

MAX_FANIN = 16

_KIND_ALIASES = {"BUFF": BUF, "INV": NOT}

DEFAULT_KEY_PREFIX = "keyinput"


class BenchError(ValueError):
    """Raised for malformed bench text or structurally invalid graphs."""


@dataclass(frozen=True)
class Gate:
    """One gate instance. ``fanins`` are net ids, in declared order."""

    name: str
    kind: str
    fanins: tuple[int, ...]


class GateGraph:
    """Immutable combinational netlist.

    Net ids: primary input ``i`` is net ``i``; the output of ``gates[j]``
    is net ``n_inputs + j``. Names referenced but never declared are kept
    as driverless "dangling" nets (ids after all gate outputs) so that
    :func:`validate` can report them instead of construction failing.

    Parameters
    ----------
    inputs : iterable of str
        Primary input names, in order.
    gates : iterable of (name, kind, fanin-name iterable)
        Gate definitions, in order.
    outputs : iterable of str
        Primary output net names, in order.
    key_inputs : iterable of str
        Subset of ``inputs`` flagged as key inputs.
    lock_gates : iterable of str
        Subset of gate names flagged as lock logic.
    """

    def __init__(self, inputs, gates, outputs, key_inputs=(), lock_gates=()):
        self.inputs = tuple(inputs)
        name2net: dict[str, int] = {}
        for i, name in enumerate(self.inputs):
            if name in name2net:
                raise BenchError(f"duplicate definition of '{name}'")
            name2net[name] = i

        raw = [(name, kind, tuple(fanins)) for name, kind, fanins in gates]
        n_in = len(self.inputs)
        for j, (name, kind, _) in enumerate(raw):
            if name in name2net:
                raise BenchError(f"duplicate definition of '{name}'")
            if kind not in GATE_KINDS:
                raise BenchError(f"unknown gate kind '{kind}' for '{name}'")
            name2net[name] = n_in + j

        dangling: list[str] = []
        def resolve(ref: str) -> int:
            net = name2net.get(ref)
            if net is None:
                net = len(name2net)
                name2net[ref] = net
                dangling.append(ref)
            return net

        built = []
        for name, kind, fanins in raw:
            built.append(Gate(name, kind, tuple(resolve(f) for f in fanins)))
        # resolve() appends dangling nets after gate outputs, so freeze gates
        # only once all references have been seen
        self.gates = tuple(built)
        self.outputs = tuple(resolve(o) for o in outputs)
        self.dangling = tuple(dangling)
        self._name2net = name2net
        self._names = [None] * len(name2net)
        for name, net in name2net.items():
            self._names[net] = name

        self.key_inputs = tuple(k for k in self.inputs if k in set(key_inputs))
        for k in key_inputs:
            if k not in self.key_inputs:
                raise BenchError(f"key input '{k}' is not a primary input")
        self.lock_gates = frozenset(lock_gates)
        gate_names = {g.name for g in self.gates}
        for name in self.lock_gates:
            if name not in gate_names:
                raise BenchError(f"lock gate '{name}' is not a defined gate")

        self._topo: tuple[int, ...] | None = None
        self._fanouts: tuple[tuple[int, ...], ...] | None = None

    # ---- basic queries ----

    @property
    def n_inputs(self) -> int:
        return len(self.inputs)

    @property
    def n_gates(self) -> int:
        return len(self.gates)

    @property
    def n_nets(self) -> int:
        return len(self._names)

    def net_id(self, name: str) -> int:
        return self._name2net[name]

    def net_name(self, net: int) -> str:
        return self._names[net]

    @property
    def output_names(self) -> tuple[str, ...]:
        return tuple(self._names[o] for o in self.outputs)

    def is_input_net(self, net: int) -> bool:
        return net < len(self.inputs)

    def driver(self, net: int) -> Gate | None:
        """The gate driving ``net``, or None for PIs and dangling nets."""
        j = net - len(self.inputs)
        if 0 <= j < len(self.gates):
            return self.gates[j]
        return None

    def gate_id_of_net(self, net: int) -> int | None:
        j = net - len(self.inputs)
        return j if 0 <= j < len(self.gates) else None

    def gate_net(self, gate_id: int) -> int:
        return len(self.inputs) + gate_id

    def gate_by_name(self, name: str) -> Gate:
        g = self.driver(self._name2net[name])
        if g is None:
            raise KeyError(f"'{name}' is not a gate")
        return g

    def is_lock_gate_net(self, net: int) -> bool:
        g = self.driver(net)
        return g is not None and g.name in self.lock_gates

    def key_net_ids(self) -> frozenset[int]:
        return frozenset(self._name2net[k] for k in self.key_inputs)

    # ---- structure ----

    def fanouts(self) -> tuple[tuple[int, ...], ...]:
        """Per net id, the ids of gates consuming it."""
        if self._fanouts is None:
            outs: list[list[int]] = [[] for _ in range(self.n_nets)]
            for j, g in enumerate(self.gates):
                for f in g.fanins:
                    outs[f].append(j)
            self._fanouts = tuple(tuple(o) for o in outs)
        return self._fanouts

    def topo_order(self) -> tuple[int, ...]:
        """Gate ids in topological order (deterministic: id-ordered Kahn).

        Raises BenchError if the graph has a cycle.
        """
        if self._topo is not None:
            return self._topo
        n_in = len(self.inputs)
        indeg = []
        for g in self.gates:
            d = 0
            for f in g.fanins:
                j = f - n_in
                if 0 <= j < len(self.gates):
                    d += 1
            indeg.append(d)
        fanouts = self.fanouts()
        ready = [j for j, d in enumerate(indeg) if d == 0]
        heapq.heapify(ready)
        order: list[int] = []
        while ready:
            j = heapq.heappop(ready)
            order.append(j)
            for k in fanouts[n_in + j]:
                indeg[k] -= 1
                if indeg[k] == 0:
                    heapq.heappush(ready, k)
        if len(order) != len(self.gates):
            stuck = sorted(g.name for j, g in enumerate(self.gates) if indeg[j] > 0)
            raise BenchError(
                "cyclic graph (gates on or behind a cycle: %s)" % ", ".join(stuck[:8])
            )
        self._topo = tuple(order)
        return self._topo

    # ---- evaluation ----

    def simulate_nets(self, assignments, width: int = 1) -> list[int]:
        """Bit-parallel evaluation of every net.

        ``assignments`` maps each PI name to an int whose low ``width`` bits
        are that input's value across ``width`` parallel patterns. Returns a
        list indexed by net id.
        """
        mask = (1 << width) - 1
        vals = [0] * self.n_nets
        for name in self.inputs:
            try:
                vals[self._name2net[name]] = assignments[name] & mask
            except KeyError:
                raise BenchError(f"missing assignment for input '{name}'") from None
        if self.dangling:
            raise BenchError(
                f"cannot simulate: undeclared net '{self.dangling[0]}'"
            )
        n_in = len(self.inputs)
        for j in self.topo_order():
            g = self.gates[j]
            vals[n_in + j] = _eval_kind(g.kind, [vals[f] for f in g.fanins], mask)
        return vals

    def simulate(self, assignments, width: int = 1) -> dict[str, int]:
        """Evaluate and return {output name: value} (see simulate_nets)."""
        vals = self.simulate_nets(assignments, width)
        return {self._names[o]: vals[o] for o in self.outputs}


def _eval_kind(kind: str, v: list[int], mask: int) -> int:
    if kind == AND or kind == NAND:
        r = v[0]
        for x in v[1:]:
            r &= x
        return r if kind == AND else r ^ mask
    if kind == OR or kind == NOR:
        r = v[0]
        for x in v[1:]:
            r |= x
        return r if kind == OR else r ^ mask
    if kind == XOR or kind == XNOR:
        r = v[0]
        for x in v[1:]:
            r ^= x
        return r if kind == XOR else r ^ mask
    if kind == BUF:
        return v[0]
    if kind == NOT:
        return v[0] ^ mask
    if kind == MUX2:
        s, a, b = v
        return (s & a) | ((s ^ mask) & b)
    if kind == CONST0:
        return 0
    if kind == CONST1:
        return mask
    raise BenchError(f"unknown gate kind '{kind}'")


def validate(g: GateGraph) -> list[str]:
    """Structural diagnostics; an empty list means the graph is well formed.

    Checks: at least one primary output, no undeclared nets, per-kind fanin
    arity (binary kinds take 2..16 inputs), and acyclicity.
    """
    diags: list[str] = []
    if not g.outputs:
        diags.append("no primary outputs")
    for name in sorted(g.dangling):
        diags.append(f"reference to undeclared net '{name}'")
    for gate in g.gates:
        n = len(gate.fanins)
        if gate.kind in BINARY_KINDS:
            if not 2 <= n <= MAX_FANIN:
                diags.append(f"gate '{gate.name}': {gate.kind} with {n} fanins")
        elif gate.kind in UNARY_KINDS:
            if n != 1:
                diags.append(f"gate '{gate.name}': {gate.kind} with {n} fanins")
        elif gate.kind == MUX2:
            if n != 3:
                diags.append(f"gate '{gate.name}': MUX2 with {n} fanins")
        elif gate.kind in CONST_KINDS:
            if n != 0:
                diags.append(f"gate '{gate.name}': {gate.kind} with {n} fanins")
    try:
        g.topo_order()
    except BenchError as e:
        diags.append(str(e))
    return diags


_LINE_RE = re.compile(
    r"^(?:INPUT\s*\(\s*(?P<inp>[^\s(),=]+)\s*\)"
    r"|OUTPUT\s*\(\s*(?P<out>[^\s(),=]+)\s*\)"
    r"|(?P<name>[^\s(),=]+)\s*=\s*(?P<kind>[A-Za-z][A-Za-z0-9]*)\s*"
    r"\(\s*(?P<args>[^()]*?)\s*\))$"
)


def parse_bench(text: str, key_prefix: str = DEFAULT_KEY_PREFIX,
                key_inputs=None) -> GateGraph:
    """Parse bench text into a validated GateGraph.

    Key inputs are the PIs whose names start with ``key_prefix``, unless an
    explicit ``key_inputs`` name list is given. Raises BenchError on syntax
    errors, duplicate definitions, unknown gate kinds, references to
    undeclared nets, cycles, or a missing output declaration.
    """
    inputs: list[str] = []
    outputs: list[str] = []
    gates: list[tuple[str, str, list[str]]] = []
    lock_marks: list[str] = []
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("LOCKGATE"):
                parts = body.split()
                if len(parts) != 2:
                    raise BenchError(f"line {lineno}: malformed LOCKGATE comment")
                lock_marks.append(parts[1])
            continue
        m = _LINE_RE.match(line)
        if not m:
            raise BenchError(f"line {lineno}: cannot parse '{line}'")
        if m.group("inp"):
            inputs.append(m.group("inp"))
        elif m.group("out"):
            outputs.append(m.group("out"))
        else:
            kind = m.group("kind").upper()
            kind = _KIND_ALIASES.get(kind, kind)
            if kind not in GATE_KINDS:
                raise BenchError(
                    f"line {lineno}: unknown gate kind '{m.group('kind')}'")
            args = m.group("args")
            fanins = [a.strip() for a in args.split(",")] if args.strip() else []
            gates.append((m.group("name"), kind, fanins))

    if key_inputs is None:
        key_inputs = [n for n in inputs if n.startswith(key_prefix)]
    g = GateGraph(inputs, gates, outputs, key_inputs=key_inputs,
                  lock_gates=lock_marks)
    diags = validate(g)
    if diags:
        raise BenchError("; ".join(diags))
    return g


def write_bench(g: GateGraph) -> str:
    """Serialize to bench text: INPUTs, OUTPUTs, gates by id, lock marks."""
    lines = [f"INPUT({n})" for n in g.inputs]
    lines += [f"OUTPUT({n})" for n in g.output_names]
    for gate in g.gates:
        args = ", ".join(g.net_name(f) for f in gate.fanins)
        lines.append(f"{gate.name} = {gate.kind}({args})")
    for gate in g.gates:
        if gate.name in g.lock_gates:
            lines.append(f"# LOCKGATE {gate.name}")
    return "\n".join(lines) + "\n"


def load_bench(path, key_prefix: str = DEFAULT_KEY_PREFIX,
               key_inputs=None) -> GateGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_bench(fh.read(), key_prefix=key_prefix, key_inputs=key_inputs)


def save_bench(g: GateGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_bench(g))


def same_structure(a: GateGraph, b: GateGraph) -> bool:
    """True when two graphs are identical up to net-id numbering."""
    return (
        a.inputs == b.inputs
        and a.output_names == b.output_names
        and [(g.name, g.kind) for g in a.gates] == [(g.name, g.kind) for g in b.gates]
        and all(
            tuple(a.net_name(f) for f in ga.fanins)
            == tuple(b.net_name(f) for f in gb.fanins)
            for ga, gb in zip(a.gates, b.gates)
        )
        and a.key_inputs == b.key_inputs
        and a.lock_gates == b.lock_gates
    )


@dataclass
class KeyRecord:
    """The secret produced by a locking transform.

    ``key_bits[i]`` is the correct value of ``key_inputs[i]``; ``lock_gates``
    is the ground-truth list of gate names the transform added or rewired.
    """

    scheme: str
    key_inputs: list[str]
    key_bits: list[int]
    lock_gates: list[str]

    def key_assignment(self) -> dict[str, int]:
        return dict(zip(self.key_inputs, self.key_bits))

    def to_json(self) -> str:
        obj = {
            "scheme": self.scheme,
            "key_inputs": list(self.key_inputs),
            "key_bits": "".join(str(b) for b in self.key_bits),
            "lock_gates": list(self.lock_gates),
        }
        return json.dumps(obj, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "KeyRecord":
        obj = json.loads(text)
        bits = [int(c) for c in obj["key_bits"]]
        if any(b not in (0, 1) for b in bits):
            raise ValueError("key_bits must be a string of 0s and 1s")
        if len(bits) != len(obj["key_inputs"]):
            raise ValueError("key_bits length does not match key_inputs")
        return cls(
            scheme=obj["scheme"],
            key_inputs=list(obj["key_inputs"]),
            key_bits=bits,
            lock_gates=list(obj["lock_gates"]),
        )


def load_key(path) -> KeyRecord:
    with open(path, "r", encoding="utf-8") as fh:
        return KeyRecord.from_json(fh.read())


def save_key(rec: KeyRecord, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(rec.to_json())


class GraphBuilder:
    """Mutable staging area for building or rewriting a GateGraph by name."""

    def __init__(self):
        self.inputs: list[str] = []
        self.outputs: list[str] = []
        self.key_inputs: list[str] = []
        self._order: list[str] = []
        self._gates: dict[str, tuple[str, list[str]]] = {}
        self._lock: set[str] = set()
        self._taken: set[str] = set()

    @classmethod
    def from_graph(cls, g: GateGraph) -> "GraphBuilder":
        b = cls()
        for n in g.inputs:
            b.add_input(n)
        for gate in g.gates:
            b.add_gate(gate.name, gate.kind,
                       [g.net_name(f) for f in gate.fanins],
                       lock=gate.name in g.lock_gates)
        b.outputs = list(g.output_names)
        b.key_inputs = list(g.key_inputs)
        return b

    def add_input(self, name: str, key: bool = False) -> str:
        if name in self._taken:
            raise BenchError(f"duplicate definition of '{name}'")
        self._taken.add(name)
        self.inputs.append(name)
        if key:
            self.key_inputs.append(name)
        return name

    def add_gate(self, name: str, kind: str, fanins, lock: bool = False) -> str:
        if name in self._taken:
            raise BenchError(f"duplicate definition of '{name}'")
        self._taken.add(name)
        self._order.append(name)
        self._gates[name] = (kind, list(fanins))
        if lock:
            self._lock.add(name)
        return name

    def set_gate(self, name: str, kind: str, fanins) -> None:
        """Redefine an existing gate in place (order and lock flag kept)."""
        if name not in self._gates:
            raise KeyError(name)
        self._gates[name] = (kind, list(fanins))

    def gate(self, name: str) -> tuple[str, list[str]]:
        return self._gates[name]

    def has(self, name: str) -> bool:
        return name in self._taken

    def gate_names(self) -> list[str]:
        return list(self._order)

    def mark_lock(self, name: str) -> None:
        self._lock.add(name)

    def is_lock(self, name: str) -> bool:
        return name in self._lock

    def fresh(self, stem: str) -> str:
        """An unused name: the stem itself, else stem_2, stem_3, ..."""
        if stem not in self._taken:
            return stem
        i = 2
        while f"{stem}_{i}" in self._taken:
            i += 1
        return f"{stem}_{i}"

    def replace_net(self, old: str, new: str, skip=()) -> int:
        """Rewire every consumer of ``old`` (and POs) to ``new``.

        Gates named in ``skip`` keep their fanins. Returns the number of
        rewired references.
        """
        n = 0
        skipset = set(skip)
        for name in self._order:
            if name in skipset:
                continue
            kind, fanins = self._gates[name]
            if old in fanins:
                self._gates[name] = (kind, [new if f == old else f for f in fanins])
                n += fanins.count(old)
        for i, o in enumerate(self.outputs):
            if o == old:
                self.outputs[i] = new
                n += 1
        return n

    def remove_gate(self, name: str) -> None:
        self._gates.pop(name)
        self._order.remove(name)
        self._lock.discard(name)
        self._taken.discard(name)

    def build(self) -> GateGraph:
        gates = [(n, self._gates[n][0], self._gates[n][1]) for n in self._order]
        return GateGraph(self.inputs, gates, self.outputs,
                         key_inputs=self.key_inputs, lock_gates=self._lock)
