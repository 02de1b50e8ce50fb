"""Rewriting into 2-input normal form.

Three passes over a :class:`~cutsig.netlist.GateGraph`:

* :func:`decompose_to_2input` chains multi-input gates into 2-input ones
  (negation kept on the final stage) and expands MUX2 into AND/OR/NOT.
* :func:`fold_constants` propagates CONST0/CONST1 through Boolean
  identities, cancels double negation, collapses BUF chains, and sweeps
  gates left without a path to an output.
* :func:`strash` merges structurally identical gates (same kind, same
  fanins after sorting commutative operands by net id).

:func:`normalize` runs decomposition once, then folding and hashing to a
fixpoint. Lock labels and key-input flags ride through every pass: a
decomposed labeled gate yields labeled fragments, and a merge of a labeled
gate with an unlabeled one keeps the label.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
import json

from .netlist import (
    AND, BUF, BINARY_KINDS, CONST0, CONST1, CONST_KINDS, GateGraph,
    GraphBuilder, MUX2, NAND, NOR, NOT, OR, XNOR, XOR,
)

# final-stage kind for a decomposed chain; the negation, when the kind has
# one, must happen exactly once, at the last 2-input gate
_CHAIN_BASE = {AND: AND, NAND: AND, OR: OR, NOR: OR, XOR: XOR, XNOR: XOR}


@dataclass
class NormalizeReport:
    gates_before: int
    gates_after: int
    constants_folded: int
    strash_merges: int

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"


def decompose_to_2input(g: GateGraph) -> GateGraph:
    """Rewrite every gate to at most two inputs.

    An n-input gate becomes a left-associated chain, e.g.
    NAND(a,b,c,d) -> NAND(AND(AND(a,b),c),d), so intermediate stages use
    the plain kind and only the final stage inverts. MUX2(s,a,b) becomes
    OR(AND(s,a), AND(NOT(s),b)). The rewritten gate keeps its name (and
    so its net); fragments get fresh derived names.
    """
    taken = set(g.inputs) | {gt.name for gt in g.gates}

    def fresh(stem: str) -> str:
        if stem not in taken:
            taken.add(stem)
            return stem
        i = 2
        while f"{stem}_{i}" in taken:
            i += 1
        name = f"{stem}_{i}"
        taken.add(name)
        return name

    b = GraphBuilder()
    key_set = set(g.key_inputs)
    for n in g.inputs:
        b.add_input(n, key=n in key_set)
    for gate in g.gates:
        fans = [g.net_name(f) for f in gate.fanins]
        lock = gate.name in g.lock_gates
        if gate.kind == MUX2 and len(fans) == 3:
            s, a, bb = fans
            ns = b.add_gate(fresh(f"{gate.name}_ds"), NOT, [s], lock=lock)
            hi = b.add_gate(fresh(f"{gate.name}_d1"), AND, [s, a], lock=lock)
            lo = b.add_gate(fresh(f"{gate.name}_d0"), AND, [ns, bb], lock=lock)
            b.add_gate(gate.name, OR, [hi, lo], lock=lock)
        elif gate.kind in BINARY_KINDS and len(fans) > 2:
            base = _CHAIN_BASE[gate.kind]
            acc = fans[0]
            for i, nxt in enumerate(fans[1:-1]):
                acc = b.add_gate(fresh(f"{gate.name}_d{i}"), base, [acc, nxt],
                                 lock=lock)
            b.add_gate(gate.name, gate.kind, [acc, fans[-1]], lock=lock)
        else:
            b.add_gate(gate.name, gate.kind, fans, lock=lock)
    b.outputs = list(g.output_names)
    return b.build()


def fold_constants(g: GateGraph) -> tuple[GateGraph, int]:
    """Propagate constants and collapse trivial gates; returns (graph, folds).

    Identities applied per gate, in one topological sweep: constant
    operands of AND/NAND/OR/NOR/XOR/XNOR either fix the output or reduce
    the gate to a pass-through or a NOT; NOT(const) and BUF(const) fold;
    NOT(NOT(x)) cancels; BUF(x) collapses into x except when the BUF feeds
    a primary output directly from a primary input (that shape survives so
    an output-only buffer keeps its name). MUX2 with a constant select
    reduces to the chosen branch. Ends with a sweep of gates that no
    longer reach any primary output; the fold count includes them.
    """
    n_in = g.n_inputs
    po_names = set(g.output_names)
    pi_set = set(g.inputs)

    repl: dict[str, str] = {}
    const: dict[str, int] = {}
    kept_kind: dict[str, str] = {}
    kept_fans: dict[str, list[str]] = {}
    folds = 0

    def res(n: str) -> str:
        while n in repl:
            n = repl[n]
        return n

    order = [g.gates[j] for j in g.topo_order()]
    for gate in order:
        name, kind = gate.name, gate.kind
        fans = [res(g.net_name(f)) for f in gate.fanins]
        cv = [const.get(f) for f in fans]

        def keep(kd: str, fs: list[str]) -> None:
            kept_kind[name] = kd
            kept_fans[name] = fs

        def collapse_to(x: str) -> None:
            nonlocal folds
            folds += 1
            if name in po_names and x in pi_set:
                keep(BUF, [x])
            else:
                repl[name] = x

        def to_const(v: int) -> None:
            nonlocal folds
            folds += 1
            const[name] = v

        if kind == CONST0:
            to_const(0)
        elif kind == CONST1:
            to_const(1)
        elif kind == BUF:
            if cv[0] is not None:
                to_const(cv[0])
            elif name in po_names and fans[0] in pi_set:
                keep(BUF, fans)
            else:
                repl[name] = fans[0]
        elif kind == NOT:
            if cv[0] is not None:
                to_const(1 - cv[0])
            elif kept_kind.get(fans[0]) == NOT:
                repl[name] = kept_fans[fans[0]][0]
            else:
                keep(NOT, fans)
        elif kind == MUX2 and len(fans) == 3:
            s, a, bb = fans
            if cv[0] is not None:
                collapse_to(a if cv[0] else bb)
            elif cv[1] is not None and cv[2] is not None:
                # both branches constant: equal -> that constant; else the
                # mux is s or NOT(s)
                if cv[1] == cv[2]:
                    to_const(cv[1])
                elif cv[1] == 1:
                    collapse_to(s)
                else:
                    folds += 1
                    keep(NOT, [s])
                    continue
            else:
                keep(kind, fans)
        elif kind in BINARY_KINDS and len(fans) == 2:
            known = [(i, v) for i, v in enumerate(cv) if v is not None]
            if len(known) == 2:
                a, bb = cv
                if kind == AND:
                    to_const(a & bb)
                elif kind == NAND:
                    to_const(1 - (a & bb))
                elif kind == OR:
                    to_const(a | bb)
                elif kind == NOR:
                    to_const(1 - (a | bb))
                elif kind == XOR:
                    to_const(a ^ bb)
                else:
                    to_const(1 - (a ^ bb))
            elif len(known) == 1:
                ci, c = known[0]
                x = fans[1 - ci]
                if kind == AND:
                    if c:
                        collapse_to(x)
                    else:
                        to_const(0)
                elif kind == NAND:
                    if c:
                        folds += 1
                        keep(NOT, [x])
                    else:
                        to_const(1)
                elif kind == OR:
                    if c:
                        to_const(1)
                    else:
                        collapse_to(x)
                elif kind == NOR:
                    if c:
                        to_const(0)
                    else:
                        folds += 1
                        keep(NOT, [x])
                elif kind == XOR:
                    if c:
                        folds += 1
                        keep(NOT, [x])
                    else:
                        collapse_to(x)
                else:  # XNOR
                    if c:
                        collapse_to(x)
                    else:
                        folds += 1
                        keep(NOT, [x])
            else:
                keep(kind, fans)
        else:
            keep(kind, fans)

    # rebuild survivors in original order, then drop gates that lost their
    # path to an output
    out_names = []
    const_pos: list[tuple[int, str, int]] = []
    for i, o in enumerate(g.output_names):
        r = res(o)
        if r in const:
            const_pos.append((i, o, const[r]))
            out_names.append(o)
        else:
            out_names.append(r)

    live: set[str] = set()
    stack = [o for o in out_names if o in kept_fans]
    while stack:
        n = stack.pop()
        if n in live:
            continue
        live.add(n)
        for f in kept_fans[n]:
            if f in kept_fans and f not in live:
                stack.append(f)

    b = GraphBuilder()
    key_set = set(g.key_inputs)
    for n in g.inputs:
        b.add_input(n, key=n in key_set)
    dropped_dead = 0
    for gate in g.gates:
        name = gate.name
        if name in kept_kind:
            if name in live:
                b.add_gate(name, kept_kind[name], kept_fans[name],
                           lock=name in g.lock_gates)
            else:
                dropped_dead += 1
    for i, o, v in const_pos:
        # an output folded to a constant still needs a driver of that name
        if not b.has(o):
            b.add_gate(o, CONST1 if v else CONST0, [])
    b.outputs = out_names
    return b.build(), folds + dropped_dead


def strash(g: GateGraph) -> tuple[GateGraph, int]:
    """Merge structurally identical gates; returns (graph, merges).

    Two gates merge when they have the same kind and the same fanins,
    comparing commutative (all six binary kinds) operand lists sorted by
    net id. The first gate in topological order survives and keeps its
    name; a merge involving any labeled gate leaves the survivor labeled.
    One sweep reaches closure because fanins are resolved through earlier
    merges as the sweep runs.
    """
    repl: dict[str, str] = {}
    seen: dict[tuple, str] = {}
    lock = set(g.lock_gates)
    merges = 0

    def res(n: str) -> str:
        while n in repl:
            n = repl[n]
        return n

    kept: dict[str, tuple[str, list[str]]] = {}
    for j in g.topo_order():
        gate = g.gates[j]
        fans = [res(g.net_name(f)) for f in gate.fanins]
        ids = [g.net_id(f) for f in fans]
        if gate.kind in BINARY_KINDS:
            key = (gate.kind, tuple(sorted(ids)))
        else:
            key = (gate.kind, tuple(ids))
        prev = seen.get(key)
        if prev is not None:
            repl[gate.name] = prev
            merges += 1
            if gate.name in lock:
                lock.add(prev)
        else:
            seen[key] = gate.name
            kept[gate.name] = (gate.kind, fans)

    b = GraphBuilder()
    key_set = set(g.key_inputs)
    for n in g.inputs:
        b.add_input(n, key=n in key_set)
    for gate in g.gates:
        if gate.name in kept:
            kind, fans = kept[gate.name]
            b.add_gate(gate.name, kind, fans, lock=gate.name in lock)
    b.outputs = [res(o) for o in g.output_names]
    return b.build(), merges


def normalize(g: GateGraph) -> tuple[GateGraph, NormalizeReport]:
    """Decompose to 2-input form, then fold and hash to a fixpoint.

    Idempotent: normalizing the result again reports zero folds and zero
    merges and returns a structurally identical graph.
    """
    before = g.n_gates
    cur = decompose_to_2input(g)
    folds = 0
    merges = 0
    for _ in range(10000):
        cur, f = fold_constants(cur)
        cur, m = strash(cur)
        folds += f
        merges += m
        if f == 0 and m == 0:
            break
    else:
        raise RuntimeError("normalize did not reach a fixpoint")
    return cur, NormalizeReport(before, cur.n_gates, folds, merges)
