"""Key-based locking transforms.

Four generators, one per scheme, each taking a normalized graph and a
:class:`LockConfig` and returning a locked graph plus the
:class:`~cutsig.netlist.KeyRecord` ground truth:

* ``trll``  - XOR/XNOR key gates, half absorbed into existing inverting
  gates (NOT becomes XOR(key, x) with key 1; NAND/NOR/XNOR split into the
  plain gate plus a keyed inverter on its output), half inserted as
  pass-through key gates on random wires.
* ``mux``   - a key-selected 2-way choice between the true wire and a
  decoy wire picked outside the site's transitive fanout, emitted as the
  AND/OR/NOT decomposition of a MUX2.
* ``lut``   - 2-input gates replaced by 4-bit configurable cells: a MUX4
  tree whose data inputs are key bits holding the gate's truth table.
* ``sfllhd`` - functionality stripping: a hard-wired comparator flips one
  protected output whenever the selected inputs sit at Hamming distance
  ``hd`` from a secret pattern, and a key-driven twin of the comparator
  flips it back; only the correct key cancels the corruption.

Every generator preserves the original interface: primary outputs keep
their names (a locked wire's gate is renamed and the lock logic takes
over the original name), and key inputs are appended as fresh PIs named
``<key_prefix><i>``. Locked graphs stay in 2-input normal form.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .netlist import (
    AND, BINARY_KINDS, BUF, CONST_KINDS, DEFAULT_KEY_PREFIX, GateGraph,
    GraphBuilder, KeyRecord, MUX2, NAND, NOR, NOT, OR, XNOR, XOR, _eval_kind,
)
from .npn import variable_masks

SCHEMES = ("trll", "mux", "lut", "sfllhd")

_INVERTING_BASE = {NOT: None, NAND: AND, NOR: OR, XNOR: XOR}


@dataclass(frozen=True)
class LockConfig:
    """Scheme name (see SCHEMES), key width, and scheme parameters.

    ``hd`` defaults to key_size // 2 (sfllhd only). ``protected_output``
    and ``selected_inputs`` override the sfllhd defaults (widest-cone
    output, lexicographically first key_size PIs).
    """

    scheme: str
    key_size: int
    hd: int | None = None
    lut_k: int = 2
    rng_seed: int = 0
    key_prefix: str = DEFAULT_KEY_PREFIX
    protected_output: str | None = None
    selected_inputs: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme '{self.scheme}'")
        if self.key_size < 1:
            raise ValueError("key_size must be positive")
        if self.hd is not None and not 0 <= self.hd <= self.key_size:
            raise ValueError("hd must be in 0..key_size")


@dataclass(frozen=True)
class OverheadReport:
    design: str
    scheme: str
    key_size: int
    area_ratio: float


def _check_lockable(g: GateGraph) -> None:
    for gate in g.gates:
        if gate.kind == MUX2 or len(gate.fanins) > 2:
            raise ValueError("locking expects a normalized (2-input) graph")
    if g.key_inputs:
        raise ValueError("graph already has key inputs")


def _add_keys(b: GraphBuilder, cfg: LockConfig) -> list[str]:
    names = []
    for i in range(cfg.key_size):
        name = f"{cfg.key_prefix}{i}"
        if b.has(name):
            raise ValueError(f"net '{name}' already exists; pick another key prefix")
        b.add_input(name, key=True)
        names.append(name)
    return names


def _take_over_net(b: GraphBuilder, name: str) -> str:
    """Free up a gate's name so lock logic can drive its net.

    The gate is re-added under a fresh derived name; every consumer (and
    every OUTPUT declaration) still references ``name``, which the caller
    must now define. Returns the new name of the displaced gate.
    """
    kind, fans = b.gate(name)
    lock = b.is_lock(name)
    core = b.fresh(f"{name}$w")
    b.remove_gate(name)
    b.add_gate(core, kind, fans, lock=lock)
    return core


def lock_trll(g: GateGraph, cfg: LockConfig) -> tuple[GateGraph, KeyRecord]:
    """XOR/XNOR key-gate insertion with inverter absorption.

    Per key bit, a fair coin picks mode (a) when absorbing sites remain:
    an inverting gate hands its negation to the key gate (NOT(x) becomes
    XOR(key, x) with key bit 1; NAND/NOR/XNOR become AND/OR/XOR feeding
    XOR(key, .)), XNOR absorbing with key bit 0. Mode (b) re-drives a
    random wire through a pass-through key gate (XOR with bit 0 or XNOR
    with bit 1). Each wire is locked at most once.
    """
    _check_lockable(g)
    rng = random.Random(cfg.rng_seed)
    b = GraphBuilder.from_graph(g)
    keys = _add_keys(b, cfg)
    inv_sites = [gt.name for gt in g.gates if gt.kind in _INVERTING_BASE]
    wire_sites = [gt.name for gt in g.gates if gt.kind not in CONST_KINDS]
    if len(wire_sites) < cfg.key_size:
        raise ValueError("fewer candidate sites than key_size")
    used: set[str] = set()
    bits: list[int] = []
    lock_names: list[str] = []
    for kname in keys:
        inv_avail = [n for n in inv_sites if n not in used]
        wire_avail = [n for n in wire_sites if n not in used]
        absorb = rng.random() < 0.5
        use_xor = rng.random() < 0.5
        if absorb and not inv_avail:
            absorb = False
        if absorb:
            target = inv_avail[rng.randrange(len(inv_avail))]
            used.add(target)
            kind, fans = b.gate(target)
            base = _INVERTING_BASE[kind]
            if base is None:
                x = fans[0]
            else:
                x = b.add_gate(b.fresh(f"{target}$base"), base, fans)
            b.set_gate(target, XOR if use_xor else XNOR, [kname, x])
            b.mark_lock(target)
            lock_names.append(target)
            bits.append(1 if use_xor else 0)
        else:
            target = wire_avail[rng.randrange(len(wire_avail))]
            used.add(target)
            core = _take_over_net(b, target)
            b.add_gate(target, XOR if use_xor else XNOR, [kname, core], lock=True)
            lock_names.append(target)
            bits.append(0 if use_xor else 1)
    return b.build(), KeyRecord("trll", keys, bits, lock_names)


def _tfo_nets(b: GraphBuilder, start: str) -> set[str]:
    """Names of nets reachable forward from ``start`` (start included)."""
    consumers: dict[str, list[str]] = {}
    for name in b.gate_names():
        for f in b.gate(name)[1]:
            consumers.setdefault(f, []).append(name)
    seen = {start}
    stack = [start]
    while stack:
        for c in consumers.get(stack.pop(), ()):
            if c not in seen:
                seen.add(c)
                stack.append(c)
    return seen


def lock_mux(g: GateGraph, cfg: LockConfig) -> tuple[GateGraph, KeyRecord]:
    """Key-selected true/decoy multiplexing on random wires.

    Per key bit, the true wire t is a fresh random gate output and the
    decoy d any other net outside t's transitive fanout (so rewiring t's
    consumers to the mux keeps the graph acyclic); d is rejection-sampled
    up to 64 times. The MUX2 is emitted decomposed (NOT/AND/AND/OR), all
    four fragments labeled, and the key bit is set so the mux passes t.
    """
    _check_lockable(g)
    rng = random.Random(cfg.rng_seed)
    b = GraphBuilder.from_graph(g)
    keys = _add_keys(b, cfg)
    t_sites = [gt.name for gt in g.gates if gt.kind not in CONST_KINDS]
    d_sites = list(g.inputs) + [gt.name for gt in g.gates]
    if len(t_sites) < cfg.key_size:
        raise ValueError("fewer internal wires than key_size")
    used: set[str] = set()
    bits: list[int] = []
    lock_names: list[str] = []
    for kname in keys:
        avail = [n for n in t_sites if n not in used]
        t = avail[rng.randrange(len(avail))]
        used.add(t)
        tfo = _tfo_nets(b, t)
        decoy = None
        for _ in range(64):
            d = d_sites[rng.randrange(len(d_sites))]
            if d != t and d not in tfo:
                decoy = d
                break
        if decoy is None:
            raise ValueError(f"no acyclic decoy found for site '{t}'")
        bit = rng.getrandbits(1)
        core = _take_over_net(b, t)
        hi_src, lo_src = (core, decoy) if bit else (decoy, core)
        ns = b.add_gate(b.fresh(f"{t}$ms"), NOT, [kname], lock=True)
        hi = b.add_gate(b.fresh(f"{t}$m1"), AND, [kname, hi_src], lock=True)
        lo = b.add_gate(b.fresh(f"{t}$m0"), AND, [ns, lo_src], lock=True)
        b.add_gate(t, OR, [hi, lo], lock=True)
        bits.append(bit)
        lock_names.extend([ns, hi, lo, t])
    return b.build(), KeyRecord("mux", keys, bits, lock_names)


def lock_lut(g: GateGraph, cfg: LockConfig) -> tuple[GateGraph, KeyRecord]:
    """Gate redaction into 4-bit configurable cells.

    Each site replaces one 2-input gate with a MUX4 tree over its fanins
    (a, b): key bit 4s+j drives the row j data input, rows indexed
    2*b + a, so the correct configuration is the replaced gate's truth
    table (NAND reads 0111 row-3-first). Trees are emitted decomposed,
    with the two bottom muxes sharing one NOT(a).
    """
    _check_lockable(g)
    if cfg.lut_k != 2:
        raise ValueError("only 2-input LUTs are supported")
    if cfg.key_size % 4:
        raise ValueError("key_size must be divisible by 4 for LUT locking")
    rng = random.Random(cfg.rng_seed)
    b = GraphBuilder.from_graph(g)
    keys = _add_keys(b, cfg)
    pool = [gt.name for gt in g.gates
            if gt.kind in BINARY_KINDS and len(gt.fanins) == 2]
    n_sites = cfg.key_size // 4
    if len(pool) < n_sites:
        raise ValueError("not enough replaceable 2-input gates")
    used: set[str] = set()
    bits: list[int] = []
    lock_names: list[str] = []
    for s in range(n_sites):
        avail = [n for n in pool if n not in used]
        target = avail[rng.randrange(len(avail))]
        used.add(target)
        kind, fans = b.gate(target)
        a, bn = fans
        k0, k1, k2, k3 = keys[4 * s: 4 * s + 4]
        bits.extend(_eval_kind(kind, [row & 1, row >> 1], 1) for row in range(4))
        na = b.add_gate(b.fresh(f"{target}$na"), NOT, [a], lock=True)
        nb = b.add_gate(b.fresh(f"{target}$nb"), NOT, [bn], lock=True)
        m0hi = b.add_gate(b.fresh(f"{target}$r1"), AND, [a, k1], lock=True)
        m0lo = b.add_gate(b.fresh(f"{target}$r0"), AND, [na, k0], lock=True)
        m0 = b.add_gate(b.fresh(f"{target}$m0"), OR, [m0hi, m0lo], lock=True)
        m1hi = b.add_gate(b.fresh(f"{target}$r3"), AND, [a, k3], lock=True)
        m1lo = b.add_gate(b.fresh(f"{target}$r2"), AND, [na, k2], lock=True)
        m1 = b.add_gate(b.fresh(f"{target}$m1"), OR, [m1hi, m1lo], lock=True)
        thi = b.add_gate(b.fresh(f"{target}$t1"), AND, [bn, m1], lock=True)
        tlo = b.add_gate(b.fresh(f"{target}$t0"), AND, [nb, m0], lock=True)
        b.set_gate(target, OR, [thi, tlo])
        b.mark_lock(target)
        lock_names.extend([na, nb, m0hi, m0lo, m0, m1hi, m1lo, m1, thi, tlo,
                           target])
    return b.build(), KeyRecord("lut", keys, bits, lock_names)


def _popcount_tree(b: GraphBuilder, nets: list[str], stem: str,
                   acc: list[str]) -> list[str]:
    """Adder tree summing single-bit nets; returns sum bits LSB first.

    Carry-save reduction: full adders compress three same-weight bits
    into sum + carry until every weight holds one bit. XOR/AND/OR gates
    only, each lock-labeled and appended to ``acc``.
    """
    counter = [0]

    def add(kind: str, fans: list[str]) -> str:
        name = b.fresh(f"{stem}{counter[0]}")
        counter[0] += 1
        b.add_gate(name, kind, fans, lock=True)
        acc.append(name)
        return name

    def half(x: str, y: str) -> tuple[str, str]:
        return add(XOR, [x, y]), add(AND, [x, y])

    def full(x: str, y: str, z: str) -> tuple[str, str]:
        t = add(XOR, [x, y])
        s = add(XOR, [t, z])
        c = add(OR, [add(AND, [x, y]), add(AND, [t, z])])
        return s, c

    weights: list[list[str]] = [list(nets)]
    w = 0
    while w < len(weights):
        col = weights[w]
        while len(col) > 1:
            if len(weights) == w + 1:
                weights.append([])
            if len(col) >= 3:
                s, c = full(col.pop(), col.pop(), col.pop())
            else:
                s, c = half(col.pop(), col.pop())
            col.append(s)
            weights[w + 1].append(c)
        w += 1
    return [col[0] for col in weights]


def _equals_const(b: GraphBuilder, bits: list[str], value: int, stem: str,
                  acc: list[str]) -> str:
    """AND tree asserting the bit vector equals a constant."""
    counter = [0]

    def add(kind: str, fans: list[str]) -> str:
        name = b.fresh(f"{stem}{counter[0]}")
        counter[0] += 1
        b.add_gate(name, kind, fans, lock=True)
        acc.append(name)
        return name

    terms = []
    for j, net in enumerate(bits):
        terms.append(net if (value >> j) & 1 else add(NOT, [net]))
    pred = terms[0]
    for t in terms[1:]:
        pred = add(AND, [pred, t])
    return pred


def lock_sfll_hd(g: GateGraph, cfg: LockConfig) -> tuple[GateGraph, KeyRecord]:
    """Functionality stripping with a Hamming-distance predicate.

    The protected output (widest fanin cone by default) is XORed with a
    hard-wired predicate HD(x_S, secret) == hd over the selected inputs
    x_S, corrupting C(key_size, hd) patterns of the protected cube; a
    second predicate HD(x_S, key) == hd over the key inputs XORs it back.
    With key = secret the two predicates coincide and cancel. Both
    predicates share one construction: per-bit difference, a
    population-count adder tree, and an equality comparator.
    """
    _check_lockable(g)
    key_size = cfg.key_size
    hd = cfg.hd if cfg.hd is not None else key_size // 2
    if not 0 <= hd <= key_size:
        raise ValueError("hd must be in 0..key_size")
    if key_size > g.n_inputs:
        raise ValueError("key_size exceeds primary input count")
    if cfg.selected_inputs is not None:
        sel = list(cfg.selected_inputs)
        if len(sel) != key_size or len(set(sel)) != key_size:
            raise ValueError("selected_inputs must be key_size distinct names")
        for x in sel:
            if x not in g.inputs:
                raise ValueError(f"selected input '{x}' is not a primary input")
    else:
        sel = sorted(g.inputs)[:key_size]
    po = cfg.protected_output or _widest_cone_output(g)
    if po not in g.output_names:
        raise ValueError(f"'{po}' is not a primary output")

    rng = random.Random(cfg.rng_seed)
    secret = [rng.getrandbits(1) for _ in range(key_size)]
    b = GraphBuilder.from_graph(g)
    keys = _add_keys(b, cfg)
    lock_names: list[str] = []

    po_index = b.outputs.index(po)
    if b.has(po) and po not in b.inputs:
        core = _take_over_net(b, po)
        out_name = po
    else:
        # output driven directly by a PI: the restored net needs a new name
        core = po
        out_name = b.fresh("sfll_out")

    strip_diffs = []
    for i, (x, sbit) in enumerate(zip(sel, secret)):
        if sbit:
            d = b.add_gate(b.fresh(f"sfll_sd{i}"), NOT, [x], lock=True)
            lock_names.append(d)
            strip_diffs.append(d)
        else:
            strip_diffs.append(x)
    s_bits = _popcount_tree(b, strip_diffs, "sfll_s", lock_names)
    s_pred = _equals_const(b, s_bits, hd, "sfll_sp", lock_names)

    restore_diffs = []
    for i, (x, kname) in enumerate(zip(sel, keys)):
        d = b.add_gate(b.fresh(f"sfll_rd{i}"), XOR, [x, kname], lock=True)
        lock_names.append(d)
        restore_diffs.append(d)
    r_bits = _popcount_tree(b, restore_diffs, "sfll_r", lock_names)
    r_pred = _equals_const(b, r_bits, hd, "sfll_rp", lock_names)

    inner = b.add_gate(b.fresh("sfll_strip"), XOR, [core, s_pred], lock=True)
    b.add_gate(out_name, XOR, [inner, r_pred], lock=True)
    lock_names.extend([inner, out_name])
    b.outputs[po_index] = out_name
    return b.build(), KeyRecord("sfllhd", keys, secret, lock_names)


def _widest_cone_output(g: GateGraph) -> str:
    """The output with the most gates in its transitive fanin cone
    (first such output on ties)."""
    best_name = None
    best = -1
    for net, name in zip(g.outputs, g.output_names):
        seen: set[int] = set()
        gid = g.gate_id_of_net(net)
        if gid is not None:
            stack = [gid]
            seen.add(gid)
            while stack:
                for f in g.gates[stack.pop()].fanins:
                    d = g.gate_id_of_net(f)
                    if d is not None and d not in seen:
                        seen.add(d)
                        stack.append(d)
        if len(seen) > best:
            best = len(seen)
            best_name = name
    if best_name is None:
        raise ValueError("design has no outputs")
    return best_name


_LOCKERS = {
    "trll": lock_trll,
    "mux": lock_mux,
    "lut": lock_lut,
    "sfllhd": lock_sfll_hd,
}


def apply_lock(g: GateGraph, cfg: LockConfig) -> tuple[GateGraph, KeyRecord]:
    """Dispatch to the scheme named in ``cfg``."""
    return _LOCKERS[cfg.scheme](g, cfg)


def area_count(g: GateGraph) -> int:
    """Gate count excluding BUFs (NOTs count)."""
    return sum(1 for gate in g.gates if gate.kind != BUF)


def overhead_ratio(original: GateGraph, locked: GateGraph) -> float:
    base = area_count(original)
    if base == 0:
        raise ValueError("original design has no gates")
    return area_count(locked) / base


def overhead(original: GateGraph, locked: GateGraph, design: str = "",
             scheme: str = "", key_size: int = 0) -> OverheadReport:
    return OverheadReport(design, scheme, key_size,
                          overhead_ratio(original, locked))


def _po_values(g: GateGraph, assignments, width: int) -> list[int]:
    vals = g.simulate_nets(assignments, width)
    return [vals[o] for o in g.outputs]


def unlocked_equivalent(original: GateGraph, locked: GateGraph,
                        record: KeyRecord, exhaustive_limit: int = 16,
                        n_vectors: int = 1000, seed: int = 0) -> bool:
    """Correct-key equivalence on every output, compared by position.

    Exhaustive when the original has at most ``exhaustive_limit`` inputs,
    else ``n_vectors`` seeded random patterns, bit-parallel either way.
    """
    n = original.n_inputs
    if n <= exhaustive_limit:
        width = 1 << n
        base = dict(zip(original.inputs, variable_masks(n)))
    else:
        width = n_vectors
        rng = random.Random(seed)
        base = {name: rng.getrandbits(width) for name in original.inputs}
    mask = (1 << width) - 1
    keyed = dict(base)
    for kname, bit in zip(record.key_inputs, record.key_bits):
        keyed[kname] = mask if bit else 0
    return _po_values(original, base, width) == _po_values(locked, keyed, width)


def wrong_key_mismatch(original: GateGraph, locked: GateGraph,
                       record: KeyRecord, n_vectors: int = 1000,
                       seed: int = 0, hd: int | None = None,
                       selected_inputs=None) -> bool:
    """True when some sampled wrong key disagrees with the original
    somewhere.

    Tries several single-bit key flips and a couple of random wrong keys.
    For sfllhd the sample vectors include patterns placed exactly at
    Hamming distance ``hd`` (default key_size // 2) from the secret over
    ``selected_inputs`` (default: the lexicographically first PIs), where
    the strip predicate fires and a near-miss key cannot restore; the
    all-bits-flipped key is skipped there because flipping every bit
    preserves the distance-hd sphere when hd = key_size / 2.
    """
    n = original.n_inputs
    rng = random.Random(seed)
    if n <= 16:
        width = 1 << n
        base = dict(zip(original.inputs, variable_masks(n)))
    else:
        width = n_vectors
        base = {name: rng.getrandbits(width) for name in original.inputs}
    mask = (1 << width) - 1

    key_size = len(record.key_bits)
    flips: list[list[int]] = []
    for pos in sorted({0, key_size - 1, key_size // 2, 1 % key_size}):
        flip = list(record.key_bits)
        flip[pos] ^= 1
        flips.append(flip)
    for _ in range(2):
        flips.append([rng.getrandbits(1) for _ in range(key_size)])

    if record.scheme == "sfllhd" and n > 16:
        # aim some patterns at the stripped cube: exact-distance-hd flips
        # of the secret across the selected inputs
        sel = list(selected_inputs) if selected_inputs is not None \
            else sorted(original.inputs)[:key_size]
        d = hd if hd is not None else key_size // 2
        for v in range(min(8, width)):
            offsets = set(rng.sample(range(key_size), d))
            for i, name in enumerate(sel):
                bit = record.key_bits[i] ^ (1 if i in offsets else 0)
                if bit:
                    base[name] |= 1 << v
                else:
                    base[name] &= ~(1 << v) & mask

    ref = _po_values(original, base, width)
    correct = list(record.key_bits)
    complement = [b ^ 1 for b in correct]
    for flip in flips:
        if flip == correct:
            continue
        if record.scheme == "sfllhd" and flip == complement:
            continue
        assigns = dict(base)
        for kname, bit in zip(record.key_inputs, flip):
            assigns[kname] = mask if bit else 0
        if _po_values(locked, assigns, width) != ref:
            return True
    return False
