"""Deterministic generators for the bundled benchmark suite.

c17 is the real six-NAND netlist. The other designs are synthetic
stand-ins: same primary input/output interface as the classic ISCAS-85
designs of the same name, similar scale, and a design-specific mix of
combinational structures (priority encoders, ECC syndrome logic, CRC
rounds, comparators, ALU slices), but not the published netlists. Each
generated bench says so in its header. Two relationships carry over
because the evaluation depends on them: c1355 is c499 with every XOR
expanded into four NANDs (so the pair is functionally equivalent), and
per-design structure is distinctive enough to tell the designs apart.

Everything is seeded and deterministic: regenerating a design yields
byte-identical bench text.
"""

from __future__ import annotations

import random

from .netlist import (
    AND, GateGraph, GraphBuilder, NAND, NOR, NOT, OR, XNOR, XOR, write_bench,
)


class _Kit:
    """Sequential gate namer over a GraphBuilder."""

    def __init__(self, b: GraphBuilder):
        self.b = b
        self.i = 0

    def g(self, kind: str, *fanins: str) -> str:
        name = f"g{self.i}"
        self.i += 1
        return self.b.add_gate(name, kind, list(fanins))

    def tree(self, kind: str, nets: list[str]) -> str:
        """Balanced reduction tree; returns the root net."""
        lvl = list(nets)
        while len(lvl) > 1:
            nxt = [self.g(kind, lvl[j], lvl[j + 1])
                   for j in range(0, len(lvl) - 1, 2)]
            if len(lvl) % 2:
                nxt.append(lvl[-1])
            lvl = nxt
        return lvl[0]

    def full_adder(self, x: str, y: str, z: str) -> tuple[str, str]:
        t = self.g(XOR, x, y)
        s = self.g(XOR, t, z)
        c = self.g(OR, self.g(AND, x, y), self.g(AND, t, z))
        return s, c

    def half_adder(self, x: str, y: str) -> tuple[str, str]:
        return self.g(XOR, x, y), self.g(AND, x, y)

    def ripple_add(self, av: list[str], bv: list[str],
                   cin: str | None = None) -> tuple[list[str], str]:
        sums = []
        carry = cin
        for x, y in zip(av, bv):
            if carry is None:
                s, carry = self.half_adder(x, y)
            else:
                s, carry = self.full_adder(x, y, carry)
            sums.append(s)
        return sums, carry

    def eq_compare(self, av: list[str], bv: list[str]) -> str:
        bits = [self.g(XNOR, x, y) for x, y in zip(av, bv)]
        return self.tree(AND, bits)

    def gt_compare(self, av: list[str], bv: list[str]) -> str:
        # MSB-last vectors; classic borrow chain
        gt = self.g(AND, av[0], self.g(NOT, bv[0]))
        for x, y in zip(av[1:], bv[1:]):
            here = self.g(AND, x, self.g(NOT, y))
            same = self.g(XNOR, x, y)
            gt = self.g(OR, here, self.g(AND, same, gt))
        return gt

    def mux(self, s: str, a: str, b_: str) -> str:
        ns = self.g(NOT, s)
        return self.g(OR, self.g(AND, s, a), self.g(AND, ns, b_))

    def decode2(self, s0: str, s1: str) -> list[str]:
        n0, n1 = self.g(NOT, s0), self.g(NOT, s1)
        return [self.g(AND, n1, n0), self.g(AND, n1, s0),
                self.g(AND, s1, n0), self.g(AND, s1, s0)]

    def logic_unit(self, av: list[str], bv: list[str],
                   sel: list[str]) -> list[str]:
        """Per-bit AND/OR/XOR/NAND selected by a 2-bit opcode."""
        dec = self.decode2(sel[0], sel[1])
        out = []
        for x, y in zip(av, bv):
            ops = [self.g(AND, x, y), self.g(OR, x, y),
                   self.g(XOR, x, y), self.g(NAND, x, y)]
            picked = [self.g(AND, d, o) for d, o in zip(dec, ops)]
            out.append(self.tree(OR, picked))
        return out


def _pis(b: GraphBuilder, n: int) -> list[str]:
    return [b.add_input(f"i{j}") for j in range(n)]


def _pad_outputs(kit: _Kit, pool: list[str], outs: list[str], n_po: int,
                 rng: random.Random) -> list[str]:
    """Top the output list up to the profile's width with NAND taps."""
    while len(outs) < n_po:
        a = pool[rng.randrange(len(pool))]
        b_ = pool[rng.randrange(len(pool))]
        outs.append(kit.g(NAND, a, b_))
    if len(outs) != n_po:
        raise AssertionError("generator produced too many outputs")
    return outs


# ---- c17 (real) ----

def _c17(b: GraphBuilder, rng: random.Random) -> list[str]:
    i = _pis(b, 5)
    b.add_gate("G0", NAND, [i[0], i[2]])
    b.add_gate("G1", NAND, [i[2], i[3]])
    b.add_gate("G2", NAND, [i[1], "G1"])
    b.add_gate("G3", NAND, ["G1", i[4]])
    b.add_gate("G4", NAND, ["G0", "G2"])
    b.add_gate("G5", NAND, ["G2", "G3"])
    return ["G4", "G5"]


# ---- c432: 27-channel priority/interrupt flavor (NAND/NOR heavy) ----

def _c432(b: GraphBuilder, rng: random.Random) -> list[str]:
    pi = _pis(b, 36)
    kit = _Kit(b)
    req, en = pi[:27], pi[27:36]
    outs = []
    group_any = []
    enc_bits: list[list[str]] = [[], [], [], []]
    for gidx in range(3):
        act = [kit.g(AND, req[gidx * 9 + j], en[j]) for j in range(9)]
        # cumulative "someone above" chain
        none_above = [kit.g(NOT, act[0])]
        for j in range(1, 9):
            none_above.append(kit.g(NOR, act[j], kit.g(NOT, none_above[-1])))
        grant = [act[0]] + [kit.g(AND, act[j], none_above[j - 1])
                            for j in range(1, 9)]
        group_any.append(kit.g(NOT, none_above[-1]))
        for bit in range(4):
            members = [grant[j] for j in range(9) if (j >> bit) & 1]
            if members:
                enc_bits[bit].append(kit.tree(OR, members))
    for bit in range(3):
        outs.append(kit.tree(NOR, enc_bits[bit]))
    outs.extend(group_any)
    outs.append(kit.tree(NAND, [group_any[0], group_any[1], group_any[2],
                                enc_bits[3][0]]))
    return outs[:7]


# ---- c499 / c1355: single-error-correcting code flavor ----

def _c499(b: GraphBuilder, rng: random.Random) -> list[str]:
    pi = _pis(b, 41)
    kit = _Kit(b)
    d, chk, ctl = pi[:32], pi[32:40], pi[40]
    syn = []
    for j in range(5):
        members = [d[i] for i in range(32) if (i >> j) & 1]
        syn.append(kit.g(XOR, kit.tree(XOR, members), chk[j]))
    syn.append(kit.g(XOR, kit.tree(XOR, list(d)), chk[5]))
    scheck = kit.g(XOR, kit.tree(XOR, list(chk)), ctl)
    enable = kit.g(AND, syn[5], kit.g(OR, scheck, ctl))
    nsyn = [kit.g(NOT, s) for s in syn[:5]]
    d01 = [kit.g(AND, a, b_) for b_ in (nsyn[1], syn[1])
           for a in (nsyn[0], syn[0])]
    d23 = [kit.g(AND, a, b_) for b_ in (nsyn[3], syn[3])
           for a in (nsyn[2], syn[2])]
    outs = []
    for i in range(32):
        hi = d23[(i >> 2) & 3]
        top = nsyn[4] if (i >> 4) & 1 == 0 else syn[4]
        match = kit.g(AND, d01[i & 3], kit.g(AND, hi, top))
        flip = kit.g(AND, match, enable)
        outs.append(kit.g(XOR, d[i], flip))
    return outs


def expand_xor_to_nand(g: GateGraph) -> GateGraph:
    """Rewrite every 2-input XOR as the classic four-NAND network.

    The result is functionally identical; gate names of non-XOR gates
    and the interface are preserved.
    """
    b = GraphBuilder()
    for name in g.inputs:
        b.add_input(name, key=name in g.key_inputs)
    for gate in g.gates:
        fans = [g.net_name(f) for f in gate.fanins]
        if gate.kind == XOR and len(fans) == 2:
            lock = gate.name in g.lock_gates
            x, y = fans
            n1 = b.add_gate(b.fresh(f"{gate.name}x1"), NAND, [x, y], lock=lock)
            n2 = b.add_gate(b.fresh(f"{gate.name}x2"), NAND, [x, n1], lock=lock)
            n3 = b.add_gate(b.fresh(f"{gate.name}x3"), NAND, [y, n1], lock=lock)
            b.add_gate(gate.name, NAND, [n2, n3],
                       lock=lock)
        else:
            b.add_gate(gate.name, gate.kind, fans,
                       lock=gate.name in g.lock_gates)
    b.outputs = list(g.output_names)
    return b.build()


def _c1355(b: GraphBuilder, rng: random.Random) -> list[str]:
    inner = GraphBuilder()
    outs = _c499(inner, rng)
    inner.outputs = outs
    expanded = expand_xor_to_nand(inner.build())
    for name in expanded.inputs:
        b.add_input(name)
    for gate in expanded.gates:
        b.add_gate(gate.name, gate.kind,
                   [expanded.net_name(f) for f in gate.fanins])
    return list(expanded.output_names)


# ---- c880: ALU slice flavor (adder + logic unit + compare) ----

def _c880(b: GraphBuilder, rng: random.Random) -> list[str]:
    pi = _pis(b, 60)
    kit = _Kit(b)
    a, bb = pi[0:12], pi[12:24]
    c, d = pi[24:36], pi[36:48]
    sel, m = pi[48:50], pi[50:60]
    sums, cout = kit.ripple_add(a, bb, m[0])
    logic = kit.logic_unit(c, d, sel)
    sums2, cout2 = kit.ripple_add(sums, logic, cout)
    gt = kit.gt_compare(a, d)
    eq = kit.eq_compare(bb, c)
    par = kit.tree(XOR, list(m))
    mixed = [kit.g(NAND, s2, m[j % 10]) for j, s2 in enumerate(sums2)]
    outs = list(mixed)
    outs.append(kit.g(OR, cout2, gt))
    for j in range(12):
        outs.append(kit.g(XNOR, logic[j], sums[j]))
    outs.append(kit.g(AND, eq, par))
    return _pad_outputs(kit, sums2 + logic, outs, 26, rng)


# ---- c1908: CRC rounds flavor (XOR/NAND) ----

def _c1908(b: GraphBuilder, rng: random.Random) -> list[str]:
    pi = _pis(b, 33)
    kit = _Kit(b)
    d, state, mode = pi[:16], pi[16:32], pi[32]
    taps = (0, 2, 3, 5, 8, 11, 13)
    cur = list(state)
    checks = []
    for rnd in range(7):
        fb = kit.g(XOR, cur[15], d[(rnd * 3) % 16])
        gfb = kit.g(AND, fb, mode) if rnd % 2 == 0 else fb
        nxt = []
        for i in range(16):
            prev = cur[i - 1] if i else gfb
            if i in taps:
                nxt.append(kit.g(XOR, prev, gfb) if i else prev)
            else:
                nxt.append(prev)
        # mixing layer keeps rounds from collapsing into wires
        mixed = []
        for i in range(16):
            if i % 4 == 3:
                mixed.append(kit.g(NAND, nxt[i], d[(i + rnd) % 16]))
            else:
                mixed.append(nxt[i])
        checks.append(kit.eq_compare(mixed[: 8], d[: 8]))
        cur = mixed
    syndrome = [kit.g(XNOR, cur[i], state[i]) for i in range(16)]
    detect = kit.tree(NAND, syndrome[:8])
    outs = list(cur)[:16]
    outs.extend(checks)
    outs.append(detect)
    outs.append(kit.tree(XOR, syndrome))
    return _pad_outputs(kit, syndrome + cur, outs, 25, rng)


# ---- c2670: wide compare/priority/crossbar flavor ----

def _c2670(b: GraphBuilder, rng: random.Random) -> list[str]:
    pi = _pis(b, 233)
    kit = _Kit(b)
    a, bb = pi[0:64], pi[64:128]
    p = pi[128:192]
    mx = pi[192:224]
    sel = pi[224:228]
    misc = pi[228:233]
    outs = []
    # equality in 8-bit chunks
    for ch in range(8):
        outs.append(kit.eq_compare(a[ch * 8:(ch + 1) * 8],
                                   bb[ch * 8:(ch + 1) * 8]))
    # 64-way priority grants
    none_above = kit.g(NOT, p[0])
    grants = [p[0]] + [None] * 63
    for j in range(1, 64):
        grants[j] = kit.g(AND, p[j], none_above)
        none_above = kit.g(NOR, p[j], kit.g(NOT, none_above))
    outs.extend(grants[:48])
    # crossbar: 16 outputs of 4-to-1 and-or selects over mx
    dec = kit.decode2(sel[0], sel[1])
    for j in range(16):
        lanes = [mx[(j + q * 7) % 32] for q in range(4)]
        picked = [kit.g(AND, dq, ln) for dq, ln in zip(dec, lanes)]
        outs.append(kit.tree(OR, picked))
    # second compare bank, NOR-flavored
    for ch in range(8):
        bits = [kit.g(XOR, a[ch * 8 + j], bb[63 - (ch * 8 + j)])
                for j in range(8)]
        outs.append(kit.tree(NOR, bits))
    outs.append(kit.tree(XNOR, list(misc) + [sel[2], sel[3]]))
    # parity planes over the priority inputs
    for q in range(4):
        outs.append(kit.tree(XOR, p[q * 16:(q + 1) * 16]))
    gsel = kit.g(OR, sel[2], sel[3])
    mixed = [kit.mux(gsel, grants[j], a[j]) for j in range(32)]
    outs.extend(kit.g(NAND, mixed[j], p[j]) for j in range(32))
    return _pad_outputs(kit, mixed + grants, outs, 140, rng)


# ---- c3540: control-heavy ALU flavor (AND/OR/NOR idiom) ----

def _c3540(b: GraphBuilder, rng: random.Random) -> list[str]:
    pi = _pis(b, 50)
    kit = _Kit(b)
    a, bb = pi[0:8], pi[8:16]
    q = pi[16:32]
    op = pi[32:36]
    k = pi[36:50]
    bsel = kit.g(OR, op[0], kit.g(AND, op[1], op[2]))
    bmod = [kit.mux(bsel, kit.g(NOT, y), y) for y in bb]
    sums, cout = kit.ripple_add(a, bmod, op[0])
    dec = kit.decode2(op[2], op[3])
    stage = sums
    for depth in range(3):
        nstage = []
        for j in range(8):
            rot = stage[(j + (1 << depth)) % 8]
            nstage.append(kit.mux(dec[depth], rot, stage[j]))
        stage = nstage
    # BCD-style nibble adjust: detect > 9 with AND/OR
    adj = []
    for nib in (sums[0:4], sums[4:8]):
        hi = kit.g(AND, nib[3], kit.g(OR, nib[2], nib[1]))
        adj.append(kit.g(OR, hi, kit.g(AND, nib[3], nib[0])))
    qgrant = [q[0]] + [None] * 15
    none_above = kit.g(NOT, q[0])
    for j in range(1, 16):
        qgrant[j] = kit.g(AND, q[j], none_above)
        none_above = kit.g(NOR, q[j], kit.g(NOT, none_above))
    cross = []
    for j in range(16):
        lanes = [kit.g(AND, qgrant[(j + 3 * t) % 16], k[(j + t) % 14])
                 for t in range(4)]
        cross.append(kit.tree(OR, lanes))
    folded = [kit.g(NOR, cross[j], cross[j + 8]) for j in range(8)]
    merge = [kit.tree(OR, [kit.g(AND, dec[t], (stage if t % 2 else cross)
                           [(j + t) % 8]) for t in range(4)])
             for j in range(8)]
    zero = kit.tree(NOR, merge)
    outs = list(merge)
    outs.append(cout)
    outs.append(zero)
    outs.extend(adj)
    outs.append(kit.gt_compare(a, bb))
    outs.append(kit.eq_compare(sums, folded))
    outs.append(kit.tree(AND, [kit.g(OR, k[j], k[j + 7]) for j in range(7)]))
    outs.append(kit.tree(XNOR, k[0:8]))
    return _pad_outputs(kit, merge + cross, outs, 22, rng)


# ---- c5315: wide multi-section ALU flavor ----

def _c5315(b: GraphBuilder, rng: random.Random) -> list[str]:
    pi = _pis(b, 178)
    kit = _Kit(b)
    sec_a = [pi[s * 32:s * 32 + 16] for s in range(4)]
    sec_b = [pi[s * 32 + 16:s * 32 + 32] for s in range(4)]
    sel = pi[128:136]
    cvec = pi[136:152]
    misc = pi[152:178]
    outs = []
    section_sums = []
    for s in range(4):
        av, bv = sec_a[s], sec_b[s]
        sums, cout = kit.ripple_add(av, bv, sel[s % 8])
        logic = kit.logic_unit(av, bv, [sel[(s * 2) % 8], sel[(s * 2 + 1) % 8]])
        merged = [kit.mux(sel[(s + 4) % 8], x, y)
                  for x, y in zip(sums, logic)]
        section_sums.append(merged)
        outs.extend(merged)
        outs.append(cout)
        outs.append(kit.tree(XOR, merged))
        outs.append(kit.eq_compare(av, bv))
        outs.append(kit.gt_compare(av[:8], bv[:8]))
    # two 16x12 multiplier-style partial product reductions; wide parity
    # trees afterwards keep every reduction column observable
    rows = []
    for r in range(12):
        rows.append([kit.g(AND, cvec[j], misc[r % 26]) for j in range(16)])
    acc = rows[0]
    for r in range(1, 12):
        acc, _ = kit.ripple_add(acc, rows[r], None)
        acc = acc[:16]
    outs.extend(acc[:12])
    rows2 = []
    for r in range(12):
        rows2.append([kit.g(NAND, cvec[j], misc[(r + 9) % 26])
                      for j in range(16)])
    acc2 = rows2[0]
    for r in range(1, 12):
        acc2, _ = kit.ripple_add(acc2, rows2[r], None)
        acc2 = acc2[:16]
    # global reduce trees across sections
    for s in range(4):
        col = [section_sums[s][j] for j in range(16)]
        outs.append(kit.tree(OR, col[0:8]))
    cross = []
    for j in range(16):
        lanes = [kit.g(AND, section_sums[t][j], misc[(j + 5 * t) % 26])
                 for t in range(4)]
        cross.append(kit.tree(OR, lanes))
    outs.extend(cross[:11])
    t1 = kit.tree(XOR, acc2)
    t2 = kit.tree(XOR, acc[12:] + cross[11:])
    outs.extend([t1, t2, kit.g(XNOR, t1, t2), kit.g(OR, t1, acc2[0])])
    return _pad_outputs(kit, acc + cross, outs, 123, rng)


_PROFILES: dict[str, tuple[int, int, int]] = {
    # name -> (n_pi, n_po, seed)
    "c17": (5, 2, 1),
    "c432": (36, 7, 432),
    "c499": (41, 32, 499),
    "c880": (60, 26, 880),
    "c1355": (41, 32, 499),
    "c1908": (33, 25, 1908),
    "c2670": (233, 140, 2670),
    "c3540": (50, 22, 3540),
    "c5315": (178, 123, 5315),
}

_BUILDERS = {
    "c17": _c17,
    "c432": _c432,
    "c499": _c499,
    "c880": _c880,
    "c1355": _c1355,
    "c1908": _c1908,
    "c2670": _c2670,
    "c3540": _c3540,
    "c5315": _c5315,
}

DESIGNS = tuple(_PROFILES)
SYNTHETIC = tuple(n for n in DESIGNS if n != "c17")


def generate(name: str) -> GateGraph:
    """Build one bundled design from scratch."""
    if name not in _BUILDERS:
        raise ValueError(f"unknown design '{name}'")
    n_pi, n_po, seed = _PROFILES[name]
    rng = random.Random(seed)
    b = GraphBuilder()
    outs = _BUILDERS[name](b, rng)
    b.outputs = list(outs)
    g = b.build()
    if g.n_inputs != n_pi or len(g.outputs) != n_po:
        raise AssertionError(
            f"{name}: interface drifted to {g.n_inputs}/{len(g.outputs)}")
    return g


def generate_bench(name: str) -> str:
    """Bench text for one design, with a provenance header."""
    g = generate(name)
    if name == "c17":
        header = (f"# {name}: the classic six-NAND benchmark\n")
    else:
        header = (
            f"# {name}: synthetic stand-in generated by cutsig.benchgen\n"
            f"# (matches the ISCAS-85 {name} interface: {g.n_inputs} inputs, "
            f"{len(g.outputs)} outputs; not the published netlist)\n")
    return header + write_bench(g)
