"""Truth tables and NPN canonical forms.

A k-input truth table is one integer: bit m holds the output for input
minterm m, where input j contributes bit j of m (input 0 is the least
significant). Two tables are NPN-equivalent when one becomes the other
under some input permutation, input negations, and output negation.

The canonical form of a table is the numerically smallest table reachable
by transforms that satisfy three orbit-invariant constraints: the result
has at most half its bits set (ties try both output polarities), each
input's positive-cofactor ones-count is the smaller of its two polarities
(ties try both), and inputs are ordered by that count ascending (tied
inputs are permuted exhaustively). Because those constraints describe the
*result* table, equivalent inputs search the same reduced set and land on
the same minimum, so equal canonical forms mean equivalence exactly -- as
long as the search completes. A transform budget caps the worst case; a
table whose reduced set overflows the budget gets the best form seen (a
pure function of the input) flagged ``exact=False``.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

from .netlist import GateGraph, _eval_kind

DEFAULT_BUDGET = 200000


@functools.lru_cache(maxsize=16)
def variable_masks(n: int) -> tuple[int, ...]:
    """Bit-parallel input patterns: bit m of mask i = bit i of minterm m."""
    if n < 0 or n > 20:
        raise ValueError("variable count out of range")
    width = 1 << n
    full = (1 << width) - 1
    out = []
    for i in range(n):
        block = 1 << (1 << i)
        out.append(full // (block + 1) * block)
    return tuple(out)


@dataclass(frozen=True)
class TruthTable:
    """``bits`` packs 2**k output values; minterm m sits at bit m."""

    k: int
    bits: int

    def __post_init__(self):
        if not 0 <= self.k <= 8:
            raise ValueError("truth tables support 0..8 inputs")
        if not 0 <= self.bits < (1 << (1 << self.k)):
            raise ValueError("truth table bits out of range for k")

    @property
    def size(self) -> int:
        return 1 << self.k

    def to_hex(self) -> str:
        nibbles = max(1, self.size // 4)
        return f"{self.k}:{self.bits:0{nibbles}x}"

    @classmethod
    def from_hex(cls, text: str) -> "TruthTable":
        ks, _, hexpart = text.partition(":")
        k = int(ks)
        nibbles = max(1, (1 << k) // 4)
        if len(hexpart) != nibbles:
            raise ValueError(f"expected {nibbles} hex digits for k={k}")
        return cls(k, int(hexpart, 16))


@dataclass(frozen=True)
class NpnTransform:
    """Maps a table f onto g: g(m) = f(src(m)) ^ output_neg, with
    src(m) = (sum_i bit(m, perm[i]) << i) ^ input_neg.

    ``perm[i]`` is the position input i of f occupies in g; bit i of
    ``input_neg`` complements input i of f.
    """

    perm: tuple[int, ...]
    input_neg: int
    output_neg: bool

    def apply(self, t: TruthTable) -> TruthTable:
        src = _perm_src(t.k, self.perm)
        bits = 0
        for m in range(t.size):
            if (t.bits >> (src[m] ^ self.input_neg)) & 1:
                bits |= 1 << m
        if self.output_neg:
            bits ^= (1 << t.size) - 1
        return TruthTable(t.k, bits)


@dataclass(frozen=True)
class NpnClass:
    canonical: TruthTable
    exact: bool

    def key(self) -> str:
        return self.canonical.to_hex()


@functools.lru_cache(maxsize=None)
def _perm_src(k: int, perm: tuple[int, ...]) -> tuple[int, ...]:
    src = []
    for m in range(1 << k):
        s = 0
        for i in range(k):
            if (m >> perm[i]) & 1:
                s |= 1 << i
        src.append(s)
    return tuple(src)


@functools.lru_cache(maxsize=16)
def _swap_masks(k: int):
    """Per slot pair (i, j), i < j: masks of minterms where only one of
    the two variable bits is set, plus the shift between the halves."""
    vm = variable_masks(k)
    full = (1 << (1 << k)) - 1
    table = {}
    for i in range(k):
        for j in range(i + 1, k):
            m10 = vm[i] & (full ^ vm[j])
            m01 = vm[j] & (full ^ vm[i])
            table[(i, j)] = (m10, m01, (1 << j) - (1 << i),
                             full ^ m10 ^ m01)
    return table


def _swap_vars(bits: int, i: int, j: int, swaps) -> int:
    m10, m01, d, keep = swaps[(i, j)]
    return (bits & keep) | ((bits & m10) << d) | ((bits & m01) >> d)


def _negate_vars(bits: int, k: int, nu: int) -> int:
    vm = variable_masks(k)
    full = (1 << (1 << k)) - 1
    for i in range(k):
        if (nu >> i) & 1:
            # minterms m and m ^ (1 << i) trade places
            d = 1 << i
            hi = bits & vm[i]
            bits = (hi >> d) | (((bits ^ hi) << d) & full)
    return bits


def _permute_vars(bits: int, k: int, perm, swaps) -> int:
    """Relabel variables so var i of the input sits at slot perm[i]."""
    pos = list(range(k))   # pos[v] = slot currently holding var v
    at = list(range(k))    # at[slot] = var currently at slot
    for slot in range(k):
        v = None
        for i in range(k):
            if perm[i] == slot:
                v = i
                break
        p = pos[v]
        if p != slot:
            bits = _swap_vars(bits, min(slot, p), max(slot, p), swaps)
            other = at[slot]
            at[slot], at[p] = v, other
            pos[v], pos[other] = slot, p
    return bits


def _group_symmetric(bits: int, grp, swaps) -> bool:
    """True when ``bits`` is invariant under every permutation of the
    variables in ``grp`` (adjacent transpositions generate them all)."""
    for a, b in zip(grp, grp[1:]):
        i, j = (a, b) if a < b else (b, a)
        if _swap_vars(bits, i, j, swaps) != bits:
            return False
    return True


def _search(k: int, bits: int, budget, collect: bool):
    """Scan the reduced transform set; returns (best, transforms, exact).

    ``transforms`` is the tuple of achieving transforms (all argmins) when
    ``collect`` is true, else None. Deterministic: candidates are visited
    in a fixed order, so a budget cutoff still yields a pure function of
    ``bits``. Candidates are built with whole-table mask/shift steps (one
    swap per transposition), not per-minterm loops.

    In the value-only path, a tied group the table is fully symmetric in
    contributes just one arrangement: permuting such variables repeats
    the identical candidate, so skipping the repeats cannot change any
    exact minimum, only spare the budget. The collect path keeps every
    arrangement because callers read the achieving permutations.
    """
    size = 1 << k
    mask = (1 << size) - 1
    ones = bits.bit_count()
    out_opts = []
    if 2 * ones <= size:
        out_opts.append((False, bits))
    if 2 * (size - ones) <= size:
        out_opts.append((True, bits ^ mask))

    vmasks = variable_masks(k)
    swaps = _swap_masks(k)
    best = None
    achieving = []
    count = 0
    exhausted = False

    for outneg, tb in out_opts:
        tb_ones = tb.bit_count()
        sigs = []
        neg_opts = []
        for i in range(k):
            pos = (tb & vmasks[i]).bit_count()
            neg = tb_ones - pos
            sigs.append(min(pos, neg))
            if pos < neg:
                neg_opts.append((0,))
            elif neg < pos:
                neg_opts.append(((1 << i),))
            else:
                neg_opts.append((0, (1 << i)))
        order = sorted(range(k), key=lambda i: (sigs[i], i))
        groups = []
        for i in order:
            if groups and sigs[groups[-1][-1]] == sigs[i]:
                groups[-1].append(i)
            else:
                groups.append([i])

        for neg_parts in itertools.product(*neg_opts):
            nu = 0
            for p in neg_parts:
                nu |= p
            tn = _negate_vars(tb, k, nu) if nu else tb
            group_arrangements = []
            for grp in groups:
                if (not collect and len(grp) > 1
                        and _group_symmetric(tn, grp, swaps)):
                    group_arrangements.append((tuple(grp),))
                else:
                    group_arrangements.append(tuple(itertools.permutations(grp)))
            for arrangement in itertools.product(*group_arrangements):
                count += 1
                if count > budget:
                    exhausted = True
                    break
                perm = [0] * k
                slot = 0
                for grp in arrangement:
                    for i in grp:
                        perm[i] = slot
                        slot += 1
                cand = _permute_vars(tn, k, perm, swaps)
                if best is None or cand < best:
                    best = cand
                    if collect:
                        achieving = [(tuple(perm), nu, outneg)]
                elif collect and cand == best:
                    achieving.append((tuple(perm), nu, outneg))
            if exhausted:
                break
        if exhausted:
            break

    tfs = tuple(NpnTransform(p, nu, on) for p, nu, on in achieving) if collect else None
    return best, tfs, not exhausted


@functools.lru_cache(maxsize=1 << 18)
def _canonical_cached(k: int, bits: int, budget) -> tuple[int, bool]:
    best, _, exact = _search(k, bits, budget, collect=False)
    return best, exact


def npn_canonical(t: TruthTable, budget: int | None = DEFAULT_BUDGET) -> NpnClass:
    """Canonical form of ``t``; ``budget=None`` removes the transform cap.

    The default budget (200000) covers the full reduced set for k <= 6
    (at most 2 * 2**6 * 6! = 92160 transforms), so tables that size or
    smaller always come back exact.
    """
    b = float("inf") if budget is None else budget
    bits, exact = _canonical_cached(t.k, t.bits, b)
    return NpnClass(TruthTable(t.k, bits), exact)


def npn_achieving(t: TruthTable) -> tuple[NpnClass, tuple[NpnTransform, ...]]:
    """Canonical form plus every transform in the reduced set achieving it.

    Runs uncapped; meant for template-sized tables (k <= 6).
    """
    best, tfs, exact = _search(t.k, t.bits, float("inf"), collect=True)
    return NpnClass(TruthTable(t.k, best), exact), tfs


def npn_equivalent(a: TruthTable, b: TruthTable) -> bool:
    """Exact equivalence test via uncapped canonical forms."""
    if a.k != b.k:
        raise ValueError("tables must have the same input count")
    return (_canonical_cached(a.k, a.bits, float("inf"))[0]
            == _canonical_cached(b.k, b.bits, float("inf"))[0])


def cut_truth_table(g: GateGraph, cut) -> TruthTable:
    """Evaluate a cut's cone over all assignments of its leaves.

    Leaf j (in the cut's stored ascending-net-id order) drives bit j of
    the minterm index. The cone is the cut's interior gate set.
    """
    k = len(cut.leaves)
    if k > 8:
        raise ValueError("cut has more than 8 leaves")
    width = 1 << k
    mask = (1 << width) - 1
    masks = variable_masks(k)
    vals: dict[int, int] = {net: masks[j] for j, net in enumerate(cut.leaves)}
    pos = {gid: i for i, gid in enumerate(g.topo_order())}
    n_in = g.n_inputs
    for gid in sorted(cut.interior, key=pos.__getitem__):
        gate = g.gates[gid]
        vals[n_in + gid] = _eval_kind(gate.kind, [vals[f] for f in gate.fanins], mask)
    return TruthTable(k, vals[n_in + cut.root])
