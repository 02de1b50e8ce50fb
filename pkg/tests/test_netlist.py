"""Bench parsing, graph structure, simulation, and key records."""

import random

import pytest

from cutsig.netlist import (
    BenchError,
    GateGraph,
    GraphBuilder,
    KeyRecord,
    load_bench,
    parse_bench,
    same_structure,
    save_bench,
    validate,
    write_bench,
)

SMALL = """\
# two-gate sample
INPUT(a)
INPUT(b)
INPUT(keyinput0)
OUTPUT(y)
t = NAND(a, b)
y = XOR(t, keyinput0)
"""


def test_parse_bench_basics():
    g = parse_bench(SMALL)
    assert g.inputs == ("a", "b", "keyinput0")
    assert g.output_names == ("y",)
    assert [gt.name for gt in g.gates] == ["t", "y"]
    assert [gt.kind for gt in g.gates] == ["NAND", "XOR"]
    assert g.key_inputs == ("keyinput0",)
    assert validate(g) == []


def test_parse_bench_net_ids():
    g = parse_bench(SMALL)
    # PIs take ids 0..n-1, gate j drives net n_inputs + j
    assert g.net_id("a") == 0
    assert g.net_id("keyinput0") == 2
    assert g.net_id("t") == 3
    assert g.gates[1].fanins == (3, 2)
    assert g.net_name(4) == "y"


def test_parse_bench_kind_aliases_and_case():
    g = parse_bench("INPUT(a)\nOUTPUT(y)\nn = inv(a)\ny = buff(n)\n")
    assert [gt.kind for gt in g.gates] == ["NOT", "BUF"]


def test_parse_bench_rejects_garbage():
    with pytest.raises(BenchError):
        parse_bench("INPUT(a)\nOUTPUT(y)\ny = AND(a\n")
    with pytest.raises(BenchError):
        parse_bench("INPUT(a)\nINPUT(a)\nOUTPUT(a)\n")
    with pytest.raises(BenchError):
        parse_bench("INPUT(a)\nOUTPUT(y)\ny = FROB(a, a)\n")


def test_parse_bench_key_inputs_by_prefix_and_override():
    text = "INPUT(a)\nINPUT(k1)\nOUTPUT(y)\ny = AND(a, k1)\n"
    assert parse_bench(text).key_inputs == ()
    assert parse_bench(text, key_prefix="k").key_inputs == ("k1",)
    assert parse_bench(text, key_inputs=["k1"]).key_inputs == ("k1",)


def test_lockgate_comment_roundtrip():
    g = parse_bench(SMALL)
    locked = GateGraph(
        g.inputs,
        [(gt.name, gt.kind, [g.net_name(f) for f in gt.fanins]) for gt in g.gates],
        g.output_names,
        key_inputs=g.key_inputs,
        lock_gates=["y"],
    )
    text = write_bench(locked)
    assert "# LOCKGATE y" in text
    again = parse_bench(text)
    assert again.lock_gates == frozenset({"y"})
    assert same_structure(locked, again)


def test_write_parse_roundtrip_preserves_structure():
    g = parse_bench(SMALL)
    assert same_structure(g, parse_bench(write_bench(g)))


def test_save_load_roundtrip(tmp_path):
    g = parse_bench(SMALL)
    p = tmp_path / "small.bench"
    save_bench(g, p)
    assert same_structure(g, load_bench(p))


def test_validate_reports_dangling_and_no_outputs():
    g = GateGraph(["a"], [("y", "AND", ["a", "ghost"])], ["y"])
    diags = validate(g)
    assert any("ghost" in d for d in diags)
    assert validate(GateGraph(["a"], [("y", "NOT", ["a"])], [])) == ["no primary outputs"]


def test_validate_reports_arity_violations():
    g = GateGraph(["a"], [("y", "AND", ["a"])], ["y"])
    assert any("1 fanins" in d for d in validate(g))
    g = GateGraph(["a"], [("y", "NOT", ["a", "a"])], ["y"])
    assert any("2 fanins" in d for d in validate(g))
    g = GateGraph(["a", "b"], [("y", "MUX2", ["a", "b"])], ["y"])
    assert any("MUX2" in d for d in validate(g))


def test_validate_reports_cycles():
    g = GateGraph(["a"], [("p", "AND", ["a", "q"]), ("q", "NOT", ["p"])], ["q"])
    assert any("cycle" in d.lower() for d in validate(g))


def test_simulate_gate_semantics():
    g = parse_bench(
        "INPUT(a)\nINPUT(b)\nINPUT(s)\n"
        "OUTPUT(m)\nOUTPUT(z)\nOUTPUT(c1)\n"
        "n = NOR(a, b)\n"
        "x = XNOR(a, b)\n"
        "m = MUX2(s, a, b)\n"
        "z = AND(n, x)\n"
        "c1 = CONST1()\n"
    )
    for a in (0, 1):
        for b in (0, 1):
            for s in (0, 1):
                out = g.simulate({"a": a, "b": b, "s": s})
                assert out["m"] == (a if s else b)
                assert out["z"] == ((1 - (a | b)) & (1 - (a ^ b)))
                assert out["c1"] == 1


def test_simulate_bit_parallel_matches_scalar():
    rng = random.Random(7)
    g = parse_bench(SMALL)
    width = 64
    cols = {n: rng.getrandbits(width) for n in g.inputs}
    packed = g.simulate(cols, width=width)
    for t in range(width):
        single = g.simulate({n: (cols[n] >> t) & 1 for n in g.inputs})
        for name, v in single.items():
            assert (packed[name] >> t) & 1 == v


def test_simulate_missing_input_raises():
    g = parse_bench(SMALL)
    with pytest.raises(BenchError):
        g.simulate({"a": 1, "b": 0})


def test_key_record_roundtrip():
    rec = KeyRecord("trll", ["keyinput0", "keyinput1"], [1, 0], ["y"])
    back = KeyRecord.from_json(rec.to_json())
    assert back == rec
    assert back.key_assignment() == {"keyinput0": 1, "keyinput1": 0}


def test_key_record_rejects_bad_bits():
    with pytest.raises(ValueError):
        KeyRecord.from_json('{"scheme": "trll", "key_inputs": ["k0"], '
                            '"key_bits": "2", "lock_gates": []}')
    with pytest.raises(ValueError):
        KeyRecord.from_json('{"scheme": "trll", "key_inputs": ["k0", "k1"], '
                            '"key_bits": "1", "lock_gates": []}')


def test_graph_builder_rewrites():
    b = GraphBuilder.from_graph(parse_bench(SMALL))
    assert b.fresh("t") == "t_2"
    b.add_gate("t_2", "NOT", ["t"])
    assert b.replace_net("t", "t_2", skip=("t_2",)) == 1
    g = b.build()
    yg = g.gate_by_name("y")
    assert g.net_name(yg.fanins[0]) == "t_2"


def test_graph_builder_replace_net_rewires_outputs():
    b = GraphBuilder()
    b.add_input("a")
    b.add_gate("y", "NOT", ["a"])
    b.add_gate("y2", "BUF", ["y"])
    b.outputs = ["y"]
    assert b.replace_net("y", "y2", skip=("y2",)) == 1
    assert b.build().output_names == ("y2",)


def test_graph_builder_remove_and_duplicate_checks():
    b = GraphBuilder()
    b.add_input("a")
    b.add_gate("g", "NOT", ["a"])
    with pytest.raises(BenchError):
        b.add_gate("g", "NOT", ["a"])
    b.remove_gate("g")
    b.add_gate("g", "BUF", ["a"])
    b.outputs = ["g"]
    assert b.build().gates[0].kind == "BUF"


def test_topo_order_respects_dependencies():
    rng = random.Random(11)
    b = GraphBuilder()
    for i in range(8):
        b.add_input(f"i{i}")
    pool = [f"i{i}" for i in range(8)]
    for j in range(40):
        fanins = rng.sample(pool, 2)
        b.add_gate(f"g{j}", rng.choice(["AND", "OR", "XOR"]), fanins)
        pool.append(f"g{j}")
    b.outputs = [pool[-1]]
    g = b.build()
    seen = set(range(g.n_inputs))
    for j in g.topo_order():
        assert all(f in seen for f in g.gates[j].fanins)
        seen.add(g.n_inputs + j)
