"""Locking transforms: correctness, overhead, determinism, errors."""

import random

import pytest

from cutsig.benchgen import generate
from cutsig.locking import (
    SCHEMES,
    LockConfig,
    apply_lock,
    area_count,
    lock_lut,
    lock_mux,
    lock_sfll_hd,
    lock_trll,
    overhead_ratio,
    unlocked_equivalent,
    wrong_key_mismatch,
)
from cutsig.netlist import GraphBuilder, parse_bench, validate, write_bench
from cutsig.normalize import normalize


def sample_design(seed: int, n_in=12, n_gates=60):
    rng = random.Random(seed)
    b = GraphBuilder()
    pool = [b.add_input(f"i{i}") for i in range(n_in)]
    kinds = ["AND", "OR", "XOR", "NAND", "NOR", "XNOR", "NOT"]
    for j in range(n_gates):
        kind = rng.choice(kinds)
        fanins = [rng.choice(pool)] if kind == "NOT" else rng.sample(pool, 2)
        pool.append(b.add_gate(f"g{j}", kind, fanins))
    b.outputs = pool[-6:]
    g, _ = normalize(b.build())
    return g


@pytest.mark.parametrize("scheme", SCHEMES)
def test_lock_correct_key_equivalence(scheme):
    g = sample_design(5)
    locked, rec = apply_lock(g, LockConfig(scheme, 8, rng_seed=1))
    assert validate(locked) == []
    assert unlocked_equivalent(g, locked, rec)
    assert wrong_key_mismatch(g, locked, rec,
                              hd=4 if scheme == "sfllhd" else None)


@pytest.mark.parametrize("scheme", SCHEMES)
def test_lock_interface_preserved(scheme):
    g = sample_design(9)
    locked, rec = apply_lock(g, LockConfig(scheme, 8, rng_seed=2))
    assert locked.output_names == g.output_names
    assert locked.inputs[:g.n_inputs] == g.inputs
    assert list(locked.inputs[g.n_inputs:]) == rec.key_inputs
    assert rec.key_inputs == [f"keyinput{i}" for i in range(8)]
    assert locked.key_inputs == tuple(rec.key_inputs)
    assert set(rec.lock_gates) <= {gt.name for gt in locked.gates}
    assert locked.lock_gates >= set(rec.lock_gates)


def test_trll_gate_budget():
    # +1 gate per key bit, except NOT absorption which is free
    g = sample_design(13)
    n_not = sum(1 for gt in g.gates if gt.kind == "NOT")
    locked, rec = lock_trll(g, LockConfig("trll", 16, rng_seed=3))
    delta = area_count(locked) - area_count(g)
    assert 16 - n_not <= delta <= 16
    assert len(rec.key_bits) == 16 and len(rec.lock_gates) == 16


def test_trll_absorption_bits():
    # single NOT: absorbing yields XOR with key 1 or XNOR with key 0
    g = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(y)\nt = NOT(a)\ny = AND(t, b)\n")
    for seed in range(6):
        locked, rec = lock_trll(g, LockConfig("trll", 1, rng_seed=seed))
        assert unlocked_equivalent(g, locked, rec)
        kinds = {gt.name: gt.kind for gt in locked.gates}
        for name, bit in zip(rec.lock_gates, rec.key_bits):
            assert (kinds[name], bit) in (
                ("XOR", 1), ("XNOR", 0),   # absorbed inverter
                ("XOR", 0), ("XNOR", 1),   # pass-through wire gate
            )


def test_mux_gate_budget_and_acyclicity():
    g = sample_design(21)
    for seed in range(4):
        locked, rec = lock_mux(g, LockConfig("mux", 12, rng_seed=seed))
        assert area_count(locked) - area_count(g) == 4 * 12
        assert validate(locked) == []
        assert len(rec.lock_gates) == 4 * 12


def test_lut_gate_budget_and_config_bits():
    g = sample_design(27)
    locked, rec = lock_lut(g, LockConfig("lut", 16, rng_seed=4))
    assert area_count(locked) - area_count(g) == 10 * 4
    # key bits per site spell the replaced gate's truth table
    assert len(rec.key_bits) == 16
    assert unlocked_equivalent(g, locked, rec)


def test_lut_rejects_bad_key_size():
    g = sample_design(31)
    with pytest.raises(ValueError):
        lock_lut(g, LockConfig("lut", 6, rng_seed=0))


def test_sfllhd_structure():
    g = sample_design(33)
    cfg = LockConfig("sfllhd", 8, rng_seed=5)
    locked, rec = lock_sfll_hd(g, cfg)
    assert overhead_ratio(g, locked) > 1.0
    assert unlocked_equivalent(g, locked, rec)
    # strip plus restore and two popcount trees; far more than 8 gates
    assert area_count(locked) - area_count(g) > 3 * 8


def test_sfllhd_hd_default_and_overrides():
    g = sample_design(39)
    locked, rec = lock_sfll_hd(
        g, LockConfig("sfllhd", 6, hd=2, rng_seed=6,
                      protected_output=g.output_names[0],
                      selected_inputs=tuple(sorted(g.inputs)[:6])))
    assert unlocked_equivalent(g, locked, rec)
    with pytest.raises(ValueError):
        lock_sfll_hd(g, LockConfig("sfllhd", 6, rng_seed=0,
                                   selected_inputs=("i0", "nosuch", "i1",
                                                    "i2", "i3", "i4")))


def test_sfllhd_key_wider_than_inputs_rejected():
    g = sample_design(41, n_in=6, n_gates=30)
    with pytest.raises(ValueError):
        lock_sfll_hd(g, LockConfig("sfllhd", 7, rng_seed=0))


def test_lock_determinism_by_seed():
    g = sample_design(47)
    for scheme in SCHEMES:
        a1, r1 = apply_lock(g, LockConfig(scheme, 8, rng_seed=11))
        a2, r2 = apply_lock(g, LockConfig(scheme, 8, rng_seed=11))
        b1, _ = apply_lock(g, LockConfig(scheme, 8, rng_seed=12))
        assert write_bench(a1) == write_bench(a2)
        assert r1 == r2
        assert write_bench(a1) != write_bench(b1)


def test_lock_site_exhaustion_errors():
    tiny = parse_bench(
        "INPUT(a)\nINPUT(b)\nOUTPUT(y)\nt = AND(a, b)\ny = OR(t, a)\n")
    with pytest.raises(ValueError):
        lock_trll(tiny, LockConfig("trll", 8, rng_seed=0))
    with pytest.raises(ValueError):
        lock_mux(tiny, LockConfig("mux", 8, rng_seed=0))
    with pytest.raises(ValueError):
        lock_lut(tiny, LockConfig("lut", 12, rng_seed=0))


def test_lock_rejects_unnormalized_or_keyed_graphs():
    wide = parse_bench("INPUT(a)\nINPUT(b)\nINPUT(c)\nOUTPUT(y)\n"
                       "y = AND(a, b, c)\n")
    with pytest.raises(ValueError):
        lock_trll(wide, LockConfig("trll", 1, rng_seed=0))
    keyed = parse_bench("INPUT(a)\nINPUT(keyinput0)\nOUTPUT(y)\n"
                        "y = AND(a, keyinput0)\n")
    with pytest.raises(ValueError):
        lock_trll(keyed, LockConfig("trll", 1, rng_seed=0))


def test_lock_config_validation():
    with pytest.raises(ValueError):
        LockConfig("nosuch", 8)
    with pytest.raises(ValueError):
        LockConfig("trll", 0)
    with pytest.raises(ValueError):
        LockConfig("sfllhd", 8, hd=9)


def test_wrong_key_detected_on_benchmark():
    g, _ = normalize(generate("c432"))
    for scheme in SCHEMES:
        locked, rec = apply_lock(g, LockConfig(scheme, 8, rng_seed=7))
        assert unlocked_equivalent(g, locked, rec)
        assert wrong_key_mismatch(g, locked, rec,
                                  hd=4 if scheme == "sfllhd" else None)


def test_area_count_ignores_buffers():
    g = parse_bench("INPUT(a)\nOUTPUT(y)\nb1 = BUF(a)\nn = NOT(b1)\n"
                    "y = BUF(n)\n")
    assert area_count(g) == 1
