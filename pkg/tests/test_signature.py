"""Signatures, Jaccard scoring, corpus ranking, heatmap aggregation."""

import random

import pytest

from cutsig.cuts import CutConfig
from cutsig.netlist import GraphBuilder, parse_bench
from cutsig.signature import (
    CorpusDb,
    DesignSignature,
    build_corpus,
    build_signature,
    build_similarity_matrix,
    compare_to_corpus,
    emit_heatmap,
    jaccard,
    mean_offdiagonal,
    topk_accuracy,
    true_reference,
)


def sig(design, classes, k=4, n=10):
    return DesignSignature(design, k, n, dict(classes))


def test_jaccard_set_mode():
    a = sig("a", {"x": 3, "y": 1})
    b = sig("b", {"y": 5, "z": 2})
    assert jaccard(a, b) == pytest.approx(1 / 3)
    assert jaccard(a, a) == 1.0


def test_jaccard_multiset_mode():
    a = sig("a", {"x": 3, "y": 1})
    b = sig("b", {"x": 1, "y": 2})
    # sum(min) = 1 + 1, sum(max) = 3 + 2
    assert jaccard(a, b, multiset=True) == pytest.approx(2 / 5)


def test_jaccard_empty_signatures():
    a = sig("a", {})
    b = sig("b", {})
    assert jaccard(a, b) == 1.0
    assert jaccard(a, b, multiset=True) == 1.0
    assert jaccard(a, sig("c", {"x": 1})) == 0.0


def test_jaccard_rejects_parameter_mismatch():
    with pytest.raises(ValueError):
        jaccard(sig("a", {}, k=4), sig("b", {}, k=6))
    with pytest.raises(ValueError):
        jaccard(sig("a", {}, n=10), sig("b", {}, n=20))


def test_signature_json_roundtrip():
    s = sig("c432", {"4:0001": 12, "4:0110": 3})
    s.exact_fraction = 0.875
    back = DesignSignature.from_obj(s.to_obj())
    assert back == s
    with pytest.raises(ValueError):
        DesignSignature.from_obj(
            {"design": "x", "k": 4, "n": 10, "classes": {"4:0001": 0}})


def test_build_signature_counts_cuts():
    g = parse_bench(
        "INPUT(a)\nINPUT(b)\nINPUT(c)\nOUTPUT(y)\n"
        "t = AND(a, b)\n"
        "y = AND(t, c)\n"
    )
    s = build_signature(g, CutConfig(k=3, n_select=10), design="tiny")
    assert s.design == "tiny"
    assert s.total_cuts() == 3
    # AND2 and AND3 are the only functions present
    assert set(s.classes) == {"2:1", "3:01"}
    assert s.exact_fraction == 1.0


def test_build_signature_skips_lock_interiors():
    g = parse_bench(
        "INPUT(a)\nINPUT(b)\nINPUT(keyinput0)\nOUTPUT(y)\n"
        "t = AND(a, b)\n"
        "kx = XOR(t, keyinput0)\n"
        "y = OR(kx, b)\n"
        "# LOCKGATE kx\n"
    )
    s = build_signature(g, CutConfig(k=3, n_select=10), design="locked")
    plain = parse_bench(
        "INPUT(a)\nINPUT(b)\nINPUT(kx)\nOUTPUT(y)\n"
        "t = AND(a, b)\n"
        "y = OR(kx, b)\n"
    )
    sp = build_signature(plain, CutConfig(k=3, n_select=10), design="plain")
    assert s.classes == sp.classes


def test_corpus_rejects_duplicates_and_mismatches():
    db = CorpusDb()
    db.add(sig("c432", {"x": 1}))
    with pytest.raises(ValueError):
        db.add(sig("c432", {"y": 1}))
    with pytest.raises(ValueError):
        db.add(sig("c880", {"x": 1}, k=6))
    assert db.params == (4, 10)


def test_corpus_json_roundtrip():
    db = build_corpus([sig("c432", {"4:0001": 2}), sig("c880", {"4:0110": 1})],
                      meta={"k": 4})
    back = CorpusDb.from_json(db.to_json())
    assert back.names() == ["c432", "c880"]
    assert back.meta["tool"] == "cutsig"
    assert back.get("c880").classes == {"4:0110": 1}
    with pytest.raises(KeyError):
        back.get("c499")


def test_compare_to_corpus_ranking_order():
    db = build_corpus([
        sig("far", {"p": 1, "q": 1}),
        sig("near", {"x": 2, "y": 1}),
        sig("tie", {"p": 1, "q": 1}),
    ])
    probe = sig("probe", {"x": 1, "y": 1})
    ranked = compare_to_corpus(probe, db)
    assert [name for name, _ in ranked] == ["near", "far", "tie"]
    assert ranked[0][1] == 1.0
    with pytest.raises(ValueError):
        compare_to_corpus(probe, CorpusDb())


def test_ranking_independent_of_corpus_order():
    entries = [sig(n, {c: 1}) for n, c in
               (("a", "x"), ("b", "y"), ("c", "z"))]
    probe = sig("probe", {"w": 1})
    rng = random.Random(79)
    baseline = None
    for _ in range(5):
        shuffled = entries[:]
        rng.shuffle(shuffled)
        ranked = compare_to_corpus(probe, build_corpus(shuffled))
        if baseline is None:
            baseline = ranked
        assert ranked == baseline


def test_true_reference_maps_excluded_design():
    assert true_reference("c499") == "c1355"
    assert true_reference("c432") == "c432"


def test_topk_accuracy():
    rankings = {
        "art1": [("c432", 0.9), ("c880", 0.2)],
        "art2": [("c880", 0.8), ("c432", 0.7)],
        "art3": [("c1355", 0.6), ("c432", 0.5)],
    }
    truths = {"art1": "c432", "art2": "c432", "art3": "c880"}
    acc = topk_accuracy(rankings, truths, k_list=(1, 2))
    assert acc[1] == pytest.approx(1 / 3)
    assert acc[2] == pytest.approx(2 / 3)
    with pytest.raises(ValueError):
        topk_accuracy(rankings, {"art1": "c432"})
    with pytest.raises(ValueError):
        topk_accuracy({}, {})


def test_similarity_matrix_and_heatmap():
    rows = [sig("l1", {"x": 1}), sig("l2", {"y": 1})]
    cols = [sig("r1", {"x": 1}), sig("r2", {"x": 1, "y": 1})]
    m = build_similarity_matrix(rows, cols)
    assert m.values == ((1.0, 0.5), (0.0, 0.5))
    text = emit_heatmap(m)
    lines = text.splitlines()
    assert lines[0] == "design,r1,r2"
    assert lines[1] == "l1,1.000,0.500"
    assert lines[2] == "l2,0.000,0.500"


def test_mean_offdiagonal_excludes_truth_column():
    rows = [sig("c499__trll", {"x": 1}), sig("c432__trll", {"y": 1})]
    cols = [sig("c1355", {"x": 1}), sig("c432", {"y": 1})]
    m = build_similarity_matrix(rows, cols)
    truths = {"c499__trll": "c1355", "c432__trll": "c432"}
    # only the two cross cells remain: (c499 row, c432 col) and vice versa
    assert mean_offdiagonal(m, truths) == pytest.approx(0.0)
    assert mean_offdiagonal(m) == pytest.approx(0.5)
