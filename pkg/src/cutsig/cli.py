"""Command-line pipeline for locked-netlist signature evaluation.

Verbs compose the library end to end: ``parse`` (validate a bench),
``normalize``, ``lock``, ``label``, ``sign``, ``db build``, ``compare``,
``evaluate``, ``heatmap``, ``bench`` (materialize bundled designs), and
``repro`` (regenerate a full experiment grid from a JSON manifest).

The repro artifact tree is plain files under the manifest's outdir:

    benches/<design>.bench              normalized references
    signatures/<name>__cut<k>__top<n>.json
    corpus/refs__cut<k>__top<n>.json
    locked/<artifact>.bench / .key.json
    rankings/<artifact>__cut<k>__top<n>.json
    accuracy.csv, overhead.csv, heatmap__cut<k>__top<n>.csv, report.json

Reruns skip cells whose inputs are unchanged (content digests kept in
.digests.json); any cell failure is recorded in report.json and does not
abort the rest of the grid.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import os
import sys
from dataclasses import dataclass

from .benchgen import DESIGNS, generate_bench
from .cuts import CutConfig, cuts_debug_rows, enumerate_design
from .locking import (
    LockConfig, apply_lock, overhead_ratio, unlocked_equivalent,
)
from .lockid import builtin_templates, label_lock_gates, strip_lock_marks
from .netlist import (
    DEFAULT_KEY_PREFIX, BenchError, GateGraph, load_key, parse_bench,
    save_key, write_bench,
)
from .normalize import normalize
from .signature import (
    CorpusDb, DesignSignature, build_corpus, build_signature,
    build_similarity_matrix, compare_to_corpus, emit_heatmap, true_reference,
)

SCHEME_CHOICES = ("trll", "mux", "lut", "sfllhd")


# ---- manifest ----

@dataclass(frozen=True)
class ExperimentManifest:
    """Grid description for a repro run, loaded from JSON."""

    benchmarks: tuple[str, ...]
    schemes: tuple[str, ...]
    key_sizes: tuple[int, ...]
    seeds: tuple[int, ...]
    cut_sizes: tuple[int, ...]
    n_selects: tuple[int, ...]
    outdir: str
    reference_exclusions: tuple[str, ...] = ()
    key_prefix: str = DEFAULT_KEY_PREFIX

    def __post_init__(self):
        for fieldname in ("benchmarks", "schemes", "key_sizes", "seeds",
                          "cut_sizes", "n_selects"):
            if not getattr(self, fieldname):
                raise ValueError(f"manifest {fieldname} must be non-empty")
        for s in self.schemes:
            if s not in SCHEME_CHOICES:
                raise ValueError(f"unknown scheme '{s}'")
        if not self.outdir:
            raise ValueError("manifest outdir must be non-empty")
        names = [_design_name(e) for e in self.benchmarks]
        if len(set(names)) != len(names):
            raise ValueError("duplicate design names in benchmark list")

    @classmethod
    def from_obj(cls, obj: dict) -> "ExperimentManifest":
        lock = obj.get("lock_grid", {})
        cut = obj.get("cut_grid", {})
        return cls(
            benchmarks=tuple(obj["benchmarks"]),
            schemes=tuple(lock.get("schemes", ())),
            key_sizes=tuple(int(v) for v in lock.get("key_sizes", ())),
            seeds=tuple(int(v) for v in lock.get("seeds", (0,))),
            cut_sizes=tuple(int(v) for v in cut.get("k", ())),
            n_selects=tuple(int(v) for v in cut.get("n_select", ())),
            outdir=obj["outdir"],
            reference_exclusions=tuple(obj.get("reference_exclusions", ())),
            key_prefix=obj.get("key_prefix", DEFAULT_KEY_PREFIX),
        )

    @classmethod
    def from_file(cls, path: str) -> "ExperimentManifest":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_obj(json.load(fh))

    def to_obj(self) -> dict:
        return {
            "benchmarks": list(self.benchmarks),
            "reference_exclusions": list(self.reference_exclusions),
            "lock_grid": {"schemes": list(self.schemes),
                          "key_sizes": list(self.key_sizes),
                          "seeds": list(self.seeds)},
            "cut_grid": {"k": list(self.cut_sizes),
                         "n_select": list(self.n_selects)},
            "outdir": self.outdir,
            "key_prefix": self.key_prefix,
        }

    def cut_configs(self) -> list[tuple[int, int]]:
        return [(k, n) for k in self.cut_sizes for n in self.n_selects]


def _design_name(entry: str) -> str:
    base = os.path.basename(entry)
    return base[:-6] if base.endswith(".bench") else base


def _read_bench_entry(entry: str) -> str:
    """Bench text for a manifest entry: a file path, or a bundled name."""
    if os.path.exists(entry):
        with open(entry, "r", encoding="utf-8") as fh:
            return fh.read()
    if entry in DESIGNS:
        return generate_bench(entry)
    raise FileNotFoundError(f"benchmark '{entry}' is neither a file nor a "
                            f"bundled design")


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(path: str, text: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _sig_path(outdir: str, name: str, k: int, n: int) -> str:
    return os.path.join(outdir, "signatures", f"{name}__cut{k}__top{n}.json")


def _corpus_path(outdir: str, k: int, n: int) -> str:
    return os.path.join(outdir, "corpus", f"refs__cut{k}__top{n}.json")


def _artifact_id(design: str, scheme: str, key_size: int, seed: int) -> str:
    return f"{design}__{scheme}__key{key_size}__s{seed}"


def _digest(*parts: str) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(p.encode("utf-8"))
        h.update(b"\x00")
    return h.hexdigest()


# ---- repro worker cells (top level so a process pool can pickle them) ----

def _ref_cell(args: tuple) -> dict:
    entry, key_prefix, cut_cfgs, outdir = args
    design = _design_name(entry)
    try:
        g = parse_bench(_read_bench_entry(entry), key_prefix=key_prefix)
        norm, _rep = normalize(g)
        _write(os.path.join(outdir, "benches", f"{design}.bench"),
               write_bench(norm))
        for k, n in cut_cfgs:
            sig = build_signature(norm, CutConfig(k=k, n_select=n),
                                  design=design)
            _write(_sig_path(outdir, design, k, n), _dump_json(sig.to_obj()))
    except (ValueError, OSError) as e:
        return {"id": f"ref:{design}", "kind": "reference",
                "status": "failed", "error": str(e)}
    return {"id": f"ref:{design}", "kind": "reference", "status": "ok",
            "error": None}


def _lock_cell(args: tuple) -> dict:
    (design, scheme, key_size, seed, key_prefix, cut_cfgs, outdir) = args
    art = _artifact_id(design, scheme, key_size, seed)
    cell = {"id": f"lock:{art}", "kind": "artifact", "status": "ok",
            "error": None}
    try:
        bench_path = os.path.join(outdir, "benches", f"{design}.bench")
        with open(bench_path, "r", encoding="utf-8") as fh:
            g = parse_bench(fh.read(), key_prefix=key_prefix)
        cfg = LockConfig(scheme=scheme, key_size=key_size, rng_seed=seed,
                         key_prefix=key_prefix)
        locked, rec = apply_lock(g, cfg)
        public = strip_lock_marks(locked)
        _write(os.path.join(outdir, "locked", f"{art}.bench"),
               write_bench(public))
        save_key(rec, os.path.join(outdir, "locked", f"{art}.key.json"))
        labeled, lrep = label_lock_gates(public, builtin_templates(scheme),
                                         record=rec)
        cell["overhead"] = overhead_ratio(g, locked)
        cell["label_precision"] = lrep.precision
        cell["label_recall"] = lrep.recall
        _write(os.path.join(outdir, "locked", f"{art}.meta.json"),
               _dump_json({"artifact": art, "design": design,
                           "scheme": scheme, "key_size": key_size,
                           "seed": seed, "overhead": cell["overhead"],
                           "label_precision": lrep.precision,
                           "label_recall": lrep.recall}))
        for k, n in cut_cfgs:
            sig = build_signature(labeled, CutConfig(k=k, n_select=n),
                                  design=art)
            _write(_sig_path(outdir, art, k, n), _dump_json(sig.to_obj()))
            with open(_corpus_path(outdir, k, n), "r", encoding="utf-8") as fh:
                db = CorpusDb.from_json(fh.read())
            ranking = compare_to_corpus(sig, db)
            _write(os.path.join(outdir, "rankings",
                                f"{art}__cut{k}__top{n}.json"),
                   _dump_json({
                       "artifact": art, "design": design, "scheme": scheme,
                       "key_size": key_size, "seed": seed, "k": k,
                       "n_select": n, "truth": true_reference(design),
                       "ranking": [[name, score] for name, score in ranking],
                   }))
    except (ValueError, OSError) as e:
        cell["status"] = "failed"
        cell["error"] = str(e)
    return cell


def _run_cells(cells: list[tuple], worker, jobs: int) -> list[dict]:
    if jobs <= 1 or len(cells) <= 1:
        return [worker(c) for c in cells]
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, cells))


# ---- report assembly ----

def _load_rankings(outdir: str) -> list[dict]:
    rankdir = os.path.join(outdir, "rankings")
    if not os.path.isdir(rankdir):
        return []
    out = []
    for name in sorted(os.listdir(rankdir)):
        if name.endswith(".json"):
            with open(os.path.join(rankdir, name), "r",
                      encoding="utf-8") as fh:
                out.append(json.load(fh))
    return out


def accuracy_csv(records: list[dict], schemes, key_sizes, cut_cfgs) -> str:
    """Table of top-1 identification accuracy.

    One row per (scheme, key size), one column per (cut size, selection
    count); cells aggregate all (design, seed) artifacts, blank when no
    artifact was generated for the row; final row averages each column
    over the rows that have a value.
    """
    hits: dict = {}
    totals: dict = {}
    for rec in records:
        cell = (rec["scheme"], rec["key_size"], rec["k"], rec["n_select"])
        totals[cell] = totals.get(cell, 0) + 1
        if rec["ranking"] and rec["ranking"][0][0] == rec["truth"]:
            hits[cell] = hits.get(cell, 0) + 1
    header = ["lock", "key_size"] + [f"cut{k}_top{n}" for k, n in cut_cfgs]
    lines = [",".join(header)]
    col_acc: dict = {c: [] for c in cut_cfgs}
    for scheme in schemes:
        for ks in sorted(key_sizes):
            row = [scheme, str(ks)]
            for k, n in cut_cfgs:
                cell = (scheme, ks, k, n)
                if totals.get(cell):
                    acc = hits.get(cell, 0) / totals[cell]
                    row.append(f"{acc:.3f}")
                    col_acc[(k, n)].append(acc)
                else:
                    row.append("")
            lines.append(",".join(row))
    avg = ["average", ""]
    for c in cut_cfgs:
        vals = col_acc[c]
        avg.append(f"{sum(vals) / len(vals):.3f}" if vals else "")
    lines.append(",".join(avg))
    return "\n".join(lines) + "\n"


def _load_artifact_meta(outdir: str) -> list[dict]:
    lockdir = os.path.join(outdir, "locked")
    if not os.path.isdir(lockdir):
        return []
    out = []
    for name in sorted(os.listdir(lockdir)):
        if name.endswith(".meta.json"):
            with open(os.path.join(lockdir, name), "r",
                      encoding="utf-8") as fh:
                out.append(json.load(fh))
    return out


def _overhead_csv(metas: list[dict]) -> str:
    lines = ["design,scheme,key_size,seed,area_ratio"]
    rows = sorted((m["design"], m["scheme"], m["key_size"], m["seed"],
                   m["overhead"]) for m in metas)
    for design, scheme, ks, seed, ratio in rows:
        lines.append(f"{design},{scheme},{ks},{seed},{ratio:.3f}")
    return "\n".join(lines) + "\n"


def _load_sig(outdir: str, name: str, k: int, n: int) -> DesignSignature:
    with open(_sig_path(outdir, name, k, n), "r", encoding="utf-8") as fh:
        return DesignSignature.from_obj(json.load(fh))


def run_repro(manifest: ExperimentManifest, jobs: int = 1,
              seed_override: int | None = None) -> dict:
    """Execute the full grid; returns the run report (also written)."""
    if seed_override is not None:
        manifest = ExperimentManifest.from_obj(
            {**manifest.to_obj(),
             "lock_grid": {"schemes": list(manifest.schemes),
                           "key_sizes": list(manifest.key_sizes),
                           "seeds": [seed_override]}})
    outdir = manifest.outdir
    cut_cfgs = manifest.cut_configs()
    os.makedirs(outdir, exist_ok=True)
    digest_path = os.path.join(outdir, ".digests.json")
    digests: dict[str, str] = {}
    if os.path.exists(digest_path):
        with open(digest_path, "r", encoding="utf-8") as fh:
            digests = json.load(fh)
    from . import __version__
    cfg_tag = _dump_json({"cuts": cut_cfgs, "version": __version__,
                          "prefix": manifest.key_prefix})

    # phase A: normalize references and sign them per cut config
    designs = [_design_name(e) for e in manifest.benchmarks]
    ref_cells: list[dict] = []
    todo = []
    for entry in manifest.benchmarks:
        design = _design_name(entry)
        try:
            dig = _digest("ref", _read_bench_entry(entry), cfg_tag)
        except OSError as e:
            ref_cells.append({"id": f"ref:{design}", "kind": "reference",
                              "status": "failed", "error": str(e)})
            continue
        outs = [os.path.join(outdir, "benches", f"{design}.bench")]
        outs += [_sig_path(outdir, design, k, n) for k, n in cut_cfgs]
        if digests.get(f"ref:{design}") == dig and all(
                os.path.exists(p) for p in outs):
            ref_cells.append({"id": f"ref:{design}", "kind": "reference",
                              "status": "skipped", "error": None})
        else:
            todo.append((entry, manifest.key_prefix, cut_cfgs, outdir))
            digests[f"ref:{design}"] = dig
    done = _run_cells(todo, _ref_cell, jobs)
    for cell in done:
        if cell["status"] == "failed":
            digests.pop(cell["id"], None)
    ref_cells.extend(done)
    ref_ok = {c["id"].split(":", 1)[1] for c in ref_cells
              if c["status"] in ("ok", "skipped")}

    # phase B: assemble reference corpora (exclusions left out)
    ref_names = [d for d in designs
                 if d in ref_ok and d not in manifest.reference_exclusions]
    for k, n in cut_cfgs:
        sigs = [_load_sig(outdir, d, k, n) for d in ref_names]
        db = build_corpus(sigs)
        _write(_corpus_path(outdir, k, n), db.to_json())

    # phase C: lock, label, sign, rank each grid artifact
    corpus_texts = []
    for k, n in cut_cfgs:
        with open(_corpus_path(outdir, k, n), "r", encoding="utf-8") as fh:
            corpus_texts.append(fh.read())
    corpus_tag = _digest(*corpus_texts)
    lock_cells: list[dict] = []
    todo = []
    for design in designs:
        if design not in ref_ok:
            continue
        bench_path = os.path.join(outdir, "benches", f"{design}.bench")
        with open(bench_path, "r", encoding="utf-8") as fh:
            bench_text = fh.read()
        for scheme in manifest.schemes:
            for ks in manifest.key_sizes:
                for seed in manifest.seeds:
                    art = _artifact_id(design, scheme, ks, seed)
                    dig = _digest("lock", bench_text, scheme, str(ks),
                                  str(seed), corpus_tag, cfg_tag)
                    outs = [os.path.join(outdir, "locked", f"{art}.bench"),
                            os.path.join(outdir, "locked",
                                         f"{art}.meta.json")]
                    outs += [os.path.join(outdir, "rankings",
                                          f"{art}__cut{k}__top{n}.json")
                             for k, n in cut_cfgs]
                    outs += [_sig_path(outdir, art, k, n)
                             for k, n in cut_cfgs]
                    if digests.get(f"lock:{art}") == dig and all(
                            os.path.exists(p) for p in outs):
                        lock_cells.append({"id": f"lock:{art}",
                                           "kind": "artifact",
                                           "status": "skipped",
                                           "error": None})
                    else:
                        todo.append((design, scheme, ks, seed,
                                     manifest.key_prefix, cut_cfgs, outdir))
                        digests[f"lock:{art}"] = dig
    done = _run_cells(todo, _lock_cell, jobs)
    for cell in done:
        if cell["status"] == "failed":
            digests.pop(cell["id"], None)
    lock_cells.extend(done)

    # phase D: aggregate tables (from disk, so resumed cells contribute;
    # stale artifacts outside the current grid are ignored)
    def in_grid(rec: dict) -> bool:
        return (rec["design"] in designs
                and rec["scheme"] in manifest.schemes
                and rec["key_size"] in manifest.key_sizes
                and rec["seed"] in manifest.seeds
                and (rec["k"], rec["n_select"]) in cut_cfgs)

    records = [r for r in _load_rankings(outdir) if in_grid(r)]
    _write(os.path.join(outdir, "accuracy.csv"),
           accuracy_csv(records, manifest.schemes, manifest.key_sizes,
                        cut_cfgs))
    metas = [m for m in _load_artifact_meta(outdir)
             if m["design"] in designs and m["scheme"] in manifest.schemes
             and m["key_size"] in manifest.key_sizes
             and m["seed"] in manifest.seeds]
    _write(os.path.join(outdir, "overhead.csv"), _overhead_csv(metas))
    arts = sorted({rec["artifact"] for rec in records})
    n_top = max(manifest.n_selects)
    for k in manifest.cut_sizes:
        have = [a for a in arts
                if os.path.exists(_sig_path(outdir, a, k, n_top))]
        row_sigs = [_load_sig(outdir, a, k, n_top) for a in have]
        col_sigs = [_load_sig(outdir, d, k, n_top) for d in ref_names]
        if not row_sigs or not col_sigs:
            continue
        m = build_similarity_matrix(row_sigs, col_sigs)
        _write(os.path.join(outdir, f"heatmap__cut{k}__top{n_top}.csv"),
               emit_heatmap(m))

    cells = sorted(ref_cells + lock_cells, key=lambda c: c["id"])
    report = {
        "manifest": manifest.to_obj(),
        "cells": cells,
        "summary": {
            "ok": sum(1 for c in cells if c["status"] == "ok"),
            "skipped": sum(1 for c in cells if c["status"] == "skipped"),
            "failed": sum(1 for c in cells if c["status"] == "failed"),
        },
    }
    _write(os.path.join(outdir, "report.json"), _dump_json(report))
    _write(digest_path, _dump_json(digests))
    return report


# ---- verb implementations ----

def _load_graph_arg(path: str, key_prefix: str, keys: str | None) -> GateGraph:
    key_inputs = keys.split(",") if keys else None
    with open(path, "r", encoding="utf-8") as fh:
        return parse_bench(fh.read(), key_prefix=key_prefix,
                           key_inputs=key_inputs)


def _cmd_parse(a) -> int:
    g = _load_graph_arg(a.infile, a.key_prefix, a.keys)
    print(f"{a.infile}: {g.n_inputs} inputs, {len(g.outputs)} outputs, "
          f"{g.n_gates} gates, {len(g.key_inputs)} key inputs, "
          f"{len(g.lock_gates)} lock gates")
    return 0


def _cmd_normalize(a) -> int:
    g = _load_graph_arg(a.infile, a.key_prefix, None)
    norm, rep = normalize(g)
    _write(a.out, write_bench(norm))
    if a.report:
        _write(a.report, rep.to_json())
    print(f"{a.infile}: {rep.gates_before} -> {rep.gates_after} gates "
          f"({rep.constants_folded} folded, {rep.strash_merges} merged)")
    return 0


def _cmd_lock(a) -> int:
    g = _load_graph_arg(a.infile, a.key_prefix, None)
    cfg = LockConfig(scheme=a.scheme, key_size=a.key_size, hd=a.hd,
                     rng_seed=a.seed, key_prefix=a.key_prefix)
    locked, rec = apply_lock(g, cfg)
    if a.check and not unlocked_equivalent(g, locked, rec):
        raise ValueError("correct-key equivalence check failed")
    _write(a.out, write_bench(strip_lock_marks(locked)))
    save_key(rec, a.keyfile)
    print(f"{a.infile}: locked with {a.scheme} key_size={a.key_size} "
          f"(+{len(rec.lock_gates)} gates)")
    return 0


def _cmd_label(a) -> int:
    g = _load_graph_arg(a.infile, a.key_prefix, a.keys)
    rec = load_key(a.keyfile) if a.keyfile else None
    labeled, rep = label_lock_gates(g, builtin_templates(a.scheme),
                                    record=rec)
    _write(a.out, write_bench(labeled))
    if a.report:
        _write(a.report, rep.to_json())
    line = f"{a.infile}: labeled {len(rep.labeled_gates)} gates"
    if rep.recall is not None:
        line += f" (precision {rep.precision:.3f}, recall {rep.recall:.3f})"
    print(line)
    return 0


def _cmd_sign(a) -> int:
    g = _load_graph_arg(a.infile, a.key_prefix, a.keys)
    if a.normalize:
        g, _ = normalize(g)
    design = a.design or _design_name(a.infile)
    cfg = CutConfig(k=a.k, max_search=a.max_search, n_select=a.n_select)
    sig = build_signature(g, cfg, design=design)
    _write(a.out, _dump_json(sig.to_obj()))
    print(f"{design}: {len(sig.classes)} classes over {sig.total_cuts()} "
          f"cuts (k={a.k}, top {a.n_select})")
    return 0


def _cmd_db(a) -> int:
    if a.db_verb != "build":
        raise ValueError(f"unknown db sub-verb '{a.db_verb}'")
    exclude = set(a.exclude.split(",")) if a.exclude else set()
    cfg = CutConfig(k=a.k, max_search=a.max_search, n_select=a.n_select)
    sigs = []
    for path in a.benches:
        design = _design_name(path)
        if design in exclude:
            continue
        g = parse_bench(_read_bench_entry(path), key_prefix=a.key_prefix)
        if not a.raw:
            g, _ = normalize(g)
        sigs.append(build_signature(g, cfg, design=design))
    db = build_corpus(sigs)
    _write(a.out, db.to_json())
    print(f"{a.out}: {len(db.names())} designs (k={a.k}, top {a.n_select})")
    return 0


def _cmd_compare(a) -> int:
    with open(a.sig, "r", encoding="utf-8") as fh:
        sig = DesignSignature.from_obj(json.load(fh))
    with open(a.db, "r", encoding="utf-8") as fh:
        db = CorpusDb.from_json(fh.read())
    ranking = compare_to_corpus(sig, db, multiset=a.multiset)
    if a.out:
        _write(a.out, _dump_json(
            {"design": sig.design,
             "ranking": [[name, score] for name, score in ranking]}))
    for name, score in ranking:
        print(f"{score:.4f}  {name}")
    return 0


def _cmd_evaluate(a) -> int:
    records = _load_rankings(a.run_dir)
    if not records:
        raise ValueError(f"no rankings under '{a.run_dir}'")
    schemes = sorted({r["scheme"] for r in records})
    key_sizes = sorted({r["key_size"] for r in records})
    cut_cfgs = sorted({(r["k"], r["n_select"]) for r in records})
    text = accuracy_csv(records, schemes, key_sizes, cut_cfgs)
    _write(a.out, text)
    print(text, end="")
    return 0


def _cmd_heatmap(a) -> int:
    with open(a.db, "r", encoding="utf-8") as fh:
        db = CorpusDb.from_json(fh.read())
    row_sigs = []
    for path in a.sigs:
        with open(path, "r", encoding="utf-8") as fh:
            row_sigs.append(DesignSignature.from_obj(json.load(fh)))
    col_sigs = [db.get(name) for name in db.names()]
    m = build_similarity_matrix(row_sigs, col_sigs, multiset=a.multiset)
    text = emit_heatmap(m)
    if a.out:
        _write(a.out, text)
    else:
        print(text, end="")
    return 0


def _cmd_cuts(a) -> int:
    g = _load_graph_arg(a.infile, a.key_prefix, a.keys)
    cfg = CutConfig(k=a.k, max_search=a.max_search, n_select=a.n_select)
    rows = cuts_debug_rows(g, enumerate_design(g, cfg))
    text = "\n".join(rows) + "\n"
    if a.out:
        _write(a.out, text)
    else:
        print(text, end="")
    return 0


def _cmd_bench(a) -> int:
    names = list(DESIGNS) if a.design == "all" else [a.design]
    for name in names:
        text = generate_bench(name)
        path = os.path.join(a.outdir, f"{name}.bench")
        _write(path, text)
        print(path)
    return 0


def _cmd_repro(a) -> int:
    manifest = ExperimentManifest.from_file(a.manifest)
    if a.outdir:
        manifest = ExperimentManifest.from_obj(
            {**manifest.to_obj(), "outdir": a.outdir})
    report = run_repro(manifest, jobs=a.jobs, seed_override=a.seed)
    s = report["summary"]
    print(f"{manifest.outdir}: {s['ok']} ok, {s['skipped']} skipped, "
          f"{s['failed']} failed")
    for cell in report["cells"]:
        if cell["status"] == "failed":
            print(f"  {cell['id']}: {cell['error']}", file=sys.stderr)
    return 0 if s["failed"] == 0 else 1


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cutsig",
        description="Cut-signature identification of locked netlists.")
    sub = p.add_subparsers(dest="verb", required=True)

    def common(sp, keys=False):
        sp.add_argument("--key-prefix", default=DEFAULT_KEY_PREFIX,
                        help="input-name prefix marking key inputs")
        if keys:
            sp.add_argument("--keys", default=None,
                            help="explicit comma-separated key input names")

    sp = sub.add_parser("parse", help="parse and validate a bench file")
    sp.add_argument("--in", dest="infile", required=True)
    common(sp, keys=True)
    sp.set_defaults(fn=_cmd_parse)

    sp = sub.add_parser("normalize",
                        help="rewrite to the 2-input normal form")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--report", default=None)
    common(sp)
    sp.set_defaults(fn=_cmd_normalize)

    sp = sub.add_parser("lock", help="insert key-based locking logic")
    sp.add_argument("--scheme", required=True, choices=SCHEME_CHOICES)
    sp.add_argument("--key-size", type=int, required=True)
    sp.add_argument("--hd", type=int, default=None,
                    help="sfllhd Hamming distance (default key_size/2)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--keyfile", required=True)
    sp.add_argument("--check", action="store_true",
                    help="verify correct-key equivalence before writing")
    common(sp)
    sp.set_defaults(fn=_cmd_lock)

    sp = sub.add_parser("label", help="identify lock gates from structure")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--scheme", required=True, choices=SCHEME_CHOICES)
    sp.add_argument("--keyfile", default=None,
                    help="ground-truth key record for precision/recall")
    sp.add_argument("--out", required=True)
    sp.add_argument("--report", default=None)
    common(sp, keys=True)
    sp.set_defaults(fn=_cmd_label)

    sp = sub.add_parser("sign", help="signature of one design")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--k", type=int, default=4)
    sp.add_argument("--n-select", type=int, default=10)
    sp.add_argument("--max-search", type=int, default=10000)
    sp.add_argument("--design", default=None)
    sp.add_argument("--normalize", action="store_true",
                    help="normalize before signing (skipped by default so "
                         "lock labels survive)")
    sp.add_argument("--out", required=True)
    common(sp, keys=True)
    sp.set_defaults(fn=_cmd_sign)

    sp = sub.add_parser("db", help="reference corpus operations")
    sp.add_argument("db_verb", choices=["build"])
    sp.add_argument("benches", nargs="+",
                    help="bench files or bundled design names")
    sp.add_argument("--out", required=True)
    sp.add_argument("--k", type=int, default=4)
    sp.add_argument("--n-select", type=int, default=10)
    sp.add_argument("--max-search", type=int, default=10000)
    sp.add_argument("--exclude", default=None,
                    help="comma-separated design names to leave out")
    sp.add_argument("--raw", action="store_true",
                    help="skip normalization before signing")
    common(sp)
    sp.set_defaults(fn=_cmd_db)

    sp = sub.add_parser("compare", help="rank a signature against a corpus")
    sp.add_argument("--sig", required=True)
    sp.add_argument("--db", required=True)
    sp.add_argument("--multiset", action="store_true")
    sp.add_argument("--out", default=None)
    sp.set_defaults(fn=_cmd_compare)

    sp = sub.add_parser("evaluate",
                        help="accuracy table from a repro run's rankings")
    sp.add_argument("--run-dir", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=_cmd_evaluate)

    sp = sub.add_parser("heatmap", help="similarity matrix CSV")
    sp.add_argument("sigs", nargs="+", help="row signature JSON files")
    sp.add_argument("--db", required=True)
    sp.add_argument("--multiset", action="store_true")
    sp.add_argument("--out", default=None)
    sp.set_defaults(fn=_cmd_heatmap)

    sp = sub.add_parser("cuts", help="debug dump of enumerated cuts")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--k", type=int, default=4)
    sp.add_argument("--n-select", type=int, default=10)
    sp.add_argument("--max-search", type=int, default=10000)
    sp.add_argument("--out", default=None)
    common(sp, keys=True)
    sp.set_defaults(fn=_cmd_cuts)

    sp = sub.add_parser("bench", help="materialize bundled benchmark designs")
    sp.add_argument("--design", required=True,
                    help="a bundled design name, or 'all'")
    sp.add_argument("--outdir", default=".")
    sp.set_defaults(fn=_cmd_bench)

    sp = sub.add_parser("repro", help="regenerate an experiment grid")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--seed", type=int, default=None,
                    help="override the manifest's seed list")
    sp.add_argument("--outdir", default=None,
                    help="override the manifest's output directory")
    sp.set_defaults(fn=_cmd_repro)
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (BenchError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
