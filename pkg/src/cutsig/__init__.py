"""Locality-based structural signatures for locked gate-level netlists.

The package models combinational netlists (``netlist``), rewrites them into
a 2-input normal form (``normalize``), inserts four kinds of key-based
locking logic (``locking``), labels lock logic back from a locked netlist
(``lockid``), enumerates k-feasible cuts (``cuts``), canonicalizes cut
functions under input/output negation and input permutation (``npn``), and
turns the resulting class distributions into design signatures that can be
ranked against a reference corpus (``signature``). ``cli`` ties the pieces
into a command-line workflow, and ``benchgen`` provides a deterministic
synthetic benchmark family shaped like the classic ISCAS'85 designs.
"""

from .netlist import (
    GateGraph,
    GraphBuilder,
    Gate,
    KeyRecord,
    BenchError,
    parse_bench,
    write_bench,
    load_bench,
    save_bench,
    validate,
)
from .normalize import NormalizeReport, decompose_to_2input, fold_constants, normalize, strash
from .npn import NpnClass, TruthTable, cut_truth_table, npn_canonical, npn_equivalent
from .cuts import Cut, CutConfig, CutEnumerator, enumerate_cuts, enumerate_design, select_top_cuts
from .locking import LockConfig, apply_lock, lock_lut, lock_mux, lock_sfll_hd, lock_trll, overhead_ratio
from .lockid import LabelReport, LockTemplate, builtin_templates, label_lock_gates
from .signature import CorpusDb, DesignSignature, build_signature, compare_to_corpus, jaccard

__version__ = "0.1.0"

__all__ = [
    "GateGraph",
    "GraphBuilder",
    "Gate",
    "KeyRecord",
    "BenchError",
    "parse_bench",
    "write_bench",
    "load_bench",
    "save_bench",
    "validate",
    "NormalizeReport",
    "decompose_to_2input",
    "fold_constants",
    "normalize",
    "strash",
    "NpnClass",
    "TruthTable",
    "cut_truth_table",
    "npn_canonical",
    "npn_equivalent",
    "Cut",
    "CutConfig",
    "CutEnumerator",
    "enumerate_cuts",
    "enumerate_design",
    "select_top_cuts",
    "LockConfig",
    "apply_lock",
    "lock_trll",
    "lock_mux",
    "lock_lut",
    "lock_sfll_hd",
    "overhead_ratio",
    "LockTemplate",
    "LabelReport",
    "builtin_templates",
    "label_lock_gates",
    "DesignSignature",
    "CorpusDb",
    "build_signature",
    "jaccard",
    "compare_to_corpus",
    "__version__",
]
