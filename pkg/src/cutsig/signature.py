"""Design signatures built from NPN classes of selected cuts.

A design's signature is the multiset of NPN canonical classes of its
selected k-cuts (largest-volume cuts per root). Signatures are compared
with Jaccard similarity over class sets (a count-weighted multiset mode
sits behind a flag), locked designs are ranked against a reference
corpus of unlocked signatures, and rankings aggregate into the usual
top-k accuracy tables and similarity heatmaps.

The reference corpus drops c499 whenever c1355 is present: the two are
functionally equivalent, so keeping both would make their mutual rank
a coin flip. ``EXCLUDED_EQUIVALENT`` records the mapping, and ground
truth for a locked c499 article resolves to c1355.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .cuts import CutConfig, CutEnumerator
from .netlist import GateGraph
from .npn import DEFAULT_BUDGET, cut_truth_table, npn_canonical

# design -> the functionally equivalent design that represents it
EXCLUDED_EQUIVALENT = {"c499": "c1355"}

TOPK_DEFAULT = (1, 5, 10, 20)


@dataclass
class DesignSignature:
    """NPN class occurrence counts for one design at fixed (k, n_select)."""

    design: str
    k: int
    n_select: int
    classes: dict[str, int] = field(default_factory=dict)
    exact_fraction: float = 1.0

    def class_set(self) -> frozenset[str]:
        return frozenset(self.classes)

    def total_cuts(self) -> int:
        return sum(self.classes.values())

    def to_obj(self) -> dict:
        return {
            "design": self.design,
            "k": self.k,
            "n": self.n_select,
            "classes": {c: n for c, n in sorted(self.classes.items())},
            "exact_fraction": round(self.exact_fraction, 6),
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "DesignSignature":
        classes = {str(c): int(n) for c, n in obj["classes"].items()}
        if any(n < 1 for n in classes.values()):
            raise ValueError("class counts must be >= 1")
        return cls(obj["design"], int(obj["k"]), int(obj["n"]), classes,
                   float(obj.get("exact_fraction", 1.0)))


def build_signature(g: GateGraph, cfg: CutConfig, design: str = "",
                    budget: int | None = DEFAULT_BUDGET) -> DesignSignature:
    """Enumerate, select, canonicalize, and count.

    Deterministic for a given graph and config. Lock-labeled gates are
    neither roots nor expandable, so labeled lock logic drops out of the
    signature except as cut leaves.
    """
    enum = CutEnumerator(g, cfg)
    classes: dict[str, int] = {}
    total = 0
    exact_n = 0
    for _root, cuts in enum.iter_selected():
        for cut in cuts:
            cls = npn_canonical(cut_truth_table(g, cut), budget)
            key = cls.key()
            classes[key] = classes.get(key, 0) + 1
            total += 1
            if cls.exact:
                exact_n += 1
    frac = exact_n / total if total else 1.0
    return DesignSignature(design, cfg.k, cfg.n_select,
                           dict(sorted(classes.items())), frac)


def _check_params(a: DesignSignature, b: DesignSignature) -> None:
    if (a.k, a.n_select) != (b.k, b.n_select):
        raise ValueError(
            f"signature parameter mismatch: ({a.k},{a.n_select}) "
            f"vs ({b.k},{b.n_select})")


def jaccard(a: DesignSignature, b: DesignSignature,
            multiset: bool = False) -> float:
    """Intersection over union of the two class sets, in [0, 1].

    Set mode ignores counts. Multiset mode scores
    sum(min(count)) / sum(max(count)) over the class union. Two empty
    signatures score 1.0 either way.
    """
    _check_params(a, b)
    if multiset:
        keys = set(a.classes) | set(b.classes)
        if not keys:
            return 1.0
        num = sum(min(a.classes.get(c, 0), b.classes.get(c, 0)) for c in keys)
        den = sum(max(a.classes.get(c, 0), b.classes.get(c, 0)) for c in keys)
        return num / den
    sa, sb = a.class_set(), b.class_set()
    if not sa and not sb:
        return 1.0
    return len(sa & sb) / len(sa | sb)


@dataclass
class CorpusDb:
    """Reference signatures sharing one (k, n_select) setting."""

    meta: dict = field(default_factory=dict)
    entries: list[DesignSignature] = field(default_factory=list)

    def __post_init__(self):
        seen: set[str] = set()
        for e in self.entries:
            if e.design in seen:
                raise ValueError(f"duplicate corpus entry '{e.design}'")
            seen.add(e.design)
            _check_params(self.entries[0], e)

    @property
    def params(self) -> tuple[int, int] | None:
        if not self.entries:
            return None
        return (self.entries[0].k, self.entries[0].n_select)

    def add(self, sig: DesignSignature) -> None:
        if any(e.design == sig.design for e in self.entries):
            raise ValueError(f"duplicate corpus entry '{sig.design}'")
        if self.entries:
            _check_params(self.entries[0], sig)
        self.entries.append(sig)

    def names(self) -> list[str]:
        return [e.design for e in self.entries]

    def get(self, design: str) -> DesignSignature:
        for e in self.entries:
            if e.design == design:
                return e
        raise KeyError(design)

    def to_json(self) -> str:
        obj = {
            "meta": self.meta,
            "entries": [e.to_obj() for e in self.entries],
        }
        return json.dumps(obj, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "CorpusDb":
        obj = json.loads(text)
        entries = [DesignSignature.from_obj(e) for e in obj["entries"]]
        return cls(dict(obj.get("meta", {})), entries)


def build_corpus(sigs, meta=None) -> CorpusDb:
    """Corpus from signatures, stamped with tool name and version."""
    from . import __version__
    m = {"tool": "cutsig", "version": __version__}
    m.update(meta or {})
    return CorpusDb(m, list(sigs))


def compare_to_corpus(sig: DesignSignature, db: CorpusDb,
                      multiset: bool = False) -> list[tuple[str, float]]:
    """Scores against every corpus entry, best first.

    Sorted by descending score, ties by design name, so the ranking is
    independent of corpus entry order.
    """
    if not db.entries:
        raise ValueError("empty corpus")
    scored = [(e.design, jaccard(sig, e, multiset=multiset))
              for e in db.entries]
    return sorted(scored, key=lambda t: (-t[1], t[0]))


def true_reference(design: str) -> str:
    """Ground-truth corpus name for a locked article of ``design``."""
    return EXCLUDED_EQUIVALENT.get(design, design)


def topk_accuracy(rankings: dict[str, list[tuple[str, float]]],
                  truths: dict[str, str],
                  k_list=TOPK_DEFAULT) -> dict[int, float]:
    """Fraction of articles whose true design appears in their top k.

    ``rankings`` maps article name to a ranked (design, score) list;
    ``truths`` maps article name to its true reference design.
    """
    if not rankings:
        raise ValueError("no rankings to score")
    missing = sorted(set(rankings) - set(truths))
    if missing:
        raise ValueError(f"missing ground truth for: {', '.join(missing)}")
    out: dict[int, float] = {}
    for k in k_list:
        hits = sum(
            1 for art, ranked in rankings.items()
            if truths[art] in [name for name, _ in ranked[:k]])
        out[k] = hits / len(rankings)
    return out


@dataclass
class SimilarityMatrix:
    """Jaccard scores of locked rows against reference columns."""

    rows: tuple[str, ...]
    cols: tuple[str, ...]
    values: tuple[tuple[float, ...], ...]


def build_similarity_matrix(row_sigs, col_sigs,
                            multiset: bool = False) -> SimilarityMatrix:
    rows = tuple(s.design for s in row_sigs)
    cols = tuple(s.design for s in col_sigs)
    values = tuple(
        tuple(jaccard(r, c, multiset=multiset) for c in col_sigs)
        for r in row_sigs)
    return SimilarityMatrix(rows, cols, values)


def emit_heatmap(m: SimilarityMatrix) -> str:
    """CSV text: header of reference names, one row per locked design,
    scores with 3 decimals."""
    lines = ["design," + ",".join(m.cols)]
    for name, row in zip(m.rows, m.values):
        lines.append(name + "," + ",".join(f"{v:.3f}" for v in row))
    return "\n".join(lines) + "\n"


def mean_offdiagonal(m: SimilarityMatrix, truths: dict[str, str] | None = None
                     ) -> float:
    """Average score over cells pairing a row with a non-matching column.

    A column matches a row when it equals the row's ground-truth name
    (``truths``), or the row name itself when no truth map is given.
    """
    vals = []
    for name, row in zip(m.rows, m.values):
        true = truths.get(name, name) if truths is not None else name
        vals.extend(v for col, v in zip(m.cols, row) if col != true)
    if not vals:
        raise ValueError("matrix has no off-diagonal cells")
    return sum(vals) / len(vals)
