"""Character-level plagiarism detection measures and PAN annotation XML.

Cases and detections are pairs of character regions (suspect side, source
side). Precision and recall are macro-averaged over detections and cases;
granularity counts how many detections cover each detected case; plagdet
folds the three into one score.
"""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Iterable, Sequence


class AnnotationFormatError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class CharRegion:
    doc: str
    offset: int
    length: int

    def __post_init__(self):
        if self.offset < 0 or self.length < 1:
            raise ValueError(f"invalid region {self.doc}[{self.offset}:+{self.length}]")

    @property
    def end(self) -> int:
        return self.offset + self.length


@dataclass(frozen=True, order=True)
class Case:
    suspect: CharRegion
    source: CharRegion

    def regions(self) -> tuple[CharRegion, CharRegion]:
        return self.suspect, self.source


# detections carry the same shape as gold cases
Detection = Case


@dataclass
class MetricsReport:
    precision: float
    recall: float
    granularity: float
    plagdet: float
    n_cases: int = 0
    n_detections: int = 0
    n_detected_cases: int = 0

    @property
    def f1(self) -> float:
        return f1_score(self.precision, self.recall)

    def row(self) -> str:
        return (f"{self.precision:.3f}\t{self.recall:.3f}\t"
                f"{self.granularity:.3f}\t{self.plagdet:.3f}")


def char_set(x: Case) -> set[tuple[str, int]]:
    """All (doc, position) characters covered by either side of ``x``."""
    return {(r.doc, p) for r in x.regions() for p in range(r.offset, r.end)}


def _size(x: Case) -> int:
    # both sides may sit in the same document and overlap
    a, b = x.regions()
    if a.doc == b.doc:
        return _union_len([(a.offset, a.end), (b.offset, b.end)])
    return a.length + b.length


def _union(intervals):
    out = []
    for lo, hi in sorted(intervals):
        if out and lo <= out[-1][1]:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return out


def _union_len(intervals) -> int:
    return sum(hi - lo for lo, hi in _union(intervals))


def _covered(x: Case, others: Iterable[Case]) -> int:
    """|union over y of (char_set(x) & char_set(y))|."""
    per_doc: dict[str, list[tuple[int, int]]] = {}
    mine = x.regions()
    for y in others:
        for a in mine:
            for b in y.regions():
                if a.doc == b.doc:
                    lo, hi = max(a.offset, b.offset), min(a.end, b.end)
                    if lo < hi:
                        per_doc.setdefault(a.doc, []).append((lo, hi))
    return sum(_union_len(iv) for iv in per_doc.values())


def _overlaps(x: Case, y: Case) -> bool:
    return any(a.doc == b.doc and max(a.offset, b.offset) < min(a.end, b.end)
               for a in x.regions() for b in y.regions())


def _by_doc(items: Iterable[Case]) -> dict[str, list[Case]]:
    out: dict[str, list[Case]] = {}
    for it in items:
        for doc in {r.doc for r in it.regions()}:
            out.setdefault(doc, []).append(it)
    return out


def _related(x: Case, index: dict[str, list[Case]]) -> list[Case]:
    seen: dict[int, Case] = {}
    for r in x.regions():
        for y in index.get(r.doc, ()):
            seen[id(y)] = y
    return list(seen.values())


def _avg_coverage(items: Sequence[Case], against: Sequence[Case]) -> float:
    index = _by_doc(against)
    total = 0.0
    for x in items:
        total += _covered(x, _related(x, index)) / _size(x)
    return total / len(items)


def precision(cases: Sequence[Case], detections: Sequence[Case]) -> float:
    if not detections:
        return 1.0 if not cases else 0.0
    return _avg_coverage(detections, cases)


def recall(cases: Sequence[Case], detections: Sequence[Case]) -> float:
    if not cases:
        return 1.0
    return _avg_coverage(cases, detections)


def _detected(cases, detections) -> list[int]:
    index = _by_doc(detections)
    counts = []
    for s in cases:
        n = sum(1 for r in _related(s, index) if _overlaps(s, r))
        if n:
            counts.append(n)
    return counts


def granularity(cases: Sequence[Case], detections: Sequence[Case]) -> float:
    counts = _detected(cases, detections)
    if not counts:
        return 1.0
    return sum(counts) / len(counts)


def f1_score(prec: float, rec: float) -> float:
    if prec + rec == 0:
        return 0.0
    return 2 * prec * rec / (prec + rec)


def plagdet_score(prec: float, rec: float, gran: float) -> float:
    """F1 of precision and recall divided by log2(1 + granularity)."""
    return f1_score(prec, rec) / math.log2(1 + gran)


def plagdet(cases: Sequence[Case], detections: Sequence[Case]) -> MetricsReport:
    prec = precision(cases, detections)
    rec = recall(cases, detections)
    counts = _detected(cases, detections)
    gran = sum(counts) / len(counts) if counts else 1.0
    return MetricsReport(prec, rec, gran, plagdet_score(prec, rec, gran),
                         len(cases), len(detections), len(counts))


# --------------------------------------------------------------------------
# PAN annotation XML

_ATTRS = ("this_offset", "this_length", "source_reference", "source_offset", "source_length")
FEATURE_NAMES = ("plagiarism", "detected-plagiarism")


def parse_annotations(xml: str) -> tuple[str, list[Case]]:
    """Parse one PAN annotation document; returns ``(reference, cases)``.

    Features whose name is neither ``plagiarism`` nor
    ``detected-plagiarism`` (e.g. document metadata) are ignored.
    """
    try:
        root = ET.fromstring(xml)
    except ET.ParseError as e:
        raise AnnotationFormatError(f"malformed XML: {e}") from None
    if root.tag != "document" or "reference" not in root.attrib:
        raise AnnotationFormatError("root must be <document reference=...>")
    ref = root.attrib["reference"]
    suspect_id = ref[:-4] if ref.endswith(".txt") else ref
    cases = []
    for i, feat in enumerate(root.iter("feature")):
        if feat.get("name") not in FEATURE_NAMES:
            continue
        missing = [a for a in _ATTRS if a not in feat.attrib]
        if missing:
            raise AnnotationFormatError(f"feature {i}: missing attribute(s) {', '.join(missing)}")
        try:
            vals = {a: feat.attrib[a] for a in _ATTRS}
            src = vals["source_reference"]
            src = src[:-4] if src.endswith(".txt") else src
            cases.append(Case(
                CharRegion(suspect_id, int(vals["this_offset"]), int(vals["this_length"])),
                CharRegion(src, int(vals["source_offset"]), int(vals["source_length"]))))
        except ValueError as e:
            raise AnnotationFormatError(f"feature {i}: {e}") from None
    return suspect_id, cases


def write_annotations(reference: str, items: Iterable[Case], name: str = "detected-plagiarism") -> str:
    root = ET.Element("document", reference=reference)
    for c in items:
        ET.SubElement(root, "feature", {
            "name": name,
            "this_offset": str(c.suspect.offset),
            "this_length": str(c.suspect.length),
            "source_reference": c.source.doc,
            "source_offset": str(c.source.offset),
            "source_length": str(c.source.length),
        })
    ET.indent(root)
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


def write_detections(reference: str, detections: Iterable[Case]) -> str:
    return write_annotations(reference, detections, name="detected-plagiarism")
