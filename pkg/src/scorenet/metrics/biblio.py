"""Paper-level productivity and citation statistics."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from ..graph import BipartiteGraph

__all__ = [
    "Paper",
    "BiblioRecord",
    "YearProductivity",
    "CitationStats",
    "author_paper_counts",
    "productivity_by_year",
    "overall_papers_per_author",
    "coauthors_by_year",
    "citation_classification",
    "CITATION_CLASSES",
]

CITATION_CLASSES = ("self", "coauthor", "distant")


@dataclass(frozen=True)
class Paper:
    paper_id: str
    year: int
    authors: tuple[str, ...]


@dataclass
class BiblioRecord:
    """
    Papers with years and authors, plus paper-to-paper citations.

    ``citations`` holds ``(citing id, cited id)`` pairs; both ends must be
    known papers and a paper may not cite itself.
    """

    papers: list[Paper]
    citations: list[tuple[str, str]] = field(default_factory=list)
    year_range: tuple[int, int] | None = None

    def __post_init__(self):
        self.papers = [p if isinstance(p, Paper) else Paper(str(p[0]), int(p[1]), tuple(p[2]))
                       for p in self.papers]
        self._by_id = {}
        for p in self.papers:
            if p.paper_id in self._by_id:
                raise ValueError(f"duplicate paper id {p.paper_id!r}")
            if not p.authors:
                raise ValueError(f"paper {p.paper_id!r} has no authors")
            if self.year_range and not self.year_range[0] <= p.year <= self.year_range[1]:
                raise ValueError(f"paper {p.paper_id!r} year {p.year} outside {self.year_range}")
            self._by_id[p.paper_id] = p
        cleaned = []
        for src, dst in self.citations:
            src, dst = str(src), str(dst)
            for pid in (src, dst):
                if pid not in self._by_id:
                    raise ValueError(f"citation refers to unknown paper {pid!r}")
            if src == dst:
                raise ValueError(f"paper {src!r} cites itself")
            cleaned.append((src, dst))
        self.citations = cleaned

    def paper(self, pid: str) -> Paper:
        return self._by_id[pid]

    @property
    def authors(self) -> list[str]:
        return sorted({a for p in self.papers for a in p.authors})

    @classmethod
    def from_bipartite(cls, b: BipartiteGraph, years: Sequence[int],
                       citations=(), paper_ids=None) -> "BiblioRecord":
        """Build from an author-paper incidence matrix and per-paper years."""
        if len(years) != b.n_right:
            raise ValueError("need one year per paper")
        names = b.node_ids or [str(i) for i in range(b.n_left)]
        pids = paper_ids or [str(j) for j in range(b.n_right)]
        csc = b.biadjacency().tocsc()
        papers = []
        for j in range(b.n_right):
            rows = csc.indices[csc.indptr[j]:csc.indptr[j + 1]]
            papers.append(Paper(pids[j], int(years[j]), tuple(names[i] for i in rows)))
        return cls(papers, [(pids[s], pids[t]) for s, t in citations])


def author_paper_counts(source, counting: str = "divided") -> np.ndarray:
    """
    Papers credited to each author.

    ``divided`` credits each of a paper's ``k`` authors with ``1/k``;
    ``non_divided`` credits each with a whole paper. ``source`` is a
    :class:`BipartiteGraph` (result indexed by author) or a
    :class:`BiblioRecord` (result ordered like ``record.authors``).
    """
    if counting not in ("divided", "non_divided"):
        raise ValueError(f"unknown counting mode {counting!r}")
    if isinstance(source, BipartiteGraph):
        inc = source.biadjacency().astype(np.float64)
        if counting == "non_divided":
            return np.asarray(inc.sum(axis=1)).ravel()
        per_paper = 1.0 / source.right_degree()
        return np.asarray(inc @ per_paper).ravel()
    credit = defaultdict(float)
    for p in source.papers:
        share = 1.0 / len(p.authors) if counting == "divided" else 1.0
        for a in p.authors:
            credit[a] += share
    return np.array([credit[a] for a in source.authors])


@dataclass(frozen=True)
class YearProductivity:
    year: int
    papers: int
    authors: int
    credited: float
    papers_per_author: float


def productivity_by_year(record: BiblioRecord, counting: str = "divided") -> list[YearProductivity]:
    """
    Per-year paper and author counts.

    ``papers_per_author`` is papers that year over distinct authors active
    that year. ``credited`` sums the per-author credit under ``counting``
    (equal to ``papers`` for divided counting).
    """
    if counting not in ("divided", "non_divided"):
        raise ValueError(f"unknown counting mode {counting!r}")
    if not record.papers:
        raise ValueError("empty bibliographic record")
    papers = defaultdict(int)
    authors = defaultdict(set)
    credited = defaultdict(float)
    for p in record.papers:
        papers[p.year] += 1
        authors[p.year].update(p.authors)
        credited[p.year] += 1.0 if counting == "divided" else float(len(p.authors))
    return [YearProductivity(y, papers[y], len(authors[y]), credited[y],
                             papers[y] / len(authors[y]))
            for y in sorted(papers)]


def overall_papers_per_author(record: BiblioRecord) -> float:
    return len(record.papers) / len(record.authors)


def coauthors_by_year(record: BiblioRecord) -> list[tuple[int, float]]:
    """Mean number of distinct coauthors within each year, over that year's authors."""
    partners = defaultdict(lambda: defaultdict(set))
    for p in record.papers:
        for a in p.authors:
            partners[p.year][a].update(x for x in p.authors if x != a)
    return [(y, float(np.mean([len(s) for s in partners[y].values()])))
            for y in sorted(partners)]


@dataclass(frozen=True)
class CitationStats:
    """Per-citation classes and delays with their aggregates."""

    classes: tuple[str, ...]
    delays: tuple[int, ...]
    counts: dict
    proportions: dict
    mean_delay: dict
    overall_mean_delay: float
    reciprocation: dict

    def by_period(self, record: BiblioRecord, width: int = 2) -> list[tuple[int, dict]]:
        """Class proportions per block of ``width`` citing years."""
        buckets = defaultdict(lambda: dict.fromkeys(CITATION_CLASSES, 0))
        start = min(p.year for p in record.papers)
        for (src, _), cls in zip(record.citations, self.classes):
            b = start + (record.paper(src).year - start) // width * width
            buckets[b][cls] += 1
        out = []
        for b in sorted(buckets):
            total = sum(buckets[b].values())
            out.append((b, {c: buckets[b][c] / total for c in CITATION_CLASSES}))
        return out


def citation_classification(record: BiblioRecord) -> CitationStats:
    """
    Classify every citation as self, coauthor or distant.

    A citation is *self* when citing and cited papers share an author,
    *coauthor* when otherwise some citing author has coauthored any paper in
    the record with some cited author, and *distant* otherwise. Delay is the
    citing year minus the cited year. A citation counts as reciprocated when
    some author of the cited paper has cited some author of the citing paper
    anywhere in the record.
    """
    coauthors = set()
    for p in record.papers:
        for a, b in combinations(sorted(set(p.authors)), 2):
            coauthors.add((a, b))
            coauthors.add((b, a))
    author_cites = set()
    for src, dst in record.citations:
        for a in record.paper(src).authors:
            for b in record.paper(dst).authors:
                if a != b:
                    author_cites.add((a, b))

    classes, delays, recips = [], [], []
    for src, dst in record.citations:
        ps, pd = record.paper(src), record.paper(dst)
        sa, da = set(ps.authors), set(pd.authors)
        if sa & da:
            cls = "self"
        elif any((a, b) in coauthors for a in sa for b in da):
            cls = "coauthor"
        else:
            cls = "distant"
        classes.append(cls)
        delays.append(ps.year - pd.year)
        recips.append(any((b, a) in author_cites for a in sa for b in da if a != b))

    total = len(classes)
    counts = {c: classes.count(c) for c in CITATION_CLASSES}
    proportions = {c: (counts[c] / total if total else float("nan")) for c in CITATION_CLASSES}
    arr_cls = np.array(classes)
    arr_delay = np.array(delays, dtype=np.float64)
    arr_rec = np.array(recips, dtype=bool)
    mean_delay, reciprocation = {}, {}
    for c in CITATION_CLASSES:
        mask = arr_cls == c
        mean_delay[c] = float(arr_delay[mask].mean()) if mask.any() else float("nan")
        reciprocation[c] = float(arr_rec[mask].mean()) if mask.any() else float("nan")
    overall = float(arr_delay.mean()) if total else float("nan")
    return CitationStats(tuple(classes), tuple(delays), counts, proportions, mean_delay,
                         overall, reciprocation)
