"""Centrality, partition agreement, distribution and bibliometric statistics."""

from .biblio import (
    CITATION_CLASSES,
    BiblioRecord,
    CitationStats,
    Paper,
    YearProductivity,
    author_paper_counts,
    citation_classification,
    coauthors_by_year,
    overall_papers_per_author,
    productivity_by_year,
)
from .centrality import (
    CentralityScores,
    betweenness_centrality,
    closeness_centrality,
    degree_centrality,
    top_nodes,
)
from .distribution import (
    TailFit,
    ccdf,
    degree_ccdf,
    gini,
    lorenz_curve,
    powerlaw_tail_slope,
    top_share,
    transitivity,
)
from .partition import adjusted_rand_index, contingency, variation_of_information

__all__ = [
    "CITATION_CLASSES",
    "BiblioRecord",
    "CentralityScores",
    "CitationStats",
    "Paper",
    "TailFit",
    "YearProductivity",
    "adjusted_rand_index",
    "author_paper_counts",
    "betweenness_centrality",
    "ccdf",
    "citation_classification",
    "closeness_centrality",
    "coauthors_by_year",
    "contingency",
    "degree_ccdf",
    "degree_centrality",
    "gini",
    "lorenz_curve",
    "overall_papers_per_author",
    "powerlaw_tail_slope",
    "productivity_by_year",
    "top_nodes",
    "top_share",
    "transitivity",
    "variation_of_information",
]
