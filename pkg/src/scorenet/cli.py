"""
Command-line front end.

Every subcommand reads its inputs, computes all results in memory, and only
then writes files (all staged to temporary names, then renamed) and prints
a one-line summary per result. Any failure exits with status 1 before
anything is written.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io as sio
from .community import (
    DegenerateError,
    PartitionLabels,
    community_sizes,
    dscore_details,
    intersection_table,
    nsc,
    restrict_to_giant,
    score,
)
from .dcbm import DcbmParams, sample_directed, sample_undirected
from .graph import (
    Graph,
    GraphError,
    citee_network,
    citer_network,
    coauthorship_from_bipartite,
    connected_components,
    weakly_connected_components,
)
from .linalg import ConvergenceError, spectrum_for_scree
from .metrics import (
    BiblioRecord,
    Paper,
    adjusted_rand_index,
    author_paper_counts,
    betweenness_centrality,
    ccdf,
    citation_classification,
    closeness_centrality,
    coauthors_by_year,
    degree_centrality,
    gini,
    lorenz_curve,
    overall_papers_per_author,
    productivity_by_year,
    top_share,
    transitivity,
    variation_of_information,
)

log = logging.getLogger("scorenet")

SUBCOMMANDS = ("components", "coauthor-net", "citer-net", "citee-net", "centrality", "score",
               "dscore", "nsc", "compare", "scree", "stats", "biblio", "dcbm-gen")

DEFAULTS = {"seed": 42, "tol": 1e-10, "restarts": 100, "outdir": "."}


class CliError(Exception):
    """A user-facing failure with an actionable message."""


@dataclass
class RunConfig:
    """Resolved options for one subcommand invocation."""

    subcommand: str
    inputs: dict = field(default_factory=dict)
    K: int | None = None
    seed: int = 42
    tol: float = 1e-10
    restarts: int = 100
    outdir: str = "."
    options: dict = field(default_factory=dict)


class _Outputs:
    """Collects rendered files and summary lines until the run succeeds."""

    def __init__(self, outdir):
        self.outdir = Path(outdir)
        self.files = {}
        self.lines = []

    def file(self, name, text):
        self.files[self.outdir / name] = text

    def say(self, line):
        self.lines.append(line)

    def commit(self):
        # stage every file before renaming any, so a failure leaves no outputs
        staged = []
        try:
            for path, text in self.files.items():
                staged.append((sio.stage_write(path, text), path))
        except BaseException:
            for tmp, _ in staged:
                os.unlink(tmp)
            raise
        for tmp, path in staged:
            os.replace(tmp, path)
        for line in self.lines:
            print(line)


# -- input helpers ------------------------------------------------------------------

def _need(cfg: RunConfig, key: str) -> str:
    path = cfg.inputs.get(key)
    if not path:
        raise CliError(f"{cfg.subcommand}: missing --{key.replace('_', '-')}")
    if not Path(path).is_file():
        raise CliError(f"{cfg.subcommand}: input file not found: {path}")
    return path


def _names(cfg: RunConfig):
    path = cfg.inputs.get("authors")
    return sio.parse_author_list(path) if path else None


def _load_graph(cfg: RunConfig, directed: bool) -> Graph:
    path = _need(cfg, "input")
    names = _names(cfg)
    fmt = cfg.options.get("format") or "adjacency"
    if fmt == "edgelist":
        g = sio.parse_edge_list(path, directed=directed, node_ids=None)
        if names is not None:
            if len(names) != g.n:
                raise CliError(f"author list has {len(names)} names for {g.n} nodes")
            g = Graph(g.n, g.edges, directed=directed, node_ids=names)
        return g
    if fmt != "adjacency":
        raise CliError(f"unknown --format {fmt!r}; use adjacency or edgelist")
    mode = "square-directed" if directed else "square-undirected"
    if names is not None:
        g = sio.parse_adjacency(path, mode)
        if len(names) != g.n:
            raise CliError(f"author list has {len(names)} names for {g.n} nodes")
        return Graph(g.n, g.edges, directed=directed, node_ids=names)
    return sio.parse_adjacency(path, mode)


def _load_bipartite(cfg: RunConfig):
    path = _need(cfg, "input")
    b = sio.parse_adjacency(path, "bipartite")
    names = _names(cfg)
    if names is not None:
        if len(names) != b.n_left:
            raise CliError(f"author list has {len(names)} names for {b.n_left} authors")
        b.node_ids = tuple(names)
    return b


def _directed(cfg: RunConfig, default: bool) -> bool:
    d = cfg.options.get("directed")
    return default if d is None else bool(d)


def _giant(g: Graph, cfg: RunConfig):
    if cfg.options.get("whole"):
        return g, np.arange(g.n)
    return restrict_to_giant(g)


def _ids(g: Graph):
    return list(g.node_ids) if g.node_ids is not None else [str(i) for i in range(g.n)]


def _require_k(cfg: RunConfig) -> int:
    if cfg.K is None:
        raise CliError(f"{cfg.subcommand}: missing --k")
    return int(cfg.K)


def _fmt_sizes(p: PartitionLabels) -> str:
    return "/".join(str(s) for s in community_sizes(p))


# -- subcommands -------------------------------------------------------------------

def _cmd_components(cfg, out):
    directed = _directed(cfg, False)
    g = _load_graph(cfg, directed)
    comps = weakly_connected_components(g) if directed else connected_components(g)
    out.file("components.csv", sio.render_labels(comps.labels, _ids(g)))
    out.file("component_sizes.csv",
             sio.render_curve(enumerate(comps.sizes.tolist()), ("component", "size")))
    singletons = int((comps.sizes == 1).sum())
    out.say(f"{comps.count} components, giant={int(comps.sizes[0])}, singletons={singletons}")


def _cmd_coauthor_net(cfg, out):
    b = _load_bipartite(cfg)
    t = int(cfg.options.get("threshold") or 1)
    g = coauthorship_from_bipartite(b, t)
    comps = connected_components(g)
    out.file(f"coauthor_t{t}.tsv", sio.render_edge_list(g))
    out.say(f"coauthorship t={t}: {g.n} nodes, {g.num_edges} edges, "
            f"{comps.count} components, giant={int(comps.sizes[0])}")


def _cmd_projection(cfg, out, which):
    g = _load_graph(cfg, True)
    if not cfg.options.get("whole"):
        g, _ = restrict_to_giant(g)
    proj = citer_network(g) if which == "citer" else citee_network(g)
    comps = connected_components(proj)
    out.file(f"{which}_network.tsv", sio.render_edge_list(proj))
    out.say(f"{which} network: {proj.n} nodes, {proj.num_edges} edges, "
            f"giant={int(comps.sizes[0])}")


def _cmd_centrality(cfg, out):
    measure = cfg.options.get("measure") or "all"
    if cfg.options.get("bipartite"):
        b = _load_bipartite(cfg)
        sc = degree_centrality(b)
        ids = list(b.node_ids) if b.node_ids else [str(i) for i in range(b.n_left)]
        out.file("centrality_papers.csv", sio.render_scores(sc, ids))
        out.say("papers: top " + ", ".join(ids[i] for i in sc.ranking()[:3]))
        return
    directed = _directed(cfg, False)
    g = _load_graph(cfg, directed)
    wanted = ["degree", "closeness", "betweenness"] if measure == "all" else [measure]
    for kind in wanted:
        if kind == "degree":
            sc = degree_centrality(g, "in" if directed else "undirected")
            sub, idx = g, np.arange(g.n)
        elif kind in ("closeness", "betweenness"):
            if directed:
                raise CliError(f"{kind} centrality needs an undirected graph")
            sub, idx = restrict_to_giant(g)
            fn = closeness_centrality if kind == "closeness" else betweenness_centrality
            sc = fn(sub)
        else:
            raise CliError(f"unknown --measure {kind!r}")
        ids = _ids(sub)
        out.file(f"centrality_{sc.kind}.csv", sio.render_scores(sc, ids))
        out.say(f"{sc.kind}: top " + ", ".join(ids[i] for i in sc.ranking()[:3]))


def _cmd_undirected_detect(cfg, out, method):
    K = _require_k(cfg)
    g = _load_graph(cfg, False)
    sub, _ = _giant(g, cfg)
    if method == "score":
        p = score(sub, K, cfg.seed, restarts=cfg.restarts, tol=cfg.tol,
                  clamp=not cfg.options.get("no_clamp"))
    else:
        p = nsc(sub, K, tol=cfg.tol)
    out.file(f"{method}_labels.csv", sio.render_labels(p, _ids(sub)))
    out.say(f"{method} K={K}: {sub.n} nodes, {p.k_effective} communities, sizes={_fmt_sizes(p)}")


def _cmd_dscore(cfg, out):
    K = _require_k(cfg)
    g = _load_graph(cfg, True)
    sub, _ = _giant(g, cfg)
    res = dscore_details(sub, K, cfg.seed, restarts=cfg.restarts, tol=cfg.tol)
    p = res.partition
    out.file("dscore_labels.csv", sio.render_labels(p, _ids(sub)))
    out.say(f"dscore K={K}: {sub.n} nodes, |N1|={len(res.citer_giant)}, "
            f"|N2|={len(res.citee_giant)}, |N1&N2|={len(res.both)}, "
            f"|rest|={len(res.neither)}, sizes={_fmt_sizes(p)}")


def _cmd_compare(cfg, out):
    ids_a, lab_a = sio.parse_labels(_need(cfg, "a"))
    ids_b, lab_b = sio.parse_labels(_need(cfg, "b"))
    pa = PartitionLabels.from_labels(lab_a)
    pb = PartitionLabels.from_labels(lab_b)
    universe = {name: i for i, name in enumerate(sorted(set(ids_a) | set(ids_b)))}
    table = intersection_table(pa, pb, [universe[x] for x in ids_a], [universe[x] for x in ids_b])
    out.file("intersection.csv", sio.render_table(
        table, [str(i) for i in range(pa.k_effective)] + ["other"],
        [str(j) for j in range(pb.k_effective)] + ["other"]))
    pos_b = {name: i for i, name in enumerate(ids_b)}
    common = [(i, pos_b[x]) for i, x in enumerate(ids_a) if x in pos_b]
    if not common:
        raise CliError("compare: the two label files share no node ids")
    ia, ib = np.array(common).T
    ari = adjusted_rand_index(pa.labels[ia], pb.labels[ib])
    vi = variation_of_information(pa.labels[ia], pb.labels[ib])
    # adding 0.0 turns a rounded -0.0 into 0.0
    out.say(f"ARI={round(ari, 6) + 0.0} VI={round(vi, 6) + 0.0} (common nodes={len(common)})")


def _cmd_scree(cfg, out):
    directed = _directed(cfg, False)
    g = _load_graph(cfg, directed)
    sub, _ = _giant(g, cfg)
    k = min(int(cfg.K or 10), sub.n)
    vals = spectrum_for_scree(sub.adjacency(), k, symmetric=not directed, tol=cfg.tol)
    out.file("scree.csv", sio.render_scree(vals))
    out.say("scree: " + ", ".join(sio.format_number(round(abs(v), 6)) for v in vals))


def _cmd_stats(cfg, out):
    if cfg.options.get("bipartite"):
        b = _load_bipartite(cfg)
        divided = author_paper_counts(b, "divided")
        whole = author_paper_counts(b, "non_divided")
        out.file("papers_ccdf.csv", sio.render_curve(ccdf(whole), ("papers", "fraction_above")))
        out.file("papers_lorenz.csv", sio.render_curve(lorenz_curve(divided),
                                                       ("population_share", "paper_share")))
        out.say(f"authors={b.n_left} papers={b.n_right} "
                f"papers_per_author={sio.format_number(round(b.n_right / b.n_left, 4))}")
        out.say(f"gini(divided)={sio.format_number(round(gini(divided), 4))} "
                f"top10%={sio.format_number(round(top_share(divided, 0.1), 4))} "
                f"top20%={sio.format_number(round(top_share(divided, 0.2), 4))}")
        return
    directed = _directed(cfg, False)
    g = _load_graph(cfg, directed)
    deg = g.in_degree() if directed else g.degree()
    out.file("degree_ccdf.csv", sio.render_curve(ccdf(deg), ("degree", "fraction_above")))
    if deg.sum() > 0:
        out.file("degree_lorenz.csv", sio.render_curve(lorenz_curve(deg),
                                                       ("population_share", "degree_share")))
    parts = [f"nodes={g.n}", f"edges={g.num_edges}"]
    if not directed:
        parts.append(f"transitivity={sio.format_number(round(transitivity(g), 4))}")
    if deg.sum() > 0:
        parts.append(f"gini(degree)={sio.format_number(round(gini(deg), 4))}")
    out.say(" ".join(parts))


def _read_biblio(cfg) -> BiblioRecord:
    papers = []
    with open(_need(cfg, "papers"), newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            try:
                papers.append(Paper(row["paper_id"], int(row["year"]),
                                    tuple(a.strip() for a in row["authors"].split(";") if a.strip())))
            except (KeyError, ValueError) as exc:
                raise CliError(f"papers file: bad row {row!r} ({exc})") from None
    cites = []
    if cfg.inputs.get("citations"):
        with open(_need(cfg, "citations"), newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                cites.append((row["citing"], row["cited"]))
    return BiblioRecord(papers, cites)


def _cmd_biblio(cfg, out):
    rec = _read_biblio(cfg)
    counting = cfg.options.get("counting") or "divided"
    prod = productivity_by_year(rec, counting)
    out.file("productivity.csv", sio.render_curve(
        ((p.year, p.papers, p.authors, p.credited, p.papers_per_author) for p in prod),
        ("year", "papers", "authors", "credited", "papers_per_author")))
    out.file("coauthors_by_year.csv", sio.render_curve(coauthors_by_year(rec),
                                                       ("year", "mean_coauthors")))
    credits = author_paper_counts(rec, counting)
    out.say(f"papers={len(rec.papers)} authors={len(rec.authors)} papers_per_author="
            f"{sio.format_number(round(overall_papers_per_author(rec), 4))} "
            f"gini({counting})={sio.format_number(round(gini(credits), 4))}")
    if rec.citations:
        st = citation_classification(rec)
        out.file("citation_classes.csv", sio.render_curve(
            ((s, d, c, dl) for (s, d), c, dl in zip(rec.citations, st.classes, st.delays)),
            ("citing", "cited", "class", "delay")))
        out.say("citations: " + " ".join(
            f"{c}={sio.format_number(round(st.proportions[c], 4))}"
            f"/delay={sio.format_number(round(st.mean_delay[c], 4))}" for c in st.proportions))


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.replace(",", " ").split()]


def dcbm_params_from_config(kv: dict, seed: int) -> DcbmParams:
    """
    Build :class:`DcbmParams` from ``key = value`` settings.

    Keys: ``n``, ``K``, ``directed``, ``P`` (rows separated by ``;``),
    ``theta`` / ``delta`` (``uniform lo hi``, ``constant c`` or an explicit
    list), ``labels`` (``equal`` or a list) and ``param_seed`` (defaults to
    ``seed``) for the random draws.
    """
    try:
        n = int(kv["n"])
        K = int(kv.get("K") or kv.get("k"))
    except (KeyError, TypeError, ValueError):
        raise CliError("dcbm params need integer 'n' and 'K'") from None
    directed = kv.get("directed", "false").lower() in ("1", "true", "yes")
    rows = [r for r in kv.get("P", "").split(";") if r.strip()]
    P = np.array([_floats(r) for r in rows])
    if P.shape != (K, K):
        raise CliError(f"dcbm params: P must be {K}x{K}, got shape {P.shape}")
    rng = np.random.default_rng(int(kv.get("param_seed", seed)))

    def vec(name):
        form = kv.get(name, "constant 1").split()
        if form[0] == "uniform":
            return rng.uniform(float(form[1]), float(form[2]), size=n)
        if form[0] == "constant":
            return np.full(n, float(form[1]))
        vals = _floats(" ".join(form))
        if len(vals) != n:
            raise CliError(f"dcbm params: {name} needs {n} values")
        return np.array(vals)

    theta = vec("theta")
    delta = vec("delta") if directed else None
    lab = kv.get("labels", "equal")
    labels = (np.arange(n) * K) // n if lab == "equal" else np.array(_floats(lab), dtype=int)
    try:
        return DcbmParams(P=P, theta=theta, labels=labels, delta=delta, directed=directed)
    except ValueError as exc:
        raise CliError(f"dcbm params: {exc}") from None


def _cmd_dcbm_gen(cfg, out):
    kv = sio.parse_key_value(_need(cfg, "params"))
    params = dcbm_params_from_config(kv, cfg.seed)
    sampler = sample_directed if params.directed else sample_undirected
    g, truth = sampler(params, cfg.seed)
    out.file("dcbm_graph.tsv", sio.render_edge_list(g))
    out.file("dcbm_labels.csv", sio.render_labels(truth))
    out.say(f"dcbm: n={g.n} K={params.K} {'directed' if g.directed else 'undirected'} "
            f"edges={g.num_edges} seed={cfg.seed}")


HANDLERS = {
    "components": _cmd_components,
    "coauthor-net": _cmd_coauthor_net,
    "citer-net": lambda c, o: _cmd_projection(c, o, "citer"),
    "citee-net": lambda c, o: _cmd_projection(c, o, "citee"),
    "centrality": _cmd_centrality,
    "score": lambda c, o: _cmd_undirected_detect(c, o, "score"),
    "nsc": lambda c, o: _cmd_undirected_detect(c, o, "nsc"),
    "dscore": _cmd_dscore,
    "compare": _cmd_compare,
    "scree": _cmd_scree,
    "stats": _cmd_stats,
    "biblio": _cmd_biblio,
    "dcbm-gen": _cmd_dcbm_gen,
}


def _maybe_dot(cfg, out):
    """Optional ``--dot`` output: the analysed graph with detected labels."""
    dot = cfg.options.get("dot")
    if not dot:
        return
    directed = cfg.subcommand == "dscore" or _directed(cfg, False)
    g = _load_graph(cfg, directed)
    sub, _ = _giant(g, cfg) if cfg.subcommand in ("score", "nsc", "dscore") else (g, None)
    labels = None
    name = f"{cfg.subcommand.replace('-', '_')}_labels.csv"
    if (out.outdir / name) in out.files:
        rows = list(csv.reader(out.files[out.outdir / name].splitlines()))[1:]
        labels = np.array([int(r[1]) for r in rows])
    floor = int(cfg.options.get("degree_floor") or 0)
    out.file(dot, sio.render_dot(sub, labels, floor))
    deg = sub.in_degree() if sub.directed else sub.degree()
    out.say(f"dot: {int((deg >= floor).sum())} labelled nodes of {sub.n}")


def run(config: RunConfig) -> int:
    """Execute one subcommand; returns the process exit status."""
    if config.subcommand not in HANDLERS:
        print(f"error: unknown subcommand {config.subcommand!r}; "
              f"choose from {', '.join(SUBCOMMANDS)}", file=sys.stderr)
        return 2
    out = _Outputs(config.outdir)
    try:
        HANDLERS[config.subcommand](config, out)
        _maybe_dot(config, out)
        out.commit()
    except (CliError, sio.ParseError, GraphError, DegenerateError, ConvergenceError,
            ValueError, OSError) as exc:
        print(f"error: {config.subcommand}: {exc}", file=sys.stderr)
        return 1
    return 0


# -- argument parsing ----------------------------------------------------------------

_INPUT_KEYS = ("input", "authors", "a", "b", "papers", "citations", "params")
_OPTION_KEYS = ("format", "directed", "whole", "threshold", "measure", "bipartite",
                "counting", "no_clamp", "dot", "degree_floor")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scorenet", description="Spectral community detection and network statistics.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    sub.required = True
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key=value file supplying defaults for any option")
        p.add_argument("--outdir")
        p.add_argument("--seed", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--restarts", type=int)
        p.add_argument("--k", "-K", dest="K", type=int)
        p.add_argument("--input", "-i")
        p.add_argument("--authors", help="author-list file, one name per line")
        p.add_argument("--format", choices=("adjacency", "edgelist"))
        grp = p.add_mutually_exclusive_group()
        grp.add_argument("--directed", dest="directed", action="store_const", const=True)
        grp.add_argument("--undirected", dest="directed", action="store_const", const=False)
        p.add_argument("--whole", action="store_const", const=True,
                       help="use the whole graph instead of its giant component")
        p.add_argument("--dot", help="also write a GraphViz file with this name")
        p.add_argument("--degree-floor", type=int)
        if name == "coauthor-net":
            p.add_argument("--threshold", "-t", type=int)
        if name == "centrality":
            p.add_argument("--measure", choices=("degree", "closeness", "betweenness", "all"))
        if name in ("centrality", "stats"):
            p.add_argument("--bipartite", action="store_const", const=True)
        if name == "score":
            p.add_argument("--no-clamp", action="store_const", const=True)
        if name == "compare":
            p.add_argument("--a", required=False)
            p.add_argument("--b", required=False)
        if name == "biblio":
            p.add_argument("--papers")
            p.add_argument("--citations")
            p.add_argument("--counting", choices=("divided", "non_divided"))
        if name == "dcbm-gen":
            p.add_argument("--params")
    return parser


def _coerce(key, value):
    if key in ("seed", "restarts", "K", "threshold", "degree_floor"):
        return int(value)
    if key == "tol":
        return float(value)
    if key in ("directed", "whole", "bipartite", "no_clamp"):
        return str(value).lower() in ("1", "true", "yes")
    return value


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    values = {k: v for k, v in vars(ns).items() if v is not None}
    if ns.config:
        try:
            file_values = sio.parse_key_value(ns.config)
        except OSError as exc:
            raise CliError(f"cannot read config {ns.config}: {exc}") from None
        for k, v in file_values.items():
            k = "K" if k.lower() == "k" else k
            values.setdefault(k, _coerce(k, v))
    for k, v in DEFAULTS.items():
        values.setdefault(k, v)
    return RunConfig(
        subcommand=ns.subcommand,
        inputs={k: values[k] for k in _INPUT_KEYS if k in values},
        K=values.get("K"),
        seed=int(values["seed"]),
        tol=float(values["tol"]),
        restarts=int(values["restarts"]),
        outdir=str(values["outdir"]),
        options={k: values[k] for k in _OPTION_KEYS if k in values},
    )


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(ns)
    except (CliError, sio.ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
