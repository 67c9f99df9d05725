"""Optional figures (requires the ``plot`` extra, i.e. matplotlib)."""

from __future__ import annotations

from pathlib import Path

import networkx as nx

from .hposet import PosetResult, Verdict
from .survey import SurveyReport


class PlottingUnavailable(RuntimeError):
    pass


def _pyplot():
    try:
        import matplotlib
    except ImportError as exc:
        raise PlottingUnavailable("plotting needs matplotlib: pip install 'artifact[plot]'") from exc
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_rank_histogram(report: SurveyReport, path: str | Path) -> Path:
    """Bar chart of the rank histogram."""
    plt = _pyplot()
    hist = report.histogram
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.bar([str(k) for k in hist], list(hist.values()), color="tab:blue")
    ax.set_xlabel("rank")
    ax.set_ylabel("count")
    ax.set_title(f"{report.samples} random objectives ({report.group})")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def _levels(nodes) -> dict:
    # lower nodes in dominance order sit lower in the figure: sort by number of parts
    by_len: dict[int, list] = {}
    for node in nodes:
        by_len.setdefault(len(node), []).append(node)
    pos = {}
    depth = max(by_len) if by_len else 0
    for length, members in by_len.items():
        for k, node in enumerate(sorted(members, reverse=True)):
            pos[node] = (k - (len(members) - 1) / 2, depth - length)
    return pos


def plot_poset(result: PosetResult, path: str | Path) -> Path:
    """Hasse diagram of certified edges, blue for dominance-incomparable pairs."""
    plt = _pyplot()
    colors = {(v.lam, v.mu): v.color for v in result.verdicts if v.status is Verdict.CERTIFIED}
    graph = nx.DiGraph()
    graph.add_nodes_from(result.nodes)
    graph.add_edges_from(result.reduced_edges)
    pos = _levels(result.nodes)
    fig, ax = plt.subplots(figsize=(7, 6))
    nx.draw_networkx_nodes(graph, pos, ax=ax, node_color="white", edgecolors="black", node_size=900)
    nx.draw_networkx_labels(graph, pos, ax=ax, labels={p: ",".join(map(str, p)) for p in result.nodes}, font_size=8)
    nx.draw_networkx_edges(graph, pos, ax=ax, edge_color=[colors.get(e, "gray") for e in graph.edges()],
                           arrows=True, node_size=900)
    ax.set_axis_off()
    ax.set_title(f"H-inequalities, weight {result.weight}, n={result.n}")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
