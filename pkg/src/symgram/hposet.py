"""Inequalities between term-normalized complete homogeneous symmetric functions.

An edge ``lam -> mu`` asserts ``H_lam <= H_mu`` on the nonnegative orthant.  It is
certified by an SOS decomposition of ``(H_mu - H_lam)(x_1^2, ..., x_n^2)`` and
refuted by an exact rational orthant point where the difference is negative.
"""

from __future__ import annotations

import enum
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import networkx as nx
import numpy as np

from .certify import SosCertificate, certify, verify
from .polycore import SparsePoly, evaluate, substitute_squares
from .sdpcore import SdpOptions
from .symfunc import Dominance, as_partition, dominance, format_partition, normalized_basis_poly, partitions_of

REVERIFY_TOL = 1e-7


class Verdict(enum.Enum):
    CERTIFIED = "Certified"
    REFUTED = "Refuted-by-point"
    UNKNOWN = "Unknown"


@dataclass
class EdgeVerdict:
    lam: tuple[int, ...]
    mu: tuple[int, ...]
    dominance: Dominance
    status: Verdict
    n_used: int
    certificate: SosCertificate | None = field(default=None, repr=False)
    point: tuple[Fraction, ...] | None = None
    value: Fraction | None = None
    residual: float | None = None
    message: str = ""

    @property
    def color(self) -> str:
        return "black" if self.dominance in (Dominance.LESS, Dominance.EQUAL) else "blue"

    @property
    def witness(self):
        if self.status is Verdict.CERTIFIED:
            return self.certificate
        if self.status is Verdict.REFUTED:
            return self.point
        return None

    def to_dict(self) -> dict:
        out = {
            "lambda": list(self.lam),
            "mu": list(self.mu),
            "dominance": self.dominance.value,
            "status": self.status.value,
            "n_used": self.n_used,
            "residual": self.residual,
            "message": self.message,
        }
        if self.point is not None:
            out["point"] = [str(v) for v in self.point]
            out["value"] = str(self.value)
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_dict()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "EdgeVerdict":
        cert = SosCertificate.from_dict(data["certificate"]) if data.get("certificate") else None
        point = tuple(Fraction(v) for v in data["point"]) if data.get("point") else None
        value = Fraction(data["value"]) if data.get("value") is not None else None
        return cls(tuple(data["lambda"]), tuple(data["mu"]), Dominance(data["dominance"]),
                   Verdict(data["status"]), data["n_used"], cert, point, value,
                   data.get("residual"), data.get("message", ""))


def h_difference(lam: Sequence[int], mu: Sequence[int], n: int) -> SparsePoly:
    """``H_mu - H_lam`` in n variables (before squaring the variables)."""
    return normalized_basis_poly("h", mu, n) - normalized_basis_poly("h", lam, n)


def _orthant_candidates(n: int, rng: np.random.Generator, count: int, denominator: int):
    # sparse supports first: boundary points of the orthant are where these inequalities tend to fail
    for support in range(1, n + 1):
        for idx in itertools.combinations(range(n), support):
            yield tuple(Fraction(1) if i in idx else Fraction(0) for i in range(n))
    for _ in range(count):
        nums = rng.integers(0, denominator + 1, size=n)
        if not nums.any():
            continue
        yield tuple(Fraction(int(v), denominator) for v in nums)


def refute(diff: SparsePoly, rng: np.random.Generator, count: int = 2000, denominator: int = 8):
    """Look for an exact rational orthant point with ``diff < 0``; keeps the most negative."""
    best = None
    for point in _orthant_candidates(diff.n, rng, count, denominator):
        value = evaluate(diff, point)
        if value < 0 and (best is None or value < best[1]):
            best = (point, value)
    return best


def certify_h_pair(lam: Sequence[int], mu: Sequence[int], n: int = 3, seed: int = 0,
                   opts: SdpOptions | None = None, refute_points: int = 2000) -> EdgeVerdict:
    lam, mu = as_partition(lam), as_partition(mu)
    if sum(lam) != sum(mu):
        raise ValueError(f"weight mismatch: |{format_partition(lam)}| != |{format_partition(mu)}|")
    dom = dominance(lam, mu)
    diff = h_difference(lam, mu, n)
    g = substitute_squares(diff)
    outcome = certify(g, "sn", opts=opts, degree=2 * sum(lam))
    if outcome.feasible:
        report = verify(g, outcome.certificate)
        if report.residual <= REVERIFY_TOL:
            return EdgeVerdict(lam, mu, dom, Verdict.CERTIFIED, n, outcome.certificate, residual=report.residual)
        message = f"certificate residual {report.residual:.3e} above {REVERIFY_TOL}"
    else:
        message = outcome.message or outcome.status.value
    # SOS failure alone never refutes the orthant inequality
    hit = refute(diff, np.random.default_rng(seed), refute_points)
    if hit is not None:
        return EdgeVerdict(lam, mu, dom, Verdict.REFUTED, n, point=hit[0], value=hit[1], message=message)
    return EdgeVerdict(lam, mu, dom, Verdict.UNKNOWN, n, message=message)


@dataclass
class PosetResult:
    weight: int
    n: int
    nodes: list[tuple[int, ...]]
    verdicts: list[EdgeVerdict]
    reduced_edges: list[tuple[tuple[int, ...], tuple[int, ...]]]

    def certified(self) -> list[EdgeVerdict]:
        return [v for v in self.verdicts if v.status is Verdict.CERTIFIED]

    def to_dict(self, include_certificates: bool = False) -> dict:
        verdicts = []
        for v in self.verdicts:
            data = v.to_dict()
            if not include_certificates:
                data.pop("certificate", None)
            verdicts.append(data)
        return {
            "format": "symgram-poset",
            "version": 1,
            "weight": self.weight,
            "n": self.n,
            "nodes": [list(p) for p in self.nodes],
            "verdicts": verdicts,
            "hasse": [[list(a), list(b)] for a, b in self.reduced_edges],
        }


def transitive_reduction(nodes, edges) -> list[tuple]:
    graph = nx.DiGraph()
    graph.add_nodes_from(nodes)
    graph.add_edges_from(edges)
    if not nx.is_directed_acyclic_graph(graph):
        # equal forms would close a cycle; keep the direct edges rather than guess
        return sorted(edges)
    return sorted(nx.transitive_reduction(graph).edges())


def _pair_task(args) -> EdgeVerdict:
    lam, mu, n, seed, opts = args
    return certify_h_pair(lam, mu, n, seed, opts)


def build_poset(weight: int, n: int = 3, seed: int = 0, opts: SdpOptions | None = None, jobs: int = 1,
                max_pairs: int | None = None, degree_cap: int | None = None,
                pairs: Sequence[tuple] | None = None) -> PosetResult:
    """Test every ordered pair of distinct partitions of ``weight``."""
    if degree_cap is not None and 2 * weight > degree_cap:
        raise ValueError(f"degree {2 * weight} exceeds the cap {degree_cap}")
    nodes = partitions_of(weight)
    todo = list(pairs) if pairs is not None else [(lam, mu) for lam, mu in itertools.permutations(nodes, 2)]
    if max_pairs is not None:
        todo = todo[:max_pairs]
    tasks = [(lam, mu, n, seed + k, opts) for k, (lam, mu) in enumerate(todo)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            verdicts = list(pool.map(_pair_task, tasks))
    else:
        verdicts = [_pair_task(t) for t in tasks]
    edges = [(v.lam, v.mu) for v in verdicts if v.status is Verdict.CERTIFIED]
    return PosetResult(weight, n, nodes, verdicts, transitive_reduction(nodes, edges))


def _node_name(parts: Sequence[int]) -> str:
    return '"' + ",".join(str(p) for p in parts) + '"'


def export_dot(verdicts: Sequence[EdgeVerdict], reduced_edges=None, nodes=None) -> str:
    """DOT digraph of certified edges, black when dominance-comparable and blue otherwise."""
    colors = {(v.lam, v.mu): v.color for v in verdicts if v.status is Verdict.CERTIFIED and v.lam != v.mu}
    node_set = set(nodes or [])
    for v in verdicts:
        node_set.update([v.lam, v.mu])
    edges = sorted(colors) if reduced_edges is None else [e for e in reduced_edges if e in colors]
    key = lambda p: (-sum(p), [-x for x in p])  # noqa: E731
    lines = ["digraph hposet {", "  rankdir=BT;"]
    for node in sorted(node_set, key=key):
        lines.append(f"  {_node_name(node)};")
    for lam, mu in sorted(edges, key=lambda e: (key(e[0]), key(e[1]))):
        lines.append(f"  {_node_name(lam)} -> {_node_name(mu)} [color={colors[(lam, mu)]}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
