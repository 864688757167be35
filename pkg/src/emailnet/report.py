"""Drive-level analysis: components, metrics, labels and centralities."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from typing import Sequence

from .classifier import DEFAULT_STOPLIST, ComponentLabel, Policy, classify, extract_signals
from .graph_builder import DEFAULT_WINDOW, CoRefGraph, build_graph
from .graph_metrics import (
    CentralityReport,
    Communities,
    Component,
    ComponentMetrics,
    centralities,
    compute_metrics,
    connected_components,
    detect_communities,
    top_k,
)

METRIC_COLUMNS = [
    "Component ID",
    "Nodes",
    "Edges",
    "Average Degree",
    "Avg. Weighted Degree",
    "Diameter",
    "Density",
    "Modularity",
    "Avg. Clustering Coefficient",
    "Avg. Path Length",
]
TOP_CENTRAL = 20


@dataclass
class ComponentEntry:
    id: str
    metrics: ComponentMetrics
    label: ComponentLabel
    centrality: CentralityReport
    # kept for exports, not serialised
    component: Component = field(repr=False, compare=False, default=None)
    communities: Communities = field(repr=False, compare=False, default=None)
    full_centrality: CentralityReport = field(repr=False, compare=False, default=None)


@dataclass
class DriveReport:
    drive_id: str
    totals: tuple[int, int, int]
    coverage: tuple[float, float]
    components: list[ComponentEntry]
    window: int = DEFAULT_WINDOW
    singletons: list[str] | None = None

    def to_dict(self) -> dict:
        comps = []
        for c in self.components:
            comps.append({
                "id": c.id,
                "metrics": asdict(c.metrics),
                "label": c.label.label.value,
                "subtype": c.label.subtype.value if c.label.subtype else None,
                "evidence": [list(e) for e in c.label.evidence],
                "centrality": {
                    "eigenvector": [list(p) for p in c.centrality.eigenvector],
                    "betweenness": [list(p) for p in c.centrality.betweenness],
                    "closeness": [list(p) for p in c.centrality.closeness],
                },
            })
        out = {
            "drive_id": self.drive_id,
            "window": self.window,
            "totals": {"nodes": self.totals[0], "edges": self.totals[1], "singletons": self.totals[2]},
            "coverage": {"nodes_pct": self.coverage[0], "edges_pct": self.coverage[1]},
            "components": comps,
        }
        if self.singletons is not None:
            out["singleton_addresses"] = self.singletons
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        n, e, s = self.totals
        lines = [
            f"Drive {self.drive_id}  (window {self.window} bytes)",
            f"  nodes {n}  edges {e}  singletons {s}",
            f"  coverage of top {len(self.components)} components: {self.coverage[0]:.2f}% of nodes, "
            f"{self.coverage[1]:.2f}% of edges",
            "",
        ]
        for c in self.components:
            m = c.metrics
            label = c.label.label.value + (f"/{c.label.subtype.value}" if c.label.subtype else "")
            lines.append(f"{c.id}: {label}  nodes={m.nodes} edges={m.edges} "
                         f"avg_degree={m.avg_degree:.2f} density={m.density:.2f}")
            for name, value, threshold in c.label.evidence:
                lines.append(f"    {name} = {value:.3f} (threshold {threshold:.3f})")
            lines.append("    rank  eigenvector                    betweenness                    closeness")
            cr = c.centrality
            for i in range(len(cr.eigenvector)):
                cells = [f"{col[i][0]} ({col[i][1]:.3f})" for col in (cr.eigenvector, cr.betweenness, cr.closeness)]
                lines.append(f"    {i + 1:>4}  " + "  ".join(f"{x:<29}" for x in cells).rstrip())
            lines.append("")
        if self.singletons is not None:
            lines.append("Singletons:")
            lines += [f"  {a}" for a in self.singletons]
            lines.append("")
        return "\n".join(lines)

    def metrics_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(METRIC_COLUMNS)
        for c in self.components:
            m = c.metrics
            writer.writerow([
                c.id, m.nodes, m.edges, f"{m.avg_degree:.2f}", f"{m.avg_weighted_degree:.2f}",
                m.diameter, f"{m.density:.2f}", f"{m.modularity:.3f}",
                f"{m.avg_clustering:.2f}", f"{m.avg_path_length:.2f}",
            ])
        return buf.getvalue()


def analyze_graph(
    graph: CoRefGraph,
    k: int = 20,
    policy: Policy = Policy(),
    stoplist=DEFAULT_STOPLIST,
    drive_id: str = "d1",
    window: int = DEFAULT_WINDOW,
    include_singletons: bool = False,
) -> DriveReport:
    comps = connected_components(graph, drive_id)
    chosen = top_k(comps, k)
    entries = []
    for comp in chosen.components:
        communities = detect_communities(comp)
        metrics = compute_metrics(comp, communities)
        label = classify(extract_signals(comp, metrics, stoplist), policy)
        cents = centralities(comp)
        entries.append(ComponentEntry(comp.id, metrics, label, cents.top(TOP_CENTRAL), comp, communities, cents))
    singles = None
    if include_singletons:
        linked = {a for key in graph.edges for a in key}
        singles = sorted(graph.nodes - linked)
    return DriveReport(
        drive_id=drive_id,
        totals=(len(graph.nodes), len(graph.edges), comps.singletons),
        coverage=(chosen.node_coverage, chosen.edge_coverage),
        components=entries,
        window=window,
        singletons=singles,
    )


def analyze_records(records: Sequence, window: int = DEFAULT_WINDOW, **kw) -> DriveReport:
    return analyze_graph(build_graph(records, window), window=window, **kw)
