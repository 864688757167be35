"""GraphML, DOT and CSV edge-list writers for a single component.

Output is byte-deterministic: nodes in address order, edges in key order,
floats written with ``repr``.
"""
from __future__ import annotations

import csv
import io
from xml.sax.saxutils import escape, quoteattr

from .graph_metrics import CentralityReport, Communities, Component

FORMATS = ("graphml", "dot", "csv")
EXTENSIONS = {"graphml": ".graphml", "dot": ".dot", "csv": ".csv"}


class UnknownFormatError(ValueError):
    pass


def _node_table(component: Component, communities: Communities | None, cents: CentralityReport | None):
    eig = dict(cents.eigenvector) if cents else {}
    btw = dict(cents.betweenness) if cents else {}
    clo = dict(cents.closeness) if cents else {}
    member = communities.membership if communities else {}
    rows = []
    for n in sorted(component.subgraph.nodes):
        rows.append((n, member.get(n, 0), eig.get(n, 0.0), btw.get(n, 0.0), clo.get(n, 0.0)))
    return rows


def _edges(component: Component):
    return sorted(component.subgraph.edges.items())


def to_graphml(component, communities=None, cents=None) -> str:
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
        '  <key id="address" for="node" attr.name="address" attr.type="string"/>',
        '  <key id="community" for="node" attr.name="community" attr.type="int"/>',
        '  <key id="eigenvector" for="node" attr.name="eigenvector" attr.type="double"/>',
        '  <key id="betweenness" for="node" attr.name="betweenness" attr.type="double"/>',
        '  <key id="closeness" for="node" attr.name="closeness" attr.type="double"/>',
        '  <key id="weight" for="edge" attr.name="weight" attr.type="int"/>',
        f'  <graph id={quoteattr(component.id)} edgedefault="undirected">',
    ]
    for addr, comm, e, b, c in _node_table(component, communities, cents):
        out.append(f"    <node id={quoteattr(addr)}>")
        out.append(f'      <data key="address">{escape(addr)}</data>')
        out.append(f'      <data key="community">{comm}</data>')
        out.append(f'      <data key="eigenvector">{e!r}</data>')
        out.append(f'      <data key="betweenness">{b!r}</data>')
        out.append(f'      <data key="closeness">{c!r}</data>')
        out.append("    </node>")
    for (a, b), w in _edges(component):
        out.append(f"    <edge source={quoteattr(a)} target={quoteattr(b)}>")
        out.append(f'      <data key="weight">{w}</data>')
        out.append("    </edge>")
    out += ["  </graph>", "</graphml>"]
    return "\n".join(out) + "\n"


def _dot_id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(component, communities=None, cents=None) -> str:
    out = [f"graph {_dot_id(component.id)} {{"]
    for addr, comm, e, b, c in _node_table(component, communities, cents):
        out.append(
            f"  {_dot_id(addr)} [address={_dot_id(addr)}, community={comm}, "
            f"eigenvector={e!r}, betweenness={b!r}, closeness={c!r}];"
        )
    for (a, b), w in _edges(component):
        out.append(f"  {_dot_id(a)} -- {_dot_id(b)} [weight={w}];")
    out.append("}")
    return "\n".join(out) + "\n"


def to_csv(component, communities=None, cents=None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["source", "target", "weight"])
    for (a, b), w in _edges(component):
        writer.writerow([a, b, w])
    return buf.getvalue()


_WRITERS = {"graphml": to_graphml, "dot": to_dot, "csv": to_csv}


def export_graph(component: Component, fmt: str, communities=None, cents=None) -> str:
    try:
        writer = _WRITERS[fmt.lower()]
    except KeyError:
        raise UnknownFormatError(f"unknown export format {fmt!r}; choose from {', '.join(FORMATS)}") from None
    return writer(component, communities, cents)
