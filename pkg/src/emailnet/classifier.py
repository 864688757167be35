"""Rule-based triage of components into Useful / Not Useful / Uncertain."""
from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import Iterable

from .graph_metrics import Component, ComponentMetrics, degree_skewness, weight_stats

MAX_ALIAS_PAIRS = 10_000


class Label(str, enum.Enum):
    USEFUL = "USEFUL"
    NOT_USEFUL = "NOT_USEFUL"
    UNCERTAIN = "UNCERTAIN"


class Subtype(str, enum.Enum):
    COMMUNICATION = "COMMUNICATION"
    LOGON = "LOGON"
    SOFTWARE_ARTIFACT = "SOFTWARE_ARTIFACT"
    REPOSITORY_COAUTHOR = "REPOSITORY_COAUTHOR"


@dataclass(frozen=True)
class ComponentLabel:
    label: Label
    subtype: Subtype | None = None
    evidence: tuple[tuple[str, float, float], ...] = ()


@dataclass(frozen=True)
class Policy:
    repo_top_domain_share: float = 0.8
    logon_max_nodes: int = 15
    logon_min_density: float = 0.8
    logon_min_alias_similarity: float = 0.5
    artifact_max_weight_cv: float = 0.25
    artifact_min_nodes: int = 20
    artifact_min_top_domain_share: float = 0.6
    comm_min_weight_cv: float = 0.75
    comm_min_degree_skew: float = 1.0


@dataclass(frozen=True)
class SignalVector:
    metrics: ComponentMetrics
    weight_cv: float
    top_domain_share: float
    stoplist_domain_hit: bool
    alias_similarity: float
    degree_skew: float = 0.0


# -- config files ------------------------------------------------------------

def _config_lines(text: str) -> Iterable[str]:
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            yield line


def load_stoplist(path: str | Path | None = None) -> frozenset[str]:
    if path is None:
        text = resources.files("emailnet").joinpath("data/stoplist.txt").read_text()
    else:
        text = Path(path).read_text()
    return frozenset(line.lower() for line in _config_lines(text))


DEFAULT_STOPLIST = load_stoplist()


def load_policy(path: str | Path | None = None) -> Policy:
    if path is None:
        return Policy()
    known = {f.name: f.type for f in fields(Policy)}
    values = {}
    for line in _config_lines(Path(path).read_text()):
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in known:
            raise ValueError(f"bad policy line: {line!r}")
        values[key] = int(value) if known[key] in (int, "int") else float(value)
    return Policy(**values)


# -- signals -----------------------------------------------------------------

def edit_distance(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def alias_similarity(addresses: Iterable[str]) -> float:
    addrs = sorted(addresses)
    k = len(addrs)
    while k * (k - 1) // 2 > MAX_ALIAS_PAIRS:
        k -= 1
    locals_ = [a.lower().split("@", 1)[0] for a in addrs[:k]]
    total = 0.0
    pairs = 0
    for i in range(k):
        for j in range(i + 1, k):
            a, b = locals_[i], locals_[j]
            longest = max(len(a), len(b))
            total += 1.0 - edit_distance(a, b) / longest if longest else 1.0
            pairs += 1
    return total / pairs if pairs else 0.0


def _domain(address: str) -> str:
    return address.rsplit("@", 1)[-1].lower()


def on_stoplist(domain: str, stoplist: frozenset[str]) -> bool:
    return any(domain == s or domain.endswith("." + s) for s in stoplist)


def extract_signals(
    component: Component, metrics: ComponentMetrics, stoplist: frozenset[str] = DEFAULT_STOPLIST
) -> SignalVector:
    graph = component.subgraph
    mean, std = weight_stats(graph)
    domains = Counter(_domain(a) for a in graph.nodes)
    top_share = max(domains.values()) / len(graph.nodes) if graph.nodes else 0.0
    return SignalVector(
        metrics=metrics,
        weight_cv=std / mean if mean else 0.0,
        top_domain_share=top_share,
        stoplist_domain_hit=any(on_stoplist(d, stoplist) for d in domains),
        alias_similarity=alias_similarity(graph.nodes),
        degree_skew=degree_skewness(graph),
    )


# -- rules -------------------------------------------------------------------

def classify(signals: SignalVector, policy: Policy = Policy()) -> ComponentLabel:
    m = signals.metrics
    if signals.stoplist_domain_hit and signals.top_domain_share >= policy.repo_top_domain_share:
        return ComponentLabel(Label.NOT_USEFUL, Subtype.REPOSITORY_COAUTHOR, (
            ("stoplist_domain_hit", 1.0, 1.0),
            ("top_domain_share", signals.top_domain_share, policy.repo_top_domain_share),
        ))
    if (
        m.nodes <= policy.logon_max_nodes
        and m.density >= policy.logon_min_density
        and signals.alias_similarity >= policy.logon_min_alias_similarity
    ):
        return ComponentLabel(Label.USEFUL, Subtype.LOGON, (
            ("nodes", float(m.nodes), float(policy.logon_max_nodes)),
            ("density", m.density, policy.logon_min_density),
            ("alias_similarity", signals.alias_similarity, policy.logon_min_alias_similarity),
        ))
    if (
        signals.weight_cv <= policy.artifact_max_weight_cv
        and m.nodes >= policy.artifact_min_nodes
        and signals.top_domain_share >= policy.artifact_min_top_domain_share
    ):
        return ComponentLabel(Label.NOT_USEFUL, Subtype.SOFTWARE_ARTIFACT, (
            ("weight_cv", signals.weight_cv, policy.artifact_max_weight_cv),
            ("nodes", float(m.nodes), float(policy.artifact_min_nodes)),
            ("top_domain_share", signals.top_domain_share, policy.artifact_min_top_domain_share),
        ))
    if signals.weight_cv >= policy.comm_min_weight_cv and signals.degree_skew >= policy.comm_min_degree_skew:
        return ComponentLabel(Label.USEFUL, Subtype.COMMUNICATION, (
            ("weight_cv", signals.weight_cv, policy.comm_min_weight_cv),
            ("degree_skew", signals.degree_skew, policy.comm_min_degree_skew),
        ))
    return ComponentLabel(Label.UNCERTAIN)
