"""PR communication network.

Nodes are non-bot contributors; an undirected edge joins two contributors
for every distinct PR they both participate in (author, commenter, or
reviewer), weighted by the shared-PR count, never the comment count.
Node size upstream is the number of PRs authored in the window.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations

from .metrics import AttentionRow, FilterSpec, group_of, prs_needing_attention

PARTICIPATION_KINDS = ("pr_opened", "pr_comment", "pr_review")


@dataclass
class CommunicationGraph:
    lens: str
    nodes: list = field(default_factory=list)  # (identity_id, name, group, authored)
    edges: list = field(default_factory=list)  # (id_a, id_b, weight), id_a < id_b

    def node_ids(self):
        return {n[0] for n in self.nodes}

    def degree(self, identity_id) -> int:
        return sum(1 for a, b, _ in self.edges if identity_id in (a, b))

    def weight(self, a, b) -> int:
        key = tuple(sorted((a, b)))
        for edge in self.edges:
            if (edge[0], edge[1]) == key:
                return edge[2]
        return 0

    def to_dict(self):
        return {
            "lens": self.lens,
            "nodes": [
                {"id": nid, "name": name, "group": group, "size": authored}
                for nid, name, group, authored in self.nodes
            ],
            "edges": [
                {"source": a, "target": b, "weight": w} for a, b, w in self.edges
            ],
        }


def build_pr_network(snapshot, registry, spec: FilterSpec) -> CommunicationGraph:
    participants = defaultdict(set)  # (repo, artifact) -> identity ids
    authored = defaultdict(int)
    identities = {}
    for event in snapshot:
        if not spec.contains(event.timestamp):
            continue
        if event.kind not in PARTICIPATION_KINDS:
            continue
        identity = registry.identity_for(event.actor)
        if identity is None or identity.is_bot:
            continue
        identities[identity.identity_id] = identity
        participants[(event.repo_id, event.artifact_id)].add(identity.identity_id)
        if event.kind == "pr_opened":
            authored[identity.identity_id] += 1

    weights = defaultdict(int)
    for members in participants.values():
        for a, b in combinations(sorted(members), 2):
            weights[(a, b)] += 1

    nodes = [
        (
            iid,
            identities[iid].display_name,
            group_of(identities[iid], spec.lens),
            authored.get(iid, 0),
        )
        for iid in sorted(identities)
    ]
    edges = [(a, b, weights[(a, b)]) for a, b in sorted(weights)]
    return CommunicationGraph(lens=spec.lens, nodes=nodes, edges=edges)


def isolated_contributors(graph, snapshot, registry, spec: FilterSpec):
    """Uncommented PRs authored by degree-0 nodes, as attention rows."""
    connected = set()
    for a, b, _ in graph.edges:
        connected.add(a)
        connected.add(b)
    isolated = graph.node_ids() - connected
    return [
        row
        for row in prs_needing_attention(snapshot, registry, spec)
        if row.author_id in isolated
    ]


def connected_components(graph):
    """Node-id sets of the undirected graph, largest first."""
    adjacency = defaultdict(set)
    for a, b, _ in graph.edges:
        adjacency[a].add(b)
        adjacency[b].add(a)
    seen = set()
    components = []
    for nid in sorted(graph.node_ids()):
        if nid in seen:
            continue
        component = set()
        stack = [nid]
        while stack:
            node = stack.pop()
            if node in seen:
                continue
            seen.add(node)
            component.add(node)
            stack.extend(adjacency[node] - seen)
        components.append(component)
    components.sort(key=lambda c: (-len(c), min(c)))
    return components
