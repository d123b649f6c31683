"""Graphviz DOT rendering of a decision predicate graph."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import GraphFormatError
from .graph import CLASS, DPG
from .metrics import CommunityReport

__all__ = ["DotDocument", "export_dot"]

# qualitative palette, cycled per community
_PALETTE = (
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
    "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f",
)


@dataclass(frozen=True)
class DotDocument:
    text: str

    def __str__(self) -> str:
        return self.text


def _escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def export_dot(
    g: DPG,
    communities: CommunityReport | None = None,
    highlight_classes: bool = True,
) -> DotDocument:
    """Deterministic DOT text: nodes in id order, edges sorted by (src, dst),
    weights as edge labels, class nodes shaped distinctly, and optional
    fill colors keyed by community membership."""
    color_of: dict[int, str] = {}
    if communities is not None:
        covered = sorted(v for comm in communities.communities for v in comm)
        if covered != [n.id for n in g.nodes]:
            raise GraphFormatError("community report does not partition this graph")
        for k, comm in enumerate(communities.communities):
            for v in comm:
                color_of[v] = _PALETTE[k % len(_PALETTE)]

    lines = ["digraph dpg {", "  rankdir=LR;"]
    for n in g.nodes:
        attrs = [f'label="{_escape(n.label)}"']
        if n.kind == CLASS and highlight_classes:
            attrs.append("shape=doubleoctagon")
            attrs.append("style=filled")
            attrs.append(f'fillcolor="{color_of.get(n.id, "#eeeeee")}"')
        else:
            attrs.append("shape=box")
            if n.id in color_of:
                attrs.append("style=filled")
                attrs.append(f'fillcolor="{color_of[n.id]}"')
        lines.append(f"  n{n.id} [{', '.join(attrs)}];")
    for e in sorted(g.edges, key=lambda e: (e.src, e.dst)):
        lines.append(f'  n{e.src} -> n{e.dst} [label="{e.weight}"];')
    lines.append("}")
    return DotDocument(text="\n".join(lines) + "\n")
