"""Graphviz DOT text for N-graphs and N-flows via star expansion.

Every n-edge becomes a hub node with n legs, leg k ending at the vertex
(point, coordinate k).  Vertices carry their coordinate as the ``coord``
attribute; legs are emitted in coordinate order.  Flow weights set the hub
label, negative weights draw dashed legs.
"""

from __future__ import annotations

from .scalars import format_rational

_PALETTE = ("firebrick", "darkgreen", "goldenrod", "purple", "darkorange", "steelblue")


def _vertex_id(k: int, p: int) -> str:
    return f"v{k + 1}_{p}"


def _hub_id(e: tuple) -> str:
    return "e_" + "_".join(str(p) for p in e)


def to_dot(edges, n: int, weights=None, name: str = "ngraph") -> str:
    edges = sorted({tuple(e) for e in edges})
    lines = [f"graph {name} {{", "  node [fontsize=10];"]
    vertices = sorted({(k, e[k]) for e in edges for k in range(n)})
    for k, p in vertices:
        color = _PALETTE[k % len(_PALETTE)]
        lines.append(
            f'  {_vertex_id(k, p)} [label="{p}", coord={k + 1}, shape=circle, color={color}];'
        )
    for e in edges:
        hub = _hub_id(e)
        attrs = ['shape=point', 'color=blue']
        style = "solid"
        if weights is not None:
            w = weights[e]
            attrs = ['shape=box', f'label="{format_rational(w)}"', 'color=blue']
            if w < 0:
                style = "dashed"
        lines.append(f"  {hub} [{', '.join(attrs)}];")
        for k in range(n):
            lines.append(
                f'  {hub} -- {_vertex_id(k, e[k])} [leg={k + 1}, color=blue, style={style}];'
            )
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_dot(G) -> str:
    return to_dot(G.edges, G.n)


def flow_to_dot(A) -> str:
    return to_dot(A.support(), A.n, weights=A, name="nflow")
