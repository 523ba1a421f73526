"""Budgeted search for a smaller presentation of the same knot.

The moves that preserve the knot type never need to enlarge the grid to
expose a destabilization in practice, so the search explores cyclic shifts,
legal castlings and (castling-assisted) destabilizations only.  It runs
breadth-first from the current diagram, deduplicating positions by their
canonical key; whenever a strictly smaller grid is found the search restarts
from it with a fresh visited set, which keeps the frontier from filling up
with large diagrams once progress has been made.

The budget counts node expansions.  The result is deterministic: frontiers
are expanded in canonical-key order and the returned diagram is the canonical
representative of the best ``(size, key)`` pair encountered.
"""

from __future__ import annotations

from .gridkit import (
    GridDiagram,
    canonical_key,
    generalized_destabilizations,
    grids_related_by_moves,
)


def _neighbors(g: GridDiagram) -> list[GridDiagram]:
    out = list(grids_related_by_moves(g))
    out.extend(generalized_destabilizations(g))
    return out


def minimize(g: GridDiagram, budget: int = 20000) -> GridDiagram:
    """Search for a small grid presenting the same knot as ``g``.

    Spends at most ``budget`` node expansions; ``budget = 0`` returns the
    canonical translate of ``g`` unchanged.
    """
    best_key = canonical_key(g)
    best_n = g.n
    if budget <= 0:
        return GridDiagram(*best_key)

    start = GridDiagram(*best_key)
    while budget > 0:
        visited = {canonical_key(start)}
        frontier = [start]
        restart: GridDiagram | None = None
        while frontier and budget > 0 and restart is None:
            frontier.sort(key=canonical_key)
            successors: list[GridDiagram] = []
            for node in frontier:
                if budget <= 0 or restart is not None:
                    break
                budget -= 1
                for nb in _neighbors(node):
                    key = canonical_key(nb)
                    if key in visited:
                        continue
                    visited.add(key)
                    if (nb.n, key) < (best_n, best_key):
                        best_n, best_key = nb.n, key
                    if nb.n < node.n:
                        restart = GridDiagram(*key)
                        break
                    successors.append(nb)
            frontier = successors
        if restart is None:
            break
        start = restart
    return GridDiagram(*best_key)
