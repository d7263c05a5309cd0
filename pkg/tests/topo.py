"""Cell-complex topology helpers for the desk-scale region checks.

``grid_complex`` treats a set of grid cells as closed unit squares and
returns the Euler characteristic and connectivity of their union: the
right model for regions sampled on a single chart (e.g. the convex
prefix region).

``surface_chi`` builds a surface from the two elbow-branch sheets of a
configuration-space sample.  Faces are glued by union-find on half-edges:
same-branch neighbors glue only when the sampled turn angles vary
continuously across the edge (a jump through +-pi marks a fold curve,
which genuinely cuts the embedded region), and the two sheets glue to
each other along the feasibility boundary, where the elbow circles
become tangent and the branches coincide.
"""

from __future__ import annotations

import math
from collections import defaultdict, deque

import numpy as np

SIDE_CORNERS = {
    "L": ("BL", "TL"),
    "R": ("BR", "TR"),
    "B": ("BL", "BR"),
    "T": ("TL", "TR"),
}
OPPOSITE = {"L": "R", "R": "L", "B": "T", "T": "B"}


def grid_complex(cells) -> tuple[int, bool]:
    """(Euler characteristic, connectedness) of a union of closed cells."""
    cells = set(cells)
    if not cells:
        return 0, True
    verts, edges = set(), set()
    for i, j in cells:
        verts.update([(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)])
        edges.update(
            [
                ((i, j), (i + 1, j)),
                ((i, j + 1), (i + 1, j + 1)),
                ((i, j), (i, j + 1)),
                ((i + 1, j), (i + 1, j + 1)),
            ]
        )
    chi = len(verts) - len(edges) + len(cells)
    seen = {next(iter(cells))}
    queue = deque(seen)
    while queue:
        i, j = queue.popleft()
        for nb in ((i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)):
            if nb in cells and nb not in seen:
                seen.add(nb)
                queue.append(nb)
    return chi, len(seen) == len(cells)


class _DSU:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        p = self.parent
        p.setdefault(x, x)
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def surface_chi(sheet, feasible, angles_of, grid) -> tuple[int, bool]:
    """Euler characteristic and connectivity of the glued two-sheet region.

    ``sheet[b]`` maps cell -> sample index for branch ``b``; ``feasible``
    is the set of cells where the elbow closes at all; ``angles_of(i)``
    returns the turn-angle vector of sample ``i``.  Neighbor lookup wraps
    (the free-angle chart is periodic in every coordinate).
    """
    faces = [(b, c) for b in (0, 1) for c in sheet[b]]
    if not faces:
        return 0, True
    face_set = set(faces)
    edges, corners = _DSU(), _DSU()

    def neighbor(cell, side):
        i, j = cell
        if side == "L":
            return ((i - 1) % grid, j)
        if side == "R":
            return ((i + 1) % grid, j)
        if side == "B":
            return (i, (j - 1) % grid)
        return (i, (j + 1) % grid)

    def continuous(i1, i2):
        return float(np.abs(angles_of(i1) - angles_of(i2)).max()) < math.pi

    for f in faces:
        for side in "LRBT":
            edges.find((f, side))
            for corner in SIDE_CORNERS[side]:
                corners.find((f, corner))

    def glue(f1, s1, f2, s2, corner_pairs):
        edges.union((f1, s1), (f2, s2))
        for c1, c2 in corner_pairs:
            corners.union((f1, c1), (f2, c2))

    for f in faces:
        b, c = f
        for side in "LRBT":
            nb = neighbor(c, side)
            g = (b, nb)
            if g in face_set:
                if continuous(sheet[b][c], sheet[b][nb]):
                    mine = SIDE_CORNERS[side]
                    theirs = SIDE_CORNERS[OPPOSITE[side]]
                    glue(f, side, g, OPPOSITE[side], list(zip(mine, theirs)))
            elif nb not in feasible:
                other = (1 - b, c)
                if other in face_set and continuous(
                    sheet[b][c], sheet[1 - b][c]
                ):
                    mine = SIDE_CORNERS[side]
                    glue(f, side, other, side, list(zip(mine, mine)))

    n_edges = len({edges.find(x) for x in list(edges.parent)})
    n_verts = len({corners.find(x) for x in list(corners.parent)})
    chi = n_verts - n_edges + len(faces)

    by_edge = defaultdict(list)
    for f in faces:
        for side in "LRBT":
            by_edge[edges.find((f, side))].append(f)
    seen = {faces[0]}
    queue = deque(seen)
    while queue:
        f = queue.popleft()
        for side in "LRBT":
            for g in by_edge[edges.find((f, side))]:
                if g not in seen:
                    seen.add(g)
                    queue.append(g)
    return chi, len(seen) == len(faces)
