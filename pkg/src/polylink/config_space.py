"""Predicates and enumeration over the configuration space of a linkage.

The configuration space of side lengths ``l`` is the set of all closed
planar chains realizing those lengths in the canonical frame.  This module
classifies configurations (embedded / winding / convex), detects
straight-line configurations exactly, rebuilds configurations from partial
turn-angle data, and provides the desk-scale brute-force enumeration oracle
that the constructive machinery is validated against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .chain_geometry import (
    ORIENT_EPS,
    TANGENT_RTOL,
    PolygonChain,
    SegmentRelation,
    SideLengths,
    TurnAngles,
    circle_circle_intersection,
    segment_intersection,
    turn_angles_from_vertices,
    vertices_from_turn_angles,
)

TAU = 2.0 * math.pi

WINDING_TOL = 1e-6
CONVEX_ANGLE_SLACK = 1e-9


class ClosureError(ValueError):
    """Partial angle data admits no closed configuration."""


@dataclass(frozen=True)
class ConfigClass:
    """Classification of a single configuration."""

    embedded: bool
    winding: float
    convex_ccw: bool


@dataclass(frozen=True)
class StraightLineReport:
    """Sign vectors epsilon in {+1,-1}^n with sum(eps_i * l_i) = 0.

    Only the representative with ``eps[0] == +1`` of each ``{eps, -eps}``
    pair is listed.  ``exact`` is True when membership was decided in exact
    rational arithmetic.
    """

    sign_vectors: tuple[tuple[int, ...], ...]
    exact: bool

    def __len__(self) -> int:
        return len(self.sign_vectors)


def _edge_pairs(n: int):
    """Index pairs (i, j) of non-adjacent edges of an n-cycle."""
    for i, j in combinations(range(n), 2):
        if j - i == 1 or (i == 0 and j == n - 1):
            continue
        yield i, j


def classify(chain: PolygonChain) -> ConfigClass:
    """Classify a closed chain: embeddedness, winding, convexity.

    A chain is embedded when no two non-adjacent edges touch at all and no
    adjacent pair folds back onto itself (collinear overlap).  Convexity
    additionally requires counterclockwise winding and no negative turn
    angle beyond a small slack.
    """
    angles = turn_angles_from_vertices(chain)
    verts = chain.vertices
    n = chain.n
    segs = [(verts[i - 1], verts[i]) for i in range(n)]

    embedded = True
    for i, j in _edge_pairs(n):
        if segment_intersection(segs[i], segs[j]) is not SegmentRelation.DISJOINT:
            embedded = False
            break
    if embedded:
        # adjacent edges may only share their common endpoint
        for i in range(n):
            rel = segment_intersection(segs[i], segs[(i + 1) % n])
            if rel is SegmentRelation.OVERLAP:
                embedded = False
                break

    winding = angles.winding
    convex = (
        embedded
        and abs(winding - TAU) <= WINDING_TOL
        and float(angles.angles.min()) >= -CONVEX_ANGLE_SLACK
    )
    return ConfigClass(embedded=embedded, winding=winding, convex_ccw=convex)


def is_feasible(lengths: SideLengths) -> bool:
    """True when some closed configuration exists (strict polygon
    inequality; equality admits only the straight configuration)."""
    ell = lengths.lengths
    return bool(ell.max() < ell.sum() - ell.max())


def straight_line_sign_vectors(
    lengths: SideLengths, tolerance: float | None = None
) -> StraightLineReport:
    """All sign vectors with ``|sum(eps_i * l_i)| <= tolerance``.

    Candidates are prefiltered in floating point with a safety margin and
    then confirmed in exact rational arithmetic (every finite double is a
    ratio of integers), so the default report is exact.  The default
    tolerance is ``1e-9`` of the perimeter.
    """
    n = lengths.n
    if n > 30:
        raise ValueError("exhaustive sign enumeration is limited to n <= 30")
    ell = lengths.lengths
    if tolerance is None:
        tolerance = 1e-9 * lengths.perimeter
    if tolerance < 0:
        raise ValueError("tolerance must be nonnegative")

    m = n - 1
    rest = ((np.arange(1 << m)[:, None] >> np.arange(m)) & 1) * 2 - 1
    signs = np.column_stack((np.ones(1 << m, dtype=np.int64), rest[:, ::-1]))
    sums = signs.astype(float) @ ell
    # margin covers float summation error before the exact confirmation
    margin = 16 * np.finfo(float).eps * lengths.perimeter * n
    candidates = np.nonzero(np.abs(sums) <= tolerance + margin)[0]

    tol_frac = Fraction(float(tolerance))
    found: list[tuple[int, ...]] = []
    for idx in candidates:
        vec = tuple(int(v) for v in signs[idx])
        total = sum(Fraction(float(l)) * s for l, s in zip(ell, vec))
        if abs(total) <= tol_frac:
            found.append(vec)
    return StraightLineReport(sign_vectors=tuple(found), exact=True)


def is_generic(lengths: SideLengths, tolerance: float | None = None) -> bool:
    """True when no straight-line configuration exists, in which case the
    configuration space is a smooth manifold of dimension n - 3."""
    return len(straight_line_sign_vectors(lengths, tolerance)) == 0


def closures_for_free_angles(
    lengths: SideLengths, free_angles
) -> list[PolygonChain]:
    """Closed chains realizing the given first ``n - 3`` turn angles.

    The last two vertices form an elbow solved by circle intersection;
    both elbow branches (0 or 1 of which may exist) are returned in
    deterministic order (left-of-line branch first).
    """
    ell = lengths.lengths
    n = lengths.n
    free = np.asarray(free_angles, dtype=float)
    if free.size != n - 3:
        raise ValueError(f"expected {n - 3} free angles, got {free.size}")
    headings = np.concatenate(([0.0], np.cumsum(free)))
    steps = ell[: n - 2, None] * np.column_stack(
        (np.cos(headings), np.sin(headings))
    )
    front = np.cumsum(steps, axis=0)  # vertices 0 .. n-3
    anchor = front[-1]
    if math.hypot(*anchor) <= TANGENT_RTOL * (ell[n - 2] + ell[n - 1]):
        return []  # elbow circles concentric: degenerate, no discrete branch
    points = circle_circle_intersection(anchor, ell[n - 2], (0.0, 0.0), ell[n - 1])
    chains = []
    for pt in points:
        verts = np.vstack((front, pt, (0.0, 0.0)))
        chains.append(PolygonChain(verts))
    return chains


@dataclass(frozen=True)
class ConfigRecord:
    """One sampled configuration, fully materialized."""

    free_values: np.ndarray
    branch: int
    angles: TurnAngles
    chain: PolygonChain
    config_class: ConfigClass


@dataclass(eq=False)
class ConfigSampleSet:
    """Brute-force sample of the configuration space on a free-angle grid.

    Stored column-wise for memory economy at fine grids; use
    :meth:`config` to materialize one sample (vertices are rebuilt from
    the stored turn angles).  Samples appear in grid-major, branch-minor
    order.
    """

    lengths: SideLengths
    grid_per_angle: int
    free_indices: np.ndarray  # (M, n-3) int32, grid index per free angle
    branch: np.ndarray  # (M,) int8
    angles: np.ndarray  # (M, n) float
    winding: np.ndarray  # (M,)
    embedded: np.ndarray  # (M,) bool
    convex_ccw: np.ndarray  # (M,) bool

    def __len__(self) -> int:
        return int(self.branch.size)

    def free_values(self, i: int) -> np.ndarray:
        n3 = self.free_indices.shape[1]
        return self.angles[i, :n3].copy()

    def chain(self, i: int) -> PolygonChain:
        chain, _ = vertices_from_turn_angles(self.lengths, self.angles[i])
        return chain

    def config(self, i: int) -> ConfigRecord:
        return ConfigRecord(
            free_values=self.free_values(i),
            branch=int(self.branch[i]),
            angles=TurnAngles(self.angles[i].copy()),
            chain=self.chain(i),
            config_class=ConfigClass(
                embedded=bool(self.embedded[i]),
                winding=float(self.winding[i]),
                convex_ccw=bool(self.convex_ccw[i]),
            ),
        )


def _batch_turn_angles(verts: np.ndarray) -> np.ndarray:
    """Turn angles for a batch of closed chains, shape (M, n, 2) -> (M, n)."""
    e = verts - np.roll(verts, 1, axis=1)
    nxt = np.roll(e, -1, axis=1)
    cross = e[..., 0] * nxt[..., 1] - e[..., 1] * nxt[..., 0]
    dot = e[..., 0] * nxt[..., 0] + e[..., 1] * nxt[..., 1]
    theta = np.arctan2(cross, dot)
    return np.where(theta <= -math.pi, math.pi, theta)


def _batch_embedded(verts: np.ndarray) -> np.ndarray:
    """Vectorized embeddedness test for a batch of closed chains.

    Mirrors :func:`classify`: non-adjacent edges must be fully disjoint,
    adjacent edges must not fold back onto each other.
    """
    M, n, _ = verts.shape
    scale = np.maximum(np.abs(verts).max(axis=(1, 2)), 1e-300)
    eps = ORIENT_EPS * scale * scale
    ok = np.ones(M, dtype=bool)

    def orient(a, b, c):
        v = (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (
            b[..., 1] - a[..., 1]
        ) * (c[..., 0] - a[..., 0])
        return np.where(np.abs(v) <= eps, 0.0, np.sign(v))

    prev = np.roll(verts, 1, axis=1)
    for i, j in _edge_pairs(n):
        a, b = prev[:, i], verts[:, i]
        c, d = prev[:, j], verts[:, j]
        o1 = orient(a, b, c)
        o2 = orient(a, b, d)
        o3 = orient(c, d, a)
        o4 = orient(c, d, b)
        contact = (o1 * o2 < 0) & (o3 * o4 < 0)

        def on_seg(p, q, r):
            pad = ORIENT_EPS * np.maximum(scale, 1e-300)
            return (
                (np.minimum(p[..., 0], q[..., 0]) - pad <= r[..., 0])
                & (r[..., 0] <= np.maximum(p[..., 0], q[..., 0]) + pad)
                & (np.minimum(p[..., 1], q[..., 1]) - pad <= r[..., 1])
                & (r[..., 1] <= np.maximum(p[..., 1], q[..., 1]) + pad)
            )

        contact |= (o1 == 0) & on_seg(a, b, c)
        contact |= (o2 == 0) & on_seg(a, b, d)
        contact |= (o3 == 0) & on_seg(c, d, a)
        contact |= (o4 == 0) & on_seg(c, d, b)
        ok &= ~contact

    # adjacent fold-back: collinear with opposite direction
    e = verts - prev
    nxt = np.roll(e, -1, axis=1)
    cross = e[..., 0] * nxt[..., 1] - e[..., 1] * nxt[..., 0]
    dot = e[..., 0] * nxt[..., 0] + e[..., 1] * nxt[..., 1]
    fold = (np.abs(cross) <= eps[:, None]) & (dot < 0.0)
    ok &= ~fold.any(axis=1)
    return ok


def enumerate_configurations(
    lengths: SideLengths,
    grid_per_angle: int,
    chunk: int = 1 << 17,
    windows: list[tuple[float, float] | None] | None = None,
) -> ConfigSampleSet:
    """Sweep a uniform grid over the free turn angles and close each chain.

    By default the first ``n - 3`` turn angles range over a grid of
    ``grid_per_angle`` values in ``(-pi, pi]`` (the endpoint ``pi`` is
    included exactly so fold configurations are hit).  ``windows`` may
    restrict individual angles to closed intervals, sampled inclusively
    at the same count; entries of ``None`` keep the full circle.  Each
    grid point contributes one closed configuration per elbow branch
    whose closing circles intersect; a tangency contributes a single
    configuration.  Supported for ``3 <= n <= 6`` by design: this is the
    desk-scale oracle.
    """
    n = lengths.n
    if not 3 <= n <= 6:
        raise ValueError("the enumeration oracle supports 3 <= n <= 6")
    if grid_per_angle < 1:
        raise ValueError("grid_per_angle must be >= 1")
    ell = lengths.lengths
    n3 = n - 3
    full = -math.pi + TAU * np.arange(1, grid_per_angle + 1) / grid_per_angle
    if windows is None:
        grids = [full] * n3
    else:
        if len(windows) != n3:
            raise ValueError(f"windows must list {n3} entries")
        grids = [
            full
            if w is None
            else np.linspace(float(w[0]), float(w[1]), grid_per_angle)
            for w in windows
        ]

    total = grid_per_angle**n3
    r1, r2 = float(ell[n - 2]), float(ell[n - 1])
    tol = TANGENT_RTOL * (r1 + r2)

    cols: dict[str, list[np.ndarray]] = {
        k: [] for k in ("free_indices", "branch", "angles")
    }

    for start in range(0, max(total, 1), chunk):
        stop = min(start + chunk, total)
        flat = np.arange(start, stop, dtype=np.int64)
        if n3 > 0:
            idx = np.empty((flat.size, n3), dtype=np.int32)
            rem = flat.copy()
            for a in range(n3 - 1, -1, -1):
                idx[:, a] = rem % grid_per_angle
                rem //= grid_per_angle
            free = np.column_stack(
                [grids[a][idx[:, a]] for a in range(n3)]
            )
        else:
            idx = np.zeros((1, 0), dtype=np.int32)
            free = np.zeros((1, 0))

        m = free.shape[0]
        headings = np.concatenate(
            (np.zeros((m, 1)), np.cumsum(free, axis=1)), axis=1
        )
        steps = ell[: n - 2][None, :, None] * np.stack(
            (np.cos(headings), np.sin(headings)), axis=2
        )
        front = np.cumsum(steps, axis=1)  # (m, n-2, 2): vertices 0..n-3
        anchor = front[:, -1, :]
        d = np.hypot(anchor[:, 0], anchor[:, 1])

        feasible = (d > tol) & (d <= r1 + r2 + tol) & (d >= abs(r1 - r2) - tol)
        if not feasible.any():
            continue
        fi = np.nonzero(feasible)[0]
        dl = d[fi]
        a_par = (dl * dl + r1 * r1 - r2 * r2) / (2.0 * dl)
        h_sq = np.maximum(r1 * r1 - a_par * a_par, 0.0)
        tangent = (np.abs(dl - (r1 + r2)) <= tol) | (
            np.abs(dl - abs(r1 - r2)) <= tol
        )
        h = np.where(tangent, 0.0, np.sqrt(h_sq))
        u = -anchor[fi] / dl[:, None]
        foot = anchor[fi] + a_par[:, None] * u
        normal = np.column_stack((-u[:, 1], u[:, 0]))

        for branch_id in (0, 1):
            if branch_id == 0:
                pts = foot + h[:, None] * normal
                sel = np.ones(fi.size, dtype=bool)
            else:
                pts = foot - h[:, None] * normal
                sel = ~tangent  # tangency already emitted on branch 0
            if not sel.any():
                continue
            rows = fi[sel]
            verts = np.concatenate(
                (
                    front[rows],
                    pts[sel][:, None, :],
                    np.zeros((rows.size, 1, 2)),
                ),
                axis=1,
            )
            theta = _batch_turn_angles(verts)
            cols["free_indices"].append(idx[rows] if n3 > 0 else
                                        np.zeros((rows.size, 0), np.int32))
            cols["branch"].append(
                np.full(rows.size, branch_id, dtype=np.int8)
            )
            cols["angles"].append(theta)

    if cols["branch"]:
        free_indices = np.concatenate(cols["free_indices"])
        branch = np.concatenate(cols["branch"])
        angles = np.concatenate(cols["angles"])
    else:
        free_indices = np.zeros((0, n3), np.int32)
        branch = np.zeros(0, np.int8)
        angles = np.zeros((0, n))

    # restore grid-major, branch-minor order across the per-branch blocks
    if n3 > 0 and branch.size:
        key = free_indices.astype(np.int64) @ (
            grid_per_angle ** np.arange(n3 - 1, -1, -1, dtype=np.int64)
        )
        order = np.lexsort((branch, key))
        free_indices, branch, angles = (
            free_indices[order],
            branch[order],
            angles[order],
        )

    # classify in bulk (rebuild vertices chunk-wise from angles)
    M = branch.size
    winding = angles.sum(axis=1) if M else np.zeros(0)
    embedded = np.zeros(M, dtype=bool)
    for start in range(0, M, chunk):
        stop = min(start + chunk, M)
        th = angles[start:stop]
        m = th.shape[0]
        headings = np.concatenate(
            (np.zeros((m, 1)), np.cumsum(th[:, : n - 1], axis=1)), axis=1
        )
        steps = ell[None, :, None] * np.stack(
            (np.cos(headings), np.sin(headings)), axis=2
        )
        verts = np.cumsum(steps, axis=1)
        embedded[start:stop] = _batch_embedded(verts)
    convex = (
        embedded
        & (np.abs(winding - TAU) <= WINDING_TOL)
        & (angles.min(axis=1) >= -CONVEX_ANGLE_SLACK if M else np.zeros(0, bool))
    )

    return ConfigSampleSet(
        lengths=lengths,
        grid_per_angle=grid_per_angle,
        free_indices=free_indices,
        branch=branch,
        angles=angles,
        winding=winding,
        embedded=embedded,
        convex_ccw=convex,
    )


def choose_qrs(angles: TurnAngles) -> tuple[int, int, int]:
    """Pick three omitted indices for partial-angle reconstruction.

    Takes the three largest-magnitude turn angles (well-separated angles
    make the circle intersection robust) and returns them in increasing
    index order.  All three must be nonzero.
    """
    mags = np.abs(angles.angles)
    order = np.argsort(-mags, kind="stable")[:3]
    q, r, s = sorted(int(i) for i in order)
    if mags[[q, r, s]].min() <= 1e-12:
        raise ValueError("need three nonzero turn angles to drop")
    return q, r, s


def _lay_subchain(ell_seg: np.ndarray, interior: np.ndarray) -> np.ndarray:
    """Positions of a rigid open subchain in a local frame.

    First vertex at the origin, first edge along +x; ``interior`` holds the
    turn angles at the vertices strictly inside the subchain.  Returns all
    vertex positions including both endpoints, shape (len(ell_seg)+1, 2).
    """
    headings = np.concatenate(([0.0], np.cumsum(interior)))
    steps = ell_seg[:, None] * np.column_stack(
        (np.cos(headings), np.sin(headings))
    )
    return np.vstack(((0.0, 0.0), np.cumsum(steps, axis=0)))


def reconstruct_from_partial_angles(
    lengths: SideLengths,
    partial: dict[int, float],
    q: int,
    r: int,
    s: int,
    orientation: int,
) -> PolygonChain:
    """Assemble a closed chain from all turn angles except three.

    ``partial`` maps vertex index -> turn angle for every vertex except
    ``q < r < s`` (0-based).  The three known-rigid subchains between the
    omitted vertices are rebuilt, the subchain through the frame edge is
    pinned to the canonical frame, and the remaining junction vertex ``r``
    is placed by circle intersection on the side selected by
    ``orientation`` (the sign of the triple ``(v_q, v_r, v_s)``).
    """
    n = lengths.n
    ell = lengths.lengths
    if not 0 <= q < r < s < n:
        raise ValueError("need 0 <= q < r < s < n")
    if orientation not in (-1, 1):
        raise ValueError("orientation must be +1 or -1")
    expected = set(range(n)) - {q, r, s}
    if set(partial) != expected:
        raise ValueError(
            f"partial angles must cover exactly the indices {sorted(expected)}"
        )

    pos = np.full((n, 2), np.nan)
    pos[n - 1] = (0.0, 0.0)
    pos[0] = (ell[0], 0.0)
    # forward along the frame subchain: vertices 1..q
    h = 0.0
    for i in range(0, q):
        h += partial[i]
        pos[i + 1] = pos[i] + ell[i + 1] * np.array([math.cos(h), math.sin(h)])
    # backward from the origin corner: vertices n-2..s
    h = 0.0
    for i in range(n - 1, s, -1):
        h -= partial[i]
        pos[i - 1] = pos[i] - ell[i] * np.array([math.cos(h), math.sin(h)])

    mid1 = _lay_subchain(
        ell[q + 1 : r + 1], np.array([partial[i] for i in range(q + 1, r)])
    )
    mid2 = _lay_subchain(
        ell[r + 1 : s + 1], np.array([partial[i] for i in range(r + 1, s)])
    )
    d_qr = float(math.hypot(*mid1[-1]))
    d_rs = float(math.hypot(*mid2[-1]))

    points = circle_circle_intersection(pos[q], d_qr, pos[s], d_rs)
    if not points:
        raise ClosureError("the partial angles admit no closed configuration")
    if len(points) == 1:
        # tangent junction: the triple is collinear, no orientation picks a side
        raise ClosureError("ambiguous tangency: junction orientation undefined")
    chosen = None
    for pt in points:
        # cross(v_r - v_q, v_s - v_q): positive for a counterclockwise triple
        cr = (pt[0] - pos[q][0]) * (pos[s][1] - pos[q][1]) - (
            pt[1] - pos[q][1]
        ) * (pos[s][0] - pos[q][0])
        sign = 1 if cr > 0 else (-1 if cr < 0 else 0)
        if sign == orientation:
            chosen = np.asarray(pt)
            break
    if chosen is None:
        raise ClosureError("no junction placement matches the requested orientation")
    pos[r] = chosen

    for (a, b, local) in ((q, r, mid1), (r, s, mid2)):
        chord = pos[b] - pos[a]
        phi = math.atan2(chord[1], chord[0]) - math.atan2(
            local[-1][1], local[-1][0]
        )
        c, si = math.cos(phi), math.sin(phi)
        rot = np.array([[c, -si], [si, c]])
        for i in range(a + 1, b):
            pos[i] = pos[a] + rot @ local[i - a]

    return PolygonChain(pos)
