"""Shared generators and fixtures for the test suite."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
import pytest

import polylink as pl

TAU = 2.0 * math.pi
FIXTURES = Path(__file__).parent / "fixtures"


def load_fixture_chain(name: str) -> pl.PolygonChain:
    data = json.loads((FIXTURES / name).read_text())
    return pl.PolygonChain(np.asarray(data["vertices"], dtype=float))


def star_polygon(n: int, rng: np.random.Generator) -> pl.PolygonChain:
    """Random simple polygon: radial points sorted by angle."""
    phis = np.sort(rng.uniform(0.0, TAU, n))
    radii = rng.uniform(0.5, 1.5, n)
    pts = np.column_stack((radii * np.cos(phis), radii * np.sin(phis)))
    return pl.canonicalize(pl.PolygonChain(pts))


def random_embedded_ccw(
    n: int,
    rng: np.random.Generator,
    require_nonconvex: bool = False,
    min_reflex: float = 0.15,
    max_tries: int = 500,
) -> pl.PolygonChain:
    """Random embedded CCW polygon with quality margins.

    Edges at least 0.1 long, no turn within 0.1 of a fold, elliptic
    energy below 1e4 (keeps vertices clear of non-incident edges), and
    optionally at least one reflex angle below ``-min_reflex``.
    """
    for _ in range(max_tries):
        chain = star_polygon(n, rng)
        cls = pl.classify(chain)
        if not cls.embedded:
            continue
        if abs(cls.winding + TAU) <= 1e-6:
            chain = pl.canonicalize(pl.reflect_x(chain))
            cls = pl.classify(chain)
        if abs(cls.winding - TAU) > 1e-6:
            continue
        theta = pl.turn_angles_from_vertices(chain).angles
        if chain.edge_lengths().min() < 0.1:
            continue
        if np.abs(theta).max() > math.pi - 0.1:
            continue
        if require_nonconvex and theta.min() > -min_reflex:
            continue
        try:
            if pl.elliptic_energy(chain) > 1e4:
                continue
        except ValueError:
            continue
        return chain
    raise RuntimeError(f"could not generate a suitable {n}-gon")


def random_generic_lengths(
    n: int,
    rng: np.random.Generator,
    margin: float = 1e-6,
    max_tries: int = 500,
) -> pl.SideLengths:
    """Random feasible generic lengths.

    ``margin`` is an absolute floor on every signed length sum (the
    lengths are order one); the default merely avoids pathological
    near-straight-line vectors, callers wanting well-conditioned oracle
    geometry pass something like 0.05.
    """
    for _ in range(max_tries):
        ell = rng.uniform(0.6, 1.6, n)
        lengths = pl.SideLengths(ell)
        if not pl.is_feasible(lengths):
            continue
        signs = ((np.arange(1 << (n - 1))[:, None] >> np.arange(n - 1)) & 1) * 2 - 1
        full = np.column_stack((np.ones(1 << (n - 1)), signs))
        if np.min(np.abs(full @ ell)) < margin:
            continue
        return lengths
    raise RuntimeError("could not sample generic lengths")


def random_closed_chain(
    rng: np.random.Generator, n: int | None = None
) -> pl.PolygonChain:
    """Random closed configuration: random free angles, elbow closure."""
    while True:
        nn = n if n is not None else int(rng.integers(4, 9))
        lengths = random_generic_lengths(nn, rng)
        free = rng.uniform(-math.pi, math.pi, nn - 3)
        chains = pl.closures_for_free_angles(lengths, free)
        if not chains:
            continue
        chain = chains[int(rng.integers(0, len(chains)))]
        if chain.edge_lengths().min() > 1e-6:
            return chain


def random_convex_quadrilateral(rng: np.random.Generator) -> np.ndarray:
    """Strictly convex CCW quadrilateral from sorted points on a circle."""
    while True:
        phis = np.sort(rng.uniform(0.0, TAU, 4))
        radii = rng.uniform(0.7, 1.3, 4)
        quad = np.column_stack((radii * np.cos(phis), radii * np.sin(phis)))
        try:
            theta = pl.turn_angles_from_vertices(pl.PolygonChain(quad)).angles
        except ValueError:
            continue
        if theta.min() > 0.05 and theta.max() < math.pi - 0.05:
            return quad


@pytest.fixture(scope="session")
def pentagon_fixture() -> pl.PolygonChain:
    return load_fixture_chain("pentagon_nonconvex.json")


@pytest.fixture(scope="session")
def hexagon_fixture() -> pl.PolygonChain:
    return load_fixture_chain("hexagon_nonconvex.json")
