"""Sanity checks for the cell-complex helpers on known shapes."""

import numpy as np

from topo import grid_complex, surface_chi


def test_block_is_disk():
    block = {(i, j) for i in range(4) for j in range(4)}
    assert grid_complex(block) == (1, True)


def test_ring_has_chi_zero():
    ring = {(i, j) for i in range(5) for j in range(5)} - {(2, 2)}
    assert grid_complex(ring) == (0, True)


def test_two_components():
    cells = {(0, 0), (5, 5)}
    chi, conn = grid_complex(cells)
    assert chi == 2 and not conn


def _const_angles(_):
    return np.zeros(4)


def test_doubled_disk_is_sphere():
    # both sheets cover the same block and everything outside is
    # infeasible: gluing along the whole boundary doubles the disk
    block = {(i, j) for i in range(2, 6) for j in range(2, 6)}
    sheet = {0: {c: 0 for c in block}, 1: {c: 0 for c in block}}
    chi, conn = surface_chi(sheet, set(block), _const_angles, grid=100)
    assert (chi, conn) == (2, True)


def test_one_sheet_disk():
    block = {(i, j) for i in range(2, 6) for j in range(2, 6)}
    sheet = {0: {c: 0 for c in block}, 1: {}}
    chi, conn = surface_chi(sheet, set(block), _const_angles, grid=100)
    assert (chi, conn) == (1, True)


def test_partial_seam_is_still_a_disk():
    # sheets share only one boundary arc: feasibility extends past the
    # other three sides so no gluing happens there
    block = {(i, j) for i in range(2, 6) for j in range(2, 6)}
    feasible = set(block) | {(i, j) for i in range(1, 7) for j in range(1, 7)
                             if j >= 2}
    sheet = {0: {c: 0 for c in block}, 1: {c: 0 for c in block}}
    chi, conn = surface_chi(sheet, feasible, _const_angles, grid=100)
    assert (chi, conn) == (1, True)


def test_fold_cut_separates():
    # two columns whose angle vectors jump by 2*pi across the shared edge:
    # the complex must treat them as disconnected
    left = {(2, j) for j in range(3)}
    right = {(3, j) for j in range(3)}
    sheet = {0: {**{c: 0 for c in left}, **{c: 1 for c in right}}, 1: {}}

    def angles_of(i):
        # a fold crossing wraps one angle from near +pi to near -pi
        return np.array([3.0, 0.0, 0.0]) if i == 0 else np.array([-3.0, 0.0, 0.0])

    chi, conn = surface_chi(
        sheet, left | right, angles_of, grid=100
    )
    assert not conn
    assert chi == 2  # two disks
