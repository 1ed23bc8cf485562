"""Multi-tiling domains: unions of lattice-translated boxes.

A domain is described on the fundamental domain M·[0,1)^d by a finite
list of cells.  Each cell owns a half-open box in [0,1)^d together with
k distinct integer offset vectors; the piece of the domain above the
box is the union of the box translated by M·z over the cell's offsets
z.  When the boxes partition [0,1)^d up to measure zero, the resulting
set tiles R^d with multiplicity k under translation by the lattice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicateOffset,
    InconsistentK,
    NotATiling,
    OutOfDomain,
    PointOnGap,
    SpecFormatError,
)
from .lattice import Lattice, reduce_point

BOX_TOL = 1e-12       # geometric comparisons on box faces
COVER_TOL = 1e-10     # total-volume defect allowed for a partition


@dataclass(frozen=True)
class Cell:
    """Half-open box [a,b) in [0,1)^d with its integer offset list.

    Offsets are stored lexicographically sorted; their order defines
    the region numbering r = 1..k of the domain pieces above the box.
    """

    box: np.ndarray      # (d, 2) columns [a_i, b_i]
    offsets: np.ndarray  # (k, d) integer


def make_cell(box, offsets) -> Cell:
    box = np.array(box, dtype=float)
    if box.ndim != 2 or box.shape[1] != 2:
        raise SpecFormatError(f"cell box must have shape (d, 2), got {box.shape}")
    a, b = box[:, 0], box[:, 1]
    if np.any(a < -BOX_TOL) or np.any(b > 1.0 + BOX_TOL):
        raise SpecFormatError("cell box must lie inside the unit cube")
    if np.any(b - a <= BOX_TOL):
        raise SpecFormatError("cell box has an empty or inverted side")
    box = np.clip(box, 0.0, 1.0)

    raw = np.asarray(offsets, dtype=float)
    if raw.ndim != 2 or raw.shape[1] != box.shape[0]:
        raise SpecFormatError(
            f"offsets must have shape (k, {box.shape[0]}), got {raw.shape}"
        )
    if raw.shape[0] == 0:
        raise SpecFormatError("cell needs at least one offset")
    if np.any(np.abs(raw - np.rint(raw)) > 1e-9):
        raise SpecFormatError("offsets must be integer vectors")
    ints = np.rint(raw).astype(int)
    order = np.lexsort(ints.T[::-1])  # lexicographic, first coordinate primary
    ints = ints[order]
    if any(np.array_equal(ints[i], ints[i + 1]) for i in range(len(ints) - 1)):
        raise DuplicateOffset("cell lists a lattice offset twice")
    box.setflags(write=False)
    ints.setflags(write=False)
    return Cell(box=box, offsets=ints)


@dataclass(frozen=True)
class MultiTileDomain:
    lattice: Lattice
    cells: tuple[Cell, ...]
    k: int
    measure: float  # k * |det M|

    @property
    def dimension(self) -> int:
        return self.lattice.dimension


def make_domain(lattice: Lattice, cells) -> MultiTileDomain:
    """Assemble and validate a multi-tiling domain."""
    cells = tuple(cells)
    if not cells:
        raise NotATiling("domain needs at least one cell")
    d = lattice.dimension
    for c in cells:
        if c.box.shape[0] != d:
            raise DimensionMismatch("cell dimension disagrees with the lattice")
    k = validate_cells(cells)
    return MultiTileDomain(
        lattice=lattice, cells=cells, k=k, measure=k * lattice.volume
    )


def validate_cells(cells) -> int:
    """Check the partition and multiplicity invariants; return k.

    The boxes must be pairwise disjoint and fill the unit cube up to a
    volume defect of 1e-10; every cell must carry the same number of
    distinct offsets.  The common count k is the tiling multiplicity:
    for u in a cell's box, the points M(u + z) over the cell's offsets
    z enumerate exactly the lattice translates carrying u's fiber, so
    the covering count of the tiling is k almost everywhere.
    """
    ks = {len(c.offsets) for c in cells}
    if len(ks) != 1:
        raise InconsistentK(f"cells carry different offset counts: {sorted(ks)}")
    (k,) = ks

    total = 0.0
    for c in cells:
        total += float(np.prod(c.box[:, 1] - c.box[:, 0]))
    if abs(total - 1.0) > COVER_TOL:
        raise NotATiling(f"cell boxes cover volume {total:.12f}, expected 1")

    for i in range(len(cells)):
        for j in range(i + 1, len(cells)):
            lo = np.maximum(cells[i].box[:, 0], cells[j].box[:, 0])
            hi = np.minimum(cells[i].box[:, 1], cells[j].box[:, 1])
            if np.all(hi - lo > BOX_TOL):
                raise NotATiling(f"cell boxes {i} and {j} overlap")
    return k


def validate(domain: MultiTileDomain) -> int:
    """Re-run the domain invariants; returns the multiplicity k."""
    k = validate_cells(domain.cells)
    if k != domain.k:
        raise InconsistentK("stored multiplicity disagrees with the cells")
    return k


def cell_index_at(domain: MultiTileDomain, u) -> int:
    """Index of the cell whose half-open box owns u in [0,1)^d."""
    u = np.asarray(u, dtype=float)
    if u.shape != (domain.dimension,):
        raise DimensionMismatch(
            f"point has shape {u.shape}, expected ({domain.dimension},)"
        )
    if np.any(u < 0.0) or np.any(u >= 1.0):
        raise OutOfDomain(f"point {u} lies outside [0,1)^d")
    for i, c in enumerate(domain.cells):
        if np.all(u >= c.box[:, 0]) and np.all(u < c.box[:, 1]):
            return i
    raise PointOnGap(
        f"point {u} falls between cell boxes; perturb it off the face"
    )


def offsets_at(domain: MultiTileDomain, u) -> np.ndarray:
    """The k lattice points M·z_r above u, in canonical region order."""
    c = domain.cells[cell_index_at(domain, u)]
    return (domain.lattice.basis @ c.offsets.T).T


def omega(domain: MultiTileDomain, r: int, u) -> np.ndarray:
    """Map u in [0,1)^d to the point of region r above it, y = M(u + z_r).

    Regions are numbered r = 1..k in the owning cell's offset order.
    """
    c = domain.cells[cell_index_at(domain, u)]
    if not 1 <= r <= domain.k:
        raise OutOfDomain(f"region index {r} outside 1..{domain.k}")
    u = np.asarray(u, dtype=float)
    return domain.lattice.basis @ (u + c.offsets[r - 1])


def omega_inverse(domain: MultiTileDomain, y) -> tuple[int, np.ndarray]:
    """Invert omega: find (r, u) with y = M(u + z_r).

    Raises OutOfDomain when y does not belong to the domain and
    PointOnGap when its reduction lands between cell boxes.
    """
    u, z = reduce_point(domain.lattice, y)
    c = domain.cells[cell_index_at(domain, u)]
    for r, off in enumerate(c.offsets, start=1):
        if np.array_equal(off, z):
            return r, u
    raise OutOfDomain(f"point {np.asarray(y)} is not in the domain")


def sample_grid(domain: MultiTileDomain, n: int) -> list[tuple[int, np.ndarray]]:
    """Midpoint grid with n points per axis inside every cell box.

    Returns (cell index, points) pairs; points have shape (n^d, d) and
    sit strictly inside the boxes, so they never touch a face.
    """
    if n < 1:
        raise SpecFormatError(f"grid resolution must be positive, got {n}")
    out = []
    for i, c in enumerate(domain.cells):
        axes = [
            c.box[ax, 0] + (np.arange(n) + 0.5) * (c.box[ax, 1] - c.box[ax, 0]) / n
            for ax in range(domain.dimension)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        out.append((i, pts))
    return out
