"""Sampled spectral data and its reconstruction.

Data attaches to grid points of the fundamental domain: for a point u
with system matrix V and region values y_r = f(omega_r(u)), the stored
vector is

    F = vol(lattice) * V y,

the pointwise value of the per-shift exponential sums of f.  Data can
be produced exactly from region values (forward_data) or as a radius-
truncated coefficient sum for a finite exponential combination
(coefficient_data); the truncated data converges to the exact data as
the radius grows.  Reconstruction inverts V either densely or through
the nested Vandermonde recursion, which only ever solves 1D systems.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from .domain import MultiTileDomain, cell_index_at
from .errors import (
    DimensionMismatch,
    MultitileError,
    OutOfDomain,
    PointOnGap,
    SingularMatrix,
    SpecFormatError,
)
from .expsystem import ShiftSet, _piece_sum, _require_uniform, cell_system
from .freqtree import FrequencyTree, make_frequency_set
from .vandermonde import block_conditions, nested_solve, solve_vandermonde_1d

__all__ = [
    "SpectralData",
    "ReconstructionResult",
    "flatten_grid",
    "forward_data",
    "coefficient_data",
    "reconstruct_point",
    "reconstruct_direct",
    "reconstruct_grid",
    "solve_vandermonde_1d",
]


@dataclass(frozen=True)
class SpectralData:
    """Per-point data vectors, columns in the owning cell's index order."""

    cell_ids: np.ndarray      # (N,)
    points: np.ndarray        # (N, d) points of [0,1)^d
    values: np.ndarray        # (N, k) complex
    provenance: str           # "exact-pointwise" | "coefficient-truncated"
    radius: Optional[int] = None


def flatten_grid(grid) -> tuple[np.ndarray, np.ndarray]:
    """Concatenate sample_grid output into (cell_ids, points)."""
    ids = np.concatenate([np.full(len(pts), ci, dtype=int) for ci, pts in grid])
    pts = np.concatenate([pts for _, pts in grid], axis=0)
    return ids, pts


def forward_data(
    domain: MultiTileDomain, shifts: ShiftSet, cell_ids, points, region_values
) -> SpectralData:
    """Exact data from region samples: F = vol * V y per point."""
    cell_ids = np.asarray(cell_ids, dtype=int)
    points = np.asarray(points, dtype=float)
    y = np.asarray(region_values, dtype=complex)
    if y.shape != (len(cell_ids), domain.k):
        raise DimensionMismatch(
            f"region values must have shape (N, {domain.k}), got {y.shape}"
        )
    out = np.empty_like(y)
    vol = domain.lattice.volume
    for ci in np.unique(cell_ids):
        rows = np.nonzero(cell_ids == ci)[0]
        V = cell_system(domain, shifts, int(ci)).V
        out[rows] = vol * y[rows] @ V.T
    return SpectralData(
        cell_ids=cell_ids, points=points, values=out, provenance="exact-pointwise"
    )


def coefficient_data(
    domain: MultiTileDomain,
    shifts: ShiftSet,
    coeffs: Mapping,
    cell_ids,
    points,
    radius: int,
) -> SpectralData:
    """Radius-truncated data for f = sum of coeffs[(n', s')] * e_(n',s').

    For every shift position s the stored value at a point u is

        sum_{|n|_inf <= radius} <f, e_(n,s)> e_(n,s)(x),   x = M u,

    with the inner products evaluated in closed form.  As radius grows
    this converges to the exact data of forward_data.
    """
    _require_uniform(shifts, "coefficient data")
    if radius < 0:
        raise SpecFormatError(f"radius must be nonnegative, got {radius}")
    cell_ids = np.asarray(cell_ids, dtype=int)
    points = np.asarray(points, dtype=float)
    d = domain.dimension
    k = domain.k
    js = np.array(shifts.index_sets[0], dtype=float)
    delta = shifts.delta
    eta = shifts.eta_coords.astype(float)

    terms = []
    for (n_src, s_src), c in coeffs.items():
        n_src = np.asarray(n_src, dtype=float)
        if n_src.shape != (d,):
            raise DimensionMismatch(f"coefficient label {n_src} is not a {d}-vector")
        if not 1 <= int(s_src) <= k:
            raise SpecFormatError(f"shift position {s_src} outside 1..{k}")
        terms.append((n_src, int(s_src) - 1, complex(c)))

    values = np.zeros((len(cell_ids), k), dtype=complex)
    span = np.arange(-radius, radius + 1)
    for idx in np.ndindex(*([len(span)] * d)):
        n = np.array([span[i] for i in idx], dtype=float)
        for s in range(k):
            inner = 0.0 + 0.0j
            for n_src, s_src, c in terms:
                theta = (n_src - n) + delta * (js[s_src] - js[s])
                inner += c * _piece_sum(domain, theta)
            if inner == 0.0:
                continue
            phase = np.exp(2j * np.pi * (points @ (n + delta * js[s] + eta)))
            values[:, s] += inner * phase
    return SpectralData(
        cell_ids=cell_ids,
        points=points,
        values=values,
        provenance="coefficient-truncated",
        radius=radius,
    )


def reconstruct_direct(V, F) -> np.ndarray:
    """Dense partial-pivoting solve of V y = F."""
    try:
        return np.linalg.solve(np.asarray(V, dtype=complex), np.asarray(F, dtype=complex))
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(f"dense solve failed: {exc}") from None


def reconstruct_point(tree: FrequencyTree, delta, F) -> np.ndarray:
    """Nested solve of V y = F for one point's data vector.

    F may be a mapping keyed by shift index tuples or a sequence in the
    order of the tree's shift index set.  The result is ordered like
    the tree's frequency vectors.
    """
    from .freqtree import shift_index_set

    vectors = tree.frequencies.vectors
    if isinstance(F, Mapping):
        data = dict(F)
    else:
        order = shift_index_set(tree).indices
        F = np.asarray(F, dtype=complex)
        if F.shape != (len(order),):
            raise DimensionMismatch(
                f"data vector must have length {len(order)}, got {F.shape}"
            )
        data = {j: F[i] for i, j in enumerate(order)}
    solved = nested_solve(vectors, data, tuple(np.asarray(delta, dtype=float)))
    return np.array([solved[v] for v in vectors])


@dataclass(frozen=True)
class ReconstructionResult:
    points: np.ndarray        # (N*k, d) points of the domain
    values: np.ndarray        # (N*k,) reconstructed values there
    source_rows: np.ndarray   # (N*k,) originating data row
    regions: np.ndarray       # (N*k,) 1-based region index
    residuals: np.ndarray     # (N,) nested-vs-dense relative residual, NaN if no oracle
    skipped: tuple[int, ...]  # data rows whose grid point was unusable
    blocks: dict[int, tuple[tuple[int, float], ...]]  # cell -> per-block (level, kappa)


def _worker_count(workers: Optional[int]) -> int:
    if workers is None:
        env = os.environ.get("MULTITILE_THREADS", "").strip()
        if not env:
            return 1
        try:
            workers = int(env)
        except ValueError:
            raise SpecFormatError(f"MULTITILE_THREADS must be an integer, got {env!r}")
    if workers == 0:
        workers = os.cpu_count() or 1
    if workers < 1:
        raise SpecFormatError(f"worker count must be >= 0, got {workers}")
    return workers


def reconstruct_grid(
    domain: MultiTileDomain,
    shifts: ShiftSet,
    data: SpectralData,
    oracle: bool = False,
    workers: Optional[int] = None,
) -> ReconstructionResult:
    """Reconstruct region values at every data point via nested solves.

    With oracle=True every point is additionally solved densely and the
    relative difference is reported per data row.  Worker count comes
    from the MULTITILE_THREADS environment variable when not given
    (0 means one worker per CPU); rows split across a thread pool.
    """
    vol = domain.lattice.volume
    k = domain.k
    n_rows = len(data.cell_ids)
    if data.values.shape != (n_rows, k):
        raise DimensionMismatch(
            f"data values must have shape ({n_rows}, {k}), got {data.values.shape}"
        )

    per_cell = {}
    blocks = {}
    for ci in np.unique(np.asarray(data.cell_ids, dtype=int)):
        ci = int(ci)
        if ci < 0 or ci >= len(domain.cells):
            raise SpecFormatError(f"data references unknown cell {ci}")
        cell = domain.cells[ci]
        fs = make_frequency_set(cell.offsets)
        order = shifts.index_sets[ci]
        V = cell_system(domain, shifts, ci).V if oracle else None
        per_cell[ci] = (fs, order, V, cell.offsets.astype(float))
        blocks[ci] = tuple(block_conditions(fs.vectors, tuple(shifts.delta)))

    skipped = []
    usable = []
    for row in range(n_rows):
        ci = int(data.cell_ids[row])
        u = data.points[row]
        box = domain.cells[ci].box
        if np.all(u >= box[:, 0]) and np.all(u < box[:, 1]):
            usable.append(row)
            continue
        try:
            located = cell_index_at(domain, u)
        except (PointOnGap, OutOfDomain):
            skipped.append(row)
            continue
        if located == ci:
            usable.append(row)
        else:
            skipped.append(row)

    def solve_row(row: int):
        ci = int(data.cell_ids[row])
        fs, order, V, offs = per_cell[ci]
        rhs = data.values[row] / vol
        mapping = {j: rhs[i] for i, j in enumerate(order)}
        solved = nested_solve(fs.vectors, mapping, tuple(shifts.delta))
        y = np.array([solved[v] for v in fs.vectors])
        res = np.nan
        if V is not None:
            direct = reconstruct_direct(V, rhs)
            res = float(
                np.linalg.norm(y - direct) / max(np.linalg.norm(direct), 1e-300)
            )
        return y, res

    count = _worker_count(workers)
    results: dict[int, tuple[np.ndarray, float]] = {}
    if count > 1 and len(usable) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=count) as pool:
            for row, out in zip(usable, pool.map(solve_row, usable)):
                results[row] = out
    else:
        for row in usable:
            results[row] = solve_row(row)

    d = domain.dimension
    points = np.empty((len(usable) * k, d))
    values = np.empty(len(usable) * k, dtype=complex)
    source = np.empty(len(usable) * k, dtype=int)
    regions = np.empty(len(usable) * k, dtype=int)
    residuals = np.full(n_rows, np.nan)
    M = domain.lattice.basis
    for pos, row in enumerate(usable):
        ci = int(data.cell_ids[row])
        _, _, _, offs = per_cell[ci]
        y, res = results[row]
        residuals[row] = res
        u = data.points[row]
        for r in range(k):
            i = pos * k + r
            points[i] = M @ (u + offs[r])
            values[i] = y[r]
            source[i] = row
            regions[i] = r + 1
    return ReconstructionResult(
        points=points,
        values=values,
        source_rows=source,
        regions=regions,
        residuals=residuals,
        skipped=tuple(skipped),
        blocks=blocks,
    )
