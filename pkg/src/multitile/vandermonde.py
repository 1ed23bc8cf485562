"""Vandermonde solvers: specialized 1D elimination and the nested
dimension-by-dimension recursion driven by a frequency set's windows.

The linear system treated here couples data indexed by the shift index
set with unknowns indexed by the frequency vectors through

    data[j] = sum_z exp(-2 pi i <delta * j, z>) * value[z],

which factorizes along coordinates.  The recursion never materializes
that matrix: each level is handled by square 1D Vandermonde solves on
the child values of one prefix, plus explicit evaluation of the
already-solved prefixes' contributions.
"""

from __future__ import annotations

import warnings

import numpy as np

from .errors import DimensionMismatch, DuplicateNodes, IllConditionedWarning, SingularMatrix
from .freqtree import _group, _k_index

NODE_TOL = 1e-12
COND_LIMIT = 1e8


def _vander_matrix(nodes: np.ndarray) -> np.ndarray:
    # rows are powers 0..k-1, columns are nodes
    return np.vander(nodes, increasing=True).T


def solve_vandermonde_1d(nodes, rhs) -> np.ndarray:
    """Solve sum_t nodes[t]^s c[t] = rhs[s] for s = 0..k-1.

    Uses the progressive product-form elimination (divided-difference
    style, O(k^2), no matrix formed for the solve itself).  When the
    system's condition number exceeds 1e8 an IllConditionedWarning is
    emitted and a dense partial-pivoting solve is used instead.
    """
    x = np.asarray(nodes, dtype=complex)
    b = np.asarray(rhs, dtype=complex)
    if x.ndim != 1 or x.shape != b.shape:
        raise DimensionMismatch(
            f"nodes and rhs must be equal-length vectors, got {x.shape} and {b.shape}"
        )
    k = x.size
    for i in range(k):
        for j in range(i + 1, k):
            if abs(x[i] - x[j]) < NODE_TOL:
                raise DuplicateNodes(f"nodes {i} and {j} coincide: {x[i]}")
    if k == 1:
        return b.astype(complex)

    sig = np.linalg.svd(_vander_matrix(x), compute_uv=False)
    if sig[-1] == 0.0 or sig[0] / sig[-1] > COND_LIMIT:
        kappa = np.inf if sig[-1] == 0.0 else sig[0] / sig[-1]
        warnings.warn(
            f"Vandermonde condition number {kappa:.3e} exceeds {COND_LIMIT:.0e}; "
            "falling back to a dense solve",
            IllConditionedWarning,
            stacklevel=2,
        )
        try:
            return np.linalg.solve(_vander_matrix(x), b)
        except np.linalg.LinAlgError as exc:
            raise SingularMatrix(f"dense Vandermonde fallback failed: {exc}") from None

    d = b.copy()
    n = k - 1
    for kk in range(n):
        for i in range(n, kk, -1):
            d[i] -= x[kk] * d[i - 1]
    for kk in range(n - 1, -1, -1):
        for i in range(kk + 1, n + 1):
            d[i] /= x[i] - x[i - kk - 1]
        for i in range(kk, n):
            d[i] -= d[i + 1]
    return d


def _nodes(values, dl: float) -> np.ndarray:
    return np.exp(-2j * np.pi * dl * np.asarray(values, dtype=float))


def nested_solve(vectors, data, delta) -> dict[tuple, complex]:
    """Solve the factorized system for one frequency set.

    vectors: ordered distinct coordinate tuples (length d)
    data:    mapping from shift index tuples (the set produced by the
             window recursion on `vectors`) to complex values
    delta:   per-coordinate spacing

    Returns a mapping from frequency vector to its solved value.  The
    recursion follows the window structure: parents are processed in
    ascending child-count order; for each parent the recursion solves
    the suffix system for every index in the parent's window, after
    subtracting the explicitly evaluated contribution of the already
    finished parents; the parent's own values then come from one square
    1D Vandermonde solve over its accumulated window indices.
    """
    delta = tuple(delta)
    level = len(delta)
    if len(vectors[0]) != level:
        raise DimensionMismatch(
            f"vectors have {len(vectors[0])} coordinates, delta has {level}"
        )
    if level == 1:
        nodes = _nodes([v[0] for v in vectors], delta[0])
        rhs = [data[(j,)] for j in range(len(vectors))]
        coeff = solve_vandermonde_1d(nodes, rhs)
        return {v: coeff[t] for t, v in enumerate(vectors)}

    parents, children, counts, windows = _group(vectors)
    dl = delta[-1]
    solved: dict[tuple, complex] = {}
    # per parent position: accumulated suffix values by last-level index
    gather: list[dict[int, complex]] = [dict() for _ in parents]
    for p, parent in enumerate(parents):
        lo, hi = windows[p]
        if lo < hi:
            suffix = parents[p:]
            sub_keys = _k_index(suffix)
            for j_last in range(lo, hi):
                sub_data = {}
                for jj in sub_keys:
                    val = data[jj + (j_last,)]
                    for qq in range(p):
                        evaluated = sum(
                            np.exp(-2j * np.pi * dl * j_last * z)
                            * solved[parents[qq] + (z,)]
                            for z in children[qq]
                        )
                        phase = np.exp(
                            -2j
                            * np.pi
                            * sum(dt * jt * mt for dt, jt, mt in zip(delta, jj, parents[qq]))
                        )
                        val -= phase * evaluated
                    sub_data[jj] = val
                sub_solution = nested_solve(suffix, sub_data, delta[:-1])
                for qq in range(p, len(parents)):
                    gather[qq][j_last] = sub_solution[parents[qq]]
        # the parent's window union so far is exactly 0..counts[p]-1
        nodes = _nodes(children[p], dl)
        rhs = [gather[p][j] for j in range(counts[p])]
        coeff = solve_vandermonde_1d(nodes, rhs)
        for z, c in zip(children[p], coeff):
            solved[parent + (z,)] = c
    return solved


def nested_blocks(vectors, delta) -> list[tuple[int, np.ndarray]]:
    """Enumerate every square 1D block the nested recursion solves.

    Returns (level, nodes) pairs, where level is the coordinate the
    block acts on (1-based) and nodes are its Vandermonde nodes.  The
    enumeration mirrors nested_solve exactly, including the blocks of
    re-grouped suffix systems, but is purely structural (no data).
    """
    delta = tuple(delta)
    level = len(delta)
    if level == 1:
        return [(1, _nodes([v[0] for v in vectors], delta[0]))]
    parents, children, _, windows = _group(vectors)
    out: list[tuple[int, np.ndarray]] = []
    for p in range(len(parents)):
        lo, hi = windows[p]
        if lo < hi:
            out.extend(nested_blocks(parents[p:], delta[:-1]))
        out.append((level, _nodes(children[p], delta[-1])))
    return out


def block_conditions(vectors, delta) -> list[tuple[int, float]]:
    """(level, condition number) for every block the recursion solves."""
    out = []
    for lv, nodes in nested_blocks(vectors, delta):
        sig = np.linalg.svd(_vander_matrix(nodes), compute_uv=False)
        out.append((lv, float(sig[0] / sig[-1])))
    return out


def block_norms(vectors, delta) -> list[tuple[float, float]]:
    """Per level: (smallest sigma_min, largest sigma_max) over all of
    the recursion's blocks acting on that coordinate."""
    level = len(tuple(delta))
    lo = [np.inf] * level
    hi = [0.0] * level
    for lv, nodes in nested_blocks(vectors, delta):
        sig = np.linalg.svd(_vander_matrix(nodes), compute_uv=False)
        lo[lv - 1] = min(lo[lv - 1], float(sig[-1]))
        hi[lv - 1] = max(hi[lv - 1], float(sig[0]))
    return list(zip(lo, hi))
