"""Shift-parameter admissibility for multi-tiling domains.

A pair of positive integer vectors (v, q) is admissible when, for every
cell's frequency tree, every level l, and every prefix, the residues
v_l·z mod q_l of the prefix's child values z are pairwise distinct.
Weak admissibility needs distinctness only; strong admissibility needs
the residues to be integers as well; a strong pair whose q equals the
common child-count vector q* is perfect and yields an orthogonal basis.
Distinctness is judged circularly (distance on a circle of
circumference q_l) with tolerance 1e-9.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .domain import MultiTileDomain
from .errors import DimensionMismatch, NoPairFound, SpecFormatError
from .freqtree import build_tree, make_frequency_set

RESIDUE_TOL = 1e-9


@dataclass(frozen=True)
class LevelWitness:
    """Residues of one prefix's children at one level of one cell."""

    cell: int
    level: int
    parent: tuple[float, ...]
    children: tuple[float, ...]
    residues: tuple[float, ...]


@dataclass(frozen=True)
class AdmissibilityCertificate:
    v: tuple[int, ...]
    q: tuple[int, ...]
    kind: str                 # "weak" | "strong" | "perfect"
    delta: tuple[float, ...]  # v_l / q_l per level
    witnesses: tuple[LevelWitness, ...]


@dataclass(frozen=True)
class AdmissibilityFailure:
    v: tuple[int, ...]
    q: tuple[int, ...]
    cell: int
    level: int
    parent: tuple[float, ...]
    pair: tuple[float, float]      # colliding child values
    residues: tuple[float, float]
    message: str


CheckResult = Union[AdmissibilityCertificate, AdmissibilityFailure]


def _check_vq(domain: MultiTileDomain, vq, name: str) -> tuple[int, ...]:
    arr = np.asarray(vq)
    if arr.shape != (domain.dimension,):
        raise DimensionMismatch(
            f"{name} must have one entry per dimension, got shape {arr.shape}"
        )
    if np.any(np.abs(arr - np.rint(arr)) > 1e-9) or np.any(np.rint(arr) < 1):
        raise SpecFormatError(f"{name} must be positive integers, got {list(arr)}")
    return tuple(int(x) for x in np.rint(arr))


def _residue(value: float, q: int) -> float:
    r = math.fmod(value, q)
    if r < 0.0:
        r += q
    return r


def _circular_distinct(residues, q: int) -> Optional[tuple[int, int]]:
    """Index pair of the first circular collision, or None."""
    for i in range(len(residues)):
        for j in range(i + 1, len(residues)):
            d0 = abs(residues[i] - residues[j])
            if min(d0, q - d0) <= RESIDUE_TOL:
                return i, j
    return None


def cell_trees(domain: MultiTileDomain):
    """Frequency tree of each cell's offset list, in cell order."""
    return [build_tree(make_frequency_set(c.offsets)) for c in domain.cells]


def common_child_counts(domain: MultiTileDomain) -> Optional[tuple[int, ...]]:
    """The vector q* of per-level child counts, when they are uniform.

    Returns None as soon as two prefixes (in any cell) disagree on
    their number of children at some level.
    """
    counts: list[Optional[int]] = [None] * domain.dimension
    for tree in cell_trees(domain):
        for lv in tree.levels:
            for ch in lv.children:
                c = counts[lv.level - 1]
                if c is None:
                    counts[lv.level - 1] = len(ch)
                elif c != len(ch):
                    return None
    return tuple(int(c) for c in counts)  # type: ignore[arg-type]


def check(domain: MultiTileDomain, v, q) -> CheckResult:
    """Classify (v, q) for the domain.

    Returns a certificate carrying the strongest class that holds, or a
    failure report naming the first colliding pair.  Collisions are a
    verdict about the inputs, not an exceptional state, so they are
    reported rather than raised.
    """
    v = _check_vq(domain, v, "v")
    q = _check_vq(domain, q, "q")

    witnesses: list[LevelWitness] = []
    integral = True
    for ci, tree in enumerate(cell_trees(domain)):
        for lv in tree.levels:
            ql = q[lv.level - 1]
            vl = v[lv.level - 1]
            for parent, children in zip(lv.parents, lv.children):
                scaled = [vl * z for z in children]
                residues = [_residue(s, ql) for s in scaled]
                hit = _circular_distinct(residues, ql)
                if hit is not None:
                    i, j = hit
                    return AdmissibilityFailure(
                        v=v,
                        q=q,
                        cell=ci,
                        level=lv.level,
                        parent=parent,
                        pair=(children[i], children[j]),
                        residues=(residues[i], residues[j]),
                        message=(
                            f"collision in cell {ci}, level {lv.level}, "
                            f"prefix {parent}: children z={children[i]:g} and "
                            f"z={children[j]:g} give {residues[i]:g} = "
                            f"{residues[j]:g} (mod {ql})"
                        ),
                    )
                if any(abs(s - round(s)) > RESIDUE_TOL for s in scaled):
                    integral = False
                witnesses.append(
                    LevelWitness(
                        cell=ci,
                        level=lv.level,
                        parent=parent,
                        children=children,
                        residues=tuple(residues),
                    )
                )

    kind = "strong" if integral else "weak"
    if kind == "strong":
        if domain.k == 1:
            kind = "perfect"
        else:
            qstar = common_child_counts(domain)
            if qstar is not None and q == qstar:
                kind = "perfect"
    delta = tuple(vl / ql for vl, ql in zip(v, q))
    return AdmissibilityCertificate(
        v=v, q=q, kind=kind, delta=delta, witnesses=tuple(witnesses)
    )


def _level_children(domain: MultiTileDomain) -> list[list[tuple[float, ...]]]:
    """All child-value sets at each level, across cells and prefixes."""
    per_level: list[list[tuple[float, ...]]] = [[] for _ in range(domain.dimension)]
    for tree in cell_trees(domain):
        for lv in tree.levels:
            per_level[lv.level - 1].extend(lv.children)
    return per_level


def _level_ok(children_sets, vl: int, ql: int) -> tuple[bool, bool]:
    """(distinct everywhere, residues all integral) for one level."""
    integral = True
    for children in children_sets:
        scaled = [vl * z for z in children]
        residues = [_residue(s, ql) for s in scaled]
        if _circular_distinct(residues, ql) is not None:
            return False, False
        if any(abs(s - round(s)) > RESIDUE_TOL for s in scaled):
            integral = False
    return True, integral


def find_pair(
    domain: MultiTileDomain, v_max: int = 8, q_max: Optional[int] = None
) -> AdmissibilityCertificate:
    """Search for the best admissible (v, q) within the given bounds.

    Levels decouple, so each coordinate is searched independently with
    a deterministic ascending scan (q outer, v inner).  Preference
    order: perfect over strong over weak, then smallest q.  Raises
    NoPairFound when some level admits no pair within the bounds.
    """
    if q_max is None:
        q_max = max(2 * domain.k, 8)
    per_level = _level_children(domain)

    qstar = common_child_counts(domain)
    if qstar is not None and all(ql <= q_max for ql in qstar):
        v: list[int] = []
        for level, children_sets in enumerate(per_level):
            found = None
            for vl in range(1, v_max + 1):
                ok, integral = _level_ok(children_sets, vl, qstar[level])
                if ok and integral:
                    found = vl
                    break
            if found is None:
                break
            v.append(found)
        else:
            result = check(domain, v, qstar)
            if isinstance(result, AdmissibilityCertificate):
                return result

    v_out: list[int] = []
    q_out: list[int] = []
    for level, children_sets in enumerate(per_level):
        strong_hit = None
        weak_hit = None
        for ql in range(1, q_max + 1):
            for vl in range(1, v_max + 1):
                ok, integral = _level_ok(children_sets, vl, ql)
                if not ok:
                    continue
                if integral:
                    strong_hit = (vl, ql)
                    break
                if weak_hit is None:
                    weak_hit = (vl, ql)
            if strong_hit is not None:
                break
        hit = strong_hit or weak_hit
        if hit is None:
            raise NoPairFound(
                f"no admissible pair at level {level + 1} with "
                f"v <= {v_max}, q <= {q_max}"
            )
        v_out.append(hit[0])
        q_out.append(hit[1])

    result = check(domain, v_out, q_out)
    if not isinstance(result, AdmissibilityCertificate):
        raise NoPairFound(f"search result failed verification: {result.message}")
    return result


def perfect_shift_1d(offsets) -> Optional[float]:
    """One-dimensional perfectly conditioned shift spacing.

    For k distinct integers z with greatest common divisor Q, returns
    tau = 1/Q when the values z/Q form a complete residue system modulo
    k, and None otherwise.  In the positive case the spacing
    delta = tau/k places the Vandermonde nodes on all k-th roots of
    unity, so the cell matrix satisfies kappa(V) = 1 exactly.
    """
    arr = np.asarray(offsets)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1 or arr.size == 0:
        raise SpecFormatError(f"offsets must be a 1D list, got shape {arr.shape}")
    if np.any(np.abs(arr - np.rint(arr)) > 1e-9):
        raise SpecFormatError("offsets must be integers")
    zs = [int(x) for x in np.rint(arr)]
    if len(set(zs)) != len(zs):
        raise SpecFormatError("offsets must be distinct")
    k = len(zs)
    if k == 1:
        return 1.0
    g = 0
    for z in zs:
        g = math.gcd(g, abs(z))
    residues = {(z // g) % k for z in zs}
    if residues == set(range(k)):
        return 1.0 / g
    return None
