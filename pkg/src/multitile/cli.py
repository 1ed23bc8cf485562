"""Command line front end.

Exit codes: 0 success, 1 malformed or unreadable input, 2 mathematical
failure (no admissible shift, residue collision, singular system), 3
unexpected internal error.
"""

from __future__ import annotations

import functools
import json
import sys

import click
import numpy as np

from .admissibility import (
    AdmissibilityFailure,
    check as check_admissible,
    find_pair,
)
from .domain import MultiTileDomain, omega, sample_grid
from .errors import (
    DimensionMismatch,
    DuplicateNodes,
    DuplicateOffset,
    InconsistentK,
    NoPairFound,
    NonUniformShifts,
    NotATiling,
    OutOfDomain,
    PointOnGap,
    SingularBasis,
    SingularCell,
    SingularMatrix,
    SpecFormatError,
)
from .expsystem import (
    ShiftSet,
    cell_system,
    dual_eval,
    frequency_vector,
    is_orthogonal,
    make_shifts,
    riesz_bounds,
    verify_biorthogonality,
)
from .formats import (
    atomic_write_text,
    canonical_json,
    load_domain,
    read_samples,
    write_result,
    write_samples,
)
from .reconstruction import (
    ReconstructionResult,
    SpectralData,
    coefficient_data,
    flatten_grid,
    forward_data,
    reconstruct_grid,
)

INPUT_ERRORS = (
    SpecFormatError,
    SingularBasis,
    DimensionMismatch,
    NotATiling,
    InconsistentK,
    DuplicateOffset,
    OutOfDomain,
    OSError,
)
MATH_ERRORS = (
    NoPairFound,
    NonUniformShifts,
    SingularCell,
    SingularMatrix,
    DuplicateNodes,
    PointOnGap,
)


def _guard(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except INPUT_ERRORS as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
        except MATH_ERRORS as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except (SystemExit, KeyboardInterrupt, click.exceptions.Abort):
            raise
        except click.ClickException:
            raise
        except Exception as exc:  # anything else is a bug, not bad input
            click.echo(f"internal error: {exc!r}", err=True)
            sys.exit(3)

    return wrapper


def _parse_int_vector(text: str, d: int, name: str) -> np.ndarray:
    try:
        vec = np.array([int(part) for part in text.split(",")], dtype=int)
    except ValueError:
        raise SpecFormatError(f"{name} must be comma-separated integers, got {text!r}")
    if vec.shape != (d,):
        raise SpecFormatError(f"{name} must have {d} components, got {len(vec)}")
    return vec


def domain_option(fn):
    return click.option(
        "--domain",
        "domain_path",
        required=True,
        type=click.Path(),
        help="Domain JSON file.",
    )(fn)


def shift_options(fn):
    for args, kwargs in (
        (("--eta", "eta_text"), {"default": None, "help": "Dual-lattice coordinates of the common translation, comma-separated integers."}),
        (("--q", "q_text"), {"default": None, "help": "Per-axis moduli, comma-separated positive integers."}),
        (("--v", "v_text"), {"default": None, "help": "Per-axis direction integers, comma-separated."}),
    ):
        fn = click.option(*args, **kwargs)(fn)
    return fn


def _resolve_certificate(domain: MultiTileDomain, v_text, q_text):
    """Certificate from flags, or by search when both are omitted.

    --q without --v means v = all ones; --v alone is an error since
    there is no canonical modulus to pair it with.
    """
    d = domain.dimension
    if v_text is not None and q_text is None:
        raise SpecFormatError("--v needs --q")
    if q_text is None:
        cert = find_pair(domain)
        return cert, "searched"
    if v_text is None:
        v_text = ",".join(["1"] * d)
    v = _parse_int_vector(v_text, d, "--v")
    q = _parse_int_vector(q_text, d, "--q")
    result = check_admissible(domain, v, q)
    if isinstance(result, AdmissibilityFailure):
        click.echo(result.message, err=True)
        sys.exit(2)
    return result, "given"


def _resolve_shifts(domain, v_text, q_text, eta_text, meta=None):
    """ShiftSet from flags, falling back to a sample sidecar."""
    d = domain.dimension
    eta = None
    if eta_text is not None:
        eta = _parse_int_vector(eta_text, d, "--eta")
    elif meta is not None and meta.get("eta") is not None:
        eta = np.asarray(meta["eta"], dtype=float)

    if v_text is None and q_text is None and meta is not None:
        has_vq = meta.get("v") is not None and meta.get("q") is not None
        if has_vq:
            v_text = ",".join(str(int(x)) for x in meta["v"])
            q_text = ",".join(str(int(x)) for x in meta["q"])
        elif meta.get("delta") is not None:
            delta = np.asarray(meta["delta"], dtype=float)
            if delta.shape != (d,):
                raise SpecFormatError(
                    f"sidecar delta must have {d} components, got {delta.shape}"
                )
            return make_shifts(domain, delta, eta), None
    cert, _ = _resolve_certificate(domain, v_text, q_text)
    return make_shifts(domain, cert, eta), cert


def _check_sidecar_indices(shifts: ShiftSet, meta) -> None:
    if meta is None or meta.get("index_sets") is None:
        return
    stored = [
        tuple(tuple(int(x) for x in j) for j in idx) for idx in meta["index_sets"]
    ]
    built = [tuple(idx) for idx in shifts.index_sets]
    if stored != built:
        raise SpecFormatError(
            "sample sidecar index sets do not match the domain; "
            "the samples were built against a different domain file"
        )


def _vec_str(vec) -> str:
    return "(" + ", ".join(_num_str(x) for x in np.asarray(vec).ravel()) + ")"


def _num_str(x) -> str:
    if float(x) == int(x):
        return str(int(x))
    return repr(float(x))


@click.group()
def main():
    """Exponential bases on multi-tiling domains: admissibility checks,
    dual generators, Riesz bounds, synthetic data and reconstruction."""


@main.command("check")
@domain_option
@shift_options
@click.option("--out", "out_path", default=None, type=click.Path(), help="Write the certificate as JSON.")
@_guard
def cmd_check(domain_path, v_text, q_text, eta_text, out_path):
    """Check or search for an admissible direction/modulus pair."""
    domain = load_domain(domain_path)
    cert, how = _resolve_certificate(domain, v_text, q_text)
    click.echo(f"admissible ({how}): kind={cert.kind}")
    click.echo(f"v = {_vec_str(cert.v)}")
    click.echo(f"q = {_vec_str(cert.q)}")
    click.echo(f"delta = {_vec_str(cert.delta)}")
    if out_path:
        obj = {
            "kind": cert.kind,
            "v": list(cert.v),
            "q": list(cert.q),
            "delta": list(cert.delta),
            "witnesses": [
                {
                    "cell": w.cell,
                    "level": w.level,
                    "parent": list(w.parent),
                    "children": list(w.children),
                    "residues": list(w.residues),
                }
                for w in cert.witnesses
            ],
        }
        atomic_write_text(out_path, canonical_json(obj) + "\n")


@main.command("shifts")
@domain_option
@shift_options
@click.option("--out", "out_path", default=None, type=click.Path(), help="Write the shift set as JSON.")
@_guard
def cmd_shifts(domain_path, v_text, q_text, eta_text, out_path):
    """Print the shift index sets and realized shift vectors."""
    domain = load_domain(domain_path)
    shifts, _ = _resolve_shifts(domain, v_text, q_text, eta_text)
    click.echo(f"delta = {_vec_str(shifts.delta)}")
    click.echo(f"eta = {_vec_str(shifts.eta_coords)}")
    click.echo(f"uniform = {shifts.uniform}")
    for ci, (idx, vecs) in enumerate(zip(shifts.index_sets, shifts.shifts)):
        click.echo(f"cell {ci}:")
        for s in range(domain.k):
            click.echo(f"  s={s + 1}  j={_vec_str(idx[s])}  a={_vec_str(vecs[s])}")
    if out_path:
        obj = {
            "delta": shifts.delta.tolist(),
            "eta": shifts.eta_coords.tolist(),
            "uniform": bool(shifts.uniform),
            "cells": [
                {"indices": [list(j) for j in idx], "shifts": vecs.tolist()}
                for idx, vecs in zip(shifts.index_sets, shifts.shifts)
            ],
        }
        atomic_write_text(out_path, canonical_json(obj) + "\n")


@main.command("dual")
@domain_option
@shift_options
@click.option("--n", "n_text", default=None, help="Integer label coordinates, comma-separated (default zeros).")
@click.option("--s", "s_pos", default=1, type=int, help="Shift position, 1-based.")
@click.option("--grid", "grid_n", default=16, type=int, help="Midpoint grid resolution per axis.")
@click.option("--out", "out_path", default=None, type=click.Path(), help="Write sampled values as CSV.")
@_guard
def cmd_dual(domain_path, v_text, q_text, eta_text, n_text, s_pos, grid_n, out_path):
    """Evaluate one dual generator on a grid over the domain."""
    domain = load_domain(domain_path)
    shifts, _ = _resolve_shifts(domain, v_text, q_text, eta_text)
    d = domain.dimension
    n = np.zeros(d, dtype=int) if n_text is None else _parse_int_vector(n_text, d, "--n")
    if not 1 <= s_pos <= domain.k:
        raise SpecFormatError(f"--s must lie in 1..{domain.k}, got {s_pos}")
    if grid_n < 1:
        raise SpecFormatError(f"--grid must be positive, got {grid_n}")
    label = frequency_vector(domain, shifts, n, s_pos)
    click.echo(f"label = {_vec_str(label)}")

    pts = []
    vals = []
    regions = []
    rows = []
    row = 0
    for ci, us in sample_grid(domain, grid_n):
        for u in us:
            for r in range(1, domain.k + 1):
                y = omega(domain, r, u)
                pts.append(y)
                vals.append(dual_eval(domain, shifts, n, s_pos, y))
                regions.append(r)
                rows.append(row)
            row += 1
    click.echo(f"evaluated {len(pts)} points")
    if out_path:
        result = ReconstructionResult(
            points=np.asarray(pts),
            values=np.asarray(vals, dtype=complex),
            source_rows=np.asarray(rows, dtype=int),
            regions=np.asarray(regions, dtype=int),
            residuals=np.full(row, np.nan),
            skipped=(),
            blocks={},
        )
        write_result(out_path, result, d)


@main.command("verify")
@domain_option
@shift_options
@click.option("--radius", default=4, type=int, help="Dual-lattice truncation radius for the residual scan.")
@click.option("--out", "out_path", default=None, type=click.Path(), help="Write the report as JSON.")
@_guard
def cmd_verify(domain_path, v_text, q_text, eta_text, radius, out_path):
    """Report the worst pairing residual between the basis and its dual."""
    domain = load_domain(domain_path)
    shifts, _ = _resolve_shifts(domain, v_text, q_text, eta_text)
    if radius < 0:
        raise SpecFormatError(f"--radius must be nonnegative, got {radius}")
    residual = verify_biorthogonality(domain, shifts, radius=radius)
    ortho, dev = is_orthogonal(domain, shifts)
    click.echo(f"max biorthogonality residual = {residual:.6e} (radius {radius})")
    click.echo(f"orthogonal = {ortho} (deviation {dev:.6e})")
    if out_path:
        obj = {
            "residual": float(residual),
            "radius": radius,
            "orthogonal": bool(ortho),
            "orthogonality_deviation": float(dev),
        }
        atomic_write_text(out_path, canonical_json(obj) + "\n")


@main.command("bounds")
@domain_option
@shift_options
@click.option("--out", "out_path", default=None, type=click.Path(), help="Write bounds as JSON.")
@_guard
def cmd_bounds(domain_path, v_text, q_text, eta_text, out_path):
    """Print Riesz bounds for the shifted exponential system."""
    domain = load_domain(domain_path)
    shifts, _ = _resolve_shifts(domain, v_text, q_text, eta_text)
    bounds = riesz_bounds(domain, shifts)
    click.echo(f"alpha = {bounds.alpha!r}  beta = {bounds.beta!r}")
    click.echo(f"A = {bounds.frame_lower!r}  B = {bounds.frame_upper!r}")
    for cb in bounds.cells:
        click.echo(
            f"cell {cb.cell}: sigma_min={cb.sigma_min!r} sigma_max={cb.sigma_max!r} "
            f"kappa={cb.kappa!r} factored=[{cb.factored_lower!r}, {cb.factored_upper!r}]"
        )
    if out_path:
        obj = {
            "alpha": bounds.alpha,
            "beta": bounds.beta,
            "frame_lower": bounds.frame_lower,
            "frame_upper": bounds.frame_upper,
            "cells": [
                {
                    "cell": cb.cell,
                    "sigma_min": cb.sigma_min,
                    "sigma_max": cb.sigma_max,
                    "kappa": cb.kappa,
                    "factored_lower": cb.factored_lower,
                    "factored_upper": cb.factored_upper,
                }
                for cb in bounds.cells
            ],
        }
        atomic_write_text(out_path, canonical_json(obj) + "\n")


def _load_coeffs(path: str, d: int, k: int) -> dict:
    try:
        with open(path) as handle:
            raw = json.load(handle)
    except json.JSONDecodeError as exc:
        raise SpecFormatError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(raw, list) or not raw:
        raise SpecFormatError(f"{path}: expected a nonempty list of coefficient terms")
    coeffs = {}
    for i, term in enumerate(raw):
        if not isinstance(term, dict) or set(term) - {"n", "s", "re", "im"}:
            raise SpecFormatError(
                f"{path}: term {i} must be an object with keys n, s, re, im"
            )
        try:
            n = tuple(int(x) for x in term["n"])
            s = int(term["s"])
            c = complex(float(term.get("re", 0.0)), float(term.get("im", 0.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecFormatError(f"{path}: term {i}: {exc}") from None
        if len(n) != d:
            raise SpecFormatError(f"{path}: term {i}: n must have {d} components")
        if not 1 <= s <= k:
            raise SpecFormatError(f"{path}: term {i}: s must lie in 1..{k}")
        coeffs[(n, s)] = coeffs.get((n, s), 0.0) + c
    return coeffs


@main.command("synthesize")
@domain_option
@shift_options
@click.option("--grid", "grid_n", default=8, type=int, help="Midpoint grid resolution per axis.")
@click.option("--seed", default=0, type=int, help="Seed for random region values.")
@click.option("--mode", type=click.Choice(["pointwise", "coeff"]), default="pointwise",
              help="pointwise: exact data from region samples; coeff: radius-truncated coefficient data.")
@click.option("--radius", default=4, type=int, help="Truncation radius for coeff mode.")
@click.option("--function", "function_spec", default="random",
              help="'random' or a JSON file of exponential coefficients.")
@click.option("--out", "out_path", required=True, type=click.Path(), help="Output CSV path.")
@_guard
def cmd_synthesize(domain_path, v_text, q_text, eta_text, grid_n, seed, mode,
                   radius, function_spec, out_path):
    """Generate sample data for a known function on a midpoint grid."""
    domain = load_domain(domain_path)
    shifts, cert = _resolve_shifts(domain, v_text, q_text, eta_text)
    if grid_n < 1:
        raise SpecFormatError(f"--grid must be positive, got {grid_n}")
    ids, pts = flatten_grid(sample_grid(domain, grid_n))
    k = domain.k

    coeffs = None
    if function_spec != "random":
        coeffs = _load_coeffs(function_spec, domain.dimension, k)
    if mode == "coeff":
        if coeffs is None:
            raise SpecFormatError("coeff mode needs --function <coeffs.json>")
        data = coefficient_data(domain, shifts, coeffs, ids, pts, radius)
    else:
        if coeffs is None:
            rng = np.random.default_rng(seed)
            values = rng.normal(size=(len(ids), k)) + 1j * rng.normal(size=(len(ids), k))
        else:
            values = np.zeros((len(ids), k), dtype=complex)
            for r in range(1, k + 1):
                ys = np.array([omega(domain, r, pts[i]) for i in range(len(ids))])
                for (n, s), c in coeffs.items():
                    label = frequency_vector(domain, shifts, np.array(n), s)
                    values[:, r - 1] += c * np.exp(2j * np.pi * (ys @ label))
        data = forward_data(domain, shifts, ids, pts, values)

    extra = {"grid": grid_n, "mode": mode, "seed": seed,
             "function": "random" if coeffs is None else "coeffs"}
    if cert is not None:
        extra["v"] = list(cert.v)
        extra["q"] = list(cert.q)
        extra["kind"] = cert.kind
    if coeffs is not None:
        extra["coeffs"] = [
            {"n": list(n), "s": s, "re": c.real, "im": c.imag}
            for (n, s), c in sorted(coeffs.items())
        ]
    write_samples(out_path, domain, shifts, data, extra)
    click.echo(f"wrote {len(ids)} sample rows to {out_path}")


@main.command("reconstruct")
@domain_option
@shift_options
@click.option("--samples", "samples_path", required=True, type=click.Path(), help="Sample CSV produced by synthesize.")
@click.option("--oracle", is_flag=True, help="Cross-check every solve against a dense solver.")
@click.option("--out", "out_path", default=None, type=click.Path(), help="Output CSV of reconstructed values.")
@_guard
def cmd_reconstruct(domain_path, v_text, q_text, eta_text, samples_path, oracle, out_path):
    """Reconstruct region values from sample data."""
    domain = load_domain(domain_path)
    data, meta = read_samples(samples_path, domain)
    shifts, _ = _resolve_shifts(domain, v_text, q_text, eta_text, meta=meta)
    _check_sidecar_indices(shifts, meta)
    result = reconstruct_grid(domain, shifts, data, oracle=oracle)
    click.echo(
        f"reconstructed {len(result.values)} values from "
        f"{len(data.cell_ids) - len(result.skipped)} rows "
        f"({len(result.skipped)} skipped)"
    )
    if oracle:
        finite = result.residuals[np.isfinite(result.residuals)]
        worst = float(finite.max()) if len(finite) else float("nan")
        click.echo(f"max oracle residual = {worst:.6e}")
    if out_path:
        write_result(out_path, result, domain.dimension)


if __name__ == "__main__":
    main()
