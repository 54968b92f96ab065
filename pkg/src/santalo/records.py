"""Structured-record serialization shared by every module and the CLI.

Records are plain dicts with a "kind" key, written as JSON lines (one
record per line, keys sorted) or flattened into comma-separated tables
with a commented header.  Floats pass through Python's repr so every
record round-trips losslessly; body hashes are derived from the canonical
JSON so a record pins the exact geometry it was computed from.
"""

import hashlib
import json
import math

import numpy as np

from .bodies import (Ball, ConvexBody, Ellipsoid, HPolytope, LinearImage,
                     LpBall, VPolytope)


def _num(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _rows(a):
    return [[float(v) for v in row] for row in np.asarray(a, float)]


def body_record(body):
    """Canonical dict description of a body."""
    if isinstance(body, Ball):
        return {"kind": "body", "type": "ball", "dimension": body.dim,
                "radius": body.radius}
    if isinstance(body, Ellipsoid):
        return {"kind": "body", "type": "ellipsoid", "dimension": body.dim,
                "matrix": _rows(body.shape)}
    if isinstance(body, HPolytope):
        return {"kind": "body", "type": "hpolytope", "dimension": body.dim,
                "normals": _rows(body.normals)}
    if isinstance(body, VPolytope):
        return {"kind": "body", "type": "vpolytope", "dimension": body.dim,
                "vertices": _rows(body.vertices)}
    if isinstance(body, LpBall):
        return {"kind": "body", "type": "lp_ball", "dimension": body.dim,
                "p": _num(body.p), "radius": body.radius}
    if isinstance(body, LinearImage):
        return {"kind": "body", "type": "linear_image", "dimension": body.dim,
                "matrix": _rows(body.matrix), "base": body_record(body.base)}
    raise TypeError(f"unknown body type {type(body).__name__}")


def body_hash(body):
    """Short stable digest of the canonical body record."""
    canon = json.dumps(body_record(body), sort_keys=True)
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def to_record(obj, body=None):
    """Convert a result object into a serializable record dict."""
    from .fourier import BandlimitedFunction
    from .measure import VolumeEstimate, VolumeProductReport
    from .radon import RadonProfile
    from .variational import ExtremalEstimate, PoissonBound
    from .verify import BSReport, EqualityDiagnostics, MahlerReport

    if isinstance(obj, ConvexBody):
        return body_record(obj)
    if isinstance(obj, VolumeEstimate):
        rec = {"kind": "volume_estimate", "value": obj.value,
               "method": obj.method, "std_error": obj.std_error,
               "seed": obj.seed, "sample_count": obj.sample_count}
    elif isinstance(obj, VolumeProductReport):
        rec = {"kind": "volume_product",
               "vol_body": to_record(obj.vol_body),
               "vol_polar": to_record(obj.vol_polar),
               "product": obj.product,
               "reference_product": obj.reference_product,
               "ratio": obj.ratio}
    elif isinstance(obj, RadonProfile):
        rec = {"kind": "radon_profile",
               "theta": [float(v) for v in obj.theta],
               "t": [float(v) for v in obj.t_grid],
               "values": [float(v) for v in obj.values],
               "closed_form": obj.closed_form}
    elif isinstance(obj, ExtremalEstimate):
        rec = {"kind": "extremal_estimate", "quantity": obj.quantity,
               "lower": obj.lower, "upper": obj.upper,
               "conjectured_or_exact": obj.conjectured_or_exact,
               "grid_spec": list(obj.grid_spec),
               "certificate": obj.certificate, "seed": obj.seed,
               "details": {k: _num(v) if not isinstance(v, (list, tuple))
                           else [float(x) for x in v]
                           for k, v in obj.details.items()}}
    elif isinstance(obj, PoissonBound):
        rec = {"kind": "poisson_bound", "value": obj.value,
               "remainder_bound": _num(obj.remainder_bound),
               "truncation_radius": obj.truncation_radius,
               "n_lattice_points": obj.n_lattice_points}
    elif isinstance(obj, BSReport):
        rec = {"kind": "bs_report", "body_hash": obj.body_hash,
               "dimension": obj.dimension, "product": obj.product,
               "p_ball": obj.p_ball, "ratio": obj.ratio,
               "margin_std_errors": _num(obj.margin_std_errors),
               "verdict": obj.verdict, "label": obj.label}
    elif isinstance(obj, MahlerReport):
        rec = {"kind": "mahler_report", "body_hash": obj.body_hash,
               "dimension": obj.dimension, "product": obj.product,
               "bound": obj.bound, "slack": obj.slack,
               "std_error": obj.std_error}
    elif isinstance(obj, EqualityDiagnostics):
        rec = {"kind": "equality_diagnostics",
               "directions": [{"theta": [float(v) for v in d.theta],
                               "alpha_hat": d.alpha_hat,
                               "profile_residual": d.profile_residual}
                              for d in obj.directions],
               "max_residual": obj.max_residual,
               "alpha_min": obj.alpha_min, "alpha_max": obj.alpha_max,
               "tail_deviation": obj.tail_deviation}
    elif isinstance(obj, BandlimitedFunction):
        rec = {"kind": "bandlimited_function",
               "spectrum_body": body_record(obj.spectrum_body),
               "nodes": _rows(obj.freq_nodes),
               "weights_re": [float(v) for v in obj.weights.real],
               "weights_im": [float(v) for v in obj.weights.imag],
               "cell_measure": obj.cell_measure}
    else:
        raise TypeError(f"no record form for {type(obj).__name__}")
    if body is not None:
        rec["body"] = body_record(body)
        rec["body_hash"] = body_hash(body)
    return rec


def write_records(records, fh):
    """One sorted-key JSON record per line."""
    for rec in records:
        fh.write(json.dumps(rec, sort_keys=True))
        fh.write("\n")


def format_table(records, columns, header_lines=()):
    """Comma-separated table of selected record fields.

    Missing fields render empty; a commented header names the columns and
    carries any extra annotation lines.
    """
    out = []
    for line in header_lines:
        out.append(f"# {line}")
    out.append("# " + ",".join(columns))
    for rec in records:
        cells = []
        for col in columns:
            v = rec.get(col, "")
            cells.append(repr(v) if isinstance(v, float) else str(v))
        out.append(",".join(cells))
    return "\n".join(out) + "\n"
