"""JSON mesh files, correspondence files, and keep-predicate files.

Mesh file layout: {"dim", "ambient_dim", "vertices", "simplices"
(objects with "verts" and "sign"), "labels" (X/Y/A/B to facet arrays)},
plus an optional "metric" array of {"edge": [u, v], "length": l} entries
(absent means the ambient-induced metric) and an optional "hints" object.
Numbers are written in full double precision, so a save/load round trip is
the identity on the data model.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .complex import build_complex
from .errors import CobsigError
from .metric import MetricField, induced_metric
from .signal import Signal, make_signal
from .signalops import Correspondence


def signal_to_dict(signal: Signal, include_metric: bool | None = None) -> dict:
    out = signal.complex.to_dict()
    if include_metric is None:
        include_metric = signal.metric.source != "induced"
    if include_metric:
        out["metric"] = [
            {"edge": [int(u), int(v)], "length": float(l)}
            for (u, v), l in zip(signal.metric.edges, signal.metric.lengths)
        ]
    if signal.hints:
        out["hints"] = {k: float(v) for k, v in sorted(signal.hints.items())}
    return out


def signal_from_dict(data: dict) -> Signal:
    try:
        verts = np.array(data["vertices"], dtype=np.float64)
        simp = np.array([s["verts"] for s in data["simplices"]], dtype=np.int64)
        signs = np.array([s.get("sign", 1) for s in data["simplices"]],
                         dtype=np.int64)
        labels = {
            tag: [tuple(f) for f in facets]
            for tag, facets in data.get("labels", {}).items()
        }
    except (KeyError, TypeError, ValueError) as exc:
        raise CobsigError(f"malformed mesh data: {exc}") from exc
    cx = build_complex(verts, simp, labels, signs)
    if "metric" in data:
        edges = np.array([m["edge"] for m in data["metric"]], dtype=np.int64)
        edges.sort(axis=1)
        lengths = np.array([m["length"] for m in data["metric"]])
        metric = MetricField(edges, lengths, "deformed")
        expected = {tuple(e) for e in cx.edges().tolist()}
        got = {tuple(e) for e in metric.edges.tolist()}
        if expected != got:
            raise CobsigError("metric edge set does not match the complex")
    else:
        metric = induced_metric(cx)
    hints = {k: float(v) for k, v in data.get("hints", {}).items()}
    return make_signal(cx, metric, hints)


def save_signal(signal: Signal, path) -> None:
    Path(path).write_text(json.dumps(signal_to_dict(signal), indent=2) + "\n")


def load_signal(path) -> Signal:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise CobsigError(f"invalid JSON in {path}: {exc}") from exc
    return signal_from_dict(data)


def save_correspondence(corr: Correspondence, path) -> None:
    data = {"pairs": [list(p) for p in corr.pairs],
            "tolerance": corr.tolerance}
    Path(path).write_text(json.dumps(data, indent=2) + "\n")


def load_correspondence(path) -> Correspondence:
    data = json.loads(Path(path).read_text())
    return Correspondence(tuple(tuple(p) for p in data["pairs"]),
                          float(data["tolerance"]))


def load_keep_spec(path) -> dict:
    """Keep-predicate file: {"simplices": [...]} or {"axis": k, "min"/"max": v}."""
    data = json.loads(Path(path).read_text())
    if "simplices" not in data and "axis" not in data:
        raise CobsigError("keep file needs either 'simplices' or 'axis'")
    return data


def kept_simplices_from_spec(signal: Signal, spec: dict) -> np.ndarray:
    if "simplices" in spec:
        return np.asarray(spec["simplices"], dtype=np.int64)
    axis = int(spec["axis"])
    lo = float(spec.get("min", -np.inf))
    hi = float(spec.get("max", np.inf))
    coords = signal.complex.vertices[:, axis]
    ok = (coords >= lo) & (coords <= hi)
    keep = np.all(ok[signal.complex.simplices], axis=1)
    return np.argwhere(keep).ravel()
