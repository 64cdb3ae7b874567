"""Energy functionals and the label-exchange transform.

The energy of a signal integrates the distance to region A against the
metric volume; the transform exchanges the roles of the region pairs
(X, Y) and (A, B) on the same geometry, so its energy integrates the
distance to X instead.  Both integrals use lumped vertex quadrature by
default; the barycentric form is kept as a cross-check (the two sums are
rearrangements of each other).
"""

from __future__ import annotations

import numpy as np

from .errors import CobsigError
from .geodesy import DEFAULT_STEINER_LEVEL, distance_field
from .metric import lumped_vertex_volume
from .signal import Signal, make_signal, swap_hints

#: Label permutation applied by the transform: new tag -> old tag.
FOURIER_PERMUTATION = {"X": "A", "Y": "B", "A": "X", "B": "Y"}


def _lumped(signal: Signal) -> np.ndarray:
    return signal.cached(("lumped",), lambda: lumped_vertex_volume(signal)).values


def _integrate(values: np.ndarray, weights: np.ndarray) -> float:
    return float(np.dot(values, weights))


def energy(signal: Signal, steiner_level: int = DEFAULT_STEINER_LEVEL) -> float:
    """Integral of the distance-to-A field against the lumped volume weights."""
    f = distance_field(signal, "A", steiner_level).values
    return _integrate(f, _lumped(signal))


def energy_barycentric(signal: Signal,
                       steiner_level: int = DEFAULT_STEINER_LEVEL) -> float:
    """Energy with per-simplex averaging instead of lumped weights."""
    f = distance_field(signal, "A", steiner_level).values
    cx = signal.complex
    vols = signal.simplex_volumes()
    means = f[cx.simplices].mean(axis=1)
    return float(np.dot(vols, means))


def fourier_relabel(signal: Signal) -> Signal:
    """Exchange the region roles: new X/Y/A/B come from old A/B/X/Y.

    Geometry and metric are untouched, hints are renamed accordingly, and
    the relabeled signal must itself validate (the old X and Y become the
    new A and B, so they must not touch).  Applying the transform twice
    restores the original labels exactly.
    """
    cx = signal.complex
    new_labels = {new: cx.labels[old] for new, old in FOURIER_PERMUTATION.items()}
    try:
        out = make_signal(cx.with_labels(new_labels), signal.metric,
                          swap_hints(signal.hints))
    except CobsigError as exc:
        raise CobsigError(f"relabeled signal fails validation: {exc}") from exc
    _share_caches(signal, out)
    return out


def _share_caches(src: Signal, dst: Signal) -> None:
    # The refined graphs, vertex fields and quadrature weights depend only
    # on geometry and metric, which the relabeled signal shares; region
    # fields transfer under the label permutation.
    for key, value in src._cache.items():
        kind = key[0]
        if kind in ("volumes", "lumped", "vfield"):
            dst._cache.setdefault(key, value)
        elif kind == "graph" and key[2] is None:
            dst._cache.setdefault(key, value)
        elif kind in ("graph", "field"):
            tag = key[1] if kind == "field" else key[2]
            new_tag = {v: k for k, v in FOURIER_PERMUTATION.items()}[tag]
            new_key = (kind, new_tag, key[2]) if kind == "field" else (
                kind, key[1], new_tag)
            dst._cache.setdefault(new_key, value)


def fourier_energy(signal: Signal, steiner_level: int = DEFAULT_STEINER_LEVEL) -> float:
    """Energy of the relabeled signal; equals integrating f_X on the original."""
    return energy(fourier_relabel(signal), steiner_level)


def energy_ratio(signal: Signal, steiner_level: int = DEFAULT_STEINER_LEVEL) -> float:
    """Ratio of the transformed energy to the energy."""
    e = energy(signal, steiner_level)
    if e == 0.0:
        raise CobsigError("energy is zero; ratio undefined")
    return fourier_energy(signal, steiner_level) / e
