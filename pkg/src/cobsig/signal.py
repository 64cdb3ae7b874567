"""The signal: a labeled cobordism complex paired with a metric.

Signals are the unit every operation acts on.  They are immutable; derived
artifacts (refined graphs, distance fields, quadrature weights) are memoized
on a private cache keyed by their parameters, which is safe because neither
the complex nor the metric can change.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .complex import CobordismComplex, validate
from .errors import CobsigError
from .metric import MetricField, induced_metric, simplex_volumes

#: Hint keys swapped when the X/Y and A/B roles are exchanged.
HINT_SWAP = {
    "E": "EF",
    "EF": "E",
    "i_A": "i_X",
    "i_X": "i_A",
    "diam_A": "diam_X",
    "diam_X": "diam_A",
    "vol_A": "vol_X",
    "vol_X": "vol_A",
}


@dataclass(eq=False)
class Signal:
    """A validated complex plus a nondegenerate metric and optional hints.

    ``hints`` carries generator-provided ground-truth values (energies,
    diameters, injectivity radii, resolution) keyed by name.
    """

    complex: CobordismComplex
    metric: MetricField
    hints: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return self.complex.dim

    def simplex_volumes(self) -> np.ndarray:
        key = ("volumes",)
        if key not in self._cache:
            self._cache[key] = simplex_volumes(self.metric, self.complex.simplices)
        return self._cache[key]

    def cached(self, key, compute):
        if key not in self._cache:
            self._cache[key] = compute()
        return self._cache[key]


def make_signal(cx: CobordismComplex, metric: MetricField | None = None,
                hints: dict | None = None) -> Signal:
    """Validate and assemble a signal.

    Raises CobsigError when the complex fails validation, and MetricError
    when any top simplex is degenerate under the metric.
    """
    report = validate(cx)
    if not report.ok:
        names = ", ".join(sorted({v[0] for v in report.violations}))
        raise CobsigError(f"complex fails validation: {names}")
    if metric is None:
        metric = induced_metric(cx)
    sig = Signal(cx, metric, dict(hints or {}))
    sig.simplex_volumes()  # force the nondegeneracy check
    return sig


def swap_hints(hints: dict) -> dict:
    """Rename hint keys under the X<->A, Y<->B role exchange."""
    return {HINT_SWAP.get(k, k): v for k, v in hints.items()}
