"""Deterministic sample points from a counter-based generator."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError, SpecError
from .soliton.context import SolitonInput, context

MAX_ATTEMPTS = 100


@dataclass
class SampleSet:
    points: list
    exclusions: list = field(default_factory=list)  # (slot, reason)

    def __len__(self):
        return len(self.points)


def generator(seed: int) -> np.random.Generator:
    """Philox keyed directly by the 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=int(seed)))


def _usable(inp: SolitonInput, p, order: int):
    ctx = context(inp, p, order)
    ctx.require_nonzero()
    if inp.lam is not None:
        float(ctx.lam_j)
    return ctx


def sample_points(inp: SolitonInput, box, count: int, seed: int, order: int = 3) -> SampleSet:
    """``count`` points drawn uniformly from ``box`` and sorted lexicographically.

    A draw where the metric is singular or indefinite, an expression is out
    of its domain, or V vanishes is rejected and redrawn; a slot that fails
    ``MAX_ATTEMPTS`` times is reported as an exclusion.
    """
    coords = inp.manifold.coordinates
    try:
        bounds = np.array([[float(box[c][0]), float(box[c][1])] for c in coords])
    except KeyError as exc:
        raise SpecError(f"sampling box has no interval for coordinate {exc.args[0]!r}") from None
    lo, hi = bounds[:, 0], bounds[:, 1]
    if np.any(hi <= lo):
        raise SpecError("sampling box intervals must satisfy lo < hi")
    rng = generator(seed)
    points, exclusions = [], []
    for slot in range(count):
        reason = None
        for _ in range(MAX_ATTEMPTS):
            p = tuple(float(x) for x in lo + (hi - lo) * rng.random(len(coords)))
            try:
                _usable(inp, p, order)
            except NumericalError as exc:
                reason = str(exc)
                continue
            points.append(p)
            break
        else:
            exclusions.append((slot, reason))
    points.sort()
    return SampleSet(points, exclusions)
