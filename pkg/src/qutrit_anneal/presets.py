"""Bundled demo instances, runnable as ``qutrit-anneal preset <name>``.

Each preset pairs a small integer-coordinate instance with the encoding and
schedule that solve it: fig1 partitions six points into three clusters with
the pinned one-hot form, fig2 splits the same size instance into two
clusters with the penalty form, fig3 and fig4 assign free points to fixed
centroids (three single-qutrit clusters, and four two-qutrit-block clusters
with a penalty, respectively).
"""

from __future__ import annotations

from .anneal import AnnealConfig
from .clustering import PointSet
from .errors import SpecError
from .hamiltonians import (
    METHOD_KMEANSPP,
    METHOD_ONEHOT_K2_PENALTY,
    METHOD_ONEHOT_K3_PINNED,
    EncodingScheme,
)
from .harness import ProblemSpec

PRESET_NAMES = ("fig1", "fig2", "fig3", "fig4")

_FIG1_POINTS = ((4, -2), (-7, 7), (6, -9), (-6, 8), (-2, -6), (-9, 5))
_FIG2_POINTS = ((6, 6), (-6, 5), (-3, 9), (4, -10), (-7, 4), (-5, 1))
_FIG3_POINTS = (
    (8, -1),
    (-2, -6),
    (1, 6),
    (4, -4),
    (3, 8),
    (9, -4),
    (-5, 8),
    (-6, -8),
    (3, -10),
)
_FIG4_POINTS = ((-9, 10), (1, 9), (-8, -3), (-2, -9), (4, -2), (8, -8), (10, -5))


def get_preset(name: str) -> ProblemSpec:
    """Build a fresh ProblemSpec for one of the bundled presets."""
    if name == "fig1":
        return ProblemSpec(
            name="fig1",
            points=PointSet(points=_FIG1_POINTS),
            scheme=EncodingScheme(method=METHOD_ONEHOT_K3_PINNED, K=3),
            anneal=AnnealConfig(h=2.0),
        )
    if name == "fig2":
        return ProblemSpec(
            name="fig2",
            points=PointSet(points=_FIG2_POINTS),
            scheme=EncodingScheme(method=METHOD_ONEHOT_K2_PENALTY, K=2),
            anneal=AnnealConfig(h=8.0),
            pinned=True,
        )
    if name == "fig3":
        return ProblemSpec(
            name="fig3",
            points=PointSet(points=_FIG3_POINTS),
            scheme=EncodingScheme(
                method=METHOD_KMEANSPP,
                K=3,
                centroid_states=((1,), (0,), (-1,)),
            ),
            anneal=AnnealConfig(h=8.0),
            centroids=(0, 1, 2),
        )
    if name == "fig4":
        return ProblemSpec(
            name="fig4",
            points=PointSet(points=_FIG4_POINTS),
            scheme=EncodingScheme(
                method=METHOD_KMEANSPP,
                K=4,
                centroid_states=((1, 1), (1, 0), (1, -1), (0, 1)),
            ),
            anneal=AnnealConfig(h=8.0),
            centroids=(0, 1, 2, 4),
        )
    raise SpecError(f"unknown preset {name!r}, expected one of {PRESET_NAMES}")
