"""Multidimensional unfolding: two point sets, distances only across.

The motivating setup is microphone calibration: m microphones hear k
sources, giving every microphone-to-source distance but no
microphone-to-microphone or source-to-source ones.  Stacking both sets
into one configuration turns the problem into EDM completion under a
block observation mask, which any of the completion solvers can attack.

A closed-form factorization route for this special structure exists in
the literature; it is deliberately not implemented here, the completion
reduction covers the use cases and keeps one code path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DistanceMatrix, ObservationMask, PointSet, _as_float_matrix
from .completion import CompletionResult, NoisyObservation, complete_edm
from .embedding import classical_mds


@dataclass(frozen=True)
class UnfoldingInstance:
    """Squared distances across two point sets, m rows by k columns."""

    cross_distances: np.ndarray

    def __post_init__(self):
        arr = _as_float_matrix(self.cross_distances, "cross_distances")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("cross_distances must be nonempty")
        if arr.min(initial=0.0) < 0.0:
            raise ValueError("squared distances must be nonnegative")
        object.__setattr__(self, "cross_distances", arr.copy())

    @property
    def m(self) -> int:
        return self.cross_distances.shape[0]

    @property
    def k(self) -> int:
        return self.cross_distances.shape[1]


@dataclass(frozen=True)
class MduSolution:
    microphones: PointSet
    sources: PointSet
    edm: DistanceMatrix
    completion: CompletionResult


def mdu_mask(m: int, k: int) -> ObservationMask:
    """Block mask of the unfolding EDM: only the m x k cross block (and its
    transpose) is observed.  The missing fraction is (m^2 + k^2) / (m + k)^2."""
    if m < 1 or k < 1:
        raise ValueError("m and k must be positive")
    n = m + k
    W = np.zeros((n, n))
    W[:m, m:] = 1.0
    W[m:, :m] = 1.0
    return ObservationMask(W)


def missing_fraction(m: int, k: int) -> float:
    """Fraction of unobserved entries in the unfolding mask (diagonal
    included, matching the matrix-entry count of the block layout)."""
    return (m * m + k * k) / float((m + k) ** 2)


def embed_unfolding(instance: UnfoldingInstance) -> NoisyObservation:
    """Place the cross distances inside an (m+k) x (m+k) EDM completion
    problem: first the microphones, then the sources."""
    m, k = instance.m, instance.k
    n = m + k
    D = np.zeros((n, n))
    D[:m, m:] = instance.cross_distances
    D[m:, :m] = instance.cross_distances.T
    return NoisyObservation(D, mdu_mask(m, k))


def solve_mdu(
    instance: UnfoldingInstance,
    dim: int,
    method: str = "sdr",
    lam: float | None = None,
    seed=None,
    **opts,
) -> MduSolution:
    """Recover both point sets from cross distances only.

    Completes the blocked EDM with the chosen method (sdr by default, the
    one that copes with this mask), embeds the result by classical MDS and
    splits the configuration back into the two sets.  The output lives in
    an arbitrary rigid frame; align it to anchors if absolute coordinates
    are needed.
    """
    obs = embed_unfolding(instance)
    result = complete_edm(obs, dim, method=method, lam=lam, seed=seed, **opts)
    coords = classical_mds(result.edm, dim).coords
    m = instance.m
    return MduSolution(
        microphones=PointSet(coords[:, :m]),
        sources=PointSet(coords[:, m:]),
        edm=result.edm,
        completion=result,
    )
