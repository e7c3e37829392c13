"""Point recovery from distance matrices: classical MDS and alignment.

An EDM determines a point set only up to rigid motion (rotation, reflection,
translation), so recovery comes in two parts: an embedding that produces
*some* congruent configuration, and a Procrustes step that moves it onto
known anchors when an absolute frame is wanted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PointSet, as_distance_matrix, as_point_set, centering_matrix


@dataclass(frozen=True)
class AnchorSet:
    """Known coordinates for a subset of points, by column index."""

    indices: tuple
    coords: np.ndarray

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        arr = np.asarray(self.coords, dtype=float)
        if arr.ndim != 2:
            raise ValueError("anchor coords must be a d x a array")
        if len(idx) != arr.shape[1]:
            raise ValueError(
                f"{len(idx)} indices but {arr.shape[1]} anchor coordinates"
            )
        if len(set(idx)) != len(idx):
            raise ValueError("anchor indices must be distinct")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "coords", arr.copy())


@dataclass(frozen=True)
class RigidTransform:
    """Orthogonal map plus translation, x -> R x + t.

    R is orthogonal but not necessarily a proper rotation; reflections are
    allowed because distance data cannot tell the two apart.
    """

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.rotation, dtype=float)
        t = np.asarray(self.translation, dtype=float).reshape(-1)
        if R.ndim != 2 or R.shape[0] != R.shape[1]:
            raise ValueError("rotation must be square")
        if t.shape[0] != R.shape[0]:
            raise ValueError("translation dimension must match rotation")
        if np.linalg.norm(R.T @ R - np.eye(R.shape[0])) > 1e-10:
            raise ValueError("rotation must be orthogonal")
        object.__setattr__(self, "rotation", R.copy())
        object.__setattr__(self, "translation", t.copy())

    def apply(self, points) -> PointSet:
        X = as_point_set(points).coords
        return PointSet(self.rotation @ X + self.translation[:, None])


@dataclass(frozen=True)
class MdsDiagnostics:
    """Spectral bookkeeping from a classical MDS run."""

    eigenvalues: np.ndarray  # all n, sorted by decreasing magnitude
    n_clamped: int  # negative eigenvalues among the top d set to zero


def classical_mds(D, dim: int, return_diagnostics: bool = False):
    """Embed an EDM into R^dim by the classical spectral method.

    Doubly centers the matrix to G = -1/2 J D J, takes the eigenpairs of
    largest magnitude and scales the eigenvectors by sqrt(eigenvalue).
    For a noisy matrix some of the retained eigenvalues can be negative;
    those are clamped to zero and counted in the diagnostics.  The output
    configuration is centered at the origin.
    """
    Dv = as_distance_matrix(D).entries
    n = Dv.shape[0]
    if not 1 <= dim <= n - 1:
        raise ValueError(f"dim must be in [1, {n - 1}], got {dim}")
    J = centering_matrix(n)
    G = -0.5 * (J @ Dv @ J)
    G = 0.5 * (G + G.T)
    eigvals, eigvecs = np.linalg.eigh(G)
    order = np.argsort(-np.abs(eigvals), kind="stable")
    top = order[:dim]
    lam = eigvals[top]
    n_clamped = int(np.count_nonzero(lam < 0.0))
    lam = np.clip(lam, 0.0, None)
    X = np.sqrt(lam)[:, None] * eigvecs[:, top].T
    points = PointSet(X)
    if return_diagnostics:
        return points, MdsDiagnostics(eigvals[order], n_clamped)
    return points


def procrustes(source, target) -> RigidTransform:
    """Best rigid map (orthogonal + translation) from source onto target.

    Both arguments are d x a arrays (or PointSets) of paired points.  Solves
    the orthogonal Procrustes problem on the centered sets via an SVD of
    their cross-covariance, reflections permitted, then fixes the
    translation so centroids coincide.
    """
    X = as_point_set(source).coords
    Y = as_point_set(target).coords
    if X.shape != Y.shape:
        raise ValueError(f"source and target shapes differ: {X.shape} vs {Y.shape}")
    x_mean = X.mean(axis=1)
    y_mean = Y.mean(axis=1)
    M = (X - x_mean[:, None]) @ (Y - y_mean[:, None]).T
    U, _, Vt = np.linalg.svd(M)
    R = Vt.T @ U.T
    t = y_mean - R @ x_mean
    return RigidTransform(R, t)


def align(points, anchors: AnchorSet) -> PointSet:
    """Move a recovered configuration onto known anchor coordinates.

    Fits the Procrustes transform on the anchor columns only, then applies
    it to every point.
    """
    P = as_point_set(points)
    idx = list(anchors.indices)
    if max(idx) >= P.n or min(idx) < 0:
        raise ValueError("anchor index out of range")
    transform = procrustes(P.coords[:, idx], anchors.coords)
    return transform.apply(P)
