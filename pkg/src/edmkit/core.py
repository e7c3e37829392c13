"""Core types and operations for Euclidean distance matrices.

A Euclidean distance matrix (EDM) here always stores *squared* distances:
``D[i, j] = ||x_i - x_j||^2``.  Callers that want plain distances must take
square roots at the boundary themselves (the command line tool exposes a flag
for that conversion).

Conventions used throughout the package:

* point sets are ``d x n`` arrays, one point per column;
* EDMs are symmetric, hollow (zero diagonal) and entrywise nonnegative;
* Gram matrices are symmetric and positive semidefinite up to a tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

# PSD checks accept lambda_min >= -DEFAULT_PSD_TOL * max(1, |lambda|_max).
DEFAULT_PSD_TOL = 1e-8

# Entries this far below zero (relative to scale) are treated as float noise
# and clamped; anything worse is a genuine invariant violation.
_NEG_NOISE_TOL = 1e-12


def _as_float_matrix(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite values")
    return arr


def _as_square_matrix(values, name: str) -> np.ndarray:
    arr = _as_float_matrix(values, name)
    if arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


def _hollow_symmetric(arr: np.ndarray) -> np.ndarray:
    # Constructor policy: symmetrize, zero the diagonal, then validate.
    arr = 0.5 * (arr + arr.T)
    np.fill_diagonal(arr, 0.0)
    return arr


@dataclass(frozen=True)
class PointSet:
    """A set of n points in R^d, stored as the columns of a d x n array."""

    coords: np.ndarray

    def __post_init__(self):
        arr = _as_float_matrix(self.coords, "coords")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"coords must be nonempty, got shape {arr.shape}")
        object.__setattr__(self, "coords", _frozen(arr))

    @property
    def d(self) -> int:
        return self.coords.shape[0]

    @property
    def n(self) -> int:
        return self.coords.shape[1]


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric hollow matrix of squared pairwise distances."""

    entries: np.ndarray

    def __post_init__(self):
        arr = _as_square_matrix(self.entries, "entries")
        arr = _hollow_symmetric(arr)
        scale = max(1.0, float(np.abs(arr).max(initial=0.0)))
        low = float(arr.min(initial=0.0))
        if low < -_NEG_NOISE_TOL * scale:
            raise ValueError(f"distance entries must be nonnegative, min is {low}")
        np.clip(arr, 0.0, None, out=arr)
        object.__setattr__(self, "entries", _frozen(arr))

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class GramMatrix:
    """Symmetric matrix of inner products.  PSD validation is on demand."""

    entries: np.ndarray

    def __post_init__(self):
        arr = _as_square_matrix(self.entries, "entries")
        arr = 0.5 * (arr + arr.T)
        object.__setattr__(self, "entries", _frozen(arr))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])

    def is_psd(self, tol: float = DEFAULT_PSD_TOL) -> bool:
        eigs = np.linalg.eigvalsh(self.entries)
        biggest = float(np.abs(eigs).max(initial=0.0))
        return bool(eigs[0] >= -tol * max(1.0, biggest))


@dataclass(frozen=True)
class ObservationMask:
    """Symmetric 0/1 matrix marking which off-diagonal entries are observed."""

    entries: np.ndarray

    def __post_init__(self):
        arr = _as_square_matrix(self.entries, "entries")
        arr = _hollow_symmetric(arr)
        if not np.all((arr == 0.0) | (arr == 1.0)):
            raise ValueError("mask entries must be 0 or 1 and symmetric")
        object.__setattr__(self, "entries", _frozen(arr))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def n_observed_pairs(self) -> int:
        iu = np.triu_indices(self.n, k=1)
        return int(self.entries[iu].sum())

    @property
    def n_missing_pairs(self) -> int:
        return self.n * (self.n - 1) // 2 - self.n_observed_pairs

    def is_full(self) -> bool:
        return self.n_missing_pairs == 0


@dataclass(frozen=True)
class ReducedGram:
    """Gram matrix expressed in an orthonormal basis of the hyperplane
    orthogonal to the all-ones vector.  An n-point EDM reduces to an
    (n-1) x (n-1) matrix that is PSD exactly when the EDM is valid."""

    entries: np.ndarray

    def __post_init__(self):
        arr = _as_square_matrix(self.entries, "entries")
        arr = 0.5 * (arr + arr.T)
        object.__setattr__(self, "entries", _frozen(arr))

    @property
    def n(self) -> int:
        """Size of the original EDM this matrix stands for."""
        return self.entries.shape[0] + 1

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])

    def is_psd(self, tol: float = DEFAULT_PSD_TOL) -> bool:
        eigs = np.linalg.eigvalsh(self.entries)
        biggest = float(np.abs(eigs).max(initial=0.0))
        return bool(eigs[0] >= -tol * max(1.0, biggest))


class EdmCheck(NamedTuple):
    is_edm: bool
    min_eigenvalue: float


def as_point_set(points) -> PointSet:
    return points if isinstance(points, PointSet) else PointSet(points)


def as_distance_matrix(D) -> DistanceMatrix:
    return D if isinstance(D, DistanceMatrix) else DistanceMatrix(D)


def as_observation_mask(W) -> ObservationMask:
    return W if isinstance(W, ObservationMask) else ObservationMask(W)


def _matrix_of(obj) -> np.ndarray:
    if isinstance(obj, (DistanceMatrix, GramMatrix, ObservationMask, ReducedGram)):
        return obj.entries
    if isinstance(obj, PointSet):
        raise TypeError("expected a matrix, got a PointSet")
    return _as_square_matrix(obj, "matrix")


def _squared_norms(X: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ij->j", X, X)


def assemble_edm(points) -> DistanceMatrix:
    """Squared-distance matrix of a point set.

    Each unordered pair is computed once and mirrored, so the result is
    exactly symmetric; tiny negative values from cancellation are clamped.
    """
    X = as_point_set(points).coords
    G = X.T @ X
    sq = np.diag(G).copy()
    upper = np.triu(sq[None, :] + sq[:, None] - 2.0 * G, k=1)
    np.clip(upper, 0.0, None, out=upper)
    return DistanceMatrix(upper + upper.T)


def cross_edm(points_a, points_b) -> np.ndarray:
    """Matrix of squared distances between two point sets.

    Entry (i, j) is the squared distance from the i-th point of the first
    set to the j-th point of the second.  Both sets must share the ambient
    dimension.  This is the top-right block of the EDM of the concatenated
    point sets, which is why it shows up in multidimensional unfolding.
    """
    A = as_point_set(points_a).coords
    B = as_point_set(points_b).coords
    if A.shape[0] != B.shape[0]:
        raise ValueError(
            f"point sets live in different dimensions: {A.shape[0]} vs {B.shape[0]}"
        )
    out = _squared_norms(A)[:, None] + _squared_norms(B)[None, :] - 2.0 * (A.T @ B)
    np.clip(out, 0.0, None, out=out)
    return out


def centering_matrix(n: int) -> np.ndarray:
    """The projector I - (1/n) 11^T that removes the mean of n samples."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return np.eye(n) - np.full((n, n), 1.0 / n)


def gram_from_edm(D, s_mode: str = "centroid") -> GramMatrix:
    """Recover a Gram matrix from an EDM.

    ``s_mode="centroid"`` places the origin at the centroid of the point
    set: G = -1/2 J D J with J the centering projector.  ``s_mode of
    "first_point"`` pins the first point to the origin instead:
    G = -1/2 (D - 1 d1^T - d1 1^T) where d1 is the first column of D.
    Both choices reproduce the same EDM; they differ by the translation
    that an EDM cannot see.
    """
    Dv = as_distance_matrix(D).entries
    n = Dv.shape[0]
    if s_mode == "centroid":
        J = centering_matrix(n)
        G = -0.5 * (J @ Dv @ J)
    elif s_mode == "first_point":
        d1 = Dv[:, 0]
        ones = np.ones(n)
        G = -0.5 * (Dv - np.outer(ones, d1) - np.outer(d1, ones))
    else:
        raise ValueError(f"unknown s_mode {s_mode!r}")
    return GramMatrix(G)


def edm_from_gram(G) -> DistanceMatrix:
    """EDM of the point set whose Gram matrix is G.

    Uses D = diag(G) 1^T - 2 G + 1 diag(G)^T, the inverse of the centering
    step up to translation.
    """
    Gv = _matrix_of(G) if not isinstance(G, GramMatrix) else G.entries
    Gv = 0.5 * (Gv + Gv.T)
    return DistanceMatrix(_kappa(Gv))


def _kappa(B: np.ndarray) -> np.ndarray:
    # diag(B) 1^T - 2 B + 1 diag(B)^T, with tiny negatives clamped
    b = np.diag(B)
    out = b[:, None] + b[None, :] - 2.0 * B
    np.clip(out, 0.0, None, out=out)
    return out


def v_basis(n: int) -> np.ndarray:
    """Orthonormal n x (n-1) basis of the hyperplane orthogonal to the
    all-ones vector.

    First row is constant -1/sqrt(n), the block below is an identity plus
    the constant -1/(n + sqrt(n)).  Satisfies V^T 1 = 0, V^T V = I and
    V V^T = I - (1/n) 11^T.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    root = np.sqrt(n)
    V = np.full((n, n - 1), -1.0 / (n + root))
    V[0, :] = -1.0 / root
    V[1:, :] += np.eye(n - 1)
    return V


def reduced_gram(D) -> ReducedGram:
    """Project an EDM to its (n-1) x (n-1) Gram form: H = -1/2 V^T D V."""
    Dv = as_distance_matrix(D).entries
    n = Dv.shape[0]
    if n < 2:
        raise ValueError("need at least 2 points to reduce")
    V = v_basis(n)
    return ReducedGram(-0.5 * (V.T @ Dv @ V))


def edm_from_reduced(H) -> DistanceMatrix:
    """Inverse of :func:`reduced_gram`: D = K(V H V^T)."""
    Hv = H.entries if isinstance(H, ReducedGram) else _as_square_matrix(H, "H")
    n = Hv.shape[0] + 1
    V = v_basis(n)
    return DistanceMatrix(_kappa(V @ Hv @ V.T))


def is_edm(D, tol: float = DEFAULT_PSD_TOL) -> EdmCheck:
    """Test whether a symmetric hollow matrix is a valid EDM.

    The matrix is an EDM exactly when its doubly centered Gram form
    -1/2 J D J is PSD.  Returns the verdict together with the smallest
    eigenvalue of that form; the verdict uses a threshold relative to the
    largest eigenvalue magnitude so that scale does not matter.
    """
    Dv = _matrix_of(D)
    Dv = _hollow_symmetric(Dv.copy())
    n = Dv.shape[0]
    J = centering_matrix(n)
    eigs = np.linalg.eigvalsh(-0.5 * (J @ Dv @ J))
    smallest = float(eigs[0])
    biggest = float(np.abs(eigs).max(initial=0.0))
    return EdmCheck(bool(smallest >= -tol * biggest), smallest)


def numerical_rank(M, rel_tol: float = 1e-9) -> int:
    """Number of eigenvalues of a symmetric matrix above rel_tol times the
    largest magnitude.  The zero matrix has rank 0."""
    Mv = _matrix_of(M)
    if not np.allclose(Mv, Mv.T, atol=1e-10 * max(1.0, float(np.abs(Mv).max(initial=0.0)))):
        raise ValueError("numerical_rank expects a symmetric matrix")
    eigs = np.linalg.eigvalsh(0.5 * (Mv + Mv.T))
    biggest = float(np.abs(eigs).max(initial=0.0))
    if biggest == 0.0:
        return 0
    return int(np.count_nonzero(np.abs(eigs) > rel_tol * biggest))


def full_mask(n: int) -> ObservationMask:
    """Mask with every off-diagonal entry observed."""
    return ObservationMask(np.ones((n, n)) - np.eye(n))
