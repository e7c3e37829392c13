"""Completion and denoising of partially observed distance matrices.

Four solvers with different tradeoffs:

* ``rank_complete_edm``: alternate between a low-rank eigenvalue projection
  and reimposing the observed entries.  Cheap, no guarantees.
* ``optspace``: general low-rank matrix completion on a sparse sampling,
  spectral initialization plus manifold descent.  Included mostly as a
  baseline; it is known to behave poorly on small dense problems and on
  the block masks coming from unfolding.
* ``alternating_descent``: coordinate descent on the s-stress objective.
  Each single-coordinate subproblem is a quartic polynomial minimized
  exactly through the roots of its derivative.
* ``sdr_complete_edm``: semidefinite relaxation, maximizing the trace of a
  reduced Gram variable against a masked data penalty, solved by a spectral
  projected gradient method on the PSD cone.

All solvers consume a :class:`NoisyObservation` and return a
:class:`CompletionResult`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DistanceMatrix,
    ObservationMask,
    PointSet,
    as_distance_matrix,
    as_observation_mask,
    as_point_set,
    _as_square_matrix,
    _frozen,
    assemble_edm,
    v_basis,
)


@dataclass(frozen=True)
class NoisyObservation:
    """Partially observed, possibly noisy squared-distance data.

    ``observed`` holds meaningful values only where the mask is 1; all
    other entries are stored as zero.  The masked part is symmetrized on
    construction and negative observed values (which noise can produce on
    squared distances) are clamped at zero, with the count of clamped
    pairs kept in ``n_clamped``.
    """

    observed: np.ndarray
    mask: ObservationMask
    n_clamped: int = 0

    def __post_init__(self):
        mask = as_observation_mask(self.mask)
        arr = _as_square_matrix(self.observed, "observed")
        if arr.shape != mask.entries.shape:
            raise ValueError(
                f"observed shape {arr.shape} does not match mask {mask.entries.shape}"
            )
        arr = 0.5 * (arr + arr.T) * mask.entries
        np.fill_diagonal(arr, 0.0)
        iu = np.triu_indices(arr.shape[0], k=1)
        clamped = int(np.count_nonzero(arr[iu] < 0.0))
        np.clip(arr, 0.0, None, out=arr)
        object.__setattr__(self, "observed", _frozen(arr))
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "n_clamped", clamped)

    @property
    def n(self) -> int:
        return self.observed.shape[0]

    def mean_observed(self) -> float:
        """Mean of the observed off-diagonal entries, 0 if nothing observed."""
        W = self.mask.entries
        total = W.sum()
        if total == 0:
            return 0.0
        return float((self.observed * W).sum() / total)

    def max_observed(self) -> float:
        return float((self.observed * self.mask.entries).max(initial=0.0))


def observe(D, mask) -> NoisyObservation:
    """Restrict a full distance matrix to the entries marked by a mask."""
    return NoisyObservation(as_distance_matrix(D).entries, as_observation_mask(mask))


@dataclass(frozen=True)
class CompletionResult:
    """Outcome of a completion run.

    ``points`` is filled only by methods that produce a configuration as
    part of the solve; the others leave it None and callers can embed the
    completed matrix themselves.
    """

    edm: DistanceMatrix
    points: PointSet | None
    iterations: int
    objective_trace: np.ndarray
    converged: bool


# ---------------------------------------------------------------------------
# stress objectives


def _stress_arrays(X, obs: NoisyObservation):
    coords = as_point_set(X).coords
    if coords.shape[1] != obs.n:
        raise ValueError(f"{coords.shape[1]} points but observation is {obs.n} x {obs.n}")
    E = assemble_edm(coords).entries
    return coords, E, obs.observed, obs.mask.entries


def stress_raw(X, obs: NoisyObservation) -> float:
    """Sum of squared errors between plain (unsquared) distances, counting
    each observed unordered pair once.  Evaluation only."""
    _, E, Dt, W = _stress_arrays(X, obs)
    diff = (np.sqrt(E) - np.sqrt(Dt)) * W
    return 0.5 * float(np.sum(diff * diff))


def stress_s(X, obs: NoisyObservation) -> float:
    """s-stress: squared errors between squared distances over the observed
    unordered pairs."""
    _, E, Dt, W = _stress_arrays(X, obs)
    diff = (E - Dt) * W
    return 0.5 * float(np.sum(diff * diff))


def _stress_s_value(coords: np.ndarray, Dt: np.ndarray, W: np.ndarray) -> float:
    sq = np.einsum("ij,ij->j", coords, coords)
    E = sq[None, :] + sq[:, None] - 2.0 * (coords.T @ coords)
    diff = (E - Dt) * W
    return 0.5 * float(np.sum(diff * diff))


# ---------------------------------------------------------------------------
# quartic subproblem of the s-stress coordinate descent


@dataclass(frozen=True)
class QuarticCoeffs:
    """Coefficients a0 + a1 x + a2 x^2 + a3 x^3 + a4 x^4."""

    a0: float
    a1: float
    a2: float
    a3: float
    a4: float

    def as_array(self) -> np.ndarray:
        return np.array([self.a0, self.a1, self.a2, self.a3, self.a4])

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        return self.a0 + x * (self.a1 + x * (self.a2 + x * (self.a3 + x * self.a4)))


def quartic_coeffs(obs: NoisyObservation, X, i: int, k: int) -> QuarticCoeffs:
    """Coefficients of the s-stress as a polynomial in coordinate k of
    point i, everything else held fixed.

    Only the terms that involve point i contribute; with no observed
    neighbor the polynomial is identically zero.  Expanding
    sum_j ((x - b_j)^2 + e_j)^2 with b_j the neighbor coordinate and e_j
    the residual from the other coordinates gives a leading coefficient
    equal to the neighbor count.
    """
    coords = as_point_set(X).coords
    d, n = coords.shape
    if not (0 <= i < n and 0 <= k < d):
        raise ValueError(f"index out of range: i={i}, k={k} for a {d} x {n} set")
    if n != obs.n:
        raise ValueError("point count does not match observation size")
    W = obs.mask.entries
    nb = np.flatnonzero(W[i])
    if nb.size == 0:
        return QuarticCoeffs(0.0, 0.0, 0.0, 0.0, 0.0)
    P = coords[:, nb]
    diffs = coords[:, i][:, None] - P
    other = np.einsum("kj,kj->j", diffs, diffs) - diffs[k] * diffs[k]
    b = P[k]
    e = other - obs.observed[i, nb]
    m = b * b + e
    return QuarticCoeffs(
        float(np.sum(m * m)),
        -4.0 * float(np.sum(b * m)),
        float(np.sum(4.0 * b * b + 2.0 * m)),
        -4.0 * float(np.sum(b)),
        float(nb.size),
    )


def _real_cubic_roots(c3: float, c2: float, c1: float, c0: float) -> list:
    """Real roots of a cubic, closed form, with degenerate degrees handled."""
    scale = max(abs(c3), abs(c2), abs(c1), abs(c0))
    if scale == 0.0:
        return []
    if abs(c3) <= 1e-14 * scale:
        # quadratic or lower
        if abs(c2) <= 1e-14 * scale:
            if abs(c1) <= 1e-14 * scale:
                return []
            return [-c0 / c1]
        disc = c1 * c1 - 4.0 * c2 * c0
        if disc < 0.0:
            return []
        r = math.sqrt(disc)
        return [(-c1 - r) / (2.0 * c2), (-c1 + r) / (2.0 * c2)]
    # depressed cubic t^3 + p t + q, x = t - c2 / (3 c3)
    inv = 1.0 / c3
    b = c2 * inv
    c = c1 * inv
    d0 = c0 * inv
    shift = b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d0
    disc = 0.25 * q * q + p * p * p / 27.0
    roots = []
    if disc > 0.0:
        r = math.sqrt(disc)
        u = math.copysign(abs(-0.5 * q + r) ** (1.0 / 3.0), -0.5 * q + r)
        v = math.copysign(abs(-0.5 * q - r) ** (1.0 / 3.0), -0.5 * q - r)
        roots = [u + v - shift]
    elif p == 0.0:
        roots = [math.copysign(abs(q) ** (1.0 / 3.0), -q) - shift]
    else:
        # three real roots, trigonometric form
        rho = math.sqrt(-p * p * p / 27.0)
        arg = -0.5 * q / rho
        arg = min(1.0, max(-1.0, arg))
        theta = math.acos(arg)
        amp = 2.0 * math.sqrt(-p / 3.0)
        roots = [
            amp * math.cos((theta - 2.0 * math.pi * j) / 3.0) - shift for j in range(3)
        ]
    # one Newton polish per root tightens the closed form against roundoff
    polished = []
    for x in roots:
        for _ in range(2):
            fx = ((c3 * x + c2) * x + c1) * x + c0
            dfx = (3.0 * c3 * x + 2.0 * c2) * x + c1
            if dfx == 0.0:
                break
            step = fx / dfx
            x -= step
            if abs(step) <= 1e-14 * max(1.0, abs(x)):
                break
        polished.append(x)
    return polished


def _argmin_quartic(a4: float, a3: float, a2: float, a1: float, fallback: float) -> float:
    if a4 <= 0.0:
        return fallback
    roots = _real_cubic_roots(4.0 * a4, 3.0 * a3, 2.0 * a2, a1)
    if not roots:
        return fallback
    best_x = None
    best_f = math.inf
    for x in sorted(roots):
        fx = (((a4 * x + a3) * x + a2) * x + a1) * x
        if best_x is None or fx < best_f - 1e-12 * max(1.0, abs(best_f)):
            best_f = fx
            best_x = x
    return best_x if best_x is not None else fallback


def minimize_quartic(coeffs: QuarticCoeffs, fallback: float = 0.0) -> float:
    """Global minimizer of a quartic with positive leading coefficient.

    The stationary points are the real roots of the derivative cubic,
    obtained in closed form; ties are broken toward the smallest x.  A
    degenerate polynomial (a4 <= 0, as happens with no observed neighbor)
    has no global minimum, and the fallback value is returned unchanged.
    """
    return _argmin_quartic(coeffs.a4, coeffs.a3, coeffs.a2, coeffs.a1, float(fallback))


# ---------------------------------------------------------------------------
# rank alternation


def eigenvalue_threshold(M, rank: int) -> np.ndarray:
    """Nearest matrix (in the eigenbasis) keeping the `rank` eigenvalues of
    largest magnitude, negative ones included."""
    Mv = _as_square_matrix(M, "M")
    Mv = 0.5 * (Mv + Mv.T)
    if rank >= Mv.shape[0]:
        return Mv
    w, U = np.linalg.eigh(Mv)
    keep = np.argsort(-np.abs(w), kind="stable")[:rank]
    out = (U[:, keep] * w[keep]) @ U[:, keep].T
    return 0.5 * (out + out.T)


def rank_complete_edm(
    obs: NoisyObservation,
    dim: int,
    max_iter: int = 1000,
    tol: float = 1e-8,
    fill: float | None = None,
) -> CompletionResult:
    """Complete an EDM by alternating a rank-(dim + 2) eigenvalue projection
    with reimposition of the observed entries.

    Missing entries start at the mean of the observed ones (or ``fill``).
    After each projection the observed entries are restored, the diagonal
    zeroed and negative entries clamped.  Stops when successive iterates
    differ by less than ``tol`` in relative Frobenius norm.  The objective
    trace records the observed-entry residual of each low-rank projection.
    """
    if dim < 1:
        raise ValueError("dim must be positive")
    W = obs.mask.entries
    observed = W == 1.0
    Dt = obs.observed
    mu = obs.mean_observed() if fill is None else float(fill)
    D = np.where(observed, Dt, mu)
    np.fill_diagonal(D, 0.0)

    trace = []
    converged = False
    iterations = 0
    prev = D
    for iterations in range(1, max_iter + 1):
        low = eigenvalue_threshold(D, dim + 2)
        trace.append(float(np.linalg.norm((low - Dt) * W)))
        D = np.where(observed, Dt, low)
        np.fill_diagonal(D, 0.0)
        np.clip(D, 0.0, None, out=D)
        delta = np.linalg.norm(D - prev) / max(1.0, np.linalg.norm(D))
        prev = D
        if delta < tol:
            converged = True
            break
    return CompletionResult(
        edm=DistanceMatrix(D),
        points=None,
        iterations=iterations,
        objective_trace=np.array(trace),
        converged=converged,
    )


# ---------------------------------------------------------------------------
# OptSpace


@dataclass(frozen=True)
class OptSpaceResult:
    A: np.ndarray
    S: np.ndarray
    B: np.ndarray
    completed: np.ndarray
    iterations: int
    objective_trace: np.ndarray
    converged: bool


def _optspace_core(A: np.ndarray, B: np.ndarray, M: np.ndarray, ii, jj) -> np.ndarray:
    # least squares for the r x r core with both factors fixed
    r = A.shape[1]
    design = (A[ii][:, :, None] * B[jj][:, None, :]).reshape(ii.size, r * r)
    sol, *_ = np.linalg.lstsq(design, M[ii, jj], rcond=None)
    return sol.reshape(r, r)


def optspace(
    observed,
    mask,
    rank: int,
    max_iter: int = 500,
    tol: float = 1e-8,
) -> OptSpaceResult:
    """Low-rank completion of a generic (not necessarily symmetric) matrix.

    Steps: trim over-represented rows and columns for the spectral
    initialization, scale by the inverse observed fraction, initialize the
    factors from the top singular vectors, then descend on the factor pair
    with the core re-solved by least squares at every step and
    orthonormality restored by QR after each gradient move.
    """
    M = np.asarray(observed, dtype=float)
    W = np.asarray(mask, dtype=float)
    if M.shape != W.shape or M.ndim != 2:
        raise ValueError("observed and mask must be matrices of equal shape")
    if not np.all((W == 0.0) | (W == 1.0)):
        raise ValueError("mask entries must be 0 or 1")
    m, n = M.shape
    if not 1 <= rank <= min(m, n):
        raise ValueError(f"rank must be in [1, {min(m, n)}]")
    M = M * W
    n_obs = int(W.sum())
    if n_obs == 0:
        raise ValueError("nothing observed")
    alpha = n_obs / (m * n)

    # trim: rows/cols holding more than twice the average number of samples
    # are silenced for the initialization so they cannot dominate the SVD
    M_init = M.copy()
    row_counts = W.sum(axis=1)
    col_counts = W.sum(axis=0)
    M_init[row_counts > 2.0 * row_counts.mean(), :] = 0.0
    M_init[:, col_counts > 2.0 * col_counts.mean()] = 0.0

    U, _, Vt = np.linalg.svd(M_init / alpha, full_matrices=False)
    A = U[:, :rank]
    B = Vt[:rank].T
    ii, jj = np.nonzero(W)
    S = _optspace_core(A, B, M, ii, jj)

    def objective(A_, S_, B_):
        R = (A_ @ S_ @ B_.T - M) * W
        return 0.5 * float(np.sum(R * R))

    f = objective(A, S, B)
    trace = [f]
    converged = False
    iterations = 0
    step = 1.0
    for iterations in range(1, max_iter + 1):
        R = (A @ S @ B.T - M) * W
        Ga = R @ B @ S.T
        Gb = R.T @ A @ S
        g2 = float(np.sum(Ga * Ga) + np.sum(Gb * Gb))
        if g2 == 0.0:
            converged = True
            break
        step = min(step * 2.0, 1e6)
        improved = False
        for _ in range(40):
            A_new = np.linalg.qr(A - step * Ga)[0]
            B_new = np.linalg.qr(B - step * Gb)[0]
            S_new = _optspace_core(A_new, B_new, M, ii, jj)
            f_new = objective(A_new, S_new, B_new)
            if f_new <= f - 1e-4 * step * g2 or f_new < f:
                improved = True
                break
            step *= 0.5
        if not improved:
            converged = True
            break
        drop = f - f_new
        A, B, S, f = A_new, B_new, S_new, f_new
        trace.append(f)
        if drop <= tol * max(1.0, f):
            converged = True
            break
    return OptSpaceResult(
        A=A,
        S=S,
        B=B,
        completed=A @ S @ B.T,
        iterations=iterations,
        objective_trace=np.array(trace),
        converged=converged,
    )


def optspace_complete_edm(
    obs: NoisyObservation, dim: int, max_iter: int = 500, tol: float = 1e-8
) -> CompletionResult:
    """EDM completion through :func:`optspace` at rank dim + 2.

    The factor product is symmetrized, hollowed and clamped so that the
    output satisfies the EDM storage invariants even when the fit is bad
    (on these small dense problems it often is).
    """
    res = optspace(obs.observed, obs.mask.entries, dim + 2, max_iter=max_iter, tol=tol)
    D = 0.5 * (res.completed + res.completed.T)
    np.fill_diagonal(D, 0.0)
    np.clip(D, 0.0, None, out=D)
    return CompletionResult(
        edm=DistanceMatrix(D),
        points=None,
        iterations=res.iterations,
        objective_trace=res.objective_trace,
        converged=res.converged,
    )


# ---------------------------------------------------------------------------
# alternating coordinate descent on the s-stress


def alternating_descent(
    obs: NoisyObservation,
    dim: int,
    max_sweeps: int = 200,
    tol: float = 1e-8,
    init="zero",
    seed=None,
) -> CompletionResult:
    """Minimize the s-stress by exact single-coordinate updates.

    Cycles through every point and coordinate, replacing each coordinate by
    the global minimizer of the restricted quartic.  The objective can
    never increase, so the recorded trace (initial value plus one entry per
    sweep) is non-increasing.  ``init`` is ``"zero"``, ``"random"`` (unit
    Gaussian, controlled by ``seed``) or an explicit dim x n starting
    configuration.
    """
    if dim < 1:
        raise ValueError("dim must be positive")
    n = obs.n
    W = obs.mask.entries
    Dt = obs.observed
    if isinstance(init, str):
        if init == "zero":
            X = np.zeros((dim, n))
        elif init == "random":
            X = np.random.default_rng(seed).standard_normal((dim, n))
        else:
            raise ValueError(f"unknown init {init!r}")
    else:
        X = np.array(as_point_set(init).coords, dtype=float)
        if X.shape != (dim, n):
            raise ValueError(f"init must be {dim} x {n}, got {X.shape}")

    neighbors = [np.flatnonzero(W[i]) for i in range(n)]
    rows = [Dt[i, nb] for i, nb in enumerate(neighbors)]

    prev = _stress_s_value(X, Dt, W)
    trace = [prev]
    converged = False
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        for i in range(n):
            nb = neighbors[i]
            if nb.size == 0:
                continue
            P = X[:, nb]
            xi = X[:, i].copy()
            diffs = xi[:, None] - P
            sq = diffs * diffs
            tot = sq.sum(axis=0)
            drow = rows[i]
            count = float(nb.size)
            for k in range(dim):
                b = P[k]
                e = tot - sq[k] - drow
                m = b * b + e
                a3 = -4.0 * float(b.sum())
                a2 = float(np.sum(4.0 * b * b + 2.0 * m))
                a1 = -4.0 * float(np.sum(b * m))
                x_new = _argmin_quartic(count, a3, a2, a1, xi[k])
                if x_new != xi[k]:
                    xi[k] = x_new
                    nd = x_new - b
                    nd *= nd
                    tot += nd - sq[k]
                    sq[k] = nd
            X[:, i] = xi
        cur = _stress_s_value(X, Dt, W)
        trace.append(cur)
        if prev - cur <= tol * max(prev, 1e-300):
            converged = True
            break
        prev = cur
    return CompletionResult(
        edm=assemble_edm(X),
        points=PointSet(X),
        iterations=sweeps,
        objective_trace=np.array(trace),
        converged=converged,
    )


# ---------------------------------------------------------------------------
# semidefinite relaxation


def _kappa_linear(B: np.ndarray) -> np.ndarray:
    b = np.diag(B)
    return b[:, None] + b[None, :] - 2.0 * B


# The squared data penalty is never exact, so its weight carries a fixed
# boost on top of the user-facing lambda; 1e3 puts the systematic bias of
# the penalized optimum around 1e-5 relative on benign instances.
_LAMBDA_RESCALE = 1e3


def _shortest_path_fill(Dt: np.ndarray, W: np.ndarray, fallback: float) -> np.ndarray:
    """Fill missing entries with squared graph distances over the observed
    ones (min-plus closure on plain distances).  Shortest paths respect the
    triangle inequality, which makes this a far better starting completion
    than a constant fill.  Disconnected pairs get the fallback value."""
    P = np.where(W == 1.0, np.sqrt(Dt), np.inf)
    np.fill_diagonal(P, 0.0)
    for k in range(P.shape[0]):
        np.minimum(P, P[:, k, None] + P[None, k, :], out=P)
    P = P * P
    P[~np.isfinite(P)] = fallback
    return P


def _project_psd_trace(M: np.ndarray, cap: float | None) -> np.ndarray:
    w, U = np.linalg.eigh(0.5 * (M + M.T))
    np.clip(w, 0.0, None, out=w)
    if cap is not None and w.sum() > cap:
        # uniform downward shift of the spectrum onto the trace budget
        ws = np.sort(w)[::-1]
        css = np.cumsum(ws)
        r_grid = np.arange(1, ws.size + 1)
        theta_grid = (css - cap) / r_grid
        valid = np.nonzero(ws > theta_grid)[0]
        theta = theta_grid[valid[-1]] if valid.size else css[-1] / ws.size
        w = np.maximum(w - theta, 0.0)
    out = (U * w) @ U.T
    return 0.5 * (out + out.T)


def sdr_complete_edm(
    obs: NoisyObservation,
    lam: float | None = None,
    dim: int | None = None,
    max_iter: int = 4000,
    tol: float = 1e-7,
    trace_cap_factor: float = 1.0,
) -> CompletionResult:
    """Semidefinite relaxation for EDM completion.

    Works on the reduced Gram variable H (size n-1, PSD exactly when the
    produced matrix is an EDM) and minimizes

        lam_eff * || W o (K(V H V^T) - observed) ||_F^2  -  trace(H)

    over the PSD cone, trace capped at ``trace_cap_factor * n * max(observed)``
    so the linear reward stays bounded.  The trace term favors stretched
    configurations, which is what makes the relaxation pick a meaningful
    completion among all data-consistent PSD matrices.

    ``lam`` defaults to the square root of the number of missing unordered
    pairs; internally it is divided by the mean observed entry (which makes
    the squared data penalty scale-free) and boosted by a fixed factor that
    keeps the penalized optimum tight against the data.  The solver is a
    spectral projected gradient method (Barzilai-Borwein steps, exact line
    search along each projected-gradient segment, projection onto the cone
    by eigenvalue clamping) run in continuation: the stiff boosted penalty
    is reached through a short ladder of softer ones, each warm starting
    the next.
    """
    n = obs.n
    if n < 2:
        raise ValueError("need at least 2 points")
    W = obs.mask.entries
    Dt = obs.observed
    V = v_basis(n)

    if lam is None:
        lam = math.sqrt(max(1, obs.mask.n_missing_pairs))
    scale = obs.mean_observed()
    if scale <= 0.0:
        scale = 1.0
    lam_full = lam * _LAMBDA_RESCALE / scale
    cap = trace_cap_factor * n * max(obs.max_observed(), 1e-12)
    eye = np.eye(n - 1)

    def objective(H, weight):
        R = (_kappa_linear(V @ H @ V.T) - Dt) * W
        return weight * float(np.sum(R * R)) - float(np.trace(H)), R

    def gradient(R, weight):
        r1 = R.sum(axis=1)
        inner = 4.0 * ((V * r1[:, None]).T @ V - V.T @ R @ V)
        return weight * inner - eye

    # initialize from the observed entries with shortest-path fill
    D0 = _shortest_path_fill(Dt, W, obs.mean_observed())
    H = _project_psd_trace(-0.5 * (V.T @ D0 @ V), cap)

    # power iteration for the curvature of the data term, to seed the step
    rng = np.random.default_rng(0)
    Z = rng.standard_normal((n - 1, n - 1))
    Z = 0.5 * (Z + Z.T)
    Z /= max(np.linalg.norm(Z), 1e-30)
    sigma = 1.0
    for _ in range(12):
        AZ = _kappa_linear(V @ Z @ V.T) * W
        r1 = AZ.sum(axis=1)
        Z = 2.0 * ((V * r1[:, None]).T @ V - V.T @ AZ @ V)
        Z = 0.5 * (Z + Z.T)
        sigma = np.linalg.norm(Z)
        if sigma <= 1e-30:
            break
        Z /= sigma

    # the boosted penalty is stiff, so approach it by continuation: solve
    # cheap soft-penalty stages and warm start each harder one from the last
    weights = [lam_full * 10.0 ** (-k) for k in range(3, -1, -1)]
    trace = []
    iterations = 0
    converged = False
    for weight in weights:
        lipschitz = max(2.0 * weight * sigma, 1e-12)
        alpha0 = 1.0 / lipschitz
        alpha = alpha0
        alpha_min, alpha_max = 1e-8 * alpha0, 1e8 * alpha0
        f, R = objective(H, weight)
        g = gradient(R, weight)
        trace.append(f)
        converged = False
        stall = 0
        while iterations < max_iter:
            iterations += 1
            H_trial = _project_psd_trace(H - alpha * g, cap)
            d = H_trial - H
            d_norm = float(np.linalg.norm(d))
            if d_norm <= 1e-15 * max(1.0, float(np.linalg.norm(H))):
                converged = True
                break
            # the objective restricted to the segment [H, H_trial] is the
            # parabola f + gd*s + curv*s^2, so the line search is exact:
            # step = -gd / (2 curv), clamped to the feasible segment
            Rd = _kappa_linear(V @ d @ V.T) * W
            gd = float(np.sum(g * d))
            if gd >= 0.0:
                converged = True
                break
            curv = weight * float(np.sum(Rd * Rd))
            step = min(-0.5 * gd / curv, 1.0) if curv > 0.0 else 1.0
            f_new = f + gd * step + curv * step * step
            H_new = H + step * d
            if iterations % 128 == 0:
                # refresh the residual exactly; the running update drifts
                f_new, R_new = objective(H_new, weight)
            else:
                R_new = R + step * Rd
            g_new = gradient(R_new, weight)

            s = H_new - H
            y = g_new - g
            sy = float(np.sum(s * y))
            if sy > 1e-30:
                alpha = min(max(float(np.sum(s * s)) / sy, alpha_min), alpha_max)
            else:
                alpha = alpha0

            rel_drop = abs(f - f_new) / max(1.0, abs(f_new))
            H, f, g = H_new, f_new, g_new
            trace.append(f)
            if rel_drop < tol:
                stall += 1
                if stall >= 20:
                    converged = True
                    break
            else:
                stall = 0

    B = V @ H @ V.T
    D = _kappa_linear(B)
    np.clip(D, 0.0, None, out=D)
    points = None
    if dim is not None:
        w, U = np.linalg.eigh(0.5 * (B + B.T))
        order = np.argsort(-np.abs(w), kind="stable")[:dim]
        lam_top = np.clip(w[order], 0.0, None)
        points = PointSet(np.sqrt(lam_top)[:, None] * U[:, order].T)
    return CompletionResult(
        edm=DistanceMatrix(D),
        points=points,
        iterations=iterations,
        objective_trace=np.array(trace),
        converged=converged,
    )


# ---------------------------------------------------------------------------
# dispatcher

METHODS = ("rank", "optspace", "sstress", "sdr")


def complete_edm(
    obs: NoisyObservation,
    dim: int,
    method: str = "sdr",
    lam: float | None = None,
    seed=None,
    **opts,
) -> CompletionResult:
    """Run one of the completion methods by name: rank, optspace, sstress
    or sdr."""
    if method == "rank":
        return rank_complete_edm(obs, dim, **opts)
    if method == "optspace":
        return optspace_complete_edm(obs, dim, **opts)
    if method == "sstress":
        return alternating_descent(obs, dim, seed=seed, **opts)
    if method == "sdr":
        return sdr_complete_edm(obs, lam=lam, dim=dim, **opts)
    raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")
