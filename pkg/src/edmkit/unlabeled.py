"""Working with distances that carry no labels.

Two flavors of the problem:

* Echo sorting.  Each microphone hears a set of arrival times but nothing
  says which wall produced which echo.  Augmenting the microphone EDM with
  a candidate column of squared distances and scoring it by the best
  achievable s-stress tells consistent labelings apart from wrong ones, at
  which point every first-order echo pins an image source and therefore a
  wall.
* Turnpike.  One dimension, all pairwise distances known but completely
  unlabeled.  A branch-and-prune search recovers every point set (up to
  translation and reflection) whose distance multiset matches.
"""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DistanceMatrix,
    PointSet,
    as_distance_matrix,
    as_point_set,
    assemble_edm,
)
from .embedding import classical_mds, procrustes

SPEED_OF_SOUND = 343.0


@dataclass(frozen=True)
class WallPlane:
    """A plane given by one point on it and a unit normal."""

    point: np.ndarray
    normal: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.point, dtype=float).reshape(-1)
        nrm = np.asarray(self.normal, dtype=float).reshape(-1)
        if p.shape != nrm.shape:
            raise ValueError("point and normal must have equal dimension")
        if abs(np.linalg.norm(nrm) - 1.0) > 1e-10:
            raise ValueError("normal must have unit length")
        object.__setattr__(self, "point", p.copy())
        object.__setattr__(self, "normal", nrm.copy())

    def offset(self) -> float:
        """Signed distance of the plane from the origin along its normal."""
        return float(self.normal @ self.point)


@dataclass(frozen=True)
class RoomSpec:
    """A shoebox room [0, Lx] x [0, Ly] x [0, Lz] with one source and a
    microphone array, everything strictly inside."""

    extents: np.ndarray
    source: np.ndarray
    microphones: np.ndarray

    def __post_init__(self):
        ext = np.asarray(self.extents, dtype=float).reshape(-1)
        src = np.asarray(self.source, dtype=float).reshape(-1)
        mics = np.asarray(self.microphones, dtype=float)
        if ext.shape != (3,) or np.any(ext <= 0):
            raise ValueError("extents must be 3 positive lengths")
        if src.shape != (3,):
            raise ValueError("source must be a 3-vector")
        if mics.ndim != 2 or mics.shape[0] != 3 or mics.shape[1] < 1:
            raise ValueError("microphones must be a 3 x m array")
        inside = lambda P: np.all(P > 0.0) and np.all(P < ext.reshape(3, -1))
        if not inside(src.reshape(3, 1)):
            raise ValueError("source must be strictly inside the room")
        if not inside(mics):
            raise ValueError("all microphones must be strictly inside the room")
        object.__setattr__(self, "extents", ext.copy())
        object.__setattr__(self, "source", src.copy())
        object.__setattr__(self, "microphones", mics.copy())

    def walls(self) -> list:
        """The six wall planes, low then high per axis, outward normals."""
        out = []
        for axis in range(3):
            e = np.zeros(3)
            e[axis] = 1.0
            out.append(WallPlane(np.zeros(3), -e))
            out.append(WallPlane(self.extents.copy(), e))
        return out


@dataclass(frozen=True)
class EchoSet:
    """Per-microphone arrival times, each array sorted ascending."""

    arrival_times: tuple
    speed: float = SPEED_OF_SOUND

    def __post_init__(self):
        if self.speed <= 0:
            raise ValueError("speed must be positive")
        cleaned = []
        for times in self.arrival_times:
            arr = np.asarray(times, dtype=float).reshape(-1)
            if arr.size and np.any(np.diff(arr) < 0):
                raise ValueError("arrival times must be sorted ascending")
            cleaned.append(arr.copy())
        object.__setattr__(self, "arrival_times", tuple(cleaned))

    @property
    def n_microphones(self) -> int:
        return len(self.arrival_times)


@dataclass(frozen=True)
class EchoSimulation:
    """Simulated echoes plus the ground truth that a real recording hides:
    ``labels[i][j]`` is the image-source index behind the j-th arrival at
    microphone i, or -1 for a decoy."""

    echoes: EchoSet
    labels: tuple
    image_sources: np.ndarray
    wall_sequences: tuple


@dataclass(frozen=True)
class EchoSortResult:
    times: tuple
    squared_distances: np.ndarray
    score: float
    n_evaluated: int


@dataclass(frozen=True)
class EchoAssignment:
    anchor_time: float
    times: tuple
    squared_distances: np.ndarray
    score: float
    threshold: float
    image_source: np.ndarray


def image_source(source, wall_point, wall_normal) -> np.ndarray:
    """Mirror a source across a wall plane: s + 2 <p - s, n> n."""
    s = np.asarray(source, dtype=float).reshape(-1)
    p = np.asarray(wall_point, dtype=float).reshape(-1)
    nrm = np.asarray(wall_normal, dtype=float).reshape(-1)
    if not (s.shape == p.shape == nrm.shape):
        raise ValueError("source, wall point and normal must share a dimension")
    if abs(np.linalg.norm(nrm) - 1.0) > 1e-10:
        raise ValueError("wall normal must have unit length")
    return s + 2.0 * float((p - s) @ nrm) * nrm


def enumerate_image_sources(room: RoomSpec, order: int = 1, dedup_tol: float | None = 1e-9):
    """Image sources of a shoebox room up to the given reflection order.

    Returns a 3 x K array of positions and the tuple of wall index
    sequences that generated them.  Order 1 yields the six single
    reflections; order 2 adds every ordered pair of distinct walls (30
    more) before duplicates within ``dedup_tol`` are pruned.  Pass
    ``dedup_tol=None`` to keep duplicates.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    walls = room.walls()
    sources = []
    seqs = []
    firsts = []
    for wi, wall in enumerate(walls):
        s1 = image_source(room.source, wall.point, wall.normal)
        firsts.append(s1)
        sources.append(s1)
        seqs.append((wi,))
    if order == 2:
        for wi in range(6):
            for wj in range(6):
                if wi == wj:
                    continue
                wall = walls[wj]
                sources.append(image_source(firsts[wi], wall.point, wall.normal))
                seqs.append((wi, wj))
    if dedup_tol is not None:
        kept_pos = []
        kept_seq = []
        for pos, seq in zip(sources, seqs):
            if any(np.linalg.norm(pos - q) <= dedup_tol for q in kept_pos):
                continue
            kept_pos.append(pos)
            kept_seq.append(seq)
        sources, seqs = kept_pos, kept_seq
    return np.array(sources).T, tuple(seqs)


def simulate_echoes(
    room: RoomSpec,
    order: int = 1,
    jitter: float = 0.0,
    decoys: int = 0,
    seed=None,
    speed: float = SPEED_OF_SOUND,
) -> EchoSimulation:
    """Arrival times of the image sources at every microphone.

    Optionally perturbs each true arrival by uniform noise in
    [-jitter, +jitter] seconds and plants ``decoys`` spurious arrivals per
    microphone, drawn uniformly over that microphone's time range.  Arrays
    come back sorted with the hidden labels kept aligned.
    """
    if jitter < 0 or decoys < 0:
        raise ValueError("jitter and decoys must be nonnegative")
    positions, seqs = enumerate_image_sources(room, order)
    rng = np.random.default_rng(seed)
    per_mic_times = []
    per_mic_labels = []
    K = positions.shape[1]
    for i in range(room.microphones.shape[1]):
        mic = room.microphones[:, i]
        times = np.linalg.norm(positions - mic[:, None], axis=0) / speed
        if jitter > 0:
            times = times + rng.uniform(-jitter, jitter, size=K)
        labels = np.arange(K)
        if decoys > 0:
            lo, hi = float(times.min()), float(times.max())
            fake = rng.uniform(lo, hi, size=decoys)
            times = np.concatenate([times, fake])
            labels = np.concatenate([labels, np.full(decoys, -1)])
        order_idx = np.argsort(times, kind="stable")
        per_mic_times.append(times[order_idx])
        per_mic_labels.append(labels[order_idx])
    return EchoSimulation(
        echoes=EchoSet(tuple(per_mic_times), speed),
        labels=tuple(per_mic_labels),
        image_sources=positions,
        wall_sequences=seqs,
    )


# ---------------------------------------------------------------------------
# scoring candidate echo combinations


def _batched_argmin_quartic(a4: float, a3, a2, a1):
    # global minimizers of a4 x^4 + a3 x^3 + a2 x^2 + a1 x, vectorized;
    # a4 is a shared positive scalar, the rest are arrays
    c3 = 4.0 * a4
    c2 = 3.0 * a3
    c1 = 2.0 * a2
    c0 = a1
    b = c2 / c3
    c = c1 / c3
    d0 = c0 / c3
    shift = b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d0
    disc = 0.25 * q * q + p * p * p / 27.0
    positive = disc > 0.0
    root = np.sqrt(np.maximum(disc, 0.0))
    single = np.cbrt(-0.5 * q + root) + np.cbrt(-0.5 * q - root) - shift
    p_neg = np.minimum(p, -1e-300)
    rho = np.maximum(np.sqrt(-(p_neg ** 3) / 27.0), 1e-300)
    theta = np.arccos(np.clip(-0.5 * q / rho, -1.0, 1.0))
    amp = 2.0 * np.sqrt(-p_neg / 3.0)
    two_pi = 2.0 * math.pi
    cands = np.stack(
        [
            np.where(positive, single, amp * np.cos((theta - two_pi * j) / 3.0) - shift)
            for j in range(3)
        ]
    )
    for _ in range(2):
        fx = ((c3 * cands + c2) * cands + c1) * cands + c0
        dfx = (3.0 * c3 * cands + 2.0 * c2) * cands + c1
        safe = np.where(np.abs(dfx) > 1e-300, dfx, np.inf)
        cands = cands - fx / safe
    cands = np.sort(cands, axis=0)
    g = (((a4 * cands + a3) * cands + a2) * cands + a1) * cands
    best = g.min(axis=0)
    slack = 1e-12 * np.maximum(1.0, np.abs(best))
    pick = np.argmax(g <= best + slack, axis=0)
    return np.take_along_axis(cands, pick[None], axis=0)[0]


def _batched_stress(X: np.ndarray, Daug: np.ndarray) -> np.ndarray:
    sqn = np.einsum("cdn,cdn->cn", X, X)
    E = sqn[:, None, :] + sqn[:, :, None] - 2.0 * np.matmul(X.transpose(0, 2, 1), X)
    diff = E - Daug
    np.einsum("cii->ci", diff)[...] = 0.0
    return 0.5 * np.einsum("cij,cij->c", diff, diff)


def _batched_augmented_scores(
    D: np.ndarray, dvecs: np.ndarray, dim: int, max_sweeps: int = 50, tol: float = 1e-9
) -> np.ndarray:
    """Best s-stress for each candidate augmentation, all run in lockstep.

    Same algorithm as the generic coordinate descent (classical MDS warm
    start, exact quartic updates), restated over a batch axis so that
    scoring hundreds of echo combinations costs a handful of vectorized
    sweeps instead of hundreds of separate solves.
    """
    n = D.shape[0]
    C = dvecs.shape[0]
    if n == 0:
        return np.zeros(C)
    n1 = n + 1
    d_eff = min(dim, n1 - 1)
    Daug = np.zeros((C, n1, n1))
    Daug[:, :n, :n] = D
    Daug[:, n, :n] = dvecs
    Daug[:, :n, n] = dvecs

    J = np.eye(n1) - np.full((n1, n1), 1.0 / n1)
    G = -0.5 * np.matmul(np.matmul(J, Daug), J)
    G = 0.5 * (G + G.transpose(0, 2, 1))
    w, U = np.linalg.eigh(G)
    idx = np.argsort(-np.abs(w), axis=1, kind="stable")[:, :d_eff]
    lam = np.clip(np.take_along_axis(w, idx, axis=1), 0.0, None)
    vecs = np.take_along_axis(U, idx[:, None, :], axis=2)
    X = (np.sqrt(lam)[:, None, :] * vecs).transpose(0, 2, 1).copy()

    others = [np.delete(np.arange(n1), i) for i in range(n1)]
    count = float(n1 - 1)
    prev = _batched_stress(X, Daug)
    for _ in range(max_sweeps):
        for i in range(n1):
            nb = others[i]
            P = X[:, :, nb]
            xi = X[:, :, i]
            diffs = xi[:, :, None] - P
            sq = diffs * diffs
            tot = sq.sum(axis=1)
            drow = Daug[:, i, nb]
            for k in range(d_eff):
                bk = P[:, k, :]
                e = tot - sq[:, k, :] - drow
                mm = bk * bk + e
                a3 = -4.0 * bk.sum(axis=1)
                a2 = (4.0 * bk * bk + 2.0 * mm).sum(axis=1)
                a1 = -4.0 * (bk * mm).sum(axis=1)
                xk = _batched_argmin_quartic(count, a3, a2, a1)
                nd = xk[:, None] - bk
                nd *= nd
                tot += nd - sq[:, k, :]
                sq[:, k, :] = nd
                X[:, k, i] = xk
        cur = _batched_stress(X, Daug)
        done = prev - cur <= tol * np.maximum(prev, 1e-300)
        prev = cur
        if np.all(done):
            break
    return prev


def sstress_augmented(
    D, squared_distances, dim: int = 3, max_sweeps: int = 50, tol: float = 1e-9
) -> float:
    """Smallest s-stress achievable after appending one extra point with the
    given squared distances to an EDM.

    Warm starts from classical MDS of the augmented matrix and runs at most
    ``max_sweeps`` coordinate-descent sweeps.  Consistent distances score
    near zero; an impossible column cannot be embedded and keeps a large
    residual.  An empty base matrix scores zero.
    """
    Dv = as_distance_matrix(D).entries if np.size(D) else np.zeros((0, 0))
    dvec = np.asarray(squared_distances, dtype=float).reshape(-1)
    if Dv.shape[0] != dvec.size:
        raise ValueError("squared_distances length must match the matrix size")
    if dvec.size == 0:
        return 0.0
    if np.any(dvec < 0):
        raise ValueError("squared distances must be nonnegative")
    scores = _batched_augmented_scores(Dv, dvec[None, :], dim, max_sweeps, tol)
    return float(scores[0])


def echo_sort(
    mics,
    t1: float,
    candidate_times,
    speed: float = SPEED_OF_SOUND,
    window: float | None = None,
    max_sweeps: int = 50,
) -> EchoSortResult:
    """Find the one echo per microphone that matches the anchor echo t1.

    ``candidate_times`` holds the arrival-time candidates of microphones
    2..m (the anchor time belongs to microphone 1).  Candidates further
    than ``window`` seconds from t1 are discarded up front; two echoes of
    the same source can never differ by more than the array diameter over
    the speed of sound, which is the default window.  Every surviving
    combination is scored by :func:`sstress_augmented` on the microphone
    EDM augmented with the squared distances ``(speed * time)^2``, and the
    best (ties broken toward the earlier combination in candidate order)
    is returned together with its score and the number of combinations
    evaluated.
    """
    M = as_point_set(mics)
    m = M.n
    if len(candidate_times) != m - 1:
        raise ValueError(f"expected candidate lists for {m - 1} microphones")
    D = assemble_edm(M).entries
    if window is None:
        window = math.sqrt(float(D.max(initial=0.0))) / speed
    windowed = []
    for j, times in enumerate(candidate_times):
        arr = np.asarray(times, dtype=float).reshape(-1)
        kept = arr[np.abs(arr - t1) <= window]
        if kept.size == 0:
            raise ValueError(f"no candidate within the window for microphone {j + 2}")
        windowed.append(kept)
    combos = list(itertools.product(*windowed))
    n_evaluated = len(combos)
    times = np.empty((n_evaluated, m))
    times[:, 0] = t1
    times[:, 1:] = np.array(combos)
    dvecs = (speed * times) ** 2
    scores = _batched_augmented_scores(D, dvecs, M.d, max_sweeps=max_sweeps)
    best = int(np.argmin(scores))
    return EchoSortResult(
        times=tuple(times[best]),
        squared_distances=dvecs[best],
        score=float(scores[best]),
        n_evaluated=n_evaluated,
    )


def locate_image_source(mics, squared_distances) -> np.ndarray:
    """Position of the point whose squared distances to the microphones are
    given, expressed in the microphones' own frame.

    Embeds the augmented EDM by classical MDS and Procrustes-aligns the
    microphone part onto the known array.  A distance of zero would mean
    the point sits on a microphone, which is rejected.
    """
    M = as_point_set(mics)
    dvec = np.asarray(squared_distances, dtype=float).reshape(-1)
    if dvec.size != M.n:
        raise ValueError("need one squared distance per microphone")
    if np.min(dvec) <= 0.0:
        raise ValueError("degenerate distances: the point coincides with a microphone")
    m = M.n
    Daug = np.zeros((m + 1, m + 1))
    Daug[:m, :m] = assemble_edm(M).entries
    Daug[m, :m] = dvec
    Daug[:m, m] = dvec
    X = classical_mds(DistanceMatrix(Daug), M.d).coords
    transform = procrustes(X[:, :m], M)
    return transform.apply(PointSet(X)).coords[:, m]


def reconstruct_walls(image_sources, loudspeaker) -> list:
    """Wall planes from first-order image sources: each wall passes through
    the midpoint of source and image and is normal to their difference."""
    s = np.asarray(loudspeaker, dtype=float).reshape(-1)
    arr = np.asarray(image_sources, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.shape[0] != s.size:
        arr = arr.T
    walls = []
    for j in range(arr.shape[1]):
        img = arr[:, j]
        diff = img - s
        dist = np.linalg.norm(diff)
        if dist <= 1e-12:
            raise ValueError("image source coincides with the loudspeaker")
        walls.append(WallPlane(0.5 * (s + img), diff / dist))
    return walls


def sort_all_echoes(
    mics,
    echoes: EchoSet,
    window: float | None = None,
    accept_tau: float = 1e-3,
    max_sweeps: int = 50,
) -> list:
    """Greedy full-room echo sorting.

    Walks the first microphone's arrivals in ascending order, runs
    :func:`echo_sort` for each anchor against the still unassigned times of
    the other microphones, and accepts a combination when its score is
    below ``accept_tau`` times the Frobenius norm of the augmented matrix.
    Accepted echoes are removed from the pools before the next anchor, so
    each arrival explains at most one image source.  Returns the accepted
    assignments with their located image sources.
    """
    M = as_point_set(mics)
    m = M.n
    if echoes.n_microphones != m:
        raise ValueError("echo set does not match the number of microphones")
    D = assemble_edm(M).entries
    d_norm_sq = float(np.sum(D * D))
    available = [np.ones(t.size, dtype=bool) for t in echoes.arrival_times]
    assignments = []
    for a_idx, t1 in enumerate(echoes.arrival_times[0]):
        if not available[0][a_idx]:
            continue
        pools = []
        ok = True
        for j in range(1, m):
            times = echoes.arrival_times[j][available[j]]
            if times.size == 0:
                ok = False
                break
            pools.append(times)
        if not ok:
            break
        try:
            res = echo_sort(
                M, float(t1), pools, speed=echoes.speed, window=window, max_sweeps=max_sweeps
            )
        except ValueError:
            continue  # nothing inside the window for some microphone
        d = res.squared_distances
        threshold = accept_tau * math.sqrt(d_norm_sq + 2.0 * float(d @ d))
        if res.score >= threshold:
            continue
        try:
            position = locate_image_source(M, d)
        except ValueError:
            continue
        assignments.append(
            EchoAssignment(
                anchor_time=float(t1),
                times=res.times,
                squared_distances=d,
                score=res.score,
                threshold=threshold,
                image_source=position,
            )
        )
        available[0][a_idx] = False
        for j in range(1, m):
            pool_times = echoes.arrival_times[j]
            hit = np.flatnonzero(available[j] & (pool_times == res.times[j]))
            if hit.size:
                available[j][hit[0]] = False
    return assignments


# ---------------------------------------------------------------------------
# turnpike


@dataclass(frozen=True)
class DistanceMultiset:
    """Unlabeled multiset of pairwise distances (plain, not squared).

    The count must be a triangular number n(n-1)/2; that n is the number
    of points the multiset came from.
    """

    values: np.ndarray

    def __post_init__(self):
        arr = np.sort(np.asarray(self.values, dtype=float).reshape(-1))
        if arr.size and arr[0] <= 0.0:
            raise ValueError("distances must be positive")
        n = int(round(0.5 * (1.0 + math.sqrt(1.0 + 8.0 * arr.size))))
        if n * (n - 1) // 2 != arr.size:
            raise ValueError(f"{arr.size} distances is not a full set of pairs")
        object.__setattr__(self, "values", arr.copy())

    @property
    def n(self) -> int:
        return int(round(0.5 * (1.0 + math.sqrt(1.0 + 8.0 * self.values.size))))


class _FloatMultiset:
    """Sorted multiset of floats with tolerance-aware removal."""

    def __init__(self, values, tol: float):
        self.items = sorted(values)
        self.tol = tol

    def __len__(self):
        return len(self.items)

    def max(self):
        return self.items[-1]

    def take(self, target: float):
        """Remove and return the value closest to target within tolerance,
        or None."""
        pos = bisect.bisect_left(self.items, target)
        best = None
        for cand in (pos - 1, pos):
            if 0 <= cand < len(self.items):
                gap = abs(self.items[cand] - target)
                if gap <= self.tol and (best is None or gap < best[1]):
                    best = (cand, gap)
        if best is None:
            return None
        return self.items.pop(best[0])

    def put(self, value: float):
        bisect.insort(self.items, value)


def turnpike_recover(distances, n_max: int = 12, match_tol: float | None = None) -> list:
    """All 1-d point sets consistent with an unlabeled distance multiset.

    Fixes the first point at 0 and the farthest at the largest distance,
    then repeatedly assigns the largest remaining distance: it must be
    realized from one of the two extremes, so each step has at most two
    candidate coordinates.  A candidate survives only if every distance it
    creates to the already placed points is still available in the
    multiset, which is exactly the condition for the augmented
    squared-distance matrix to stay a valid line EDM (rank at most 3).
    Solutions are canonicalized (translated to start at 0, reflection
    resolved lexicographically, sorted) and deduplicated; an inconsistent
    multiset yields an empty list.  ``n_max`` guards the exponential
    worst case.
    """
    if isinstance(distances, DistanceMultiset):
        mset = distances
    else:
        mset = DistanceMultiset(np.asarray(distances, dtype=float).reshape(-1))
    n = mset.n
    if n > n_max:
        raise ValueError(f"{n} points exceeds n_max={n_max}")
    if n <= 1:
        return [PointSet(np.zeros((1, 1)))]
    values = mset.values
    tol = match_tol if match_tol is not None else 1e-9 * max(1.0, float(values[-1]))
    span = float(values[-1])
    pool = _FloatMultiset(values[:-1], tol)
    placed = [0.0, span]
    solutions: list[tuple] = []

    def canonical(points):
        pts = sorted(points)
        lo = pts[0]
        fwd = tuple(p - lo for p in pts)
        rev = tuple(sorted(pts[-1] - p for p in pts))
        for a, b in zip(fwd, rev):
            if a < b - tol:
                return fwd
            if b < a - tol:
                return rev
        return fwd

    def record(points):
        cand = canonical(points)
        for known in solutions:
            if max(abs(a - b) for a, b in zip(cand, known)) <= 10.0 * tol:
                return
        solutions.append(cand)

    def place():
        if len(pool) == 0:
            record(placed)
            return
        largest = pool.max()
        candidates = [largest, span - largest]
        if abs(candidates[0] - candidates[1]) <= tol:
            candidates = candidates[:1]
        for coord in candidates:
            taken = []
            feasible = True
            for p in placed:
                got = pool.take(abs(coord - p))
                if got is None:
                    feasible = False
                    break
                taken.append(got)
            if feasible:
                placed.append(coord)
                place()
                placed.pop()
            for value in taken:
                pool.put(value)

    place()
    solutions.sort()
    return [PointSet(np.array([sol])) for sol in solutions]
