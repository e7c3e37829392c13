"""Monte Carlo comparison harness for the completion methods.

Two scenarios:

* ``random-deletion``: points drawn uniformly in the unit cube, a given
  number of distance pairs deleted uniformly at random, optionally uniform
  jitter on the surviving squared distances.
* ``mdu``: microphones and sources drawn uniformly in the unit cube, all
  microphone-microphone and source-source distances missing (the
  unfolding block mask).

A trial counts as a success when the completed matrix lands within a
relative Frobenius error of the noiseless truth.  Seeding is arranged so
that results are bit-reproducible and so that geometry never depends on
which methods run: the point configuration is seeded by (seed, trial),
the deletion pattern by (seed, trial, setting), the jitter by
(seed, trial, setting, jitter) and the random restarts of the descent
method by all of that plus the method's fixed position in METHODS.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass

import numpy as np

from .core import DistanceMatrix, ObservationMask, assemble_edm
from .completion import METHODS, NoisyObservation, complete_edm
from .embedding import classical_mds
from .unfolding import mdu_mask

SCENARIOS = ("random-deletion", "mdu")
DEFAULT_METHODS = ("rank", "sstress", "sdr")


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything a benchmark run depends on, JSON round-trippable."""

    scenario: str
    n_points: int = 20
    dim: int = 2
    settings: tuple = (20, 60, 100, 140)
    jitters: tuple = (0.0,)
    methods: tuple = DEFAULT_METHODS
    n_trials: int = 100
    seed: int = 0
    success_threshold: float = 0.01
    jitter_on: str = "squared"

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if self.jitter_on not in ("squared", "sqrt"):
            raise ValueError("jitter_on must be 'squared' or 'sqrt'")
        object.__setattr__(self, "settings", tuple(int(s) for s in self.settings))
        object.__setattr__(self, "jitters", tuple(float(j) for j in self.jitters))
        object.__setattr__(self, "methods", tuple(self.methods))
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}")
        if self.n_points < 2 or self.dim < 1 or self.n_trials < 1:
            raise ValueError("n_points, dim and n_trials must be positive")
        if not self.settings or not self.jitters or not self.methods:
            raise ValueError("settings, jitters and methods must be nonempty")
        if any(j < 0 for j in self.jitters):
            raise ValueError("jitter magnitudes must be nonnegative")
        if self.success_threshold <= 0:
            raise ValueError("success_threshold must be positive")

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    @classmethod
    def from_json(cls, text: str) -> "ExperimentSpec":
        data = json.loads(text)
        return cls(**data)


@dataclass(frozen=True)
class ResultRow:
    method: str
    setting: int
    jitter: float
    success_rate: float
    mean_rel_error: float
    trials: int
    seed: int
    wall_time: float


@dataclass(frozen=True)
class ExperimentResult:
    spec: ExperimentSpec
    rows: tuple


def _jittered(D: np.ndarray, magnitude: float, rng, mode: str = "squared") -> np.ndarray:
    # uniform noise, symmetric, clamped at zero; "squared" perturbs the
    # matrix entries directly, "sqrt" perturbs plain distances and squares back
    if magnitude == 0.0:
        return D
    n = D.shape[0]
    iu = np.triu_indices(n, k=1)
    eps = rng.uniform(-magnitude, magnitude, size=iu[0].size)
    noisy = D.copy()
    if mode == "squared":
        noisy[iu] += eps
    else:
        noisy[iu] = np.clip(np.sqrt(noisy[iu]) + eps, 0.0, None) ** 2
    noisy = np.triu(noisy, k=1)
    noisy = noisy + noisy.T
    return np.clip(noisy, 0.0, None)


def _deletion_mask(n: int, deletions: int, rng) -> ObservationMask:
    n_pairs = n * (n - 1) // 2
    if deletions > n_pairs:
        raise ValueError(f"cannot delete {deletions} of {n_pairs} pairs")
    chosen = rng.choice(n_pairs, size=deletions, replace=False)
    iu = np.triu_indices(n, k=1)
    W = np.ones((n, n)) - np.eye(n)
    W[iu[0][chosen], iu[1][chosen]] = 0.0
    W[iu[1][chosen], iu[0][chosen]] = 0.0
    return ObservationMask(W)


def _geometry(spec: ExperimentSpec, trial: int, setting: int):
    rng = np.random.default_rng([spec.seed, trial])
    if spec.scenario == "random-deletion":
        X = rng.uniform(size=(spec.dim, spec.n_points))
    else:
        mics = rng.uniform(size=(spec.dim, spec.n_points))
        srcs = rng.uniform(size=(spec.dim, setting))
        X = np.hstack([mics, srcs])
    return X


def _observation(spec: ExperimentSpec, trial: int, s_idx: int, j_idx: int):
    setting = spec.settings[s_idx]
    jitter = spec.jitters[j_idx]
    X = _geometry(spec, trial, setting)
    D_true = assemble_edm(X).entries
    if spec.scenario == "random-deletion":
        mask_rng = np.random.default_rng([spec.seed, trial, s_idx])
        mask = _deletion_mask(D_true.shape[0], setting, mask_rng)
    else:
        mask = mdu_mask(spec.n_points, setting)
    jit_rng = np.random.default_rng([spec.seed, trial, s_idx, j_idx])
    D_noisy = _jittered(D_true, jitter, jit_rng, spec.jitter_on)
    obs = NoisyObservation(D_noisy * mask.entries, mask)
    return D_true, obs


def run(spec: ExperimentSpec) -> ExperimentResult:
    """Run the full method x setting x jitter grid of the spec."""
    rows = []
    for method in spec.methods:
        m_pos = METHODS.index(method)
        for s_idx in range(len(spec.settings)):
            for j_idx in range(len(spec.jitters)):
                errors = np.empty(spec.n_trials)
                start = time.perf_counter()
                for trial in range(spec.n_trials):
                    D_true, obs = _observation(spec, trial, s_idx, j_idx)
                    opts = {"init": "random"} if method == "sstress" else {}
                    seed = [spec.seed, trial, s_idx, j_idx, m_pos]
                    result = complete_edm(obs, spec.dim, method=method, seed=seed, **opts)
                    diff = result.edm.entries - D_true
                    errors[trial] = np.linalg.norm(diff) / np.linalg.norm(D_true)
                elapsed = time.perf_counter() - start
                rows.append(
                    ResultRow(
                        method=method,
                        setting=spec.settings[s_idx],
                        jitter=spec.jitters[j_idx],
                        success_rate=float(np.mean(errors < spec.success_threshold)),
                        mean_rel_error=float(np.mean(errors)),
                        trials=spec.n_trials,
                        seed=spec.seed,
                        wall_time=elapsed,
                    )
                )
    return ExperimentResult(spec=spec, rows=tuple(rows))


def run_random_deletion(spec: ExperimentSpec) -> ExperimentResult:
    if spec.scenario != "random-deletion":
        raise ValueError("spec is not a random-deletion experiment")
    return run(spec)


def run_mdu(spec: ExperimentSpec) -> ExperimentResult:
    if spec.scenario != "mdu":
        raise ValueError("spec is not an mdu experiment")
    return run(spec)


CSV_COLUMNS = ("method", "setting", "jitter", "success_rate", "mean_rel_error", "trials", "seed")


def emit_csv(result: ExperimentResult) -> str:
    """Deterministic CSV of the result grid.

    Floats are written with repr so that equal runs produce byte-equal
    files; wall-clock timings stay out for the same reason.
    """
    lines = [",".join(CSV_COLUMNS)]
    for row in result.rows:
        lines.append(
            ",".join(
                [
                    row.method,
                    str(row.setting),
                    repr(row.jitter),
                    repr(row.success_rate),
                    repr(row.mean_rel_error),
                    str(row.trials),
                    str(row.seed),
                ]
            )
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# a tiny classic: city positions from train timetables

SWISS_CITIES = ("Lausanne", "Geneva", "Zurich", "Neuchatel", "Bern")

SWISS_TRAIN_MINUTES = np.array(
    [
        [0.0, 33.0, 128.0, 40.0, 66.0],
        [33.0, 0.0, 158.0, 64.0, 101.0],
        [128.0, 158.0, 0.0, 88.0, 56.0],
        [40.0, 64.0, 88.0, 0.0, 34.0],
        [66.0, 101.0, 56.0, 34.0, 0.0],
    ]
)


@dataclass(frozen=True)
class SwissDemo:
    cities: tuple
    minutes: np.ndarray
    coords: np.ndarray
    eigenvalues: np.ndarray
    energy_fraction: float


def swiss_demo() -> SwissDemo:
    """Embed the five cities in the plane from rail travel times.

    Travel minutes are treated as plain distances, so their squares go
    into the matrix.  Times are not Euclidean, which shows up as negative
    eigenvalues of the centered Gram matrix; energy_fraction reports how
    much of the total spectrum mass the two kept eigenvalues carry.
    """
    D = DistanceMatrix(SWISS_TRAIN_MINUTES ** 2)
    points, diag = classical_mds(D, 2, return_diagnostics=True)
    magnitudes = np.abs(diag.eigenvalues)
    energy = float(np.sum(magnitudes[:2]) / np.sum(magnitudes))
    return SwissDemo(
        cities=SWISS_CITIES,
        minutes=SWISS_TRAIN_MINUTES.copy(),
        coords=points.coords,
        eigenvalues=diag.eigenvalues,
        energy_fraction=energy,
    )
