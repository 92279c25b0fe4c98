"""Derivative-free search for high-quality measurement quorums.

A quorum is flattened to 75 reals (five measurements times 15 gate
parameters).  Local refinement uses Powell's direction-set method; global
exploration uses simulated annealing with Gaussian proposals and geometric
cooling followed by a Powell polish.  Multistart runs draw starting points
that are mutually diverse under a binned Jaccard distance on the projector
dot-product multisets.  The objective is -ln Q_N, which has the same argmax
as Q_N and avoids underflow for small volumes.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize as spopt

from .core import traceless_part
from .gates import (
    HEISENBERG,
    CanonicalParams,
    HeisenbergTimes,
    MeasurementParams,
    QuorumParams,
    SingleQubitParams,
    entangling_time,
    measurement_unitary,
    standard_mub_params,
)
from .noise import NoiseModel
from .quality import quality_report

logger = logging.getLogger(__name__)

_QN_FLOOR = 1e-300

STRATEGIES = ("mub-seeded", "multistart", "annealing")


@dataclass(frozen=True)
class SaSchedule:
    t0: float = 1.0
    cooling: float = 0.95
    steps_per_temp: int = 100

    def __post_init__(self):
        if not 0.0 < self.cooling < 1.0:
            raise ValueError("cooling factor must lie in (0, 1)")
        if self.t0 <= 0 or self.steps_per_temp < 1:
            raise ValueError("invalid annealing schedule")


@dataclass(frozen=True)
class OptimizerOptions:
    max_iters: int = 200
    f_tol: float = 1e-10
    x_tol: float = 1e-8
    sa_schedule: SaSchedule = field(default_factory=SaSchedule)
    proposal_std: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.f_tol <= 0 or self.x_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class OptimizationResult:
    params: QuorumParams
    q_noisy: float
    q_geometric: float
    entangling_time_total: float
    trajectory: tuple[tuple[int, float], ...]
    start_label: str

    def to_dict(self) -> dict:
        return {
            "start_label": self.start_label,
            "q_noisy": self.q_noisy,
            "q_geometric": self.q_geometric,
            "entangling_time_total": self.entangling_time_total,
            "trajectory": [[int(i), float(f)] for i, f in self.trajectory],
            "params": self.params.to_dict(),
        }


# ---------------------------------------------------------------------------
# generic minimizers
# ---------------------------------------------------------------------------

class ObjectiveError(RuntimeError):
    """Non-finite objective value encountered during a search."""


def _finite_wrapper(f):
    def wrapped(x):
        val = float(f(np.asarray(x, dtype=float)))
        if not np.isfinite(val):
            raise ObjectiveError(f"objective returned {val} at x={np.asarray(x).tolist()}")
        return val

    return wrapped


def powell_minimize(f, x0, opts: OptimizerOptions | None = None):
    """Powell direction-set minimization with Brent line searches.

    Returns (x_min, f_min, trajectory) where trajectory lists the objective
    after each outer iteration.  Raises :class:`ObjectiveError` if the
    objective ever evaluates non-finite.
    """
    opts = opts or OptimizerOptions()
    fw = _finite_wrapper(f)
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    fw(x0)  # fail fast if the start is bad
    trajectory = []

    def callback(xk):
        trajectory.append((len(trajectory), fw(xk)))

    res = spopt.minimize(
        fw,
        x0,
        method="Powell",
        callback=callback,
        options={
            "xtol": opts.x_tol,
            "ftol": opts.f_tol,
            "maxiter": opts.max_iters,
            "maxfev": 10_000 * max(1, x0.size),
        },
    )
    return np.atleast_1d(res.x), float(res.fun), trajectory


def simulated_annealing(f, x0, opts: OptimizerOptions, rng: np.random.Generator):
    """Metropolis search with Gaussian proposals, geometric cooling, Powell polish.

    ``opts.max_iters`` counts temperature ladders; each ladder performs
    ``steps_per_temp`` proposals at temperature t0 * cooling^ladder.
    """
    fw = _finite_wrapper(f)
    x = np.atleast_1d(np.asarray(x0, dtype=float)).copy()
    fx = fw(x)
    best, fbest = x.copy(), fx
    sched = opts.sa_schedule
    t = sched.t0
    trajectory = [(0, fbest)]
    for ladder in range(opts.max_iters):
        for _ in range(sched.steps_per_temp):
            cand = x + rng.normal(0.0, opts.proposal_std, size=x.size)
            fc = fw(cand)
            if fc < fx or rng.random() < np.exp(-(fc - fx) / t):
                x, fx = cand, fc
                if fx < fbest:
                    best, fbest = x.copy(), fx
        t *= sched.cooling
        trajectory.append((ladder + 1, fbest))
    xp, fp, _ = powell_minimize(fw, best, opts)
    if fp < fbest:
        best, fbest = xp, fp
    trajectory.append((opts.max_iters + 1, fbest))
    return best, fbest, trajectory


# ---------------------------------------------------------------------------
# quorum <-> parameter vector
# ---------------------------------------------------------------------------

def _reflect_unit(x: float) -> float:
    """Triangle wave mapping the real line onto [0, 2] with period 4."""
    return 2.0 - abs(2.0 - (x % 4.0))


def vector_to_quorum(x: np.ndarray, interaction: str) -> QuorumParams:
    """Unpack 75 reals; Heisenberg entangler slots are reflected into [0, 2)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (75,):
        raise ValueError(f"expected 75 parameters, got shape {x.shape}")
    ms = []
    for j in range(5):
        chunk = x[15 * j : 15 * (j + 1)]
        ent_raw = chunk[6:9]
        if interaction == HEISENBERG:
            ent = HeisenbergTimes(*(_reflect_unit(v) for v in ent_raw))
        else:
            ent = CanonicalParams(*ent_raw)
        ms.append(
            MeasurementParams(
                pre1=SingleQubitParams(*chunk[0:3]),
                pre2=SingleQubitParams(*chunk[3:6]),
                entangler=ent,
                post1=SingleQubitParams(*chunk[9:12]),
                post2=SingleQubitParams(*chunk[12:15]),
            )
        )
    return QuorumParams(measurements=tuple(ms))


def quorum_to_vector(q: QuorumParams) -> np.ndarray:
    out = np.empty(75)
    for j, m in enumerate(q.measurements):
        out[15 * j : 15 * j + 3] = m.pre1.as_tuple()
        out[15 * j + 3 : 15 * j + 6] = m.pre2.as_tuple()
        out[15 * j + 6 : 15 * j + 9] = m.entangler.as_tuple()
        out[15 * j + 9 : 15 * j + 12] = m.post1.as_tuple()
        out[15 * j + 12 : 15 * j + 15] = m.post2.as_tuple()
    return out


def random_quorum(interaction: str, rng: np.random.Generator) -> QuorumParams:
    """Uniform angles; Heisenberg pulses in [0, 2), Ising couplings in [-pi/2, pi/2)."""
    x = rng.uniform(0.0, 2.0 * np.pi, size=75)
    for j in range(5):
        if interaction == HEISENBERG:
            x[15 * j + 6 : 15 * j + 9] = rng.uniform(0.0, 2.0, size=3)
        else:
            x[15 * j + 6 : 15 * j + 9] = rng.uniform(-np.pi / 2, np.pi / 2, size=3)
    return vector_to_quorum(x, interaction)


# ---------------------------------------------------------------------------
# Jaccard diversity
# ---------------------------------------------------------------------------

_BIN_WIDTH = 0.05
_BIN_EDGES = np.arange(-0.25, 0.75 + _BIN_WIDTH / 2, _BIN_WIDTH)
_N_BINS = len(_BIN_EDGES) - 1  # 20 bins over [-1/4, 3/4]


def _projector_histograms(q: QuorumParams) -> np.ndarray:
    """Per-projector histogram of its dot products with the other 19 projectors."""
    vecs = []
    for m in q.measurements:
        u = measurement_unitary(m)
        for k in range(4):
            vecs.append(traceless_part(np.outer(u[k, :].conj(), u[k, :])))
    v = np.array(vecs)
    dots = v @ v.T
    hists = np.empty((20, _N_BINS), dtype=np.int64)
    idx = np.clip(((dots + 0.25) / _BIN_WIDTH).astype(int), 0, _N_BINS - 1)
    for i in range(20):
        others = np.delete(idx[i], i)
        hists[i] = np.bincount(others, minlength=_N_BINS)
    return hists


def _jaccard_matrix(ha: np.ndarray, hb: np.ndarray) -> np.ndarray:
    inter = np.minimum(ha[:, None, :], hb[None, :, :]).sum(axis=2)
    union = np.maximum(ha[:, None, :], hb[None, :, :]).sum(axis=2)
    return 1.0 - inter / union


def quorum_distance(a: QuorumParams, b: QuorumParams) -> float:
    """Symmetrized mean of per-projector minimal Jaccard distances in [0, 1]."""
    d = _jaccard_matrix(_projector_histograms(a), _projector_histograms(b))
    return float((d.min(axis=1).mean() + d.min(axis=0).mean()) / 2.0)


def diversity_threshold(
    interaction: str, rng: np.random.Generator, n_pairs: int = 10_000
) -> float:
    """Mean minus one standard deviation of the distance between random quorums."""
    samples = np.empty(n_pairs)
    for i in range(n_pairs):
        samples[i] = quorum_distance(
            random_quorum(interaction, rng), random_quorum(interaction, rng)
        )
    return float(samples.mean() - samples.std())


def diverse_starts(
    n: int,
    noise: NoiseModel,
    rng: np.random.Generator,
    threshold_pairs: int = 10_000,
) -> list[QuorumParams]:
    """Rejection-sample n quorums that are pairwise at least a threshold apart.

    The threshold is estimated once per call from ``threshold_pairs`` random
    pairs; if 100 n consecutive candidates fail, it is relaxed by 10% and the
    relaxation is logged.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    threshold = diversity_threshold(noise.interaction, rng, threshold_pairs)
    accepted: list[QuorumParams] = []
    hists: list[np.ndarray] = []
    rejections = 0
    while len(accepted) < n:
        cand = random_quorum(noise.interaction, rng)
        hc = _projector_histograms(cand)
        ok = True
        for h in hists:
            d = _jaccard_matrix(hc, h)
            if (d.min(axis=1).mean() + d.min(axis=0).mean()) / 2.0 < threshold:
                ok = False
                break
        if ok:
            accepted.append(cand)
            hists.append(hc)
            rejections = 0
        else:
            rejections += 1
            if rejections > 100 * n:
                threshold *= 0.9
                rejections = 0
                logger.warning(
                    "diversity threshold unreachable, relaxing to %.4f", threshold
                )
    return accepted


# ---------------------------------------------------------------------------
# quorum optimization
# ---------------------------------------------------------------------------

def _neg_log_qn(x: np.ndarray, noise: NoiseModel) -> float:
    qp = vector_to_quorum(x, noise.interaction)
    qn = quality_report(qp, noise).q_noisy
    return -float(np.log(max(qn, _QN_FLOOR)))


def _finish(x: np.ndarray, noise: NoiseModel, trajectory, label: str) -> OptimizationResult:
    qp = vector_to_quorum(x, noise.interaction)
    rep = quality_report(qp, noise)
    total = float(sum(entangling_time(m) for m in qp.measurements))
    return OptimizationResult(
        params=qp,
        q_noisy=rep.q_noisy,
        q_geometric=rep.q_geometric,
        entangling_time_total=total,
        trajectory=tuple((int(i), float(f)) for i, f in trajectory),
        start_label=label,
    )


def _run_powell_start(args) -> OptimizationResult:
    noise, x0, opts, label = args
    x, _, traj = powell_minimize(lambda v: _neg_log_qn(v, noise), x0, opts)
    return _finish(x, noise, traj, label)


def _run_annealing(args) -> OptimizationResult:
    noise, x0, opts, seed, label = args
    rng = np.random.default_rng(seed)
    x, _, traj = simulated_annealing(
        lambda v: _neg_log_qn(v, noise), x0, opts, rng
    )
    return _finish(x, noise, traj, label)


def optimize_quorum(
    noise: NoiseModel,
    strategy: str = "mub-seeded",
    n_starts: int = 1,
    opts: OptimizerOptions | None = None,
    threads: int = 1,
    threshold_pairs: int = 10_000,
) -> list[OptimizationResult]:
    """Maximize Q_N over the 75-parameter quorum space.

    ``mub-seeded`` refines the standard MUB quorum with Powell's method;
    ``multistart`` refines ``n_starts`` diversity-filtered random starts;
    ``annealing`` runs ``n_starts`` seeded annealing chains.  Results are
    sorted by decreasing Q_N.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    opts = opts or OptimizerOptions()
    jobs = []
    if strategy == "mub-seeded":
        x0 = quorum_to_vector(standard_mub_params(noise.interaction))
        jobs = [(noise, x0, opts, "mub")]
        runner = _run_powell_start
    elif strategy == "multistart":
        rng = np.random.default_rng(opts.seed)
        starts = diverse_starts(n_starts, noise, rng, threshold_pairs)
        jobs = [
            (noise, quorum_to_vector(s), opts, f"multistart-{i}")
            for i, s in enumerate(starts)
        ]
        runner = _run_powell_start
    else:
        seeds = np.random.SeedSequence(opts.seed).spawn(n_starts)
        rng = np.random.default_rng(opts.seed)
        jobs = [
            (noise, quorum_to_vector(random_quorum(noise.interaction, rng)), opts,
             seeds[i], f"annealing-{i}")
            for i in range(n_starts)
        ]
        runner = _run_annealing

    failures = []
    results: list[OptimizationResult] = []
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(runner, jobs))
    else:
        for job in jobs:
            try:
                results.append(runner(job))
            except ObjectiveError as exc:
                failures.append(f"{job[-1]}: {exc}")
    if not results:
        raise RuntimeError("all optimization starts failed: " + "; ".join(failures))
    results.sort(key=lambda r: r.q_noisy, reverse=True)
    return results


def results_to_csv(results: list[OptimizationResult], strategy: str, seed: int) -> str:
    """Flat CSV, one row per result."""
    lines = [
        "strategy,seed,start_label,q_geometric,q_noisy,entangling_time_total,"
        "t_1,t_2,t_3,t_4,t_5"
    ]
    for r in results:
        times = [entangling_time(m) for m in r.params.measurements]
        fields = [strategy, str(seed), r.start_label]
        fields += [f"{v:.12g}" for v in (r.q_geometric, r.q_noisy, r.entangling_time_total)]
        fields += [f"{t:.12g}" for t in times]
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


def results_to_json(results: list[OptimizationResult], strategy: str, seed: int) -> str:
    doc = {
        "strategy": strategy,
        "seed": seed,
        "results": [r.to_dict() for r in results],
    }
    return json.dumps(doc, sort_keys=True)
