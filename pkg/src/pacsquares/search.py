"""Seeded hunt for unions of unit squares with perimeter/area above 4.

Each restart runs simulated annealing over the free squares (the first one is
pinned at the origin with theta = 0) and then polishes its best point with
Nelder-Mead. Restarts draw from independent child seeds, so running them in a
process pool gives the same report as running them one after another.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .bounds import gyenes_bound
from .explore import filter_deficit, optimality_filter, overlap_profile
from .geometry import Configuration, DomainError, GeometryError, UnitSquare, measure

T_START = 0.05
T_END = 1e-5
POLISH_SHARE = 0.1


@dataclass(frozen=True)
class SearchSettings:
    n_squares: int = 3
    oriented: bool = False
    box: float = 2.0
    seed: int = 0
    max_evals: int = 10_000
    restarts: int = 4
    filter_enabled: bool = False
    penalty: float = 10.0
    workers: int = 1

    def __post_init__(self):
        if self.n_squares < 2:
            raise DomainError("n_squares must be >= 2")
        if not self.box > 0:
            raise DomainError("box must be positive")
        if self.max_evals < 1:
            raise DomainError("max_evals must be >= 1")
        if self.restarts < 1:
            raise DomainError("restarts must be >= 1")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")
        if self.penalty < 0:
            raise DomainError("penalty must be >= 0")

    @property
    def dim(self) -> int:
        return (self.n_squares - 1) * (2 if self.oriented else 3)

    def budgets(self) -> list:
        base, extra = divmod(self.max_evals, self.restarts)
        return [base + (1 if i < extra else 0) for i in range(self.restarts)]


@dataclass
class SearchReport:
    best: Configuration
    best_ratio: float
    evals: int
    filter_prunes: int
    history: list
    seed: int
    max_evaluated_ratio: float
    geometry_errors: int = 0
    filter_passes: bool | None = None
    filter_witness: int | None = None
    settings: SearchSettings | None = field(default=None, repr=False)

    @property
    def within_general_bound(self) -> bool:
        return self.max_evaluated_ratio <= gyenes_bound() + 1e-9

    @property
    def counterexample(self) -> bool:
        return self.best_ratio > 4.0 + 1e-9


def decode(vec: np.ndarray, settings: SearchSettings) -> Configuration:
    k = 2 if settings.oriented else 3
    squares = [UnitSquare(0.0, 0.0, 0.0)]
    box = settings.box
    for i in range(settings.n_squares - 1):
        cx = min(box, max(-box, float(vec[k * i])))
        cy = min(box, max(-box, float(vec[k * i + 1])))
        theta = 0.0 if settings.oriented else float(vec[k * i + 2])
        squares.append(UnitSquare(cx, cy, theta))
    return Configuration(tuple(squares), oriented=settings.oriented, label="search")


class _Budget(Exception):
    pass


class _Evaluator:
    """Counts evaluations and keeps the restart-local best and trace."""

    def __init__(self, settings: SearchSettings, budget: int):
        self.settings = settings
        self.budget = budget
        self.evals = 0
        self.prunes = 0
        self.errors = 0
        self.max_ratio = -math.inf
        self.best_score = -math.inf
        self.best_vec = None
        self.best_ratio = None
        self.trace = []

    def __call__(self, vec: np.ndarray) -> float:
        if self.evals >= self.budget:
            raise _Budget
        self.evals += 1
        c = decode(vec, self.settings)
        try:
            p, a = measure(c)
        except GeometryError:
            self.errors += 1
            return -math.inf
        r = p / a
        self.max_ratio = max(self.max_ratio, r)
        score = r
        if self.settings.filter_enabled:
            deficit = filter_deficit(overlap_profile(c))
            if deficit > 0:
                self.prunes += 1
                score = r - self.settings.penalty * deficit
        if score > self.best_score:
            self.best_score = score
            self.best_vec = np.array(vec, dtype=float)
            self.best_ratio = r
            self.trace.append((self.evals, score, r))
        return score


def _initial(rng: np.random.Generator, settings: SearchSettings) -> np.ndarray:
    k = 2 if settings.oriented else 3
    vec = np.empty(settings.dim)
    for i in range(settings.n_squares - 1):
        vec[k * i:k * i + 2] = rng.uniform(-settings.box, settings.box, 2)
        if not settings.oriented:
            vec[k * i + 2] = rng.uniform(0.0, 0.5 * math.pi)
    return vec


def _propose(vec, rng, settings, heat):
    k = 2 if settings.oriented else 3
    out = vec.copy()
    i = int(rng.integers(settings.n_squares - 1))
    step = math.sqrt(heat)
    out[k * i:k * i + 2] += rng.normal(0.0, 0.5 * settings.box * step + 1e-4, 2)
    np.clip(out[k * i:k * i + 2], -settings.box, settings.box, out=out[k * i:k * i + 2])
    if not settings.oriented:
        out[k * i + 2] = (out[k * i + 2] + rng.normal(0.0, 0.25 * math.pi * step + 1e-4)) % (0.5 * math.pi)
    return out


def _chain(ev: _Evaluator, rng: np.random.Generator, budget: int) -> None:
    settings = ev.settings
    stop = ev.evals + budget
    anneal = max(1, budget - int(POLISH_SHARE * budget))
    cur = _initial(rng, settings)
    cur_score = ev(cur)
    best_score = cur_score
    best = cur
    steps = max(1, anneal - 1)
    for k in range(steps):
        heat = (T_END / T_START) ** (k / steps)
        temp = T_START * heat
        cand = _propose(cur, rng, settings, heat)
        score = ev(cand)
        delta = score - cur_score
        if delta >= 0 or rng.random() < math.exp(delta / temp):
            cur, cur_score = cand, score
            if score > best_score:
                best, best_score = cand, score
    left = stop - ev.evals
    if left > 0 and math.isfinite(best_score):
        minimize(lambda v: -ev(v), best, method="Nelder-Mead",
                 options={"maxfev": left, "xatol": 1e-12, "fatol": 1e-14})


def _restart(settings: SearchSettings, seed_seq: np.random.SeedSequence, budget: int) -> _Evaluator:
    """Annealing chains with polish until the restart's budget is spent."""
    rng = np.random.default_rng(seed_seq)
    ev = _Evaluator(settings, budget)
    try:
        while ev.evals < budget:
            _chain(ev, rng, budget - ev.evals)
    except _Budget:
        pass
    return ev


def _run_restart(args):
    return _restart(*args)


def search(settings: SearchSettings) -> SearchReport:
    """Maximise the union ratio; deterministic for a fixed settings.seed."""
    children = np.random.SeedSequence(settings.seed).spawn(settings.restarts)
    jobs = [(settings, child, b) for child, b in zip(children, settings.budgets()) if b > 0]
    if settings.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=settings.workers) as pool:
            results = list(pool.map(_run_restart, jobs))
    else:
        results = [_run_restart(j) for j in jobs]

    # replay restart-local improvements in restart order
    offset = 0
    best = None
    best_score = -math.inf
    best_ratio = math.nan
    history = []
    for ev in results:
        for j, (idx, score, r) in enumerate(ev.trace):
            if score > best_score:
                best_score, best_ratio = score, r
                history.append((offset + idx, r))
                if j == len(ev.trace) - 1:
                    best = ev.best_vec
        offset += ev.evals

    if best is None:
        raise GeometryError("every evaluated configuration failed")
    config = decode(best, settings)
    passes, witness = optimality_filter(config)
    return SearchReport(
        best=config,
        best_ratio=best_ratio,
        evals=sum(ev.evals for ev in results),
        filter_prunes=sum(ev.prunes for ev in results),
        history=history,
        seed=settings.seed,
        max_evaluated_ratio=max(ev.max_ratio for ev in results),
        geometry_errors=sum(ev.errors for ev in results),
        filter_passes=passes,
        filter_witness=witness,
        settings=settings,
    )
