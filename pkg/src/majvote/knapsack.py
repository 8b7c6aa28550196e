"""Time-budgeted ensemble selection.

Choose a subset of the pool maximizing its voting accuracy subject to
``sum(t_i) <= T``. The objective is neither linear nor separable in the
members, so there is no dynamic program or greedy ratio bound; the exact
solver enumerates feasible subsets and the stochastic solver builds
subsets at random, favouring efficient items.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, SizeLimitError
from .montecarlo import check_seed, substreams
from .schemes import Classical, Scheme
from .voting import ClassifierPool, extend_mass, q_multi

EXHAUSTIVE_MAX_N = 25
DEFAULT_MAX_COPIES = 51
TIE_TOL = 1e-12
IMPROVEMENT_WINDOW = 50
# Exponent 1 leaves selection close to uniform because efficiencies bunch near 1.
DEFAULT_WEIGHT_EXPONENT = 4.0


@dataclass(frozen=True)
class Ensemble:
    member_ids: tuple[str, ...] = ()

    def __post_init__(self):
        ids = tuple(self.member_ids)
        if len(set(ids)) != len(ids):
            raise InvalidInputError(f"ensemble ids must be distinct, got {ids}")
        object.__setattr__(self, "member_ids", ids)

    def __len__(self) -> int:
        return len(self.member_ids)


@dataclass(frozen=True)
class FixedRestarts:
    label = "fixed"


@dataclass(frozen=True)
class ImprovementProbability:
    """Stop once fewer than ``eps`` of the last ``window`` restarts improved the incumbent.

    A heuristic stand-in for a probabilistic stopping rule.
    """

    eps: float
    window: int = IMPROVEMENT_WINDOW

    def __post_init__(self):
        if not 0.0 < self.eps <= 1.0:
            raise InvalidInputError(f"improvement threshold must lie in (0, 1], got {self.eps}")
        if self.window < 1:
            raise InvalidInputError(f"window must be >= 1, got {self.window}")

    @property
    def label(self) -> str:
        return f"improve:{self.eps!r}"


@dataclass(frozen=True)
class SolveRequest:
    pool: ClassifierPool
    budget: float
    scheme: Scheme = field(default_factory=Classical)
    restarts: int = 500
    seed: int = 0
    weight_exponent: float = DEFAULT_WEIGHT_EXPONENT
    stop_rule: object = field(default_factory=FixedRestarts)
    max_copies: int = DEFAULT_MAX_COPIES

    def __post_init__(self):
        b = float(self.budget)
        if not (b >= 0.0 and math.isfinite(b)):
            raise InvalidInputError(f"budget must be finite and >= 0, got {self.budget}")
        object.__setattr__(self, "budget", b)
        if int(self.restarts) != self.restarts or self.restarts < 1:
            raise InvalidInputError(f"restarts must be a positive integer, got {self.restarts}")
        if not self.weight_exponent >= 0.0:
            raise InvalidInputError(f"weight exponent must be >= 0, got {self.weight_exponent}")
        if int(self.max_copies) != self.max_copies or self.max_copies < 1:
            raise InvalidInputError(f"max_copies must be a positive integer, got {self.max_copies}")
        check_seed(self.seed)


@dataclass
class SolveReport:
    best: Ensemble
    accuracy: float
    total_time: float
    method: str
    evaluations: int
    budget: float
    scheme: str
    infeasible: bool = False
    trace: list[tuple[int, float]] = field(default_factory=list)
    restarts_run: int | None = None
    stop_rule: str | None = None


def _indices(pool: ClassifierPool, subset) -> list[int]:
    ids = subset.member_ids if isinstance(subset, Ensemble) else tuple(subset)
    if len(set(ids)) != len(ids):
        raise InvalidInputError(f"subset ids must be distinct, got {ids}")
    out = []
    for item_id in ids:
        if item_id not in pool.index:
            raise InvalidInputError(f"unknown classifier id {item_id!r}")
        out.append(pool.index[item_id])
    return sorted(out)


def total_time(pool: ClassifierPool, subset) -> float:
    return math.fsum(pool.members[i].time for i in _indices(pool, subset))


def feasible(pool: ClassifierPool, subset, budget: float) -> bool:
    return total_time(pool, subset) <= budget


def evaluate_subset(pool: ClassifierPool, subset, scheme: Scheme) -> float:
    """Voting accuracy of ``subset`` with a profile sized to the subset."""
    idx = _indices(pool, subset)
    if not idx:
        raise InvalidInputError("cannot evaluate an empty subset")
    return q_multi([pool.members[i].accuracy for i in idx], scheme.profile(len(idx)))


def copy_count(time: float, budget: float, max_copies: int) -> int:
    """How many copies of an item fit in ``budget`` (at least 1, at most ``max_copies``)."""
    if time == 0.0:
        return max_copies
    m = math.floor(budget / time)
    if (m + 1) * time <= budget:
        m += 1
    return max(1, min(max_copies, m))


def _copy_cap(scheme: Scheme, max_copies: int) -> int:
    return min(max_copies, scheme.max_size or max_copies)


def item_efficiency(
    pool: ClassifierPool,
    item_id: str,
    budget: float,
    scheme: Scheme,
    max_copies: int = DEFAULT_MAX_COPIES,
) -> float:
    """Accuracy of an ensemble made of as many copies of one item as fit the budget."""
    item = pool.get(item_id)
    m = copy_count(item.time, float(budget), _copy_cap(scheme, max_copies))
    return q_multi([item.accuracy] * m, scheme.profile(m))


class _Incumbent:
    """Best (accuracy, total time, sorted ids) seen so far."""

    def __init__(self, pool: ClassifierPool):
        self.pool = pool
        self.acc = -math.inf
        self.time = math.inf
        self.idx: tuple[int, ...] | None = None

    def _ids(self, idx) -> list[str]:
        return sorted(self.pool.members[i].id for i in idx)

    def offer(self, acc: float, time: float, idx) -> bool:
        if self.idx is not None:
            if acc < self.acc - TIE_TOL:
                return False
            if acc <= self.acc + TIE_TOL:
                if time > self.time:
                    return False
                if time == self.time and self._ids(idx) >= self._ids(self.idx):
                    return False
        self.acc, self.time, self.idx = acc, time, tuple(sorted(idx))
        return True


def _finish(req: SolveRequest, inc: _Incumbent, method: str, evaluations: int, **extra) -> SolveReport:
    pool = req.pool
    if inc.idx is None:
        return SolveReport(
            best=Ensemble(), accuracy=0.0, total_time=0.0, method=method,
            evaluations=evaluations, budget=req.budget, scheme=req.scheme.label,
            infeasible=True, **extra,
        )
    best = Ensemble(tuple(pool.members[i].id for i in inc.idx))
    return SolveReport(
        best=best,
        accuracy=evaluate_subset(pool, best, req.scheme),
        total_time=total_time(pool, best),
        method=method,
        evaluations=evaluations,
        budget=req.budget,
        scheme=req.scheme.label,
        **extra,
    )


class _ProfileCache:
    def __init__(self, scheme: Scheme):
        self.scheme = scheme
        self._cache: dict[int, np.ndarray] = {}

    def __getitem__(self, n: int) -> np.ndarray:
        coef = self._cache.get(n)
        if coef is None:
            coef = self._cache[n] = self.scheme.profile(n).as_array()
        return coef


def solve_exhaustive(req: SolveRequest) -> SolveReport:
    """Exact optimum by depth-first enumeration of feasible subsets.

    Items are visited in increasing time, so once the next item overflows
    the residual budget no later item can fit and the branch is cut.
    """
    pool = req.pool
    n = len(pool)
    if n > EXHAUSTIVE_MAX_N:
        raise SizeLimitError(f"exhaustive search limited to n <= {EXHAUSTIVE_MAX_N}, got {n}")
    times = [c.time for c in pool]
    accs = [c.accuracy for c in pool]
    order = sorted(range(n), key=lambda i: (times[i], i))
    profiles = _ProfileCache(req.scheme)
    inc = _Incumbent(pool)
    chosen: list[int] = []
    evaluations = 0

    def visit(start: int, mass: np.ndarray):
        nonlocal evaluations
        for j in range(start, n):
            i = order[j]
            t = math.fsum([times[c] for c in chosen] + [times[i]])
            if t > req.budget:
                break
            chosen.append(i)
            nxt = extend_mass(mass, accs[i])
            acc = float(np.dot(profiles[len(chosen)], nxt))
            evaluations += 1
            inc.offer(acc, t, chosen)
            visit(j + 1, nxt)
            chosen.pop()

    visit(0, np.ones(1))
    return _finish(req, inc, "exhaustive", evaluations)


def solve_stochastic(req: SolveRequest) -> SolveReport:
    """Randomized efficiency-weighted construction with restarts.

    Each restart adds feasible items one at a time, picking item ``i``
    with probability proportional to ``efficiency_i ** weight_exponent``,
    where efficiency is scored against the residual budget. Every prefix
    of the construction is a candidate, so the best ensemble need not be
    maximal. Restart ``r`` uses its own seeded substream.
    """
    pool = req.pool
    n = len(pool)
    times = [c.time for c in pool]
    accs = [c.accuracy for c in pool]
    profiles = _ProfileCache(req.scheme)
    cap = _copy_cap(req.scheme, req.max_copies)
    eff_cache: dict[tuple[int, int], float] = {}
    evaluations = 0

    def efficiency(i: int, residual: float) -> float:
        nonlocal evaluations
        m = copy_count(times[i], residual, cap)
        key = (i, m)
        if key not in eff_cache:
            mass = np.ones(1)
            for _ in range(m):
                mass = extend_mass(mass, accs[i])
            eff_cache[key] = float(np.dot(profiles[m], mass))
            evaluations += 1
        return eff_cache[key]

    stop = req.stop_rule
    recent: deque[bool] = deque(maxlen=getattr(stop, "window", 1))
    inc = _Incumbent(pool)
    trace: list[tuple[int, float]] = []
    rngs = substreams(req.seed, int(req.restarts))
    restarts_run = 0
    for r, rng in enumerate(rngs):
        restarts_run += 1
        local = _Incumbent(pool)
        chosen: list[int] = []
        remaining = list(range(n))
        mass = np.ones(1)
        while True:
            chosen_t = [times[c] for c in chosen]
            used = math.fsum(chosen_t)
            cands = [i for i in remaining if math.fsum(chosen_t + [times[i]]) <= req.budget]
            if not cands:
                break
            residual = req.budget - used
            w = np.array([efficiency(i, residual) ** req.weight_exponent for i in cands])
            total = w.sum()
            if not total > 0.0:
                w = np.ones(len(cands))
                total = float(len(cands))
            pick = int(np.searchsorted(np.cumsum(w), rng.random() * total, side="right"))
            i = cands[min(pick, len(cands) - 1)]
            chosen.append(i)
            remaining.remove(i)
            mass = extend_mass(mass, accs[i])
            acc = float(np.dot(profiles[len(chosen)], mass))
            evaluations += 1
            local.offer(acc, math.fsum(chosen_t + [times[i]]), chosen)
        improved = local.idx is not None and inc.offer(local.acc, local.time, local.idx)
        if improved:
            trace.append((r + 1, inc.acc))
        recent.append(improved)
        if (
            isinstance(stop, ImprovementProbability)
            and len(recent) == stop.window
            and sum(recent) / stop.window < stop.eps
        ):
            break
    return _finish(
        req, inc, "stochastic", evaluations,
        trace=trace, restarts_run=restarts_run, stop_rule=stop.label,
    )


def solve(req: SolveRequest, method: str = "exhaustive") -> SolveReport:
    if method == "exhaustive":
        return solve_exhaustive(req)
    if method == "stochastic":
        return solve_stochastic(req)
    raise InvalidInputError(f"unknown method {method!r}; use exhaustive or stochastic")

