"""Reproducible experiment sweeps.

Three experiment kinds are supported:

* ``TheoremCheck``: sampled mean/variance of ensemble accuracy against the
  expected-accuracy sum, its ``F(mu)`` limit and the variance bound.
* ``PnkCompare``: closed-form ``p_{n,k}(d)`` against simulation under both
  generative models, plus the wrong-class model with ``d + 1`` classes.
* ``SolverBenchmark``: stochastic solver against the exhaustive optimum.

Every random quantity is derived from the spec's seed, so a rerun of the
same spec gives an identical result.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import __version__
from .cdf import parse_cdf
from .errors import InvalidInputError, MajvoteError
from .knapsack import (
    DEFAULT_WEIGHT_EXPONENT,
    FixedRestarts,
    ImprovementProbability,
    SolveRequest,
    solve_exhaustive,
    solve_stochastic,
)
from .montecarlo import CHUNK, MCEstimate, check_seed, chunks, run_split
from .pnk import GenerativeModel, plurality_wins, pnk_closed_form, pnk_monte_carlo
from .schemes import parse_scheme
from .theory import (
    asymptotic_accuracy,
    expected_accuracy,
    sample_ensemble_accuracy,
    variance_bound,
)
from .voting import ClassifierPool

MONOTONE_SLACK = 1e-12


def pool_generate(n: int, accuracy_range, time_range, seed: int) -> ClassifierPool:
    """Pool of ``n`` members with uniform iid accuracies and times."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidInputError(f"pool size must be a positive integer, got {n!r}")
    (alo, ahi), (tlo, thi) = accuracy_range, time_range
    if not 0.0 <= alo <= ahi <= 1.0:
        raise InvalidInputError(f"accuracy range {accuracy_range} must satisfy 0 <= lo <= hi <= 1")
    if not 0.0 <= tlo <= thi:
        raise InvalidInputError(f"time range {time_range} must satisfy 0 <= lo <= hi")
    rng = np.random.default_rng(check_seed(seed))
    n = int(n)
    acc = rng.uniform(alo, ahi, n)
    times = rng.uniform(tlo, thi, n)
    width = len(str(n - 1))
    ids = [f"c{i:0{width}d}" for i in range(n)]
    return ClassifierPool.from_arrays(acc.tolist(), times.tolist(), ids)


def ensemble_vote_simulate(
    pool: ClassifierPool,
    d: int,
    model,
    trials: int,
    seed: int,
    workers: int = 1,
) -> MCEstimate:
    """Plurality-vote accuracy of the pool with ``d`` classes, by simulation.

    Member ``i`` votes for the true class with probability ``p_i``; otherwise
    its vote follows the generative model. Ties at the top are broken
    uniformly.
    """
    if isinstance(d, bool) or int(d) != d or d < 2:
        raise InvalidInputError(f"d must be an integer >= 2, got {d!r}")
    if isinstance(trials, bool) or int(trials) != trials or trials < 1:
        raise InvalidInputError(f"trials must be a positive integer, got {trials!r}")
    model = GenerativeModel.parse(model)
    d = int(d)
    ps = pool.accuracies
    n = len(ps)
    classes = np.arange(d)
    chunk = max(1, (CHUNK * 8) // (n * d))

    def work(rng: np.random.Generator, share: int) -> int:
        wins = 0
        for size in chunks(share, chunk):
            correct = rng.random((size, n)) < ps
            lo = 1 if model is GenerativeModel.RESIDUAL_OVER_WRONG_CLASSES else 0
            other = rng.integers(lo, d, size=(size, n))
            labels = np.where(correct, 0, other)
            counts = (labels[:, :, None] == classes).sum(axis=1)
            wins += int(plurality_wins(counts, rng).sum())
        return wins

    wins = run_split(work, check_seed(seed), int(trials), workers)
    return MCEstimate.from_counts(sum(wins), int(trials))


# -- experiment specs --------------------------------------------------------


@dataclass
class TheoremCheckParams:
    seed: int
    p_distributions: list[str] = field(default_factory=list)
    profile_cdfs: list[str] = field(default_factory=list)
    n: list[int] = field(default_factory=list)
    draws: int = 10_000
    mean_se: float = 4.0
    variance_se: float = 3.0


@dataclass
class PnkCompareParams:
    seed: int
    n: list[int] = field(default_factory=lambda: list(range(1, 8)))
    d: list[int] = field(default_factory=lambda: [3, 4, 5])
    trials: int = 1_000_000


@dataclass
class SolverBenchmarkParams:
    seed: int
    instances: int = 100
    n: int = 15
    accuracy_range: list[float] = field(default_factory=lambda: [0.55, 0.95])
    time_range: list[float] = field(default_factory=lambda: [1.0, 5.0])
    budget_fraction: float = 0.4
    restarts: int = 500
    scheme: str = "classical"
    weight_exponent: float = DEFAULT_WEIGHT_EXPONENT
    stop: str = "fixed"


_PARAMS = {
    "TheoremCheck": TheoremCheckParams,
    "PnkCompare": PnkCompareParams,
    "SolverBenchmark": SolverBenchmarkParams,
}


@dataclass
class ExperimentSpec:
    kind: str
    parameters: Any
    workers: int = 1

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentSpec":
        if not isinstance(doc, dict):
            raise InvalidInputError("experiment spec must be a JSON object")
        unknown = set(doc) - {"kind", "parameters", "workers"}
        if unknown:
            raise InvalidInputError(f"unknown experiment spec field(s): {sorted(unknown)}")
        kind = doc.get("kind")
        if kind not in _PARAMS:
            raise InvalidInputError(f"experiment kind must be one of {sorted(_PARAMS)}, got {kind!r}")
        params_cls = _PARAMS[kind]
        raw = doc.get("parameters", {})
        if not isinstance(raw, dict):
            raise InvalidInputError("experiment parameters must be a JSON object")
        names = {f.name for f in dataclasses.fields(params_cls)}
        unknown = set(raw) - names
        if unknown:
            raise InvalidInputError(f"unknown {kind} parameter(s): {sorted(unknown)}")
        if "seed" not in raw:
            raise InvalidInputError(f"{kind} parameters need an explicit 'seed'")
        check_seed(raw["seed"])
        return cls(kind, params_cls(**raw), int(doc.get("workers", 1)))


@dataclass
class ExperimentResult:
    kind: str
    columns: list[str]
    rows: list[dict]
    summary: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)


def _metadata(spec: ExperimentSpec) -> dict:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    return {
        "seed": spec.parameters.seed,
        "workers": spec.workers,
        "version": __version__,
        "timestamp": int(epoch) if epoch and epoch.isdigit() else None,
    }


def _cell_seed(*key: int) -> int:
    return int(np.random.SeedSequence(list(key)).generate_state(1, np.uint64)[0])


THEOREM_COLUMNS = [
    "p_distribution", "profile_cdf", "n", "mu", "draws",
    "mean", "mean_se", "expected", "asymptote", "expected_gap",
    "variance", "variance_se", "variance_bound",
    "mean_pass", "variance_pass", "pass", "error",
]


def run_theorem_check(spec: ExperimentSpec) -> ExperimentResult:
    p = spec.parameters
    rows = []
    convergence = []
    for gi, p_text in enumerate(p.p_distributions):
        for fi, f_text in enumerate(p.profile_cdfs):
            gaps = []
            for n in p.n:
                row = {"p_distribution": p_text, "profile_cdf": f_text, "n": n, "draws": p.draws}
                try:
                    p_cdf, f_cdf = parse_cdf(p_text), parse_cdf(f_text)
                    mu = float(p_cdf.mean)
                    sample = sample_ensemble_accuracy(
                        p_cdf, n, f_cdf, p.draws, _cell_seed(p.seed, gi, fi, n), spec.workers
                    )
                    expected = expected_accuracy(f_cdf, mu, n)
                    asymptote = asymptotic_accuracy(f_cdf, mu)
                    bound = variance_bound(f_cdf, mu)
                    if sample.stderr_mean == 0.0:
                        mean_pass = abs(sample.mean - expected) <= 1e-10
                    else:
                        mean_pass = abs(sample.mean - expected) <= p.mean_se * sample.stderr_mean
                    var_pass = sample.variance <= bound + p.variance_se * sample.stderr_variance
                    gaps.append(abs(expected - asymptote))
                    row.update(
                        mu=mu, mean=sample.mean, mean_se=sample.stderr_mean,
                        expected=expected, asymptote=asymptote, expected_gap=gaps[-1],
                        variance=sample.variance, variance_se=sample.stderr_variance,
                        variance_bound=bound, mean_pass=mean_pass, variance_pass=var_pass,
                        **{"pass": mean_pass and var_pass}, error=None,
                    )
                except MajvoteError as exc:
                    row.update({"pass": False, "error": str(exc)})
                rows.append(row)
            if gaps:
                nonincreasing = all(b <= a + MONOTONE_SLACK for a, b in zip(gaps, gaps[1:]))
                convergence.append({"p_distribution": p_text, "profile_cdf": f_text, "gap_nonincreasing": nonincreasing})
    passed = sum(bool(r["pass"]) for r in rows)
    summary = {
        "rows": len(rows),
        "passed": passed,
        "pass_rate": passed / len(rows) if rows else None,
        "convergence": convergence,
    }
    return ExperimentResult("TheoremCheck", THEOREM_COLUMNS, rows, summary, _metadata(spec))


PNK_COLUMNS = [
    "n", "d", "k", "formula_exact", "formula",
    "wrong_mean", "wrong_se", "all_mean", "all_se",
    "wrong_dplus1_mean", "wrong_dplus1_se",
    "deviation_wrong", "deviation_all", "deviation_wrong_dplus1", "range_ok", "terminal_ok", "pass", "error",
]


def run_pnk_compare(spec: ExperimentSpec) -> ExperimentResult:
    p = spec.parameters
    rows = []
    for d in p.d:
        for n in p.n:
            for k in range(n + 1):
                row = {"n": n, "d": d, "k": k}
                try:
                    exact = pnk_closed_form(n, k, d)
                    est = {
                        m: pnk_monte_carlo(n, k, d, m, p.trials, _cell_seed(p.seed, n, k, d, i), spec.workers)
                        for i, m in enumerate(GenerativeModel)
                    }
                    wrong = est[GenerativeModel.RESIDUAL_OVER_WRONG_CLASSES]
                    every = est[GenerativeModel.RESIDUAL_OVER_ALL_CLASSES]
                    # The closed form counts d wrong classes besides the true one.
                    shifted = pnk_monte_carlo(
                        n, k, d + 1, GenerativeModel.RESIDUAL_OVER_WRONG_CLASSES, p.trials,
                        _cell_seed(p.seed, n, k, d, 2), spec.workers,
                    )
                    range_ok = all(0.0 <= v <= 1.0 for v in (exact.value, wrong.mean, every.mean, shifted.mean))
                    terminal_ok = k < n or (
                        exact.exact == 1 and wrong.mean == 1.0 and every.mean == 1.0 and shifted.mean == 1.0
                    )
                    row.update(
                        formula_exact=f"{exact.exact.numerator}/{exact.exact.denominator}",
                        formula=exact.value,
                        wrong_mean=wrong.mean, wrong_se=wrong.stderr,
                        all_mean=every.mean, all_se=every.stderr,
                        wrong_dplus1_mean=shifted.mean, wrong_dplus1_se=shifted.stderr,
                        deviation_wrong=wrong.mean - exact.value,
                        deviation_all=every.mean - exact.value,
                        deviation_wrong_dplus1=shifted.mean - exact.value,
                        range_ok=range_ok, terminal_ok=terminal_ok,
                        **{"pass": range_ok and terminal_ok}, error=None,
                    )
                except MajvoteError as exc:
                    row.update({"pass": False, "error": str(exc)})
                rows.append(row)
    passed = sum(bool(r["pass"]) for r in rows)
    summary = {"rows": len(rows), "internal_checks_passed": passed, "formula_vs_simulation": "reported, not asserted"}
    return ExperimentResult("PnkCompare", PNK_COLUMNS, rows, summary, _metadata(spec))


BENCH_COLUMNS = [
    "instance", "instance_seed", "n", "budget",
    "exhaustive_accuracy", "exhaustive_members", "exhaustive_evaluations",
    "stochastic_accuracy", "stochastic_members", "stochastic_evaluations",
    "hit", "dominance_ok", "error",
]


def parse_stop(text: str):
    if text == "fixed":
        return FixedRestarts()
    if text.startswith("improve:"):
        try:
            return ImprovementProbability(float(text[len("improve:"):]))
        except ValueError as exc:
            if isinstance(exc, InvalidInputError):
                raise
            raise InvalidInputError(f"bad stop rule {text!r}") from None
    raise InvalidInputError(f"unknown stop rule {text!r}; use fixed or improve:<eps>")


def run_solver_benchmark(spec: ExperimentSpec) -> ExperimentResult:
    p = spec.parameters
    scheme = parse_scheme(p.scheme)
    stop = parse_stop(p.stop)
    rows = []
    for i in range(p.instances):
        inst_seed = (p.seed + i) % 2**64
        row = {"instance": i, "instance_seed": inst_seed, "n": p.n}
        try:
            pool = pool_generate(p.n, p.accuracy_range, p.time_range, inst_seed)
            budget = p.budget_fraction * float(np.sum(pool.times))
            req = SolveRequest(
                pool, budget, scheme, restarts=p.restarts, seed=inst_seed,
                weight_exponent=p.weight_exponent, stop_rule=stop,
            )
            ex = solve_exhaustive(req)
            st = solve_stochastic(req)
            row.update(
                budget=budget,
                exhaustive_accuracy=ex.accuracy,
                exhaustive_members=list(ex.best.member_ids),
                exhaustive_evaluations=ex.evaluations,
                stochastic_accuracy=st.accuracy,
                stochastic_members=list(st.best.member_ids),
                stochastic_evaluations=st.evaluations,
                hit=abs(st.accuracy - ex.accuracy) <= 1e-12,
                dominance_ok=st.accuracy <= ex.accuracy + 1e-12,
                error=None,
            )
        except MajvoteError as exc:
            row.update(hit=False, dominance_ok=False, error=str(exc))
        rows.append(row)
    hits = sum(bool(r["hit"]) for r in rows)
    summary = {
        "instances": len(rows),
        "hits": hits,
        "hit_rate": hits / len(rows) if rows else None,
        "dominance_ok": all(r["dominance_ok"] for r in rows),
    }
    return ExperimentResult("SolverBenchmark", BENCH_COLUMNS, rows, summary, _metadata(spec))


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    runner = {
        "TheoremCheck": run_theorem_check,
        "PnkCompare": run_pnk_compare,
        "SolverBenchmark": run_solver_benchmark,
    }[spec.kind]
    return runner(spec)
